// Typed client for the analogy search HTTP API (/api/v1).
// The UI talks to the service only through this module.

export interface PaperSummary {
    paper_id: string;
    title: string;
}

export interface Paper {
    paper_id: string;
    title: string;
    abstract: string;
    segments: Record<string, string>;
}

export interface SearchResult extends Paper {
    score: number;
}

export interface SearchConfigBody {
    algorithm?: string;
    near_aspects?: [string, number][];
    far_aspect?: string | null;
    pool_size?: number;
    result_size?: number;
    k_clusters?: number;
    reduce_mode?: string;
    rng_seed?: number;
}

export interface SessionView {
    session_id: string;
    seed_paper: Paper;
    results: Paper[];
    baseline_only: boolean;
    closed: boolean;
}

export type Usefulness = 'useful' | 'maybe_useful' | 'not_useful';
export type Interestingness = 'interesting' | 'maybe_interesting' | 'not_interesting';

export interface VoteBody {
    session_id: string;
    result_paper_id: string;
    user_id: string;
    if_useful: Usefulness;
    if_interesting: Interestingness;
    useful_comment?: string;
    interesting_comment?: string;
}

export interface SavedVote {
    result_paper_id: string;
    if_useful: Usefulness;
    if_interesting: Interestingness;
    useful_comment: string;
    interesting_comment: string;
    user_id: string;
}

/** Error body from the service: machine-readable code plus a message. */
export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly code: string,
        message: string,
    ) {
        super(message);
        this.name = 'ApiError';
    }
}

async function raiseFor(response: Response): Promise<never> {
    let code = 'http_error';
    let message = `${response.status} ${response.statusText}`;
    try {
        const body = await response.json();
        if (typeof body?.code === 'string') code = body.code;
        if (typeof body?.message === 'string') message = body.message;
    } catch {
        // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, code, message);
}

export class Api {
    constructor(private readonly base: string = '') {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await fetch(`${this.base}/api/v1${path}`, init);
        if (!response.ok) {
            await raiseFor(response);
        }
        return response.json() as Promise<T>;
    }

    private post<T>(path: string, body: unknown): Promise<T> {
        return this.request<T>(path, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(body),
        });
    }

    async listPapers(): Promise<PaperSummary[]> {
        const data = await this.request<{ papers: PaperSummary[] }>('/papers');
        return data.papers;
    }

    getPaper(paperId: string): Promise<Paper> {
        return this.request<Paper>(`/papers/${encodeURIComponent(paperId)}`);
    }

    async search(queryId: string, config: SearchConfigBody): Promise<SearchResult[]> {
        const data = await this.post<{ results: SearchResult[] }>('/search', {
            query_id: queryId,
            config,
        });
        return data.results;
    }

    createAbSession(seedPaperId: string, config: SearchConfigBody, seed = 0): Promise<SessionView> {
        return this.post<SessionView>('/ab-sessions', {
            seed_paper_id: seedPaperId,
            config,
            seed,
        });
    }

    getAbSession(sessionId: string): Promise<SessionView> {
        return this.request<SessionView>(`/ab-sessions/${encodeURIComponent(sessionId)}`);
    }

    async vote(body: VoteBody): Promise<void> {
        await this.post<{ recorded: boolean }>('/votes', body);
    }

    async savedVotes(sessionId: string, userId: string): Promise<SavedVote[]> {
        const path = `/ab-sessions/${encodeURIComponent(sessionId)}/votes`
            + `?user_id=${encodeURIComponent(userId)}`;
        const data = await this.request<{ votes: SavedVote[] }>(path);
        return data.votes;
    }
}
