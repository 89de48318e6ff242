import { Api, ApiError, Interestingness, Paper, Usefulness } from './api.js';
import { renderAbstract, renderLegend } from './highlight.js';

const USEFULNESS: ReadonlyArray<readonly [Usefulness, string]> = [
    ['useful', 'useful'],
    ['maybe_useful', 'maybe useful'],
    ['not_useful', 'not useful'],
];

const INTERESTINGNESS: ReadonlyArray<readonly [Interestingness, string]> = [
    ['interesting', 'interesting'],
    ['maybe_interesting', 'maybe interesting'],
    ['not_interesting', 'not interesting'],
];

export interface VotingPageHandle {
    /** Resolves once every save started so far has settled. */
    flush(): Promise<void>;
}

interface ItemState {
    ifUseful: Usefulness | null;
    ifInteresting: Interestingness | null;
    usefulComment: string;
    interestingComment: string;
    saved: boolean;
}

function radioGroup<T extends string>(
    groupName: string,
    choices: ReadonlyArray<readonly [T, string]>,
    current: T | null,
    onPick: (value: T) => void,
): HTMLFieldSetElement {
    const fieldset = document.createElement('fieldset');
    fieldset.className = 'vote-group';
    for (const [value, text] of choices) {
        const label = document.createElement('label');
        const input = document.createElement('input');
        input.type = 'radio';
        input.name = groupName;
        input.value = value;
        input.checked = value === current;
        input.addEventListener('change', () => {
            if (input.checked) onPick(value);
        });
        label.append(input, text);
        fieldset.appendChild(label);
    }
    return fieldset;
}

function commentField(placeholder: string, current: string, onChange: (value: string) => void): HTMLTextAreaElement {
    const area = document.createElement('textarea');
    area.placeholder = placeholder;
    area.value = current;
    area.addEventListener('change', () => onChange(area.value));
    return area;
}

export async function renderVotingPage(
    root: HTMLElement,
    api: Api,
    sessionId: string,
    userId: string,
): Promise<VotingPageHandle> {
    const [session, saved] = await Promise.all([
        api.getAbSession(sessionId),
        api.savedVotes(sessionId, userId),
    ]);
    const savedByPaper = new Map(saved.map((v) => [v.result_paper_id, v]));

    const page = document.createElement('div');
    page.className = 'page voting-page';

    const heading = document.createElement('h1');
    heading.textContent = 'Compare the results';
    page.appendChild(heading);

    const intro = document.createElement('p');
    intro.className = 'intro';
    intro.textContent = session.closed
        ? 'This session is closed; votes can no longer be changed.'
        : 'Rate every paper below. Each rating is saved the moment both choices are made.';
    page.appendChild(intro);

    const seedCard = document.createElement('article');
    seedCard.className = 'card seed-card';
    const seedTitle = document.createElement('h2');
    seedTitle.textContent = session.seed_paper.title;
    seedCard.append(seedTitle, renderAbstract(session.seed_paper.abstract, session.seed_paper.segments));
    page.appendChild(seedCard);

    const progress = document.createElement('p');
    progress.className = 'progress';
    page.appendChild(progress);

    const list = document.createElement('div');
    list.className = 'results';
    page.appendChild(renderLegend(list));
    page.appendChild(list);

    // in-flight saves; tests drain this instead of polling the DOM
    const pending = new Set<Promise<void>>();
    const states = new Map<string, ItemState>();

    function updateProgress(): void {
        const done = Array.from(states.values()).filter((s) => s.saved).length;
        progress.textContent = `${done} of ${states.size} voted`;
    }

    function save(paper: Paper, state: ItemState, badge: HTMLElement): void {
        if (state.ifUseful === null || state.ifInteresting === null) return;
        badge.textContent = 'saving...';
        const attempt = api
            .vote({
                session_id: sessionId,
                result_paper_id: paper.paper_id,
                user_id: userId,
                if_useful: state.ifUseful,
                if_interesting: state.ifInteresting,
                useful_comment: state.usefulComment,
                interesting_comment: state.interestingComment,
            })
            .then(() => {
                state.saved = true;
                badge.textContent = 'saved';
                updateProgress();
            })
            .catch((err) => {
                badge.textContent = err instanceof ApiError
                    ? `not saved: ${err.message}`
                    : 'not saved: service unreachable';
            });
        const tracked = attempt.finally(() => pending.delete(tracked));
        pending.add(tracked);
    }

    session.results.forEach((paper, position) => {
        const prior = savedByPaper.get(paper.paper_id);
        const state: ItemState = {
            ifUseful: prior?.if_useful ?? null,
            ifInteresting: prior?.if_interesting ?? null,
            usefulComment: prior?.useful_comment ?? '',
            interestingComment: prior?.interesting_comment ?? '',
            saved: prior !== undefined,
        };
        states.set(paper.paper_id, state);

        const card = document.createElement('article');
        card.className = 'card result-card';
        card.dataset.paperId = paper.paper_id;
        const title = document.createElement('h3');
        title.textContent = `${position + 1}. ${paper.title}`;
        const badge = document.createElement('span');
        badge.className = 'badge';
        badge.textContent = state.saved ? 'saved' : '';
        title.appendChild(badge);
        card.append(title, renderAbstract(paper.abstract, paper.segments));

        const controls = document.createElement('div');
        controls.className = 'vote-controls';
        controls.append(
            radioGroup(`useful-${paper.paper_id}`, USEFULNESS, state.ifUseful, (value) => {
                state.ifUseful = value;
                save(paper, state, badge);
            }),
            commentField('why (not) useful?', state.usefulComment, (value) => {
                state.usefulComment = value;
                save(paper, state, badge);
            }),
            radioGroup(`interesting-${paper.paper_id}`, INTERESTINGNESS, state.ifInteresting, (value) => {
                state.ifInteresting = value;
                save(paper, state, badge);
            }),
            commentField('why (not) interesting?', state.interestingComment, (value) => {
                state.interestingComment = value;
                save(paper, state, badge);
            }),
        );
        card.appendChild(controls);
        list.appendChild(card);
    });

    updateProgress();
    root.replaceChildren(page);

    return {
        async flush(): Promise<void> {
            while (pending.size > 0) {
                await Promise.allSettled(Array.from(pending));
            }
        },
    };
}
