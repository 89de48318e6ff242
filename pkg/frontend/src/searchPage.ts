import { Api, ApiError, SearchConfigBody } from './api.js';
import { renderAbstract, renderLegend } from './highlight.js';

const ALGORITHMS = [
    'KnnKmeans',
    'NaiveCosine',
    'NaiveFarthest',
    'FarthestNeighbor',
    'LexicalBaseline',
];

const ASPECTS = [
    'purpose',
    'problem',
    'big_problem',
    'background',
    'mechanism',
    'method',
    'findings',
    'full_abstract',
];

function labeled(text: string, control: HTMLElement): HTMLLabelElement {
    const label = document.createElement('label');
    label.append(text, control);
    return label;
}

function select(name: string, options: string[], selected: string): HTMLSelectElement {
    const el = document.createElement('select');
    el.name = name;
    for (const option of options) {
        const o = document.createElement('option');
        o.value = option;
        o.textContent = option;
        el.appendChild(o);
    }
    // after insertion: selectedness set on detached options is lost in
    // some DOM implementations
    el.value = selected;
    return el;
}

function numberInput(name: string, value: number, min: number): HTMLInputElement {
    const el = document.createElement('input');
    el.type = 'number';
    el.name = name;
    el.min = String(min);
    el.value = String(value);
    return el;
}

function readConfig(form: HTMLFormElement): SearchConfigBody {
    const str = (name: string) => {
        const el = form.querySelector<HTMLInputElement | HTMLSelectElement>(`[name="${name}"]`);
        return el ? el.value : '';
    };
    const num = (name: string) => Number(str(name));
    return {
        algorithm: str('algorithm'),
        near_aspects: [[str('near'), 1.0]],
        far_aspect: str('far'),
        pool_size: num('pool_size'),
        result_size: num('result_size'),
        k_clusters: num('k_clusters'),
        rng_seed: num('rng_seed'),
    };
}

export async function renderSearchPage(root: HTMLElement, api: Api): Promise<void> {
    const page = document.createElement('div');
    page.className = 'page search-page';

    const heading = document.createElement('h1');
    heading.textContent = 'Analogy Search';
    page.appendChild(heading);

    const papers = await api.listPapers();

    const form = document.createElement('form');
    form.className = 'search-form';
    const seedSelect = select('seed', papers.map((p) => p.paper_id), papers[0]?.paper_id ?? '');
    for (const option of Array.from(seedSelect.options)) {
        const paper = papers.find((p) => p.paper_id === option.value);
        if (paper) option.textContent = `${paper.paper_id}: ${paper.title}`;
    }
    form.append(
        labeled('Seed paper', seedSelect),
        labeled('Algorithm', select('algorithm', ALGORITHMS, 'KnnKmeans')),
        labeled('Near aspect', select('near', ASPECTS, 'purpose')),
        labeled('Far aspect', select('far', ASPECTS, 'mechanism')),
        labeled('Pool', numberInput('pool_size', 20, 1)),
        labeled('Results', numberInput('result_size', 10, 1)),
        labeled('Clusters', numberInput('k_clusters', 5, 1)),
        labeled('Seed', numberInput('rng_seed', 0, 0)),
    );
    const searchButton = document.createElement('button');
    searchButton.type = 'submit';
    searchButton.textContent = 'Search';
    const abButton = document.createElement('button');
    abButton.type = 'button';
    abButton.className = 'ab-button';
    abButton.textContent = 'Start blind A/B test';
    form.append(searchButton, abButton);
    page.appendChild(form);

    const status = document.createElement('p');
    status.className = 'status';
    page.appendChild(status);

    const results = document.createElement('div');
    results.className = 'results';
    page.appendChild(renderLegend(results));
    page.appendChild(results);

    form.addEventListener('submit', async (event) => {
        event.preventDefault();
        status.textContent = 'searching...';
        try {
            const found = await api.search(seedSelect.value, readConfig(form));
            // built off-DOM first: an error mid-render must not leave a
            // half-replaced list
            const cards = found.map((result) => {
                const card = document.createElement('article');
                card.className = 'card result-card';
                const title = document.createElement('h3');
                title.textContent = result.title;
                const score = document.createElement('span');
                score.className = 'score';
                score.textContent = result.score.toFixed(4);
                title.appendChild(score);
                card.append(title, renderAbstract(result.abstract, result.segments));
                return card;
            });
            status.textContent = found.length === 0 ? 'no analogical matches' : '';
            results.replaceChildren(...cards);
        } catch (err) {
            status.textContent = err instanceof ApiError
                ? `search failed: ${err.message}`
                : 'search failed: service unreachable';
        }
    });

    abButton.addEventListener('click', async () => {
        status.textContent = 'creating session...';
        try {
            const session = await api.createAbSession(seedSelect.value, readConfig(form));
            window.location.hash = `#session/${session.session_id}`;
        } catch (err) {
            status.textContent = err instanceof ApiError
                ? `could not start session: ${err.message}`
                : 'could not start session: service unreachable';
        }
    });

    root.replaceChildren(page);
}
