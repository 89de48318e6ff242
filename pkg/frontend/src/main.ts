import { Api } from './api.js';
import { renderSearchPage } from './searchPage.js';
import { renderVotingPage } from './votingPage.js';

const USER_KEY = 'analogy-search-user';

function currentUser(): string {
    return window.localStorage.getItem(USER_KEY) ?? 'anon';
}

function userBar(onChange: () => void): HTMLElement {
    const bar = document.createElement('div');
    bar.className = 'user-bar';
    const label = document.createElement('label');
    const input = document.createElement('input');
    input.type = 'text';
    input.value = currentUser();
    input.addEventListener('change', () => {
        window.localStorage.setItem(USER_KEY, input.value.trim() || 'anon');
        onChange();
    });
    label.append('Voting as ', input);
    bar.appendChild(label);
    return bar;
}

async function route(root: HTMLElement, api: Api): Promise<void> {
    const match = window.location.hash.match(/^#session\/([0-9a-f]+)$/);
    if (match) {
        const stage = document.createElement('div');
        await renderVotingPage(stage, api, match[1], currentUser());
        root.replaceChildren(userBar(() => void route(root, api)), stage);
    } else {
        await renderSearchPage(root, api);
    }
}

function main(): void {
    const root = document.querySelector<HTMLDivElement>('#app');
    if (!root) return;
    const api = new Api();
    const go = () => {
        route(root, api).catch((err) => {
            root.replaceChildren();
            const message = document.createElement('p');
            message.className = 'status';
            message.textContent = `failed to load: ${err instanceof Error ? err.message : String(err)}`;
            root.appendChild(message);
        });
    };
    window.addEventListener('hashchange', go);
    go();
}

main();
