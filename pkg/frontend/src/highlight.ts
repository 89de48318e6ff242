// Segment highlighting: split an abstract into spans, each carrying at
// most one functional label, such that concatenating the span texts
// reproduces the abstract byte for byte.

export interface Span {
    text: string;
    label: SegmentLabel | null;
}

export const LEGEND = ['Background', 'Purpose', 'Method', 'Mechanism', 'Findings'] as const;

export type SegmentLabel = (typeof LEGEND)[number];

// Segment keys in the order they appear in an abstract. big_problem is a
// sub-span of the problem segment and is not highlighted separately; the
// problem segment wears the Purpose label.
const SEGMENT_ORDER: ReadonlyArray<readonly [string, SegmentLabel]> = [
    ['background', 'Background'],
    ['problem', 'Purpose'],
    ['mechanism', 'Mechanism'],
    ['method', 'Method'],
    ['findings', 'Findings'],
];

/**
 * Spans are cut from the abstract string itself: a segment is labeled
 * only where its text occurs verbatim at or after the previous match,
 * so the concatenation invariant holds by construction even when
 * segments are missing or fail to match.
 */
export function buildSpans(abstract: string, segments: Record<string, string>): Span[] {
    const spans: Span[] = [];
    let cursor = 0;
    for (const [key, label] of SEGMENT_ORDER) {
        const text = segments[key];
        if (!text) continue;
        const at = abstract.indexOf(text, cursor);
        if (at < 0) continue;
        if (at > cursor) {
            spans.push({ text: abstract.slice(cursor, at), label: null });
        }
        spans.push({ text: abstract.slice(at, at + text.length), label });
        cursor = at + text.length;
    }
    if (cursor < abstract.length) {
        spans.push({ text: abstract.slice(cursor), label: null });
    }
    return spans;
}

export function labelClass(label: SegmentLabel): string {
    return `seg-${label.toLowerCase()}`;
}

/** One <p> per abstract; labeled spans get a per-label CSS class. */
export function renderAbstract(abstract: string, segments: Record<string, string>): HTMLParagraphElement {
    const p = document.createElement('p');
    p.className = 'abstract';
    for (const span of buildSpans(abstract, segments)) {
        const el = document.createElement('span');
        el.textContent = span.text;
        if (span.label !== null) {
            el.className = `seg ${labelClass(span.label)}`;
        }
        p.appendChild(el);
    }
    return p;
}

/**
 * The fixed five-label legend. Clicking a label toggles its highlight
 * on `target` (highlight visibility only; the search is untouched).
 */
export function renderLegend(target: HTMLElement): HTMLElement {
    const legend = document.createElement('div');
    legend.className = 'legend';
    for (const label of LEGEND) {
        const button = document.createElement('button');
        button.type = 'button';
        button.className = `legend-item seg ${labelClass(label)}`;
        button.textContent = label;
        button.addEventListener('click', () => {
            target.classList.toggle(`hide-${label.toLowerCase()}`);
            button.classList.toggle('legend-off');
        });
        legend.appendChild(button);
    }
    return legend;
}
