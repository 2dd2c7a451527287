/**
 * Results page: facet panels, sort control, paging header, hit rows with
 * the ten-slot star bar, and the RSS/bookmark buttons.
 */

import { FacetEntry, FacetField, Hit, SearchResponse } from '../api.js';
import { clear, el } from '../dom.js';
import { SORT_KEYS, SORT_LABELS, SortKey, UiSearchState } from '../state.js';

export interface ResultsCallbacks {
  onFacetClick(field: FacetField, value: string): void;
  onSortChange(sort: SortKey): void;
  onPage(start: number): void;
  onOpenRecord(id: string): void;
  rssUrl: string;
  bookmarkUrl: string;
}

const FACET_TITLES: [FacetField, string][] = [
  ['datasource', 'Filter by data providers'],
  ['parameter', 'Filter by parameter'],
  ['sensor', 'Filter by sensor'],
  ['topic', 'Filter by topic'],
  ['project', 'Filter by project'],
];

export const starBar = (stars: number | null): string => {
  if (stars === null) return '';
  const filled = Math.max(0, Math.min(10, stars));
  return '★'.repeat(filled) + '☆'.repeat(10 - filled);
};

export const pagingHeader = (response: SearchResponse): string => {
  if (response.total === 0) return 'Your search found: 0 documents.';
  const first = response.start + 1;
  const last = Math.min(response.start + response.hits.length, response.total);
  return `Viewing Documents ${first} - ${last} out of ${response.total}`;
};

const facetPanel = (
  field: FacetField,
  title: string,
  entries: FacetEntry[],
  callbacks: ResultsCallbacks,
): HTMLElement => {
  const list = el('ul', { class: 'facet-values' });
  for (const entry of entries) {
    list.append(
      el(
        'li',
        {},
        el(
          'a',
          { href: '#', onclick: (ev) => { ev.preventDefault(); callbacks.onFacetClick(field, entry.value); } },
          `${entry.label} (${entry.count})`,
        ),
      ),
    );
  }
  if (!entries.length) list.append(el('li', { class: 'facet-empty' }, '(none)'));
  return el('section', { class: 'facet-panel' }, el('h3', {}, title), list);
};

const hitRow = (hit: Hit, callbacks: ResultsCallbacks): HTMLElement => {
  const period = hit.date_range ? ` (${hit.date_range.start} - ${hit.date_range.end})` : '';
  const links = el('span', { class: 'hit-links' });
  if (hit.data_link) {
    links.append(el('a', { href: hit.data_link, target: '_blank' }, 'Get data'), ' ');
  }
  links.append(
    el(
      'a',
      { href: '#', onclick: (ev) => { ev.preventDefault(); callbacks.onOpenRecord(hit.id); } },
      'View full metadata',
    ),
  );
  return el(
    'article',
    { class: 'hit' },
    el(
      'h4',
      {},
      el(
        'a',
        { href: '#', onclick: (ev) => { ev.preventDefault(); callbacks.onOpenRecord(hit.id); } },
        hit.title + period,
      ),
    ),
    el('div', { class: 'hit-source' }, `Datasource: ${hit.datasource.label}`),
    hit.project ? el('div', { class: 'hit-project' }, `Project: ${hit.project}`) : null,
    hit.snippet ? el('p', { class: 'hit-snippet' }, hit.snippet) : null,
    el('div', { class: 'hit-footer' }, el('span', { class: 'stars', title: 'relative relevance' }, starBar(hit.stars)), ' ', links),
  );
};

export const renderResults = (
  root: HTMLElement,
  state: UiSearchState,
  response: SearchResponse,
  callbacks: ResultsCallbacks,
): void => {
  clear(root);
  const sortSelect = el('select', {
    onchange: (ev) => callbacks.onSortChange((ev.target as HTMLSelectElement).value as SortKey),
  });
  for (const key of SORT_KEYS) {
    const opt = el('option', { value: key }, SORT_LABELS[key]);
    if (key === state.sort) opt.setAttribute('selected', 'selected');
    sortSelect.append(opt);
  }

  const prevDisabled = response.start <= 0;
  const nextDisabled = response.start + response.hits.length >= response.total;
  const prev = el('button', {
    onclick: () => callbacks.onPage(Math.max(0, response.start - state.rows)),
  }, 'Prev');
  if (prevDisabled) prev.setAttribute('disabled', 'disabled');
  const next = el('button', {
    onclick: () => callbacks.onPage(response.start + state.rows),
  }, 'Next');
  if (nextDisabled) next.setAttribute('disabled', 'disabled');

  const header = el(
    'div',
    { class: 'results-header' },
    el('div', { class: 'results-count' }, pagingHeader(response)),
    el('div', { class: 'results-tools' },
      el('label', {}, 'Sort By: ', sortSelect),
      ' ', prev, ' ', next, ' ',
      el('a', { class: 'button', href: callbacks.rssUrl, target: '_blank' }, 'RSS'),
      ' ',
      el('a', { class: 'button', href: callbacks.bookmarkUrl }, 'Bookmark'),
    ),
  );

  const facets = el('aside', { class: 'facets' });
  for (const [field, title] of FACET_TITLES) {
    facets.append(facetPanel(field, title, response.facets[field] ?? [], callbacks));
  }

  const hits = el('div', { class: 'hits' });
  for (const hit of response.hits) hits.append(hitRow(hit, callbacks));
  if (!response.hits.length) hits.append(el('p', {}, 'No matching records.'));

  root.append(header, el('div', { class: 'results-body' }, facets, hits));
};

export const renderError = (root: HTMLElement, message: string): void => {
  const existing = root.querySelector('.error');
  if (existing) existing.remove();
  root.prepend(el('div', { class: 'error' }, message));
};
