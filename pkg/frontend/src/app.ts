/**
 * Single-page controller. The location URL is the single source of
 * truth: every view transition pushes a URL, and rendering always starts
 * from parsing it, so reload and back/forward reconstruct identical
 * state and issue equivalent API requests.
 */

import { ApiClient, ApiRequestError, FacetEntry, SearchResponse } from './api.js';
import { clear, el } from './dom.js';
import { appendFacetClause } from './query.js';
import {
  DEFAULT_STATE,
  SortKey,
  UiSearchState,
  isSearchable,
  parseState,
  serializeState,
  toSearchParams,
} from './state.js';
import { AdvancedFormView } from './views/advanced.js';
import { BrowseTreeView } from './views/browse.js';
import { RecordView } from './views/record.js';
import { renderError, renderResults } from './views/results.js';

export type View = 'home' | 'results' | 'advanced' | 'browse' | 'record';

export interface Route {
  view: View;
  state: UiSearchState;
  recordId?: string;
}

export const parseRoute = (search: string): Route => {
  const params = new URLSearchParams(search);
  const view = (params.get('view') ?? 'home') as View;
  const state = parseState(params);
  if (view === 'record') {
    return { view, state, recordId: params.get('id') ?? '' };
  }
  if (['home', 'results', 'advanced', 'browse'].includes(view)) {
    return { view, state };
  }
  return { view: 'home', state };
};

export const routeUrl = (route: Route): string => {
  if (route.view === 'home') return '?';
  const base = `?view=${route.view}`;
  if (route.view === 'record') {
    return `${base}&id=${encodeURIComponent(route.recordId ?? '')}&${serializeState(route.state)}`;
  }
  if (route.view === 'results') return `${base}&${serializeState(route.state)}`;
  return base;
};

export class App {
  private lastResponse: SearchResponse | null = null;
  private lastResultsState: UiSearchState = DEFAULT_STATE;

  constructor(
    private readonly root: HTMLElement,
    private readonly searchBox: HTMLInputElement,
    private readonly api: ApiClient,
  ) {}

  start(): void {
    window.addEventListener('popstate', () => void this.render(parseRoute(location.search)));
    void this.render(parseRoute(location.search));
  }

  navigate(route: Route): void {
    history.pushState(null, '', routeUrl(route));
    void this.render(route);
  }

  private async render(route: Route): Promise<void> {
    switch (route.view) {
      case 'results':
        await this.showResults(route.state);
        return;
      case 'record':
        await new RecordView(this.root, this.api, route.recordId ?? '', () =>
          this.navigate({ view: 'results', state: this.lastResultsState }),
        ).show();
        return;
      case 'browse':
        await new BrowseTreeView(this.root, this.api, (path) => this.onBrowseLeaf(path)).show();
        return;
      case 'advanced':
        await this.showAdvanced();
        return;
      default:
        this.showHome();
    }
  }

  submitSimpleSearch(q: string): void {
    const trimmed = q.trim();
    if (!trimmed) return;
    this.navigate({ view: 'results', state: { ...DEFAULT_STATE, q: trimmed } });
  }

  private showHome(): void {
    clear(this.root);
    this.root.append(
      el('p', { class: 'home-blurb' },
        'Search harvested dataset metadata by text, field, time period, and region. ',
        'Use the box above for a simple full-text search, or:'),
      el('ul', {},
        el('li', {}, el('a', { href: '#', onclick: (ev) => { ev.preventDefault(); this.navigate({ view: 'advanced', state: DEFAULT_STATE }); } }, 'Advanced search')),
        el('li', {}, el('a', { href: '#', onclick: (ev) => { ev.preventDefault(); this.navigate({ view: 'browse', state: DEFAULT_STATE }); } }, 'Browse the keyword tree'))),
    );
  }

  private async showResults(state: UiSearchState): Promise<void> {
    if (!isSearchable(state)) {
      this.showHome();
      return;
    }
    this.searchBox.value = state.q;
    let response: SearchResponse;
    try {
      response = await this.api.search(toSearchParams(state));
    } catch (err) {
      if ((err as Error).name === 'AbortError') return; // superseded by a newer search
      const message =
        err instanceof ApiRequestError ? `Search failed: ${err.detail.message}` : `Search failed: ${(err as Error).message}`;
      renderError(this.root, message);
      return;
    }
    this.lastResponse = response;
    this.lastResultsState = state;
    renderResults(this.root, state, response, {
      onFacetClick: (field, value) => {
        const base = this.lastResponse?.q ?? state.q;
        this.navigate({
          view: 'results',
          state: { ...state, q: appendFacetClause(base, field, value), matchAll: false, start: 0 },
        });
      },
      onSortChange: (sort: SortKey) =>
        this.navigate({ view: 'results', state: { ...state, sort, start: 0 } }),
      onPage: (start: number) => this.navigate({ view: 'results', state: { ...state, start } }),
      onOpenRecord: (id: string) => this.navigate({ view: 'record', state, recordId: id }),
      rssUrl: this.api.rssUrl(toSearchParams(state)),
      bookmarkUrl: response.bookmark_url,
    });
  }

  private async showAdvanced(): Promise<void> {
    clear(this.root);
    let providers: FacetEntry[] = [];
    try {
      const probe = await this.api.search(toSearchParams({ ...DEFAULT_STATE, matchAll: true, rows: 1 }));
      providers = probe.facets.datasource ?? [];
    } catch {
      // provider list is a convenience; the form still works without it
    }
    new AdvancedFormView(this.root, providers, (state) =>
      this.navigate({ view: 'results', state }),
    ).show();
  }

  private onBrowseLeaf(path: string[]): void {
    const leaf = path[path.length - 1] ?? '';
    const tokens = leaf.toLowerCase().split(/[^0-9a-z]+/).filter((t) => t.length >= 2);
    const q = tokens.map((t) => `keyword:${t}`).join(' AND ');
    if (q) this.navigate({ view: 'results', state: { ...DEFAULT_STATE, q } });
  }
}
