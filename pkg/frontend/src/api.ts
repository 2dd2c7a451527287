/**
 * Typed client for the search API.
 *
 * The UI performs no computation over records: every count, score, star,
 * and snippet is taken verbatim from these responses. At most one search
 * request is in flight; newer searches abort stale ones so responses
 * never render out of order.
 */

import { strictEncode } from './state.js';

export interface DateRange {
  start: string;
  end: string;
}

export interface Datasource {
  value: string;
  label: string;
}

export interface Hit {
  id: string;
  title: string;
  date_range: DateRange | null;
  datasource: Datasource;
  project: string | null;
  snippet: string;
  stars: number | null;
  score: number;
  data_link: string | null;
  metadata_link: string | null;
  matched_fields: Record<string, string[]>;
}

export interface FacetEntry {
  value: string;
  label: string;
  count: number;
}

export type FacetField = 'datasource' | 'parameter' | 'sensor' | 'topic' | 'project';

export interface SearchResponse {
  total: number;
  start: number;
  rows: number;
  sort: string;
  q: string;
  hits: Hit[];
  facets: Record<FacetField, FacetEntry[]>;
  bookmark_url: string;
}

export interface SummaryRow {
  label: string;
  value: string;
}

export interface RecordSummary {
  id: string;
  style: 'summary';
  rows: SummaryRow[];
}

export interface BrowseChild {
  segment: string;
  count: number;
  has_children: boolean;
}

export interface BrowseNode {
  path: string[];
  children: BrowseChild[];
}

export interface ApiError {
  code: string;
  message: string;
  offset?: number;
}

export class ApiRequestError extends Error {
  constructor(readonly status: number, readonly detail: ApiError) {
    super(detail.message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const asError = async (resp: Response): Promise<ApiRequestError> => {
  let detail: ApiError = { code: 'http_error', message: `HTTP ${resp.status}` };
  try {
    const body = await resp.json();
    if (body && body.error) detail = body.error as ApiError;
  } catch {
    // non-JSON error body; keep the generic detail
  }
  return new ApiRequestError(resp.status, detail);
};

export class ApiClient {
  private inflightSearch: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  searchUrl(params: [string, string][]): string {
    const qs = params
      .map(([k, v]) => `${strictEncode(k)}=${strictEncode(v)}`)
      .join('&');
    return `${this.baseUrl}/api/search?${qs}`;
  }

  rssUrl(params: [string, string][]): string {
    return this.searchUrl(params).replace('/api/search?', '/api/rss?');
  }

  /** Runs a search, aborting any previous one still in flight. */
  async search(params: [string, string][]): Promise<SearchResponse> {
    this.inflightSearch?.abort();
    const controller = new AbortController();
    this.inflightSearch = controller;
    try {
      const resp = await this.fetchFn(this.searchUrl(params), { signal: controller.signal });
      if (!resp.ok) throw await asError(resp);
      return (await resp.json()) as SearchResponse;
    } finally {
      if (this.inflightSearch === controller) this.inflightSearch = null;
    }
  }

  async recordSummary(id: string): Promise<RecordSummary> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/record/${encodeURIComponent(id)}?style=summary`,
    );
    if (!resp.ok) throw await asError(resp);
    return (await resp.json()) as RecordSummary;
  }

  async recordFullText(id: string): Promise<string> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/record/${encodeURIComponent(id)}?style=fgdc_text`,
    );
    if (!resp.ok) throw await asError(resp);
    return await resp.text();
  }

  async browse(path: string[]): Promise<BrowseNode> {
    const param = path.length ? `?path=${encodeURIComponent(path.join('/'))}` : '';
    const resp = await this.fetchFn(`${this.baseUrl}/api/browse${param}`);
    if (!resp.ok) throw await asError(resp);
    return (await resp.json()) as BrowseNode;
  }
}
