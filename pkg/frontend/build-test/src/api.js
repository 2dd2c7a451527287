/**
 * Typed client for the search API.
 *
 * The UI performs no computation over records: every count, score, star,
 * and snippet is taken verbatim from these responses. At most one search
 * request is in flight; newer searches abort stale ones so responses
 * never render out of order.
 */
import { strictEncode } from './state.js';
export class ApiRequestError extends Error {
    status;
    detail;
    constructor(status, detail) {
        super(detail.message);
        this.status = status;
        this.detail = detail;
    }
}
const asError = async (resp) => {
    let detail = { code: 'http_error', message: `HTTP ${resp.status}` };
    try {
        const body = await resp.json();
        if (body && body.error)
            detail = body.error;
    }
    catch {
        // non-JSON error body; keep the generic detail
    }
    return new ApiRequestError(resp.status, detail);
};
export class ApiClient {
    baseUrl;
    fetchFn;
    inflightSearch = null;
    constructor(baseUrl = '', fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    searchUrl(params) {
        const qs = params
            .map(([k, v]) => `${strictEncode(k)}=${strictEncode(v)}`)
            .join('&');
        return `${this.baseUrl}/api/search?${qs}`;
    }
    rssUrl(params) {
        return this.searchUrl(params).replace('/api/search?', '/api/rss?');
    }
    /** Runs a search, aborting any previous one still in flight. */
    async search(params) {
        this.inflightSearch?.abort();
        const controller = new AbortController();
        this.inflightSearch = controller;
        try {
            const resp = await this.fetchFn(this.searchUrl(params), { signal: controller.signal });
            if (!resp.ok)
                throw await asError(resp);
            return (await resp.json());
        }
        finally {
            if (this.inflightSearch === controller)
                this.inflightSearch = null;
        }
    }
    async recordSummary(id) {
        const resp = await this.fetchFn(`${this.baseUrl}/api/record/${encodeURIComponent(id)}?style=summary`);
        if (!resp.ok)
            throw await asError(resp);
        return (await resp.json());
    }
    async recordFullText(id) {
        const resp = await this.fetchFn(`${this.baseUrl}/api/record/${encodeURIComponent(id)}?style=fgdc_text`);
        if (!resp.ok)
            throw await asError(resp);
        return await resp.text();
    }
    async browse(path) {
        const param = path.length ? `?path=${encodeURIComponent(path.join('/'))}` : '';
        const resp = await this.fetchFn(`${this.baseUrl}/api/browse${param}`);
        if (!resp.ok)
            throw await asError(resp);
        return (await resp.json());
    }
}
