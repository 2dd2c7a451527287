/**
 * UiSearchState and its URL form.
 *
 * The URL is the single source of truth: state serializes to the same
 * parameter names and order the API's canonical bookmark URLs use, and
 * reloading any UI URL reconstructs an identical state (and therefore an
 * identical API request).
 */
export const SORT_KEYS = ['index_rank', 'period_of_record', 'source', 'project'];
export const SORT_LABELS = {
    index_rank: 'Index Rank',
    period_of_record: 'Period of record',
    source: 'Source',
    project: 'Project',
};
export const DEFAULT_STATE = {
    q: '',
    dateStart: '',
    dateEnd: '',
    bbox: '',
    sort: 'index_rank',
    start: 0,
    rows: 10,
    matchAll: false,
};
/** Request parameters in the canonical bookmark order. */
export const toSearchParams = (state) => {
    const params = [['q', state.q]];
    if (state.dateStart)
        params.push(['date_start', state.dateStart]);
    if (state.dateEnd)
        params.push(['date_end', state.dateEnd]);
    if (state.bbox)
        params.push(['bbox', state.bbox]);
    params.push(['sort', state.sort]);
    params.push(['start', String(state.start)]);
    params.push(['rows', String(state.rows)]);
    if (state.matchAll)
        params.push(['match_all', 'true']);
    return params;
};
/** RFC-3986 strict percent-encoding, matching the API's bookmark URLs
 * (encodeURIComponent alone leaves !'()* unencoded). */
export const strictEncode = (value) => encodeURIComponent(value).replace(/[!'()*]/g, (c) => `%${c.charCodeAt(0).toString(16).toUpperCase()}`);
export const serializeState = (state) => toSearchParams(state)
    .map(([k, v]) => `${strictEncode(k)}=${strictEncode(v)}`)
    .join('&');
export const parseState = (query) => {
    const params = typeof query === 'string' ? new URLSearchParams(query) : query;
    const sortRaw = params.get('sort') ?? DEFAULT_STATE.sort;
    const sort = SORT_KEYS.includes(sortRaw) ? sortRaw : DEFAULT_STATE.sort;
    const int = (name, fallback) => {
        const raw = params.get(name);
        if (raw === null)
            return fallback;
        const value = Number.parseInt(raw, 10);
        return Number.isFinite(value) && value >= 0 ? value : fallback;
    };
    return {
        q: params.get('q') ?? '',
        dateStart: params.get('date_start') ?? '',
        dateEnd: params.get('date_end') ?? '',
        bbox: params.get('bbox') ?? '',
        sort,
        start: int('start', DEFAULT_STATE.start),
        rows: int('rows', DEFAULT_STATE.rows),
        matchAll: params.get('match_all') === 'true',
    };
};
export const statesEqual = (a, b) => serializeState(a) === serializeState(b);
/** True when the state describes a runnable search. */
export const isSearchable = (state) => state.q.trim().length > 0 || state.matchAll || !!state.dateStart || !!state.dateEnd || !!state.bbox;
