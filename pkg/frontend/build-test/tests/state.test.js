import assert from 'node:assert/strict';
import { test } from 'node:test';
import { DEFAULT_STATE, SORT_KEYS, parseState, serializeState, statesEqual, toSearchParams, } from '../src/state.js';
const mulberry32 = (seed) => () => {
    seed |= 0;
    seed = (seed + 0x6d2b79f5) | 0;
    let t = Math.imul(seed ^ (seed >>> 15), 1 | seed);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
};
const randomState = (rand) => {
    const pick = (xs) => xs[Math.floor(rand() * xs.length)];
    const maybe = (value, empty) => (rand() < 0.5 ? value : empty);
    return {
        q: pick(['carbon', 'fulltext:carbon AND topic:biosphere', 'soil moisture', 'datasource:(daac lter)', '']),
        dateStart: maybe('1985-01-01', ''),
        dateEnd: maybe('1995-12-31', ''),
        bbox: maybe('-111,51,-93,60', ''),
        sort: pick([...SORT_KEYS]),
        start: Math.floor(rand() * 5) * 10,
        rows: pick([10, 20, 50]),
        matchAll: rand() < 0.3,
    };
};
test('serialize/parse round-trips 20 random states exactly', () => {
    const rand = mulberry32(20260808);
    for (let i = 0; i < 20; i++) {
        const state = randomState(rand);
        const reloaded = parseState(serializeState(state));
        assert.deepEqual(reloaded, state);
        assert.ok(statesEqual(state, reloaded));
    }
});
test('parameters appear in the canonical bookmark order', () => {
    const state = {
        q: 'carbon', dateStart: '1990-01-01', dateEnd: '1995-12-31',
        bbox: '-10,-5,10,5', sort: 'source', start: 20, rows: 25, matchAll: false,
    };
    const keys = toSearchParams(state).map(([k]) => k);
    assert.deepEqual(keys, ['q', 'date_start', 'date_end', 'bbox', 'sort', 'start', 'rows']);
});
test('blank optional inputs are omitted from the request', () => {
    const keys = toSearchParams(DEFAULT_STATE).map(([k]) => k);
    assert.deepEqual(keys, ['q', 'sort', 'start', 'rows']);
});
test('match_all is carried only when set', () => {
    const on = toSearchParams({ ...DEFAULT_STATE, matchAll: true }).map(([k]) => k);
    assert.ok(on.includes('match_all'));
    const off = toSearchParams(DEFAULT_STATE).map(([k]) => k);
    assert.ok(!off.includes('match_all'));
});
test('unknown sort and negative paging fall back to defaults', () => {
    const state = parseState('q=x&sort=shiny&start=-3&rows=abc');
    assert.equal(state.sort, 'index_rank');
    assert.equal(state.start, 0);
    assert.equal(state.rows, 10);
});
test('query text survives percent-encoding round trips', () => {
    const state = {
        ...DEFAULT_STATE,
        q: 'fulltext:carbon AND datasource:(daac landval rgd lter obfs)',
    };
    const qs = serializeState(state);
    assert.ok(!qs.includes('('));
    assert.equal(parseState(qs).q, state.q);
});
