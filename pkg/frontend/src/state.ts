// Client-side builder state. The UI never computes points or credits; this
// module only mirrors service responses and tracks the user's lock/exclude
// choices, which stay disjoint by construction.

import type { Card, Constraints, Fixture, InsightSeries, Recommendation } from "./api";

export interface InsightPanel {
    scope: "player" | "team";
    name: string;
    series: InsightSeries[];
    index: number;
}

export interface BuilderState {
    fixture: Fixture | null;
    cards: Card[];
    locks: Set<string>;
    excludes: Set<string>;
    constraints: Constraints;
    method: string;
    recommendation: Recommendation | null;
    coldStart: string[];
    insight: InsightPanel | null;
    banner: string | null;
}

export const DEFAULT_CONSTRAINTS: Constraints = {
    roster_size: 11,
    budget: 100.0,
    max_per_team: 7,
};

export function initialState(): BuilderState {
    return {
        fixture: null,
        cards: [],
        locks: new Set(),
        excludes: new Set(),
        constraints: { ...DEFAULT_CONSTRAINTS },
        method: "exact",
        recommendation: null,
        coldStart: [],
        insight: null,
        banner: null,
    };
}

export function toggleLock(state: BuilderState, player: string): void {
    if (state.locks.has(player)) {
        state.locks.delete(player);
    } else {
        state.locks.add(player);
        state.excludes.delete(player);
    }
}

export function toggleExclude(state: BuilderState, player: string): void {
    if (state.excludes.has(player)) {
        state.excludes.delete(player);
    } else {
        state.excludes.add(player);
        state.locks.delete(player);
    }
}

export function cardsWithChoices(state: BuilderState): Card[] {
    return state.cards.map((c) => ({
        ...c,
        locked: state.locks.has(c.player),
        excluded: state.excludes.has(c.player),
    }));
}

export function stepInsight(state: BuilderState, delta: number): void {
    const panel = state.insight;
    if (!panel || panel.series.length === 0) return;
    const n = panel.series.length;
    panel.index = (panel.index + delta + n) % n;
}

// -- per-fixture persistence ---------------------------------------------------

interface StoredChoices {
    locks: string[];
    excludes: string[];
    budget: number;
}

function fixtureKey(fixture: Fixture): string {
    return `fantasyxi:${fixture.team1}|${fixture.team2}|${fixture.format}|${fixture.venue}`;
}

export function persistChoices(state: BuilderState): void {
    if (!state.fixture) return;
    const payload: StoredChoices = {
        locks: [...state.locks].sort(),
        excludes: [...state.excludes].sort(),
        budget: state.constraints.budget,
    };
    try {
        localStorage.setItem(fixtureKey(state.fixture), JSON.stringify(payload));
    } catch {
        // storage may be unavailable; the builder still works per-session
    }
}

export function restoreChoices(state: BuilderState): void {
    if (!state.fixture) return;
    let raw: string | null = null;
    try {
        raw = localStorage.getItem(fixtureKey(state.fixture));
    } catch {
        return;
    }
    if (!raw) return;
    const stored = JSON.parse(raw) as StoredChoices;
    state.locks = new Set(stored.locks);
    state.excludes = new Set(stored.excludes);
    state.constraints.budget = stored.budget;
    for (const name of state.locks) state.excludes.delete(name);
}
