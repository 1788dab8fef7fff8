// Typed client for the fantasyxi HTTP service. Every number shown in the UI
// originates from one of these responses.

export interface Card {
    player: string;
    team_index: number;
    credit: number;
    projected_points: number;
    locked: boolean;
    excluded: boolean;
}

export interface SelectedCard {
    player: string;
    team_index: number;
    credit: number;
    projected_points: number;
    locked: boolean;
}

export interface Recommendation {
    selected: SelectedCard[];
    captain: string;
    vice_captain: string;
    total_credits: number;
    base_points: number;
    expected_points: number;
    method: string;
}

export interface RecommendResponse {
    recommendation: Recommendation;
    cards: Card[];
    cold_start: string[];
}

export interface InsightSeries {
    kind: string;
    scope: string;
    points: [string | number, number][];
    summary: number[] | null;
}

export interface Fixture {
    team1: string;
    team2: string;
    format: string;
    venue: string;
}

export interface Constraints {
    roster_size: number;
    budget: number;
    max_per_team: number;
}

export class ApiError extends Error {
    readonly kind: string;

    constructor(kind: string, message: string) {
        super(message);
        this.kind = kind;
    }
}

interface Envelope<T> {
    ok: boolean;
    data?: T;
    error?: { type: string; message: string };
}

export class ApiClient {
    constructor(readonly base: string) {}

    private async call<T>(path: string, init?: RequestInit): Promise<T> {
        let resp: Response;
        try {
            resp = await fetch(this.base + path, init);
        } catch (err) {
            throw new ApiError("Unreachable", `service unreachable: ${err}`);
        }
        const payload = (await resp.json()) as Envelope<T>;
        if (!payload.ok || payload.data === undefined) {
            const error = payload.error ?? { type: "Unknown", message: "no detail" };
            throw new ApiError(error.type, error.message);
        }
        return payload.data;
    }

    private post<T>(path: string, body: unknown): Promise<T> {
        return this.call<T>(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }

    teams(): Promise<string[]> {
        return this.call<{ teams: string[] }>("/teams").then((d) => d.teams);
    }

    players(team: string): Promise<string[]> {
        return this.call<{ players: string[] }>(
            `/players?team=${encodeURIComponent(team)}`,
        ).then((d) => d.players);
    }

    recommendFixture(
        fixture: Fixture,
        squads: [string[], string[]],
        constraints: Constraints,
        method: string,
    ): Promise<RecommendResponse> {
        return this.post("/recommend", { fixture, squads, constraints, method });
    }

    recommendCards(
        cards: Card[],
        teamNames: [string, string],
        constraints: Constraints,
        method: string,
        signal?: AbortSignal,
    ): Promise<RecommendResponse> {
        const body = {
            cards: cards.map((c) => ({
                player: c.player,
                team: teamNames[c.team_index],
                credit: c.credit,
                points: c.projected_points,
                locked: c.locked,
                excluded: c.excluded,
            })),
            constraints,
            method,
        };
        return this.call("/recommend", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
            signal,
        });
    }

    playerInsights(name: string): Promise<InsightSeries[]> {
        return this.call<{ series: InsightSeries[] }>(
            `/insights/player/${encodeURIComponent(name)}`,
        ).then((d) => d.series);
    }

    teamInsights(name: string): Promise<InsightSeries[]> {
        return this.call<{ series: InsightSeries[] }>(
            `/insights/team/${encodeURIComponent(name)}`,
        ).then((d) => d.series);
    }
}
