// Application controller: wires the fixture form, roster table, recommendation
// panel, and insight browser to the service client. At most one re-optimize
// request is in flight; newer clicks abort and replace it.

import { ApiClient, ApiError } from "./api";
import type { Fixture } from "./api";
import {
    BuilderState,
    cardsWithChoices,
    initialState,
    persistChoices,
    restoreChoices,
    stepInsight,
    toggleExclude,
    toggleLock,
} from "./state";
import { renderAll, renderInsights } from "./render";

export class App {
    readonly state: BuilderState = initialState();
    teamNames: [string, string] = ["", ""];
    private inflight: AbortController | null = null;

    constructor(readonly api: ApiClient) {}

    async loadFixture(fixture: Fixture): Promise<void> {
        this.state.banner = null;
        try {
            const [squad1, squad2] = await Promise.all([
                this.api.players(fixture.team1),
                this.api.players(fixture.team2),
            ]);
            this.state.fixture = fixture;
            this.teamNames = [fixture.team1, fixture.team2];
            restoreChoices(this.state);
            const response = await this.api.recommendFixture(
                fixture, [squad1, squad2], this.state.constraints,
                this.state.method);
            this.state.cards = response.cards.map((c) => ({
                ...c,
                locked: this.state.locks.has(c.player),
                excluded: this.state.excludes.has(c.player),
            }));
            this.state.coldStart = response.cold_start;
            if (this.state.locks.size || this.state.excludes.size) {
                await this.reoptimize();
            } else {
                this.state.recommendation = response.recommendation;
            }
        } catch (err) {
            this.state.recommendation = null;
            this.state.cards = [];
            this.state.banner = err instanceof ApiError
                ? `${err.kind}: ${err.message}`
                : String(err);
        }
        this.render();
    }

    async reoptimize(): Promise<void> {
        if (!this.state.fixture || this.state.cards.length === 0) return;
        this.inflight?.abort();
        const controller = new AbortController();
        this.inflight = controller;
        this.state.banner = null;
        try {
            const response = await this.api.recommendCards(
                cardsWithChoices(this.state), this.teamNames,
                this.state.constraints, this.state.method, controller.signal);
            if (controller !== this.inflight) return; // superseded
            this.state.recommendation = response.recommendation;
        } catch (err) {
            if (controller !== this.inflight) return;
            if (err instanceof DOMException && err.name === "AbortError") return;
            this.state.recommendation = null;
            this.state.banner = err instanceof ApiError
                ? `${err.kind}: ${err.message}`
                : String(err);
        } finally {
            if (controller === this.inflight) this.inflight = null;
        }
        persistChoices(this.state);
        this.render();
    }

    async lockAndReoptimize(player: string): Promise<void> {
        toggleLock(this.state, player);
        await this.reoptimize();
    }

    async excludeAndReoptimize(player: string): Promise<void> {
        toggleExclude(this.state, player);
        await this.reoptimize();
    }

    setBudget(budget: number): void {
        this.state.constraints.budget = budget;
    }

    async showPlayerInsights(name: string): Promise<void> {
        try {
            const series = await this.api.playerInsights(name);
            this.state.insight = { scope: "player", name, series, index: 0 };
        } catch (err) {
            this.state.insight = null;
            this.state.banner = String(err);
        }
        this.render();
    }

    async showTeamInsights(name: string): Promise<void> {
        try {
            const series = await this.api.teamInsights(name);
            this.state.insight = { scope: "team", name, series, index: 0 };
        } catch (err) {
            this.state.insight = null;
            this.state.banner = String(err);
        }
        this.render();
    }

    nextInsight(): void {
        stepInsight(this.state, 1);
        renderInsights(this.state);
    }

    previousInsight(): void {
        stepInsight(this.state, -1);
        renderInsights(this.state);
    }

    render(): void {
        renderAll(this.state, this.teamNames);
    }
}

function defaultBase(): string {
    const override = (globalThis as { __FANTASYXI_API__?: string }).__FANTASYXI_API__;
    if (override) return override;
    const params = new URLSearchParams(window.location.search);
    return params.get("api") ?? "http://127.0.0.1:8089";
}

export function mount(): App {
    const api = new ApiClient(defaultBase());
    const app = new App(api);

    const form = document.getElementById("fixture-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        const data = new FormData(form);
        void app.loadFixture({
            team1: String(data.get("team1") ?? ""),
            team2: String(data.get("team2") ?? ""),
            format: String(data.get("format") ?? "T20"),
            venue: String(data.get("venue") ?? ""),
        });
    });

    const budget = document.getElementById("budget") as HTMLInputElement;
    budget.addEventListener("change", () => {
        app.setBudget(Number(budget.value));
        void app.reoptimize();
    });

    (document.getElementById("reoptimize") as HTMLButtonElement)
        .addEventListener("click", () => void app.reoptimize());
    (document.getElementById("insight-prev") as HTMLButtonElement)
        .addEventListener("click", () => app.previousInsight());
    (document.getElementById("insight-next") as HTMLButtonElement)
        .addEventListener("click", () => app.nextInsight());
    (document.getElementById("team-insights") as HTMLButtonElement)
        .addEventListener("click", () => {
            if (app.state.fixture) void app.showTeamInsights(app.state.fixture.team1);
        });

    document.getElementById("roster-body")?.addEventListener("click", (event) => {
        const button = (event.target as HTMLElement).closest("button");
        const row = (event.target as HTMLElement).closest("tr");
        if (!button || !row) return;
        const player = row.dataset.player ?? "";
        const role = button.dataset.role;
        if (role === "lock") void app.lockAndReoptimize(player);
        else if (role === "exclude") void app.excludeAndReoptimize(player);
        else if (role === "insights") void app.showPlayerInsights(player);
    });

    void api.teams().then((teams) => {
        for (const id of ["team1", "team2"]) {
            const select = document.getElementById(id) as HTMLSelectElement;
            select.innerHTML = teams
                .map((t) => `<option value="${t}">${t}</option>`)
                .join("");
        }
        const second = document.getElementById("team2") as HTMLSelectElement;
        if (teams.length > 1) second.selectedIndex = 1;
    }).catch(() => {
        const banner = document.getElementById("banner");
        if (banner) {
            banner.textContent = "service unreachable: team list unavailable";
            banner.classList.add("visible");
        }
    });

    return app;
}

if (!("__FANTASYXI_TEST__" in globalThis)) {
    window.addEventListener("DOMContentLoaded", () => {
        mount();
    });
}
