// DOM rendering. Every figure written here is copied from the last service
// response held in BuilderState; nothing is recomputed client-side.

import type { BuilderState } from "./state";
import { renderChart } from "./charts";

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
}

function esc(value: string): string {
    const span = document.createElement("span");
    span.textContent = value;
    return span.innerHTML;
}

export function renderBanner(state: BuilderState): void {
    const banner = el("banner");
    banner.textContent = state.banner ?? "";
    banner.classList.toggle("visible", state.banner !== null);
}

export function renderRoster(state: BuilderState, teamNames: [string, string]): void {
    const tbody = el<HTMLTableSectionElement>("roster-body");
    const rows = state.cards.map((card) => {
        const locked = state.locks.has(card.player);
        const excluded = state.excludes.has(card.player);
        return `<tr data-player="${esc(card.player)}" class="${excluded ? "excluded" : ""}">
<td data-role="player">${esc(card.player)}</td>
<td data-role="team">${esc(teamNames[card.team_index])}</td>
<td data-role="credit">${card.credit}</td>
<td data-role="points">${card.projected_points}</td>
<td><button data-role="lock" class="${locked ? "on" : ""}">${locked ? "locked" : "lock"}</button>
<button data-role="exclude" class="${excluded ? "on" : ""}">${excluded ? "excluded" : "exclude"}</button>
<button data-role="insights">charts</button></td>
</tr>`;
    });
    tbody.innerHTML = rows.join("");
    const cold = el("cold-start");
    cold.textContent = state.coldStart.length
        ? `no history (cold start): ${state.coldStart.join(", ")}`
        : "";
}

export function renderRecommendation(state: BuilderState, teamNames: [string, string]): void {
    const panel = el("xi-body");
    const summary = el("xi-summary");
    const rec = state.recommendation;
    if (!rec) {
        panel.innerHTML = "";
        summary.textContent = "";
        return;
    }
    panel.innerHTML = rec.selected
        .map((card) => {
            const badge = card.player === rec.captain
                ? ' <span class="badge" data-role="captain">C</span>'
                : card.player === rec.vice_captain
                    ? ' <span class="badge" data-role="vice">VC</span>'
                    : "";
            return `<tr data-player="${esc(card.player)}">
<td data-role="player">${esc(card.player)}${badge}</td>
<td data-role="team">${esc(teamNames[card.team_index])}</td>
<td data-role="credit">${card.credit}</td>
<td data-role="points">${card.projected_points}</td>
</tr>`;
        })
        .join("");
    summary.innerHTML =
        `credits <strong data-role="total-credits">${rec.total_credits}</strong>` +
        ` / ${state.constraints.budget}` +
        ` · points <strong data-role="base-points">${rec.base_points}</strong>` +
        ` · with captain bonus <strong data-role="expected-points">${rec.expected_points}</strong>` +
        ` · method ${esc(rec.method)}`;
    const bar = el("credit-bar-fill");
    const ratio = Math.min(1, rec.total_credits / state.constraints.budget);
    bar.style.width = `${(ratio * 100).toFixed(1)}%`;
}

export function renderInsights(state: BuilderState): void {
    const holder = el("insight-chart");
    const counter = el("insight-counter");
    const panel = state.insight;
    if (!panel || panel.series.length === 0) {
        holder.innerHTML = '<p class="placeholder">no series loaded</p>';
        counter.textContent = "";
        return;
    }
    holder.innerHTML = renderChart(panel.series[panel.index]);
    counter.textContent = `${panel.index + 1} / ${panel.series.length}`;
}

export function renderAll(state: BuilderState, teamNames: [string, string]): void {
    renderBanner(state);
    renderRoster(state, teamNames);
    renderRecommendation(state, teamNames);
    renderInsights(state);
}
