// Minimal SVG charts. Each renderer draws the InsightSeries verbatim; values
// are labelled with the exact numbers the service returned.

import type { InsightSeries } from "./api";

const W = 560;
const H = 260;
const PAD = 36;

function svg(children: string): string {
    return `<svg viewBox="0 0 ${W} ${H}" role="img" class="chart">${children}</svg>`;
}

function esc(value: string): string {
    return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function barChart(series: InsightSeries): string {
    const points = series.points;
    if (points.length === 0) return svg("");
    const max = Math.max(...points.map(([, v]) => v), 1e-9);
    const band = (W - 2 * PAD) / points.length;
    const bars = points.map(([label, value], i) => {
        const h = Math.max(1, ((H - 2 * PAD) * value) / max);
        const x = PAD + i * band;
        const y = H - PAD - h;
        return (
            `<rect x="${x + 2}" y="${y}" width="${Math.max(band - 4, 2)}" height="${h}"></rect>` +
            `<text class="value" x="${x + band / 2}" y="${y - 4}" text-anchor="middle">${value}</text>` +
            `<text class="label" x="${x + band / 2}" y="${H - PAD + 14}" text-anchor="middle">${esc(String(label))}</text>`
        );
    });
    return svg(bars.join(""));
}

function lineChart(series: InsightSeries): string {
    const points = series.points;
    if (points.length === 0) return svg("");
    const values = points.map(([, v]) => v);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi - lo || 1;
    const step = points.length > 1 ? (W - 2 * PAD) / (points.length - 1) : 0;
    const coords = values.map((v, i) => {
        const x = PAD + i * step;
        const y = H - PAD - ((H - 2 * PAD) * (v - lo)) / span;
        return [x, y] as const;
    });
    const path = coords.map(([x, y]) => `${x},${y}`).join(" ");
    const dots = coords
        .map(([x, y], i) => `<circle cx="${x}" cy="${y}" r="3"><title>${esc(String(points[i][0]))}: ${values[i]}</title></circle>`)
        .join("");
    return svg(`<polyline points="${path}" fill="none"></polyline>${dots}` +
        `<text class="value" x="${PAD}" y="${PAD - 8}">max ${hi}</text>` +
        `<text class="value" x="${PAD}" y="${H - PAD + 16}">min ${lo}</text>`);
}

export function renderChart(series: InsightSeries): string {
    const timeline = series.kind === "score_timeline" || series.kind === "moving_average";
    const body = timeline ? lineChart(series) : barChart(series);
    const summary = series.summary
        ? `<p class="summary" data-role="summary">five-number: ${series.summary.join(", ")}</p>`
        : "";
    return `<h3 data-role="chart-title">${esc(series.kind)} — ${esc(series.scope)}</h3>${body}${summary}`;
}
