// Minimal deterministic SVG plotting: fixed canvas, fixed palette, fixed
// number formatting, so identical inputs yield byte-identical files.

export const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

export interface Scale {
    lo: number;
    hi: number;
    map(v: number): number;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
    const span = hi - lo || 1;
    return {
        lo,
        hi,
        map: (v: number) => outLo + ((v - lo) / span) * (outHi - outLo),
    };
}

export function dataRange(values: number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    if (!Number.isFinite(lo)) return [0, 1];
    if (lo === hi) return [lo - 1, hi + 1];
    const pad = 0.05 * (hi - lo);
    return [lo - pad, hi + pad];
}

export function ticks(lo: number, hi: number, count = 5): number[] {
    const span = hi - lo;
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const err = span / count / step;
    const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
    const s = mult * step;
    const start = Math.ceil(lo / s) * s;
    const out: number[] = [];
    for (let v = start; v <= hi + 1e-12 * span; v += s) {
        out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
    }
    return out;
}

export function fmt(v: number): string {
    if (v === 0) return "0";
    const a = Math.abs(v);
    if (a >= 1e4 || a < 1e-3) return v.toExponential(2);
    return String(parseFloat(v.toPrecision(6)));
}

export interface Curve {
    x: number[];
    y: number[];
    label: string;
    color: string;
    opacity?: number;
    dash?: string;
}

export interface PanelSpec {
    curves: Curve[];
    xLabel: string;
    yLabel: string;
    title?: string;
}

const MARGIN = { left: 70, right: 20, top: 28, bottom: 42 };

function panelSvg(p: PanelSpec, x0: number, y0: number, w: number, h: number): string {
    const innerW = w - MARGIN.left - MARGIN.right;
    const innerH = h - MARGIN.top - MARGIN.bottom;
    const allX = p.curves.flatMap((c) => c.x);
    const allY = p.curves.flatMap((c) => c.y);
    const [xlo, xhi] = dataRange(allX);
    const [ylo, yhi] = dataRange(allY);
    const sx = linearScale(xlo, xhi, x0 + MARGIN.left, x0 + MARGIN.left + innerW);
    const sy = linearScale(ylo, yhi, y0 + MARGIN.top + innerH, y0 + MARGIN.top);

    const parts: string[] = [];
    parts.push(
        `<rect x="${x0 + MARGIN.left}" y="${y0 + MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="#333" stroke-width="1"/>`,
    );
    for (const t of ticks(xlo, xhi)) {
        const px = sx.map(t).toFixed(2);
        parts.push(
            `<line x1="${px}" y1="${y0 + MARGIN.top + innerH}" x2="${px}" y2="${y0 + MARGIN.top + innerH + 4}" stroke="#333"/>`,
            `<text x="${px}" y="${y0 + MARGIN.top + innerH + 16}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
        );
    }
    for (const t of ticks(ylo, yhi)) {
        const py = sy.map(t).toFixed(2);
        parts.push(
            `<line x1="${x0 + MARGIN.left - 4}" y1="${py}" x2="${x0 + MARGIN.left}" y2="${py}" stroke="#333"/>`,
            `<text x="${x0 + MARGIN.left - 7}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11">${fmt(t)}</text>`,
        );
    }
    for (const c of p.curves) {
        const pts = c.x
            .map((xv, i) => `${sx.map(xv).toFixed(2)},${sy.map(c.y[i]).toFixed(2)}`)
            .join(" ");
        const opacity = c.opacity ?? 1;
        const dash = c.dash ? ` stroke-dasharray="${c.dash}"` : "";
        parts.push(
            `<polyline points="${pts}" fill="none" stroke="${c.color}" stroke-width="1.6" stroke-opacity="${opacity}"${dash}/>`,
        );
    }
    // legend (top-right inside the frame)
    p.curves.forEach((c, i) => {
        const lx = x0 + MARGIN.left + innerW - 8;
        const ly = y0 + MARGIN.top + 14 + 14 * i;
        parts.push(
            `<line x1="${lx - 150}" y1="${ly - 4}" x2="${lx - 122}" y2="${ly - 4}" stroke="${c.color}" stroke-width="1.6" stroke-opacity="${c.opacity ?? 1}"/>`,
            `<text x="${lx - 116}" y="${ly}" font-size="11">${c.label}</text>`,
        );
    });
    parts.push(
        `<text x="${x0 + MARGIN.left + innerW / 2}" y="${y0 + h - 8}" text-anchor="middle" font-size="12">${p.xLabel}</text>`,
        `<text x="${x0 + 16}" y="${y0 + MARGIN.top + innerH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 ${x0 + 16} ${y0 + MARGIN.top + innerH / 2})">${p.yLabel}</text>`,
    );
    if (p.title) {
        parts.push(
            `<text x="${x0 + MARGIN.left + innerW / 2}" y="${y0 + 16}" text-anchor="middle" font-size="13">${p.title}</text>`,
        );
    }
    return parts.join("\n");
}

export function renderPanels(panels: PanelSpec[], width = 820, panelHeight = 320): string {
    const height = panelHeight * panels.length;
    const body = panels
        .map((p, i) => panelSvg(p, 0, i * panelHeight, width, panelHeight))
        .join("\n");
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Menlo, monospace">\n` +
        `<rect width="${width}" height="${height}" fill="#ffffff"/>\n${body}\n</svg>\n`
    );
}

// diverging blue-white-red map for signed heat maps
export function divergingColor(v: number, vmax: number): string {
    const t = vmax > 0 ? Math.max(-1, Math.min(1, v / vmax)) : 0;
    const lerp = (a: number, b: number, u: number) => Math.round(a + (b - a) * u);
    let r: number, g: number, b: number;
    if (t < 0) {
        const u = 1 + t; // -1 -> 0, 0 -> 1
        r = lerp(33, 255, u);
        g = lerp(102, 255, u);
        b = lerp(172, 255, u);
    } else {
        const u = t;
        r = lerp(255, 178, u);
        g = lerp(255, 24, u);
        b = lerp(255, 43, u);
    }
    return `rgb(${r},${g},${b})`;
}

export interface HeatmapSpec {
    values: number[][]; // rows x cols
    rowValues: number[];
    colValues: number[];
    xLabel: string;
    yLabel: string;
    title: string;
}

export function renderHeatmap(spec: HeatmapSpec, width = 820, height = 520): string {
    const innerW = width - MARGIN.left - 90;
    const innerH = height - MARGIN.top - MARGIN.bottom;
    const nRows = spec.values.length;
    const nCols = spec.values[0].length;
    const vmax = Math.max(...spec.values.flat().map((v) => Math.abs(v)), 1e-30);
    const parts: string[] = [];
    const cellW = innerW / nCols;
    const cellH = innerH / nRows;
    for (let i = 0; i < nRows; i++) {
        for (let j = 0; j < nCols; j++) {
            // row 0 at the bottom (ascending axis upward)
            const x = MARGIN.left + j * cellW;
            const y = MARGIN.top + (nRows - 1 - i) * cellH;
            parts.push(
                `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${(cellW + 0.5).toFixed(2)}" height="${(cellH + 0.5).toFixed(2)}" fill="${divergingColor(spec.values[i][j], vmax)}"/>`,
            );
        }
    }
    parts.push(
        `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="#333"/>`,
    );
    const xt = ticks(spec.colValues[0], spec.colValues[nCols - 1]);
    const sx = linearScale(spec.colValues[0], spec.colValues[nCols - 1], MARGIN.left, MARGIN.left + innerW);
    for (const t of xt) {
        const px = sx.map(t).toFixed(2);
        parts.push(
            `<line x1="${px}" y1="${MARGIN.top + innerH}" x2="${px}" y2="${MARGIN.top + innerH + 4}" stroke="#333"/>`,
            `<text x="${px}" y="${MARGIN.top + innerH + 16}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
        );
    }
    const yt = ticks(spec.rowValues[0], spec.rowValues[nRows - 1]);
    const sy = linearScale(spec.rowValues[0], spec.rowValues[nRows - 1], MARGIN.top + innerH, MARGIN.top);
    for (const t of yt) {
        const py = sy.map(t).toFixed(2);
        parts.push(
            `<line x1="${MARGIN.left - 4}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="#333"/>`,
            `<text x="${MARGIN.left - 7}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11">${fmt(t)}</text>`,
        );
    }
    // colorbar
    const cbX = width - 70;
    const steps = 24;
    for (let s = 0; s < steps; s++) {
        const v = vmax * (1 - (2 * s) / (steps - 1));
        const y = MARGIN.top + (innerH / steps) * s;
        parts.push(
            `<rect x="${cbX}" y="${y.toFixed(2)}" width="16" height="${(innerH / steps + 0.5).toFixed(2)}" fill="${divergingColor(v, vmax)}"/>`,
        );
    }
    parts.push(
        `<rect x="${cbX}" y="${MARGIN.top}" width="16" height="${innerH}" fill="none" stroke="#333"/>`,
        `<text x="${cbX + 24}" y="${MARGIN.top + 8}" font-size="11">${fmt(vmax)}</text>`,
        `<text x="${cbX + 24}" y="${MARGIN.top + innerH}" font-size="11">${fmt(-vmax)}</text>`,
        `<text x="${MARGIN.left + innerW / 2}" y="${height - 8}" text-anchor="middle" font-size="12">${spec.xLabel}</text>`,
        `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${spec.yLabel}</text>`,
        `<text x="${MARGIN.left + innerW / 2}" y="16" text-anchor="middle" font-size="13">${spec.title}</text>`,
    );
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Menlo, monospace">\n` +
        `<rect width="${width}" height="${height}" fill="#ffffff"/>\n${parts.join("\n")}\n</svg>\n`
    );
}
