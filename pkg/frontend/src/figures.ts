import {
    SchemaError,
    Sidecar,
    Table,
    column,
    loadSidecar,
    loadTable,
    parseMatrixCsv,
    requireColumns,
} from "./csv.js";
import fs from "node:fs";
import path from "node:path";
import {
    Curve,
    HeatmapSpec,
    PALETTE,
    PanelSpec,
    renderHeatmap,
    renderPanels,
} from "./svg.js";

export const FIGURE_IDS = ["fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig4cd", "m1b"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export interface FigureJob {
    figure: FigureId;
    inputDir: string;
    outputPath: string;
}

const TIME_COLUMNS = [
    "t_us", "N", "x_um", "q_hbar_k", "sigma_x", "sigma_z", "parity", "norm",
    "energy_hbar_omega",
];

interface Loaded {
    entry: { label: string; file: string; model?: string };
    table: Table;
}

function loadSeries(sidecar: Sidecar, dir: string, figure: string): Loaded[] {
    if (!sidecar.series || sidecar.series.length === 0) {
        throw new SchemaError(`sidecar for ${figure} lists no series`);
    }
    return sidecar.series.map((entry) => {
        const table = loadTable(dir, entry.file);
        return { entry, table };
    });
}

function timeSeriesCurves(
    loaded: Loaded[],
    figure: string,
    yName: string,
): Curve[] {
    return loaded.map(({ entry, table }, i) => {
        requireColumns(table, TIME_COLUMNS, `${entry.file} (${figure})`);
        const translucent = entry.model === "periodic";
        return {
            x: column(table, "t_us", entry.file),
            y: column(table, yName, entry.file),
            label: entry.label,
            color: PALETTE[i % PALETTE.length],
            opacity: translucent ? 0.45 : 1.0,
        };
    });
}

function renderTimeSeriesFigure(job: FigureJob, yName: string, yLabel: string): string {
    const sidecar = loadSidecar(job.inputDir, job.figure);
    const loaded = loadSeries(sidecar, job.inputDir, job.figure);
    const curves = timeSeriesCurves(loaded, job.figure, yName);
    return renderPanels([
        { curves, xLabel: "t (us)", yLabel, title: job.figure },
    ]);
}

function renderFig3(job: FigureJob): string {
    const sidecar = loadSidecar(job.inputDir, "fig3");
    const loaded = loadSeries(sidecar, job.inputDir, "fig3");
    const panels: PanelSpec[] = [
        { name: "x_um", label: "<x> (um)" },
        { name: "q_hbar_k", label: "<q> (hbar k)" },
        { name: "sigma_x", label: "<sigma_x>" },
    ].map(({ name, label }, idx) => ({
        curves: loaded.map(({ entry, table }, i) => {
            requireColumns(table, TIME_COLUMNS, `${entry.file} (fig3)`);
            // color per splitting, opacity per engine
            const colorIndex = Math.floor(i / 2) % PALETTE.length;
            return {
                x: column(table, "t_us", entry.file),
                y: column(table, name, entry.file),
                label: entry.label,
                color: PALETTE[colorIndex],
                opacity: entry.model === "periodic" ? 0.4 : 1.0,
            };
        }),
        xLabel: idx === 2 ? "t (us)" : "",
        yLabel: label,
        title: idx === 0 ? "fig3" : undefined,
    }));
    return renderPanels(panels, 820, 300);
}

function renderFig2b(job: FigureJob): string {
    const sidecar = loadSidecar(job.inputDir, "fig2b");
    const loaded = loadSeries(sidecar, job.inputDir, "fig2b");
    const curves: Curve[] = loaded.map(({ entry, table }, i) => {
        requireColumns(table, ["g_over_omega", "N"], `${entry.file} (fig2b)`);
        return {
            x: column(table, "g_over_omega", entry.file),
            y: column(table, "N", entry.file),
            label: entry.label,
            color: PALETTE[i % PALETTE.length],
        };
    });
    return renderPanels([
        { curves, xLabel: "g / omega", yLabel: "<N> at t = 3pi/(8 omega)", title: "fig2b" },
    ]);
}

function renderFig4cd(job: FigureJob): string {
    const sidecar = loadSidecar(job.inputDir, "fig4cd");
    const gridFile = sidecar.grid_file;
    const axes = sidecar.axes;
    if (!gridFile || !axes?.rows_omega_q_hz || !axes?.cols_t_us) {
        throw new SchemaError("fig4cd sidecar must carry grid_file and axes");
    }
    const full = path.join(job.inputDir, gridFile);
    if (!fs.existsSync(full)) {
        throw new SchemaError(`missing data file ${full}`);
    }
    const values = parseMatrixCsv(fs.readFileSync(full, "utf-8"));
    const rows = axes.rows_omega_q_hz.map((v) => v / 1000); // kHz
    if (values.length !== rows.length || values[0].length !== axes.cols_t_us.length) {
        throw new SchemaError("fig4cd grid shape does not match sidecar axes");
    }
    const spec: HeatmapSpec = {
        values,
        rowValues: rows,
        colValues: axes.cols_t_us,
        xLabel: "t (us)",
        yLabel: "omega_q / 2pi (kHz)",
        title: "fig4cd: N_excited - N_ground",
    };
    return renderHeatmap(spec);
}

function renderM1b(job: FigureJob): string {
    const sidecar = loadSidecar(job.inputDir, "evolve");
    const densityFile = sidecar.density_file;
    if (!densityFile) {
        throw new SchemaError("evolve sidecar carries no density_file (run with --emit-density)");
    }
    const table = loadTable(job.inputDir, densityFile);
    requireColumns(table, ["t_us", "p_hbar_k", "density"], `${densityFile} (m1b)`);
    const t = column(table, "t_us", densityFile);
    const p = column(table, "p_hbar_k", densityFile);
    const d = column(table, "density", densityFile);
    const timesSeen: number[] = [];
    for (const v of t) {
        if (timesSeen.length === 0 || timesSeen[timesSeen.length - 1] !== v) {
            timesSeen.push(v);
        }
    }
    const dmax = Math.max(...d, 1e-30);
    // waterfall: one offset trace per snapshot, detection-momentum axis
    const curves: Curve[] = timesSeen.map((tv, i) => {
        const x: number[] = [];
        const y: number[] = [];
        for (let j = 0; j < t.length; j++) {
            if (t[j] === tv) {
                x.push(p[j]);
                y.push(d[j] / dmax + i * 1.2);
            }
        }
        return {
            x,
            y,
            label: `t = ${tv} us`,
            color: PALETTE[i % PALETTE.length],
        };
    });
    return renderPanels(
        [{ curves, xLabel: "p (hbar k)", yLabel: "density (offset traces)", title: "m1b" }],
        820,
        520,
    );
}

export function renderFigure(job: FigureJob): string {
    switch (job.figure) {
        case "fig2a":
        case "fig4b":
            return renderTimeSeriesFigure(job, "N", "<N>");
        case "fig4a":
            return renderTimeSeriesFigure(job, "sigma_z", "<sigma_z>");
        case "fig3":
            return renderFig3(job);
        case "fig2b":
            return renderFig2b(job);
        case "fig4cd":
            return renderFig4cd(job);
        case "m1b":
            return renderM1b(job);
        default:
            throw new SchemaError(`unknown figure id ${job.figure as string}`);
    }
}

export function runJob(job: FigureJob): void {
    const svg = renderFigure(job); // render fully before touching the output
    fs.writeFileSync(job.outputPath, svg);
}
