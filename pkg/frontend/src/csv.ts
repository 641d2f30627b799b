import fs from "node:fs";
import path from "node:path";

export interface Table {
    columns: string[];
    rows: number[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
    const lines = text.trim().split("\n").filter((l) => l.length > 0);
    if (lines.length === 0) {
        throw new SchemaError("empty CSV");
    }
    const columns = lines[0].split(",");
    const rows = lines.slice(1).map((line, i) => {
        const cells = line.split(",").map(Number);
        if (cells.length !== columns.length || cells.some(Number.isNaN)) {
            throw new SchemaError(`bad CSV row ${i + 2}: ${line}`);
        }
        return cells;
    });
    return { columns, rows };
}

export function parseMatrixCsv(text: string): number[][] {
    const lines = text.trim().split("\n").filter((l) => l.length > 0);
    return lines.map((line, i) => {
        const cells = line.split(",").map(Number);
        if (cells.some(Number.isNaN)) {
            throw new SchemaError(`bad matrix row ${i + 1}`);
        }
        return cells;
    });
}

export function column(table: Table, name: string, context: string): number[] {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
        throw new SchemaError(`missing column ${name} in ${context}`);
    }
    return table.rows.map((r) => r[idx]);
}

export function requireColumns(table: Table, names: string[], context: string): void {
    for (const name of names) {
        if (!table.columns.includes(name)) {
            throw new SchemaError(`missing column ${name} in ${context}`);
        }
    }
}

export interface SeriesEntry {
    label: string;
    file: string;
    omega_q_hz?: number;
    model?: string;
    state?: string;
    [key: string]: unknown;
}

export interface Sidecar {
    scenario?: string;
    series?: SeriesEntry[];
    grid_file?: string;
    density_file?: string;
    axes?: { rows_omega_q_hz?: number[]; cols_t_us?: number[] };
    config?: Record<string, unknown>;
    [key: string]: unknown;
}

export function loadSidecar(dir: string, name: string): Sidecar {
    const file = path.join(dir, `${name}.json`);
    if (!fs.existsSync(file)) {
        throw new SchemaError(`missing sidecar ${file}`);
    }
    return JSON.parse(fs.readFileSync(file, "utf-8")) as Sidecar;
}

export function loadTable(dir: string, file: string): Table {
    const full = path.join(dir, file);
    if (!fs.existsSync(full)) {
        throw new SchemaError(`missing data file ${full}`);
    }
    return parseCsv(fs.readFileSync(full, "utf-8"));
}
