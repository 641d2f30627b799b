import process from "node:process";
import { SchemaError } from "./csv.js";
import { FIGURE_IDS, FigureId, runJob } from "./figures.js";

function usage(): never {
    process.stderr.write(
        `usage: render --figure <${FIGURE_IDS.join("|")}> --in <dir> --out <file.svg>\n`,
    );
    process.exit(2);
}

export function main(argv: string[]): number {
    if (argv[0] !== "render") usage();
    let figure: string | undefined;
    let inputDir: string | undefined;
    let outputPath: string | undefined;
    for (let i = 1; i < argv.length; i += 2) {
        const key = argv[i];
        const value = argv[i + 1];
        if (value === undefined) usage();
        if (key === "--figure") figure = value;
        else if (key === "--in") inputDir = value;
        else if (key === "--out") outputPath = value;
        else usage();
    }
    if (!figure || !inputDir || !outputPath) usage();
    if (!(FIGURE_IDS as readonly string[]).includes(figure)) {
        process.stderr.write(`error: unknown figure id ${figure}\n`);
        return 2;
    }
    try {
        runJob({ figure: figure as FigureId, inputDir, outputPath });
    } catch (err) {
        if (err instanceof SchemaError) {
            process.stderr.write(`error: ${err.message}\n`);
            return 1;
        }
        throw err;
    }
    process.stdout.write(`${outputPath}\n`);
    return 0;
}

process.exit(main(process.argv.slice(2)));
