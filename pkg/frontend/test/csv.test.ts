import assert from "node:assert/strict";
import test from "node:test";

import { SchemaError, column, parseCsv, parseMatrixCsv, requireColumns } from "../src/csv.js";

test("parseCsv splits header and numeric rows", () => {
    const t = parseCsv("a,b\n1,2\n3,4\n");
    assert.deepEqual(t.columns, ["a", "b"]);
    assert.deepEqual(t.rows, [[1, 2], [3, 4]]);
});

test("parseCsv accepts header-only files", () => {
    const t = parseCsv("t_us,N\n");
    assert.deepEqual(t.rows, []);
});

test("parseCsv rejects ragged or non-numeric rows", () => {
    assert.throws(() => parseCsv("a,b\n1\n"), SchemaError);
    assert.throws(() => parseCsv("a,b\n1,x\n"), SchemaError);
});

test("column and requireColumns name the missing column", () => {
    const t = parseCsv("t_us,N\n0,0\n");
    assert.deepEqual(column(t, "N", "f.csv"), [0]);
    assert.throws(
        () => requireColumns(t, ["sigma_z"], "f.csv"),
        (err: Error) => err instanceof SchemaError && /missing column sigma_z/.test(err.message),
    );
});

test("parseMatrixCsv reads a rectangular block", () => {
    assert.deepEqual(parseMatrixCsv("1,2\n3,4\n"), [[1, 2], [3, 4]]);
    assert.throws(() => parseMatrixCsv("1,e\n"), SchemaError);
});
