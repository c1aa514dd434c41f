import { describe, expect, it } from "vitest";

import { SchemaError, column, parseCsv } from "../src/csv.js";

describe("csv parsing", () => {
  it("parses numeric tables", () => {
    const t = parseCsv("a,b\n1,2\n3,4.5e-1\n", "mem");
    expect(t.columns).toEqual(["a", "b"]);
    expect(t.rows).toBe(2);
    expect(column(t, "b", "mem")).toEqual([2, 0.45]);
  });

  it("names a missing column", () => {
    const t = parseCsv("a,b\n1,2\n", "mem");
    expect(() => column(t, "xi_3", "mem")).toThrowError(/missing column xi_3/);
  });

  it("names a non-numeric cell's column", () => {
    expect(() => parseCsv("a,b\n1,oops\n", "mem")).toThrowError(/column b.*not a number/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n", "mem")).toThrowError(SchemaError);
  });

  it("rejects empty tables", () => {
    expect(() => parseCsv("a,b\n", "mem")).toThrowError(/at least one data row/);
  });
});
