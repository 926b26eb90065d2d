import { describe, expect, it } from "vitest";

import {
  applyServerAck,
  canSubmit,
  categoryOf,
  hasLengthImbalance,
  hasUnsavedChanges,
  missingCategories,
  newSession,
  rememberTokenCounts,
  toggleSelection,
} from "../src/session.js";

const CATS = ["autos", "baseball"];

describe("selection editing", () => {
  it("assigns a document to a category", () => {
    const s = toggleSelection(newSession("b", CATS), "autos", "d1");
    expect(s.selections["autos"]).toEqual(["d1"]);
    expect(categoryOf(s, "d1")).toBe("autos");
  });

  it("clicking the same category again removes the document", () => {
    let s = toggleSelection(newSession("b", CATS), "autos", "d1");
    s = toggleSelection(s, "autos", "d1");
    expect(categoryOf(s, "d1")).toBeNull();
  });

  it("assigning to another category moves the document", () => {
    let s = toggleSelection(newSession("b", CATS), "autos", "d1");
    s = toggleSelection(s, "baseball", "d1");
    expect(s.selections["autos"]).toEqual([]);
    expect(s.selections["baseball"]).toEqual(["d1"]);
  });

  it("rejects unknown categories", () => {
    expect(() => toggleSelection(newSession("b", CATS), "nope", "d1")).toThrow(
      /unknown category/,
    );
  });
});

describe("submit gating", () => {
  it("blocks until every category has a selection", () => {
    let s = newSession("b", CATS);
    expect(canSubmit(s)).toBe(false);
    expect(missingCategories(s)).toEqual(CATS);
    s = toggleSelection(s, "autos", "d1");
    expect(canSubmit(s)).toBe(false);
    expect(missingCategories(s)).toEqual(["baseball"]);
    s = toggleSelection(s, "baseball", "d2");
    expect(canSubmit(s)).toBe(true);
  });
});

describe("length imbalance", () => {
  function sessionWith(counts: Record<string, number>) {
    let s = newSession("b", CATS);
    s = rememberTokenCounts(
      s,
      Object.entries(counts).map(([doc_id, token_count]) => ({
        doc_id,
        token_count,
      })),
    );
    return s;
  }

  it("warns when selected token counts differ by more than 3x", () => {
    let s = sessionWith({ d1: 10, d2: 200 });
    s = toggleSelection(s, "autos", "d1");
    s = toggleSelection(s, "baseball", "d2");
    expect(hasLengthImbalance(s)).toBe(true);
  });

  it("stays quiet for comparable lengths", () => {
    let s = sessionWith({ d1: 90, d2: 110 });
    s = toggleSelection(s, "autos", "d1");
    s = toggleSelection(s, "baseball", "d2");
    expect(hasLengthImbalance(s)).toBe(false);
  });

  it("boundary: exactly 3x is not a warning", () => {
    let s = sessionWith({ d1: 50, d2: 150 });
    s = toggleSelection(s, "autos", "d1");
    s = toggleSelection(s, "baseball", "d2");
    expect(hasLengthImbalance(s)).toBe(false);
  });

  it("needs at least two known counts", () => {
    let s = sessionWith({ d1: 10 });
    s = toggleSelection(s, "autos", "d1");
    expect(hasLengthImbalance(s)).toBe(false);
  });
});

describe("server acknowledgement", () => {
  it("shown selections mirror the acked payload after submit", () => {
    let s = toggleSelection(newSession("b", CATS), "autos", "d1");
    s = toggleSelection(s, "baseball", "d2");
    expect(hasUnsavedChanges(s)).toBe(true);
    s = applyServerAck(s, { autos: ["d1"], baseball: ["d2"] });
    expect(s.selections).toEqual(s.acked);
    expect(hasUnsavedChanges(s)).toBe(false);
  });

  it("the server answer wins on reconciliation", () => {
    let s = toggleSelection(newSession("b", CATS), "autos", "d1");
    s = applyServerAck(s, { autos: ["d9"], baseball: ["d8"] });
    expect(s.selections["autos"]).toEqual(["d9"]);
    expect(s.selections["baseball"]).toEqual(["d8"]);
  });

  it("later edits do not mutate the acked baseline", () => {
    let s = applyServerAck(newSession("b", CATS), {
      autos: ["d1"],
      baseball: ["d2"],
    });
    s = toggleSelection(s, "autos", "d3");
    expect(s.acked["autos"]).toEqual(["d1"]);
    expect(hasUnsavedChanges(s)).toBe(true);
  });
});
