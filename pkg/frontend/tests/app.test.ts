import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/components/app.js";
import type { CandidatesPage } from "../src/types.js";

function fakePage(): CandidatesPage {
  return {
    batch_id: "b",
    page: 0,
    page_count: 1,
    page_size: 12,
    topics: [
      [{ doc_id: "d1", excerpt: "x", full_text: "x", theta: 0.9, token_count: 4 }],
      [{ doc_id: "d2", excerpt: "y", full_text: "y", theta: 0.8, token_count: 5 }],
    ],
    unrankable: [],
  };
}

describe("inline API failures", () => {
  it("renders an error banner with a retry that re-issues the call", async () => {
    const api = new ApiClient("http://127.0.0.1:1");
    const calls: number[] = [];
    let fail = true;
    vi.spyOn(api, "getCandidates").mockImplementation(async (_b, page = 0) => {
      calls.push(page);
      if (fail) {
        throw new Error("connection refused");
      }
      return fakePage();
    });

    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const app = new App(api, root, "b", ["left", "right"]);
    await app.showCandidates(0);

    const banner = root.querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain("connection refused");

    fail = false;
    banner!.querySelector<HTMLButtonElement>(".retry")!.click();
    await vi.waitFor(() => {
      expect(root.querySelector(".candidate-browser")).not.toBeNull();
    });
    expect(calls).toEqual([0, 0]);
    expect(root.querySelector(".error-banner")).toBeNull();
  });
});
