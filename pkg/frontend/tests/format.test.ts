import { describe, expect, it } from "vitest";

import {
  EXCERPT_CHARS,
  escapeHtml,
  excerpt,
  formatScore,
  formatTheta,
  lengthFraction,
} from "../src/format.js";

describe("excerpt", () => {
  it("passes short text through unchanged", () => {
    expect(excerpt("hello")).toBe("hello");
  });

  it("truncates at 400 characters with an ellipsis", () => {
    const long = "x".repeat(1000);
    const cut = excerpt(long);
    expect(cut.length).toBe(EXCERPT_CHARS + 1);
    expect(cut.endsWith("…")).toBe(true);
    expect(cut.slice(0, EXCERPT_CHARS)).toBe("x".repeat(400));
  });

  it("text exactly at the limit is untouched", () => {
    const text = "y".repeat(EXCERPT_CHARS);
    expect(excerpt(text)).toBe(text);
  });
});

describe("lengthFraction", () => {
  it("is the ratio to the longest candidate, clamped to [0, 1]", () => {
    expect(lengthFraction(50, 200)).toBe(0.25);
    expect(lengthFraction(300, 200)).toBe(1);
    expect(lengthFraction(0, 200)).toBe(0);
    expect(lengthFraction(10, 0)).toBe(0);
  });
});

describe("formatting", () => {
  it("renders scores with four decimals", () => {
    expect(formatScore(0.97034)).toBe("0.9703");
  });

  it("renders topic probability as a percentage", () => {
    expect(formatTheta(0.945)).toBe("94.5%");
  });

  it("escapes html", () => {
    expect(escapeHtml('<b a="1">&\'')).toBe("&lt;b a=&quot;1&quot;&gt;&amp;&#39;");
  });
});
