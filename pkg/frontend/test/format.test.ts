import { describe, expect, it } from "vitest";

import { fmt3, fmtSigned3, highlightCode } from "../src/format.js";

describe("fmt3", () => {
  it("renders three decimals", () => {
    expect(fmt3(0.8884)).toBe("0.888");
    expect(fmt3(1)).toBe("1.000");
    expect(fmt3(0.0995)).toBe((0.0995).toFixed(3)); // same rounding as the payload check
  });

  it("signed variant keeps the sign visible", () => {
    expect(fmtSigned3(0.013)).toBe("+0.013");
    expect(fmtSigned3(-0.02)).toBe("-0.020");
    expect(fmtSigned3(0)).toBe("+0.000");
  });
});

describe("highlightCode", () => {
  it("marks keywords, strings, numbers, and comments", () => {
    const html = highlightCode(
      '# note\nfeature "f" {\n  usefulness: "u"\n  expr: col("a") / 2.5\n}',
    );
    expect(html).toContain('<span class="tok-comment"># note</span>');
    expect(html).toContain('<span class="tok-keyword">feature</span>');
    expect(html).toContain('<span class="tok-string">&quot;f&quot;</span>');
    expect(html).toContain('<span class="tok-number">2.5</span>');
  });

  it("escapes HTML in code", () => {
    const html = highlightCode('col("a") < 2');
    expect(html).not.toContain("< 2");
    expect(html).toContain("&lt;");
  });

  it("leaves plain operators untouched apart from escaping", () => {
    expect(highlightCode("{ } ( )")).toBe("{ } ( )");
  });
});
