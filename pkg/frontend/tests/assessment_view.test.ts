import { describe, expect, it, vi } from "vitest";

import type { AssessmentBody, CombinationEntry } from "../src/api.js";
import {
  formatShots,
  rankEntries,
  renderAssessment,
} from "../src/assessment_view.js";

function entry(
  vqa: string,
  optimizer: string,
  status: CombinationEntry["status"],
  worstCase: number | null,
  unbounded = false,
): CombinationEntry {
  return {
    vqa: { id: vqa },
    optimizer: { id: optimizer },
    hypotheses: {
      exponential: { valid: true, point: worstCase, low: 1, high: worstCase, unbounded },
      power_law: { valid: false },
    },
    worst_case: worstCase,
    worst_case_unbounded: unbounded,
    n_calls: 100,
    status,
  };
}

const ASSESSMENT: AssessmentBody = {
  problem: { n: 12, density: 0.305, matched_class: "maxcut", grid_density: 0.3 },
  boundary: { log2: 12, evaluations: 4096 },
  combinations: [
    entry("qaoa_p2", "spsa", "infeasible", 9e9),
    entry("hea_l2", "nft", "feasible", 2500),
    entry("qaoa_p2", "nft", "feasible", 800),
    entry("hea_l2", "spsa", "not_characterizable", null),
  ],
  recommendation: {
    kind: "combination",
    vqa: { id: "qaoa_p2" },
    optimizer: { id: "nft" },
    worst_case: 800,
  },
};

describe("formatShots", () => {
  it("renders unbounded as infinity regardless of value", () => {
    expect(formatShots(123, true)).toBe("∞");
    expect(formatShots(null, true)).toBe("∞");
  });

  it("renders missing values as a dash", () => {
    expect(formatShots(null, false)).toBe("—");
  });

  it("uses exponential notation for large values", () => {
    expect(formatShots(1.9e6, false)).toBe("1.90e+6");
  });

  it("uses grouped integers for moderate values", () => {
    expect(formatShots(1234, false)).toBe("1,234");
  });
});

describe("rankEntries", () => {
  it("orders feasible by worst case, then infeasible, then n.c.", () => {
    const ranked = rankEntries(ASSESSMENT.combinations).map(
      (e) => `${e.vqa.id}/${e.optimizer.id}`,
    );
    expect(ranked).toEqual([
      "qaoa_p2/nft",
      "hea_l2/nft",
      "qaoa_p2/spsa",
      "hea_l2/spsa",
    ]);
  });

  it("does not mutate its input", () => {
    const input = [...ASSESSMENT.combinations];
    rankEntries(input);
    expect(input).toEqual(ASSESSMENT.combinations);
  });
});

describe("renderAssessment", () => {
  it("shows the problem, the 2^n boundary, and a ranked table", () => {
    const container = document.createElement("div");
    renderAssessment(container, ASSESSMENT);
    expect(container.querySelector(".problem")?.textContent).toContain("n=12");
    expect(container.querySelector(".boundary")?.textContent).toContain("2^12");
    const rows = [...container.querySelectorAll("tbody tr")];
    expect(rows).toHaveLength(4);
    expect(rows[0].textContent).toContain("qaoa_p2");
    expect(rows[0].textContent).toContain("nft");
  });

  it("labels non-characterizable rows as n.c.", () => {
    const container = document.createElement("div");
    renderAssessment(container, ASSESSMENT);
    const ncRow = container.querySelector("tr.status-not_characterizable");
    expect(ncRow?.textContent).toContain("n.c.");
    expect(ncRow?.textContent).toContain("—");
  });

  it("badges exactly the recommended combination", () => {
    const container = document.createElement("div");
    renderAssessment(container, ASSESSMENT);
    const badges = container.querySelectorAll(".badge.recommended");
    expect(badges).toHaveLength(1);
    expect(badges[0].closest("tr")?.textContent).toContain("qaoa_p2");
    expect(container.querySelector(".recommendation-line")?.textContent).toContain(
      "qaoa_p2/nft",
    );
  });

  it("explains a classical fallback and renders no badge", () => {
    const container = document.createElement("div");
    renderAssessment(container, {
      ...ASSESSMENT,
      recommendation: { kind: "classical_fallback" },
    });
    expect(container.querySelectorAll(".badge.recommended")).toHaveLength(0);
    expect(container.querySelector(".recommendation-line")?.textContent).toContain(
      "classical fallback",
    );
  });

  it("invokes onApply when the apply button is clicked", () => {
    const container = document.createElement("div");
    const onApply = vi.fn();
    renderAssessment(container, ASSESSMENT, { onApply });
    container.querySelector<HTMLButtonElement>("button.apply")?.click();
    expect(onApply).toHaveBeenCalledTimes(1);
  });
});
