/** Ranked table of assessed VQA/optimizer combinations. */

import type { AssessmentBody, CombinationEntry } from "./api.js";

const STATUS_LABEL: Record<CombinationEntry["status"], string> = {
  feasible: "feasible",
  infeasible: "infeasible",
  not_characterizable: "n.c.",
};

const STATUS_RANK: Record<CombinationEntry["status"], number> = {
  feasible: 0,
  infeasible: 1,
  not_characterizable: 2,
};

export function formatShots(value: number | null, unbounded: boolean): string {
  if (unbounded) return "∞";
  if (value === null) return "—";
  if (value >= 1e5 || (value > 0 && value < 1e-2)) return value.toExponential(2);
  return value.toLocaleString("en-US", { maximumFractionDigits: 0 });
}

/** Feasible first by worst case, then infeasible, then n.c.; stable ids. */
export function rankEntries(entries: CombinationEntry[]): CombinationEntry[] {
  return [...entries].sort((a, b) => {
    const rank = STATUS_RANK[a.status] - STATUS_RANK[b.status];
    if (rank !== 0) return rank;
    const wa = a.worst_case ?? Infinity;
    const wb = b.worst_case ?? Infinity;
    if (wa !== wb) return wa - wb;
    const ids = `${a.vqa.id}/${a.optimizer.id}`.localeCompare(
      `${b.vqa.id}/${b.optimizer.id}`,
    );
    return ids;
  });
}

function boundsText(entry: CombinationEntry): string {
  const spans: string[] = [];
  for (const [name, est] of Object.entries(entry.hypotheses)) {
    if (!est.valid) continue;
    const low = formatShots(est.low ?? null, est.unbounded ?? false);
    const high = formatShots(est.high ?? null, est.unbounded ?? false);
    spans.push(`${name}: [${low}, ${high}]`);
  }
  return spans.join("; ") || "—";
}

export interface AssessmentViewOptions {
  /** Called when the user applies the recommendation: download the config. */
  onApply?: () => void;
}

export function renderAssessment(
  container: HTMLElement,
  assessment: AssessmentBody,
  options: AssessmentViewOptions = {},
): void {
  const root = document.createElement("div");
  root.className = "assessment";

  const problem = assessment.problem;
  const header = document.createElement("p");
  header.className = "problem";
  header.textContent =
    `${problem.matched_class}, n=${problem.n}, density ${problem.density.toFixed(3)} ` +
    `(matched grid ${problem.grid_density})`;
  root.appendChild(header);

  const boundary = document.createElement("p");
  boundary.className = "boundary";
  boundary.textContent =
    `quantum-disadvantage boundary: 2^${assessment.boundary.log2} ` +
    `= ${assessment.boundary.evaluations.toExponential(2)} evaluations`;
  root.appendChild(boundary);

  const recommendation = assessment.recommendation;
  const recommendedKey =
    recommendation.kind === "combination"
      ? `${recommendation.vqa?.id}/${recommendation.optimizer?.id}`
      : null;

  const table = document.createElement("table");
  table.className = "combinations";
  table.innerHTML = `
    <thead><tr>
      <th>VQA</th><th>Optimizer</th><th>Status</th>
      <th>Worst-case shots</th><th>95% bounds</th><th>Calls</th><th></th>
    </tr></thead>`;
  const body = document.createElement("tbody");
  for (const entry of rankEntries(assessment.combinations)) {
    const row = document.createElement("tr");
    row.className = `status-${entry.status}`;
    const key = `${entry.vqa.id}/${entry.optimizer.id}`;
    const badge =
      key === recommendedKey ? '<span class="badge recommended">recommended</span>' : "";
    row.innerHTML = `
      <td>${entry.vqa.id}</td>
      <td>${entry.optimizer.id}</td>
      <td>${STATUS_LABEL[entry.status]}</td>
      <td>${formatShots(entry.worst_case, entry.worst_case_unbounded)}</td>
      <td>${boundsText(entry)}</td>
      <td>${formatShots(entry.n_calls, false)}</td>
      <td>${badge}</td>`;
    body.appendChild(row);
  }
  table.appendChild(body);
  root.appendChild(table);

  const footer = document.createElement("p");
  footer.className = "recommendation-line";
  if (recommendation.kind === "combination") {
    footer.textContent = `recommendation: ${recommendedKey}`;
  } else {
    footer.textContent = "recommendation: classical fallback — no combination beats 2^n";
  }
  root.appendChild(footer);

  const apply = document.createElement("button");
  apply.className = "apply";
  apply.textContent = "Apply (download recommended_config.yaml)";
  apply.addEventListener("click", () => options.onApply?.());
  root.appendChild(apply);

  container.replaceChildren(root);
}

/** Trigger a browser download of YAML text as recommended_config.yaml. */
export function downloadConfig(yamlText: string): void {
  const blob = new Blob([yamlText], { type: "application/yaml" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = "recommended_config.yaml";
  link.click();
  URL.revokeObjectURL(url);
}
