/** Application entry point: wires the tree view, runs, and assessments. */

import { Api, ApiError } from "./api.js";
import { renderTree } from "./tree_view.js";
import { QueryPanel } from "./query_panel.js";
import { downloadConfig, renderAssessment } from "./assessment_view.js";

const api = new Api("");

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function readInstance(): unknown {
  return JSON.parse(el<HTMLTextAreaElement>("instance").value);
}

function showError(message: string): void {
  const banner = el<HTMLElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
  setTimeout(() => (banner.hidden = true), 6000);
}

async function refreshTree(visited: string[] = []): Promise<void> {
  const tree = await api.getTree();
  renderTree(el("tree"), tree, visited);
}

let activePanel: QueryPanel | null = null;

async function startRun(): Promise<void> {
  const mode = el<HTMLSelectElement>("mode").value as "automatic" | "manual";
  let instance: unknown;
  try {
    instance = readInstance();
  } catch {
    showError("instance is not valid JSON");
    return;
  }
  let handle;
  try {
    handle = await api.startRun(instance, mode);
  } catch (err) {
    showError(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
    return;
  }
  activePanel?.stop();
  activePanel = new QueryPanel(api, el("query-panel"), handle.id, {
    onUpdate: (h) => void refreshTree(h.result?.visited_path ?? []),
    onDone: (h) => void refreshTree(h.result?.visited_path ?? []),
  });
  activePanel.start();
}

async function runAssessment(): Promise<void> {
  let instance: unknown;
  try {
    instance = readInstance();
  } catch {
    showError("instance is not valid JSON");
    return;
  }
  try {
    const assessment = await api.assess(instance);
    renderAssessment(el("assessment"), assessment, {
      onApply: () => {
        void api
          .assessConfig(instance)
          .then(downloadConfig)
          .catch((err) => showError(String(err)));
      },
    });
  } catch (err) {
    showError(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
}

export function boot(): void {
  el<HTMLButtonElement>("start-run").addEventListener("click", () => void startRun());
  el<HTMLButtonElement>("run-assessment").addEventListener(
    "click",
    () => void runAssessment(),
  );
  void refreshTree();
}

if (typeof document !== "undefined" && document.getElementById("tree")) {
  boot();
}
