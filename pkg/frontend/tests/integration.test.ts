/**
 * End-to-end test against the real backend service: spawns
 * `python3 -m qonduct.cli serve`, runs the tree in automatic mode, and
 * steers a manual run through the query panel while checking the
 * visited-path overlay.
 */
import { spawn, ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Api, QueryInfo } from "../src/api.js";
import { QueryPanel } from "../src/query_panel.js";
import { renderTree } from "../src/tree_view.js";

const repoRoot = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");
const port = 8100 + Math.floor(Math.random() * 500);
const base = `http://127.0.0.1:${port}`;
const api = new Api(base);
const instance = JSON.parse(
  readFileSync(resolve(repoRoot, "configs", "example_maxcut.json"), "utf-8"),
);

let server: ChildProcess;

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function waitFor<T>(
  probe: () => Promise<T | null>,
  timeoutMs: number,
  label: string,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const value = await probe().catch(() => null);
    if (value !== null) return value;
    await sleep(200);
  }
  throw new Error(`timed out waiting for ${label}`);
}

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-m",
      "qonduct.cli",
      "serve",
      "--tree",
      resolve(repoRoot, "configs", "basic_tree.yaml"),
      "--port",
      String(port),
      "--host",
      "127.0.0.1",
    ],
    { cwd: repoRoot, stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitFor(
    async () => ((await fetch(`${base}/tree`)).ok ? true : null),
    60_000,
    "service startup",
  );
}, 90_000);

afterAll(() => {
  server?.kill();
});

describe("against the live service", () => {
  it("serves a valid tree", async () => {
    const tree = await api.getTree();
    expect(tree.validation.ok).toBe(true);
    expect(tree.root in tree.nodes).toBe(true);
  });

  it("completes an automatic run without queries", async () => {
    const handle = await api.startRun(instance, "automatic", { seed: 11 });
    const done = await waitFor(
      async () => {
        const h = await api.getRun(handle.id);
        return h.state === "finished" || h.state === "aborted" ? h : null;
      },
      120_000,
      "automatic run",
    );
    expect(done.state).toBe("finished");
    expect(done.result?.status).toBe("completed");
    expect(done.result?.visited_path[0]).toBe((await api.getTree()).root);
    // the run registered the simulator backend it executed on
    const backends = await api.getBackends();
    expect(backends.map((b) => b.id)).toContain("statevector_sim");
  });

  it(
    "steers a manual run through the query panel and overlays the path",
    async () => {
      const answers: Record<string, string> = {
        formulation_mode: "standard",
        algorithm: "qaoa",
        depth: "2",
        optimizer: "spsa",
      };
      const container = document.createElement("div");
      const handle = await api.startRun(instance, "manual", { seed: 11 });
      const panel = new QueryPanel(api, container, handle.id, {}, 250);
      panel.start();

      const seen: string[] = [];
      const done = await waitFor(
        async () => {
          const form = container.querySelector<HTMLFormElement>("form.query-form");
          if (form) {
            const queryId = form.dataset.queryId!;
            const pending = await api.getQueries(handle.id);
            const query = pending.find((q: QueryInfo) => q.id === queryId);
            if (query && !seen.includes(queryId)) {
              // the recommendation is pre-selected before we override it
              const field = form.querySelector<HTMLInputElement | HTMLSelectElement>(
                "select, input",
              )!;
              if (query.recommendation) {
                expect(field.value).toBe(String(query.recommendation.value));
              }
              expect(queryId in answers).toBe(true);
              seen.push(queryId);
              const errorEl = form.querySelector<HTMLElement>(".error")!;
              await panel.submit(query, answers[queryId], errorEl);
              expect(errorEl.hidden).toBe(true);
            }
          }
          const h = await api.getRun(handle.id);
          return h.state === "finished" || h.state === "aborted" ? h : null;
        },
        180_000,
        "manual run",
      );
      panel.stop();

      expect(done.result?.status).toBe("completed");
      expect(seen).toEqual(["formulation_mode", "algorithm", "depth", "optimizer"]);
      const visited = done.result!.visited_path;
      expect(visited.length).toBeGreaterThan(3);

      // the overlay highlights exactly the visited nodes
      const tree = await api.getTree();
      const treeEl = document.createElement("div");
      renderTree(treeEl, tree, visited);
      const highlighted = [...treeEl.querySelectorAll("g.node.visited")].map((g) =>
        g.getAttribute("data-node"),
      );
      expect(highlighted.sort()).toEqual([...visited].sort());
      expect(
        treeEl.querySelectorAll("line.edge.visited").length,
      ).toBeGreaterThanOrEqual(visited.length - 1);

      // the panel shows the terminal result
      expect(container.querySelector(".status.done")?.textContent).toContain(
        "completed",
      );
    },
    200_000,
  );
});
