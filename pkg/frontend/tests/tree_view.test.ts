import { describe, expect, it } from "vitest";

import type { TreeInfo } from "../src/api.js";
import { layoutTree, renderTree, visitedEdges } from "../src/tree_view.js";

function node(children: string[] = []) {
  return { type: "t", children, requires: [], creates: [], path_keys: [] };
}

const DIAMOND: TreeInfo = {
  root: "a",
  flags: {},
  nodes: {
    a: node(["b", "c"]),
    b: node(["d"]),
    c: node(["d"]),
    d: node(),
    orphan: node(),
  },
  path_keys: [],
  validation: { ok: true, violations: [], warnings: [] },
};

describe("layoutTree", () => {
  it("assigns longest-path layers so edges always point deeper", () => {
    const layout = layoutTree(DIAMOND);
    const layer = new Map(layout.map((n) => [n.name, n.layer]));
    expect(layer.get("a")).toBe(0);
    expect(layer.get("b")).toBe(1);
    expect(layer.get("c")).toBe(1);
    expect(layer.get("d")).toBe(2);
  });

  it("drops nodes unreachable from the root", () => {
    const names = layoutTree(DIAMOND).map((n) => n.name);
    expect(names).not.toContain("orphan");
    expect(names).toHaveLength(4);
  });

  it("places a converging node below its deepest parent", () => {
    const tree: TreeInfo = {
      ...DIAMOND,
      nodes: {
        a: node(["b", "d"]),
        b: node(["c"]),
        c: node(["d"]),
        d: node(),
      },
    };
    const layer = new Map(layoutTree(tree).map((n) => [n.name, n.layer]));
    expect(layer.get("d")).toBe(3); // via a->b->c->d, not the short a->d edge
  });

  it("gives siblings distinct slots within a layer", () => {
    const slots = layoutTree(DIAMOND)
      .filter((n) => n.layer === 1)
      .map((n) => n.slot)
      .sort();
    expect(slots).toEqual([0, 1]);
  });
});

describe("visitedEdges", () => {
  it("pairs consecutive visited nodes", () => {
    expect(visitedEdges(["a", "b", "d"])).toEqual([
      ["a", "b"],
      ["b", "d"],
    ]);
  });

  it("is empty for zero or one visited node", () => {
    expect(visitedEdges([])).toEqual([]);
    expect(visitedEdges(["a"])).toEqual([]);
  });
});

describe("renderTree", () => {
  it("renders one group per reachable node with tooltips", () => {
    const container = document.createElement("div");
    renderTree(container, DIAMOND);
    const groups = container.querySelectorAll("g[data-node]");
    expect(groups).toHaveLength(4);
    const a = container.querySelector('g[data-node="a"]');
    expect(a?.querySelector("title")?.textContent).toContain("a (t)");
  });

  it("marks visited nodes and edges", () => {
    const container = document.createElement("div");
    renderTree(container, DIAMOND, ["a", "b", "d"]);
    const visited = [...container.querySelectorAll("g.node.visited")].map(
      (g) => g.getAttribute("data-node"),
    );
    expect(visited.sort()).toEqual(["a", "b", "d"]);
    expect(container.querySelectorAll("line.edge.visited")).toHaveLength(2);
    // the unvisited a->c edge stays plain
    expect(container.querySelectorAll("line.edge:not(.visited)")).toHaveLength(2);
  });

  it("replaces previous content on re-render", () => {
    const container = document.createElement("div");
    renderTree(container, DIAMOND, []);
    renderTree(container, DIAMOND, ["a"]);
    expect(container.querySelectorAll("svg")).toHaveLength(1);
    expect(container.querySelectorAll("g.node.visited")).toHaveLength(1);
  });
});
