/** Layered DAG rendering of the decision tree with a visited-path overlay. */

import type { TreeInfo } from "./api.js";

export interface LayeredNode {
  name: string;
  layer: number;
  slot: number; // position within the layer
}

/**
 * Longest-path layering from the root: a node's layer is the length of the
 * longest root-to-node path, so every edge points to a strictly deeper layer
 * and converging branches (multiple parents) still render downstream of all
 * of them. Unreachable nodes are dropped.
 */
export function layoutTree(tree: TreeInfo): LayeredNode[] {
  const depth = new Map<string, number>([[tree.root, 0]]);
  // relax longest-path distances; the graph is a DAG so |V| passes suffice
  const names = Object.keys(tree.nodes);
  for (let pass = 0; pass < names.length; pass++) {
    let changed = false;
    for (const [name, info] of Object.entries(tree.nodes)) {
      const d = depth.get(name);
      if (d === undefined) continue;
      for (const child of info.children) {
        if (!(child in tree.nodes)) continue;
        if ((depth.get(child) ?? -1) < d + 1) {
          depth.set(child, d + 1);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  const byLayer = new Map<number, string[]>();
  for (const [name, layer] of depth) {
    const bucket = byLayer.get(layer) ?? [];
    bucket.push(name);
    byLayer.set(layer, bucket);
  }
  const out: LayeredNode[] = [];
  for (const [layer, bucket] of [...byLayer.entries()].sort((a, b) => a[0] - b[0])) {
    bucket.sort();
    bucket.forEach((name, slot) => out.push({ name, layer, slot }));
  }
  return out;
}

/** Edges of the visited path, in execution order. */
export function visitedEdges(visited: string[]): Array<[string, string]> {
  const edges: Array<[string, string]> = [];
  for (let i = 0; i + 1 < visited.length; i++) {
    edges.push([visited[i], visited[i + 1]]);
  }
  return edges;
}

const X_STEP = 170;
const Y_STEP = 80;
const NODE_W = 140;
const NODE_H = 36;

function center(node: LayeredNode): [number, number] {
  return [40 + node.slot * X_STEP + NODE_W / 2, 30 + node.layer * Y_STEP + NODE_H / 2];
}

/** Render the tree as SVG into `container`, highlighting the visited path. */
export function renderTree(
  container: HTMLElement,
  tree: TreeInfo,
  visited: string[] = [],
): void {
  const layout = layoutTree(tree);
  const byName = new Map(layout.map((n) => [n.name, n]));
  const visitedSet = new Set(visited);
  const visitedEdgeSet = new Set(visitedEdges(visited).map(([a, b]) => `${a}->${b}`));

  const width = 80 + Math.max(...layout.map((n) => n.slot + 1)) * X_STEP;
  const height = 60 + Math.max(...layout.map((n) => n.layer + 1)) * Y_STEP;
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "tree-view");

  for (const [name, info] of Object.entries(tree.nodes)) {
    const from = byName.get(name);
    if (!from) continue;
    for (const child of info.children) {
      const to = byName.get(child);
      if (!to) continue;
      const [x1, y1] = center(from);
      const [x2, y2] = center(to);
      const line = document.createElementNS(svgNs, "line");
      line.setAttribute("x1", String(x1));
      line.setAttribute("y1", String(y1 + NODE_H / 2));
      line.setAttribute("x2", String(x2));
      line.setAttribute("y2", String(y2 - NODE_H / 2));
      const onPath = visitedEdgeSet.has(`${name}->${child}`);
      line.setAttribute("class", onPath ? "edge visited" : "edge");
      svg.appendChild(line);
    }
  }

  for (const node of layout) {
    const [cx, cy] = center(node);
    const group = document.createElementNS(svgNs, "g");
    group.setAttribute(
      "class",
      visitedSet.has(node.name) ? "node visited" : "node",
    );
    group.setAttribute("data-node", node.name);
    const rect = document.createElementNS(svgNs, "rect");
    rect.setAttribute("x", String(cx - NODE_W / 2));
    rect.setAttribute("y", String(cy - NODE_H / 2));
    rect.setAttribute("width", String(NODE_W));
    rect.setAttribute("height", String(NODE_H));
    rect.setAttribute("rx", "6");
    const label = document.createElementNS(svgNs, "text");
    label.setAttribute("x", String(cx));
    label.setAttribute("y", String(cy + 4));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.name;
    const title = document.createElementNS(svgNs, "title");
    const info = tree.nodes[node.name];
    title.textContent = `${node.name} (${info.type})\nrequires: ${info.requires.join(", ") || "-"}\ncreates: ${info.creates.join(", ") || "-"}`;
    group.appendChild(rect);
    group.appendChild(label);
    group.appendChild(title);
    svg.appendChild(group);
  }

  container.replaceChildren(svg);
}
