// Build the bindings with:
//   cargo build --release --target wasm32-unknown-unknown -p specc-web
//   wasm-bindgen --target web --out-dir crates/web/www/pkg target/wasm32-unknown-unknown/release/specc_web.wasm
import init, { count_series, random_structure, list_structures, recurrence } from "./pkg/specc_web.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

function params() {
  return {
    spec: $("spec").value,
    cls: $("class").value,
    size: Number($("size").value) || 0,
    seed: Number($("seed").value) >>> 0,
    labeled: $("labeled").checked,
  };
}

function run(f) {
  $("error").textContent = "";
  try {
    f();
  } catch (e) {
    $("error").textContent = e.message ?? String(e);
  }
}

function label(node) {
  return node.k === "Z" ? node.l : node.k === "U" ? `U${node.i}` : node.k;
}

// Tidy-ish layout: leaves get consecutive columns, parents sit over their children.
function layout(node, depth, next, out) {
  const kids = (node.c ?? []).map((c) => layout(c, depth + 1, next, out));
  const x = kids.length ? (kids[0].x + kids[kids.length - 1].x) / 2 : next.col++;
  const me = { x, y: depth, text: label(node), kids };
  out.push(me);
  return me;
}

function draw(tree) {
  const svg = $("tree");
  svg.replaceChildren();
  const nodes = [];
  const root = layout(tree, 0, { col: 0 }, nodes);
  const dx = 28, dy = 44, pad = 20;
  const width = Math.max(...nodes.map((n) => n.x)) * dx + 2 * pad;
  const height = Math.max(...nodes.map((n) => n.y)) * dy + 2 * pad;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("height", Math.min(height, 600));
  const px = (n) => [n.x * dx + pad, n.y * dy + pad];
  for (const n of nodes) {
    for (const k of n.kids) {
      const line = document.createElementNS(SVG, "line");
      const [x1, y1] = px(n), [x2, y2] = px(k);
      Object.entries({ x1, y1, x2, y2, stroke: "#888" }).forEach(([a, v]) => line.setAttribute(a, v));
      svg.append(line);
    }
  }
  for (const n of nodes) {
    const [cx, cy] = px(n);
    const circle = document.createElementNS(SVG, "circle");
    Object.entries({ cx, cy, r: 10, fill: n.kids.length ? "#e8eefc" : "#ffe9c7", stroke: "#556" })
      .forEach(([a, v]) => circle.setAttribute(a, v));
    const text = document.createElementNS(SVG, "text");
    Object.entries({ x: cx, y: cy + 4, "text-anchor": "middle", "font-size": 10 })
      .forEach(([a, v]) => text.setAttribute(a, v));
    text.textContent = n.text;
    svg.append(circle, text);
  }
  return root;
}

function show(item) {
  $("output").textContent = `${item.text}\nsize ${item.size}`;
  draw(item.tree);
}

await init();

$("count").onclick = () => run(() => {
  const p = params();
  const counts = JSON.parse(count_series(p.spec, p.cls, p.size, p.labeled));
  $("output").textContent = counts.map((c, n) => `${n}\t${c}`).join("\n");
});

$("random").onclick = () => run(() => {
  const p = params();
  show(JSON.parse(random_structure(p.spec, p.cls, p.size, p.seed)));
});

$("list").onclick = () => run(() => {
  const p = params();
  const res = JSON.parse(list_structures(p.spec, p.cls, p.size, 20));
  $("output").textContent = `${res.count} structures of size ${p.size}`;
  $("list").replaceChildren(...res.items.map((item) => {
    const li = document.createElement("li");
    li.textContent = item.text;
    li.onclick = () => show(item);
    return li;
  }));
});

$("rec").onclick = () => run(() => {
  const p = params();
  $("output").textContent = recurrence(p.spec, p.cls, Math.max(p.size, 30));
});
