// Built with: wasm-pack build crates/wasm --target web --out-dir www/pkg
import init, { adaptiveBand, constants, coverage } from "./pkg/surrband_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function inputs() {
  return {
    n: num("n"),
    dims: $("dims").value,
    alpha: num("alpha"),
    gamma: num("gamma"),
    sigma: num("sigma"),
    truth: $("truth").value,
    seed: BigInt(num("seed")),
  };
}

function plot(view) {
  const cv = $("plot");
  const ctx = cv.getContext("2d");
  const { width: w, height: h } = cv;
  ctx.clearRect(0, 0, w, h);
  const all = view.y.concat(view.lower, view.upper);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const px = (x) => 30 + (w - 40) * x;
  const py = (y) => h - 20 - (h - 40) * (y - lo) / (hi - lo || 1);

  ctx.fillStyle = "#999";
  view.x.forEach((x, i) => ctx.fillRect(px(x) - 1, py(view.y[i]) - 1, 2, 2));

  const line = (ys, color, width) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = width;
    ctx.beginPath();
    view.x.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
    ctx.stroke();
  };
  line(view.lower, "#36c", 1.5);
  line(view.upper, "#36c", 1.5);
  line(view.center, "#9bd", 1);
  line(view.truth, "#c33", 1.5);
}

function show(id, f) {
  try {
    const out = f();
    $(id).textContent = JSON.stringify(out, null, 2);
    return out;
  } catch (e) {
    $(id).textContent = `error: ${e}`;
    return null;
  }
}

function drawBand() {
  const p = inputs();
  const view = show("band-info", () => {
    const v = JSON.parse(adaptiveBand(p.n, p.dims, p.alpha, p.gamma, p.sigma, p.truth, p.seed));
    plot(v);
    return {
      selectedLevel: v.selectedLevel,
      width: v.width,
      levelWidths: v.levelWidths,
      targetWidths: v.targetWidths,
      statistics: v.statistics,
      thresholds: v.thresholds,
      surrogateCovered: v.surrogateCovered,
      truthCovered: v.truthCovered,
    };
  });
  return view;
}

await init();
$("draw").onclick = drawBand;
$("consts").onclick = () =>
  show("const-info", () => JSON.parse(constants(num("n"), num("d"), num("alpha"), num("gamma"))));
$("mc").onclick = () => {
  const p = inputs();
  show("mc-info", () => JSON.parse(coverage(p.n, p.dims, p.alpha, p.gamma, p.truth, num("reps"), p.seed)));
};
drawBand();
