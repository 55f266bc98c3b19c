import init, { crossover_curve, crossover_point, mixture_check, gibbs_sweep } from "./pkg/genbound_web.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, xs, series, colors) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const ymax = Math.max(1e-12, ...series.flat().filter(Number.isFinite));
  const xmin = xs[0], xmax = xs[xs.length - 1];
  const px = (x) => pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad);
  const py = (y) => h - pad - y / ymax * (h - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#000";
  ctx.fillText(ymax.toPrecision(3), 2, pad + 4);
  ctx.fillText("0", pad - 12, h - pad + 4);
  ctx.fillText(xmin.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(xmax.toPrecision(3), w - pad - 20, h - pad + 14);
  series.forEach((ys, k) => {
    ctx.strokeStyle = colors[k];
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
  });
}

function columns(flat, width) {
  const cols = Array.from({ length: width }, () => []);
  flat.forEach((v, i) => cols[i % width].push(v));
  return cols;
}

function drawCrossover() {
  const pi = parseFloat($("x-pi").value);
  const u = $("x-u").value === "1";
  const cmax = parseFloat($("x-cmax").value);
  $("x-pi-v").textContent = pi.toFixed(2);
  const [c, f, g] = columns(crossover_curve(pi, u, cmax, 400), 3);
  plot($("x-plot"), c, [f, g], ["#c33", "#36c"]);
  const root = crossover_point(pi, u, cmax);
  $("x-root").textContent = Number.isNaN(root)
    ? "no crossing on this range"
    : `f = g at c = ${root.toFixed(4)}, r = ${Math.sqrt(2 * root).toFixed(4)}`;
}

function runMixture() {
  try {
    const [bound, kl, se] = mixture_check(
      parseFloat($("m-c").value), parseFloat($("m-pi").value), $("m-u").value === "1",
      parseInt($("m-n").value, 10), BigInt(Date.now()));
    $("m-out").textContent =
      `closed-form bound  ${bound.toFixed(6)}\nMonte Carlo KL     ${kl.toFixed(6)} ± ${se.toFixed(6)}`;
  } catch (e) {
    $("m-out").textContent = String(e);
  }
}

function runGibbs() {
  try {
    const flat = gibbs_sweep(parseInt($("g-n").value, 10), parseFloat($("g-p").value), parseFloat($("g-beta").value), 41);
    const [beta, gen, mi, cmi, dis] = columns(flat, 5);
    plot($("g-plot"), beta, [gen.map(Math.abs), mi, cmi, dis], ["#000", "#c33", "#36c", "#393"]);
    $("g-err").textContent = "";
  } catch (e) {
    $("g-err").textContent = String(e);
  }
}

await init();
["x-pi", "x-u", "x-cmax"].forEach((id) => $(id).addEventListener("input", drawCrossover));
$("m-run").addEventListener("click", runMixture);
$("g-run").addEventListener("click", runGibbs);
drawCrossover();
runGibbs();
