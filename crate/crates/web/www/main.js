import init, { closedCurves, lambdaLandscape, heatmap } from "./pkg/qfeedback_web.js";

const $ = (id) => document.getElementById(id);
const value = (id) => parseFloat($(id).value);

function bindOutputs(ids, redraw) {
  for (const id of ids) {
    const input = $(id);
    const out = input.parentElement.querySelector("output");
    const sync = () => { out.textContent = input.value; redraw(); };
    input.addEventListener("input", sync);
    out.textContent = input.value;
  }
}

// Axes with a margin; returns mapping functions from data to pixels.
function frame(canvas, xmin, xmax, ymin, ymax, xlabel) {
  const ctx = canvas.getContext("2d");
  const m = { l: 50, r: 10, t: 10, b: 30 };
  const w = canvas.width - m.l - m.r, h = canvas.height - m.t - m.b;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(m.l, m.t, w, h);
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  const X = (x) => m.l + ((x - xmin) / (xmax - xmin || 1)) * w;
  const Y = (y) => m.t + h - ((y - ymin) / (ymax - ymin || 1)) * h;
  for (let k = 0; k <= 4; k++) {
    const y = ymin + (k / 4) * (ymax - ymin);
    ctx.fillText(y.toPrecision(3), 4, Y(y) + 4);
    const x = xmin + (k / 4) * (xmax - xmin);
    ctx.fillText(x.toPrecision(3), X(x) - 12, canvas.height - 12);
  }
  ctx.fillText(xlabel, m.l + w / 2, canvas.height - 1);
  return { ctx, X, Y };
}

function line(f, xs, ys, color, dashed = false) {
  const { ctx, X, Y } = f;
  ctx.strokeStyle = color;
  ctx.setLineDash(dashed ? [6, 4] : []);
  ctx.beginPath();
  let pen = false;
  xs.forEach((x, k) => {
    if (!Number.isFinite(ys[k])) { pen = false; return; }
    pen ? ctx.lineTo(X(x), Y(ys[k])) : ctx.moveTo(X(x), Y(ys[k]));
    pen = true;
  });
  ctx.stroke();
  ctx.setLineDash([]);
}

function drawClosed() {
  $("c-err").textContent = "";
  try {
    const d = closedCurves(value("c-alpha"), value("c-j"), value("c-tau"), 400);
    const tau = [], half = [], conc = [];
    for (let k = 0; k < d.length; k += 3) { tau.push(d[k]); half.push(d[k + 1] / 2); conc.push(d[k + 2]); }
    const f = frame($("c-plot"), 0, tau[tau.length - 1], 0, Math.max(1, ...half), "τ = J t");
    line(f, tau, half, "#1f77b4");
    line(f, tau, conc, "#d62728");
  } catch (e) { $("c-err").textContent = String(e); }
}

function drawLandscape() {
  $("l-err").textContent = "";
  try {
    const r = value("l-range");
    const d = lambdaLandscape(value("l-alpha"), value("l-j"), -r, r, 241);
    const c0 = d[0], lam = [], c = [];
    for (let k = 1; k < d.length; k += 2) { lam.push(d[k]); c.push(d[k + 1]); }
    const finite = c.filter(Number.isFinite);
    const top = Math.max(c0, ...finite) * 1.1 || 1;
    const f = frame($("l-plot"), -r, r, 0, top, "λ");
    line(f, lam, c, "#2ca02c");
    line(f, [-r, r], [c0, c0], "#888", true);
    let best = 0;
    c.forEach((v, k) => { if (v > c[best]) best = k; });
    $("l-best").textContent = `max C ≈ ${c[best].toFixed(4)} at λ ≈ ${lam[best].toFixed(3)}, C₀ = ${c0.toFixed(4)}`;
  } catch (e) { $("l-err").textContent = String(e); }
}

let mapData = null;

function colour(t) {
  // Blue for negative, white at zero, red for positive; t in [-1, 1].
  const a = Math.min(1, Math.abs(t));
  const v = Math.round(255 * (1 - a));
  return t >= 0 ? `rgb(255,${v},${v})` : `rgb(${v},${v},255)`;
}

function drawMap() {
  if (!mapData) return;
  const { d, n } = mapData;
  const which = parseInt($("m-which").value, 10);
  const canvas = $("m-plot"), ctx = canvas.getContext("2d");
  const vals = [];
  for (let k = 0; k < d.length; k += 6) vals.push(d[k + which]);
  const scale = Math.max(...vals.filter(Number.isFinite).map(Math.abs)) || 1;
  const m = 50, w = (canvas.width - m - 80) / n, h = (canvas.height - m) / n;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  vals.forEach((v, k) => {
    const i = Math.floor(k / n), j = k % n;
    ctx.fillStyle = Number.isFinite(v) ? colour(v / scale) : "#000";
    ctx.fillRect(m + j * w, (n - 1 - i) * h, Math.ceil(w), Math.ceil(h));
  });
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.fillText("J →  [0.05, 5]", m + 4, canvas.height - 30);
  ctx.save();
  ctx.translate(14, canvas.height - m - 4);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("α →  [0.05, 2]", 0, 0);
  ctx.restore();
  ctx.fillText(`|max| = ${scale.toPrecision(3)}`, canvas.width - 76, 14);
}

function computeMap() {
  const n = parseInt($("m-n").value, 10);
  $("m-status").textContent = "computing…";
  $("m-err").textContent = "";
  setTimeout(() => {
    const t0 = performance.now();
    try {
      mapData = { d: heatmap(0.05, 2, n, 0.05, 5, n, 41), n };
      $("m-status").textContent = `${n * n} points in ${((performance.now() - t0) / 1000).toFixed(2)} s`;
      drawMap();
    } catch (e) {
      $("m-status").textContent = "";
      $("m-err").textContent = String(e);
    }
  }, 10);
}

await init();
bindOutputs(["c-alpha", "c-j", "c-tau"], drawClosed);
bindOutputs(["l-alpha", "l-j", "l-range"], drawLandscape);
bindOutputs(["m-n"], () => {});
$("m-run").addEventListener("click", computeMap);
$("m-which").addEventListener("change", drawMap);
drawClosed();
drawLandscape();
