import init, { spectrum, hologram, collapse_window } from "./pkg/qcavity_web.js";

function inputs(section) {
  const values = {};
  for (const el of section.querySelectorAll("input")) values[el.name] = Number(el.value);
  return values;
}

function fmt(x) {
  return Number.isFinite(x) ? x.toPrecision(4) : String(x);
}

// Line plot of ys against xs; marks are drawn as vertical lines.
function plot(canvas, xs, ys, marks = [], logY = false) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pts = [];
  for (let i = 0; i < xs.length; i++) {
    const y = logY ? Math.log10(ys[i]) : ys[i];
    if (Number.isFinite(y)) pts.push([xs[i], y]);
  }
  if (pts.length < 2) return;
  const x0 = Math.min(...pts.map((p) => p[0]));
  const x1 = Math.max(...pts.map((p) => p[0]));
  const y0 = Math.min(...pts.map((p) => p[1]));
  const y1 = Math.max(...pts.map((p) => p[1]));
  const px = (x) => 10 + ((x - x0) / (x1 - x0 || 1)) * (w - 20);
  const py = (y) => h - 10 - ((y - y0) / (y1 - y0 || 1)) * (h - 20);
  ctx.strokeStyle = "#c33";
  for (const m of marks) {
    const v = logY ? Math.log10(m) : m;
    if (!Number.isFinite(v)) continue;
    ctx.beginPath();
    if (logY) {
      ctx.moveTo(0, py(v));
      ctx.lineTo(w, py(v));
    } else {
      ctx.moveTo(px(v), 0);
      ctx.lineTo(px(v), h);
    }
    ctx.stroke();
  }
  ctx.strokeStyle = "#225";
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
  ctx.stroke();
}

function raster(canvas, values, nx, ny) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(nx, ny);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  for (let i = 0; i < values.length; i++) {
    const g = Math.round(255 * ((values[i] - lo) / (hi - lo || 1)));
    img.data.set([g, g, g, 255], 4 * i);
  }
  const tmp = new OffscreenCanvas(nx, ny);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

function guard(section, f) {
  const out = section.querySelector(".out");
  try {
    out.classList.remove("err");
    out.textContent = f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = e.message ?? String(e);
  }
}

function drawSpectrum(section) {
  guard(section, () => {
    const v = inputs(section);
    const s = spectrum(v.omega0, v.omega, v.lambda, v.n, v.gamma, 0);
    plot(section.querySelector("canvas"), s.omegas, s.imchi, s.predicted);
    return [
      `peaks      ${Array.from(s.peaks, fmt).join(", ")}`,
      `predicted  ${Array.from(s.predicted, fmt).join(", ")}`,
      s.unresolved ? "doublet not resolved at this linewidth" : "",
    ].join("\n");
  });
}

function drawHologram(section) {
  guard(section, () => {
    const v = inputs(section);
    const n = 200;
    const h = hologram(v.k, [v.x, v.y, 0, v.f, 0], v.r, v.extent, n, n);
    raster(section.querySelector("canvas"), h.values, h.nx, h.ny);
    return `contrast ${fmt(h.contrast)}   fringe period ${fmt(h.period)} m`;
  });
}

function drawCollapse(section) {
  guard(section, () => {
    const v = inputs(section);
    const c = collapse_window(v.t_r, v.n_min, v.n_max, v.t_kink, v.quanta);
    const times = c.cat_times;
    const phis = Array.from(times, (_, i) => (90 * i) / (times.length - 1));
    plot(section.querySelector("canvas"), phis, times, [c.lower, c.upper, v.t_kink], true);
    return [
      `window     [${fmt(c.lower)}, ${fmt(c.upper)}] s for N = ${fmt(c.n_sys)}`,
      `verdict    ${c.verdict ? "feasible" : "not feasible"} (margin ${fmt(c.margin)}, n ≤ ${c.feasible_n_max})`,
      "curve      cat collapse time against branch phase 0..90°, log scale",
    ].join("\n");
  });
}

await init();
const views = [
  ["spectrum", drawSpectrum],
  ["hologram", drawHologram],
  ["collapse", drawCollapse],
];
for (const [id, draw] of views) {
  const section = document.getElementById(id);
  section.addEventListener("input", () => draw(section));
  draw(section);
}
