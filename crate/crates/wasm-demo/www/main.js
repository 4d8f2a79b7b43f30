import init, { Profiles, Scatter, pairCurve } from "./pkg/causal_tunnel_demo.js";

const SITES = 256;
const DT = 2e-3;
const STEPS_PER_FRAME = 25;
const T_END = 10;

const $ = (id) => document.getElementById(id);
const status = (msg) => { $("status").textContent = msg; };

function params() {
  return {
    kg: $("model").value === "kg",
    height: parseFloat($("height").value),
    amp: parseFloat($("amp").value),
  };
}

function plot(canvas, x, series, yRange) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const x0 = x[0], x1 = x[x.length - 1];
  const [y0, y1] = yRange;
  const px = (v) => ((v - x0) / (x1 - x0)) * w;
  const py = (v) => h - 8 - ((v - y0) / (y1 - y0)) * (h - 16);
  ctx.strokeStyle = "#eee";
  ctx.beginPath(); ctx.moveTo(0, py(0)); ctx.lineTo(w, py(0)); ctx.stroke();
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width || 1.5;
    ctx.beginPath();
    s.y.forEach((v, i) => (i ? ctx.lineTo(px(x[i]), py(v)) : ctx.moveTo(px(x[i]), py(v))));
    ctx.stroke();
  }
  return { px, py };
}

const maxAbs = (a) => a.reduce((m, v) => Math.max(m, Math.abs(v)), 0) || 1;

function drawProfiles() {
  const p = params();
  const prof = new Profiles(p.kg, SITES, p.height, p.amp);
  const rho = prof.packet(), tilde = prof.intervened();
  const top = Math.max(maxAbs(rho), maxAbs(tilde));
  const v = prof.barrier().map((b) => (p.height > 0 ? (b / p.height) * top : 0));
  const fmax = maxAbs(prof.intervention());
  const f = Array.from(prof.intervention(), (y) => (y / fmax) * top);
  plot($("profiles"), prof.x(), [
    { y: v, color: "#888" },
    { y: f, color: "#393", width: 1 },
    { y: rho, color: "#06c" },
    { y: tilde, color: "#c60" },
  ], [-top * 1.05, top * 1.05]);
  status(`negative-band leakage after projection: ${prof.leakage().toExponential(2)}`);
  prof.free();
}

let sim = null, running = false, top = 1;

function resetScatter() {
  const p = params();
  if (sim) sim.free();
  sim = new Scatter(p.kg, SITES, p.height, p.amp, DT);
  top = 1.1 * maxAbs(sim.rho());
  drawScatter();
}

function drawScatter() {
  const x = sim.x(), rho = sim.rho(), tilde = sim.rho_tilde();
  // log10 |diff| mapped from [-16, 0] onto [0, top]
  const diff = rho.map((r, i) => {
    const d = Math.abs(tilde[i] - r);
    return d > 1e-16 ? ((Math.log10(d) + 16) / 16) * top : 0;
  });
  const { px } = plot($("scatter"), x, [
    { y: diff, color: "#a0a", width: 1 },
    { y: rho, color: "#06c" },
    { y: tilde, color: "#c60" },
  ], [-0.3 * top, top]);
  const ctx = $("scatter").getContext("2d");
  ctx.strokeStyle = "#a0a";
  ctx.setLineDash([4, 4]);
  for (const c of [sim.cone_left(), sim.cone_right()]) {
    ctx.beginPath(); ctx.moveTo(px(c), 0); ctx.lineTo(px(c), 260); ctx.stroke();
  }
  ctx.setLineDash([]);
  $("clock").textContent = `t = ${sim.time().toFixed(2)}`;
}

function frame() {
  if (!running) return;
  sim.advance(STEPS_PER_FRAME);
  drawScatter();
  if (sim.time() >= T_END - 1e-9) {
    running = false;
    $("play").textContent = "Play";
    return;
  }
  requestAnimationFrame(frame);
}

function drawPairs() {
  const p = params();
  status("computing...");
  setTimeout(() => {
    try {
      const flat = pairCurve(p.kg, p.height, 8, 16);
      const t = [], n = [];
      for (let i = 0; i < flat.length; i += 2) { t.push(flat[i]); n.push(flat[i + 1]); }
      const top = Math.max(1e-6, ...n) * 1.1;
      const { px, py } = plot($("paircurve"), t, [{ y: n, color: "#c33", width: 2 }], [0, top]);
      const ctx = $("paircurve").getContext("2d");
      ctx.fillStyle = "#c33";
      t.forEach((ti, i) => ctx.fillRect(px(ti) - 2, py(n[i]) - 2, 4, 4));
      ctx.fillStyle = "#222";
      ctx.fillText(`N- at t=8: ${n[n.length - 1].toExponential(3)}`, 10, 16);
      status("");
    } catch (e) {
      status(e.message || String(e));
    }
  }, 10);
}

function guard(fn) {
  return () => {
    try { fn(); } catch (e) { status(e.message || String(e)); }
  };
}

await init();
$("show-profiles").onclick = guard(drawProfiles);
$("reset").onclick = guard(() => { running = false; $("play").textContent = "Play"; resetScatter(); });
$("play").onclick = guard(() => {
  if (!sim || sim.time() >= T_END - 1e-9) resetScatter();
  running = !running;
  $("play").textContent = running ? "Pause" : "Play";
  if (running) requestAnimationFrame(frame);
});
$("pairs").onclick = drawPairs;
for (const id of ["model", "height", "amp"]) $(id).onchange = guard(() => { running = false; resetScatter(); drawProfiles(); });
guard(() => { drawProfiles(); resetScatter(); })();
