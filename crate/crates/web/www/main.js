import init, { tmss_explorer, symmetrize_lossy, random_pipeline } from "./pkg/gdistill_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 6) => (typeof x === "number" ? x.toFixed(d) : String(x));

function bindSlider(id, onChange) {
  const el = $(id);
  const out = $(id + "-out");
  const update = () => {
    out.textContent = Number(el.value).toFixed(2);
    onChange();
  };
  el.addEventListener("input", update);
  return update;
}

function params(p) {
  return `n_a=${fmt(p.n_a)}  n_b=${fmt(p.n_b)}  k_x=${fmt(p.k_x)}  k_p=${fmt(p.k_p)}`;
}

function plotCurve(canvas, curve) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const xs = curve.map((p) => p[0]);
  const ys = curve.map((p) => p[1]);
  const xMax = Math.max(...xs);
  let yMin = Math.min(0, ...ys);
  let yMax = Math.max(0, ...ys);
  if (yMax - yMin < 1e-12) { yMin -= 1; yMax += 1; }
  const X = (x) => pad + ((w - 2 * pad) * x) / xMax;
  const Y = (y) => h - pad - ((h - 2 * pad) * (y - yMin)) / (yMax - yMin);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, Y(0));
  ctx.lineTo(w - pad, Y(0));
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText("0", 8, Y(0) + 4);
  ctx.fillText(fmt(yMax, 3), 4, Y(yMax) + 4);
  ctx.fillText(fmt(yMin, 3), 4, Y(yMin) + 4);
  ctx.fillText("probe squeezing", w / 2 - 40, h - 8);
  ctx.fillText(fmt(xMax, 1), w - pad - 10, h - pad + 16);

  ctx.strokeStyle = "#1565c0";
  ctx.lineWidth = 2;
  ctx.beginPath();
  curve.forEach(([x, y], i) => (i ? ctx.lineTo(X(x), Y(y)) : ctx.moveTo(X(x), Y(y))));
  ctx.stroke();
  ctx.lineWidth = 1;
}

function updateExplorer() {
  const v = JSON.parse(tmss_explorer(+$("tm-r").value, +$("tm-eta").value, +$("tm-probe").value, 200));
  if (v.error) { $("tm-info").textContent = v.error; return; }
  plotCurve($("tm-plot"), v.rc_curve);
  const min = v.rc_curve.reduce((a, p) => (p[1] < a[1] ? p : a));
  $("tm-info").textContent = [
    `standard form: ${params(v.params)}`,
    `partial transpose negative: ${v.npt.npt} (min symplectic eigenvalue ${fmt(v.npt.min_pt_symplectic_eigenvalue)})`,
    `reduction criterion: minimum ${fmt(min[1])} at probe r=${fmt(min[0], 2)}; negative values certify distillability`,
    `large-probe limit (n-k_x)(n+k_p)-1 = ${fmt(v.asymptotic_value)} (meaningful for symmetric states)`,
  ].join("\n");
}

function updateSymmetrize() {
  const v = JSON.parse(symmetrize_lossy(+$("sy-r").value, +$("sy-ea").value, +$("sy-eb").value));
  if (v.error) { $("sy-info").textContent = v.error; return; }
  $("sy-info").textContent = [
    `before: ${params(v.before)}`,
    `after:  ${params(v.after)}`,
    `beam splitter angle ${fmt(v.theta)} (transmissivity ${fmt(v.transmissivity)}), ancilla on ${v.swapped_sides ? "A" : "B"}`,
    `inseparability residual ${fmt(v.residual_in)} -> ${fmt(v.residual_out)} (factor ${fmt(v.scale_factor)})`,
    `large-probe limit after symmetrization: ${fmt(v.asymptote_after)}`,
  ].join("\n");
}

function runPipeline() {
  const v = JSON.parse(random_pipeline(+$("pl-a").value, +$("pl-b").value, +$("pl-seed").value, $("pl-kind").value));
  if (v.error) { $("pl-verdict").textContent = ""; $("pl-info").textContent = v.error; return; }
  const r = v.report;
  const st = r.stages;
  $("pl-verdict").textContent = r.verdict;
  const lines = [
    `partition ${r.input_partition[0]}x${r.input_partition[1]}`,
    `min symplectic eigenvalue of the partial transpose: ${fmt(st.npt_check.min_pt_symplectic_eigenvalue)}`,
  ];
  if (st.witness) lines.push(`witness margin ${fmt(st.witness.margin)}, perturbation ${st.witness.perturbation}`);
  if (st.concentrate) lines.push(`concentrated 1x1 state, leakage ${st.concentrate.leakage.toExponential(2)}`);
  if (st.standard_form) lines.push(`standard form: ${params(st.standard_form.params)}`);
  if (st.symmetrize) lines.push(`symmetrized: ${params(st.symmetrize.params_out)}`);
  if (st.rc_witness) {
    const c = st.rc_witness.certificate;
    lines.push(`reduction criterion at probe r=${c.r}: ${fmt(c.value)}`);
  }
  $("pl-info").textContent = lines.join("\n");
}

await init();
const explorer = [bindSlider("tm-r", updateExplorer), bindSlider("tm-eta", updateExplorer), bindSlider("tm-probe", updateExplorer)];
const sym = [bindSlider("sy-r", updateSymmetrize), bindSlider("sy-ea", updateSymmetrize), bindSlider("sy-eb", updateSymmetrize)];
explorer.forEach((f) => f());
sym.forEach((f) => f());
$("pl-run").addEventListener("click", runPipeline);
runPipeline();
