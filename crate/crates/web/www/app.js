import init, { judge, run_program, program_reliability } from "./pkg/relcheck_web.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  const el = $(out);
  try {
    el.textContent = f();
    el.className = "";
  } catch (e) {
    el.textContent = String(e);
    el.className = "error";
  }
}

await init();

$("judge").onclick = () => show("judge-out", () => judge($("cand").value, $("base").value, $("rel").value));
$("run").onclick = () => show("run-out", () => run_program($("prog").value, $("spec").value, $("state").value));
$("rel-btn").onclick = () =>
  show("rel-out", () => program_reliability($("prog").value, $("spec").value, $("region").value));
