/** Browser bootstrap: wire the controller to the page. */

import { HttpApiClient } from "./api.js";
import { AppController } from "./controller.js";
import { renderGraph, renderNodeDetail, renderScenarioPanel, renderView } from "./render.js";
import { buildNodeDetail } from "./viewmodel.js";

const controller = new AppController(new HttpApiClient(""));

function refresh(): void {
  const graph = document.getElementById("graph");
  if (graph && controller.layout) {
    renderGraph(graph, controller.layout, controller.view.annotations);
  }
  const panel = document.getElementById("scenario");
  if (panel && controller.panel) {
    renderScenarioPanel(panel, controller.panel, controller.view.inlineError?.subject ?? null);
  }
  renderView(document, controller.view);
}

async function apply(): Promise<void> {
  refresh(); // show busy state immediately
  const view = await controller.applyScenario();
  if (view) refresh();
}

document.addEventListener("change", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "profile-select") {
    controller.changeProfile((target as HTMLSelectElement).value);
    return;
  }
  const taskId = target.getAttribute("data-task");
  if (taskId) {
    controller.changeTask(taskId, (target as HTMLInputElement).value);
    const output = target.nextElementSibling;
    if (output && output.tagName === "OUTPUT") {
      output.textContent = (target as HTMLInputElement).value;
    }
  }
});

document.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "apply-btn") {
    void apply();
    return;
  }
  if (target.id === "mc-run") {
    const runs = Number((document.getElementById("mc-runs") as HTMLInputElement).value);
    const seed = Number((document.getElementById("mc-seed") as HTMLInputElement).value);
    refresh();
    void controller.runUncertainty(runs, seed).then((view) => {
      if (view) refresh();
    });
    return;
  }
  if (target.id === "mc-cancel") {
    controller.cancelUncertainty();
    refresh();
    return;
  }
  if (target.id === "detail-close") {
    const drawer = document.getElementById("detail");
    if (drawer) renderNodeDetail(drawer, null);
    return;
  }
  if (target.id === "banner") {
    void boot();
    return;
  }
  const group = target.closest("[data-node]");
  if (group && controller.model) {
    const drawer = document.getElementById("detail");
    const nodeId = group.getAttribute("data-node");
    if (drawer && nodeId) {
      renderNodeDetail(drawer, buildNodeDetail(controller.model, nodeId));
    }
  }
});

async function boot(): Promise<void> {
  await controller.init();
  refresh();
}

void boot();
