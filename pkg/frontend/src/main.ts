// Browser bootstrap: wires controls to the explorer, keeps the state in the
// URL hash so any view is shareable, and renders view models into the page.

import { ServiceClient } from "./client.js";
import { Explorer } from "./explorer.js";
import { parseState, serializeState } from "./state.js";
import {
  BASE_STYLE,
  renderHeatmap,
  renderHistogram,
  renderPatches,
  renderSummary,
} from "./dom.js";

const SERVICE_URL = "";   // same origin; the service can host this bundle

async function start(): Promise<void> {
  const style = document.createElement("style");
  style.textContent = BASE_STYLE;
  document.head.appendChild(style);

  const client = new ServiceClient(SERVICE_URL, (url) => fetch(url));
  const explorer = new Explorer(client);
  await explorer.init();
  if (window.location.hash.length > 1) {
    explorer.state = parseState(window.location.hash.slice(1));
  }

  const controlsEl = document.getElementById("controls")!;
  const chartEl = document.getElementById("chart")!;

  function sync(): void {
    window.location.hash = serializeState(explorer.state);
    if (explorer.error) {
      chartEl.innerHTML = `<div class="error">${explorer.error}</div>`;
      return;
    }
    const view = explorer.view;
    if (!view) return;
    if (view.kind === "histogram") chartEl.innerHTML = renderHistogram(view);
    else if (view.kind === "heatmap") chartEl.innerHTML = renderHeatmap(view);
    else if (view.kind === "patches") chartEl.innerHTML = renderPatches(view);
    else chartEl.innerHTML = renderSummary(view);
  }

  const controls = explorer.controls!;
  const attrSelect = document.createElement("select");
  for (const name of controls.attributeNames) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    attrSelect.appendChild(option);
  }
  attrSelect.value = explorer.state.attribute;
  attrSelect.addEventListener("change", async () => {
    await explorer.showHistogram(attrSelect.value);
    sync();
  });
  controlsEl.appendChild(attrSelect);

  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = "0";
  slider.max = "1";
  slider.step = "0.01";
  slider.value = "0.5";
  slider.title = "classification threshold for the selected probability signal";
  slider.addEventListener("change", async () => {
    const target = controls.probabilityAttributes.includes(explorer.state.attribute)
      ? explorer.state.attribute
      : controls.probabilityAttributes[0];
    if (!target) return;
    await explorer.setThreshold(target, Number(slider.value));
    sync();
  });
  controlsEl.appendChild(slider);

  const summaryButton = document.createElement("button");
  summaryButton.textContent = "summary";
  summaryButton.addEventListener("click", async () => {
    await explorer.showSummary();
    sync();
  });
  controlsEl.appendChild(summaryButton);

  // The patch control exists only when the service runs in trusted mode.
  if (controls.patchControlVisible) {
    const patchButton = document.createElement("button");
    patchButton.textContent = "skin patches (bin 0)";
    patchButton.addEventListener("click", async () => {
      await explorer.showPatches(0);
      sync();
    });
    controlsEl.appendChild(patchButton);
  }

  await explorer.showHistogram(explorer.state.attribute);
  sync();
}

start().catch((err) => {
  document.body.textContent = `failed to start explorer: ${err}`;
});
