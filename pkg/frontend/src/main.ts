/** Entry point: open the batch named in the query string against the
 * service origin (same origin by default, ?api= to override). */

import { ApiClient } from "./api.js";
import { App } from "./components/app.js";

function mount(): void {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app container");
  }
  const batchId = params.get("batch");
  if (!batchId) {
    root.innerHTML =
      '<form class="open-batch"><label>batch id ' +
      '<input name="batch" required></label>' +
      "<button type='submit'>open</button></form>";
    return;
  }
  App.open(api, root, batchId).catch((error) => {
    root.textContent = `failed to open batch: ${error}`;
  });
}

mount();
