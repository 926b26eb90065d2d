/** Prediction review: per-category counts and a score-sorted table.
 * Ascending order surfaces the least-confident predictions first, which is
 * where a reviewer's attention pays off. */

import { excerpt, formatScore } from "../format.js";
import type { UiSession } from "../session.js";
import type { PredictionsResponse } from "../types.js";

export interface PredictionHandlers {
  onOrderChange: (order: "asc" | "desc") => void;
  onFilterChange: (category: string | null) => void;
  onBackToCandidates: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderPredictionReview(
  session: UiSession,
  response: PredictionsResponse,
  handlers: PredictionHandlers,
): HTMLElement {
  const root = el("section", "prediction-review");

  const counts = el("div", "prediction-counts");
  for (const category of session.categories) {
    const count = response.prediction_counts[category] ?? 0;
    const chip = el("span", "count-chip", `${category}: ${count}`);
    chip.dataset.category = category;
    chip.dataset.count = String(count);
    counts.append(chip);
  }
  if (response.unclassifiable.length > 0) {
    counts.append(
      el(
        "span",
        "count-chip unclassifiable",
        `unclassifiable: ${response.unclassifiable.length}`,
      ),
    );
  }
  root.append(counts);

  const controls = el("div", "prediction-controls");
  const filter = el("select", "prediction-filter") as HTMLSelectElement;
  const all = el("option", undefined, "all categories") as HTMLOptionElement;
  all.value = "";
  filter.append(all);
  for (const category of session.categories) {
    const option = el("option", undefined, category) as HTMLOptionElement;
    option.value = category;
    option.selected = session.predictionFilter === category;
    filter.append(option);
  }
  filter.addEventListener("change", () =>
    handlers.onFilterChange(filter.value === "" ? null : filter.value),
  );
  controls.append(filter);

  const order = el(
    "button",
    "order-toggle",
    session.predictionOrder === "asc"
      ? "least confident first"
      : "most confident first",
  );
  order.type = "button";
  order.addEventListener("click", () =>
    handlers.onOrderChange(session.predictionOrder === "asc" ? "desc" : "asc"),
  );
  controls.append(order);

  const back = el("button", "back-to-candidates", "revise selections");
  back.type = "button";
  back.addEventListener("click", () => handlers.onBackToCandidates());
  controls.append(back);
  root.append(controls);

  const rows = [...response.predictions].sort((a, b) =>
    session.predictionOrder === "asc" ? a.score - b.score : b.score - a.score,
  );

  const table = el("table", "prediction-table");
  const head = el("tr");
  for (const title of ["document", "category", "score", "margin", "text"]) {
    head.append(el("th", undefined, title));
  }
  table.append(head);
  for (const prediction of rows) {
    const row = el("tr", "prediction-row");
    row.dataset.docId = prediction.doc_id;
    row.dataset.category = prediction.category;
    row.append(
      el("td", "pred-doc", prediction.doc_id),
      el("td", "pred-category", prediction.category),
      el("td", "pred-score", formatScore(prediction.score)),
      el("td", "pred-margin", formatScore(prediction.margin)),
      el("td", "pred-excerpt", excerpt(prediction.excerpt, 160)),
    );
    table.append(row);
  }
  root.append(table);
  return root;
}
