/** Candidate browser: one column per topic, paged candidate cards, category
 * assignment, and the pre-submit checks. Pure DOM construction; all data
 * arrives from the service payloads. */

import { excerpt, formatTheta, lengthFraction } from "../format.js";
import {
  canSubmit,
  categoryOf,
  hasLengthImbalance,
  hasUnsavedChanges,
  missingCategories,
  type UiSession,
} from "../session.js";
import type { CandidatesPage } from "../types.js";

export interface CandidateHandlers {
  onAssign: (category: string, docId: string) => void;
  onPageChange: (page: number) => void;
  onSubmitAndClassify: () => void;
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

function candidateCard(
  entry: CandidatesPage["topics"][number][number],
  session: UiSession,
  maxTokens: number,
  handlers: CandidateHandlers,
): HTMLElement {
  const card = el("article", "candidate-card");
  card.dataset.docId = entry.doc_id;
  const assigned = categoryOf(session, entry.doc_id);
  if (assigned !== null) {
    card.classList.add("selected");
    card.dataset.assignedCategory = assigned;
  }

  const header = el("header", "candidate-header");
  header.append(
    el("span", "candidate-id", entry.doc_id),
    el("span", "candidate-theta", formatTheta(entry.theta)),
  );
  card.append(header);

  const body = el("div", "candidate-text");
  const short = excerpt(entry.full_text);
  body.textContent = short;
  card.append(body);
  if (short !== entry.full_text) {
    const expand = el("button", "expand-toggle", "show full text");
    expand.type = "button";
    let expanded = false;
    expand.addEventListener("click", () => {
      expanded = !expanded;
      body.textContent = expanded ? entry.full_text : short;
      expand.textContent = expanded ? "show excerpt" : "show full text";
    });
    card.append(expand);
  }

  const meta = el("div", "candidate-meta");
  meta.append(el("span", "token-count", `${entry.token_count} tokens`));
  const bar = el("div", "length-bar");
  const fill = el("div", "length-bar-fill");
  fill.style.width = `${lengthFraction(entry.token_count, maxTokens) * 100}%`;
  bar.append(fill);
  meta.append(bar);
  card.append(meta);

  const actions = el("div", "candidate-actions");
  for (const category of session.categories) {
    const button = el(
      "button",
      assigned === category ? "assign active" : "assign",
      category,
    );
    button.type = "button";
    button.addEventListener("click", () =>
      handlers.onAssign(category, entry.doc_id),
    );
    actions.append(button);
  }
  card.append(actions);
  return card;
}

export function renderCandidateBrowser(
  session: UiSession,
  page: CandidatesPage,
  handlers: CandidateHandlers,
): HTMLElement {
  const root = el("section", "candidate-browser");

  const maxTokens = Math.max(
    1,
    ...page.topics.flat().map((entry) => entry.token_count),
  );

  const columns = el("div", "topic-columns");
  page.topics.forEach((entries, topic) => {
    const column = el("div", "topic-column");
    column.dataset.topic = String(topic);
    column.append(el("h2", "topic-title", `Topic ${topic + 1}`));
    for (const entry of entries) {
      column.append(candidateCard(entry, session, maxTokens, handlers));
    }
    if (entries.length === 0) {
      column.append(el("p", "topic-empty", "no more documents in this topic"));
    }
    columns.append(column);
  });
  root.append(columns);

  const pager = el("nav", "pager");
  const prev = el("button", "pager-prev", "previous page");
  prev.type = "button";
  prev.disabled = page.page === 0;
  prev.addEventListener("click", () => handlers.onPageChange(page.page - 1));
  const next = el("button", "pager-next", "next page");
  next.type = "button";
  next.disabled = page.page >= page.page_count - 1;
  next.addEventListener("click", () => handlers.onPageChange(page.page + 1));
  pager.append(
    prev,
    el("span", "pager-label", `page ${page.page + 1} of ${page.page_count}`),
    next,
  );
  root.append(pager);

  const footer = el("footer", "selection-footer");
  const summary = el("div", "selection-summary");
  for (const category of session.categories) {
    const ids = session.selections[category] ?? [];
    summary.append(
      el(
        "span",
        "selection-chip",
        `${category}: ${ids.length ? ids.join(", ") : "none"}`,
      ),
    );
  }
  footer.append(summary);

  if (hasLengthImbalance(session)) {
    footer.append(
      el(
        "p",
        "imbalance-warning",
        "Selected representatives differ in length by more than 3x; " +
          "predictions skew toward longer representatives. Prefer roughly " +
          "equal lengths.",
      ),
    );
  }

  const submit = el("button", "submit-classify", "Label & classify");
  submit.type = "button";
  submit.disabled = !canSubmit(session);
  submit.addEventListener("click", () => handlers.onSubmitAndClassify());
  footer.append(submit);

  if (!canSubmit(session)) {
    footer.append(
      el(
        "p",
        "submit-hint",
        `select at least one document for: ${missingCategories(session).join(", ")}`,
      ),
    );
  } else if (hasUnsavedChanges(session)) {
    footer.append(el("p", "submit-hint unsaved", "selections not yet submitted"));
  }

  root.append(footer);
  return root;
}
