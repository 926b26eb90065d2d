/** Top-level wiring: fetch -> session -> render, with inline error + retry.
 * The app never computes classification math; it renders what the service
 * returns and sends back the user's choices. */

import { ApiClient, ApiError } from "../api.js";
import {
  applyServerAck,
  newSession,
  rememberTokenCounts,
  toggleSelection,
  type UiSession,
} from "../session.js";
import type { CandidatesPage, PredictionsResponse } from "../types.js";
import { renderCandidateBrowser } from "./candidates.js";
import { renderPredictionReview } from "./predictions.js";

type Screen = "candidates" | "predictions";

export class App {
  session: UiSession;
  screen: Screen = "candidates";
  page = 0;
  candidates: CandidatesPage | null = null;
  predictions: PredictionsResponse | null = null;
  serverWarnings: string[] = [];

  constructor(
    readonly api: ApiClient,
    readonly root: HTMLElement,
    batchId: string,
    categories: string[],
  ) {
    this.session = newSession(batchId, categories);
  }

  static async open(
    api: ApiClient,
    root: HTMLElement,
    batchId: string,
  ): Promise<App> {
    const summary = await api.getBatch(batchId);
    const app = new App(api, root, batchId, summary.categories);
    app.session = applyServerAck(app.session, summary.selections);
    await app.showCandidates(0);
    return app;
  }

  private renderError(error: unknown, retry: () => void): void {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
    const text = document.createElement("span");
    text.textContent = message;
    const button = document.createElement("button");
    button.type = "button";
    button.className = "retry";
    button.textContent = "retry";
    button.addEventListener("click", retry);
    banner.append(text, button);
    this.root.prepend(banner);
  }

  async showCandidates(page: number): Promise<void> {
    try {
      const data = await this.api.getCandidates(this.session.batchId, page);
      this.page = page;
      this.candidates = data;
      this.session = rememberTokenCounts(this.session, data.topics.flat());
      this.screen = "candidates";
      this.render();
    } catch (error) {
      this.render();
      this.renderError(error, () => void this.showCandidates(page));
    }
  }

  async submitAndClassify(): Promise<void> {
    try {
      const ack = await this.api.submitLabels(
        this.session.batchId,
        this.session.selections,
      );
      this.session = applyServerAck(this.session, ack.selections);
      this.serverWarnings = ack.selection_warnings;
      await this.api.classify(this.session.batchId);
      await this.showPredictions();
    } catch (error) {
      this.render();
      this.renderError(error, () => void this.submitAndClassify());
    }
  }

  async showPredictions(): Promise<void> {
    try {
      this.predictions = await this.api.getPredictions(
        this.session.batchId,
        this.session.predictionFilter ?? undefined,
      );
      this.screen = "predictions";
      this.render();
    } catch (error) {
      this.render();
      this.renderError(error, () => void this.showPredictions());
    }
  }

  render(): void {
    this.root.replaceChildren();
    if (this.screen === "candidates" && this.candidates) {
      this.root.append(
        renderCandidateBrowser(this.session, this.candidates, {
          onAssign: (category, docId) => {
            this.session = toggleSelection(this.session, category, docId);
            this.render();
          },
          onPageChange: (page) => void this.showCandidates(page),
          onSubmitAndClassify: () => void this.submitAndClassify(),
        }),
      );
    } else if (this.screen === "predictions" && this.predictions) {
      if (this.serverWarnings.length > 0) {
        const note = document.createElement("p");
        note.className = "server-warning";
        note.textContent = this.serverWarnings.join(" ");
        this.root.append(note);
      }
      this.root.append(
        renderPredictionReview(this.session, this.predictions, {
          onOrderChange: (order) => {
            this.session = { ...this.session, predictionOrder: order };
            this.render();
          },
          onFilterChange: (category) => {
            this.session = { ...this.session, predictionFilter: category };
            void this.showPredictions();
          },
          onBackToCandidates: () => void this.showCandidates(this.page),
        }),
      );
    }
  }
}
