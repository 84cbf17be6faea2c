/** Steering loop for manual runs: poll, render the pending query, answer. */

import { Api, ApiError, QueryInfo, RunHandle } from "./api.js";

export const POLL_INTERVAL_MS = 1000;

export interface QueryPanelEvents {
  /** Fired after every poll with the fresh handle (for path overlays etc.). */
  onUpdate?: (handle: RunHandle) => void;
  /** Fired once when the run leaves the active states. */
  onDone?: (handle: RunHandle) => void;
}

/**
 * Drives one manual run. The panel polls the run every second; when a query
 * is pending it renders a form with the recommendation pre-selected and its
 * rationale shown. A 422 keeps the form up with the message inline; a 409
 * (someone else answered first) silently refreshes.
 */
export class QueryPanel {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private current: QueryInfo | null = null;
  private stopped = false;

  constructor(
    private api: Api,
    private container: HTMLElement,
    private runId: string,
    private events: QueryPanelEvents = {},
    private pollInterval: number = POLL_INTERVAL_MS,
  ) {}

  start(): void {
    void this.tick();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) clearTimeout(this.timer);
  }

  private schedule(): void {
    if (this.stopped) return;
    this.timer = setTimeout(() => void this.tick(), this.pollInterval);
  }

  async tick(): Promise<void> {
    if (this.stopped) return;
    let handle: RunHandle;
    try {
      handle = await this.api.getRun(this.runId);
    } catch {
      this.schedule();
      return;
    }
    this.events.onUpdate?.(handle);
    if (handle.state === "finished" || handle.state === "aborted") {
      this.renderDone(handle);
      this.events.onDone?.(handle);
      this.stop();
      return;
    }
    if (handle.state === "awaiting_query") {
      const pending = await this.api.getQueries(this.runId);
      if (pending.length > 0 && pending[0].id !== this.current?.id) {
        this.renderQuery(pending[0]);
      }
    } else {
      this.current = null;
      this.renderWaiting(handle);
    }
    this.schedule();
  }

  private renderWaiting(handle: RunHandle): void {
    this.container.innerHTML = `<p class="status">run ${handle.id}: ${handle.state}…</p>`;
  }

  private renderDone(handle: RunHandle): void {
    const status = handle.result?.status ?? handle.state;
    const reason = handle.result?.reason ?? handle.reason;
    this.container.innerHTML = `
      <p class="status done">run ${handle.id}: ${status}${reason ? ` — ${reason}` : ""}</p>
      <pre class="result">${JSON.stringify(handle.result?.entries ?? {}, null, 2)}</pre>`;
  }

  private renderQuery(query: QueryInfo): void {
    this.current = query;
    const form = document.createElement("form");
    form.className = "query-form";
    form.dataset.queryId = query.id;

    const prompt = document.createElement("p");
    prompt.className = "prompt";
    prompt.textContent = query.prompt;
    form.appendChild(prompt);

    const recommended = query.recommendation?.value;
    let input: HTMLInputElement | HTMLSelectElement;
    if (query.kind === "single_choice") {
      const select = document.createElement("select");
      for (const option of query.options) {
        const el = document.createElement("option");
        el.value = String(option);
        el.textContent = String(option);
        if (recommended !== undefined && option === recommended) {
          el.selected = true;
          el.className = "recommended";
          el.textContent += " ★";
        } else if (recommended === undefined && option === query.default) {
          el.selected = true;
        }
        select.appendChild(el);
      }
      input = select;
    } else {
      const el = document.createElement("input");
      el.type = query.kind === "integer" || query.kind === "real" ? "number" : "text";
      if (query.kind === "integer") el.step = "1";
      if (query.minimum !== null) el.min = String(query.minimum);
      if (query.maximum !== null) el.max = String(query.maximum);
      const prefill = recommended ?? query.default;
      if (prefill !== undefined && prefill !== null) el.value = String(prefill);
      input = el;
    }
    input.name = "value";
    form.appendChild(input);

    if (query.recommendation) {
      const hint = document.createElement("p");
      hint.className = "recommendation";
      hint.textContent = `recommended: ${String(query.recommendation.value)} — ${query.recommendation.rationale}`;
      form.appendChild(hint);
    }

    const error = document.createElement("p");
    error.className = "error";
    error.hidden = true;
    form.appendChild(error);

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Answer";
    form.appendChild(submit);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(query, input.value, error);
    });

    this.container.replaceChildren(form);
  }

  async submit(query: QueryInfo, raw: string, errorEl: HTMLElement): Promise<void> {
    let value: unknown = raw;
    if (query.kind === "integer") value = parseInt(raw, 10);
    if (query.kind === "real") value = parseFloat(raw);
    try {
      await this.api.answerQuery(query.id, value);
      this.current = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        errorEl.textContent = err.message; // invalid answer: show inline, keep form
        errorEl.hidden = false;
        return;
      }
      if (err instanceof ApiError && err.status === 409) {
        this.current = null; // answered elsewhere: fall through to a refresh
      } else {
        throw err;
      }
    }
  }
}
