/**
 * Single-page proof session app.
 *
 * All state transitions round-trip through the protocol; the page never
 * computes a goal itself. One command is in flight at a time: controls
 * are disabled while a reply is pending. The session id lives in the
 * URL fragment (#session=...) so an in-progress proof is shareable
 * against the same server.
 */

import { renderGoalPanel } from "./goalPanel.js";
import { renderPalette } from "./palette.js";
import { renderScriptIo, type ImportOutcome } from "./scriptIo.js";
import {
  ProtocolClient,
  type ErrReply,
  type Reply,
  type StatePayload,
  type TacticInfo,
} from "./protocol.js";

interface QedSummary {
  sequent: string;
  steps: number;
  rules: string[];
}

export class App {
  session: string | null = null;
  state: StatePayload | null = null;
  tactics: TacticInfo[] = [];
  busy = false;
  connectionLost = false;
  lastError: string | null = null;
  qedSummary: QedSummary | null = null;

  private pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ProtocolClient,
    private readonly win: Window = window,
  ) {}

  /** Attach to the fragment's session, or show the new-lemma form. */
  start(): Promise<void> {
    const match = /#session=([^&]+)/.exec(this.win.location.hash);
    if (match) {
      return this.dispatch(async () => {
        const reply = await this.client.state(match[1]!);
        if (reply.ok) {
          this.session = match[1]!;
          this.state = reply.state ?? null;
          await this.refreshTactics();
        } else {
          this.lastError = reply.error.message;
        }
      });
    }
    this.render();
    return this.idle();
  }

  /** Settles when every queued command has been processed. */
  idle(): Promise<void> {
    return this.pending;
  }

  private dispatch(work: () => Promise<void>): Promise<void> {
    const turn = this.pending.then(async () => {
      this.busy = true;
      this.render();
      try {
        await work();
        this.connectionLost = false;
      } catch {
        this.connectionLost = true;
      } finally {
        this.busy = false;
        this.render();
      }
    });
    this.pending = turn;
    return turn;
  }

  private fail(reply: ErrReply): void {
    this.lastError = reply.error.message;
  }

  private async adopt(reply: Reply): Promise<void> {
    this.lastError = null;
    if (!reply.ok) {
      this.fail(reply);
      return;
    }
    if (reply.state) this.state = reply.state;
    await this.refreshTactics();
  }

  private async refreshTactics(): Promise<void> {
    if (!this.session) return;
    const reply = await this.client.applicable(this.session);
    if (reply.ok && reply.tactics) this.tactics = reply.tactics;
  }

  newSession(lemma: string, sequent: string, variables: string[]): Promise<void> {
    return this.dispatch(async () => {
      const reply = await this.client.newSession(lemma, sequent, variables);
      if (reply.ok && reply.session) {
        this.session = reply.session;
        this.qedSummary = null;
        this.win.location.hash = `#session=${reply.session}`;
      }
      await this.adopt(reply);
    });
  }

  runTactic(text: string): Promise<void> {
    return this.dispatch(async () => {
      if (!this.session) return;
      await this.adopt(await this.client.tactic(this.session, text));
    });
  }

  undo(): Promise<void> {
    return this.dispatch(async () => {
      if (!this.session) return;
      await this.adopt(await this.client.undo(this.session));
    });
  }

  qed(): Promise<void> {
    return this.dispatch(async () => {
      if (!this.session) return;
      const reply = await this.client.qed(this.session);
      if (reply.ok) {
        this.qedSummary = {
          sequent: reply.sequent ?? "",
          steps: reply.steps ?? 0,
          rules: reply.rules ?? [],
        };
        if (reply.state) this.state = reply.state;
        this.lastError = null;
      } else {
        this.fail(reply);
      }
    });
  }

  /** Stale-state refetch after a connection hiccup. */
  refresh(): Promise<void> {
    return this.dispatch(async () => {
      if (!this.session) return;
      await this.adopt(await this.client.state(this.session));
    });
  }

  async validateFormula(text: string): Promise<{ ok: boolean; message?: string }> {
    if (!this.session) return { ok: false, message: "no session" };
    try {
      const reply = await this.client.parseFormula(this.session, text);
      if (reply.ok) return { ok: true };
      return { ok: false, message: reply.error.message };
    } catch {
      return { ok: false, message: "connection lost" };
    }
  }

  async exportScript(): Promise<string> {
    if (!this.session) return "";
    const reply = await this.client.script(this.session);
    return reply.ok && reply.script ? reply.script : "";
  }

  async importScript(text: string): Promise<ImportOutcome> {
    const reply = await this.client.importScript(text);
    if (reply.session) {
      this.session = reply.session;
      this.qedSummary = null;
      this.win.location.hash = `#session=${reply.session}`;
      if (reply.state) this.state = reply.state;
      await this.refreshTactics();
      this.render();
    }
    if (reply.ok) return { ok: true, stoppedAt: null };
    return {
      ok: false,
      stoppedAt: reply.stopped_at ?? null,
      message: reply.error.message,
    };
  }

  // ------------------------------------------------------------- rendering

  render(): void {
    this.root.textContent = "";
    if (this.connectionLost) {
      const banner = document.createElement("div");
      banner.className = "connection-banner";
      banner.textContent = "connection lost";
      const retry = document.createElement("button");
      retry.className = "retry";
      retry.textContent = "retry";
      retry.addEventListener("click", () => void this.refresh());
      banner.appendChild(retry);
      this.root.appendChild(banner);
    }
    if (this.lastError) {
      const err = document.createElement("div");
      err.className = "error-banner";
      err.textContent = this.lastError;
      this.root.appendChild(err);
    }
    if (!this.session || !this.state) {
      this.root.appendChild(this.renderNewForm());
      return;
    }

    this.root.appendChild(renderGoalPanel(this.state));

    const controls = document.createElement("div");
    controls.className = "controls";
    const undoButton = document.createElement("button");
    undoButton.className = "undo";
    undoButton.textContent = "undo";
    undoButton.disabled = this.busy || this.state.history_depth === 0;
    undoButton.addEventListener("click", () => void this.undo());
    const qedButton = document.createElement("button");
    qedButton.className = "qed";
    qedButton.textContent = "qed";
    qedButton.disabled = this.busy || !this.state.proved;
    qedButton.addEventListener("click", () => void this.qed());
    controls.append(undoButton, qedButton);
    this.root.appendChild(controls);

    if (this.qedSummary) {
      const summary = document.createElement("div");
      summary.className = "qed-summary";
      summary.textContent =
        `${this.state.lemma} is proved: ${this.qedSummary.sequent} ` +
        `(${this.qedSummary.steps} steps; rules ${this.qedSummary.rules.join(", ")})`;
      this.root.appendChild(summary);
    }

    const palette = renderPalette(this.tactics, {
      runTactic: (text) => void this.runTactic(text),
      validateFormula: (text) => this.validateFormula(text),
    });
    if (this.busy) {
      for (const b of palette.querySelectorAll("button")) b.disabled = true;
    }
    this.root.appendChild(palette);

    this.root.appendChild(
      renderScriptIo({
        exportScript: () => this.exportScript(),
        importScript: (text) => this.importScript(text),
      }),
    );
  }

  private renderNewForm(): HTMLElement {
    const form = document.createElement("section");
    form.className = "new-form";
    const lemma = document.createElement("input");
    lemma.className = "new-lemma";
    lemma.placeholder = "lemma name";
    lemma.value = "lemma";
    const sequent = document.createElement("input");
    sequent.className = "new-sequent";
    sequent.placeholder = "hyp, hyp |- conclusion";
    const variables = document.createElement("input");
    variables.className = "new-variables";
    variables.placeholder = "free variables (optional)";
    const start = document.createElement("button");
    start.className = "new-start";
    start.textContent = "Start proof";
    start.disabled = this.busy;
    start.addEventListener("click", () => {
      const vars = variables.value.split(/[\s,]+/).filter((v) => v.length > 0);
      void this.newSession(lemma.value || "lemma", sequent.value, vars);
    });
    form.append(lemma, sequent, variables, start);

    const importArea = document.createElement("textarea");
    importArea.className = "script-import";
    importArea.placeholder = "or paste a proof script";
    importArea.rows = 6;
    const importButton = document.createElement("button");
    importButton.className = "script-import-run";
    importButton.textContent = "Import script";
    const result = document.createElement("pre");
    result.className = "script-result";
    importButton.addEventListener("click", async () => {
      const outcome = await this.importScript(importArea.value);
      if (!outcome.ok) {
        result.textContent = `stopped at step ${outcome.stoppedAt}: ${outcome.message ?? ""}`;
      }
    });
    form.append(importArea, importButton, result);
    return form;
  }
}
