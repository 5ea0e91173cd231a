/**
 * Tactic palette driven by the server's `applicable` reply: one button
 * per tactic, disabled (with the shape reason) when it cannot apply.
 * Tactics that need a formula argument open an inline input whose
 * content is validated by a parse round trip before submission.
 */

import type { TacticInfo } from "./protocol.js";

export interface ValidationResult {
  ok: boolean;
  message?: string;
}

export interface PaletteCallbacks {
  /** Submit a full tactic invocation, e.g. "mu_e mu x . x". */
  runTactic(text: string): void;
  /** Server-side parse + well-formedness check of a formula argument. */
  validateFormula(text: string): Promise<ValidationResult>;
}

export function renderPalette(tactics: TacticInfo[], callbacks: PaletteCallbacks): HTMLElement {
  const palette = document.createElement("section");
  palette.className = "palette";

  for (const tactic of tactics) {
    palette.appendChild(renderTactic(tactic, callbacks));
  }
  return palette;
}

function renderTactic(tactic: TacticInfo, callbacks: PaletteCallbacks): HTMLElement {
  const row = document.createElement("div");
  row.className = "tactic-row";

  const button = document.createElement("button");
  button.className = "tactic-button";
  button.dataset.tactic = tactic.name;
  button.textContent = tactic.needs_argument ? `${tactic.name}…` : tactic.name;
  row.appendChild(button);

  if (!tactic.applicable) {
    button.disabled = true;
    if (tactic.reason) {
      button.title = tactic.reason;
      const reason = document.createElement("span");
      reason.className = "tactic-reason";
      reason.textContent = tactic.reason;
      row.appendChild(reason);
    }
    return row;
  }

  if (!tactic.needs_argument) {
    button.addEventListener("click", () => callbacks.runTactic(tactic.name));
    return row;
  }

  const form = document.createElement("span");
  form.className = "tactic-form";
  form.hidden = true;

  const input = document.createElement("input");
  input.className = "tactic-argument";
  input.placeholder = "formula";
  const apply = document.createElement("button");
  apply.className = "tactic-apply";
  apply.textContent = "apply";
  const cancel = document.createElement("button");
  cancel.className = "tactic-cancel";
  cancel.textContent = "cancel";
  const error = document.createElement("span");
  error.className = "tactic-error";

  form.append(input, apply, cancel, error);
  row.appendChild(form);

  button.addEventListener("click", () => {
    form.hidden = !form.hidden;
    error.textContent = "";
    if (!form.hidden) input.focus();
  });
  cancel.addEventListener("click", () => {
    form.hidden = true;
    error.textContent = "";
  });
  apply.addEventListener("click", async () => {
    error.textContent = "";
    const verdict = await callbacks.validateFormula(input.value);
    if (!verdict.ok) {
      error.textContent = verdict.message ?? "invalid formula";
      return;
    }
    form.hidden = true;
    callbacks.runTactic(`${tactic.name} ${input.value}`);
  });

  return row;
}
