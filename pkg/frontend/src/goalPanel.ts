/**
 * Goal panel: the server-rendered goal display, shown verbatim.
 *
 * The UI holds no proof logic and no pretty-printer; the `display`
 * string is the single source of goal text, so what the proof author
 * sees is byte-identical to what the server printed.
 */

import type { StatePayload } from "./protocol.js";

export function renderGoalPanel(state: StatePayload): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "goal-panel";

  const meta = document.createElement("div");
  meta.className = "goal-meta";
  const open = state.goal_count === 1 ? "1 goal open" : `${state.goal_count} goals open`;
  meta.textContent = `${state.lemma} · ${state.proved ? "proved" : open} · ${state.steps.length} step(s)`;
  panel.appendChild(meta);

  if (state.proved) {
    const banner = document.createElement("div");
    banner.className = "proved-banner";
    banner.textContent = state.display; // "Subtree proved!"
    panel.appendChild(banner);
    return panel;
  }

  const display = document.createElement("pre");
  display.className = "goal-display";
  display.textContent = state.display;
  panel.appendChild(display);
  return panel;
}
