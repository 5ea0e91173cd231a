/**
 * Script export/import: the server builds (and replays) script text;
 * this panel only moves it in and out of the page.
 */

export interface ImportOutcome {
  ok: boolean;
  stoppedAt: number | null;
  message?: string;
}

export interface ScriptCallbacks {
  exportScript(): Promise<string>;
  importScript(text: string): Promise<ImportOutcome>;
}

/** Mark the failing tactic line of a script with a ">>> " prefix. */
export function markFailingStep(script: string, step: number): string {
  let index = 0;
  const lines = script.split("\n").map((line) => {
    const body = line.split("#", 1)[0]!.trim();
    const structural =
      body === "" ||
      body === "qed" ||
      body.startsWith("lemma ") ||
      body.startsWith("vars ");
    if (!structural && index++ === step) {
      return ">>> " + line;
    }
    return line;
  });
  return lines.join("\n");
}

export function renderScriptIo(callbacks: ScriptCallbacks): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "script-io";

  const exportButton = document.createElement("button");
  exportButton.className = "script-export";
  exportButton.textContent = "Export script";
  const exported = document.createElement("textarea");
  exported.className = "script-exported";
  exported.readOnly = true;
  exported.rows = 8;

  const importArea = document.createElement("textarea");
  importArea.className = "script-import";
  importArea.placeholder = "paste a proof script";
  importArea.rows = 8;
  const importButton = document.createElement("button");
  importButton.className = "script-import-run";
  importButton.textContent = "Import script";
  const result = document.createElement("pre");
  result.className = "script-result";

  exportButton.addEventListener("click", async () => {
    exported.value = await callbacks.exportScript();
  });
  importButton.addEventListener("click", async () => {
    result.textContent = "";
    const outcome = await callbacks.importScript(importArea.value);
    if (outcome.ok) {
      result.textContent = "imported";
    } else if (outcome.stoppedAt === null) {
      result.textContent = outcome.message ?? "import failed";
    } else {
      result.textContent =
        `stopped at step ${outcome.stoppedAt}: ${outcome.message ?? ""}\n\n` +
        markFailingStep(importArea.value, outcome.stoppedAt);
    }
  });

  panel.append(exportButton, exported, importArea, importButton, result);
  return panel;
}
