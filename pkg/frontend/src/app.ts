/**
 * Interactive measurement explorer. DOM glue only: pick a ring, choose a
 * basis, preview both outcomes through a dry run, commit or undo, and walk
 * the history timeline. Rendering and wire types live in render.ts / api.ts;
 * no state shown here is computed client-side.
 */

import { ApiClient, ApiError } from "./api.js";
import { formatProbability, renderDiagram, renderWhatIfPanel } from "./render.js";
import type { Basis, DiagramDoc, SessionView } from "./types.js";

interface TimelineEntry {
  label: string;
  diagram: DiagramDoc;
}

export class ExplorerApp {
  private api: ApiClient;
  private sessionId: string | null = null;
  private view: SessionView | null = null;
  private timeline: TimelineEntry[] = [];
  private selectedQubit: number | null = null;
  private busy = false;

  constructor(
    private root: HTMLElement,
    api?: ApiClient,
  ) {
    this.api = api ?? new ApiClient();
    this.renderShell();
  }

  private el<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <header>
        <label>chain size <input id="chain-n" type="number" min="1" value="5"></label>
        <label>seed <input id="chain-seed" type="number" placeholder="random"></label>
        <button id="start">start session</button>
        <button id="undo" disabled>undo</button>
      </header>
      <section id="diagram"></section>
      <section id="chooser" hidden></section>
      <section id="whatif"></section>
      <section id="status"></section>
      <section id="timeline"></section>`;
    this.el<HTMLButtonElement>("#start").addEventListener("click", () => void this.start());
    this.el<HTMLButtonElement>("#undo").addEventListener("click", () => void this.undo());
  }

  private async start(): Promise<void> {
    const n = Number(this.el<HTMLInputElement>("#chain-n").value);
    const seedRaw = this.el<HTMLInputElement>("#chain-seed").value;
    const created = await this.api.createSession(n, seedRaw ? Number(seedRaw) : undefined);
    this.sessionId = created.id;
    this.timeline = [{ label: "initial", diagram: created.diagram }];
    await this.refresh();
  }

  private async refresh(): Promise<void> {
    if (!this.sessionId) return;
    this.view = await this.api.getSession(this.sessionId);
    this.el("#diagram").innerHTML = renderDiagram(this.view.diagram);
    this.el<HTMLButtonElement>("#undo").disabled = this.view.undo_depth === 0;
    this.renderStatus();
    this.renderTimeline();
    this.attachRingHandlers();
  }

  private attachRingHandlers(): void {
    this.root.querySelectorAll<SVGGElement>("#diagram g.ring").forEach((g) => {
      g.style.cursor = "pointer";
      g.addEventListener("click", () => {
        this.selectedQubit = Number(g.dataset.id);
        this.renderChooser();
      });
    });
  }

  private renderChooser(): void {
    const chooser = this.el("#chooser");
    chooser.hidden = false;
    chooser.innerHTML = `
      <b>qubit ${this.selectedQubit}</b>
      <label><input type="radio" name="basis" value="Z" checked> Z</label>
      <label><input type="radio" name="basis" value="X"> X</label>
      <label><input type="radio" name="basis" value="Y"> Y</label>
      <button id="whatif-btn">what if?</button>
      <button id="commit-plus">commit +</button>
      <button id="commit-minus">commit −</button>
      <button id="commit-random">commit random</button>`;
    this.el<HTMLButtonElement>("#whatif-btn").addEventListener("click", () => void this.whatIf());
    this.el<HTMLButtonElement>("#commit-plus").addEventListener("click", () => void this.commit("+"));
    this.el<HTMLButtonElement>("#commit-minus").addEventListener("click", () => void this.commit("-"));
    this.el<HTMLButtonElement>("#commit-random").addEventListener("click", () => void this.commit("random"));
  }

  private basis(): Basis {
    const checked = this.root.querySelector<HTMLInputElement>("input[name=basis]:checked");
    return (checked?.value ?? "Z") as Basis;
  }

  private showError(context: string, error: unknown): void {
    const detail =
      error instanceof ApiError ? `[${error.code}] ${error.message}` : String(error);
    this.el("#status").innerHTML = `<p class="error">${context}: ${detail}</p>`;
  }

  private async whatIf(): Promise<void> {
    if (!this.sessionId || this.selectedQubit === null) return;
    try {
      const response = await this.api.whatIf(this.sessionId, this.selectedQubit, this.basis());
      if (response.outcomes) {
        this.el("#whatif").innerHTML = renderWhatIfPanel(response.outcomes);
      }
    } catch (error) {
      this.showError(`what-if on qubit ${this.selectedQubit}`, error);
    }
  }

  private async commit(outcome: "+" | "-" | "random"): Promise<void> {
    if (!this.sessionId || this.selectedQubit === null || this.busy) return;
    this.busy = true;
    this.setInputsDisabled(true);
    try {
      const response = await this.api.measure(this.sessionId, this.selectedQubit, this.basis(), outcome);
      if (response.step && response.diagram) {
        const s = response.step;
        this.timeline.push({
          label: `q${s.qubit} ${s.basis}${s.outcome} (p=${formatProbability(s.probability)})`,
          diagram: response.diagram,
        });
      }
      this.el("#whatif").innerHTML = "";
      this.el("#chooser").hidden = true;
      await this.refresh();
    } catch (error) {
      this.showError(`measuring qubit ${this.selectedQubit}`, error);
    } finally {
      this.busy = false;
      this.setInputsDisabled(false);
    }
  }

  private setInputsDisabled(disabled: boolean): void {
    this.root.querySelectorAll("button").forEach((b) => {
      (b as HTMLButtonElement).disabled = disabled;
    });
  }

  private async undo(): Promise<void> {
    if (!this.sessionId) return;
    try {
      await this.api.undo(this.sessionId);
      this.timeline.pop();
      await this.refresh();
    } catch (error) {
      this.showError("undo", error);
    }
  }

  private renderStatus(): void {
    if (!this.view) return;
    const last = this.view.history[this.view.history.length - 1];
    const lines: string[] = [
      `<p>live qubits: ${this.view.live_qubits.join(", ") || "none"}</p>`,
      `<p>byproduct powers of S: ${JSON.stringify(this.view.byproducts)}</p>`,
    ];
    if (last) {
      lines.push(`<p>last: q${last.qubit} ${last.basis}${last.outcome} p=${formatProbability(last.probability)}` +
        (last.rule ? ` via ${last.rule}` : "") + "</p>");
      if (last.schmidt) {
        lines.push(`<p>cut rank ${last.schmidt.rank} (${last.schmidt.source})</p>`);
      }
      if (last.fidelity !== null) {
        lines.push(`<p>oracle fidelity ${last.fidelity}</p>`);
      }
    }
    if (!this.view.coherent) {
      lines.push(`<p>oracle-only since step ${this.view.degraded_at}</p>`);
    }
    this.el("#status").innerHTML = lines.join("");
  }

  private renderTimeline(): void {
    const entries = this.timeline
      .map(
        (entry, i) =>
          `<button class="snap" data-index="${i}">${i}: ${entry.label}</button>`,
      )
      .join(" ");
    this.el("#timeline").innerHTML = `<div>${entries}</div><div id="replay"></div>`;
    this.root.querySelectorAll<HTMLButtonElement>("button.snap").forEach((b) => {
      b.addEventListener("click", () => {
        const entry = this.timeline[Number(b.dataset.index)];
        this.el("#replay").innerHTML = renderDiagram(entry.diagram);
      });
    });
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  new ExplorerApp(document.getElementById("app") as HTMLElement);
}
