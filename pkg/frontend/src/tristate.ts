/**
 * Tri-state signature query panel.
 *
 * Every model gets a three-way toggle: dark means the model must be in a
 * cluster's signature (include), white means it must not be (exclude), and
 * the intermediate state means either (neutral). A persistent legend spells
 * the encoding out, a status filter narrows to true or false positives,
 * and a live preview shows how many clusters the service reports for the
 * current draft before it is confirmed. Service errors render inline and
 * leave the drafted states untouched.
 */

export type ModelState = "include" | "exclude" | "neutral";

export interface TriStateDraft {
  include: string[];
  exclude: string[];
  neutral: string[];
  status: "all" | "tp" | "fp";
}

export interface TriStateCallbacks {
  /** Fired on every draft change; the app answers with showPreview/showError. */
  onDraftChange: (draft: TriStateDraft) => void;
  onConfirm: (draft: TriStateDraft) => void;
}

const NEXT_STATE: Record<ModelState, ModelState> = {
  neutral: "include",
  include: "exclude",
  exclude: "neutral",
};

const STATE_LABEL: Record<ModelState, string> = {
  include: "must contain",
  exclude: "must not contain",
  neutral: "either",
};

export class TriStatePanel {
  private readonly states = new Map<string, ModelState>();
  private readonly buttons = new Map<string, HTMLButtonElement>();
  private readonly models: string[];
  private readonly callbacks: TriStateCallbacks;
  private readonly preview: HTMLElement;
  private readonly error: HTMLElement;
  private readonly statusSelect: HTMLSelectElement;

  constructor(container: HTMLElement, models: string[], callbacks: TriStateCallbacks) {
    this.models = [...models];
    this.callbacks = callbacks;
    for (const model of models) {
      this.states.set(model, "neutral");
    }

    container.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = "Signature query";
    container.append(heading);

    const row = document.createElement("div");
    row.className = "tristate-row";
    for (const model of models) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "tristate state-neutral";
      button.dataset.model = model;
      button.textContent = model;
      button.addEventListener("click", () => this.cycle(model));
      this.buttons.set(model, button);
      row.append(button);
    }
    container.append(row);

    const legend = document.createElement("ul");
    legend.className = "tristate-legend";
    const entries: Array<[ModelState, string]> = [
      ["include", "Dark: the model must be in the cluster's signature."],
      ["exclude", "White: the model must not be in the cluster's signature."],
      ["neutral", "Neutral: either — the model does not constrain the cluster."],
    ];
    for (const [state, text] of entries) {
      const item = document.createElement("li");
      const swatch = document.createElement("span");
      swatch.className = `legend-swatch state-${state}`;
      item.append(swatch, document.createTextNode(` ${text}`));
      legend.append(item);
    }
    container.append(legend);

    const controls = document.createElement("div");
    controls.className = "tristate-controls";

    const statusLabel = document.createElement("label");
    statusLabel.textContent = "Status ";
    this.statusSelect = document.createElement("select");
    this.statusSelect.className = "status-filter";
    for (const [value, text] of [
      ["all", "all clusters"],
      ["tp", "true positives"],
      ["fp", "false positives"],
    ]) {
      const option = document.createElement("option");
      option.value = value as string;
      option.textContent = text as string;
      this.statusSelect.append(option);
    }
    this.statusSelect.addEventListener("change", () => this.emitDraft());
    statusLabel.append(this.statusSelect);
    controls.append(statusLabel);

    const confirm = document.createElement("button");
    confirm.type = "button";
    confirm.className = "tristate-confirm";
    confirm.textContent = "Run query";
    confirm.addEventListener("click", () => this.callbacks.onConfirm(this.draft()));
    controls.append(confirm);

    this.preview = document.createElement("span");
    this.preview.className = "tristate-preview";
    controls.append(this.preview);
    container.append(controls);

    this.error = document.createElement("p");
    this.error.className = "tristate-error";
    this.error.hidden = true;
    container.append(this.error);
  }

  draft(): TriStateDraft {
    const include: string[] = [];
    const exclude: string[] = [];
    const neutral: string[] = [];
    for (const model of this.models) {
      const state = this.states.get(model) ?? "neutral";
      if (state === "include") {
        include.push(model);
      } else if (state === "exclude") {
        exclude.push(model);
      } else {
        neutral.push(model);
      }
    }
    const status = this.statusSelect.value as TriStateDraft["status"];
    return { include, exclude, neutral, status };
  }

  stateOf(model: string): ModelState {
    return this.states.get(model) ?? "neutral";
  }

  setState(model: string, state: ModelState): void {
    if (!this.states.has(model)) {
      return;
    }
    this.states.set(model, state);
    const button = this.buttons.get(model);
    if (button) {
      button.className = `tristate state-${state}`;
      button.title = `${model}: ${STATE_LABEL[state]}`;
    }
    this.emitDraft();
  }

  showPreview(count: number): void {
    this.error.hidden = true;
    const plural = count === 1 ? "cluster" : "clusters";
    this.preview.textContent = `${count} ${plural} match`;
  }

  showError(message: string): void {
    this.error.textContent = message;
    this.error.hidden = false;
  }

  private cycle(model: string): void {
    this.setState(model, NEXT_STATE[this.stateOf(model)]);
  }

  private emitDraft(): void {
    this.callbacks.onDraftChange(this.draft());
  }
}
