/**
 * Exclusive-intersection chart.
 *
 * One column per agreement signature, in the order the service returns
 * them: a stacked bar (true-positive segment over false-positive segment)
 * whose height is proportional to the signature's cluster count, above a
 * dot-matrix row marking which models belong to the signature. Clicking a
 * column selects that signature. All counts shown are taken verbatim from
 * the `/api/intersections` payload.
 */

import type { IntersectionBar, IntersectionsResponse } from "./api.js";

export const CHART_HEIGHT_PX = 160;

export interface UpsetCallbacks {
  onBarClick: (signature: string[]) => void;
}

export function sameSignature(a: string[], b: string[]): boolean {
  return a.length === b.length && a.every((model, i) => model === b[i]);
}

function barTitle(bar: IntersectionBar): string {
  const plural = bar.total === 1 ? "cluster" : "clusters";
  return `${bar.signature.join(" + ")} — ${bar.total} ${plural} (${bar.tp_count} TP / ${bar.fp_count} FP)`;
}

function segment(kind: "tp" | "fp", count: number, heightPx: number): HTMLElement {
  const part = document.createElement("div");
  part.className = `upset-segment upset-${kind}`;
  part.dataset.count = String(count);
  part.style.height = `${heightPx}px`;
  return part;
}

export function renderUpset(
  container: HTMLElement,
  models: string[],
  response: IntersectionsResponse,
  selected: string[] | null,
  callbacks: UpsetCallbacks,
): void {
  container.textContent = "";

  if (response.bars.length === 0) {
    const empty = document.createElement("p");
    empty.className = "upset-empty";
    empty.textContent = "No clusters match the current window. Widen the confidence range or lower the threshold.";
    container.append(empty);
    return;
  }

  const chart = document.createElement("div");
  chart.className = "upset";

  const maxTotal = Math.max(...response.bars.map((bar) => bar.total));
  for (const bar of response.bars) {
    const column = document.createElement("button");
    column.type = "button";
    column.className = "upset-column";
    column.dataset.signature = JSON.stringify(bar.signature);
    column.title = barTitle(bar);
    if (selected && sameSignature(bar.signature, selected)) {
      column.classList.add("selected");
    }

    const barHeight = (bar.total / maxTotal) * CHART_HEIGHT_PX;
    const stack = document.createElement("div");
    stack.className = "upset-bar";
    stack.style.height = `${barHeight}px`;

    const total = document.createElement("span");
    total.className = "upset-total";
    total.textContent = String(bar.total);
    stack.append(total);

    if (bar.tp_count > 0) {
      stack.append(segment("tp", bar.tp_count, (bar.tp_count / bar.total) * barHeight));
    }
    if (bar.fp_count > 0) {
      stack.append(segment("fp", bar.fp_count, (bar.fp_count / bar.total) * barHeight));
    }
    column.append(stack);

    const dots = document.createElement("div");
    dots.className = "upset-dots";
    const inSignature = new Set(bar.signature);
    for (const model of models) {
      const dot = document.createElement("span");
      dot.className = inSignature.has(model) ? "upset-dot filled" : "upset-dot";
      dot.dataset.model = model;
      dots.append(dot);
    }
    column.append(dots);

    column.addEventListener("click", () => callbacks.onBarClick([...bar.signature]));
    chart.append(column);
  }

  const legend = document.createElement("div");
  legend.className = "upset-models";
  for (const model of models) {
    const row = document.createElement("div");
    row.className = "upset-model-label";
    row.textContent = model;
    legend.append(row);
  }

  container.append(chart, legend);
}
