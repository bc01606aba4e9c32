/**
 * Stable per-model colors.
 *
 * Colors are assigned by position in the service's canonical model order
 * (the `models` list from `/api/meta`), so a model keeps its color across
 * charts, thumbnails, the detail overlay, and page reloads.
 */

const MODEL_COLORS = [
  "#e6194b",
  "#3c89d0",
  "#3cb44b",
  "#f58231",
  "#911eb4",
  "#46b8a0",
  "#d4a017",
  "#f032e6",
];

export const GROUND_TRUTH_COLOR = "#222222";
export const TP_COLOR = "#2e8b57";
export const FP_COLOR = "#c0392b";

export function modelColors(models: string[]): Map<string, string> {
  const assigned = new Map<string, string>();
  models.forEach((model, index) => {
    assigned.set(model, MODEL_COLORS[index % MODEL_COLORS.length] as string);
  });
  return assigned;
}
