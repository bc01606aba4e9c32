/**
 * Detail overlay: opened from a thumbnail, it draws every model's boxes
 * plus ground truth at percent positions derived from the service-reported
 * image dimensions, and supports per-model toggles, a TP/FP filter,
 * zooming, panning, and closing.
 */

import { describe, expect, it } from "vitest";

import type { AnnotationsResponse } from "../src/api.js";
import { bootApp, clickBar, gridThumbs, type Booted } from "./boot.js";
import { findRecorded } from "./harness.js";

const DEFAULTS = { eval_iou: 0.5, conf_min: 0.7, conf_max: 1.0 };

async function openTripleClusterDetail(booted: Booted): Promise<AnnotationsResponse> {
  await clickBar(booted, ["modelA", "modelB", "modelC"]);
  const thumbs = gridThumbs(booted.root);
  expect(thumbs).toHaveLength(1);
  thumbs[0]!.click();
  await booted.app.settled();
  return findRecorded(booted.fixture, "GET", "/api/images/im0/annotations", { params: DEFAULTS }).response
    .json as AnnotationsResponse;
}

function overlayOf(booted: Booted): HTMLElement {
  const overlay = booted.root.querySelector<HTMLElement>(".detail-overlay");
  expect(overlay).not.toBeNull();
  return overlay as HTMLElement;
}

function visibleBoxes(overlay: HTMLElement): HTMLElement[] {
  return [...overlay.querySelectorAll<HTMLElement>(".box-layer .box")];
}

describe("detail overlay", () => {
  it("draws all detections and ground truth at service-derived positions", async () => {
    const booted = await bootApp();
    const annotations = await openTripleClusterDetail(booted);
    const overlay = overlayOf(booted);
    expect(overlay.hidden).toBe(false);
    expect(overlay.querySelector(".detail-title")?.textContent).toContain(annotations.image_id);
    expect(overlay.querySelector(".detail-title")?.textContent).toContain(
      `${annotations.width}×${annotations.height}`,
    );

    const boxes = visibleBoxes(overlay);
    expect(boxes).toHaveLength(annotations.detections.length + annotations.ground_truth.length);
    expect(overlay.querySelectorAll(".box.ground-truth")).toHaveLength(annotations.ground_truth.length);

    // spot-check one detection's geometry against the served dimensions
    const first = annotations.detections[0]!;
    const [x = 0, y = 0, w = 0, h = 0] = first.box;
    const label = `${first.model_id} ${first.confidence.toFixed(2)}`;
    const drawn = boxes.find((box) => box.title === label);
    expect(drawn).toBeDefined();
    expect(Number.parseFloat(drawn!.style.left)).toBeCloseTo((x / annotations.width) * 100, 6);
    expect(Number.parseFloat(drawn!.style.top)).toBeCloseTo((y / annotations.height) * 100, 6);
    expect(Number.parseFloat(drawn!.style.width)).toBeCloseTo((w / annotations.width) * 100, 6);
    expect(Number.parseFloat(drawn!.style.height)).toBeCloseTo((h / annotations.height) * 100, 6);
    expect(booted.mock.unmatched).toEqual([]);
  });

  it("hides a model's boxes when its toggle is unchecked", async () => {
    const booted = await bootApp();
    const annotations = await openTripleClusterDetail(booted);
    const overlay = overlayOf(booted);
    const allCount = annotations.detections.length + annotations.ground_truth.length;
    const fromModelA = annotations.detections.filter((d) => d.model_id === "modelA").length;
    expect(fromModelA).toBeGreaterThan(0);

    const toggle = overlay.querySelector<HTMLInputElement>('input[data-model="modelA"]');
    expect(toggle).not.toBeNull();
    toggle!.checked = false;
    toggle!.dispatchEvent(new Event("change"));
    expect(visibleBoxes(overlay)).toHaveLength(allCount - fromModelA);

    toggle!.checked = true;
    toggle!.dispatchEvent(new Event("change"));
    expect(visibleBoxes(overlay)).toHaveLength(allCount);
  });

  it("filters boxes by verdict", async () => {
    const booted = await bootApp();
    const annotations = await openTripleClusterDetail(booted);
    const overlay = overlayOf(booted);
    const verdict = overlay.querySelector<HTMLSelectElement>(".detail-verdict");
    expect(verdict).not.toBeNull();

    const tpCount = annotations.detections.filter((d) => d.status === "tp").length;
    const fpCount = annotations.detections.filter((d) => d.status === "fp").length;

    verdict!.value = "tp";
    verdict!.dispatchEvent(new Event("change"));
    expect(visibleBoxes(overlay)).toHaveLength(tpCount); // ground truth only shows with "all"

    verdict!.value = "fp";
    verdict!.dispatchEvent(new Event("change"));
    expect(visibleBoxes(overlay)).toHaveLength(fpCount);

    verdict!.value = "all";
    verdict!.dispatchEvent(new Event("change"));
    expect(visibleBoxes(overlay)).toHaveLength(annotations.detections.length + annotations.ground_truth.length);
  });

  it("zooms with the buttons and pans by dragging", async () => {
    const booted = await bootApp();
    await openTripleClusterDetail(booted);
    const overlay = overlayOf(booted);
    const canvas = overlay.querySelector<HTMLElement>(".detail-canvas");
    expect(canvas?.style.transform).toBe("translate(0px, 0px) scale(1)");

    overlay.querySelector<HTMLButtonElement>(".detail-zoom-in")?.click();
    expect(canvas?.style.transform).toBe("translate(0px, 0px) scale(1.25)");

    const viewport = overlay.querySelector<HTMLElement>(".detail-viewport")!;
    viewport.dispatchEvent(new MouseEvent("mousedown", { clientX: 10, clientY: 10, bubbles: true }));
    viewport.dispatchEvent(new MouseEvent("mousemove", { clientX: 30, clientY: 50, bubbles: true }));
    viewport.dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    expect(canvas?.style.transform).toBe("translate(20px, 40px) scale(1.25)");

    overlay.querySelector<HTMLButtonElement>(".detail-reset")?.click();
    expect(canvas?.style.transform).toBe("translate(0px, 0px) scale(1)");
  });

  it("closes back to the grid", async () => {
    const booted = await bootApp();
    await openTripleClusterDetail(booted);
    const overlay = overlayOf(booted);
    overlay.querySelector<HTMLButtonElement>(".detail-close")?.click();
    expect(overlay.hidden).toBe(true);
    expect(gridThumbs(booted.root)).toHaveLength(1); // grid untouched underneath
  });
});
