/**
 * Count fidelity: every number the page shows is the service's number.
 *
 * Clicking a chart column must fill the grid with exactly that bar's
 * clusters, and moving a slider must leave the chart columns summing to
 * the service-reported total for the new window. All expected values are
 * read from recorded service responses, never computed here.
 */

import { describe, expect, it } from "vitest";

import { barColumns, bootApp, clickBar, gridClusterIds, setSlider, type Booted } from "./boot.js";
import { recordedIntersections, recordedQuery } from "./harness.js";

const DEFAULTS = { eval_iou: 0.5, conf_min: 0.7, conf_max: 1.0 };
const FULL = { eval_iou: 0.5, conf_min: 0.0, conf_max: 1.0 };
const TIGHT = { eval_iou: 0.5, conf_min: 0.9, conf_max: 1.0 };

function renderedColumnSum(booted: Booted): number {
  return barColumns(booted.root).reduce((sum, column) => {
    const total = column.querySelector(".upset-total");
    return sum + Number(total?.textContent ?? "0");
  }, 0);
}

describe("count fidelity", () => {
  it("clicking each bar renders exactly that bar's cluster count as thumbnails", async () => {
    const booted = await bootApp();
    const served = recordedIntersections(booted.fixture, DEFAULTS);
    expect(served.bars.length).toBeGreaterThan(0);
    expect(barColumns(booted.root)).toHaveLength(served.bars.length);

    for (const bar of served.bars) {
      await clickBar(booted, bar.signature);
      const shown = gridClusterIds(booted.root);
      expect(shown).toHaveLength(bar.total);
      expect(shown).toEqual(bar.cluster_ids);
      const label = booted.root.querySelector(".grid-count");
      const plural = bar.total === 1 ? "cluster" : "clusters";
      expect(label?.textContent).toBe(`${bar.total} ${plural}`);
    }
    expect(booted.mock.unmatched).toEqual([]);
  });

  it("slider changes re-sum the chart columns to the service total", async () => {
    const booted = await bootApp();
    expect(renderedColumnSum(booted)).toBe(recordedIntersections(booted.fixture, DEFAULTS).total_clusters);

    await setSlider(booted, "conf_min", 0);
    const fullTotal = recordedIntersections(booted.fixture, FULL).total_clusters;
    expect(renderedColumnSum(booted)).toBe(fullTotal);
    expect(booted.root.querySelector(".chart-total")?.textContent).toBe(`${fullTotal} clusters in window`);

    await setSlider(booted, "conf_min", 0.9);
    const tightTotal = recordedIntersections(booted.fixture, TIGHT).total_clusters;
    expect(renderedColumnSum(booted)).toBe(tightTotal);
    expect(booted.mock.unmatched).toEqual([]);
  });

  it("a selected bar refreshes from the service when the window moves", async () => {
    const booted = await bootApp();
    await clickBar(booted, ["modelC"]);
    const atDefaults = recordedQuery(booted.fixture, {
      include: ["modelC"],
      exclude: ["modelA", "modelB"],
      neutral: [],
      status: "all",
      ...DEFAULTS,
    });
    expect(gridClusterIds(booted.root)).toEqual(atDefaults.cluster_ids);

    await setSlider(booted, "conf_min", 0);
    const atFull = recordedQuery(booted.fixture, {
      include: ["modelC"],
      exclude: ["modelA", "modelB"],
      neutral: [],
      status: "all",
      ...FULL,
    });
    expect(gridClusterIds(booted.root)).toEqual(atFull.cluster_ids);

    // the signature disappears entirely in the tight window: the selection
    // clears instead of showing stale clusters
    await setSlider(booted, "conf_min", 0.9);
    const tightBars = recordedIntersections(booted.fixture, TIGHT).bars;
    expect(tightBars.some((bar) => bar.signature.length === 1 && bar.signature[0] === "modelC")).toBe(false);
    expect(gridClusterIds(booted.root)).toEqual([]);
    expect(booted.root.querySelector(".grid-message")).not.toBeNull();
    expect(booted.root.querySelector(".upset-column.selected")).toBeNull();
    expect(booted.mock.unmatched).toEqual([]);
  });
});
