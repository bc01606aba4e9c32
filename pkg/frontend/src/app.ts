/**
 * Explorer application wiring.
 *
 * Builds the page skeleton, then keeps four service-backed panels in sync: the
 * parameter sliders, the exclusive-intersection chart, the tri-state query
 * panel, and the thumbnail grid with tagging and the detail overlay. All
 * displayed counts, cluster lists, and metric values come from service
 * responses; the page itself never computes set memberships. Each panel
 * issues at most one request at a time through a latest-wins lane, so a
 * stale response can never overwrite a newer one.
 */

import {
  ApiClient,
  ApiError,
  type ClusterDetail,
  type EvalParams,
  type IntersectionsResponse,
  type MetaResponse,
  type QueryRequest,
  type QueryResponse,
} from "./api.js";
import { DetailOverlay } from "./detail.js";
import { RequestLane } from "./latest.js";
import { modelColors } from "./palette.js";
import { ViewStore, type GridSource } from "./state.js";
import { TagManager } from "./tags.js";
import { renderThumbnails } from "./thumbnails.js";
import { TriStatePanel, type TriStateDraft } from "./tristate.js";
import { renderUpset, sameSignature } from "./upset.js";

const FALLBACK_PARAMS: EvalParams = { eval_iou: 0.5, conf_min: 0.7, conf_max: 1.0 };

interface Slider {
  input: HTMLInputElement;
  output: HTMLOutputElement;
}

export class ExplorerApp {
  readonly store: ViewStore;
  private readonly root: HTMLElement;
  private readonly client: ApiClient;
  private readonly chartLane = new RequestLane<IntersectionsResponse | null>();
  private readonly gridLane = new RequestLane<QueryResponse | null>();
  private readonly previewLane = new RequestLane<QueryResponse | null>();
  private readonly pending = new Set<Promise<unknown>>();

  private meta: MetaResponse | null = null;
  private colors = new Map<string, string>();
  private lastIntersections: IntersectionsResponse | null = null;
  private lastQuery: QueryResponse | null = null;
  private tagsByImage = new Map<string, string[]>();

  private chartHost!: HTMLElement;
  private totalLabel!: HTMLElement;
  private gridHost!: HTMLElement;
  private countLabel!: HTMLElement;
  private panel!: TriStatePanel;
  private tagManager!: TagManager;
  private overlay!: DetailOverlay;
  private readonly sliders = new Map<keyof EvalParams, Slider>();

  constructor(root: HTMLElement, client: ApiClient) {
    this.root = root;
    this.client = client;
    this.store = new ViewStore({
      params: { ...FALLBACK_PARAMS },
      source: null,
      detailImageId: null,
      tagDraft: "",
    });
  }

  /** Resolves once every in-flight panel refresh has settled (test helper). */
  async settled(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.allSettled([...this.pending]);
    }
  }

  async init(): Promise<void> {
    const meta = await this.client.meta();
    this.meta = meta;
    this.colors = modelColors(meta.models);
    if (meta.defaults) {
      this.store.update({ params: { ...meta.defaults } });
    }

    this.buildSkeleton(meta);
    await Promise.all([this.refreshChart(), this.refreshTags()]);
    this.showGridMessage("Click a bar or run a signature query to load clusters.");
  }

  private get params(): EvalParams {
    return this.store.current.params;
  }

  private track<T>(work: Promise<T>): Promise<T> {
    this.pending.add(work);
    const drop = () => {
      this.pending.delete(work);
    };
    work.then(drop, drop);
    return work;
  }

  private buildSkeleton(meta: MetaResponse): void {
    this.root.textContent = "";

    const header = document.createElement("header");
    header.className = "explorer-header";
    const title = document.createElement("h1");
    title.textContent = "Model agreement explorer";
    const subtitle = document.createElement("p");
    subtitle.className = "explorer-subtitle";
    subtitle.textContent =
      `${meta.models.length} models · class “${meta.object_class}” · ` +
      `${meta.counts.images} images · agreement IOU ${meta.set_iou}`;
    header.append(title, subtitle);

    const controls = document.createElement("div");
    controls.className = "param-controls";
    controls.append(
      this.buildSlider("eval_iou", "Evaluation IOU", 0.05, 1, 0.05),
      this.buildSlider("conf_min", "Min confidence", 0, 1, 0.01),
      this.buildSlider("conf_max", "Max confidence", 0, 1, 0.01),
    );
    header.append(controls);
    this.root.append(header);

    const chartSection = document.createElement("section");
    chartSection.className = "chart-section";
    const chartHeading = document.createElement("h2");
    chartHeading.textContent = "Agreement signatures";
    this.totalLabel = document.createElement("p");
    this.totalLabel.className = "chart-total";
    this.chartHost = document.createElement("div");
    this.chartHost.className = "chart-host";
    chartSection.append(chartHeading, this.totalLabel, this.chartHost);
    this.root.append(chartSection);

    const panelHost = document.createElement("section");
    panelHost.className = "tristate-section";
    this.panel = new TriStatePanel(panelHost, meta.models, {
      onDraftChange: (draft) => this.track(this.previewDraft(draft)),
      onConfirm: (draft) => this.track(this.confirmDraft(draft)),
    });
    this.root.append(panelHost);

    const gridSection = document.createElement("section");
    gridSection.className = "grid-section";
    const gridHeading = document.createElement("h2");
    gridHeading.textContent = "Clusters";
    this.countLabel = document.createElement("p");
    this.countLabel.className = "grid-count";
    this.gridHost = document.createElement("div");
    this.gridHost.className = "grid-host";
    gridSection.append(gridHeading, this.countLabel, this.gridHost);
    this.root.append(gridSection);

    const tagSection = document.createElement("section");
    tagSection.className = "tag-section";
    this.tagManager = new TagManager(tagSection, this.client.exportTagsUrl(), {
      onAssign: (tag) => this.track(this.assignTag(tag)),
    });
    this.root.append(tagSection);

    const overlayHost = document.createElement("div");
    this.overlay = new DetailOverlay(overlayHost, this.colors);
    this.root.append(overlayHost);
  }

  private buildSlider(name: keyof EvalParams, text: string, min: number, max: number, step: number): HTMLElement {
    const label = document.createElement("label");
    label.className = "param";
    label.append(document.createTextNode(`${text} `));
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(min);
    input.max = String(max);
    input.step = String(step);
    input.value = String(this.params[name]);
    input.dataset.param = name;
    const output = document.createElement("output");
    output.textContent = Number(this.params[name]).toFixed(2);
    input.addEventListener("input", () => {
      output.textContent = Number(input.value).toFixed(2);
    });
    input.addEventListener("change", () => {
      output.textContent = Number(input.value).toFixed(2);
      this.track(this.commitParams());
    });
    label.append(input, output);
    this.sliders.set(name, { input, output });
    return label;
  }

  private async commitParams(): Promise<void> {
    const read = (name: keyof EvalParams): number => {
      const slider = this.sliders.get(name);
      return slider ? Number(slider.input.value) : this.params[name];
    };
    this.store.update({
      params: { eval_iou: read("eval_iou"), conf_min: read("conf_min"), conf_max: read("conf_max") },
    });
    await this.refreshChart();
    await this.refreshSource();
  }

  private async refreshChart(): Promise<void> {
    const params = this.params;
    try {
      const response = await this.chartLane.run(() => this.client.intersections(params));
      if (response === undefined || response === null || !this.meta) {
        return;
      }
      this.lastIntersections = response;
      const plural = response.total_clusters === 1 ? "cluster" : "clusters";
      this.totalLabel.textContent = `${response.total_clusters} ${plural} in window`;
      this.renderChart();
    } catch (error) {
      this.totalLabel.textContent = "";
      this.chartHost.textContent = "";
      const message = document.createElement("p");
      message.className = "chart-error";
      message.textContent = error instanceof ApiError ? error.reason : "failed to load intersections";
      this.chartHost.append(message);
    }
  }

  private renderChart(): void {
    if (!this.meta || !this.lastIntersections) {
      return;
    }
    const source = this.store.current.source;
    const selected = source && source.kind === "bar" ? source.signature : null;
    renderUpset(this.chartHost, this.meta.models, this.lastIntersections, selected, {
      onBarClick: (signature) => this.track(this.selectBar(signature)),
    });
  }

  /** Re-issue whatever populated the grid after the parameters change. */
  private async refreshSource(): Promise<void> {
    const source = this.store.current.source;
    if (!source) {
      return;
    }
    if (source.kind === "query") {
      const request: QueryRequest = { ...source.request, ...this.params };
      this.store.update({ source: { kind: "query", request } });
      await this.runGridQuery(request, "query");
      return;
    }
    const stillPresent = this.lastIntersections?.bars.some((bar) => sameSignature(bar.signature, source.signature));
    if (stillPresent) {
      await this.selectBar(source.signature);
    } else {
      this.store.update({ source: null });
      this.lastQuery = null;
      this.countLabel.textContent = "";
      this.tagManager.setScope(0);
      this.showGridMessage("The selected signature has no clusters in this window.");
      this.renderChart();
    }
  }

  private async selectBar(signature: string[]): Promise<void> {
    if (!this.meta) {
      return;
    }
    this.store.update({ source: { kind: "bar", signature } });
    this.renderChart();
    const inSignature = new Set(signature);
    const request: QueryRequest = {
      include: [...signature],
      exclude: this.meta.models.filter((model) => !inSignature.has(model)),
      neutral: [],
      status: "all",
      ...this.params,
    };
    await this.runGridQuery(request, "grid");
  }

  private async previewDraft(draft: TriStateDraft): Promise<void> {
    const request: QueryRequest = { ...draft, ...this.params };
    try {
      const response = await this.previewLane.run(() => this.client.query(request));
      if (response) {
        this.panel.showPreview(response.count);
      }
    } catch (error) {
      this.panel.showError(error instanceof ApiError ? error.reason : "preview failed");
    }
  }

  private async confirmDraft(draft: TriStateDraft): Promise<void> {
    const request: QueryRequest = { ...draft, ...this.params };
    this.store.update({ source: { kind: "query", request } });
    this.renderChart();
    await this.runGridQuery(request, "query");
  }

  private async runGridQuery(request: QueryRequest, errorSink: "grid" | "query"): Promise<void> {
    try {
      const response = await this.gridLane.run(() => this.client.query(request));
      if (!response) {
        return;
      }
      this.lastQuery = response;
      const plural = response.count === 1 ? "cluster" : "clusters";
      this.countLabel.textContent = `${response.count} ${plural}`;
      this.renderGrid();
    } catch (error) {
      const reason = error instanceof ApiError ? error.reason : "query failed";
      if (errorSink === "query") {
        this.panel.showError(reason);
      } else {
        this.showGridMessage(reason);
      }
    }
  }

  private renderGrid(): void {
    if (!this.lastQuery) {
      return;
    }
    renderThumbnails(
      this.gridHost,
      this.lastQuery.clusters,
      this.colors,
      (imageId) => this.client.imageUrl(imageId),
      this.tagsByImage,
      { onOpen: (cluster) => this.track(this.openDetail(cluster)) },
    );
    this.tagManager.setScope(this.gridImageIds().length);
  }

  private gridImageIds(): string[] {
    if (!this.lastQuery) {
      return [];
    }
    const seen = new Set<string>();
    const ids: string[] = [];
    for (const cluster of this.lastQuery.clusters) {
      if (!seen.has(cluster.image_id)) {
        seen.add(cluster.image_id);
        ids.push(cluster.image_id);
      }
    }
    return ids;
  }

  private async refreshTags(): Promise<void> {
    try {
      const response = await this.client.tags();
      this.tagsByImage = new Map();
      for (const [tag, imageIds] of Object.entries(response.tags)) {
        for (const imageId of imageIds) {
          const existing = this.tagsByImage.get(imageId);
          if (existing) {
            existing.push(tag);
          } else {
            this.tagsByImage.set(imageId, [tag]);
          }
        }
      }
      this.tagManager.setSuggestions(Object.keys(response.tags));
      if (this.lastQuery) {
        this.renderGrid();
      }
    } catch {
      // Tag chips are a convenience; leave the previous snapshot in place.
    }
  }

  private async assignTag(tag: string): Promise<void> {
    const imageIds = this.gridImageIds();
    if (imageIds.length === 0) {
      this.tagManager.showError("Load clusters into the grid before tagging.");
      return;
    }
    try {
      await this.client.assignTag(tag, imageIds);
      this.store.update({ tagDraft: "" });
      await this.refreshTags();
    } catch (error) {
      this.tagManager.showError(error instanceof ApiError ? error.reason : "tagging failed");
    }
  }

  private async openDetail(cluster: ClusterDetail): Promise<void> {
    try {
      const annotations = await this.client.annotations(cluster.image_id, this.params);
      this.store.update({ detailImageId: cluster.image_id });
      this.overlay.open(annotations, this.client.imageUrl(cluster.image_id));
    } catch (error) {
      this.showGridMessage(error instanceof ApiError ? error.reason : "failed to load annotations");
    }
  }

  private showGridMessage(text: string): void {
    this.gridHost.textContent = "";
    const message = document.createElement("p");
    message.className = "grid-message";
    message.textContent = text;
    this.gridHost.append(message);
  }
}
