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
import { ApiError, } from "./api.js";
import { DetailOverlay } from "./detail.js";
import { RequestLane } from "./latest.js";
import { modelColors } from "./palette.js";
import { ViewStore } from "./state.js";
import { TagManager } from "./tags.js";
import { renderThumbnails } from "./thumbnails.js";
import { TriStatePanel } from "./tristate.js";
import { renderUpset, sameSignature } from "./upset.js";
const FALLBACK_PARAMS = { eval_iou: 0.5, conf_min: 0.7, conf_max: 1.0 };
export class ExplorerApp {
    store;
    root;
    client;
    chartLane = new RequestLane();
    gridLane = new RequestLane();
    previewLane = new RequestLane();
    pending = new Set();
    meta = null;
    colors = new Map();
    lastIntersections = null;
    lastQuery = null;
    tagsByImage = new Map();
    chartHost;
    totalLabel;
    gridHost;
    countLabel;
    panel;
    tagManager;
    overlay;
    sliders = new Map();
    constructor(root, client) {
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
    async settled() {
        while (this.pending.size > 0) {
            await Promise.allSettled([...this.pending]);
        }
    }
    async init() {
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
    get params() {
        return this.store.current.params;
    }
    track(work) {
        this.pending.add(work);
        const drop = () => {
            this.pending.delete(work);
        };
        work.then(drop, drop);
        return work;
    }
    buildSkeleton(meta) {
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
        controls.append(this.buildSlider("eval_iou", "Evaluation IOU", 0.05, 1, 0.05), this.buildSlider("conf_min", "Min confidence", 0, 1, 0.01), this.buildSlider("conf_max", "Max confidence", 0, 1, 0.01));
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
    buildSlider(name, text, min, max, step) {
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
    async commitParams() {
        const read = (name) => {
            const slider = this.sliders.get(name);
            return slider ? Number(slider.input.value) : this.params[name];
        };
        this.store.update({
            params: { eval_iou: read("eval_iou"), conf_min: read("conf_min"), conf_max: read("conf_max") },
        });
        await this.refreshChart();
        await this.refreshSource();
    }
    async refreshChart() {
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
        }
        catch (error) {
            this.totalLabel.textContent = "";
            this.chartHost.textContent = "";
            const message = document.createElement("p");
            message.className = "chart-error";
            message.textContent = error instanceof ApiError ? error.reason : "failed to load intersections";
            this.chartHost.append(message);
        }
    }
    renderChart() {
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
    async refreshSource() {
        const source = this.store.current.source;
        if (!source) {
            return;
        }
        if (source.kind === "query") {
            const request = { ...source.request, ...this.params };
            this.store.update({ source: { kind: "query", request } });
            await this.runGridQuery(request, "query");
            return;
        }
        const stillPresent = this.lastIntersections?.bars.some((bar) => sameSignature(bar.signature, source.signature));
        if (stillPresent) {
            await this.selectBar(source.signature);
        }
        else {
            this.store.update({ source: null });
            this.lastQuery = null;
            this.countLabel.textContent = "";
            this.tagManager.setScope(0);
            this.showGridMessage("The selected signature has no clusters in this window.");
            this.renderChart();
        }
    }
    async selectBar(signature) {
        if (!this.meta) {
            return;
        }
        this.store.update({ source: { kind: "bar", signature } });
        this.renderChart();
        const inSignature = new Set(signature);
        const request = {
            include: [...signature],
            exclude: this.meta.models.filter((model) => !inSignature.has(model)),
            neutral: [],
            status: "all",
            ...this.params,
        };
        await this.runGridQuery(request, "grid");
    }
    async previewDraft(draft) {
        const request = { ...draft, ...this.params };
        try {
            const response = await this.previewLane.run(() => this.client.query(request));
            if (response) {
                this.panel.showPreview(response.count);
            }
        }
        catch (error) {
            this.panel.showError(error instanceof ApiError ? error.reason : "preview failed");
        }
    }
    async confirmDraft(draft) {
        const request = { ...draft, ...this.params };
        this.store.update({ source: { kind: "query", request } });
        this.renderChart();
        await this.runGridQuery(request, "query");
    }
    async runGridQuery(request, errorSink) {
        try {
            const response = await this.gridLane.run(() => this.client.query(request));
            if (!response) {
                return;
            }
            this.lastQuery = response;
            const plural = response.count === 1 ? "cluster" : "clusters";
            this.countLabel.textContent = `${response.count} ${plural}`;
            this.renderGrid();
        }
        catch (error) {
            const reason = error instanceof ApiError ? error.reason : "query failed";
            if (errorSink === "query") {
                this.panel.showError(reason);
            }
            else {
                this.showGridMessage(reason);
            }
        }
    }
    renderGrid() {
        if (!this.lastQuery) {
            return;
        }
        renderThumbnails(this.gridHost, this.lastQuery.clusters, this.colors, (imageId) => this.client.imageUrl(imageId), this.tagsByImage, { onOpen: (cluster) => this.track(this.openDetail(cluster)) });
        this.tagManager.setScope(this.gridImageIds().length);
    }
    gridImageIds() {
        if (!this.lastQuery) {
            return [];
        }
        const seen = new Set();
        const ids = [];
        for (const cluster of this.lastQuery.clusters) {
            if (!seen.has(cluster.image_id)) {
                seen.add(cluster.image_id);
                ids.push(cluster.image_id);
            }
        }
        return ids;
    }
    async refreshTags() {
        try {
            const response = await this.client.tags();
            this.tagsByImage = new Map();
            for (const [tag, imageIds] of Object.entries(response.tags)) {
                for (const imageId of imageIds) {
                    const existing = this.tagsByImage.get(imageId);
                    if (existing) {
                        existing.push(tag);
                    }
                    else {
                        this.tagsByImage.set(imageId, [tag]);
                    }
                }
            }
            this.tagManager.setSuggestions(Object.keys(response.tags));
            if (this.lastQuery) {
                this.renderGrid();
            }
        }
        catch {
            // Tag chips are a convenience; leave the previous snapshot in place.
        }
    }
    async assignTag(tag) {
        const imageIds = this.gridImageIds();
        if (imageIds.length === 0) {
            this.tagManager.showError("Load clusters into the grid before tagging.");
            return;
        }
        try {
            await this.client.assignTag(tag, imageIds);
            this.store.update({ tagDraft: "" });
            await this.refreshTags();
        }
        catch (error) {
            this.tagManager.showError(error instanceof ApiError ? error.reason : "tagging failed");
        }
    }
    async openDetail(cluster) {
        try {
            const annotations = await this.client.annotations(cluster.image_id, this.params);
            this.store.update({ detailImageId: cluster.image_id });
            this.overlay.open(annotations, this.client.imageUrl(cluster.image_id));
        }
        catch (error) {
            this.showGridMessage(error instanceof ApiError ? error.reason : "failed to load annotations");
        }
    }
    showGridMessage(text) {
        this.gridHost.textContent = "";
        const message = document.createElement("p");
        message.className = "grid-message";
        message.textContent = text;
        this.gridHost.append(message);
    }
}
//# sourceMappingURL=app.js.map