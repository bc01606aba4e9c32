/**
 * Full-image detail overlay.
 *
 * Shows one image with every model's detections and the ground-truth boxes
 * drawn from the `/api/images/{id}/annotations` payload, which carries the
 * image's pixel dimensions. The viewer pans by dragging and zooms with the
 * wheel or the +/−/reset buttons; per-model checkboxes and a verdict filter
 * (all / TP only / FP only) control which boxes are visible. Detections
 * outside the current confidence window render muted.
 */
import { GROUND_TRUTH_COLOR } from "./palette.js";
import { positionBoxes } from "./thumbnails.js";
const ZOOM_STEP = 1.25;
const MIN_SCALE = 0.25;
const MAX_SCALE = 16;
export class DetailOverlay {
    root;
    colors;
    annotations = null;
    hiddenModels = new Set();
    verdictFilter = "all";
    scale = 1;
    panX = 0;
    panY = 0;
    dragFrom = null;
    canvas = null;
    layer = null;
    constructor(root, colors) {
        this.root = root;
        this.colors = colors;
        this.root.classList.add("detail-overlay");
        this.root.hidden = true;
    }
    get isOpen() {
        return !this.root.hidden;
    }
    get transform() {
        return { scale: this.scale, x: this.panX, y: this.panY };
    }
    open(annotations, imageUrl) {
        this.annotations = annotations;
        this.hiddenModels = new Set();
        this.verdictFilter = "all";
        this.scale = 1;
        this.panX = 0;
        this.panY = 0;
        this.root.hidden = false;
        this.root.textContent = "";
        const bar = document.createElement("div");
        bar.className = "detail-bar";
        const title = document.createElement("span");
        title.className = "detail-title";
        title.textContent = `${annotations.image_id} · ${annotations.file} (${annotations.width}×${annotations.height})`;
        bar.append(title);
        const models = [...new Set(annotations.detections.map((d) => d.model_id))];
        for (const model of models) {
            const label = document.createElement("label");
            label.className = "detail-model-toggle";
            const checkbox = document.createElement("input");
            checkbox.type = "checkbox";
            checkbox.checked = true;
            checkbox.dataset.model = model;
            checkbox.addEventListener("change", () => {
                if (checkbox.checked) {
                    this.hiddenModels.delete(model);
                }
                else {
                    this.hiddenModels.add(model);
                }
                this.redrawBoxes();
            });
            const swatch = document.createElement("span");
            swatch.className = "legend-swatch";
            swatch.style.background = this.colors.get(model) ?? "#888888";
            label.append(checkbox, swatch, document.createTextNode(` ${model}`));
            bar.append(label);
        }
        const verdict = document.createElement("select");
        verdict.className = "detail-verdict";
        for (const [value, text] of [
            ["all", "all boxes"],
            ["tp", "TP only"],
            ["fp", "FP only"],
        ]) {
            const option = document.createElement("option");
            option.value = value;
            option.textContent = text;
            verdict.append(option);
        }
        verdict.addEventListener("change", () => {
            this.verdictFilter = verdict.value;
            this.redrawBoxes();
        });
        bar.append(verdict);
        for (const [label, action] of [
            ["+", () => this.zoomBy(ZOOM_STEP)],
            ["−", () => this.zoomBy(1 / ZOOM_STEP)],
            ["reset", () => this.resetView()],
            ["close", () => this.close()],
        ]) {
            const button = document.createElement("button");
            button.type = "button";
            button.className = `detail-${label === "+" ? "zoom-in" : label === "−" ? "zoom-out" : label}`;
            button.textContent = label;
            button.addEventListener("click", action);
            bar.append(button);
        }
        this.root.append(bar);
        const viewport = document.createElement("div");
        viewport.className = "detail-viewport";
        this.canvas = document.createElement("div");
        this.canvas.className = "detail-canvas";
        const img = document.createElement("img");
        img.src = imageUrl;
        img.alt = annotations.file;
        this.layer = document.createElement("div");
        this.layer.className = "box-layer";
        this.canvas.append(img, this.layer);
        viewport.append(this.canvas);
        this.root.append(viewport);
        viewport.addEventListener("wheel", (event) => {
            event.preventDefault();
            this.zoomBy(event.deltaY < 0 ? ZOOM_STEP : 1 / ZOOM_STEP);
        });
        viewport.addEventListener("mousedown", (event) => {
            this.dragFrom = { x: event.clientX - this.panX, y: event.clientY - this.panY };
        });
        viewport.addEventListener("mousemove", (event) => {
            if (this.dragFrom) {
                this.panX = event.clientX - this.dragFrom.x;
                this.panY = event.clientY - this.dragFrom.y;
                this.applyTransform();
            }
        });
        for (const done of ["mouseup", "mouseleave"]) {
            viewport.addEventListener(done, () => {
                this.dragFrom = null;
            });
        }
        this.redrawBoxes();
        this.applyTransform();
    }
    close() {
        this.root.hidden = true;
        this.root.textContent = "";
        this.annotations = null;
        this.canvas = null;
        this.layer = null;
    }
    zoomBy(factor) {
        this.scale = Math.min(MAX_SCALE, Math.max(MIN_SCALE, this.scale * factor));
        this.applyTransform();
    }
    resetView() {
        this.scale = 1;
        this.panX = 0;
        this.panY = 0;
        this.applyTransform();
    }
    applyTransform() {
        if (this.canvas) {
            this.canvas.style.transform = `translate(${this.panX}px, ${this.panY}px) scale(${this.scale})`;
        }
    }
    redrawBoxes() {
        if (!this.annotations || !this.layer) {
            return;
        }
        const placed = [];
        for (const detection of this.annotations.detections) {
            if (this.hiddenModels.has(detection.model_id)) {
                continue;
            }
            if (this.verdictFilter !== "all" && detection.status !== this.verdictFilter) {
                continue;
            }
            const classes = ["detection"];
            if (!detection.in_window) {
                classes.push("muted");
            }
            placed.push({
                box: detection.box,
                color: this.colors.get(detection.model_id) ?? "#888888",
                label: `${detection.model_id} ${detection.confidence.toFixed(2)}`,
                cssClass: classes.join(" "),
            });
        }
        if (this.verdictFilter === "all") {
            for (const gt of this.annotations.ground_truth) {
                placed.push({
                    box: gt.box,
                    color: GROUND_TRUTH_COLOR,
                    label: `ground truth #${gt.gt_id}`,
                    cssClass: "ground-truth",
                });
            }
        }
        positionBoxes(this.layer, placed, this.annotations.width, this.annotations.height);
    }
}
//# sourceMappingURL=detail.js.map