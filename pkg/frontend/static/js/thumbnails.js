/**
 * Thumbnail grid for query results.
 *
 * One card per cluster from the query response, in the order the service
 * returned them. Each card draws the member detections as color-coded
 * outlines over the image (colors follow the canonical model palette),
 * shows the cluster's verdict and signature, and lists any tags already on
 * the image. Clicking a card opens the detail overlay.
 */
/**
 * Lay box outlines over an image using percentage coordinates so they track
 * the rendered size. `width`/`height` are the image's pixel dimensions.
 */
export function positionBoxes(layer, boxes, width, height) {
    layer.textContent = "";
    if (width <= 0 || height <= 0) {
        return;
    }
    for (const placed of boxes) {
        const [x = 0, y = 0, w = 0, h = 0] = placed.box;
        const outline = document.createElement("div");
        outline.className = `box ${placed.cssClass}`.trim();
        outline.style.borderColor = placed.color;
        outline.style.left = `${(x / width) * 100}%`;
        outline.style.top = `${(y / height) * 100}%`;
        outline.style.width = `${(w / width) * 100}%`;
        outline.style.height = `${(h / height) * 100}%`;
        outline.title = placed.label;
        layer.append(outline);
    }
}
function memberBoxes(cluster, colors) {
    return cluster.members.map((member) => ({
        box: member.box,
        color: colors.get(member.model_id) ?? "#888888",
        label: `${member.model_id} ${member.confidence.toFixed(2)}`,
        cssClass: "detection",
    }));
}
export function renderThumbnails(container, clusters, colors, imageUrl, tagsByImage, callbacks) {
    container.textContent = "";
    if (clusters.length === 0) {
        const empty = document.createElement("p");
        empty.className = "grid-empty";
        empty.textContent = "No clusters to show.";
        container.append(empty);
        return;
    }
    for (const cluster of clusters) {
        const card = document.createElement("figure");
        card.className = "thumb";
        card.dataset.clusterId = String(cluster.cluster_id);
        card.dataset.imageId = cluster.image_id;
        card.tabIndex = 0;
        const frame = document.createElement("div");
        frame.className = "thumb-frame";
        const img = document.createElement("img");
        img.src = imageUrl(cluster.image_id);
        img.alt = cluster.file;
        const layer = document.createElement("div");
        layer.className = "box-layer";
        const draw = () => positionBoxes(layer, memberBoxes(cluster, colors), img.naturalWidth, img.naturalHeight);
        if (img.complete && img.naturalWidth > 0) {
            draw();
        }
        else {
            img.addEventListener("load", draw);
        }
        frame.append(img, layer);
        card.append(frame);
        const caption = document.createElement("figcaption");
        const badge = document.createElement("span");
        badge.className = `badge badge-${cluster.status}`;
        badge.textContent = cluster.status.toUpperCase();
        const title = document.createElement("span");
        title.className = "thumb-title";
        title.textContent = `#${cluster.cluster_id} · ${cluster.image_id} · ${cluster.signature.join(" + ")}`;
        caption.append(badge, title);
        const tags = tagsByImage.get(cluster.image_id) ?? [];
        if (tags.length > 0) {
            const chips = document.createElement("span");
            chips.className = "chips";
            for (const tag of tags) {
                const chip = document.createElement("span");
                chip.className = "chip";
                chip.textContent = tag;
                chips.append(chip);
            }
            caption.append(chips);
        }
        card.append(caption);
        card.addEventListener("click", () => callbacks.onOpen(cluster));
        card.addEventListener("keydown", (event) => {
            if (event.key === "Enter" || event.key === " ") {
                event.preventDefault();
                callbacks.onOpen(cluster);
            }
        });
        container.append(card);
    }
}
//# sourceMappingURL=thumbnails.js.map