/**
 * Typed client for the modelsets explorer service.
 *
 * Every number the explorer displays comes out of one of these calls; the
 * client never derives counts or set memberships on its own. The fetch
 * implementation is injectable so tests can replay recorded service
 * exchanges without a network.
 */
/** Raised for any non-2xx service response, carrying the service's reason. */
export class ApiError extends Error {
    status;
    reason;
    constructor(status, reason) {
        super(`service responded ${status}: ${reason}`);
        this.name = "ApiError";
        this.status = status;
        this.reason = reason;
    }
}
function paramsQuery(params) {
    const search = new URLSearchParams({
        eval_iou: String(params.eval_iou),
        conf_min: String(params.conf_min),
        conf_max: String(params.conf_max),
    });
    return search.toString();
}
export class ApiClient {
    base;
    fetchFn;
    constructor(base = "", fetchFn) {
        this.base = base.replace(/\/$/, "");
        this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
    }
    async request(path, init) {
        const response = await this.fetchFn(`${this.base}${path}`, init);
        let payload = null;
        try {
            payload = await response.json();
        }
        catch {
            payload = null;
        }
        if (!response.ok) {
            const reason = payload && typeof payload === "object" && "error" in payload
                ? String(payload.error)
                : response.statusText || "request failed";
            throw new ApiError(response.status, reason);
        }
        return payload;
    }
    meta() {
        return this.request("/api/meta");
    }
    intersections(params) {
        return this.request(`/api/intersections?${paramsQuery(params)}`);
    }
    query(body) {
        return this.request("/api/query", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
        });
    }
    annotations(imageId, params) {
        const id = encodeURIComponent(imageId);
        return this.request(`/api/images/${id}/annotations?${paramsQuery(params)}`);
    }
    tags() {
        return this.request("/api/tags");
    }
    assignTag(tag, imageIds) {
        return this.request("/api/tags", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ tag, image_ids: imageIds }),
        });
    }
    imageUrl(imageId) {
        return `${this.base}/api/images/${encodeURIComponent(imageId)}`;
    }
    exportTagsUrl() {
        return `${this.base}/api/export/tags`;
    }
}
//# sourceMappingURL=api.js.map