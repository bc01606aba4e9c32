/**
 * Typed client for the modelsets explorer service.
 *
 * Every number the explorer displays comes out of one of these calls; the
 * client never derives counts or set memberships on its own. The fetch
 * implementation is injectable so tests can replay recorded service
 * exchanges without a network.
 */

export interface EvalParams {
  eval_iou: number;
  conf_min: number;
  conf_max: number;
}

export type ClusterVerdict = "tp" | "fp";

export type StatusFilter = "all" | "tp" | "fp";

export interface MetaCounts {
  images: number;
  detections: number;
  detections_per_model: Record<string, number>;
  ground_truth: number;
  edges: number;
}

export interface MetaResponse {
  models: string[];
  object_class: string;
  set_iou: number;
  counts: MetaCounts;
  dropped_out_of_class: number;
  build: { tool_version: string; created_at: string; source_folder: string | null };
  defaults?: EvalParams;
}

export interface IntersectionBar {
  signature: string[];
  tp_count: number;
  fp_count: number;
  total: number;
  cluster_ids: number[];
}

export interface IntersectionsResponse {
  params: EvalParams;
  total_clusters: number;
  bars: IntersectionBar[];
}

export interface ClusterMember {
  detection_id: number;
  model_id: string;
  box: number[];
  confidence: number;
}

export interface MatchedGroundTruth {
  gt_id: number;
  box: number[];
  iou: number;
}

export interface ClusterDetail {
  cluster_id: number;
  image_id: string;
  file: string;
  signature: string[];
  members: ClusterMember[];
  status: ClusterVerdict;
  matched_gt: MatchedGroundTruth | null;
}

export interface QueryRequest {
  include: string[];
  exclude: string[];
  neutral: string[];
  status: StatusFilter;
  eval_iou: number;
  conf_min: number;
  conf_max: number;
}

export interface QueryResponse {
  params: EvalParams;
  include: string[];
  exclude: string[];
  neutral: string[];
  status_filter: StatusFilter;
  count: number;
  cluster_ids: number[];
  clusters: ClusterDetail[];
}

export interface AnnotatedDetection {
  detection_id: number;
  model_id: string;
  box: number[];
  confidence: number;
  in_window: boolean;
  cluster_id: number | null;
  status: ClusterVerdict | null;
}

export interface AnnotatedGroundTruth {
  gt_id: number;
  box: number[];
  matched_cluster_id: number | null;
}

export interface AnnotationsResponse {
  image_id: string;
  file: string;
  width: number;
  height: number;
  params: EvalParams;
  detections: AnnotatedDetection[];
  ground_truth: AnnotatedGroundTruth[];
}

export interface TagsResponse {
  tags: Record<string, string[]>;
}

export interface TagAssignment {
  tag: string;
  image_ids: string[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Raised for any non-2xx service response, carrying the service's reason. */
export class ApiError extends Error {
  readonly status: number;
  readonly reason: string;

  constructor(status: number, reason: string) {
    super(`service responded ${status}: ${reason}`);
    this.name = "ApiError";
    this.status = status;
    this.reason = reason;
  }
}

function paramsQuery(params: EvalParams): string {
  const search = new URLSearchParams({
    eval_iou: String(params.eval_iou),
    conf_min: String(params.conf_min),
    conf_max: String(params.conf_max),
  });
  return search.toString();
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const reason =
        payload && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : response.statusText || "request failed";
      throw new ApiError(response.status, reason);
    }
    return payload as T;
  }

  meta(): Promise<MetaResponse> {
    return this.request<MetaResponse>("/api/meta");
  }

  intersections(params: EvalParams): Promise<IntersectionsResponse> {
    return this.request<IntersectionsResponse>(`/api/intersections?${paramsQuery(params)}`);
  }

  query(body: QueryRequest): Promise<QueryResponse> {
    return this.request<QueryResponse>("/api/query", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  annotations(imageId: string, params: EvalParams): Promise<AnnotationsResponse> {
    const id = encodeURIComponent(imageId);
    return this.request<AnnotationsResponse>(`/api/images/${id}/annotations?${paramsQuery(params)}`);
  }

  tags(): Promise<TagsResponse> {
    return this.request<TagsResponse>("/api/tags");
  }

  assignTag(tag: string, imageIds: string[]): Promise<TagAssignment> {
    return this.request<TagAssignment>("/api/tags", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ tag, image_ids: imageIds }),
    });
  }

  imageUrl(imageId: string): string {
    return `${this.base}/api/images/${encodeURIComponent(imageId)}`;
  }

  exportTagsUrl(): string {
    return `${this.base}/api/export/tags`;
  }
}
