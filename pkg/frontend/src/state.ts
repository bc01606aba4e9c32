/**
 * Explorer view state.
 *
 * One plain object captures everything the page needs to redraw: the
 * evaluation parameters, what drives the thumbnail grid (a clicked bar's
 * signature or a confirmed tri-state query), which image's detail overlay
 * is open, and the tag input draft. Mutations go through `update` so every
 * subscriber repaints from the same snapshot.
 */

import type { EvalParams, QueryRequest } from "./api.js";

export type GridSource =
  | { kind: "bar"; signature: string[] }
  | { kind: "query"; request: QueryRequest }
  | null;

export interface ViewState {
  params: EvalParams;
  source: GridSource;
  detailImageId: string | null;
  tagDraft: string;
}

export type Listener = (state: ViewState) => void;

export class ViewStore {
  private state: ViewState;
  private readonly listeners = new Set<Listener>();

  constructor(initial: ViewState) {
    this.state = initial;
  }

  get current(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): ViewState {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}
