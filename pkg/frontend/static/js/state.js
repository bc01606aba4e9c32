/**
 * Explorer view state.
 *
 * One plain object captures everything the page needs to redraw: the
 * evaluation parameters, what drives the thumbnail grid (a clicked bar's
 * signature or a confirmed tri-state query), which image's detail overlay
 * is open, and the tag input draft. Mutations go through `update` so every
 * subscriber repaints from the same snapshot.
 */
export class ViewStore {
    state;
    listeners = new Set();
    constructor(initial) {
        this.state = initial;
    }
    get current() {
        return this.state;
    }
    update(patch) {
        this.state = { ...this.state, ...patch };
        for (const listener of this.listeners) {
            listener(this.state);
        }
        return this.state;
    }
    subscribe(listener) {
        this.listeners.add(listener);
        return () => this.listeners.delete(listener);
    }
}
//# sourceMappingURL=state.js.map