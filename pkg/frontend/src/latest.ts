/**
 * Latest-wins request lane.
 *
 * Each panel funnels its requests through one lane; when a newer request
 * starts before an older one resolves, the older result is discarded so a
 * slow response can never overwrite a fresher one. `run` resolves with the
 * task's value only when that task is still the newest — otherwise with
 * `undefined`, and stale failures are swallowed for the same reason.
 */
export class RequestLane<T> {
  private ticket = 0;

  async run(task: () => Promise<T>): Promise<T | undefined> {
    this.ticket += 1;
    const mine = this.ticket;
    try {
      const value = await task();
      return mine === this.ticket ? value : undefined;
    } catch (error) {
      if (mine === this.ticket) {
        throw error;
      }
      return undefined;
    }
  }

  /** True while a request newer than the last settled one may be in flight. */
  get currentTicket(): number {
    return this.ticket;
  }
}
