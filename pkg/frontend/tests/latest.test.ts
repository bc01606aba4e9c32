/**
 * Latest-wins request lane: a response that resolves after a newer request
 * has started is discarded, and stale failures are swallowed while the
 * newest failure still propagates.
 */

import { describe, expect, it } from "vitest";

import { RequestLane } from "../src/latest.js";

interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason: Error) => void;
}

function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (reason: Error) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

describe("request lane", () => {
  it("delivers the result of the only request", async () => {
    const lane = new RequestLane<number>();
    await expect(lane.run(() => Promise.resolve(7))).resolves.toBe(7);
  });

  it("discards the older result when it resolves after a newer request started", async () => {
    const lane = new RequestLane<string>();
    const slow = deferred<string>();
    const fast = deferred<string>();
    const first = lane.run(() => slow.promise);
    const second = lane.run(() => fast.promise);

    fast.resolve("new");
    slow.resolve("old"); // resolves last, but belongs to the older request
    await expect(second).resolves.toBe("new");
    await expect(first).resolves.toBeUndefined();
  });

  it("swallows a stale failure but propagates the newest one", async () => {
    const lane = new RequestLane<string>();
    const slow = deferred<string>();
    const first = lane.run(() => slow.promise);
    const second = lane.run(() => Promise.reject(new Error("newest failed")));

    slow.reject(new Error("stale failure"));
    await expect(first).resolves.toBeUndefined();
    await expect(second).rejects.toThrow("newest failed");
  });

  it("treats each completed request as the new baseline", async () => {
    const lane = new RequestLane<number>();
    await expect(lane.run(() => Promise.resolve(1))).resolves.toBe(1);
    await expect(lane.run(() => Promise.resolve(2))).resolves.toBe(2);
    expect(lane.currentTicket).toBe(2);
  });
});
