/**
 * Fixture-backed fetch for the explorer tests.
 *
 * `tests/fixtures/desk.json` holds exchanges recorded from the real service
 * (see scripts/capture_fixtures.py). The mock fetch replays them by
 * structural match — method and path exactly; query parameters compared as
 * numbers; JSON bodies compared field-wise with the model lists treated as
 * sets — so the explorer under test talks to real service responses and
 * every expected count in the suite originates from the service, never
 * from the tests' own arithmetic. Repeated GET /api/tags reads advance
 * past one recorded snapshot per successful tag POST, mirroring the
 * service's state. Tests can delay chosen responses to simulate slow
 * requests; anything without a recorded exchange rejects loudly.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { FetchLike, IntersectionsResponse, QueryResponse } from "../src/api.js";

export interface RecordedResponse {
  status: number;
  json: unknown;
}

export interface RecordedEntry {
  method?: string;
  path: string;
  params?: Record<string, unknown>;
  body?: Record<string, unknown>;
  note?: string;
  response: RecordedResponse;
}

export interface DeskFixture {
  base: string;
  entries: RecordedEntry[];
}

export interface RequestSeen {
  method: string;
  path: string;
  params: Record<string, string>;
  body: Record<string, unknown> | null;
}

export interface MockOptions {
  /** Milliseconds to hold a matched response back, keyed on the request. */
  delay?: (request: RequestSeen) => number | undefined;
  /** Simulate a transport failure: return a message to reject the request. */
  failWith?: (request: RequestSeen) => string | undefined;
}

export interface FixtureFetch {
  fetch: FetchLike;
  calls: RequestSeen[];
  unmatched: string[];
}

const SET_VALUED_KEYS = new Set(["include", "exclude", "neutral", "image_ids"]);

export function loadDesk(): DeskFixture {
  // vitest's jsdom environment rewrites import.meta.url to an http URL, so
  // anchor at the package root (vitest runs with cwd at the config dir)
  const path = join(process.cwd(), "tests", "fixtures", "desk.json");
  return JSON.parse(readFileSync(path, "utf8")) as DeskFixture;
}

function numbersEqual(a: unknown, b: unknown): boolean {
  const left = Number(a);
  const right = Number(b);
  if (!Number.isNaN(left) && !Number.isNaN(right)) {
    return left === right;
  }
  return String(a) === String(b);
}

function sameSet(a: unknown, b: unknown): boolean {
  if (!Array.isArray(a) || !Array.isArray(b)) {
    return false;
  }
  const left = new Set(a.map(String));
  const right = new Set(b.map(String));
  return left.size === right.size && [...left].every((item) => right.has(item));
}

function paramsMatch(expected: Record<string, unknown> | undefined, actual: Record<string, string>): boolean {
  const wanted = expected ?? {};
  const wantedKeys = Object.keys(wanted);
  if (wantedKeys.length !== Object.keys(actual).length) {
    return false;
  }
  return wantedKeys.every((key) => key in actual && numbersEqual(wanted[key], actual[key]));
}

function bodyMatches(expected: Record<string, unknown> | undefined, actual: Record<string, unknown> | null): boolean {
  if (expected === undefined || actual === null) {
    return expected === undefined && actual === null;
  }
  const wantedKeys = Object.keys(expected);
  if (wantedKeys.length !== Object.keys(actual).length) {
    return false;
  }
  return wantedKeys.every((key) => {
    if (!(key in actual)) {
      return false;
    }
    if (SET_VALUED_KEYS.has(key)) {
      return sameSet(expected[key], actual[key]);
    }
    return numbersEqual(expected[key], actual[key]);
  });
}

function asResponse(recorded: RecordedResponse): Response {
  const status = recorded.status;
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: () => Promise.resolve(JSON.parse(JSON.stringify(recorded.json))),
  } as unknown as Response;
}

function describeRequest(request: RequestSeen): string {
  const params = Object.keys(request.params).length > 0 ? ` params=${JSON.stringify(request.params)}` : "";
  const body = request.body ? ` body=${JSON.stringify(request.body)}` : "";
  return `${request.method} ${request.path}${params}${body}`;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export function fixtureFetch(fixture: DeskFixture, options: MockOptions = {}): FixtureFetch {
  const calls: RequestSeen[] = [];
  const unmatched: string[] = [];
  const postsSeen = new Map<string, number>();

  const fetchImpl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://fixture.test");
    const method = (init?.method ?? "GET").toUpperCase();
    const params: Record<string, string> = {};
    url.searchParams.forEach((value, key) => {
      params[key] = value;
    });
    const body = typeof init?.body === "string" ? (JSON.parse(init.body) as Record<string, unknown>) : null;
    const request: RequestSeen = { method, path: url.pathname, params, body };
    calls.push(request);

    const failure = options.failWith?.(request);
    if (failure) {
      throw new Error(failure);
    }

    const matches = fixture.entries.filter(
      (entry) =>
        (entry.method ?? "GET").toUpperCase() === method &&
        entry.path === request.path &&
        paramsMatch(entry.params, params) &&
        bodyMatches(entry.body, body),
    );
    if (matches.length === 0) {
      const description = describeRequest(request);
      unmatched.push(description);
      throw new Error(`no recorded exchange for ${description}`);
    }

    // Stateful endpoints were recorded once per state: each successful POST
    // advances later reads to the next recorded snapshot.
    let entry = matches[0] as RecordedEntry;
    if (method === "GET") {
      const advanced = postsSeen.get(request.path) ?? 0;
      entry = matches[Math.min(advanced, matches.length - 1)] as RecordedEntry;
    } else if (entry.response.status < 400) {
      postsSeen.set(request.path, (postsSeen.get(request.path) ?? 0) + 1);
    }

    const holdMs = options.delay?.(request);
    if (holdMs && holdMs > 0) {
      await sleep(holdMs);
    }
    return asResponse(entry.response);
  };

  return { fetch: fetchImpl, calls, unmatched };
}

/** Look up a recorded exchange to read its response as the expected value. */
export function findRecorded(
  fixture: DeskFixture,
  method: string,
  path: string,
  match: { params?: Record<string, unknown>; body?: Record<string, unknown> } = {},
): RecordedEntry {
  const found = fixture.entries.find(
    (entry) =>
      (entry.method ?? "GET").toUpperCase() === method.toUpperCase() &&
      entry.path === path &&
      (match.params === undefined ||
        Object.entries(match.params).every(([key, value]) => numbersEqual(entry.params?.[key], value))) &&
      (match.body === undefined ||
        Object.entries(match.body).every(([key, value]) =>
          SET_VALUED_KEYS.has(key) ? sameSet(entry.body?.[key], value) : numbersEqual(entry.body?.[key], value),
        )),
  );
  if (!found) {
    throw new Error(`fixture has no recorded ${method} ${path} for ${JSON.stringify(match)}`);
  }
  return found;
}

export function recordedIntersections(
  fixture: DeskFixture,
  window: { eval_iou: number; conf_min: number; conf_max: number },
): IntersectionsResponse {
  return findRecorded(fixture, "GET", "/api/intersections", { params: window }).response
    .json as IntersectionsResponse;
}

export function recordedQuery(fixture: DeskFixture, body: Record<string, unknown>): QueryResponse {
  return findRecorded(fixture, "POST", "/api/query", { body }).response.json as QueryResponse;
}
