import type { FetchLike } from "../src/api";
import type { Draft } from "../src/draft";
import { ExplorerSession, type SessionOptions, type SessionState } from "../src/session";
import { mountExplorer, type ExplorerElements } from "../src/view";

/** The bundled three-category example; rates sum to exactly $1. */
export const EX1: Draft = {
  categories: ["sports", "politics", "technology"],
  q: [0.62, 0.27, 0.11],
  p: [0.259, 0.414, 0.327],
  w: [0.404, 0.044, 0.552],
};

export function liveBaseUrl(): string {
  const url = process.env.PRIVSHARE_BASE_URL;
  if (!url) throw new Error("PRIVSHARE_BASE_URL is not set; globalSetup should have started the service");
  return url;
}

export interface Mounted {
  session: ExplorerSession;
  elements: ExplorerElements;
}

export function mount(overrides: Partial<SessionOptions> = {}): Mounted {
  document.body.innerHTML = '<div id="app"></div>';
  const session = new ExplorerSession({
    baseUrl: liveBaseUrl(),
    draft: EX1,
    mu: 0,
    ...overrides,
  });
  const { elements } = mountExplorer(document.getElementById("app")!, session);
  return { session, elements };
}

/** Resolve with the first state snapshot matching `pred`. */
export function waitForState(
  session: ExplorerSession,
  pred: (state: SessionState) => boolean,
  timeoutMs = 10_000,
): Promise<SessionState> {
  if (pred(session.getState())) return Promise.resolve(session.getState());
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => {
      stop();
      reject(new Error("timed out waiting for session state"));
    }, timeoutMs);
    const stop = session.subscribe((state) => {
      if (!pred(state)) return;
      clearTimeout(timer);
      stop();
      resolve(state);
    });
  });
}

/** Wrap global fetch with a call counter, optionally intercepting. */
export function countingFetch(wrapped?: FetchLike): { fetchImpl: FetchLike; calls: string[] } {
  const calls: string[] = [];
  const inner: FetchLike = wrapped ?? ((input, init) => globalThis.fetch(input, init));
  return {
    calls,
    fetchImpl: (input, init) => {
      calls.push(String(input));
      return inner(input, init);
    },
  };
}

export function displayedNumber(el: HTMLElement): number {
  return Number.parseFloat(el.textContent ?? "");
}
