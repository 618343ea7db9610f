/**
 * Round-trip tests against a running service (booted by globalSetup when
 * PRIVSHARE_BASE_URL is not already set). Every displayed number asserted
 * here travelled through POST /v1/* — the client computes none of them.
 */

import { beforeAll, describe, expect, it } from "vitest";
import type { FetchLike, SolveResponse } from "../src/api";
import { ExplorerApi } from "../src/api";
import { EX1, countingFetch, displayedNumber, liveBaseUrl, mount, waitForState } from "./helpers";

function slideTo(slider: HTMLInputElement, mu: number): void {
  slider.value = String(mu);
  slider.dispatchEvent(new Event("input", { bubbles: true }));
}

beforeAll(async () => {
  const api = new ExplorerApi(liveBaseUrl());
  expect(await api.health()).toBe(true);
});

describe("offer slider round trip", () => {
  it("shows the solved risk at mu=0.8974 and marks technology fully disclosed", async () => {
    const { session, elements } = mount();
    session.refreshAll();
    await session.whenIdle();

    slideTo(elements.slider, 0.8974);
    await session.whenIdle();

    expect(Math.abs(displayedNumber(elements.risk) - 0.1358)).toBeLessThanOrEqual(1e-3);
    expect(elements.offer.textContent).toBe("0.8974");
    // money constraint: earnings shown equal the offer
    expect(Math.abs(displayedNumber(elements.earnings) - 0.8974)).toBeLessThanOrEqual(1e-6);
    expect(Math.abs(displayedNumber(elements.riskRatio) - 68.5)).toBeLessThanOrEqual(0.2);

    const rows = elements.bars.querySelectorAll<HTMLElement>(".category-row");
    expect(rows).toHaveLength(3);
    const tech = rows[2];
    expect(tech.querySelector(".category-name")?.textContent).toBe("technology");
    expect(tech.dataset.activity).toBe("ONE");
    expect(tech.classList.contains("fully-disclosed")).toBe(true);
    expect(Number.parseFloat(tech.querySelector<HTMLElement>(".bar-fill")!.style.width)).toBe(100);
    // politics stays untouched at this offer
    expect(rows[1].dataset.activity).toBe("INTERIOR");
    expect(rows[0].classList.contains("fully-disclosed")).toBe(false);
  });

  it("rests at the baseline profile for mu=0", async () => {
    const { session, elements } = mount();
    session.refreshAll();
    await session.whenIdle();

    expect(elements.risk.textContent).toBe("0.0000");
    expect(elements.earnings.textContent).toBe("0.0000");
    const rows = elements.bars.querySelectorAll<HTMLElement>(".category-row");
    for (const row of rows) {
      expect(row.dataset.activity).toBe("ZERO");
      expect(Number.parseFloat(row.querySelector<HTMLElement>(".bar-fill")!.style.width)).toBe(0);
      // delta=0 leaves the apparent profile at the baseline
      const text = row.querySelector(".bar-endpoints")?.textContent ?? "";
      const [pPart, tPart] = text.split("→");
      expect(tPart.trim().slice(2)).toBe(pPart.trim().slice(2));
    }
    expect(Number.parseFloat(elements.gaugeFill.style.width)).toBe(0);
  });

  it("reaches the target profile at the offer ceiling", async () => {
    const { session, elements } = mount();
    session.refreshAll();
    await session.whenIdle();

    slideTo(elements.slider, session.muMax);
    await session.whenIdle();

    expect(Math.abs(displayedNumber(elements.risk) - 0.1981)).toBeLessThanOrEqual(5e-4);
    expect(elements.riskRatio.textContent).toBe("100.0%");
    const rows = elements.bars.querySelectorAll<HTMLElement>(".category-row");
    for (const row of rows) {
      expect(row.dataset.activity).toBe("ONE");
      expect(Number.parseFloat(row.querySelector<HTMLElement>(".bar-fill")!.style.width)).toBe(100);
      const text = row.querySelector(".bar-endpoints")?.textContent ?? "";
      const [, tPart, qPart] = text.split("→");
      expect(tPart.trim().slice(2)).toBe(qPart.trim().slice(2));
    }
  });
});

describe("response ordering", () => {
  it("never lets a stale solve overwrite a newer one", async () => {
    let solveCalls = 0;
    let releaseFirst!: () => void;
    const firstHeld = new Promise<void>((r) => (releaseFirst = r));
    let firstStarted!: () => void;
    const started = new Promise<void>((r) => (firstStarted = r));

    const gatedFetch: FetchLike = async (input, init) => {
      const isSolve = String(input).endsWith("/v1/solve");
      const call = isSolve ? ++solveCalls : 0;
      if (call === 1) firstStarted();
      const resp = await globalThis.fetch(input, init);
      if (call === 1) await firstHeld; // delay delivery, not the request
      return resp;
    };

    const { session, elements } = mount({ fetchImpl: gatedFetch, debounceMs: 10 });
    session.setOffer(0.3);
    await started;

    session.setOffer(0.8974);
    await waitForState(session, (s) => s.solve?.mu === 0.8974);
    const shown = elements.risk.textContent;
    expect(Math.abs(Number.parseFloat(shown ?? "") - 0.1358)).toBeLessThanOrEqual(1e-3);

    releaseFirst();
    await session.whenIdle();

    expect(solveCalls).toBe(2);
    expect(session.getState().solve?.mu).toBe(0.8974);
    expect(elements.risk.textContent).toBe(shown);
    expect(elements.offer.textContent).toBe("0.8974");
  });
});

describe("error surfaces", () => {
  it("banners a service rejection inline and recovers on the next good solve", async () => {
    // identical profiles pass every field check; only the service can say no
    const equal = { ...EX1, q: [...EX1.p] };
    const { session, elements } = mount({ draft: equal });
    session.refreshAll();
    await session.whenIdle();

    expect(elements.banner.hidden).toBe(false);
    expect(elements.banner.textContent).toMatch(/^[A-Z_]+: /);
    expect(session.getState().solve).toBeNull();
    expect(elements.risk.textContent).toBe("–");

    session.editProbability("q", 0, 0.62);
    await session.whenIdle();
    expect(elements.banner.hidden).toBe(true);
    expect(session.getState().solve).not.toBeNull();
  });

  it("rejects a nonpositive rate client-side without touching the network", async () => {
    const counter = countingFetch();
    const { session, elements } = mount({ fetchImpl: counter.fetchImpl });
    session.refreshAll();
    await session.whenIdle();
    const requestsBefore = counter.calls.length;

    session.editRate(1, -0.5);

    expect(session.isIdle()).toBe(true);
    expect(counter.calls.length).toBe(requestsBefore);
    expect(session.getState().draft.w).toEqual(EX1.w);
    const error = elements.editorBody.querySelectorAll<HTMLElement>(".field-error")[1];
    expect(error.hidden).toBe(false);
    expect(error.textContent).toMatch(/positive/);
  });
});

describe("rate edits", () => {
  it("re-solves at the clamped offer and refreshes threshold markers", async () => {
    const { session, elements } = mount();
    session.refreshAll();
    await session.whenIdle();
    slideTo(elements.slider, 0.99);
    await session.whenIdle();

    const oldDigest = session.getState().solve?.instance_digest;
    const oldTicks = [...elements.markers.querySelectorAll(".marker")].map((m) => (m as HTMLElement).title);
    expect(oldTicks.length).toBeGreaterThan(0);

    session.editRate(2, 0.1); // ceiling drops to 0.548
    await session.whenIdle();

    const state = session.getState();
    expect(session.muMax).toBeCloseTo(0.548, 12);
    expect(state.mu).toBeCloseTo(0.548, 12);
    expect(state.solve?.mu).toBeCloseTo(0.548, 12);
    expect(state.solve?.instance_digest).not.toBe(oldDigest);
    expect(elements.slider.max).toBe(String(session.muMax));
    expect(state.curve?.instance_digest).toBe(state.solve?.instance_digest);
    expect(state.curve?.mu_max).toBeCloseTo(0.548, 12);
    expect(state.thresholds?.instance_digest).toBe(state.solve?.instance_digest);
    const newTicks = [...elements.markers.querySelectorAll(".marker")].map((m) => (m as HTMLElement).title);
    expect(newTicks).not.toEqual(oldTicks);
  });

  it("doubling every rate doubles the ceiling but not the disclosure", async () => {
    const { session } = mount();
    session.refreshAll();
    await session.whenIdle();
    session.setOffer(0.4);
    await session.whenIdle();
    const before = [...(session.getState().solve?.delta ?? [])];
    expect(before).toHaveLength(3);

    for (let i = 0; i < 3; i++) {
      session.editRate(i, EX1.w[i] * 2);
      await session.whenIdle();
    }
    expect(session.muMax).toBeCloseTo(2, 12);
    session.setOffer(0.8);
    await session.whenIdle();

    const after = session.getState().solve?.delta ?? [];
    for (let i = 0; i < 3; i++) {
      expect(Math.abs(after[i] - before[i])).toBeLessThanOrEqual(1e-9);
    }
  });
});

describe("curve panel", () => {
  it("draws the service's 200-point sweep with its breakpoint and operating point", async () => {
    const { session, elements } = mount();
    session.refreshAll();
    await session.whenIdle();
    slideTo(elements.slider, 0.8974);
    await session.whenIdle();

    const curve = session.getState().curve;
    expect(curve).not.toBeNull();
    expect(curve!.points.length).toBeGreaterThanOrEqual(200);
    expect(curve!.points[0].mu).toBe(0);
    expect(curve!.points[0].risk).toBe(0);
    const last = curve!.points[curve!.points.length - 1];
    expect(last.mu).toBeCloseTo(1, 12);
    expect(Math.abs(last.risk - 0.1981)).toBeLessThanOrEqual(5e-4);
    expect(curve!.breakpoints).toHaveLength(1);
    expect(Math.abs(curve!.breakpoints[0] - 0.7948)).toBeLessThanOrEqual(5e-4);

    const svg = elements.curveWrap.querySelector("svg");
    expect(svg).not.toBeNull();
    expect(svg!.querySelector(".curve-path")?.getAttribute("d")?.startsWith("M")).toBe(true);
    expect(svg!.querySelectorAll(".regime")).toHaveLength(2);
    expect(svg!.querySelectorAll(".breakpoint")).toHaveLength(1);
    expect(svg!.querySelector(".operating-point")).not.toBeNull();
  });

  it("answers hovers from sampled points only", async () => {
    const { session } = mount();
    session.refreshAll();
    await session.whenIdle();
    const curve = session.getState().curve!;

    const { nearestPoint, tooltipText } = await import("../src/curvePanel");
    const near = nearestPoint(curve, 0.8974);
    expect(Math.abs(near.risk - 0.1358)).toBeLessThanOrEqual(2e-3);
    expect(tooltipText(curve, 0.8974)).toBe(
      `μ ${near.mu.toFixed(4)} → risk ${near.risk.toFixed(4)}`,
    );
  });
});

describe("kind switching", () => {
  it("refetches the curve and re-solves under the new divergence", async () => {
    const { session, elements } = mount({ mu: 0.5 });
    session.refreshAll();
    await session.whenIdle();
    const sedRisk = session.getState().solve?.risk as number;
    const sedCurve = session.getState().curve;

    elements.kindSelect.value = "kl";
    elements.kindSelect.dispatchEvent(new Event("change", { bubbles: true }));
    await session.whenIdle();

    const state = session.getState();
    expect(state.kind).toBe("kl");
    expect(state.curve).not.toBe(sedCurve);
    expect(state.curve?.kind).toBe("kl");
    expect(state.solve?.risk).not.toBe(sedRisk);
    expect((state.solve as SolveResponse).mu).toBeCloseTo(0.5, 12);
  });
});
