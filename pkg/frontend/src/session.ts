/**
 * Observable session store. Holds the editable draft, the selected
 * divergence kind, the current offer, and whatever the service last said
 * about them; views subscribe and repaint on every change.
 *
 * Two invariants drive the design:
 *
 *  - every displayed number is lifted from a service response (the one
 *    exception is money bookkeeping: earnings as rate · disclosure and the
 *    offer ceiling as the rate sum, both plain dot-product arithmetic on
 *    the request's own inputs);
 *  - a response only applies if no newer request for the same view has
 *    been issued meanwhile, so racing responses can never roll the
 *    display backwards.
 */

import { ApiError, ExplorerApi } from "./api";
import type {
  CurveResponse,
  FetchLike,
  GeometryResponse,
  InstancePayload,
  Kind,
  SolveResponse,
  ThresholdsResponse,
} from "./api";
import { debounce, type Debounced } from "./debounce";
import { latestGate, type LatestGate } from "./latest";
import {
  checkProbability,
  checkRate,
  cloneDraft,
  renormalize,
  toPayload,
  type Draft,
  type FieldError,
} from "./draft";

export interface Banner {
  code: string;
  message: string;
}

export interface SessionState {
  draft: Draft;
  kind: Kind;
  /** Offer the slider currently requests; the readouts show `solve.mu`. */
  mu: number;
  solve: SolveResponse | null;
  /** draft exactly as sent with `solve`, so readouts render one snapshot */
  solveDraft: Draft | null;
  /** rate · disclosure for the solve above, in the rates it was sent with */
  earnings: number | null;
  curve: CurveResponse | null;
  thresholds: ThresholdsResponse | null;
  geometry: GeometryResponse | null;
  fieldErrors: FieldError[];
  banner: Banner | null;
}

export interface SessionOptions {
  baseUrl: string;
  draft: Draft;
  kind?: Kind;
  mu?: number;
  /** Trailing debounce for slider-driven solves. */
  debounceMs?: number;
  fetchImpl?: FetchLike;
}

export const DEFAULT_DEBOUNCE_MS = 120;

type Listener = (state: SessionState) => void;

function dot(a: number[], b: number[]): number {
  return a.reduce((acc, x, i) => acc + x * b[i], 0);
}

function toBanner(err: unknown): Banner {
  if (err instanceof ApiError) return { code: err.code, message: err.message };
  return { code: "NETWORK", message: String(err) };
}

export class ExplorerSession {
  readonly api: ExplorerApi;
  private readonly state: SessionState;
  private readonly listeners: Listener[] = [];
  private readonly solveGate: LatestGate<SolveResponse> = latestGate();
  private readonly curveGate: LatestGate<CurveResponse> = latestGate();
  private readonly thresholdsGate: LatestGate<ThresholdsResponse> = latestGate();
  private readonly geometryGate: LatestGate<GeometryResponse> = latestGate();
  private readonly debouncedSolve: Debounced<[]>;
  private inflight = 0;
  private idleWaiters: (() => void)[] = [];

  constructor(opts: SessionOptions) {
    this.api = new ExplorerApi(opts.baseUrl, opts.fetchImpl);
    this.state = {
      draft: cloneDraft(opts.draft),
      kind: opts.kind ?? "sed",
      mu: opts.mu ?? 0,
      solve: null,
      solveDraft: null,
      earnings: null,
      curve: null,
      thresholds: null,
      geometry: null,
      fieldErrors: [],
      banner: null,
    };
    this.debouncedSolve = debounce(() => this.dispatchSolve(), opts.debounceMs ?? DEFAULT_DEBOUNCE_MS);
  }

  getState(): Readonly<SessionState> {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      const at = this.listeners.indexOf(fn);
      if (at >= 0) this.listeners.splice(at, 1);
    };
  }

  /** Offer ceiling: full disclosure earns the sum of the rates. */
  get muMax(): number {
    return this.state.draft.w.reduce((acc, x) => acc + x, 0);
  }

  /** Resolves once nothing is armed or in flight. Test hook, mostly. */
  whenIdle(): Promise<void> {
    if (this.isIdle()) return Promise.resolve();
    return new Promise((resolve) => this.idleWaiters.push(resolve));
  }

  isIdle(): boolean {
    return this.inflight === 0 && !this.debouncedSolve.pending();
  }

  /** Slider moved: clamp, record, and re-solve after the debounce window. */
  setOffer(mu: number): void {
    const clamped = Math.min(Math.max(mu, 0), this.muMax);
    this.state.mu = clamped;
    this.emit();
    this.debouncedSolve();
  }

  setKind(kind: Kind): void {
    if (kind === this.state.kind) return;
    this.state.kind = kind;
    this.state.curve = null; // curve and geometry depend on the kind
    this.state.geometry = null;
    this.emit();
    this.solveNow();
    this.loadCurve();
  }

  /** Rate edit: reject nonpositive values field-side, else re-solve everything. */
  editRate(index: number, value: number): void {
    const message = checkRate(value);
    if (message !== null) {
      this.setFieldError({ field: "w", index, message });
      return;
    }
    this.clearFieldError("w", index);
    this.state.draft.w[index] = value;
    this.instanceChanged();
  }

  /** Profile edit: keep the PMF exact by rescaling the untouched entries. */
  editProbability(field: "q" | "p", index: number, value: number): void {
    const message = checkProbability(value);
    if (message !== null) {
      this.setFieldError({ field, index, message });
      return;
    }
    this.clearFieldError(field, index);
    this.state.draft[field] = renormalize(this.state.draft[field], index, value);
    this.instanceChanged();
  }

  editCategory(index: number, name: string): void {
    if (name.trim() === "") {
      this.setFieldError({ field: "categories", index, message: "name must not be empty" });
      return;
    }
    this.clearFieldError("categories", index);
    this.state.draft.categories[index] = name;
    this.instanceChanged();
  }

  /** Bypass the debounce: edits and kind switches should answer at once. */
  solveNow(): void {
    this.debouncedSolve.cancel();
    this.dispatchSolve();
  }

  loadCurve(): void {
    const payload = toPayload(this.state.draft);
    this.runTask(this.curveGate, this.api.curve(payload, this.state.kind), (resp) => {
      this.state.curve = resp;
    });
  }

  loadThresholds(): void {
    const payload = toPayload(this.state.draft);
    this.runTask(this.thresholdsGate, this.api.thresholds(payload), (resp) => {
      this.state.thresholds = resp;
    });
  }

  loadGeometry(pathPoints = 0): void {
    const payload = toPayload(this.state.draft);
    this.runTask(this.geometryGate, this.api.geometry(payload, this.state.kind, pathPoints), (resp) => {
      this.state.geometry = resp;
    });
  }

  /** Initial load and full refresh share one path. */
  refreshAll(): void {
    if (this.state.draft.categories.length === 0) return;
    this.solveNow();
    this.loadCurve();
    this.loadThresholds();
  }

  private instanceChanged(): void {
    // every cached view of the old instance is now a lie
    this.state.curve = null;
    this.state.thresholds = null;
    this.state.geometry = null;
    this.state.mu = Math.min(this.state.mu, this.muMax);
    this.emit();
    this.solveNow();
    this.loadCurve();
    this.loadThresholds();
  }

  private dispatchSolve(): void {
    const snapshot = cloneDraft(this.state.draft);
    const payload = toPayload(snapshot);
    this.runTask(this.solveGate, this.api.solve(payload, this.state.kind, this.state.mu), (resp) => {
      this.state.solve = resp;
      this.state.solveDraft = snapshot;
      this.state.earnings = dot(snapshot.w, resp.delta);
    });
  }

  private runTask<T>(gate: LatestGate<T>, fired: Promise<T>, apply: (value: T) => void): void {
    this.inflight += 1;
    void gate
      .run(
        fired,
        (value) => {
          apply(value);
          this.state.banner = null;
          this.emit();
        },
        (err) => {
          this.state.banner = toBanner(err);
          this.emit();
        },
      )
      .finally(() => {
        this.inflight -= 1;
        this.maybeSettle();
      });
  }

  private setFieldError(fieldError: FieldError): void {
    this.clearFieldError(fieldError.field, fieldError.index);
    this.state.fieldErrors.push(fieldError);
    this.emit();
  }

  private clearFieldError(field: FieldError["field"], index: number): void {
    const keep = this.state.fieldErrors.filter((e) => !(e.field === field && e.index === index));
    this.state.fieldErrors.length = 0;
    this.state.fieldErrors.push(...keep);
  }

  private emit(): void {
    for (const fn of [...this.listeners]) fn(this.state);
  }

  private maybeSettle(): void {
    if (!this.isIdle()) return;
    const waiters = this.idleWaiters;
    this.idleWaiters = [];
    for (const resolve of waiters) resolve();
  }
}

export type { Draft, FieldError, InstancePayload };
