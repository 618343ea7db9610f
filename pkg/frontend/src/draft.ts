/**
 * The editable instance draft and its client-side checks. The service is
 * the real validator; these checks only catch what a field editor can
 * catch (a nonpositive rate, a probability outside (0,1)) before a
 * request is even worth sending.
 */

import type { InstancePayload } from "./api";

export interface Draft {
  categories: string[];
  q: number[];
  p: number[];
  w: number[];
}

export interface FieldError {
  field: "categories" | "q" | "p" | "w";
  index: number;
  message: string;
}

export function cloneDraft(d: Draft): Draft {
  return {
    categories: [...d.categories],
    q: [...d.q],
    p: [...d.p],
    w: [...d.w],
  };
}

export function toPayload(d: Draft): InstancePayload {
  return { categories: [...d.categories], q: [...d.q], p: [...d.p], w: [...d.w] };
}

export function checkRate(value: number): string | null {
  if (!Number.isFinite(value)) return "rate must be a finite number";
  if (value <= 0) return "rate must be positive";
  return null;
}

export function checkProbability(value: number): string | null {
  if (!Number.isFinite(value)) return "probability must be a finite number";
  if (value <= 0 || value >= 1) return "probability must lie strictly between 0 and 1";
  return null;
}

/**
 * Set entry `index` of a PMF to `value` and rescale the untouched entries
 * proportionally so the vector still sums to one. The instance schema
 * requires exact PMFs, so the editor never leaves a half-edited vector
 * behind.
 */
export function renormalize(pmf: number[], index: number, value: number): number[] {
  const rest = pmf.reduce((acc, x, i) => (i === index ? acc : acc + x), 0);
  const scale = (1 - value) / rest;
  return pmf.map((x, i) => (i === index ? value : x * scale));
}
