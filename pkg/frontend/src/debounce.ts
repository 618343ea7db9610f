export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  /** Drop the armed call, if any. */
  cancel(): void;
  /** True while a call is armed but has not fired yet. */
  pending(): boolean;
}

/**
 * Trailing-edge debounce: each call re-arms the timer, only the last
 * arguments win. Solves are cheap but slider drags arrive in bursts, and
 * bursts should not queue.
 */
export function debounce<A extends unknown[]>(fn: (...args: A) => void, delayMs: number): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const run = (...args: A) => {
    clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, delayMs);
  };
  run.cancel = () => {
    clearTimeout(timer);
    timer = undefined;
  };
  run.pending = () => timer !== undefined;
  return run;
}
