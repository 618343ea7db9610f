export interface LatestGate<T> {
  /**
   * Await `fired` and hand the value to `onValue` only if no newer call
   * has been issued in the meantime; superseded responses are dropped on
   * the floor. Rejections reach `onError` under the same rule.
   */
  run(fired: Promise<T>, onValue: (value: T) => void, onError?: (err: unknown) => void): Promise<void>;
  /** Forget all in-flight calls without issuing a new one. */
  invalidate(): void;
}

/**
 * Sequence-number guard for racing requests. The display must always
 * reflect the *last issued* request, not the last one to arrive, so each
 * run takes a ticket and checks it is still the newest after the await.
 */
export function latestGate<T>(): LatestGate<T> {
  let lastId = 0;
  return {
    async run(fired, onValue, onError) {
      lastId += 1;
      const thisId = lastId;
      try {
        const value = await fired;
        if (thisId === lastId) onValue(value);
      } catch (err) {
        if (thisId === lastId && onError) onError(err);
      }
    },
    invalidate() {
      lastId += 1;
    },
  };
}
