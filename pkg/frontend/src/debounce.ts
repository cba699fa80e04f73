export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  /** Run a pending invocation immediately (no-op when none is queued). */
  flush(): void;
}

/**
 * Trailing-edge debounce: the wrapped function runs `waitMs` after the last
 * call. Per-keystroke prediction requests are wasteful; 300 ms keeps the
 * panel live without flooding the service.
 */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 300,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;

  const debounced = (...args: A) => {
    pending = args;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      const args2 = pending as A;
      pending = null;
      fn(...args2);
    }, waitMs);
  };

  debounced.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
    pending = null;
  };

  debounced.flush = () => {
    if (timer === null) return;
    clearTimeout(timer);
    timer = null;
    const args = pending as A;
    pending = null;
    fn(...args);
  };

  return debounced;
}
