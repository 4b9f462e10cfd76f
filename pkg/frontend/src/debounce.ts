/** Hover debouncing with latest-wins resolution.
 *
 * Dragging across several posts fires schedule() repeatedly; only the last
 * target's request runs after the delay, and a stale response (the user
 * moved on while it was in flight) is dropped rather than applied.
 */

export interface TimerHandle {
  cancel(): void;
}

export type Scheduler = (fn: () => void, delayMs: number) => TimerHandle;

export const realScheduler: Scheduler = (fn, delayMs) => {
  const id = setTimeout(fn, delayMs);
  return { cancel: () => clearTimeout(id) };
};

export const HOVER_DEBOUNCE_MS = 250;

export class HoverDebouncer<T> {
  private pending: TimerHandle | null = null;
  private generation = 0;

  constructor(
    private readonly run: (target: string) => Promise<T>,
    private readonly apply: (target: string, result: T) => void,
    private readonly onError: (target: string, error: unknown) => void = () => {},
    private readonly delayMs: number = HOVER_DEBOUNCE_MS,
    private readonly scheduler: Scheduler = realScheduler,
  ) {}

  /** Schedule analysis of a hover target, superseding any pending one. */
  schedule(target: string): void {
    this.pending?.cancel();
    const generation = ++this.generation;
    this.pending = this.scheduler(() => {
      this.pending = null;
      this.run(target).then(
        (result) => {
          if (generation === this.generation) this.apply(target, result);
        },
        (error) => {
          if (generation === this.generation) this.onError(target, error);
        },
      );
    }, this.delayMs);
  }

  /** Drop whatever is pending or in flight (drag ended, page changed). */
  cancel(): void {
    this.pending?.cancel();
    this.pending = null;
    this.generation++;
  }
}
