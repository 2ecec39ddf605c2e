// One logical request slot per endpoint: starting a new request aborts the
// previous one, and a response only counts if no newer request has started
// since. Out-of-order arrivals therefore never reach the caller.

export class RequestChannel {
  private seq = 0;
  private controller: AbortController | null = null;

  /** Run `fn` as the latest request. Resolves to its value, or null when a
   * newer run superseded this one before it finished. Errors from a
   * superseded run (including its own AbortError) are swallowed; errors
   * from the still-latest run propagate. */
  async run<T>(fn: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const id = ++this.seq;
    try {
      const value = await fn(controller.signal);
      return id === this.seq ? value : null;
    } catch (err) {
      if (id !== this.seq) return null;
      throw err;
    } finally {
      if (id === this.seq) this.controller = null;
    }
  }

  /** Invalidate whatever is in flight without starting anything new. */
  cancel(): void {
    this.seq++;
    this.controller?.abort();
    this.controller = null;
  }

  get busy(): boolean {
    return this.controller !== null;
  }
}
