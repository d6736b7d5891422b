// What-if request lifecycle: at most one displayed result per moment,
// later drags supersede earlier ones, stale responses are discarded by
// request id, and posts are rate-limited to at most 4 per second.

import type { ApiClient } from './api.js';
import type { WhatIfEdit, WhatIfResult } from './types.js';

export const MIN_INTERVAL_MS = 250;

export interface WhatIfOutcome {
  requestId: number;
  result: WhatIfResult | null;
  error: string | null;
}

export class WhatIfController {
  private counter = 0;
  private latestByMoment = new Map<string, number>();
  private lastSentAt = -Infinity;
  private pendingTimer: ReturnType<typeof setTimeout> | null = null;
  private pendingSend: (() => void) | null = null;
  /** Count of HTTP posts actually fired (exposed for tests/debugging). */
  requestsSent = 0;

  constructor(
    private api: ApiClient,
    private onOutcome: (momentId: string, outcome: WhatIfOutcome) => void,
    private now: () => number = () => Date.now(),
  ) {}

  /** Submit the full accumulated edit list for a moment (drag-release). */
  submit(momentId: string, edits: WhatIfEdit[]): number {
    const requestId = ++this.counter;
    this.latestByMoment.set(momentId, requestId);
    const send = () => {
      this.lastSentAt = this.now();
      this.requestsSent += 1;
      this.api
        .whatIf(momentId, edits)
        .then((result) => this.deliver(momentId, requestId, result, null))
        .catch((err: Error) => this.deliver(momentId, requestId, null, err.message));
    };
    const wait = this.lastSentAt + MIN_INTERVAL_MS - this.now();
    if (wait <= 0) {
      this.flushTimer();
      send();
    } else {
      // rate limit: queue the latest submission only; earlier queued
      // sends are superseded before they ever hit the network
      this.pendingSend = send;
      if (this.pendingTimer === null) {
        this.pendingTimer = setTimeout(() => {
          this.pendingTimer = null;
          const queued = this.pendingSend;
          this.pendingSend = null;
          queued?.();
        }, wait);
      }
    }
    return requestId;
  }

  private flushTimer(): void {
    if (this.pendingTimer !== null) {
      clearTimeout(this.pendingTimer);
      this.pendingTimer = null;
      this.pendingSend = null;
    }
  }

  private deliver(
    momentId: string, requestId: number, result: WhatIfResult | null, error: string | null,
  ): void {
    if (this.latestByMoment.get(momentId) !== requestId) {
      return; // superseded: a newer drag owns the display
    }
    this.onOutcome(momentId, { requestId, result, error });
  }

  /** Drop any queued submission (moment changed or reset pressed). */
  cancelPending(momentId: string): void {
    this.flushTimer();
    this.latestByMoment.set(momentId, ++this.counter);
  }
}
