// What-if lifecycle: exactly one request per drag-release, fixture
// probability rendered, stale (superseded) responses never displayed,
// and the 4-per-second rate limit.

import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { ExplorerApp } from '../src/app.js';
import { WhatIfController, MIN_INTERVAL_MS } from '../src/whatif.js';
import type { WhatIfResult } from '../src/types.js';
import { FIXTURE_DETAIL, FIXTURE_WHATIF, flush, mockServer } from './fixtures.js';

const openDetail = async (server = mockServer()) => {
  window.history.replaceState(null, '', `/?selected=${FIXTURE_DETAIL.moment_id}`);
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById('app') as HTMLElement;
  const app = new ExplorerApp(root, new ApiClient('', server.fetch), window, { imageSize: 224 });
  await app.start();
  await flush();
  expect(root.querySelector('.pitch-wrap')).not.toBeNull();
  return { server, root, app };
};

const drag = (
  root: HTMLElement, playerIndex: number, clientX: number, clientY: number,
): void => {
  const marker = root.querySelector<HTMLElement>(`[data-player-index="${playerIndex}"]`)!;
  marker.dispatchEvent(new MouseEvent('mousedown', { bubbles: true }));
  document.dispatchEvent(new MouseEvent('mousemove', { bubbles: true, clientX, clientY }));
  document.dispatchEvent(new MouseEvent('mouseup', { bubbles: true, clientX, clientY }));
};

describe('what-if over the mock server', () => {
  beforeEach(() => {
    window.history.replaceState(null, '', '/');
  });

  it('drag-release fires exactly one request and renders the fixture probability', async () => {
    const { server, root } = await openDetail();
    drag(root, 1, 120, 110);
    await flush();
    expect(server.whatifCalls.length).toBe(1);
    expect(server.whatifCalls[0].momentId).toBe(FIXTURE_DETAIL.moment_id);
    expect(server.whatifCalls[0].body.edits.length).toBe(1);
    const shown = root.querySelector('.prob-whatif')!.textContent!;
    expect(shown).toContain('81.3%'); // fixture 0.8125 rendered
    expect(shown).toContain('Δ');
  });

  it('two sequential drags accumulate both edits in one request', async () => {
    const { server, root } = await openDetail();
    drag(root, 1, 120, 110);
    await flush();
    await new Promise((resolve) => setTimeout(resolve, MIN_INTERVAL_MS + 20));
    drag(root, 3, 60, 60);
    await flush();
    const last = server.whatifCalls.at(-1)!;
    expect(last.body.edits.length).toBe(2);
    const players = last.body.edits.map((e) => (e as { player: number }).player).sort();
    expect(players).toEqual([1, 3]);
  });

  it('a rejection greys the probability and shows the reason', async () => {
    const { server, root } = await openDetail();
    server.whatifHandler = async () =>
      new Response(
        JSON.stringify({
          still_p3: false, rejection_reason: 'no receiver inside hull',
          probability: null, original_probability: 0.7341, hull: null, image_ref: null,
        }),
        { status: 200, headers: { 'content-type': 'application/json' } },
      );
    drag(root, 1, 30, 200);
    await flush();
    const current = root.querySelector('.prob-whatif')!;
    expect(current.className).toContain('greyed');
    expect(root.querySelector('.rejection')!.textContent).toContain('no receiver inside hull');
  });

  it('a 422 shows an inline validation message', async () => {
    const { server, root } = await openDetail();
    server.whatifHandler = async () =>
      new Response(JSON.stringify({ detail: 'coordinates out of pitch bounds' }), {
        status: 422, headers: { 'content-type': 'application/json' },
      });
    drag(root, 1, 10, 10);
    await flush();
    expect(root.querySelector('.validation-error')!.textContent).toContain('out of pitch bounds');
  });

  it('reset restores the original markers and probability text', async () => {
    const { root, app } = await openDetail();
    drag(root, 1, 150, 150);
    await flush();
    expect(app.detail.pendingEditCount()).toBe(1);
    root.querySelector<HTMLButtonElement>('.reset')!.click();
    expect(app.detail.pendingEditCount()).toBe(0);
    const marker = root.querySelector<HTMLElement>('[data-player-index="1"]')!;
    expect(Number(marker.dataset.pitchX)).toBeCloseTo(79.0, 6);
    expect(Number(marker.dataset.pitchY)).toBeCloseTo(38.5, 6);
    expect(root.querySelector('.prob-whatif')!.textContent).toContain('drag a player');
  });
});

describe('request lifecycle (controller level)', () => {
  it('stale responses superseded by a newer request are never delivered', async () => {
    const resolvers: ((r: WhatIfResult) => void)[] = [];
    const api = {
      whatIf: () =>
        new Promise<WhatIfResult>((resolve) => {
          resolvers.push(resolve);
        }),
    } as unknown as ApiClient;
    const outcomes: number[] = [];
    let t = 0;
    const controller = new WhatIfController(
      api,
      (_moment, outcome) => outcomes.push(outcome.requestId),
      () => (t += 1000),
    );
    const first = controller.submit('m1', [{ player: 1, x: 10, y: 10 }]);
    const second = controller.submit('m1', [{ player: 1, x: 20, y: 20 }]);
    expect(resolvers.length).toBe(2);
    // the newer request resolves first and is displayed
    resolvers[1]({ ...FIXTURE_WHATIF, probability: 0.9 });
    await flush();
    expect(outcomes).toEqual([second]);
    // the stale response arrives late and is dropped
    resolvers[0]({ ...FIXTURE_WHATIF, probability: 0.1 });
    await flush();
    expect(outcomes).toEqual([second]);
    expect(outcomes).not.toContain(first);
  });

  it('rate-limits to at most 4 posts per second, keeping only the latest', async () => {
    vi.useFakeTimers();
    try {
      const sent: { player: number; x: number; y: number }[][] = [];
      const api = {
        whatIf: (_id: string, edits: { player: number; x: number; y: number }[]) => {
          sent.push(edits);
          return Promise.resolve(FIXTURE_WHATIF);
        },
      } as unknown as ApiClient;
      const controller = new WhatIfController(api, () => undefined);
      controller.submit('m1', [{ player: 1, x: 1, y: 1 }]);
      controller.submit('m1', [{ player: 1, x: 2, y: 2 }]);
      controller.submit('m1', [{ player: 1, x: 3, y: 3 }]);
      expect(sent.length).toBe(1); // burst collapsed to the first + queued latest
      vi.advanceTimersByTime(MIN_INTERVAL_MS + 5);
      expect(sent.length).toBe(2);
      expect(sent[1][0].x).toBe(3); // the queued send carries the latest edits
    } finally {
      vi.useRealTimers();
    }
  });
});
