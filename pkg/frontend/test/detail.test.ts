// Detail view geometry: marker overlay coincides with the renderer's
// pitch-to-pixel mapping, the hull outline mirrors the served
// vertices, and the keeper is visually distinguished.

import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { ExplorerApp } from '../src/app.js';
import { toPixel } from '../src/pitch.js';
import { FIXTURE_DETAIL, flush, mockServer } from './fixtures.js';

const IMAGE_SIZE = 224;

// independent copy of the renderer's documented mapping
const expectedPixel = (x: number, y: number): { row: number; col: number } => ({
  row: IMAGE_SIZE - 1 - Math.floor((x / 120) * (IMAGE_SIZE - 1) + 0.5),
  col: Math.floor((y / 80) * (IMAGE_SIZE - 1) + 0.5),
});

const openDetail = async () => {
  window.history.replaceState(null, '', `/?selected=${FIXTURE_DETAIL.moment_id}`);
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById('app') as HTMLElement;
  const app = new ExplorerApp(root, new ApiClient('', mockServer().fetch), window, {
    imageSize: IMAGE_SIZE,
  });
  await app.start();
  await flush();
  return root;
};

describe('detail overlay', () => {
  it('marker positions coincide with the voronoi seed pixels within 1px', async () => {
    const root = await openDetail();
    const markers = root.querySelectorAll<HTMLElement>('.marker');
    expect(markers.length).toBe(FIXTURE_DETAIL.all_players.length);
    markers.forEach((marker) => {
      const index = Number(marker.dataset.playerIndex);
      const [x, y] = FIXTURE_DETAIL.all_players[index].location;
      const expected = expectedPixel(x, y);
      const leftPx = (parseFloat(marker.style.left) / 100) * IMAGE_SIZE - 0.5;
      const topPx = (parseFloat(marker.style.top) / 100) * IMAGE_SIZE - 0.5;
      expect(Math.abs(leftPx - expected.col)).toBeLessThanOrEqual(1);
      expect(Math.abs(topPx - expected.row)).toBeLessThanOrEqual(1);
    });
  });

  it('library mapping agrees with the documented formula', () => {
    for (const [x, y] of [[0, 0], [120, 80], [61.5, 38.25], [40, 5], [90, 75]] as const) {
      const got = toPixel(x, y, IMAGE_SIZE, IMAGE_SIZE);
      expect(got).toEqual(expectedPixel(x, y));
    }
  });

  it('hull outline matches the served hull vertices', async () => {
    const root = await openDetail();
    const points = root.querySelector('.hull-outline')!.getAttribute('points')!;
    const expected = FIXTURE_DETAIL.hull
      .map(([x, y]) => {
        const { row, col } = toPixel(x, y, IMAGE_SIZE, IMAGE_SIZE);
        return `${col},${row}`;
      })
      .join(' ');
    expect(points).toBe(expected);
  });

  it('keeper marker carries a distinguishing class', async () => {
    const root = await openDetail();
    const keeperIndex = FIXTURE_DETAIL.all_players.findIndex((p) => p.keeper);
    const marker = root.querySelector<HTMLElement>(`[data-player-index="${keeperIndex}"]`)!;
    expect(marker.className).toContain('keeper');
    expect(root.querySelectorAll('.marker.passer').length).toBe(1);
  });

  it('original probability is labeled and shown from the served payload', async () => {
    const root = await openDetail();
    expect(root.querySelector('.prob-original')!.textContent).toBe('original: 73.4%');
  });
});
