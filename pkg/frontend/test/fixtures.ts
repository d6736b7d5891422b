// Mock-server fixtures: a fetch implementation backed by canned data,
// so every view renders with no live backend.

import type { FetchLike } from '../src/api.js';
import type { MomentDetail, MomentSummary, WhatIfResult } from '../src/types.js';

export const FIXTURE_MOMENTS: MomentSummary[] = [
  {
    moment_id: 'aaa111', match_id: 'SYN0000', team_id: 'TEAM00', player_id: 'TEAM00-p05',
    label: 'penetrative', probability: 0.7341, hull_area: 512.25, origin: [61.5, 38.25],
    under_pressure: true, period: 1, minute: 12, second: 30,
  },
  {
    moment_id: 'bbb222', match_id: 'SYN0000', team_id: 'TEAM03', player_id: 'TEAM03-p07',
    label: 'non_penetrative', probability: 0.2105, hull_area: 64.5, origin: [55.0, 47.0],
    under_pressure: false, period: 1, minute: 33, second: 5,
  },
  {
    moment_id: 'ccc333', match_id: 'SYN0001', team_id: 'TEAM01', player_id: 'TEAM01-p02',
    label: 'penetrative', probability: 0.5012, hull_area: 300.0, origin: [72.0, 20.0],
    under_pressure: false, period: 2, minute: 61, second: 48,
  },
];

export const FIXTURE_DETAIL: MomentDetail = {
  ...FIXTURE_MOMENTS[0],
  hull: [[70, 25], [70, 52], [88, 25], [88, 52]],
  visible_area: [[40, 0], [120, 0], [120, 80], [40, 80]],
  all_players: [
    { location: [61.5, 38.25], teammate: true, actor: true, keeper: false },
    { location: [79.0, 38.5], teammate: true, actor: false, keeper: false },
    { location: [50.0, 30.0], teammate: true, actor: false, keeper: false },
    { location: [70.0, 25.0], teammate: false, actor: false, keeper: false },
    { location: [70.0, 52.0], teammate: false, actor: false, keeper: false },
    { location: [88.0, 25.0], teammate: false, actor: false, keeper: false },
    { location: [88.0, 52.0], teammate: false, actor: false, keeper: false },
    { location: [112.0, 40.0], teammate: false, actor: false, keeper: true },
  ],
  receivers_inside: [[79.0, 38.5]],
  label_basis: { outcome: 'complete', end_location: [79.0, 38.5], end_in_hull: true },
};

export const FIXTURE_WHATIF: WhatIfResult = {
  still_p3: true,
  rejection_reason: null,
  probability: 0.8125,
  original_probability: 0.7341,
  hull: FIXTURE_DETAIL.hull,
  image_ref: '/api/v1/whatif/deadbeef/image.png',
};

export const FIXTURE_KPI_TEAMS = [
  { team_id: 'TEAM00', side: 'attack', potential: 120, penetrative: 40, p3_percentage: 1 / 3 },
  { team_id: 'TEAM01', side: 'attack', potential: 90, penetrative: 18, p3_percentage: 0.2 },
];

const json = (body: unknown, status = 200): Response =>
  new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });

export interface MockServer {
  fetch: FetchLike;
  calls: { url: string; init?: RequestInit }[];
  whatifCalls: { momentId: string; body: { edits: unknown[] } }[];
  /** Override the what-if responder, e.g. to defer resolution. */
  whatifHandler: (momentId: string, body: { edits: unknown[] }) => Promise<Response>;
}

export const mockServer = (): MockServer => {
  const server: MockServer = {
    calls: [],
    whatifCalls: [],
    whatifHandler: async () => json(FIXTURE_WHATIF),
    fetch: async (url: string, init?: RequestInit): Promise<Response> => {
      server.calls.push({ url, init });
      const parsed = new URL(url, 'http://fixture');
      const path = parsed.pathname;
      const whatif = path.match(/^\/api\/v1\/moments\/([^/]+)\/whatif$/);
      if (whatif && init?.method === 'POST') {
        const body = JSON.parse(String(init.body)) as { edits: unknown[] };
        server.whatifCalls.push({ momentId: whatif[1], body });
        return server.whatifHandler(whatif[1], body);
      }
      if (path === '/api/v1/moments') {
        let items = FIXTURE_MOMENTS;
        const label = parsed.searchParams.get('label');
        if (label) items = items.filter((m) => m.label === label);
        const match = parsed.searchParams.get('match');
        if (match) items = items.filter((m) => m.match_id === match);
        const offset = Number(parsed.searchParams.get('offset') ?? 0);
        const limit = Number(parsed.searchParams.get('limit') ?? 24);
        return json({
          items: items.slice(offset, offset + limit),
          total: items.length,
          offset,
          limit,
        });
      }
      const detail = path.match(/^\/api\/v1\/moments\/([^/]+)$/);
      if (detail) {
        if (detail[1] !== FIXTURE_DETAIL.moment_id) return json({ detail: 'unknown moment' }, 404);
        return json(FIXTURE_DETAIL);
      }
      if (path.endsWith('/image.png')) {
        return new Response(new Uint8Array([0x89, 0x50, 0x4e, 0x47]), {
          status: 200,
          headers: { 'content-type': 'image/png' },
        });
      }
      if (path === '/api/v1/kpi/teams') return json(FIXTURE_KPI_TEAMS);
      if (path === '/api/v1/kpi/players') return json([]);
      return json({ detail: `no fixture for ${path}` }, 404);
    },
  };
  return server;
};

export const flush = async (): Promise<void> => {
  // drain pending microtasks (fetch promise chains)
  for (let i = 0; i < 10; i += 1) {
    await Promise.resolve();
  }
};
