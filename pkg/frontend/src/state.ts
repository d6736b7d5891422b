// Explorer state and its URL-query codec. The URL is the single source
// of truth for the view, so any address is shareable and back/forward
// restores the exact prior state.

export interface Filters {
  label?: 'penetrative' | 'non_penetrative';
  team?: string;
  player?: string;
  match?: string;
  prob_min?: number;
  prob_max?: number;
  zone_min?: number;
  zone_max?: number;
  under_pressure?: boolean;
}

export type View = 'gallery' | 'detail' | 'kpi';

export interface ExplorerState {
  view: View;
  filters: Filters;
  offset: number;
  limit: number;
  selected: string | null;
  kpiTable: string; // players_defender | players_midfielder | players_u23 | teams_attack | teams_defense
}

export const DEFAULT_LIMIT = 24;

export const initialState = (): ExplorerState => ({
  view: 'gallery',
  filters: {},
  offset: 0,
  limit: DEFAULT_LIMIT,
  selected: null,
  kpiTable: 'teams_attack',
});

const FILTER_KEYS: (keyof Filters)[] = [
  'label', 'team', 'player', 'match', 'prob_min', 'prob_max', 'zone_min', 'zone_max',
  'under_pressure',
];

/** Encode only non-default fields, so clean URLs stay clean. */
export const encodeState = (state: ExplorerState): URLSearchParams => {
  const params = new URLSearchParams();
  if (state.view !== 'gallery') params.set('view', state.view);
  for (const key of FILTER_KEYS) {
    const value = state.filters[key];
    if (value !== undefined) params.set(key, String(value));
  }
  if (state.offset > 0) params.set('offset', String(state.offset));
  if (state.limit !== DEFAULT_LIMIT) params.set('limit', String(state.limit));
  if (state.selected) params.set('selected', state.selected);
  if (state.view === 'kpi' && state.kpiTable !== 'teams_attack') {
    params.set('table', state.kpiTable);
  }
  return params;
};

const num = (raw: string | null): number | undefined => {
  if (raw === null || raw === '') return undefined;
  const value = Number(raw);
  return Number.isFinite(value) ? value : undefined;
};

export const decodeState = (params: URLSearchParams): ExplorerState => {
  const state = initialState();
  const view = params.get('view');
  if (view === 'detail' || view === 'kpi') state.view = view;
  const label = params.get('label');
  if (label === 'penetrative' || label === 'non_penetrative') state.filters.label = label;
  for (const key of ['team', 'player', 'match'] as const) {
    const value = params.get(key);
    if (value) state.filters[key] = value;
  }
  for (const key of ['prob_min', 'prob_max', 'zone_min', 'zone_max'] as const) {
    const value = num(params.get(key));
    if (value !== undefined) state.filters[key] = value;
  }
  const pressure = params.get('under_pressure');
  if (pressure === 'true') state.filters.under_pressure = true;
  if (pressure === 'false') state.filters.under_pressure = false;
  state.offset = num(params.get('offset')) ?? 0;
  state.limit = num(params.get('limit')) ?? DEFAULT_LIMIT;
  state.selected = params.get('selected');
  state.kpiTable = params.get('table') ?? 'teams_attack';
  if (state.selected && params.get('view') === null) state.view = 'detail';
  return state;
};

/** Query string for GET /api/v1/moments (filters + paging only). */
export const momentsQuery = (state: ExplorerState): URLSearchParams => {
  const params = new URLSearchParams();
  for (const key of FILTER_KEYS) {
    const value = state.filters[key];
    if (value !== undefined) params.set(key, String(value));
  }
  params.set('offset', String(state.offset));
  params.set('limit', String(state.limit));
  return params;
};
