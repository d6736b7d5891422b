// API payload types, mirroring the service's snake_case JSON exactly.

export interface MomentSummary {
  moment_id: string;
  match_id: string;
  team_id: string;
  player_id: string;
  label: 'penetrative' | 'non_penetrative';
  probability: number | null;
  hull_area: number;
  origin: [number, number];
  under_pressure: boolean;
  period: number;
  minute: number;
  second: number;
}

export interface MomentPage {
  items: MomentSummary[];
  total: number;
  offset: number;
  limit: number;
}

export interface FramePlayer {
  location: [number, number];
  teammate: boolean;
  actor: boolean;
  keeper: boolean;
}

export interface MomentDetail extends MomentSummary {
  hull: [number, number][];
  visible_area: [number, number][] | null;
  all_players: FramePlayer[];
  receivers_inside: [number, number][];
  label_basis: { outcome: string; end_location: [number, number] | null; end_in_hull: boolean };
}

export interface WhatIfEdit {
  player: number;
  x: number;
  y: number;
}

export interface WhatIfResult {
  still_p3: boolean;
  rejection_reason: string | null;
  probability: number | null;
  original_probability: number | null;
  hull: [number, number][] | null;
  image_ref: string | null;
}

export interface KpiPlayerRow {
  player_id: string;
  name: string;
  team_id: string;
  group: string;
  minutes: number;
  potential: number;
  penetrative: number;
  p3_percentage: number;
}

export interface KpiTeamRow {
  team_id: string;
  side: 'attack' | 'defense';
  potential?: number;
  penetrative?: number;
  p3_percentage?: number;
  matches_played?: number;
  opponent_potential_per_match?: number;
}
