// Thin typed client over fetch. The fetch function is injected so the
// whole UI runs against mock fixtures with no live backend.

import type { MomentDetail, MomentPage, WhatIfEdit, WhatIfResult } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.url(path));
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as T;
  }

  listMoments(query: URLSearchParams): Promise<MomentPage> {
    return this.getJson<MomentPage>(`/moments?${query.toString()}`);
  }

  getMoment(id: string): Promise<MomentDetail> {
    return this.getJson<MomentDetail>(`/moments/${id}`);
  }

  momentImageUrl(id: string): string {
    return this.url(`/moments/${id}/image.png`);
  }

  async whatIf(id: string, edits: WhatIfEdit[]): Promise<WhatIfResult> {
    const response = await this.fetchFn(this.url(`/moments/${id}/whatif`), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ edits }),
    });
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as WhatIfResult;
  }

  kpiUrl(table: string, format: 'json' | 'csv' = 'json'): string {
    const [kind, name] = table.split('_', 2);
    const param = kind === 'players' ? `group=${name}` : `side=${name}`;
    return this.url(`/kpi/${kind}?${param}&format=${format}`);
  }

  async kpiTable<T>(table: string): Promise<T[]> {
    const response = await this.fetchFn(this.kpiUrl(table));
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as T[];
  }
}

const detailOf = async (response: Response): Promise<string> => {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
};
