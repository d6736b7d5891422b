// Application wiring: URL-driven state, view rendering, error banner.
// The URL is pushed on every user action and decoded on popstate, so
// back/forward and shared links restore the exact view.

import { ApiClient } from './api.js';
import { DetailView } from './detail.js';
import { renderFilterPanel, renderGallery, type GalleryCallbacks } from './gallery.js';
import { renderKpi, type KpiCallbacks } from './kpi.js';
import {
  decodeState,
  encodeState,
  initialState,
  momentsQuery,
  type ExplorerState,
  type Filters,
} from './state.js';
import { WhatIfController, type WhatIfOutcome } from './whatif.js';

export interface AppOptions {
  imageSize?: number;
}

export class ExplorerApp {
  state: ExplorerState = initialState();
  readonly whatif: WhatIfController;
  readonly detail: DetailView;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private win: Window,
    options: AppOptions = {},
  ) {
    this.whatif = new WhatIfController(api, (momentId, outcome) =>
      this.onWhatIfOutcome(momentId, outcome),
    );
    this.detail = new DetailView(
      api,
      this.whatif,
      { onBack: () => this.navigate({ ...this.state, view: 'gallery', selected: null }) },
      options.imageSize ?? 224,
    );
    this.win.addEventListener('popstate', () => {
      this.state = decodeState(new URLSearchParams(this.win.location.search));
      void this.renderCurrent();
    });
  }

  start(): Promise<void> {
    this.state = decodeState(new URLSearchParams(this.win.location.search));
    return this.renderCurrent();
  }

  /** Push the new state into the URL, then render it. */
  navigate(next: ExplorerState): Promise<void> {
    this.state = next;
    const query = encodeState(next).toString();
    this.win.history.pushState(null, '', query ? `?${query}` : this.win.location.pathname);
    return this.renderCurrent();
  }

  private galleryCallbacks(): GalleryCallbacks {
    return {
      onApplyFilters: (filters: Filters) =>
        void this.navigate({ ...this.state, filters, offset: 0, view: 'gallery', selected: null }),
      onClearFilters: () =>
        void this.navigate({ ...this.state, filters: {}, offset: 0, view: 'gallery', selected: null }),
      onSelect: (momentId: string) =>
        void this.navigate({ ...this.state, view: 'detail', selected: momentId }),
      onPage: (offset: number) => void this.navigate({ ...this.state, offset }),
    };
  }

  private async renderCurrent(): Promise<void> {
    this.root.replaceChildren();
    const doc = this.root.ownerDocument;
    const nav = doc.createElement('nav');
    for (const [label, view] of [['Moments', 'gallery'], ['KPI tables', 'kpi']] as const) {
      const button = doc.createElement('button');
      button.textContent = label;
      button.className = this.state.view === view ? 'active' : '';
      button.addEventListener('click', () =>
        void this.navigate({ ...this.state, view, selected: null }),
      );
      nav.appendChild(button);
    }
    this.root.appendChild(nav);
    const main = doc.createElement('main');
    this.root.appendChild(main);
    try {
      if (this.state.view === 'kpi') {
        const rows = await this.api.kpiTable<Record<string, string | number | null>>(
          this.state.kpiTable,
        );
        renderKpi(main, this.api, this.state.kpiTable, rows, this.kpiCallbacks());
      } else if (this.state.view === 'detail' && this.state.selected) {
        const moment = await this.api.getMoment(this.state.selected);
        this.detail.render(main, moment);
      } else {
        renderFilterPanel(main, this.state.filters, this.galleryCallbacks());
        const page = await this.api.listMoments(momentsQuery(this.state));
        renderGallery(main, this.api, page, this.galleryCallbacks());
      }
    } catch (err) {
      this.showError(main, err instanceof Error ? err.message : String(err));
    }
  }

  private kpiCallbacks(): KpiCallbacks {
    return {
      onSelectTable: (table: string) => void this.navigate({ ...this.state, kpiTable: table }),
    };
  }

  /** Visible error banner with a retry control; never a silent failure. */
  private showError(main: HTMLElement, message: string): void {
    const doc = main.ownerDocument;
    const banner = doc.createElement('div');
    banner.className = 'error-banner';
    banner.textContent = `Service error: ${message} `;
    const retry = doc.createElement('button');
    retry.className = 'retry';
    retry.textContent = 'Retry';
    retry.addEventListener('click', () => void this.renderCurrent());
    banner.appendChild(retry);
    main.appendChild(banner);
  }

  private onWhatIfOutcome(momentId: string, outcome: WhatIfOutcome): void {
    this.detail.showOutcome(momentId, outcome);
  }
}
