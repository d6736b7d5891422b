// Filterable moment gallery: filter panel, thumbnail grid, paging.

import type { ApiClient } from './api.js';
import type { MomentPage } from './types.js';
import type { Filters } from './state.js';

export interface GalleryCallbacks {
  onApplyFilters: (filters: Filters) => void;
  onClearFilters: () => void;
  onSelect: (momentId: string) => void;
  onPage: (offset: number) => void;
}

const FILTER_FIELDS: { key: keyof Filters; label: string; kind: 'text' | 'number' | 'select' }[] = [
  { key: 'label', label: 'label', kind: 'select' },
  { key: 'team', label: 'team', kind: 'text' },
  { key: 'player', label: 'player', kind: 'text' },
  { key: 'match', label: 'match', kind: 'text' },
  { key: 'prob_min', label: 'prob ≥', kind: 'number' },
  { key: 'prob_max', label: 'prob ≤', kind: 'number' },
  { key: 'zone_min', label: 'zone x ≥', kind: 'number' },
  { key: 'zone_max', label: 'zone x ≤', kind: 'number' },
  { key: 'under_pressure', label: 'pressure', kind: 'select' },
];

const SELECT_OPTIONS: Record<string, string[]> = {
  label: ['', 'penetrative', 'non_penetrative'],
  under_pressure: ['', 'true', 'false'],
};

export const formatProbability = (value: number | null): string =>
  value === null ? 'n/a' : `${(value * 100).toFixed(1)}%`;

export const renderFilterPanel = (
  container: HTMLElement, filters: Filters, callbacks: GalleryCallbacks,
): void => {
  const panel = container.ownerDocument.createElement('form');
  panel.className = 'filter-panel';
  panel.addEventListener('submit', (ev) => ev.preventDefault());
  for (const field of FILTER_FIELDS) {
    const wrap = container.ownerDocument.createElement('label');
    wrap.textContent = field.label;
    let input: HTMLInputElement | HTMLSelectElement;
    if (field.kind === 'select') {
      input = container.ownerDocument.createElement('select');
      for (const option of SELECT_OPTIONS[field.key as string]) {
        const el = container.ownerDocument.createElement('option');
        el.value = option;
        el.textContent = option || 'any';
        input.appendChild(el);
      }
    } else {
      input = container.ownerDocument.createElement('input');
      input.type = field.kind;
      if (field.kind === 'number') input.step = 'any';
    }
    input.name = field.key;
    const current = filters[field.key];
    if (current !== undefined) input.value = String(current);
    wrap.appendChild(input);
    panel.appendChild(wrap);
  }
  const apply = container.ownerDocument.createElement('button');
  apply.type = 'submit';
  apply.className = 'apply-filters';
  apply.textContent = 'Apply';
  apply.addEventListener('click', () => callbacks.onApplyFilters(readFilters(panel)));
  panel.appendChild(apply);
  const clear = container.ownerDocument.createElement('button');
  clear.type = 'button';
  clear.className = 'clear-filters';
  clear.textContent = 'Clear';
  clear.addEventListener('click', () => callbacks.onClearFilters());
  panel.appendChild(clear);
  container.appendChild(panel);
};

export const readFilters = (panel: HTMLElement): Filters => {
  const filters: Filters = {};
  const fields = panel.querySelectorAll<HTMLInputElement | HTMLSelectElement>('input, select');
  fields.forEach((input) => {
    const raw = input.value.trim();
    if (raw === '') return;
    const key = input.name as keyof Filters;
    if (key === 'prob_min' || key === 'prob_max' || key === 'zone_min' || key === 'zone_max') {
      const value = Number(raw);
      if (Number.isFinite(value)) filters[key] = value;
    } else if (key === 'under_pressure') {
      filters.under_pressure = raw === 'true';
    } else if (key === 'label') {
      if (raw === 'penetrative' || raw === 'non_penetrative') filters.label = raw;
    } else {
      filters[key] = raw;
    }
  });
  return filters;
};

export const renderGallery = (
  container: HTMLElement, api: ApiClient, page: MomentPage, callbacks: GalleryCallbacks,
): void => {
  const doc = container.ownerDocument;
  const total = doc.createElement('div');
  total.className = 'gallery-total';
  total.textContent = `${page.total} moments`;
  container.appendChild(total);

  const grid = doc.createElement('div');
  grid.className = 'gallery-grid';
  for (const item of page.items) {
    const card = doc.createElement('div');
    card.className = `card ${item.label}`;
    card.dataset.momentId = item.moment_id;
    const img = doc.createElement('img');
    img.src = api.momentImageUrl(item.moment_id);
    img.alt = `moment ${item.moment_id}`;
    img.loading = 'lazy';
    card.appendChild(img);
    const caption = doc.createElement('div');
    caption.className = 'caption';
    caption.textContent =
      `${formatProbability(item.probability)} · ${item.label === 'penetrative' ? 'pen' : 'non'}` +
      ` · ${item.match_id} ${item.minute}'`;
    card.appendChild(caption);
    card.addEventListener('click', () => callbacks.onSelect(item.moment_id));
    grid.appendChild(card);
  }
  container.appendChild(grid);

  const pager = doc.createElement('div');
  pager.className = 'pager';
  const prev = doc.createElement('button');
  prev.textContent = '← prev';
  prev.disabled = page.offset === 0;
  prev.addEventListener('click', () => callbacks.onPage(Math.max(page.offset - page.limit, 0)));
  const next = doc.createElement('button');
  next.textContent = 'next →';
  next.disabled = page.offset + page.limit >= page.total;
  next.addEventListener('click', () => callbacks.onPage(page.offset + page.limit));
  const label = doc.createElement('span');
  const last = Math.min(page.offset + page.limit, page.total);
  label.textContent = page.total ? `${page.offset + 1}-${last} of ${page.total}` : 'empty';
  pager.append(prev, label, next);
  container.appendChild(pager);
};
