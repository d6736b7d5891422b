// KPI tables: selectable table, client-side sorting, CSV download link
// proxied from the service.

import type { ApiClient } from './api.js';

export const KPI_TABLES = [
  'players_defender',
  'players_midfielder',
  'players_u23',
  'teams_attack',
  'teams_defense',
] as const;

export interface KpiCallbacks {
  onSelectTable: (table: string) => void;
}

type Row = Record<string, string | number | null>;

export const renderKpi = (
  container: HTMLElement,
  api: ApiClient,
  table: string,
  rows: Row[],
  callbacks: KpiCallbacks,
  sortKey: string | null = null,
  descending = true,
): void => {
  const doc = container.ownerDocument;
  const bar = doc.createElement('div');
  bar.className = 'kpi-bar';
  const select = doc.createElement('select');
  select.className = 'kpi-table-select';
  for (const name of KPI_TABLES) {
    const option = doc.createElement('option');
    option.value = name;
    option.textContent = name.replace('_', ': ');
    option.selected = name === table;
    select.appendChild(option);
  }
  select.addEventListener('change', () => callbacks.onSelectTable(select.value));
  bar.appendChild(select);

  const csv = doc.createElement('a');
  csv.className = 'csv-link';
  csv.href = api.kpiUrl(table, 'csv');
  csv.textContent = 'Download CSV';
  csv.setAttribute('download', `${table}.csv`);
  bar.appendChild(csv);
  container.appendChild(bar);

  if (rows.length === 0) {
    const empty = doc.createElement('p');
    empty.textContent = 'No rows (run the kpi pipeline stage, or relax filters).';
    container.appendChild(empty);
    return;
  }

  const columns = Object.keys(rows[0]);
  const sorted = [...rows];
  if (sortKey !== null) {
    sorted.sort((a, b) => {
      const av = a[sortKey] ?? '';
      const bv = b[sortKey] ?? '';
      const cmp = typeof av === 'number' && typeof bv === 'number'
        ? av - bv
        : String(av).localeCompare(String(bv));
      return descending ? -cmp : cmp;
    });
  }

  const tableEl = doc.createElement('table');
  tableEl.className = 'kpi-table';
  const head = doc.createElement('tr');
  for (const column of columns) {
    const th = doc.createElement('th');
    th.textContent = column + (column === sortKey ? (descending ? ' ↓' : ' ↑') : '');
    th.dataset.column = column;
    th.addEventListener('click', () => {
      const flip = column === sortKey ? !descending : true;
      container.replaceChildren();
      renderKpi(container, api, table, rows, callbacks, column, flip);
    });
    head.appendChild(th);
  }
  tableEl.appendChild(head);
  for (const row of sorted) {
    const tr = doc.createElement('tr');
    for (const column of columns) {
      const td = doc.createElement('td');
      const value = row[column];
      td.textContent =
        typeof value === 'number' && !Number.isInteger(value) ? value.toFixed(4) : String(value ?? '');
      tr.appendChild(td);
    }
    tableEl.appendChild(tr);
  }
  container.appendChild(tableEl);
};
