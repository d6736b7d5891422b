// Moment detail view: the served pitch-control PNG as the authoritative
// underlay, a vector overlay of hull and draggable player markers on
// top, and the what-if probability panel. All numbers shown come from
// service responses; the overlay only displays coordinates it was given.

import type { ApiClient } from './api.js';
import { formatProbability } from './gallery.js';
import { clampToPitch, fromPixel, toPixel } from './pitch.js';
import type { MomentDetail, WhatIfEdit } from './types.js';
import type { WhatIfController, WhatIfOutcome } from './whatif.js';

export interface DetailCallbacks {
  onBack: () => void;
}

export class DetailView {
  /** Accumulated edits for the open moment, by player index. */
  private edits = new Map<number, { x: number; y: number }>();
  private moment: MomentDetail | null = null;
  private root: HTMLElement | null = null;
  private imageSize: number;

  constructor(
    private api: ApiClient,
    private whatif: WhatIfController,
    private callbacks: DetailCallbacks,
    imageSize = 224,
  ) {
    this.imageSize = imageSize;
  }

  render(container: HTMLElement, moment: MomentDetail): void {
    this.moment = moment;
    this.edits.clear();
    this.root = container;
    const doc = container.ownerDocument;

    const back = doc.createElement('button');
    back.className = 'back';
    back.textContent = '← gallery';
    back.addEventListener('click', () => this.callbacks.onBack());
    container.appendChild(back);

    const wrap = doc.createElement('div');
    wrap.className = 'pitch-wrap';
    wrap.style.width = `${this.imageSize}px`;
    wrap.style.height = `${this.imageSize}px`;

    const img = doc.createElement('img');
    img.className = 'pitch-img';
    img.src = this.api.momentImageUrl(moment.moment_id);
    img.width = this.imageSize;
    img.height = this.imageSize;
    img.draggable = false;
    wrap.appendChild(img);

    wrap.appendChild(this.hullOverlay(doc, moment.hull));
    moment.all_players.forEach((player, index) => {
      wrap.appendChild(this.marker(doc, index, player.location[0], player.location[1],
        player.actor ? 'passer' : player.teammate ? 'teammate' : player.keeper ? 'keeper' : 'opponent'));
    });
    container.appendChild(wrap);
    container.appendChild(this.panel(doc, moment));
    this.attachDrag(wrap);
  }

  private hullOverlay(doc: Document, hull: [number, number][]): SVGElement {
    const svg = doc.createElementNS('http://www.w3.org/2000/svg', 'svg') as SVGElement;
    svg.setAttribute('class', 'overlay');
    svg.setAttribute('viewBox', `0 0 ${this.imageSize} ${this.imageSize}`);
    const polygon = doc.createElementNS('http://www.w3.org/2000/svg', 'polygon');
    polygon.setAttribute('class', 'hull-outline');
    polygon.setAttribute(
      'points',
      hull
        .map(([x, y]) => {
          const { row, col } = toPixel(x, y, this.imageSize, this.imageSize);
          return `${col},${row}`;
        })
        .join(' '),
    );
    svg.appendChild(polygon);
    return svg;
  }

  private marker(
    doc: Document, index: number, x: number, y: number, kind: string,
  ): HTMLElement {
    const el = doc.createElement('div');
    el.className = `marker ${kind}`;
    el.dataset.playerIndex = String(index);
    this.placeMarker(el, x, y);
    return el;
  }

  private placeMarker(el: HTMLElement, x: number, y: number): void {
    const { row, col } = toPixel(x, y, this.imageSize, this.imageSize);
    el.style.left = `${((col + 0.5) / this.imageSize) * 100}%`;
    el.style.top = `${((row + 0.5) / this.imageSize) * 100}%`;
    el.dataset.pitchX = String(x);
    el.dataset.pitchY = String(y);
  }

  private panel(doc: Document, moment: MomentDetail): HTMLElement {
    const panel = doc.createElement('div');
    panel.className = 'whatif-panel';
    const original = doc.createElement('div');
    original.className = 'prob-original';
    original.textContent = `original: ${formatProbability(moment.probability)}`;
    const current = doc.createElement('div');
    current.className = 'prob-whatif';
    current.textContent = 'what-if: drag a player';
    const rejection = doc.createElement('div');
    rejection.className = 'rejection';
    const validation = doc.createElement('div');
    validation.className = 'validation-error';
    const reset = doc.createElement('button');
    reset.className = 'reset';
    reset.textContent = 'Reset positions';
    reset.addEventListener('click', () => this.reset());
    const meta = doc.createElement('div');
    meta.className = 'meta';
    meta.textContent =
      `${moment.label} · match ${moment.match_id} · player ${moment.player_id}` +
      ` · origin (${moment.origin[0].toFixed(1)}, ${moment.origin[1].toFixed(1)})` +
      ` · hull area ${moment.hull_area.toFixed(1)}` +
      (moment.under_pressure ? ' · under pressure' : '');
    panel.append(original, current, rejection, validation, reset, meta);
    return panel;
  }

  private attachDrag(wrap: HTMLElement): void {
    let active: HTMLElement | null = null;
    const doc = wrap.ownerDocument;

    const positionFromEvent = (ev: MouseEvent): { x: number; y: number } => {
      const rect = wrap.getBoundingClientRect();
      const scale = rect.width > 0 ? rect.width : this.imageSize;
      const fx = (ev.clientX - rect.left) / scale;
      const fy = (ev.clientY - rect.top) / (rect.height > 0 ? rect.height : this.imageSize);
      const col = fx * this.imageSize - 0.5;
      const row = fy * this.imageSize - 0.5;
      const { x, y } = fromPixel(row, col, this.imageSize, this.imageSize);
      return clampToPitch(x, y);
    };

    wrap.addEventListener('mousedown', (ev) => {
      const target = ev.target as HTMLElement;
      if (target.classList?.contains('marker')) {
        active = target;
        ev.preventDefault();
      }
    });
    doc.addEventListener('mousemove', (ev) => {
      if (!active) return;
      const { x, y } = positionFromEvent(ev as MouseEvent);
      this.placeMarker(active, x, y);
    });
    doc.addEventListener('mouseup', (ev) => {
      if (!active) return;
      const marker = active;
      active = null;
      const { x, y } = positionFromEvent(ev as MouseEvent);
      this.placeMarker(marker, x, y);
      const index = Number(marker.dataset.playerIndex);
      this.edits.set(index, { x, y });
      this.submitEdits();
    });
  }

  /** One POST per drag-release, carrying every accumulated edit. */
  private submitEdits(): void {
    if (!this.moment) return;
    const edits: WhatIfEdit[] = [...this.edits.entries()].map(([player, pos]) => ({
      player, x: pos.x, y: pos.y,
    }));
    this.whatif.submit(this.moment.moment_id, edits);
  }

  /** Called by the app when a non-stale what-if outcome arrives. */
  showOutcome(momentId: string, outcome: WhatIfOutcome): void {
    if (!this.root || !this.moment || this.moment.moment_id !== momentId) return;
    const current = this.root.querySelector<HTMLElement>('.prob-whatif');
    const rejection = this.root.querySelector<HTMLElement>('.rejection');
    const validation = this.root.querySelector<HTMLElement>('.validation-error');
    if (!current || !rejection || !validation) return;
    validation.textContent = '';
    if (outcome.error !== null) {
      validation.textContent = outcome.error;
      return;
    }
    const result = outcome.result;
    if (!result) return;
    if (!result.still_p3) {
      current.classList.add('greyed');
      current.textContent = 'what-if: n/a';
      rejection.textContent = `not a P3 moment: ${result.rejection_reason}`;
      return;
    }
    current.classList.remove('greyed');
    rejection.textContent = '';
    const original = result.original_probability;
    const delta =
      original === null || result.probability === null
        ? ''
        : ` (Δ ${((result.probability - original) * 100).toFixed(1)})`;
    current.textContent = `what-if: ${formatProbability(result.probability)}${delta}`;
  }

  /** Restore the original frame: markers, edits, and probability text. */
  reset(): void {
    if (!this.root || !this.moment) return;
    this.whatif.cancelPending(this.moment.moment_id);
    this.edits.clear();
    this.root.querySelectorAll<HTMLElement>('.marker').forEach((el) => {
      const index = Number(el.dataset.playerIndex);
      const [x, y] = this.moment!.all_players[index].location;
      this.placeMarker(el, x, y);
    });
    const current = this.root.querySelector<HTMLElement>('.prob-whatif');
    const rejection = this.root.querySelector<HTMLElement>('.rejection');
    if (current) {
      current.classList.remove('greyed');
      current.textContent = 'what-if: drag a player';
    }
    if (rejection) rejection.textContent = '';
  }

  pendingEditCount(): number {
    return this.edits.size;
  }
}
