// DOM bootstrap: builds the control panel, implements the render sink on a
// canvas, and wires everything into the controller.

import { ApiClient, type Behavior, type BisectResponse, type EquationTag, type RegionsResponse } from './api.js';
import { ExplorerController, type RenderSink, type TrajectoryView } from './controller.js';
import { TrajectoryPlot } from './plot.js';
import { FINE_STEPS, type ExplorerState, type IcField } from './state.js';

const EQUATIONS: { tag: EquationTag; label: string }[] = [
  { tag: 'phalf', label: 'half (polynomial right side)' },
  { tag: 'pbarhalf', label: 'half, mirrored' },
  { tag: 'p', label: 'full' },
  { tag: 'pbar', label: 'full, mirrored' },
];

const BADGE_COLORS: Record<string, string> = {
  OscUpper: '#2e7d46',
  OscLower: '#3c8f5a',
  BlowUpPos: '#b0413e',
  BlowUpNeg: '#c25b3a',
  LingerZero: '#a3842e',
  LingerOuterParabola: '#a3662e',
  Undetermined: '#5a6170',
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get('api');
  return param ?? 'http://127.0.0.1:8472';
}

class DomSink implements RenderSink {
  private lastView: TrajectoryView | null = null;
  private lastRegions: RegionsResponse | null = null;
  private lastState: ExplorerState | null = null;
  private lastInputAt = 0;

  constructor(
    private plot: TrajectoryPlot,
    private badge: HTMLElement,
    private banner: HTMLElement,
    private bracketOut: HTMLElement,
    private hintOut: HTMLElement,
    private statusOut: HTMLElement,
    private busySpinner: HTMLElement,
  ) {}

  markInput(): void {
    this.lastInputAt = performance.now();
  }

  renderTrajectory(view: TrajectoryView, state: ExplorerState): void {
    this.lastView = view;
    this.lastState = state;
    this.repaint();
    const kinds = view.terminations.map((t) => t.kind).join(', ');
    const lag = this.lastInputAt > 0 ? ` · ${(performance.now() - this.lastInputAt).toFixed(0)} ms since input` : '';
    this.statusOut.textContent =
      `${view.samples.length} pts (${view.nNodes} nodes) · ${kinds} · ${view.computeMs.toFixed(1)} ms server${lag}`;
  }

  renderRegions(resp: RegionsResponse, state: ExplorerState): void {
    this.lastRegions = resp;
    this.lastState = state;
    this.repaint();
  }

  private repaint(): void {
    const state = this.lastState;
    if (!state) return;
    this.plot.setViewport(state.viewport);
    this.plot.clear();
    if (state.overlays.guides && this.lastRegions) {
      this.plot.drawGuides(this.lastRegions.curves);
    }
    if (this.lastView) {
      this.plot.drawTrajectory(this.lastView.samples, state.overlays.squared);
      for (const tEst of this.lastView.blowups) this.plot.drawBlowupMarker(tEst);
    }
  }

  renderBadge(behavior: Behavior | null): void {
    if (!behavior) {
      this.badge.textContent = '—';
      this.badge.style.background = BADGE_COLORS.Undetermined!;
      return;
    }
    this.badge.textContent = behavior.tag;
    this.badge.style.background = BADGE_COLORS[behavior.tag] ?? BADGE_COLORS.Undetermined!;
    const e = behavior.evidence;
    this.badge.title =
      `crossings upper/lower: ${e.crossings_upper}/${e.crossings_lower}` +
      (e.blowup_t_est !== null ? ` · blow-up t≈${e.blowup_t_est.toFixed(4)}` : '');
  }

  renderBracket(resp: BisectResponse): void {
    const [lo, hi] = resp.bracket;
    this.bracketOut.textContent =
      `[${lo.toFixed(10)}, ${hi.toFixed(10)}]\n` +
      `width ${resp.width.toExponential(2)} · ${resp.iterations} iterations\n` +
      `${resp.class_lo.tag} → ${resp.class_hi.tag}`;
  }

  showBisectHint(text: string): void {
    this.hintOut.textContent = text;
  }

  clearBisectHint(): void {
    this.hintOut.textContent = '';
  }

  showBanner(reason: string, message: string): void {
    this.banner.textContent = `[${reason}] ${message}`;
    this.banner.style.display = 'block';
  }

  clearBanner(): void {
    this.banner.style.display = 'none';
  }

  setBusy(busy: boolean): void {
    this.busySpinner.style.visibility = busy ? 'visible' : 'hidden';
  }
}

function sliderRow(
  label: string,
  field: IcField,
  controller: ExplorerController,
  sink: DomSink,
): { root: HTMLElement; sync: () => void } {
  const state = controller.state;
  const spec = state.sliders[field];
  const root = el('div', { class: 'slider-row' });
  root.append(el('label', {}, label));

  const range = el('input', {
    type: 'range',
    min: String(spec.min),
    max: String(spec.max),
    step: String(spec.step),
  });
  const num = el('input', { type: 'text', class: 'num', spellcheck: 'false' });
  const minus = el('button', { type: 'button', title: 'nudge down (or ArrowDown)' }, '−');
  const plus = el('button', { type: 'button', title: 'nudge up (or ArrowUp)' }, '+');

  const sync = () => {
    const v = state.ic[field];
    range.valueAsNumber = v;
    num.value = String(v);
  };
  range.addEventListener('input', () => {
    sink.markInput();
    controller.setIc(field, range.valueAsNumber);
    num.value = String(state.ic[field]);
  });
  num.addEventListener('change', () => {
    const v = Number(num.value);
    if (Number.isFinite(v)) {
      sink.markInput();
      controller.setIc(field, v);
    }
    sync();
  });
  const nudge = (dir: 1 | -1) => {
    sink.markInput();
    controller.nudge(field, dir);
    sync();
  };
  minus.addEventListener('click', () => nudge(-1));
  plus.addEventListener('click', () => nudge(1));
  // fine-step threshold hunting lives on the arrow keys
  for (const target of [range, num]) {
    target.addEventListener('keydown', (ev) => {
      if (ev.key === 'ArrowUp' || ev.key === 'ArrowRight') {
        ev.preventDefault();
        nudge(1);
      } else if (ev.key === 'ArrowDown' || ev.key === 'ArrowLeft') {
        ev.preventDefault();
        nudge(-1);
      }
    });
  }

  root.append(range, num, minus, plus);
  return { root, sync };
}

function boot(): void {
  const app = document.getElementById('app');
  if (!app) throw new Error('missing #app');

  const banner = el('div', { id: 'banner' });
  const panel = el('div', { id: 'panel' });
  const plotWrap = el('div', { id: 'plot-wrap' });
  const canvas = el('canvas', { id: 'plot' });
  plotWrap.append(canvas);
  app.append(banner, panel, plotWrap);

  const badge = el('span', { id: 'badge' }, '—');
  const statusOut = el('div', { id: 'status' });
  const bracketOut = el('pre', { id: 'bracket' });
  const hintOut = el('div', { id: 'hint' });
  const busySpinner = el('span', { id: 'busy' }, '⏳');
  busySpinner.style.visibility = 'hidden';

  const plot = new TrajectoryPlot(canvas, {
    onViewportChange: (vp) => controller.setViewport(vp),
  });
  const sink = new DomSink(plot, badge, banner, bracketOut, hintOut, statusOut, busySpinner);
  const controller = new ExplorerController(new ApiClient(apiBase()), sink);
  const state = controller.state;

  // equation picker
  const eqRow = el('div', { class: 'row' });
  eqRow.append(el('label', {}, 'equation'));
  const eqSelect = el('select');
  for (const { tag, label } of EQUATIONS) {
    eqSelect.append(el('option', { value: tag }, label));
  }
  eqSelect.value = state.equation;
  eqSelect.addEventListener('change', () => {
    sink.markInput();
    controller.setEquation(eqSelect.value as EquationTag);
  });
  eqRow.append(eqSelect);

  // initial-data sliders
  const rows = [
    sliderRow('t₀', 't0', controller, sink),
    sliderRow('σ(t₀)', 'y0', controller, sink),
    sliderRow('σ̇(t₀)', 'v0', controller, sink),
  ];
  const syncAll = () => rows.forEach((r) => r.sync());

  // fine-step mode
  const fineRow = el('div', { class: 'row' });
  const fineCheck = el('input', { type: 'checkbox', id: 'fine' });
  const fineLabel = el('label', { for: 'fine' }, 'fine step');
  const fineSelect = el('select');
  for (const s of FINE_STEPS) {
    fineSelect.append(el('option', { value: String(s) }, s.toExponential(0)));
  }
  fineSelect.value = String(state.fineStep);
  fineCheck.addEventListener('change', () => controller.setFineMode(fineCheck.checked));
  fineSelect.addEventListener('change', () => controller.setFineStep(Number(fineSelect.value)));
  fineRow.append(fineCheck, fineLabel, fineSelect);

  // overlays
  const overlayRow = el('div', { class: 'row' });
  const guidesCheck = el('input', { type: 'checkbox', id: 'guides', checked: '' });
  const squaredCheck = el('input', { type: 'checkbox', id: 'squared' });
  guidesCheck.addEventListener('change', () => controller.setOverlay('guides', guidesCheck.checked));
  squaredCheck.addEventListener('change', () => controller.setOverlay('squared', squaredCheck.checked));
  overlayRow.append(
    guidesCheck,
    el('label', { for: 'guides' }, 'guide curves'),
    squaredCheck,
    el('label', { for: 'squared' }, 'squared view'),
  );

  // classification window
  const windowRow = el('div', { class: 'row' });
  windowRow.append(el('label', {}, 'classify to t ='));
  const windowNum = el('input', { type: 'text', class: 'num' });
  windowNum.value = String(controller.analysisTo);
  windowNum.addEventListener('change', () => {
    const v = Number(windowNum.value);
    if (Number.isFinite(v)) {
      sink.markInput();
      controller.setAnalysisTo(v);
    }
    windowNum.value = String(controller.analysisTo);
  });
  windowRow.append(windowNum);

  const badgeRow = el('div', { class: 'row' });
  badgeRow.append(el('label', {}, 'behavior'), badge, busySpinner);

  // bisect panel: pins capture the current slope slider
  const bisectBox = el('fieldset', { id: 'bisect' });
  bisectBox.append(el('legend', {}, 'threshold hunt'));
  const pinARow = el('div', { class: 'row' });
  const pinBRow = el('div', { class: 'row' });
  const pinABtn = el('button', { type: 'button' }, 'pin A');
  const pinBBtn = el('button', { type: 'button' }, 'pin B');
  const pinAOut = el('span', { class: 'pin-value' }, '—');
  const pinBOut = el('span', { class: 'pin-value' }, '—');
  pinABtn.addEventListener('click', () => {
    controller.pin('A');
    pinAOut.textContent = String(controller.pinA);
  });
  pinBBtn.addEventListener('click', () => {
    controller.pin('B');
    pinBOut.textContent = String(controller.pinB);
  });
  pinARow.append(pinABtn, pinAOut);
  pinBRow.append(pinBBtn, pinBOut);
  const bisectBtn = el('button', { type: 'button' }, 'bisect between pins');
  bisectBtn.addEventListener('click', () => void controller.requestBisect());
  bisectBox.append(pinARow, pinBRow, bisectBtn, bracketOut, hintOut);

  panel.append(eqRow, ...rows.map((r) => r.root), fineRow, overlayRow, windowRow, badgeRow, bisectBox, statusOut);

  syncAll();
  const onResize = () => {
    plot.resize();
    controller.setViewport({ ...state.viewport }); // repaint from cache
  };
  window.addEventListener('resize', onResize);
  plot.resize();
  controller.start();
}

boot();
