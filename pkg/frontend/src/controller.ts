// Orchestrates the explorer: slider and viewport edits on one side, the four
// API endpoints on the other. All dynamics come from the server; this file
// only decides when to ask and which answer is still current.

import {
  ApiClient,
  ApiError,
  isAbort,
  type Behavior,
  type BisectResponse,
  type EquationTag,
  type IntegrateResponse,
  type RegionsResponse,
  type Sample,
  type Termination,
} from './api.js';
import { RequestChannel } from './channel.js';
import { debounce, type Debounced } from './debounce.js';
import {
  clampToSlider,
  coveredBy,
  defaultState,
  integrationLegs,
  nudgeValue,
  validViewport,
  type Coverage,
  type ExplorerState,
  type IcField,
  type Viewport,
} from './state.js';

/** Merged result of the (up to two) integration legs behind one redraw. */
export interface TrajectoryView {
  samples: Sample[];
  terminations: Termination[];
  /** t_est of every leg that blew up; plotted as truncation markers. */
  blowups: number[];
  computeMs: number;
  nNodes: number;
}

export interface RenderSink {
  renderTrajectory(view: TrajectoryView, state: ExplorerState): void;
  renderRegions(resp: RegionsResponse, state: ExplorerState): void;
  renderBadge(behavior: Behavior | null): void;
  renderBracket(resp: BisectResponse): void;
  showBisectHint(text: string): void;
  clearBisectHint(): void;
  showBanner(reason: string, message: string): void;
  clearBanner(): void;
  setBusy(busy: boolean): void;
}

type Api = Pick<ApiClient, 'integrate' | 'classify' | 'bisect' | 'regions'>;

const REGIONS_POINTS = 500;

export function mergeLegs(legs: IntegrateResponse[]): TrajectoryView {
  const all = legs
    .map((r) => r.samples)
    .filter((s) => s.length > 0)
    .sort((a, b) => a[0]!.t - b[0]!.t);
  const samples: Sample[] = [];
  for (const leg of all) {
    for (const s of leg) {
      // legs share the initial point; keep a single copy at the seam
      const last = samples[samples.length - 1];
      if (last === undefined || s.t > last.t) samples.push(s);
    }
  }
  return {
    samples,
    terminations: legs.map((r) => r.termination),
    blowups: legs.flatMap((r) => (r.termination.kind === 'BlowUp' ? [r.termination.t_est] : [])),
    computeMs: legs.reduce((ms, r) => ms + r.compute_ms, 0),
    nNodes: legs.reduce((n, r) => n + r.n_nodes, 0),
  };
}

export class ExplorerController {
  readonly state: ExplorerState;

  /** Far end of the classification/bisection window. Deeper than the default
   * viewport so that threshold hunting sees enough of the tail to separate
   * oscillation from blow-up. */
  analysisTo = -40;

  pinA: number | null = null;
  pinB: number | null = null;

  private readonly trajChannel = new RequestChannel();
  private readonly classChannel = new RequestChannel();
  private readonly bisectChannel = new RequestChannel();
  private readonly regionsChannel = new RequestChannel();

  private trajCoverage: Coverage | null = null;
  private regionsCoverage: Coverage | null = null;
  private cachedView: TrajectoryView | null = null;
  private cachedRegions: RegionsResponse | null = null;

  private readonly scheduleRefresh: Debounced<[]>;
  private readonly scheduleRegions: Debounced<[]>;

  constructor(
    private readonly api: Api,
    private readonly sink: RenderSink,
    state?: ExplorerState,
    debounceMs = 100,
  ) {
    this.state = state ?? defaultState();
    this.scheduleRefresh = debounce(() => void this.refresh(), debounceMs);
    this.scheduleRegions = debounce(() => void this.fetchRegions(), debounceMs);
  }

  /** First paint: fetch immediately, no debounce. */
  start(): void {
    void this.refresh();
    void this.fetchRegions();
  }

  setEquation(tag: EquationTag): void {
    if (tag === this.state.equation) return;
    this.state.equation = tag;
    this.invalidateTrajectory();
  }

  setIc(field: IcField, value: number): void {
    const clamped = clampToSlider(value, this.state.sliders[field]);
    if (!Number.isFinite(clamped) || clamped === this.state.ic[field]) return;
    this.state.ic[field] = clamped;
    this.invalidateTrajectory();
  }

  /** Keyboard nudge: slider step normally, fineStep in fine mode. */
  nudge(field: IcField, dir: 1 | -1): void {
    const step = this.state.fineMode ? this.state.fineStep : this.state.sliders[field].step;
    this.setIc(field, nudgeValue(this.state.ic[field], dir, step));
  }

  setFineMode(on: boolean): void {
    this.state.fineMode = on;
  }

  setFineStep(step: number): void {
    if (step > 0) this.state.fineStep = step;
  }

  setOverlay(which: 'guides' | 'squared', on: boolean): void {
    this.state.overlays[which] = on;
    this.redrawFromCache();
  }

  /** Viewport-only navigation: redraw locally unless the t-span grew past
   * what has been integrated (or past the fetched guide-curve extent). */
  setViewport(vp: Viewport): void {
    if (!validViewport(vp)) return;
    this.state.viewport = vp;
    this.redrawFromCache(); // show what we have under the new window right away
    if (!coveredBy(vp, this.trajCoverage)) this.scheduleRefresh();
    if (!coveredBy(vp, this.regionsCoverage)) this.scheduleRegions();
  }

  setAnalysisTo(t: number): void {
    if (!Number.isFinite(t) || t === this.state.ic.t0) return;
    this.analysisTo = t;
    this.invalidateTrajectory();
  }

  pin(slot: 'A' | 'B'): void {
    if (slot === 'A') this.pinA = this.state.ic.v0;
    else this.pinB = this.state.ic.v0;
    this.sink.clearBisectHint();
  }

  private invalidateTrajectory(): void {
    this.trajCoverage = null;
    this.scheduleRefresh();
  }

  private redrawFromCache(): void {
    if (this.cachedView) this.sink.renderTrajectory(this.cachedView, this.state);
    if (this.cachedRegions) this.sink.renderRegions(this.cachedRegions, this.state);
  }

  /** Integrate the visible legs and reclassify, latest-wins on both. */
  async refresh(): Promise<void> {
    const { ic, viewport, equation } = this.state;
    const legSpans = integrationLegs(ic, viewport);
    const requested: Coverage = {
      lo: Math.min(ic.t0, viewport.tMin),
      hi: Math.max(ic.t0, viewport.tMax),
    };

    const view = await this.guarded(this.trajChannel, async (signal) => {
      const legs: IntegrateResponse[] = [];
      for (const span of legSpans) {
        legs.push(
          await this.api.integrate(
            { equation, ic: { t: ic.t0, y: ic.y0, v: ic.v0 }, span },
            signal,
          ),
        );
      }
      return mergeLegs(legs);
    });
    if (view === null) return; // superseded or failed: a newer refresh owns the screen now
    this.trajCoverage = requested; // what was asked for, not what survived a blow-up
    this.cachedView = view;
    this.sink.clearBanner();
    this.sink.renderTrajectory(view, this.state);

    const windowTo = this.analysisTo === ic.t0 ? viewport.tMin : this.analysisTo;
    const cls = await this.guarded(this.classChannel, (signal) =>
      this.api.classify(
        {
          equation,
          ic: { t: ic.t0, y: ic.y0, v: ic.v0 },
          window: { t0: ic.t0, t1: windowTo },
        },
        signal,
      ),
    );
    if (cls !== null) this.sink.renderBadge(cls.behavior);
  }

  async fetchRegions(): Promise<void> {
    const { tMin, tMax } = this.state.viewport;
    const resp = await this.guarded(this.regionsChannel, (signal) =>
      this.api.regions(tMin, tMax, REGIONS_POINTS, signal),
    );
    if (resp !== null) {
      this.regionsCoverage = { lo: tMin, hi: tMax };
      this.cachedRegions = resp;
      this.sink.renderRegions(resp, this.state);
    }
  }

  async requestBisect(): Promise<void> {
    if (this.pinA === null || this.pinB === null) {
      this.sink.showBisectHint('Pin two slope values first.');
      return;
    }
    if (this.pinA === this.pinB) {
      this.sink.showBisectHint('Pins are equal; move one before bisecting.');
      return;
    }
    const { ic, equation } = this.state;
    const windowTo = this.analysisTo === ic.t0 ? this.state.viewport.tMin : this.analysisTo;
    this.sink.setBusy(true);
    try {
      const resp = await this.guarded(this.bisectChannel, (signal) =>
        this.api.bisect(
          {
            equation,
            t0: ic.t0,
            y0: ic.y0,
            window: { t0: ic.t0, t1: windowTo },
            lo: Math.min(this.pinA!, this.pinB!),
            hi: Math.max(this.pinA!, this.pinB!),
          },
          signal,
        ),
      );
      if (resp !== null) {
        this.sink.clearBisectHint();
        this.sink.renderBracket(resp);
      }
    } finally {
      this.sink.setBusy(false);
    }
  }

  /** Channel.run with the error policy: aborts vanish, no-sign-change turns
   * into the bisect hint, anything else becomes the banner. */
  private async guarded<T>(
    channel: RequestChannel,
    fn: (signal: AbortSignal) => Promise<T>,
  ): Promise<T | null> {
    try {
      return await channel.run(fn);
    } catch (err) {
      if (isAbort(err)) return null;
      if (err instanceof ApiError) {
        if (err.reason === 'no-sign-change') {
          this.sink.showBisectHint('Both pins classify the same way; move one across the transition.');
        } else {
          this.sink.showBanner(err.reason, err.message);
        }
        return null;
      }
      throw err;
    }
  }
}
