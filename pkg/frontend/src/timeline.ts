/** Frame scrubber state machine: clamped index, play/pause that resumes
 * from the current frame, and a slider that is disabled for single-frame
 * sets (a one-bin log is just the static view). */

export interface TimelineView {
  frameIndex: number;
  sliderEnabled: boolean;
  playing: boolean;
  label: string;
}

export interface FrameWindow {
  start: string;
  end: string;
}

type Scheduler = (callback: () => void, intervalMs: number) => () => void;

const defaultScheduler: Scheduler = (callback, intervalMs) => {
  const id = setInterval(callback, intervalMs);
  return () => clearInterval(id);
};

export class Timeline {
  private index = 0;
  private cancel: (() => void) | null = null;
  private listeners: Array<(view: TimelineView) => void> = [];

  constructor(
    private windows: FrameWindow[],
    private intervalMs = 1200,
    private scheduler: Scheduler = defaultScheduler,
  ) {}

  get frameCount(): number {
    return this.windows.length;
  }

  get sliderEnabled(): boolean {
    return this.windows.length > 1;
  }

  get playing(): boolean {
    return this.cancel !== null;
  }

  get frameIndex(): number {
    return this.index;
  }

  view(): TimelineView {
    const window = this.windows[this.index];
    return {
      frameIndex: this.index,
      sliderEnabled: this.sliderEnabled,
      playing: this.playing,
      label: window ? `${window.start} – ${window.end}` : "",
    };
  }

  onChange(listener: (view: TimelineView) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    const view = this.view();
    for (const listener of this.listeners) listener(view);
  }

  /** Out-of-range indices clamp instead of erroring. */
  scrub(index: number): number {
    const max = Math.max(0, this.windows.length - 1);
    this.index = Math.min(max, Math.max(0, Math.floor(index)));
    this.emit();
    return this.index;
  }

  play(): void {
    if (this.playing || !this.sliderEnabled) return;
    this.cancel = this.scheduler(() => {
      this.scrub((this.index + 1) % this.windows.length);
    }, this.intervalMs);
    this.emit();
  }

  pause(): void {
    if (this.cancel) {
      this.cancel();
      this.cancel = null;
    }
    this.emit();
  }

  /** Resumes from the current index, not from the start. */
  toggle(): void {
    if (this.playing) this.pause();
    else this.play();
  }
}
