import { describe, expect, it } from "vitest";

import { FrameWindow, Timeline } from "../src/timeline.js";

function windows(n: number): FrameWindow[] {
  return Array.from({ length: n }, (_, i) => ({
    start: `2017-05-${25 + i}T00:00:00Z`,
    end: `2017-05-${26 + i}T00:00:00Z`,
  }));
}

/** Manual scheduler: tests drive ticks explicitly. */
function manualScheduler() {
  const ticks: Array<() => void> = [];
  return {
    schedule: (callback: () => void) => {
      ticks.push(callback);
      return () => {
        const i = ticks.indexOf(callback);
        if (i >= 0) ticks.splice(i, 1);
      };
    },
    tick: () => ticks.forEach((t) => t()),
    active: () => ticks.length,
  };
}

describe("timeline", () => {
  it("disables the slider for a single-frame set", () => {
    const timeline = new Timeline(windows(1));
    expect(timeline.sliderEnabled).toBe(false);
    expect(timeline.view().sliderEnabled).toBe(false);
  });

  it("enables the slider for multi-frame sets", () => {
    expect(new Timeline(windows(3)).sliderEnabled).toBe(true);
  });

  it("clamps out-of-range scrubs", () => {
    const timeline = new Timeline(windows(3));
    expect(timeline.scrub(99)).toBe(2);
    expect(timeline.scrub(-5)).toBe(0);
    expect(timeline.scrub(1.7)).toBe(1);
  });

  it("labels the current UTC window", () => {
    const timeline = new Timeline(windows(2));
    timeline.scrub(1);
    expect(timeline.view().label).toBe("2017-05-26T00:00:00Z – 2017-05-27T00:00:00Z");
  });

  it("play advances frames and pause stops at the current index", () => {
    const clock = manualScheduler();
    const timeline = new Timeline(windows(3), 1000, clock.schedule);
    timeline.play();
    clock.tick();
    clock.tick();
    expect(timeline.frameIndex).toBe(2);
    timeline.pause();
    expect(clock.active()).toBe(0);
    expect(timeline.frameIndex).toBe(2);
  });

  it("resume continues from the current index", () => {
    const clock = manualScheduler();
    const timeline = new Timeline(windows(4), 1000, clock.schedule);
    timeline.play();
    clock.tick();
    timeline.pause();
    timeline.toggle(); // resume
    clock.tick();
    expect(timeline.frameIndex).toBe(2);
  });

  it("refuses to play a single-frame set", () => {
    const clock = manualScheduler();
    const timeline = new Timeline(windows(1), 1000, clock.schedule);
    timeline.play();
    expect(timeline.playing).toBe(false);
    expect(clock.active()).toBe(0);
  });

  it("wraps around at the end while playing", () => {
    const clock = manualScheduler();
    const timeline = new Timeline(windows(2), 1000, clock.schedule);
    timeline.play();
    clock.tick();
    clock.tick();
    expect(timeline.frameIndex).toBe(0);
  });

  it("notifies listeners on every change", () => {
    const timeline = new Timeline(windows(3));
    const seen: number[] = [];
    timeline.onChange((view) => seen.push(view.frameIndex));
    timeline.scrub(1);
    timeline.scrub(2);
    expect(seen).toEqual([1, 2]);
  });
});
