// Playback timing shared across side-by-side views: one clock, per-view
// frame lookup. The clock never leaves [0, duration].

export class PlaybackClock {
  private current = 0;
  private total = 0;
  playing = false;

  get time(): number {
    return this.current;
  }

  get duration(): number {
    return this.total;
  }

  /** Set the clip length; the clock is re-clamped into the new range. */
  setDuration(duration: number): void {
    this.total = Math.max(0, duration);
    this.seek(this.current);
  }

  seek(time: number): void {
    this.current = Math.min(Math.max(time, 0), this.total);
  }

  /** Advance by dt seconds; wraps to the start when the end is passed. */
  advance(dt: number): void {
    if (this.total === 0) {
      return;
    }
    const next = this.current + dt;
    this.current = next > this.total ? next % this.total : Math.max(next, 0);
  }
}

/** Index of the last sample at or before t; clamps beyond either end. */
export function frameIndex(times: number[], t: number): number {
  const n = times.length;
  if (n === 0) {
    return 0;
  }
  if (t <= times[0]!) {
    return 0;
  }
  if (t >= times[n - 1]!) {
    return n - 1;
  }
  let lo = 0;
  let hi = n - 1;
  while (lo + 1 < hi) {
    const mid = (lo + hi) >> 1;
    if (times[mid]! <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}
