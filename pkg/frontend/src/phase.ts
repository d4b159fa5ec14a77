/** Zero-crossing phase estimation on streamed scope windows. */

/** Index of the first negative-to-nonnegative transition, or -1. */
export function firstUpcrossing(samples: number[]): number {
  for (let k = 1; k < samples.length; k += 1) {
    if (samples[k - 1] < 0 && samples[k] >= 0) return k;
  }
  return -1;
}

/**
 * Phase of the current behind the voltage, in degrees folded to
 * [-180, 180). Positive means lagging. Null when either trace never
 * crosses zero.
 */
export function crossingLagDeg(
  v: number[],
  i: number[],
  samplesPerCycle: number,
): number | null {
  const vk = firstUpcrossing(v);
  const ik = firstUpcrossing(i);
  if (vk < 0 || ik < 0) return null;
  const lag = (((ik - vk) % samplesPerCycle) + samplesPerCycle) % samplesPerCycle;
  const deg = (lag * 360) / samplesPerCycle;
  return deg >= 180 ? deg - 360 : deg;
}
