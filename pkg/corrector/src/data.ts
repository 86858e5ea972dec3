/**
 * Dataset loading, deterministic patch batching, and the held-out PSNR
 * score used to judge training.
 */

import * as tf from "@tensorflow/tfjs";

import { Manifest, ManifestEntry, resolveEntryPaths } from "./manifest";
import { readImage } from "./mrif";

export interface Pair {
  n: number;
  clean: Float32Array;
  corrupt: Float32Array;
}

export function loadPairs(manifest: Manifest, split: "train" | "test"): Pair[] {
  const entries = manifest.entries.filter((e: ManifestEntry) => e.split === split);
  return entries.map((entry) => {
    const paths = resolveEntryPaths(manifest, entry);
    const clean = readImage(paths.clean);
    const corrupt = readImage(paths.corrupt);
    if (clean.n !== corrupt.n) {
      throw new Error(`pair ${entry.index}: clean is ${clean.n}, corrupt is ${corrupt.n}`);
    }
    return { n: clean.n, clean: clean.data, corrupt: corrupt.data };
  });
}

/** Small deterministic PRNG so batch order is reproducible across runs. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a += 0x6d2b79f5;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function copyPatch(src: Float32Array, n: number, row: number, col: number, size: number, out: Float32Array, offset: number): void {
  for (let r = 0; r < size; r++) {
    const base = (row + r) * n + col;
    out.set(src.subarray(base, base + size), offset + r * size);
  }
}

/**
 * Assemble one (corrupt, clean) training batch of `patch`-sized crops as
 * NHWC tensors. `patch` equal to the image size degenerates to full images.
 */
export function sampleBatch(
  pairs: Pair[],
  batch: number,
  patch: number,
  rng: () => number
): { corrupt: tf.Tensor4D; clean: tf.Tensor4D } {
  const corrupt = new Float32Array(batch * patch * patch);
  const clean = new Float32Array(batch * patch * patch);
  for (let b = 0; b < batch; b++) {
    const pair = pairs[Math.floor(rng() * pairs.length)];
    const maxOffset = pair.n - patch;
    const row = maxOffset > 0 ? Math.floor(rng() * (maxOffset + 1)) : 0;
    const col = maxOffset > 0 ? Math.floor(rng() * (maxOffset + 1)) : 0;
    copyPatch(pair.corrupt, pair.n, row, col, patch, corrupt, b * patch * patch);
    copyPatch(pair.clean, pair.n, row, col, patch, clean, b * patch * patch);
  }
  return {
    corrupt: tf.tensor4d(corrupt, [batch, patch, patch, 1]),
    clean: tf.tensor4d(clean, [batch, patch, patch, 1]),
  };
}

/** PSNR in dB with the peak taken from the reference image. */
export function psnr(ref: Float32Array, test: Float32Array): number {
  if (ref.length !== test.length) {
    throw new Error(`psnr: length mismatch ${ref.length} vs ${test.length}`);
  }
  let peak = 0;
  let sq = 0;
  for (let i = 0; i < ref.length; i++) {
    const r = Math.abs(ref[i]);
    if (r > peak) peak = r;
    const d = Math.abs(ref[i]) - Math.abs(test[i]);
    sq += d * d;
  }
  if (peak === 0) throw new Error("psnr: all-zero reference");
  const mse = sq / ref.length;
  if (mse === 0) return Infinity;
  return 10 * Math.log10((peak * peak) / mse);
}

/** Mean held-out PSNR of the generator's output vs the clean references. */
export function evaluatePsnr(model: tf.LayersModel, pairs: Pair[]): number {
  let total = 0;
  for (const pair of pairs) {
    const out = tf.tidy(() => {
      const x = tf.tensor4d(pair.corrupt, [1, pair.n, pair.n, 1]);
      return model.apply(x) as tf.Tensor4D;
    });
    const data = out.dataSync() as Float32Array;
    out.dispose();
    total += psnr(pair.clean, data);
  }
  return total / pairs.length;
}

/** Mean PSNR of the corrupted inputs themselves (the baseline to beat). */
export function baselinePsnr(pairs: Pair[]): number {
  let total = 0;
  for (const pair of pairs) {
    total += psnr(pair.clean, pair.corrupt);
  }
  return total / pairs.length;
}
