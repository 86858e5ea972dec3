/**
 * Training objectives. The generator minimizes a weighted sum of the data
 * mismatch ||x_c - G(x_m)||_2 (Euclidean norm over all pixels) and the
 * adversarial term log(1 - D(G(x_m))); the discriminator maximizes
 * log D(real) + log(1 - D(fake)). Probabilities are clamped to
 * [EPS, 1 - EPS] before any logarithm.
 */

import * as tf from "@tensorflow/tfjs";

export const PROB_EPS = 1e-7;

function clampProb(p: tf.Tensor): tf.Tensor {
  return tf.clipByValue(p, PROB_EPS, 1 - PROB_EPS);
}

/** log(1 - D(G)) for one probability; rejects values outside [0, 1]. */
export function adversarialLossValue(dFake: number): number {
  if (!Number.isFinite(dFake) || dFake < 0 || dFake > 1) {
    throw new Error(`discriminator output must be a probability in [0, 1], got ${dFake}`);
  }
  const clamped = Math.min(Math.max(dFake, PROB_EPS), 1 - PROB_EPS);
  return Math.log(1 - clamped);
}

/** Batch-mean adversarial loss as a differentiable scalar. */
export function adversarialLoss(dFake: tf.Tensor): tf.Scalar {
  return tf.mean(tf.log(tf.sub(1, clampProb(dFake)))) as tf.Scalar;
}

/** Euclidean norm of the target/output difference over all pixels. */
export function dataLoss(target: tf.Tensor, generated: tf.Tensor): tf.Scalar {
  if (target.shape.join(",") !== generated.shape.join(",")) {
    throw new Error(`shape mismatch: ${target.shape} vs ${generated.shape}`);
  }
  return tf.sqrt(tf.sum(tf.square(tf.sub(target, generated)))) as tf.Scalar;
}

export function totalLossValue(lData: number, lAdv: number, lambda: number): number {
  return lData + lambda * lAdv;
}

export function totalLoss(lData: tf.Scalar, lAdv: tf.Scalar, lambda: number): tf.Scalar {
  return tf.add(lData, tf.mul(lambda, lAdv)) as tf.Scalar;
}

/**
 * The discriminator's objective, to be maximized:
 * mean(log D(real)) + mean(log(1 - D(fake))). Training minimizes its
 * negation.
 */
export function discriminatorObjective(dReal: tf.Tensor, dFake: tf.Tensor): tf.Scalar {
  if (dReal.size === 0 || dFake.size === 0) {
    throw new Error("discriminator objective needs a non-empty batch");
  }
  const realTerm = tf.mean(tf.log(clampProb(dReal)));
  const fakeTerm = tf.mean(tf.log(tf.sub(1, clampProb(dFake))));
  return tf.add(realTerm, fakeTerm) as tf.Scalar;
}

export function discriminatorObjectiveValue(dReal: number[], dFake: number[]): number {
  if (dReal.length === 0 || dFake.length === 0) {
    throw new Error("discriminator objective needs a non-empty batch");
  }
  const clamp = (p: number) => Math.min(Math.max(p, PROB_EPS), 1 - PROB_EPS);
  const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;
  return mean(dReal.map((p) => Math.log(clamp(p)))) + mean(dFake.map((p) => Math.log(1 - clamp(p))));
}
