/** Deterministic single-image inference from a saved checkpoint. */

import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { loadModel } from "./checkpoint";
import { readImage, writeImage } from "./mrif";

export async function loadGenerator(checkpointDir: string): Promise<tf.LayersModel> {
  return loadModel(path.join(checkpointDir, "generator"));
}

export function correctImage(model: tf.LayersModel, n: number, data: Float32Array): Float32Array {
  const out = tf.tidy(() => model.apply(tf.tensor4d(data, [1, n, n, 1])) as tf.Tensor4D);
  const corrected = out.dataSync() as Float32Array;
  out.dispose();
  return Float32Array.from(corrected);
}

export async function inferFile(checkpointDir: string, inputPath: string, outputPath: string): Promise<void> {
  const model = await loadGenerator(checkpointDir);
  const { n, data } = readImage(inputPath);
  writeImage(outputPath, n, correctImage(model, n, data));
}
