/**
 * U-Net-style generator and encoder discriminator.
 *
 * Every encoder block is five 3x3 convolutions: the first downsamples with
 * stride 2, the middle layer carries half the block's feature maps, and a
 * residual connection joins the first layer's activation to the last one's.
 * Decoder blocks mirror this with transposed convolutions, the stride-2
 * upsample moved to the last layer, and the residual joining the first
 * layer's activation to the last layer's input (the upsample changes the
 * spatial size, so first-to-output cannot be added there). One skip
 * concatenation feeds each decoder level from the matching encoder level,
 * and the network predicts a correction on top of a global input-to-output
 * residual; the zero-initialized head makes the untrained model the
 * identity map.
 *
 * The discriminator reuses the encoder trunk unchanged (same parameter
 * shapes) and appends global average pooling plus a 1-unit sigmoid head to
 * produce the probability the adversarial objective needs.
 */

import * as tf from "@tensorflow/tfjs";

export interface GeneratorSpec {
  /** Number of encoder (= decoder) blocks. */
  depth: number;
  /** Feature maps per block; the middle layer of each block uses half. */
  baseFeatures: number;
  /** Initializer seed so construction is reproducible. */
  seed?: number;
  /** Decoder activation; plain ReLU by convention, leaky trains faster on
   * signed artifact corrections. */
  decoderActivation?: "relu" | "leakyRelu";
}

const KERNEL = 3;

function conv(
  filters: number,
  stride: number,
  name: string,
  seed: number,
  transposed = false
): tf.layers.Layer {
  const args = {
    filters,
    kernelSize: KERNEL,
    strides: stride,
    padding: "same" as const,
    name,
    kernelInitializer: tf.initializers.glorotUniform({ seed }),
  };
  return transposed ? tf.layers.conv2dTranspose(args) : tf.layers.conv2d(args);
}

function encoderBlock(
  input: tf.SymbolicTensor,
  features: number,
  prefix: string,
  seedBase: number
): tf.SymbolicTensor {
  const widths = [features, features, features / 2, features, features];
  let y = input;
  let firstActivation: tf.SymbolicTensor | null = null;
  for (let i = 0; i < widths.length; i++) {
    const stride = i === 0 ? 2 : 1;
    y = conv(widths[i], stride, `${prefix}_conv${i + 1}`, seedBase + i).apply(y) as tf.SymbolicTensor;
    y = tf.layers.leakyReLU({ alpha: 0.2, name: `${prefix}_act${i + 1}` }).apply(y) as tf.SymbolicTensor;
    if (i === 0) firstActivation = y;
  }
  return tf.layers.add({ name: `${prefix}_res` }).apply([y, firstActivation!]) as tf.SymbolicTensor;
}

function decoderBlock(
  input: tf.SymbolicTensor,
  features: number,
  prefix: string,
  seedBase: number,
  activation: "relu" | "leakyRelu"
): tf.SymbolicTensor {
  const act = (name: string) =>
    activation === "relu" ? tf.layers.reLU({ name }) : tf.layers.leakyReLU({ alpha: 0.2, name });
  const widths = [features, features, features / 2, features];
  let y = input;
  let firstActivation: tf.SymbolicTensor | null = null;
  for (let i = 0; i < widths.length; i++) {
    y = conv(widths[i], 1, `${prefix}_tconv${i + 1}`, seedBase + i, true).apply(y) as tf.SymbolicTensor;
    y = act(`${prefix}_act${i + 1}`).apply(y) as tf.SymbolicTensor;
    if (i === 0) firstActivation = y;
  }
  y = tf.layers.add({ name: `${prefix}_res` }).apply([y, firstActivation!]) as tf.SymbolicTensor;
  y = conv(features, 2, `${prefix}_tconv5`, seedBase + 4, true).apply(y) as tf.SymbolicTensor;
  return act(`${prefix}_act5`).apply(y) as tf.SymbolicTensor;
}

function buildEncoderTrunk(
  input: tf.SymbolicTensor,
  spec: GeneratorSpec,
  prefix: string,
  seed: number
): { output: tf.SymbolicTensor; levelInputs: tf.SymbolicTensor[] } {
  const levelInputs: tf.SymbolicTensor[] = [];
  let y = input;
  for (let b = 0; b < spec.depth; b++) {
    levelInputs.push(y);
    y = encoderBlock(y, spec.baseFeatures, `${prefix}enc${b}`, seed + 100 * b);
  }
  return { output: y, levelInputs };
}

export function buildGenerator(spec: GeneratorSpec): tf.LayersModel {
  validateSpec(spec);
  const seed = spec.seed ?? 1;
  const input = tf.input({ shape: [null, null, 1], name: "corrupted" });
  const { output: bottleneck, levelInputs } = buildEncoderTrunk(input, spec, "", seed);

  let y = bottleneck;
  for (let b = 0; b < spec.depth; b++) {
    const level = spec.depth - 1 - b;
    y = decoderBlock(y, spec.baseFeatures, `dec${b}`, seed + 10_000 + 100 * b, spec.decoderActivation ?? "relu");
    y = tf.layers
      .concatenate({ name: `skip${level}` })
      .apply([y, levelInputs[level]]) as tf.SymbolicTensor;
  }

  const correction = tf.layers
    .conv2d({
      filters: 1,
      kernelSize: KERNEL,
      padding: "same",
      name: "head",
      kernelInitializer: "zeros",
      biasInitializer: "zeros",
    })
    .apply(y) as tf.SymbolicTensor;
  const corrected = tf.layers.add({ name: "global_res" }).apply([correction, input]) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: corrected, name: "generator" });
}

export function buildDiscriminator(spec: GeneratorSpec): tf.LayersModel {
  validateSpec(spec);
  const seed = (spec.seed ?? 1) + 50_000;
  const input = tf.input({ shape: [null, null, 1], name: "candidate" });
  const { output } = buildEncoderTrunk(input, spec, "disc_", seed);
  let y = tf.layers.globalAveragePooling2d({ name: "disc_pool" }).apply(output) as tf.SymbolicTensor;
  y = tf.layers
    .dense({
      units: 1,
      activation: "sigmoid",
      name: "disc_head",
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
    })
    .apply(y) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: y, name: "discriminator" });
}

function validateSpec(spec: GeneratorSpec): void {
  if (!Number.isInteger(spec.depth) || spec.depth < 1) {
    throw new Error(`depth must be a positive integer, got ${spec.depth}`);
  }
  if (!Number.isInteger(spec.baseFeatures) || spec.baseFeatures < 2 || spec.baseFeatures % 2 !== 0) {
    throw new Error(`baseFeatures must be an even integer >= 2, got ${spec.baseFeatures}`);
  }
}

// --- structural audit ------------------------------------------------------

export interface BlockAudit {
  name: string;
  convLayers: number;
  filters: number[];
  strides: number[];
  transposed: boolean[];
  /** Names of the layers the block's residual add joins. */
  residualJoins: string[];
}

export interface ArchitectureAudit {
  depth: number;
  baseFeatures: number;
  encoderBlocks: BlockAudit[];
  decoderBlocks: BlockAudit[];
  skipConcatPerLevel: string[];
  hasGlobalResidual: boolean;
}

function inboundLayerNames(layer: tf.layers.Layer): string[] {
  const node = (layer as unknown as { inboundNodes: Array<{ inboundLayers: tf.layers.Layer[] }> })
    .inboundNodes[0];
  return node.inboundLayers.map((l) => l.name);
}

function auditBlock(model: tf.LayersModel, prefix: string, transposedExpected: boolean): BlockAudit {
  const convTag = transposedExpected ? "tconv" : "conv";
  const convs = model.layers
    .filter((l) => l.name.startsWith(`${prefix}_${convTag}`))
    .sort((a, b) => a.name.localeCompare(b.name));
  const residual = model.layers.find((l) => l.name === `${prefix}_res`);
  return {
    name: prefix,
    convLayers: convs.length,
    filters: convs.map((l) => (l.getConfig() as { filters: number }).filters),
    strides: convs.map((l) => {
      const s = (l.getConfig() as { strides: number | number[] }).strides;
      return Array.isArray(s) ? s[0] : s;
    }),
    transposed: convs.map((l) => l.getClassName() === "Conv2DTranspose"),
    residualJoins: residual ? inboundLayerNames(residual) : [],
  };
}

/** Inspect a built generator and report the properties the contract pins. */
export function auditGenerator(model: tf.LayersModel, spec: GeneratorSpec): ArchitectureAudit {
  const encoderBlocks = [];
  const decoderBlocks = [];
  for (let b = 0; b < spec.depth; b++) {
    encoderBlocks.push(auditBlock(model, `enc${b}`, false));
    decoderBlocks.push(auditBlock(model, `dec${b}`, true));
  }
  const skips = model.layers.filter((l) => l.getClassName() === "Concatenate").map((l) => l.name);
  const globalRes = model.layers.find((l) => l.name === "global_res");
  return {
    depth: spec.depth,
    baseFeatures: spec.baseFeatures,
    encoderBlocks,
    decoderBlocks,
    skipConcatPerLevel: skips.sort(),
    hasGlobalResidual: globalRes !== undefined && inboundLayerNames(globalRes).includes("corrupted"),
  };
}

/** Parameter shapes of the encoder trunk (block convolutions only). */
export function encoderTrunkShapes(model: tf.LayersModel, prefix: string): string[] {
  return model.layers
    .filter((l) => l.name.startsWith(prefix) && /_conv\d$/.test(l.name))
    .sort((a, b) => a.name.localeCompare(b.name))
    .flatMap((l) => l.getWeights().map((w) => JSON.stringify(w.shape)));
}
