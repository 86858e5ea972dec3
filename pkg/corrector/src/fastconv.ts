/**
 * Speed shim for CPU training: the pure-JS backend's Conv2DBackpropFilter
 * kernel is a naive loop and dominates every training step (~80% measured).
 * The filter gradient is itself expressible as a convolution — swap batch
 * and channel axes, convolve the padded input with the output gradient as
 * the filter (dilation = forward stride), and transpose back — which routes
 * through the backend's fast im2col conv2d instead.
 *
 * Installing the shim swaps the gradient configs of Conv2D and
 * Conv2DBackpropInput for ones using this composition; anything outside
 * NHWC with default rounding falls back to the stock gradients, which are
 * captured from the registry before being replaced.
 */

import * as tf from "@tensorflow/tfjs";
import * as tfc from "@tensorflow/tfjs-core";
import { getGradient } from "@tensorflow/tfjs-core";

type Pad = "same" | "valid" | number;

interface ConvAttrs {
  strides: number | [number, number];
  pad: Pad;
  dataFormat?: string;
  dimRoundingMode?: string;
  dilations?: number | [number, number];
}

type GradConfig = {
  kernelName: string;
  inputsToSave?: string[];
  outputsToSave?: boolean[];
  gradFunc: (dy: tf.Tensor | tf.Tensor[], saved: tf.Tensor[], attrs: unknown) => Record<string, () => tf.Tensor>;
};

function strideTuple(strides: number | [number, number] | undefined): [number, number] {
  if (strides == null) return [1, 1];
  return typeof strides === "number" ? [strides, strides] : strides;
}

export function filterGradViaConv(
  x: tf.Tensor4D,
  dy: tf.Tensor4D,
  filterShape: [number, number, number, number],
  strides: number | [number, number],
  pad: Pad
): tf.Tensor4D {
  const [kh, kw] = filterShape;
  const [sh, sw] = strideTuple(strides);
  const [, h, w] = x.shape;
  const [, ho, wo] = dy.shape;

  let top = 0;
  let left = 0;
  let bottom = 0;
  let right = 0;
  if (pad === "same") {
    const padH = Math.max(0, (ho - 1) * sh + kh - h);
    const padW = Math.max(0, (wo - 1) * sw + kw - w);
    top = Math.floor(padH / 2);
    bottom = padH - top;
    left = Math.floor(padW / 2);
    right = padW - left;
  } else if (typeof pad === "number") {
    top = bottom = left = right = pad;
  }

  return tf.tidy(() => {
    const xp =
      top || bottom || left || right
        ? tf.pad(x, [
            [0, 0],
            [top, bottom],
            [left, right],
            [0, 0],
          ])
        : x;
    // batch and channel trade places; dy becomes the filter
    const xT = tf.transpose(xp, [3, 1, 2, 0]);
    const dyT = tf.transpose(dy, [1, 2, 0, 3]);
    const taps = tf.conv2d(xT as tf.Tensor4D, dyT as tf.Tensor4D, 1, "valid", "NHWC", [sh, sw]);
    // valid padding can leave unused trailing taps; the kernel has kh x kw
    const cropped = tf.slice(taps, [0, 0, 0, 0], [taps.shape[0], kh, kw, taps.shape[3]]);
    return tf.transpose(cropped, [1, 2, 0, 3]) as tf.Tensor4D;
  });
}

function fastPathApplies(attrs: ConvAttrs): boolean {
  return attrs.dataFormat !== "NCHW" && attrs.dimRoundingMode == null;
}

let originalConv2dGrad: GradConfig | null = null;
let originalBackpropInputGrad: GradConfig | null = null;

type FusedConv2dArgs = {
  x: tf.Tensor3D | tf.Tensor4D;
  filter: tf.Tensor4D;
  strides: number | [number, number];
  pad: Pad;
  dataFormat?: "NHWC" | "NCHW";
  dilations?: number | [number, number];
  dimRoundingMode?: "floor" | "round" | "ceil";
  bias?: tf.Tensor;
  activation?: string;
  preluActivationWeights?: tf.Tensor;
  leakyreluAlpha?: number;
};

/**
 * The layers library routes conv layers through fused.conv2d, whose gradient
 * is hardwired to the slow stock filter-gradient kernel. Running the pieces
 * unfused instead sends the backward pass through the (replaceable) Conv2D
 * gradient; the extra bias-add forward cost is negligible next to it.
 */
function defuseConv2d(original: (args: FusedConv2dArgs) => tf.Tensor) {
  return (args: FusedConv2dArgs): tf.Tensor => {
    const activation = args.activation ?? "linear";
    if (
      (args.dataFormat ?? "NHWC") !== "NHWC" ||
      args.dimRoundingMode != null ||
      args.preluActivationWeights != null
    ) {
      return original(args);
    }
    let y = tf.conv2d(args.x, args.filter, args.strides, args.pad, "NHWC", args.dilations ?? [1, 1]);
    if (args.bias != null) {
      y = tf.add(y, args.bias);
    }
    switch (activation) {
      case "linear":
        return y;
      case "relu":
        return tf.relu(y);
      case "relu6":
        return tf.relu6(y);
      case "elu":
        return tf.elu(y);
      case "sigmoid":
        return tf.sigmoid(y);
      case "leakyrelu":
        return tf.leakyRelu(y, args.leakyreluAlpha ?? 0.2);
      default:
        return original(args);
    }
  };
}

export function installFastConvGrads(): void {
  if (originalConv2dGrad !== null) return;
  originalConv2dGrad = getGradient("Conv2D") as GradConfig;
  originalBackpropInputGrad = getGradient("Conv2DBackpropInput") as GradConfig;
  if (!originalConv2dGrad || !originalBackpropInputGrad) {
    throw new Error("stock conv2d gradients not found in the registry");
  }

  const fusedNamespace = (tfc as unknown as { fused: { conv2d: (args: FusedConv2dArgs) => tf.Tensor } }).fused;
  fusedNamespace.conv2d = defuseConv2d(fusedNamespace.conv2d.bind(fusedNamespace));

  tf.unregisterGradient("Conv2D");
  tf.registerGradient({
    kernelName: "Conv2D",
    inputsToSave: ["x", "filter"],
    gradFunc: (dy, saved, attrs) => {
      const a = attrs as unknown as ConvAttrs;
      const original = originalConv2dGrad!.gradFunc(dy, saved, attrs);
      const [dh, dw] = strideTuple(a.dilations);
      if (!fastPathApplies(a) || dh !== 1 || dw !== 1) {
        return original;
      }
      const [x4D, filter] = saved as [tf.Tensor4D, tf.Tensor4D];
      return {
        x: original.x,
        filter: () =>
          filterGradViaConv(
            x4D,
            dy as tf.Tensor4D,
            filter.shape as [number, number, number, number],
            a.strides,
            a.pad
          ),
      };
    },
  } as Parameters<typeof tf.registerGradient>[0]);

  tf.unregisterGradient("Conv2DBackpropInput");
  tf.registerGradient({
    kernelName: "Conv2DBackpropInput",
    inputsToSave: ["dy", "filter"],
    gradFunc: (ddx, saved, attrs) => {
      const a = attrs as unknown as ConvAttrs;
      const original = originalBackpropInputGrad!.gradFunc(ddx, saved, attrs);
      if (!fastPathApplies(a)) {
        return original;
      }
      const [dy, filter] = saved as [tf.Tensor4D, tf.Tensor4D];
      return {
        dy: original.dy,
        filter: () =>
          filterGradViaConv(
            ddx as tf.Tensor4D,
            dy,
            filter.shape as [number, number, number, number],
            a.strides,
            a.pad
          ),
      };
    },
  } as Parameters<typeof tf.registerGradient>[0]);
}

/** The stock filter gradient, exposed so tests can compare the shim to it. */
export function referenceFilterGrad(
  x: tf.Tensor4D,
  dy: tf.Tensor4D,
  filterShape: [number, number, number, number],
  strides: number | [number, number],
  pad: Pad
): tf.Tensor4D {
  const config = (originalConv2dGrad ?? (getGradient("Conv2D") as GradConfig))!;
  const attrs = { strides, pad, dataFormat: "NHWC", dilations: 1, dimRoundingMode: undefined };
  const filter = tf.zeros(filterShape) as tf.Tensor4D;
  const result = config.gradFunc(dy, [x, filter], attrs);
  return result.filter() as tf.Tensor4D;
}
