#!/usr/bin/env node
/**
 * Command-line entry points:
 *   mrishot-corrector train --manifest <path> --out <dir> [training flags]
 *   mrishot-corrector infer --ckpt <dir> --in <image.mrif> --out <image.mrif>
 */

import { parseArgs } from "node:util";

import { inferFile } from "./infer";
import { DEFAULT_CONFIG, train } from "./train";

function usage(): never {
  console.error(
    [
      "usage:",
      "  mrishot-corrector train --manifest <manifest.jsonl> --out <dir>",
      "      [--features N] [--depth N] [--batch N] [--lr X] [--lambda X]",
      "      [--d-steps N] [--pretrain N] [--adversarial N] [--patch N]",
      "      [--seed N] [--eval-every N] [--target-gain X]",
      "  mrishot-corrector infer --ckpt <dir> --in <image.mrif> --out <image.mrif>",
    ].join("\n")
  );
  process.exit(2);
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "train") {
    const { values } = parseArgs({
      args: rest,
      options: {
        manifest: { type: "string" },
        out: { type: "string" },
        features: { type: "string" },
        depth: { type: "string" },
        batch: { type: "string" },
        lr: { type: "string" },
        lambda: { type: "string" },
        "d-steps": { type: "string" },
        pretrain: { type: "string" },
        adversarial: { type: "string" },
        patch: { type: "string" },
        seed: { type: "string" },
        "eval-every": { type: "string" },
        "target-gain": { type: "string" },
      },
    });
    if (!values.manifest || !values.out) usage();
    const num = (v: string | undefined, fallback: number) => (v === undefined ? fallback : Number(v));
    const result = await train(values.manifest, values.out, {
      baseFeatures: num(values.features, DEFAULT_CONFIG.baseFeatures),
      depth: num(values.depth, DEFAULT_CONFIG.depth),
      batch: num(values.batch, DEFAULT_CONFIG.batch),
      learningRate: num(values.lr, DEFAULT_CONFIG.learningRate),
      lambdaAdv: num(values.lambda, DEFAULT_CONFIG.lambdaAdv),
      dStepsPerG: num(values["d-steps"], DEFAULT_CONFIG.dStepsPerG),
      pretrainSteps: num(values.pretrain, DEFAULT_CONFIG.pretrainSteps),
      adversarialSteps: num(values.adversarial, DEFAULT_CONFIG.adversarialSteps),
      patch: num(values.patch, DEFAULT_CONFIG.patch),
      seed: num(values.seed, DEFAULT_CONFIG.seed),
      evalEvery: num(values["eval-every"], DEFAULT_CONFIG.evalEvery),
      targetGainDb: num(values["target-gain"], DEFAULT_CONFIG.targetGainDb),
    });
    console.log(
      `trained ${result.steps} steps: held-out PSNR ${result.heldOutPsnrDb.toFixed(2)} dB ` +
        `(baseline ${result.baselinePsnrDb.toFixed(2)} dB, gain ${result.gainDb.toFixed(2)} dB)`
    );
    console.log(`checkpoint: ${result.checkpointDir}`);
  } else if (command === "infer") {
    const { values } = parseArgs({
      args: rest,
      options: {
        ckpt: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
    });
    if (!values.ckpt || !values.in || !values.out) usage();
    await inferFile(values.ckpt, values.in, values.out);
    console.log(`wrote ${values.out}`);
  } else {
    usage();
  }
}

main().catch((err) => {
  console.error(`error: ${err.message}`);
  process.exit(1);
});
