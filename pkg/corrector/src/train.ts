/**
 * Two-phase training: the generator is first pretrained alone with Adam on
 * the data-mismatch loss, then generator and discriminator alternate under
 * RMSProp with two discriminator ascent steps per generator step. Every
 * step appends `step,l_data,l_adv,l_total,d_loss` to loss.csv (the
 * adversarial columns stay 0 during pretraining).
 */

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { saveModel, saveSidecar } from "./checkpoint";
import { baselinePsnr, evaluatePsnr, loadPairs, mulberry32, sampleBatch, Pair } from "./data";
import { installFastConvGrads } from "./fastconv";
import { adversarialLoss, dataLoss, discriminatorObjective, totalLoss } from "./losses";
import { readManifest } from "./manifest";
import { buildDiscriminator, buildGenerator, GeneratorSpec } from "./model";

export interface TrainConfig {
  learningRate: number;
  batch: number;
  lambdaAdv: number;
  dStepsPerG: number;
  pretrainSteps: number;
  adversarialSteps: number;
  /** Crop size for training batches; 0 trains on full images. */
  patch: number;
  seed: number;
  depth: number;
  baseFeatures: number;
  /** Evaluate held-out PSNR every this many steps (0 = only at the end). */
  evalEvery: number;
  /** End pretraining once the held-out gain reaches this many dB (0 = never). */
  targetGainDb: number;
  /** Held-out images used for the periodic early-stop check (0 = all). */
  evalSubset: number;
  /** Optional distinct learning rate for the adversarial phase. */
  adversarialLearningRate?: number;
  /** Decoder activation convention passed to the generator. */
  decoderActivation?: "relu" | "leakyRelu";
}

export const DEFAULT_CONFIG: TrainConfig = {
  learningRate: 1e-4,
  batch: 16,
  lambdaAdv: 0.01,
  dStepsPerG: 2,
  pretrainSteps: 2000,
  adversarialSteps: 200,
  patch: 0,
  seed: 1,
  depth: 3,
  baseFeatures: 64,
  evalEvery: 0,
  targetGainDb: 0,
  evalSubset: 0,
};

export interface TrainResult {
  checkpointDir: string;
  steps: number;
  baselinePsnrDb: number;
  heldOutPsnrDb: number;
  gainDb: number;
}

function trainableVars(model: tf.LayersModel): tf.Variable[] {
  // layers hand out their live tf.Variable objects through getWeights(true)
  const vars = model.getWeights(true).filter((w): w is tf.Variable => w instanceof tf.Variable);
  if (vars.length === 0) {
    throw new Error(`${model.name}: no trainable variables found`);
  }
  return vars;
}

export async function train(manifestPath: string, outDir: string, config: Partial<TrainConfig> = {}): Promise<TrainResult> {
  installFastConvGrads();
  const cfg: TrainConfig = { ...DEFAULT_CONFIG, ...config };
  const manifest = readManifest(manifestPath);
  const trainPairs = loadPairs(manifest, "train");
  const testPairs = loadPairs(manifest, "test");
  if (trainPairs.length === 0) throw new Error(`${manifestPath}: no training pairs`);
  if (testPairs.length === 0) throw new Error(`${manifestPath}: no held-out pairs`);

  const spec: GeneratorSpec = {
    depth: cfg.depth,
    baseFeatures: cfg.baseFeatures,
    seed: cfg.seed,
    decoderActivation: cfg.decoderActivation,
  };
  const generator = buildGenerator(spec);
  const discriminator = buildDiscriminator(spec);
  const gVars = trainableVars(generator);
  const dVars = trainableVars(discriminator);
  const patch = cfg.patch > 0 ? cfg.patch : trainPairs[0].n;
  const rng = mulberry32(cfg.seed);

  fs.mkdirSync(outDir, { recursive: true });
  const lossLogPath = path.join(outDir, "loss.csv");
  // synchronous appends: the training loop never yields to the event loop,
  // so a buffered stream would not flush until the very end
  fs.writeFileSync(lossLogPath, "step,l_data,l_adv,l_total,d_loss\n");

  const baseline = baselinePsnr(testPairs);
  let step = 0;
  let heldOut = baseline;

  const logStep = (lData: number, lAdv: number, lTotal: number, dLoss: number) => {
    fs.appendFileSync(lossLogPath, `${step},${lData},${lAdv},${lTotal},${dLoss}\n`);
  };

  const evalLogPath = path.join(outDir, "eval.csv");
  fs.writeFileSync(evalLogPath, "step,heldout_psnr_db,gain_db\n");
  const checkPairs = cfg.evalSubset > 0 ? testPairs.slice(0, cfg.evalSubset) : testPairs;
  const checkBaseline = baselinePsnr(checkPairs);
  const reachedTarget = () => {
    if (cfg.targetGainDb <= 0 || cfg.evalEvery <= 0 || step === 0 || step % cfg.evalEvery !== 0) {
      return false;
    }
    const current = evaluatePsnr(generator, checkPairs);
    fs.appendFileSync(evalLogPath, `${step},${current},${current - checkBaseline}\n`);
    return current - checkBaseline >= cfg.targetGainDb;
  };

  // Phase 1: Adam pretraining of the generator on the data term only.
  // Reaching the target gain ends pretraining; the adversarial phase still
  // runs its configured number of steps afterwards.
  const pretrainOpt = tf.train.adam(cfg.learningRate);
  let stop = false;
  for (let i = 0; i < cfg.pretrainSteps && !stop; i++) {
    const { corrupt, clean } = sampleBatch(trainPairs, cfg.batch, patch, rng);
    const cost = pretrainOpt.minimize(
      () => dataLoss(clean, generator.apply(corrupt, { training: true }) as tf.Tensor),
      true,
      gVars
    )!;
    step += 1;
    const lData = cost.dataSync()[0];
    logStep(lData, 0, lData, 0);
    tf.dispose([corrupt, clean, cost]);
    stop = reachedTarget();
  }

  // Phase 2: adversarial game under RMSProp, two D ascent steps per G step.
  const gOpt = tf.train.rmsprop(cfg.adversarialLearningRate ?? cfg.learningRate);
  const dOpt = tf.train.rmsprop(cfg.adversarialLearningRate ?? cfg.learningRate);
  for (let i = 0; i < cfg.adversarialSteps; i++) {
    let dLossValue = 0;
    for (let k = 0; k < cfg.dStepsPerG; k++) {
      const { corrupt, clean } = sampleBatch(trainPairs, cfg.batch, patch, rng);
      // the generator is frozen during D steps; keep its pass off the tape
      const fake = tf.tidy(() => generator.apply(corrupt, { training: false }) as tf.Tensor);
      const dCost = dOpt.minimize(
        () => {
          const objective = discriminatorObjective(
            discriminator.apply(clean, { training: true }) as tf.Tensor,
            discriminator.apply(fake, { training: true }) as tf.Tensor
          );
          return tf.neg(objective) as tf.Scalar;
        },
        true,
        dVars
      )!;
      dLossValue = dCost.dataSync()[0];
      tf.dispose([corrupt, clean, fake, dCost]);
    }

    const { corrupt, clean } = sampleBatch(trainPairs, cfg.batch, patch, rng);
    let lData = 0;
    let lAdv = 0;
    const gCost = gOpt.minimize(
      () => {
        const fake = generator.apply(corrupt, { training: true }) as tf.Tensor;
        const lDataT = dataLoss(clean, fake);
        const lAdvT = adversarialLoss(discriminator.apply(fake, { training: false }) as tf.Tensor);
        lData = lDataT.dataSync()[0];
        lAdv = lAdvT.dataSync()[0];
        return totalLoss(lDataT, lAdvT, cfg.lambdaAdv);
      },
      true,
      gVars
    )!;
    step += 1;
    logStep(lData, lAdv, gCost.dataSync()[0], dLossValue);
    tf.dispose([corrupt, clean, gCost]);
  }

  heldOut = evaluatePsnr(generator, testPairs);

  const generatorDir = path.join(outDir, "generator");
  await saveModel(generator, generatorDir);
  await saveModel(discriminator, path.join(outDir, "discriminator"));
  saveSidecar(outDir, {
    trainConfig: cfg,
    steps: step,
    baseline_psnr_db: baseline,
    held_out_psnr_db: heldOut,
  });

  return {
    checkpointDir: outDir,
    steps: step,
    baselinePsnrDb: baseline,
    heldOutPsnrDb: heldOut,
    gainDb: heldOut - baseline,
  };
}

export type { Pair };
