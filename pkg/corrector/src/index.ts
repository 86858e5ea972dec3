export { readMrif, readImage, writeImage } from "./mrif";
export { readManifest, resolveEntryPaths } from "./manifest";
export type { Manifest, ManifestEntry } from "./manifest";
export {
  buildGenerator,
  buildDiscriminator,
  auditGenerator,
  encoderTrunkShapes,
} from "./model";
export type { GeneratorSpec, ArchitectureAudit, BlockAudit } from "./model";
export {
  PROB_EPS,
  adversarialLoss,
  adversarialLossValue,
  dataLoss,
  totalLoss,
  totalLossValue,
  discriminatorObjective,
  discriminatorObjectiveValue,
} from "./losses";
export { loadPairs, sampleBatch, psnr, evaluatePsnr, baselinePsnr, mulberry32 } from "./data";
export { train, DEFAULT_CONFIG } from "./train";
export type { TrainConfig, TrainResult } from "./train";
export { inferFile, correctImage, loadGenerator } from "./infer";
export { saveModel, loadModel, saveSidecar, loadSidecar } from "./checkpoint";
