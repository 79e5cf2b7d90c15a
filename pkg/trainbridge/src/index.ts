export { ConfigError, InputError, ParseError } from "./errors.js";
export {
  DEFAULT_SPEC,
  hyperparameterLines,
  makeSpec,
  specLogText,
  validateSpec,
  type TrainSpec,
} from "./spec.js";
export {
  formatDetectionLine,
  formatDetections,
  parseDetections,
  parseLabelFile,
  type Box,
  type Detection,
  type LabeledBox,
} from "./labels.js";
export {
  imagesDir,
  labelsDir,
  listFrameIds,
  readManifest,
  readSplitList,
  type Manifest,
} from "./manifest.js";
export { downsample, readPngGray, type GrayImage } from "./png.js";
export { batchIndices, encodeTarget, loadExample, type Example } from "./data.js";
export { buildModel, decodeGrid, loadModel, saveModel } from "./model.js";
export { train, NET_INPUT, RUN_LOG, SPEC_JSON, TRAINING_LOG, type TrainResult } from "./train.js";
export { predict, DEFAULT_CONF_THRESHOLD, type PredictResult } from "./predict.js";
