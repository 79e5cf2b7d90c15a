import { ConfigError } from "./errors.js";

/** Full configuration for one training run. */
export interface TrainSpec {
  /** Path to the dataset manifest (dataset.yaml) produced by `ecgdet build`. */
  dataset: string;
  epochs: number;
  patience: number;
  optimizer: string;
  batchSize: number;
  lr0: number;
  momentum: number;
  weightDecay: number;
  iou: number;
  warmupEpochs: number;
  warmupMomentum: number;
  nms: boolean;
  imageSize: number;
}

/** Training defaults. Everything except the dataset path has a fixed value. */
export const DEFAULT_SPEC: Omit<TrainSpec, "dataset"> = {
  epochs: 200,
  patience: 50,
  optimizer: "SGD",
  batchSize: 16,
  lr0: 0.01,
  momentum: 0.937,
  weightDecay: 0.0005,
  iou: 0.7,
  warmupEpochs: 3.0,
  warmupMomentum: 0.8,
  nms: false,
  imageSize: 640,
};

/** Build a TrainSpec from the defaults plus any overrides. */
export function makeSpec(
  dataset: string,
  overrides: Partial<Omit<TrainSpec, "dataset">> = {},
): TrainSpec {
  const spec: TrainSpec = { dataset, ...DEFAULT_SPEC, ...overrides };
  validateSpec(spec);
  return spec;
}

/** Reject self-contradictory specs before any work starts. */
export function validateSpec(spec: TrainSpec): void {
  if (!Number.isInteger(spec.epochs) || spec.epochs < 1) {
    throw new ConfigError(`epochs must be a positive integer, got ${spec.epochs}`);
  }
  if (!Number.isInteger(spec.patience) || spec.patience < 0) {
    throw new ConfigError(`patience must be a non-negative integer, got ${spec.patience}`);
  }
  if (!Number.isInteger(spec.batchSize) || spec.batchSize < 1) {
    throw new ConfigError(`batch size must be a positive integer, got ${spec.batchSize}`);
  }
  if (!(spec.lr0 > 0)) {
    throw new ConfigError(`initial learning rate must be > 0, got ${spec.lr0}`);
  }
  if (!(spec.momentum >= 0 && spec.momentum < 1)) {
    throw new ConfigError(`momentum must lie in [0, 1), got ${spec.momentum}`);
  }
  if (!(spec.weightDecay >= 0)) {
    throw new ConfigError(`weight decay must be >= 0, got ${spec.weightDecay}`);
  }
  if (!(spec.iou > 0 && spec.iou < 1)) {
    throw new ConfigError(`IoU threshold must lie in (0, 1), got ${spec.iou}`);
  }
  if (!(spec.warmupEpochs >= 0)) {
    throw new ConfigError(`warmup epochs must be >= 0, got ${spec.warmupEpochs}`);
  }
  if (!(spec.warmupMomentum >= 0 && spec.warmupMomentum < 1)) {
    throw new ConfigError(`warmup momentum must lie in [0, 1), got ${spec.warmupMomentum}`);
  }
  if (!Number.isInteger(spec.imageSize) || spec.imageSize < 32) {
    throw new ConfigError(`image size must be an integer >= 32, got ${spec.imageSize}`);
  }
}

/**
 * Render a float the way the canonical log format expects: integral values
 * keep one decimal place ("3.0", not "3"), everything else uses the shortest
 * round-trip decimal JavaScript prints.
 */
function formatFloat(value: number): string {
  return Number.isInteger(value) ? value.toFixed(1) : String(value);
}

/**
 * The nine canonical hyperparameter log lines, in their fixed order.  These
 * are written verbatim into every run log so downstream tooling (and humans
 * diffing runs) can grep for exact strings.
 */
export function hyperparameterLines(spec: TrainSpec): string[] {
  return [
    `optimiser: ${spec.optimizer}`,
    `batch size: ${spec.batchSize}`,
    `initial learning rate: ${formatFloat(spec.lr0)}`,
    `momentum: ${formatFloat(spec.momentum)}`,
    `weight decay: ${formatFloat(spec.weightDecay)}`,
    `IoU: ${formatFloat(spec.iou)}`,
    `warmup epochs: ${formatFloat(spec.warmupEpochs)}`,
    `warmup momentum: ${formatFloat(spec.warmupMomentum)}`,
    `NMS: ${spec.nms ? "True" : "False"}`,
  ];
}

/** Full run-log text: hyperparameters plus the run-shape settings. */
export function specLogText(spec: TrainSpec): string {
  const lines = [
    ...hyperparameterLines(spec),
    `epochs: ${spec.epochs}`,
    `patience: ${spec.patience}`,
    `image size: ${spec.imageSize}`,
    `dataset: ${spec.dataset}`,
  ];
  return lines.join("\n") + "\n";
}
