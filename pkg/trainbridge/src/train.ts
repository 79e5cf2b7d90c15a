import * as fs from "node:fs";
import * as path from "node:path";
import { performance } from "node:perf_hooks";
import * as tf from "@tensorflow/tfjs";

import { batchIndices, encodeTarget, loadExample, Example } from "./data.js";
import { InputError } from "./errors.js";
import { imagesDir, labelsDir, listFrameIds, readManifest, readSplitList } from "./manifest.js";
import { buildModel, gridSizeOf, saveModel } from "./model.js";
import { specLogText, TrainSpec, validateSpec } from "./spec.js";

/** Side length the pooled network input uses. */
export const NET_INPUT = 64;

export interface TrainOptions {
  outDir: string;
  partition?: string;
  /** Optional split-list file restricting which frame ids are trained on. */
  splitList?: string;
  seed?: number;
  /** Progress sink; defaults to silent. */
  log?: (line: string) => void;
}

export interface TrainResult {
  outDir: string;
  epochsRun: number;
  finalLoss: number;
  numExamples: number;
}

/** File names written into the run directory. */
export const TRAINING_LOG = "training_log.csv";
export const RUN_LOG = "run.log";
export const SPEC_JSON = "spec.json";

/**
 * Train the bridge detector on one dataset partition and persist weights,
 * the per-epoch CSV log, and the configuration echo.
 */
export async function train(spec: TrainSpec, options: TrainOptions): Promise<TrainResult> {
  validateSpec(spec);
  if (spec.imageSize % NET_INPUT !== 0) {
    throw new InputError(`image size ${spec.imageSize} is not a multiple of ${NET_INPUT}`);
  }
  await tf.setBackend("cpu");
  await tf.ready();

  const log = options.log ?? (() => {});
  const partition = options.partition ?? "train";
  const manifest = readManifest(spec.dataset);
  const imgDir = imagesDir(manifest, partition);
  const lblDir = labelsDir(manifest, partition);

  let frameIds = listFrameIds(imgDir);
  if (options.splitList !== undefined) {
    const wanted = new Set(readSplitList(options.splitList));
    frameIds = frameIds.filter((id) => wanted.has(id));
    if (frameIds.length < wanted.size) {
      throw new InputError(
        `split list names ${wanted.size} frames but only ${frameIds.length} exist under ${imgDir}`,
      );
    }
  }
  if (frameIds.length === 0) {
    throw new InputError(`no training frames found under ${imgDir}`);
  }

  const numClasses = manifest.nc;
  const examples: Example[] = frameIds.map((id) => {
    const example = loadExample(imgDir, lblDir, id, NET_INPUT);
    return example;
  });
  log(`loaded ${examples.length} frames from ${imgDir}`);

  const model = buildModel(NET_INPUT, numClasses, options.seed ?? 0);
  const gridSize = gridSizeOf(model);
  const channels = 5 + numClasses;
  const targets = examples.map((ex) => encodeTarget(ex.boxes, gridSize, numClasses));

  const optimizer = tf.train.momentum(spec.lr0, spec.momentum);
  const kernels = model.trainableWeights
    .filter((w) => w.name.includes("kernel"))
    .map((w) => w.read() as tf.Tensor);

  const batches = batchIndices(examples.length, spec.batchSize);
  const csvRows: string[] = ["epoch,loss,seconds"];
  let bestLoss = Infinity;
  let bestEpoch = 0;
  let epochsRun = 0;
  let finalLoss = NaN;

  for (let epoch = 0; epoch < spec.epochs; epoch++) {
    const t0 = performance.now();
    applyWarmup(optimizer, spec, epoch);

    let lossSum = 0;
    for (const batch of batches) {
      const xs = stackInputs(examples, batch);
      const ys = stackTargets(targets, batch, gridSize, channels);
      const cost = optimizer.minimize(
        () => {
          const pred = model.apply(xs) as tf.Tensor4D;
          const data = detectionLoss(pred, ys);
          const l2 = tf.mul(
            spec.weightDecay * 0.5,
            tf.addN(kernels.map((k) => tf.sum(tf.square(k)))),
          );
          return tf.add(data, l2) as tf.Scalar;
        },
        true,
      );
      lossSum += cost!.dataSync()[0] * batch.length;
      cost!.dispose();
      xs.dispose();
      ys.dispose();
    }
    const epochLoss = lossSum / examples.length;
    const seconds = (performance.now() - t0) / 1000;
    epochsRun = epoch + 1;
    finalLoss = epochLoss;
    csvRows.push(`${epoch + 1},${epochLoss.toFixed(6)},${seconds.toFixed(3)}`);
    log(`epoch ${epoch + 1}/${spec.epochs} loss ${epochLoss.toFixed(6)} (${seconds.toFixed(2)}s)`);

    if (epochLoss < bestLoss - 1e-12) {
      bestLoss = epochLoss;
      bestEpoch = epoch;
    } else if (epoch - bestEpoch >= spec.patience) {
      log(`stopping early: no improvement for ${spec.patience} epochs`);
      break;
    }
  }
  optimizer.dispose();

  fs.mkdirSync(options.outDir, { recursive: true });
  await saveModel(model, options.outDir);
  fs.writeFileSync(path.join(options.outDir, TRAINING_LOG), csvRows.join("\n") + "\n");
  fs.writeFileSync(path.join(options.outDir, RUN_LOG), runLogText(spec, examples.length, epochsRun, finalLoss));
  fs.writeFileSync(path.join(options.outDir, SPEC_JSON), JSON.stringify(spec, null, 2) + "\n");
  model.dispose();
  return { outDir: options.outDir, epochsRun, finalLoss, numExamples: examples.length };
}

/** Linear learning-rate / momentum ramp over the first warmup epochs. */
function applyWarmup(
  optimizer: ReturnType<typeof tf.train.momentum>,
  spec: TrainSpec,
  epoch: number,
): void {
  if (spec.warmupEpochs <= 0 || epoch >= spec.warmupEpochs) {
    optimizer.setLearningRate(spec.lr0);
    optimizer.setMomentum(spec.momentum);
    return;
  }
  const frac = Math.min(1, (epoch + 1) / spec.warmupEpochs);
  optimizer.setLearningRate(spec.lr0 * frac);
  optimizer.setMomentum(spec.warmupMomentum + (spec.momentum - spec.warmupMomentum) * frac);
}

function stackInputs(examples: Example[], batch: number[]): tf.Tensor4D {
  const side = NET_INPUT;
  const data = new Float32Array(batch.length * side * side);
  batch.forEach((idx, i) => data.set(examples[idx].input, i * side * side));
  return tf.tensor4d(data, [batch.length, side, side, 1]);
}

function stackTargets(
  targets: Float32Array[],
  batch: number[],
  gridSize: number,
  channels: number,
): tf.Tensor4D {
  const cell = gridSize * gridSize * channels;
  const data = new Float32Array(batch.length * cell);
  batch.forEach((idx, i) => data.set(targets[idx], i * cell));
  return tf.tensor4d(data, [batch.length, gridSize, gridSize, channels]);
}

/**
 * Squared-error detection loss over the grid: occupied cells pull their
 * objectness to 1 and regress box + class targets (box term weighted 5x),
 * empty cells push objectness to 0 at half weight.
 */
function detectionLoss(pred: tf.Tensor4D, target: tf.Tensor4D): tf.Scalar {
  return tf.tidy(() => {
    const objMask = target.slice([0, 0, 0, 0], [-1, -1, -1, 1]);
    const noObjMask = tf.sub(1, objMask);
    const predObj = pred.slice([0, 0, 0, 0], [-1, -1, -1, 1]);
    const predBox = pred.slice([0, 0, 0, 1], [-1, -1, -1, 4]);
    const targetBox = target.slice([0, 0, 0, 1], [-1, -1, -1, 4]);
    const predCls = pred.slice([0, 0, 0, 5], [-1, -1, -1, -1]);
    const targetCls = target.slice([0, 0, 0, 5], [-1, -1, -1, -1]);
    const lossObj = tf.sum(tf.mul(objMask, tf.square(tf.sub(predObj, 1))));
    const lossNoObj = tf.mul(0.5, tf.sum(tf.mul(noObjMask, tf.square(predObj))));
    const lossBox = tf.mul(5, tf.sum(tf.mul(objMask, tf.square(tf.sub(predBox, targetBox)))));
    const lossCls = tf.sum(tf.mul(objMask, tf.square(tf.sub(predCls, targetCls))));
    const total = tf.addN([lossObj, lossNoObj, lossBox, lossCls]);
    return tf.div(total, pred.shape[0]) as tf.Scalar;
  });
}

/** Run-log body: the canonical hyperparameter echo plus run-shape facts. */
function runLogText(
  spec: TrainSpec,
  numExamples: number,
  epochsRun: number,
  finalLoss: number,
): string {
  return (
    specLogText(spec) +
    `mosaic: trainer default\n` +
    `examples: ${numExamples}\n` +
    `epochs run: ${epochsRun}\n` +
    `final loss: ${finalLoss.toFixed(6)}\n`
  );
}
