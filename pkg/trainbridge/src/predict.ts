import * as fs from "node:fs";
import * as path from "node:path";
import * as tf from "@tensorflow/tfjs";

import { InputError } from "./errors.js";
import { Detection, formatDetections } from "./labels.js";
import { listFrameIds } from "./manifest.js";
import { decodeGrid, gridSizeOf, inputSizeOf, loadModel, numClassesOf } from "./model.js";
import { downsample, readPngGray } from "./png.js";

/** Default confidence floor below which grid cells stay silent. */
export const DEFAULT_CONF_THRESHOLD = 0.25;

export interface PredictResult {
  outFile: string;
  numFrames: number;
  numDetections: number;
}

/**
 * Run the detector over every PNG in a directory and write the detections
 * interchange file.  An empty directory yields an empty file.
 */
export async function predict(
  weights: string,
  imageDir: string,
  outFile: string,
  confThreshold: number = DEFAULT_CONF_THRESHOLD,
): Promise<PredictResult> {
  if (!(confThreshold >= 0 && confThreshold <= 1)) {
    throw new InputError(`confidence threshold must lie in [0, 1], got ${confThreshold}`);
  }
  await tf.setBackend("cpu");
  await tf.ready();

  const frameIds = listFrameIds(imageDir);
  if (frameIds.length === 0) {
    fs.mkdirSync(path.dirname(path.resolve(outFile)), { recursive: true });
    fs.writeFileSync(outFile, "");
    return { outFile, numFrames: 0, numDetections: 0 };
  }

  const model = await loadModel(weights);
  const inputSize = inputSizeOf(model);
  const gridSize = gridSizeOf(model);
  const numClasses = numClassesOf(model);
  const cellCount = gridSize * gridSize * (5 + numClasses);

  const side = inputSize;
  const batchData = new Float32Array(frameIds.length * side * side);
  frameIds.forEach((frameId, i) => {
    const image = readPngGray(path.join(imageDir, `${frameId}.png`));
    batchData.set(downsample(image, side), i * side * side);
  });

  const xs = tf.tensor4d(batchData, [frameIds.length, side, side, 1]);
  const pred = model.predict(xs, { batchSize: frameIds.length }) as tf.Tensor4D;
  const raw = pred.dataSync() as Float32Array;
  xs.dispose();
  pred.dispose();
  model.dispose();

  const perFrame = new Map<string, Detection[]>();
  let numDetections = 0;
  frameIds.forEach((frameId, i) => {
    const grid = raw.subarray(i * cellCount, (i + 1) * cellCount) as Float32Array;
    const detections = decodeGrid(grid, gridSize, numClasses, confThreshold);
    numDetections += detections.length;
    perFrame.set(frameId, detections);
  });

  fs.mkdirSync(path.dirname(path.resolve(outFile)), { recursive: true });
  fs.writeFileSync(outFile, formatDetections(perFrame));
  return { outFile, numFrames: frameIds.length, numDetections };
}
