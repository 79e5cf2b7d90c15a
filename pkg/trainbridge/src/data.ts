import * as fs from "node:fs";
import * as path from "node:path";

import { InputError } from "./errors.js";
import { LabeledBox, parseLabelFile } from "./labels.js";
import { downsample, readPngGray } from "./png.js";

/** One training example: pooled grayscale input plus its ground-truth boxes. */
export interface Example {
  frameId: string;
  input: Float32Array;
  boxes: LabeledBox[];
}

/** Load the (image, labels) pair for one frame id. */
export function loadExample(
  imagesDir: string,
  labelsDir: string,
  frameId: string,
  inputSize: number,
): Example {
  const image = readPngGray(path.join(imagesDir, `${frameId}.png`));
  const labelPath = path.join(labelsDir, `${frameId}.txt`);
  let labelText: string;
  try {
    labelText = fs.readFileSync(labelPath, "utf8");
  } catch (err) {
    throw new InputError(`cannot read labels for frame ${frameId}: ${(err as Error).message}`);
  }
  return {
    frameId,
    input: downsample(image, inputSize),
    boxes: parseLabelFile(labelText),
  };
}

/**
 * Encode ground truth onto an S x S grid.  Per cell the channels are
 * [objectness, cx-within-cell, cy-within-cell, w, h, one-hot class...];
 * each box lands in the cell holding its center, later boxes overwrite
 * earlier ones in the same cell (single-box-per-cell model).
 */
export function encodeTarget(boxes: LabeledBox[], gridSize: number, numClasses: number): Float32Array {
  const channels = 5 + numClasses;
  const target = new Float32Array(gridSize * gridSize * channels);
  for (const { classId, box } of boxes) {
    if (classId >= numClasses) {
      throw new InputError(`class id ${classId} out of range for ${numClasses} classes`);
    }
    const col = Math.min(gridSize - 1, Math.max(0, Math.floor(box.cx * gridSize)));
    const row = Math.min(gridSize - 1, Math.max(0, Math.floor(box.cy * gridSize)));
    const base = (row * gridSize + col) * channels;
    target.fill(0, base, base + channels);
    target[base] = 1;
    target[base + 1] = box.cx * gridSize - col;
    target[base + 2] = box.cy * gridSize - row;
    target[base + 3] = box.w;
    target[base + 4] = box.h;
    target[base + 5 + classId] = 1;
  }
  return target;
}

/** Split example indices into contiguous batches (last one may be short). */
export function batchIndices(count: number, batchSize: number): number[][] {
  const batches: number[][] = [];
  for (let start = 0; start < count; start += batchSize) {
    const batch: number[] = [];
    for (let i = start; i < Math.min(start + batchSize, count); i++) {
      batch.push(i);
    }
    batches.push(batch);
  }
  return batches;
}
