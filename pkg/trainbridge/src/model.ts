import * as fs from "node:fs";
import * as path from "node:path";
import * as tf from "@tensorflow/tfjs";

import { InputError } from "./errors.js";
import { Detection } from "./labels.js";

/** Side length of the square detection grid for a given input size. */
export const GRID_STRIDE = 16;

/** File names inside a weights directory. */
export const MODEL_JSON = "model.json";
export const WEIGHTS_BIN = "weights.bin";

/**
 * Build the compact single-shot detector: a stack of stride-2 convolutions
 * ending in a sigmoid head, so every output channel lives in (0, 1).  Output
 * shape is [grid, grid, 5 + numClasses] with channels
 * [objectness, cx-in-cell, cy-in-cell, w, h, class scores...].
 */
export function buildModel(inputSize: number, numClasses: number, seed: number): tf.LayersModel {
  if (inputSize % GRID_STRIDE !== 0) {
    throw new InputError(`input size ${inputSize} is not a multiple of ${GRID_STRIDE}`);
  }
  const conv = (filters: number, activation: "relu" | "sigmoid", layerSeed: number) =>
    tf.layers.conv2d({
      filters,
      kernelSize: 3,
      strides: 2,
      padding: "same",
      activation,
      kernelInitializer: tf.initializers.glorotUniform({ seed: layerSeed }),
      biasInitializer: "zeros",
    });
  const model = tf.sequential();
  model.add(tf.layers.inputLayer({ inputShape: [inputSize, inputSize, 1] }));
  model.add(conv(8, "relu", seed));
  model.add(conv(16, "relu", seed + 1));
  model.add(conv(16, "relu", seed + 2));
  model.add(conv(5 + numClasses, "sigmoid", seed + 3));
  return model;
}

/** Grid side length the model predicts on, read off its output shape. */
export function gridSizeOf(model: tf.LayersModel): number {
  const shape = model.outputs[0].shape;
  return shape[1] as number;
}

/** Number of classes the model scores, read off its output shape. */
export function numClassesOf(model: tf.LayersModel): number {
  const shape = model.outputs[0].shape;
  return (shape[3] as number) - 5;
}

/** Input side length the model expects, read off its input shape. */
export function inputSizeOf(model: tf.LayersModel): number {
  const shape = model.inputs[0].shape;
  return shape[1] as number;
}

/**
 * Turn one frame's raw grid output into detections.  Confidence is
 * objectness times the best class score; cells below the threshold stay
 * silent.  Both factors come out of sigmoids, so every coordinate and
 * confidence is guaranteed to lie in (0, 1).
 */
export function decodeGrid(
  grid: Float32Array,
  gridSize: number,
  numClasses: number,
  confThreshold: number,
): Detection[] {
  const channels = 5 + numClasses;
  const detections: Detection[] = [];
  for (let row = 0; row < gridSize; row++) {
    for (let col = 0; col < gridSize; col++) {
      const base = (row * gridSize + col) * channels;
      const obj = grid[base];
      let bestClass = 0;
      let bestScore = grid[base + 5];
      for (let c = 1; c < numClasses; c++) {
        const score = grid[base + 5 + c];
        if (score > bestScore) {
          bestScore = score;
          bestClass = c;
        }
      }
      const confidence = obj * bestScore;
      if (confidence < confThreshold) continue;
      detections.push({
        classId: bestClass,
        box: {
          cx: (col + grid[base + 1]) / gridSize,
          cy: (row + grid[base + 2]) / gridSize,
          w: grid[base + 3],
          h: grid[base + 4],
        },
        confidence,
      });
    }
  }
  detections.sort(
    (a, b) => b.confidence - a.confidence || a.classId - b.classId || a.box.cx - b.box.cx,
  );
  return detections;
}

/** Persist a model as model.json + weights.bin inside `dir`. */
export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = tf.io.CompositeArrayBuffer.join(artifacts.weightData);
      const modelJson = {
        modelTopology: artifacts.modelTopology,
        format: artifacts.format,
        weightsManifest: [{ paths: [WEIGHTS_BIN], weights: artifacts.weightSpecs }],
      };
      fs.writeFileSync(path.join(dir, MODEL_JSON), JSON.stringify(modelJson));
      fs.writeFileSync(path.join(dir, WEIGHTS_BIN), Buffer.from(weightData));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: "JSON" as const,
        },
      };
    }),
  );
}

/** Load a model saved by `saveModel`.  `weights` may be the directory or the model.json path. */
export async function loadModel(weights: string): Promise<tf.LayersModel> {
  const jsonPath = weights.endsWith(".json") ? weights : path.join(weights, MODEL_JSON);
  const binPath = path.join(path.dirname(jsonPath), WEIGHTS_BIN);
  let modelJson: {
    modelTopology: unknown;
    weightsManifest: { weights: tf.io.WeightsManifestEntry[] }[];
  };
  let weightBytes: Buffer;
  try {
    modelJson = JSON.parse(fs.readFileSync(jsonPath, "utf8"));
    weightBytes = fs.readFileSync(binPath);
  } catch (err) {
    throw new InputError(`cannot read weights at ${weights}: ${(err as Error).message}`);
  }
  if (typeof modelJson !== "object" || modelJson === null || !("modelTopology" in modelJson)) {
    throw new InputError(`cannot read weights at ${weights}: not a saved model graph`);
  }
  const weightData = new ArrayBuffer(weightBytes.byteLength);
  new Uint8Array(weightData).set(weightBytes);
  const artifacts: tf.io.ModelArtifacts = {
    modelTopology: modelJson.modelTopology as object,
    weightSpecs: modelJson.weightsManifest[0].weights,
    weightData,
  };
  try {
    return await tf.loadLayersModel(tf.io.fromMemory(artifacts));
  } catch (err) {
    throw new InputError(`cannot read weights at ${weights}: ${(err as Error).message}`);
  }
}
