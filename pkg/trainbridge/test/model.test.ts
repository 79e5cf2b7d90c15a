import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import * as tf from "@tensorflow/tfjs";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { InputError } from "../src/errors.js";
import {
  buildModel,
  decodeGrid,
  gridSizeOf,
  inputSizeOf,
  loadModel,
  numClassesOf,
  saveModel,
} from "../src/model.js";

let tmp: string;

beforeAll(async () => {
  await tf.setBackend("cpu");
  await tf.ready();
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "tb-model-"));
});

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

describe("buildModel", () => {
  it("shrinks the input by the grid stride and widens to 5 + classes channels", () => {
    const model = buildModel(64, 5, 0);
    expect(model.outputs[0].shape).toEqual([null, 4, 4, 10]);
    expect(gridSizeOf(model)).toBe(4);
    expect(numClassesOf(model)).toBe(5);
    expect(inputSizeOf(model)).toBe(64);
    model.dispose();
  });

  it("rejects an input size off the stride", () => {
    expect(() => buildModel(50, 5, 0)).toThrow(InputError);
  });

  it("initializes identically for identical seeds", () => {
    const a = buildModel(32, 2, 7);
    const b = buildModel(32, 2, 7);
    const wa = a.getWeights().map((t) => [...t.dataSync()]);
    const wb = b.getWeights().map((t) => [...t.dataSync()]);
    expect(wa).toEqual(wb);
    a.dispose();
    b.dispose();
  });

  it("initializes differently for different seeds", () => {
    const a = buildModel(32, 2, 7);
    const b = buildModel(32, 2, 8);
    const wa = a.getWeights()[0].dataSync();
    const wb = b.getWeights()[0].dataSync();
    expect([...wa]).not.toEqual([...wb]);
    a.dispose();
    b.dispose();
  });
});

describe("decodeGrid", () => {
  // 2x2 grid, 1 class -> 6 channels per cell.
  const GRID = 2;
  const CLASSES = 1;
  const CH = 6;

  function makeGrid(cells: number[][]): Float32Array {
    const grid = new Float32Array(GRID * GRID * CH);
    cells.forEach((cell, i) => grid.set(cell, i * CH));
    return grid;
  }

  it("emits one detection per confident cell with cell-relative decoding", () => {
    const grid = makeGrid([
      [0.8, 0.5, 0.5, 0.2, 0.4, 0.9], // row 0 col 0: conf 0.72
      [0.1, 0.5, 0.5, 0.2, 0.4, 0.9], // conf 0.09, silent
      [0.6, 0.0, 1.0, 0.3, 0.1, 0.5], // row 1 col 0: conf 0.30
      [0, 0, 0, 0, 0, 0],
    ]);
    const detections = decodeGrid(grid, GRID, CLASSES, 0.25);
    expect(detections).toHaveLength(2);
    expect(detections[0].confidence).toBeCloseTo(0.72, 6);
    expect(detections[0].box.cx).toBeCloseTo(0.25, 6);
    expect(detections[0].box.cy).toBeCloseTo(0.25, 6);
    expect(detections[0].box.w).toBeCloseTo(0.2, 6);
    expect(detections[0].box.h).toBeCloseTo(0.4, 6);
    expect(detections[1].confidence).toBeCloseTo(0.3, 6);
    expect(detections[1].box.cx).toBeCloseTo(0.0, 6);
    expect(detections[1].box.cy).toBeCloseTo(1.0, 6);
  });

  it("sorts detections by descending confidence", () => {
    const grid = makeGrid([
      [0.5, 0.5, 0.5, 0.1, 0.1, 0.9],
      [0.9, 0.5, 0.5, 0.1, 0.1, 0.9],
      [0, 0, 0, 0, 0, 0],
      [0, 0, 0, 0, 0, 0],
    ]);
    const confs = decodeGrid(grid, GRID, CLASSES, 0.1).map((d) => d.confidence);
    expect(confs[0]).toBeGreaterThan(confs[1]);
  });

  it("stays silent everywhere below the threshold", () => {
    const grid = new Float32Array(GRID * GRID * CH);
    expect(decodeGrid(grid, GRID, CLASSES, 0.25)).toEqual([]);
  });

  it("picks the best-scoring class", () => {
    const channels = 5 + 3;
    const grid = new Float32Array(channels);
    grid.set([0.9, 0.5, 0.5, 0.1, 0.1, 0.2, 0.7, 0.4]);
    const detections = decodeGrid(grid, 1, 3, 0.25);
    expect(detections).toHaveLength(1);
    expect(detections[0].classId).toBe(1);
    expect(detections[0].confidence).toBeCloseTo(0.9 * 0.7, 6);
  });
});

describe("saveModel / loadModel", () => {
  it("round-trips weights bit-exactly through model.json + weights.bin", async () => {
    const model = buildModel(32, 2, 3);
    const dir = path.join(tmp, "roundtrip");
    await saveModel(model, dir);
    expect(fs.existsSync(path.join(dir, "model.json"))).toBe(true);
    expect(fs.existsSync(path.join(dir, "weights.bin"))).toBe(true);

    const loaded = await loadModel(dir);
    const input = tf.linspace(0, 1, 32 * 32).reshape([1, 32, 32, 1]);
    const expected = (model.predict(input) as tf.Tensor).dataSync();
    const actual = (loaded.predict(input) as tf.Tensor).dataSync();
    expect([...actual]).toEqual([...expected]);
    input.dispose();
    model.dispose();
    loaded.dispose();
  });

  it("accepts the model.json path as well as the directory", async () => {
    const model = buildModel(32, 2, 1);
    const dir = path.join(tmp, "jsonpath");
    await saveModel(model, dir);
    const loaded = await loadModel(path.join(dir, "model.json"));
    expect(inputSizeOf(loaded)).toBe(32);
    model.dispose();
    loaded.dispose();
  });

  it("rejects a missing weights directory", async () => {
    await expect(loadModel(path.join(tmp, "absent"))).rejects.toThrow(InputError);
  });

  it("rejects a directory holding something that is not a model", async () => {
    const dir = path.join(tmp, "garbage");
    fs.mkdirSync(dir, { recursive: true });
    fs.writeFileSync(path.join(dir, "model.json"), "{\"x\": 1}");
    fs.writeFileSync(path.join(dir, "weights.bin"), "junk");
    await expect(loadModel(dir)).rejects.toThrow(InputError);
  });
});
