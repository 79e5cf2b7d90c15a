import { describe, expect, it } from "vitest";

import { ConfigError } from "../src/errors.js";
import {
  DEFAULT_SPEC,
  hyperparameterLines,
  makeSpec,
  specLogText,
  validateSpec,
} from "../src/spec.js";

describe("DEFAULT_SPEC", () => {
  it("carries the canonical training defaults", () => {
    expect(DEFAULT_SPEC).toEqual({
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
    });
  });
});

describe("hyperparameterLines", () => {
  it("byte-matches the nine canonical log lines for the default spec", () => {
    expect(hyperparameterLines(makeSpec("data/dataset.yaml"))).toEqual([
      "optimiser: SGD",
      "batch size: 16",
      "initial learning rate: 0.01",
      "momentum: 0.937",
      "weight decay: 0.0005",
      "IoU: 0.7",
      "warmup epochs: 3.0",
      "warmup momentum: 0.8",
      "NMS: False",
    ]);
  });

  it("keeps one decimal place on integral floats", () => {
    const spec = makeSpec("d.yaml", { warmupEpochs: 5 });
    expect(hyperparameterLines(spec)[6]).toBe("warmup epochs: 5.0");
  });

  it("prints fractional overrides verbatim", () => {
    const spec = makeSpec("d.yaml", { lr0: 0.001, warmupEpochs: 2.5 });
    const lines = hyperparameterLines(spec);
    expect(lines[2]).toBe("initial learning rate: 0.001");
    expect(lines[6]).toBe("warmup epochs: 2.5");
  });

  it("renders the NMS flag in title case", () => {
    expect(hyperparameterLines(makeSpec("d.yaml", { nms: true }))[8]).toBe("NMS: True");
  });
});

describe("specLogText", () => {
  it("starts with the nine hyperparameter lines and appends run shape", () => {
    const spec = makeSpec("some/dataset.yaml", { epochs: 1 });
    const lines = specLogText(spec).split("\n");
    expect(lines.slice(0, 9)).toEqual(hyperparameterLines(spec));
    expect(lines).toContain("epochs: 1");
    expect(lines).toContain("patience: 50");
    expect(lines).toContain("image size: 640");
    expect(lines).toContain("dataset: some/dataset.yaml");
    expect(specLogText(spec).endsWith("\n")).toBe(true);
  });
});

describe("validateSpec", () => {
  it("accepts the defaults", () => {
    expect(() => validateSpec(makeSpec("d.yaml"))).not.toThrow();
  });

  it.each([
    ["epochs", { epochs: 0 }],
    ["epochs", { epochs: -3 }],
    ["epochs", { epochs: 1.5 }],
    ["patience", { patience: -1 }],
    ["batch size", { batchSize: 0 }],
    ["learning rate", { lr0: 0 }],
    ["learning rate", { lr0: -0.1 }],
    ["momentum", { momentum: 1 }],
    ["momentum", { momentum: -0.2 }],
    ["weight decay", { weightDecay: -1e-4 }],
    ["IoU", { iou: 0 }],
    ["IoU", { iou: 1 }],
    ["warmup epochs", { warmupEpochs: -1 }],
    ["warmup momentum", { warmupMomentum: 1.2 }],
    ["image size", { imageSize: 16 }],
    ["image size", { imageSize: 640.5 }],
  ])("rejects a bad %s", (_label, override) => {
    expect(() => makeSpec("d.yaml", override)).toThrow(ConfigError);
  });
});
