#!/usr/bin/env node
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { ConfigError, InputError, ParseError } from "./errors.js";
import { predict, DEFAULT_CONF_THRESHOLD } from "./predict.js";
import { makeSpec, TrainSpec } from "./spec.js";
import { train } from "./train.js";

const USAGE = `usage:
  trainbridge train --dataset <dataset.yaml> --out <run-dir> [options]
  trainbridge predict --weights <run-dir|model.json> --images <dir> --out <file> [--conf F]

train options:
  --epochs N --batch-size N --patience N --lr0 F --momentum F
  --weight-decay F --iou F --warmup-epochs F --warmup-momentum F
  --nms --image-size N --partition NAME --split-list FILE --seed N --quiet
`;

class UsageError extends Error {}

function intArg(value: string, name: string): number {
  if (!/^[+-]?\d+$/.test(value)) {
    throw new ConfigError(`${name} expects an integer, got ${JSON.stringify(value)}`);
  }
  return parseInt(value, 10);
}

function floatArg(value: string, name: string): number {
  const parsed = Number(value);
  if (value === "" || Number.isNaN(parsed)) {
    throw new ConfigError(`${name} expects a number, got ${JSON.stringify(value)}`);
  }
  return parsed;
}

async function runTrain(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      dataset: { type: "string" },
      out: { type: "string" },
      epochs: { type: "string" },
      "batch-size": { type: "string" },
      patience: { type: "string" },
      lr0: { type: "string" },
      momentum: { type: "string" },
      "weight-decay": { type: "string" },
      iou: { type: "string" },
      "warmup-epochs": { type: "string" },
      "warmup-momentum": { type: "string" },
      nms: { type: "boolean" },
      "image-size": { type: "string" },
      partition: { type: "string" },
      "split-list": { type: "string" },
      seed: { type: "string" },
      quiet: { type: "boolean" },
    },
  });
  if (values.dataset === undefined || values.out === undefined) {
    throw new UsageError("train requires --dataset and --out");
  }
  const overrides: Partial<Omit<TrainSpec, "dataset">> = {};
  if (values.epochs !== undefined) overrides.epochs = intArg(values.epochs, "--epochs");
  if (values["batch-size"] !== undefined)
    overrides.batchSize = intArg(values["batch-size"], "--batch-size");
  if (values.patience !== undefined) overrides.patience = intArg(values.patience, "--patience");
  if (values.lr0 !== undefined) overrides.lr0 = floatArg(values.lr0, "--lr0");
  if (values.momentum !== undefined) overrides.momentum = floatArg(values.momentum, "--momentum");
  if (values["weight-decay"] !== undefined)
    overrides.weightDecay = floatArg(values["weight-decay"], "--weight-decay");
  if (values.iou !== undefined) overrides.iou = floatArg(values.iou, "--iou");
  if (values["warmup-epochs"] !== undefined)
    overrides.warmupEpochs = floatArg(values["warmup-epochs"], "--warmup-epochs");
  if (values["warmup-momentum"] !== undefined)
    overrides.warmupMomentum = floatArg(values["warmup-momentum"], "--warmup-momentum");
  if (values.nms) overrides.nms = true;
  if (values["image-size"] !== undefined)
    overrides.imageSize = intArg(values["image-size"], "--image-size");

  const spec = makeSpec(values.dataset, overrides);
  const result = await train(spec, {
    outDir: values.out,
    partition: values.partition,
    splitList: values["split-list"],
    seed: values.seed !== undefined ? intArg(values.seed, "--seed") : 0,
    log: values.quiet ? undefined : (line) => console.log(line),
  });
  console.log(
    `trained ${result.epochsRun} epoch(s) on ${result.numExamples} frames, ` +
      `final loss ${result.finalLoss.toFixed(6)}; run saved to ${result.outDir}`,
  );
}

async function runPredict(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      weights: { type: "string" },
      images: { type: "string" },
      out: { type: "string" },
      conf: { type: "string" },
    },
  });
  if (values.weights === undefined || values.images === undefined || values.out === undefined) {
    throw new UsageError("predict requires --weights, --images, and --out");
  }
  const conf =
    values.conf !== undefined ? floatArg(values.conf, "--conf") : DEFAULT_CONF_THRESHOLD;
  const result = await predict(values.weights, values.images, values.out, conf);
  console.log(
    `wrote ${result.numDetections} detection(s) over ${result.numFrames} frame(s) to ${result.outFile}`,
  );
}

/** Entry point; returns the process exit code. */
export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    if (command === "train") {
      await runTrain(rest);
    } else if (command === "predict") {
      await runPredict(rest);
    } else {
      const label = command === undefined ? "no command given" : `unknown command ${command}`;
      throw new UsageError(label);
    }
    return 0;
  } catch (err) {
    const code = (err as NodeJS.ErrnoException).code;
    if (err instanceof UsageError || (typeof code === "string" && code.startsWith("ERR_PARSE_ARGS"))) {
      console.error(`error: ${(err as Error).message}`);
      console.error(USAGE);
      return 2;
    }
    if (err instanceof ConfigError || err instanceof InputError || err instanceof ParseError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const isMain =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  main(process.argv.slice(2)).then(
    (code) => {
      process.exitCode = code;
    },
    (err) => {
      console.error(err);
      process.exitCode = 1;
    },
  );
}
