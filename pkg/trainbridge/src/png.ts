import * as fs from "node:fs";
import { PNG } from "pngjs";

import { InputError } from "./errors.js";

/** A decoded image as row-major grayscale floats in [0, 1]. */
export interface GrayImage {
  width: number;
  height: number;
  pixels: Float32Array;
}

/** Decode a PNG file to grayscale via the ITU-R BT.601 luma weights. */
export function readPngGray(path: string): GrayImage {
  let buffer: Buffer;
  try {
    buffer = fs.readFileSync(path);
  } catch (err) {
    throw new InputError(`cannot read image ${path}: ${(err as Error).message}`);
  }
  let png: PNG;
  try {
    png = PNG.sync.read(buffer);
  } catch (err) {
    throw new InputError(`cannot decode PNG ${path}: ${(err as Error).message}`);
  }
  const { width, height, data } = png;
  const pixels = new Float32Array(width * height);
  for (let i = 0; i < width * height; i++) {
    const r = data[i * 4];
    const g = data[i * 4 + 1];
    const b = data[i * 4 + 2];
    pixels[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255;
  }
  return { width, height, pixels };
}

/**
 * Average-pool a grayscale image down to size x size.  The source must be
 * square and an integer multiple of the target, which holds for the frames
 * this bridge consumes (640 -> any divisor).
 */
export function downsample(image: GrayImage, size: number): Float32Array {
  if (image.width !== image.height) {
    throw new InputError(`expected a square image, got ${image.width}x${image.height}`);
  }
  if (image.width % size !== 0) {
    throw new InputError(`image side ${image.width} is not a multiple of ${size}`);
  }
  const factor = image.width / size;
  const out = new Float32Array(size * size);
  const norm = 1 / (factor * factor);
  for (let row = 0; row < size; row++) {
    for (let col = 0; col < size; col++) {
      let sum = 0;
      for (let dy = 0; dy < factor; dy++) {
        const srcRow = row * factor + dy;
        const base = srcRow * image.width + col * factor;
        for (let dx = 0; dx < factor; dx++) {
          sum += image.pixels[base + dx];
        }
      }
      out[row * size + col] = sum * norm;
    }
  }
  return out;
}
