import { describe, expect, it } from "vitest";

import { batchIndices, encodeTarget } from "../src/data.js";
import { InputError } from "../src/errors.js";
import { LabeledBox } from "../src/labels.js";

const box = (classId: number, cx: number, cy: number, w = 0.1, h = 0.2): LabeledBox => ({
  classId,
  box: { cx, cy, w, h },
});

describe("encodeTarget", () => {
  const GRID = 4;
  const CLASSES = 3;
  const CH = 5 + CLASSES;

  it("places a box in the cell holding its center", () => {
    const target = encodeTarget([box(1, 0.3, 0.7)], GRID, CLASSES);
    // cx*4 = 1.2 -> column 1; cy*4 = 2.8 -> row 2
    const base = (2 * GRID + 1) * CH;
    expect(target[base]).toBe(1);
    expect(target[base + 1]).toBeCloseTo(0.2, 6);
    expect(target[base + 2]).toBeCloseTo(0.8, 6);
    expect(target[base + 3]).toBeCloseTo(0.1, 6);
    expect(target[base + 4]).toBeCloseTo(0.2, 6);
    expect(target[base + 5]).toBe(0);
    expect(target[base + 6]).toBe(1);
    expect(target[base + 7]).toBe(0);
  });

  it("leaves untouched cells all-zero", () => {
    const target = encodeTarget([box(0, 0.3, 0.7)], GRID, CLASSES);
    const occupied = (2 * GRID + 1) * CH;
    for (let i = 0; i < target.length; i++) {
      if (i < occupied || i >= occupied + CH) {
        expect(target[i]).toBe(0);
      }
    }
  });

  it("clamps a center on the top edge of the last cell", () => {
    const target = encodeTarget([box(0, 1.0, 1.0)], GRID, CLASSES);
    const base = (3 * GRID + 3) * CH;
    expect(target[base]).toBe(1);
    expect(target[base + 1]).toBeCloseTo(1, 6);
  });

  it("lets a later box overwrite an earlier one in the same cell", () => {
    const target = encodeTarget([box(0, 0.3, 0.3), box(2, 0.3, 0.3)], GRID, CLASSES);
    const base = (1 * GRID + 1) * CH;
    expect(target[base + 5]).toBe(0);
    expect(target[base + 7]).toBe(1);
  });

  it("rejects a class id beyond the class count", () => {
    expect(() => encodeTarget([box(3, 0.5, 0.5)], GRID, CLASSES)).toThrow(InputError);
  });

  it("encodes an empty frame as all zeros", () => {
    const target = encodeTarget([], GRID, CLASSES);
    expect(target.every((v) => v === 0)).toBe(true);
  });
});

describe("batchIndices", () => {
  it("splits into full batches plus a short tail", () => {
    expect(batchIndices(10, 4)).toEqual([
      [0, 1, 2, 3],
      [4, 5, 6, 7],
      [8, 9],
    ]);
  });

  it("keeps everything in one batch when it fits", () => {
    expect(batchIndices(3, 16)).toEqual([[0, 1, 2]]);
  });

  it("yields nothing for zero examples", () => {
    expect(batchIndices(0, 4)).toEqual([]);
  });
});
