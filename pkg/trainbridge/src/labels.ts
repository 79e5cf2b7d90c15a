import { ParseError } from "./errors.js";

/** Normalized center-format bounding box. */
export interface Box {
  cx: number;
  cy: number;
  w: number;
  h: number;
}

/** One ground-truth box from a label file. */
export interface LabeledBox {
  classId: number;
  box: Box;
}

/** One predicted box destined for the detections interchange file. */
export interface Detection {
  classId: number;
  box: Box;
  confidence: number;
}

const FIXED = (v: number): string => v.toFixed(6);

/**
 * Parse one label file (`<class> <cx> <cy> <w> <h>` per line, blank lines
 * skipped).  Mirrors the evaluator's reader so both sides agree on what a
 * well-formed file is.
 */
export function parseLabelFile(text: string): LabeledBox[] {
  const out: LabeledBox[] = [];
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const parts = line.split(/\s+/);
    if (parts.length !== 5) {
      throw new ParseError(`expected 5 fields, got ${parts.length}`, i + 1);
    }
    const classId = parseIntStrict(parts[0], i + 1);
    const [cx, cy, w, h] = parts.slice(1).map((p) => parseFloatStrict(p, i + 1));
    if (classId < 0) {
      throw new ParseError(`negative class id: ${classId}`, i + 1);
    }
    out.push({ classId, box: { cx, cy, w, h } });
  }
  return out;
}

/**
 * Render one detections-interchange line:
 * `<frame_id> <class_id> <cx> <cy> <w> <h> <confidence>`, floats fixed
 * 6-decimal.  Frame ids must contain no whitespace.
 */
export function formatDetectionLine(frameId: string, det: Detection): string {
  if (/\s/.test(frameId)) {
    throw new Error(`frame id may not contain whitespace: ${JSON.stringify(frameId)}`);
  }
  const b = det.box;
  return (
    `${frameId} ${det.classId} ` +
    `${FIXED(b.cx)} ${FIXED(b.cy)} ${FIXED(b.w)} ${FIXED(b.h)} ${FIXED(det.confidence)}`
  );
}

/** Render a whole detections file, frames sorted by id, one line per box. */
export function formatDetections(perFrame: Map<string, Detection[]>): string {
  const lines: string[] = [];
  for (const frameId of [...perFrame.keys()].sort()) {
    for (const det of perFrame.get(frameId)!) {
      lines.push(formatDetectionLine(frameId, det));
    }
  }
  return lines.length > 0 ? lines.join("\n") + "\n" : "";
}

/**
 * Parse the detections interchange format back to per-frame lists.  This is
 * a conformance mirror of the evaluator's parser: 7 whitespace-separated
 * fields, `#` comments and blank lines skipped, class id >= 0, confidence
 * within [0, 1].
 */
export function parseDetections(text: string): Map<string, Detection[]> {
  const perFrame = new Map<string, Detection[]>();
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "" || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    if (parts.length !== 7) {
      throw new ParseError(`expected 7 fields, got ${parts.length}`, i + 1);
    }
    const frameId = parts[0];
    const classId = parseIntStrict(parts[1], i + 1);
    const [cx, cy, w, h, conf] = parts.slice(2).map((p) => parseFloatStrict(p, i + 1));
    if (classId < 0) {
      throw new ParseError(`negative class id: ${classId}`, i + 1);
    }
    if (!(conf >= 0 && conf <= 1)) {
      throw new ParseError(`confidence out of [0,1]: ${conf}`, i + 1);
    }
    const det: Detection = { classId, box: { cx, cy, w, h }, confidence: conf };
    const existing = perFrame.get(frameId);
    if (existing === undefined) {
      perFrame.set(frameId, [det]);
    } else {
      existing.push(det);
    }
  }
  return perFrame;
}

function parseIntStrict(token: string, line: number): number {
  if (!/^[+-]?\d+$/.test(token)) {
    throw new ParseError(`malformed integer field: ${JSON.stringify(token)}`, line);
  }
  return parseInt(token, 10);
}

function parseFloatStrict(token: string, line: number): number {
  const value = Number(token);
  if (token === "" || Number.isNaN(value)) {
    throw new ParseError(`malformed float field: ${JSON.stringify(token)}`, line);
  }
  return value;
}
