import * as fs from "node:fs";
import * as path from "node:path";
import YAML from "yaml";

import { InputError } from "./errors.js";

/** Parsed dataset manifest (dataset.yaml). */
export interface Manifest {
  /** Directory the manifest's relative paths hang off (its own directory + `path`). */
  root: string;
  names: string[];
  nc: number;
  counts: Record<string, number>;
  /** partition name -> images directory, relative to root (e.g. "images/train"). */
  partitions: Record<string, string>;
}

const RESERVED_KEYS = new Set(["path", "nc", "names", "counts"]);

/** Load and validate a dataset.yaml manifest. */
export function readManifest(manifestPath: string): Manifest {
  let text: string;
  try {
    text = fs.readFileSync(manifestPath, "utf8");
  } catch (err) {
    throw new InputError(`cannot read manifest ${manifestPath}: ${(err as Error).message}`);
  }
  const data: unknown = YAML.parse(text);
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new InputError(`not a dataset manifest: ${manifestPath}`);
  }
  const record = data as Record<string, unknown>;
  if (!Array.isArray(record.names)) {
    throw new InputError(`not a dataset manifest: ${manifestPath}`);
  }
  const names = record.names.map((n) => String(n));
  const nc = typeof record.nc === "number" ? record.nc : names.length;
  if (nc !== names.length) {
    throw new InputError(
      `manifest ${manifestPath} declares nc=${nc} but lists ${names.length} names`,
    );
  }
  const counts: Record<string, number> = {};
  if (typeof record.counts === "object" && record.counts !== null) {
    for (const [key, value] of Object.entries(record.counts as Record<string, unknown>)) {
      counts[key] = Number(value);
    }
  }
  const partitions: Record<string, string> = {};
  for (const [key, value] of Object.entries(record)) {
    if (!RESERVED_KEYS.has(key) && typeof value === "string") {
      partitions[key] = value;
    }
  }
  if (Object.keys(partitions).length === 0) {
    throw new InputError(`manifest ${manifestPath} lists no image partitions`);
  }
  const base = path.dirname(path.resolve(manifestPath));
  const rel = typeof record.path === "string" ? record.path : ".";
  return { root: path.resolve(base, rel), names, nc, counts, partitions };
}

/** Absolute images directory for one partition. */
export function imagesDir(manifest: Manifest, partition: string): string {
  const rel = manifest.partitions[partition];
  if (rel === undefined) {
    const known = Object.keys(manifest.partitions).sort().join(", ");
    throw new InputError(`manifest has no partition ${JSON.stringify(partition)} (has: ${known})`);
  }
  return path.join(manifest.root, rel);
}

/** Matching labels directory: images/... with the leading segment swapped. */
export function labelsDir(manifest: Manifest, partition: string): string {
  const rel = manifest.partitions[partition];
  if (rel === undefined) {
    const known = Object.keys(manifest.partitions).sort().join(", ");
    throw new InputError(`manifest has no partition ${JSON.stringify(partition)} (has: ${known})`);
  }
  const segments = rel.split("/");
  if (segments[0] !== "images") {
    throw new InputError(
      `cannot derive labels dir: partition path ${JSON.stringify(rel)} does not start with images/`,
    );
  }
  return path.join(manifest.root, ["labels", ...segments.slice(1)].join("/"));
}

/** Sorted PNG frame ids (file stems) found in a directory. */
export function listFrameIds(dir: string): string[] {
  let entries: string[];
  try {
    entries = fs.readdirSync(dir);
  } catch (err) {
    throw new InputError(`cannot list image directory ${dir}: ${(err as Error).message}`);
  }
  return entries
    .filter((name) => name.endsWith(".png"))
    .map((name) => name.slice(0, -".png".length))
    .sort();
}

/** Read one split list file: one frame id per line, blanks skipped. */
export function readSplitList(listPath: string): string[] {
  let text: string;
  try {
    text = fs.readFileSync(listPath, "utf8");
  } catch (err) {
    throw new InputError(`cannot read split list ${listPath}: ${(err as Error).message}`);
  }
  return text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line !== "");
}
