/**
 * JSONL dataset manifest reader. Line 1 is a header object with
 * format_version / config / samples; every following line describes one
 * clean/corrupt pair with paths relative to the manifest file.
 */

import * as fs from "fs";
import * as path from "path";

export interface ManifestEntry {
  index: number;
  slice: number;
  split: "train" | "test";
  clean: string;
  corrupt: string;
  schedule: Array<{ theta_deg: number; tx: number; ty: number }>;
  metrics: { psnr_db: number; ssim: number; artifact_power: number };
}

export interface Manifest {
  formatVersion: number;
  config: Record<string, unknown>;
  root: string;
  entries: ManifestEntry[];
}

export function readManifest(manifestPath: string): Manifest {
  const lines = fs
    .readFileSync(manifestPath, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${manifestPath}: empty manifest`);
  }
  const header = JSON.parse(lines[0]);
  if (header.format_version !== 1) {
    throw new Error(`${manifestPath}: unsupported format version ${header.format_version}`);
  }
  const entries = lines.slice(1).map((line) => JSON.parse(line) as ManifestEntry);
  return {
    formatVersion: header.format_version,
    config: header.config ?? {},
    root: path.dirname(path.resolve(manifestPath)),
    entries,
  };
}

export function resolveEntryPaths(manifest: Manifest, entry: ManifestEntry): { clean: string; corrupt: string } {
  return {
    clean: path.join(manifest.root, entry.clean),
    corrupt: path.join(manifest.root, entry.corrupt),
  };
}
