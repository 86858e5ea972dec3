import { execFileSync } from "child_process";
import * as fs from "fs";
import * as path from "path";

export const FIXTURES = path.join(__dirname, "..", "fixtures");

/**
 * Generate a dataset through the primary toolkit's CLI if it is not
 * already on disk; the corrector only ever consumes these files.
 */
export function ensureDataset(name: string, args: string[]): string {
  const dir = path.join(FIXTURES, name);
  const manifest = path.join(dir, "manifest.jsonl");
  if (!fs.existsSync(manifest)) {
    execFileSync("mrishot", ["dataset", ...args, "--out-dir", dir], { stdio: "pipe" });
  }
  return manifest;
}

/** Six tiny pairs for format/manifest tests. */
export function smallDataset(): string {
  return ensureDataset("ds-small", [
    "--n", "32", "--shots", "4", "--trajectory", "random", "--rotation", "5",
    "--coils", "2", "--samples", "6", "--seed", "1234",
  ]);
}

/** The 200-pair toy corpus the training acceptance uses. */
export function toyDataset(): string {
  return ensureDataset("ds200", [
    "--n", "64", "--shots", "8", "--trajectory", "random", "--rotation", "5",
    "--coils", "4", "--samples", "200", "--seed", "77",
  ]);
}
