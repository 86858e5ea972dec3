/**
 * Reader/writer for the raw-f32 ".mrif" container produced by the Python
 * pipeline: little-endian magic "MRIF", u32 grid size N, u32 channel count,
 * then N*N*channels float32 values row-major. Reads must be bit-exact.
 */

import * as fs from "fs";
import * as path from "path";

const MAGIC = "MRIF";
const HEADER_BYTES = 12;

export interface MrifStack {
  n: number;
  channels: number;
  /** One Float32Array of length n*n per channel, row-major. */
  planes: Float32Array[];
}

export function readMrif(filePath: string): MrifStack {
  const raw = fs.readFileSync(filePath);
  if (raw.length < HEADER_BYTES) {
    throw new Error(`${filePath}: shorter than the 12-byte header`);
  }
  if (raw.toString("latin1", 0, 4) !== MAGIC) {
    throw new Error(`${filePath}: not a MRIF file`);
  }
  const n = raw.readUInt32LE(4);
  const channels = raw.readUInt32LE(8);
  const expected = HEADER_BYTES + 4 * n * n * channels;
  if (raw.length !== expected) {
    throw new Error(`${filePath}: expected ${expected} bytes, got ${raw.length}`);
  }
  const planes: Float32Array[] = [];
  for (let c = 0; c < channels; c++) {
    const plane = new Float32Array(n * n);
    const base = HEADER_BYTES + 4 * n * n * c;
    for (let i = 0; i < n * n; i++) {
      plane[i] = raw.readFloatLE(base + 4 * i);
    }
    planes.push(plane);
  }
  return { n, channels, planes };
}

export function readImage(filePath: string): { n: number; data: Float32Array } {
  const stack = readMrif(filePath);
  if (stack.channels !== 1) {
    throw new Error(`${filePath}: expected a 1-channel image, got ${stack.channels} channels`);
  }
  return { n: stack.n, data: stack.planes[0] };
}

export function writeImage(filePath: string, n: number, data: Float32Array): void {
  if (data.length !== n * n) {
    throw new Error(`image data length ${data.length} does not match n=${n}`);
  }
  const buf = Buffer.alloc(HEADER_BYTES + 4 * n * n);
  buf.write(MAGIC, 0, "latin1");
  buf.writeUInt32LE(n, 4);
  buf.writeUInt32LE(1, 8);
  for (let i = 0; i < data.length; i++) {
    buf.writeFloatLE(data[i], HEADER_BYTES + 4 * i);
  }
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, buf);
}
