/**
 * Embedding file format writer/reader (little-endian, see the
 * training toolkit's docs/formats.md for the normative layout):
 *
 *   "GEMB" | u32 version | u64 rows | u64 cols | u8 dtype (0=f32, 1=f64)
 *   payload (row-major) | "GLBL" | u64 rows | u32 labels
 */

import { promises as fs } from 'fs';
import { dirname, join } from 'path';

const EMBED_MAGIC = 0x424d4547; // "GEMB" read as LE u32
const LABEL_MAGIC = 0x4c424c47; // "GLBL"
const EMBED_VERSION = 1;

export interface EmbeddingData {
  rows: number;
  cols: number;
  /** Row-major, length rows*cols. */
  values: Float32Array | Float64Array;
  labels: Uint32Array;
}

export function encodeEmbeddings(data: EmbeddingData): Buffer {
  const { rows, cols, values, labels } = data;
  if (values.length !== rows * cols) {
    throw new Error(`payload length ${values.length} != ${rows}x${cols}`);
  }
  if (labels.length !== rows) {
    throw new Error(`label count ${labels.length} != rows ${rows}`);
  }
  const f32 = values instanceof Float32Array;
  const itemSize = f32 ? 4 : 8;
  const size = 4 + 4 + 8 + 8 + 1 + rows * cols * itemSize + 4 + 8 + 4 * rows;
  const buf = Buffer.alloc(size);
  let pos = 0;
  pos = buf.writeUInt32LE(EMBED_MAGIC, pos);
  pos = buf.writeUInt32LE(EMBED_VERSION, pos);
  pos = buf.writeBigUInt64LE(BigInt(rows), pos);
  pos = buf.writeBigUInt64LE(BigInt(cols), pos);
  pos = buf.writeUInt8(f32 ? 0 : 1, pos);
  Buffer.from(values.buffer, values.byteOffset, values.byteLength).copy(buf, pos);
  pos += values.byteLength;
  pos = buf.writeUInt32LE(LABEL_MAGIC, pos);
  pos = buf.writeBigUInt64LE(BigInt(rows), pos);
  Buffer.from(labels.buffer, labels.byteOffset, labels.byteLength).copy(buf, pos);
  return buf;
}

export function decodeEmbeddings(buf: Buffer): EmbeddingData {
  const need = (pos: number, n: number, what: string) => {
    if (pos + n > buf.length) throw new Error(`file truncated while reading ${what}`);
  };
  need(0, 25, 'header');
  if (buf.readUInt32LE(0) !== EMBED_MAGIC) throw new Error('not an embedding file');
  const version = buf.readUInt32LE(4);
  if (version !== EMBED_VERSION) throw new Error(`unsupported version ${version}`);
  const rows = Number(buf.readBigUInt64LE(8));
  const cols = Number(buf.readBigUInt64LE(16));
  const code = buf.readUInt8(24);
  if (code !== 0 && code !== 1) throw new Error(`unknown dtype code ${code}`);
  const itemSize = code === 0 ? 4 : 8;
  let pos = 25;
  need(pos, rows * cols * itemSize, 'embedding payload');
  const raw = buf.subarray(pos, pos + rows * cols * itemSize);
  // copy out: the file buffer's byte offset may not be element-aligned
  const values = code === 0
    ? new Float32Array(new Uint8Array(raw).buffer)
    : new Float64Array(new Uint8Array(raw).buffer);
  pos += raw.length;
  need(pos, 12, 'label header');
  if (buf.readUInt32LE(pos) !== LABEL_MAGIC) throw new Error('missing label block');
  const labelRows = Number(buf.readBigUInt64LE(pos + 4));
  if (labelRows !== rows) throw new Error(`label rows ${labelRows} != rows ${rows}`);
  pos += 12;
  need(pos, 4 * rows, 'labels');
  const labels = new Uint32Array(new Uint8Array(buf.subarray(pos, pos + 4 * rows)).buffer);
  return { rows, cols, values, labels };
}

/** Write atomically: temp file in the same directory, then rename. */
export async function writeEmbeddingsFile(path: string, data: EmbeddingData): Promise<void> {
  const tmp = join(dirname(path), `.${process.pid}.${Date.now()}.gemb.tmp`);
  await fs.writeFile(tmp, encodeEmbeddings(data));
  await fs.rename(tmp, path);
}

export async function readEmbeddingsFile(path: string): Promise<EmbeddingData> {
  return decodeEmbeddings(await fs.readFile(path));
}
