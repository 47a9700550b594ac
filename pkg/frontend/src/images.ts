/**
 * Image dataset loading.
 *
 * Two sources, both yielding 32x32 RGB images as flat Uint8Arrays in
 * channel-last order (h, w, c):
 *
 * - the standard CIFAR binary record layout (`data_batch_*.bin` /
 *   `train.bin`): per record one label byte (CIFAR-100: coarse then
 *   fine label) followed by 3072 pixel bytes in planar RGB
 *   (channel-first) order, converted here to channel-last;
 * - a deterministic synthetic generator producing class-separable
 *   "images" (per-class base pattern plus pixel noise) for
 *   environments without the real dataset on disk.
 */

import { promises as fs } from 'fs';
import { uniformStream } from './rng.js';

export const IMAGE_SIDE = 32;
export const IMAGE_CHANNELS = 3;
const PIXELS = IMAGE_SIDE * IMAGE_SIDE;
export const IMAGE_BYTES = PIXELS * IMAGE_CHANNELS;

export interface ImageDataset {
  /** length n, each IMAGE_BYTES long, channel-last. */
  images: Uint8Array[];
  labels: Uint32Array;
}

export type CifarFormat = 'cifar10' | 'cifar100';

function planarToChannelLast(planar: Uint8Array): Uint8Array {
  const out = new Uint8Array(IMAGE_BYTES);
  for (let p = 0; p < PIXELS; p++) {
    out[3 * p] = planar[p];
    out[3 * p + 1] = planar[PIXELS + p];
    out[3 * p + 2] = planar[2 * PIXELS + p];
  }
  return out;
}

/** Read one CIFAR binary batch file, optionally capped at `limit` records. */
export async function readCifarFile(
  path: string,
  format: CifarFormat,
  limit?: number,
): Promise<ImageDataset> {
  const data = await fs.readFile(path);
  const labelBytes = format === 'cifar10' ? 1 : 2; // cifar100: coarse, fine
  const record = labelBytes + IMAGE_BYTES;
  if (data.length % record !== 0) {
    throw new Error(`${path}: size ${data.length} is not a multiple of ${record}`);
  }
  let n = data.length / record;
  if (limit !== undefined) n = Math.min(n, limit);
  const images: Uint8Array[] = [];
  const labels = new Uint32Array(n);
  for (let i = 0; i < n; i++) {
    const off = i * record;
    labels[i] = data[off + labelBytes - 1]; // fine label for cifar100
    images.push(planarToChannelLast(new Uint8Array(data.subarray(off + labelBytes, off + record))));
  }
  return { images, labels };
}

/**
 * Deterministic class-separable synthetic images.
 *
 * Class c's base pattern is a fixed uniform-random image (substream
 * seed*1000 + c); each sample blends the pattern with per-pixel noise.
 * Lower `noise` means easier classes.
 */
export function syntheticImages(
  classes: number,
  perClass: number,
  seed: number,
  noise = 0.35,
): ImageDataset {
  const images: Uint8Array[] = [];
  const labels = new Uint32Array(classes * perClass);
  for (let c = 0; c < classes; c++) {
    const base = uniformStream(BigInt(seed * 1000 + c), IMAGE_BYTES);
    for (let s = 0; s < perClass; s++) {
      const jitter = uniformStream(BigInt(seed * 1000 + c), IMAGE_BYTES, (s + 1) * IMAGE_BYTES);
      const img = new Uint8Array(IMAGE_BYTES);
      for (let p = 0; p < IMAGE_BYTES; p++) {
        const v = (1 - noise) * base[p] + noise * jitter[p];
        img[p] = Math.min(255, Math.floor(v * 256));
      }
      images.push(img);
      labels[c * perClass + s] = c;
    }
  }
  return { images, labels };
}
