/**
 * Frozen feature-extraction backbones.
 *
 * Two kinds of backbone identifier:
 *
 * - `random-cnn-seed<N>`: a small frozen convolutional network whose
 *   weights are drawn deterministically from the portable generator
 *   in rng.ts (He-scaled normals).  Needs no downloads, so it works
 *   in offline environments, and random convolutional features are a
 *   serviceable frozen representation for linear probes.
 * - `file://<path>`: a locally saved TensorFlow.js layers model; its
 *   output (flattened) is used as the feature vector.  Use this to
 *   plug in a real pre-trained backbone when one is available on disk.
 *
 * Images enter as 32x32x3 uint8 channel-last; preprocessing is
 * x / 255 - 0.5 (recorded in the export manifest).
 */

import * as tf from '@tensorflow/tfjs';
import { normalStream } from './rng.js';
import { IMAGE_BYTES, IMAGE_CHANNELS, IMAGE_SIDE } from './images.js';

export interface Backbone {
  id: string;
  featureWidth: number;
  normalization: string;
  /** Extract features for a batch of channel-last uint8 images. */
  extract(images: Uint8Array[]): Promise<Float32Array[]>;
  dispose(): void;
}

function seededTensor(seed: bigint, shape: number[], fanIn: number): tf.Tensor {
  const count = shape.reduce((a, b) => a * b, 1);
  const values = normalStream(seed, count);
  const scale = Math.sqrt(2 / fanIn);
  const scaled = new Float32Array(count);
  for (let i = 0; i < count; i++) scaled[i] = values[i] * scale;
  return tf.tensor(scaled, shape);
}

function toInputTensor(images: Uint8Array[]): tf.Tensor4D {
  const n = images.length;
  const data = new Float32Array(n * IMAGE_BYTES);
  for (let i = 0; i < n; i++) {
    const img = images[i];
    for (let p = 0; p < IMAGE_BYTES; p++) data[i * IMAGE_BYTES + p] = img[p] / 255 - 0.5;
  }
  return tf.tensor4d(data, [n, IMAGE_SIDE, IMAGE_SIDE, IMAGE_CHANNELS]);
}

async function batched(
  images: Uint8Array[],
  batchSize: number,
  run: (x: tf.Tensor4D) => tf.Tensor,
): Promise<Float32Array[]> {
  const out: Float32Array[] = [];
  for (let start = 0; start < images.length; start += batchSize) {
    const chunk = images.slice(start, start + batchSize);
    const features = tf.tidy(() => run(toInputTensor(chunk)));
    const flat = (await features.data()) as Float32Array;
    const width = features.shape[features.shape.length - 1] as number;
    features.dispose();
    for (let i = 0; i < chunk.length; i++) {
      out.push(flat.slice(i * width, (i + 1) * width));
    }
  }
  return out;
}

class RandomCnnBackbone implements Backbone {
  id: string;
  featureWidth: number;
  normalization = 'x/255 - 0.5';
  private kernels: tf.Tensor[];
  private projection: tf.Tensor;

  constructor(seed: number, featureWidth: number) {
    this.id = `random-cnn-seed${seed}`;
    this.featureWidth = featureWidth;
    const base = BigInt(seed) * 7919n;
    this.kernels = [
      seededTensor(base + 1n, [3, 3, 3, 32], 3 * 3 * 3),
      seededTensor(base + 2n, [3, 3, 32, 64], 3 * 3 * 32),
    ];
    this.projection = seededTensor(base + 3n, [64, featureWidth], 64);
  }

  extract(images: Uint8Array[]): Promise<Float32Array[]> {
    return batched(images, 128, x => {
      let h: tf.Tensor = tf.relu(tf.conv2d(x, this.kernels[0] as tf.Tensor4D, 2, 'same'));
      h = tf.relu(tf.conv2d(h as tf.Tensor4D, this.kernels[1] as tf.Tensor4D, 2, 'same'));
      h = tf.mean(h, [1, 2]); // global average pool -> [n, 64]
      return tf.matMul(h as tf.Tensor2D, this.projection as tf.Tensor2D);
    });
  }

  dispose(): void {
    this.kernels.forEach(k => k.dispose());
    this.projection.dispose();
  }
}

class SavedModelBackbone implements Backbone {
  id: string;
  featureWidth: number;
  normalization = 'x/255 - 0.5';

  private constructor(id: string, private model: tf.LayersModel, featureWidth: number) {
    this.id = id;
    this.featureWidth = featureWidth;
  }

  static async load(url: string): Promise<SavedModelBackbone> {
    const model = await tf.loadLayersModel(url);
    const outShape = model.outputs[0].shape;
    const width = outShape.slice(1).reduce((a: number, b) => a * (b ?? 1), 1);
    return new SavedModelBackbone(url, model, width);
  }

  extract(images: Uint8Array[]): Promise<Float32Array[]> {
    return batched(images, 64, x => {
      const y = this.model.predict(x) as tf.Tensor;
      return tf.reshape(y, [x.shape[0], this.featureWidth]);
    });
  }

  dispose(): void {
    this.model.dispose();
  }
}

export async function loadBackbone(id: string, featureWidth = 64): Promise<Backbone> {
  const match = /^random-cnn-seed(\d+)$/.exec(id);
  if (match) return new RandomCnnBackbone(Number(match[1]), featureWidth);
  if (id.startsWith('file://')) return SavedModelBackbone.load(id);
  throw new Error(
    `unknown backbone ${JSON.stringify(id)}: expected random-cnn-seed<N> or file://<path>`,
  );
}
