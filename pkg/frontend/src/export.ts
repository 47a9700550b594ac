/**
 * Feature export: images -> frozen backbone -> embedding file.
 *
 * The export is idempotent (same manifest, byte-identical file) and
 * atomic (temp file + rename; a crash never leaves a partial file).
 * A JSON manifest is written next to the embedding file recording
 * exactly how the features were produced.
 */

import { promises as fs } from 'fs';
import { dirname, join } from 'path';
import { loadBackbone } from './backbone.js';
import { readCifarFile, syntheticImages, type CifarFormat, type ImageDataset } from './images.js';
import { writeEmbeddingsFile } from './gemb.js';

export interface ExportSpec {
  backbone: string;
  featureWidth: number;
  dataset: string; // 'synthetic' | path to a CIFAR binary batch file
  cifarFormat?: CifarFormat;
  /** Cap on records read from a CIFAR file. */
  limit?: number;
  /** Synthetic dataset shape. */
  classes?: number;
  perClass?: number;
  seed?: number;
  outPath: string;
}

export interface ExportManifest {
  backbone: string;
  dataset: string;
  featureWidth: number;
  sampleCount: number;
  classCount: number;
  normalization: string;
  outPath: string;
}

async function loadDataset(spec: ExportSpec): Promise<ImageDataset> {
  if (spec.dataset === 'synthetic') {
    return syntheticImages(spec.classes ?? 10, spec.perClass ?? 50, spec.seed ?? 0);
  }
  return readCifarFile(spec.dataset, spec.cifarFormat ?? 'cifar10', spec.limit);
}

export async function exportFeatures(spec: ExportSpec): Promise<ExportManifest> {
  const data = await loadDataset(spec);
  if (data.images.length === 0) throw new Error(`${spec.dataset}: no images to export`);
  const backbone = await loadBackbone(spec.backbone, spec.featureWidth);
  try {
    const features = await backbone.extract(data.images);
    const cols = backbone.featureWidth;
    const values = new Float32Array(features.length * cols);
    features.forEach((row, i) => values.set(row, i * cols));
    await fs.mkdir(dirname(spec.outPath), { recursive: true });
    await writeEmbeddingsFile(spec.outPath, {
      rows: features.length,
      cols,
      values,
      labels: data.labels,
    });
    const manifest: ExportManifest = {
      backbone: backbone.id,
      dataset: spec.dataset,
      featureWidth: cols,
      sampleCount: features.length,
      classCount: new Set(data.labels).size,
      normalization: backbone.normalization,
      outPath: spec.outPath,
    };
    const manifestPath = join(
      dirname(spec.outPath),
      `${spec.outPath.split('/').pop()!.replace(/\.gemb$/, '')}.manifest.json`,
    );
    await fs.writeFile(manifestPath, JSON.stringify(manifest, null, 2) + '\n');
    return manifest;
  } finally {
    backbone.dispose();
  }
}
