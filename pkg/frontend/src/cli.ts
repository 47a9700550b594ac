#!/usr/bin/env node
/**
 * embed-export: extract frozen-backbone image features into the
 * embedding file format consumed by the analytic-cl CLI.
 *
 *   embed-export --dataset synthetic --classes 10 --per-class 50 \
 *     --backbone random-cnn-seed7 --d-e 64 --out features.gemb
 *
 *   embed-export --dataset /data/cifar-10-batches-bin/data_batch_1.bin \
 *     --cifar-format cifar10 --limit 500 --out cifar.gemb
 */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { exportFeatures } from './export.js';
import type { CifarFormat } from './images.js';

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .option('dataset', {
      type: 'string',
      demandOption: true,
      describe: "'synthetic' or a path to a CIFAR binary batch file",
    })
    .option('cifar-format', {
      type: 'string',
      choices: ['cifar10', 'cifar100'] as const,
      default: 'cifar10',
    })
    .option('limit', { type: 'number', describe: 'max records to read from a CIFAR file' })
    .option('classes', { type: 'number', default: 10 })
    .option('per-class', { type: 'number', default: 50 })
    .option('seed', { type: 'number', default: 0 })
    .option('backbone', { type: 'string', default: 'random-cnn-seed7' })
    .option('d-e', { type: 'number', default: 64, describe: 'feature width' })
    .option('out', { type: 'string', demandOption: true })
    .strict()
    .parse();

  const manifest = await exportFeatures({
    backbone: argv.backbone,
    featureWidth: argv['d-e'],
    dataset: argv.dataset,
    cifarFormat: argv['cifar-format'] as CifarFormat,
    limit: argv.limit,
    classes: argv.classes,
    perClass: argv['per-class'],
    seed: argv.seed,
    outPath: argv.out,
  });
  console.log(JSON.stringify(manifest));
}

main().catch(err => {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
});
