/**
 * Portable deterministic random number generation.
 *
 * This is the TypeScript side of the cross-language generator used by
 * the training toolkit (see its docs/rng.md for the normative
 * definition): a counter-based SplitMix64 uniform stream feeding a
 * trigonometric Box-Muller transform.  The integer stream matches the
 * Python implementation bit-for-bit; the normals match up to libm
 * rounding of log/cos/sin (relative error well below 1e-12).
 */

const GOLDEN = 0x9e3779b97f4a7c15n;
const M1 = 0xbf58476d1ce4e5b9n;
const M2 = 0x94d049bb133111ebn;
const MASK = (1n << 64n) - 1n;

/** SplitMix64 finalizer on a 64-bit value. */
export function mix64(z: bigint): bigint {
  z &= MASK;
  z = (z ^ (z >> 30n)) * M1 & MASK;
  z = (z ^ (z >> 27n)) * M2 & MASK;
  return (z ^ (z >> 31n)) & MASK;
}

/** Draw `i` (0-based) of the raw 64-bit stream for `seed`. */
export function streamBits(seed: bigint, i: number): bigint {
  return mix64((seed + BigInt(i + 1) * GOLDEN) & MASK);
}

/** Uniform double in (0, 1]: top 53 bits, plus one, scaled by 2^-53. */
export function uniformAt(seed: bigint, i: number): number {
  return (Number(streamBits(seed, i) >> 11n) + 1) * 2 ** -53;
}

/** `count` standard normals via Box-Muller on consecutive uniform pairs. */
export function normalStream(seed: bigint, count: number): Float64Array {
  const pairs = Math.ceil(count / 2);
  const out = new Float64Array(2 * pairs);
  for (let p = 0; p < pairs; p++) {
    const u1 = uniformAt(seed, 2 * p);
    const u2 = uniformAt(seed, 2 * p + 1);
    const radius = Math.sqrt(-2 * Math.log(u1));
    const angle = 2 * Math.PI * u2;
    out[2 * p] = radius * Math.cos(angle);
    out[2 * p + 1] = radius * Math.sin(angle);
  }
  return count === out.length ? out : out.slice(0, count);
}

/** `count` uniforms in (0, 1] starting at stream position `offset`. */
export function uniformStream(seed: bigint, count: number, offset = 0): Float64Array {
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) out[i] = uniformAt(seed, offset + i);
  return out;
}
