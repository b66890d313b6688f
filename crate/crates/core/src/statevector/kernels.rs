//! Amplitude-pair kernels shared by the gate implementations.
//!
//! Large registers are processed in parallel over disjoint blocks. Every
//! amplitude sees the same sequence of floating-point operations whatever the
//! worker count, so results are bitwise reproducible.

use rayon::prelude::*;

/// Amplitudes per parallel work item.
pub(crate) const CHUNK: usize = 1 << 14;

/// Registers smaller than this are processed sequentially.
pub(crate) const PAR_MIN_LEN: usize = 1 << 16;

/// Qubits below this index are handled inside cache-resident blocks by the
/// fused layer kernels (`2^CACHE_BLOCK_BITS` amplitudes per block).
pub const CACHE_BLOCK_BITS: usize = 13;

/// Call `f(index_of_lower, lower, upper)` for every pair `(b, b | 1 << q)` with bit `q` of `b` clear.
pub(crate) fn for_each_pair<F>(amps: &mut [f64], q: usize, f: F)
where
    F: Fn(usize, &mut f64, &mut f64) + Sync + Send,
{
    let stride = 1usize << q;
    let block = stride << 1;
    let len = amps.len();
    debug_assert!(block <= len);
    if len < PAR_MIN_LEN {
        pairs_in_span(amps, 0, stride, &f);
    } else if block <= CHUNK {
        amps.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| pairs_in_span(chunk, ci * CHUNK, stride, &f));
    } else {
        let half_chunk = CHUNK / 2;
        amps.par_chunks_mut(block).enumerate().for_each(|(bi, blk)| {
            let (lo, hi) = blk.split_at_mut(stride);
            lo.par_chunks_mut(half_chunk).zip(hi.par_chunks_mut(half_chunk)).enumerate().for_each(
                |(ci, (l, h))| {
                    let base = bi * block + ci * half_chunk;
                    for (o, (a, b)) in l.iter_mut().zip(h.iter_mut()).enumerate() {
                        f(base + o, a, b);
                    }
                },
            );
        });
    }
}

/// Pairs along `stride` inside a span whose length is a multiple of `2 * stride`.
pub(crate) fn pairs_in_span<F>(span: &mut [f64], base: usize, stride: usize, f: &F)
where
    F: Fn(usize, &mut f64, &mut f64),
{
    let block = stride << 1;
    for (bi, blk) in span.chunks_mut(block).enumerate() {
        let (lo, hi) = blk.split_at_mut(stride);
        let start = base + bi * block;
        for (o, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(start + o, a, b);
        }
    }
}

/// Apply `f(block_base, block)` to consecutive blocks of `2^bits` amplitudes.
pub(crate) fn for_each_block<F>(amps: &mut [f64], bits: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let size = 1usize << bits;
    if amps.len() < PAR_MIN_LEN {
        for (i, blk) in amps.chunks_mut(size).enumerate() {
            f(i * size, blk);
        }
    } else {
        amps.par_chunks_mut(size).enumerate().for_each(|(i, blk)| f(i * size, blk));
    }
}

/// Deterministic sum of `f(base, chunk)` over fixed-size chunks, reduced in index order.
pub(crate) fn chunked_sum<F>(amps: &[f64], f: F) -> f64
where
    F: Fn(usize, &[f64]) -> f64 + Sync + Send,
{
    if amps.len() <= CHUNK {
        return f(0, amps);
    }
    let partials: Vec<f64> = amps.par_chunks(CHUNK).enumerate().map(|(i, c)| f(i * CHUNK, c)).collect();
    partials.iter().sum()
}

#[inline]
pub(crate) fn parity(v: u64) -> bool {
    v.count_ones() & 1 == 1
}
