//! Exclusive prefix sums over counts.

use rayon::prelude::*;

/// Below this length the scan runs sequentially.
const PARALLEL_THRESHOLD: usize = 1 << 16;
const BLOCK: usize = 1 << 14;

/// `out[0] = 0`, `out[k] = a[0] + .. + a[k-1]`.
pub fn exclusive_scan(a: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    exclusive_scan_in_place(&mut out);
    out
}

/// Scans `a` in place and returns the total of the original values.
///
/// Callers that need CSR offsets pass counts with one trailing zero; the last
/// slot then receives the total.
pub fn exclusive_scan_in_place(a: &mut [usize]) -> usize {
    if a.len() < PARALLEL_THRESHOLD {
        return sequential(a);
    }
    // Two-pass block scan: per-block totals, scan of totals, then local scans
    // seeded with each block's carry. Integer addition keeps this bit-exact.
    let mut carries: Vec<usize> = a.par_chunks(BLOCK).map(|c| c.iter().sum()).collect();
    let total = sequential(&mut carries);
    a.par_chunks_mut(BLOCK)
        .zip(carries.par_iter())
        .for_each(|(chunk, &carry)| {
            let mut acc = carry;
            for x in chunk {
                let v = *x;
                *x = acc;
                acc += v;
            }
        });
    total
}

fn sequential(a: &mut [usize]) -> usize {
    let mut acc = 0;
    for x in a {
        let v = *x;
        *x = acc;
        acc += v;
    }
    acc
}
