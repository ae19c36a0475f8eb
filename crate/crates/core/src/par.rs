//! Deterministic chunked parallelism.
//!
//! Work over `n` items is split into fixed-size chunks whose boundaries do
//! not depend on the worker count. Each chunk is mapped independently (in
//! parallel when the `parallel` feature is enabled and more than one worker
//! is requested) and the per-chunk results are folded sequentially in chunk
//! order, so the floating-point result is bit-identical for any worker
//! count.

/// Chunk length used by every Monte-Carlo accumulation. Fixed so that chunk
/// boundaries, and therefore summation order, never depend on scheduling.
pub const CHUNK: usize = 4096;

/// Splits `0..n` into CHUNK-sized ranges, maps each with `f`, and folds the
/// results in chunk order with `merge`.
pub fn chunked_fold<T, F, G>(n: usize, workers: usize, f: F, merge: G) -> Option<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    G: Fn(T, T) -> T,
{
    let ranges: Vec<std::ops::Range<usize>> = (0..n)
        .step_by(CHUNK)
        .map(|start| start..(start + CHUNK).min(n))
        .collect();
    let parts = map_ranges(ranges, workers, f);
    parts.into_iter().reduce(merge)
}

/// Maps `0..n` item-wise (in parallel when enabled), returning results in
/// index order.
pub fn ordered_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let singletons: Vec<std::ops::Range<usize>> = (0..n).map(|i| i..i + 1).collect();
    map_ranges(singletons, workers, |r| f(r.start))
}

#[cfg(feature = "parallel")]
fn map_ranges<T, F>(ranges: Vec<std::ops::Range<usize>>, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return ranges.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build();
    match pool {
        Ok(pool) => pool.install(|| ranges.into_par_iter().map(f).collect()),
        Err(_) => ranges.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_ranges<T, F>(ranges: Vec<std::ops::Range<usize>>, _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    ranges.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_is_worker_count_independent() {
        let f = |r: std::ops::Range<usize>| r.map(|i| ((i * 2654435761) as f64).sqrt()).sum::<f64>();
        let s1 = chunked_fold(100_000, 1, f, |a, b| a + b).unwrap();
        let s4 = chunked_fold(100_000, 4, f, |a, b| a + b).unwrap();
        assert_eq!(s1.to_bits(), s4.to_bits());
    }
}
