//! Sequential/parallel execution of index scans.
//!
//! Enumeration-style work in this crate is a pure function of a candidate
//! index, so the only thing the `parallel` feature changes is who drives the
//! loop. Results are merged deterministically: filtered indices come back
//! sorted ascending and reductions break ties toward the smaller index, so
//! sequential and parallel runs are bit-identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Indices in `0..total` satisfying `pred`, ascending.
pub(crate) fn filter_indices<F>(total: u64, parallel: bool, pred: F) -> Vec<u64>
where
    F: Fn(u64) -> bool + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..total).into_par_iter().filter(|&i| pred(i)).collect();
    }
    let _ = parallel;
    (0..total).filter(|&i| pred(i)).collect()
}

/// Minimizes `key` over `0..total`, returning `(index, key)` with ties broken
/// toward the smallest index. `total` must be at least 1.
pub(crate) fn min_by_key<K, F>(total: u64, parallel: bool, key: F) -> (u64, K)
where
    K: Ord + Send,
    F: Fn(u64) -> K + Sync,
{
    assert!(total >= 1);
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..total)
            .into_par_iter()
            .map(|i| (i, key(i)))
            .reduce_with(|a, b| pick_min(a, b))
            .expect("non-empty range");
    }
    let _ = parallel;
    (0..total)
        .map(|i| (i, key(i)))
        .reduce(pick_min)
        .expect("non-empty range")
}

fn pick_min<K: Ord>(a: (u64, K), b: (u64, K)) -> (u64, K) {
    // Strictly smaller key wins; equal keys keep the smaller index.
    match b.1.cmp(&a.1) {
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Equal => {
            if b.0 < a.0 {
                b
            } else {
                a
            }
        }
    }
}
