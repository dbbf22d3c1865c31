//! Data-parallel helpers. With the `parallel` feature these run on the rayon pool;
//! without it they fall back to plain iterators. Results are always in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn par_map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sums `f(i)` over chunks of `0..n`; chunk partial sums are combined in index order
/// so the result does not depend on scheduling.
pub fn chunked_sum<R, F>(n: usize, chunk: usize, zero: R, f: F) -> R
where
    R: Send + Copy + std::ops::Add<Output = R>,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
{
    let chunks = n.div_ceil(chunk.max(1));
    let parts = par_map_range(chunks, |c| {
        let lo = c * chunk;
        f(lo..(lo + chunk).min(n))
    });
    parts.into_iter().fold(zero, |a, b| a + b)
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let v: Vec<u64> = (0..1000).collect();
        let out = par_map(&v, |x| x * 2);
        assert_eq!(out, (0..1000).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn chunked_sum_is_deterministic() {
        let f = |r: std::ops::Range<usize>| r.map(|i| 1.0 / (i as f64 + 1.0)).sum::<f64>();
        let a = chunked_sum(10_000, 128, 0.0, f);
        let b = chunked_sum(10_000, 128, 0.0, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
