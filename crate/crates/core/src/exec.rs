//! Execution strategy for embarrassingly parallel sampling loops.
//!
//! With the `parallel` feature (default) [`map`] fans out over rayon; without
//! it the same call is a plain sequential map. Results are identical either
//! way and always returned in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// Sequential map, always available (benchmark baseline and fallback).
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Rayon-backed map preserving input order.
#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_sequential_and_preserves_order() {
        let items: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let f = |x: &f64| x.sin() * x.cos();
        assert_eq!(map(&items, f), map_seq(&items, f));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn par_matches_seq_bitwise() {
        let items: Vec<f64> = (0..257).map(|i| (i as f64).sqrt()).collect();
        let f = |x: &f64| x.exp().ln_1p();
        assert_eq!(map_par(&items, f), map_seq(&items, f));
    }
}
