//! Internal execution-mode plumbing: data-parallel map/collect over an index
//! range with a sequential fallback.
//!
//! The hot loops of this crate (tensor-product term enumeration, bounded
//! structure-equation checks) are embarrassingly parallel over generators or
//! input sequences. With the `parallel` feature enabled (the default) they
//! run on rayon; without it, or with [`ExecMode::Sequential`], they run
//! sequentially with identical results.

/// Execution mode for the data-parallel entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; otherwise falls
    /// back to sequential execution.
    Parallel,
}

impl ExecMode {
    /// The default mode: parallel when compiled in, sequential otherwise.
    pub fn auto() -> ExecMode {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Flat-map `f` over `0..n` and concatenate the results in index order.
pub(crate) fn flat_map_indexed<T, F>(n: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().flat_map_iter(&f).collect();
    }
    let _ = mode;
    (0..n).flat_map(f).collect()
}

/// First `Some` produced by `f` over `0..n`, by index order (deterministic
/// in both modes).
pub(crate) fn find_map_indexed<T, F>(n: usize, mode: ExecMode, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_map_first(&f);
    }
    let _ = mode;
    (0..n).find_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| vec![i, i * i];
        let seq = flat_map_indexed(100, ExecMode::Sequential, f);
        let par = flat_map_indexed(100, ExecMode::Parallel, f);
        assert_eq!(seq, par);

        let g = |i: usize| (i > 40 && i.is_multiple_of(7)).then_some(i);
        assert_eq!(find_map_indexed(100, ExecMode::Sequential, g), Some(42));
        assert_eq!(find_map_indexed(100, ExecMode::Parallel, g), Some(42));
    }
}
