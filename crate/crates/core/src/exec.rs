//! Parallel or sequential evaluation of independent work items.
//!
//! With the `parallel` feature enabled, [`Exec::Parallel`] fans work out over
//! the current rayon pool. Without it, both modes run on the calling thread.
//! Output order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Sequential,
    Parallel,
}

impl Exec {
    /// `jobs <= 1` maps to sequential.
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.into_par_iter().map(f).collect(),
            _ => items.into_iter().map(f).collect(),
        }
    }
}

/// Runs `f` inside a dedicated pool of `jobs` threads when parallelism is
/// compiled in; otherwise just calls `f`.
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce(Exec) -> R + Send) -> R {
    let exec = Exec::from_jobs(jobs);
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| f(exec));
        }
    }
    f(exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map(items.clone(), |x| x * x);
        let par = with_jobs(4, |e| e.map(items, |x| x * x));
        assert_eq!(seq, par);
    }
}
