//! Serial or data-parallel evaluation of independent work items.
//!
//! Results always land in slots indexed by work item, so the output of
//! [`Execution::map`] does not depend on the thread count. Without the
//! `parallel` feature every mode runs serially.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Run on the global rayon pool.
    #[default]
    Parallel,
    /// Run on a dedicated pool of this many threads.
    Jobs(usize),
}

impl Execution {
    /// `--jobs` style selection: 1 is serial, 0 means "all cores".
    pub fn from_jobs(jobs: usize) -> Self {
        match jobs {
            0 => Execution::Parallel,
            1 => Execution::Serial,
            n => Execution::Jobs(n),
        }
    }

    /// Applies `f` to `0..n` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Serial => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => par_map(n, f),
            #[cfg(feature = "parallel")]
            Execution::Jobs(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool.install(|| par_map(n, f)),
                Err(_) => (0..n).map(f).collect(),
            },
            #[cfg(not(feature = "parallel"))]
            _ => (0..n).map(f).collect(),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Neumaier-compensated sum, evaluated in slice order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
