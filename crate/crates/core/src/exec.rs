use serde::{Deserialize, Serialize};

/// How batch work is scheduled.
///
/// `Parallel` uses the rayon pool when the crate is built with the
/// `parallel` feature and degrades to `Serial` otherwise. Both modes
/// return results in index order, so downstream reductions are identical.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluates `f(0), f(1), …, f(n-1)` and returns the results in order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Serial => (0..n).map(f).collect(),
            Execution::Parallel => parallel_map(n, f),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let serial = Execution::Serial.map_indexed(1000, |i| (i as f64).sqrt());
        let parallel = Execution::Parallel.map_indexed(1000, |i| (i as f64).sqrt());
        assert_eq!(serial, parallel);
        assert_eq!(serial[9], 3.0);
    }
}
