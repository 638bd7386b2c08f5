//! Data-parallel map used for index building and per-component matching.
//!
//! With the `parallel` feature (default) work is spread over the rayon
//! thread pool; without it, or with [`Execution::Sequential`], items are
//! processed in order on the calling thread. Results always come back in
//! input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this mode actually runs on several threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let items: Vec<u64> = (0..1000).collect();
        let square = |x: &u64| x * x;
        let a = Execution::Parallel.map(&items, square);
        let b = Execution::Sequential.map(&items, square);
        assert_eq!(a, b);
        assert_eq!(a[999], 998_001);
    }
}
