use rayon::prelude::*;

/// Fixed-size worker pool for the parallel phases.
///
/// With one worker everything runs on the calling thread and no pool is
/// created, which is also what targets without threads use.
pub struct Workers {
    threads: usize,
    pool: Option<rayon::ThreadPool>,
}

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "ABTREE_WORKERS";

impl Workers {
    pub fn new(threads: usize) -> Self {
        let threads = threads.max(1);
        let pool = if threads > 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .ok()
        } else {
            None
        };
        Workers { threads, pool }
    }

    pub fn sequential() -> Self {
        Workers::new(1)
    }

    /// Worker count from `ABTREE_WORKERS`, falling back to the host's parallelism.
    pub fn from_env() -> Self {
        let n = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Workers::new(n)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Applies `f` to every item, in parallel when more than one worker is
    /// configured. Output order matches input order.
    pub(crate) fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match &self.pool {
            Some(pool) if items.len() > 1 => {
                pool.install(|| items.into_par_iter().map(f).collect())
            }
            _ => items.into_iter().map(f).collect(),
        }
    }
}

impl std::fmt::Debug for Workers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workers")
            .field("threads", &self.threads)
            .finish()
    }
}
