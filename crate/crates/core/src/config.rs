use std::env;

/// Runtime knobs shared by the solvers. `from_env` reads `FITEX_THREADS`
/// and `FITEX_SEED`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Worker threads for partitioned searches.
    pub threads: usize,
    /// Seed for randomized searches.
    pub seed: u64,
    /// Default node ceiling for the exact search.
    pub d_cap: usize,
    /// Largest N for which full-domain function classes are tracked.
    pub enum_limit: usize,
    /// Largest N for exhaustive subset scans.
    pub subset_limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            seed: 0,
            d_cap: 8,
            enum_limit: 5,
            subset_limit: 3,
        }
    }
}

impl Config {
    pub fn from_env() -> Self {
        let mut c = Config::default();
        if let Some(t) = env::var("FITEX_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            c.threads = t.max(1);
        }
        if let Some(s) = env::var("FITEX_SEED").ok().and_then(|s| s.trim().parse::<u64>().ok()) {
            c.seed = s;
        }
        c
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
