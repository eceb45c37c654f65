//! Independent verification rungs on a small worker pool.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use swe_core::verification::{fill_orders, ErrorReport, Rung, VerificationError};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SWE_THREADS";

/// Worker count: `SWE_THREADS` if set to a positive integer, otherwise the
/// available parallelism.
pub fn worker_count() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Run `jobs` on at most `threads` workers; results keep the input order.
pub fn parallel_map<T, R, F>(jobs: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads.max(1).min(jobs.len());
    if workers <= 1 {
        return jobs.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect()
}

/// Run a ladder (coarse to fine) and attach pairwise orders.
pub fn run_ladder(rungs: &[Rung], threads: usize) -> Result<Vec<ErrorReport>, VerificationError> {
    let mut reports = parallel_map(rungs, threads, |r| r.run()).into_iter().collect::<Result<Vec<_>, _>>()?;
    fill_orders(&mut reports);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let jobs: Vec<u64> = (0..37).collect();
        for threads in [1, 2, 5, 64] {
            let out = parallel_map(&jobs, threads, |x| x * x);
            assert_eq!(out, jobs.iter().map(|x| x * x).collect::<Vec<_>>());
        }
        assert!(parallel_map(&[] as &[u8], 4, |x| *x).is_empty());
    }
}
