//! Minimal deterministic data parallelism.
//!
//! Work items are pure functions of their inputs, so the results are bitwise
//! identical for any thread count; only the wall time changes. The global
//! thread count defaults to 1 (fully sequential).

use std::sync::atomic::{AtomicUsize, Ordering};

static THREADS: AtomicUsize = AtomicUsize::new(1);

/// Sets the worker count used by parallel-capable loops (clamped to >= 1).
pub fn set_thread_count(n: usize) {
    THREADS.store(n.max(1), Ordering::Relaxed);
}

pub fn thread_count() -> usize {
    THREADS.load(Ordering::Relaxed)
}

/// Applies `f` to every item, in parallel when the global thread count allows,
/// and returns the results in input order.
pub(crate) fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, T) -> R + Sync,
{
    let workers = thread_count().min(items.len().max(1));
    if workers <= 1 {
        return items.into_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let indexed: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let mut slots: Vec<Option<R>> = (0..indexed.len()).map(|_| None).collect();
    let queues: Vec<Vec<(usize, T)>> = {
        let mut qs: Vec<Vec<(usize, T)>> = (0..workers).map(|_| Vec::new()).collect();
        for (w, item) in indexed.into_iter().enumerate() {
            qs[w % workers].push(item);
        }
        qs
    };
    let f = &f;
    let results: Vec<Vec<(usize, R)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = queues
            .into_iter()
            .map(|q| {
                scope.spawn(move || {
                    q.into_iter()
                        .map(|(i, t)| (i, f(i, t)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for chunk in results {
        for (i, r) in chunk {
            slots[i] = Some(r);
        }
    }
    slots.into_iter().map(|s| s.unwrap()).collect()
}
