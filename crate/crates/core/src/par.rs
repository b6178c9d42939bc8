//! Minimal worker-pool helper. The `KLEIN_SYSTOLIC_THREADS` environment
//! variable caps the number of worker threads; unset or `1` means fully
//! sequential execution (the default, and the reproducibility baseline —
//! results are identical either way because work items are independent and
//! written to fixed slots).

use std::sync::atomic::{AtomicUsize, Ordering};

/// Worker-thread cap from `KLEIN_SYSTOLIC_THREADS`, clamped to `[1, 64]`.
pub fn thread_limit() -> usize {
    std::env::var("KLEIN_SYSTOLIC_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map_or(1, |n| n.clamp(1, 64))
}

/// Evaluate `f(0..n)` into a vector, using up to `thread_limit()` scoped
/// workers pulling indices from a shared counter.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_limit().min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let next = AtomicUsize::new(0);
    let slot_ptr = SendPtr(slots.as_mut_ptr());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let f = &f;
            let next = &next;
            let slot_ptr = &slot_ptr;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                // Each index is claimed by exactly one worker, so the
                // writes target disjoint slots.
                unsafe { *slot_ptr.0.add(i) = Some(value) };
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every index was claimed")).collect()
}

struct SendPtr<T>(*mut T);
unsafe impl<T: Send> Sync for SendPtr<T> {}
