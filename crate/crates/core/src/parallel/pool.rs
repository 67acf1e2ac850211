//! Fixed set of workers draining one shared FIFO queue of tasks.

use std::collections::VecDeque;
use std::sync::Mutex;

/// Runs `f` on every task with `workers` threads pulling from a FIFO queue.
/// Results come back in task order. With one worker (or one task) everything
/// runs on the calling thread.
pub fn run_fifo<T, R, F>(workers: usize, tasks: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let count = tasks.len();
    if workers <= 1 || count <= 1 {
        return tasks.into_iter().map(f).collect();
    }
    let queue: Mutex<VecDeque<(usize, T)>> = Mutex::new(tasks.into_iter().enumerate().collect());
    let mut slots: Vec<Option<R>> = (0..count).map(|_| None).collect();
    let done: Vec<Vec<(usize, R)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers.min(count))
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let next = queue.lock().unwrap().pop_front();
                        let Some((i, t)) = next else { break };
                        local.push((i, f(t)));
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    for (i, r) in done.into_iter().flatten() {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|r| r.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_task_order() {
        let out = run_fifo(3, (0..50).collect(), |x: u32| x * 2);
        assert_eq!(out, (0..50).map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(run_fifo(1, vec![1, 2], |x: u8| x + 1), vec![2, 3]);
    }
}
