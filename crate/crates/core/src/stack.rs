/// Runs `f` on a helper thread with a large stack. Proof trees are walked
/// recursively and can be deep.
pub(crate) fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(scope, f)
            .expect("spawn worker thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
