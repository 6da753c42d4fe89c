//! Acceptance checks live in `tests/acceptance.rs`; run with `cargo test -p fig8-acceptance`.
