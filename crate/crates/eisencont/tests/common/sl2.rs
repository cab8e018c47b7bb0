use std::sync::OnceLock;

use eisencont::sl2::{Continuation, Sl2Config};

/// Default pipeline, prepared once per test binary.
pub fn prepared() -> &'static Continuation {
    static CELL: OnceLock<Continuation> = OnceLock::new();
    CELL.get_or_init(|| Continuation::prepare(&Sl2Config::default()).expect("default pipeline prepares"))
}
