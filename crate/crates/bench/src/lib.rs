//! Benchmark workloads shared by the criterion benches.

use std::rc::Rc;

use glam_core::bde::{load_bde, BdeDef};
use glam_core::prelude::checked_prelude;
use glam_core::syntax::Term;

/// Prelude streams exercised by the benches.
pub const STREAMS: [&str; 4] = ["zeros", "toggle", "paperfolds", "thuemorse"];

/// The equations shipped in `programs/streams.bde`.
pub const STREAMS_BDE: &str = include_str!("../../../programs/streams.bde");

/// The closed, linked term of a prelude definition.
pub fn prelude_term(name: &str) -> Rc<Term> {
    checked_prelude()
        .get(name)
        .unwrap_or_else(|| panic!("no prelude definition `{name}`"))
        .term
        .clone()
}

pub fn stream_equations() -> Vec<BdeDef> {
    load_bde(STREAMS_BDE).expect("shipped equations load")
}

#[cfg(test)]
mod tests {
    use super::*;
    use glam_core::machine::{take_stream, DEFAULT_FUEL};

    #[test]
    fn workloads_run() {
        for name in STREAMS {
            assert_eq!(take_stream(&prelude_term(name), 4, DEFAULT_FUEL).unwrap().len(), 4);
        }
        assert_eq!(stream_equations().len(), 5);
    }
}
