//! Small reference hypernetworks used throughout the tests and the CLI.

use crate::format::parse;
use crate::model::Hypernetwork;

pub const RUNNING: &str = include_str!("../data/running.hn");
pub const RUNNING_CORE: &str = include_str!("../data/running_core.hn");
pub const RUNNING_QUOTIENT: &str = include_str!("../data/running_quotient.hn");
pub const RUNNING_QUOTIENT_MAP: &str = include_str!("../data/running_quotient.map");
pub const DISCONNECTED_CORE: &str = include_str!("../data/disconnected_core.hn");
pub const TWO_TRIANGLES: &str = include_str!("../data/two_triangles.hn");

/// Three circle cells `v0..v2` with a classical core, plus square cells
/// `w0, w1` each targeted by three order-2 hyperedges of type `h`.
pub fn running_example() -> Hypernetwork {
    parse(RUNNING).expect("bundled hypernetwork is valid")
}

/// The classical three-cell core of [`running_example`].
pub fn running_core() -> Hypernetwork {
    parse(RUNNING_CORE).expect("bundled hypernetwork is valid")
}

/// The two-vertex quotient of [`running_example`] by `{v0 v1 v2 | w0 w1}`.
pub fn running_quotient() -> Hypernetwork {
    parse(RUNNING_QUOTIENT).expect("bundled hypernetwork is valid")
}

/// Three self-looped circle cells without other connections.
pub fn disconnected_core() -> Hypernetwork {
    parse(DISCONNECTED_CORE).expect("bundled hypernetwork is valid")
}

/// [`disconnected_core`] augmented with `w0, w1`.
pub fn two_triangles() -> Hypernetwork {
    parse(TWO_TRIANGLES).expect("bundled hypernetwork is valid")
}
