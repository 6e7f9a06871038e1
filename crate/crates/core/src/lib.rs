//! Exact p-adic integer arithmetic (residues mod `p^N` as base-p digit
//! vectors) and a verifier for the digit structure of
//! `alpha_p = sum_{n>=0} p^{v_p(n!)}`.
//!
//! - [`padic`]: digit-vector arithmetic with carry tracing, rendering, digit files
//! - [`valuation`]: digit sums, `v_p(n!)` by Legendre's formula and by floor sums
//! - [`series`]: exact partial sums and limits of `sum p^{v_p(n!)}` and `sum n!`
//! - [`rationality`]: rational <-> eventually periodic expansion, period detection
//! - [`analysis`]: package, prefix and non-periodicity checks with JSON reports
//! - [`cli`]: the `padix` command-line front end

pub mod analysis;
pub mod cli;
pub mod error;
pub mod padic;
pub mod prime;
pub mod rationality;
pub mod series;
pub mod valuation;

pub use error::{Error, Result};
pub use padic::{CarryTrace, PAdicInt, RenderMode, RenderStyle};
pub use prime::Prime;
pub use series::SeriesKind;

/// Version string embedded in every JSON document.
pub const TOOL_VERSION: &str = concat!("padix ", env!("CARGO_PKG_VERSION"));

/// Schema version of the JSON and digit-file outputs.
pub const FORMAT_VERSION: u32 = 1;
