//! Configuration ingestion, command dispatch, and serialization of discs,
//! sweeps and certification reports for the `jdisc` library.
//!
//! Everything that parses untrusted input lives here: the JSON run
//! configuration (with polynomial coefficients keyed by monomials such as
//! `"z1^2 zb2"`) and the tabular disc-dump format. Both parsers reject
//! malformed input with precise diagnostics and never panic.

pub mod config;
pub mod dump;
pub mod report;
pub mod runner;

pub use config::{parse_monomial, poly_from_json, poly_to_json, ConfigError, RunConfig};
pub use dump::{parse_disc_dump, write_disc_dump, DumpError};
pub use report::{write_atomic, Report};
pub use runner::{run_command, RunError};
