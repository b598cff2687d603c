//! Parameter sweeps comparing exact and Pauli-twirled simulation of the
//! Bell-state preservation circuit, with CSV and SVG output.

pub mod checks;
pub mod config;
pub mod error;
pub mod output;
pub mod pstep;
pub mod sweep;

pub use config::SweepConfig;
pub use error::HarnessError;
pub use output::{emit_csv, emit_plot, read_csv, render_svg, write_csv};
pub use pstep::{decoherence_for, invert_pstep, pstep_at};
pub use sweep::{run_sweep, SweepResult, SweepRow};
