//! `polaron-waveguide` — scattering and emission observables for a two-level
//! emitter ultrastrongly coupled to a 1D waveguide, computed in the polaron
//! frame.
//!
//! ```text
//! polaron-waveguide --command lineshape --alpha 0.2 --out results
//! polaron-waveguide --command sweep --alphas 0.1,0.2,0.3 --format json
//! polaron-waveguide --command toulouse
//! polaron-waveguide --config run.json
//! ```
//!
//! Exit codes: `0` success, `2` invalid input, `3` numerical failure,
//! `4` i/o failure.

mod args;
mod commands;
mod error;
mod output;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Err(err) = commands::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.code());
    }
}
