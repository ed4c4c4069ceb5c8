//! Runs a named suite and prints its JSON report, as `psl verify` does.

use parasasaki::cli::{run_suite, summarize, Command, RunConfig};

fn main() -> parasasaki::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "extension-einstein".into());
    let mut cfg = RunConfig::new(Command::Verify, suite);
    cfg.points = 8;
    let report = run_suite(&cfg)?;
    eprint!("{}", summarize(&report));
    print!("{}", report.to_json());
    Ok(())
}
