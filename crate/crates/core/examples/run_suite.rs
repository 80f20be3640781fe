//! Builds a run configuration in code, prints it as TOML and runs one suite.

use volkov::config::{RunConfig, Suite};
use volkov::suites::run_suite;

fn main() {
    let mut cfg = RunConfig::default();
    cfg.run.seed = 11;
    cfg.eigen.pairs = 6;
    print!("{}", cfg.to_toml());
    let report = run_suite(&cfg, Suite::Eigen).expect("valid configuration");
    print!("{}", report.summary());
}
