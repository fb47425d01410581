//! Running a verification suite from a config and summarizing the report.

use harmonia::config::ExperimentConfig;
use harmonia::suite::{run_suite, Status, Suite};

fn main() -> harmonia::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "algebra".into());
    let config = ExperimentConfig { space: "h2".into(), ..ExperimentConfig::default() };
    let report = run_suite(&config, Suite::parse(&suite)?)?;
    for entry in &report.entries {
        let residual = entry.residual.map_or("-".into(), |r| format!("{r:.2e}"));
        let status = match entry.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
            Status::Error => "ERROR",
        };
        println!("{status:5} {:32} {residual:>9} (tolerance {:.0e})", entry.check_name, entry.tolerance);
    }
    println!("suite {} on {}: {}", suite, report.space, if report.pass { "pass" } else { "fail" });
    Ok(())
}
