// Run a verification suite programmatically and write its report.

use oneshot_cqsw::harness::{run_suite, ExperimentConfig, ReportFormat, Suite};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::new(Suite::Audenaert).with_seed(2024).with_instances(25);
    let report = run_suite(&cfg)?;
    println!("{}: {}/{} checks passed", report.suite, report.passed, report.total);

    let dir = std::env::temp_dir().join("oneshot-cqsw-example");
    std::fs::create_dir_all(&dir)?;
    report.emit(&dir.join("audenaert.csv"), ReportFormat::Csv)?;
    report.emit(&dir.join("audenaert.json"), ReportFormat::Json)?;
    println!("reports written to {}", dir.display());

    let chain = run_suite(&ExperimentConfig::new(Suite::ChainRules).with_instances(3))?;
    for r in chain.records.iter().take(3) {
        println!("{} {}: {:.6} {} {:.6}", r.anchor, r.check, r.lhs, r.relation, r.rhs);
    }
    assert!(report.all_pass() && chain.all_pass());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
