// Reports as CSV and JSON, written atomically and read back.

use temporal_bell::classical::QuerySchedule;
use temporal_bell::experiment::{classical_report, quantum_report, ExperimentConfig};
use temporal_bell::report::{write_atomic, Format, Payload, PayloadKind};

fn run() -> temporal_bell::Result<()> {
    let quantum = quantum_report(&ExperimentConfig::new(4, 4), "ceil-sqrt", None)?;
    let classical = classical_report(&QuerySchedule::sequential(4)?, "classical-sequential", None)?;
    let sweep = Payload::Sweep(vec![quantum, classical]);

    let csv = sweep.serialize(Format::Csv)?;
    print!("{csv}");
    println!("{}", Payload::Report(quantum_report(&ExperimentConfig::new(3, 3), "ceil-sqrt", Some(2.0))?).serialize(Format::Json)?);

    let path = std::env::temp_dir().join(format!("tbell-report-{}.json", std::process::id()));
    write_atomic(&path, &sweep.serialize(Format::Json)?)?;
    let text = std::fs::read_to_string(&path).map_err(|e| temporal_bell::Error::Report(e.to_string()))?;
    let back = Payload::parse(Format::Json, PayloadKind::Sweep, &text)?;
    assert_eq!(back, sweep.canonical());
    println!("round trip through {} ok", path.display());
    let _ = std::fs::remove_file(path);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
