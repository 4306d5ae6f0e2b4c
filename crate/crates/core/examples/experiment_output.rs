// Writing tables as CSV and JSON, and reading them back.

use gapmap::experiments::trimmed::{trimmed_records, TrimmedRecord};
use gapmap::experiments::{emit, read_csv, read_json, Format, OutputMeta};
use gapmap::CFExpansion;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let theta = CFExpansion::periodic(&[], &[3])?;
    let rows = trimmed_records(&theta, &[10, 20, 40], 0)?;
    let meta = OutputMeta::new("trimmed", &theta.spec(), 0).param("depth", 40);

    let dir = std::env::temp_dir().join(format!("gapmap-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("trimmed.csv");
    let json = dir.join("trimmed.json");
    emit(&rows, &meta, Format::Csv, &csv)?;
    emit(&rows, &meta, Format::Json, &json)?;

    print!("{}", std::fs::read_to_string(&csv)?);
    let back: Vec<TrimmedRecord> = read_csv(&csv)?;
    let (m, back_json): (OutputMeta, Vec<TrimmedRecord>) = read_json(&json)?;
    assert_eq!(back, rows);
    assert_eq!(back_json, rows);
    assert_eq!(m, meta);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
