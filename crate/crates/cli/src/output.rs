use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::Context;
use serde::Serialize;

use crate::args::OutputArgs;

fn sink(out: &OutputArgs) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_csv<I>(out: &OutputArgs, header: &[String], rows: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(sink(out)?);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(out: &OutputArgs, value: &T) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the same float.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn strings(header: &[&str]) -> Vec<String> {
    header.iter().map(|s| s.to_string()).collect()
}
