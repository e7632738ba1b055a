//! CSV encoding of sweep results.
//!
//! Columns: `policy,n,eps,gamma,seed,steps,outcome,warmup_end,nanos`.
//! Floats are written in shortest round-trip form, `warmup_end` is empty
//! when the warm-up conditions were never met, and `nanos` is 0 unless
//! timing was requested. Lines end in `\n`.

use std::io::{Read, Write};

use crate::error::Result;

use super::ResultRow;

pub const CSV_HEADER: &str = "policy,n,eps,gamma,seed,steps,outcome,warmup_end,nanos";

pub fn emit_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| Ok(row?)).collect()
}
