//! CSV and JSON file formats.
//!
//! Designs are CSV with a header row of variable names and one run per row.
//! Output vectors are single-column CSV with header `y`. All writers use `.`
//! decimals and LF line endings.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::{Coding, Design, Provenance};
use crate::error::{Error, Result};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0"
        "0".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_design<W: Write>(design: &Design, w: W) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(design.names())?;
    for i in 0..design.n() {
        wr.write_record(design.runs().row(i).iter().map(|&v| fmt_num(v)))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_design_file(design: &Design, path: &Path) -> Result<()> {
    write_design(design, File::create(path)?)
}

/// Smallest coding that admits every entry.
pub fn infer_coding(values: &DMatrix<f64>) -> Result<Coding> {
    for c in [Coding::TwoLevel, Coding::ThreeLevel, Coding::Unit, Coding::Symmetric] {
        if values.iter().all(|&v| c.admits(v)) {
            return Ok(c);
        }
    }
    Err(Error::InvalidArgument("design entries fall outside [-1, 1]".into()))
}

/// Reads a design CSV; the coding is inferred unless given.
pub fn read_design<R: Read>(r: R, coding: Option<Coding>) -> Result<Design> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let names: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let mut data = Vec::new();
    let mut n = 0;
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != names.len() {
            return Err(Error::Shape { expected: names.len(), found: rec.len() });
        }
        for field in rec.iter() {
            data.push(
                field
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("not a number: {field:?}")))?,
            );
        }
        n += 1;
    }
    let runs = DMatrix::from_row_slice(n, names.len(), &data);
    let coding = match coding {
        Some(c) => c,
        None => infer_coding(&runs)?,
    };
    Design::with_names(runs, coding, names, Provenance::new("file"))
}

pub fn read_design_file(path: &Path, coding: Option<Coding>) -> Result<Design> {
    read_design(File::open(path)?, coding)
}

pub fn write_vector<W: Write>(header: &str, values: &[f64], w: W) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record([header])?;
    for &v in values {
        wr.write_record([fmt_num(v)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_vector_file(header: &str, values: &[f64], path: &Path) -> Result<()> {
    write_vector(header, values, File::create(path)?)
}

/// Reads the first column of a CSV with a header row.
pub fn read_vector<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let field = rec.get(0).unwrap_or("");
            field.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("not a number: {field:?}")))
        })
        .collect()
}

pub fn read_vector_file(path: &Path) -> Result<Vec<f64>> {
    read_vector(File::open(path)?)
}

/// Writes a numeric table with string cells already formatted by the caller.
pub fn write_table<W: Write>(headers: &[&str], rows: &[Vec<String>], w: W) -> Result<()> {
    let mut wr = writer(w);
    wr.write_record(headers)?;
    for row in rows {
        wr.write_record(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_table_file(headers: &[&str], rows: &[Vec<String>], path: &Path) -> Result<()> {
    write_table(headers, rows, File::create(path)?)
}

/// Formats a float for CSV output.
pub fn num(v: f64) -> String {
    fmt_num(v)
}

pub fn write_json_file(value: &serde_json::Value, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_csv_round_trip() {
        let rows = vec![vec![-1.0, 0.0, 1.0], vec![1.0, -1.0, 0.0]];
        let d = Design::from_rows(&rows, Coding::ThreeLevel, Provenance::new("t")).unwrap();
        let mut buf = Vec::new();
        write_design(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "x1,x2,x3\n-1,0,1\n1,-1,0\n");
        let back = read_design(&buf[..], None).unwrap();
        assert_eq!(back.rows(), rows);
        assert_eq!(back.coding(), Coding::ThreeLevel);
    }

    #[test]
    fn vector_round_trip_is_exact() {
        let v = vec![0.1, -2.5e-7, 1.0 / 3.0];
        let mut buf = Vec::new();
        write_vector("y", &v, &mut buf).unwrap();
        assert_eq!(read_vector(&buf[..]).unwrap(), v);
    }

    #[test]
    fn ragged_rows_rejected() {
        let text = "x1,x2\n1,2\n3\n";
        assert!(read_design(text.as_bytes(), None).is_err());
    }
}
