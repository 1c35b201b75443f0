//! Dataset CSV interchange: header `y,x1,...,x{d-1}`, intercept implicit.

use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub fn read_dataset<R: Read>(r: R) -> Result<Dataset> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some("y") {
        return Err(Error::Config(format!(
            "dataset CSV must start with a 'y' column, got {:?}",
            headers.get(0)
        )));
    }
    let d = headers.len(); // y plus d-1 regressors; intercept prepended below
    let mut y = Vec::new();
    let mut x = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != d {
            return Err(Error::Config(format!(
                "row {} has {} fields, expected {d}",
                line + 1,
                rec.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {s:?} on row {}", line + 1)))
        };
        y.push(parse(&rec[0])?);
        x.push(1.0);
        for f in 1..d {
            x.push(parse(&rec[f])?);
        }
    }
    Dataset::new(y, x, d)
}

pub fn read_dataset_path(path: &Path) -> Result<Dataset> {
    read_dataset(std::fs::File::open(path)?)
}

pub fn write_dataset<W: Write>(w: W, data: &Dataset) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["y".to_string()];
    for j in 1..data.dim() {
        header.push(format!("x{j}"));
    }
    wtr.write_record(&header)?;
    for t in 0..data.len() {
        let mut rec = vec![format!("{}", data.y()[t])];
        for j in 1..data.dim() {
            rec.push(format!("{}", data.row(t)[j]));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_dataset_path(path: &Path, data: &Dataset) -> Result<()> {
    write_dataset(std::fs::File::create(path)?, data)
}
