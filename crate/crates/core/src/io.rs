//! CSV ingestion and export of atoms and point sets.
//!
//! Readers skip blank lines and lines starting with `#`, and accept an
//! optional header row whose first field is not a number.

use std::io::{Read, Write};

use crate::discrepancy::PointSet;
use crate::error::{Error, Result};
use crate::measures::{Atom, AtomicMeasure};

fn records<R: Read>(r: R) -> Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut out: Vec<Vec<String>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push(rec.iter().map(str::to_string).collect());
    }
    if let Some(first) = out.first() {
        if first.first().is_some_and(|f| f.parse::<f64>().is_err()) {
            out.remove(0);
        }
    }
    Ok(out)
}

fn number(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("row {line}: {s:?} is not a number")))
}

/// Reads `location,weight` rows.
pub fn read_atoms_csv<R: Read>(r: R) -> Result<AtomicMeasure> {
    let atoms = records(r)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            if rec.len() != 2 {
                return Err(Error::Parse(format!(
                    "row {}: expected location,weight, got {} fields",
                    i + 1,
                    rec.len()
                )));
            }
            Ok(Atom::new(number(&rec[0], i + 1)?, number(&rec[1], i + 1)?))
        })
        .collect::<Result<Vec<_>>>()?;
    AtomicMeasure::new(atoms)
}

/// Reads the first field of every row as a number.
pub fn read_values_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    records(r)?
        .iter()
        .enumerate()
        .map(|(i, rec)| number(&rec[0], i + 1))
        .collect()
}

/// Reads one point per row.
pub fn read_points_csv<R: Read>(r: R) -> Result<PointSet> {
    PointSet::new(read_values_csv(r)?)
}

/// Extracts named numeric columns from a CSV with a header row, such as an
/// experiment report. Lines starting with `#` are skipped.
pub fn read_named_columns<R: Read>(r: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let header = rdr.headers()?.clone();
    let idx = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Parse(format!("no column named {n:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (col, &i) in cols.iter_mut().zip(&idx) {
            let field = rec
                .get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: too few fields", line + 1)))?;
            col.push(number(field, line + 1)?);
        }
    }
    Ok(cols)
}

/// Writes `location,weight` rows with a header.
pub fn write_atoms_csv<W: Write>(a: &AtomicMeasure, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["location", "weight"])?;
    for atom in a.atoms() {
        wtr.write_record([atom.location.to_string(), atom.weight.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_round_trip() {
        let a = AtomicMeasure::new(vec![Atom::new(0.25, 0.5), Atom::new(0.75, 0.5)]).unwrap();
        let mut buf = Vec::new();
        write_atoms_csv(&a, &mut buf).unwrap();
        let back = read_atoms_csv(buf.as_slice()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn comments_blank_lines_and_headerless_input() {
        let text = "# generated\n0.1, 1\n\n0.6,3\n";
        let a = read_atoms_csv(text.as_bytes()).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.total_mass(), 4.0);
        let ps = read_points_csv("x\n0.5\n0.25\n".as_bytes()).unwrap();
        assert_eq!(ps.points(), &[0.25, 0.5]);
    }

    #[test]
    fn named_columns_from_a_report() {
        let text = "# schema=1\nn,cost,label\n1,0.5,a\n2,0.25,b\n";
        let cols = read_named_columns(text.as_bytes(), &["cost", "n"]).unwrap();
        assert_eq!(cols, vec![vec![0.5, 0.25], vec![1.0, 2.0]]);
        assert!(read_named_columns(text.as_bytes(), &["missing"]).is_err());
        assert!(read_named_columns(text.as_bytes(), &["label"]).is_err());
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(read_atoms_csv("0.1\n".as_bytes()).is_err());
        assert!(read_atoms_csv("0.1,abc\n".as_bytes()).is_err());
        assert!(read_atoms_csv("1.5,1\n".as_bytes()).is_err());
        assert!(read_points_csv("".as_bytes()).is_err());
    }
}
