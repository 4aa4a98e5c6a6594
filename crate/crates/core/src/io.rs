//! CSV encodings of fields, traces and tables.
//!
//! Rows follow the flat grid order (`k = i n + j`, `x = i h`, `y = j h`).
//! Values are written with 17 significant digits, so a write/read round trip
//! is exact.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::clifford::SpinorField;
use crate::error::{LabError, Result};
use crate::estimates::Table;
use crate::grid::{Field, Grid2D};
use crate::solver::FlowTrace;
use crate::sphere::MapField;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header `x,y,c0,c1,...`.
pub fn field_header(ncomp: usize) -> Vec<String> {
    let mut h = vec!["x".to_string(), "y".to_string()];
    h.extend((0..ncomp).map(|c| format!("c{c}")));
    h
}

/// Header `x,y,re_psi_1_1,im_psi_1_1,re_psi_1_2,...` (target index first,
/// both 1-based).
pub fn spinor_header(q: usize) -> Vec<String> {
    let mut h = vec!["x".to_string(), "y".to_string()];
    for i in 1..=q {
        for s in 1..=2 {
            h.push(format!("re_psi_{i}_{s}"));
            h.push(format!("im_psi_{i}_{s}"));
        }
    }
    h
}

pub fn write_field_csv<W: Write>(f: &Field<f64>, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(field_header(f.ncomp()))?;
    for (k, x, y) in f.grid().points() {
        let mut row = vec![fmt(x), fmt(y)];
        row.extend(f.at(k).iter().map(|&v| fmt(v)));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_spinor_csv<W: Write>(psi: &SpinorField, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(spinor_header(psi.q()))?;
    for (k, x, y) in psi.grid().points() {
        let mut row = vec![fmt(x), fmt(y)];
        for z in psi.at(k) {
            row.push(fmt(z.re));
            row.push(fmt(z.im));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(trace: &FlowTrace, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "energy", "res_map", "res_spinor", "defect"])?;
    for r in &trace.records {
        out.write_record([
            r.iter.to_string(),
            fmt(r.energy),
            fmt(r.res_map),
            fmt(r.res_spinor),
            fmt(r.defect),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_table_csv<W: Write>(table: &Table, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&table.header)?;
    for row in &table.rows {
        if row.len() != table.header.len() {
            return Err(LabError::Format(format!(
                "table row has {} entries, header has {}",
                row.len(),
                table.header.len()
            )));
        }
        out.write_record(row.iter().map(|&v| fmt(v)))?;
    }
    out.flush()?;
    Ok(())
}

/// Parses rows of a grid CSV: checks the header prefix, infers `n` from the
/// row count and checks the coordinate columns against the grid.
fn read_grid_rows<R: Read>(r: R, value_columns: impl Fn(usize) -> Vec<String>) -> Result<(Grid2D, usize, Vec<f64>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 3 {
        return Err(LabError::Format("expected x, y and at least one value column".into()));
    }
    let ncols = header.len() - 2;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| LabError::Format(format!("row {}: {e}", line + 1)))?;
        rows.push(vals);
    }
    let n = (rows.len() as f64).sqrt().round() as usize;
    if n * n != rows.len() {
        return Err(LabError::Format(format!("{} rows is not a square grid", rows.len())));
    }
    let grid = Grid2D::new(n).map_err(|e| LabError::Format(e.to_string()))?;
    let expected = value_columns(ncols);
    if header[2..] != expected[..] {
        return Err(LabError::Format(format!("unexpected header {header:?}")));
    }
    let mut data = Vec::with_capacity(n * n * ncols);
    for ((k, x, y), row) in grid.points().zip(&rows) {
        if row.len() != ncols + 2 {
            return Err(LabError::Format(format!("row {} has {} columns", k + 1, row.len())));
        }
        if (row[0] - x).abs() > 1e-12 || (row[1] - y).abs() > 1e-12 {
            return Err(LabError::Format(format!(
                "row {} at ({}, {}) is out of grid order",
                k + 1,
                row[0],
                row[1]
            )));
        }
        data.extend_from_slice(&row[2..]);
    }
    Ok((grid, ncols, data))
}

pub fn read_field_csv<R: Read>(r: R) -> Result<Field<f64>> {
    let (grid, ncomp, data) = read_grid_rows(r, |c| field_header(c)[2..].to_vec())?;
    Field::from_vec(grid, ncomp, data)
}

/// Reads a map and checks the sphere constraint.
pub fn read_map_csv<R: Read>(r: R) -> Result<MapField> {
    MapField::new(read_field_csv(r)?)
}

pub fn read_spinor_csv<R: Read>(r: R) -> Result<SpinorField> {
    let (grid, ncols, data) = read_grid_rows(r, |c| spinor_header(c / 4)[2..].to_vec())?;
    if ncols % 4 != 0 {
        return Err(LabError::Format(format!("{ncols} spinor columns is not a multiple of 4")));
    }
    let data = data.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    SpinorField::from_field(Field::from_vec(grid, ncols / 2, data)?)
}

pub fn save_field(path: &Path, f: &Field<f64>) -> Result<()> {
    write_field_csv(f, File::create(path)?)
}

pub fn save_spinor(path: &Path, psi: &SpinorField) -> Result<()> {
    write_spinor_csv(psi, File::create(path)?)
}

pub fn load_map(path: &Path) -> Result<MapField> {
    read_map_csv(File::open(path)?)
}

pub fn load_spinor(path: &Path) -> Result<SpinorField> {
    read_spinor_csv(File::open(path)?)
}
