//! CSV formats for immersion and ε grids.
//!
//! Rows run with `u` fastest (`v` outer, `u` inner); numbers are written in
//! scientific notation with 17 significant digits so values round-trip exactly.

use std::io::{Read, Write};

use crate::error::CsvError;
use crate::grid::{GridSpec, HSurfaceGrid, ImmersionGrid};
use crate::nkspace::Point;
use crate::quat::{Quaternion, UnitQuaternion, Vec3};

pub const IMMERSION_HEADER: &str = "u,v,p0,p1,p2,p3,q0,q1,q2,q3";
pub const EPSILON_HEADER: &str = "u,v,x,y,z";
/// Largest deviation of a coordinate from the regular lattice.
pub const JITTER_TOL: f64 = 1e-9;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<W: Write>(w: W, header: &str, spec: &GridSpec, row: impl Fn(usize, usize) -> Vec<f64>) -> Result<(), CsvError> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(header.split(',')).map_err(csv_err)?;
    for iv in 0..spec.nv {
        for iu in 0..spec.nu {
            let mut rec = vec![fmt(spec.u(iu)), fmt(spec.v(iv))];
            rec.extend(row(iu, iv).into_iter().map(fmt));
            out.write_record(&rec).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_immersion<W: Write>(grid: &ImmersionGrid, w: W) -> Result<(), CsvError> {
    write_rows(w, IMMERSION_HEADER, &grid.spec, |iu, iv| {
        let x = grid.get(iu, iv);
        let (p, q) = (x.p.get().to_array(), x.q.get().to_array());
        p.into_iter().chain(q).collect()
    })
}

pub fn write_epsilon<W: Write>(hs: &HSurfaceGrid, w: W) -> Result<(), CsvError> {
    write_rows(w, EPSILON_HEADER, &hs.spec, |iu, iv| hs.get(iu, iv).to_array().to_vec())
}

fn csv_err(e: csv::Error) -> CsvError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CsvError::Io(io),
        kind => CsvError::Syntax { line, message: format!("{kind:?}") },
    }
}

/// Rows of numbers under the expected header, each with `(u, v)` first.
fn read_table<R: Read>(r: R, header: &'static str) -> Result<Vec<Vec<f64>>, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let width = header.split(',').count();
    let mut records = rdr.records();
    match records.next() {
        Some(rec) => {
            let rec = rec.map_err(csv_err)?;
            if !rec.iter().eq(header.split(',')) {
                return Err(CsvError::Header { expected: header });
            }
        }
        None => return Err(CsvError::Header { expected: header }),
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != width {
            return Err(CsvError::Syntax { line, message: format!("expected {width} fields, found {}", rec.len()) });
        }
        let mut row = Vec::with_capacity(width);
        for field in rec.iter() {
            let x: f64 = field
                .parse()
                .map_err(|_| CsvError::Syntax { line, message: format!("not a number: `{field}`") })?;
            if !x.is_finite() {
                return Err(CsvError::Syntax { line, message: format!("non-finite value `{field}`") });
            }
            row.push(x);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Recovers the regular grid behind the `(u, v)` columns.
fn infer_spec(rows: &[Vec<f64>]) -> Result<GridSpec, CsvError> {
    let irregular = |row: usize, message: String| CsvError::Irregular { row, message };
    let first = rows.first().ok_or_else(|| irregular(0, "no data rows".into()))?;
    let (u0, v0) = (first[0], first[1]);
    let nu = rows.iter().take_while(|r| r[1] == v0).count();
    if !rows.len().is_multiple_of(nu) {
        return Err(irregular(rows.len(), format!("{} rows is not a multiple of the row length {nu}", rows.len())));
    }
    let nv = rows.len() / nu;
    if nu < 2 || nv < 2 {
        return Err(CsvError::Grid(crate::error::GridError::TooSmall { nu, nv }));
    }
    let du = (rows[nu - 1][0] - u0) / (nu - 1) as f64;
    let dv = (rows[rows.len() - 1][1] - v0) / (nv - 1) as f64;
    let spec = GridSpec::new(u0, v0, du, dv, nu, nv)?;
    for (k, r) in rows.iter().enumerate() {
        let (iu, iv) = (k % nu, k / nu);
        let (eu, ev) = ((r[0] - spec.u(iu)).abs(), (r[1] - spec.v(iv)).abs());
        if !(eu <= JITTER_TOL && ev <= JITTER_TOL) {
            return Err(irregular(
                k + 1,
                format!("({}, {}) is off the lattice point ({}, {}) by {:.3e}", r[0], r[1], spec.u(iu), spec.v(iv), eu.max(ev)),
            ));
        }
    }
    Ok(spec)
}

fn unit(row: usize, q: &[f64]) -> Result<UnitQuaternion, CsvError> {
    UnitQuaternion::new(Quaternion::new(q[0], q[1], q[2], q[3]))
        .map_err(|e| CsvError::Irregular { row, message: e.to_string() })
}

pub fn read_immersion<R: Read>(r: R) -> Result<ImmersionGrid, CsvError> {
    let rows = read_table(r, IMMERSION_HEADER)?;
    let spec = infer_spec(&rows)?;
    let values = rows
        .iter()
        .enumerate()
        .map(|(k, r)| Ok(Point::new(unit(k + 1, &r[2..6])?, unit(k + 1, &r[6..10])?)))
        .collect::<Result<Vec<_>, CsvError>>()?;
    Ok(ImmersionGrid::new(spec, values, true)?)
}

pub fn read_epsilon<R: Read>(r: R) -> Result<HSurfaceGrid, CsvError> {
    let rows = read_table(r, EPSILON_HEADER)?;
    let spec = infer_spec(&rows)?;
    let values = rows.iter().map(|r| Vec3::new(r[2], r[3], r[4])).collect();
    Ok(HSurfaceGrid::new(spec, values)?)
}
