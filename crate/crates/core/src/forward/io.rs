//! CSV and little-endian binary serialization of fields and traces.
//!
//! Binary layout: `u32` dimension count, per-axis `u64` cell counts, `f64`
//! time step, `u64` level count, per-axis `f64` lower and upper extents, then
//! the row-major payload (one row per time level) as `f64`.

use super::{BoundaryTrace, ForwardError, Grid, WaveField};
use ndarray::Array2;
use std::io::{Read, Write};

fn csv_err(e: csv::Error) -> ForwardError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => ForwardError::Io(e),
        other => ForwardError::Format(format!("{other:?}")),
    }
}

fn write_rows<W: Write>(out: W, header: Vec<String>, dt: f64, values: &Array2<f64>) -> Result<(), ForwardError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(csv_err)?;
    for (l, row) in values.outer_iter().enumerate() {
        let mut rec = Vec::with_capacity(row.len() + 1);
        rec.push(format!("{:e}", l as f64 * dt));
        rec.extend(row.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per time level: `t` followed by the node values.
pub fn write_field_csv<W: Write>(out: W, field: &WaveField) -> Result<(), ForwardError> {
    let header = std::iter::once("t".to_string()).chain((0..field.grid.n_nodes()).map(|k| format!("node{k}"))).collect();
    write_rows(out, header, field.grid.dt, &field.values)
}

/// One row per time level: `t` followed by the values at each boundary node.
pub fn write_trace_csv<W: Write>(out: W, trace: &BoundaryTrace) -> Result<(), ForwardError> {
    let header = std::iter::once("t".to_string()).chain(trace.nodes.iter().map(|k| format!("node{k}"))).collect();
    write_rows(out, header, trace.dt, &trace.values)
}

/// Reads the value columns back from [`write_field_csv`] or
/// [`write_trace_csv`] output.
pub fn read_csv_values<R: Read>(input: R) -> Result<Array2<f64>, ForwardError> {
    let mut r = csv::Reader::from_reader(input);
    let mut data = Vec::new();
    let mut width = None;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>().map_err(|e| ForwardError::Format(format!("{s:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if *width.get_or_insert(row.len()) != row.len() {
            return Err(ForwardError::Format("ragged rows".into()));
        }
        data.extend(row);
    }
    let width = width.unwrap_or(0);
    let rows = data.len().checked_div(width).unwrap_or(0);
    Array2::from_shape_vec((rows, width), data).map_err(|e| ForwardError::Format(e.to_string()))
}

pub fn write_binary<W: Write>(mut out: W, grid: &Grid, values: &Array2<f64>) -> Result<(), ForwardError> {
    if values.nrows() != grid.levels() {
        return Err(ForwardError::Shape("payload rows must equal the number of time levels".into()));
    }
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &n in &grid.cells {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    out.write_all(&grid.dt.to_le_bytes())?;
    out.write_all(&(grid.levels() as u64).to_le_bytes())?;
    for a in 0..grid.dim() {
        out.write_all(&grid.lower[a].to_le_bytes())?;
        out.write_all(&grid.upper[a].to_le_bytes())?;
    }
    out.write_all(&(values.ncols() as u64).to_le_bytes())?;
    for v in values.iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N], ForwardError> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_binary<R: Read>(mut input: R) -> Result<(Grid, Array2<f64>), ForwardError> {
    let dim = u32::from_le_bytes(read_array(&mut input)?) as usize;
    if !(1..=2).contains(&dim) {
        return Err(ForwardError::Format(format!("unsupported dimension {dim}")));
    }
    let mut cells = Vec::with_capacity(dim);
    for _ in 0..dim {
        cells.push(u64::from_le_bytes(read_array(&mut input)?) as usize);
    }
    let dt = f64::from_le_bytes(read_array(&mut input)?);
    let levels = u64::from_le_bytes(read_array(&mut input)?) as usize;
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for _ in 0..dim {
        lower.push(f64::from_le_bytes(read_array(&mut input)?));
        upper.push(f64::from_le_bytes(read_array(&mut input)?));
    }
    let width = u64::from_le_bytes(read_array(&mut input)?) as usize;
    if levels == 0 {
        return Err(ForwardError::Format("no time levels".into()));
    }
    let grid = Grid::new(lower, upper, cells, dt, levels - 1)?;
    let mut data = Vec::with_capacity(levels * width);
    for _ in 0..levels * width {
        data.push(f64::from_le_bytes(read_array(&mut input)?));
    }
    let values = Array2::from_shape_vec((levels, width), data).map_err(|e| ForwardError::Format(e.to_string()))?;
    Ok((grid, values))
}
