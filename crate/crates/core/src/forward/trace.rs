use super::field::{time_d, time_dd};
use super::{BoundaryTrace, ForwardError, Grid, TraceKind, WaveField};
use ndarray::{Array2, ArrayView2};

/// Outward normal derivative on the boundary nodes by one-sided
/// second-order differences. At corners of a rectangle the normal is the
/// diagonal one.
pub fn dn_trace(field: &WaveField) -> BoundaryTrace {
    let grid = &field.grid;
    let nodes = grid.boundary_nodes();
    // (weight, node) lists per boundary node
    let stencils: Vec<Vec<(f64, usize)>> = nodes.iter().map(|&node| normal_stencil(grid, node)).collect();
    let values =
        Array2::from_shape_fn((grid.levels(), nodes.len()), |(l, b)| stencils[b].iter().map(|&(w, k)| w * field.values[[l, k]]).sum());
    BoundaryTrace { kind: TraceKind::Neumann, dt: grid.dt, nodes, values }
}

fn normal_stencil(grid: &Grid, node: usize) -> Vec<(f64, usize)> {
    let normal = grid.outward_normal(node);
    let idx = grid.multi_index(node);
    let mut out = Vec::new();
    for (axis, &n) in normal.iter().enumerate() {
        if n == 0.0 {
            continue;
        }
        // derivative along the outward axis direction is
        // (3p_0 − 4p_1 + p_2) / 2h with p_k the k-th node inward
        let inward = |step: usize| {
            let mut i = idx;
            i[axis] = if n > 0.0 { i[axis] - step } else { i[axis] + step };
            grid.node(i[0], i[1])
        };
        let s = n.abs() / (2.0 * grid.dx(axis));
        out.push((3.0 * s, inward(0)));
        out.push((-4.0 * s, inward(1)));
        out.push((s, inward(2)));
    }
    out
}

/// Discrete `Z^m` norm: `sqrt(max_n Σ_{k≤m} ‖D_t^k v(t_n)‖²)` with trapezoid
/// weights in space.
pub fn zm_norm(field: &WaveField, m: usize) -> Result<f64, ForwardError> {
    zm_norm_values(&field.grid, field.values.view(), m)
}

pub fn zm_norm_values(grid: &Grid, values: ArrayView2<f64>, m: usize) -> Result<f64, ForwardError> {
    if m > 2 {
        return Err(ForwardError::BadOrder(m));
    }
    let w = grid.quadrature_weights();
    let mut total = vec![0.0; values.nrows()];
    let mut add = |a: ArrayView2<f64>| {
        for (n, row) in a.outer_iter().enumerate() {
            total[n] += row.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>();
        }
    };
    add(values);
    if m >= 1 {
        add(time_d(values, grid.dt).view());
    }
    if m >= 2 {
        add(time_dd(values, grid.dt).view());
    }
    Ok(total.into_iter().fold(0.0, f64::max).sqrt())
}
