use super::field::{check_shape, check_speed};
use super::{BoundaryTrace, ForwardError, Grid, TraceKind, WaveField};
use ndarray::{Array1, Array2};

/// Courant numbers up to this are accepted; leaves room for rounding in
/// grids built exactly at the limit.
const COURANT_LIMIT: f64 = 1.0 + 1e-12;

/// Leapfrog solution of `∂_t²p = c²Δp + source` with zero initial data and
/// Dirichlet values `bc`.
///
/// Level 1 comes from a Taylor half step, so the scheme is second order in
/// both space and time. The solution at level `n` depends only on `source`
/// at levels `< n` and `bc` at levels `≤ n`.
pub fn solve_linear(grid: &Grid, speed: &Array1<f64>, source: &Array2<f64>, bc: &BoundaryTrace) -> Result<WaveField, ForwardError> {
    let c_max = check_speed(grid, speed)?;
    check_shape(grid, source.view(), "source")?;
    if bc.kind != TraceKind::Dirichlet {
        return Err(ForwardError::NotDirichlet);
    }
    let boundary = grid.boundary_nodes();
    if bc.nodes != boundary || bc.levels() != grid.levels() {
        return Err(ForwardError::Shape("boundary trace does not match the grid".into()));
    }
    let courant = grid.courant(c_max);
    if courant > COURANT_LIMIT {
        return Err(ForwardError::CflViolation { courant });
    }

    let n = grid.n_nodes();
    let levels = grid.levels();
    let dt2 = grid.dt * grid.dt;
    let c2: Vec<f64> = speed.iter().map(|c| c * c).collect();
    let interior: Vec<usize> = (0..n).filter(|&k| !grid.is_boundary(k)).collect();
    let mut values = Array2::<f64>::zeros((levels, n));
    let mut lap = vec![0.0; n];

    let set_bc = |row: &mut [f64], level: usize| {
        for (b, &node) in boundary.iter().enumerate() {
            row[node] = bc.values[[level, b]];
        }
    };

    {
        let row = values.row_mut(0).into_slice().expect("standard layout");
        set_bc(row, 0);
    }
    for level in 0..levels - 1 {
        let (done, mut rest) = values.view_mut().split_at(ndarray::Axis(0), level + 1);
        let cur = done.row(level);
        let cur = cur.as_slice().expect("standard layout");
        grid.laplacian(cur, &mut lap);
        let src = source.row(level);
        let next = rest.row_mut(0).into_slice().expect("standard layout");
        if level == 0 {
            for &k in &interior {
                next[k] = cur[k] + 0.5 * dt2 * (c2[k] * lap[k] + src[k]);
            }
        } else {
            let prev = done.row(level - 1);
            for &k in &interior {
                next[k] = 2.0 * cur[k] - prev[k] + dt2 * (c2[k] * lap[k] + src[k]);
            }
        }
        set_bc(next, level + 1);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(ForwardError::NonFiniteField { level: level + 1 });
        }
    }
    Ok(WaveField { grid: grid.clone(), speed: speed.clone(), values })
}

/// `solve_linear` with zero Dirichlet data.
pub fn solve_source(grid: &Grid, speed: &Array1<f64>, source: &Array2<f64>) -> Result<WaveField, ForwardError> {
    solve_linear(grid, speed, source, &BoundaryTrace::zeros(grid, TraceKind::Dirichlet))
}
