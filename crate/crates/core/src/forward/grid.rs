use super::ForwardError;
use serde::{Deserialize, Serialize};

/// Uniform space-time grid on an interval or a rectangle.
///
/// Node values are stored row-major with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Cells per axis.
    pub cells: Vec<usize>,
    pub dt: f64,
    /// Number of time steps; levels are `0..=steps`.
    pub steps: usize,
}

impl Grid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize>, dt: f64, steps: usize) -> Result<Self, ForwardError> {
        let d = cells.len();
        if !(1..=2).contains(&d) || lower.len() != d || upper.len() != d {
            return Err(ForwardError::Shape(format!("grid must be 1-D or 2-D with matching extents, got {d} axes")));
        }
        if cells.iter().any(|&n| n < 2) {
            return Err(ForwardError::Shape("need at least 2 cells per axis".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(b > a)) {
            return Err(ForwardError::Shape("empty extent".into()));
        }
        if !(dt > 0.0) || steps < 3 {
            return Err(ForwardError::Shape(format!("need dt > 0 and at least 3 steps (dt={dt}, steps={steps})")));
        }
        Ok(Grid { lower, upper, cells, dt, steps })
    }

    /// Interval `[a, b]` with `cells` cells and final time `t_final`; the time
    /// step is the largest one with Courant number `courant` for speed `c_max`
    /// that divides `t_final` evenly.
    pub fn line(a: f64, b: f64, cells: usize, t_final: f64, courant: f64, c_max: f64) -> Result<Self, ForwardError> {
        Self::fitted(vec![a], vec![b], vec![cells], t_final, courant, c_max)
    }

    pub fn rect(lower: [f64; 2], upper: [f64; 2], cells: [usize; 2], t_final: f64, courant: f64, c_max: f64) -> Result<Self, ForwardError> {
        Self::fitted(lower.to_vec(), upper.to_vec(), cells.to_vec(), t_final, courant, c_max)
    }

    fn fitted(lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize>, t_final: f64, courant: f64, c_max: f64) -> Result<Self, ForwardError> {
        if !(t_final > 0.0 && courant > 0.0 && c_max > 0.0) {
            return Err(ForwardError::Shape("t_final, courant and c_max must be positive".into()));
        }
        let probe = Grid { lower, upper, cells, dt: 1.0, steps: 3 };
        let dt_max = courant / (c_max * probe.inv_dx_norm());
        let steps = (t_final / dt_max).ceil().max(3.0) as usize;
        Grid::new(probe.lower, probe.upper, probe.cells, t_final / steps as f64, steps)
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn dx(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.cells[axis] as f64
    }

    /// `sqrt(Σ 1/dx²)`
    fn inv_dx_norm(&self) -> f64 {
        (0..self.dim()).map(|a| self.dx(a).powi(-2)).sum::<f64>().sqrt()
    }

    /// Courant number `dt · c_max · sqrt(Σ 1/dx²)`; the leapfrog scheme is
    /// stable for values ≤ 1.
    pub fn courant(&self, c_max: f64) -> f64 {
        self.dt * c_max * self.inv_dx_norm()
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn levels(&self) -> usize {
        self.steps + 1
    }

    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.dt
    }

    pub fn nodes_on(&self, axis: usize) -> usize {
        self.cells[axis] + 1
    }

    pub fn n_nodes(&self) -> usize {
        (0..self.dim()).map(|a| self.nodes_on(a)).product()
    }

    /// Per-axis indices of a node.
    pub fn multi_index(&self, node: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [node, 0]
        } else {
            let ny = self.nodes_on(1);
            [node / ny, node % ny]
        }
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        if self.dim() == 1 {
            i
        } else {
            i * self.nodes_on(1) + j
        }
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        let idx = self.multi_index(node);
        (0..self.dim()).map(|a| self.lower[a] + idx[a] as f64 * self.dx(a)).collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let idx = self.multi_index(node);
        (0..self.dim()).any(|a| idx[a] == 0 || idx[a] == self.cells[a])
    }

    /// Boundary nodes in a fixed order: in 1-D `[left, right]`, in 2-D all
    /// perimeter nodes in increasing node index.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&n| self.is_boundary(n)).collect()
    }

    /// Outward unit normal at a boundary node (corners get the diagonal).
    pub fn outward_normal(&self, node: usize) -> Vec<f64> {
        let idx = self.multi_index(node);
        let mut n: Vec<f64> = (0..self.dim())
            .map(|a| {
                if idx[a] == 0 {
                    -1.0
                } else if idx[a] == self.cells[a] {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        n.iter_mut().for_each(|x| *x /= len);
        n
    }

    /// Trapezoid quadrature weights over the nodes.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        (0..self.n_nodes())
            .map(|node| {
                let idx = self.multi_index(node);
                (0..self.dim())
                    .map(|a| {
                        let edge = idx[a] == 0 || idx[a] == self.cells[a];
                        self.dx(a) * if edge { 0.5 } else { 1.0 }
                    })
                    .product()
            })
            .collect()
    }

    /// Five-point (three-point in 1-D) Laplacian at interior nodes; boundary
    /// entries of `out` are left untouched.
    pub fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        if self.dim() == 1 {
            let h2 = self.dx(0).powi(-2);
            let n = self.cells[0];
            for i in 1..n {
                out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * h2;
            }
        } else {
            let (hx2, hy2) = (self.dx(0).powi(-2), self.dx(1).powi(-2));
            let (nx, ny) = (self.cells[0], self.cells[1]);
            let stride = ny + 1;
            for i in 1..nx {
                for j in 1..ny {
                    let k = i * stride + j;
                    out[k] = (u[k - stride] - 2.0 * u[k] + u[k + stride]) * hx2 + (u[k - 1] - 2.0 * u[k] + u[k + 1]) * hy2;
                }
            }
        }
    }
}
