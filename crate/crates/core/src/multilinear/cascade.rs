use super::MultilinearError;
use crate::forward::{solve_linear, solve_source, time_dd, BoundaryTrace, Grid, WaveField};
use crate::NonlinearityProfile;
use itertools::Itertools;
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Boundary sources `f_j` with base amplitudes `ε_j` and their linear
/// solutions `v_j`.
#[derive(Debug, Clone)]
pub struct ProbeFamily {
    pub grid: Grid,
    pub speed: Array1<f64>,
    pub sources: Vec<BoundaryTrace>,
    pub epsilons: Vec<f64>,
    pub linear: Vec<Array2<f64>>,
}

impl ProbeFamily {
    pub fn new(grid: &Grid, speed: &Array1<f64>, sources: Vec<BoundaryTrace>, epsilons: Vec<f64>) -> Result<Self, MultilinearError> {
        if sources.is_empty() || sources.len() != epsilons.len() {
            return Err(MultilinearError::Family("need one amplitude per source".into()));
        }
        if epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(MultilinearError::Family("amplitudes must be positive".into()));
        }
        let zero = Array2::zeros((grid.levels(), grid.n_nodes()));
        let linear = sources.par_iter().map(|f| solve_linear(grid, speed, &zero, f).map(|w| w.values)).collect::<Result<Vec<_>, _>>()?;
        Ok(ProbeFamily { grid: grid.clone(), speed: speed.clone(), sources, epsilons, linear })
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub(crate) fn field(&self, values: Array2<f64>) -> WaveField {
        WaveField { grid: self.grid.clone(), speed: self.speed.clone(), values }
    }
}

/// Interaction terms keyed by ordered index tuples, e.g. `[i, j]` for
/// `A₂^{ij}`. The solution for data `Σ ε_j f_j` expands as
/// `Σ ε_i v_i + Σ ε_iε_j A₂^{ij} + Σ ε_iε_jε_k A₃^{ijk} + …`.
#[derive(Debug, Clone)]
pub struct CascadeTerms {
    pub order: usize,
    pub terms: BTreeMap<Vec<usize>, Array2<f64>>,
}

impl CascadeTerms {
    pub fn get(&self, idx: &[usize]) -> Option<&Array2<f64>> {
        self.terms.get(idx)
    }
}

fn product(fields: &[&Array2<f64>]) -> Array2<f64> {
    let mut out = fields[0].clone();
    for f in &fields[1..] {
        out *= *f;
    }
    out
}

/// All terms up to `order` for every ordered index tuple, lower orders
/// first. Each term solves the linear problem with zero data and a source
/// built from products of lower terms.
pub fn cascade(family: &ProbeFamily, beta: &NonlinearityProfile, order: usize) -> Result<CascadeTerms, MultilinearError> {
    if !(2..=4).contains(&order) {
        return Err(MultilinearError::BadOrder(order));
    }
    let j = family.len();
    let dt = family.grid.dt;
    let v = &family.linear;
    let (b2, b3, b4) = (beta.beta(2), beta.beta(3), beta.beta(4));
    let mut terms: BTreeMap<Vec<usize>, Array2<f64>> = BTreeMap::new();

    for k in 2..=order {
        let tuples: Vec<Vec<usize>> = (0..k).map(|_| 0..j).multi_cartesian_product().collect();
        let done = &terms;
        let source_of = |t: &[usize]| -> Array2<f64> {
            let mut s = Array2::zeros(v[0].raw_dim());
            let mut add = |coef: f64, fields: &[&Array2<f64>]| {
                if coef != 0.0 {
                    s.scaled_add(coef, &time_dd(product(fields).view(), dt));
                }
            };
            match k {
                2 => add(b2, &[&v[t[0]], &v[t[1]]]),
                3 => {
                    add(2.0 * b2, &[&v[t[0]], &done[&t[1..].to_vec()]]);
                    add(b3, &[&v[t[0]], &v[t[1]], &v[t[2]]]);
                }
                _ => {
                    add(2.0 * b2, &[&v[t[0]], &done[&t[1..].to_vec()]]);
                    add(b2, &[&done[&t[..2].to_vec()], &done[&t[2..].to_vec()]]);
                    add(3.0 * b3, &[&v[t[0]], &v[t[1]], &done[&t[2..].to_vec()]]);
                    add(b4, &[&v[t[0]], &v[t[1]], &v[t[2]], &v[t[3]]]);
                }
            }
            s
        };
        let level: Vec<(Vec<usize>, Array2<f64>)> = tuples
            .into_par_iter()
            .map(|t| {
                let s = source_of(&t);
                let w = solve_source(&family.grid, &family.speed, &s)?;
                Ok((t, w.values))
            })
            .collect::<Result<_, MultilinearError>>()?;
        terms.extend(level);
    }
    Ok(CascadeTerms { order, terms })
}

/// `∂^α_ε p` at `ε = 0` predicted by the cascade: `α!` times the sum of the
/// terms whose index tuple is an arrangement of the multiset `α`.
pub fn cascade_derivative(terms: &CascadeTerms, pattern: &[usize]) -> Result<Array2<f64>, MultilinearError> {
    let multiset: Vec<usize> = pattern.iter().enumerate().flat_map(|(j, &a)| std::iter::repeat_n(j, a)).collect();
    let k = multiset.len();
    if k < 2 || k > terms.order {
        return Err(MultilinearError::BadPattern(format!("pattern {pattern:?} outside cascade order {}", terms.order)));
    }
    let factor: f64 = pattern.iter().map(|&a| (1..=a).product::<usize>() as f64).product();
    let mut out: Option<Array2<f64>> = None;
    for t in multiset.iter().copied().permutations(k).unique() {
        let term = terms.get(&t).ok_or_else(|| MultilinearError::BadPattern(format!("no cascade term {t:?}")))?;
        match out.as_mut() {
            Some(o) => *o += term,
            None => out = Some(term.clone()),
        }
    }
    let mut out = out.expect("at least one arrangement");
    out *= factor;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::TraceKind;
    use std::f64::consts::PI;

    pub(crate) fn bump(start: f64, width: f64) -> impl Fn(f64) -> f64 {
        move |t| {
            if (start..start + width).contains(&t) {
                (PI * (t - start) / width).sin().powi(4)
            } else {
                0.0
            }
        }
    }

    fn family(grid: &Grid) -> ProbeFamily {
        let left = |s: f64| {
            let b = bump(s, 0.3);
            BoundaryTrace::sample(grid, move |t, x| if x[0] == 0.0 { b(t) } else { 0.0 })
        };
        let right = |s: f64| {
            let b = bump(s, 0.3);
            BoundaryTrace::sample(grid, move |t, x| if x[0] == 1.0 { b(t) } else { 0.0 })
        };
        let speed = Array1::ones(grid.n_nodes());
        ProbeFamily::new(grid, &speed, vec![left(0.0), right(0.05), left(0.2)], vec![1e-3; 3]).unwrap()
    }

    fn max_abs(a: &Array2<f64>) -> f64 {
        a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    #[test]
    fn zero_profile_gives_zero_terms() {
        let g = Grid::line(0.0, 1.0, 60, 1.0, 0.9, 1.0).unwrap();
        let c = cascade(&family(&g), &NonlinearityProfile::zero(), 3).unwrap();
        assert_eq!(c.terms.len(), 9 + 27);
        assert!(c.terms.values().all(|a| max_abs(a) == 0.0));
    }

    #[test]
    fn pair_terms_are_symmetric_and_causal() {
        let g = Grid::line(0.0, 1.0, 60, 1.0, 0.9, 1.0).unwrap();
        let fam = family(&g);
        let c = cascade(&fam, &NonlinearityProfile::lower(0.5, 0.2, 0.1), 4).unwrap();
        assert_eq!(c.get(&[0, 1]), c.get(&[1, 0]));
        assert!(max_abs(c.get(&[0, 1]).unwrap()) > 0.0);
        // nothing moves before the first probe switches on at level 1
        for term in c.terms.values() {
            assert_eq!(term.row(0).iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
        }
    }

    #[test]
    fn disjoint_supports_do_not_interact() {
        let g = Grid::line(0.0, 1.0, 60, 0.6, 0.9, 1.0).unwrap();
        let speed = Array1::ones(g.n_nodes());
        let b = bump(0.0, 0.1);
        let early = BoundaryTrace::sample(&g, move |t, x| if x[0] == 0.0 { b(t) } else { 0.0 });
        let late = BoundaryTrace::zeros(&g, TraceKind::Dirichlet);
        let fam = ProbeFamily::new(&g, &speed, vec![early, late], vec![1e-3; 2]).unwrap();
        let c = cascade(&fam, &NonlinearityProfile::single(2, 1.0).unwrap(), 2).unwrap();
        assert_eq!(max_abs(c.get(&[0, 1]).unwrap()), 0.0);
        assert!(max_abs(c.get(&[0, 0]).unwrap()) > 0.0);
    }

    #[test]
    fn cubic_only_model_matches_direct_solve() {
        let g = Grid::line(0.0, 1.0, 60, 1.0, 0.9, 1.0).unwrap();
        let fam = family(&g);
        let beta = NonlinearityProfile::single(3, 0.8).unwrap();
        let c = cascade(&fam, &beta, 3).unwrap();
        let v = &fam.linear;
        let src = time_dd((&v[0] * &v[1] * &v[2]).view(), g.dt) * 0.8;
        let direct = solve_source(&g, &fam.speed, &src).unwrap();
        assert_eq!(c.get(&[0, 1, 2]).unwrap(), &direct.values);
        assert_eq!(max_abs(c.get(&[1, 2]).unwrap()), 0.0);
    }

    #[test]
    fn derivative_sums_arrangements() {
        let g = Grid::line(0.0, 1.0, 40, 1.0, 0.9, 1.0).unwrap();
        let fam = family(&g);
        let c = cascade(&fam, &NonlinearityProfile::lower(0.5, 0.3, 0.0), 3).unwrap();
        let d = cascade_derivative(&c, &[1, 1, 0]).unwrap();
        assert_eq!(d, c.get(&[0, 1]).unwrap() * 2.0);
        let d = cascade_derivative(&c, &[2, 1, 0]).unwrap();
        let want = (c.get(&[0, 0, 1]).unwrap() + c.get(&[0, 1, 0]).unwrap() + c.get(&[1, 0, 0]).unwrap()) * 2.0;
        assert!((&d - &want).iter().all(|x| x.abs() < 1e-18));
        assert!(cascade_derivative(&c, &[1, 1, 1, 1]).is_err());
    }
}
