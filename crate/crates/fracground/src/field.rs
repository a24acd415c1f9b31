//! Periodic grid, sampled real fields, quadrature norms, and validated
//! potential families.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Default cap on total grid points (memory guard).
pub const DEFAULT_MAX_POINTS: usize = 1 << 25;

/// Uniform periodic grid on [-L, L)^N, M points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dim: u32,
    pub half_width: f64,
    pub points_per_dim: usize,
}

impl Grid {
    pub fn new(dim: u32, half_width: f64, points_per_dim: usize) -> Result<Self> {
        Self::with_cap(dim, half_width, points_per_dim, DEFAULT_MAX_POINTS)
    }

    pub fn with_cap(dim: u32, half_width: f64, m: usize, cap: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim {dim} not in 1..=3")));
        }
        if half_width <= 0.0 {
            return Err(Error::InvalidGrid("half_width must be positive".into()));
        }
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("M = {m} must be a power of two >= 16")));
        }
        let total = m.checked_pow(dim).ok_or_else(|| Error::InvalidGrid("M^N overflows".into()))?;
        if total > cap {
            return Err(Error::InvalidGrid(format!("M^N = {total} exceeds cap {cap}")));
        }
        Ok(Grid { dim, half_width, points_per_dim: m })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_dim as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight h^N of one cell.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Axis coordinate of index i.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let m = self.points_per_dim;
        match self.dim {
            1 => [idx, 0, 0],
            2 => [idx / m, idx % m, 0],
            _ => [idx / (m * m), (idx / m) % m, idx % m],
        }
    }

    /// Position vector of a flat index (unused axes zero).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let iv = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim as usize {
            x[a] = self.coord(iv[a]);
        }
        x
    }

    /// |x|^2 of a flat index.
    pub fn radius2(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    }

    /// Max-norm |x|_inf of a flat index.
    pub fn radius_inf(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        x[0].abs().max(x[1].abs()).max(x[2].abs())
    }
}

/// Real scalar field sampled on a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Field { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn<F: Fn(&[f64; 3]) -> f64>(grid: Grid, f: F) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Field { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Field { grid, values: vec![c; grid.len()] }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        let mut bv = f64::NEG_INFINITY;
        for (i, &v) in self.values.iter().enumerate() {
            if v > bv {
                bv = v;
                best = i;
            }
        }
        best
    }

    /// Grid quadrature of an arbitrary pointwise function of the field.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.grid.cell() * self.values.iter().map(|&v| f(v)).sum::<f64>()
    }

    pub fn scale(&mut self, t: f64) {
        for v in &mut self.values {
            *v *= t;
        }
    }
}

/// L^p norm by periodic-grid quadrature; `p = f64::INFINITY` gives sup norm.
pub fn lp_norm(u: &Field, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(u.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParams(format!("p = {p} < 1")));
    }
    Ok(u.integrate(|v| v.abs().powf(p)).powf(1.0 / p))
}

/// Analytic potential families satisfying (V1)/(V2).
#[derive(Clone)]
pub enum PotentialKind {
    Constant { value: f64 },
    GaussianWell { a: f64, b: f64, width2: f64, center: [f64; 3] },
    CustomRadial { profile: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

#[derive(Clone)]
pub struct Potential {
    pub kind: PotentialKind,
    pub v0: f64,
    pub v_inf: f64,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            PotentialKind::Constant { value } => write!(f, "Potential::Constant({value})"),
            PotentialKind::GaussianWell { a, b, width2, center } => {
                write!(f, "Potential::GaussianWell(a={a}, b={b}, w={width2}, c={center:?})")
            }
            PotentialKind::CustomRadial { .. } => write!(f, "Potential::CustomRadial"),
        }
    }
}

impl Potential {
    pub fn constant(value: f64) -> Result<Self> {
        if value <= 0.0 {
            return Err(Error::InvalidPotential("constant potential must be positive".into()));
        }
        Ok(Potential { kind: PotentialKind::Constant { value }, v0: value, v_inf: value })
    }

    /// V(x) = a - b exp(-|x-c|^2 / w), requires a > b >= 0 so V0 = a - b > 0.
    pub fn gaussian_well(a: f64, b: f64, width2: f64, center: [f64; 3]) -> Result<Self> {
        if !(a > b && b >= 0.0) {
            return Err(Error::InvalidPotential(format!("need a > b >= 0, got a={a}, b={b}")));
        }
        if width2 <= 0.0 {
            return Err(Error::InvalidPotential("well width^2 must be positive".into()));
        }
        Ok(Potential {
            kind: PotentialKind::GaussianWell { a, b, width2, center },
            v0: a - b,
            v_inf: a,
        })
    }

    pub fn custom_radial<F: Fn(f64) -> f64 + Send + Sync + 'static>(
        profile: F,
        v0: f64,
        v_inf: f64,
    ) -> Result<Self> {
        if v0 <= 0.0 || v_inf < v0 {
            return Err(Error::InvalidPotential("need 0 < v0 <= v_inf".into()));
        }
        Ok(Potential { kind: PotentialKind::CustomRadial { profile: Arc::new(profile) }, v0, v_inf })
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        match &self.kind {
            PotentialKind::Constant { value } => *value,
            PotentialKind::GaussianWell { a, b, width2, center } => {
                let r2 = (0..3).map(|i| (x[i] - center[i]) * (x[i] - center[i])).sum::<f64>();
                a - b * (-r2 / width2).exp()
            }
            PotentialKind::CustomRadial { profile } => {
                profile((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
            }
        }
    }

    /// x . grad V(x); None when no analytic gradient is available.
    pub fn x_dot_grad(&self, x: &[f64; 3]) -> Option<f64> {
        match &self.kind {
            PotentialKind::Constant { .. } => Some(0.0),
            PotentialKind::GaussianWell { b, width2, center, .. } => {
                let r2 = (0..3).map(|i| (x[i] - center[i]) * (x[i] - center[i])).sum::<f64>();
                let xd = (0..3).map(|i| x[i] * (x[i] - center[i])).sum::<f64>();
                Some(2.0 * b / width2 * xd * (-r2 / width2).exp())
            }
            PotentialKind::CustomRadial { .. } => None,
        }
    }

    /// Location of the global minimum, when unique and known analytically.
    pub fn argmin(&self) -> Option<[f64; 3]> {
        match &self.kind {
            PotentialKind::Constant { .. } => None,
            PotentialKind::GaussianWell { center, b, .. } => {
                if *b > 0.0 {
                    Some(*center)
                } else {
                    None
                }
            }
            PotentialKind::CustomRadial { .. } => None,
        }
    }

    /// Sample onto a grid.
    pub fn sample(&self, grid: Grid) -> Field {
        Field::from_fn(grid, |x| self.eval(x))
    }

    /// Sampled (V1)/(V2) check: positivity, bounds, boundary approach to
    /// v_inf, and the grad-moment bound. Returns max |x.grad V| over the grid.
    pub fn validate(&self, grid: Grid, boundary_tol: f64) -> Result<f64> {
        let mut grad_bound = 0.0f64;
        let mut boundary_gap = 0.0f64;
        let shell = 0.9 * grid.half_width;
        for i in 0..grid.len() {
            let x = grid.position(i);
            let v = self.eval(&x);
            if !(v >= self.v0 * (1.0 - 1e-12) && v <= self.v_inf * (1.0 + 1e-12)) {
                return Err(Error::InvalidPotential(format!(
                    "V out of [v0, v_inf] at {x:?}: {v} not in [{}, {}]",
                    self.v0, self.v_inf
                )));
            }
            if let Some(g) = self.x_dot_grad(&x) {
                grad_bound = grad_bound.max(g.abs());
            }
            if grid.radius_inf(i) >= shell {
                boundary_gap = boundary_gap.max((self.v_inf - v).abs());
            }
        }
        if boundary_gap > boundary_tol * self.v_inf {
            return Err(Error::InvalidPotential(format!(
                "boundary shell deviates from v_inf by {boundary_gap:.3e} (tol {boundary_tol:.3e} rel)"
            )));
        }
        Ok(grad_bound)
    }
}

/// int V u^2 by the grid quadrature rule.
pub fn weighted_l2(u: &Field, v: &Potential) -> f64 {
    let cell = u.grid.cell();
    let mut acc = 0.0;
    for (i, &ui) in u.values.iter().enumerate() {
        acc += v.eval(&u.grid.position(i)) * ui * ui;
    }
    cell * acc
}

/// int (x . grad V) u^2 using the analytic gradient.
pub fn potential_gradient_moment(u: &Field, v: &Potential) -> Result<f64> {
    let cell = u.grid.cell();
    let mut acc = 0.0;
    for (i, &ui) in u.values.iter().enumerate() {
        let g = v
            .x_dot_grad(&u.grid.position(i))
            .ok_or_else(|| Error::InvalidPotential("potential has no analytic gradient".into()))?;
        acc += g * ui * ui;
    }
    Ok(cell * acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid::new(1, 1.0, 8).is_err(), "M < 16");
        assert!(Grid::new(1, 1.0, 24).is_err(), "not a power of two");
        assert!(Grid::new(4, 1.0, 32).is_err(), "dim 4");
        assert!(Grid::with_cap(3, 1.0, 1024, 1 << 20).is_err(), "cap exceeded");
    }

    #[test]
    fn lp_norm_constant_field() {
        // int_{-1}^{1} 1 dx = 2, so ||1||_2 = sqrt(2)
        let g = Grid::new(1, 1.0, 64).unwrap();
        let u = Field::constant(g, 1.0);
        let n = lp_norm(&u, 2.0).unwrap();
        assert!((n - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(lp_norm(&Field::zeros(g), 3.5).unwrap(), 0.0);
        assert!(lp_norm(&u, 0.5).is_err());
        assert_eq!(lp_norm(&u, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn lp_norm_homogeneity() {
        let g = Grid::new(2, 3.0, 32).unwrap();
        let u = Field::from_fn(g, |x| (x[0] - 0.3 * x[1]).sin() + 0.2);
        for &p in &[1.0, 2.0, 2.8571428571428571, f64::INFINITY] {
            let base = lp_norm(&u, p).unwrap();
            for &t in &[0.5, 2.0, 10.0] {
                let mut ut = u.clone();
                ut.scale(t);
                let n = lp_norm(&ut, p).unwrap();
                assert!((n - t * base).abs() <= 1e-12 * n.max(1.0), "p={p}, t={t}");
            }
        }
    }

    #[test]
    fn weighted_l2_matches_constant_scaling() {
        let g = Grid::new(1, 2.0, 128).unwrap();
        let u = Field::from_fn(g, |x| (-x[0] * x[0]).exp());
        let l2sq = lp_norm(&u, 2.0).unwrap().powi(2);
        let v1 = Potential::constant(1.0).unwrap();
        let vc = Potential::constant(3.7).unwrap();
        assert!((weighted_l2(&u, &v1) - l2sq).abs() < 1e-13);
        assert!((weighted_l2(&u, &vc) - 3.7 * l2sq).abs() < 1e-12);
    }

    #[test]
    fn gradient_moment_edges() {
        let g = Grid::new(1, 2.0, 64).unwrap();
        let u = Field::from_fn(g, |x| (-x[0] * x[0]).exp());
        let vc = Potential::constant(2.0).unwrap();
        assert_eq!(potential_gradient_moment(&u, &vc).unwrap(), 0.0);
        let z = Field::zeros(g);
        let vw = Potential::gaussian_well(2.0, 1.0, 1.0, [0.0; 3]).unwrap();
        assert_eq!(potential_gradient_moment(&z, &vw).unwrap(), 0.0);
        // centered well pulls inward: x.grad V >= 0, so the moment is >= 0 for any u
        let m = potential_gradient_moment(&u, &vw).unwrap();
        assert!(m > 0.0, "x.grad V moment of a centered well must be positive, got {m}");
        let vr = Potential::custom_radial(|r| 1.0 + r * r / (1.0 + r * r), 1.0, 2.0).unwrap();
        assert!(potential_gradient_moment(&u, &vr).is_err());
    }

    #[test]
    fn potential_validation() {
        assert!(Potential::gaussian_well(1.0, 1.0, 1.0, [0.0; 3]).is_err(), "a <= b");
        assert!(Potential::gaussian_well(1.0, 1.2, 1.0, [0.0; 3]).is_err());
        let g = Grid::new(1, 4.0, 128).unwrap();
        let v = Potential::gaussian_well(2.0, 1.0, 0.25, [0.0; 3]).unwrap();
        let bound = v.validate(g, 1e-3).unwrap();
        assert!(bound.is_finite() && bound > 0.0);
        // wide well: boundary far from v_inf -> rejected
        let vwide = Potential::gaussian_well(2.0, 1.0, 100.0, [0.0; 3]).unwrap();
        assert!(vwide.validate(g, 1e-3).is_err());
    }

    #[test]
    fn holder_interpolation_on_smooth_fields() {
        // ||u||_{2*-eps}^{2*-eps} <= ||u||_2^{2 eps/(2*-2)} ||u||_{2*}^{2*(2*-2-eps)/(2*-2)}
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = Grid::new(1, 5.0, 256).unwrap();
        let (two_star, eps) = (10.0 / 3.0, 0.2);
        for _ in 0..20 {
            let a: f64 = rng.gen_range(0.2..2.0);
            let b: f64 = rng.gen_range(0.2..2.0);
            let k: f64 = rng.gen_range(0.5..3.0);
            let u = Field::from_fn(g, |x| a * (-x[0] * x[0] / k).exp() + b * (-(x[0] - 1.0).powi(2)).exp());
            let lhs = lp_norm(&u, two_star - eps).unwrap().powf(two_star - eps);
            let n2 = lp_norm(&u, 2.0).unwrap();
            let nc = lp_norm(&u, two_star).unwrap();
            let rhs = n2.powf(2.0 * eps / (two_star - 2.0))
                * nc.powf(two_star * (two_star - 2.0 - eps) / (two_star - 2.0));
            assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        }
    }
}
