//! Analytic Talenti bubble sampling, blow-up rescaling, nondegeneracy
//! kernel modes, and the Kelvin transform.

use crate::constants::{lambda_star, Params};
use crate::error::{Error, Result};
use crate::fft::Spectral;
use crate::field::{Field, Grid};

/// Placement of a bubble U((x - center)/mu) on the box.
#[derive(Debug, Clone, Copy)]
pub struct BubbleSpec {
    pub center: [f64; 3],
    pub mu: f64,
    pub params: Params,
}

impl BubbleSpec {
    pub fn new(center: [f64; 3], mu: f64, params: Params) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidParams(format!("bubble scale mu = {mu} must be positive")));
        }
        Ok(BubbleSpec { center, mu, params })
    }

    /// Center inside the box with margin >= L/4; callers warn otherwise.
    pub fn margin_ok(&self, grid: Grid) -> bool {
        let l = grid.half_width;
        (0..grid.dim as usize).all(|a| self.center[a].abs() <= 0.75 * l)
    }
}

/// Sample U((x - center)/mu); U(0) = 1 for any mu.
pub fn bubble_field(spec: &BubbleSpec, grid: Grid) -> Field {
    let lam = lambda_star(&spec.params);
    let a = (spec.params.n() - 2.0 * spec.params.s) / 2.0;
    let mu2 = spec.mu * spec.mu;
    Field::from_fn(grid, |x| {
        let mut r2 = 0.0;
        for i in 0..grid.dim as usize {
            let d = x[i] - spec.center[i];
            r2 += d * d;
        }
        (1.0 + r2 / (mu2 * lam * lam)).powf(-a)
    })
}

/// Analytic samples of the N+1 nondegeneracy kernel modes at mu = 1:
/// dU/dx_i (i = 1..N) and (N-2s)/2 U + x.grad U, each L^2-normalized.
pub fn kernel_modes(spec: &BubbleSpec, grid: Grid) -> Vec<Field> {
    let p = &spec.params;
    let lam = lambda_star(p);
    let a = (p.n() - 2.0 * p.s) / 2.0;
    let c = spec.center;
    let q = |x: &[f64; 3]| {
        let mut r2 = 0.0;
        for i in 0..grid.dim as usize {
            let d = x[i] - c[i];
            r2 += d * d;
        }
        1.0 + r2 / (lam * lam)
    };
    let mut modes = Vec::with_capacity(p.dim as usize + 1);
    for axis in 0..p.dim as usize {
        modes.push(Field::from_fn(grid, |x| {
            let d = x[axis] - c[axis];
            -a * 2.0 * d / (lam * lam) * q(x).powf(-a - 1.0)
        }));
    }
    // dilation mode: a U + y.grad U = a U - 2a (|y|^2/lam^2) (1+|y|^2/lam^2)^{-a-1}
    modes.push(Field::from_fn(grid, |x| {
        let qv = q(x);
        let y2_over = qv - 1.0;
        a * qv.powf(-a) - 2.0 * a * y2_over * qv.powf(-a - 1.0)
    }));
    for m in &mut modes {
        let nrm = (m.grid.cell() * m.values.iter().map(|v| v * v).sum::<f64>()).sqrt();
        m.scale(1.0 / nrm);
    }
    modes
}

/// Sub-grid peak location and value by a per-axis 3-point quadratic fit.
pub fn refined_argmax(u: &Field) -> ([f64; 3], f64) {
    let g = u.grid;
    let m = g.points_per_dim;
    let idx = u.argmax();
    let iv = g.unravel(idx);
    let mut pos = [0.0; 3];
    let mut corr = 0.0;
    for a in 0..g.dim as usize {
        let stride = m.pow(g.dim - 1 - a as u32);
        let base = idx - iv[a] * stride;
        let up = u.values[base + ((iv[a] + 1) % m) * stride];
        let dn = u.values[base + ((iv[a] + m - 1) % m) * stride];
        let curv = up - 2.0 * u.values[idx] + dn;
        let mut delta = 0.0;
        if curv < 0.0 {
            delta = (0.5 * (dn - up) / curv).clamp(-0.5, 0.5);
            // separable parabola: per-axis peak correction adds up
            corr += -0.125 * (up - dn) * (up - dn) / curv;
        }
        pos[a] = g.coord(iv[a]) + delta * g.spacing();
    }
    (pos, u.values[idx] + corr)
}

/// Blow-up rescaling v(y) = mu^{2s/(2*-2-eps)} u(x_max + mu y) on the same
/// grid, with mu = ||u||_inf^{-(2*-2-eps)/(2s)}. Band-limited (chirp-z)
/// resampling; v(0) = 1 within interpolation accuracy and 0 <= v <= 1 + 1e-6.
pub fn rescale_to_blowup(
    sp: &Spectral,
    u: &Field,
    eps: f64,
    p: &Params,
) -> Result<(Field, f64, [f64; 3])> {
    if u.values.iter().all(|&v| v <= 0.0) {
        return Err(Error::InvalidParams("rescale_to_blowup needs a nonzero nonnegative field".into()));
    }
    let (x_max, u_max) = refined_argmax(u);
    let expo = (p.two_star - 2.0 - eps) / (2.0 * p.s);
    let mu = u_max.powf(-expo);
    let four_h = 4.0 * u.grid.spacing();
    if mu < four_h {
        return Err(Error::UnderResolved { mu, four_h });
    }
    let mut v = sp.zoom(u, &x_max, mu);
    let t = 1.0 / u_max;
    for vv in &mut v.values {
        *vv = (*vv * t).max(0.0); // clamp band-limited ringing below zero
    }
    Ok((v, mu, x_max))
}

/// Kelvin transform profile Phi(r) = r^{2s-N} u(1/r) on log-spaced radii,
/// for a field centered at the origin. In one dimension the trigonometric
/// interpolant is evaluated exactly; in higher dimensions the radial shell
/// average of u is interpolated. Radii whose inverse falls outside the
/// resolvable window (h, L) are excluded.
pub fn kelvin(sp: &Spectral, u: &Field, p: &Params, n_samples: usize) -> Result<Vec<(f64, f64)>> {
    let g = u.grid;
    let h = g.spacing();
    let l = g.half_width;
    let r_lo = 1.2 / l; // 1/r < L
    let r_hi = 1.0 / (2.0 * h); // 1/r > 2h
    if r_hi <= r_lo {
        return Err(Error::InvalidGrid("no resolvable Kelvin window on this grid".into()));
    }
    let expo = 2.0 * p.s - p.n();
    let mut out = Vec::with_capacity(n_samples);
    if g.dim == 1 {
        let spec = sp.forward(u);
        for i in 0..n_samples {
            let t = i as f64 / (n_samples - 1).max(1) as f64;
            let r = r_lo * (r_hi / r_lo).powf(t);
            let q = 1.0 / r;
            let val = 0.5 * (sp.eval_at_1d(&spec, q) + sp.eval_at_1d(&spec, -q));
            out.push((r, r.powf(expo) * val));
        }
    } else {
        // radial average by shell binning with bin width h
        let nbins = (l / h) as usize;
        let mut sums = vec![0.0; nbins];
        let mut counts = vec![0usize; nbins];
        for i in 0..g.len() {
            let r = g.radius2(i).sqrt();
            let b = (r / h) as usize;
            if b < nbins {
                sums[b] += u.values[i];
                counts[b] += 1;
            }
        }
        let prof: Vec<(f64, f64)> = (0..nbins)
            .filter(|&b| counts[b] > 0)
            .map(|b| ((b as f64 + 0.5) * h, sums[b] / counts[b] as f64))
            .collect();
        let interp = |q: f64| -> Option<f64> {
            let j = prof.partition_point(|&(r, _)| r < q);
            if j == 0 || j >= prof.len() {
                return None;
            }
            let (r0, v0) = prof[j - 1];
            let (r1, v1) = prof[j];
            Some(v0 + (v1 - v0) * (q - r0) / (r1 - r0))
        };
        for i in 0..n_samples {
            let t = i as f64 / (n_samples - 1).max(1) as f64;
            let r = r_lo * (r_hi / r_lo).powf(t);
            if let Some(val) = interp(1.0 / r) {
                out.push((r, r.powf(expo) * val));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidGrid("all Kelvin radii excluded".into()));
    }
    Ok(out)
}
