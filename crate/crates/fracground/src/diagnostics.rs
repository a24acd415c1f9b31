//! Per-solution certificates: Pohozaev residual, bubble comparison, decay
//! slope, tail mass, Moser local-bound ratio, and the nondegeneracy kernel
//! check.

use crate::bubble::{bubble_field, kernel_modes, rescale_to_blowup, BubbleSpec};
use crate::constants::Params;
use crate::error::{Error, Result};
use crate::fft::Spectral;
use crate::field::{lp_norm, potential_gradient_moment, weighted_l2, Field, Grid, Potential};
use crate::operator::{linearized_apply, low_spectrum, SchroedingerOp};
use crate::solver::GroundState;
use crate::special::linear_fit;

/// Relative residual of the Pohozaev identity for
/// (-Lap)^s u + V u = u^{2*-1-eps}:
///
///   (N/s) (1/(2*-eps) - 1/2*) int u^{2*-eps}
///        = int [V + x.grad V/(2s)] u^2.
///
/// The N/s prefactor follows from the identity
/// (N-2s)/2 int f u = int [N F + x.grad_x F] with
/// F = -V t^2/2 + t^{2*-eps}/(2*-eps); dropping it leaves a residual of
/// 1 - s/N for every solution, which the solver oracle rules out.
pub fn pohozaev_residual(gs: &GroundState, v: &Potential, p: &Params) -> Result<f64> {
    if !gs.converged {
        return Err(Error::InvalidParams("pohozaev_residual needs a converged state".into()));
    }
    let p1 = p.two_star - gs.eps;
    let coef = (p.n() / p.s) * (1.0 / p1 - 1.0 / p.two_star);
    let lhs = coef * gs.u.integrate(|x| x.max(0.0).powf(p1));
    let rhs = weighted_l2(&gs.u, v) + potential_gradient_moment(&gs.u, v)? / (2.0 * p.s);
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()))
}

/// sup over the grid of v_eps(x)/U(x) after blow-up rescaling.
pub fn comparison_ratio(sp: &Spectral, gs: &GroundState, p: &Params) -> Result<f64> {
    let (v, _, _) = rescale_to_blowup(sp, &gs.u, gs.eps, p)?;
    let u = bubble_field(&BubbleSpec::new([0.0; 3], 1.0, *p)?, sp.grid);
    let mut sup: f64 = 0.0;
    for (&vv, &uu) in v.values.iter().zip(&u.values) {
        sup = sup.max(vv / uu);
    }
    Ok(sup)
}

/// Least-squares slope of log(radial average of u) against log r on the
/// shell [r_lo, r_hi]; shell binning with bin width h.
pub fn decay_slope(u: &Field, r_lo: f64, r_hi: f64) -> Result<f64> {
    let g = u.grid;
    if !(r_lo > 0.0 && r_hi > r_lo && r_hi < g.half_width) {
        return Err(Error::InvalidParams(format!("bad shell [{r_lo}, {r_hi}]")));
    }
    let h = g.spacing();
    let nbins = ((r_hi - r_lo) / h).ceil() as usize;
    if nbins < 2 {
        return Err(Error::InvalidParams("empty decay shell".into()));
    }
    let mut sums = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    for i in 0..g.len() {
        let r = g.radius2(i).sqrt();
        if r >= r_lo && r < r_hi {
            let b = ((r - r_lo) / h) as usize;
            if b < nbins {
                sums[b] += u.values[i].max(0.0);
                counts[b] += 1;
            }
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in 0..nbins {
        if counts[b] > 0 {
            let mean = sums[b] / counts[b] as f64;
            if mean > 0.0 {
                xs.push((r_lo + (b as f64 + 0.5) * h).ln());
                ys.push(mean.ln());
            }
        }
    }
    let (_, slope) = linear_fit(&xs, &ys)?;
    Ok(slope)
}

/// Fraction of int u^{2*} carried by the boundary shell {|x|_inf > 0.8 L}.
pub fn tail_mass(u: &Field, p: &Params) -> f64 {
    let g = u.grid;
    let cut = 0.8 * g.half_width;
    let mut tail = 0.0;
    let mut total = 0.0;
    for i in 0..g.len() {
        let w = u.values[i].max(0.0).powf(p.two_star);
        total += w;
        if g.radius_inf(i) > cut {
            tail += w;
        }
    }
    tail / total.max(1e-300)
}

/// max_{B_r(x_max)} u / (int_{B_R(x_max)} u^{2*})^{1/2*}; both sides of the
/// local Moser bound. Radii are in the coordinates of `u` itself; sweeps
/// evaluate this on the rescaled profile so the balls track the bubble.
pub fn moser_ratio(u: &Field, x_max: &[f64; 3], r: f64, big_r: f64, p: &Params) -> Result<f64> {
    let g = u.grid;
    if !(0.0 < r && r < big_r && big_r < g.half_width) {
        return Err(Error::InvalidParams(format!("bad Moser radii ({r}, {big_r})")));
    }
    for a in 0..g.dim as usize {
        if x_max[a].abs() + big_r > g.half_width {
            return Err(Error::InvalidParams("Moser ball exceeds the box".into()));
        }
    }
    let mut peak: f64 = 0.0;
    let mut mass = 0.0;
    for i in 0..g.len() {
        let x = g.position(i);
        let mut d2 = 0.0;
        for a in 0..g.dim as usize {
            let d = x[a] - x_max[a];
            d2 += d * d;
        }
        if d2 <= r * r {
            peak = peak.max(u.values[i]);
        }
        if d2 <= big_r * big_r {
            mass += u.values[i].max(0.0).powf(p.two_star);
        }
    }
    Ok(peak / (g.cell() * mass).powf(1.0 / p.two_star))
}

/// Outcome of the nondegeneracy verification.
#[derive(Debug, Clone)]
pub struct KernelReport {
    /// eigenvalues sorted by magnitude
    pub eigenvalues: Vec<f64>,
    /// self-calibrated near-zero threshold (10x analytic-mode residual)
    pub delta: f64,
    pub near_zero_count: usize,
    /// magnitude gap to the first eigenvalue beyond the near-zero set
    pub gap: f64,
    /// worst L2 residual of the analytic kernel modes under L
    pub mode_residual: f64,
    /// subspace similarity (cosine of the largest principal angle) between
    /// the near-zero eigenvectors and the analytic kernel modes
    pub similarity: f64,
}

/// Build the linearized operator at the unit bubble and verify that its
/// near-kernel is exactly the N+1 analytic modes.
pub fn kernel_spectrum_check(p: &Params, grid: Grid, seed: u64) -> Result<KernelReport> {
    let sp = Spectral::new(grid);
    let spec = BubbleSpec::new([0.0; 3], 1.0, *p)?;
    let bubble = bubble_field(&spec, grid);
    let modes = kernel_modes(&spec, grid);
    let n_kernel = modes.len();

    // analytic-mode residuals under the discrete L
    let mut mode_residual: f64 = 0.0;
    for m in &modes {
        let lm = linearized_apply(&sp, m, &bubble, p)?;
        mode_residual = mode_residual.max(lp_norm(&lm, 2.0)?);
    }
    let delta = 10.0 * mode_residual;

    let w: Vec<f64> = bubble
        .values
        .iter()
        .map(|&u| -(p.two_star - 1.0) * u.powf(p.two_star - 2.0))
        .collect();
    let op = SchroedingerOp::new(&sp, p.s, w);
    let k = (p.dim as usize + 3).min(12);
    let pairs = low_spectrum(&op, k, seed)?;

    let eigenvalues: Vec<f64> = pairs.iter().map(|e| e.value).collect();
    let near: Vec<usize> =
        (0..pairs.len()).filter(|&i| pairs[i].value.abs() < delta).collect();
    let gap = pairs
        .iter()
        .map(|e| e.value.abs())
        .filter(|&a| a >= delta)
        .fold(f64::INFINITY, f64::min);

    // orthonormalize the analytic modes, then principal angles against the
    // near-zero eigenvectors
    let cell = grid.cell();
    let dotv = |a: &[f64], b: &[f64]| cell * a.iter().zip(b).map(|(&x, &y)| x * y).sum::<f64>();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for m in &modes {
        let mut v = m.values.clone();
        for o in &ortho {
            let pr = dotv(&v, o);
            for (vv, &ov) in v.iter_mut().zip(o) {
                *vv -= pr * ov;
            }
        }
        let n = dotv(&v, &v).sqrt();
        if n > 1e-12 {
            for vv in &mut v {
                *vv /= n;
            }
            ortho.push(v);
        }
    }
    let similarity = if near.len() == n_kernel && !near.is_empty() {
        // C_{ij} = <e_i, m_j>; similarity = sqrt(lambda_min(C^T C))
        let d = n_kernel;
        let mut c = vec![0.0; d * d];
        for (i, &ei) in near.iter().enumerate() {
            for (j, m) in ortho.iter().enumerate() {
                c[i * d + j] = dotv(&pairs[ei].vector.values, m);
            }
        }
        let mut ctc = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for r in 0..d {
                    acc += c[r * d + i] * c[r * d + j];
                }
                ctc[i * d + j] = acc;
            }
        }
        let (vals, _) = crate::operator::jacobi_eigen_public(ctc, d);
        vals.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0).sqrt()
    } else {
        0.0
    };

    Ok(KernelReport {
        eigenvalues,
        delta,
        near_zero_count: near.len(),
        gap,
        mode_residual,
        similarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_ground_state, Init, SolverOptions};

    #[test]
    fn tail_mass_constant_field_is_shell_volume() {
        // uniform density: fraction = 1 - 0.8^N
        for n in 1..=3u32 {
            let g = Grid::new(n, 1.0, 32).unwrap();
            let u = Field::constant(g, 1.0);
            let p = Params::new(n, 0.2).unwrap();
            let frac = tail_mass(&u, &p);
            let want = 1.0 - 0.8f64.powi(n as i32);
            assert!((frac - want).abs() < 0.08, "N={n}: {frac} vs {want}");
        }
    }

    #[test]
    fn tail_mass_small_for_tight_bubble() {
        let p = Params::new(1, 0.2).unwrap();
        let g = Grid::new(1, 40.0, 2048).unwrap();
        let u = bubble_field(&BubbleSpec::new([0.0; 3], 0.05, p).unwrap(), g);
        assert!(tail_mass(&u, &p) < 1e-4);
    }

    #[test]
    fn decay_slope_of_bubble_far_field() {
        // U ~ r^{2s-N}: slope -(N-2s) = -0.6 within 10%
        let p = Params::new(1, 0.2).unwrap();
        let g = Grid::new(1, 40.0, 4096).unwrap();
        let u = bubble_field(&BubbleSpec::new([0.0; 3], 0.02, p).unwrap(), g);
        let s = decay_slope(&u, 1.0, 15.0).unwrap();
        assert!((s + 0.6).abs() < 0.06, "slope {s}");
        assert!(decay_slope(&u, 5.0, 4.0).is_err());
    }

    #[test]
    fn moser_ratio_scale_invariant_in_amplitude() {
        let p = Params::new(1, 0.2).unwrap();
        let g = Grid::new(1, 40.0, 2048).unwrap();
        let u = bubble_field(&BubbleSpec::new([0.0; 3], 1.0, p).unwrap(), g);
        let r0 = moser_ratio(&u, &[0.0; 3], 1.0, 2.0, &p).unwrap();
        let mut u2 = u.clone();
        u2.scale(7.3);
        let r1 = moser_ratio(&u2, &[0.0; 3], 1.0, 2.0, &p).unwrap();
        assert!((r0 - r1).abs() < 1e-12 * r0, "1-homogeneous in u");
        assert!(moser_ratio(&u, &[0.0; 3], 1.0, 50.0, &p).is_err(), "ball exceeds box");
    }

    #[test]
    fn pohozaev_rejects_unconverged_and_vanishing_gradients() {
        let p = Params::new(1, 0.2).unwrap();
        let v = Potential::constant(1.0).unwrap();
        let g = Grid::new(1, 3.0, 1024).unwrap();
        let opts = SolverOptions {
            init: Init::Bubble { center: [0.0; 3], mu: 0.05 },
            max_iters: 3,
            ..Default::default()
        };
        let gs = solve_ground_state(&p, &v, g, 0.35, &opts).unwrap();
        assert!(!gs.converged);
        assert!(pohozaev_residual(&gs, &v, &p).is_err());
    }

    #[test]
    fn pohozaev_constant_potential_reduces_to_l2() {
        // with V = 1 the right side is exactly int u^2 and both sides positive
        let p = Params::new(1, 0.2).unwrap();
        let v = Potential::constant(1.0).unwrap();
        let g = Grid::new(1, 6.0, 4096).unwrap();
        let opts = SolverOptions {
            init: Init::Bubble { center: [0.0; 3], mu: 0.02 },
            tol_residual: 1e-8,
            ..Default::default()
        };
        let gs = solve_ground_state(&p, &v, g, 0.3, &opts).unwrap();
        assert!(gs.converged);
        let p1 = p.two_star - gs.eps;
        let lhs = (p.n() / p.s) * (1.0 / p1 - 1.0 / p.two_star)
            * gs.u.integrate(|x| x.max(0.0).powf(p1));
        let rhs = weighted_l2(&gs.u, &v);
        assert!(lhs > 0.0 && rhs > 0.0);
        let rel = pohozaev_residual(&gs, &v, &p).unwrap();
        assert!((rel - (lhs - rhs).abs() / lhs.max(rhs)).abs() < 1e-14);
    }
}
