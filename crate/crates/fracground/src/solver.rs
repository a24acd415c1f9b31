//! Constrained minimization of ||u||_{s,V}^2 on the manifold
//! ||u||_{2*-eps} = 1 by preconditioned projected gradient flow, and the
//! rescaling of the minimizer to a ground state of the equation.

use crate::bubble::{bubble_field, refined_argmax, BubbleSpec};
use crate::constants::Params;
use crate::error::{Error, Result};
use crate::fft::{Spectral, C64};
use crate::field::{Field, Grid, Potential};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

/// How the flow is seeded.
#[derive(Debug, Clone)]
pub enum Init {
    /// analytic bubble at the given center and concentration scale
    Bubble { center: [f64; 3], mu: f64 },
    /// iid uniform positive noise
    Random { seed: u64 },
    /// caller-provided field (warm starts)
    Provided(Field),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub step: f64,
    /// preconditioner shift c in ((-Lap)^s + c)^{-1}; None uses V0
    pub precond_shift: Option<f64>,
    pub tol_residual: f64,
    pub tol_energy: f64,
    pub max_iters: usize,
    pub init: Init,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            step: 0.8,
            precond_shift: None,
            tol_residual: 1e-9,
            tol_energy: 1e-13,
            max_iters: 50_000,
            init: Init::Random { seed: 1 },
        }
    }
}

/// Converged minimizer and its ground-state rescaling.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// ground state of the equation, u = s_v^{1/(2*-2-eps)} w
    pub u: Field,
    /// unit-constraint minimizer
    pub w: Field,
    pub eps: f64,
    /// constrained infimum estimate = Lagrange multiplier
    pub s_v: f64,
    pub x_max: [f64; 3],
    /// concentration scale ||u||_inf^{-(2*-2-eps)/(2s)}
    pub mu: f64,
    pub u_max: f64,
    pub iters: usize,
    /// relative Euler-Lagrange residual at the last iterate
    pub residual: f64,
    pub converged: bool,
    /// fraction of spectral energy in the top-third wavenumber shell
    pub hf_energy_fraction: f64,
}

struct Workspace<'a> {
    sp: &'a Spectral,
    sym: Vec<f64>,
    res: Vec<f64>,
    vpot: Vec<f64>,
    cell: f64,
    p_norm: f64,
    p_pow: f64,
}

impl<'a> Workspace<'a> {
    fn new(sp: &'a Spectral, p: &Params, vpot: Vec<f64>, eps: f64, shift: f64) -> Self {
        let s = p.s;
        Workspace {
            sp,
            sym: sp.symbol_table(move |xi2| xi2.powf(s)),
            res: sp.symbol_table(move |xi2| 1.0 / (shift + xi2.powf(s))),
            vpot,
            cell: sp.grid.cell(),
            p_norm: p.two_star - eps,
            p_pow: p.two_star - 1.0 - eps,
        }
    }

    fn normalize(&self, w: &mut [f64]) -> f64 {
        let pn = self.p_norm;
        let nm: f64 = w.par_iter().map(|&v| v.abs().powf(pn)).sum::<f64>() * self.cell;
        let nm = nm.powf(1.0 / pn);
        if nm > 0.0 {
            let inv = 1.0 / nm;
            w.par_iter_mut().for_each(|v| *v *= inv);
        }
        nm
    }

    /// energy I = <(-Lap)^s w, w> + int V w^2 together with the lap field
    fn energy(&self, w: &[f64], spec_buf: &mut Vec<C64>, lap: &mut Vec<f64>) -> f64 {
        spec_buf.clear();
        spec_buf.extend(w.iter().map(|&v| C64::new(v, 0.0)));
        self.sp.forward_inplace(spec_buf);
        spec_buf
            .par_iter_mut()
            .zip(self.sym.par_iter())
            .for_each(|(c, &s)| *c *= s);
        self.sp.inverse_inplace(spec_buf);
        let norm = 1.0 / self.sp.grid.len() as f64;
        lap.clear();
        lap.extend(spec_buf.iter().map(|c| c.re * norm));
        let quad: f64 = lap
            .par_iter()
            .zip(w.par_iter())
            .zip(self.vpot.par_iter())
            .map(|((&l, &wv), &vv)| (l + vv * wv) * wv)
            .sum();
        quad * self.cell
    }
}

/// Rayleigh quotient (seminorm + int V u^2) / ||u||_{2*-eps}^2.
pub fn rayleigh_quotient(
    sp: &Spectral,
    u: &Field,
    v: &Potential,
    eps: f64,
    p: &Params,
) -> Result<f64> {
    if u.values.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidParams("rayleigh_quotient of the zero field".into()));
    }
    let semi = crate::operator::seminorm_s(sp, u, p.s);
    let pot = crate::field::weighted_l2(u, v);
    let nrm = crate::field::lp_norm(u, p.two_star - eps)?;
    Ok((semi + pot) / (nrm * nrm))
}

/// Scan a handful of bubble scales and return the one with the lowest
/// quotient; used to seed the flow near the right concentration.
pub fn best_bubble_init(
    sp: &Spectral,
    p: &Params,
    v: &Potential,
    eps: f64,
    center: [f64; 3],
    mu0: f64,
) -> Field {
    let grid = sp.grid;
    let mut best: Option<(f64, Field)> = None;
    for f in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let mu = mu0 * f;
        if mu < grid.spacing() {
            continue;
        }
        let spec = match BubbleSpec::new(center, mu, *p) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let u = bubble_field(&spec, grid);
        if let Ok(q) = rayleigh_quotient(sp, &u, v, eps, p) {
            if best.as_ref().map_or(true, |(bq, _)| q < *bq) {
                best = Some((q, u));
            }
        }
    }
    best.map(|(_, u)| u).unwrap_or_else(|| {
        bubble_field(&BubbleSpec::new(center, mu0.max(4.0 * grid.spacing()), *p).unwrap(), grid)
    })
}

/// Preconditioned projected gradient flow for the constrained minimizer,
/// rescaled to a ground state of the equation on return.
pub fn solve_ground_state(
    p: &Params,
    v: &Potential,
    grid: Grid,
    eps: f64,
    opts: &SolverOptions,
) -> Result<GroundState> {
    let sp = Spectral::new(grid);
    solve_with_spectral(&sp, p, v, eps, opts)
}

/// Same as `solve_ground_state` with a caller-owned transform plan
/// (sweeps reuse plans across eps).
pub fn solve_with_spectral(
    sp: &Spectral,
    p: &Params,
    v: &Potential,
    eps: f64,
    opts: &SolverOptions,
) -> Result<GroundState> {
    if !(eps > 0.0 && eps < p.two_star - 2.0) {
        return Err(Error::InvalidParams(format!(
            "eps = {eps} outside (0, 2*-2 = {})",
            p.two_star - 2.0
        )));
    }
    let grid = sp.grid;
    let vpot: Vec<f64> = (0..grid.len()).map(|i| v.eval(&grid.position(i))).collect();
    let shift = opts.precond_shift.unwrap_or(v.v0);
    if shift <= 0.0 {
        return Err(Error::InvalidParams("preconditioner shift must be positive".into()));
    }
    let ws = Workspace::new(sp, p, vpot, eps, shift);

    let mut w: Vec<f64> = match &opts.init {
        Init::Bubble { center, mu } => {
            bubble_field(&BubbleSpec::new(*center, *mu, *p)?, grid).values
        }
        Init::Random { seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect()
        }
        Init::Provided(f) => {
            if f.grid != grid {
                return Err(Error::GridMismatch);
            }
            f.values.clone()
        }
    };
    w.par_iter_mut().for_each(|x| *x = x.max(0.0));
    if ws.normalize(&mut w) == 0.0 {
        return Err(Error::InvalidParams("initial field vanishes after projection".into()));
    }

    let mut spec_buf: Vec<C64> = Vec::with_capacity(grid.len());
    let mut lap: Vec<f64> = Vec::with_capacity(grid.len());
    let mut energy = ws.energy(&w, &mut spec_buf, &mut lap);
    let mut tau = opts.step;
    let mut iters = 0;
    let mut rel_res = f64::INFINITY;
    let mut d_energy = f64::INFINITY;
    let mut converged = false;

    let mut r_buf = vec![0.0f64; grid.len()];
    let mut pre = vec![0.0f64; grid.len()];
    let mut cand = vec![0.0f64; grid.len()];
    let mut cand_spec: Vec<C64> = Vec::with_capacity(grid.len());
    let mut cand_lap: Vec<f64> = Vec::with_capacity(grid.len());
    // previous accepted point and direction for the Barzilai-Borwein step
    let mut w_prev: Vec<f64> = Vec::new();
    let mut pre_prev: Vec<f64> = Vec::new();

    for it in 0..opts.max_iters {
        iters = it + 1;
        if !energy.is_finite() {
            return Err(Error::NonFinite { iter: it });
        }
        // Euler-Lagrange residual with the constraint-stationary multiplier
        let theta = energy; // ||w||_{2*-eps} = 1 after renormalization
        let pw = ws.p_pow;
        r_buf
            .par_iter_mut()
            .zip(lap.par_iter())
            .zip(w.par_iter())
            .zip(ws.vpot.par_iter())
            .for_each(|(((r, &l), &wv), &vv)| {
                *r = l + vv * wv - theta * wv.max(0.0).powf(pw);
            });
        let rn2: f64 = r_buf.par_iter().map(|&x| x * x).sum::<f64>() * ws.cell;
        let fn2: f64 =
            w.par_iter().map(|&x| x.max(0.0).powf(pw).powi(2)).sum::<f64>() * ws.cell;
        rel_res = rn2.sqrt() / (theta.abs() * fn2.sqrt() + 1e-300);
        if rel_res < opts.tol_residual && d_energy < opts.tol_energy * energy.abs() && it > 1 {
            converged = true;
            break;
        }
        // preconditioned direction
        spec_buf.clear();
        spec_buf.extend(r_buf.iter().map(|&x| C64::new(x, 0.0)));
        sp.forward_inplace(&mut spec_buf);
        spec_buf
            .par_iter_mut()
            .zip(ws.res.par_iter())
            .for_each(|(c, &m)| *c *= m);
        sp.inverse_inplace(&mut spec_buf);
        let norm = 1.0 / grid.len() as f64;
        pre.par_iter_mut()
            .zip(spec_buf.par_iter())
            .for_each(|(p_, c)| *p_ = c.re * norm);

        // Barzilai-Borwein trial step from the last accepted move; the
        // monotone backtracking below safeguards it
        if !w_prev.is_empty() {
            let mut sy = 0.0;
            let mut ss = 0.0;
            for i in 0..grid.len() {
                let sv = w[i] - w_prev[i];
                let yv = pre[i] - pre_prev[i];
                sy += sv * yv;
                ss += sv * sv;
            }
            if sy > 0.0 {
                let bb = ss / sy;
                tau = bb.clamp(0.05 * opts.step, 200.0 * opts.step);
            }
        }
        w_prev.clear();
        w_prev.extend_from_slice(&w);
        pre_prev.clear();
        pre_prev.extend_from_slice(&pre);

        // backtracking line search on the quotient
        let mut accepted = false;
        for _ in 0..60 {
            cand.par_iter_mut()
                .zip(w.par_iter())
                .zip(pre.par_iter())
                .for_each(|((c, &wv), &pv)| *c = (wv - tau * pv).max(0.0));
            if ws.normalize(&mut cand) == 0.0 {
                tau *= 0.5;
                continue;
            }
            let e_new = ws.energy(&cand, &mut cand_spec, &mut cand_lap);
            if e_new.is_finite() && e_new <= energy * (1.0 + 1e-15) {
                d_energy = energy - e_new;
                energy = e_new;
                std::mem::swap(&mut w, &mut cand);
                std::mem::swap(&mut lap, &mut cand_lap);
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            // flow is stuck at line-search resolution; stop here
            break;
        }
        tau = (tau * 1.05).min(200.0 * opts.step);
    }

    // spectral aliasing monitor: energy fraction in the top-third shell
    spec_buf.clear();
    spec_buf.extend(w.iter().map(|&x| C64::new(x, 0.0)));
    sp.forward_inplace(&mut spec_buf);
    let m = grid.points_per_dim;
    let cutoff2 = {
        let xi_max = std::f64::consts::PI * (m as f64 / 2.0) / grid.half_width;
        (2.0 * xi_max / 3.0) * (2.0 * xi_max / 3.0)
    };
    let mut hf = 0.0;
    let mut tot = 0.0;
    for (idx, c) in spec_buf.iter().enumerate() {
        let iv = grid.unravel(idx);
        let xi2 = sp.xi2_at(iv[0], iv[1], iv[2]);
        let e = c.norm_sqr();
        tot += e;
        if xi2 >= cutoff2 {
            hf += e;
        }
    }
    let hf_energy_fraction = hf / tot.max(1e-300);

    let w_field = Field { grid, values: w };
    let t = energy.powf(1.0 / (p.two_star - 2.0 - eps));
    let mut u = w_field.clone();
    u.scale(t);
    let (x_max, u_max) = refined_argmax(&u);
    let mu = u_max.powf(-(p.two_star - 2.0 - eps) / (2.0 * p.s));

    Ok(GroundState {
        u,
        w: w_field,
        eps,
        s_v: energy,
        x_max,
        mu,
        u_max,
        iters,
        residual: rel_res,
        converged,
        hf_energy_fraction,
    })
}

/// Outcome of a multi-start batch: converged states sorted by s_v plus the
/// errors of failed starts.
pub struct MultiStart {
    pub states: Vec<GroundState>,
    pub failures: Vec<Error>,
}

/// Run the solver from n_starts distinct seeds: bubble at the minimum of V,
/// bubble off-center, and random positive fields.
pub fn multi_start(
    p: &Params,
    v: &Potential,
    grid: Grid,
    eps: f64,
    n_starts: usize,
    seed: u64,
    base: &SolverOptions,
) -> Result<MultiStart> {
    if n_starts < 2 {
        return Err(Error::InvalidParams("multi_start needs n_starts >= 2".into()));
    }
    let sp = Spectral::new(grid);
    let center = v.argmin().unwrap_or([0.0; 3]);
    let mu0 = match &base.init {
        Init::Bubble { mu, .. } => *mu,
        _ => 64.0 * grid.spacing(),
    };
    let mut inits: Vec<Init> = vec![
        Init::Provided(best_bubble_init(&sp, p, v, eps, center, mu0)),
        Init::Bubble { center: [center[0] + 0.2 * grid.half_width, center[1], center[2]], mu: mu0 },
    ];
    for k in 0..n_starts.saturating_sub(2) {
        inits.push(Init::Random { seed: seed.wrapping_add(k as u64) });
    }
    inits.truncate(n_starts);

    let results: Vec<Result<GroundState>> = inits
        .into_par_iter()
        .map(|init| {
            let mut opts = base.clone();
            opts.init = init;
            solve_ground_state(p, v, grid, eps, &opts)
        })
        .collect();

    let mut states = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(g) => states.push(g),
            Err(e) => failures.push(e),
        }
    }
    states.sort_by(|a, b| a.s_v.partial_cmp(&b.s_v).unwrap());
    Ok(MultiStart { states, failures })
}
