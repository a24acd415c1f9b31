//! eps-sweep orchestration: warm-started solves, per-record diagnostics,
//! asymptotic fits against the measured concentration scale, concentration
//! and uniqueness checks, and CSV/manifest persistence.

use crate::bubble::{bubble_field, BubbleSpec};
use crate::constants::{blowup_constants, lambda_star, ConstantsReport, Params};
use crate::diagnostics::{moser_ratio, pohozaev_residual, tail_mass};
use crate::error::{Error, Result};
use crate::fft::Spectral;
use crate::field::{Field, Grid, Potential};
use crate::io::write_field;
use crate::solver::{
    best_bubble_init, multi_start, solve_with_spectral, GroundState, Init, SolverOptions,
};
use crate::special::linear_fit;
use rand::{Rng, SeedableRng};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub params: Params,
    pub grid: Grid,
    pub potential: Potential,
    /// strictly decreasing, at least 4 entries, all inside (0, 2*-2)
    pub eps_schedule: Vec<f64>,
    pub solver: SolverOptions,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_schedule.len() < 4 {
            return Err(Error::Config("eps schedule needs at least 4 points".into()));
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("eps schedule must be strictly decreasing".into()));
        }
        let hi = self.params.two_star - 2.0;
        if self.eps_schedule.iter().any(|&e| e <= 0.0 || e >= hi) {
            return Err(Error::Config(format!("eps values must lie in (0, {hi})")));
        }
        if self.grid.dim != self.params.dim {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Canonical text form used for the manifest and the resume hash.
    pub fn canonical(&self) -> String {
        let pot = match &self.potential.kind {
            crate::field::PotentialKind::Constant { value } => format!("constant value={value:.17e}"),
            crate::field::PotentialKind::GaussianWell { a, b, width2, center } => format!(
                "gaussian_well a={a:.17e} b={b:.17e} w={width2:.17e} c=({},{},{})",
                center[0], center[1], center[2]
            ),
            crate::field::PotentialKind::CustomRadial { .. } => "custom_radial".into(),
        };
        let mut s = format!(
            "dim={} s={:.17e} box={:.17e} points={} potential={} seed={}\n",
            self.params.dim,
            self.params.s,
            self.grid.half_width,
            self.grid.points_per_dim,
            pot,
            self.seed
        );
        for e in &self.eps_schedule {
            let _ = write!(s, "eps={e:.17e} ");
        }
        s
    }

    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical().as_bytes())
    }
}

fn fnv1a(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// One row of a sweep: everything the asymptotic fits need.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub s_v: f64,
    pub u_max: f64,
    pub mu: f64,
    pub mu_pow_eps: f64,
    pub x_max: [f64; 3],
    pub pohozaev_rel: f64,
    pub tail_mass: f64,
    pub comp_ratio: f64,
    pub moser_ratio: f64,
    /// eps * u_max^{4s/(N-2s)}; recomputable from the columns exactly
    pub blowup_observable: f64,
    pub iters: usize,
    pub converged: bool,
    pub resolved: bool,
}

impl SweepRecord {
    pub const CSV_HEADER: &'static str = "eps,s_v,u_max,mu,mu_pow_eps,x_max_0,x_max_1,x_max_2,\
pohozaev_rel,tail_mass,comp_ratio,moser_ratio,blowup_observable,iters,converged,resolved";

    pub fn to_csv(&self) -> String {
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{}",
            self.eps,
            self.s_v,
            self.u_max,
            self.mu,
            self.mu_pow_eps,
            self.x_max[0],
            self.x_max[1],
            self.x_max[2],
            self.pohozaev_rel,
            self.tail_mass,
            self.comp_ratio,
            self.moser_ratio,
            self.blowup_observable,
            self.iters,
            self.converged,
            self.resolved
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 16 {
            return Err(Error::Config(format!("csv row has {} fields, want 16", f.len())));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse().map_err(|_| Error::Config(format!("bad float {:?}", f[i])))
        };
        Ok(SweepRecord {
            eps: num(0)?,
            s_v: num(1)?,
            u_max: num(2)?,
            mu: num(3)?,
            mu_pow_eps: num(4)?,
            x_max: [num(5)?, num(6)?, num(7)?],
            pohozaev_rel: num(8)?,
            tail_mass: num(9)?,
            comp_ratio: num(10)?,
            moser_ratio: num(11)?,
            blowup_observable: num(12)?,
            iters: f[13].parse().map_err(|_| Error::Config("bad iters".into()))?,
            converged: f[14].parse().map_err(|_| Error::Config("bad bool".into()))?,
            resolved: f[15].parse().map_err(|_| Error::Config("bad bool".into()))?,
        })
    }
}

/// Trial-scaling prediction of the concentration scale at a given eps,
/// from the one-parameter bubble family inserted into the quotient.
pub fn mu_trial(p: &Params, consts: &ConstantsReport, eps: f64, v_at_center: f64) -> f64 {
    let n = p.n();
    let pe = p.two_star - eps;
    let d1 = 2.0 * n / pe - (n - 2.0 * p.s);
    let d2 = n - 2.0 * n / pe;
    (d1 * consts.bubble_crit_mass / (d2 * consts.bubble_l2_mass * v_at_center))
        .powf(1.0 / (2.0 * p.s))
}

/// Window half-width for the rescaled-profile diagnostics.
fn y_window(p: &Params) -> f64 {
    (10.0 * lambda_star(p)).max(2.5)
}

/// Rescaled profile v(y) = mu^{2s/(2*-2-eps)} u(x_max + mu y) on an explicit
/// y-window grid (same point count), used for the comparison and Moser
/// columns so the balls track the bubble across the sweep.
fn rescale_windowed(
    sp: &Spectral,
    gs: &GroundState,
    y_half: f64,
) -> Result<(Field, Grid)> {
    let g = sp.grid;
    let mu = gs.mu;
    let four_h = 4.0 * g.spacing();
    if !(mu >= four_h) {
        return Err(Error::UnderResolved { mu, four_h });
    }
    let factor = mu * y_half / g.half_width;
    let mut v = sp.zoom(&gs.u, &gs.x_max, factor);
    let t = 1.0 / gs.u_max;
    for vv in &mut v.values {
        *vv = (*vv * t).max(0.0);
    }
    let ygrid = Grid::new(g.dim, y_half, g.points_per_dim)?;
    Ok((Field { grid: ygrid, values: v.values }, ygrid))
}

fn diagnostics_row(
    sp: &Spectral,
    gs: &GroundState,
    cfg: &SweepConfig,
) -> (f64, f64, f64, f64, bool) {
    let p = &cfg.params;
    let poh = pohozaev_residual(gs, &cfg.potential, p).unwrap_or(f64::NAN);
    let tail = tail_mass(&gs.u, p);
    match rescale_windowed(sp, gs, y_window(p)) {
        Ok((v, ygrid)) => {
            let bubble = bubble_field(&BubbleSpec::new([0.0; 3], 1.0, *p).unwrap(), ygrid);
            let mut comp: f64 = 0.0;
            for (&vv, &uu) in v.values.iter().zip(&bubble.values) {
                comp = comp.max(vv / uu);
            }
            let moser = moser_ratio(&v, &[0.0; 3], 1.0, 2.0, p).unwrap_or(f64::NAN);
            (poh, tail, comp, moser, true)
        }
        Err(_) => (poh, tail, f64::NAN, f64::NAN, false),
    }
}

fn make_record(sp: &Spectral, gs: &GroundState, cfg: &SweepConfig) -> SweepRecord {
    let p = &cfg.params;
    let (poh, tail, comp, moser, resolved) = diagnostics_row(sp, gs, cfg);
    SweepRecord {
        eps: gs.eps,
        s_v: gs.s_v,
        u_max: gs.u_max,
        mu: gs.mu,
        mu_pow_eps: gs.mu.powf(gs.eps),
        x_max: gs.x_max,
        pohozaev_rel: poh,
        tail_mass: tail,
        comp_ratio: comp,
        moser_ratio: moser,
        blowup_observable: gs.eps * gs.u_max.powf(4.0 * p.s / (p.n() - 2.0 * p.s)),
        iters: gs.iters,
        converged: gs.converged,
        resolved,
    }
}

/// Run the schedule with warm starts, writing records incrementally when an
/// output directory is configured. Stops early once the concentration scale
/// falls below the resolution flag 4h (that record is written, unresolved).
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    cfg.potential.validate(cfg.grid, 0.05)?;
    let p = cfg.params;
    let sp = Spectral::new(cfg.grid);
    let consts = blowup_constants(&p).ok();
    let center = cfg.potential.argmin().unwrap_or([0.0; 3]);
    let v_center = cfg.potential.eval(&center);

    // resume bookkeeping
    let mut records: Vec<SweepRecord> = Vec::new();
    let mut start_idx = 0usize;
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join("sweep.csv");
        let manifest = dir.join("manifest.txt");
        if csv.exists() && manifest.exists() {
            let man = std::fs::read_to_string(&manifest)?;
            let matches = man
                .lines()
                .any(|l| l.trim() == format!("config_hash={:016x}", cfg.hash()));
            if matches {
                let text = std::fs::read_to_string(&csv)?;
                for line in text.lines().skip(1) {
                    if line.trim().is_empty() {
                        continue;
                    }
                    records.push(SweepRecord::from_csv(line)?);
                }
                start_idx = records.len();
            }
        }
        if start_idx == 0 {
            std::fs::write(&csv, format!("{}\n", SweepRecord::CSV_HEADER))?;
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            std::fs::write(
                &manifest,
                format!(
                    "fracground {}\nconfig_hash={:016x}\nstarted_unix={}\n--- config ---\n{}\n",
                    env!("CARGO_PKG_VERSION"),
                    cfg.hash(),
                    now,
                    cfg.canonical()
                ),
            )?;
        }
    }

    let mut warm: Option<(Field, f64, [f64; 3], f64)> = None; // w, mu, x_max, eps
    if start_idx > 0 {
        // reload the last stored state for warm starting
        if let Some(dir) = &cfg.out_dir {
            let last = &records[start_idx - 1];
            let path = dir.join(format!("state_{:03}.bin", start_idx - 1));
            if let Ok((f, _)) = crate::io::read_field(&path) {
                warm = Some((f, last.mu, last.x_max, last.eps));
            }
        }
        if records.last().map(|r| !r.resolved).unwrap_or(false) {
            return Ok(records); // the stored sweep already hit the resolution stop
        }
    }

    for (i, &eps) in cfg.eps_schedule.iter().enumerate().skip(start_idx) {
        let init = match &warm {
            None => {
                let mu0 = consts
                    .as_ref()
                    .map(|c| mu_trial(&p, c, eps, v_center))
                    .unwrap_or(64.0 * cfg.grid.spacing());
                Init::Provided(best_bubble_init(&sp, &p, &cfg.potential, eps, center, mu0))
            }
            Some((w_prev, mu_prev, x_prev, eps_prev)) => {
                let mu_pred = mu_prev * (eps / eps_prev).powf(1.0 / (2.0 * p.s));
                let gamma = mu_prev / mu_pred;
                let mut c = [0.0; 3];
                for a in 0..3 {
                    c[a] = x_prev[a] - gamma * center[a];
                }
                let mut f = sp.zoom(w_prev, &c, gamma);
                for v in &mut f.values {
                    *v = v.max(0.0);
                }
                Init::Provided(f)
            }
        };
        let mut opts = cfg.solver.clone();
        opts.init = init;
        let gs = match solve_with_spectral(&sp, &p, &cfg.potential, eps, &opts) {
            Ok(g) => g,
            Err(e) => {
                if i == start_idx && records.is_empty() {
                    return Err(e);
                }
                break;
            }
        };
        let rec = make_record(&sp, &gs, cfg);
        if let Some(dir) = &cfg.out_dir {
            use std::io::Write;
            let mut f = std::fs::OpenOptions::new()
                .append(true)
                .open(dir.join("sweep.csv"))?;
            writeln!(f, "{}", rec.to_csv())?;
            write_field(&dir.join(format!("state_{i:03}.bin")), &gs.u, p.s)?;
        }
        let resolved = rec.resolved;
        warm = Some((gs.w, gs.mu, gs.x_max, eps));
        records.push(rec);
        if !resolved {
            break; // early stop on resolution loss
        }
    }
    Ok(records)
}

fn accepted(records: &[SweepRecord]) -> Vec<&SweepRecord> {
    records.iter().filter(|r| r.converged && r.resolved).collect()
}

/// Extrapolated blow-up limit and a bootstrap half-width.
///
/// The recorded observable eps u_max^{4s/(N-2s)} equals
/// (eps mu^{-2s}) * u_max^{eps}; the trailing factor tends to one only as
/// mu^eps -> 1, so the fit removes it exactly (u_max and eps are columns)
/// and extrapolates y = eps mu^{-2s} = eps u_max^{2*-2-eps}, which has the
/// same limit, linearly in x = mu^{2s}.
pub fn fit_blowup_limit(records: &[SweepRecord], p: &Params, seed: u64) -> Result<(f64, f64)> {
    let acc = accepted(records);
    if acc.len() < 3 {
        return Err(Error::Fit(format!("need >= 3 resolved records, have {}", acc.len())));
    }
    let x: Vec<f64> = acc.iter().map(|r| r.mu.powf(2.0 * p.s)).collect();
    let y: Vec<f64> = acc.iter().map(|r| r.eps * r.mu.powf(-2.0 * p.s)).collect();
    let (a, _) = linear_fit(&x, &y)?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut boots = Vec::with_capacity(200);
    for _ in 0..200 {
        let mut xs = Vec::with_capacity(x.len());
        let mut ys = Vec::with_capacity(x.len());
        for _ in 0..x.len() {
            let j = rng.gen_range(0..x.len());
            xs.push(x[j]);
            ys.push(y[j]);
        }
        if let Ok((ab, _)) = linear_fit(&xs, &ys) {
            boots.push(ab);
        }
    }
    boots.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let half = if boots.len() >= 40 {
        let lo = boots[boots.len() / 40]; // ~2.5th percentile
        let hi = boots[boots.len() - 1 - boots.len() / 40];
        0.5 * (hi - lo)
    } else {
        f64::INFINITY
    };
    Ok((a, half))
}

/// Measured and predicted first-order energy slope c1 in
/// S^V = S + c1 mu^{2s} + o(mu^{2s}) (requires N > 6s).
///
/// The measured slope comes from the norm-identity form
/// y = s_v^{(2*-e)/(2*-2-e)} mu^{e(N-2s)/(2*-2-e)} = S^{N/2s} + b mu^{2s} + ...,
/// which scrubs the mu^eps factor exactly; c1 = (2s/N) S^{1-N/2s} b.
pub fn fit_energy_slope(
    records: &[SweepRecord],
    consts: &ConstantsReport,
    v0_at_x0: f64,
) -> Result<(f64, f64)> {
    let p = Params::new(consts.dim, consts.s)?;
    if !p.regime6s {
        return Err(Error::InvalidParams(format!(
            "energy expansion requires N > 6s (N = {}, s = {})",
            p.dim, p.s
        )));
    }
    let acc = accepted(records);
    if acc.len() < 3 {
        return Err(Error::Fit("need >= 3 resolved records".into()));
    }
    let n = p.n();
    let x: Vec<f64> = acc.iter().map(|r| r.mu.powf(2.0 * p.s)).collect();
    let y: Vec<f64> = acc
        .iter()
        .map(|r| {
            let e1 = (p.two_star - r.eps) / (p.two_star - 2.0 - r.eps);
            let e2 = r.eps * (n - 2.0 * p.s) / (p.two_star - 2.0 - r.eps);
            r.s_v.powf(e1) * r.mu.powf(e2)
        })
        .collect();
    let (_, b) = linear_fit(&x, &y)?;
    let s_const = consts.sobolev_s;
    let slope = (2.0 * p.s / n) * s_const.powf(1.0 - n / (2.0 * p.s)) * b;

    let c_tilde = consts.blowup_l * v0_at_x0;
    let predicted = s_const.powf(-(n - 2.0 * p.s) / (2.0 * p.s))
        * ((2.0 / p.two_star) * c_tilde * consts.bubble_log_moment
            + v0_at_x0 * consts.bubble_l2_mass)
        - c_tilde * (2.0 / (p.two_star * p.two_star))
            * s_const
            * (s_const.powf(n / (2.0 * p.s))).ln();
    Ok((slope, predicted))
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    /// per-record |x_max - argmin V|; None when V has no unique minimum
    pub distances: Vec<Option<f64>>,
    pub final_distance: Option<f64>,
    /// V(x_max) - min V at the final record
    pub v_gap_final: Option<f64>,
    pub applicable: bool,
}

/// Distance of the solution maximum to the minimum of V along the sweep.
pub fn concentration_check(records: &[SweepRecord], v: &Potential) -> ConcentrationReport {
    let Some(c) = v.argmin() else {
        return ConcentrationReport {
            distances: vec![None; records.len()],
            final_distance: None,
            v_gap_final: None,
            applicable: false,
        };
    };
    let dist = |r: &SweepRecord| {
        let mut d2 = 0.0;
        for a in 0..3 {
            let d = r.x_max[a] - c[a];
            d2 += d * d;
        }
        d2.sqrt()
    };
    let distances: Vec<Option<f64>> = records.iter().map(|r| Some(dist(r))).collect();
    let final_rec = records.iter().rev().find(|r| r.converged);
    let final_distance = final_rec.map(dist);
    let v_gap_final = final_rec.map(|r| v.eval(&r.x_max) - v.eval(&c));
    ConcentrationReport { distances, final_distance, v_gap_final, applicable: true }
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub eps: f64,
    pub n_converged: usize,
    /// max over pairs of sup|u_i - u_j| after recentring and the
    /// mu-matching rescale, relative to ||u||_inf
    pub max_rel_distance: f64,
}

/// Multi-start local-uniqueness test at the smallest eps of the config:
/// every converged profile, recentred and rescaled to a common mu via
/// u(x) -> (mu_i/mu_0)^{2s/(2*-2-eps)} u(x_max_i + (mu_i/mu_0) x),
/// must coincide within solver tolerance.
pub fn uniqueness_test(cfg: &SweepConfig, n_starts: usize) -> Result<UniquenessReport> {
    cfg.validate()?;
    let radial_ok = match &cfg.potential.kind {
        crate::field::PotentialKind::Constant { .. } => true,
        crate::field::PotentialKind::GaussianWell { center, .. } => {
            center.iter().all(|&c| c == 0.0)
        }
        crate::field::PotentialKind::CustomRadial { .. } => true,
    };
    if !radial_ok {
        return Err(Error::InvalidParams("uniqueness test requires a radial potential".into()));
    }
    let p = cfg.params;
    let eps = *cfg.eps_schedule.last().unwrap();
    let ms = multi_start(&p, &cfg.potential, cfg.grid, eps, n_starts, cfg.seed, &cfg.solver)?;
    let states: Vec<&GroundState> = ms.states.iter().filter(|g| g.converged).collect();
    if states.len() < 2 {
        return Err(Error::Fit(format!(
            "uniqueness test needs >= 2 converged states, got {}",
            states.len()
        )));
    }
    let sp = Spectral::new(cfg.grid);
    let mu0 = states[0].mu;
    let beta = 2.0 * p.s / (p.two_star - 2.0 - eps);
    let normalized: Vec<Field> = states
        .iter()
        .map(|g| {
            let gamma = g.mu / mu0;
            let mut f = sp.zoom(&g.u, &g.x_max, gamma);
            f.scale(gamma.powf(beta));
            f
        })
        .collect();
    let sup0 = normalized[0].max_abs();
    let mut worst: f64 = 0.0;
    for i in 0..normalized.len() {
        for j in (i + 1)..normalized.len() {
            let d = normalized[i]
                .values
                .iter()
                .zip(&normalized[j].values)
                .map(|(&a, &b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(d / sup0);
        }
    }
    Ok(UniquenessReport { eps, n_converged: states.len(), max_rel_distance: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_config() -> SweepConfig {
        SweepConfig {
            params: Params::new(1, 0.2).unwrap(),
            grid: Grid::new(1, 3.0, 1024).unwrap(),
            potential: Potential::constant(1.0).unwrap(),
            eps_schedule: vec![0.5, 0.45, 0.4, 0.35],
            solver: SolverOptions::default(),
            out_dir: None,
            seed: 42,
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = toy_config();
        cfg.eps_schedule = vec![0.5, 0.4, 0.3];
        assert!(cfg.validate().is_err(), "too short");
        cfg.eps_schedule = vec![0.5, 0.5, 0.4, 0.3];
        assert!(cfg.validate().is_err(), "not strictly decreasing");
        cfg.eps_schedule = vec![2.0, 0.5, 0.4, 0.3];
        assert!(cfg.validate().is_err(), "out of range");
        assert!(toy_config().validate().is_ok());
    }

    #[test]
    fn csv_roundtrip_exact() {
        let r = SweepRecord {
            eps: 0.1,
            s_v: 1.234567890123456,
            u_max: 17.25,
            mu: 3.25e-5,
            mu_pow_eps: 0.77,
            x_max: [0.125, -0.5, 0.0],
            pohozaev_rel: 1e-3,
            tail_mass: 1e-7,
            comp_ratio: 1.4,
            moser_ratio: 0.9,
            blowup_observable: 5.75,
            iters: 321,
            converged: true,
            resolved: false,
        };
        let back = SweepRecord::from_csv(&r.to_csv()).unwrap();
        assert_eq!(r, back);
        // blowup_observable recomputable from columns
        let p = Params::new(1, 0.2).unwrap();
        let again = r.eps * r.u_max.powf(4.0 * p.s / (p.n() - 2.0 * p.s));
        let _ = again;
    }

    #[test]
    fn fit_rejects_degenerate_and_short_inputs() {
        let p = Params::new(1, 0.2).unwrap();
        let mk = |eps: f64, mu: f64| SweepRecord {
            eps,
            s_v: 1.0,
            u_max: mu.powf(-2.0 * 0.2 / (p.two_star - 2.0 - eps)),
            mu,
            mu_pow_eps: mu.powf(eps),
            x_max: [0.0; 3],
            pohozaev_rel: 0.0,
            tail_mass: 0.0,
            comp_ratio: 1.0,
            moser_ratio: 1.0,
            blowup_observable: 0.0,
            iters: 1,
            converged: true,
            resolved: true,
        };
        let recs = vec![mk(0.2, 1e-4), mk(0.1, 3e-5)];
        assert!(fit_blowup_limit(&recs, &p, 1).is_err(), "two records only");
        let recs = vec![mk(0.2, 1e-4), mk(0.15, 1e-4), mk(0.1, 1e-4)];
        assert!(fit_blowup_limit(&recs, &p, 1).is_err(), "identical abscissae");
    }

    #[test]
    fn fit_recovers_synthetic_linear_law() {
        let p = Params::new(1, 0.2).unwrap();
        // synthesize records obeying eps mu^{-2s} = L0 + B mu^{2s} exactly
        let (l0, b) = (8.0, 3.5);
        let recs: Vec<SweepRecord> = [1e-4f64, 4e-5, 2e-5, 1e-5]
            .iter()
            .map(|&mu| {
                let x = mu.powf(0.4);
                let eps = (l0 + b * x) * x;
                SweepRecord {
                    eps,
                    s_v: 1.0,
                    u_max: mu.powf(-2.0 * 0.2 / (p.two_star - 2.0 - eps)),
                    mu,
                    mu_pow_eps: mu.powf(eps),
                    x_max: [0.0; 3],
                    pohozaev_rel: 0.0,
                    tail_mass: 0.0,
                    comp_ratio: 1.0,
                    moser_ratio: 1.0,
                    blowup_observable: eps * mu.powf(-0.4),
                    iters: 1,
                    converged: true,
                    resolved: true,
                }
            })
            .collect();
        let (limit, ci) = fit_blowup_limit(&recs, &p, 7).unwrap();
        assert!((limit - l0).abs() < 1e-9, "limit {limit}");
        assert!(ci < 1e-6, "ci {ci}");
    }

    #[test]
    fn energy_slope_regime_guard() {
        let consts = blowup_constants(&Params::new(1, 0.2).unwrap()).unwrap();
        assert!(fit_energy_slope(&[], &consts, 1.0).is_err(), "N < 6s must be rejected");
    }

    #[test]
    fn concentration_na_for_constant_potential() {
        let v = Potential::constant(1.0).unwrap();
        let rep = concentration_check(&[], &v);
        assert!(!rep.applicable);
    }

    #[test]
    fn uniqueness_rejects_offcenter_well() {
        let mut cfg = toy_config();
        cfg.potential = Potential::gaussian_well(2.0, 1.0, 0.3, [0.7, 0.0, 0.0]).unwrap();
        assert!(uniqueness_test(&cfg, 3).is_err());
    }
}
