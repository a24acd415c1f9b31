//! Spectral workhorse: N-dimensional FFT on the periodic grid, Fourier
//! multipliers g(|xi|^2), exact band-limited translation, and chirp-z zoom
//! (band-limited resampling at a scaled coordinate set).
//!
//! Wavenumbers along each axis are pi*k/L for k = -M/2 .. M/2-1 in the
//! usual FFT storage order.

use crate::field::{Field, Grid};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub type C64 = Complex<f64>;

pub struct Spectral {
    pub grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// per-axis xi^2 table in FFT index order
    xi2: Vec<f64>,
    /// per-axis signed wavenumber xi in FFT index order
    xi: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let m = grid.points_per_dim;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let l = grid.half_width;
        let xi: Vec<f64> = (0..m)
            .map(|i| {
                let k = if i < m / 2 { i as i64 } else { i as i64 - m as i64 };
                std::f64::consts::PI * k as f64 / l
            })
            .collect();
        let xi2 = xi.iter().map(|v| v * v).collect();
        Spectral { grid, fwd, inv, xi2, xi }
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// |xi|^2 at per-axis FFT indices (unused axes pass 0).
    pub fn xi2_at(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut acc = self.xi2[i];
        if self.grid.dim >= 2 {
            acc += self.xi2[j];
        }
        if self.grid.dim == 3 {
            acc += self.xi2[k];
        }
        acc
    }

    fn fft_axis(&self, data: &mut [C64], axis: usize, forward: bool) {
        let m = self.grid.points_per_dim;
        let dim = self.grid.dim as usize;
        let plan = if forward { &self.fwd } else { &self.inv };
        let last = dim - 1;
        if axis == last {
            // contiguous lanes
            data.par_chunks_mut(m).for_each(|lane| {
                let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(lane, &mut scratch);
            });
        } else if dim == 2 || (dim == 3 && axis == 1) {
            // strided lanes confined to contiguous planes of size m*m
            data.par_chunks_mut(m * m).for_each(|plane| {
                let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
                let mut lane = vec![C64::default(); m];
                for k in 0..m {
                    for i in 0..m {
                        lane[i] = plane[i * m + k];
                    }
                    plan.process_with_scratch(&mut lane, &mut scratch);
                    for i in 0..m {
                        plane[i * m + k] = lane[i];
                    }
                }
            });
        } else {
            // dim == 3, axis == 0: stride m*m
            let mm = m * m;
            let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
            let mut lane = vec![C64::default(); m];
            for jk in 0..mm {
                for i in 0..m {
                    lane[i] = data[i * mm + jk];
                }
                plan.process_with_scratch(&mut lane, &mut scratch);
                for i in 0..m {
                    data[i * mm + jk] = lane[i];
                }
            }
        }
    }

    pub fn forward(&self, u: &Field) -> Vec<C64> {
        let mut data: Vec<C64> = u.values.iter().map(|&v| C64::new(v, 0.0)).collect();
        for a in 0..self.grid.dim as usize {
            self.fft_axis(&mut data, a, true);
        }
        data
    }

    /// In-place forward transform of a prefilled complex buffer.
    pub fn forward_inplace(&self, data: &mut [C64]) {
        for a in 0..self.grid.dim as usize {
            self.fft_axis(data, a, true);
        }
    }

    /// In-place inverse transform; no normalization is applied (callers
    /// divide by M^N when reading values out).
    pub fn inverse_inplace(&self, data: &mut [C64]) {
        for a in 0..self.grid.dim as usize {
            self.fft_axis(data, a, false);
        }
    }

    /// Flat table of g(|xi|^2) over the full spectral index set.
    pub fn symbol_table<G: Fn(f64) -> f64 + Sync>(&self, g: G) -> Vec<f64> {
        let m = self.grid.points_per_dim;
        match self.grid.dim {
            1 => self.xi2.iter().map(|&x| g(x)).collect(),
            2 => {
                let mut t = vec![0.0; m * m];
                t.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = g(self.xi2[i] + self.xi2[j]);
                    }
                });
                t
            }
            _ => {
                let mut t = vec![0.0; m * m * m];
                t.par_chunks_mut(m * m).enumerate().for_each(|(i, plane)| {
                    for j in 0..m {
                        let xij = self.xi2[i] + self.xi2[j];
                        for k in 0..m {
                            plane[j * m + k] = g(xij + self.xi2[k]);
                        }
                    }
                });
                t
            }
        }
    }

    /// Inverse transform including the 1/M^N normalization; imaginary parts
    /// are dropped (inputs are spectra of real fields).
    pub fn inverse(&self, mut spec: Vec<C64>) -> Field {
        for a in 0..self.grid.dim as usize {
            self.fft_axis(&mut spec, a, false);
        }
        let norm = 1.0 / self.grid.len() as f64;
        Field {
            grid: self.grid,
            values: spec.iter().map(|c| c.re * norm).collect(),
        }
    }

    /// Multiply a spectrum in place by g(|xi|^2).
    pub fn multiply_symbol<G: Fn(f64) -> f64 + Sync>(&self, spec: &mut [C64], g: G) {
        let m = self.grid.points_per_dim;
        match self.grid.dim {
            1 => {
                for (i, c) in spec.iter_mut().enumerate() {
                    *c *= g(self.xi2[i]);
                }
            }
            2 => {
                spec.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
                    let xi2_i = self.xi2[i];
                    for (j, c) in row.iter_mut().enumerate() {
                        *c *= g(xi2_i + self.xi2[j]);
                    }
                });
            }
            _ => {
                spec.par_chunks_mut(m * m).enumerate().for_each(|(i, plane)| {
                    let xi2_i = self.xi2[i];
                    for j in 0..m {
                        let xi2_ij = xi2_i + self.xi2[j];
                        for k in 0..m {
                            plane[j * m + k] *= g(xi2_ij + self.xi2[k]);
                        }
                    }
                });
            }
        }
    }

    /// Field -> g(|xi|^2) applied in Fourier space -> field.
    pub fn apply_symbol<G: Fn(f64) -> f64 + Sync>(&self, u: &Field, g: G) -> Field {
        let mut spec = self.forward(u);
        self.multiply_symbol(&mut spec, g);
        self.inverse(spec)
    }

    /// Exact band-limited translation u(. + shift).
    pub fn translate(&self, u: &Field, shift: &[f64; 3]) -> Field {
        let mut spec = self.forward(u);
        let dim = self.grid.dim as usize;
        for (idx, c) in spec.iter_mut().enumerate() {
            let iv = self.grid.unravel(idx);
            let mut phase = 0.0;
            for a in 0..dim {
                phase += self.xi[iv[a]] * shift[a];
            }
            *c *= C64::from_polar(1.0, phase);
        }
        self.inverse(spec)
    }

    /// Band-limited zoom: returns v with v_j = u(center + factor * x_j),
    /// evaluated exactly on the trigonometric interpolant of u.
    pub fn zoom(&self, u: &Field, center: &[f64; 3], factor: f64) -> Field {
        let mut spec = self.forward(u);
        // recenter first
        let m = self.grid.points_per_dim;
        let dim = self.grid.dim as usize;
        for (idx, c) in spec.iter_mut().enumerate() {
            let iv = self.grid.unravel(idx);
            let mut phase = 0.0;
            for a in 0..dim {
                phase += self.xi[iv[a]] * center[a];
            }
            *c *= C64::from_polar(1.0, phase);
        }
        // per-axis chirp-z evaluation at positions factor * x_j
        for a in 0..dim {
            self.czt_axis(&mut spec, a, factor);
        }
        let norm = 1.0 / (m as f64).powi(dim as i32);
        Field {
            grid: self.grid,
            values: spec.iter().map(|c| c.re * norm).collect(),
        }
    }

    /// Replace the spectral content along `axis` by the chirp-z sums
    /// t_j = sum_k c_k exp(i xi_k * factor * x_j); after all axes are
    /// processed the buffer holds M^N * u(factor x) pointwise.
    ///
    /// With k~ = n - M/2 and x_j = -L + j h this is
    ///   t_j = sum_n b_n e^{i alpha k~ j},  alpha = 2 pi factor / M,
    ///   b_n = c_n e^{-i pi k~ factor},
    /// evaluated by Bluestein's identity k~ j = (k~^2 + j^2 - (j-k~)^2)/2.
    fn czt_axis(&self, data: &mut [C64], axis: usize, factor: f64) {
        let m = self.grid.points_per_dim;
        let dim = self.grid.dim as usize;
        let alpha = 2.0 * std::f64::consts::PI * factor / m as f64;
        let p = (3 * m).next_power_of_two();
        let mut planner = FftPlanner::new();
        let pf = planner.plan_fft_forward(p);
        let pi_ = planner.plan_fft_inverse(p);

        // kernel Q[t] = exp(-i alpha d^2/2) at d = t - (M/2 - 1), covering
        // the needed lag range d in [-M/2+1, 3M/2-1]
        let mut qhat = vec![C64::default(); p];
        for (t, q) in qhat.iter_mut().enumerate().take(2 * m - 1) {
            let d = t as f64 - (m as f64 / 2.0 - 1.0);
            *q = C64::from_polar(1.0, -0.5 * alpha * d * d);
        }
        pf.process(&mut qhat);

        // a_n = c_n * e^{i pi k~ (1 - factor)} * e^{i alpha k~^2 / 2}
        // (the e^{i pi k~} part carries the grid origin at -L)
        let pre: Vec<C64> = (0..m)
            .map(|n| {
                let kt = n as f64 - m as f64 / 2.0;
                C64::from_polar(
                    1.0,
                    std::f64::consts::PI * kt * (1.0 - factor) + 0.5 * alpha * kt * kt,
                )
            })
            .collect();
        let post: Vec<C64> = (0..m)
            .map(|j| C64::from_polar(1.0, 0.5 * alpha * (j as f64) * (j as f64)))
            .collect();

        let process_lane = |lane: &mut [C64]| {
            let mut a = vec![C64::default(); p];
            for n in 0..m {
                let src = (n + m / 2) % m; // FFT storage index holding k~ = n - M/2
                a[n] = lane[src] * pre[n];
            }
            let mut scratch_f = vec![C64::default(); pf.get_inplace_scratch_len()];
            pf.process_with_scratch(&mut a, &mut scratch_f);
            for (av, qv) in a.iter_mut().zip(&qhat) {
                *av *= *qv;
            }
            let mut scratch_i = vec![C64::default(); pi_.get_inplace_scratch_len()];
            pi_.process_with_scratch(&mut a, &mut scratch_i);
            let pn = 1.0 / p as f64;
            for j in 0..m {
                // linear-convolution output for lag j - k~ sits at j + M - 1
                lane[j] = a[j + m - 1] * post[j] * pn;
            }
        };

        let last = dim - 1;
        if axis == last {
            data.par_chunks_mut(m).for_each(|lane| process_lane(lane));
        } else if dim == 2 || (dim == 3 && axis == 1) {
            data.par_chunks_mut(m * m).for_each(|plane| {
                let mut lane = vec![C64::default(); m];
                for k in 0..m {
                    for i in 0..m {
                        lane[i] = plane[i * m + k];
                    }
                    process_lane(&mut lane);
                    for i in 0..m {
                        plane[i * m + k] = lane[i];
                    }
                }
            });
        } else {
            let mm = m * m;
            let mut lane = vec![C64::default(); m];
            for jk in 0..mm {
                for i in 0..m {
                    lane[i] = data[i * mm + jk];
                }
                process_lane(&mut lane);
                for i in 0..m {
                    data[i * mm + jk] = lane[i];
                }
            }
        }
    }

    /// Evaluate the trigonometric interpolant at one point (1-D only).
    pub fn eval_at_1d(&self, spec: &[C64], x: f64) -> f64 {
        debug_assert_eq!(self.grid.dim, 1);
        let m = self.grid.points_per_dim;
        let l = self.grid.half_width;
        let mut acc = C64::default();
        for (n, c) in spec.iter().enumerate() {
            acc += c * C64::from_polar(1.0, self.xi[n] * (x + l));
        }
        acc.re / m as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn roundtrip_1d() {
        let g = Grid::new(1, 2.0, 64).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (PI * x[0] / 2.0).sin() + 0.3 * (PI * x[0]).cos());
        let v = sp.inverse(sp.forward(&u));
        for (a, b) in u.values.iter().zip(&v.values) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn roundtrip_3d() {
        let g = Grid::new(3, 1.0, 16).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (PI * x[0]).sin() * (2.0 * PI * x[1]).cos() + x[2].sin());
        let v = sp.inverse(sp.forward(&u));
        for (a, b) in u.values.iter().zip(&v.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn translate_shifts_single_mode() {
        let g = Grid::new(1, 1.0, 32).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (PI * x[0]).sin());
        let v = sp.translate(&u, &[0.25, 0.0, 0.0]);
        let expect = Field::from_fn(g, |x| (PI * (x[0] + 0.25)).sin());
        for (a, b) in expect.values.iter().zip(&v.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zoom_matches_analytic_band_limited() {
        let g = Grid::new(1, 1.0, 64).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (PI * x[0]).sin() + 0.5 * (3.0 * PI * x[0]).cos());
        let f = |x: f64| (PI * x).sin() + 0.5 * (3.0 * PI * x).cos();
        let v = sp.zoom(&u, &[0.0, 0.0, 0.0], 0.37);
        for (j, &vj) in v.values.iter().enumerate() {
            let x = 0.37 * g.coord(j);
            assert!((vj - f(x)).abs() < 1e-10, "j={j}: {vj} vs {}", f(x));
        }
    }

    #[test]
    fn zoom_with_center_offset() {
        let g = Grid::new(1, 1.0, 64).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        let v = sp.zoom(&u, &[0.3, 0.0, 0.0], 0.2);
        for (j, &vj) in v.values.iter().enumerate() {
            let x = 0.3 + 0.2 * g.coord(j);
            let want = (2.0 * PI * x).cos();
            assert!((vj - want).abs() < 1e-10);
        }
    }

    #[test]
    fn zoom_2d_separable() {
        let g = Grid::new(2, 1.0, 32).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (PI * x[0]).sin() * (2.0 * PI * x[1]).cos());
        let v = sp.zoom(&u, &[0.0, 0.0, 0.0], 0.5);
        for idx in 0..g.len() {
            let p = g.position(idx);
            let want = (PI * 0.5 * p[0]).sin() * (2.0 * PI * 0.5 * p[1]).cos();
            assert!((v.values[idx] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn eval_at_matches_grid_points() {
        let g = Grid::new(1, 3.0, 64).unwrap();
        let sp = Spectral::new(g);
        let u = Field::from_fn(g, |x| (PI * x[0] / 3.0).sin() + 0.2 * (2.0 * PI * x[0] / 3.0).cos());
        let spec = sp.forward(&u);
        for &i in &[0usize, 5, 31, 63] {
            let v = sp.eval_at_1d(&spec, g.coord(i));
            assert!((v - u.values[i]).abs() < 1e-12);
        }
    }
}
