//! Chern-Simons gauge fields from a scalar source.
//!
//! The vector components solve first-order constraints and are recovered by
//! convolution against explicit kernels,
//!
//!   A1 = K1 * (u^2/2),  A2 = K2 * (u^2/2),
//!   K1(x) = x2 / (2 pi |x|^2),  K2(x) = -x1 / (2 pi |x|^2),
//!
//! and the temporal component by
//!
//!   A0 = G1 * (A2 u^2) - G2 * (A1 u^2),
//!   G1(x) = x1 / (2 pi |x|^2) = -K2(x),  G2(x) = x2 / (2 pi |x|^2) = K1(x).
//!
//! Convolutions are linear (not circular): sources are zero-padded onto a
//! doubled grid so the long 1/|x| kernel tails never wrap around. Kernels are
//! sampled at cell-center displacements with the origin cell set to zero; the
//! kernels are odd, so the principal value over the symmetric center cell
//! vanishes. Sampled oddness also makes the discrete transpose of K exactly
//! -K, which is what pins the energy identity
//!   integral A0 u^2 = 2 integral (A1^2 + A2^2) u^2
//! down to rounding for this scheme.

use crate::error::Result;
use crate::fields::Field2D;
use crate::radial::RadialField;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauge bundle on the source grid with constraint diagnostics.
#[derive(Debug, Clone)]
pub struct GaugeFields {
    pub a0: Field2D,
    pub a1: Field2D,
    pub a2: Field2D,
    /// Relative L2 defect of d1 A2 - d2 A1 + u^2/2.
    pub curl_residual: f64,
    /// L2 of d1 A1 + d2 A2, relative to |A1|_2 + |A2|_2.
    pub div_residual: f64,
}

/// Radial closed forms for a radially symmetric source.
#[derive(Debug, Clone)]
pub struct RadialGauge {
    /// h(r) = int_0^r (s/2) u^2(s) ds
    pub h: RadialField,
    /// int_r^infinity (h(s)/s) u^2(s) ds
    pub a0_radial: RadialField,
    /// h(r)^2 / r^2 = A1^2 + A2^2 at radius r
    pub cs_density: RadialField,
}

// ---------------------------------------------------------------------------
// convolution plans
// ---------------------------------------------------------------------------

struct ConvPlan {
    n: usize,
    m: usize, // padded side = 2n
    cell: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    k1_hat: Vec<Complex<f64>>,
    k2_hat: Vec<Complex<f64>>,
}

fn plan_cache() -> &'static Mutex<HashMap<(usize, u64), Arc<ConvPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<ConvPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan_for(n: usize, h: f64) -> Arc<ConvPlan> {
    let key = (n, h.to_bits());
    if let Some(p) = plan_cache().lock().expect("plan cache poisoned").get(&key) {
        return Arc::clone(p);
    }
    let plan = Arc::new(build_plan(n, h));
    plan_cache()
        .lock()
        .expect("plan cache poisoned")
        .insert(key, Arc::clone(&plan));
    plan
}

fn build_plan(n: usize, h: f64) -> ConvPlan {
    let m = 2 * n;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);

    // displacement index for padded slot k: k for k < n, k - m for k >= n
    let disp = |k: usize| -> i64 {
        if k < n {
            k as i64
        } else {
            k as i64 - m as i64
        }
    };
    let mut k1 = vec![Complex::new(0.0, 0.0); m * m];
    let mut k2 = vec![Complex::new(0.0, 0.0); m * m];
    for i in 0..m {
        let di = disp(i);
        for j in 0..m {
            let dj = disp(j);
            // the -n slot has no +n partner; leave it zero to keep the
            // sampled kernel exactly odd (it never reaches unpadded outputs)
            if di == -(n as i64) || dj == -(n as i64) || (di == 0 && dj == 0) {
                continue;
            }
            let x = di as f64 * h;
            let y = dj as f64 * h;
            let r2 = x * x + y * y;
            k1[i * m + j] = Complex::new(y / (2.0 * std::f64::consts::PI * r2), 0.0);
            k2[i * m + j] = Complex::new(-x / (2.0 * std::f64::consts::PI * r2), 0.0);
        }
    }
    fft2(&mut k1, m, fft.as_ref());
    fft2(&mut k2, m, fft.as_ref());
    ConvPlan {
        n,
        m,
        cell: h * h,
        fft,
        ifft,
        k1_hat: k1,
        k2_hat: k2,
    }
}

fn fft2(data: &mut [Complex<f64>], m: usize, fft: &dyn Fft<f64>) {
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(data, m);
    for row in data.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(data, m);
}

fn transpose_square(data: &mut [Complex<f64>], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

impl ConvPlan {
    /// FFT of the zero-padded source.
    fn forward(&self, src: &[f64]) -> Vec<Complex<f64>> {
        let (n, m) = (self.n, self.m);
        let mut buf = vec![Complex::new(0.0, 0.0); m * m];
        for i in 0..n {
            for j in 0..n {
                buf[i * m + j] = Complex::new(src[i * n + j], 0.0);
            }
        }
        fft2(&mut buf, m, self.fft.as_ref());
        buf
    }

    /// Inverse transform of `hat` restricted to the unpadded grid, scaled so
    /// the result is the quadrature sum  h^2 * sum_j K(x_i - x_j) f(x_j).
    fn inverse(&self, mut hat: Vec<Complex<f64>>) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        fft2(&mut hat, m, self.ifft.as_ref());
        let norm = self.cell / (m * m) as f64;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = hat[i * m + j].re * norm;
            }
        }
        out
    }

    fn apply(&self, src_hat: &[Complex<f64>], kernel_hat: &[Complex<f64>]) -> Vec<f64> {
        let prod: Vec<Complex<f64>> = src_hat
            .iter()
            .zip(kernel_hat.iter())
            .map(|(s, k)| s * k)
            .collect();
        self.inverse(prod)
    }
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Vector components (A1, A2) of the gauge field generated by `u`.
pub fn gauge_a12(u: &Field2D) -> (Field2D, Field2D) {
    let grid = u.grid();
    let plan = plan_for(grid.n(), grid.spacing());
    let src: Vec<f64> = u.values().iter().map(|&v| 0.5 * v * v).collect();
    let hat = plan.forward(&src);
    let a1 = plan.apply(&hat, &plan.k1_hat);
    let a2 = plan.apply(&hat, &plan.k2_hat);
    (
        Field2D::from_values(grid, a1).expect("convolution output finite"),
        Field2D::from_values(grid, a2).expect("convolution output finite"),
    )
}

/// Temporal component A0 from the pair produced by [`gauge_a12`] on the same `u`.
pub fn gauge_a0(u: &Field2D, a1: &Field2D, a2: &Field2D) -> Result<Field2D> {
    u.same_grid(a1)?;
    u.same_grid(a2)?;
    let grid = u.grid();
    let n = grid.n();
    let plan = plan_for(n, grid.spacing());
    let uv = u.values();
    let w1: Vec<f64> = a1
        .values()
        .iter()
        .zip(uv)
        .map(|(a, v)| a * v * v)
        .collect();
    let w2: Vec<f64> = a2
        .values()
        .iter()
        .zip(uv)
        .map(|(a, v)| a * v * v)
        .collect();
    // A0 = -K2 * w2 - K1 * w1; combine in Fourier space, one inverse transform
    let w1_hat = plan.forward(&w1);
    let w2_hat = plan.forward(&w2);
    let combined: Vec<Complex<f64>> = (0..plan.m * plan.m)
        .map(|k| -(plan.k2_hat[k] * w2_hat[k]) - plan.k1_hat[k] * w1_hat[k])
        .collect();
    let a0 = plan.inverse(combined);
    Field2D::from_values(grid, a0)
}

/// integral (A1^2 + A2^2) u^2, the gauge part of the energy. Scales as s^6
/// under u -> s u.
pub fn cs_energy(u: &Field2D) -> f64 {
    let (a1, a2) = gauge_a12(u);
    cs_energy_with(u, &a1, &a2)
}

/// Same integral when the pair (A1, A2) is already available.
pub fn cs_energy_with(u: &Field2D, a1: &Field2D, a2: &Field2D) -> f64 {
    let cell = u.grid().cell_area();
    u.values()
        .iter()
        .zip(a1.values().iter().zip(a2.values()))
        .map(|(v, (x, y))| (x * x + y * y) * v * v)
        .sum::<f64>()
        * cell
}

/// Relative defect of the identity  integral A0 u^2 = 2 integral (A1^2+A2^2) u^2.
///
/// Returns 0 for the zero field by convention. Both sides scale as s^6, so
/// the residual is amplitude-invariant.
pub fn gauge_identity_check(u: &Field2D) -> f64 {
    if u.is_zero() {
        return 0.0;
    }
    let (a1, a2) = gauge_a12(u);
    let a0 = gauge_a0(u, &a1, &a2).expect("same grid by construction");
    let cs = cs_energy_with(u, &a1, &a2);
    let cell = u.grid().cell_area();
    let a0u2: f64 = u
        .values()
        .iter()
        .zip(a0.values())
        .map(|(v, a)| a * v * v)
        .sum::<f64>()
        * cell;
    (a0u2 - 2.0 * cs).abs() / cs.max(1e-300)
}

/// Full bundle: A0, A1, A2 plus constraint residuals.
pub fn gauge_fields(u: &Field2D) -> GaugeFields {
    let (a1, a2) = gauge_a12(u);
    let a0 = gauge_a0(u, &a1, &a2).expect("same grid by construction");
    let (curl_residual, div_residual) = residuals_of(u, &a1, &a2);
    GaugeFields {
        a0,
        a1,
        a2,
        curl_residual,
        div_residual,
    }
}

/// Constraint residuals of a precomputed bundle against its source.
///
/// Measures (d1 A2 - d2 A1 + u^2/2, d1 A1 + d2 A2) in L2 over the interior
/// (two rings dropped), using fourth-order centered differences so the
/// diagnostic reports the fields' accuracy rather than the differencing's own
/// truncation. Returns (0, 0) for the zero field.
pub fn constraint_residuals(u: &Field2D, g: &GaugeFields) -> (f64, f64) {
    residuals_of(u, &g.a1, &g.a2)
}

fn residuals_of(u: &Field2D, a1: &Field2D, a2: &Field2D) -> (f64, f64) {
    if u.is_zero() {
        return (0.0, 0.0);
    }
    let n = u.grid().n();
    let h = u.grid().spacing();
    let cell = u.grid().cell_area();
    // fourth-order first derivative with zero extension
    let val = |f: &Field2D, i: i64, j: i64| -> f64 {
        if i < 0 || j < 0 || i >= n as i64 || j >= n as i64 {
            0.0
        } else {
            f.at(i as usize, j as usize)
        }
    };
    let d4x = |f: &Field2D, i: i64, j: i64| {
        (-val(f, i + 2, j) + 8.0 * val(f, i + 1, j) - 8.0 * val(f, i - 1, j) + val(f, i - 2, j))
            / (12.0 * h)
    };
    let d4y = |f: &Field2D, i: i64, j: i64| {
        (-val(f, i, j + 2) + 8.0 * val(f, i, j + 1) - 8.0 * val(f, i, j - 1) + val(f, i, j - 2))
            / (12.0 * h)
    };
    let mut curl_sq = 0.0;
    let mut div_sq = 0.0;
    let mut src_sq = 0.0;
    let mut a1_sq = 0.0;
    let mut a2_sq = 0.0;
    for i in 2..n as i64 - 2 {
        for j in 2..n as i64 - 2 {
            let (iu, ju) = (i as usize, j as usize);
            let src = 0.5 * u.at(iu, ju) * u.at(iu, ju);
            let curl = d4x(a2, i, j) - d4y(a1, i, j) + src;
            let div = d4x(a1, i, j) + d4y(a2, i, j);
            curl_sq += curl * curl;
            div_sq += div * div;
            src_sq += src * src;
            a1_sq += a1.at(iu, ju) * a1.at(iu, ju);
            a2_sq += a2.at(iu, ju) * a2.at(iu, ju);
        }
    }
    let curl_res = (curl_sq * cell).sqrt() / (src_sq * cell).sqrt().max(1e-300);
    let div_res = (div_sq * cell).sqrt() / ((a1_sq * cell).sqrt() + (a2_sq * cell).sqrt()).max(1e-300);
    (curl_res, div_res)
}

/// Radial reduction for a radially symmetric profile: h, the A0 tail
/// integral, and the gauge energy density h^2/r^2.
pub fn radial_gauge(u: &RadialField) -> RadialGauge {
    let grid = u.grid();
    let h_vals = u.cumulative(|r, s| 0.5 * r * s * s);
    // integrand of the A0 tail: (h(s)/s) u^2(s)
    let m = grid.m();
    let dr = grid.spacing();
    let g: Vec<f64> = (0..m)
        .map(|i| h_vals[i] / grid.node(i + 1) * u.at(i) * u.at(i))
        .collect();
    let mut a0 = vec![0.0; m];
    let mut acc = 0.0;
    for i in (0..m - 1).rev() {
        acc += 0.5 * dr * (g[i] + g[i + 1]);
        a0[i] = acc;
    }
    let cs: Vec<f64> = (0..m)
        .map(|i| {
            let r = grid.node(i + 1);
            h_vals[i] * h_vals[i] / (r * r)
        })
        .collect();
    RadialGauge {
        h: RadialField::from_values(grid, h_vals).expect("length preserved"),
        a0_radial: RadialField::from_values(grid, a0).expect("length preserved"),
        cs_density: RadialField::from_values(grid, cs).expect("length preserved"),
    }
}
