//! Log-profile concentration probes for the Trudinger-Moser functional.
//!
//! The profile family (indexed by n >= 2) is
//!
//!   wbar_n(r) = (2 pi)^{-1/2} *  { sqrt(log n)              for r <= 1/n,
//!                                  log(1/r) / sqrt(log n)   for 1/n < r <= 1,
//!                                  0                        for r > 1 },
//!
//! with |grad wbar_n|_2^2 = 1 exactly and |wbar_n|_1 given in closed form.
//! These concentrate at the origin and witness the growth/boundedness split
//! of the Phi_{alpha, j0} integral around alpha = 4 pi.

use crate::error::{Error, Result};
use crate::nonlinearity::{young_phi, YoungParams};
use crate::radial::{RadialField, RadialGrid};
use serde::Serialize;
use std::f64::consts::PI;

/// Measured and exact quantities of one profile.
#[derive(Debug, Clone)]
pub struct MoserProbe {
    pub n: u32,
    /// Quadrature of |grad wbar_n|_2^2 (exact value is 1).
    pub grad_sq: f64,
    /// Quadrature |wbar_n|_1.
    pub l1_norm: f64,
    /// Closed form for |wbar_n|_1.
    pub l1_exact: f64,
    /// delta_n = |wbar_n|_p^p.
    pub lp_norm_p: f64,
    /// Peak of the normalized profile: sqrt(log n / 2 pi) / (1 + delta^{1/p}).
    pub peak: f64,
    /// (alpha, integral Phi_{alpha, j0}(w_n)) for the normalized profile
    /// w_n = wbar_n / (1 + delta_n^{1/p}).
    pub phi_integrals: Vec<(f64, f64)>,
    /// The normalized profile w_n on the probe grid.
    pub field: RadialField,
}

/// The raw profile wbar_n as a function of radius.
pub fn moser_profile(n: u32) -> impl Fn(f64) -> f64 {
    let log_n = (n as f64).ln();
    let sq = log_n.sqrt();
    let c = 1.0 / (2.0 * PI).sqrt();
    move |r: f64| {
        if r <= 1.0 / n as f64 {
            c * sq
        } else if r <= 1.0 {
            c * (1.0 / r).ln() / sq
        } else {
            0.0
        }
    }
}

/// Closed form for |wbar_n|_1.
pub fn moser_l1_exact(n: u32) -> f64 {
    let nf = n as f64;
    let log_n = nf.ln();
    (log_n / (2.0 * PI)).sqrt() * PI / (nf * nf)
        + (2.0 * PI / log_n).sqrt() * (0.25 - log_n / (2.0 * nf * nf) - 0.25 / (nf * nf))
}

/// Quadrature of |grad wbar_n|_2^2: the integrand is 1/(log n * r) on
/// (1/n, 1] and zero elsewhere, integrated by trapezoid over the grid nodes
/// inside the smooth piece with the two kink radii added as exact endpoints.
/// One-sided handling of the kinks keeps the jump from polluting the rule.
fn grad_sq_quadrature(n: u32, grid: &RadialGrid) -> f64 {
    let log_n = (n as f64).ln();
    let lo = 1.0 / n as f64;
    let hi = 1.0;
    let mut pts = vec![lo];
    let mut i = (lo / grid.spacing()).floor() as usize + 1;
    while i <= grid.m() && grid.node(i) < hi {
        if grid.node(i) > lo {
            pts.push(grid.node(i));
        }
        i += 1;
    }
    pts.push(hi);
    let g = |r: f64| 1.0 / (log_n * r);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += 0.5 * (w[1] - w[0]) * (g(w[0]) + g(w[1]));
    }
    acc
}

/// Build the profile on `grid`, measure its norms, normalize, and evaluate
/// the Phi integrals at the requested alpha values.
///
/// The grid must resolve the plateau: spacing < 1/(4n), and reach r_max >= 1.
pub fn moser_sequence(
    n: u32,
    p: f64,
    grid: &RadialGrid,
    alphas: &[f64],
) -> Result<MoserProbe> {
    crate::fields::check_p(p)?;
    if n < 2 {
        return Err(Error::InvalidParameter {
            what: "moser index",
            why: format!("need n >= 2, got {n}"),
        });
    }
    let required = 1.0 / (4.0 * n as f64);
    if grid.spacing() >= required {
        return Err(Error::Resolution {
            spacing: grid.spacing(),
            required,
        });
    }
    if grid.r_max() < 1.0 {
        return Err(Error::InvalidParameter {
            what: "radial grid",
            why: format!("profile support reaches r = 1, grid stops at {}", grid.r_max()),
        });
    }
    let wbar = RadialField::from_fn(*grid, moser_profile(n));
    let grad_sq = grad_sq_quadrature(n, grid);
    let l1_norm = wbar.integrate_disk(|_, s| s.abs());
    let delta = wbar.integrate_disk(|_, s| s.abs().powf(p));
    let scale = 1.0 / (1.0 + delta.powf(1.0 / p));
    let field = RadialField::from_fn(*grid, {
        let prof = moser_profile(n);
        move |r| prof(r) * scale
    });
    let mut phi_integrals = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let yp = YoungParams::new(alpha, p)?;
        let mut err = None;
        let val = field.integrate_disk(|_, s| match young_phi(&yp, s) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        phi_integrals.push((alpha, val));
    }
    Ok(MoserProbe {
        n,
        grad_sq,
        l1_norm,
        l1_exact: moser_l1_exact(n),
        lp_norm_p: delta,
        peak: ((n as f64).ln() / (2.0 * PI)).sqrt() * scale,
        phi_integrals,
        field,
    })
}

/// One cell of the probe table; saturation is reported in place.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum TmEntry {
    Value(f64),
    Saturated,
}

impl TmEntry {
    pub fn value(&self) -> Option<f64> {
        match self {
            TmEntry::Value(v) => Some(*v),
            TmEntry::Saturated => None,
        }
    }
}

/// Phi integrals of unit-norm profiles across alpha and n, with growth
/// diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct TmTable {
    pub p: f64,
    pub j0: u32,
    pub alphas: Vec<f64>,
    pub ns: Vec<u32>,
    /// values[a][k] = integral Phi_{alphas[a], j0}(w-hat_{ns[k]})
    pub values: Vec<Vec<TmEntry>>,
    /// ratios[a][k] = values[a][k+1] / values[a][k] where both are present.
    pub doubling_ratios: Vec<Vec<Option<f64>>>,
}

/// Evaluate the Phi integral across `alphas` and `n_range` on profiles
/// normalized to exact unit work-space norm:
///
///   w-hat_n = wbar_n / sqrt(1 + delta_n^{2/p}),
///
/// using the exact unit Dirichlet integral of the profile and the measured
/// delta_n. Each n gets its own grid with spacing 1/(32 n).
///
/// A grid this size can only exhibit trends: growth of the integral for
/// alpha above 4 pi and boundedness below are visible as per-doubling ratios,
/// not as the supremum itself.
pub fn tm_probe(p: f64, alphas: &[f64], n_range: &[u32]) -> Result<TmTable> {
    crate::fields::check_p(p)?;
    if alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidParameter {
            what: "alpha list",
            why: "alpha values must be positive".into(),
        });
    }
    if n_range.iter().any(|&n| n < 2) {
        return Err(Error::InvalidParameter {
            what: "n list",
            why: "profile indices must be >= 2".into(),
        });
    }
    let j0 = YoungParams::new(alphas.first().copied().unwrap_or(PI), p)?.j0;
    let mut values: Vec<Vec<TmEntry>> = vec![Vec::with_capacity(n_range.len()); alphas.len()];
    for &n in n_range {
        let grid = RadialGrid::new(1.0, 32 * n as usize)?;
        let wbar = RadialField::from_fn(grid, moser_profile(n));
        let delta = wbar.integrate_disk(|_, s| s.abs().powf(p));
        let scale = 1.0 / (1.0 + delta.powf(2.0 / p)).sqrt();
        for (a_idx, &alpha) in alphas.iter().enumerate() {
            let yp = YoungParams::new(alpha, p)?;
            let mut saturated = false;
            let val = wbar.integrate_disk(|_, s| match young_phi(&yp, s * scale) {
                Ok(v) => v,
                Err(_) => {
                    saturated = true;
                    0.0
                }
            });
            values[a_idx].push(if saturated {
                TmEntry::Saturated
            } else {
                TmEntry::Value(val)
            });
        }
    }
    let doubling_ratios = values
        .iter()
        .map(|row| {
            row.windows(2)
                .map(|w| match (w[0].value(), w[1].value()) {
                    (Some(a), Some(b)) if a != 0.0 => Some(b / a),
                    _ => None,
                })
                .collect()
        })
        .collect();
    Ok(TmTable {
        p,
        j0,
        alphas: alphas.to_vec(),
        ns: n_range.to_vec(),
        values,
        doubling_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe_grid(n: u32) -> RadialGrid {
        RadialGrid::new(1.0, 32 * n as usize).unwrap()
    }

    #[test]
    fn profile_peak_value() {
        for n in [2u32, 8, 32] {
            let w = moser_profile(n);
            let want = ((n as f64).ln() / (2.0 * PI)).sqrt();
            assert_eq!(w(0.0), want);
            assert_eq!(w(1.0 / n as f64), want, "plateau closes at 1/n");
            assert_eq!(w(1.5), 0.0);
        }
    }

    #[test]
    fn gradient_quadrature_near_unity() {
        for n in [2u32, 4, 8, 16, 32] {
            let probe = moser_sequence(n, 1.5, &probe_grid(n), &[]).unwrap();
            assert!(
                (probe.grad_sq - 1.0).abs() < 1e-3,
                "n = {n}: grad quadrature {}",
                probe.grad_sq
            );
        }
    }

    #[test]
    fn l1_matches_closed_form() {
        for n in [2u32, 4, 8, 16, 32] {
            let probe = moser_sequence(n, 1.5, &probe_grid(n), &[]).unwrap();
            let rel = (probe.l1_norm - probe.l1_exact).abs() / probe.l1_exact;
            assert!(rel < 1e-3, "n = {n}: l1 {} vs exact {}", probe.l1_norm, probe.l1_exact);
        }
    }

    #[test]
    fn l1_exact_value_n2() {
        // sqrt(log2/(2pi)) pi/4 + sqrt(2pi/log2)(1/4 - log2/8 - 1/16)
        let v = moser_l1_exact(2);
        assert!((v - 0.5645189).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn normalized_peak_formula() {
        let probe = moser_sequence(8, 1.5, &probe_grid(8), &[]).unwrap();
        let want = ((8f64).ln() / (2.0 * PI)).sqrt()
            / (1.0 + probe.lp_norm_p.powf(1.0 / 1.5));
        assert!((probe.peak - want).abs() < 1e-14);
        let got_peak = probe.field.at(0);
        assert!((got_peak - want).abs() < 1e-14, "field peak {got_peak} vs {want}");
    }

    #[test]
    fn coarse_grid_rejected() {
        let grid = RadialGrid::new(1.0, 16).unwrap(); // spacing 1/16 >= 1/(4*8)
        assert!(matches!(
            moser_sequence(8, 1.5, &grid, &[]),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn short_grid_rejected() {
        let grid = RadialGrid::new(0.5, 4096).unwrap();
        assert!(moser_sequence(4, 1.5, &grid, &[]).is_err());
    }

    #[test]
    fn tm_probe_shape_and_j0() {
        let table = tm_probe(1.5, &[3.6 * PI, 4.4 * PI], &[4, 8, 16]).unwrap();
        assert_eq!(table.j0, 3);
        assert_eq!(table.values.len(), 2);
        assert_eq!(table.values[0].len(), 3);
        assert_eq!(table.doubling_ratios[0].len(), 2);
        for row in &table.values {
            for e in row {
                assert!(e.value().unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn tm_probe_rejects_degenerate_alpha() {
        assert!(tm_probe(1.5, &[0.0], &[4, 8]).is_err());
    }
}
