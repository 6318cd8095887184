//! Energy functional, Frechet gradient, and Nehari residual.
//!
//! J(u) = 1/2 |grad u|_2^2 + 1/2 integral (A1^2+A2^2) u^2
//!        + (1/p) integral a(x) |u|^p - integral F(u),
//!
//! with the gauge pair (A1, A2) generated by u itself. The gradient applies
//! the full chain rule through the gauge fields, which is exactly where the
//! A0 term comes from:
//!
//! J'(u)[v] = integral [ grad u . grad v + (A1^2 + A2^2 + A0) u v
//!                       + a |u|^{p-2} u v - f(u) v ].

use crate::error::{Error, Result};
use crate::fields::{gradient_sq_norm, Field2D};
use crate::gauge::{cs_energy_with, gauge_a0, gauge_a12};
use crate::nonlinearity::NonlinearitySpec;

/// Regularization shift for the non-Lipschitz |u|^{p-2} u term; keeps
/// gradients finite near u = 0 while perturbing energies far below
/// quadrature error.
pub const P_TERM_REGULARIZATION: f64 = 1e-12;

/// External potential a(x) = a_inf - b e^{-|x|^2 / sigma^2}.
#[derive(Debug, Clone, Copy)]
pub struct PotentialSpec {
    pub a_inf: f64,
    pub well_depth: f64,
    pub well_width: f64,
    /// Force a == a_inf regardless of the well (the limit problem).
    pub constant_mode: bool,
}

impl PotentialSpec {
    pub fn constant(a_inf: f64) -> Result<Self> {
        let pot = PotentialSpec {
            a_inf,
            well_depth: 0.0,
            well_width: 1.0,
            constant_mode: true,
        };
        pot.validate()?;
        Ok(pot)
    }

    pub fn well(a_inf: f64, depth: f64, width: f64) -> Result<Self> {
        let pot = PotentialSpec {
            a_inf,
            well_depth: depth,
            well_width: width,
            constant_mode: false,
        };
        pot.validate()?;
        Ok(pot)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &'static str, why: String| Err(Error::InvalidParameter { what, why });
        if !(self.a_inf > 0.0 && self.a_inf.is_finite()) {
            return bad("a_inf", format!("must be positive, got {}", self.a_inf));
        }
        if !(self.well_depth >= 0.0 && self.well_depth < self.a_inf) {
            return bad(
                "well_depth",
                format!(
                    "must lie in [0, a_inf) so inf a stays positive, got {}",
                    self.well_depth
                ),
            );
        }
        if !(self.well_width > 0.0 && self.well_width.is_finite()) {
            return bad("well_width", format!("must be positive, got {}", self.well_width));
        }
        Ok(())
    }

    /// The limit problem with a == a_inf.
    pub fn limit(&self) -> PotentialSpec {
        PotentialSpec {
            constant_mode: true,
            ..*self
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_mode || self.well_depth == 0.0
    }

    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        if self.is_constant() {
            self.a_inf
        } else {
            let s = self.well_width;
            self.a_inf - self.well_depth * (-(x * x + y * y) / (s * s)).exp()
        }
    }
}

/// Energy split into its four parts; total = dirichlet + cs + potential_p - nonlinear.
#[derive(Debug, Clone, Copy)]
pub struct EnergyBreakdown {
    /// 1/2 |grad u|_2^2
    pub dirichlet: f64,
    /// 1/2 integral (A1^2 + A2^2) u^2
    pub cs: f64,
    /// (1/p) integral a |u|^p
    pub potential_p: f64,
    /// integral F(u)
    pub nonlinear: f64,
    pub total: f64,
}

/// Scale-homogeneous ingredients of the fiber map, with the gauge pair that
/// produced them. Under u -> t u: grad_sq ~ t^2, cs ~ t^6, pot_p ~ t^p.
pub(crate) struct FieldParts {
    pub grad_sq: f64,
    pub cs: f64,
    pub pot_p: f64,
    pub a1: Field2D,
    pub a2: Field2D,
}

pub(crate) fn potential_integral(u: &Field2D, pot: &PotentialSpec, p: f64) -> f64 {
    let grid = u.grid();
    let n = grid.n();
    let cell = grid.cell_area();
    if pot.is_constant() {
        return pot.a_inf * crate::fields::lp_norm_p_unchecked(u, p);
    }
    let mut acc = 0.0;
    for i in 0..n {
        let x = grid.coord(i);
        for j in 0..n {
            acc += pot.value(x, grid.coord(j)) * u.at(i, j).abs().powf(p);
        }
    }
    acc * cell
}

pub(crate) fn field_parts(u: &Field2D, pot: &PotentialSpec, p: f64) -> FieldParts {
    let (a1, a2) = gauge_a12(u);
    FieldParts {
        grad_sq: gradient_sq_norm(u),
        cs: cs_energy_with(u, &a1, &a2),
        pot_p: potential_integral(u, pot, p),
        a1,
        a2,
    }
}

fn check_saturation_on_field(u: &Field2D, spec: &NonlinearitySpec) -> Result<()> {
    let t_max = u.values().iter().fold(0.0f64, |m, &v| m.max(v));
    let threshold = spec.saturation_threshold();
    if t_max > threshold {
        return Err(Error::Saturation { t: t_max, threshold });
    }
    Ok(())
}

pub(crate) fn nonlinear_integral(u: &Field2D, spec: &NonlinearitySpec) -> f64 {
    if spec.lambda == 0.0 {
        return 0.0;
    }
    u.integrate(|v| spec.cap_f_unchecked(v))
}

pub(crate) fn nonlinear_pairing(u: &Field2D, spec: &NonlinearitySpec) -> f64 {
    if spec.lambda == 0.0 {
        return 0.0;
    }
    u.integrate(|v| spec.f_unchecked(v) * v)
}

/// Energy decomposition of J at `u`.
pub fn energy(
    u: &Field2D,
    pot: &PotentialSpec,
    spec: &NonlinearitySpec,
    p: f64,
) -> Result<EnergyBreakdown> {
    crate::fields::check_p(p)?;
    pot.validate()?;
    check_saturation_on_field(u, spec)?;
    let parts = field_parts(u, pot, p);
    Ok(breakdown_from(&parts, u, spec, p))
}

pub(crate) fn breakdown_from(
    parts: &FieldParts,
    u: &Field2D,
    spec: &NonlinearitySpec,
    p: f64,
) -> EnergyBreakdown {
    let dirichlet = 0.5 * parts.grad_sq;
    let cs = 0.5 * parts.cs;
    let potential_p = parts.pot_p / p;
    let nonlinear = nonlinear_integral(u, spec);
    EnergyBreakdown {
        dirichlet,
        cs,
        potential_p,
        nonlinear,
        total: dirichlet + cs + potential_p - nonlinear,
    }
}

/// Exact adjoint of the staggered Dirichlet quadrature: the compact 5-point
/// Laplacian with zero Dirichlet ghosts, so that
/// sum (-lap u) v h^2 = d/de |grad(u + e v)|_2^2 / 2 holds to rounding.
pub(crate) fn neg_laplacian(u: &Field2D) -> Vec<f64> {
    let n = u.grid().n();
    let h2 = u.grid().cell_area();
    let v = u.values();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let c = v[i * n + j];
            let mut acc = 4.0 * c;
            if i > 0 {
                acc -= v[(i - 1) * n + j];
            }
            if i + 1 < n {
                acc -= v[(i + 1) * n + j];
            }
            if j > 0 {
                acc -= v[i * n + j - 1];
            }
            if j + 1 < n {
                acc -= v[i * n + j + 1];
            }
            out[i * n + j] = acc / h2;
        }
    }
    out
}

/// Frechet gradient of J at `u` as a field:
/// g = -lap u + (A1^2 + A2^2 + A0) u + a |u|^{p-2} u - f(u),
/// with the |u|^{p-2} u factor regularized by [`P_TERM_REGULARIZATION`].
pub fn gradient(
    u: &Field2D,
    pot: &PotentialSpec,
    spec: &NonlinearitySpec,
    p: f64,
) -> Result<Field2D> {
    crate::fields::check_p(p)?;
    check_saturation_on_field(u, spec)?;
    let (a1, a2) = gauge_a12(u);
    let a0 = gauge_a0(u, &a1, &a2)?;
    Ok(gradient_with_gauge(u, &a1, &a2, &a0, pot, spec, p))
}

pub(crate) fn gradient_with_gauge(
    u: &Field2D,
    a1: &Field2D,
    a2: &Field2D,
    a0: &Field2D,
    pot: &PotentialSpec,
    spec: &NonlinearitySpec,
    p: f64,
) -> Field2D {
    let grid = u.grid();
    let n = grid.n();
    let mut g = neg_laplacian(u);
    let (uv, a1v, a2v, a0v) = (u.values(), a1.values(), a2.values(), a0.values());
    for i in 0..n {
        let x = grid.coord(i);
        for j in 0..n {
            let k = i * n + j;
            let v = uv[k];
            let gauge = (a1v[k] * a1v[k] + a2v[k] * a2v[k] + a0v[k]) * v;
            // sign(0) = 0 here: the regularized |u|^{p-2} u term must vanish
            // exactly where u does
            let sign = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            let pterm = pot.value(x, grid.coord(j))
                * sign
                * (v.abs() + P_TERM_REGULARIZATION).powf(p - 1.0);
            let fterm = if spec.lambda == 0.0 {
                0.0
            } else {
                spec.f_unchecked(v)
            };
            g[k] += gauge + pterm - fterm;
        }
    }
    Field2D::from_values(grid, g).expect("gradient values finite")
}

/// J'(u)[u] = |grad u|_2^2 + 3 integral (A1^2+A2^2) u^2
///            + integral a |u|^p - integral f(u) u;
/// its zero set is the Nehari manifold.
pub fn nehari_residual(
    u: &Field2D,
    pot: &PotentialSpec,
    spec: &NonlinearitySpec,
    p: f64,
) -> Result<f64> {
    crate::fields::check_p(p)?;
    check_saturation_on_field(u, spec)?;
    let parts = field_parts(u, pot, p);
    Ok(nehari_residual_from(&parts, u, spec))
}

pub(crate) fn nehari_residual_from(
    parts: &FieldParts,
    u: &Field2D,
    spec: &NonlinearitySpec,
) -> f64 {
    parts.grad_sq + 3.0 * parts.cs + parts.pot_p - nonlinear_pairing(u, spec)
}
