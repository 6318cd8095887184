//! Ground-state computation: Nehari projection and projected-gradient
//! descent over the Nehari manifold, plus the two-potential comparison run.
//!
//! Existence theory characterizes the ground state as the minimizer of J
//! over the manifold {u != 0 : J'(u)[u] = 0}, with a unique fiber maximizer
//! t_u on every ray when f(t)/t^5 is increasing. The solver exploits exactly
//! that: descend along -grad J, truncate to the positive part, and rescale
//! back onto the manifold each step. Energies reported are upper bounds for
//! the ground-state level.

use crate::error::{Error, Result};
use crate::fields::{gaussian_seed, lp_norm_p_unchecked, Field2D, Grid2D};
use crate::functional::{
    breakdown_from, field_parts, gradient_with_gauge, nehari_residual_from, EnergyBreakdown,
    FieldParts, PotentialSpec,
};
use crate::gauge::gauge_a0;
use crate::nonlinearity::{check_f2, NonlinearitySpec};

/// Knobs of the descent loop.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    /// Stop when |grad J|_2 / ||u|| falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial step size; adapted by backtracking.
    pub eta0: f64,
    /// Armijo factor for the descent test.
    pub armijo: f64,
    /// Center of the Gaussian seed (for translation experiments).
    pub seed_offset: (f64, f64),
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-5,
            max_iter: 5000,
            eta0: 0.1,
            armijo: 1e-4,
            seed_offset: (0.0, 0.0),
        }
    }
}

/// Result of projecting one ray onto the Nehari manifold.
#[derive(Debug, Clone, Copy)]
pub struct NehariResult {
    pub t_u: f64,
    /// phi(t_u) after bisection.
    pub residual: f64,
    pub bracket: (f64, f64),
    /// Sign alternations of phi observed on the scan grid (1 under the
    /// monotone-fiber hypothesis).
    pub sign_changes: usize,
}

/// Everything a ground-state run reports.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// J after every accepted step (nonincreasing).
    pub energy_trace: Vec<f64>,
    pub final_breakdown: EnergyBreakdown,
    /// L2 norm of the gradient field at the final iterate.
    pub grad_norm: f64,
    /// grad_norm / ||u||.
    pub grad_norm_rel: f64,
    pub nehari_residual: f64,
    /// Minimum sample of the final field (nonnegative by construction).
    pub min_value: f64,
    /// Whether 0 < J(u*) < 2 pi / alpha0.
    pub bound_2pi_alpha0: bool,
    pub iterations: usize,
    pub converged: bool,
    /// Fraction of |u|^p mass in the outer 10% frame of the domain.
    pub boundary_mass: f64,
    /// Largest L2 mass fraction removed by positive-part truncation over the
    /// final 10 accepted steps; above 1e-6 it is surfaced as a warning.
    pub truncated_mass_recent: f64,
    pub field: Field2D,
}

/// Fiber map phi(t) = J'(t u)[t u] / t evaluated through the scaling
/// homogeneities: the gauge pair of `u` is computed once and reused for
/// every t.
fn fiber_phi(parts: &FieldParts, u: &Field2D, spec: &NonlinearitySpec, p: f64, t: f64) -> f64 {
    let pairing = if spec.lambda == 0.0 {
        0.0
    } else {
        u.integrate(|v| {
            let tv = t * v;
            spec.f_unchecked(tv) * tv
        })
    };
    t * t * parts.grad_sq + 3.0 * t.powi(6) * parts.cs + t.powf(p) * parts.pot_p - pairing
}

fn fiber_energy(parts: &FieldParts, u: &Field2D, spec: &NonlinearitySpec, p: f64, t: f64) -> f64 {
    let nl = if spec.lambda == 0.0 {
        0.0
    } else {
        u.integrate(|v| spec.cap_f_unchecked(t * v))
    };
    0.5 * t * t * parts.grad_sq + 0.5 * t.powi(6) * parts.cs + t.powf(p) / p * parts.pot_p - nl
}

/// Scan-and-bisect projection used by both the public operation and the
/// descent loop. Scans a geometric t-grid for the first sign change of phi,
/// counts all alternations, then bisects the bracket to relative width 1e-12.
fn project_with_parts(
    parts: &FieldParts,
    u: &Field2D,
    spec: &NonlinearitySpec,
    p: f64,
    scan_from: f64,
) -> Result<NehariResult> {
    let u_max = u.values().iter().fold(0.0f64, |m, &v| m.max(v));
    if u_max <= 0.0 {
        return Err(Error::ZeroField);
    }
    let t_sat = spec.saturation_threshold() / u_max;
    let mut t = scan_from.min(0.5 * t_sat);
    let factor = 1.25;
    let mut prev_t = t;
    let mut prev_phi = fiber_phi(parts, u, spec, p, t);
    let mut bracket = None;
    let mut sign_changes = 0usize;
    let mut phi_min = prev_phi;
    while t < t_sat {
        t = (t * factor).min(t_sat);
        let phi = fiber_phi(parts, u, spec, p, t);
        phi_min = phi_min.min(phi);
        if prev_phi > 0.0 && phi <= 0.0 {
            sign_changes += 1;
            if bracket.is_none() {
                bracket = Some((prev_t, t));
            }
        } else if prev_phi <= 0.0 && phi > 0.0 {
            sign_changes += 1;
        }
        prev_t = t;
        prev_phi = phi;
        if t >= t_sat {
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoBracket {
        t_max: t_sat,
        phi_min,
    })?;
    for _ in 0..200 {
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if fiber_phi(parts, u, spec, p, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_u = 0.5 * (lo + hi);
    Ok(NehariResult {
        t_u,
        residual: fiber_phi(parts, u, spec, p, t_u),
        bracket: (lo, hi),
        sign_changes,
    })
}

/// Rescale `u` onto the Nehari manifold: the unique t with phi(t) = 0.
///
/// `u` must be nonzero and nonnegative. Scans from well below the nonlinear
/// crossover so the sign-change count reflects the whole fiber.
pub fn nehari_project(
    u: &Field2D,
    pot: &PotentialSpec,
    spec: &NonlinearitySpec,
    p: f64,
) -> Result<NehariResult> {
    crate::fields::check_p(p)?;
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    if u.min_value() < 0.0 {
        return Err(Error::InvalidParameter {
            what: "projection input",
            why: "field must be nonnegative".into(),
        });
    }
    let parts = field_parts(u, pot, p);
    let u_max = u.values().iter().fold(0.0f64, |m, &v| m.max(v));
    project_with_parts(&parts, u, spec, p, 1e-3 / u_max.max(1e-12))
}

struct State {
    u: Field2D,
    parts: FieldParts,
    energy: f64,
    grad_l2: f64,
    e_norm: f64,
}

fn eval_state(u: Field2D, pot: &PotentialSpec, spec: &NonlinearitySpec, p: f64) -> State {
    let parts = field_parts(&u, pot, p);
    let a0 = gauge_a0(&u, &parts.a1, &parts.a2).expect("same grid");
    let g = gradient_with_gauge(&u, &parts.a1, &parts.a2, &a0, pot, spec, p);
    let grad_l2 = g.l2_norm();
    let lpp = lp_norm_p_unchecked(&u, p);
    let e_norm = (parts.grad_sq + lpp.powf(2.0 / p)).sqrt();
    let energy = breakdown_from(&parts, &u, spec, p).total;
    State {
        u,
        parts,
        energy,
        grad_l2,
        e_norm,
    }
}

fn gradient_field(u: &Field2D, parts: &FieldParts, pot: &PotentialSpec, spec: &NonlinearitySpec, p: f64) -> Field2D {
    let a0 = gauge_a0(u, &parts.a1, &parts.a2).expect("same grid");
    gradient_with_gauge(u, &parts.a1, &parts.a2, &a0, pot, spec, p)
}

/// Projected-gradient descent over the Nehari manifold from a positive
/// Gaussian seed. Reports J(u*) as an upper bound for the ground-state level.
pub fn ground_state(
    grid: Grid2D,
    pot: &PotentialSpec,
    spec: &NonlinearitySpec,
    p: f64,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    crate::fields::check_p(p)?;
    pot.validate()?;
    spec.validate()?;
    if spec.lambda == 0.0 {
        return Err(Error::InvalidParameter {
            what: "nonlinearity",
            why: "ground-state solve needs an active nonlinearity (lambda > 0)".into(),
        });
    }
    let f2 = check_f2(spec);
    if !f2.holds {
        return Err(Error::InvalidParameter {
            what: "nonlinearity",
            why: format!(
                "fiber uniqueness requires f(t)/t^5 strictly increasing; violated at {:?}",
                f2.first_violation
            ),
        });
    }

    // unit-norm seed, projected onto the manifold
    let seed = gaussian_seed(grid, cfg.seed_offset);
    let norm = {
        let g = crate::fields::gradient_sq_norm(&seed);
        let lpp = lp_norm_p_unchecked(&seed, p);
        (g + lpp.powf(2.0 / p)).sqrt()
    };
    let u0 = seed.scaled(1.0 / norm);
    let proj = nehari_project(&u0, pot, spec, p)?;
    let mut state = eval_state(u0.scaled(proj.t_u), pot, spec, p);

    let mut trace = vec![state.energy];
    let mut eta = cfg.eta0;
    let mut converged = false;
    let mut iterations = 0;
    let mut trunc_window: Vec<f64> = Vec::new();

    for it in 1..=cfg.max_iter {
        iterations = it;
        let g = gradient_field(&state.u, &state.parts, pot, spec, p);
        let gl2_sq = g.values().iter().map(|v| v * v).sum::<f64>() * grid.cell_area();
        state.grad_l2 = gl2_sq.sqrt();
        if state.grad_l2 / state.e_norm < cfg.tol {
            converged = true;
            iterations = it - 1;
            break;
        }

        let mut accepted = false;
        while eta > 1e-14 {
            // positive part of the trial step, tracking removed mass
            let mut neg_sq = 0.0;
            let mut tot_sq = 0.0;
            let trial: Vec<f64> = state
                .u
                .values()
                .iter()
                .zip(g.values())
                .map(|(&uv, &gv)| {
                    let w = uv - eta * gv;
                    tot_sq += w * w;
                    if w < 0.0 {
                        neg_sq += w * w;
                        0.0
                    } else {
                        w
                    }
                })
                .collect();
            let v = Field2D::from_values(grid, trial).expect("finite step");
            if v.is_zero() {
                eta *= 0.5;
                continue;
            }
            let vparts = field_parts(&v, pot, p);
            let projection = match project_with_parts(&vparts, &v, spec, p, 0.5) {
                Ok(r) => r,
                Err(Error::NoBracket { .. }) => {
                    eta *= 0.5;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let t = projection.t_u;
            let j_trial = fiber_energy(&vparts, &v, spec, p, t);
            if j_trial <= state.energy - cfg.armijo * eta * gl2_sq {
                let u_new = v.scaled(t);
                let lpp = lp_norm_p_unchecked(&u_new, p);
                let t2 = t * t;
                state = State {
                    parts: FieldParts {
                        grad_sq: t2 * vparts.grad_sq,
                        cs: t.powi(6) * vparts.cs,
                        pot_p: t.powf(p) * vparts.pot_p,
                        a1: vparts.a1.scaled(t2),
                        a2: vparts.a2.scaled(t2),
                    },
                    e_norm: (t2 * vparts.grad_sq + lpp.powf(2.0 / p)).sqrt(),
                    energy: j_trial,
                    grad_l2: state.grad_l2,
                    u: u_new,
                };
                trace.push(j_trial);
                trunc_window.push(if tot_sq > 0.0 { neg_sq / tot_sq } else { 0.0 });
                if trunc_window.len() > 10 {
                    trunc_window.remove(0);
                }
                eta = (eta * 1.5).min(1.0);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            // step collapsed; the iterate is as stationary as this scheme gets
            break;
        }
    }

    if !converged {
        // refresh the gradient at the final iterate for honest reporting
        let g = gradient_field(&state.u, &state.parts, pot, spec, p);
        state.grad_l2 = g.l2_norm();
        converged = state.grad_l2 / state.e_norm < cfg.tol;
    }

    let final_breakdown = breakdown_from(&state.parts, &state.u, spec, p);
    let nehari = nehari_residual_from(&state.parts, &state.u, spec);
    let boundary_mass = crate::fields::boundary_mass_fraction(&state.u, p)?;
    let j = final_breakdown.total;
    Ok(SolveReport {
        energy_trace: trace,
        final_breakdown,
        grad_norm: state.grad_l2,
        grad_norm_rel: state.grad_l2 / state.e_norm,
        nehari_residual: nehari,
        min_value: state.u.min_value(),
        bound_2pi_alpha0: j > 0.0 && j < 2.0 * std::f64::consts::PI / spec.alpha0,
        iterations,
        converged,
        boundary_mass,
        truncated_mass_recent: trunc_window.iter().fold(0.0f64, |m, &v| m.max(v)),
        field: state.u,
    })
}

/// Outcome of the two-arm comparison between the well potential and its
/// constant limit.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub m_a_upper: f64,
    pub m_inf_upper: f64,
    /// m_inf_upper - m_a_upper.
    pub margin: f64,
    /// True when the margin clears 10x the solve tolerance.
    pub ordered: bool,
    /// max_t J_a(t u_inf*): evaluating the limit minimizer inside the well
    /// problem certifies m_a <= this value directly.
    pub fiber_certificate: f64,
    /// fiber_certificate <= m_inf_upper (holds whenever a <= a_inf).
    pub certificate_holds: bool,
    pub run_a: SolveReport,
    pub run_inf: SolveReport,
}

/// Solve under a(x) and under the constant limit a_inf, then certify the
/// ordering of the two levels through the fiber of the limit minimizer.
pub fn compare_potentials(
    grid: Grid2D,
    spec: &NonlinearitySpec,
    p: f64,
    pot_a: &PotentialSpec,
    cfg: &SolveConfig,
) -> Result<CompareReport> {
    let run_a = ground_state(grid, pot_a, spec, p, cfg)?;
    let pot_inf = pot_a.limit();
    let run_inf = ground_state(grid, &pot_inf, spec, p, cfg)?;

    let u_inf = &run_inf.field;
    let parts_a = field_parts(u_inf, pot_a, p);
    let proj = project_with_parts(&parts_a, u_inf, spec, p, 0.25)?;
    let fiber_certificate = fiber_energy(&parts_a, u_inf, spec, p, proj.t_u);

    let m_a_upper = run_a.final_breakdown.total;
    let m_inf_upper = run_inf.final_breakdown.total;
    let margin = m_inf_upper - m_a_upper;
    Ok(CompareReport {
        m_a_upper,
        m_inf_upper,
        margin,
        ordered: margin > 10.0 * cfg.tol,
        fiber_certificate,
        certificate_holds: fiber_certificate <= m_inf_upper * (1.0 + 1e-12) + 1e-12,
        run_a,
        run_inf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::gaussian_seed;

    const P: f64 = 1.5;

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(12.0, n).unwrap()
    }

    #[test]
    fn projection_lands_on_manifold() {
        let u = gaussian_seed(grid(64), (0.0, 0.0));
        let pot = PotentialSpec::constant(1.0).unwrap();
        let spec = NonlinearitySpec::defaults();
        let r = nehari_project(&u, &pot, &spec, P).unwrap();
        assert_eq!(r.sign_changes, 1, "monotone fiber must cross once");
        assert!(r.bracket.0 < r.t_u && r.t_u < r.bracket.1);
        // the rescaled field has (near-)zero Nehari residual
        let on_manifold = u.scaled(r.t_u);
        let resid = crate::functional::nehari_residual(&on_manifold, &pot, &spec, P).unwrap();
        let scale = crate::fields::gradient_sq_norm(&on_manifold);
        assert!(resid.abs() < 1e-8 * scale, "residual {resid} vs scale {scale}");
    }

    #[test]
    fn projection_of_manifold_point_is_identity() {
        let u = gaussian_seed(grid(64), (0.0, 0.0));
        let pot = PotentialSpec::constant(1.0).unwrap();
        let spec = NonlinearitySpec::defaults();
        let r = nehari_project(&u, &pot, &spec, P).unwrap();
        let v = u.scaled(r.t_u);
        let r2 = nehari_project(&v, &pot, &spec, P).unwrap();
        assert!((r2.t_u - 1.0).abs() < 1e-9, "t_u = {} on a manifold point", r2.t_u);
    }

    #[test]
    fn projection_matches_pure_power_closed_form() {
        // with a negligible exponential rate the default family acts as the
        // pure power f = t^5, where phi has no potential/cs contributions at
        // leading order only when those are suppressed; here we keep them and
        // verify against the same phi solved by dense bisection instead
        let u = gaussian_seed(grid(64), (0.0, 0.0));
        let pot = PotentialSpec::constant(1.0).unwrap();
        let spec = NonlinearitySpec::power_exp(1.0, 1e-12, 5.0).unwrap();
        let r = nehari_project(&u, &pot, &spec, P).unwrap();
        // independent oracle: solve t^2 A + 3 t^6 C + t^p P = t^6 D for the
        // pure sextic pairing D = integral u^6 via dense scanning
        let a = crate::fields::gradient_sq_norm(&u);
        let c = crate::gauge::cs_energy(&u);
        let pp = crate::fields::lp_norm_p_unchecked(&u, P);
        let d = u.integrate(|v| v.powi(6));
        let phi = |t: f64| t * t * a + 3.0 * t.powi(6) * c + t.powf(P) * pp - t.powi(6) * d;
        let (mut lo, mut hi) = (1.0, 16.0);
        assert!(phi(lo) > 0.0 && phi(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_oracle = 0.5 * (lo + hi);
        assert!(
            (r.t_u - t_oracle).abs() / t_oracle < 1e-6,
            "t_u = {} vs oracle {}",
            r.t_u,
            t_oracle
        );
    }

    #[test]
    fn projection_rejects_zero_and_negative_fields() {
        let pot = PotentialSpec::constant(1.0).unwrap();
        let spec = NonlinearitySpec::defaults();
        let z = Field2D::zeros(grid(64));
        assert!(matches!(
            nehari_project(&z, &pot, &spec, P),
            Err(Error::ZeroField)
        ));
        let neg = gaussian_seed(grid(64), (0.0, 0.0)).scaled(-1.0);
        assert!(nehari_project(&neg, &pot, &spec, P).is_err());
    }

    #[test]
    fn weak_nonlinearity_reports_no_bracket() {
        // a pure power with tiny amplitude cannot absorb the quadratic and
        // sextic positives before its table runs out
        let table = crate::nonlinearity::FTable::tabulate(|t| 1e-12 * t.powi(5), 1e-6, 2.0, 512)
            .unwrap();
        let spec = NonlinearitySpec::with_table(table, 1.0).unwrap();
        let pot = PotentialSpec::constant(1.0).unwrap();
        let u = gaussian_seed(grid(64), (0.0, 0.0));
        match nehari_project(&u, &pot, &spec, P) {
            Err(Error::NoBracket { phi_min, .. }) => assert!(phi_min > 0.0),
            other => panic!("expected NoBracket, got {other:?}"),
        }
    }

    #[test]
    fn fiber_maximum_property() {
        let u = gaussian_seed(grid(64), (0.0, 0.0));
        let pot = PotentialSpec::constant(1.0).unwrap();
        let spec = NonlinearitySpec::defaults();
        let parts = field_parts(&u, &pot, P);
        let r = project_with_parts(&parts, &u, &spec, P, 1e-3).unwrap();
        let j_star = fiber_energy(&parts, &u, &spec, P, r.t_u);
        for k in 0..50 {
            let t = r.t_u * (0.5 + 1.5 * k as f64 / 49.0);
            let j = fiber_energy(&parts, &u, &spec, P, t);
            assert!(
                j <= j_star * (1.0 + 1e-10) + 1e-12,
                "J(t u) = {j} exceeds fiber max {j_star} at t = {t}"
            );
        }
    }

    #[test]
    fn ground_state_small_grid_converges() {
        let pot = PotentialSpec::constant(1.0).unwrap();
        let spec = NonlinearitySpec::defaults();
        let cfg = SolveConfig {
            tol: 1e-4,
            max_iter: 3000,
            ..SolveConfig::default()
        };
        let report = ground_state(grid(32), &pot, &spec, P, &cfg).unwrap();
        assert!(report.converged, "rel grad {}", report.grad_norm_rel);
        assert!(report.min_value >= 0.0);
        assert!(report.final_breakdown.total > 0.0);
        // trace nonincreasing within slack
        for w in report.energy_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn ground_state_rejects_f2_violations() {
        let table = crate::nonlinearity::FTable::tabulate(
            |t| t * ((t * t).exp() - 1.0),
            1e-7,
            20.0,
            2000,
        )
        .unwrap();
        let spec = NonlinearitySpec::with_table(table, 1.0).unwrap();
        let pot = PotentialSpec::constant(1.0).unwrap();
        let err = ground_state(grid(32), &pot, &spec, P, &SolveConfig::default());
        assert!(err.is_err(), "f2 violation must be rejected up front");
    }
}
