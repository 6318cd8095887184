//! Nonlinearity families with critical exponential growth, the Young
//! function, and sampled validators for the structural hypotheses the
//! variational machinery relies on.
//!
//! The default family is
//!
//!   f(t) = lambda * t^{q_f} * e^{alpha0 t^2}   for t > 0,   f(t) = 0 for t <= 0,
//!
//! which vanishes superlinearly at 0, has critical growth of rate alpha0 at
//! infinity, and (for q_f >= 5) makes t -> f(t)/t^5 strictly increasing.
//! Tabulated families cover everything else the checkers need to reject.

use crate::error::{Error, Result};
use serde::Serialize;

/// Natural-log ceiling for f values; evaluations beyond it saturate.
const LN_F_MAX: f64 = 690.0;

/// Geometric sample grid used by all the hypothesis checkers.
pub(crate) fn geomspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (k - 1) as f64);
    let mut t = lo;
    (0..k)
        .map(|_| {
            let v = t;
            t *= ratio;
            v
        })
        .collect()
}

/// Tabulated nonlinearity on a positive, strictly increasing node set.
/// Values interpolate linearly; below the first node the table closes
/// linearly to (0, 0); beyond the last node evaluation saturates.
#[derive(Debug, Clone)]
pub struct FTable {
    ts: Vec<f64>,
    fs: Vec<f64>,
    cum: Vec<f64>, // trapezoid antiderivative at the nodes
}

impl FTable {
    pub fn from_samples(ts: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if ts.len() != fs.len() || ts.len() < 2 {
            return Err(Error::InvalidParameter {
                what: "nonlinearity table",
                why: format!("need matching node/value lists of length >= 2, got {}/{}", ts.len(), fs.len()),
            });
        }
        if ts[0] <= 0.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                what: "nonlinearity table",
                why: "nodes must be positive and strictly increasing".into(),
            });
        }
        if fs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "nonlinearity table",
                why: "non-finite value".into(),
            });
        }
        let mut cum = Vec::with_capacity(ts.len());
        let mut acc = 0.5 * ts[0] * fs[0]; // triangle closing to (0,0)
        cum.push(acc);
        for i in 0..ts.len() - 1 {
            acc += 0.5 * (ts[i + 1] - ts[i]) * (fs[i] + fs[i + 1]);
            cum.push(acc);
        }
        Ok(FTable { ts, fs, cum })
    }

    /// Build from a callable sampled on a geometric grid.
    pub fn tabulate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, k: usize) -> Result<Self> {
        let ts = geomspace(lo, hi, k);
        let fs = ts.iter().map(|&t| f(t)).collect();
        FTable::from_samples(ts, fs)
    }

    fn t_max(&self) -> f64 {
        *self.ts.last().expect("nonempty")
    }

    fn f_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t < self.ts[0] {
            return self.fs[0] * t / self.ts[0];
        }
        let i = match self.ts.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.fs[i],
            Err(i) => i - 1,
        };
        let w = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
        self.fs[i] + w * (self.fs[i + 1] - self.fs[i])
    }

    fn cap_f_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t < self.ts[0] {
            return 0.5 * t * self.f_at(t);
        }
        let i = match self.ts.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.cum[i],
            Err(i) => i - 1,
        };
        self.cum[i] + 0.5 * (t - self.ts[i]) * (self.fs[i] + self.f_at(t))
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    /// lambda * t^{q_f} * e^{alpha0 t^2}
    PowerExp,
    /// Tabulated samples with linear interpolation.
    CustomTable(FTable),
}

/// Declared witnesses for the superlinearity hypothesis
/// 0 < t^theta F(t) <= m0 f(t) for t > t0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct F3Witness {
    pub t0: f64,
    pub m0: f64,
    pub theta: f64,
}

/// A parametrized nonlinearity together with its declared constants.
#[derive(Debug, Clone)]
pub struct NonlinearitySpec {
    pub family: Family,
    /// Amplitude; zero disables the nonlinearity (test configurations).
    pub lambda: f64,
    /// Critical growth rate alpha0.
    pub alpha0: f64,
    /// Power prefactor exponent.
    pub q_f: f64,
    pub f3: F3Witness,
    /// Declared limit of F(t) e^{-alpha0 t^2}; may be +infinity.
    pub beta0: f64,
}

impl NonlinearitySpec {
    pub fn power_exp(lambda: f64, alpha0: f64, q_f: f64) -> Result<Self> {
        let spec = NonlinearitySpec {
            family: Family::PowerExp,
            lambda,
            alpha0,
            q_f,
            f3: F3Witness {
                t0: 1.0,
                m0: 0.2,
                theta: 0.0,
            },
            beta0: f64::INFINITY,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The defaults: lambda = 1, alpha0 = 1, q_f = 5.
    pub fn defaults() -> Self {
        Self::power_exp(1.0, 1.0, 5.0).expect("defaults are valid")
    }

    pub fn with_table(table: FTable, alpha0: f64) -> Result<Self> {
        let spec = NonlinearitySpec {
            family: Family::CustomTable(table),
            lambda: 1.0,
            alpha0,
            q_f: 5.0,
            f3: F3Witness {
                t0: 1.0,
                m0: 0.2,
                theta: 0.0,
            },
            beta0: f64::INFINITY,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &'static str, why: String| Err(Error::InvalidParameter { what, why });
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda", format!("must be finite and >= 0, got {}", self.lambda));
        }
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return bad("alpha0", format!("must be positive, got {}", self.alpha0));
        }
        if !(self.q_f > 1.0 && self.q_f <= 64.0) {
            return bad("qf", format!("must lie in (1, 64], got {}", self.q_f));
        }
        if !(self.f3.t0 > 0.0 && self.f3.m0 > 0.0) {
            return bad("f3 witnesses", format!("t0, m0 must be positive, got {}, {}", self.f3.t0, self.f3.m0));
        }
        if !(self.f3.theta >= 0.0 && self.f3.theta < 1.0) {
            return bad("theta", format!("must lie in [0, 1), got {}", self.f3.theta));
        }
        if !(self.beta0 > 0.0) {
            return bad("beta0", format!("must be positive (possibly infinite), got {}", self.beta0));
        }
        Ok(())
    }

    /// Largest t this spec can evaluate before exponent overflow.
    pub fn saturation_threshold(&self) -> f64 {
        match &self.family {
            Family::CustomTable(tab) => tab.t_max(),
            Family::PowerExp => {
                if self.lambda == 0.0 {
                    return f64::INFINITY;
                }
                // solve alpha0 t^2 + q_f ln t + ln lambda = LN_F_MAX
                let target = LN_F_MAX - self.lambda.ln();
                let g = |t: f64| self.alpha0 * t * t + self.q_f * t.ln();
                let (mut lo, mut hi) = (1e-6f64, 1e160f64);
                for _ in 0..200 {
                    let mid = (lo * hi).sqrt();
                    if g(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    #[inline]
    pub(crate) fn f_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::PowerExp => self.lambda * t.powf(self.q_f) * (self.alpha0 * t * t).exp(),
            Family::CustomTable(tab) => tab.f_at(t),
        }
    }

    #[inline]
    pub(crate) fn cap_f_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::PowerExp => {
                // F(t) = (lambda/2) alpha0^-(m+1) * I(m, alpha0 t^2) with
                // m = (q_f - 1)/2 and I(m, z) = z^{m+1} sum_k z^k / (k! (m+1+k)),
                // an all-positive series (no cancellation against e^z)
                let m = (self.q_f - 1.0) / 2.0;
                let z = self.alpha0 * t * t;
                let mut acc = 0.0;
                let mut term = 1.0; // z^k / k!
                for k in 0..4000 {
                    let contrib = term / (m + 1.0 + k as f64);
                    acc += contrib;
                    if k > 3 && contrib < 1e-17 * acc {
                        break;
                    }
                    term *= z / (k + 1) as f64;
                }
                0.5 * self.lambda * self.alpha0.powf(-(m + 1.0)) * z.powf(m + 1.0) * acc
            }
            Family::CustomTable(tab) => tab.cap_f_at(t),
        }
    }

    fn check_saturation(&self, t: f64) -> Result<()> {
        let threshold = self.saturation_threshold();
        if t > threshold {
            return Err(Error::Saturation { t, threshold });
        }
        Ok(())
    }

    /// f(t); zero for t <= 0, saturation error above the overflow threshold.
    pub fn f_eval(&self, t: f64) -> Result<f64> {
        self.check_saturation(t)?;
        Ok(self.f_unchecked(t))
    }

    /// F(t) = integral of f over [0, t].
    pub fn cap_f_eval(&self, t: f64) -> Result<f64> {
        self.check_saturation(t)?;
        Ok(self.cap_f_unchecked(t))
    }

    /// tau(s, t) = (1 - t^6)/6 f(s) s + F(st) - F(s).
    ///
    /// Nonnegative with minimum 0 at t = 1 whenever f(t)/t^5 is increasing;
    /// this is the pointwise inequality behind fiber-map uniqueness.
    pub fn tau_check(&self, s: f64, t: f64) -> Result<f64> {
        self.check_saturation(s)?;
        self.check_saturation(s * t)?;
        let fs = self.f_unchecked(s);
        Ok((1.0 - t.powi(6)) / 6.0 * fs * s + self.cap_f_unchecked(s * t)
            - self.cap_f_unchecked(s))
    }
}

// ---------------------------------------------------------------------------
// hypothesis checkers
// ---------------------------------------------------------------------------

/// Outcome of one sampled hypothesis check.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub name: String,
    pub holds: bool,
    /// Sampled range (the saturation tail is excluded and reported).
    pub range: (f64, f64),
    pub samples: usize,
    /// First violating sample, if any: (t, description).
    pub first_violation: Option<(f64, String)>,
}

impl HypothesisReport {
    fn pass(name: &str, range: (f64, f64), samples: usize) -> Self {
        HypothesisReport {
            name: name.into(),
            holds: true,
            range,
            samples,
            first_violation: None,
        }
    }

    fn fail(name: &str, range: (f64, f64), samples: usize, t: f64, why: String) -> Self {
        HypothesisReport {
            name: name.into(),
            holds: false,
            range,
            samples,
            first_violation: Some((t, why)),
        }
    }
}

const CHECK_SAMPLES: usize = 10_000;

fn check_range(spec: &NonlinearitySpec) -> (f64, f64) {
    (1e-6, 0.999 * spec.saturation_threshold())
}

/// Vanishing at the origin: f == 0 on t <= 0 and f(t)/t -> 0 as t -> 0+.
pub fn check_f1(spec: &NonlinearitySpec) -> HypothesisReport {
    let name = "f1";
    let range = check_range(spec);
    for t in [-1.0, -1e-6, 0.0] {
        if spec.f_unchecked(t) != 0.0 {
            return HypothesisReport::fail(name, range, 3, t, format!("f({t}) != 0"));
        }
    }
    // superlinear vanishing: the ratio f/t must shrink towards 0
    let r_small = spec.f_unchecked(1e-6) / 1e-6;
    let r_anchor = spec.f_unchecked(1e-2) / 1e-2;
    if spec.lambda > 0.0 && r_small > 1e-6 * r_anchor.max(1e-300) {
        return HypothesisReport::fail(
            name,
            range,
            2,
            1e-6,
            format!("f(t)/t = {r_small:.3e} does not vanish towards 0"),
        );
    }
    HypothesisReport::pass(name, range, 5)
}

/// Strict monotonicity of t -> f(t)/t^5 on a geometric grid.
pub fn check_f2(spec: &NonlinearitySpec) -> HypothesisReport {
    let name = "f2";
    let range = check_range(spec);
    let ts = geomspace(range.0, range.1, CHECK_SAMPLES);
    let mut prev: Option<(f64, f64)> = None;
    for &t in &ts {
        let ratio = spec.f_unchecked(t) / t.powi(5);
        if let Some((tp, rp)) = prev {
            if ratio <= rp {
                return HypothesisReport::fail(
                    name,
                    range,
                    ts.len(),
                    t,
                    format!("f/t^5 not strictly increasing: {rp:.6e} at t={tp:.6e} vs {ratio:.6e} at t={t:.6e}"),
                );
            }
        }
        prev = Some((t, ratio));
    }
    HypothesisReport::pass(name, range, ts.len())
}

/// Weak superlinearity f(t) t - 6 F(t) >= 0, sampled with a relative slack.
pub fn check_f2prime(spec: &NonlinearitySpec) -> HypothesisReport {
    let name = "f2prime";
    let range = check_range(spec);
    let ts = geomspace(range.0, range.1, CHECK_SAMPLES);
    for &t in &ts {
        let ft_t = spec.f_unchecked(t) * t;
        let gap = ft_t - 6.0 * spec.cap_f_unchecked(t);
        if gap < -1e-10 * ft_t.abs() {
            return HypothesisReport::fail(
                name,
                range,
                ts.len(),
                t,
                format!("f(t)t - 6F(t) = {gap:.6e} < 0"),
            );
        }
    }
    HypothesisReport::pass(name, range, ts.len())
}

/// Declared-witness check for 0 < t^theta F(t) <= m0 f(t) on t > t0.
pub fn check_f3(spec: &NonlinearitySpec) -> HypothesisReport {
    let name = "f3";
    let hi = 0.999 * spec.saturation_threshold();
    let lo = spec.f3.t0 * (1.0 + 1e-9);
    let range = (lo, hi);
    if lo >= hi {
        return HypothesisReport::fail(name, range, 0, lo, "empty sample range above t0".into());
    }
    let ts = geomspace(lo, hi, CHECK_SAMPLES);
    for &t in &ts {
        let lhs = t.powf(spec.f3.theta) * spec.cap_f_unchecked(t);
        let rhs = spec.f3.m0 * spec.f_unchecked(t);
        if lhs <= 0.0 {
            return HypothesisReport::fail(name, range, ts.len(), t, format!("t^theta F(t) = {lhs:.3e} not positive"));
        }
        if lhs > rhs * (1.0 + 1e-12) {
            return HypothesisReport::fail(
                name,
                range,
                ts.len(),
                t,
                format!("t^theta F(t) = {lhs:.6e} exceeds m0 f(t) = {rhs:.6e}"),
            );
        }
    }
    HypothesisReport::pass(name, range, ts.len())
}

/// Growth witness for F(t) e^{-alpha0 t^2}: sampled near the saturation edge,
/// the scaled primitive must stay positive and nondecreasing (its limit
/// beta0 may be finite or +infinity; only positivity is consumed downstream).
pub fn check_f4(spec: &NonlinearitySpec) -> HypothesisReport {
    let name = "f4";
    let hi = 0.999 * spec.saturation_threshold();
    let range = (0.5 * hi, hi);
    let ts = geomspace(range.0, range.1, 64);
    let mut prev = 0.0;
    for &t in &ts {
        let v = spec.cap_f_unchecked(t) * (-spec.alpha0 * t * t).exp();
        if v <= 0.0 {
            return HypothesisReport::fail(name, range, ts.len(), t, format!("F(t)e^(-a t^2) = {v:.3e} not positive"));
        }
        if v < prev * (1.0 - 1e-9) {
            return HypothesisReport::fail(
                name,
                range,
                ts.len(),
                t,
                format!("F(t)e^(-a t^2) decreasing near saturation: {prev:.6e} -> {v:.6e}"),
            );
        }
        prev = v;
    }
    HypothesisReport::pass(name, range, ts.len())
}

pub fn check_all(spec: &NonlinearitySpec) -> Vec<HypothesisReport> {
    vec![
        check_f1(spec),
        check_f2(spec),
        check_f2prime(spec),
        check_f3(spec),
        check_f4(spec),
    ]
}

// ---------------------------------------------------------------------------
// Young function
// ---------------------------------------------------------------------------

/// Parameters of the Young function Phi_{alpha, j0}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct YoungParams {
    pub alpha: f64,
    pub p: f64,
    /// p* = 2p/(2-p)
    pub p_star: f64,
    /// least j >= 1 with 2j >= p*
    pub j0: u32,
}

impl YoungParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        crate::fields::check_p(p)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "alpha",
                why: format!("must be positive, got {alpha}"),
            });
        }
        let p_star = 2.0 * p / (2.0 - p);
        let j0 = ((p_star / 2.0 - 1e-12).ceil() as u32).max(1);
        Ok(YoungParams {
            alpha,
            p,
            p_star,
            j0,
        })
    }
}

/// Phi_{alpha, j0}(t) = e^{alpha t^2} - sum_{j < j0} alpha^j t^{2j} / j!.
///
/// For small alpha t^2 the tail series sum_{j >= j0} alpha^j t^{2j}/j! is
/// summed directly (all terms positive, no cancellation); for large values
/// the partial sum is subtracted from the exponential.
pub fn young_phi(yp: &YoungParams, t: f64) -> Result<f64> {
    let x = yp.alpha * t * t;
    if x > LN_F_MAX {
        return Err(Error::Saturation {
            t,
            threshold: (LN_F_MAX / yp.alpha).sqrt(),
        });
    }
    if x < 30.0 {
        let mut term = 1.0; // x^j / j!
        let mut acc = 0.0;
        for j in 0..200u32 {
            if j >= yp.j0 {
                acc += term;
            }
            term *= x / (j + 1) as f64;
            if j > yp.j0 && term < 1e-18 * acc.max(1e-300) {
                break;
            }
        }
        Ok(acc)
    } else {
        let mut partial = 0.0;
        let mut term = 1.0;
        for j in 0..yp.j0 {
            partial += term;
            term *= x / (j + 1) as f64;
        }
        Ok(x.exp() - partial)
    }
}

/// Smallest sampled constant C such that
/// |f(s)| <= eps |s| + C |s|^{q-1} Phi_{alpha, j0}(s) holds on the grid.
///
/// Requires alpha > alpha0 (the envelope is not guaranteed otherwise).
/// The constant is a diagnostic; existence is the point.
pub fn growth_envelope_check(
    spec: &NonlinearitySpec,
    yp: &YoungParams,
    q: f64,
    eps: f64,
) -> Result<f64> {
    if yp.alpha <= spec.alpha0 {
        return Err(Error::InvalidParameter {
            what: "alpha",
            why: format!(
                "envelope needs alpha > alpha0, got alpha = {} <= alpha0 = {}",
                yp.alpha, spec.alpha0
            ),
        });
    }
    if !(q > 2.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            what: "envelope parameters",
            why: format!("need q > 2 and eps > 0, got q = {q}, eps = {eps}"),
        });
    }
    let hi = 0.999 * spec
        .saturation_threshold()
        .min((LN_F_MAX / yp.alpha).sqrt());
    let ts = geomspace(1e-6, hi, CHECK_SAMPLES);
    let mut c = 0.0f64;
    for &s in &ts {
        let excess = spec.f_unchecked(s).abs() - eps * s;
        if excess <= 0.0 {
            continue;
        }
        let denom = s.powf(q - 1.0) * young_phi(yp, s)?;
        c = c.max(excess / denom);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    /// Independent oracle: adaptive Simpson of f over [0, t].
    fn cap_f_oracle(spec: &NonlinearitySpec, t: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (l, r) = (simpson(f, a, m), simpson(f, m, b));
            if depth > 40 || (l + r - whole).abs() < 15.0 * tol {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(f, a, m, l, tol / 2.0, depth + 1) + rec(f, m, b, r, tol / 2.0, depth + 1)
            }
        }
        let g = |s: f64| spec.f_unchecked(s);
        rec(&g, 0.0, t, simpson(&g, 0.0, t), 1e-15 * (1.0 + t), 0)
    }

    #[test]
    fn f_vanishes_on_nonpositive_axis() {
        let spec = NonlinearitySpec::defaults();
        assert_eq!(spec.f_eval(-1.0).unwrap(), 0.0);
        assert_eq!(spec.f_eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn f_at_one_is_e_for_defaults() {
        let spec = NonlinearitySpec::defaults();
        let got = spec.f_eval(1.0).unwrap();
        assert!((got - E).abs() < 1e-14, "f(1) = {got}");
    }

    #[test]
    fn f_superlinear_at_origin() {
        let spec = NonlinearitySpec::defaults();
        let r = spec.f_eval(1e-4).unwrap() / 1e-4;
        assert!(r < 1e-12, "f(t)/t = {r} at t = 1e-4");
    }

    #[test]
    fn f_saturates_instead_of_overflowing() {
        let spec = NonlinearitySpec::defaults();
        assert!(matches!(
            spec.f_eval(1e3),
            Err(Error::Saturation { .. })
        ));
        let t_sat = spec.saturation_threshold();
        assert!(spec.f_eval(0.999 * t_sat).unwrap().is_finite());
    }

    #[test]
    fn cap_f_matches_quadrature_oracle() {
        let spec = NonlinearitySpec::defaults();
        for t in [0.1, 0.5, 1.0, 2.0, 3.0, 5.0] {
            let got = spec.cap_f_eval(t).unwrap();
            let want = cap_f_oracle(&spec, t);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1e-12),
                "F({t}) = {got}, oracle {want}"
            );
        }
        // closed form at t=1 for the defaults: (e - 2)/2
        let got = spec.cap_f_eval(1.0).unwrap();
        assert!((got - (E - 2.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cap_f_near_saturation_finite() {
        let spec = NonlinearitySpec::defaults();
        let t = 0.999 * spec.saturation_threshold();
        let v = spec.cap_f_eval(t).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn default_family_passes_all_hypotheses() {
        let spec = NonlinearitySpec::defaults();
        for report in check_all(&spec) {
            assert!(
                report.holds,
                "{} violated: {:?}",
                report.name, report.first_violation
            );
        }
    }

    #[test]
    fn exp_minus_one_family_fails_f2_near_zero() {
        // f(t) = t (e^{t^2} - 1): f/t^5 ~ 1/t^2 decreasing near the origin
        let table = FTable::tabulate(|t| t * ((t * t).exp() - 1.0), 1e-7, 20.0, 4000).unwrap();
        let spec = NonlinearitySpec::with_table(table, 1.0).unwrap();
        let report = check_f2(&spec);
        assert!(!report.holds);
        let (t, _) = report.first_violation.unwrap();
        assert!(t < 1e-2, "violation expected near 0, found at {t}");
    }

    #[test]
    fn f2_implies_f2prime_on_families_that_pass() {
        let spec = NonlinearitySpec::defaults();
        assert!(check_f2(&spec).holds);
        assert!(check_f2prime(&spec).holds);
        // scaling lambda leaves both verdicts unchanged
        let spec2 = NonlinearitySpec::power_exp(2.0, 1.0, 5.0).unwrap();
        assert_eq!(check_f2(&spec2).holds, check_f2(&spec).holds);
        assert_eq!(check_f2prime(&spec2).holds, check_f2prime(&spec).holds);
    }

    #[test]
    fn tau_zero_at_unit_scaling() {
        let spec = NonlinearitySpec::defaults();
        for s in [0.1, 0.5, 1.0, 2.0, 5.0] {
            assert_eq!(spec.tau_check(s, 1.0).unwrap(), 0.0, "tau({s}, 1)");
        }
    }

    #[test]
    fn tau_positive_away_from_one() {
        let spec = NonlinearitySpec::defaults();
        let a = spec.tau_check(1.0, 2.0).unwrap();
        let b = spec.tau_check(1.0, 0.5).unwrap();
        assert!(a > 0.0 && b > 0.0, "tau(1,2) = {a}, tau(1,0.5) = {b}");
        // frozen oracle values via the quadrature primitive
        let f1 = spec.f_unchecked(1.0);
        let want_a = (1.0 - 64.0) / 6.0 * f1 + cap_f_oracle(&spec, 2.0) - cap_f_oracle(&spec, 1.0);
        assert!((a - want_a).abs() <= 1e-10 * want_a.abs());
    }

    #[test]
    fn tau_stationary_at_one() {
        let spec = NonlinearitySpec::defaults();
        let s = 1.3;
        let eps = 1e-6;
        let d = (spec.tau_check(s, 1.0 + eps).unwrap() - spec.tau_check(s, 1.0 - eps).unwrap())
            / (2.0 * eps);
        // scale of the two tau values themselves
        let scale = spec.tau_check(s, 1.5).unwrap().abs().max(1.0);
        assert!(d.abs() < 1e-6 * scale, "d tau/dt at t=1 is {d}");
    }

    #[test]
    fn tau_nonnegative_on_grid() {
        let spec = NonlinearitySpec::defaults();
        let svals = geomspace(0.01, 3.0, 100);
        let tvals = geomspace(0.05, 3.0, 100);
        for &s in &svals {
            for &t in &tvals {
                let tau = spec.tau_check(s, t).unwrap();
                let scale = (spec.f_unchecked(s) * s).abs().max(1e-300);
                assert!(tau >= -1e-10 * scale, "tau({s}, {t}) = {tau}");
            }
        }
    }

    #[test]
    fn young_params_from_p() {
        let yp = YoungParams::new(1.0, 1.5).unwrap();
        assert_eq!(yp.j0, 3);
        assert!((yp.p_star - 6.0).abs() < 1e-12);
        let yp = YoungParams::new(1.0, 1.2).unwrap();
        assert_eq!(yp.j0, 2);
        assert!((yp.p_star - 3.0).abs() < 1e-12);
        assert!(yp.p_star > 2.0 * (yp.j0 - 1) as f64 && 2.0 * yp.j0 as f64 >= yp.p_star);
    }

    #[test]
    fn young_phi_values() {
        let yp = YoungParams::new(1.0, 1.5).unwrap();
        assert_eq!(young_phi(&yp, 0.0).unwrap(), 0.0);
        // Phi_{1,3}(1) = e - 1 - 1 - 1/2 = e - 2.5
        let got = young_phi(&yp, 1.0).unwrap();
        assert!((got - (E - 2.5)).abs() < 1e-14, "Phi(1) = {got}");
    }

    #[test]
    fn young_phi_series_and_subtraction_agree() {
        // cross the x = 30 switch: both branches near the boundary
        let yp = YoungParams::new(1.0, 1.5).unwrap();
        let t_lo = (29.999f64).sqrt();
        let t_hi = (30.001f64).sqrt();
        let a = young_phi(&yp, t_lo).unwrap();
        let b = young_phi(&yp, t_hi).unwrap();
        assert!((b - a).abs() / a < 1e-3, "branch mismatch: {a} vs {b}");
    }

    #[test]
    fn young_phi_leading_order_at_zero() {
        // Phi(t)/t^{2 j0} -> alpha^{j0}/j0! as t -> 0, checked at two scales
        let yp = YoungParams::new(1.0, 1.5).unwrap();
        let lead = 1.0 / 6.0; // alpha^3 / 3!
        let r1 = young_phi(&yp, 1e-4).unwrap() / 1e-4f64.powi(6);
        let r2 = young_phi(&yp, 1e-5).unwrap() / 1e-5f64.powi(6);
        assert!((r1 - lead).abs() / lead < 1e-7, "r1 = {r1}");
        assert!((r2 - lead).abs() / lead < 1e-7, "r2 = {r2}");
        // Richardson consistency: the deviation must shrink with t^2
        assert!((r2 - lead).abs() <= (r1 - lead).abs());
    }

    #[test]
    fn envelope_constant_finite_and_monotone_in_eps() {
        let spec = NonlinearitySpec::defaults();
        let yp = YoungParams::new(1.1, 1.5).unwrap();
        let c1 = growth_envelope_check(&spec, &yp, 8.0, 0.1).unwrap();
        assert!(c1.is_finite() && c1 > 0.0);
        let c2 = growth_envelope_check(&spec, &yp, 8.0, 0.5).unwrap();
        assert!(c2 <= c1, "larger eps must need no larger constant: {c2} vs {c1}");
    }

    #[test]
    fn envelope_rejects_subcritical_alpha() {
        let spec = NonlinearitySpec::defaults();
        let yp = YoungParams::new(0.9, 1.5).unwrap();
        assert!(growth_envelope_check(&spec, &yp, 8.0, 0.1).is_err());
    }

    #[test]
    fn envelope_holds_with_fitted_constant() {
        let spec = NonlinearitySpec::defaults();
        let yp = YoungParams::new(1.1, 1.5).unwrap();
        let (q, eps) = (8.0, 0.1);
        let c = growth_envelope_check(&spec, &yp, q, eps).unwrap();
        for &s in &geomspace(1e-5, 5.0, 500) {
            let lhs = spec.f_unchecked(s).abs();
            let rhs = eps * s + c * s.powf(q - 1.0) * young_phi(&yp, s).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-9), "envelope broken at s = {s}");
        }
    }

    #[test]
    fn table_family_round_trip() {
        // pure power f = t^5 tabulated: F should track t^6/6 closely
        let table = FTable::tabulate(|t| t.powi(5), 1e-8, 10.0, 4000).unwrap();
        let spec = NonlinearitySpec::with_table(table, 1e-12).unwrap();
        let f = spec.f_eval(2.0).unwrap();
        assert!((f - 32.0).abs() / 32.0 < 1e-4, "f(2) = {f}");
        let cf = spec.cap_f_eval(2.0).unwrap();
        let want = 64.0 / 6.0;
        assert!((cf - want).abs() / want < 1e-4, "F(2) = {cf}");
    }
}
