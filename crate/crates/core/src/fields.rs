//! Discretized 2D fields: grids, norms, differential quadrature.
//!
//! The computational domain is the square [-L, L]^2 with cell-centered
//! samples and zero extension outside. The work-space norm is
//! ||u|| = sqrt(|grad u|_2^2 + |u|_p^2) with 1 < p < 2.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Uniform cell-centered grid on [-L, L]^2 with n cells per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    half_width: f64,
    n: usize,
}

impl Grid2D {
    /// `n` must be a power of two, at least 8; `half_width` positive.
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "half_width",
                why: format!("must be positive and finite, got {half_width}"),
            });
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter {
                what: "points_per_side",
                why: format!("must be a power of two >= 8, got {n}"),
            });
        }
        Ok(Grid2D { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell spacing h = 2L/n.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Cell area h^2, the quadrature weight of every cell.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Coordinate of the i-th cell center along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }
}

/// Real scalar field sampled at the cell centers of a [`Grid2D`].
///
/// Values are stored row-major: index `(i, j)` (x-index, y-index) lives at
/// `i * n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Field2D {
            values: vec![0.0; grid.n * grid.n],
            grid,
        }
    }

    /// Sample `f(x, y)` at every cell center.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            let x = grid.coord(i);
            for j in 0..n {
                values.push(f(x, grid.coord(j)));
            }
        }
        Field2D { grid, values }
    }

    /// Wrap raw samples; fails if the count is not n^2 or any value is non-finite.
    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n * grid.n {
            return Err(Error::InvalidParameter {
                what: "field values",
                why: format!("expected {} samples, got {}", grid.n * grid.n, values.len()),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "field values",
                why: format!("non-finite sample {bad}"),
            });
        }
        Ok(Field2D { grid, values })
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n + j]
    }

    pub fn scaled(&self, s: f64) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Midpoint-rule quadrature of `f(u)` over the domain.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let cell = self.grid.cell_area();
        self.values.iter().map(|&v| f(v)).sum::<f64>() * cell
    }

    /// L^2 norm of the samples under cell quadrature.
    pub fn l2_norm(&self) -> f64 {
        self.integrate(|v| v * v).sqrt()
    }

    pub(crate) fn same_grid(&self, other: &Field2D) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid.n, other.grid.n));
        }
        Ok(())
    }
}

/// The three norm ingredients of the work space.
#[derive(Debug, Clone, Copy)]
pub struct NormPack {
    /// |grad u|_2^2
    pub grad_l2_sq: f64,
    /// |u|_p^p
    pub lp_norm_p: f64,
    /// ||u|| = sqrt(|grad u|_2^2 + |u|_p^2)
    pub e_norm: f64,
}

/// Quadrature of |grad u|^2 with staggered first differences and zero
/// extension at the boundary.
///
/// Each forward difference (u_{i+1} - u_i)/h approximates the derivative at
/// the midpoint between the two cells, so the summed square is a
/// second-order-accurate midpoint quadrature of the Dirichlet integral. The
/// compact 5-point Laplacian in [`crate::functional`] is the exact adjoint
/// of this form, which keeps energy/gradient pairs consistent to rounding.
pub fn gradient_sq_norm(u: &Field2D) -> f64 {
    let n = u.grid.n;
    let v = &u.values;
    let mut s = 0.0;
    // x-direction: differences across rows, plus the two zero-extension edges
    for j in 0..n {
        s += v[j] * v[j] + v[(n - 1) * n + j] * v[(n - 1) * n + j];
    }
    for i in 0..n - 1 {
        for j in 0..n {
            let d = v[(i + 1) * n + j] - v[i * n + j];
            s += d * d;
        }
    }
    // y-direction
    for i in 0..n {
        let row = &v[i * n..(i + 1) * n];
        s += row[0] * row[0] + row[n - 1] * row[n - 1];
        for j in 0..n - 1 {
            let d = row[j + 1] - row[j];
            s += d * d;
        }
    }
    // (d/h)^2 * h^2 = d^2: the spacing cancels
    s
}

/// (integral of |u|^p)^(1/p) by cell quadrature; requires 1 < p < 2.
pub fn lp_norm(u: &Field2D, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(lp_norm_p_unchecked(u, p).powf(1.0 / p))
}

/// integral of |u|^p; the exponent is not validated here.
pub(crate) fn lp_norm_p_unchecked(u: &Field2D, p: f64) -> f64 {
    u.integrate(|v| v.abs().powf(p))
}

/// L^s integral |u|_s^s for arbitrary s >= 1 (diagnostic use).
pub fn ls_integral(u: &Field2D, s: f64) -> f64 {
    u.integrate(|v| v.abs().powf(s))
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::POutOfRange(p));
    }
    Ok(())
}

/// Work-space norm ||u|| = sqrt(|grad u|_2^2 + |u|_p^2) with its parts.
pub fn e_norm(u: &Field2D, p: f64) -> Result<NormPack> {
    check_p(p)?;
    let grad_l2_sq = gradient_sq_norm(u);
    let lp_norm_p = lp_norm_p_unchecked(u, p);
    let e_norm = (grad_l2_sq + lp_norm_p.powf(2.0 / p)).sqrt();
    Ok(NormPack {
        grad_l2_sq,
        lp_norm_p,
        e_norm,
    })
}

/// Diagnostic ratio |u|_s^s / (|grad u|_2^(s-p) |u|_p^p) for s > p.
///
/// Invariant under both amplitude scaling and dilation; a finite sample of
/// the Gagliardo-Nirenberg constant on this profile.
pub fn gn_ratio(u: &Field2D, p: f64, s: f64) -> Result<f64> {
    check_p(p)?;
    if s <= p {
        return Err(Error::InvalidParameter {
            what: "s",
            why: format!("needs s > p, got s = {s}, p = {p}"),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let grad = gradient_sq_norm(u).sqrt();
    let lpp = lp_norm_p_unchecked(u, p);
    Ok(ls_integral(u, s) / (grad.powf(s - p) * lpp))
}

/// Fraction of the |u|^p mass carried by the outer 10% frame of the domain.
///
/// Large values (above ~1e-6) signal that the truncation of the plane to
/// [-L, L]^2 is biting; solvers surface this as a warning.
pub fn boundary_mass_fraction(u: &Field2D, p: f64) -> Result<f64> {
    check_p(p)?;
    let n = u.grid.n;
    let cut = 0.9 * u.grid.half_width;
    let mut outer = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        let x = u.grid.coord(i);
        for j in 0..n {
            let y = u.grid.coord(j);
            let m = u.at(i, j).abs().powf(p);
            total += m;
            if x.abs() > cut || y.abs() > cut {
                outer += m;
            }
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(outer / total)
}

/// Write a field in the dump format: header `# grid L=<L> n=<n>`, then one
/// value per line in scientific notation with 17 significant digits.
pub fn write_field_csv(u: &Field2D, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(u.values.len() * 26 + 64);
    writeln!(out, "# grid L={} n={}", u.grid.half_width, u.grid.n).expect("write to string");
    for v in &u.values {
        writeln!(out, "{v:.16e}").expect("write to string");
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Read a field written by [`write_field_csv`].
pub fn read_field_csv(path: &Path) -> Result<Field2D> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let bad = |why: String| Error::FieldFormat {
        path: path.display().to_string(),
        why,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let rest = header
        .strip_prefix("# grid L=")
        .ok_or_else(|| bad(format!("bad header {header:?}")))?;
    let (l_str, n_str) = rest
        .split_once(" n=")
        .ok_or_else(|| bad(format!("bad header {header:?}")))?;
    let half_width: f64 = l_str
        .trim()
        .parse()
        .map_err(|e| bad(format!("bad L: {e}")))?;
    let n: usize = n_str
        .trim()
        .parse()
        .map_err(|e| bad(format!("bad n: {e}")))?;
    let grid = Grid2D::new(half_width, n)?;
    let mut values = Vec::with_capacity(n * n);
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|e| bad(format!("line {}: {e}", k + 2)))?;
        values.push(v);
    }
    Field2D::from_values(grid, values)
}

/// The standard smooth positive seed e^{-|x - x0|^2 / 2}.
pub fn gaussian_seed(grid: Grid2D, center: (f64, f64)) -> Field2D {
    Field2D::from_fn(grid, |x, y| {
        let dx = x - center.0;
        let dy = y - center.1;
        (-(dx * dx + dy * dy) / 2.0).exp()
    })
}
