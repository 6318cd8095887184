//! 1D radial grids and trapezoid quadrature for radially symmetric profiles.
//!
//! Nodes are uniform in (0, r_max]: r_i = i * dr for i = 1..=m. The origin is
//! deliberately excluded so kernels like h(r)/r stay finite at every node;
//! integrals over [0, r_1] close the gap with a triangle rule and a zero left
//! value, which is exact to second order for integrands vanishing at 0 (all
//! radial integrands here carry a factor r).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    m: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, m: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "r_max",
                why: format!("must be positive and finite, got {r_max}"),
            });
        }
        if m < 2 {
            return Err(Error::InvalidParameter {
                what: "radial node count",
                why: format!("must be at least 2, got {m}"),
            });
        }
        Ok(RadialGrid { r_max, m })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.m as f64
    }

    /// Node radius r_i, i in 1..=m (1-based to keep r > 0).
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn zeros(grid: RadialGrid) -> Self {
        RadialField {
            values: vec![0.0; grid.m],
            grid,
        }
    }

    /// Sample `f(r)` at every node.
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (1..=grid.m).map(|i| f(grid.node(i))).collect();
        RadialField { grid, values }
    }

    pub fn from_values(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m {
            return Err(Error::InvalidParameter {
                what: "radial values",
                why: format!("expected {} samples, got {}", grid.m, values.len()),
            });
        }
        Ok(RadialField { grid, values })
    }

    pub fn grid(&self) -> RadialGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Quadrature of `w(r_i, u_i)` over the disk: trapezoid on the nodes plus
    /// the closing triangle at the origin, all under the 2*pi*r measure.
    pub fn integrate_disk(&self, mut w: impl FnMut(f64, f64) -> f64) -> f64 {
        let dr = self.grid.spacing();
        let g: Vec<f64> = (0..self.grid.m)
            .map(|i| {
                let r = self.grid.node(i + 1);
                w(r, self.values[i]) * 2.0 * std::f64::consts::PI * r
            })
            .collect();
        let mut total = 0.5 * dr * g[0]; // [0, r_1] triangle, zero at the origin
        for i in 0..self.grid.m - 1 {
            total += 0.5 * dr * (g[i] + g[i + 1]);
        }
        total
    }

    /// Cumulative trapezoid of `w(r, u)` from the origin: out[i] holds the
    /// integral over [0, r_{i+1}] (plain dr measure, no angular factor).
    pub fn cumulative(&self, w: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let dr = self.grid.spacing();
        let g: Vec<f64> = (0..self.grid.m)
            .map(|i| w(self.grid.node(i + 1), self.values[i]))
            .collect();
        let mut out = Vec::with_capacity(self.grid.m);
        let mut acc = 0.5 * dr * g[0]; // zero left value at the origin
        out.push(acc);
        for i in 0..self.grid.m - 1 {
            acc += 0.5 * dr * (g[i] + g[i + 1]);
            out.push(acc);
        }
        out
    }

    /// Reverse cumulative trapezoid: out[i] holds the integral of `w` over
    /// [r_{i+1}, r_max]. Mass beyond r_max is dropped, so profiles must decay.
    pub fn cumulative_tail(&self, w: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let dr = self.grid.spacing();
        let m = self.grid.m;
        let g: Vec<f64> = (0..m)
            .map(|i| w(self.grid.node(i + 1), self.values[i]))
            .collect();
        let mut out = vec![0.0; m];
        let mut acc = 0.0;
        for i in (0..m - 1).rev() {
            acc += 0.5 * dr * (g[i] + g[i + 1]);
            out[i] = acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn nodes_strictly_positive_increasing() {
        let g = RadialGrid::new(8.0, 100).unwrap();
        assert!(g.node(1) > 0.0);
        for i in 1..100 {
            assert!(g.node(i + 1) > g.node(i));
        }
        assert_eq!(g.node(100), 8.0);
    }

    #[test]
    fn disk_integral_of_gaussian() {
        // integral e^{-r^2} over the plane = pi
        let g = RadialGrid::new(10.0, 4000).unwrap();
        let u = RadialField::from_fn(g, |r| (-r * r / 2.0).exp());
        let v = u.integrate_disk(|_, s| s * s);
        assert!((v - PI).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn cumulative_matches_closed_form() {
        // int_0^r (s/2) e^{-s^2} ds = (1 - e^{-r^2})/4
        let g = RadialGrid::new(8.0, 16000).unwrap();
        let u = RadialField::from_fn(g, |r| (-r * r / 2.0).exp());
        let h = u.cumulative(|r, s| 0.5 * r * s * s);
        let i_at = |r: f64| ((r / g.spacing()).round() as usize) - 1;
        for r in [0.5f64, 1.0, 2.0, 4.0] {
            let exact = (1.0 - (-r * r).exp()) / 4.0;
            let got = h[i_at(r)];
            assert!((got - exact).abs() < 1e-6, "h({r}) = {got}, want {exact}");
        }
    }

    #[test]
    fn tail_plus_head_is_total() {
        let g = RadialGrid::new(5.0, 1000).unwrap();
        let u = RadialField::from_fn(g, |r| (-r).exp());
        let head = u.cumulative(|r, s| r * s);
        let tail = u.cumulative_tail(|r, s| r * s);
        let total = head.last().unwrap();
        for i in (0..1000).step_by(97) {
            let sum = head[i] + tail[i];
            assert!((sum - total).abs() < 1e-12 * total.abs().max(1.0));
        }
    }
}
