//! Quartic and quintic boundary-value profiles.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Polynomial `p(t) = sum c_i t^i` valid on `[0, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialProfile {
    /// Ascending-order coefficients; 5 for a quartic, 6 for a quintic.
    pub coeffs: Vec<f64>,
    pub t_end: f64,
}

impl PolynomialProfile {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `order`-th derivative at `t` (no range check).
    pub fn derivative(&self, t: f64, order: usize) -> f64 {
        let mut acc = 0.0;
        for i in (order..self.coeffs.len()).rev() {
            let mut factor = 1.0;
            for j in 0..order {
                factor *= (i - j) as f64;
            }
            acc = acc * t + factor * self.coeffs[i];
        }
        // Horner above accumulated powers t^(i - order)
        acc
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// Position, rate and acceleration at `t`. Past `t_end` the profile
    /// continues at its terminal rate with zero acceleration.
    pub fn state_at(&self, t: f64) -> [f64; 3] {
        if t <= self.t_end {
            [self.eval(t), self.derivative(t, 1), self.derivative(t, 2)]
        } else {
            let p = self.eval(self.t_end);
            let v = self.derivative(self.t_end, 1);
            [p + v * (t - self.t_end), v, 0.0]
        }
    }

    /// Sensitivity of the coefficients to the boundary conditions is linear;
    /// this returns `d p(t) / d c_i` for each coefficient.
    pub fn basis(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut p = 1.0;
        for _ in 0..self.coeffs.len() {
            out.push(p);
            p *= t;
        }
        out
    }
}

fn check_horizon(t1: f64) -> Result<()> {
    if !(t1 > 0.0) || !t1.is_finite() {
        return Err(invalid(format!("profile duration must be > 0, got {t1}")));
    }
    Ok(())
}

/// Row of the boundary-condition matrix: `order`-th derivative of each
/// monomial evaluated at `t`.
fn condition_row(degree: usize, t: f64, order: usize) -> Vec<f64> {
    (0..=degree)
        .map(|i| {
            if i < order {
                return 0.0;
            }
            let mut factor = 1.0;
            for j in 0..order {
                factor *= (i - j) as f64;
            }
            factor * t.powi((i - order) as i32)
        })
        .collect()
}

fn solve(rows: Vec<Vec<f64>>, rhs: Vec<f64>, t1: f64) -> Result<PolynomialProfile> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    let b = DVector::from_vec(rhs);
    let x = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidInput("singular boundary-condition system".into()))?;
    Ok(PolynomialProfile { coeffs: x.iter().copied().collect(), t_end: t1 })
}

/// Quartic matching position, rate and acceleration at `t = 0` and rate and
/// acceleration at `t = t1`; the terminal position is left free.
pub fn fit_quartic(s0: f64, ds0: f64, dds0: f64, ds1: f64, dds1: f64, t1: f64) -> Result<PolynomialProfile> {
    check_horizon(t1)?;
    let rows = vec![
        condition_row(4, 0.0, 0),
        condition_row(4, 0.0, 1),
        condition_row(4, 0.0, 2),
        condition_row(4, t1, 1),
        condition_row(4, t1, 2),
    ];
    solve(rows, vec![s0, ds0, dds0, ds1, dds1], t1)
}

/// Quintic matching position, rate and acceleration at both ends.
pub fn fit_quintic(start: [f64; 3], end: [f64; 3], t1: f64) -> Result<PolynomialProfile> {
    check_horizon(t1)?;
    let rows = vec![
        condition_row(5, 0.0, 0),
        condition_row(5, 0.0, 1),
        condition_row(5, 0.0, 2),
        condition_row(5, t1, 0),
        condition_row(5, t1, 1),
        condition_row(5, t1, 2),
    ];
    solve(rows, vec![start[0], start[1], start[2], end[0], end[1], end[2]], t1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_speed_quartic() {
        let p = fit_quartic(0.0, 10.0, 0.0, 10.0, 0.0, 3.0).unwrap();
        for t in [0.0, 0.7, 1.5, 3.0] {
            assert!((p.eval(t) - 10.0 * t).abs() < 1e-9);
        }
    }

    #[test]
    fn rest_gives_zero_polynomials() {
        let p = fit_quartic(0.0, 0.0, 0.0, 0.0, 0.0, 3.0).unwrap();
        assert!(p.coeffs.iter().all(|c| c.abs() < 1e-12));
        let q = fit_quintic([0.0; 3], [0.0; 3], 3.0).unwrap();
        assert!(q.coeffs.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn stopping_quintic_hits_end_state() {
        let p = fit_quintic([0.0, 10.0, 0.0], [15.0, 0.0, 0.0], 3.0).unwrap();
        assert!((p.eval(3.0) - 15.0).abs() < 1e-9);
        assert!(p.derivative(3.0, 1).abs() < 1e-9);
        assert!(p.derivative(3.0, 2).abs() < 1e-9);
    }

    #[test]
    fn lateral_offset_decays_to_zero() {
        let p = fit_quintic([1.0, 0.0, 0.0], [0.0, 0.0, 0.0], 30.0).unwrap();
        assert!((p.eval(0.0) - 1.0).abs() < 1e-12);
        assert!(p.eval(30.0).abs() < 1e-9);
        let mut prev = p.eval(0.0);
        for i in 1..=300 {
            let v = p.eval(i as f64 * 0.1);
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn rejects_non_positive_horizon() {
        assert!(fit_quartic(0.0, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(fit_quintic([0.0; 3], [1.0, 0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn extension_holds_terminal_rate() {
        let p = fit_quintic([0.0, 10.0, 0.0], [15.0, 0.0, 0.0], 3.0).unwrap();
        let s = p.state_at(4.0);
        assert!((s[0] - 15.0).abs() < 1e-9 && s[1].abs() < 1e-9);
    }
}
