//! The lower-bound formulas themselves, plus the predicted rate exponents
//! per entropy regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-design floor from the global width: (W_hat - C/n)_+^2 / 64.
pub fn fixed_design_bound(w_hat: f64, n: usize, c: f64) -> f64 {
    let a = (w_hat - c / n as f64).max(0.0);
    a * a / 64.0
}

/// General fixed-design floor: max{ (W_hat(B_n(f0,1)) - C/n)_+^2 / 4, L_x^2 }.
pub fn general_fixed_bound(w_unit_ball: f64, l_x: f64, n: usize, c: f64) -> f64 {
    let a = (w_unit_ball - c / n as f64).max(0.0);
    (a * a / 4.0).max(l_x * l_x)
}

/// Random-design floor: c * min{ W^2, t_star^2 }.
pub fn random_design_bound(w: f64, t_star: f64, c: f64) -> f64 {
    c * (w * w).min(t_star * t_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Donsker,
    NonDonsker,
    Boundary,
}

/// Predicted log-log slopes for the risk and the minimal-error floor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentReport {
    pub alpha: f64,
    pub regime: Regime,
    /// risk exponent(s): a single value in the Donsker regime, the
    /// (lower, upper) window when non-Donsker
    pub risk_exponent: (f64, f64),
    /// fixed-design minimal-error floor exponent(s)
    pub floor_exponent: (f64, f64),
}

pub fn predicted_exponents(alpha: f64) -> Result<ExponentReport> {
    if alpha <= 0.0 {
        return Err(Error::contract("alpha must be > 0"));
    }
    let minimax = -2.0 / (2.0 + alpha);
    if (alpha - 2.0).abs() < 1e-12 {
        // boundary: report both regimes' content
        return Ok(ExponentReport {
            alpha,
            regime: Regime::Boundary,
            risk_exponent: (minimax, -1.0 / alpha),
            floor_exponent: (-1.0, -4.0 / (2.0 + alpha)),
        });
    }
    if alpha < 2.0 {
        Ok(ExponentReport {
            alpha,
            regime: Regime::Donsker,
            risk_exponent: (minimax, minimax),
            floor_exponent: (-1.0, -1.0),
        })
    } else {
        Ok(ExponentReport {
            alpha,
            regime: Regime::NonDonsker,
            // risk window n^{-2/(2+alpha)} .. n^{-1/alpha}
            risk_exponent: (minimax, -1.0 / alpha),
            // W(F)^2 window n^{-4/(2+alpha)} .. n^{-2/alpha}; the guaranteed
            // floor is the first
            floor_exponent: (-4.0 / (2.0 + alpha), -2.0 / alpha),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_design_formula_arithmetic() {
        let b = fixed_design_bound(0.8, 100, 1.0);
        assert!((b - 0.79 * 0.79 / 64.0).abs() < 1e-15);
        assert!((b - 0.009752).abs() < 1e-5);
        // clamp below zero
        assert_eq!(fixed_design_bound(0.005, 100, 1.0), 0.0);
        let b = fixed_design_bound((2.0 / std::f64::consts::PI).sqrt(), 64, 1.0);
        assert!((b - 0.009563).abs() < 1e-5, "{b}");
    }

    #[test]
    fn general_fixed_formula() {
        // l_x = 0 reduces to the first term
        let b = general_fixed_bound(0.4, 0.0, 100, 1.0);
        assert!((b - 0.39 * 0.39 / 4.0).abs() < 1e-15);
        // widths zero: 0
        assert_eq!(general_fixed_bound(0.0, 0.0, 10, 1.0), 0.0);
        // second term dominates
        let b = general_fixed_bound(0.4, 0.25, 100, 1.0);
        assert!((b - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn random_design_formula() {
        assert_eq!(random_design_bound(0.3, 0.0, 0.01), 0.0);
        let b = random_design_bound(0.3, 0.5, 0.01);
        assert!((b - 0.0009).abs() < 1e-15);
    }

    #[test]
    fn exponents_match_the_rate_table() {
        let e = predicted_exponents(1.0).unwrap();
        assert_eq!(e.regime, Regime::Donsker);
        assert!((e.risk_exponent.0 + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.floor_exponent, (-1.0, -1.0));
        let e = predicted_exponents(0.5).unwrap();
        assert!((e.risk_exponent.0 + 0.8).abs() < 1e-15);
        let e = predicted_exponents(3.0).unwrap();
        assert_eq!(e.regime, Regime::NonDonsker);
        assert!((e.floor_exponent.0 + 0.8).abs() < 1e-15);
        assert!(predicted_exponents(2.0).unwrap().regime == Regime::Boundary);
        assert!(predicted_exponents(0.0).is_err());
    }

    #[test]
    fn monotone_in_width_inputs() {
        // direct perturbation: each evaluator moves the way the formula says
        let b0 = fixed_design_bound(0.5, 64, 1.0);
        let b1 = fixed_design_bound(0.6, 64, 1.0);
        assert!(b1 > b0);
        let g0 = general_fixed_bound(0.5, 0.1, 64, 1.0);
        let g1 = general_fixed_bound(0.6, 0.1, 64, 1.0);
        assert!(g1 >= g0);
        let r0 = random_design_bound(0.2, 0.4, 0.01);
        let r1 = random_design_bound(0.3, 0.4, 0.01);
        assert!(r1 >= r0);
        // continuity of exponents within a regime across an alpha grid
        let mut prev = predicted_exponents(0.2).unwrap().risk_exponent.0;
        for i in 1..=17 {
            let a = 0.2 + i as f64 * 0.1;
            let e = predicted_exponents(a).unwrap().risk_exponent.0;
            assert!((e - prev).abs() < 0.05, "jump at alpha={a}");
            prev = e;
        }
    }
}
