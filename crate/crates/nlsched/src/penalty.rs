//! The penalty function `f(t) = t^beta` and the comparison ratios derived
//! from it. Everything downstream (cost evaluation, dominance tests, search
//! bounds) goes through [`PenaltyFn::eval`] so that all components see the
//! exact same floating-point values.

use crate::{Error, Result};

/// Power-law penalty `f(t) = t^beta`, `beta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyFn {
    beta: f64,
}

impl PenaltyFn {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(PenaltyFn { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `t^beta` for `t >= 0`. The integer exponents hit in practice get
    /// exact fast paths; this matters because fixture costs like 269.5 are
    /// asserted exactly.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "penalty evaluated at negative time {t}");
        if self.beta == 1.0 {
            t
        } else if self.beta == 2.0 {
            t * t
        } else {
            t.powf(self.beta)
        }
    }

    /// [`eval`](Self::eval) with the domain check surfaced as an error.
    pub fn try_eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::DomainError(format!(
                "penalty domain is t >= 0, got {t}"
            )));
        }
        Ok(self.eval(t))
    }

    /// `f'(t) = beta * t^(beta-1)`.
    pub fn deriv(&self, t: f64) -> f64 {
        self.beta * t.powf(self.beta - 1.0)
    }

    /// `f''(t) = beta * (beta-1) * t^(beta-2)`.
    pub fn second_deriv(&self, t: f64) -> f64 {
        self.beta * (self.beta - 1.0) * t.powf(self.beta - 2.0)
    }

    /// The adjacent-exchange ratio
    /// `phi_ij(t) = (f(t+p_i+p_j) - f(t+p_j)) / (f(t+p_i+p_j) - f(t+p_i))`.
    ///
    /// Starting two adjacent jobs i, j at time t, i-first is no worse than
    /// j-first exactly when `w_i / w_j >= phi_ij(t)`. Strictly positive
    /// denominator since p_j > 0 and f is strictly increasing.
    #[inline]
    pub fn phi(&self, p_i: f64, p_j: f64, t: f64) -> f64 {
        let both = self.eval(t + p_i + p_j);
        (both - self.eval(t + p_j)) / (both - self.eval(t + p_i))
    }

    /// `q(t) = (f(t+p_j) - f(t)) / (f(t+p_i) - f(t))` for `p_i > p_j`.
    /// Monotone in t: increasing for beta > 1, decreasing for beta < 1.
    pub fn q_ratio(&self, p_i: f64, p_j: f64, t: f64) -> f64 {
        debug_assert!(p_i > p_j);
        let ft = self.eval(t);
        (self.eval(t + p_j) - ft) / (self.eval(t + p_i) - ft)
    }

    /// `g(x) = x * (f(b+x) - f(a+x)) / (f(b+x) - f(b))` for `0 <= a < b`,
    /// `x > 0`. Non-decreasing in x when beta > 1.
    pub fn g_func(&self, a: f64, b: f64, x: f64) -> f64 {
        debug_assert!(0.0 <= a && a < b && x > 0.0);
        let fbx = self.eval(b + x);
        x * (fbx - self.eval(a + x)) / (fbx - self.eval(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_closed_forms() {
        let f = PenaltyFn::new(2.0).unwrap();
        assert_eq!(f.eval(13.0), 169.0);
        assert_eq!(f.eval(0.0), 0.0);
        let half = PenaltyFn::new(0.5).unwrap();
        assert_eq!(half.eval(4.0), 2.0);
    }

    #[test]
    fn eval_rejects_negative_time() {
        let f = PenaltyFn::new(2.0).unwrap();
        assert!(matches!(f.try_eval(-1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn beta_must_be_positive_and_finite() {
        assert!(PenaltyFn::new(0.0).is_err());
        assert!(PenaltyFn::new(-1.0).is_err());
        assert!(PenaltyFn::new(f64::NAN).is_err());
        assert!(PenaltyFn::new(f64::INFINITY).is_err());
    }

    #[test]
    fn phi_on_small_squares() {
        // f = t^2, p_i = 4, p_j = 8 at t = 0:
        // (f(12) - f(8)) / (f(12) - f(4)) = 80/128; swapped roles give 1.6.
        let f = PenaltyFn::new(2.0).unwrap();
        assert!((f.phi(8.0, 4.0, 0.0) - 1.6).abs() < 1e-12);
        assert!((f.phi(4.0, 8.0, 0.0) - 0.625).abs() < 1e-12);
    }

    #[test]
    fn phi_equal_lengths_is_one() {
        for &beta in &[0.5, 1.0, 2.0, 3.2] {
            let f = PenaltyFn::new(beta).unwrap();
            for &t in &[0.0, 1.0, 17.5] {
                assert!((f.phi(5.0, 5.0, t) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_approaches_length_ratio() {
        let f = PenaltyFn::new(2.0).unwrap();
        assert!((f.phi(2.0, 1.0, 1e6) - 2.0).abs() < 1e-4);
    }

    #[test]
    fn q_ratio_at_zero() {
        let f = PenaltyFn::new(2.0).unwrap();
        assert!((f.q_ratio(2.0, 1.0, 0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn g_func_unit_case() {
        let f = PenaltyFn::new(2.0).unwrap();
        assert!((f.g_func(0.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for &beta in &[0.5, 1.1, 2.0, 3.2] {
            let f = PenaltyFn::new(beta).unwrap();
            for &t in &[0.5, 1.0, 7.0, 40.0] {
                let fd1 = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
                assert!(
                    (f.deriv(t) - fd1).abs() <= 1e-4 * f.deriv(t).abs(),
                    "f' mismatch at beta={beta} t={t}"
                );
                // Differencing f itself twice at h=1e-6 drowns in roundoff,
                // so f'' is checked against the first difference of f'.
                let fd2 = (f.deriv(t + h) - f.deriv(t - h)) / (2.0 * h);
                let exact = f.second_deriv(t);
                let scale = exact.abs().max(1.0);
                assert!(
                    (exact - fd2).abs() <= 1e-4 * scale,
                    "f'' mismatch at beta={beta} t={t}: {exact} vs {fd2}"
                );
            }
        }
    }
}
