use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Scalars of the problem
/// `-(a + b‖u‖²)Δu = |x|^{α₁}|u|^{4+2α₁}u + μ|x|^{α₂}|u|^{4+2α₂}u + λ h(|x|) f(u)`
/// with `h(r) = r^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl ProblemParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("a", self.a),
            ("b", self.b),
            ("mu", self.mu),
            ("lambda", self.lambda),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta", self.beta),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        if self.a < 0.0 {
            return Err(invalid("a must be >= 0"));
        }
        if self.b <= 0.0 {
            return Err(invalid("b must be > 0"));
        }
        if self.lambda < 0.0 {
            return Err(invalid("lambda must be >= 0"));
        }
        if self.alpha2 <= -2.0 {
            return Err(invalid("alpha2 must exceed -2"));
        }
        if self.alpha1 <= self.alpha2 {
            return Err(invalid("alpha1 must exceed alpha2"));
        }
        if self.beta <= -2.0 {
            return Err(invalid("beta must exceed -2"));
        }
        Ok(())
    }

    /// Critical exponent `2*(α₁) = 6 + 2α₁`.
    pub fn p1(&self) -> f64 {
        critical_exponent(self.alpha1)
    }

    /// Critical exponent `2*(α₂) = 6 + 2α₂`.
    pub fn p2(&self) -> f64 {
        critical_exponent(self.alpha2)
    }
}

/// `2*(α) = 6 + 2α`, the weighted critical exponent in dimension three.
pub fn critical_exponent(alpha: f64) -> f64 {
    6.0 + 2.0 * alpha
}

/// Model perturbation `f(s) = |s|^{q-2}s`, `F(s) = |s|^q / q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityModel {
    pub q: f64,
}

impl NonlinearityModel {
    pub fn new(q: f64) -> Result<Self> {
        let m = NonlinearityModel { q };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 4.0) || !self.q.is_finite() {
            return Err(invalid(format!("q must exceed 4, got {}", self.q)));
        }
        Ok(())
    }

    /// Checks `q < 6 + 2β` against the weight exponent of `h`.
    pub fn validate_against(&self, params: &ProblemParams) -> Result<()> {
        self.validate()?;
        let top = critical_exponent(params.beta);
        if self.q >= top {
            return Err(invalid(format!(
                "q must be below 6 + 2 beta = {top}, got {}",
                self.q
            )));
        }
        Ok(())
    }

    pub fn f(&self, s: f64) -> f64 {
        s.abs().powf(self.q - 2.0) * s
    }

    #[allow(non_snake_case)]
    pub fn F(&self, s: f64) -> f64 {
        s.abs().powf(self.q) / self.q
    }
}
