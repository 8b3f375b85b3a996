use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error};
use crate::params::{critical_exponent, NonlinearityModel, ProblemParams};

/// Parameter family in which existence is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `a = 0`, `μ = 0`
    MuZeroDegenerate,
    /// `a ≥ 0`, `μ = 0`
    MuZero,
    MuPositive,
    MuNegative,
}

impl Regime {
    /// The regime matching the signs of `a` and `μ`.
    pub fn infer(p: &ProblemParams) -> Regime {
        if p.mu > 0.0 {
            Regime::MuPositive
        } else if p.mu < 0.0 {
            Regime::MuNegative
        } else if p.a == 0.0 {
            Regime::MuZeroDegenerate
        } else {
            Regime::MuZero
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::MuZeroDegenerate => "mu_zero_degenerate",
            Regime::MuZero => "mu_zero",
            Regime::MuPositive => "mu_positive",
            Regime::MuNegative => "mu_negative",
        }
    }

    fn rows(&self) -> &'static [usize] {
        match self {
            Regime::MuZeroDegenerate => &[1, 2, 3, 4],
            Regime::MuZero => &[4],
            Regime::MuPositive => &[5],
            Regime::MuNegative => &[6, 7, 8, 9],
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "mu_zero_degenerate" => Ok(Regime::MuZeroDegenerate),
            "mu_zero" => Ok(Regime::MuZero),
            "mu_positive" => Ok(Regime::MuPositive),
            "mu_negative" => Ok(Regime::MuNegative),
            other => Err(invalid(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub pass: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub regime: Regime,
    /// Individual growth and weight conditions for the model family.
    pub conditions: Vec<AssumptionCheck>,
    /// One entry per applicable row of the regime table.
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    /// True when at least one applicable table row is satisfied.
    pub fn ok(&self) -> bool {
        self.checks.iter().any(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks
            .iter()
            .chain(self.conditions.iter())
            .find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.name, c.message))
            .collect()
    }
}

struct Conditions {
    h: bool,
    f1: bool,
    f2: bool,
    f3: bool,
    f4: bool,
    f5: bool,
    f6: bool,
    f7: bool,
    zeta: f64,
}

fn evaluate(p: &ProblemParams, q: f64) -> Conditions {
    let top = critical_exponent(p.beta);
    let zeta = 4.0_f64.max(critical_exponent(p.alpha2));
    Conditions {
        h: p.beta > -2.0,
        f1: q > 4.0,
        f2: q > 4.0 && q < top,
        f3: q > 4.0,
        // F(s)/|s|^{2*(β)-2} = |s|^{q-4-2β}/q diverges iff q > 4 + 2β
        f4: q > 4.0 + 2.0 * p.beta,
        f5: q > zeta && q < top,
        f6: q > zeta && q < top,
        f7: q > zeta,
        zeta,
    }
}

fn tick(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILS"
    }
}

/// Evaluates the growth conditions in closed form for `f(s) = |s|^{q-2}s`, `h = r^β`
/// and reports every table row belonging to `regime`. Never errors.
pub fn check_assumptions(
    p: &ProblemParams,
    nl: &NonlinearityModel,
    regime: Regime,
) -> AssumptionReport {
    let q = nl.q;
    let c = evaluate(p, q);
    let top = critical_exponent(p.beta);

    let cond = |name: &str, pass: bool, msg: String| AssumptionCheck {
        name: name.to_string(),
        pass,
        message: msg,
    };
    let conditions = vec![
        cond("h", c.h, format!("beta = {} must exceed -2", p.beta)),
        cond("f1", c.f1, format!("f(s) = o(|s|^3) at 0 needs q > 4 (q = {q})")),
        cond(
            "f2",
            c.f2,
            format!("tau = q must lie in (4, {top}) (q = {q})"),
        ),
        cond("f3", c.f3, format!("f(s)/|s|^3 increasing needs q > 4 (q = {q})")),
        cond(
            "f4",
            c.f4,
            format!("F(s)/|s|^(4+2beta) -> inf needs q > {} (q = {q})", 4.0 + 2.0 * p.beta),
        ),
        cond(
            "f5",
            c.f5,
            format!("needs q in ({}, {top}) with zeta = max(4, 6+2alpha2) (q = {q})", c.zeta),
        ),
        cond(
            "f6",
            c.f6,
            format!("tau = q must lie in ({}, {top}) (q = {q})", c.zeta),
        ),
        cond(
            "f7",
            c.f7,
            format!("f(s)/|s|^(zeta-1) nondecreasing needs q > {} (q = {q})", c.zeta),
        ),
    ];

    let f123 = c.f1 && c.f2 && c.f3;
    let f567 = c.f5 && c.f6 && c.f7;
    let two_two_beta = 2.0 * (2.0 + p.beta);
    let beta_small = p.beta > -1.0 && p.beta <= 0.0;
    let beta_big_tau_big = p.beta > 0.0 && q > two_two_beta;
    let beta_big_tau_small = p.beta > 0.0 && q <= two_two_beta;
    let a0 = p.a == 0.0;
    let a_ok = p.a >= 0.0;
    let lam = p.lambda > 0.0;
    let a1 = p.alpha1 > -1.0;
    let a2 = p.alpha2 > -1.0;
    let base = p.b > 0.0 && p.alpha1 > p.alpha2 && p.alpha2 > -2.0 && c.h;

    let row = |k: usize| -> AssumptionCheck {
        let (parts, note): (Vec<(&str, bool)>, &str) = match k {
            1 => (
                vec![("a=0", a0), ("mu=0", p.mu == 0.0), ("alpha1>-1", a1), ("f1-2-3", f123), ("-1<beta<=0", beta_small), ("lambda>0", lam)],
                "",
            ),
            2 => (
                vec![("a=0", a0), ("mu=0", p.mu == 0.0), ("alpha1>-1", a1), ("f1-2-3", f123), ("beta>0 & tau>2(2+beta)", beta_big_tau_big), ("lambda>0", lam)],
                "",
            ),
            3 => (
                vec![("a=0", a0), ("mu=0", p.mu == 0.0), ("alpha1>-1", a1), ("f1-2-3-4", f123 && c.f4), ("beta>0 & tau<=2(2+beta)", beta_big_tau_small), ("lambda>0", lam)],
                "; the pure power needs q > 4+2beta for f4, incompatible with tau = q <= 2(2+beta)",
            ),
            4 => (
                vec![("a>=0", a_ok), ("mu=0", p.mu == 0.0), ("alpha1>-1", a1), ("f1-2-3", f123), ("lambda>0", lam)],
                "; lambda must also exceed a non-constructive lambda*, checked empirically",
            ),
            5 => (
                vec![("a>=0", a_ok), ("mu>0", p.mu > 0.0), ("alpha2>-1", a2), ("f1-2-3", f123), ("lambda>0", lam)],
                "; lambda must also exceed a non-constructive lambda*, checked empirically",
            ),
            6 => (
                vec![("a=0", a0), ("mu<0", p.mu < 0.0), ("alpha1>-1", a1), ("f5-6-7", f567), ("-1<beta<=0", beta_small), ("lambda>0", lam)],
                "; mu must also exceed a non-constructive mu*",
            ),
            7 => (
                vec![("a=0", a0), ("mu<0", p.mu < 0.0), ("alpha1>-1", a1), ("f5-6-7", f567), ("beta>0 & tau>2(2+beta)", beta_big_tau_big), ("lambda>0", lam)],
                "; mu must also exceed a non-constructive mu*",
            ),
            8 => (
                vec![("a=0", a0), ("mu<0", p.mu < 0.0), ("alpha1>-1", a1), ("f4-5-6-7", f567 && c.f4), ("beta>0 & tau<=2(2+beta)", beta_big_tau_small), ("lambda>0", lam)],
                "; mu must also exceed a non-constructive mu*",
            ),
            9 => (
                vec![("a>=0", a_ok), ("mu<0", p.mu < 0.0), ("alpha1>-1", a1), ("f5-6-7", f567), ("lambda>0", lam)],
                "; lambda must also exceed a non-constructive bound, checked empirically",
            ),
            _ => unreachable!(),
        };
        let mut parts = parts;
        parts.push(("base: b>0, alpha1>alpha2>-2, beta>-2", base));
        let pass = parts.iter().all(|(_, ok)| *ok);
        let detail = parts
            .iter()
            .map(|(n, ok)| format!("{n} {}", tick(*ok)))
            .collect::<Vec<_>>()
            .join(", ");
        AssumptionCheck {
            name: format!("row{k}"),
            pass,
            message: format!("{detail}{note}"),
        }
    };

    AssumptionReport {
        regime,
        conditions,
        checks: regime.rows().iter().map(|&k| row(k)).collect(),
    }
}
