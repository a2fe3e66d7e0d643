//! Slopes and perturbation reports for the expanded H form.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::indices::{ExpandedInputs, ExpandedTerm};

/// Exact derivative of `0.246u + 0.017u³`.
pub fn dh_du(u: f64) -> f64 {
    0.246 + 0.051 * u * u
}

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
pub fn finite_difference<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", format!("must be positive, got {step}")));
    }
    let hi = f(x + step);
    let lo = f(x - step);
    if !(hi.is_finite() && lo.is_finite()) {
        return Err(Error::NotEvaluable(x));
    }
    Ok((hi - lo) / (2.0 * step))
}

/// An input of the expanded H form that can be perturbed. The cubic term
/// follows `u` and is not a variable of its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HTerm(ExpandedTerm);

impl HTerm {
    pub const NAMES: [&'static str; 8] =
        ["u", "p", "delta_p3", "t", "delta_t", "dv", "delta_t24", "tr"];

    pub fn all() -> impl Iterator<Item = HTerm> {
        ExpandedTerm::ALL
            .into_iter()
            .filter(|t| *t != ExpandedTerm::UCubed)
            .map(HTerm)
    }

    pub fn term(self) -> ExpandedTerm {
        self.0
    }

    pub fn name(self) -> &'static str {
        self.0.name()
    }

    /// ∂H/∂x at `inputs`.
    pub fn analytic_slope(self, inputs: &ExpandedInputs) -> f64 {
        match self.0 {
            ExpandedTerm::U => dh_du(inputs.u),
            t => t.coefficient(),
        }
    }
}

impl FromStr for HTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let want = s.trim().to_ascii_lowercase();
        HTerm::all()
            .find(|t| t.name() == want)
            .ok_or_else(|| Error::UnknownVariable {
                name: s.to_string(),
                valid: HTerm::NAMES.to_vec(),
            })
    }
}

fn with_value(inputs: &ExpandedInputs, var: HTerm, value: f64) -> ExpandedInputs {
    let mut out = *inputs;
    if let Some(slot) = out.term_mut(var.term()) {
        *slot = value;
    }
    out
}

fn exact_delta(inputs: &ExpandedInputs, var: HTerm, relative_delta: f64) -> f64 {
    let base = inputs.term(var.term());
    with_value(inputs, var, base * (1.0 + relative_delta)).evaluate() - inputs.evaluate()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub variable: &'static str,
    pub base_value: f64,
    pub relative_delta: f64,
    pub analytic_slope: f64,
    pub fd_slope: f64,
    /// Exact ΔH from two evaluations.
    pub delta_h: f64,
    /// Linear-coefficient-only estimate `c · Δx`, dropping higher-order terms.
    pub first_order_approx: f64,
    pub delta_h_at_10pct: f64,
    /// Variable whose 10% change moves H the most at these inputs.
    pub dominant_term: &'static str,
}

/// Perturbs `var` by `relative_delta · base` and reports slopes and ΔH.
pub fn perturb_h(inputs: &ExpandedInputs, var: HTerm, relative_delta: f64) -> Result<SensitivityReport> {
    if !(relative_delta >= 0.0 && relative_delta.is_finite()) {
        return Err(invalid(
            "relative_delta",
            format!("must be finite and non-negative, got {relative_delta}"),
        ));
    }
    let base = inputs.term(var.term());
    let step = 1e-6 * base.abs().max(1.0);
    let fd_slope = finite_difference(|x| with_value(inputs, var, x).evaluate(), base, step)?;
    let dominant_term = HTerm::all()
        .map(|t| (t, exact_delta(inputs, t, 0.1).abs()))
        .fold(None::<(HTerm, f64)>, |best, (t, d)| match best {
            Some((_, bd)) if bd >= d => best,
            _ => Some((t, d)),
        })
        .map(|(t, _)| t.name())
        .unwrap_or("u");
    Ok(SensitivityReport {
        variable: var.name(),
        base_value: base,
        relative_delta,
        analytic_slope: var.analytic_slope(inputs),
        fd_slope,
        delta_h: exact_delta(inputs, var, relative_delta),
        first_order_approx: var.term().coefficient() * base * relative_delta,
        delta_h_at_10pct: exact_delta(inputs, var, 0.1),
        dominant_term,
    })
}
