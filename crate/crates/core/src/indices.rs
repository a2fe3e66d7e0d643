//! The three weighted composite indices and their threshold classification.
//!
//! - EI, the ecosystem status index, from forest and climate statistics.
//! - H, sandstorm risk, in a five-indicator weighted form and a nine-term
//!   expanded form with a cubic wind term.
//! - EH, the ecological hazard index: expanded H plus pollution and biota terms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pipeline::{DerivedFeatures, Offsets};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EiInputs {
    /// Mechanical-forestry area score.
    pub fc: f64,
    /// Forest cover ratio.
    pub fr: f64,
    /// Total stock.
    pub s: f64,
    /// Average annual high-wind days.
    pub d: f64,
    /// Frost-free period, days.
    pub df: f64,
    /// Average annual precipitation. Also accepted as `ef`.
    #[serde(alias = "ef")]
    pub rf: f64,
}

impl EiInputs {
    pub fn validate(&self) -> Result<()> {
        let all = [self.fc, self.fr, self.s, self.d, self.df, self.rf];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(invalid("ei inputs", "all inputs must be finite"));
        }
        for (name, v) in [("d", self.d), ("df", self.df)] {
            if !(0.0..=366.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    name: if name == "d" { "D" } else { "DF" },
                    reason: format!("{v} is outside [0, 366] days"),
                });
            }
        }
        Ok(())
    }
}

/// `62.42 FC + 15.12 FR + 4.51 S + 5.24 D/365 + 3.04 DF/365 + 3.02 RF`.
pub fn compute_ei(x: &EiInputs) -> f64 {
    62.42 * x.fc + 15.12 * x.fr + 4.51 * x.s + 5.24 * x.d / 365.0 + 3.04 * x.df / 365.0
        + 3.02 * x.rf
}

/// Area-speciated score `aio * weight * area / base_area`.
///
/// The forest-coverage score `A1 * Fc / sq` is this with `weight = A1`
/// and `base_area = sq`.
pub fn speciate_area_score(aio: f64, weight: f64, area: f64, base_area: f64) -> Result<f64> {
    if base_area.is_nan() || base_area <= 0.0 {
        return Err(Error::InvalidBaseArea(base_area));
    }
    Ok(aio * weight * area / base_area)
}

/// Weights on (DV, U, ΔT, TR, P).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HWeights(pub [f64; 5]);

impl HWeights {
    pub const ORDER: [&'static str; 5] = ["DV", "U", "dT", "TR", "P"];
    /// Sum tolerance; the default weights sum to 1.001.
    pub const SUM_TOLERANCE: f64 = 0.01;

    pub fn new(w: [f64; 5]) -> Result<Self> {
        let w = HWeights(w);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("weights", "entries must be finite and non-negative"));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(invalid("weights", format!("sum {sum} is not within 0.01 of 1")));
        }
        Ok(())
    }

    pub fn as_map(&self) -> BTreeMap<String, f64> {
        Self::ORDER
            .iter()
            .zip(self.0)
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }
}

impl Default for HWeights {
    fn default() -> Self {
        HWeights([0.159, 0.403, 0.088, 0.077, 0.274])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HInputs {
    pub dv: f64,
    pub u: f64,
    pub delta_t: f64,
    pub tr: f64,
    pub p: f64,
    #[serde(default)]
    pub weights: HWeights,
}

impl HInputs {
    /// Sub-indicators of one period from its derived features:
    /// `DV = dv + x1`, `U = u + x2`, `ΔT = cooling` (already carries x3),
    /// `TR = tr + x4`, `P = p` (already carries x4).
    pub fn from_features(f: &DerivedFeatures, x: &Offsets, weights: HWeights) -> Result<Self> {
        let mut missing = Vec::new();
        let mut need = |v: Option<f64>, name: &'static str| {
            if v.is_none() {
                missing.push(name);
            }
            v.unwrap_or(0.0)
        };
        let dv = need(f.dv, "dv");
        let u = need(f.u, "u");
        let delta_t = need(f.cooling, "delta_t");
        let tr = need(f.tr, "tr");
        let p = need(f.p, "p");
        if !missing.is_empty() {
            return Err(Error::IncompleteBundle(missing));
        }
        Ok(Self {
            dv: dv + x.x1,
            u: u + x.x2,
            delta_t,
            tr: tr + x.x4,
            p,
            weights,
        })
    }

    fn values(&self) -> [f64; 5] {
        [self.dv, self.u, self.delta_t, self.tr, self.p]
    }
}

pub fn compute_h(x: &HInputs) -> f64 {
    x.values().iter().zip(x.weights.0).map(|(v, w)| v * w).sum()
}

/// Coefficients of the expanded H form, in [`ExpandedTerm`] order.
pub const H_EXPANDED_COEFFICIENTS: [f64; 9] =
    [0.246, 0.2, 0.04, 0.051, 0.148, 0.208, 0.019, 0.072, 0.017];

/// Terms of the expanded H form. The cubic term is always `u³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpandedTerm {
    U,
    P,
    DeltaP3,
    T,
    DeltaT,
    Dv,
    DeltaT24,
    Tr,
    UCubed,
}

impl ExpandedTerm {
    pub const ALL: [ExpandedTerm; 9] = [
        ExpandedTerm::U,
        ExpandedTerm::P,
        ExpandedTerm::DeltaP3,
        ExpandedTerm::T,
        ExpandedTerm::DeltaT,
        ExpandedTerm::Dv,
        ExpandedTerm::DeltaT24,
        ExpandedTerm::Tr,
        ExpandedTerm::UCubed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExpandedTerm::U => "u",
            ExpandedTerm::P => "p",
            ExpandedTerm::DeltaP3 => "delta_p3",
            ExpandedTerm::T => "t",
            ExpandedTerm::DeltaT => "delta_t",
            ExpandedTerm::Dv => "dv",
            ExpandedTerm::DeltaT24 => "delta_t24",
            ExpandedTerm::Tr => "tr",
            ExpandedTerm::UCubed => "u_cubed",
        }
    }

    pub fn coefficient(self) -> f64 {
        H_EXPANDED_COEFFICIENTS[self as usize]
    }
}

impl fmt::Display for ExpandedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs of the expanded H form with every term present.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandedInputs {
    pub u: f64,
    pub p: f64,
    pub delta_p3: f64,
    pub t: f64,
    pub delta_t: f64,
    pub dv: f64,
    pub delta_t24: f64,
    pub tr: f64,
}

impl ExpandedInputs {
    /// Value of `term`; `u_cubed` is derived from `u`.
    pub fn term(&self, term: ExpandedTerm) -> f64 {
        match term {
            ExpandedTerm::U => self.u,
            ExpandedTerm::P => self.p,
            ExpandedTerm::DeltaP3 => self.delta_p3,
            ExpandedTerm::T => self.t,
            ExpandedTerm::DeltaT => self.delta_t,
            ExpandedTerm::Dv => self.dv,
            ExpandedTerm::DeltaT24 => self.delta_t24,
            ExpandedTerm::Tr => self.tr,
            ExpandedTerm::UCubed => self.u * self.u * self.u,
        }
    }

    pub fn term_mut(&mut self, term: ExpandedTerm) -> Option<&mut f64> {
        Some(match term {
            ExpandedTerm::U => &mut self.u,
            ExpandedTerm::P => &mut self.p,
            ExpandedTerm::DeltaP3 => &mut self.delta_p3,
            ExpandedTerm::T => &mut self.t,
            ExpandedTerm::DeltaT => &mut self.delta_t,
            ExpandedTerm::Dv => &mut self.dv,
            ExpandedTerm::DeltaT24 => &mut self.delta_t24,
            ExpandedTerm::Tr => &mut self.tr,
            ExpandedTerm::UCubed => return None,
        })
    }

    pub fn evaluate(&self) -> f64 {
        ExpandedTerm::ALL
            .iter()
            .map(|t| t.coefficient() * self.term(*t))
            .sum()
    }
}

/// Expanded-H terms where any may be missing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureBundle {
    pub u: Option<f64>,
    pub p: Option<f64>,
    pub delta_p3: Option<f64>,
    pub t: Option<f64>,
    pub delta_t: Option<f64>,
    pub dv: Option<f64>,
    pub delta_t24: Option<f64>,
    pub tr: Option<f64>,
}

impl FeatureBundle {
    /// Maps daily features onto the expanded form: ΔP₃ is the day-over-day
    /// sea-level-pressure change and Δt is the cooling index.
    pub fn from_features(f: &DerivedFeatures) -> Self {
        Self {
            u: f.u,
            p: f.p,
            delta_p3: f.delta_slp,
            t: f.t,
            delta_t: f.cooling,
            dv: f.dv,
            delta_t24: f.delta_t24,
            tr: f.tr,
        }
    }

    pub fn complete(&self) -> Result<ExpandedInputs> {
        let fields = [
            ("u", self.u),
            ("p", self.p),
            ("delta_p3", self.delta_p3),
            ("t", self.t),
            ("delta_t", self.delta_t),
            ("dv", self.dv),
            ("delta_t24", self.delta_t24),
            ("tr", self.tr),
        ];
        let missing: Vec<&'static str> = fields
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| *n)
            .collect();
        if !missing.is_empty() {
            return Err(Error::IncompleteBundle(missing));
        }
        let v = |x: Option<f64>| x.unwrap_or_default();
        Ok(ExpandedInputs {
            u: v(self.u),
            p: v(self.p),
            delta_p3: v(self.delta_p3),
            t: v(self.t),
            delta_t: v(self.delta_t),
            dv: v(self.dv),
            delta_t24: v(self.delta_t24),
            tr: v(self.tr),
        })
    }
}

/// `0.246u + 0.2p + 0.04ΔP₃ + 0.051t + 0.148Δt + 0.208dv + 0.019Δt₂₄ + 0.072tr + 0.017u³`.
pub fn compute_h_expanded(bundle: &FeatureBundle) -> Result<f64> {
    Ok(bundle.complete()?.evaluate())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EhInputs {
    pub u: f64,
    pub p: f64,
    pub delta_p3: f64,
    pub t: f64,
    pub delta_t: f64,
    pub dv: f64,
    pub delta_t24: f64,
    pub tr: f64,
    pub u_cubed: f64,
    pub pm25: f64,
    pub nox: f64,
    /// Number of animal species.
    pub na: f64,
    /// Number of microorganism species.
    pub nm: f64,
    /// Number of plant species.
    pub np: f64,
}

impl EhInputs {
    pub const NAMES: [&'static str; 14] = [
        "u", "p", "delta_p3", "t", "delta_t", "dv", "delta_t24", "tr", "u_cubed", "pm25", "nox",
        "na", "nm", "np",
    ];

    pub fn values(&self) -> [f64; 14] {
        [
            self.u,
            self.p,
            self.delta_p3,
            self.t,
            self.delta_t,
            self.dv,
            self.delta_t24,
            self.tr,
            self.u_cubed,
            self.pm25,
            self.nox,
            self.na,
            self.nm,
            self.np,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if !self.values().iter().all(|v| v.is_finite()) {
            return Err(invalid("eh inputs", "all inputs must be finite"));
        }
        if self.na < 0.0 || self.nm < 0.0 || self.np < 0.0 {
            return Err(invalid("eh inputs", "species counts must be non-negative"));
        }
        Ok(())
    }
}

/// Expanded H plus `0.003(pm2.5 + NOx) + 0.12 NA + 0.03 NM + 0.14 NP`.
pub fn compute_eh(x: &EhInputs) -> f64 {
    0.246 * x.u
        + 0.2 * x.p
        + 0.04 * x.delta_p3
        + 0.051 * x.t
        + 0.148 * x.delta_t
        + 0.208 * x.dv
        + 0.019 * x.delta_t24
        + 0.072 * x.tr
        + 0.017 * x.u_cubed
        + 0.003 * (x.pm25 + x.nox)
        + 0.12 * x.na
        + 0.03 * x.nm
        + 0.14 * x.np
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherIsWorse,
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    BelowWarning,
    AboveWarning,
    Outstanding,
    NotOutstanding,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::BelowWarning => "below_warning",
            Band::AboveWarning => "above_warning",
            Band::Outstanding => "outstanding",
            Band::NotOutstanding => "not_outstanding",
        }
    }

    pub fn exceeds(self) -> bool {
        matches!(self, Band::AboveWarning | Band::Outstanding)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub score: f64,
    pub band: Band,
    pub threshold: f64,
}

/// Bands `score` against `threshold`. A tie does not exceed.
pub fn classify(score: f64, threshold: f64, direction: Direction) -> Classification {
    let exceeds = score > threshold;
    let band = match (direction, exceeds) {
        (Direction::HigherIsWorse, true) => Band::AboveWarning,
        (Direction::HigherIsWorse, false) => Band::BelowWarning,
        (Direction::HigherIsBetter, true) => Band::Outstanding,
        (Direction::HigherIsBetter, false) => Band::NotOutstanding,
    };
    Classification {
        score,
        band,
        threshold,
    }
}

/// Warning line for hazard-style indices.
pub const WARNING_THRESHOLD: f64 = 20.0;
/// Score above which a reserve counts as outstanding.
pub const OUTSTANDING_THRESHOLD: f64 = 48.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Ei,
    H,
    HExpanded,
    Eh,
}

impl IndexKind {
    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Ei => "EI",
            IndexKind::H => "H",
            IndexKind::HExpanded => "H_expanded",
            IndexKind::Eh => "EH",
        }
    }

    /// Formula identifier recorded with every emitted score.
    pub fn formula(self) -> &'static str {
        match self {
            IndexKind::Ei => "EI = 62.42FC + 15.12FR + 4.51S + 5.24D/365 + 3.04DF/365 + 3.02RF",
            IndexKind::H => "H = w_DV*DV + w_U*U + w_dT*dT + w_TR*TR + w_P*P",
            IndexKind::HExpanded => {
                "H = 0.246u + 0.2p + 0.04dP3 + 0.051t + 0.148dt + 0.208dv + 0.019dt24 + 0.072tr + 0.017u^3"
            }
            IndexKind::Eh => {
                "EH = 0.246u + 0.2p + 0.04dP3 + 0.051t + 0.148dt + 0.208dv + 0.019dt24 + 0.072tr + 0.017u^3 + 0.003(pm25 + NOx) + 0.12NA + 0.03NM + 0.14NP"
            }
        }
    }

    pub fn symbols(self) -> &'static [&'static str] {
        match self {
            IndexKind::Ei => &["FC", "FR", "S", "D", "DF", "RF"],
            IndexKind::H => &["DV", "U", "dT", "TR", "P"],
            IndexKind::HExpanded => &["u", "p", "delta_p3", "t", "delta_t", "dv", "delta_t24", "tr"],
            IndexKind::Eh => &EhInputs::NAMES,
        }
    }

    pub fn default_classification(self) -> (f64, Direction) {
        match self {
            IndexKind::Ei => (OUTSTANDING_THRESHOLD, Direction::HigherIsBetter),
            _ => (WARNING_THRESHOLD, Direction::HigherIsWorse),
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ei" => Ok(IndexKind::Ei),
            "h" => Ok(IndexKind::H),
            "h_expanded" | "hexpanded" => Ok(IndexKind::HExpanded),
            "eh" => Ok(IndexKind::Eh),
            other => Err(format!("unknown index `{other}` (expected ei, h, h_expanded, eh)")),
        }
    }
}

fn normalize_symbol(s: &str) -> String {
    s.to_ascii_lowercase().replace(['.', '-', 'δ', 'Δ'], "_")
}

/// Looks up `symbol` in a name→value map, case-insensitively, with the
/// documented aliases (EF for RF, delta_t for dT, pm2.5 for pm25, no_x for nox).
fn lookup(values: &BTreeMap<String, f64>, symbol: &str) -> Option<f64> {
    let aliases: &[&str] = match symbol {
        "RF" => &["rf", "ef"],
        "dT" => &["dt", "delta_t", "_t"],
        "pm25" => &["pm25", "pm2_5", "pm_2_5"],
        "nox" => &["nox", "no_x"],
        _ => &[],
    };
    let want = normalize_symbol(symbol);
    values.iter().find_map(|(k, v)| {
        let k = normalize_symbol(k);
        (k == want || aliases.contains(&k.as_str())).then_some(*v)
    })
}

/// Scores one input document given as symbol → value.
///
/// Returns the score and the echo of the inputs actually used.
pub fn evaluate_symbols(
    kind: IndexKind,
    values: &BTreeMap<String, f64>,
    weights: HWeights,
) -> Result<(f64, BTreeMap<String, f64>)> {
    let mut echo = BTreeMap::new();
    let mut get = |sym: &'static str| -> Result<f64> {
        let v = lookup(values, sym).ok_or(Error::MissingSymbol {
            symbol: sym,
            index: kind.name(),
        })?;
        if !v.is_finite() {
            return Err(invalid("inputs", format!("{sym} is not finite")));
        }
        echo.insert(sym.to_string(), v);
        Ok(v)
    };
    let score = match kind {
        IndexKind::Ei => {
            let x = EiInputs {
                fc: get("FC")?,
                fr: get("FR")?,
                s: get("S")?,
                d: get("D")?,
                df: get("DF")?,
                rf: get("RF")?,
            };
            x.validate()?;
            compute_ei(&x)
        }
        IndexKind::H => {
            weights.validate()?;
            compute_h(&HInputs {
                dv: get("DV")?,
                u: get("U")?,
                delta_t: get("dT")?,
                tr: get("TR")?,
                p: get("P")?,
                weights,
            })
        }
        IndexKind::HExpanded => ExpandedInputs {
            u: get("u")?,
            p: get("p")?,
            delta_p3: get("delta_p3")?,
            t: get("t")?,
            delta_t: get("delta_t")?,
            dv: get("dv")?,
            delta_t24: get("delta_t24")?,
            tr: get("tr")?,
        }
        .evaluate(),
        IndexKind::Eh => {
            let mut v = [0.0; 14];
            for (slot, name) in v.iter_mut().zip(EhInputs::NAMES) {
                *slot = get(name)?;
            }
            let x = EhInputs {
                u: v[0],
                p: v[1],
                delta_p3: v[2],
                t: v[3],
                delta_t: v[4],
                dv: v[5],
                delta_t24: v[6],
                tr: v[7],
                u_cubed: v[8],
                pm25: v[9],
                nox: v[10],
                na: v[11],
                nm: v[12],
                np: v[13],
            };
            x.validate()?;
            compute_eh(&x)
        }
    };
    Ok((score, echo))
}

/// JSON result of one index evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexResult {
    pub index_name: String,
    pub period: String,
    pub score: f64,
    pub band: Band,
    pub threshold: f64,
    pub formula: String,
    pub inputs_echo: BTreeMap<String, f64>,
    pub weights_used: BTreeMap<String, f64>,
}
