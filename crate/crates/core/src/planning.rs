//! Reserve sizing: per-unit-area index effect (θ) and the reserve area
//! needed to bring an index down to a target (S_q).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaUnit {
    Km2,
    Hm2,
}

impl fmt::Display for AreaUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AreaUnit::Km2 => "km2",
            AreaUnit::Hm2 => "hm2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub value: f64,
    pub unit: AreaUnit,
}

impl Area {
    pub fn km2(value: f64) -> Self {
        Self {
            value,
            unit: AreaUnit::Km2,
        }
    }

    pub fn hm2(value: f64) -> Self {
        Self {
            value,
            unit: AreaUnit::Hm2,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive, got {v}")))
    }
}

/// θ = `region_area · index_change / reserve_area`.
///
/// The two areas must carry the same unit tag; no conversion is done.
pub fn unit_area_effect(region_area: Area, index_change: f64, reserve_area: Area) -> Result<f64> {
    if region_area.unit != reserve_area.unit {
        return Err(Error::AreaUnitMismatch(region_area.unit, reserve_area.unit));
    }
    positive("reserve_area", reserve_area.value)?;
    Ok(region_area.value * index_change / reserve_area.value)
}

/// Which S_q expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum SizingForm {
    /// `(current − target) · region_area / horizon`, as printed.
    PaperLiteral,
    /// `(current − target) · region_area / (θ · horizon)`.
    Dimensional { unit_effect: f64 },
}

impl SizingForm {
    pub fn label(&self) -> &'static str {
        match self {
            SizingForm::PaperLiteral => "paper_literal",
            SizingForm::Dimensional { .. } => "dimensional",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReserveSizing {
    pub area: Area,
    pub form: SizingForm,
    pub note: Option<String>,
}

pub const TARGET_MET: &str = "target already met";

pub fn required_reserve_area(
    current_index: f64,
    target_index: f64,
    region_area: Area,
    horizon_years: f64,
    form: SizingForm,
) -> Result<ReserveSizing> {
    positive("horizon_years", horizon_years)?;
    positive("region_area", region_area.value)?;
    if let SizingForm::Dimensional { unit_effect } = form {
        positive("unit_effect", unit_effect)?;
    }
    if !(current_index.is_finite() && target_index.is_finite()) {
        return Err(invalid("index", "current and target must be finite"));
    }
    let gap = current_index - target_index;
    if gap <= 0.0 {
        return Ok(ReserveSizing {
            area: Area {
                value: 0.0,
                unit: region_area.unit,
            },
            form,
            note: Some(TARGET_MET.into()),
        });
    }
    let value = match form {
        SizingForm::PaperLiteral => gap * region_area.value / horizon_years,
        SizingForm::Dimensional { unit_effect } => {
            gap * region_area.value / (unit_effect * horizon_years)
        }
    };
    Ok(ReserveSizing {
        area: Area {
            value,
            unit: region_area.unit,
        },
        form,
        note: None,
    })
}

/// Index reduction delivered by `reserve_area` over `horizon_years` at
/// effect θ. Inverse of the dimensional sizing form.
pub fn index_reduction(unit_effect: f64, reserve_area: Area, region_area: Area, horizon_years: f64) -> Result<f64> {
    if region_area.unit != reserve_area.unit {
        return Err(Error::AreaUnitMismatch(region_area.unit, reserve_area.unit));
    }
    positive("region_area", region_area.value)?;
    Ok(unit_effect * reserve_area.value * horizon_years / region_area.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionProfile {
    pub region: String,
    pub region_area: Area,
    pub reserve_area: Area,
    pub index_before: f64,
    pub index_after: f64,
    pub horizon_years: f64,
}

impl RegionProfile {
    pub fn validate(&self) -> Result<()> {
        positive("region_area", self.region_area.value)?;
        positive("reserve_area", self.reserve_area.value)?;
        positive("horizon_years", self.horizon_years)?;
        if !(self.index_before.is_finite() && self.index_after.is_finite()) {
            return Err(invalid("index", "before and after must be finite"));
        }
        Ok(())
    }

    /// Index change attributed to the reserve, e.g. ΔEH.
    pub fn index_change(&self) -> f64 {
        self.index_after - self.index_before
    }

    pub fn unit_area_effect(&self) -> Result<f64> {
        self.validate()?;
        unit_area_effect(self.region_area, self.index_change(), self.reserve_area)
    }
}

/// One planning scenario document.
///
/// `theta` runs a unit-area-effect computation; `sizing` a reserve sizing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub theta: Option<ThetaScenario>,
    #[serde(default)]
    pub sizing: Option<SizingScenario>,
    /// Value the source document prints, kept for comparison.
    #[serde(default)]
    pub printed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaScenario {
    pub region_area: Area,
    pub index_change: f64,
    pub reserve_area: Area,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizingScenario {
    pub current_index: f64,
    pub target_index: f64,
    pub region_area: Area,
    pub horizon_years: f64,
    pub form: SizingForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub kind: &'static str,
    pub form: Option<&'static str>,
    pub value: f64,
    pub unit: Option<AreaUnit>,
    pub printed: Option<f64>,
    pub note: Option<String>,
}

pub fn run_scenario(s: &Scenario) -> Result<Vec<ScenarioResult>> {
    let mut out = Vec::new();
    let note_printed = |value: f64| {
        s.printed
            .filter(|p| (p - value).abs() > 1e-3 * value.abs().max(1.0))
            .map(|p| format!("source prints {p}, formula gives {value}"))
    };
    if let Some(t) = &s.theta {
        let value = unit_area_effect(t.region_area, t.index_change, t.reserve_area)?;
        out.push(ScenarioResult {
            name: s.name.clone(),
            kind: "unit_area_effect",
            form: None,
            value,
            unit: None,
            printed: s.printed,
            note: note_printed(value),
        });
    }
    if let Some(z) = &s.sizing {
        let r = required_reserve_area(z.current_index, z.target_index, z.region_area, z.horizon_years, z.form)?;
        out.push(ScenarioResult {
            name: s.name.clone(),
            kind: "required_reserve_area",
            form: Some(r.form.label()),
            value: r.area.value,
            unit: Some(r.area.unit),
            printed: s.printed,
            note: r.note.clone().or_else(|| note_printed(r.area.value)),
        });
    }
    if out.is_empty() {
        return Err(invalid("scenario", format!("`{}` has neither theta nor sizing", s.name)));
    }
    Ok(out)
}
