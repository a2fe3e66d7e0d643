//! Vegetation carbon stocks for arbor, economic, bamboo and shrub forests,
//! with a share / CO₂ / valuation ledger.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const CO2_PER_C: f64 = 44.0 / 12.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArborSpeciesEntry {
    pub label: String,
    /// Stand volume, m³.
    pub volume: f64,
    /// Basic wood density, t/m³.
    pub wood_density: f64,
    /// Biomass expansion factor.
    #[serde(default = "default_bef")]
    pub bef: f64,
}

fn default_bef() -> f64 {
    1.3
}

impl ArborSpeciesEntry {
    pub fn new(label: impl Into<String>, volume: f64, wood_density: f64) -> Self {
        Self {
            label: label.into(),
            volume,
            wood_density,
            bef: default_bef(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.volume >= 0.0 && self.volume.is_finite()) {
            return Err(invalid("volume", format!("{} for `{}`", self.volume, self.label)));
        }
        if !(self.wood_density > 0.0 && self.wood_density.is_finite()) {
            return Err(invalid("wood_density", format!("{} for `{}`", self.wood_density, self.label)));
        }
        if !(self.bef > 0.0 && self.bef.is_finite()) {
            return Err(invalid("bef", format!("{} for `{}`", self.bef, self.label)));
        }
        Ok(())
    }
}

/// What the carbon price multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationBasis {
    #[default]
    Stock,
    Co2,
}

impl fmt::Display for ValuationBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValuationBasis::Stock => "stock",
            ValuationBasis::Co2 => "co2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarbonParams {
    /// Carbon fraction of dry biomass for arbor stands.
    pub gamma: f64,
    /// Root-to-shoot ratio R.
    pub root_ratio: f64,
    pub cf_economic: f64,
    pub cf_bamboo: f64,
    pub cf_shrub: f64,
    /// Economic-forest biomass, t/hm².
    pub w_economic: f64,
    /// Shrubland biomass, t/hm².
    pub w_shrub: f64,
    pub co2_factor: f64,
    /// Price per tonne; no valuation without it.
    pub carbon_price: Option<f64>,
    pub valuation_basis: ValuationBasis,
}

impl Default for CarbonParams {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            root_ratio: 0.42,
            cf_economic: 0.47,
            cf_bamboo: 0.5,
            cf_shrub: 0.5,
            w_economic: 23.70,
            w_shrub: 19.76,
            co2_factor: CO2_PER_C,
            carbon_price: None,
            valuation_basis: ValuationBasis::Stock,
        }
    }
}

impl CarbonParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("gamma", self.gamma),
            ("root_ratio", self.root_ratio),
            ("cf_economic", self.cf_economic),
            ("cf_bamboo", self.cf_bamboo),
            ("cf_shrub", self.cf_shrub),
            ("w_economic", self.w_economic),
            ("w_shrub", self.w_shrub),
            ("co2_factor", self.co2_factor),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if let Some(p) = self.carbon_price {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(invalid("carbon_price", format!("must be non-negative, got {p}")));
            }
        }
        Ok(())
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be non-negative, got {v}")))
    }
}

/// Stock-expansion method: `γ Σ V·WD·BEF·(1+R)`, tonnes.
pub fn carbon_arbor(entries: &[ArborSpeciesEntry], params: &CarbonParams) -> Result<f64> {
    let mut biomass = 0.0;
    for e in entries {
        e.validate()?;
        biomass += e.volume * e.wood_density * e.bef * (1.0 + params.root_ratio);
    }
    Ok(params.gamma * biomass)
}

/// `W_economic · area · CF_economic`, area in hm².
pub fn carbon_economic(area: f64, params: &CarbonParams) -> Result<f64> {
    non_negative("area", area)?;
    Ok(params.w_economic * area * params.cf_economic)
}

/// `w · count · CF_bamboo / 1000`: per-plant biomass is in kg.
pub fn carbon_bamboo(count: f64, w_per_plant: f64, params: &CarbonParams) -> Result<f64> {
    non_negative("count", count)?;
    non_negative("w_per_plant", w_per_plant)?;
    Ok(w_per_plant * count * params.cf_bamboo / 1000.0)
}

/// `W_shrub · area · CF_shrub`, area in hm².
pub fn carbon_shrub(area: f64, params: &CarbonParams) -> Result<f64> {
    non_negative("area", area)?;
    Ok(params.w_shrub * area * params.cf_shrub)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestType {
    Arbor,
    Economic,
    Bamboo,
    Shrub,
}

impl ForestType {
    pub const ALL: [ForestType; 4] = [
        ForestType::Arbor,
        ForestType::Economic,
        ForestType::Bamboo,
        ForestType::Shrub,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ForestType::Arbor => "arbor",
            ForestType::Economic => "economic",
            ForestType::Bamboo => "bamboo",
            ForestType::Shrub => "shrub",
        }
    }
}

impl fmt::Display for ForestType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ForestType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.trim_end_matches(" forest").trim_end_matches("lands");
        match t {
            "arbor" => Ok(ForestType::Arbor),
            "economic" => Ok(ForestType::Economic),
            "bamboo" => Ok(ForestType::Bamboo),
            "shrub" => Ok(ForestType::Shrub),
            _ => Err(invalid("type", format!("unknown forest type `{s}`"))),
        }
    }
}

/// One row of a stock inventory CSV.
///
/// Columns: `type, label, area_hm2, count, volume_m3, wood_density, bef,
/// w_per_plant, stock_t`. Which columns a row needs depends on its type;
/// `stock_t`, when given, is taken as the row's stock as-is.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InventoryRow {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub area_hm2: Option<f64>,
    #[serde(default)]
    pub count: Option<f64>,
    #[serde(default)]
    pub volume_m3: Option<f64>,
    #[serde(default)]
    pub wood_density: Option<f64>,
    #[serde(default)]
    pub bef: Option<f64>,
    #[serde(default)]
    pub w_per_plant: Option<f64>,
    #[serde(default)]
    pub stock_t: Option<f64>,
}

pub fn read_inventory_csv<R: Read>(source: R) -> Result<Vec<InventoryRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Stock of one forest type plus its extent, as fed to [`build_ledger`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeStock {
    pub forest_type: ForestType,
    pub area_hm2: Option<f64>,
    pub count: Option<f64>,
    pub stock: f64,
}

fn required(row: usize, name: &'static str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| invalid(name, format!("inventory row {row} needs `{name}`")))
}

/// Evaluates each inventory row and sums stocks per forest type.
///
/// Types are returned in a fixed order; absent types are omitted.
pub fn stocks_from_inventory(rows: &[InventoryRow], params: &CarbonParams) -> Result<Vec<TypeStock>> {
    params.validate()?;
    let mut acc: Vec<TypeStock> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let n = i + 1;
        let kind: ForestType = row.kind.parse()?;
        let stock = match (row.stock_t, kind) {
            (Some(s), _) => {
                non_negative("stock_t", s)?;
                s
            }
            (None, ForestType::Arbor) => {
                let entry = ArborSpeciesEntry {
                    label: row.label.clone().unwrap_or_else(|| format!("row{n}")),
                    volume: required(n, "volume_m3", row.volume_m3)?,
                    wood_density: required(n, "wood_density", row.wood_density)?,
                    bef: row.bef.unwrap_or_else(default_bef),
                };
                carbon_arbor(&[entry], params)?
            }
            (None, ForestType::Economic) => {
                carbon_economic(required(n, "area_hm2", row.area_hm2)?, params)?
            }
            (None, ForestType::Bamboo) => carbon_bamboo(
                required(n, "count", row.count)?,
                required(n, "w_per_plant", row.w_per_plant)?,
                params,
            )?,
            (None, ForestType::Shrub) => carbon_shrub(required(n, "area_hm2", row.area_hm2)?, params)?,
        };
        let add = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => Some(a + b),
            (a, b) => a.or(b),
        };
        match acc.iter_mut().find(|t| t.forest_type == kind) {
            Some(t) => {
                t.stock += stock;
                t.area_hm2 = add(t.area_hm2, row.area_hm2);
                t.count = add(t.count, row.count);
            }
            None => acc.push(TypeStock {
                forest_type: kind,
                area_hm2: row.area_hm2,
                count: row.count,
                stock,
            }),
        }
    }
    acc.sort_by_key(|t| t.forest_type);
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub label: String,
    pub area_hm2: Option<f64>,
    pub count: Option<f64>,
    pub carbon_stock: f64,
    /// Fraction of the total; `None` when the total is zero.
    pub share: Option<f64>,
    pub co2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Valuation {
    pub basis: ValuationBasis,
    pub price: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarbonLedger {
    pub rows: Vec<LedgerRow>,
    pub total: LedgerRow,
    /// Set when every stock is zero and shares cannot be formed.
    pub shares_undefined: bool,
    pub valuation: Option<Valuation>,
}

/// Builds the share / CO₂ ledger over labelled stocks (tonnes).
pub fn build_ledger(stocks: &[TypeStock], params: &CarbonParams) -> Result<CarbonLedger> {
    params.validate()?;
    let rows_in: Vec<LabeledStock> = stocks
        .iter()
        .map(|t| (t.forest_type.to_string(), t.area_hm2, t.count, t.stock))
        .collect();
    build_labeled_ledger(&rows_in, params)
}

/// `(label, area_hm2, count, stock_t)`.
pub type LabeledStock = (String, Option<f64>, Option<f64>, f64);

/// [`build_ledger`] over free-form labels, e.g. stand types or age groups.
pub fn build_labeled_ledger(
    stocks: &[LabeledStock],
    params: &CarbonParams,
) -> Result<CarbonLedger> {
    params.validate()?;
    for (_, _, _, s) in stocks {
        non_negative("stock", *s)?;
    }
    let total: f64 = stocks.iter().map(|r| r.3).sum();
    let shares_undefined = total <= 0.0;
    let share = |s: f64| (!shares_undefined).then(|| s / total);
    let sum_opt = |f: fn(&LabeledStock) -> Option<f64>| {
        stocks.iter().filter_map(f).fold(None, |a: Option<f64>, v| Some(a.unwrap_or(0.0) + v))
    };
    let rows = stocks
        .iter()
        .map(|(label, area, count, s)| LedgerRow {
            label: label.clone(),
            area_hm2: *area,
            count: *count,
            carbon_stock: *s,
            share: share(*s),
            co2: s * params.co2_factor,
        })
        .collect();
    let total_row = LedgerRow {
        label: "total".into(),
        area_hm2: sum_opt(|r| r.1),
        count: sum_opt(|r| r.2),
        carbon_stock: total,
        share: share(total),
        co2: total * params.co2_factor,
    };
    let valuation = params.carbon_price.map(|price| {
        let base = match params.valuation_basis {
            ValuationBasis::Stock => total_row.carbon_stock,
            ValuationBasis::Co2 => total_row.co2,
        };
        Valuation {
            basis: params.valuation_basis,
            price,
            value: base * price,
        }
    });
    Ok(CarbonLedger {
        rows,
        total: total_row,
        shares_undefined,
        valuation,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Ledger as CSV: `type, area_hm2, count, carbon_stock_t, share_pct, co2_t`.
pub fn write_ledger_csv<W: Write>(ledger: &CarbonLedger, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["type", "area_hm2", "count", "carbon_stock_t", "share_pct", "co2_t"])?;
    for r in ledger.rows.iter().chain(std::iter::once(&ledger.total)) {
        w.write_record([
            r.label.clone(),
            cell(r.area_hm2),
            cell(r.count),
            r.carbon_stock.to_string(),
            cell(r.share.map(|s| s * 100.0)),
            r.co2.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn p() -> CarbonParams {
        CarbonParams::default()
    }

    #[test]
    fn arbor_single_entry() {
        assert_eq!(carbon_arbor(&[], &p()).unwrap(), 0.0);
        let e = ArborSpeciesEntry::new("larch", 1000.0, 0.5);
        let one = carbon_arbor(std::slice::from_ref(&e), &p()).unwrap();
        assert_abs_diff_eq!(one, 1000.0 * 0.5 * 1.3 * 1.42 * 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(one, 461.5, epsilon = 1e-9);
        let two = carbon_arbor(&[e.clone(), e], &p()).unwrap();
        assert_eq!(two, 2.0 * one);
    }

    #[test]
    fn arbor_rejects_bad_entries() {
        let e = ArborSpeciesEntry::new("x", 10.0, 0.0);
        assert!(carbon_arbor(&[e], &p()).is_err());
    }

    #[test]
    fn economic_and_shrub_rows() {
        assert_relative_eq!(carbon_economic(2860.31, &p()).unwrap(), 3.19e4, max_relative = 0.005);
        assert_relative_eq!(carbon_shrub(1422.54, &p()).unwrap(), 1.41e4, max_relative = 0.005);
        assert_eq!(carbon_economic(0.0, &p()).unwrap(), 0.0);
        assert_eq!(carbon_shrub(0.0, &p()).unwrap(), 0.0);
        let doubled = CarbonParams {
            w_shrub: 2.0 * 19.76,
            ..p()
        };
        assert_eq!(
            carbon_shrub(10.0, &doubled).unwrap(),
            2.0 * carbon_shrub(10.0, &p()).unwrap()
        );
        assert!(carbon_economic(-1.0, &p()).is_err());
    }

    #[test]
    fn bamboo_converts_kg_once() {
        assert_eq!(carbon_bamboo(0.0, 30.0, &p()).unwrap(), 0.0);
        assert_abs_diff_eq!(carbon_bamboo(1e6, 30.0, &p()).unwrap(), 15_000.0, epsilon = 1e-9);
        let full = CarbonParams {
            cf_bamboo: 1.0,
            ..p()
        };
        assert_eq!(
            carbon_bamboo(1e6, 30.0, &full).unwrap(),
            2.0 * carbon_bamboo(1e6, 30.0, &p()).unwrap()
        );
    }

    fn table_stocks() -> Vec<TypeStock> {
        [
            (ForestType::Arbor, 582.64e4),
            (ForestType::Economic, 3.19e4),
            (ForestType::Bamboo, 7.49e4),
            (ForestType::Shrub, 1.41e4),
        ]
        .into_iter()
        .map(|(t, s)| TypeStock {
            forest_type: t,
            area_hm2: None,
            count: None,
            stock: s,
        })
        .collect()
    }

    #[test]
    fn ledger_totals_and_shares() {
        let ledger = build_ledger(&table_stocks(), &p()).unwrap();
        assert_relative_eq!(ledger.total.carbon_stock, 594.73e4, max_relative = 1e-9);
        assert_relative_eq!(ledger.total.co2, 2180.7e4, max_relative = 1e-3);
        assert_abs_diff_eq!(ledger.rows[0].share.unwrap() * 100.0, 97.97, epsilon = 0.02);
        let share_sum: f64 = ledger.rows.iter().map(|r| r.share.unwrap()).sum();
        assert_abs_diff_eq!(share_sum, 1.0, epsilon = 1e-6);
        assert!(!ledger.shares_undefined);
        assert!(ledger.valuation.is_none());
    }

    #[test]
    fn single_type_has_full_share() {
        let mut s = table_stocks();
        s.truncate(1);
        let ledger = build_ledger(&s, &p()).unwrap();
        assert_eq!(ledger.rows[0].share, Some(1.0));
    }

    #[test]
    fn all_zero_stocks_flag_undefined_shares() {
        let mut s = table_stocks();
        s.iter_mut().for_each(|t| t.stock = 0.0);
        let ledger = build_ledger(&s, &p()).unwrap();
        assert!(ledger.shares_undefined);
        assert!(ledger.rows.iter().all(|r| r.share.is_none()));
    }

    #[test]
    fn valuation_records_basis() {
        let params = CarbonParams {
            carbon_price: Some(2.0),
            valuation_basis: ValuationBasis::Co2,
            ..p()
        };
        let ledger = build_ledger(&table_stocks(), &params).unwrap();
        let v = ledger.valuation.unwrap();
        assert_eq!(v.basis, ValuationBasis::Co2);
        assert_abs_diff_eq!(v.value, 2.0 * ledger.total.co2, epsilon = 1e-6);
    }

    #[test]
    fn inventory_rows_are_grouped_by_type() {
        let csv = "type,label,area_hm2,count,volume_m3,wood_density,bef,w_per_plant,stock_t\n\
                   arbor,larch,,,1000,0.5,,,\n\
                   arbor,birch,,,1000,0.5,1.3,,\n\
                   economic,,2860.31,,,,,,\n\
                   bamboo,,,1000000,,,,30,\n\
                   shrublands,,1422.54,,,,,,\n";
        let rows = read_inventory_csv(csv.as_bytes()).unwrap();
        let stocks = stocks_from_inventory(&rows, &p()).unwrap();
        assert_eq!(stocks.len(), 4);
        assert_abs_diff_eq!(stocks[0].stock, 923.0, epsilon = 1e-9);
        assert_abs_diff_eq!(stocks[2].stock, 15_000.0, epsilon = 1e-9);
    }

    #[test]
    fn inventory_reports_missing_columns() {
        let csv = "type,area_hm2\neconomic,\n";
        let rows = read_inventory_csv(csv.as_bytes()).unwrap();
        let err = stocks_from_inventory(&rows, &p()).unwrap_err();
        assert!(err.to_string().contains("area_hm2"));
    }

    #[test]
    fn ledger_csv_has_total_row() {
        let ledger = build_ledger(&table_stocks(), &p()).unwrap();
        let mut out = Vec::new();
        write_ledger_csv(&ledger, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("type,area_hm2,count,carbon_stock_t,share_pct,co2_t\n"));
        assert!(text.lines().last().unwrap().starts_with("total,"));
        assert_eq!(text.lines().count(), 6);
    }
}
