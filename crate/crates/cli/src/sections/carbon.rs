use ecoindex_core::carbon::{
    build_ledger, read_inventory_csv, stocks_from_inventory, write_ledger_csv, CarbonLedger,
    CarbonParams, TypeStock,
};
use serde::Serialize;

use super::read_input;
use crate::config::{LoadedConfig, Section};
use crate::output::{text, Sink};
use crate::CliError;

const FORMULAS: [&str; 4] = [
    "arbor: sum(V * D * BEF) * (1 + R) * gamma",
    "economic: area * w_economic * cf_economic",
    "bamboo: count * w_per_plant * cf_bamboo / 1000",
    "shrub: area * w_shrub * cf_shrub",
];

#[derive(Serialize)]
struct LedgerArtifact<'a> {
    params: &'a CarbonParams,
    formulas: [&'static str; 4],
    stocks: &'a [TypeStock],
    ledger: &'a CarbonLedger,
}

pub fn run(cfg: &LoadedConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = cfg.config.carbon.as_ref().expect("carbon section");
    let full = cfg.resolve(&c.inventory);
    let rows = read_inventory_csv(read_input(cfg, &c.inventory)?.as_bytes()).map_err(|e| CliError::from(e).in_file(&full))?;
    let stocks = stocks_from_inventory(&rows, &c.params).map_err(|e| CliError::from(e).in_file(&full))?;
    let ledger = build_ledger(&stocks, &c.params)?;

    sink.csv(Section::Carbon, "ledger.csv", |out| {
        write_ledger_csv(&ledger, out)?;
        Ok(())
    })?;
    sink.json(
        Section::Carbon,
        "ledger.json",
        &LedgerArtifact {
            params: &c.params,
            formulas: FORMULAS,
            stocks: &stocks,
            ledger: &ledger,
        },
    )?;
    sink.plot(Section::Carbon, "plot_stock.csv", |out| {
        writeln!(out, "type,carbon_stock_t")?;
        for r in &ledger.rows {
            writeln!(out, "{},{}", text(&r.label), r.carbon_stock)?;
        }
        Ok(())
    })?;
    Ok(())
}
