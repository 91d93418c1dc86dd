//! Reference tables shipped with the crate.
//!
//! `table1` carries the tabulated zeta signal with the FPAS, FPAS+zeta and ARIMA
//! forecast columns; `table2` the worked correction rows; `table4_transition` the phase
//! transition matrix; `table5` the model-comparison criteria. `macro_synthetic` is an
//! illustrative annual panel for end-to-end runs, not observed data.

use crate::data::{read_macro_csv, read_table, NumericTable, SchemaConfig, DEFAULT_BETA};
use crate::mcdm::{read_decision_csv, DecisionMatrix};
use crate::{MacroSeries, Result};

pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../fixtures/table2.csv");
pub const TABLE4_TRANSITION_CSV: &str = include_str!("../fixtures/table4_transition.csv");
pub const TABLE5_CSV: &str = include_str!("../fixtures/table5.csv");
pub const MACRO_SYNTHETIC_CSV: &str = include_str!("../fixtures/macro_synthetic.csv");
pub const SHOCKS_CSV: &str = include_str!("../fixtures/shocks.csv");

/// Published comparison scores, in `table5` row order.
pub const TABLE5_PRINTED_SCORES: [f64; 3] = [0.265, 0.875, 0.307];

/// Neutral point printed alongside the tabulated signal.
pub const TABULATED_ZETA_MEAN: f64 = 0.73;

/// Every fixture as `(file name, contents)`.
pub const ALL: [(&str, &str); 6] = [
    ("table1.csv", TABLE1_CSV),
    ("table2.csv", TABLE2_CSV),
    ("table4_transition.csv", TABLE4_TRANSITION_CSV),
    ("table5.csv", TABLE5_CSV),
    ("macro_synthetic.csv", MACRO_SYNTHETIC_CSV),
    ("shocks.csv", SHOCKS_CSV),
];

pub fn table1() -> Result<NumericTable> {
    read_table(TABLE1_CSV.as_bytes())
}

pub fn table2() -> Result<NumericTable> {
    read_table(TABLE2_CSV.as_bytes())
}

pub fn table4_transition() -> Result<NumericTable> {
    read_table(TABLE4_TRANSITION_CSV.as_bytes())
}

pub fn table5() -> Result<DecisionMatrix> {
    read_decision_csv(TABLE5_CSV.as_bytes())
}

pub fn macro_synthetic() -> Result<MacroSeries> {
    read_macro_csv(MACRO_SYNTHETIC_CSV.as_bytes(), &SchemaConfig::default(), DEFAULT_BETA)
}
