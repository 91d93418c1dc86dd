//! Macro series ingestion and the zeta-argument transform.
//!
//! Input is UTF-8 CSV with a header row and dot decimals. Column names are mapped
//! through [`SchemaConfig`], so files with arbitrary headers can be read. Columns
//! that the schema does not name are kept per record in [`MacroRecord::extra`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default coefficient on the policy rate in [`t_transform`].
pub const DEFAULT_BETA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroRecord {
    /// Calendar label such as `2009` or `2015Q3`.
    pub period: String,
    /// Real GDP, billions of local currency.
    pub gdp_real: f64,
    /// Broad money, billions of local currency.
    pub m3: f64,
    /// Percent per annum.
    pub policy_rate: f64,
    pub exchange_rate: Option<f64>,
    pub reer: Option<f64>,
    pub unemployment: Option<f64>,
    pub wage: Option<f64>,
    /// Year-on-year CPI inflation, percent.
    pub inflation_actual: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSeries {
    pub records: Vec<MacroRecord>,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockKind {
    Domestic,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockAnnotation {
    pub period: String,
    pub kind: ShockKind,
    pub label: String,
}

/// Column names for each [`MacroRecord`] field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaConfig {
    pub period: String,
    pub gdp_real: String,
    pub m3: String,
    pub policy_rate: String,
    pub exchange_rate: String,
    pub reer: String,
    pub unemployment: String,
    pub wage: String,
    pub inflation_actual: String,
}

impl Default for SchemaConfig {
    fn default() -> Self {
        Self {
            period: "period".into(),
            gdp_real: "gdp_real".into(),
            m3: "m3".into(),
            policy_rate: "policy_rate".into(),
            exchange_rate: "exchange_rate".into(),
            reer: "reer".into(),
            unemployment: "unemployment".into(),
            wage: "wage".into(),
            inflation_actual: "inflation_actual".into(),
        }
    }
}

impl SchemaConfig {
    fn optional_columns(&self) -> [&str; 5] {
        [
            &self.exchange_rate,
            &self.reer,
            &self.unemployment,
            &self.wage,
            &self.inflation_actual,
        ]
    }

    fn known(&self) -> HashSet<&str> {
        let mut set: HashSet<&str> = self.optional_columns().into_iter().collect();
        set.extend([
            self.period.as_str(),
            self.gdp_real.as_str(),
            self.m3.as_str(),
            self.policy_rate.as_str(),
        ]);
        set
    }
}

/// Orders period labels numerically when both parse as numbers, lexically otherwise.
pub fn compare_periods(a: &str, b: &str) -> Ordering {
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

fn parse_number(raw: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|e: std::num::ParseFloatError| Error::Parse {
            row,
            column: column.to_string(),
            message: format!("'{raw}': {e}"),
        })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column: column.to_string(),
            message: format!("'{raw}' is not finite"),
        });
    }
    Ok(v)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a macro CSV file.
pub fn ingest_csv(path: impl AsRef<Path>, schema: &SchemaConfig, beta: f64) -> Result<MacroSeries> {
    read_macro_csv(open(path.as_ref())?, schema, beta)
}

/// Reads and validates macro CSV from any reader.
///
/// Row numbers in diagnostics are file line numbers, so the first data row is row 2.
pub fn read_macro_csv<R: Read>(reader: R, schema: &SchemaConfig, beta: f64) -> Result<MacroSeries> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be finite, got {beta}")));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().all(str::is_empty) {
        return Err(Error::Validation {
            row: None,
            message: "no records".into(),
        });
    }
    let index = |name: &str| headers.iter().position(|h| h == name);
    let mandatory = [&schema.period, &schema.gdp_real, &schema.m3, &schema.policy_rate];
    for col in mandatory {
        if index(col).is_none() {
            return Err(Error::Validation {
                row: Some(1),
                message: format!("header is missing mandatory column '{col}'"),
            });
        }
    }
    let known = schema.known();
    let extra_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !known.contains(h))
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut records: Vec<MacroRecord> = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row?;
        let cell = |name: &str| index(name).and_then(|j| row.get(j)).filter(|s| !s.is_empty());
        let required = |name: &str| -> Result<f64> {
            let raw = cell(name).ok_or_else(|| Error::Validation {
                row: Some(line),
                message: format!("missing mandatory field '{name}'"),
            })?;
            parse_number(raw, line, name)
        };
        let optional = |name: &str| cell(name).map(|raw| parse_number(raw, line, name)).transpose();

        let period = cell(&schema.period)
            .ok_or_else(|| Error::Validation {
                row: Some(line),
                message: format!("missing mandatory field '{}'", schema.period),
            })?
            .to_string();
        let gdp_real = required(&schema.gdp_real)?;
        let m3 = required(&schema.m3)?;
        let policy_rate = required(&schema.policy_rate)?;
        if gdp_real <= 0.0 || m3 <= 0.0 {
            return Err(Error::Validation {
                row: Some(line),
                message: format!("gdp_real and m3 must be positive (got {gdp_real}, {m3})"),
            });
        }
        if !seen.insert(period.clone()) {
            return Err(Error::DuplicatePeriod { period, row: line });
        }
        if let Some(prev) = records.last() {
            if compare_periods(&prev.period, &period) != Ordering::Less {
                return Err(Error::Validation {
                    row: Some(line),
                    message: format!("period '{period}' does not follow '{}'", prev.period),
                });
            }
        }
        let mut extra = BTreeMap::new();
        for (j, name) in &extra_cols {
            if let Some(raw) = row.get(*j).filter(|s| !s.is_empty()) {
                extra.insert(name.clone(), parse_number(raw, line, name)?);
            }
        }
        records.push(MacroRecord {
            period,
            gdp_real,
            m3,
            policy_rate,
            exchange_rate: optional(&schema.exchange_rate)?,
            reer: optional(&schema.reer)?,
            unemployment: optional(&schema.unemployment)?,
            wage: optional(&schema.wage)?,
            inflation_actual: optional(&schema.inflation_actual)?,
            extra,
        });
    }
    if records.is_empty() {
        return Err(Error::Validation {
            row: None,
            message: "no records".into(),
        });
    }
    Ok(MacroSeries { records, beta })
}

/// Writes a series back to CSV using the schema's column names.
///
/// Optional columns are emitted only when some record has them.
pub fn write_macro_csv<W: Write>(series: &MacroSeries, schema: &SchemaConfig, writer: W) -> Result<()> {
    type Getter = fn(&MacroRecord) -> Option<f64>;
    let optional: [(&str, Getter); 5] = [
        (&schema.exchange_rate, |r| r.exchange_rate),
        (&schema.reer, |r| r.reer),
        (&schema.unemployment, |r| r.unemployment),
        (&schema.wage, |r| r.wage),
        (&schema.inflation_actual, |r| r.inflation_actual),
    ];
    let present: Vec<_> = optional
        .iter()
        .filter(|(_, get)| series.records.iter().any(|r| get(r).is_some()))
        .collect();
    let extra_names: Vec<String> = series
        .records
        .iter()
        .flat_map(|r| r.extra.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![
        schema.period.clone(),
        schema.gdp_real.clone(),
        schema.m3.clone(),
        schema.policy_rate.clone(),
    ];
    header.extend(present.iter().map(|(n, _)| n.to_string()));
    header.extend(extra_names.iter().cloned());
    w.write_record(&header)?;

    let fmt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
    for r in &series.records {
        let mut row = vec![
            r.period.clone(),
            format!("{:?}", r.gdp_real),
            format!("{:?}", r.m3),
            format!("{:?}", r.policy_rate),
        ];
        row.extend(present.iter().map(|(_, get)| fmt(get(r))));
        row.extend(extra_names.iter().map(|n| fmt(r.extra.get(n).copied())));
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}

/// Maps each record to `ln(gdp_real) + ln(m3) + beta * policy_rate`.
pub fn t_transform(series: &MacroSeries) -> Vec<f64> {
    series
        .records
        .iter()
        .map(|r| r.gdp_real.ln() + r.m3.ln() + series.beta * r.policy_rate)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexMode {
    #[default]
    Raw,
    /// Replace values by their rank 1..n (ties keep input order).
    Rank,
}

impl std::str::FromStr for IndexMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(IndexMode::Raw),
            "rank" => Ok(IndexMode::Rank),
            other => Err(Error::InvalidArgument(format!("unknown index mode '{other}'"))),
        }
    }
}

pub fn index_map(t_raw: &[f64], mode: IndexMode) -> Result<Vec<f64>> {
    if t_raw.is_empty() {
        return Err(Error::Empty("t values"));
    }
    Ok(match mode {
        IndexMode::Raw => t_raw.to_vec(),
        IndexMode::Rank => {
            let mut order: Vec<usize> = (0..t_raw.len()).collect();
            order.sort_by(|&a, &b| t_raw[a].total_cmp(&t_raw[b]));
            let mut ranks = vec![0.0; t_raw.len()];
            for (rank, &i) in order.iter().enumerate() {
                ranks[i] = (rank + 1) as f64;
            }
            ranks
        }
    })
}

/// Reads shock annotations (`period,kind,label`) and checks each period exists in `series`.
pub fn read_shocks<R: Read>(reader: R, series: &MacroSeries) -> Result<Vec<ShockAnnotation>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let periods: HashSet<&str> = series.records.iter().map(|r| r.period.as_str()).collect();
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<ShockAnnotation>().enumerate() {
        let shock = rec?;
        if !periods.contains(shock.period.as_str()) {
            return Err(Error::Validation {
                row: Some(i + 2),
                message: format!("shock period '{}' is not in the series", shock.period),
            });
        }
        out.push(shock);
    }
    Ok(out)
}

/// A generic numeric table keyed by period: the layout of the published forecast tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericTable {
    pub periods: Vec<String>,
    pub columns: Vec<String>,
    /// Row-major values, `values[row][column]`.
    pub values: Vec<Vec<f64>>,
}

impl NumericTable {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no column '{name}' in table")))?;
        Ok(self.values.iter().map(|row| row[j]).collect())
    }

    /// Periods parsed as numbers, e.g. the `t` index column.
    pub fn numeric_periods(&self) -> Result<Vec<f64>> {
        self.periods
            .iter()
            .enumerate()
            .map(|(i, p)| parse_number(p, i + 2, "period"))
            .collect()
    }
}

pub fn ingest_table(path: impl AsRef<Path>) -> Result<NumericTable> {
    read_table(open(path.as_ref())?)
}

/// Reads a CSV whose first column is a period label and the rest are numbers.
pub fn read_table<R: Read>(reader: R) -> Result<NumericTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Validation {
            row: Some(1),
            message: "table needs a period column and at least one value column".into(),
        });
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut periods = Vec::new();
    let mut values = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row?;
        let period = row.get(0).unwrap_or_default().to_string();
        if !seen.insert(period.clone()) {
            return Err(Error::DuplicatePeriod { period, row: line });
        }
        let vals = columns
            .iter()
            .enumerate()
            .map(|(j, name)| parse_number(row.get(j + 1).unwrap_or_default(), line, name))
            .collect::<Result<Vec<_>>>()?;
        periods.push(period);
        values.push(vals);
    }
    if periods.is_empty() {
        return Err(Error::Validation {
            row: None,
            message: "no records".into(),
        });
    }
    Ok(NumericTable {
        periods,
        columns,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn series(rows: &[(f64, f64, f64)], beta: f64) -> MacroSeries {
        MacroSeries {
            records: rows
                .iter()
                .enumerate()
                .map(|(i, &(gdp_real, m3, policy_rate))| MacroRecord {
                    period: (i + 1).to_string(),
                    gdp_real,
                    m3,
                    policy_rate,
                    exchange_rate: None,
                    reer: None,
                    unemployment: None,
                    wage: None,
                    inflation_actual: None,
                    extra: BTreeMap::new(),
                })
                .collect(),
            beta,
        }
    }

    #[test]
    fn t_transform_examples() {
        assert_eq!(t_transform(&series(&[(1.0, 1.0, 0.0)], 7.0)), vec![0.0]);
        let t = t_transform(&series(&[(E, E, 10.0)], 0.1))[0];
        assert!((t - 3.0).abs() < 1e-12);
        let t = t_transform(&series(&[(60.0, 50.0, 8.0)], 0.5))[0];
        assert!((t - 12.0064).abs() < 1e-4, "{t}");
    }

    #[test]
    fn index_modes() {
        assert_eq!(
            index_map(&[12.0, 12.3, 12.7], IndexMode::Rank).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(
            index_map(&[12.7, 12.0, 12.3], IndexMode::Rank).unwrap(),
            vec![3.0, 1.0, 2.0]
        );
        assert_eq!(index_map(&[5.5], IndexMode::Raw).unwrap(), vec![5.5]);
        assert!(index_map(&[], IndexMode::Raw).is_err());
    }

    #[test]
    fn empty_file_has_no_records() {
        let csv = "period,gdp_real,m3,policy_rate\n";
        let err = read_macro_csv(csv.as_bytes(), &SchemaConfig::default(), 0.1).unwrap_err();
        assert!(err.to_string().contains("no records"), "{err}");
    }

    #[test]
    fn zero_gdp_names_the_row() {
        let csv = "period,gdp_real,m3,policy_rate\n2005,10,5,7\n2006,0,5,7\n";
        let err = read_macro_csv(csv.as_bytes(), &SchemaConfig::default(), 0.1).unwrap_err();
        assert!(matches!(err, Error::Validation { row: Some(3), .. }), "{err}");
    }

    #[test]
    fn malformed_number() {
        let csv = "period,gdp_real,m3,policy_rate\n2005,1o,5,7\n";
        let err = read_macro_csv(csv.as_bytes(), &SchemaConfig::default(), 0.1).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_and_unordered_periods() {
        let dup = "period,gdp_real,m3,policy_rate\n2005,1,5,7\n2005,2,5,7\n";
        assert!(matches!(
            read_macro_csv(dup.as_bytes(), &SchemaConfig::default(), 0.1),
            Err(Error::DuplicatePeriod { row: 3, .. })
        ));
        let back = "period,gdp_real,m3,policy_rate\n2006,1,5,7\n2005,2,5,7\n";
        assert!(read_macro_csv(back.as_bytes(), &SchemaConfig::default(), 0.1).is_err());
    }

    #[test]
    fn missing_mandatory_cell() {
        let csv = "period,gdp_real,m3,policy_rate\n2005,1,,7\n";
        let err = read_macro_csv(csv.as_bytes(), &SchemaConfig::default(), 0.1).unwrap_err();
        assert!(matches!(err, Error::Validation { row: Some(2), .. }));
    }

    #[test]
    fn custom_schema_and_extras() {
        let schema = SchemaConfig {
            period: "year".into(),
            gdp_real: "GDP".into(),
            m3: "M3".into(),
            policy_rate: "rate".into(),
            ..SchemaConfig::default()
        };
        let csv = "year,GDP,M3,rate,oil\n9,10,5,7,61.5\n10,11,6,7,\n";
        let s = read_macro_csv(csv.as_bytes(), &schema, 0.1).unwrap();
        assert_eq!(s.records.len(), 2);
        assert_eq!(s.records[0].extra["oil"], 61.5);
        assert!(s.records[1].extra.is_empty());
    }

    #[test]
    fn numeric_period_order() {
        assert_eq!(compare_periods("2", "10"), Ordering::Less);
        assert_eq!(compare_periods("2015Q1", "2015Q2"), Ordering::Less);
    }

    #[test]
    fn shocks_must_reference_existing_periods() {
        let s = series(&[(1.0, 1.0, 1.0), (1.0, 1.0, 1.0)], 0.1);
        let ok = "period,kind,label\n2,domestic,devaluation\n";
        assert_eq!(read_shocks(ok.as_bytes(), &s).unwrap()[0].kind, ShockKind::Domestic);
        let bad = "period,kind,label\n9,external,oil\n";
        assert!(read_shocks(bad.as_bytes(), &s).is_err());
    }
}
