//! Table emitters for search records, single measurements and family rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyName, FamilyRow};
use crate::measure::{MeasureKind, SeparationReport};
use crate::search::SearchRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// Record polynomials per degree, height and measure.
    Table1,
    /// High-quality polynomials for the absolute separation.
    Table2,
    /// The cubic family built from convergents of √3.
    Table3,
    /// Degree-4 and degree-6 families.
    Table4,
    /// The degree-5 family.
    Table5,
}

impl Layout {
    pub fn headers(self) -> &'static [&'static str] {
        match self {
            Layout::Table1 => &["d,H", "measure", "polynomial", "value"],
            Layout::Table2 => &["polynomial", "abssep", "quality"],
            Layout::Table3 => &["n", "height", "abssep", "quality"],
            Layout::Table4 => &["d", "height", "abssep", "quality"],
            Layout::Table5 => &["height", "abssep", "quality"],
        }
    }
}

impl FromStr for Layout {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "table1" => Layout::Table1,
            "table2" => Layout::Table2,
            "table3" => Layout::Table3,
            "table4" => Layout::Table4,
            "table5" => Layout::Table5,
            _ => return Err(Error::InvalidParameter(format!("unknown table layout {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Md,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "json" => Format::Json,
            "csv" => Format::Csv,
            "md" | "markdown" => Format::Md,
            _ => return Err(Error::InvalidParameter(format!("unknown format {s:?}"))),
        })
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Md => "md",
        })
    }
}

/// Rows handed to [`emit_table`].
#[derive(Clone, Copy, Debug)]
pub enum TableInput<'a> {
    Records(&'a [SearchRecord]),
    Reports(&'a [SeparationReport]),
    Family(&'a [FamilyRow]),
}

/// Rounds a decimal string in scientific or plain notation to `digits`
/// significant digits, written as `5.394e-4`.
pub fn round_sci(s: &str, digits: usize) -> Result<String> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (neg, s) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int}{frac}");
    let lead = match all.find(|c| c != '0') {
        Some(i) => i,
        None => return Ok(format!("{}e0", zero_str(digits))),
    };
    // value = 0.d1d2... * 10^(exp + int.len() - lead)
    let mut e10 = exp + int.len() as i64 - lead as i64 - 1;
    let sig: Vec<u8> = all[lead..].bytes().map(|b| b - b'0').collect();
    let digits = digits.max(1);
    let mut kept: Vec<u8> = sig.iter().copied().chain(std::iter::repeat(0)).take(digits).collect();
    if sig.get(digits).is_some_and(|&d| d >= 5) {
        let mut i = digits;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.truncate(digits);
                e10 += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let body: String = kept.iter().map(|d| char::from(b'0' + d)).collect();
    let mant = if digits == 1 { body } else { format!("{}.{}", &body[..1], &body[1..]) };
    Ok(format!("{}{mant}e{e10}", if neg { "-" } else { "" }))
}

fn zero_str(digits: usize) -> String {
    if digits <= 1 {
        "0".into()
    } else {
        format!("0.{}", "0".repeat(digits - 1))
    }
}

fn quality_cell(q: &Option<String>) -> Result<String> {
    match q {
        None => Ok(String::new()),
        Some(s) => {
            let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad quality {s:?}")))?;
            Ok(format!("{v:.2}"))
        }
    }
}

fn measure_rank(m: MeasureKind) -> usize {
    MeasureKind::ALL.iter().position(|&k| k == m).unwrap_or(usize::MAX)
}

fn family_degree_ok(layout: Layout, f: FamilyName) -> bool {
    match layout {
        Layout::Table3 => f == FamilyName::Deg3Sqrt3,
        Layout::Table4 => matches!(f, FamilyName::Deg4 | FamilyName::Deg6),
        Layout::Table5 => matches!(f, FamilyName::Deg5A | FamilyName::Deg5B),
        _ => false,
    }
}

fn height_key(s: &str) -> (usize, String) {
    let t = s.trim_start_matches('-');
    (t.len(), t.to_string())
}

/// The cells of a table, before serialization.
pub fn table_rows(layout: Layout, input: TableInput<'_>) -> Result<Vec<Vec<String>>> {
    let mismatch = |what: &str| Error::TableSchema(format!("{what} cannot fill {layout:?}"));
    match (layout, input) {
        (Layout::Table1, TableInput::Records(rs)) => {
            let mut rs: Vec<&SearchRecord> = rs.iter().collect();
            rs.sort_by(|a, b| {
                (a.degree, a.max_height, measure_rank(a.measure))
                    .cmp(&(b.degree, b.max_height, measure_rank(b.measure)))
                    .then_with(|| a.key().cmp(&b.key()))
            });
            rs.iter()
                .map(|r| {
                    Ok(vec![
                        format!("{},{}", r.degree, r.max_height),
                        r.measure.tag().to_string(),
                        r.polynomial.clone(),
                        round_sci(&r.value, 4)?,
                    ])
                })
                .collect()
        }
        (Layout::Table2, TableInput::Records(rs)) => rs
            .iter()
            .map(|r| {
                if r.measure != MeasureKind::AbsSep {
                    return Err(mismatch("a non-abssep record"));
                }
                Ok(vec![r.polynomial.clone(), round_sci(&r.value, 4)?, quality_cell(&r.quality)?])
            })
            .collect(),
        (Layout::Table2, TableInput::Reports(rs)) => rs
            .iter()
            .map(|r| {
                if r.measure != MeasureKind::AbsSep {
                    return Err(mismatch("a non-abssep measurement"));
                }
                Ok(vec![r.polynomial.clone(), round_sci(&r.value, 4)?, quality_cell(&r.quality)?])
            })
            .collect(),
        (Layout::Table3 | Layout::Table4 | Layout::Table5, TableInput::Family(rows)) => {
            if let Some(r) = rows.iter().find(|r| !family_degree_ok(layout, r.family)) {
                return Err(mismatch(&format!("family {}", r.family.tag())));
            }
            let mut rows: Vec<&FamilyRow> = rows.iter().collect();
            if layout == Layout::Table4 {
                rows.sort_by(|a, b| {
                    (a.family.degree(), height_key(&a.height)).cmp(&(b.family.degree(), height_key(&b.height)))
                });
            }
            rows.iter()
                .map(|r| {
                    let mut cells = match layout {
                        Layout::Table3 => vec![r.param.clone(), r.height.clone()],
                        Layout::Table4 => vec![r.family.degree().to_string(), r.height.clone()],
                        _ => vec![r.height.clone()],
                    };
                    cells.push(round_sci(&r.abssep, 4)?);
                    cells.push(quality_cell(&r.quality)?);
                    Ok(cells)
                })
                .collect()
        }
        (_, TableInput::Records(_)) => Err(mismatch("search records")),
        (_, TableInput::Reports(_)) => Err(mismatch("measurements")),
        (_, TableInput::Family(_)) => Err(mismatch("family rows")),
    }
}

/// Renders rows in the column layout of one of the five tables.
/// An empty input gives a header-only table (an empty array in JSON).
pub fn emit_table(layout: Layout, input: TableInput<'_>, format: Format) -> Result<String> {
    let rows = table_rows(layout, input)?;
    emit_rows(layout.headers(), &rows, format)
}

/// Serializes arbitrary string cells under the given headers.
pub fn emit_rows(headers: &[&str], rows: &[Vec<String>], format: Format) -> Result<String> {
    if let Some(r) = rows.iter().find(|r| r.len() != headers.len()) {
        return Err(Error::TableSchema(format!("row with {} cells under {} headers", r.len(), headers.len())));
    }
    Ok(match format {
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| {
                    headers
                        .iter()
                        .map(|h| h.to_string())
                        .zip(r.iter().map(|c| serde_json::Value::String(c.clone())))
                        .collect()
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&objs).expect("strings serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(headers).map_err(csv_err)?;
            for r in rows {
                w.write_record(r).map_err(csv_err)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Store(e.to_string()))?).expect("utf8")
        }
        Format::Md => {
            let mut s = format!("| {} |\n|{}\n", headers.join(" | "), "---|".repeat(headers.len()));
            for r in rows {
                s.push_str(&format!("| {} |\n", r.join(" | ")));
            }
            s
        }
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Store(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sci("5.3940123e-4", 4).unwrap(), "5.394e-4");
        assert_eq!(round_sci("9.99960e-3", 4).unwrap(), "1.000e-2");
        assert_eq!(round_sci("0.00012345", 4).unwrap(), "1.235e-4");
        assert_eq!(round_sci("123", 2).unwrap(), "1.2e2");
        assert_eq!(round_sci("-7.16457e-39", 4).unwrap(), "-7.165e-39");
        assert!(round_sci("abc", 4).is_err());
    }

    #[test]
    fn empty_tables_have_headers() {
        let md = emit_table(Layout::Table3, TableInput::Family(&[]), Format::Md).unwrap();
        assert_eq!(md, "| n | height | abssep | quality |\n|---|---|---|---|\n");
        let csv = emit_table(Layout::Table1, TableInput::Records(&[]), Format::Csv).unwrap();
        assert_eq!(csv, "\"d,H\",measure,polynomial,value\n");
        assert_eq!(emit_table(Layout::Table5, TableInput::Family(&[]), Format::Json).unwrap(), "[]\n");
    }

    #[test]
    fn schema_mismatch() {
        assert!(matches!(
            emit_table(Layout::Table3, TableInput::Records(&[]), Format::Md),
            Err(Error::TableSchema(_))
        ));
    }
}
