//! Text formats for function tables.
//!
//! Boolean tables: a header line `n=<int>` followed by one hex-encoded truth
//! table per line (see [`BooleanFunction::to_hex`]). Real tables: CSV with one
//! row of `2^n` decimal values per function; `n` is inferred from the row
//! length. Blank lines and lines starting with `#` are ignored by both readers.

use crate::concept::{BooleanFunction, InputDomain, RealFunction};
use crate::error::{invalid, Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_truth_tables(functions: &[BooleanFunction]) -> Result<String> {
    let first = functions
        .first()
        .ok_or_else(|| invalid("no functions to write"))?;
    let domain = first.domain();
    let mut out = format!("n={}\n", domain.bits());
    for f in functions {
        domain.ensure_same(f.domain())?;
        out.push_str(&f.to_hex());
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_truth_tables(text: &str) -> Result<Vec<BooleanFunction>> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n=<int>` header".into(),
    })?;
    let n = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `n=<int>`, found {header:?}"),
        })?;
    let domain = InputDomain::new(n).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    lines
        .map(|(line, hex)| {
            BooleanFunction::from_hex(domain, hex).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_real_csv(functions: &[RealFunction]) -> String {
    let mut out = String::new();
    for f in functions {
        let row: Vec<String> = f.values().iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_real_csv(text: &str) -> Result<Vec<RealFunction>> {
    let mut domain: Option<InputDomain> = None;
    let mut out = Vec::new();
    for (line, row) in content_lines(text) {
        let parse_err = |message: String| Error::Parse { line, message };
        let values = row
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("bad number {cell:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let len = values.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(parse_err(format!("row length {len} is not 2^n with n >= 1")));
        }
        let d = InputDomain::new(len.trailing_zeros()).map_err(|e| parse_err(e.to_string()))?;
        match domain {
            None => domain = Some(d),
            Some(prev) if prev != d => {
                return Err(parse_err(format!(
                    "row has {len} values, earlier rows have {}",
                    prev.size()
                )))
            }
            _ => {}
        }
        out.push(RealFunction::new(d, values).map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(out)
}
