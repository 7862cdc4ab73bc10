//! Dated-series ingestion: two-column CSV with header `date,price` or
//! `date,return`, ISO-8601 calendar dates. Rows are sorted by date on load
//! and duplicate dates are rejected, so downstream windows always see a
//! clean time axis.

use anyhow::{anyhow, bail, Context, Result};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Price,
    Return,
}

#[derive(Debug, Clone)]
pub struct DatedSeries {
    pub kind: ColumnKind,
    pub dates: Vec<String>,
    pub values: Vec<f64>,
}

pub fn load_series(path: &Path) -> Result<DatedSeries> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines().enumerate();
    let kind = loop {
        let (idx, raw) = lines
            .next()
            .ok_or_else(|| anyhow!("{}: no data rows", path.display()))?;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        break match line {
            "date,price" => ColumnKind::Price,
            "date,return" => ColumnKind::Return,
            other => bail!(
                "{}:{}: expected header `date,price` or `date,return`, got {other:?}",
                path.display(),
                idx + 1
            ),
        };
    };

    let mut rows: Vec<(String, f64, usize)> = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (date, value) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("{}:{lineno}: expected 2 columns", path.display()))?;
        if value.contains(',') {
            bail!("{}:{lineno}: expected 2 columns", path.display());
        }
        let date = date.trim();
        validate_date(date).with_context(|| format!("{}:{lineno}", path.display()))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("{}:{lineno}: {:?} is not a number", path.display(), value.trim()))?;
        if !v.is_finite() {
            bail!("{}:{lineno}: non-finite value", path.display());
        }
        if kind == ColumnKind::Price && v <= 0.0 {
            bail!("{}:{lineno}: nonpositive price {v}", path.display());
        }
        rows.push((date.to_string(), v, lineno));
    }
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    // ISO-8601 dates order lexicographically; the sort is stable so the
    // duplicate report below names the original lines.
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            bail!(
                "{}: duplicate date {} (lines {} and {})",
                path.display(),
                w[0].0,
                w[0].2,
                w[1].2
            );
        }
    }
    Ok(DatedSeries {
        kind,
        dates: rows.iter().map(|r| r.0.clone()).collect(),
        values: rows.iter().map(|r| r.1).collect(),
    })
}

/// ISO-8601 calendar date `YYYY-MM-DD`, including the month-length and
/// leap-year rules.
fn validate_date(s: &str) -> Result<()> {
    let b = s.as_bytes();
    let fail = || anyhow!("{s:?} is not an ISO-8601 date (YYYY-MM-DD)");
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return Err(fail());
    }
    let digits = |range: std::ops::Range<usize>| -> Result<u32> {
        let mut v = 0u32;
        for &c in &b[range] {
            if !c.is_ascii_digit() {
                return Err(fail());
            }
            v = v * 10 + (c - b'0') as u32;
        }
        Ok(v)
    };
    let year = digits(0..4)?;
    let month = digits(5..7)?;
    let day = digits(8..10)?;
    if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
        return Err(fail());
    }
    Ok(())
}

fn days_in_month(year: u32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        _ => {
            let leap = year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
            if leap {
                29
            } else {
                28
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!(
            "gesnorm-series-{}-{name}.csv",
            std::process::id()
        ));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_and_sorts_prices() {
        let p = write_temp(
            "sorts",
            "date,price\n2024-01-03,110\n2024-01-01,100\n2024-01-02,105\n",
        );
        let s = load_series(&p).unwrap();
        assert_eq!(s.kind, ColumnKind::Price);
        assert_eq!(s.dates, vec!["2024-01-01", "2024-01-02", "2024-01-03"]);
        assert_eq!(s.values, vec![100.0, 105.0, 110.0]);
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn error_messages_name_lines() {
        let p = write_temp("bad-cell", "date,return\n2024-01-01,0.01\n2024-01-02,abc\n");
        let err = load_series(&p).unwrap_err().to_string();
        assert!(err.contains(":3:"), "{err}");
        std::fs::remove_file(p).ok();

        let p = write_temp("dup", "date,return\n2024-01-01,0.01\n2024-01-01,0.02\n");
        let err = load_series(&p).unwrap_err().to_string();
        assert!(err.contains("duplicate date 2024-01-01"), "{err}");
        std::fs::remove_file(p).ok();

        let p = write_temp("empty", "date,price\n");
        let err = load_series(&p).unwrap_err().to_string();
        assert!(err.contains("no data rows"), "{err}");
        std::fs::remove_file(p).ok();

        let p = write_temp("negprice", "date,price\n2024-01-01,-5\n");
        let err = load_series(&p).unwrap_err().to_string();
        assert!(err.contains("nonpositive price"), "{err}");
        std::fs::remove_file(p).ok();

        let p = write_temp("header", "time,price\n2024-01-01,5\n");
        let err = load_series(&p).unwrap_err().to_string();
        assert!(err.contains("expected header"), "{err}");
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn date_validation() {
        assert!(validate_date("2024-02-29").is_ok()); // leap year
        assert!(validate_date("2023-02-29").is_err());
        assert!(validate_date("2023-13-01").is_err());
        assert!(validate_date("2023-00-01").is_err());
        assert!(validate_date("2023-04-31").is_err());
        assert!(validate_date("23-04-01").is_err());
        assert!(validate_date("2023/04/01").is_err());
    }
}
