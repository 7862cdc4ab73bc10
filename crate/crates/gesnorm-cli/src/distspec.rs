//! The `--distortion` mini-grammar: `identity`, `sqrt`, `power:<p>`, or
//! `table:<path>` pointing at a CSV of `u,g` knots (header optional).

use anyhow::{bail, Context, Result};
use gesnorm::Distortion;
use std::path::Path;

pub fn parse_distortion(spec: &str) -> Result<Distortion> {
    if spec == "identity" {
        return Ok(Distortion::identity());
    }
    if spec == "sqrt" {
        return Ok(Distortion::sqrt());
    }
    if let Some(p) = spec.strip_prefix("power:") {
        let p: f64 = p
            .parse()
            .with_context(|| format!("invalid power exponent {p:?}"))?;
        return Ok(Distortion::power(p)?);
    }
    if let Some(path) = spec.strip_prefix("table:") {
        return load_table(Path::new(path));
    }
    bail!("unknown distortion spec {spec:?} (expected identity, sqrt, power:<p> or table:<path>)")
}

fn load_table(path: &Path) -> Result<Distortion> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read distortion table {}", path.display()))?;
    let mut knots = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (idx == 0 && line == "u,g") {
            continue;
        }
        let lineno = idx + 1;
        let (u, g) = line.split_once(',').with_context(|| {
            format!("{}:{lineno}: expected `u,g`, got {line:?}", path.display())
        })?;
        let parse = |cell: &str| -> Result<f64> {
            cell.trim()
                .parse()
                .with_context(|| format!("{}:{lineno}: {cell:?} is not a number", path.display()))
        };
        knots.push((parse(u)?, parse(g)?));
    }
    if knots.is_empty() {
        bail!("{}: no knot rows", path.display());
    }
    Ok(Distortion::tabulated(knots)?)
}

/// Comma-separated float list, as taken by `--x`, `--y` and `--alphas`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .enumerate()
        .map(|(i, cell)| {
            cell.trim()
                .parse()
                .with_context(|| format!("entry {} ({:?}) is not a number", i + 1, cell.trim()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_cases() {
        assert!(parse_distortion("identity").is_ok());
        assert!(parse_distortion("sqrt").is_ok());
        let g = parse_distortion("power:2").unwrap();
        assert_eq!(g.eval(0.5), 0.25);
        assert!(parse_distortion("power:abc").is_err());
        assert!(parse_distortion("power:-1").is_err());
        assert!(parse_distortion("cubic").is_err());
        assert!(parse_distortion("table:/nonexistent/knots.csv").is_err());
    }

    #[test]
    fn float_lists() {
        assert_eq!(
            parse_f64_list("-2,1, 7,10,-12").unwrap(),
            vec![-2.0, 1.0, 7.0, 10.0, -12.0]
        );
        let err = parse_f64_list("1,x,3").unwrap_err().to_string();
        assert!(err.contains("entry 2"), "{err}");
    }
}
