//! Textual interchange format for Ising and QUBO models.
//!
//! One coefficient per line: `i j value` with i < j is a coupling
//! (quadratic term), `i i value` is a field (linear term). Two header
//! lines carry what coefficients cannot: `# spins N` (or `# vars N` for
//! QUBO files) fixes the variable count, `# offset V` the constant term.
//! Any other line starting with `#` is a comment. Values are written in
//! shortest round-trip decimal form, so write-then-parse reproduces the
//! model exactly.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ising::{IsingModel, ModelError, QuboModel};

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("line {line}: expected `i j value`, got {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: {source}")]
    BadNumber {
        line: usize,
        source: std::num::ParseFloatError,
    },
    #[error("missing `# {0} N` header")]
    MissingSize(&'static str),
    #[error("duplicate `# {0}` header")]
    DuplicateHeader(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct RawModel {
    size: usize,
    offset: f64,
    linear: Vec<f64>,
    quadratic: Vec<(usize, usize, f64)>,
}

fn parse_raw(text: &str, size_word: &'static str) -> Result<RawModel, ModelIoError> {
    let mut size: Option<usize> = None;
    let mut offset: Option<f64> = None;
    let mut linear_entries: Vec<(usize, f64, usize)> = Vec::new();
    let mut quadratic = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut words = rest.split_whitespace();
            match (words.next(), words.next()) {
                (Some(w), Some(value)) if w == size_word => {
                    let n = value.parse::<usize>().map_err(|_| ModelIoError::MalformedLine {
                        line: line_no,
                        text: raw_line.to_string(),
                    })?;
                    if size.replace(n).is_some() {
                        return Err(ModelIoError::DuplicateHeader(size_word));
                    }
                }
                (Some("offset"), Some(value)) => {
                    let v = value
                        .parse::<f64>()
                        .map_err(|source| ModelIoError::BadNumber { line: line_no, source })?;
                    if offset.replace(v).is_some() {
                        return Err(ModelIoError::DuplicateHeader("offset"));
                    }
                }
                _ => {} // plain comment
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, j, value] = fields.as_slice() else {
            return Err(ModelIoError::MalformedLine {
                line: line_no,
                text: raw_line.to_string(),
            });
        };
        let parse_index = |s: &str| {
            s.parse::<usize>().map_err(|_| ModelIoError::MalformedLine {
                line: line_no,
                text: raw_line.to_string(),
            })
        };
        let i = parse_index(i)?;
        let j = parse_index(j)?;
        let value = value
            .parse::<f64>()
            .map_err(|source| ModelIoError::BadNumber { line: line_no, source })?;
        if i == j {
            linear_entries.push((i, value, line_no));
        } else {
            quadratic.push((i, j, value));
        }
    }

    let size = size.ok_or(ModelIoError::MissingSize(size_word))?;
    let mut linear = vec![0.0; size];
    for (i, value, line_no) in linear_entries {
        if i >= size {
            return Err(ModelIoError::Model(ModelError::CouplingOutOfRange {
                i,
                j: i,
                n: size,
            }));
        }
        if linear[i] != 0.0 {
            return Err(ModelIoError::MalformedLine {
                line: line_no,
                text: format!("duplicate linear term for index {i}"),
            });
        }
        linear[i] = value;
    }
    Ok(RawModel {
        size,
        offset: offset.unwrap_or(0.0),
        linear,
        quadratic,
    })
}

pub fn parse_ising(text: &str) -> Result<IsingModel, ModelIoError> {
    let raw = parse_raw(text, "spins")?;
    Ok(IsingModel::new(raw.size, raw.quadratic, raw.linear, raw.offset)?)
}

pub fn parse_qubo(text: &str) -> Result<QuboModel, ModelIoError> {
    let raw = parse_raw(text, "vars")?;
    Ok(QuboModel::new(raw.size, raw.quadratic, raw.linear, raw.offset)?)
}

fn write_raw(
    size_word: &str,
    size: usize,
    offset: f64,
    linear: &[f64],
    quadratic: impl Iterator<Item = (usize, usize, f64)>,
) -> String {
    let mut out = String::new();
    writeln!(out, "# {size_word} {size}").unwrap();
    writeln!(out, "# offset {offset}").unwrap();
    for (i, &h) in linear.iter().enumerate() {
        if h != 0.0 {
            writeln!(out, "{i} {i} {h}").unwrap();
        }
    }
    for (i, j, v) in quadratic {
        writeln!(out, "{i} {j} {v}").unwrap();
    }
    out
}

pub fn write_ising(model: &IsingModel) -> String {
    write_raw(
        "spins",
        model.n_spins(),
        model.offset(),
        model.fields(),
        model.couplings(),
    )
}

pub fn write_qubo(model: &QuboModel) -> String {
    write_raw(
        "vars",
        model.n_vars(),
        model.offset(),
        model.linear(),
        model.quadratic(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_ising() {
        let text = "# spins 3\n# offset 0.5\n0 0 1\n0 1 -0.25\n";
        let m = parse_ising(text).unwrap();
        assert_eq!(m.n_spins(), 3);
        assert_eq!(m.offset(), 0.5);
        assert_eq!(m.fields(), &[1.0, 0.0, 0.0]);
        assert_eq!(m.couplings().collect::<Vec<_>>(), vec![(0, 1, -0.25)]);
    }

    #[test]
    fn offset_header_is_optional() {
        let m = parse_ising("# spins 1\n0 0 2\n").unwrap();
        assert_eq!(m.offset(), 0.0);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_ising("0 0 1\n"), Err(ModelIoError::MissingSize("spins"))));
        assert!(parse_ising("# spins 2\n0 1\n").is_err());
        assert!(parse_ising("# spins 2\n0 1 x\n").is_err());
        assert!(parse_ising("# spins 2\n# spins 2\n").is_err());
        assert!(parse_ising("# spins 2\n0 0 1\n0 0 2\n").is_err());
        assert!(parse_ising("# spins 2\n0 3 1\n").is_err());
        assert!(parse_qubo("# spins 2\n").is_err()); // qubo wants `vars`
    }

    #[test]
    fn ising_roundtrip_is_exact() {
        let m = IsingModel::new(
            5,
            vec![(0, 4, 0.1 + 0.2), (1, 2, -1.0 / 3.0)],
            vec![0.0, f64::MIN_POSITIVE, -2.5, 0.0, 1e300],
            -0.125,
        )
        .unwrap();
        let text = write_ising(&m);
        assert_eq!(parse_ising(&text).unwrap(), m);
    }

    #[test]
    fn qubo_roundtrip_is_exact() {
        let q = QuboModel::new(
            3,
            vec![(0, 1, 2.0), (1, 2, 0.3)],
            vec![-1.0, 0.0, 7.25],
            0.75,
        )
        .unwrap();
        let text = write_qubo(&q);
        assert_eq!(parse_qubo(&text).unwrap(), q);
    }
}
