//! Line-oriented text format for QUBO and Ising models.
//!
//! ```text
//! qubo <num_vars> <offset>
//! i j value
//! ```
//!
//! One body line per non-zero coefficient with `i <= j`; `i == j` lines are
//! linear terms. Reals use the shortest decimal form that parses back to the
//! same value. Ising files use the header `ising` and the same body over
//! biases and couplings. Blank lines and lines starting with `#` are ignored
//! when reading; repeated keys are summed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{IsingModel, QuboModel};
use crate::{Error, Result};

pub fn render_qubo(model: &QuboModel) -> String {
    render("qubo", model.linear(), model.quadratic(), model.offset())
}

pub fn render_ising(model: &IsingModel) -> String {
    render("ising", &model.biases, &model.couplings, model.offset)
}

fn render(header: &str, linear: &[f64], quadratic: &BTreeMap<(usize, usize), f64>, offset: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{header} {} {offset}", linear.len());
    // Merge linear and quadratic keys in (i, j) order.
    let mut quad = quadratic.iter().peekable();
    for (i, &h) in linear.iter().enumerate() {
        if h != 0.0 {
            let _ = writeln!(out, "{i} {i} {h}");
        }
        while let Some((&(a, b), &v)) = quad.peek() {
            if a != i {
                break;
            }
            let _ = writeln!(out, "{a} {b} {v}");
            quad.next();
        }
    }
    out
}

pub fn parse_qubo(text: &str) -> Result<QuboModel> {
    let (n, linear, quadratic, offset) = parse("qubo", text)?;
    QuboModel::from_parts(n, linear, quadratic, offset)
}

pub fn parse_ising(text: &str) -> Result<IsingModel> {
    let (_, biases, couplings, offset) = parse("ising", text)?;
    Ok(IsingModel {
        biases,
        couplings,
        offset,
    })
}

type Parsed = (usize, Vec<f64>, BTreeMap<(usize, usize), f64>, f64);

fn parse(expected_header: &str, text: &str) -> Result<Parsed> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, message: String| Error::Parse { line, message };

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".to_string()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != expected_header {
        return Err(err(
            hline,
            format!("expected header `{expected_header} <num_vars> <offset>`, got `{header}`"),
        ));
    }
    let n: usize = fields[1]
        .parse()
        .map_err(|_| err(hline, format!("invalid variable count `{}`", fields[1])))?;
    let offset: f64 = fields[2]
        .parse()
        .map_err(|_| err(hline, format!("invalid offset `{}`", fields[2])))?;

    let mut linear = vec![0.0; n];
    let mut quadratic = BTreeMap::new();
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(line, format!("expected `i j value`, got `{body}`")));
        }
        let index = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| err(line, format!("invalid index `{s}`")))?;
            if v >= n {
                return Err(err(line, format!("index {v} out of range for {n} variables")));
            }
            Ok(v)
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| err(line, format!("invalid value `{}`", fields[2])))?;
        if i > j {
            return Err(err(line, format!("expected i <= j, got {i} > {j}")));
        }
        if i == j {
            linear[i] += value;
        } else {
            *quadratic.entry((i, j)).or_insert(0.0) += value;
        }
    }
    Ok((n, linear, quadratic, offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::t1;
    use crate::qubo::{build_qubo, default_weights, qubo_energy, to_ising, SlackMode};

    #[test]
    fn empty_model_is_header_only() {
        let model = QuboModel::from_parts(0, vec![], BTreeMap::new(), 0.0).unwrap();
        assert_eq!(render_qubo(&model), "qubo 0 0\n");
    }

    #[test]
    fn linear_line() {
        let model = QuboModel::from_parts(1, vec![1.5], BTreeMap::new(), 0.0).unwrap();
        assert_eq!(render_qubo(&model), "qubo 1 0\n0 0 1.5\n");
    }

    #[test]
    fn t1_round_trip_is_exact_on_every_bitstring() {
        let t1 = t1();
        let model = build_qubo(&t1, default_weights(&t1), SlackMode::Bounded);
        let back = parse_qubo(&render_qubo(&model)).unwrap();
        assert_eq!(back.linear(), model.linear());
        assert_eq!(back.quadratic(), model.quadratic());
        assert_eq!(back.offset(), model.offset());
        for mask in 0u32..1 << 10 {
            let bits: Vec<bool> = (0..10).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(qubo_energy(&model, &bits).unwrap(), qubo_energy(&back, &bits).unwrap());
        }
    }

    #[test]
    fn ising_round_trip() {
        let t1 = t1();
        let ising = to_ising(&build_qubo(&t1, default_weights(&t1), SlackMode::Bounded));
        let text = render_ising(&ising);
        assert!(text.starts_with("ising 10 "));
        assert_eq!(parse_ising(&text).unwrap(), ising);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(parse_qubo(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_qubo("ising 1 0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_qubo("qubo 2 0\n0 1 1\n1 0 2"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_qubo("qubo 2 0\n0 5 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_qubo("qubo 2 0\n0 1 x"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_and_repeats() {
        let model = parse_qubo("# header next\nqubo 2 1.25\n\n0 0 1\n0 0 2\n0 1 -0.5\n").unwrap();
        assert_eq!(model.linear(), &[3.0, 0.0]);
        assert_eq!(model.quadratic().get(&(0, 1)), Some(&-0.5));
        assert_eq!(model.offset(), 1.25);
    }
}
