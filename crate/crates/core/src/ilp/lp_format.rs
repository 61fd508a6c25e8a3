//! CPLEX LP text format, restricted to what the membership and classic
//! models need. Coefficients are written as exact decimals.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::model::{
    decimal_string, BlockLayout, Constraint, IlpModel, ObjectiveMode, Sense, VarKind, Variable,
};
use crate::error::{Error, Result};
use crate::poly::Coeff;

fn coeff_text(c: &Coeff) -> Result<String> {
    decimal_string(c).ok_or_else(|| Error::MalformedModel(format!("coefficient {c} has no finite decimal form")))
}

fn linear_text(model: &IlpModel, terms: &[(usize, Coeff)]) -> Result<String> {
    let mut out = String::new();
    for (idx, (j, c)) in terms.iter().enumerate() {
        let name = &model.variables[*j].name;
        let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
        if idx > 0 || sign == "-" {
            out.push_str(sign);
            out.push(' ');
        }
        if mag.is_one() {
            out.push_str(name);
        } else {
            let _ = write!(out, "{} {}", coeff_text(&mag)?, name);
        }
        out.push(' ');
    }
    Ok(out.trim_end().to_string())
}

fn mode_header(mode: &ObjectiveMode) -> String {
    match mode {
        ObjectiveMode::PowersOfTwo => "mode=powers-of-two".into(),
        ObjectiveMode::RandomNormal { seed } => format!("mode=random-normal seed={seed}"),
        ObjectiveMode::Feasibility { seed, delta } => {
            let mut s = format!("mode=feasibility delta={}", decimal_string(delta).unwrap_or_default());
            if let Some(seed) = seed {
                let _ = write!(s, " seed={seed}");
            }
            s
        }
    }
}

pub fn write_lp(model: &IlpModel) -> Result<String> {
    let mut out = String::new();
    let layout = model
        .layout
        .map(|l| format!("k={} a={} ", l.k, l.a))
        .unwrap_or_default();
    let _ = writeln!(out, "\\ hamres {layout}{}", mode_header(&model.mode));
    out.push_str("Minimize\n");
    if model.objective.is_empty() {
        let first = model.variables.first().map(|v| v.name.as_str()).unwrap_or("x");
        let _ = writeln!(out, " obj: 0 {first}");
    } else {
        let _ = writeln!(out, " obj: {}", linear_text(model, &model.objective)?);
    }
    out.push_str("Subject To\n");
    for c in &model.constraints {
        let _ = writeln!(
            out,
            " {}: {} {} {}",
            c.name,
            linear_text(model, &c.terms)?,
            c.sense.symbol(),
            coeff_text(&c.rhs)?
        );
    }
    out.push_str("Bounds\n");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::General) {
        let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
    }
    let generals: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::General)
        .map(|v| v.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        let _ = writeln!(out, " {}", generals.join(" "));
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        let _ = writeln!(out, " {}", binaries.join(" "));
    }
    out.push_str("End\n");
    Ok(out)
}

pub fn export_model(model: &IlpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = write_lp(model)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_decimal(text: &str, line: usize) -> Result<Coeff> {
    let t = text.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits = format!("{whole}{frac}");
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::parse(line, format!("bad number {text:?}")));
    }
    let num: BigInt = digits.parse().map_err(|_| Error::parse(line, format!("bad number {text:?}")))?;
    let den = BigInt::from(10).pow(frac.len() as u32);
    let c = Coeff::new(num, den);
    Ok(if neg { -c } else { c })
}

#[derive(Default)]
struct Names {
    names: Vec<String>,
}

impl Names {
    fn index(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }
}

/// Parses `[+|-] [coef] name` sequences.
fn parse_linear(text: &str, names: &mut Names, line: usize) -> Result<Vec<(usize, Coeff)>> {
    let mut terms: Vec<(usize, Coeff)> = Vec::new();
    let mut sign = Coeff::one();
    let mut coef: Option<Coeff> = None;
    for tok in text.split_whitespace() {
        match tok {
            "+" => sign = Coeff::one(),
            "-" => sign = -Coeff::one(),
            _ if tok.starts_with(|c: char| c.is_ascii_digit() || c == '.') => {
                coef = Some(parse_decimal(tok, line)?);
            }
            _ => {
                let c = &sign * coef.take().unwrap_or_else(Coeff::one);
                let j = names.index(tok);
                match terms.iter_mut().find(|(i, _)| *i == j) {
                    Some((_, existing)) => *existing += c,
                    None => terms.push((j, c)),
                }
                sign = Coeff::one();
            }
        }
    }
    terms.retain(|(_, c)| !c.is_zero());
    Ok(terms)
}

fn parse_header(line: &str) -> (Option<BlockLayout>, ObjectiveMode) {
    let mut k = None;
    let mut a = None;
    let mut mode = "";
    let mut seed = None;
    let mut delta = None;
    for field in line.split_whitespace() {
        match field.split_once('=') {
            Some(("k", v)) => k = v.parse().ok(),
            Some(("a", v)) => a = v.parse().ok(),
            Some(("mode", v)) => mode = v,
            Some(("seed", v)) => seed = v.parse().ok(),
            Some(("delta", v)) => delta = parse_decimal(v, 0).ok(),
            _ => {}
        }
    }
    let layout = match (k, a) {
        (Some(k), Some(a)) => Some(BlockLayout { k, a }),
        _ => None,
    };
    let mode = match mode {
        "random-normal" => ObjectiveMode::RandomNormal { seed: seed.unwrap_or(0) },
        "feasibility" => ObjectiveMode::Feasibility {
            seed,
            delta: delta.unwrap_or_else(super::model::default_delta),
        },
        _ => ObjectiveMode::PowersOfTwo,
    };
    (layout, mode)
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Generals,
    Binaries,
}

/// Parses text produced by [`write_lp`] back into a model.
pub fn parse_lp(text: &str) -> Result<IlpModel> {
    let mut layout = None;
    let mut mode = ObjectiveMode::PowersOfTwo;
    let mut section = Section::None;
    let mut names = Names::default();
    let mut objective_text = String::new();
    let mut rows: Vec<(String, String, usize)> = Vec::new();
    let mut bounds: Vec<(String, i64, i64)> = Vec::new();
    let mut generals: Vec<String> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('\\') {
            if comment.trim_start().starts_with("hamres") {
                (layout, mode) = parse_header(comment);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        section = match lower.as_str() {
            "minimize" | "minimum" | "min" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "such that" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "generals" | "general" => {
                section = Section::Generals;
                continue;
            }
            "binaries" | "binary" => {
                section = Section::Binaries;
                continue;
            }
            "end" => break,
            "maximize" | "maximum" | "max" => {
                return Err(Error::parse(line_no, "only minimization models are supported"))
            }
            _ => section,
        };
        match section {
            Section::None => return Err(Error::parse(line_no, "text before the objective section")),
            Section::Objective => {
                let body = line.split_once(':').map(|(_, b)| b).unwrap_or(line);
                objective_text.push(' ');
                objective_text.push_str(body);
            }
            Section::Constraints => match line.split_once(':') {
                Some((name, body)) => rows.push((name.trim().to_string(), body.to_string(), line_no)),
                None => match rows.last_mut() {
                    Some(last) => {
                        last.1.push(' ');
                        last.1.push_str(line);
                    }
                    None => return Err(Error::parse(line_no, "constraint without a name")),
                },
            },
            Section::Bounds => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    [lo, "<=", name, "<=", hi] => {
                        let lo = lo.parse().map_err(|_| Error::parse(line_no, "bad lower bound"))?;
                        let hi = hi.parse().map_err(|_| Error::parse(line_no, "bad upper bound"))?;
                        names.index(name);
                        bounds.push((name.to_string(), lo, hi));
                    }
                    _ => return Err(Error::parse(line_no, format!("unsupported bound {line:?}"))),
                }
            }
            Section::Generals => {
                for n in line.split_whitespace() {
                    names.index(n);
                    generals.push(n.to_string());
                }
            }
            Section::Binaries => {
                for n in line.split_whitespace() {
                    names.index(n);
                    binaries.push(n.to_string());
                }
            }
        }
    }
    // Variable order: bounds, generals, binaries first, so the writer's order survives.
    let mut ordered = Names::default();
    for n in bounds.iter().map(|b| &b.0).chain(&generals).chain(&binaries) {
        ordered.index(n);
    }
    for n in &names.names {
        ordered.index(n);
    }
    let objective = parse_linear(&objective_text, &mut ordered, 0)?;
    let mut constraints = Vec::with_capacity(rows.len());
    for (name, body, line_no) in rows {
        let (lhs, sense, rhs) = if let Some((l, r)) = body.split_once("<=") {
            (l, Sense::Le, r)
        } else if let Some((l, r)) = body.split_once(">=") {
            (l, Sense::Ge, r)
        } else if let Some((l, r)) = body.split_once('=') {
            (l, Sense::Eq, r)
        } else {
            return Err(Error::parse(line_no, "constraint without a sense"));
        };
        constraints.push(Constraint {
            name,
            terms: parse_linear(lhs, &mut ordered, line_no)?,
            sense,
            rhs: parse_decimal(rhs, line_no)?,
        });
    }
    let variables = ordered
        .names
        .iter()
        .map(|name| {
            if binaries.contains(name) {
                Variable {
                    name: name.clone(),
                    lower: 0,
                    upper: 1,
                    kind: VarKind::Binary,
                }
            } else {
                let (lower, upper) = bounds
                    .iter()
                    .find(|b| &b.0 == name)
                    .map(|b| (b.1, b.2))
                    .unwrap_or((0, i64::MAX));
                Variable {
                    name: name.clone(),
                    lower,
                    upper,
                    kind: VarKind::General,
                }
            }
        })
        .collect();
    Ok(IlpModel {
        variables,
        constraints,
        objective,
        mode,
        layout,
    })
}

pub fn read_lp(path: impl AsRef<Path>) -> Result<IlpModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lp(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::model::{build_membership_model, ModeKind};
    use crate::kmer::{HammingInstance, Kmer};
    use std::sync::Arc;

    fn r0() -> Vec<Kmer> {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        ["02", "11"].iter().map(|w| Kmer::parse(w, &inst).unwrap()).collect()
    }

    #[test]
    fn round_trip_all_modes() {
        for (mode, seed) in [
            (ModeKind::PowersOfTwo, None),
            (ModeKind::RandomNormal, Some(3)),
            (ModeKind::Feasibility, Some(1)),
            (ModeKind::Feasibility, None),
        ] {
            let m = build_membership_model(&r0(), mode, seed).unwrap();
            let text = write_lp(&m).unwrap();
            assert_eq!(parse_lp(&text).unwrap(), m, "{text}");
        }
    }

    #[test]
    fn illustrative_file_structure() {
        let text = write_lp(&build_membership_model(&r0(), ModeKind::PowersOfTwo, None).unwrap()).unwrap();
        assert!(text.contains(" a1: z1 + z6 = 0\n"));
        assert!(text.contains(" obj: 2 z1 + 4 z2 + 8 z3 + 16 z4 + 32 z5 + 64 z6\n"));
        let generals = text.split("Generals\n").nth(1).unwrap().lines().next().unwrap();
        assert_eq!(generals.split_whitespace().count(), 6);
        assert_eq!(text.lines().filter(|l| l.trim_end().ends_with("= 0") && !l.contains("<=")).count(), 4);
        assert!(text.contains(" l1_1: w1 + w2 + w3 <= 2\n"));

        let feas = write_lp(&build_membership_model(&r0(), ModeKind::Feasibility, Some(1)).unwrap()).unwrap();
        assert!(feas.lines().any(|l| l.starts_with(" delta:") && l.ends_with("<= -0.001")));
    }

    #[test]
    fn export_errors_on_empty_path() {
        let m = build_membership_model(&r0(), ModeKind::PowersOfTwo, None).unwrap();
        assert!(matches!(export_model(&m, ""), Err(Error::Io { .. })));
    }
}
