//! Text and JSON renderings of stability reports.

use num_traits::Signed;
use serde::Serialize;
use toric_core::{Fan, Rational, StabilityReport, Subspace, Witness};

/// At most six decimals, trailing zeros trimmed. Display only.
pub fn decimal(x: &Rational) -> String {
    let scaled = (x * Rational::from_integer(1_000_000.into())).round().to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>7}");
    let (int, frac) = digits.split_at(digits.len() - 6);
    let frac = frac.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn rows(s: &Subspace) -> Vec<Vec<String>> {
    s.basis().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessJson {
    Trivial,
    Rays { rays: Vec<String>, basis: Vec<Vec<String>> },
    Subspace { basis: Vec<Vec<String>> },
}

/// Serialized form of a report; field names follow the library type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportJson {
    pub verdict: String,
    pub mu: String,
    pub max_sub_slope: Option<String>,
    pub witness: WitnessJson,
    pub certificate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_decimal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sub_slope_decimal: Option<String>,
}

pub fn to_json(r: &StabilityReport, fan: &Fan, with_decimal: bool) -> ReportJson {
    let witness = match &r.witness {
        Witness::Trivial => WitnessJson::Trivial,
        Witness::Rays { rays, span } => {
            WitnessJson::Rays { rays: rays.iter().map(|&i| fan.ray_names()[i].clone()).collect(), basis: rows(span) }
        }
        Witness::Subspace(s) => WitnessJson::Subspace { basis: rows(s) },
    };
    ReportJson {
        verdict: r.verdict.to_string(),
        mu: r.mu.to_string(),
        max_sub_slope: r.max_sub_slope.as_ref().map(|x| x.to_string()),
        witness,
        certificate: r.certificate.as_str().to_string(),
        mu_decimal: with_decimal.then(|| decimal(&r.mu)),
        max_sub_slope_decimal: if with_decimal { r.max_sub_slope.as_ref().map(decimal) } else { None },
    }
}

/// `Stable, mu=405/4, max_sub=99` followed by witness and certificate lines.
pub fn to_text(r: &StabilityReport, fan: &Fan, with_decimal: bool) -> String {
    let mut head = format!("{}, mu={}", r.verdict, r.mu);
    if let Some(m) = &r.max_sub_slope {
        head.push_str(&format!(", max_sub={m}"));
    }
    let mut out = vec![head];
    if with_decimal {
        let mut line = format!("decimal: mu={}", decimal(&r.mu));
        if let Some(m) = &r.max_sub_slope {
            line.push_str(&format!(", max_sub={}", decimal(m)));
        }
        out.push(line);
    }
    out.push(match &r.witness {
        Witness::Trivial => "witness: none".to_string(),
        Witness::Rays { rays, .. } => {
            let names: Vec<&str> = rays.iter().map(|&i| fan.ray_names()[i].as_str()).collect();
            format!("witness: Span({})", names.join(", "))
        }
        Witness::Subspace(s) => format!("witness: {s}"),
    });
    out.push(format!("certificate: {}", r.certificate.as_str()));
    out.join("\n")
}
