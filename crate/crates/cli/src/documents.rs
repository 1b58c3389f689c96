//! JSON documents for fans, divisors and sheaves.

use serde::{Deserialize, Serialize};
use std::path::Path;
use toric_core::sheaf::Filtration;
use toric_core::{BigInt, Divisor, Fan, Rational, ReflexiveSheaf, Subspace};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_names: Option<Vec<String>>,
}

/// Either `{"coeffs": [...]}` or a bare coefficient list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DivisorDocument {
    Object { coeffs: Vec<i64> },
    List(Vec<i64>),
}

impl DivisorDocument {
    pub fn coeffs(&self) -> &[i64] {
        match self {
            DivisorDocument::Object { coeffs } | DivisorDocument::List(coeffs) => coeffs,
        }
    }
}

/// An exact rational: a JSON integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpDocument {
    /// The index `i` at which the filtration becomes `basis`.
    pub jump: i64,
    /// Rows spanning `E(jump)`.
    pub basis: Vec<Vec<RationalText>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDocument {
    pub rank: usize,
    /// One jump list per ray, in ray order.
    pub filtrations: Vec<Vec<JumpDocument>>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::validation("FileNotFound", format!("{}: no such file", path.display()))
        } else {
            CliError::validation("ReadError", format!("{}: {e}", path.display()))
        }
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::validation("ParseError", format!("{what}: {e}")))
}

pub fn parse_fan(text: &str) -> Result<Fan, CliError> {
    fan_from_document(parse_json(text, "fan document")?)
}

pub fn fan_from_document(doc: FanDocument) -> Result<Fan, CliError> {
    let fan = Fan::from_rows(doc.lattice_rank, doc.rays, doc.max_cones)?;
    match doc.ray_names {
        Some(names) => Ok(fan.with_ray_names(names)?),
        None => Ok(fan),
    }
}

pub fn fan_document(fan: &Fan) -> FanDocument {
    FanDocument {
        lattice_rank: fan.rank(),
        rays: fan.rays().iter().map(|r| r.coords().to_vec()).collect(),
        max_cones: fan.max_cones().to_vec(),
        ray_names: Some(fan.ray_names().to_vec()),
    }
}

pub fn parse_divisor(text: &str, fan: &Fan) -> Result<Divisor, CliError> {
    let doc: DivisorDocument = parse_json(text, "divisor document")?;
    if doc.coeffs().len() != fan.num_rays() {
        return Err(CliError::validation(
            "InvalidDivisor",
            format!("divisor has {} coefficients, fan has {} rays", doc.coeffs().len(), fan.num_rays()),
        ));
    }
    Ok(Divisor::new(doc.coeffs().to_vec()))
}

pub fn parse_rational(s: &RationalText) -> Result<Rational, CliError> {
    let bad = |t: &str| CliError::validation("ParseError", format!("malformed rational {t:?}"));
    match s {
        RationalText::Int(n) => Ok(Rational::from_integer(BigInt::from(*n))),
        RationalText::Text(t) => {
            let (num, den) = t.split_once('/').unwrap_or((t, "1"));
            let num: BigInt = num.trim().parse().map_err(|_| bad(t))?;
            let den: BigInt = den.trim().parse().map_err(|_| bad(t))?;
            if den == BigInt::from(0) {
                return Err(bad(t));
            }
            Ok(Rational::new(num, den))
        }
    }
}

pub fn parse_sheaf(text: &str, fan: &Fan) -> Result<ReflexiveSheaf, CliError> {
    sheaf_from_document(&parse_json(text, "sheaf document")?, fan)
}

pub fn sheaf_from_document(doc: &SheafDocument, fan: &Fan) -> Result<ReflexiveSheaf, CliError> {
    let invalid = |msg: String| CliError::validation("InvalidSheaf", msg);
    if doc.filtrations.len() != fan.num_rays() {
        return Err(invalid(format!(
            "sheaf has filtrations for {} rays, fan has {}",
            doc.filtrations.len(),
            fan.num_rays()
        )));
    }
    let mut filtrations = Vec::with_capacity(doc.filtrations.len());
    for (ray, jumps) in doc.filtrations.iter().enumerate() {
        let mut levels = Vec::with_capacity(jumps.len());
        for (j, jump) in jumps.iter().enumerate() {
            let rows = jump
                .basis
                .iter()
                .map(|row| row.iter().map(parse_rational).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(row) = rows.iter().find(|r| r.len() != doc.rank) {
                return Err(invalid(format!(
                    "ray {ray}, jump {j}: basis row has {} entries, rank is {}",
                    row.len(),
                    doc.rank
                )));
            }
            levels.push((jump.jump, Subspace::span(doc.rank, rows)?));
        }
        filtrations.push(Filtration::new(doc.rank, levels).map_err(|e| e.at_ray(ray))?);
    }
    Ok(ReflexiveSheaf::new(doc.rank, filtrations)?.on_fan(fan)?)
}

fn rational_text(x: &Rational) -> RationalText {
    RationalText::Text(x.to_string())
}

pub fn sheaf_document(e: &ReflexiveSheaf) -> SheafDocument {
    SheafDocument {
        rank: e.rank(),
        filtrations: e
            .filtrations()
            .iter()
            .map(|f| {
                f.jumps()
                    .iter()
                    .map(|(i, w)| JumpDocument {
                        jump: *i,
                        basis: w.basis().iter().map(|row| row.iter().map(rational_text).collect()).collect(),
                    })
                    .collect()
            })
            .collect(),
    }
}
