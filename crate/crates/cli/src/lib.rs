//! Command-line front end for `toric-core`.

pub mod documents;
pub mod error;
pub mod report;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use toric_core::catalog::{entry, table1, TABLE1};
use toric_core::intersection::{anticanonical, degree, is_ample, is_fano, is_nef, picard_rank, wall_intersections};
use toric_core::stability::{reflexive_stability, tangent_stability};
use toric_core::{Certificate, Divisor, Fan, StabilityReport};

pub use error::CliError;

/// Exit code when `table1` disagrees with the printed table.
pub const EXIT_MISMATCH: u8 = 1;
/// Exit code for verdicts that are not certified complete.
pub const EXIT_HEURISTIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "toricstab", version, about = "Intersection numbers and slope stability on smooth toric varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a fan: smooth, complete, simplicial.
    FanCheck {
        #[command(flatten)]
        source: FanSource,
    },
    /// Degree of a divisor with respect to a polarization.
    Degree {
        #[command(flatten)]
        source: FanSource,
        /// Ray name, `-K`, or a divisor file.
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        /// Ray name, `-K`, or a divisor file; defaults to `-K` on Fano fans.
        #[arg(long, allow_hyphen_values = true)]
        polarization: Option<String>,
    },
    /// Nakai criterion on every wall curve.
    AmpleCheck {
        #[command(flatten)]
        source: FanSource,
        /// Ray name, `-K`, or a divisor file.
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        #[arg(long)]
        json: bool,
    },
    /// Stability of the tangent bundle.
    TangentStability {
        #[command(flatten)]
        source: FanSource,
        #[arg(long, allow_hyphen_values = true)]
        polarization: Option<String>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Stability of a reflexive sheaf given by filtrations.
    SheafStability {
        #[command(flatten)]
        source: FanSource,
        /// Sheaf file.
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        polarization: Option<String>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// List catalog labels or emit a catalog fan as a fan file.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Reproduce the tangent-bundle verdicts of the fourfold table.
    Table1 {
        #[command(flatten)]
        output: OutputFlags,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Emit { label: String },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FanSource {
    /// Fan file.
    #[arg(long)]
    pub fan: Option<PathBuf>,
    /// Catalog label, e.g. `D17`, `P3`, `kl(2;0,1)`, `bott(2;1)`.
    #[arg(long)]
    pub catalog: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputFlags {
    /// Machine-readable report.
    #[arg(long)]
    pub json: bool,
    /// Add decimal renderings of the exact slopes.
    #[arg(long)]
    pub decimal: bool,
}

struct LoadedFan {
    fan: Fan,
    default_polarization: Option<Divisor>,
}

fn load_fan(source: &FanSource) -> Result<LoadedFan, CliError> {
    let fan = match (&source.fan, &source.catalog) {
        (Some(path), _) => documents::parse_fan(&documents::read_text(path)?)?,
        (None, Some(label)) => entry(label)?.fan,
        (None, None) => return Err(CliError::validation("Usage", "pass --fan or --catalog")),
    };
    let default_polarization = is_fano(&fan).then(|| anticanonical(&fan));
    Ok(LoadedFan { fan, default_polarization })
}

/// A ray name, `-K`, or a path to a divisor file.
fn resolve_divisor(fan: &Fan, spec: &str) -> Result<Divisor, CliError> {
    if let Some(i) = fan.ray_index(spec) {
        return Ok(Divisor::prime(fan.num_rays(), i));
    }
    if spec == "-K" {
        return Ok(anticanonical(fan));
    }
    let path = Path::new(spec);
    if path.exists() {
        return documents::parse_divisor(&documents::read_text(path)?, fan);
    }
    Err(CliError::validation("UnknownRay", format!("{spec:?} is neither a ray name, -K, nor an existing file")))
}

fn resolve_polarization(loaded: &LoadedFan, spec: Option<&str>) -> Result<Divisor, CliError> {
    let h = match spec {
        Some(s) => resolve_divisor(&loaded.fan, s)?,
        None => loaded
            .default_polarization
            .clone()
            .ok_or_else(|| CliError::validation("NotFano", "fan is not Fano; pass an ample --polarization"))?,
    };
    if !is_ample(&loaded.fan, &h)? {
        return Err(CliError::validation("NotAmple", format!("polarization {h} is not ample")));
    }
    Ok(h)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}").map_err(io_error)
}

fn io_error(e: std::io::Error) -> CliError {
    let kind = if e.kind() == std::io::ErrorKind::BrokenPipe { "BrokenPipe" } else { "IoError" };
    CliError { kind: kind.into(), message: e.to_string(), code: 1 }
}

fn emit_report(out: &mut dyn Write, r: &StabilityReport, fan: &Fan, flags: &OutputFlags) -> Result<u8, CliError> {
    if flags.json {
        write_json(out, &report::to_json(r, fan, flags.decimal))?;
    } else {
        writeln!(out, "{}", report::to_text(r, fan, flags.decimal)).map_err(io_error)?;
    }
    Ok(if r.certificate == Certificate::HeuristicLattice { EXIT_HEURISTIC } else { 0 })
}

#[derive(Serialize)]
struct AmpleJson {
    ample: bool,
    nef: bool,
    wall_degrees: Vec<i64>,
}

#[derive(Serialize)]
struct Table1Row {
    label: String,
    description: String,
    verdict: String,
    expected: String,
    mu: String,
    max_sub_slope: Option<String>,
    matches: bool,
}

/// Runs one command, writing the report to `out`; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::FanCheck { source } => {
            let loaded = load_fan(source)?;
            let fan = &loaded.fan;
            let lines = [
                "ok: smooth complete fan".to_string(),
                format!("lattice rank: {}", fan.rank()),
                format!("rays: {}", fan.num_rays()),
                format!("maximal cones: {}", fan.max_cones().len()),
                format!("walls: {}", fan.walls().len()),
                format!("picard rank: {}", picard_rank(fan)),
                format!("fano: {}", if loaded.default_polarization.is_some() { "yes" } else { "no" }),
            ];
            writeln!(out, "{}", lines.join("\n")).map_err(io_error)?;
            Ok(0)
        }
        Command::Degree { source, divisor, polarization } => {
            let loaded = load_fan(source)?;
            let d = resolve_divisor(&loaded.fan, divisor)?;
            let h = resolve_polarization(&loaded, polarization.as_deref())?;
            writeln!(out, "{}", degree(&loaded.fan, &d, &h)?).map_err(io_error)?;
            Ok(0)
        }
        Command::AmpleCheck { source, divisor, json } => {
            let loaded = load_fan(source)?;
            let fan = &loaded.fan;
            let d = resolve_divisor(fan, divisor)?;
            let report = AmpleJson {
                ample: is_ample(fan, &d)?,
                nef: is_nef(fan, &d)?,
                wall_degrees: wall_intersections(fan, &d)?,
            };
            if *json {
                write_json(out, &report)?;
            } else {
                let verdict = match (report.ample, report.nef) {
                    (true, _) => "ample",
                    (false, true) => "nef, not ample",
                    (false, false) => "not nef",
                };
                writeln!(out, "{verdict}").map_err(io_error)?;
                for (w, x) in fan.walls().iter().zip(&report.wall_degrees) {
                    if *x <= 0 {
                        let names: Vec<&str> = w.rays.iter().map(|&i| fan.ray_names()[i].as_str()).collect();
                        writeln!(out, "  D.V({}) = {x}", names.join(", ")).map_err(io_error)?;
                    }
                }
            }
            Ok(0)
        }
        Command::TangentStability { source, polarization, output } => {
            let loaded = load_fan(source)?;
            let h = resolve_polarization(&loaded, polarization.as_deref())?;
            let r: StabilityReport = tangent_stability(&loaded.fan, &h)?;
            emit_report(out, &r, &loaded.fan, output)
        }
        Command::SheafStability { source, sheaf, polarization, output } => {
            let loaded = load_fan(source)?;
            let e = documents::parse_sheaf(&documents::read_text(sheaf)?, &loaded.fan)?;
            let h = resolve_polarization(&loaded, polarization.as_deref())?;
            let r: StabilityReport = reflexive_stability(&e, &loaded.fan, &h)?;
            emit_report(out, &r, &loaded.fan, output)
        }
        Command::Catalog { action: CatalogAction::List } => {
            for (label, description, _) in TABLE1.iter() {
                writeln!(out, "{label}\t{description}").map_err(io_error)?;
            }
            let families = [
                ("P<n>", "projective space"),
                ("H<a>", "Hirzebruch surface"),
                ("kl(s;a1,...,ar)", "P(O + O(a1) + ... + O(ar)) over P^s"),
                ("bott(k;c12,c13,...)", "Bott tower with the listed Bott numbers"),
                ("V<d>", "Del Pezzo variety of even dimension d"),
                ("tildeV<d>", "pseudo Del Pezzo variety of even dimension d"),
            ];
            for (pattern, description) in families {
                writeln!(out, "{pattern}\t{description}").map_err(io_error)?;
            }
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::Emit { label } } => {
            write_json(out, &documents::fan_document(&entry(label)?.fan))?;
            Ok(0)
        }
        Command::Table1 { output } => {
            let mut rows = Vec::new();
            for e in table1()? {
                let r: StabilityReport = tangent_stability(&e.fan, &anticanonical(&e.fan))?;
                let expected = e.expected_verdict.expect("tabulated");
                rows.push(Table1Row {
                    label: e.label,
                    description: e.description,
                    verdict: r.verdict.to_string(),
                    expected: expected.to_string(),
                    matches: r.verdict == expected,
                    mu: if output.decimal {
                        format!("{} ({})", r.mu, report::decimal(&r.mu))
                    } else {
                        r.mu.to_string()
                    },
                    max_sub_slope: r.max_sub_slope.as_ref().map(|m| m.to_string()),
                });
            }
            let mismatches = rows.iter().filter(|r| !r.matches).count();
            if output.json {
                write_json(out, &rows)?;
            } else {
                for r in &rows {
                    writeln!(
                        out,
                        "{:<4} {:<18} mu={:<16} max_sub={:<8} {}",
                        r.label,
                        r.verdict,
                        r.mu,
                        r.max_sub_slope.as_deref().unwrap_or("-"),
                        if r.matches { "ok".to_string() } else { format!("MISMATCH (expected {})", r.expected) }
                    )
                    .map_err(io_error)?;
                }
                writeln!(out, "{}/{} rows match", rows.len() - mismatches, rows.len()).map_err(io_error)?;
            }
            Ok(if mismatches == 0 { 0 } else { EXIT_MISMATCH })
        }
    }
}
