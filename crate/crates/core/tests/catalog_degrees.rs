//! Degrees, slopes and destabilizing subsheaves of the tabulated fourfolds
//! under `-K`, checked against reference values.

use toric_core::catalog::batyrev_picard3;
use toric_core::intersection::Polarization;
use toric_core::sheaf::ReflexiveSheaf;
use toric_core::stability::tangent_stability_with;
use toric_core::{Rational, StabilityReport, Subspace, Verdict};

struct Row {
    label: &'static str,
    degrees: &'static [(&'static str, i64)],
    mu: (i64, i64),
    verdict: Verdict,
    /// Rays spanning a subsheaf and its slope.
    witness: Option<(&'static [&'static str], (i64, i64))>,
    /// Exact maximal subsheaf slope, where known.
    max_sub: Option<(i64, i64)>,
}

const ROWS: &[Row] = &[
    Row {
        label: "D7",
        degrees: &[("u0", 54), ("v0", 54), ("e0", 126)],
        mu: (243, 2),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (126, 1))),
        max_sub: None,
    },
    Row {
        label: "D17",
        degrees: &[("u0", 54), ("v0", 54), ("e0", 99), ("e1", 45), ("e2", 45)],
        mu: (405, 4),
        verdict: Verdict::Stable,
        witness: None,
        max_sub: Some((99, 1)),
    },
    Row {
        label: "D1",
        degrees: &[("w0", 62), ("z0", 80), ("e0", 225)],
        mu: (148, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (228, 1))),
        max_sub: None,
    },
    Row {
        label: "D6",
        degrees: &[("w0", 56), ("z0", 76), ("e0", 144)],
        mu: (124, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (156, 1))),
        max_sub: None,
    },
    Row {
        label: "D18",
        degrees: &[("w0", 62), ("z0", 64), ("e0", 75)],
        mu: (100, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["w0", "e0"], (104, 1))),
        max_sub: None,
    },
    Row {
        label: "D19",
        degrees: &[("w0", 56), ("z0", 68), ("e0", 48)],
        mu: (100, 1),
        verdict: Verdict::Stable,
        witness: None,
        max_sub: None,
    },
    Row {
        label: "D12",
        degrees: &[("v0", 72), ("e0'", 96), ("e0", 56)],
        mu: (112, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0'"], (120, 1))),
        max_sub: None,
    },
    Row {
        label: "D9",
        degrees: &[("v0", 72), ("e0'", 98), ("e0", 98)],
        mu: (116, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0'"], (124, 1))),
        max_sub: None,
    },
    Row {
        label: "D8",
        degrees: &[("v0", 74), ("e0'", 98), ("e0", 117)],
        mu: (120, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (136, 1))),
        max_sub: None,
    },
    Row {
        label: "D3",
        degrees: &[("v0", 78), ("e0'", 104), ("e0", 189)],
        mu: (140, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (196, 1))),
        max_sub: None,
    },
    Row {
        label: "D16",
        degrees: &[("v0", 70), ("e0'", 96), ("e0", 63)],
        mu: (108, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0'", "e0"], (111, 1))),
        max_sub: None,
    },
    Row {
        label: "D5",
        degrees: &[("v0", 72), ("e0'", 150), ("e0", 62)],
        mu: (124, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0'"], (156, 1))),
        max_sub: None,
    },
    Row {
        label: "D2",
        degrees: &[("v0", 76), ("e0'", 158), ("e0", 171)],
        mu: (144, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0'"], (158, 1))),
        max_sub: None,
    },
    Row {
        label: "D11",
        degrees: &[("v3", 54), ("v4", 81), ("e0", 108)],
        mu: (459, 4),
        verdict: Verdict::Unstable,
        witness: Some((&["e0", "e1", "e2"], (243, 2))),
        max_sub: None,
    },
    Row {
        label: "D10",
        degrees: &[("v0", 56), ("e0'", 92), ("e0", 112)],
        mu: (116, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (132, 1))),
        max_sub: None,
    },
    Row {
        label: "D4",
        degrees: &[("v0", 62), ("e0'", 98), ("e0", 200)],
        mu: (140, 1),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (204, 1))),
        max_sub: None,
    },
    Row {
        label: "E1",
        degrees: &[("v0", 76), ("e0", 216), ("u_tau", 21)],
        mu: (605, 4),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (217, 1))),
        max_sub: None,
    },
    Row {
        label: "E2",
        degrees: &[("v0", 61), ("e0", 125), ("u_tau", 28)],
        mu: (489, 4),
        verdict: Verdict::Unstable,
        witness: Some((&["e0"], (133, 1))),
        max_sub: None,
    },
    Row {
        label: "E3",
        degrees: &[("v0", 48), ("e0", 64), ("u_tau", 37), ("v1", 85)],
        mu: (431, 4),
        verdict: Verdict::Stable,
        witness: Some((&["v0", "v1", "v2", "v3"], (101, 1))),
        max_sub: Some((101, 1)),
    },
    Row {
        label: "G1",
        degrees: &[("v3", 61), ("v6", 55), ("v7", 176)],
        mu: (529, 4),
        verdict: Verdict::Unstable,
        witness: Some((&["v1"], (181, 1))),
        max_sub: None,
    },
    Row {
        label: "G2",
        degrees: &[("v0", 44), ("e0", 111), ("u_tau", 29), ("e1", 111), ("e2", 9)],
        mu: (225, 2),
        verdict: Verdict::Unstable,
        witness: Some((&["e0", "e1", "e2"], (231, 2))),
        max_sub: None,
    },
    Row {
        label: "G3",
        degrees: &[("v0", 81), ("e0", 108), ("u_tau", 28), ("e1", 55), ("e2", 55)],
        mu: (433, 4),
        verdict: Verdict::Unstable,
        witness: Some((&["e0", "e1", "e2"], (109, 1))),
        max_sub: None,
    },
    Row {
        label: "G6",
        degrees: &[("v0", 36), ("e0", 36), ("u_tau", 37), ("v1", 73), ("e1", 73)],
        mu: (401, 4),
        verdict: Verdict::Stable,
        witness: Some((&["v0", "v1", "v2"], (91, 1))),
        max_sub: None,
    },
    Row {
        label: "G4",
        degrees: &[("v0", 32), ("e0", 63), ("u_tau", 41)],
        mu: (417, 4),
        verdict: Verdict::Stable,
        witness: None,
        max_sub: None,
    },
    Row {
        label: "G5",
        degrees: &[("v0", 28), ("e0", 81), ("u_tau", 45)],
        mu: (203, 2),
        verdict: Verdict::Stable,
        witness: None,
        max_sub: None,
    },
];

fn q((n, d): (i64, i64)) -> Rational {
    Rational::new(n.into(), d.into())
}

fn check(row: &Row) -> Result<(), String> {
    let entry = batyrev_picard3(row.label).map_err(|e| e.to_string())?;
    let fan = &entry.fan;
    let h = entry.default_polarization.clone().ok_or("not Fano")?;
    let pol = Polarization::new(fan, &h).map_err(|e| e.to_string())?;
    for (name, d) in row.degrees {
        let i = fan.ray_index(name).ok_or(format!("no ray {name}"))?;
        let got = pol.ray_degrees()[i];
        if got != *d {
            return Err(format!("deg D_{name} = {got}, expected {d}"));
        }
    }
    let report: StabilityReport = tangent_stability_with(fan, &pol);
    if report.mu != q(row.mu) {
        return Err(format!("mu = {}, expected {}", report.mu, q(row.mu)));
    }
    if report.verdict != row.verdict {
        return Err(format!("verdict {} (max {:?}), expected {}", report.verdict, report.max_sub_slope, row.verdict));
    }
    if let Some((rays, slope)) = row.witness {
        let idx: Vec<usize> = rays.iter().map(|n| fan.ray_index(n).expect("ray")).collect();
        let gens: Vec<_> = idx.iter().map(|&i| fan.ray(i).clone()).collect();
        let span = Subspace::from_lattice(fan.rank(), &gens).map_err(|e| e.to_string())?;
        let t = ReflexiveSheaf::tangent_bundle(fan);
        let got = t.induced_subsheaf(&span).map_err(|e| e.to_string())?.slope(&pol);
        if got != q(slope) {
            return Err(format!("slope of Span{rays:?} = {got}, expected {}", q(slope)));
        }
        let max = report.max_sub_slope.clone().ok_or("no subsheaf")?;
        if max < got {
            return Err(format!("max sub slope {max} below a known subsheaf slope {got}"));
        }
    }
    if let Some(m) = row.max_sub {
        if report.max_sub_slope != Some(q(m)) {
            return Err(format!("max sub slope {:?}, expected {}", report.max_sub_slope, q(m)));
        }
    }
    Ok(())
}

#[test]
fn reference_degree_tables() {
    let failures: Vec<String> =
        ROWS.iter().filter_map(|r| check(r).err().map(|e| format!("{}: {e}", r.label))).collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
