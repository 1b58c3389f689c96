//! Closed forms on projectivized split bundles over projective space
//! against direct enumeration on the fan.

use toric_core::catalog::kleinschmidt;
use toric_core::intersection::{anticanonical, linearly_equivalent, Polarization};
use toric_core::stability::{kleinschmidt_degrees, kleinschmidt_verdict, tangent_stability_with, StabilityError};
use toric_core::{Divisor, Fan, Rational, StabilityReport, Verdict};

fn polarization(fan: &Fan, s: usize, a: i64, b: i64) -> Polarization {
    let mut h = vec![0; fan.num_rays()];
    h[fan.ray_index("v0").unwrap()] = a;
    h[fan.ray_index("e0").unwrap()] = b;
    assert_eq!(fan.ray_index("e0"), Some(s + 1));
    Polarization::new(fan, &Divisor::new(h)).unwrap()
}

fn unit_last(r: usize) -> Vec<i64> {
    let mut t = vec![0; r];
    t[r - 1] = 1;
    t
}

fn grid() -> impl Iterator<Item = (usize, usize, i64, i64)> {
    (1..=4usize).flat_map(|s| {
        (1..=5 - s).flat_map(move |r| (1..=4i64).flat_map(move |a| (1..=4i64).map(move |b| (s, r, a, b))))
    })
}

fn agree(closed: &StabilityReport, direct: &StabilityReport) -> Result<(), String> {
    if closed.verdict != direct.verdict {
        return Err(format!("verdict {} vs {}", closed.verdict, direct.verdict));
    }
    if closed.mu != direct.mu {
        return Err(format!("mu {} vs {}", closed.mu, direct.mu));
    }
    if closed.max_sub_slope != direct.max_sub_slope {
        return Err(format!("max {:?} vs {:?}", closed.max_sub_slope, direct.max_sub_slope));
    }
    Ok(())
}

#[test]
fn closed_form_degrees_match_the_chow_ring() {
    for (s, r, a, b) in grid() {
        let fan = kleinschmidt(s, &unit_last(r)).unwrap();
        let pol = polarization(&fan, s, a, b);
        let (dv, de) = kleinschmidt_degrees::<Rational>(s, r, a, b);
        let deg = pol.ray_degrees();
        assert_eq!(dv, Rational::from_integer(deg[0].into()), "s={s} r={r} a={a} b={b}");
        assert_eq!(de, Rational::from_integer(deg[s + 1].into()), "s={s} r={r} a={a} b={b}");
    }
}

#[test]
fn unit_twist_closed_form_matches_enumeration() {
    let mut failures = Vec::new();
    for (s, r, a, b) in grid() {
        let twists = unit_last(r);
        let fan = kleinschmidt(s, &twists).unwrap();
        let direct: StabilityReport = tangent_stability_with(&fan, &polarization(&fan, s, a, b));
        let closed: StabilityReport = kleinschmidt_verdict(s, &twists, a, b).unwrap();
        if let Err(e) = agree(&closed, &direct) {
            failures.push(format!("s={s} r={r} a={a} b={b}: {e}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn product_closed_form_matches_enumeration() {
    let mut failures = Vec::new();
    for (s, r, a, b) in grid() {
        let twists = vec![0; r];
        let fan = kleinschmidt(s, &twists).unwrap();
        let direct: StabilityReport = tangent_stability_with(&fan, &polarization(&fan, s, a, b));
        let closed: StabilityReport = kleinschmidt_verdict(s, &twists, a, b).unwrap();
        if let Err(e) = agree(&closed, &direct) {
            failures.push(format!("s={s} r={r} a={a} b={b}: {e}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn other_twists_are_unstable() {
    for twists in [vec![2], vec![0, 2], vec![1, 1], vec![1, 2], vec![0, 0, 3]] {
        for s in 1..=5 - twists.len() {
            let r: StabilityReport = kleinschmidt_verdict(s, &twists, 1, 1).unwrap();
            assert_eq!(r.verdict, Verdict::Unstable, "s={s} {twists:?}");
        }
    }
}

/// `-K` written as `a D_{v0} + b D_{e0}`.
fn anticanonical_coordinates(fan: &Fan, s: usize) -> (i64, i64) {
    let k = anticanonical(fan);
    for a in 1..=12 {
        for b in 1..=12 {
            let mut h = vec![0; fan.num_rays()];
            h[0] = a;
            h[s + 1] = b;
            if linearly_equivalent(fan, &k, &Divisor::new(h)).unwrap() {
                return (a, b);
            }
        }
    }
    panic!("-K not found in the (v0, e0) span");
}

#[test]
fn anticanonical_unit_twist_line_bundle() {
    for s in 1..=5 {
        let fan = kleinschmidt(s, &[1]).unwrap();
        let (a, b) = anticanonical_coordinates(&fan, s);
        let r: StabilityReport = kleinschmidt_verdict(s, &[1], a, b).unwrap();
        let expected = if s == 1 { Verdict::StrictlySemistable } else { Verdict::Unstable };
        assert_eq!(r.verdict, expected, "s={s}");
        let direct: StabilityReport =
            tangent_stability_with(&fan, &Polarization::new(&fan, &anticanonical(&fan)).unwrap());
        assert_eq!(direct.verdict, expected, "s={s}");
    }
}

#[test]
fn anticanonical_products_are_strictly_semistable() {
    for s in 1..=4 {
        for r in 1..=5 - s {
            let fan = kleinschmidt(s, &vec![0; r]).unwrap();
            let (a, b) = anticanonical_coordinates(&fan, s);
            assert_eq!((a, b), (s as i64 + 1, r as i64 + 1));
            let rep: StabilityReport = kleinschmidt_verdict(s, &vec![0; r], a, b).unwrap();
            assert_eq!(rep.verdict, Verdict::StrictlySemistable, "s={s} r={r}");
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(kleinschmidt_verdict::<Rational>(0, &[1], 1, 1), Err(StabilityError::InvalidParameters(_))));
    assert!(matches!(kleinschmidt_verdict::<Rational>(2, &[], 1, 1), Err(StabilityError::InvalidParameters(_))));
    assert!(matches!(kleinschmidt_verdict::<Rational>(2, &[1, 0], 1, 1), Err(StabilityError::InvalidParameters(_))));
    assert!(matches!(kleinschmidt_verdict::<Rational>(2, &[1], 0, 1), Err(StabilityError::NotAmple)));
}
