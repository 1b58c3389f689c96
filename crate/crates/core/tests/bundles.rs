//! Rank-two bundles on Bott towers and pseudo-symmetric varieties, and the
//! stability threshold of `E_{1,2}` on a Bott tower.

use itertools::Itertools;
use toric_core::catalog::{
    bott_bundle, bott_tower, del_pezzo, del_pezzo_bundle, pseudo_del_pezzo, pseudo_symmetric,
    pullback_along_projection, BottNumbers, DelPezzoBundleSpec,
};
use toric_core::intersection::{degree_polynomial, is_ample, power, Polarization};
use toric_core::sheaf::{Decomposability, Filtration, ReflexiveSheaf};
use toric_core::stability::reflexive_stability_with;
use toric_core::{Divisor, Fan, Rational, StabilityReport, Subspace, Verdict};

type Q = Rational;

fn bott_numbers() -> Vec<BottNumbers> {
    let mut out = Vec::new();
    for (k, entries) in [
        (2, vec![0]),
        (2, vec![1]),
        (2, vec![3]),
        (3, vec![0, 0, 0]),
        (3, vec![1, 0, 1]),
        (3, vec![1, 2, 1]),
        (3, vec![2, 1, 0]),
        (4, vec![0, 0, 0, 0, 0, 0]),
        (4, vec![1, 0, 2, 1, 0, 1]),
        (4, vec![1, 1, 1, 1, 1, 1]),
    ] {
        out.push(BottNumbers::from_upper(k, &entries).unwrap());
    }
    out
}

/// `D_{k+1} + b D_{k+2} + D_{k+3} + ... + D_{2k}`.
fn bott_polarization(k: usize, b: i64) -> Divisor {
    let mut h = vec![0; 2 * k];
    for (i, x) in h.iter_mut().enumerate().skip(k) {
        *x = if i == k + 1 { b } else { 1 };
    }
    Divisor::new(h)
}

#[test]
fn bott_curve_class_is_a_nonnegative_wall_combination() {
    let mut tested = 0;
    for c in bott_numbers() {
        let k = c.height();
        let fan = bott_tower(&c).unwrap();
        let mut b_free: Option<Vec<(Vec<usize>, i64)>> = None;
        for b in 1..=4 {
            let h = bott_polarization(k, b);
            if !is_ample(&fan, &h).unwrap() {
                continue;
            }
            tested += 1;
            let curve = power(&fan, &h, k - 1).unwrap();
            for (tau, a) in curve.terms() {
                assert!(*a >= 0, "{c:?} b={b}: coefficient {a} on {tau:?}");
                assert!(tau.iter().all(|&r| r >= k), "{c:?} b={b}: {tau:?} leaves v_(k+1)..v_2k");
                assert!(fan.contains_cone(tau), "{c:?}: {tau:?} is not a wall");
            }
            // Only walls through v_{k+2} may depend on b.
            let rest: Vec<(Vec<usize>, i64)> =
                curve.terms().iter().filter(|(t, _)| !t.contains(&(k + 1))).map(|(t, a)| (t.clone(), *a)).collect();
            match &b_free {
                None => b_free = Some(rest),
                Some(prev) => assert_eq!(prev, &rest, "{c:?}: b leaks outside v_(k+2) walls"),
            }
        }
    }
    assert!(tested >= 20, "only {tested} ample polarizations");
}

fn valid_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=k).flat_map(move |p| (1..=2 * k).filter(move |&q| q != p && q != k + p).map(move |q| (p, q)))
}

#[test]
fn bott_bundles_are_indecomposable_and_locally_free() {
    for c in bott_numbers().into_iter().filter(|c| c.height() <= 3) {
        let k = c.height();
        let fan = bott_tower(&c).unwrap();
        for (p, q) in valid_pairs(k) {
            let e: ReflexiveSheaf<Q> = bott_bundle(&c, p, q).unwrap().on_fan(&fan).unwrap();
            assert!(e.is_locally_free(&fan).unwrap(), "{c:?} p={p} q={q}");
            assert_eq!(e.is_decomposable().unwrap(), Decomposability::Indecomposable, "{c:?} p={p} q={q}");
            let mut expected = vec![0; 2 * k];
            for r in [p, q, k + p] {
                expected[r - 1] += 1;
            }
            assert_eq!(e.c1(), Divisor::new(expected), "{c:?} p={p} q={q}");
        }
    }
}

#[test]
fn bott_bundle_rejects_invalid_indices() {
    let c = BottNumbers::from_upper(2, &[1]).unwrap();
    for (p, q) in [(0, 2), (3, 1), (1, 1), (1, 3), (1, 5)] {
        assert!(bott_bundle::<Q>(&c, p, q).is_err(), "p={p} q={q}");
    }
}

fn line(a: i64, b: i64) -> Subspace {
    Subspace::span(2, vec![vec![Q::from_integer(a.into()), Q::from_integer(b.into())]]).unwrap()
}

/// `E_{p,q}` built from three arbitrary distinct lines.
fn bott_bundle_with(k: usize, p: usize, q: usize, lines: [Subspace; 3]) -> ReflexiveSheaf<Q> {
    let mut f = vec![Filtration::single(2, 0); 2 * k];
    for (r, l) in [p - 1, q - 1, k + p - 1].into_iter().zip(lines) {
        f[r] = Filtration::new(2, vec![(-1, l), (0, Subspace::full(2))]).unwrap();
    }
    ReflexiveSheaf::new(2, f).unwrap()
}

#[test]
fn line_choice_does_not_change_stability() {
    let c = BottNumbers::from_upper(3, &[1, 0, 1]).unwrap();
    let fan = bott_tower(&c).unwrap();
    let choices = [
        [line(1, 0), line(0, 1), line(1, 1)],
        [line(1, 2), line(3, -1), line(0, 1)],
        [line(2, 5), line(1, 1), line(-4, 3)],
    ];
    for b in [1, 3, 7] {
        let pol = Polarization::new(&fan, &bott_polarization(3, b)).unwrap();
        for (p, q) in valid_pairs(3) {
            let reports: Vec<StabilityReport> = choices
                .iter()
                .map(|ls| reflexive_stability_with(&bott_bundle_with(3, p, q, ls.clone()), &pol).unwrap())
                .collect();
            for r in &reports[1..] {
                assert_eq!(r.verdict, reports[0].verdict, "b={b} p={p} q={q}");
                assert_eq!(r.mu, reports[0].mu);
                assert_eq!(r.max_sub_slope, reports[0].max_sub_slope);
            }
        }
    }
}

fn del_pezzo_specs(n: usize, pseudo: bool) -> Vec<DelPezzoBundleSpec> {
    let lo = usize::from(pseudo);
    let mut out = Vec::new();
    for (a, b) in (0..=n).cartesian_product(0..=n).filter(|(a, b)| a != b) {
        if a >= lo {
            out.push(DelPezzoBundleSpec::TwoPlusOne { a, b });
        }
        if a >= lo && b >= lo {
            out.push(DelPezzoBundleSpec::OnePlusTwo { a, b });
        }
    }
    out
}

fn assert_indecomposable_bundle(fan: &Fan, e: &ReflexiveSheaf<Q>, what: &str) {
    assert!(e.is_locally_free(fan).unwrap(), "{what} is not locally free");
    assert_eq!(e.is_decomposable().unwrap(), Decomposability::Indecomposable, "{what}");
}

#[test]
fn del_pezzo_bundles_are_indecomposable_and_locally_free() {
    for dim in [2, 4] {
        for (pseudo, fan) in [(false, del_pezzo(dim).unwrap()), (true, pseudo_del_pezzo(dim).unwrap())] {
            for spec in del_pezzo_specs(dim, pseudo) {
                let e: ReflexiveSheaf<Q> = del_pezzo_bundle(&fan, spec).unwrap();
                assert_indecomposable_bundle(&fan, &e, &format!("dim {dim} pseudo={pseudo} {spec:?}"));
            }
        }
    }
}

#[test]
fn pseudo_del_pezzo_has_no_w0() {
    let fan = pseudo_del_pezzo(2).unwrap();
    assert!(del_pezzo_bundle::<Q>(&fan, DelPezzoBundleSpec::TwoPlusOne { a: 0, b: 1 }).is_err());
    assert!(del_pezzo_bundle::<Q>(&fan, DelPezzoBundleSpec::TwoPlusOne { a: 1, b: 1 }).is_err());
}

#[test]
fn pullbacks_to_pseudo_symmetric_products_stay_indecomposable() {
    let cases: [(usize, &[usize], &[usize]); 4] = [(1, &[1], &[]), (0, &[1], &[1]), (2, &[], &[1]), (1, &[1], &[1])];
    for (s, ks, ls) in cases {
        let product = pseudo_symmetric(s, ks, ls).unwrap();
        let factors: Vec<(usize, Fan, bool)> = ks
            .iter()
            .map(|&k| (del_pezzo(2 * k).unwrap(), false))
            .chain(ls.iter().map(|&l| (pseudo_del_pezzo(2 * l).unwrap(), true)))
            .enumerate()
            .map(|(i, (f, p))| (s + i, f, p))
            .collect();
        for (index, factor, pseudo) in factors {
            for spec in del_pezzo_specs(factor.rank(), pseudo).into_iter().take(6) {
                let e: ReflexiveSheaf<Q> = del_pezzo_bundle(&factor, spec).unwrap();
                let pulled = pullback_along_projection(&product, index, &e).unwrap();
                assert_eq!(pulled.num_rays(), product.num_rays());
                assert_indecomposable_bundle(
                    &product,
                    &pulled,
                    &format!("({s},{ks:?},{ls:?}) factor {index} {spec:?}"),
                );
            }
        }
    }
}

/// Smallest integer `b0 >= 1` with `E_{1,2}` stable for every `b >= b0`,
/// from the degree polynomials alone. Each rank-one subsheaf `O(D_j)`,
/// `j in {1, 2, k+1}`, must satisfy `deg(c_1 - 2 D_j) > 0`; beyond the
/// Cauchy bound the sign is that of the leading coefficient.
fn threshold(fan: &Fan, k: usize) -> i64 {
    let mut c1 = vec![0; 2 * k];
    for r in [0, 1, k] {
        c1[r] += 1;
    }
    let mut polys = Vec::new();
    for j in [0, 1, k] {
        let mut d = c1.clone();
        d[j] -= 2;
        let d = Divisor::new(d);
        let p = degree_polynomial::<Q>(fan, |b| (d.clone(), bott_polarization(k, b)), k - 1).unwrap();
        let lead = p.coeffs().last().cloned().expect("nonzero polynomial");
        assert!(lead > Q::from_integer(0.into()), "eventually positive for large b");
        polys.push(p);
    }
    let bound = polys.iter().filter_map(|p| p.root_bound()).max().unwrap();
    let top = bound.ceil().to_integer().try_into().unwrap_or(i64::MAX).max(1);
    let bad =
        (1..=top).filter(|&b| polys.iter().any(|p| p.eval(&Q::from_integer(b.into())) <= Q::from_integer(0.into())));
    bad.max().map_or(1, |b| b + 1)
}

#[test]
fn bott_bundle_is_stable_beyond_the_threshold() {
    let cases = [
        (2, vec![1]),
        (3, vec![1, 0, 1]),
        (3, vec![1, 1, 1]),
        (3, vec![2, 1, 1]),
        (3, vec![0, 2, 0]),
        (3, vec![1, 3, 0]),
    ];
    for (k, entries) in cases {
        let c = BottNumbers::from_upper(k, &entries).unwrap();
        let fan = bott_tower(&c).unwrap();
        let b0 = threshold(&fan, k);
        let e: ReflexiveSheaf<Q> = bott_bundle(&c, 1, 2).unwrap();
        for b in b0..b0 + 8 {
            let pol = Polarization::new(&fan, &bott_polarization(k, b)).unwrap();
            let r = reflexive_stability_with(&e, &pol).unwrap();
            assert_eq!(r.verdict, Verdict::Stable, "k={k} c={entries:?} b={b} (b0={b0})");
        }
        if b0 > 1 {
            let pol = Polarization::new(&fan, &bott_polarization(k, b0 - 1)).unwrap();
            let r = reflexive_stability_with(&e, &pol).unwrap();
            assert_ne!(r.verdict, Verdict::Stable, "k={k} c={entries:?} b={}", b0 - 1);
        }
    }
}
