//! Invariants checked over the whole catalog and over random inputs.

use proptest::prelude::*;
use toric_core::catalog::{
    bott_tower, del_pezzo, hirzebruch, kleinschmidt, projective_space, pseudo_del_pezzo, pseudo_symmetric, table1,
    BottNumbers,
};
use toric_core::intersection::{anticanonical, is_ample, multiply, ChowCycle, Polarization, TInvariantDivisor};
use toric_core::linalg::{determinant, Subspace};
use toric_core::sheaf::{Filtration, ReflexiveSheaf};
use toric_core::stability::reflexive_stability_with;
use toric_core::{Divisor, Fan, LatticeVector, Rational, StabilityReport};

type Q = Rational;

fn catalog_fans() -> Vec<(String, Fan)> {
    let mut fans: Vec<(String, Fan)> = table1().unwrap().into_iter().map(|e| (e.label, e.fan)).collect();
    for n in 1..=4 {
        fans.push((format!("P{n}"), projective_space(n).unwrap()));
    }
    for a in 0..=3 {
        fans.push((format!("H{a}"), hirzebruch(a).unwrap()));
    }
    for d in [2, 4] {
        fans.push((format!("V{d}"), del_pezzo(d).unwrap()));
        fans.push((format!("tildeV{d}"), pseudo_del_pezzo(d).unwrap()));
    }
    fans.push(("P1xV2".into(), pseudo_symmetric(1, &[1], &[]).unwrap()));
    fans.push(("V2xtildeV2".into(), pseudo_symmetric(0, &[1], &[1]).unwrap()));
    for (k, c) in [(2, vec![1]), (3, vec![1, 0, 2]), (4, vec![1, 2, 0, 1, 1, 3])] {
        fans.push((format!("bott{k}"), bott_tower(&BottNumbers::from_upper(k, &c).unwrap()).unwrap()));
    }
    fans
}

/// Solves `v_ρ2 = -v_ρ1 - Σ b_i v_i` over the basis `τ ∪ {ρ1}` by Cramer's
/// rule and returns `D_ρ · V(τ)` for every ray.
fn wall_oracle(fan: &Fan, tau: &[usize], r1: usize, r2: usize) -> Vec<i64> {
    let mut basis: Vec<LatticeVector> = tau.iter().map(|&i| fan.ray(i).clone()).collect();
    basis.push(fan.ray(r1).clone());
    let det = determinant(&basis).unwrap();
    assert_eq!(det.abs(), 1);
    let mut out = vec![0; fan.num_rays()];
    for j in 0..basis.len() {
        let mut m = basis.clone();
        m[j] = fan.ray(r2).clone();
        let c = determinant(&m).unwrap() / det;
        if j < tau.len() {
            out[tau[j]] = -c;
        } else {
            assert_eq!(c, -1, "the outer rays enter with coefficient one");
        }
    }
    out[r1] = 1;
    out[r2] = 1;
    out
}

fn check_walls(name: &str, fan: &Fan) {
    for w in fan.walls() {
        let oracle = wall_oracle(fan, &w.rays, w.outer.0, w.outer.1);
        let curve = ChowCycle::orbit_closure(fan, &w.rays).unwrap();
        for (rho, expected) in oracle.iter().enumerate() {
            let d = TInvariantDivisor::<i64>::prime(fan.num_rays(), rho);
            let got = multiply(fan, &d, &curve).unwrap().degree();
            assert_eq!(got, *expected, "{name}: D_{rho} . V({:?})", w.rays);
            assert_eq!(w.intersection_with(rho), *expected, "{name}: stored relation on {:?}", w.rays);
        }
    }
}

#[test]
fn wall_relations_on_every_catalog_fan() {
    for (name, fan) in catalog_fans() {
        check_walls(&name, &fan);
    }
}

#[test]
fn tangent_first_chern_class_is_anticanonical() {
    for (name, fan) in catalog_fans() {
        let t = ReflexiveSheaf::<Q>::tangent_bundle(&fan);
        assert_eq!(t.c1(), anticanonical(&fan), "{name}");
        assert_eq!(t.rank(), fan.rank(), "{name}");
    }
}

#[test]
fn cotangent_dualizes_to_tangent() {
    for (name, fan) in catalog_fans() {
        let t = ReflexiveSheaf::<Q>::tangent_bundle(&fan);
        let o = ReflexiveSheaf::<Q>::cotangent_bundle(&fan);
        assert_eq!(o.dual(), t, "{name}");
        assert_eq!(t.dual(), o, "{name}");
    }
}

#[test]
fn anticanonical_degrees_are_positive() {
    for (name, fan) in catalog_fans() {
        if let Ok(pol) = Polarization::new(&fan, &anticanonical(&fan)) {
            assert!(pol.ray_degrees().iter().all(|&d| d > 0), "{name}: {:?}", pol.ray_degrees());
        }
    }
}

fn random_fan() -> impl Strategy<Value = Fan> {
    prop_oneof![
        (0i64..5).prop_map(|a| hirzebruch(a).unwrap()),
        (1usize..4, prop::collection::vec(0i64..3, 1..3)).prop_map(|(s, mut t)| {
            t.sort_unstable();
            kleinschmidt(s, &t).unwrap()
        }),
        (2usize..5).prop_flat_map(|k| prop::collection::vec(0i64..4, k * (k - 1) / 2)
            .prop_map(move |c| bott_tower(&BottNumbers::from_upper(k, &c).unwrap()).unwrap())),
    ]
}

/// A random ample divisor: `m(-K)` perturbed, rejected until ample.
fn ample_on(fan: &Fan, perturbation: &[i64], m: i64) -> Option<Divisor> {
    let k = anticanonical(fan);
    let coeffs: Vec<i64> = k.coeffs().iter().zip(perturbation.iter().cycle()).map(|(a, p)| m * a + p).collect();
    let h = Divisor::new(coeffs);
    is_ample(fan, &h).unwrap().then_some(h)
}

fn small_vector(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..3, n)
}

fn random_rank2_sheaf(num_rays: usize) -> impl Strategy<Value = ReflexiveSheaf<Q>> {
    let filtration = (small_vector(2), -2i64..3, 0i64..3).prop_map(|(v, start, gap)| {
        if v.iter().all(|&x| x == 0) || gap == 0 {
            return Filtration::single(2, start);
        }
        let line = Subspace::span(2, vec![v.iter().map(|&x| Q::from_integer(x.into())).collect()]).unwrap();
        Filtration::new(2, vec![(start, line), (start + gap, Subspace::full(2))]).unwrap()
    });
    prop::collection::vec(filtration, num_rays).prop_map(|f| ReflexiveSheaf::new(2, f).unwrap())
}

fn p2() -> Fan {
    projective_space(2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_fans_satisfy_wall_relations(fan in random_fan()) {
        check_walls("random", &fan);
    }

    #[test]
    fn degrees_positive_under_ample(fan in random_fan(), p in small_vector(6), m in 1i64..4) {
        if let Some(h) = ample_on(&fan, &p, m) {
            let pol = Polarization::new(&fan, &h).unwrap();
            prop_assert!(pol.ray_degrees().iter().all(|&d| d > 0), "{:?} under {:?}", pol.ray_degrees(), h);
        }
    }

    #[test]
    fn dual_is_an_involution(e in random_rank2_sheaf(3)) {
        prop_assert_eq!(e.dual().dual(), e.clone());
        let neg: Vec<i64> = e.c1().coeffs().iter().map(|x| -x).collect();
        prop_assert_eq!(e.dual().c1(), Divisor::new(neg));
    }

    #[test]
    fn chern_class_is_additive(e in random_rank2_sheaf(3), f in random_rank2_sheaf(3)) {
        let s = e.direct_sum(&f).unwrap();
        prop_assert_eq!(s.rank(), 4);
        prop_assert_eq!(s.c1(), e.c1().add(&f.c1()));
        let t = e.tensor(&f).unwrap();
        prop_assert_eq!(t.rank(), 4);
        prop_assert_eq!(t.c1(), e.c1().scale(&2).add(&f.c1().scale(&2)));
    }

    #[test]
    fn tensor_with_line_bundle_shifts_c1(e in random_rank2_sheaf(3), d in small_vector(3)) {
        let l = ReflexiveSheaf::<Q>::line_bundle(&Divisor::new(d.clone()));
        let t = e.tensor(&l).unwrap();
        prop_assert_eq!(t.c1(), e.c1().add(&Divisor::new(d).scale(&2)));
    }

    #[test]
    fn witness_reproduces_max_slope(e in random_rank2_sheaf(3), h in 1i64..4) {
        let fan = p2();
        let pol = Polarization::new(&fan, &Divisor::new(vec![h, 0, 0])).unwrap();
        let r: StabilityReport = reflexive_stability_with(&e, &pol).unwrap();
        if let (Some(max), Some(w)) = (r.max_sub_slope.clone(), r.witness.subspace()) {
            prop_assert_eq!(e.slope_of_subspace(w, &pol).unwrap(), max);
        }
    }

    #[test]
    fn subspace_form_is_canonical(vs in prop::collection::vec(small_vector(4), 1..4), k in 1i64..4) {
        let to_q = |v: &Vec<i64>| v.iter().map(|&x| Q::from_integer(x.into())).collect::<Vec<Q>>();
        let a = Subspace::span(4, vs.iter().map(to_q)).unwrap();
        // Same span from reversed, rescaled and accumulated generators.
        let mut acc = vec![0i64; 4];
        let mut gens = Vec::new();
        for v in vs.iter().rev() {
            for (x, y) in acc.iter_mut().zip(v) {
                *x += k * y;
            }
            gens.push(acc.clone());
        }
        let b = Subspace::span(4, gens.iter().map(to_q)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.annihilator().annihilator(), a.clone());
        prop_assert_eq!(a.dim() + a.annihilator().dim(), 4);
    }
}
