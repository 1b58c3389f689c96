//! Slope stability of equivariant reflexive sheaves, by comparing `μ(E)`
//! with the slopes of equivariant saturated subsheaves.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::catalog::{kleinschmidt, CatalogError};
use crate::fan::{mask_of, Fan, FanError};
use crate::intersection::{anticanonical, is_fano, IntersectionError, Polarization, TInvariantDivisor};
use crate::linalg::{LinalgError, Subspace, SubspaceLattice, LATTICE_CAP};
use crate::scalar::Field;
use crate::sheaf::{ReflexiveSheaf, SheafError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Verdict {
    pub fn is_semistable(self) -> bool {
        self != Verdict::Unstable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "Stable",
            Verdict::StrictlySemistable => "StrictlySemistable",
            Verdict::Unstable => "Unstable",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s {
            "Stable" => Some(Verdict::Stable),
            "StrictlySemistable" => Some(Verdict::StrictlySemistable),
            "Unstable" => Some(Verdict::Unstable),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How much of the subsheaf space the search covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Every equivariant saturated subsheaf was accounted for.
    Complete,
    /// Only lattice-generated and generic candidates were tried (rank >= 3).
    HeuristicLattice,
}

impl Certificate {
    pub fn as_str(self) -> &'static str {
        match self {
            Certificate::Complete => "Complete",
            Certificate::HeuristicLattice => "HeuristicLattice",
        }
    }
}

/// A subsheaf attaining the maximal slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness<F> {
    /// No proper subsheaf exists (rank one).
    Trivial,
    /// `F = Span(rays)` in `T_X`; `rays` is every ray lying in `F`.
    Rays {
        rays: Vec<usize>,
        span: Subspace<F>,
    },
    Subspace(Subspace<F>),
}

impl<F: Field> Witness<F> {
    pub fn subspace(&self) -> Option<&Subspace<F>> {
        match self {
            Witness::Trivial => None,
            Witness::Rays { span, .. } => Some(span),
            Witness::Subspace(s) => Some(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport<F> {
    pub verdict: Verdict,
    pub mu: F,
    pub max_sub_slope: Option<F>,
    pub witness: Witness<F>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("polarization is not ample")]
    NotAmple,
    #[error("factor {0} is not Fano")]
    NotFano(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Intersection(IntersectionError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<IntersectionError> for StabilityError {
    fn from(e: IntersectionError) -> Self {
        match e {
            IntersectionError::NotAmple => StabilityError::NotAmple,
            other => StabilityError::Intersection(other),
        }
    }
}

fn verdict_of<F: Field>(max: Option<&F>, mu: &F) -> Verdict {
    match max.map(|m| m.cmp(mu)) {
        None | Some(Ordering::Less) => Verdict::Stable,
        Some(Ordering::Equal) => Verdict::StrictlySemistable,
        Some(Ordering::Greater) => Verdict::Unstable,
    }
}

fn ratio<F: Field>(num: i64, den: usize) -> F {
    F::from_int(num) / F::from_int(den as i64)
}

/// Stability of `T_X` with respect to the ample divisor `h`.
pub fn tangent_stability<F: Field>(
    fan: &Fan,
    h: &TInvariantDivisor<i64>,
) -> Result<StabilityReport<F>, StabilityError> {
    let pol = Polarization::new(fan, h)?;
    Ok(tangent_stability_with(fan, &pol))
}

/// As [`tangent_stability`], with degrees already computed.
pub fn tangent_stability_with<F: Field>(fan: &Fan, pol: &Polarization) -> StabilityReport<F> {
    let n = fan.rank();
    let total: i64 = pol.ray_degrees().iter().sum();
    let mu = ratio(total, n.max(1));
    let best = max_slope_tangent_subsheaf::<F>(fan, pol);
    let verdict = verdict_of(best.as_ref().map(|b| &b.0), &mu);
    let (max_sub_slope, witness) = match best {
        Some((s, rays, span)) => (Some(s), Witness::Rays { rays, span }),
        None => (None, Witness::Trivial),
    };
    StabilityReport { verdict, mu, max_sub_slope, witness, certificate: Certificate::Complete }
}

/// The largest slope among the equivariant saturated subsheaves of `T_X`,
/// which are exactly the spans `F` of rays with `0 < dim F < n`; slope
/// `Σ_{v_ρ ∈ F} deg D_ρ / dim F`. Ties go to the lexicographically
/// smallest ray set.
pub fn max_slope_tangent_subsheaf<F: Field>(fan: &Fan, pol: &Polarization) -> Option<(F, Vec<usize>, Subspace<F>)> {
    let n = fan.rank();
    let deg = pol.ray_degrees();
    let mut seen = BTreeSet::new();
    let mut best: Option<(F, Vec<usize>, Subspace<F>)> = None;
    for k in 1..n {
        for combo in (0..fan.num_rays()).combinations(k) {
            let gens: Vec<_> = combo.iter().map(|&r| fan.ray(r).clone()).collect();
            let span = Subspace::<F>::from_lattice(n, &gens).expect("rank matches");
            if span.dim() != k {
                continue;
            }
            let closure: Vec<usize> = (0..fan.num_rays())
                .filter(|&r| span.contains(&fan.ray(r).to_field::<F>()).expect("rank matches"))
                .collect();
            if !seen.insert(mask_of(&closure)) {
                continue;
            }
            let slope: F = ratio(closure.iter().map(|&r| deg[r]).sum(), k);
            let better = match &best {
                None => true,
                Some((s, rays, _)) => slope > *s || (slope == *s && closure < *rays),
            };
            if better {
                best = Some((slope, closure, span));
            }
        }
    }
    best
}

/// Stability of a reflexive sheaf with respect to the ample divisor `h`.
pub fn reflexive_stability<F: Field>(
    e: &ReflexiveSheaf<F>,
    fan: &Fan,
    h: &TInvariantDivisor<i64>,
) -> Result<StabilityReport<F>, StabilityError> {
    let e = e.clone().on_fan(fan)?;
    let pol = Polarization::new(fan, h)?;
    reflexive_stability_with(&e, &pol)
}

pub fn reflexive_stability_with<F: Field>(
    e: &ReflexiveSheaf<F>,
    pol: &Polarization,
) -> Result<StabilityReport<F>, StabilityError> {
    let mu = e.slope(pol);
    let certificate = if e.rank() <= 2 { Certificate::Complete } else { Certificate::HeuristicLattice };
    let best = max_slope_subsheaf(e, pol)?;
    let verdict = verdict_of(best.as_ref().map(|b| &b.0), &mu);
    let (max_sub_slope, witness) = match best {
        Some((s, w)) => (Some(s), Witness::Subspace(w)),
        None => (None, Witness::Trivial),
    };
    Ok(StabilityReport { verdict, mu, max_sub_slope, witness, certificate })
}

/// Largest subsheaf slope over the candidate subspaces. In rank two the
/// candidates are every filtration line plus one line in general position,
/// which covers all saturated subsheaves. In higher rank they are the
/// lattice generated by the filtration subspaces, subspaces in general
/// position, and sums of the two.
pub fn max_slope_subsheaf<F: Field>(
    e: &ReflexiveSheaf<F>,
    pol: &Polarization,
) -> Result<Option<(F, Subspace<F>)>, StabilityError> {
    let r = e.rank();
    if r <= 1 {
        return Ok(None);
    }
    let gens = e.proper_subspaces();
    let mut candidates: BTreeSet<Subspace<F>> = BTreeSet::new();
    if r == 2 {
        candidates.extend(gens.iter().cloned());
        candidates.insert(generic_subspace(r, 1, &gens));
    } else {
        let lattice: Vec<Subspace<F>> = match SubspaceLattice::generate(r, gens.iter().cloned(), LATTICE_CAP)? {
            Some(l) => l.elements().to_vec(),
            None => gens.iter().cloned().collect(),
        };
        for d in 1..r {
            candidates.insert(generic_subspace(r, d, &gens));
        }
        for a in &lattice {
            if a.is_zero() || a.is_full() {
                continue;
            }
            candidates.insert(a.clone());
            for d in a.dim() + 1..r {
                let g = generic_subspace(r, d - a.dim(), &gens);
                let s = a.sum(&g)?;
                if s.dim() == d {
                    candidates.insert(s);
                }
            }
        }
    }
    let mut best: Option<(F, Subspace<F>)> = None;
    for c in candidates {
        let s = e.slope_of_subspace(&c, pol)?;
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, c));
        }
    }
    Ok(best)
}

/// A `d`-dimensional subspace meeting every subspace in `avoid` in the
/// expected dimension, spanned by points on the moment curve.
fn generic_subspace<F: Field>(r: usize, d: usize, avoid: &BTreeSet<Subspace<F>>) -> Subspace<F> {
    let moment = |t: i64| -> Vec<F> {
        let mut v = Vec::with_capacity(r);
        let mut x = F::from_int(1);
        for _ in 0..r {
            v.push(x.clone());
            x = x * F::from_int(t);
        }
        v
    };
    let mut fallback = None;
    for start in 1..200i64 {
        let g = Subspace::span(r, (0..d as i64).map(|j| moment(start + j))).expect("rank matches");
        let generic = avoid.iter().all(|w| {
            let expected = (d + w.dim()).saturating_sub(r);
            g.intersect(w).expect("rank matches").dim() == expected
        });
        if generic {
            return g;
        }
        fallback.get_or_insert(g);
    }
    fallback.expect("at least one attempt")
}

fn binomial<F: Field>(n: usize, k: usize) -> F {
    let mut acc = F::from_int(1);
    for i in 0..k {
        acc = acc * F::from_int((n - i) as i64) / F::from_int((i + 1) as i64);
    }
    acc
}

fn pow<F: Field>(x: &F, e: usize) -> F {
    (0..e).fold(F::from_int(1), |acc, _| acc * x.clone())
}

/// `(deg D_{v_0}, deg D_{e_0})` on `P(O ⊕ ... ⊕ O ⊕ O(1))` over `P^s`, rank
/// `r` fiber, for `H = a D_{v_0} + b D_{e_0}`:
/// `Σ_{i≥r} C(N,i) a^{N-i} b^i` and `Σ_{i≥r-1} C(N,i) a^{N-i} b^i` with
/// `N = r - 1 + s`.
pub fn kleinschmidt_degrees<F: Field>(s: usize, r: usize, a: i64, b: i64) -> (F, F) {
    let n = r - 1 + s;
    let (a, b) = (F::from_int(a), F::from_int(b));
    let term = |i: usize| binomial::<F>(n, i) * pow(&a, n - i) * pow(&b, i);
    let dv = (r..=n).map(term).fold(F::from_int(0), |x, y| x + y);
    let de = (r - 1..=n).map(term).fold(F::from_int(0), |x, y| x + y);
    (dv, de)
}

/// Coordinates `range` of `F^n` as a subspace.
fn coordinate_subspace<F: Field>(n: usize, range: std::ops::Range<usize>) -> Subspace<F> {
    Subspace::span(n, range.map(|i| (0..n).map(|j| F::from_int(i64::from(i == j))).collect::<Vec<F>>()))
        .expect("rank matches")
}

/// Closed-form stability of `T_X` on `X = P(O ⊕ O(a_1) ⊕ ... ⊕ O(a_r))`
/// over `P^s` for `H = a D_{v_0} + b D_{e_0}`.
///
/// * all `a_i = 0`: `X = P^s × P^r`, semistable iff `(s+1) b = (r+1) a`;
/// * twists `(0, ..., 0, 1)`: compares `deg D_{e_0}` against
///   `(sr+s+r)/(s(r+1)) deg D_{v_0}`;
/// * otherwise unstable. Slopes and witness then come from enumeration on
///   the fan, which must agree.
pub fn kleinschmidt_verdict<F: Field>(
    s: usize,
    twists: &[i64],
    a: i64,
    b: i64,
) -> Result<StabilityReport<F>, StabilityError> {
    let r = twists.len();
    if s == 0 || r == 0 {
        return Err(StabilityError::InvalidParameters("need s >= 1 and r >= 1".into()));
    }
    if twists.iter().any(|&x| x < 0) || twists.windows(2).any(|w| w[0] > w[1]) {
        return Err(StabilityError::InvalidParameters("twists must be nonnegative and nondecreasing".into()));
    }
    if a <= 0 || b <= 0 {
        return Err(StabilityError::NotAmple);
    }
    let n = s + r;
    let base_rays: Vec<usize> = (0..=s).collect();
    let fiber_rays: Vec<usize> = (s + 1..=n + 1).collect();
    let rays_witness = |fiber: bool| {
        if fiber {
            Witness::Rays { rays: fiber_rays.clone(), span: coordinate_subspace(n, s..n) }
        } else {
            Witness::Rays { rays: base_rays.clone(), span: coordinate_subspace(n, 0..s) }
        }
    };

    if twists.iter().all(|&x| x == 0) {
        let (af, bf) = (F::from_int(a), F::from_int(b));
        let dv = binomial::<F>(n - 1, s - 1) * pow(&af, s - 1) * pow(&bf, r);
        let de = binomial::<F>(n - 1, s) * pow(&af, s) * pow(&bf, r - 1);
        let mu1 = dv.clone() * F::from_int(s as i64 + 1) / F::from_int(s as i64);
        let mu2 = de.clone() * F::from_int(r as i64 + 1) / F::from_int(r as i64);
        let mu = (dv * F::from_int(s as i64 + 1) + de * F::from_int(r as i64 + 1)) / F::from_int(n as i64);
        let (verdict, max, fiber) = match mu1.cmp(&mu2) {
            Ordering::Equal => (Verdict::StrictlySemistable, mu1, false),
            Ordering::Greater => (Verdict::Unstable, mu1, false),
            Ordering::Less => (Verdict::Unstable, mu2, true),
        };
        return Ok(StabilityReport {
            verdict,
            mu,
            max_sub_slope: Some(max),
            witness: rays_witness(fiber),
            certificate: Certificate::Complete,
        });
    }

    let unit_last = twists[..r - 1].iter().all(|&x| x == 0) && twists[r - 1] == 1;
    if unit_last {
        let (dv, de) = kleinschmidt_degrees::<F>(s, r, a, b);
        let (sf, rf) = (F::from_int(s as i64), F::from_int(r as i64));
        let rhs = (sf.clone() * rf.clone() + sf.clone() + rf.clone()) / (sf.clone() * (rf.clone() + F::from_int(1)))
            * dv.clone();
        let verdict = match de.cmp(&rhs) {
            Ordering::Less => Verdict::Stable,
            Ordering::Equal => Verdict::StrictlySemistable,
            Ordering::Greater => Verdict::Unstable,
        };
        let mu = (sf * dv.clone() + (rf.clone() + F::from_int(1)) * de.clone()) / F::from_int(n as i64);
        let max = de.clone() + (de - dv) / rf;
        return Ok(StabilityReport {
            verdict,
            mu,
            max_sub_slope: Some(max),
            witness: rays_witness(true),
            certificate: Certificate::Complete,
        });
    }

    let fan = kleinschmidt(s, twists)?;
    let mut h = vec![0i64; fan.num_rays()];
    h[0] = a;
    h[s + 1] = b;
    let pol = Polarization::new(&fan, &TInvariantDivisor::new(h))?;
    let report: StabilityReport<F> = tangent_stability_with(&fan, &pol);
    if report.verdict != Verdict::Unstable {
        return Err(StabilityError::Inconsistent(format!(
            "enumeration found {} for twists {twists:?}",
            report.verdict
        )));
    }
    Ok(report)
}

/// `T_{X_1 × ... × X_m}` under `-K`: strictly semistable when every factor
/// is semistable under its own `-K`, unstable otherwise.
pub fn product_tangent_verdict<F: Field>(factors: &[Fan]) -> Result<StabilityReport<F>, StabilityError> {
    if factors.is_empty() {
        return Err(StabilityError::InvalidParameters("no factors".into()));
    }
    let mut reports = Vec::with_capacity(factors.len());
    for (i, f) in factors.iter().enumerate() {
        if !is_fano(f) {
            return Err(StabilityError::NotFano(i));
        }
        reports.push(tangent_stability::<F>(f, &anticanonical(f))?);
    }
    if factors.len() == 1 {
        return Ok(reports.pop().expect("one report"));
    }
    let mut product = factors[0].clone();
    for f in &factors[1..] {
        product = product.product(f)?;
    }
    let pol = Polarization::new(&product, &anticanonical(&product))?;
    let n = product.rank();
    let mu: F = ratio(pol.ray_degrees().iter().sum(), n);
    if reports.iter().all(|r| r.verdict.is_semistable()) {
        let block = product.blocks()[0].clone();
        let rays: Vec<usize> = block.rays.clone().collect();
        let slope: F = ratio(rays.iter().map(|&r| pol.ray_degrees()[r]).sum(), block.coords.len());
        if slope != mu {
            return Err(StabilityError::Inconsistent("pulled back factor has slope different from μ".into()));
        }
        return Ok(StabilityReport {
            verdict: Verdict::StrictlySemistable,
            mu,
            max_sub_slope: Some(slope),
            witness: Witness::Rays { rays, span: coordinate_subspace(n, block.coords) },
            certificate: Certificate::Complete,
        });
    }
    let report: StabilityReport<F> = tangent_stability_with(&product, &pol);
    if report.verdict != Verdict::Unstable {
        return Err(StabilityError::Inconsistent("product of an unstable factor is not unstable".into()));
    }
    Ok(report)
}
