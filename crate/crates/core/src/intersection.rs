//! Intersection theory on a smooth complete toric variety: torus-invariant
//! divisors, cycles in `V(τ)` classes, and the Chow-ring product.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fan::{mask_of, Fan, FanError};
use crate::linalg::{pairing, LatticeVector};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectionError {
    #[error("divisor has {found} coefficients, fan has {expected} rays")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot multiply a cycle of codimension {0}: already a 0-cycle")]
    CodimensionOverflow(usize),
    #[error("need {expected} divisors for an intersection number, got {found}")]
    WrongDivisorCount { expected: usize, found: usize },
    #[error("cycle term {0:?} is not a cone of the fan")]
    NotACone(Vec<usize>),
    #[error("polarization is not ample")]
    NotAmple,
    #[error("character has dimension {found}, lattice has rank {expected}")]
    CharacterDimension { expected: usize, found: usize },
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// `Σ a_ρ D_ρ`, indexed like the rays of its fan.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TInvariantDivisor<R> {
    coeffs: Vec<R>,
}

impl<R: Scalar> TInvariantDivisor<R> {
    pub fn new(coeffs: Vec<R>) -> Self {
        TInvariantDivisor { coeffs }
    }

    pub fn zero(num_rays: usize) -> Self {
        TInvariantDivisor { coeffs: vec![R::zero(); num_rays] }
    }

    /// The prime divisor `D_ρ`.
    pub fn prime(num_rays: usize, ray: usize) -> Self {
        let mut d = Self::zero(num_rays);
        d.coeffs[ray] = R::one();
        d
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, ray: usize) -> R {
        self.coeffs[ray].clone()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "divisors on different fans");
        TInvariantDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-R::one()))
    }

    pub fn scale(&self, k: &R) -> Self {
        TInvariantDivisor { coeffs: self.coeffs.iter().map(|a| a.clone() * k.clone()).collect() }
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> TInvariantDivisor<S> {
        TInvariantDivisor { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl TInvariantDivisor<i64> {
    pub fn convert<S: Scalar>(&self) -> TInvariantDivisor<S> {
        self.map(|&a| S::from_int(a))
    }
}

impl<R: Scalar> fmt::Display for TInvariantDivisor<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A cycle `Σ c_τ [V(τ)]` of codimension `codim`; keys are sorted ray
/// index tuples of cones with `codim` rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowCycle<R> {
    codim: usize,
    terms: BTreeMap<Vec<usize>, R>,
}

impl<R: Scalar> ChowCycle<R> {
    /// The class `[X]`.
    pub fn fundamental() -> Self {
        ChowCycle { codim: 0, terms: BTreeMap::from([(Vec::new(), R::one())]) }
    }

    /// `[V(τ)]` for a cone `τ` of `fan`.
    pub fn orbit_closure(fan: &Fan, tau: &[usize]) -> Result<Self, IntersectionError> {
        let mut key = tau.to_vec();
        key.sort_unstable();
        key.dedup();
        if !fan.contains_cone(&key) {
            return Err(IntersectionError::NotACone(key));
        }
        Ok(ChowCycle { codim: key.len(), terms: BTreeMap::from([(key, R::one())]) })
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, R> {
        &self.terms
    }

    pub fn coefficient(&self, tau: &[usize]) -> R {
        self.terms.get(tau).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the coefficients; the degree of a 0-cycle.
    pub fn degree(&self) -> R {
        self.terms.values().fold(R::zero(), |a, b| a + b.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.codim, other.codim, "cycles of different codimension");
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn scale(&self, k: &R) -> Self {
        let mut out = ChowCycle { codim: self.codim, terms: BTreeMap::new() };
        for (key, v) in &self.terms {
            out.add_term(key.clone(), v.clone() * k.clone());
        }
        out
    }

    fn add_term(&mut self, key: Vec<usize>, v: R) {
        if v.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(R::zero);
        *e = e.clone() + v;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }
}

fn check_len<R>(fan: &Fan, d: &TInvariantDivisor<R>) -> Result<(), IntersectionError> {
    if d.coeffs.len() != fan.num_rays() {
        return Err(IntersectionError::LengthMismatch { expected: fan.num_rays(), found: d.coeffs.len() });
    }
    Ok(())
}

/// `div(χ^m) = Σ <m, v_ρ> D_ρ`.
pub fn principal_divisor<R: Scalar>(fan: &Fan, m: &LatticeVector) -> Result<TInvariantDivisor<R>, IntersectionError> {
    if m.dim() != fan.rank() {
        return Err(IntersectionError::CharacterDimension { expected: fan.rank(), found: m.dim() });
    }
    Ok(TInvariantDivisor {
        coeffs: fan.rays().iter().map(|v| R::from_int(pairing(m, v).expect("same rank"))).collect(),
    })
}

/// `D · C`. For each term `[V(τ)]`, `D` is first replaced by a linearly
/// equivalent divisor vanishing on the rays of `τ`, using the dual basis of
/// the first maximal cone containing `τ`; the remaining rays then meet
/// `V(τ)` transversally or not at all.
pub fn multiply<R: Scalar>(
    fan: &Fan,
    d: &TInvariantDivisor<R>,
    c: &ChowCycle<R>,
) -> Result<ChowCycle<R>, IntersectionError> {
    check_len(fan, d)?;
    if c.codim >= fan.rank() {
        return Err(IntersectionError::CodimensionOverflow(c.codim));
    }
    let nrays = fan.num_rays();
    let mut out = ChowCycle { codim: c.codim + 1, terms: BTreeMap::new() };
    for (tau, coeff) in &c.terms {
        let tmask = mask_of(tau);
        let sigma = fan.first_max_cone_containing(tmask).ok_or_else(|| IntersectionError::NotACone(tau.clone()))?;
        let cone = &fan.max_cones()[sigma];
        let dual = fan.dual_basis(sigma);
        // m = Σ_{ρ∈τ} a_ρ u_ρ, so D - div(χ^m) vanishes on τ.
        let mut m = vec![R::zero(); fan.rank()];
        for &r in tau {
            let a = d.coeffs[r].clone();
            if a.is_zero() {
                continue;
            }
            let pos = cone.iter().position(|&x| x == r).expect("τ inside σ");
            for (mi, ui) in m.iter_mut().zip(dual[pos].coords()) {
                *mi = mi.clone() + a.clone() * R::from_int(*ui);
            }
        }
        for rho in 0..nrays {
            if tmask >> rho & 1 == 1 {
                continue;
            }
            let nm = tmask | (1u128 << rho);
            if !fan.mask_is_cone(nm) {
                continue;
            }
            let shift = m
                .iter()
                .zip(fan.ray(rho).coords())
                .fold(R::zero(), |acc, (mi, vi)| acc + mi.clone() * R::from_int(*vi));
            let a = d.coeffs[rho].clone() - shift;
            if a.is_zero() {
                continue;
            }
            let mut key = tau.clone();
            let at = key.partition_point(|&x| x < rho);
            key.insert(at, rho);
            out.add_term(key, a * coeff.clone());
        }
    }
    Ok(out)
}

/// `D^k · [X]`.
pub fn power<R: Scalar>(fan: &Fan, d: &TInvariantDivisor<R>, k: usize) -> Result<ChowCycle<R>, IntersectionError> {
    let mut c = ChowCycle::fundamental();
    for _ in 0..k {
        c = multiply(fan, d, &c)?;
    }
    Ok(c)
}

/// `D_1 · ... · D_n`.
pub fn intersection_number<R: Scalar>(fan: &Fan, divisors: &[TInvariantDivisor<R>]) -> Result<R, IntersectionError> {
    if divisors.len() != fan.rank() {
        return Err(IntersectionError::WrongDivisorCount { expected: fan.rank(), found: divisors.len() });
    }
    let mut c = ChowCycle::fundamental();
    for d in divisors {
        c = multiply(fan, d, &c)?;
    }
    Ok(c.degree())
}

/// `D · curve` for a 1-cycle.
pub fn degree_on<R: Scalar>(fan: &Fan, d: &TInvariantDivisor<R>, curve: &ChowCycle<R>) -> Result<R, IntersectionError> {
    Ok(multiply(fan, d, curve)?.degree())
}

/// `deg_H(D) = D · H^{n-1}`.
pub fn degree<R: Scalar>(
    fan: &Fan,
    d: &TInvariantDivisor<R>,
    h: &TInvariantDivisor<R>,
) -> Result<R, IntersectionError> {
    check_len(fan, d)?;
    if fan.rank() == 0 {
        return Ok(R::zero());
    }
    let curve = power(fan, h, fan.rank() - 1)?;
    degree_on(fan, d, &curve)
}

/// `D · V(τ)` for every wall, from the wall relations.
pub fn wall_intersections<R: Scalar>(fan: &Fan, d: &TInvariantDivisor<R>) -> Result<Vec<R>, IntersectionError> {
    check_len(fan, d)?;
    Ok(fan
        .walls()
        .iter()
        .map(|w| {
            let mut s = d.coeffs[w.outer.0].clone() + d.coeffs[w.outer.1].clone();
            for (r, b) in &w.interior {
                s = s + d.coeffs[*r].clone() * R::from_int(*b);
            }
            s
        })
        .collect())
}

/// Toric Nakai criterion: positive on every wall curve.
pub fn is_ample<R: Scalar>(fan: &Fan, d: &TInvariantDivisor<R>) -> Result<bool, IntersectionError> {
    Ok(wall_intersections(fan, d)?.iter().all(|x| x.is_positive()))
}

pub fn is_nef<R: Scalar>(fan: &Fan, d: &TInvariantDivisor<R>) -> Result<bool, IntersectionError> {
    Ok(wall_intersections(fan, d)?.iter().all(|x| !x.is_negative()))
}

/// `-K_X = Σ D_ρ`.
pub fn anticanonical(fan: &Fan) -> TInvariantDivisor<i64> {
    TInvariantDivisor { coeffs: vec![1; fan.num_rays()] }
}

pub fn is_fano(fan: &Fan) -> bool {
    is_ample(fan, &anticanonical(fan)).expect("length matches")
}

pub fn picard_rank(fan: &Fan) -> usize {
    fan.num_rays() - fan.rank()
}

/// The character `m` with `D = div(χ^m)`, if `D` is principal.
pub fn principal_character(fan: &Fan, d: &TInvariantDivisor<i64>) -> Result<Option<LatticeVector>, IntersectionError> {
    check_len(fan, d)?;
    let cone = &fan.max_cones()[0];
    let dual = fan.dual_basis(0);
    let mut m = vec![0i64; fan.rank()];
    for (pos, &r) in cone.iter().enumerate() {
        for (mi, ui) in m.iter_mut().zip(dual[pos].coords()) {
            *mi += d.coeffs[r] * ui;
        }
    }
    let m = LatticeVector::new(m);
    let p: TInvariantDivisor<i64> = principal_divisor(fan, &m)?;
    Ok((p == *d).then_some(m))
}

pub fn linearly_equivalent(
    fan: &Fan,
    a: &TInvariantDivisor<i64>,
    b: &TInvariantDivisor<i64>,
) -> Result<bool, IntersectionError> {
    Ok(principal_character(fan, &a.sub(b))?.is_some())
}

/// An ample divisor `H` with the 1-cycle `H^{n-1}` and the degrees
/// `deg_H(D_ρ)` of all prime divisors precomputed.
#[derive(Debug, Clone)]
pub struct Polarization {
    divisor: TInvariantDivisor<i64>,
    curve: ChowCycle<i64>,
    ray_degrees: Vec<i64>,
}

impl Polarization {
    pub fn new(fan: &Fan, h: &TInvariantDivisor<i64>) -> Result<Self, IntersectionError> {
        if !is_ample(fan, h)? {
            return Err(IntersectionError::NotAmple);
        }
        Self::unchecked(fan, h)
    }

    /// Skips the ampleness test; degrees are still exact.
    pub fn unchecked(fan: &Fan, h: &TInvariantDivisor<i64>) -> Result<Self, IntersectionError> {
        check_len(fan, h)?;
        let n = fan.rank();
        let curve = if n == 0 { ChowCycle { codim: 0, terms: BTreeMap::new() } } else { power(fan, h, n - 1)? };
        let ray_degrees = if n == 0 {
            Vec::new()
        } else {
            (0..fan.num_rays())
                .map(|r| degree_on(fan, &TInvariantDivisor::prime(fan.num_rays(), r), &curve))
                .collect::<Result<_, _>>()?
        };
        Ok(Polarization { divisor: h.clone(), curve, ray_degrees })
    }

    pub fn divisor(&self) -> &TInvariantDivisor<i64> {
        &self.divisor
    }

    /// `H^{n-1}`.
    pub fn curve(&self) -> &ChowCycle<i64> {
        &self.curve
    }

    /// `deg_H(D_ρ)` for every ray.
    pub fn ray_degrees(&self) -> &[i64] {
        &self.ray_degrees
    }

    pub fn degree_of(&self, d: &TInvariantDivisor<i64>) -> i64 {
        d.coeffs().iter().zip(&self.ray_degrees).map(|(a, b)| a * b).sum()
    }
}

/// A polynomial `Σ c_i x^i` over an exact field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(F::zero);
        Self::new((0..n).map(|i| get(self, i) - get(other, i)).collect())
    }

    pub fn scale(&self, k: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// The unique polynomial of degree `< points.len()` through `points`.
    pub fn interpolate(points: &[(F, F)]) -> Self {
        let n = points.len();
        let mut acc = vec![F::zero(); n];
        for (i, (xi, yi)) in points.iter().enumerate() {
            // Lagrange basis polynomial.
            let mut basis = vec![F::one()];
            let mut denom = F::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![F::zero(); basis.len() + 1];
                for (k, b) in basis.iter().enumerate() {
                    next[k + 1] = next[k + 1].clone() + b.clone();
                    next[k] = next[k].clone() - b.clone() * xj.clone();
                }
                basis = next;
                denom = denom * (xi.clone() - xj.clone());
            }
            let f = yi.clone() / denom;
            for (k, b) in basis.into_iter().enumerate() {
                acc[k] = acc[k].clone() + b * f.clone();
            }
        }
        Self::new(acc)
    }

    /// Cauchy bound: every real root has absolute value below it.
    pub fn root_bound(&self) -> Option<F> {
        let lead = self.coeffs.last()?.clone();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c.clone() / lead.clone()).abs())
            .max()
            .unwrap_or_else(F::zero);
        Some(F::one() + m)
    }
}

/// `deg_{H(t)}(D(t))` as a polynomial in `t`, recovered from exact
/// evaluations at `max_degree + 1` integer points.
pub fn degree_polynomial<F: Field>(
    fan: &Fan,
    family: impl Fn(i64) -> (TInvariantDivisor<i64>, TInvariantDivisor<i64>),
    max_degree: usize,
) -> Result<Polynomial<F>, IntersectionError> {
    let mut points = Vec::with_capacity(max_degree + 1);
    for t in 1..=(max_degree as i64 + 1) {
        let (d, h) = family(t);
        let v = degree(fan, &d.convert::<F>(), &h.convert::<F>())?;
        points.push((F::from_int(t), v));
    }
    Ok(Polynomial::interpolate(&points))
}
