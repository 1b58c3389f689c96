//! Torus-equivariant reflexive sheaves as Klyachko filtrations: one
//! increasing, exhaustive filtration of `F^r` by subspaces per ray.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::fan::Fan;
use crate::intersection::{Polarization, TInvariantDivisor};
use crate::linalg::{proper_subspaces, LatticeDecision, LinalgError, Subspace, SubspaceLattice, LATTICE_CAP};
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("sheaf has filtrations for {found} rays, fan has {expected}")]
    RayCountMismatch { expected: usize, found: usize },
    #[error("ray {ray}: filtration subspace lives in dimension {found}, rank is {expected}")]
    AmbientMismatch { ray: usize, expected: usize, found: usize },
    #[error("ray {ray}: jump indices must strictly increase")]
    IndicesNotIncreasing { ray: usize },
    #[error("ray {ray}: filtration must strictly grow at every listed jump")]
    NotStrictlyIncreasing { ray: usize },
    #[error("ray {ray}: filtration is not nested")]
    NotNested { ray: usize },
    #[error("ray {ray}: filtration does not reach the whole space")]
    NotExhaustive { ray: usize },
    #[error("sheaf rank must be positive")]
    ZeroRank,
    #[error("induced subsheaf of the zero subspace")]
    ZeroSubspace,
    #[error("subspace lattice exceeded {0} elements")]
    LatticeCapExceeded(usize),
    #[error("sheaves on different fans ({left} vs {right} rays)")]
    FanMismatch { left: usize, right: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl SheafError {
    /// The same error attributed to ray `ray`, for filtrations checked
    /// one at a time.
    pub fn at_ray(self, ray: usize) -> Self {
        match self {
            SheafError::AmbientMismatch { expected, found, .. } => SheafError::AmbientMismatch { ray, expected, found },
            SheafError::IndicesNotIncreasing { .. } => SheafError::IndicesNotIncreasing { ray },
            SheafError::NotStrictlyIncreasing { .. } => SheafError::NotStrictlyIncreasing { ray },
            SheafError::NotNested { .. } => SheafError::NotNested { ray },
            SheafError::NotExhaustive { .. } => SheafError::NotExhaustive { ray },
            other => other,
        }
    }
}

/// `E(i)` for all `i`: zero below the first jump, constant between jumps,
/// the whole space from the last jump on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Filtration<F> {
    rank: usize,
    jumps: Vec<(i64, Subspace<F>)>,
}

impl<F: Field> Filtration<F> {
    /// Strict constructor: indices strictly increase, subspaces strictly
    /// grow, the first is nonzero and the last is the whole space.
    pub fn new(rank: usize, jumps: Vec<(i64, Subspace<F>)>) -> Result<Self, SheafError> {
        Self::check(rank, &jumps, 0)?;
        Ok(Filtration { rank, jumps })
    }

    fn check(rank: usize, jumps: &[(i64, Subspace<F>)], ray: usize) -> Result<(), SheafError> {
        let mut prev: Option<&(i64, Subspace<F>)> = None;
        for j in jumps {
            if j.1.ambient_dim() != rank {
                return Err(SheafError::AmbientMismatch { ray, expected: rank, found: j.1.ambient_dim() });
            }
            match prev {
                None if j.1.is_zero() => return Err(SheafError::NotStrictlyIncreasing { ray }),
                Some(p) if p.0 >= j.0 => return Err(SheafError::IndicesNotIncreasing { ray }),
                Some(p) if !p.1.is_subspace_of(&j.1)? => return Err(SheafError::NotNested { ray }),
                Some(p) if p.1.dim() == j.1.dim() => return Err(SheafError::NotStrictlyIncreasing { ray }),
                _ => {}
            }
            prev = Some(j);
        }
        match jumps.last() {
            Some((_, w)) if w.is_full() => Ok(()),
            _ => Err(SheafError::NotExhaustive { ray }),
        }
    }

    /// Builds a filtration from `E(i)` at the given indices, dropping steps
    /// that do not grow. The levels must be nested in index order.
    pub fn from_levels(rank: usize, mut levels: Vec<(i64, Subspace<F>)>) -> Result<Self, SheafError> {
        levels.sort_by_key(|l| l.0);
        let mut jumps: Vec<(i64, Subspace<F>)> = Vec::new();
        for (i, w) in levels {
            if w.ambient_dim() != rank {
                return Err(SheafError::AmbientMismatch { ray: 0, expected: rank, found: w.ambient_dim() });
            }
            let last_dim = jumps.last().map_or(0, |j| j.1.dim());
            if let Some(last) = jumps.last() {
                if !last.1.is_subspace_of(&w)? {
                    return Err(SheafError::NotNested { ray: 0 });
                }
            }
            if w.dim() > last_dim {
                if jumps.last().is_some_and(|j| j.0 == i) {
                    jumps.pop();
                }
                jumps.push((i, w));
            }
        }
        Self::new(rank, jumps)
    }

    /// The filtration jumping once, at `index`.
    pub fn single(rank: usize, index: i64) -> Self {
        Filtration { rank, jumps: vec![(index, Subspace::full(rank))] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn jumps(&self) -> &[(i64, Subspace<F>)] {
        &self.jumps
    }

    pub fn level(&self, i: i64) -> Subspace<F> {
        match self.jumps.iter().rev().find(|j| j.0 <= i) {
            Some((_, w)) => w.clone(),
            None => Subspace::zero(self.rank),
        }
    }

    /// `-Σ_i i · dim(E(i)/E(i-1))`.
    pub fn c1_coefficient(&self) -> i64 {
        let mut prev = 0usize;
        let mut acc = 0i64;
        for (i, w) in &self.jumps {
            acc -= i * (w.dim() - prev) as i64;
            prev = w.dim();
        }
        acc
    }

    /// The same coefficient for the induced filtration `F ∩ E(i)`.
    pub fn c1_coefficient_on(&self, f: &Subspace<F>) -> Result<i64, SheafError> {
        let mut prev = 0usize;
        let mut acc = 0i64;
        for (i, w) in &self.jumps {
            let d = f.intersect(w)?.dim();
            acc -= i * (d - prev) as i64;
            prev = d;
        }
        Ok(acc)
    }

    /// `F ∩ E(i)` in the coordinates of `f`.
    pub fn induced(&self, f: &Subspace<F>) -> Result<Self, SheafError> {
        let levels = self
            .jumps
            .iter()
            .map(|(i, w)| Ok((*i, f.restrict(&f.intersect(w)?)?)))
            .collect::<Result<Vec<_>, SheafError>>()?;
        Self::from_levels(f.dim(), levels)
    }

    fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.jumps.iter().map(|j| j.0)
    }

    pub fn proper_subspaces(&self) -> impl Iterator<Item = &Subspace<F>> {
        self.jumps.iter().map(|j| &j.1).filter(|w| !w.is_full())
    }
}

/// A reflexive sheaf given by one filtration of `F^rank` per ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflexiveSheaf<F> {
    rank: usize,
    filtrations: Vec<Filtration<F>>,
}

/// Whether a locally free sheaf splits into equivariant line bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decomposability {
    Decomposable,
    Indecomposable,
    /// Beyond the bounded search; neither answer is certified.
    Inconclusive,
}

impl<F: Field> ReflexiveSheaf<F> {
    pub fn new(rank: usize, filtrations: Vec<Filtration<F>>) -> Result<Self, SheafError> {
        if rank == 0 {
            return Err(SheafError::ZeroRank);
        }
        for (ray, f) in filtrations.iter().enumerate() {
            if f.rank != rank {
                return Err(SheafError::AmbientMismatch { ray, expected: rank, found: f.rank });
            }
            Filtration::check(rank, &f.jumps, ray)?;
        }
        Ok(ReflexiveSheaf { rank, filtrations })
    }

    /// Checks the filtration count against `fan`.
    pub fn on_fan(self, fan: &Fan) -> Result<Self, SheafError> {
        if self.filtrations.len() != fan.num_rays() {
            return Err(SheafError::RayCountMismatch { expected: fan.num_rays(), found: self.filtrations.len() });
        }
        Ok(self)
    }

    /// `O(D)`: rank one, jumping at `-a_ρ` on ray `ρ`.
    pub fn line_bundle(d: &TInvariantDivisor<i64>) -> Self {
        let filtrations = d.coeffs().iter().map(|a| Filtration::single(1, -a)).collect();
        ReflexiveSheaf { rank: 1, filtrations }
    }

    pub fn trivial(rank: usize, num_rays: usize) -> Self {
        ReflexiveSheaf { rank, filtrations: vec![Filtration::single(rank, 0); num_rays] }
    }

    /// `T_X`: `Span(v_ρ)` at level -1, everything at level 0.
    pub fn tangent_bundle(fan: &Fan) -> Self {
        let n = fan.rank();
        let filtrations = fan
            .rays()
            .iter()
            .map(|v| {
                let line = Subspace::from_lattice(n, std::slice::from_ref(v)).expect("rank matches");
                Filtration::from_levels(n, vec![(-1, line), (0, Subspace::full(n))]).expect("valid")
            })
            .collect();
        ReflexiveSheaf { rank: n, filtrations }
    }

    /// `Ω_X`: `v_ρ^⊥` at level 0, everything at level 1.
    pub fn cotangent_bundle(fan: &Fan) -> Self {
        let n = fan.rank();
        let filtrations = fan
            .rays()
            .iter()
            .map(|v| {
                let perp = Subspace::from_lattice(n, std::slice::from_ref(v)).expect("rank matches").annihilator();
                Filtration::from_levels(n, vec![(0, perp), (1, Subspace::full(n))]).expect("valid")
            })
            .collect();
        ReflexiveSheaf { rank: n, filtrations }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_rays(&self) -> usize {
        self.filtrations.len()
    }

    pub fn filtrations(&self) -> &[Filtration<F>] {
        &self.filtrations
    }

    pub fn filtration(&self, ray: usize) -> &Filtration<F> {
        &self.filtrations[ray]
    }

    /// The filtration level `E^ρ(i)`.
    pub fn level(&self, ray: usize, i: i64) -> Subspace<F> {
        self.filtrations[ray].level(i)
    }

    fn same_fan(&self, other: &Self) -> Result<(), SheafError> {
        if self.num_rays() != other.num_rays() {
            return Err(SheafError::FanMismatch { left: self.num_rays(), right: other.num_rays() });
        }
        Ok(())
    }

    /// `E^∨`: `annihilator(E(-i-1))` at level `i`.
    pub fn dual(&self) -> Self {
        let filtrations = self
            .filtrations
            .iter()
            .map(|f| {
                let levels = f.indices().map(|j| (-j, f.level(j - 1).annihilator())).collect();
                Filtration::from_levels(self.rank, levels).expect("dual filtration is valid")
            })
            .collect();
        ReflexiveSheaf { rank: self.rank, filtrations }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, SheafError> {
        self.same_fan(other)?;
        let rank = self.rank + other.rank;
        let filtrations = self
            .filtrations
            .iter()
            .zip(&other.filtrations)
            .map(|(a, b)| {
                let idx: BTreeSet<i64> = a.indices().chain(b.indices()).collect();
                let levels = idx.into_iter().map(|i| (i, a.level(i).direct_sum(&b.level(i)))).collect();
                Filtration::from_levels(rank, levels)
            })
            .collect::<Result<_, _>>()?;
        Ok(ReflexiveSheaf { rank, filtrations })
    }

    /// `(E ⊗ F)(i) = Σ_{s+t=i} E(s) ⊗ F(t)`.
    pub fn tensor(&self, other: &Self) -> Result<Self, SheafError> {
        self.same_fan(other)?;
        let rank = self.rank * other.rank;
        let filtrations = self
            .filtrations
            .iter()
            .zip(&other.filtrations)
            .map(|(a, b)| {
                let idx: BTreeSet<i64> = a.indices().flat_map(|s| b.indices().map(move |t| s + t)).collect();
                let levels = idx
                    .into_iter()
                    .map(|i| {
                        let mut w = Subspace::zero(rank);
                        for (s, ws) in &a.jumps {
                            let wt = b.level(i - s);
                            if !wt.is_zero() {
                                w = w.sum(&ws.tensor(&wt))?;
                            }
                        }
                        Ok((i, w))
                    })
                    .collect::<Result<Vec<_>, SheafError>>()?;
                Filtration::from_levels(rank, levels)
            })
            .collect::<Result<_, _>>()?;
        Ok(ReflexiveSheaf { rank, filtrations })
    }

    /// `c_1(E) = -Σ_ρ Σ_i i · dim(E^ρ(i)/E^ρ(i-1)) D_ρ`.
    pub fn c1(&self) -> TInvariantDivisor<i64> {
        TInvariantDivisor::new(self.filtrations.iter().map(Filtration::c1_coefficient).collect())
    }

    /// `c_1` of the subsheaf induced by `f`, without building it.
    pub fn c1_of_subspace(&self, f: &Subspace<F>) -> Result<TInvariantDivisor<i64>, SheafError> {
        let coeffs = self.filtrations.iter().map(|fi| fi.c1_coefficient_on(f)).collect::<Result<_, _>>()?;
        Ok(TInvariantDivisor::new(coeffs))
    }

    pub fn degree(&self, pol: &Polarization) -> i64 {
        pol.degree_of(&self.c1())
    }

    /// `μ(E) = deg(c_1(E)) / rank`.
    pub fn slope(&self, pol: &Polarization) -> F {
        F::from_int(self.degree(pol)) / F::from_int(self.rank as i64)
    }

    /// Slope of the subsheaf induced by the nonzero subspace `f`.
    pub fn slope_of_subspace(&self, f: &Subspace<F>, pol: &Polarization) -> Result<F, SheafError> {
        if f.is_zero() {
            return Err(SheafError::ZeroSubspace);
        }
        let d = pol.degree_of(&self.c1_of_subspace(f)?);
        Ok(F::from_int(d) / F::from_int(f.dim() as i64))
    }

    /// The subsheaf with filtrations `F ∩ E^ρ(i)`, in the coordinates of
    /// the canonical basis of `f`.
    pub fn induced_subsheaf(&self, f: &Subspace<F>) -> Result<Self, SheafError> {
        if f.ambient_dim() != self.rank {
            return Err(SheafError::AmbientMismatch { ray: 0, expected: self.rank, found: f.ambient_dim() });
        }
        if f.is_zero() {
            return Err(SheafError::ZeroSubspace);
        }
        let filtrations = self.filtrations.iter().map(|fi| fi.induced(f)).collect::<Result<_, _>>()?;
        Ok(ReflexiveSheaf { rank: f.dim(), filtrations })
    }

    /// All distinct proper filtration subspaces over all rays.
    pub fn proper_subspaces(&self) -> BTreeSet<Subspace<F>> {
        proper_subspaces(self.filtrations.iter().flat_map(|f| f.jumps.iter().map(|j| &j.1)))
    }

    /// Locally free iff on every maximal cone the filtrations admit a common
    /// adapted basis, i.e. generate a distributive lattice.
    pub fn is_locally_free(&self, fan: &Fan) -> Result<bool, SheafError> {
        if self.num_rays() != fan.num_rays() {
            return Err(SheafError::RayCountMismatch { expected: fan.num_rays(), found: self.num_rays() });
        }
        for cone in fan.max_cones() {
            let nontrivial: Vec<&Filtration<F>> =
                cone.iter().map(|&r| &self.filtrations[r]).filter(|f| f.proper_subspaces().next().is_some()).collect();
            // Any two flags have an adapted basis.
            if nontrivial.len() <= 2 {
                continue;
            }
            let gens = proper_subspaces(nontrivial.iter().flat_map(|f| f.proper_subspaces()));
            match lattice_decision(self.rank, gens)? {
                LatticeDecision::Yes => {}
                LatticeDecision::No => return Ok(false),
                LatticeDecision::Inconclusive => return Err(SheafError::LatticeCapExceeded(LATTICE_CAP)),
            }
        }
        Ok(true)
    }

    /// Whether one basis is adapted to every ray's filtration. Assumes `E`
    /// is locally free. Exact in rank at most two; in higher rank a
    /// non-distributive lattice only proves that no full splitting is
    /// adapted to the generated lattice, so the answer is `Inconclusive`
    /// unless a splitting is found.
    pub fn is_decomposable(&self) -> Result<Decomposability, SheafError> {
        let gens = self.proper_subspaces();
        if self.rank <= 1 {
            return Ok(Decomposability::Decomposable);
        }
        if self.rank == 2 {
            return Ok(if gens.len() <= 2 { Decomposability::Decomposable } else { Decomposability::Indecomposable });
        }
        let Some(lat) = SubspaceLattice::generate(self.rank, gens.iter().cloned(), LATTICE_CAP)? else {
            return Ok(Decomposability::Inconclusive);
        };
        match lat.is_distributive() {
            LatticeDecision::Yes => Ok(Decomposability::Decomposable),
            _ => {
                if self.splits_inside(lat.elements(), &gens)? {
                    Ok(Decomposability::Decomposable)
                } else {
                    Ok(Decomposability::Inconclusive)
                }
            }
        }
    }

    /// Looks for complementary nonzero `A, B` among `candidates` with every
    /// filtration subspace equal to `(W ∩ A) + (W ∩ B)`.
    fn splits_inside(&self, candidates: &[Subspace<F>], gens: &BTreeSet<Subspace<F>>) -> Result<bool, SheafError> {
        for (i, a) in candidates.iter().enumerate() {
            if a.is_zero() || a.is_full() {
                continue;
            }
            for b in &candidates[i + 1..] {
                if b.is_zero() || a.dim() + b.dim() != self.rank || !a.sum(b)?.is_full() {
                    continue;
                }
                let mut ok = true;
                for w in gens {
                    if w.intersect(a)?.sum(&w.intersect(b)?)? != *w {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

fn lattice_decision<F: Field>(rank: usize, gens: BTreeSet<Subspace<F>>) -> Result<LatticeDecision, SheafError> {
    match SubspaceLattice::generate(rank, gens, LATTICE_CAP)? {
        Some(lat) => Ok(lat.is_distributive()),
        None => Ok(LatticeDecision::Inconclusive),
    }
}
