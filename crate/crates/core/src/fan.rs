//! Smooth complete simplicial fans.
//!
//! A [`Fan`] is only constructed through validation: rays are primitive,
//! every maximal cone is generated by a lattice basis, and the maximal cones
//! glue along walls into a complete fan. The walls and the dual basis of
//! every maximal cone are computed once and cached.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::intersection::TInvariantDivisor;
use crate::linalg::{determinant, dual_basis, pairing, LatticeVector};

/// Largest number of rays supported; cones are stored as bitmasks.
pub const MAX_RAYS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanViolation {
    RayDimension { ray: usize, expected: usize, found: usize },
    NonPrimitiveRay { ray: usize },
    DuplicateRay { first: usize, second: usize },
    TooManyRays { count: usize },
    ConeSize { cone: usize, expected: usize, found: usize },
    RayIndexOutOfRange { cone: usize, index: usize },
    DuplicateCone { first: usize, second: usize },
    NonSmoothCone { cone: usize, det: i64 },
    UnusedRay { ray: usize },
    FaceMismatch { detail: String },
    IncompleteFan { detail: String },
}

impl FanViolation {
    /// Stable name of the violated invariant.
    pub fn kind(&self) -> &'static str {
        match self {
            FanViolation::RayDimension { .. } => "RayDimension",
            FanViolation::NonPrimitiveRay { .. } => "NonPrimitiveRay",
            FanViolation::DuplicateRay { .. } => "DuplicateRay",
            FanViolation::TooManyRays { .. } => "TooManyRays",
            FanViolation::ConeSize { .. } => "ConeSize",
            FanViolation::RayIndexOutOfRange { .. } => "RayIndexOutOfRange",
            FanViolation::DuplicateCone { .. } => "DuplicateCone",
            FanViolation::NonSmoothCone { .. } => "NonSmoothCone",
            FanViolation::UnusedRay { .. } => "UnusedRay",
            FanViolation::FaceMismatch { .. } => "FaceMismatch",
            FanViolation::IncompleteFan { .. } => "IncompleteFan",
        }
    }
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanViolation::RayDimension { ray, expected, found } => {
                write!(f, "RayDimension: ray {ray} has {found} coordinates, expected {expected}")
            }
            FanViolation::NonPrimitiveRay { ray } => write!(f, "NonPrimitiveRay: ray {ray} is not primitive"),
            FanViolation::DuplicateRay { first, second } => {
                write!(f, "DuplicateRay: rays {first} and {second} coincide")
            }
            FanViolation::TooManyRays { count } => {
                write!(f, "TooManyRays: {count} rays, at most {MAX_RAYS} supported")
            }
            FanViolation::ConeSize { cone, expected, found } => {
                write!(f, "ConeSize: cone {cone} has {found} distinct rays, expected {expected}")
            }
            FanViolation::RayIndexOutOfRange { cone, index } => {
                write!(f, "RayIndexOutOfRange: cone {cone} refers to ray {index}")
            }
            FanViolation::DuplicateCone { first, second } => {
                write!(f, "DuplicateCone: cones {first} and {second} coincide")
            }
            FanViolation::NonSmoothCone { cone, det } => {
                write!(f, "NonSmoothCone: cone {cone} has determinant {det}")
            }
            FanViolation::UnusedRay { ray } => write!(f, "UnusedRay: ray {ray} lies in no maximal cone"),
            FanViolation::FaceMismatch { detail } => write!(f, "FaceMismatch: {detail}"),
            FanViolation::IncompleteFan { detail } => write!(f, "IncompleteFan: {detail}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("invalid fan: {}", join_violations(.0))]
    Invalid(Vec<FanViolation>),
    #[error("not a cone of the fan: {0:?}")]
    NotACone(Vec<usize>),
    #[error("star subdivision needs a cone with at least two rays")]
    DegenerateStar,
    #[error("projectivization needs at least two divisors, got {0}")]
    TooFewDivisors(usize),
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("duplicate ray name {0:?}")]
    DuplicateName(String),
    #[error("unknown ray name {0:?}")]
    UnknownRay(String),
}

fn join_violations(v: &[FanViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl FanError {
    pub fn violations(&self) -> &[FanViolation] {
        match self {
            FanError::Invalid(v) => v,
            _ => &[],
        }
    }
}

/// A codimension-one cone `τ` shared by the maximal cones `τ + ρ1` and
/// `τ + ρ2`, with its wall relation
/// `v_ρ1 + Σ b_i v_i + v_ρ2 = 0` over the rays `v_i` of `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub rays: Vec<usize>,
    pub cones: (usize, usize),
    pub outer: (usize, usize),
    pub interior: Vec<(usize, i64)>,
}

impl Wall {
    /// `D_ρ · V(τ)`.
    pub fn intersection_with(&self, ray: usize) -> i64 {
        if ray == self.outer.0 || ray == self.outer.1 {
            return 1;
        }
        self.interior.iter().find(|(r, _)| *r == ray).map_or(0, |(_, b)| *b)
    }
}

/// The rays and coordinates contributed by one factor of a product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBlock {
    pub rays: Range<usize>,
    pub coords: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    ray_names: Vec<String>,
    max_cones: Vec<Vec<usize>>,
    masks: Vec<u128>,
    duals: Vec<Vec<LatticeVector>>,
    walls: Vec<Wall>,
    blocks: Vec<FactorBlock>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

pub fn mask_of(rays: &[usize]) -> u128 {
    rays.iter().fold(0u128, |m, &r| m | (1u128 << r))
}

pub fn rays_of(mask: u128) -> Vec<usize> {
    (0..MAX_RAYS).filter(|&i| mask >> i & 1 == 1).collect()
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        let names = (0..rays.len()).map(|i| format!("r{i}")).collect();
        Self::build(rank, rays, names, max_cones, None)
    }

    pub fn from_rows(rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        Self::new(rank, rays.into_iter().map(LatticeVector::new).collect(), max_cones)
    }

    fn build(
        rank: usize,
        rays: Vec<LatticeVector>,
        ray_names: Vec<String>,
        max_cones: Vec<Vec<usize>>,
        blocks: Option<Vec<FactorBlock>>,
    ) -> Result<Fan, FanError> {
        let mut violations = Vec::new();
        if rays.len() > MAX_RAYS {
            return Err(FanError::Invalid(vec![FanViolation::TooManyRays { count: rays.len() }]));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.dim() != rank {
                violations.push(FanViolation::RayDimension { ray: i, expected: rank, found: r.dim() });
            } else if !r.is_primitive() {
                violations.push(FanViolation::NonPrimitiveRay { ray: i });
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                violations.push(FanViolation::DuplicateRay { first: j, second: i });
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, cone) in max_cones.iter().enumerate() {
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            sorted.dedup();
            for &i in &sorted {
                if i >= rays.len() {
                    violations.push(FanViolation::RayIndexOutOfRange { cone: c, index: i });
                }
            }
            if sorted.len() != rank || cone.len() != rank {
                violations.push(FanViolation::ConeSize { cone: c, expected: rank, found: sorted.len() });
            }
            if let Some(j) = cones.iter().position(|s| *s == sorted) {
                violations.push(FanViolation::DuplicateCone { first: j, second: c });
            }
            cones.push(sorted);
        }
        if !violations.is_empty() {
            return Err(FanError::Invalid(violations));
        }

        let mut duals = Vec::with_capacity(cones.len());
        for (c, cone) in cones.iter().enumerate() {
            let gens: Vec<LatticeVector> = cone.iter().map(|&i| rays[i].clone()).collect();
            let det = determinant(&gens).expect("square by construction");
            if det.abs() != 1 {
                violations.push(FanViolation::NonSmoothCone { cone: c, det });
                duals.push(Vec::new());
            } else {
                duals.push(dual_basis(&gens).expect("square").expect("unimodular"));
            }
        }
        let masks: Vec<u128> = cones.iter().map(|c| mask_of(c)).collect();
        let used = masks.iter().fold(0u128, |a, m| a | m);
        for i in 0..rays.len() {
            if used >> i & 1 == 0 {
                violations.push(FanViolation::UnusedRay { ray: i });
            }
        }
        if cones.is_empty() {
            violations.push(FanViolation::IncompleteFan { detail: "no maximal cones".into() });
        }
        if !violations.is_empty() {
            return Err(FanError::Invalid(violations));
        }

        let mut fan = Fan {
            rank,
            blocks: blocks.unwrap_or_else(|| vec![FactorBlock { rays: 0..rays.len(), coords: 0..rank }]),
            rays,
            ray_names,
            max_cones: cones,
            masks,
            duals,
            walls: Vec::new(),
        };
        fan.walls = fan.compute_walls(&mut violations);
        if violations.is_empty() {
            fan.check_connected(&mut violations);
        }
        if violations.is_empty() {
            fan.check_covering_degree(&mut violations);
        }
        if violations.is_empty() {
            Ok(fan)
        } else {
            Err(FanError::Invalid(violations))
        }
    }

    fn compute_walls(&self, violations: &mut Vec<FanViolation>) -> Vec<Wall> {
        let mut facets: BTreeMap<u128, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            for &r in cone {
                facets.entry(self.masks[c] & !(1u128 << r)).or_default().push((c, r));
            }
        }
        let mut walls = Vec::new();
        for (facet, owners) in facets {
            let tau = rays_of(facet);
            match owners.len() {
                1 => violations.push(FanViolation::IncompleteFan {
                    detail: format!("face {tau:?} of cone {} lies in no other maximal cone", owners[0].0),
                }),
                2 => {
                    let (c1, r1) = owners[0];
                    let (c2, r2) = owners[1];
                    let cone = &self.max_cones[c1];
                    let dual = &self.duals[c1];
                    let coord = |ray: usize| -> i64 {
                        let pos = cone.iter().position(|&x| x == ray).expect("ray in cone");
                        pairing(&dual[pos], &self.rays[r2]).expect("same rank")
                    };
                    if coord(r1) != -1 {
                        violations.push(FanViolation::FaceMismatch {
                            detail: format!("cones {c1} and {c2} lie on the same side of their common face {tau:?}"),
                        });
                        continue;
                    }
                    let interior = tau.iter().map(|&t| (t, -coord(t))).collect();
                    walls.push(Wall { rays: tau, cones: (c1, c2), outer: (r1, r2), interior });
                }
                k => violations.push(FanViolation::FaceMismatch {
                    detail: format!("face {tau:?} is shared by {k} maximal cones"),
                }),
            }
        }
        walls
    }

    fn check_connected(&self, violations: &mut Vec<FanViolation>) {
        let n = self.max_cones.len();
        let mut adj = vec![Vec::new(); n];
        for w in &self.walls {
            adj[w.cones.0].push(w.cones.1);
            adj[w.cones.1].push(w.cones.0);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            violations.push(FanViolation::IncompleteFan {
                detail: format!("maximal cone {c} is not connected to cone 0 through walls"),
            });
        }
    }

    /// Counts the maximal cones containing a generic point in their
    /// interior. With the wall checks above this must be exactly one.
    fn check_covering_degree(&self, violations: &mut Vec<FanViolation>) {
        if self.rank == 0 {
            return;
        }
        let bound = self
            .duals
            .iter()
            .flatten()
            .flat_map(|u| u.coords().iter())
            .map(|c| c.unsigned_abs() as i128)
            .max()
            .unwrap_or(1);
        // <u, w> with w = (1, k, k^2, ...) cannot vanish once k exceeds
        // twice the largest dual coordinate.
        let k = 2 * bound + 2;
        let w: Vec<i128> = (0..self.rank).map(|i| k.pow(i as u32)).collect();
        let inside = self
            .duals
            .iter()
            .filter(|dual| {
                dual.iter().all(|u| u.coords().iter().zip(&w).map(|(a, b)| *a as i128 * b).sum::<i128>() > 0)
            })
            .count();
        match inside {
            1 => {}
            0 => violations
                .push(FanViolation::IncompleteFan { detail: "a generic point lies in no maximal cone".into() }),
            m => violations
                .push(FanViolation::FaceMismatch { detail: format!("a generic point lies in {m} maximal cones") }),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn ray_names(&self) -> &[String] {
        &self.ray_names
    }

    pub fn ray_index(&self, name: &str) -> Option<usize> {
        self.ray_names.iter().position(|n| n == name)
    }

    pub fn with_ray_names<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Result<Fan, FanError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != self.rays.len() {
            return Err(FanError::LengthMismatch { expected: self.rays.len(), found: names.len() });
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(FanError::DuplicateName(n.clone()));
            }
        }
        self.ray_names = names;
        Ok(self)
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn blocks(&self) -> &[FactorBlock] {
        &self.blocks
    }

    /// Dual basis of maximal cone `cone`, aligned with `max_cones()[cone]`.
    pub fn dual_basis(&self, cone: usize) -> &[LatticeVector] {
        &self.duals[cone]
    }

    pub fn cone_mask(&self, cone: usize) -> u128 {
        self.masks[cone]
    }

    pub fn first_max_cone_containing(&self, mask: u128) -> Option<usize> {
        self.masks.iter().position(|m| m & mask == mask)
    }

    pub fn mask_is_cone(&self, mask: u128) -> bool {
        self.first_max_cone_containing(mask).is_some()
    }

    /// Whether the given rays span a cone of the fan.
    pub fn contains_cone(&self, rays: &[usize]) -> bool {
        if rays.iter().any(|&r| r >= self.rays.len()) {
            return false;
        }
        self.mask_is_cone(mask_of(rays))
    }

    /// `X × Y`, with the rays of `self` first.
    pub fn product(&self, other: &Fan) -> Result<Fan, FanError> {
        let rank = self.rank + other.rank;
        let mut rays = Vec::with_capacity(self.num_rays() + other.num_rays());
        for r in &self.rays {
            rays.push(r.concat(&LatticeVector::zero(other.rank)));
        }
        for r in &other.rays {
            rays.push(LatticeVector::zero(self.rank).concat(r));
        }
        let off = self.num_rays();
        let mut cones = Vec::with_capacity(self.max_cones.len() * other.max_cones.len());
        for a in &self.max_cones {
            for b in &other.max_cones {
                let mut c = a.clone();
                c.extend(b.iter().map(|i| i + off));
                cones.push(c);
            }
        }
        let mut names: Vec<String> = self.ray_names.iter().chain(&other.ray_names).cloned().collect();
        let clash = names.iter().enumerate().any(|(i, n)| names[..i].contains(n));
        if clash {
            let nb = self.blocks.len();
            names = self
                .ray_names
                .iter()
                .map(|n| format!("{n}_{}", 1))
                .chain(other.ray_names.iter().map(|n| format!("{n}_{}", nb + 1)))
                .collect();
        }
        let mut blocks = self.blocks.clone();
        for b in &other.blocks {
            blocks.push(FactorBlock {
                rays: b.rays.start + off..b.rays.end + off,
                coords: b.coords.start + self.rank..b.coords.end + self.rank,
            });
        }
        Self::build(rank, rays, names, cones, Some(blocks))
    }

    /// The fan of `P(O(D_0) ⊕ ... ⊕ O(D_m))`, rays of the base first
    /// (lifted through the support functions), then the fiber rays
    /// `e_0 = -(e_1 + ... + e_m), e_1, ..., e_m`.
    pub fn projectivize(&self, divisors: &[TInvariantDivisor<i64>]) -> Result<Fan, FanError> {
        if divisors.len() < 2 {
            return Err(FanError::TooFewDivisors(divisors.len()));
        }
        for d in divisors {
            if d.len() != self.num_rays() {
                return Err(FanError::LengthMismatch { expected: self.num_rays(), found: d.len() });
            }
        }
        let m = divisors.len() - 1;
        let rank = self.rank + m;
        let mut rays = Vec::with_capacity(self.num_rays() + m + 1);
        for (i, v) in self.rays.iter().enumerate() {
            let a0 = divisors[0].coeff(i);
            let fiber: Vec<i64> = divisors[1..].iter().map(|d| d.coeff(i) - a0).collect();
            rays.push(v.concat(&LatticeVector::new(fiber)));
        }
        let base = self.num_rays();
        rays.push(LatticeVector::zero(self.rank).concat(&LatticeVector::new(vec![-1; m])));
        for j in 0..m {
            rays.push(LatticeVector::zero(self.rank).concat(&LatticeVector::unit(m, j)));
        }
        let mut cones = Vec::with_capacity(self.max_cones.len() * (m + 1));
        for sigma in &self.max_cones {
            for skip in 0..=m {
                let mut c = sigma.clone();
                c.extend((0..=m).filter(|&j| j != skip).map(|j| base + j));
                cones.push(c);
            }
        }
        let mut names = self.ray_names.clone();
        names.extend((0..=m).map(|j| format!("e{j}")));
        Self::build(rank, rays, names, cones, None)
    }

    /// Star subdivision at the cone `tau`, adding the ray `Σ_{ρ∈τ} v_ρ`
    /// as the last ray.
    pub fn star_subdivide(&self, tau: &[usize]) -> Result<Fan, FanError> {
        let mut tau = tau.to_vec();
        tau.sort_unstable();
        tau.dedup();
        if tau.len() < 2 {
            return Err(FanError::DegenerateStar);
        }
        if !self.contains_cone(&tau) {
            return Err(FanError::NotACone(tau));
        }
        let mut u = LatticeVector::zero(self.rank);
        for &r in &tau {
            u = u.add(&self.rays[r]).expect("lattice sum overflow");
        }
        let new = self.num_rays();
        let mut rays = self.rays.clone();
        rays.push(u);
        let tmask = mask_of(&tau);
        let mut cones = Vec::new();
        for (c, sigma) in self.max_cones.iter().enumerate() {
            if self.masks[c] & tmask != tmask {
                cones.push(sigma.clone());
                continue;
            }
            for &drop in &tau {
                let mut cone: Vec<usize> = sigma.iter().copied().filter(|&r| r != drop).collect();
                cone.push(new);
                cones.push(cone);
            }
        }
        let mut names = self.ray_names.clone();
        names.push("u_tau".into());
        Self::build(self.rank, rays, names, cones, None)
    }
}
