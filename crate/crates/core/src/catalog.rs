//! Named fans and bundles: projective spaces, Kleinschmidt varieties, the
//! Picard-rank-3 toric Fano fourfolds, Bott towers and (pseudo) Del Pezzo
//! varieties.

use itertools::Itertools;
use thiserror::Error;

use crate::fan::{Fan, FanError};
use crate::intersection::{anticanonical, is_fano, TInvariantDivisor};
use crate::linalg::{LatticeVector, Subspace};
use crate::scalar::Field;
use crate::sheaf::{Filtration, ReflexiveSheaf, SheafError};
use crate::stability::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog label {0:?}")]
    UnknownLabel(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

fn invalid(msg: impl Into<String>) -> CatalogError {
    CatalogError::InvalidParameters(msg.into())
}

/// A cataloged fan with its default polarization (`-K` when Fano) and,
/// for the tabulated fourfolds, the expected stability of `T_X`.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub label: String,
    pub description: String,
    pub fan: Fan,
    pub default_polarization: Option<TInvariantDivisor<i64>>,
    pub expected_verdict: Option<Verdict>,
}

impl CatalogEntry {
    fn new(label: &str, description: impl Into<String>, fan: Fan, expected: Option<Verdict>) -> Self {
        let default_polarization = is_fano(&fan).then(|| anticanonical(&fan));
        CatalogEntry {
            label: label.into(),
            description: description.into(),
            fan,
            default_polarization,
            expected_verdict: expected,
        }
    }
}

pub fn point() -> Fan {
    Fan::from_rows(0, vec![], vec![vec![]]).expect("point fan")
}

/// `P^n` with rays `e_0 = -(e_1 + ... + e_n), e_1, ..., e_n`.
pub fn projective_space(n: usize) -> Result<Fan, CatalogError> {
    if n == 0 {
        return Err(invalid("projective space needs n >= 1"));
    }
    let mut rays = vec![LatticeVector::new(vec![-1; n])];
    rays.extend((0..n).map(|i| LatticeVector::unit(n, i)));
    let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    Ok(Fan::new(n, rays, cones)?.with_ray_names((0..=n).map(|i| format!("e{i}")))?)
}

/// `P(O ⊕ O(a_1) ⊕ ... ⊕ O(a_r))` over `P^s`, with rays
/// `v_0, ..., v_s, e_0, ..., e_r` and `v_0 = -Σ v_i + Σ a_j e_j`.
pub fn kleinschmidt(s: usize, twists: &[i64]) -> Result<Fan, CatalogError> {
    let r = twists.len();
    if s == 0 || r == 0 {
        return Err(invalid("Kleinschmidt variety needs s >= 1 and r >= 1"));
    }
    if twists.iter().any(|&a| a < 0) || twists.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("twists must be nonnegative and nondecreasing"));
    }
    let base = projective_space(s)?;
    let h = TInvariantDivisor::prime(s + 1, 0);
    let mut divisors = vec![TInvariantDivisor::zero(s + 1)];
    divisors.extend(twists.iter().map(|&a| h.scale(&a)));
    let fan = base.projectivize(&divisors)?;
    let names = (0..=s).map(|i| format!("v{i}")).chain((0..=r).map(|j| format!("e{j}")));
    Ok(fan.with_ray_names(names)?)
}

pub fn hirzebruch(a: i64) -> Result<Fan, CatalogError> {
    kleinschmidt(1, &[a])
}

/// Strictly upper triangular integers `c_{i,j}`, `1 <= i < j <= k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottNumbers {
    k: usize,
    c: Vec<Vec<i64>>,
}

impl BottNumbers {
    /// Entries listed row by row: `c_12, c_13, ..., c_1k, c_23, ...`.
    pub fn from_upper(k: usize, entries: &[i64]) -> Result<Self, CatalogError> {
        if k < 1 {
            return Err(invalid("Bott tower needs k >= 1"));
        }
        if entries.len() != k * (k - 1) / 2 {
            return Err(invalid(format!("Bott tower of height {k} needs {} numbers", k * (k - 1) / 2)));
        }
        let mut c = vec![vec![0; k]; k];
        let mut it = entries.iter();
        for (i, row) in c.iter_mut().enumerate() {
            for x in row.iter_mut().skip(i + 1) {
                *x = *it.next().expect("length checked");
            }
        }
        Ok(BottNumbers { k, c })
    }

    pub fn zero(k: usize) -> Self {
        BottNumbers { k, c: vec![vec![0; k]; k] }
    }

    pub fn height(&self) -> usize {
        self.k
    }

    /// `c_{i,j}`, 1-indexed.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.c[i - 1][j - 1]
    }

    pub fn entries(&self) -> Vec<i64> {
        (0..self.k).flat_map(|i| (i + 1..self.k).map(move |j| (i, j))).map(|(i, j)| self.c[i][j]).collect()
    }
}

/// The Bott tower `M_k`: rays `v_i = e_i` and
/// `v_{k+i} = -e_i + Σ_{j>i} c_{i,j} e_j`. Maximal cones pick one of
/// `v_i, v_{k+i}` for each `i`, ordered by the binary number whose bit
/// `i` selects `v_{k+i}`.
pub fn bott_tower(c: &BottNumbers) -> Result<Fan, CatalogError> {
    let k = c.k;
    let mut rays: Vec<LatticeVector> = (0..k).map(|i| LatticeVector::unit(k, i)).collect();
    for i in 0..k {
        let mut v = vec![0; k];
        v[i] = -1;
        for (j, x) in v.iter_mut().enumerate().skip(i + 1) {
            *x = c.c[i][j];
        }
        rays.push(LatticeVector::new(v));
    }
    let cones = (0..1usize << k).map(|m| (0..k).map(|i| if m >> i & 1 == 1 { k + i } else { i }).collect()).collect();
    let names = (1..=2 * k).map(|i| format!("v{i}"));
    Ok(Fan::new(k, rays, cones)?.with_ray_names(names)?)
}

fn check_even(dim: usize) -> Result<usize, CatalogError> {
    if dim < 2 || dim % 2 == 1 {
        return Err(invalid(format!("Del Pezzo variety needs even dimension >= 2, got {dim}")));
    }
    Ok(dim / 2)
}

/// `V^{2r}`: rays `v_0, w_0, v_1, w_1, ..., v_n, w_n` with
/// `v_0 = -Σ v_i` and `w_i = -v_i`.
pub fn del_pezzo(dim: usize) -> Result<Fan, CatalogError> {
    let r = check_even(dim)?;
    let n = dim;
    let v = |i: usize| if i == 0 { LatticeVector::new(vec![-1; n]) } else { LatticeVector::unit(n, i - 1) };
    let mut rays = Vec::new();
    let mut names = Vec::new();
    for i in 0..=n {
        rays.push(v(i));
        rays.push(v(i).neg());
        names.push(format!("v{i}"));
        names.push(format!("w{i}"));
    }
    let mut cones = Vec::new();
    for i_set in (0..=n).combinations(r) {
        let rest: Vec<usize> = (0..=n).filter(|x| !i_set.contains(x)).collect();
        for j_set in rest.into_iter().combinations(r) {
            let mut cone: Vec<usize> = i_set.iter().map(|&i| 2 * i).collect();
            cone.extend(j_set.iter().map(|&j| 2 * j + 1));
            cones.push(cone);
        }
    }
    Ok(Fan::new(n, rays, cones)?.with_ray_names(names)?)
}

/// `Ṽ^{2r}`: as `V^{2r}` without `w_0`; rays `v_0, v_1, w_1, ..., v_n, w_n`.
pub fn pseudo_del_pezzo(dim: usize) -> Result<Fan, CatalogError> {
    let r = check_even(dim)?;
    let n = dim;
    let mut rays = vec![LatticeVector::new(vec![-1; n])];
    let mut names = vec!["v0".to_string()];
    for i in 1..=n {
        rays.push(LatticeVector::unit(n, i - 1));
        rays.push(LatticeVector::unit(n, i - 1).neg());
        names.push(format!("v{i}"));
        names.push(format!("w{i}"));
    }
    let vi = |i: usize| if i == 0 { 0 } else { 2 * i - 1 };
    let wi = |i: usize| 2 * i;
    let mut cones = Vec::new();
    for i_set in (1..=n).combinations(r - 1) {
        let rest: Vec<usize> = (1..=n).filter(|x| !i_set.contains(x)).collect();
        for j_set in rest.into_iter().combinations(r) {
            let mut cone = vec![vi(0)];
            cone.extend(i_set.iter().map(|&i| vi(i)));
            cone.extend(j_set.iter().map(|&j| wi(j)));
            cones.push(cone);
        }
    }
    for s in 0..=r {
        for i_set in (1..=n).combinations(r + s) {
            let mut cone: Vec<usize> = i_set.iter().map(|&i| vi(i)).collect();
            cone.extend((1..=n).filter(|x| !i_set.contains(x)).map(wi));
            cones.push(cone);
        }
    }
    Ok(Fan::new(n, rays, cones)?.with_ray_names(names)?)
}

/// `(P^1)^s × V^{2k_1} × ... × Ṽ^{2l_1} × ...`.
pub fn pseudo_symmetric(s: usize, ks: &[usize], ls: &[usize]) -> Result<Fan, CatalogError> {
    let mut factors = Vec::new();
    for _ in 0..s {
        factors.push(projective_space(1)?);
    }
    for &k in ks {
        factors.push(del_pezzo(2 * k)?);
    }
    for &l in ls {
        factors.push(pseudo_del_pezzo(2 * l)?);
    }
    let mut it = factors.into_iter();
    let Some(mut fan) = it.next() else {
        return Ok(point());
    };
    for f in it {
        fan = fan.product(&f)?;
    }
    Ok(fan)
}

fn product_named(factors: &[Fan], names: &[&str]) -> Result<Fan, CatalogError> {
    let mut fan = factors[0].clone();
    for f in &factors[1..] {
        fan = fan.product(f)?;
    }
    Ok(fan.with_ray_names(names.iter().copied())?)
}

fn divisor(n: usize, terms: &[(usize, i64)]) -> TInvariantDivisor<i64> {
    let mut c = vec![0; n];
    for &(i, a) in terms {
        c[i] += a;
    }
    TInvariantDivisor::new(c)
}

/// `P(O ⊕ O(α, 0) ⊕ O(β, γ))` over `P^1 × P^1`.
fn plane_bundle_over_quadric(alpha: i64, beta: i64, gamma: i64) -> Result<Fan, CatalogError> {
    let p1 = projective_space(1)?;
    let base = p1.product(&p1)?;
    let ds = [divisor(4, &[]), divisor(4, &[(0, alpha)]), divisor(4, &[(0, beta), (2, gamma)])];
    Ok(base.projectivize(&ds)?.with_ray_names(["u0", "u1", "v0", "v1", "e0", "e1", "e2"])?)
}

/// `P(O ⊕ O(α, β))` over `P^1 × P^2`.
fn line_bundle_over_p1xp2(alpha: i64, beta: i64) -> Result<Fan, CatalogError> {
    let base = projective_space(1)?.product(&projective_space(2)?)?;
    let ds = [divisor(5, &[]), divisor(5, &[(0, alpha), (2, beta)])];
    Ok(base.projectivize(&ds)?.with_ray_names(["w0", "w1", "z0", "z1", "z2", "e0", "e1"])?)
}

/// `P(O ⊕ O(α D_{v0} + β D_{e0'}))` over `P(O_{P^2} ⊕ O(a_1))`.
fn line_bundle_over_p2_bundle(a1: i64, alpha: i64, beta: i64) -> Result<Fan, CatalogError> {
    let base = kleinschmidt(2, &[a1])?;
    let ds = [divisor(5, &[]), divisor(5, &[(0, alpha), (3, beta)])];
    Ok(base.projectivize(&ds)?.with_ray_names(["v0", "v1", "v2", "e0'", "e1'", "e0", "e1"])?)
}

/// `P(O ⊕ O ⊕ O(α D_{v3} + β D_{v4}))` over the Hirzebruch surface with
/// rays `(1,0), (0,1), (-1,1), (0,-1)`.
fn plane_bundle_over_h1(alpha: i64, beta: i64) -> Result<Fan, CatalogError> {
    let base = Fan::from_rows(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )?;
    let ds = [divisor(4, &[]), divisor(4, &[]), divisor(4, &[(2, alpha), (3, beta)])];
    Ok(base.projectivize(&ds)?.with_ray_names(["v1", "v2", "v3", "v4", "e0", "e1", "e2"])?)
}

/// `P(O ⊕ O(α D_{v0} + β D_{e0'}))` over `P(O_{P^1} ⊕ O ⊕ O(1))`.
fn line_bundle_over_p1_bundle(alpha: i64, beta: i64) -> Result<Fan, CatalogError> {
    let base = kleinschmidt(1, &[0, 1])?;
    let ds = [divisor(5, &[]), divisor(5, &[(0, alpha), (2, beta)])];
    Ok(base.projectivize(&ds)?.with_ray_names(["v0", "v1", "e0'", "e1'", "e2'", "e0", "e1"])?)
}

/// `P(O_{P^3} ⊕ O(a_1))` blown up along the surface `V(Cone(v_0, e_1))`.
fn blown_up_p3_bundle(a1: i64) -> Result<Fan, CatalogError> {
    let base = kleinschmidt(3, &[a1])?;
    let tau = [base.ray_index("v0").expect("v0"), base.ray_index("e1").expect("e1")];
    Ok(base.star_subdivide(&tau)?)
}

/// `P(O_{P^2} ⊕ O(α) ⊕ O(β))` blown up along `V(τ)`, `τ` named by rays.
fn blown_up_p2_bundle(alpha: i64, beta: i64, tau: &[&str]) -> Result<Fan, CatalogError> {
    let base = kleinschmidt(2, &[alpha, beta])?;
    let idx: Vec<usize> = tau.iter().map(|n| base.ray_index(n).expect("known ray")).collect();
    Ok(base.star_subdivide(&idx)?)
}

fn g1() -> Result<Fan, CatalogError> {
    let rays = vec![
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![1, -1, -1, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
        vec![2, 0, -1, -1],
        vec![-1, 0, 0, 0],
    ];
    // Primitive collections, 0-indexed.
    let forbidden: [&[usize]; 5] = [&[0, 6], &[1, 2, 3], &[3, 4, 5], &[4, 5, 6], &[0, 1, 2]];
    let cones = (0..7).combinations(4).filter(|c| !forbidden.iter().any(|p| p.iter().all(|x| c.contains(x)))).collect();
    Ok(Fan::from_rows(4, rays, cones)?.with_ray_names((1..=7).map(|i| format!("v{i}")))?)
}

/// The 38 rows of the Picard-rank-at-most-3 toric Fano fourfold table with
/// the expected stability of the tangent bundle under `-K`.
pub const TABLE1: [(&str, &str, Verdict); 38] = {
    use Verdict::{Stable as S, StrictlySemistable as M, Unstable as U};
    [
        ("P4", "P^4", S),
        ("B1", "P(O_P3 + O(3))", U),
        ("B2", "P(O_P3 + O(2))", U),
        ("B3", "P(O_P3 + O(1))", U),
        ("B4", "P^1 x P^3", M),
        ("B5", "P(O_P1 + O + O + O(1))", M),
        ("C1", "P(O_P2 + O + O(2))", U),
        ("C2", "P(O_P2 + O + O(1))", U),
        ("C3", "P(O_P2 + O(1) + O(1))", U),
        ("C4", "P^2 x P^2", M),
        ("D1", "P(O + O(1,2)) over P^1 x P^2", U),
        ("D2", "P(O + O(0,1)) over P(O_P2 + O(2))", U),
        ("D3", "P(O + O(1,1)) over P(O_P2 + O(1))", U),
        ("D4", "P(O + O(0,2)) over P(O_P1 + O + O(1))", U),
        ("D5", "P^1 x P(O_P2 + O(2))", U),
        ("D6", "P(O + O(1,1)) over P^1 x P^2", U),
        ("D7", "P(O + O + O(1,1)) over P^1 x P^1", U),
        ("D8", "P(O + O(0,1)) over P(O_P2 + O(1))", U),
        ("D9", "P(O + O(1,0)) over P(O_P2 + O(1))", U),
        ("D10", "P(O + O(0,1)) over P(O_P1 + O + O(1))", U),
        ("D11", "P(O + O + O(0,1)) over the Hirzebruch surface F_1", U),
        ("D12", "P^1 x P(O_P2 + O(1))", U),
        ("D13", "P^1 x P^1 x P^2", M),
        ("D14", "P^1 x P(O_P1 + O + O(1))", M),
        ("D15", "F_1 x P^2", M),
        ("D16", "P(O + O(-1,1)) over P(O_P2 + O(1))", U),
        ("D17", "P(O + O(1,0) + O(0,1)) over P^1 x P^1", S),
        ("D18", "P(O + O(-1,2)) over P^1 x P^2", U),
        ("D19", "P(O + O(-1,1)) over P^1 x P^2", S),
        ("E1", "P(O_P3 + O(2)) blown up along V(v0, e1)", U),
        ("E2", "P(O_P3 + O(1)) blown up along V(v0, e1)", U),
        ("E3", "P^1 x P^3 blown up along V(v0, e1)", S),
        ("G1", "toric Fano fourfold with seven rays v1..v7", U),
        ("G2", "P(O_P2 + O + O(1)) blown up along V(v0, e2)", U),
        ("G3", "P(O_P2 + O(1) + O(1)) blown up along V(v1, v2, e0)", U),
        ("G4", "P(O_P2 + O + O(1)) blown up along V(v0, e0)", S),
        ("G5", "P(O_P2 + O(1) + O(1)) blown up along V(v0, e0)", S),
        ("G6", "P^2 x P^2 blown up along V(v0, e0)", S),
    ]
};

fn table_fan(label: &str) -> Result<Fan, CatalogError> {
    let p = projective_space;
    Ok(match label {
        "P4" => p(4)?,
        "B1" => kleinschmidt(3, &[3])?,
        "B2" => kleinschmidt(3, &[2])?,
        "B3" => kleinschmidt(3, &[1])?,
        "B4" => product_named(&[p(1)?, p(3)?], &["u0", "u1", "e0", "e1", "e2", "e3"])?,
        "B5" => kleinschmidt(1, &[0, 0, 1])?,
        "C1" => kleinschmidt(2, &[0, 2])?,
        "C2" => kleinschmidt(2, &[0, 1])?,
        "C3" => kleinschmidt(2, &[1, 1])?,
        "C4" => product_named(&[p(2)?, p(2)?], &["u0", "u1", "u2", "e0", "e1", "e2"])?,
        "D1" => line_bundle_over_p1xp2(1, 2)?,
        "D2" => line_bundle_over_p2_bundle(2, 0, 1)?,
        "D3" => line_bundle_over_p2_bundle(1, 1, 1)?,
        "D4" => line_bundle_over_p1_bundle(0, 2)?,
        "D5" => line_bundle_over_p2_bundle(2, 0, 0)?,
        "D6" => line_bundle_over_p1xp2(1, 1)?,
        "D7" => plane_bundle_over_quadric(0, 1, 1)?,
        "D8" => line_bundle_over_p2_bundle(1, 0, 1)?,
        "D9" => line_bundle_over_p2_bundle(1, 1, 0)?,
        "D10" => line_bundle_over_p1_bundle(0, 1)?,
        "D11" => plane_bundle_over_h1(0, 1)?,
        "D12" => line_bundle_over_p2_bundle(1, 0, 0)?,
        "D13" => product_named(&[p(1)?, p(1)?, p(2)?], &["a0", "a1", "b0", "b1", "e0", "e1", "e2"])?,
        "D14" => product_named(&[p(1)?, kleinschmidt(1, &[0, 1])?], &["w0", "w1", "v0", "v1", "e0", "e1", "e2"])?,
        "D15" => product_named(&[hirzebruch(1)?, p(2)?], &["v0", "v1", "f0", "f1", "z0", "z1", "z2"])?,
        "D16" => line_bundle_over_p2_bundle(1, -1, 1)?,
        "D17" => plane_bundle_over_quadric(1, 0, 1)?,
        "D18" => line_bundle_over_p1xp2(-1, 2)?,
        "D19" => line_bundle_over_p1xp2(-1, 1)?,
        "E1" => blown_up_p3_bundle(2)?,
        "E2" => blown_up_p3_bundle(1)?,
        "E3" => blown_up_p3_bundle(0)?,
        "G1" => g1()?,
        "G2" => blown_up_p2_bundle(0, 1, &["v0", "e2"])?,
        "G3" => blown_up_p2_bundle(1, 1, &["v1", "v2", "e0"])?,
        "G4" => blown_up_p2_bundle(0, 1, &["v0", "e0"])?,
        "G5" => blown_up_p2_bundle(1, 1, &["v0", "e0"])?,
        "G6" => blown_up_p2_bundle(0, 0, &["v0", "e0"])?,
        _ => return Err(CatalogError::UnknownLabel(label.into())),
    })
}

/// One of the tabulated fourfolds, by label (`P4`, `B1`..`B5`, `C1`..`C4`,
/// `D1`..`D19`, `E1`..`E3`, `G1`..`G6`).
pub fn batyrev_picard3(label: &str) -> Result<CatalogEntry, CatalogError> {
    let (_, description, verdict) =
        TABLE1.iter().find(|(l, _, _)| *l == label).ok_or_else(|| CatalogError::UnknownLabel(label.into()))?;
    Ok(CatalogEntry::new(label, *description, table_fan(label)?, Some(*verdict)))
}

pub fn table1() -> Result<Vec<CatalogEntry>, CatalogError> {
    TABLE1.iter().map(|(l, _, _)| batyrev_picard3(l)).collect()
}

fn parse_list(s: &str) -> Result<Vec<i64>, CatalogError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| invalid(format!("bad integer {x:?}")))).collect()
}

fn parse_call<'a>(label: &'a str, name: &str) -> Option<&'a str> {
    label.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

/// Any cataloged fan by label. Besides the table labels this accepts
/// `P<n>`, `H<a>`, `kl(s;a1,...,ar)`, `bott(k;c12,c13,...)`, `V<2r>` and
/// `tildeV<2r>`.
pub fn entry(label: &str) -> Result<CatalogEntry, CatalogError> {
    if TABLE1.iter().any(|(l, _, _)| *l == label) {
        return batyrev_picard3(label);
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| CatalogError::UnknownLabel(label.into()));
    if let Some(args) = parse_call(label, "kl") {
        let (s, a) = args.split_once(';').ok_or_else(|| invalid("expected kl(s;a1,...,ar)"))?;
        let s = num(s.trim())?;
        let a = parse_list(a)?;
        return Ok(CatalogEntry::new(
            label,
            format!("Kleinschmidt variety over P^{s} with twists {a:?}"),
            kleinschmidt(s, &a)?,
            None,
        ));
    }
    if let Some(args) = parse_call(label, "bott") {
        let (k, c) = args.split_once(';').unwrap_or((args, ""));
        let c = BottNumbers::from_upper(num(k.trim())?, &parse_list(c)?)?;
        return Ok(CatalogEntry::new(label, format!("Bott tower of height {}", c.k), bott_tower(&c)?, None));
    }
    if let Some(d) = label.strip_prefix("tildeV") {
        let d = num(d)?;
        return Ok(CatalogEntry::new(
            label,
            format!("pseudo Del Pezzo variety of dimension {d}"),
            pseudo_del_pezzo(d)?,
            None,
        ));
    }
    if let Some(d) = label.strip_prefix('V') {
        let d = num(d)?;
        return Ok(CatalogEntry::new(label, format!("Del Pezzo variety of dimension {d}"), del_pezzo(d)?, None));
    }
    if let Some(n) = label.strip_prefix('P') {
        let n = num(n)?;
        return Ok(CatalogEntry::new(label, format!("P^{n}"), projective_space(n)?, None));
    }
    if let Some(a) = label.strip_prefix('H') {
        let a = a.parse::<i64>().map_err(|_| CatalogError::UnknownLabel(label.into()))?;
        return Ok(CatalogEntry::new(label, format!("Hirzebruch surface F_{a}"), hirzebruch(a)?, None));
    }
    Err(CatalogError::UnknownLabel(label.into()))
}

fn canonical_lines<F: Field>() -> [Subspace<F>; 3] {
    let l = |a: i64, b: i64| Subspace::span(2, vec![vec![F::from_int(a), F::from_int(b)]]).expect("rank 2");
    [l(1, 0), l(0, 1), l(1, 1)]
}

/// Rank two, with `lines[i]` at level `-1` on ray `rays[i]` and trivial
/// filtrations on the other rays.
fn three_line_bundle<F: Field>(num_rays: usize, rays: [usize; 3]) -> Result<ReflexiveSheaf<F>, CatalogError> {
    let lines = canonical_lines::<F>();
    let mut filtrations = vec![Filtration::single(2, 0); num_rays];
    for (r, l) in rays.into_iter().zip(lines) {
        filtrations[r] = Filtration::new(2, vec![(-1, l), (0, Subspace::full(2))])?;
    }
    Ok(ReflexiveSheaf::new(2, filtrations)?)
}

/// `E_{p,q}` on the Bott tower: lines `(1,0), (0,1), (1,1)` at level `-1`
/// on `v_p, v_q, v_{k+p}`; `c_1 = D_p + D_q + D_{k+p}`.
pub fn bott_bundle<F: Field>(c: &BottNumbers, p: usize, q: usize) -> Result<ReflexiveSheaf<F>, CatalogError> {
    let k = c.k;
    if k < 2 || !(1..=k).contains(&p) || !(1..=2 * k).contains(&q) || q == p || q == k + p {
        return Err(invalid(format!(
            "need 1 <= p <= k, 1 <= q <= 2k and q not in {{p, k+p}}; got k={k}, p={p}, q={q}"
        )));
    }
    three_line_bundle(2 * k, [p - 1, q - 1, k + p - 1])
}

/// Rank-two bundles on (pseudo) Del Pezzo varieties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelPezzoBundleSpec {
    /// `E_{{a,b},a}`: lines on `v_a, v_b, w_a`.
    TwoPlusOne { a: usize, b: usize },
    /// `E_{a,{a,b}}`: lines on `v_a, w_a, w_b`.
    OnePlusTwo { a: usize, b: usize },
}

/// The bundle `spec` on a fan with rays named `v_i`, `w_i` (as built by
/// [`del_pezzo`] and [`pseudo_del_pezzo`]).
pub fn del_pezzo_bundle<F: Field>(fan: &Fan, spec: DelPezzoBundleSpec) -> Result<ReflexiveSheaf<F>, CatalogError> {
    let ray = |name: String| fan.ray_index(&name).ok_or_else(|| invalid(format!("fan has no ray {name}")));
    let rays = match spec {
        DelPezzoBundleSpec::TwoPlusOne { a, b } if a != b => {
            [ray(format!("v{a}"))?, ray(format!("v{b}"))?, ray(format!("w{a}"))?]
        }
        DelPezzoBundleSpec::OnePlusTwo { a, b } if a != b => {
            [ray(format!("v{a}"))?, ray(format!("w{a}"))?, ray(format!("w{b}"))?]
        }
        _ => return Err(invalid("Del Pezzo bundle indices must differ")),
    };
    three_line_bundle(fan.num_rays(), rays)
}

/// `π_i^* E` for the projection of a product fan onto factor `factor`.
pub fn pullback_along_projection<F: Field>(
    product: &Fan,
    factor: usize,
    e: &ReflexiveSheaf<F>,
) -> Result<ReflexiveSheaf<F>, CatalogError> {
    let block = product
        .blocks()
        .get(factor)
        .ok_or_else(|| invalid(format!("product has {} factors, no factor {factor}", product.blocks().len())))?;
    if block.rays.len() != e.num_rays() {
        return Err(invalid(format!("factor {factor} has {} rays, sheaf has {}", block.rays.len(), e.num_rays())));
    }
    let mut filtrations = vec![Filtration::single(e.rank(), 0); product.num_rays()];
    for (i, r) in block.rays.clone().enumerate() {
        filtrations[r] = e.filtration(i).clone();
    }
    Ok(ReflexiveSheaf::new(e.rank(), filtrations)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_spaces() {
        for n in 1..=4 {
            let f = projective_space(n).unwrap();
            assert_eq!(f.num_rays(), n + 1);
            assert_eq!(f.max_cones().len(), n + 1);
        }
    }

    #[test]
    fn kleinschmidt_rays() {
        let f = kleinschmidt(1, &[0, 0, 1]).unwrap();
        assert_eq!(f.ray(0).coords(), &[-1, 0, 0, 1]);
        assert_eq!(f.ray_names()[2], "e0");
        assert!(kleinschmidt(2, &[1, 0]).is_err());
    }

    #[test]
    fn bott_tower_cones() {
        let c = BottNumbers::from_upper(3, &[1, 0, 2]).unwrap();
        let f = bott_tower(&c).unwrap();
        assert_eq!(f.max_cones().len(), 8);
        assert_eq!(f.ray(3).coords(), &[-1, 1, 0]);
        assert_eq!(f.ray(4).coords(), &[0, -1, 2]);
        assert_eq!(c.entries(), vec![1, 0, 2]);
        for cone in f.max_cones() {
            for i in 0..3 {
                assert!(!(cone.contains(&i) && cone.contains(&(i + 3))));
            }
        }
    }

    #[test]
    fn del_pezzo_hexagon() {
        let f = del_pezzo(2).unwrap();
        assert_eq!(f.num_rays(), 6);
        assert_eq!(f.max_cones().len(), 6);
        let g = pseudo_del_pezzo(2).unwrap();
        assert_eq!(g.num_rays(), 5);
        assert_eq!(g.max_cones().len(), 5);
    }

    #[test]
    fn higher_del_pezzo_are_valid() {
        assert_eq!(del_pezzo(4).unwrap().num_rays(), 10);
        assert_eq!(pseudo_del_pezzo(4).unwrap().num_rays(), 9);
        assert!(del_pezzo(3).is_err());
    }

    #[test]
    fn labels_parse() {
        assert_eq!(entry("bott(2;1)").unwrap().fan.num_rays(), 4);
        assert_eq!(entry("kl(2;0,1)").unwrap().fan.num_rays(), 6);
        assert_eq!(entry("tildeV4").unwrap().fan.num_rays(), 9);
        assert_eq!(entry("P3").unwrap().fan.rank(), 3);
        assert!(matches!(entry("Z9"), Err(CatalogError::UnknownLabel(_))));
    }

    #[test]
    fn bott_bundle_rejects_clashing_index() {
        let c = BottNumbers::from_upper(2, &[1]).unwrap();
        assert!(bott_bundle::<num_rational::BigRational>(&c, 1, 3).is_err());
        assert!(bott_bundle::<num_rational::BigRational>(&c, 1, 2).is_ok());
    }
}
