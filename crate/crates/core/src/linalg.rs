//! Exact linear algebra: integer lattice vectors and canonical subspaces
//! over an exact field.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows} rows, {cols} columns)")]
    NonSquare { rows: usize, cols: usize },
    #[error("subspace is not contained in the given superspace")]
    NotContained,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
}

/// A vector of the lattice `Z^n` (or its dual).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Nonzero with coprime coordinates.
    pub fn is_primitive(&self) -> bool {
        let g = self.0.iter().fold(0i64, |g, &c| g.gcd(&c));
        g == 1
    }

    pub fn pairing(&self, other: &LatticeVector) -> Result<i64, LinalgError> {
        pairing(self, other)
    }

    pub fn add(&self, other: &LatticeVector) -> Result<LatticeVector, LinalgError> {
        check_dim(self.dim(), other.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(LinalgError::Overflow))
            .collect::<Result<_, _>>()
            .map(LatticeVector)
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }

    /// Concatenation `(self, other)` in `Z^{a+b}`.
    pub fn concat(&self, other: &LatticeVector) -> LatticeVector {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        LatticeVector(v)
    }

    pub fn to_field<F: Field>(&self) -> Vec<F> {
        self.0.iter().map(|&c| F::from_int(c)).collect()
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}

/// The pairing `<m, v>` between `M` and `N`.
pub fn pairing(m: &LatticeVector, v: &LatticeVector) -> Result<i64, LinalgError> {
    check_dim(m.dim(), v.dim())?;
    let mut acc: i128 = 0;
    for (a, b) in m.0.iter().zip(&v.0) {
        acc += (*a as i128) * (*b as i128);
    }
    i64::try_from(acc).map_err(|_| LinalgError::Overflow)
}

fn to_rational_rows(rows: &[LatticeVector]) -> Result<Vec<Vec<BigRational>>, LinalgError> {
    let n = rows.len();
    for r in rows {
        if r.dim() != n {
            return Err(LinalgError::NonSquare { rows: n, cols: r.dim() });
        }
    }
    Ok(rows.iter().map(|r| r.to_field()).collect())
}

/// Determinant of the square matrix whose rows are `rows`.
pub fn determinant(rows: &[LatticeVector]) -> Result<i64, LinalgError> {
    let m = to_rational_rows(rows)?;
    let d = det_field(m);
    debug_assert!(d.is_integer());
    d.to_integer().to_i64().ok_or(LinalgError::Overflow)
}

/// Whether `rows` form a basis of `Z^n`, i.e. `|det| = 1`.
pub fn is_lattice_basis(rows: &[LatticeVector]) -> Result<bool, LinalgError> {
    Ok(determinant(rows)?.abs() == 1)
}

/// For a lattice basis `v_1..v_n`, the dual basis `u_1..u_n` with
/// `<u_i, v_j> = delta_ij`. `None` when the rows are not a lattice basis.
pub fn dual_basis(rows: &[LatticeVector]) -> Result<Option<Vec<LatticeVector>>, LinalgError> {
    let m = to_rational_rows(rows)?;
    let n = m.len();
    let Some(inv) = inverse(m) else {
        return Ok(None);
    };
    // U = (V^{-1})^T, so u_i is column i of V^{-1}.
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut u = Vec::with_capacity(n);
        for row in &inv {
            let x = &row[i];
            if !x.is_integer() {
                return Ok(None);
            }
            u.push(x.to_integer().to_i64().ok_or(LinalgError::Overflow)?);
        }
        out.push(LatticeVector(u));
    }
    Ok(Some(out))
}

/// Determinant over a field by elimination.
pub fn det_field<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    let mut det = F::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return F::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pivot.clone();
            let (top, rest) = m.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = x.clone() - y.clone() * f.clone();
            }
        }
    }
    det
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse<F: Field>(m: Vec<Vec<F>>) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut aug: Vec<Vec<F>> = m
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            row
        })
        .collect();
    let (reduced, pivots) = rref_in_place(&mut aug, n);
    if reduced != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Reduces `rows` to reduced row echelon form, pivoting only in the first
/// `pivot_cols` columns. Returns the rank and pivot columns; zero rows are
/// moved to the bottom.
fn rref_in_place<F: Field>(rows: &mut [Vec<F>], pivot_cols: usize) -> (usize, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = F::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in 0..rows[i].len() {
                let t = rows[r][j].clone() * f.clone();
                rows[i][j] = rows[i][j].clone() - t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, pivots)
}

/// A linear subspace of `F^n` in canonical form: the basis rows are the
/// nonzero rows of the reduced row echelon form, so two subspaces are equal
/// exactly when their representations are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis =
            (0..ambient).map(|i| (0..ambient).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect();
        Subspace { ambient, basis }
    }

    pub fn span<I>(ambient: usize, vectors: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = Vec<F>>,
    {
        let mut rows = Vec::new();
        for v in vectors {
            check_dim(ambient, v.len())?;
            rows.push(v);
        }
        Ok(Self::from_rows_unchecked(ambient, rows))
    }

    pub fn from_lattice(ambient: usize, vectors: &[LatticeVector]) -> Result<Self, LinalgError> {
        Self::span(ambient, vectors.iter().map(|v| v.to_field()))
    }

    fn from_rows_unchecked(ambient: usize, mut rows: Vec<Vec<F>>) -> Self {
        let (rank, _) = rref_in_place(&mut rows, ambient);
        rows.truncate(rank);
        Subspace { ambient, basis: rows }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    fn pivot(row: &[F]) -> usize {
        row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero")
    }

    pub fn contains(&self, v: &[F]) -> Result<bool, LinalgError> {
        check_dim(self.ambient, v.len())?;
        let mut w = v.to_vec();
        for row in &self.basis {
            let p = Self::pivot(row);
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, r) in w.iter_mut().zip(row) {
                *x = x.clone() - r.clone() * f.clone();
            }
        }
        Ok(w.iter().all(|x| x.is_zero()))
    }

    pub fn is_subspace_of(&self, other: &Self) -> Result<bool, LinalgError> {
        check_dim(other.ambient, self.ambient)?;
        if self.dim() > other.dim() {
            return Ok(false);
        }
        for row in &self.basis {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.ambient, other.ambient)?;
        if self.is_subspace_of(other)? {
            return Ok(other.clone());
        }
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Self::from_rows_unchecked(self.ambient, rows))
    }

    /// Orthogonal complement under the standard bilinear form, i.e. the
    /// annihilator once `F^n` is identified with its dual via the standard
    /// basis.
    pub fn annihilator(&self) -> Self {
        let n = self.ambient;
        let pivots: Vec<usize> = self.basis.iter().map(|r| Self::pivot(r)).collect();
        let mut rows = Vec::new();
        for f in (0..n).filter(|c| !pivots.contains(c)) {
            let mut x = vec![F::zero(); n];
            x[f] = F::one();
            for (row, &p) in self.basis.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            rows.push(x);
        }
        Self::from_rows_unchecked(n, rows)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, LinalgError> {
        check_dim(self.ambient, other.ambient)?;
        if self.is_subspace_of(other)? {
            return Ok(self.clone());
        }
        if other.is_subspace_of(self)? {
            return Ok(other.clone());
        }
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// `dim(superspace / self)`.
    pub fn quotient_dim(&self, superspace: &Self) -> Result<usize, LinalgError> {
        if !self.is_subspace_of(superspace)? {
            return Err(LinalgError::NotContained);
        }
        Ok(superspace.dim() - self.dim())
    }

    /// Expresses `sub ⊆ self` in the coordinates of `self`, reading off the
    /// pivot entries of its canonical basis.
    pub fn restrict(&self, sub: &Self) -> Result<Self, LinalgError> {
        if !sub.is_subspace_of(self)? {
            return Err(LinalgError::NotContained);
        }
        let pivots: Vec<usize> = self.basis.iter().map(|r| Self::pivot(r)).collect();
        let rows = sub.basis.iter().map(|r| pivots.iter().map(|&p| r[p].clone()).collect()).collect();
        Ok(Self::from_rows_unchecked(self.dim(), rows))
    }

    /// `self (+) other` inside `F^{a+b}`, placed blockwise.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.ambient + other.ambient;
        let mut rows = Vec::with_capacity(self.dim() + other.dim());
        for r in &self.basis {
            let mut x = r.clone();
            x.extend(std::iter::repeat_n(F::zero(), other.ambient));
            rows.push(x);
        }
        for r in &other.basis {
            let mut x = vec![F::zero(); self.ambient];
            x.extend(r.iter().cloned());
            rows.push(x);
        }
        Self::from_rows_unchecked(n, rows)
    }

    /// `self (x) other` inside `F^{ab}`, with basis `e_i (x) f_j` at index
    /// `i * b + j`.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.ambient * other.ambient;
        let mut rows = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                let mut x = Vec::with_capacity(n);
                for ai in a {
                    for bj in b {
                        x.push(ai.clone() * bj.clone());
                    }
                }
                rows.push(x);
            }
        }
        Self::from_rows_unchecked(n, rows)
    }

    /// Image under the coordinate embedding `F^n -> F^total` at `offset`.
    pub fn embed(&self, offset: usize, total: usize) -> Result<Self, LinalgError> {
        if offset + self.ambient > total {
            return Err(LinalgError::DimensionMismatch { expected: total, found: offset + self.ambient });
        }
        let rows = self
            .basis
            .iter()
            .map(|r| {
                let mut x = vec![F::zero(); total];
                x[offset..offset + self.ambient].clone_from_slice(r);
                x
            })
            .collect();
        Ok(Subspace { ambient: total, basis: rows })
    }
}

impl<F: Field> fmt::Display for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Span[")?;
        for (k, row) in self.basis.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (i, x) in row.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// Outcome of a lattice-theoretic test that may give up on size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeDecision {
    Yes,
    No,
    Inconclusive,
}

/// Default bound on the number of elements of a generated subspace lattice.
pub const LATTICE_CAP: usize = 4096;

/// Triple checks performed before distributivity gives up.
const TRIPLE_BUDGET: usize = 50_000_000;

/// The sublattice of subspaces generated by a family under `+` and `∩`,
/// with meet and join tables.
#[derive(Debug, Clone)]
pub struct SubspaceLattice<F> {
    elements: Vec<Subspace<F>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
}

impl<F: Field> SubspaceLattice<F> {
    /// Closes `generators` (together with `0` and `F^n`) under sums and
    /// intersections. `None` when more than `cap` elements appear.
    pub fn generate(
        ambient: usize,
        generators: impl IntoIterator<Item = Subspace<F>>,
        cap: usize,
    ) -> Result<Option<Self>, LinalgError> {
        let mut index: BTreeMap<Subspace<F>, usize> = BTreeMap::new();
        let mut elements = Vec::new();
        let mut push = |s: Subspace<F>, elements: &mut Vec<Subspace<F>>| -> usize {
            if let Some(&i) = index.get(&s) {
                return i;
            }
            let i = elements.len();
            elements.push(s.clone());
            index.insert(s, i);
            i
        };
        push(Subspace::zero(ambient), &mut elements);
        push(Subspace::full(ambient), &mut elements);
        for g in generators {
            check_dim(ambient, g.ambient_dim())?;
            push(g, &mut elements);
        }
        let mut meet: Vec<Vec<Option<usize>>> = Vec::new();
        let mut join: Vec<Vec<Option<usize>>> = Vec::new();
        let mut done = 0;
        while done < elements.len() {
            if elements.len() > cap {
                return Ok(None);
            }
            let n = elements.len();
            for row in meet.iter_mut().chain(join.iter_mut()) {
                row.resize(n, None);
            }
            while meet.len() < n {
                meet.push(vec![None; n]);
                join.push(vec![None; n]);
            }
            for i in 0..n {
                for j in 0..=i {
                    if i < done && j < done {
                        continue;
                    }
                    let m = elements[i].intersect(&elements[j])?;
                    let s = elements[i].sum(&elements[j])?;
                    let mi = push(m, &mut elements);
                    let si = push(s, &mut elements);
                    meet[i][j] = Some(mi);
                    meet[j][i] = Some(mi);
                    join[i][j] = Some(si);
                    join[j][i] = Some(si);
                }
                if elements.len() > cap {
                    return Ok(None);
                }
            }
            done = n;
        }
        let unwrap = |t: Vec<Vec<Option<usize>>>| -> Vec<Vec<usize>> {
            t.into_iter().map(|r| r.into_iter().map(|x| x.expect("table filled")).collect()).collect()
        };
        Ok(Some(SubspaceLattice { elements, meet: unwrap(meet), join: unwrap(join) }))
    }

    pub fn elements(&self) -> &[Subspace<F>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Checks `a ∩ (b + c) = (a ∩ b) + (a ∩ c)` on every triple.
    pub fn is_distributive(&self) -> LatticeDecision {
        let n = self.elements.len();
        if n.saturating_mul(n).saturating_mul(n) > TRIPLE_BUDGET {
            return LatticeDecision::Inconclusive;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..b {
                    let lhs = self.meet[a][self.join[b][c]];
                    let rhs = self.join[self.meet[a][b]][self.meet[a][c]];
                    if lhs != rhs {
                        return LatticeDecision::No;
                    }
                }
            }
        }
        LatticeDecision::Yes
    }
}

/// Distinct proper (neither zero nor full) subspaces among `family`.
pub fn proper_subspaces<'a, F: Field>(family: impl IntoIterator<Item = &'a Subspace<F>>) -> BTreeSet<Subspace<F>> {
    family.into_iter().filter(|s| !s.is_zero() && !s.is_full()).cloned().collect()
}

/// Converts an exact rational with denominator one to `i64`.
pub fn rational_to_i64(x: &BigRational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}
