//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything here works on [`IntVector`] and [`IntMatrix`], which are thin
//! wrappers around `BigInt` storage. Matrices are tiny in this crate (a few
//! dozen rows at most), so the algorithms favour clarity over speed.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer vector, e.g. a weight in `Hom(T, S^1)` or a circle subgroup in
/// `Hom(S^1, T)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    /// The `i`-th standard basis vector of `Z^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Gcd of the entries (nonnegative; zero for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        assert_eq!(self.dim(), other.dim(), "dot product of vectors of different dimension");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    /// Exact division of every entry; the caller guarantees divisibility.
    pub fn div_exact(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x / k).collect())
    }

    pub fn first_nonzero(&self) -> Option<&BigInt> {
        self.0.iter().find(|x| !x.is_zero())
    }

    /// Divide by the (positive) content, keeping the direction.
    pub fn primitive_part(&self) -> Result<IntVector> {
        let g = self.content();
        if g.is_zero() {
            return Err(Error::DegenerateInput("zero vector has no primitive part".into()));
        }
        Ok(self.div_exact(&g))
    }

    /// Primitive reduction with the first nonzero entry made positive.
    pub fn primitive(&self) -> Result<IntVector> {
        let p = self.primitive_part()?;
        Ok(match p.first_nonzero() {
            Some(x) if x.is_negative() => -p,
            _ => p,
        })
    }

    /// Returns `Some(k)` with `other = k * self` when the two vectors are
    /// parallel and `self` is nonzero.
    pub fn ratio_to(&self, other: &IntVector) -> Option<BigInt> {
        let (i, a) = self.0.iter().enumerate().find(|(_, x)| !x.is_zero())?;
        let (q, r) = other.0[i].div_rem(a);
        if !r.is_zero() {
            return None;
        }
        (self.scale(&q) == *other).then_some(q)
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl Neg for IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.into_iter().map(|x| -x).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim());
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim());
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x)?;
        }
        write!(f, ")")
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {}x{} matrix", data.len(), rows, cols)));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors. All vectors must have
    /// dimension `cols`; an empty list gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[IntVector], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.dim() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of dimension {} in a matrix with {} columns",
                    r.dim(),
                    cols
                )));
            }
            data.extend(r.entries().iter().cloned());
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_cols(cols: &[IntVector], rows: usize) -> Result<Self> {
        Ok(Self::from_rows(cols, rows)?.transpose())
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        Self::from_rows(&vs, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col_vectors(&self) -> Vec<IntVector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &IntVector) -> Result<IntVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to a vector of dimension {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        Ok(IntVector((0..self.rows).map(|i| self.row(i).dot(v)).collect()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Matrix with row `r` and column `c` removed.
    pub fn minor_matrix(&self, r: usize, c: usize) -> IntMatrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != r) {
            for j in (0..self.cols).filter(|&j| j != c) {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: self.rows, cols: cols.len(), data }
    }

    pub fn determinant(&self) -> Result<BigInt> {
        determinant(self)
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank
    }

    /// Classical adjugate, `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "adjugate of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(IntMatrix::zeros(0, 0));
        }
        if n == 1 {
            return Ok(IntMatrix::identity(1));
        }
        let mut adj = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d = determinant(&self.minor_matrix(i, j))?;
                let cof = if (i + j) % 2 == 0 { d } else { -d };
                adj.set(j, i, cof);
            }
        }
        Ok(adj)
    }

    /// Inverse of a matrix with determinant `±1`.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.determinant()?;
        if !det.abs().is_one() {
            return Err(Error::Precondition(format!("matrix is not unimodular (determinant {})", det)));
        }
        let adj = self.adjugate()?;
        Ok(IntMatrix { rows: adj.rows, cols: adj.cols, data: adj.data.iter().map(|x| x * &det).collect() })
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -std::mem::take(&mut self.data[idx]);
        }
    }

    /// `row_a <- x row_a + y row_b`, `row_b <- z row_a + w row_b` (simultaneously).
    fn combine_rows(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for j in 0..self.cols {
            let ra = self.get(a, j).clone();
            let rb = self.get(b, j).clone();
            self.set(a, j, x * &ra + y * &rb);
            self.set(b, j, z * &ra + w * &rb);
        }
    }

    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for i in 0..self.rows {
            let ca = self.get(i, a).clone();
            let cb = self.get(i, b).clone();
            self.set(i, a, x * &ca + y * &cb);
            self.set(i, b, z * &ca + w * &cb);
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        for i in 0..self.rows {
            let delta = self.get(i, source) * k;
            let idx = i * self.cols + target;
            self.data[idx] += delta;
        }
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        for j in 0..self.cols {
            let delta = self.get(source, j) * k;
            let idx = target * self.cols + j;
            self.data[idx] += delta;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("determinant of a non-square {}x{} matrix", a.rows, a.cols)));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                Some(i) => {
                    m.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = m.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * m.get(i, j) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
            m.set(i, k, BigInt::zero());
        }
        prev = pivot;
    }
    Ok(sign * m.get(n - 1, n - 1))
}

/// Smith decomposition `U * A * V = D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Invariant factors larger than one: the cyclic orders of the torsion of
    /// the cokernel `Z^rows / A Z^cols`.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors().into_iter().filter(|d| !d.is_one()).collect()
    }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Smith normal form with transforms. Diagonal entries are nonnegative and
/// form a divisibility chain.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut rank = 0;
    for t in 0..m.min(n) {
        // Pivot: smallest nonzero entry of the trailing block.
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !d.get(i, j).is_zero())
            .min_by_key(|&(i, j)| d.get(i, j).abs());
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let (p, q) = (d.get(t, t).clone(), d.get(i, t).clone());
                if q.is_multiple_of(&p) {
                    let k = -(&q / &p);
                    d.add_row_multiple(i, t, &k);
                    u.add_row_multiple(i, t, &k);
                    continue;
                }
                let (g, x, y) = ext_gcd(&p, &q);
                let (z, w) = (-(&q / &g), &p / &g);
                d.combine_rows(t, i, &x, &y, &z, &w);
                u.combine_rows(t, i, &x, &y, &z, &w);
                changed = true;
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let (p, q) = (d.get(t, t).clone(), d.get(t, j).clone());
                if q.is_multiple_of(&p) {
                    let k = -(&q / &p);
                    d.add_col_multiple(j, t, &k);
                    v.add_col_multiple(j, t, &k);
                    continue;
                }
                let (g, x, y) = ext_gcd(&p, &q);
                let (z, w) = (-(&q / &g), &p / &g);
                d.combine_cols(t, j, &x, &y, &z, &w);
                v.combine_cols(t, j, &x, &y, &z, &w);
                changed = true;
            }
            if changed {
                continue;
            }
            // Row and column t are clear; enforce divisibility of the block.
            let p = d.get(t, t).clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }
    SmithDecomposition { u, d, v, rank }
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `a`.
///
/// Returns the nonzero rows: echelon form, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. The result is a canonical basis of the row
/// lattice.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (m, n) = (h.rows, h.cols);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h.get(i, c).is_zero() {
                continue;
            }
            let (p, q) = (h.get(r, c).clone(), h.get(i, c).clone());
            if !p.is_zero() && q.is_multiple_of(&p) {
                h.add_row_multiple(i, r, &-(&q / &p));
                continue;
            }
            let (g, x, y) = ext_gcd(&p, &q);
            let (z, w) = (-(&q / &g), &p / &g);
            h.combine_rows(r, i, &x, &y, &z, &w);
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
        }
        pivots.push((r, c));
        r += 1;
    }
    for &(pr, pc) in &pivots {
        let p = h.get(pr, pc).clone();
        for i in 0..pr {
            let q = h.get(i, pc).div_floor(&p);
            if !q.is_zero() {
                h.add_row_multiple(i, pr, &-q);
            }
        }
    }
    let rows: Vec<IntVector> = (0..r).map(|i| h.row(i)).collect();
    IntMatrix::from_rows(&rows, n).expect("rows have matching width")
}

/// Canonical (HNF) basis of the lattice spanned by `vectors` in `Z^dim`.
pub fn lattice_basis(vectors: &[IntVector], dim: usize) -> Result<Vec<IntVector>> {
    let m = IntMatrix::from_rows(vectors, dim)?;
    Ok(hermite_normal_form(&m).row_vectors())
}

/// Saturated basis of `ker(A) ∩ Z^cols`, in Hermite normal form.
pub fn integer_kernel(a: &IntMatrix) -> Vec<IntVector> {
    let snf = smith_normal_form(a);
    let basis: Vec<IntVector> = (snf.rank..a.cols).map(|j| snf.v.col(j)).collect();
    if basis.is_empty() {
        return basis;
    }
    let m = IntMatrix::from_rows(&basis, a.cols).expect("kernel vectors have matching width");
    hermite_normal_form(&m).row_vectors()
}

/// Free-function form of [`IntVector::primitive`].
pub fn primitive(v: &IntVector) -> Result<IntVector> {
    v.primitive()
}

/// True iff the vectors extend to a `Z`-basis of `Z^n`.
pub fn is_unimodular_extension(vs: &[IntVector], n: usize) -> bool {
    if vs.len() > n || vs.iter().any(|v| v.dim() != n) {
        return false;
    }
    if vs.is_empty() {
        return true;
    }
    let m = IntMatrix::from_rows(vs, n).expect("dimensions checked");
    let snf = smith_normal_form(&m);
    snf.rank == vs.len() && snf.invariant_factors().iter().all(One::is_one)
}

/// Generalized cross product of `d - 1` vectors in `Z^d`: the vector `w` with
/// `det[x; v_1; ...; v_{d-1}] = x · w` for every `x`.
pub fn cofactor_vector(vs: &[IntVector], d: usize) -> Result<IntVector> {
    if vs.len() + 1 != d {
        return Err(Error::DimensionMismatch(format!("need {} vectors in Z^{}, got {}", d - 1, d, vs.len())));
    }
    let m = IntMatrix::from_rows(vs, d)?;
    let mut out = Vec::with_capacity(d);
    for c in 0..d {
        let cols: Vec<usize> = (0..d).filter(|&j| j != c).collect();
        let det = determinant(&m.select_cols(&cols))?;
        out.push(if c % 2 == 0 { det } else { -det });
    }
    Ok(IntVector::new(out))
}

/// Rank of the lattice spanned by the vectors.
pub fn span_rank(vs: &[IntVector], dim: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(vs, dim).map(|m| m.rank()).unwrap_or(0)
}

/// Index of the span of `vs` inside its saturation (product of the invariant
/// factors). Zero vectors are ignored; an empty span has index one.
pub fn saturation_index(vs: &[IntVector], dim: usize) -> BigInt {
    if vs.is_empty() {
        return BigInt::one();
    }
    let m = IntMatrix::from_rows(vs, dim).expect("matching dimensions");
    smith_normal_form(&m).invariant_factors().iter().product()
}

/// Solves `X * source = target` for a square unimodular `X`, where `source` and
/// `target` hold column vectors. `source` must contain `dim` linearly
/// independent columns; returns `None` when no integral unimodular solution
/// exists.
pub fn solve_unimodular_transform(source: &[IntVector], target: &[IntVector], dim: usize) -> Option<IntMatrix> {
    if source.len() != target.len() {
        return None;
    }
    // Pick `dim` independent columns greedily.
    let mut picked: Vec<usize> = Vec::new();
    for (i, _) in source.iter().enumerate() {
        let mut trial: Vec<IntVector> = picked.iter().map(|&j| source[j].clone()).collect();
        trial.push(source[i].clone());
        if span_rank(&trial, dim) == trial.len() {
            picked.push(i);
            if picked.len() == dim {
                break;
            }
        }
    }
    if picked.len() != dim {
        return None;
    }
    let s: Vec<IntVector> = picked.iter().map(|&j| source[j].clone()).collect();
    let t: Vec<IntVector> = picked.iter().map(|&j| target[j].clone()).collect();
    let s = IntMatrix::from_cols(&s, dim).ok()?;
    let t = IntMatrix::from_cols(&t, dim).ok()?;
    let det = s.determinant().ok()?;
    let numer = t.mul(&s.adjugate().ok()?).ok()?;
    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let (q, r) = numer.get(i, j).div_rem(&det);
            if !r.is_zero() {
                return None;
            }
            data.push(q);
        }
    }
    let x = IntMatrix::new(dim, dim, data).ok()?;
    if !x.is_unimodular() {
        return None;
    }
    let all_ok = source.iter().zip(target).all(|(s, t)| x.mul_vec(s).ok().as_ref() == Some(t));
    all_ok.then_some(x)
}

/// Canonical basis of the sublattice `ker(alpha) ⊂ Z^n` for a nonzero
/// character `alpha`, in Hermite normal form.
pub fn character_kernel_basis(alpha: &IntVector) -> Result<Vec<IntVector>> {
    if alpha.is_zero() {
        return Err(Error::DegenerateInput("zero character has no codimension-one kernel".into()));
    }
    let m = IntMatrix::from_rows(std::slice::from_ref(alpha), alpha.dim())?;
    Ok(integer_kernel(&m))
}

/// A vector `s` with `alpha · s = 1`; requires `alpha` primitive.
pub fn character_section(alpha: &IntVector) -> Result<IntVector> {
    if !alpha.is_primitive() {
        return Err(Error::DegenerateInput(format!("character {} is not primitive", alpha)));
    }
    let m = IntMatrix::from_rows(std::slice::from_ref(alpha), alpha.dim())?;
    let snf = smith_normal_form(&m);
    // u * alpha * v = (1, 0, ..., 0) with u = ±1.
    let s = snf.v.col(0).scale(snf.u.get(0, 0));
    debug_assert!(alpha.dot(&s).is_one());
    Ok(s)
}

/// Coordinates of `v` in the basis `basis` (rows) of a full-rank lattice
/// containing `v`. Returns `None` when `v` is not in the lattice.
pub fn coordinates_in_basis(v: &IntVector, basis: &[IntVector]) -> Option<IntVector> {
    let d = v.dim();
    let b = IntMatrix::from_rows(basis, d).ok()?;
    if !b.is_square() {
        return None;
    }
    let det = b.determinant().ok()?;
    if det.is_zero() {
        return None;
    }
    // v = a * B  =>  a = v * adj(B) / det(B)
    let adj = b.adjugate().ok()?;
    let numer = adj.transpose().mul_vec(v).ok()?;
    let mut out = Vec::with_capacity(d);
    for x in numer.entries() {
        let (q, r) = x.div_rem(&det);
        if !r.is_zero() {
            return None;
        }
        out.push(q);
    }
    Some(IntVector::new(out))
}
