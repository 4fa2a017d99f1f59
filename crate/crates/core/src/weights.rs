//! Weight systems of tangent representations at fixed points.
//!
//! A [`WeightSystem`] holds the `n` weights `α_1, ..., α_n ∈ Z^{n-1}` of the
//! representation of `T = T^{n-1}` on `C^n`. Indices are zero-based throughout
//! the API: weight `i` is `weights()[i]`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    character_kernel_basis, coordinates_in_basis, determinant, lattice_basis, smith_normal_form, IntMatrix, IntVector,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSystem {
    n: usize,
    weights: Vec<IntVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signs: Option<Vec<i8>>,
}

/// `c̃_i`, their gcd, and the normalized relation `c_i = c̃_i / gcd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CramerCoefficients {
    pub c_tilde: Vec<BigInt>,
    pub c_gcd: BigInt,
    pub c: Vec<BigInt>,
}

/// `H_t × H_f`: a torus of rank `torus_rank` times cyclic groups of the given
/// orders (each `> 1`, sorted by divisibility).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerStructure {
    pub torus_rank: usize,
    pub finite_orders: Vec<BigInt>,
}

impl StabilizerStructure {
    pub fn is_torus(&self) -> bool {
        self.finite_orders.is_empty()
    }
}

impl WeightSystem {
    pub fn new(weights: Vec<IntVector>) -> Result<Self> {
        let n = weights.len();
        if n < 2 {
            return Err(Error::DegenerateInput(format!("a weight system needs n >= 2 weights, got {}", n)));
        }
        if let Some(w) = weights.iter().find(|w| w.dim() != n - 1) {
            return Err(Error::DimensionMismatch(format!(
                "weight {} has dimension {}, expected {}",
                w,
                w.dim(),
                n - 1
            )));
        }
        Ok(WeightSystem { n, weights, signs: None })
    }

    pub fn from_i64s(weights: &[&[i64]]) -> Result<Self> {
        Self::new(weights.iter().map(|w| IntVector::from_i64s(w)).collect())
    }

    /// The diagonal system `e_1, ..., e_{n-1}, -(e_1 + ... + e_{n-1})`, whose
    /// relation is `c = (1, ..., 1)`.
    pub fn standard(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateInput(format!("n = {} < 2", n)));
        }
        let mut ws: Vec<IntVector> = (0..n - 1).map(|i| IntVector::unit(n - 1, i)).collect();
        ws.push(IntVector::new(vec![-BigInt::one(); n - 1]));
        Self::new(ws)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[IntVector] {
        &self.weights
    }

    /// The omniorientation signs applied so far, if any.
    pub fn signs(&self) -> Option<&[i8]> {
        self.signs.as_deref()
    }

    /// Checks the shape invariants; used after deserialization.
    pub fn validate_shape(&self) -> Result<()> {
        let rebuilt = Self::new(self.weights.clone())?;
        if rebuilt.n != self.n {
            return Err(Error::DimensionMismatch(format!("n = {} but {} weights given", self.n, self.weights.len())));
        }
        if let Some(s) = &self.signs {
            if s.len() != self.n || s.iter().any(|&x| x != 1 && x != -1) {
                return Err(Error::Input("signs must be n values in {+1, -1}".into()));
            }
        }
        Ok(())
    }

    /// Multiplies weight `i` by `signs[i]`; the signs are recorded (composed with
    /// any previous choice).
    pub fn with_signs(&self, signs: &[i8]) -> Result<Self> {
        if signs.len() != self.n || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Input("signs must be n values in {+1, -1}".into()));
        }
        let weights = self.weights.iter().zip(signs).map(|(w, &s)| if s < 0 { -w } else { w.clone() }).collect();
        let prev = self.signs.clone().unwrap_or_else(|| vec![1; self.n]);
        let composed = prev.iter().zip(signs).map(|(a, b)| a * b).collect();
        Ok(WeightSystem { n: self.n, weights, signs: Some(composed) })
    }

    /// Applies one change of basis `g` of `Z^{n-1}` to every weight.
    pub fn transformed(&self, g: &IntMatrix) -> Result<Self> {
        let weights = self.weights.iter().map(|w| g.mul_vec(w)).collect::<Result<Vec<_>>>()?;
        Ok(WeightSystem { n: self.n, weights, signs: self.signs.clone() })
    }

    fn weight_matrix_without(&self, skip: &[usize]) -> IntMatrix {
        let rows: Vec<IntVector> = (0..self.n).filter(|k| !skip.contains(k)).map(|k| self.weights[k].clone()).collect();
        IntMatrix::from_rows(&rows, self.n - 1).expect("weights have dimension n - 1")
    }

    /// `c̃_i = (-1)^i det(α_1, ..., α̂_i, ..., α_n)` with one-based `i`.
    pub fn cofactor_coefficients(&self) -> Vec<BigInt> {
        (0..self.n)
            .map(|i| {
                let d = determinant(&self.weight_matrix_without(&[i])).expect("square minor");
                // one-based exponent i + 1
                if i % 2 == 0 {
                    -d
                } else {
                    d
                }
            })
            .collect()
    }

    pub fn cramer_coefficients(&self) -> Result<CramerCoefficients> {
        let c_tilde = self.cofactor_coefficients();
        let relation =
            self.weights.iter().zip(&c_tilde).fold(IntVector::zeros(self.n - 1), |acc, (w, c)| &acc + &w.scale(c));
        if !relation.is_zero() {
            return Err(Error::Consistency(format!("Cramer relation fails: Σ c̃_i α_i = {}", relation)));
        }
        let c_gcd = IntVector::new(c_tilde.clone()).content();
        if c_gcd.is_zero() {
            return Err(Error::DegenerateInput("weights span a lattice of rank < n - 1".into()));
        }
        let c = c_tilde.iter().map(|x| x / &c_gcd).collect();
        Ok(CramerCoefficients { c_tilde, c_gcd, c })
    }

    /// Every `n - 1` of the weights are linearly independent.
    pub fn is_general_position(&self) -> bool {
        self.cofactor_coefficients().iter().all(|c| !c.is_zero())
    }

    fn require_general_position(&self) -> Result<CramerCoefficients> {
        let cc = self.cramer_coefficients().map_err(|e| match e {
            Error::DegenerateInput(m) => Error::Precondition(format!("not in general position: {}", m)),
            other => other,
        })?;
        if cc.c_tilde.iter().any(Zero::is_zero) {
            return Err(Error::Precondition("weight system is not in general position".into()));
        }
        Ok(cc)
    }

    /// All normalized coefficients are `±1`; no finite stabilizer components.
    pub fn is_strictly_appropriate(&self) -> Result<bool> {
        let cc = self.require_general_position()?;
        Ok(cc.c.iter().all(|c| c.abs().is_one()))
    }

    /// Structure of `T' ∩ G_I` where `T' = {Π t_i^{c_i} = 1}` and `G_I` is the
    /// coordinate subtorus on the indices in `subset`.
    pub fn stabilizer_structure(&self, subset: &[usize]) -> Result<StabilizerStructure> {
        if subset.is_empty() {
            return Err(Error::DegenerateInput("empty index set".into()));
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != subset.len() {
            return Err(Error::Index("repeated index in subset".into()));
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.n) {
            return Err(Error::Index(format!("index {} out of range for n = {}", bad, self.n)));
        }
        let cc = self.require_general_position()?;
        let row = IntVector::new(sorted.iter().map(|&i| cc.c[i].clone()).collect());
        let relations = IntMatrix::from_rows(&[row], sorted.len())?;
        Ok(torus_subgroup_structure(&relations))
    }

    /// `c_i / c_j ∈ {+1, -1}`: `+1` for Hopf type, `-1` for anti-Hopf type.
    pub fn hopf_type(&self, i: usize, j: usize) -> Result<i8> {
        if i >= self.n || j >= self.n {
            return Err(Error::Index(format!("index out of range for n = {}", self.n)));
        }
        if i == j {
            return Err(Error::Index("hopf_type needs two distinct indices".into()));
        }
        if !self.is_strictly_appropriate()? {
            return Err(Error::Precondition("hopf_type needs a strictly appropriate weight system".into()));
        }
        let cc = self.cramer_coefficients()?;
        Ok(if cc.c[i] == cc.c[j] { 1 } else { -1 })
    }

    /// Canonical basis (Hermite normal form) of the lattice generated by the
    /// weights. It has positive determinant.
    pub fn weight_lattice_basis(&self) -> Result<Vec<IntVector>> {
        lattice_basis(&self.weights, self.n - 1)
    }

    /// Re-expresses the weights in the given basis of a lattice containing them.
    /// With the weight lattice basis this yields the weights of the effective
    /// quotient torus, whose `c̃` equal the normalized `c`.
    pub fn in_basis(&self, basis: &[IntVector]) -> Result<Self> {
        let weights = self
            .weights
            .iter()
            .map(|w| {
                coordinates_in_basis(w, basis)
                    .ok_or_else(|| Error::Input(format!("weight {} is not in the lattice of the given basis", w)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightSystem { n: self.n, weights, signs: self.signs.clone() })
    }

    /// Weights in the basis of their own lattice (see [`Self::in_basis`]).
    pub fn effective(&self) -> Result<Self> {
        let basis = self.weight_lattice_basis()?;
        if basis.len() != self.n - 1 {
            return Err(Error::DegenerateInput("weights span a lattice of rank < n - 1".into()));
        }
        self.in_basis(&basis)
    }
}

/// The closed subgroup of `T^k` cut out by the characters in the rows of
/// `relations` (a `r x k` integer matrix), read off from its Smith form.
pub fn torus_subgroup_structure(relations: &IntMatrix) -> StabilizerStructure {
    let snf = smith_normal_form(relations);
    StabilizerStructure { torus_rank: relations.cols() - snf.rank, finite_orders: snf.torsion() }
}

/// Tangent weights at a vertex of a quasitoric pair, restricted to the subtorus
/// `ker(alpha_t)`.
///
/// The weights are the dual basis of `lambda_basis`, pushed to `Z^{n-1}` by
/// pairing with the canonical basis of `ker(alpha_t) ⊂ Z^n`.
pub fn induced_weights(lambda_basis: &[IntVector], alpha_t: &IntVector) -> Result<WeightSystem> {
    let n = lambda_basis.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need n >= 2 characteristic vectors, got {}", n)));
    }
    if alpha_t.dim() != n {
        return Err(Error::DimensionMismatch(format!("alpha_T has dimension {}, expected {}", alpha_t.dim(), n)));
    }
    let lam = IntMatrix::from_rows(lambda_basis, n)?;
    let det = lam.determinant()?;
    if !det.abs().is_one() {
        return Err(Error::StarCondition(format!("characteristic vectors at the vertex have determinant {}", det)));
    }
    if !alpha_t.is_primitive() {
        return Err(Error::DegenerateInput(format!("alpha_T = {} is not primitive", alpha_t)));
    }
    let kernel = character_kernel_basis(alpha_t)?;
    let dual = dual_basis(&lam)?;
    let weights = dual.iter().map(|a| IntVector::new(kernel.iter().map(|k| a.dot(k)).collect())).collect();
    WeightSystem::new(weights)
}

/// Rows `α_a` with `α_a · λ_b = δ_ab`, for a unimodular matrix with rows `λ_b`.
pub fn dual_basis(lam: &IntMatrix) -> Result<Vec<IntVector>> {
    Ok(lam.inverse_unimodular()?.transpose().row_vectors())
}
