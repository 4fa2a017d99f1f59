//! Equivalence of characteristic data: a cellular isomorphism of sponges and
//! one lattice automorphism carrying the local Euler data across.
//!
//! Verdicts are relative to cellular equivalence. Data that is not equivalent
//! by a cell-structure-preserving map may still have homeomorphic pairs.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::chardata::{compatibility_check, validate_mu, CharacteristicData};
use crate::error::{Error, Result};
use crate::lattice::{saturation_index, solve_unimodular_transform, span_rank, IntMatrix, IntVector};
use crate::poset::for_each_isomorphism;
use crate::sponge::homology;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    /// Cell id of the first datum to cell id of the second.
    pub cell_map: BTreeMap<String, String>,
    /// Orientation change `δ_c` of each cell of the first datum.
    pub orientation: BTreeMap<String, i64>,
    /// `A k'_F μ'(F) = g δ_F k''_{βF} μ''(βF)` for every facet `F`.
    pub matrix: IntMatrix,
    pub global_sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Some invariant of the fingerprint differs.
    InvariantMismatch(String),
    /// No cellular isomorphism carries the Euler data across.
    NoWitness { isomorphisms_tried: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equivalent(EquivalenceWitness),
    Inequivalent(Certificate),
    Incomparable(String),
}

/// Necessary conditions for equivalence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub n: usize,
    pub ambient: String,
    pub cells_per_dim: Vec<usize>,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
    /// Per cell dimension, the sorted multiset of (rank, saturation index) of
    /// the `μ` around each cell.
    pub mu_profile: Vec<Vec<(usize, BigInt)>>,
}

pub fn canonical_invariants(cd: &CharacteristicData) -> Result<Fingerprint> {
    let s = &cd.sponge;
    let h = homology(s)?;
    let mut mu_profile = vec![Vec::new(); s.dim() + 1];
    for c in 0..s.len() {
        let vs: Vec<IntVector> = cd.mu_around(c).into_iter().map(|(_, m)| m.clone()).collect();
        mu_profile[s.cell_dim(c)].push((span_rank(&vs, cd.n - 1), saturation_index(&vs, cd.n - 1)));
    }
    for p in &mut mu_profile {
        p.sort();
    }
    let ambient = match cd.ambient {
        crate::chardata::Ambient::Product { boundary_trivial } => {
            format!("product(boundary_trivial={})", boundary_trivial)
        }
        a => a.name().to_string(),
    };
    Ok(Fingerprint { n: cd.n, ambient, cells_per_dim: s.cell_counts(), betti: h.betti, torsion: h.torsion, mu_profile })
}

fn require_valid(cd: &CharacteristicData, which: &str) -> Result<()> {
    let r = validate_mu(cd);
    if !r.passes() || !compatibility_check(cd) {
        return Err(Error::Precondition(format!("{} datum does not validate: {}", which, r)));
    }
    Ok(())
}

/// Orientation changes making `β` a chain isomorphism, or `None` when the
/// incidences cannot be matched. The changes are fixed up to one sign per
/// connected component; every choice is returned, with the first component
/// pinned (a global flip is absorbed by `-A`).
fn orientation_signs(cd1: &CharacteristicData, cd2: &CharacteristicData, beta: &[usize]) -> Option<Vec<Vec<i64>>> {
    let (s1, s2) = (&cd1.sponge, &cd2.sponge);
    let len = s1.len();
    let mut links: Vec<Vec<(usize, i64)>> = vec![Vec::new(); len];
    for c in 0..len {
        for &(d, k1) in s1.boundary_of(c) {
            let k2 = s2.incidence(beta[c], beta[d]);
            if k2.abs() != k1.abs() || k2 == 0 {
                return None;
            }
            let rel = k1.signum() * k2.signum();
            links[c].push((d, rel));
            links[d].push((c, rel));
        }
    }
    let mut delta = vec![0i64; len];
    let mut component = vec![0usize; len];
    let mut roots = 0;
    for root in 0..len {
        if delta[root] != 0 {
            continue;
        }
        delta[root] = 1;
        component[root] = roots;
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            for &(d, rel) in &links[c] {
                let want = delta[c] * rel;
                if delta[d] == 0 {
                    delta[d] = want;
                    component[d] = roots;
                    stack.push(d);
                } else if delta[d] != want {
                    return None;
                }
            }
        }
        roots += 1;
    }
    let free = roots.saturating_sub(1).min(MAX_FREE_COMPONENTS);
    Some(
        (0..1u64 << free)
            .map(|mask| {
                (0..len)
                    .map(|c| {
                        let k = component[c];
                        if k > 0 && k <= free && mask >> (k - 1) & 1 == 1 {
                            -delta[c]
                        } else {
                            delta[c]
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Components beyond this many keep their default orientation.
const MAX_FREE_COMPONENTS: usize = 12;

pub fn compare(cd1: &CharacteristicData, cd2: &CharacteristicData) -> Result<Comparison> {
    require_valid(cd1, "first")?;
    require_valid(cd2, "second")?;
    if cd1.n != cd2.n {
        return Ok(Comparison::Incomparable(format!("different n: {} vs {}", cd1.n, cd2.n)));
    }
    if cd1.ambient != cd2.ambient {
        return Ok(Comparison::Incomparable(format!(
            "different ambient spaces: {:?} vs {:?}",
            cd1.ambient, cd2.ambient
        )));
    }
    let f1 = canonical_invariants(cd1)?;
    let f2 = canonical_invariants(cd2)?;
    if let Some(detail) = fingerprint_difference(&f1, &f2) {
        return Ok(Comparison::Inequivalent(Certificate::InvariantMismatch(detail)));
    }
    let (s1, s2) = (&cd1.sponge, &cd2.sponge);
    let p1 = s1.face_poset();
    let p2 = s2.face_poset();
    let facets1 = s1.facets();
    let e1 = cd1.euler_vectors();
    let e2 = cd2.euler_vectors();
    let source: Vec<IntVector> = facets1.iter().map(|&f| e1[s1.id(f)].clone()).collect();
    let mut tried = 0usize;
    let found = for_each_isomorphism(&p1, &p2, |beta| {
        tried += 1;
        let Some(choices) = orientation_signs(cd1, cd2, beta) else {
            return ControlFlow::Continue(());
        };
        for delta in choices {
            let target: Vec<IntVector> =
                facets1.iter().map(|&f| e2[s2.id(beta[f])].scale(&BigInt::from(delta[f]))).collect();
            if let Some(a) = solve_unimodular_transform(&source, &target, cd1.n - 1) {
                return ControlFlow::Break((beta.to_vec(), delta, a));
            }
        }
        ControlFlow::Continue(())
    });
    let Some((beta, delta, a)) = found else {
        return Ok(Comparison::Inequivalent(Certificate::NoWitness { isomorphisms_tried: tried }));
    };
    // Prefer det A = +1 when -A is also unimodular with det +1.
    let (matrix, global_sign) =
        if a.determinant()? < BigInt::from(0) && (cd1.n - 1) % 2 == 1 { (negate(&a), -1) } else { (a, 1) };
    let witness = EquivalenceWitness {
        cell_map: (0..s1.len()).map(|c| (s1.id(c).to_string(), s2.id(beta[c]).to_string())).collect(),
        orientation: (0..s1.len()).map(|c| (s1.id(c).to_string(), delta[c])).collect(),
        matrix,
        global_sign,
    };
    if !verify_witness(cd1, cd2, &witness) {
        return Err(Error::Consistency("constructed witness fails verification".into()));
    }
    Ok(Comparison::Equivalent(witness))
}

fn negate(a: &IntMatrix) -> IntMatrix {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, -a.get(i, j));
        }
    }
    out
}

fn fingerprint_difference(a: &Fingerprint, b: &Fingerprint) -> Option<String> {
    if a.cells_per_dim != b.cells_per_dim {
        return Some(format!("cells per dimension {:?} vs {:?}", a.cells_per_dim, b.cells_per_dim));
    }
    if a.betti != b.betti || a.torsion != b.torsion {
        return Some(format!("sponge homology {:?} vs {:?}", a.betti, b.betti));
    }
    if a.mu_profile != b.mu_profile {
        return Some("μ rank profiles differ".into());
    }
    if a != b {
        return Some("fingerprints differ".into());
    }
    None
}

/// Checks a witness by substitution: the map is a dimension-preserving
/// bijection, incidences agree up to the orientation changes, `A` is
/// unimodular and carries every local Euler vector across.
pub fn verify_witness(cd1: &CharacteristicData, cd2: &CharacteristicData, w: &EquivalenceWitness) -> bool {
    let (s1, s2) = (&cd1.sponge, &cd2.sponge);
    if s1.len() != s2.len() || w.cell_map.len() != s1.len() || !(w.global_sign == 1 || w.global_sign == -1) {
        return false;
    }
    let mut image = Vec::with_capacity(s1.len());
    for c in 0..s1.len() {
        let Some(t) = w.cell_map.get(s1.id(c)).and_then(|id| s2.index_of(id)) else {
            return false;
        };
        if s2.cell_dim(t) != s1.cell_dim(c) {
            return false;
        }
        image.push(t);
    }
    let mut seen = image.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != image.len() {
        return false;
    }
    let delta = |c: usize| w.orientation.get(s1.id(c)).copied().unwrap_or(0);
    for c in 0..s1.len() {
        if delta(c).abs() != 1 {
            return false;
        }
        for d in 0..s1.len() {
            if s1.cell_dim(d) + 1 != s1.cell_dim(c) {
                continue;
            }
            if s2.incidence(image[c], image[d]) != delta(c) * delta(d) * s1.incidence(c, d) {
                return false;
            }
        }
    }
    if w.matrix.rows() != cd1.n - 1 || !w.matrix.is_square() || !w.matrix.is_unimodular() {
        return false;
    }
    for f in s1.facets() {
        let id1 = s1.id(f);
        let id2 = s2.id(image[f]);
        let lhs = match w.matrix.mul_vec(&cd1.mu[id1].scale(&BigInt::from(cd1.euler_sign[id1]))) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let rhs = cd2.mu[id2].scale(&BigInt::from(w.global_sign * delta(f) * cd2.euler_sign[id2]));
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load;

    #[test]
    fn self_comparison() {
        for name in ["g42", "f3", "cp3-reduction", "local-model-4"] {
            let cd = load(name).unwrap().data;
            match compare(&cd, &cd).unwrap() {
                Comparison::Equivalent(w) => assert!(verify_witness(&cd, &cd, &w)),
                other => panic!("{}: {:?}", name, other),
            }
        }
    }

    #[test]
    fn relabeled_and_transformed() {
        let cd = load("g42").unwrap().data;
        let a = IntMatrix::from_i64_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 2, 1]]).unwrap();
        let mut other = cd.transformed(&a).unwrap();
        other.sponge = other.sponge.relabeled(|id| format!("c[{}]", id)).unwrap();
        other.mu = other.mu.into_iter().map(|(k, v)| (format!("c[{}]", k), v)).collect();
        other.euler_sign = other.euler_sign.into_iter().map(|(k, v)| (format!("c[{}]", k), v)).collect();
        let Comparison::Equivalent(w) = compare(&cd, &other).unwrap() else { panic!("not equivalent") };
        assert!(verify_witness(&cd, &other, &w));
        assert_eq!(w.cell_map.len(), cd.sponge.len());
    }

    #[test]
    fn flipped_hopf_sign() {
        let cd = load("g42").unwrap().data;
        let mut flipped = cd.clone();
        let first = flipped.euler_sign.keys().next().unwrap().clone();
        *flipped.euler_sign.get_mut(&first).unwrap() *= -1;
        assert!(matches!(compare(&cd, &flipped).unwrap(), Comparison::Inequivalent(Certificate::NoWitness { .. })));
    }

    #[test]
    fn different_n() {
        let g = load("g42").unwrap().data;
        let f = load("f3").unwrap().data;
        assert!(matches!(compare(&g, &f).unwrap(), Comparison::Incomparable(_)));
    }

    #[test]
    fn fingerprints() {
        let g = load("g42").unwrap().data;
        let relabeled = CharacteristicData {
            sponge: g.sponge.relabeled(|id| format!("{}'", id)).unwrap(),
            mu: g.mu.iter().map(|(k, v)| (format!("{}'", k), v.clone())).collect(),
            euler_sign: g.euler_sign.iter().map(|(k, v)| (format!("{}'", k), *v)).collect(),
            ..g.clone()
        };
        assert_eq!(canonical_invariants(&g).unwrap(), canonical_invariants(&relabeled).unwrap());
        let cp3 = load("cp3-reduction").unwrap().data;
        let lm = load("local-model-4").unwrap().data;
        assert_ne!(canonical_invariants(&cp3).unwrap().cells_per_dim, canonical_invariants(&lm).unwrap().cells_per_dim);
    }

    #[test]
    fn unvalidated_input_is_rejected() {
        let g = load("g42").unwrap().data;
        let mut bad = g.clone();
        for v in bad.mu.values_mut() {
            *v = IntVector::from_i64s(&[1, 0, 0]);
        }
        assert!(matches!(compare(&g, &bad), Err(Error::Precondition(_))));
    }
}
