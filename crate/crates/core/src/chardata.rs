//! Characteristic data `(Q, Z, μ, e)`: a sponge, a primitive circle subgroup
//! `μ(F) ∈ Z^{n-1}` for every facet, and local Euler signs `k_F = ±1` with
//! `e = k_F μ(F)` near the facet.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::lattice::{cofactor_vector, lattice_basis, span_rank, IntVector};
use crate::report::ValidationReport;
use crate::sponge::{cell_spanned_at, frame_sign, local_model, weighted_boundary, SpongeComplex};
use crate::weights::WeightSystem;

/// What the orbit space is known to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// `Q ≅ S^{n+1}`.
    Sphere,
    /// `Q ≅ M × D²`; `boundary_trivial` records that the free part is trivial
    /// over `M × S¹`.
    Product {
        boundary_trivial: bool,
    },
    Abstract,
}

impl Ambient {
    pub fn name(&self) -> &'static str {
        match self {
            Ambient::Sphere => "sphere",
            Ambient::Product { .. } => "product",
            Ambient::Abstract => "abstract",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CharacteristicData {
    pub n: usize,
    pub sponge: SpongeComplex,
    pub mu: BTreeMap<String, IntVector>,
    pub euler_sign: BTreeMap<String, i64>,
    pub ambient: Ambient,
}

impl CharacteristicData {
    /// Checks only the shape: `μ` and the signs are given exactly on the facets
    /// and `μ` takes values in `Z^{n-1}`. Primitivity, sign range and the rank
    /// condition are left to the validators.
    pub fn new(
        sponge: SpongeComplex,
        mu: BTreeMap<String, IntVector>,
        euler_sign: BTreeMap<String, i64>,
        ambient: Ambient,
    ) -> Result<Self> {
        let n = sponge.n();
        let facets: Vec<String> = sponge.facets().iter().map(|&f| sponge.id(f).to_string()).collect();
        for f in &facets {
            let m = mu.get(f).ok_or_else(|| Error::Input(format!("missing μ for facet {}", f)))?;
            if m.dim() != n - 1 {
                return Err(Error::DimensionMismatch(format!(
                    "μ({}) has dimension {}, expected {}",
                    f,
                    m.dim(),
                    n - 1
                )));
            }
            if !euler_sign.contains_key(f) {
                return Err(Error::Input(format!("missing euler sign for facet {}", f)));
            }
        }
        for key in mu.keys().chain(euler_sign.keys()) {
            if !facets.contains(key) {
                return Err(Error::Input(format!("{} is not a facet of the sponge", key)));
            }
        }
        Ok(CharacteristicData { n, sponge, mu, euler_sign, ambient })
    }

    /// `μ` values of the facets containing cell `c` (including `c` itself).
    pub fn mu_around(&self, c: usize) -> Vec<(usize, &IntVector)> {
        let s = &self.sponge;
        let top = s.dim();
        std::iter::once(c)
            .chain(s.cells_above(c).iter().copied())
            .filter(|&f| s.cell_dim(f) == top)
            .map(|f| (f, &self.mu[s.id(f)]))
            .collect()
    }

    /// Local Euler data `e_F = k_F μ(F)`.
    pub fn euler_vectors(&self) -> BTreeMap<String, IntVector> {
        self.mu.iter().map(|(f, m)| (f.clone(), m.scale(&BigInt::from(self.euler_sign[f])))).collect()
    }

    /// Same data with every `μ` replaced by `a · μ`.
    pub fn transformed(&self, a: &crate::lattice::IntMatrix) -> Result<Self> {
        let mu = self.mu.iter().map(|(f, m)| Ok((f.clone(), a.mul_vec(m)?))).collect::<Result<_>>()?;
        Ok(CharacteristicData { mu, ..self.clone() })
    }
}

/// Rank condition: the `μ` of the facets around a `k`-cell span a sublattice of
/// rank `n - 1 - k`; every `μ` is nonzero and primitive; distinct facets meeting
/// in a cell have independent `μ`.
pub fn validate_mu(cd: &CharacteristicData) -> ValidationReport {
    let mut report = ValidationReport::new();
    let s = &cd.sponge;
    let n = cd.n;
    for (f, m) in &cd.mu {
        if m.is_zero() {
            report.push("mu-nonzero", vec![f.clone()], "μ is the zero vector");
        } else if !m.is_primitive() {
            report.push("mu-primitive", vec![f.clone()], format!("μ = {} is not primitive", m));
        }
    }
    let mut ids: Vec<usize> = (0..s.len()).collect();
    ids.sort_by(|&a, &b| s.cell_dim(a).cmp(&s.cell_dim(b)).then_with(|| s.id(a).cmp(s.id(b))));
    for c in ids {
        let around = cd.mu_around(c);
        let vs: Vec<IntVector> = around.iter().map(|(_, m)| (*m).clone()).collect();
        let rank = span_rank(&vs, n - 1);
        let expected = n - 1 - s.cell_dim(c);
        if rank != expected {
            report.push(
                "mu-rank",
                vec![s.id(c).to_string()],
                format!("μ of the {} surrounding facets span rank {}, expected {}", around.len(), rank, expected),
            );
        }
        if s.cell_dim(c) == 0 {
            for (a, (fa, ma)) in around.iter().enumerate() {
                for (fb, mb) in &around[a + 1..] {
                    if span_rank(&[(*ma).clone(), (*mb).clone()], n - 1) < 2 && n > 2 {
                        report.push(
                            "mu-pairwise",
                            vec![s.id(*fa).to_string(), s.id(*fb).to_string()],
                            format!("facets meeting at {} have dependent μ", s.id(c)),
                        );
                    }
                }
            }
        }
    }
    report
}

/// Representational consistency of the local Euler data: nonzero primitive `μ`
/// and signs in `{+1, -1}`, keyed exactly by the facets.
pub fn compatibility_check(cd: &CharacteristicData) -> bool {
    let facets = cd.sponge.facets();
    facets.len() == cd.mu.len()
        && facets.len() == cd.euler_sign.len()
        && cd.mu.values().all(|m| !m.is_zero() && m.is_primitive())
        && cd.euler_sign.values().all(|&k| k == 1 || k == -1)
}

/// Relation among the three facets around each `(n-3)`-cell: some signs
/// `ε ∈ {±1}³` make `Σ ε μ` vanish (`cocycle-relation`), and one such pattern
/// equals `±([F : g] k_F)_F` built from the stored signs (`cocycle-sign`).
pub fn cocycle_check(cd: &CharacteristicData) -> ValidationReport {
    let mut report = ValidationReport::new();
    let s = &cd.sponge;
    if cd.n < 3 {
        return report;
    }
    for g in s.cells_of_dim(cd.n - 3) {
        let around: Vec<usize> = s.cells_above(g).iter().copied().filter(|&f| s.cell_dim(f) == cd.n - 2).collect();
        let ids: Vec<String> = around.iter().map(|&f| s.id(f).to_string()).collect();
        if around.len() != 3 {
            report.push(
                "cocycle-relation",
                std::iter::once(s.id(g).to_string()).chain(ids).collect(),
                format!("{} facets around the cell, expected 3", around.len()),
            );
            continue;
        }
        let mus: Vec<&IntVector> = around.iter().map(|&f| &cd.mu[s.id(f)]).collect();
        let patterns = vanishing_patterns(&mus);
        if patterns.is_empty() {
            report.push(
                "cocycle-relation",
                std::iter::once(s.id(g).to_string()).chain(ids).collect(),
                format!("no ±1 combination of {}, {}, {} vanishes", mus[0], mus[1], mus[2]),
            );
            continue;
        }
        let stored: Vec<i64> = around.iter().map(|&f| s.incidence(f, g) * cd.euler_sign[s.id(f)]).collect();
        let matches = patterns
            .iter()
            .any(|p| p.iter().zip(&stored).all(|(a, b)| a == b) || p.iter().zip(&stored).all(|(a, b)| *a == -b));
        if !matches {
            report.push(
                "cocycle-sign",
                std::iter::once(s.id(g).to_string()).chain(ids).collect(),
                format!("stored signs {:?} do not match a vanishing pattern {:?}", stored, patterns[0]),
            );
        }
    }
    report
}

/// Sign patterns with first entry `+1` making `Σ ε_i v_i = 0`.
pub fn vanishing_patterns(vs: &[&IntVector]) -> Vec<Vec<i64>> {
    let k = vs.len();
    if k == 0 {
        return vec![Vec::new()];
    }
    let dim = vs[0].dim();
    let mut out = Vec::new();
    for mask in 0..(1u32 << (k - 1)) {
        let pattern: Vec<i64> = (0..k).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1 } else { 1 }).collect();
        let sum = vs.iter().zip(&pattern).fold(IntVector::zeros(dim), |acc, (v, &e)| &acc + &v.scale(&BigInt::from(e)));
        if sum.is_zero() {
            out.push(pattern);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitType {
    /// Cell id, or `None` for the free stratum `Q \ Z`.
    pub face: Option<String>,
    pub stabilizer_span: Vec<IntVector>,
    pub orbit_dim: usize,
    pub quotient_rank: usize,
}

/// Stabilizer lattice and orbit dimension over every cell, followed by the
/// free stratum.
pub fn orbit_types(cd: &CharacteristicData) -> Result<Vec<OrbitType>> {
    let s = &cd.sponge;
    let mut ids: Vec<usize> = (0..s.len()).collect();
    ids.sort_by(|&a, &b| s.cell_dim(a).cmp(&s.cell_dim(b)).then_with(|| s.id(a).cmp(s.id(b))));
    let mut out = Vec::with_capacity(ids.len() + 1);
    for c in ids {
        let vs: Vec<IntVector> = cd.mu_around(c).into_iter().map(|(_, m)| m.clone()).collect();
        let span: Vec<IntVector> = lattice_basis(&vs, cd.n - 1)?.into_iter().filter(|v| !v.is_zero()).collect();
        let orbit_dim = cd.n - 1 - span.len();
        out.push(OrbitType {
            face: Some(s.id(c).to_string()),
            stabilizer_span: span,
            orbit_dim,
            quotient_rank: orbit_dim,
        });
    }
    out.push(OrbitType { face: None, stabilizer_span: Vec::new(), orbit_dim: cd.n - 1, quotient_rank: cd.n - 1 });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerCycle {
    /// `σ(F) = k_F μ(F)`.
    pub sigma: BTreeMap<String, IntVector>,
    pub is_cycle: bool,
    /// `∂σ` on the `(n-3)`-cells where it is nonzero.
    pub defects: BTreeMap<String, IntVector>,
    /// The local classes determine the Euler class of the free part.
    pub determines_euler_class: bool,
}

/// Assembles `σ = Σ_F k_F μ(F) [F]` and checks that it is a cycle.
///
/// Refuses (with the failing cells) when the `μ` around some `(n-3)`-cell admit
/// no vanishing `±1` combination, since then no choice of signs can close up.
pub fn assemble_euler_cycle(cd: &CharacteristicData) -> Result<EulerCycle> {
    let report = cocycle_check(cd);
    if report.has("cocycle-relation") {
        return Err(Error::Validation(format!("cocycle relation fails: {}", report)));
    }
    let sigma = cd.euler_vectors();
    let defects = weighted_boundary(&cd.sponge, &sigma)?;
    let determines_euler_class = matches!(cd.ambient, Ambient::Sphere | Ambient::Product { boundary_trivial: true });
    Ok(EulerCycle { is_cycle: defects.is_empty(), sigma, defects, determines_euler_class })
}

fn require_strict(ws: &WeightSystem) -> Result<()> {
    if !ws.is_strictly_appropriate()? {
        return Err(Error::Precondition("weight system is not strictly appropriate".into()));
    }
    Ok(())
}

/// Local Euler vector at the facet `F_{ij}` of a chart, relative to the frame
/// `(e_k)_{k ∉ {i,j}}` in increasing order: `(c_i / c_j)` times the primitive
/// vector `m` with `det[x; α_k ...] = ⟨x, m⟩` up to content. The weights must
/// be given in coordinates of the lattice they generate.
fn local_euler_vector(ws: &WeightSystem, c: &[BigInt], i: usize, j: usize) -> Result<IntVector> {
    let n = ws.n();
    let rest: Vec<IntVector> = (0..n).filter(|&k| k != i && k != j).map(|k| ws.weights()[k].clone()).collect();
    let m = cofactor_vector(&rest, n - 1)?.primitive_part()?;
    Ok(if c[i] == c[j] { m } else { -m })
}

/// `(μ(F_{ij}), c_i / c_j)` for the facet of the local model where the
/// coordinates `i` and `j` vanish: `μ` is the primitive circle fixing the
/// weights `α_k`, `k ∉ {i, j}` (in coordinates of the effective torus).
pub fn local_euler_from_weights(ws: &WeightSystem, i: usize, j: usize) -> Result<(IntVector, i8)> {
    let n = ws.n();
    if i >= n || j >= n || i == j {
        return Err(Error::Index(format!("need two distinct indices below {}", n)));
    }
    require_strict(ws)?;
    let eff = ws.effective()?;
    let c = eff.cramer_coefficients()?.c;
    let (lo, hi) = (i.min(j), i.max(j));
    let mu = local_euler_vector(&eff, &c, lo, hi)?.primitive()?;
    Ok((mu, ws.hopf_type(i, j)?))
}

/// Tangent data at a vertex of a sponge: the weights, the edge leaving the
/// vertex in the direction of each weight (for `n >= 3`), and the sign of the
/// chart's orientation relative to the coordinate orientation.
#[derive(Clone, Debug)]
pub struct VertexChart {
    pub vertex: usize,
    pub weights: WeightSystem,
    pub edges: Vec<usize>,
    pub orientation: i64,
}

/// `e(v, F)` for every facet `F` at the chart's vertex, relative to the
/// facet's cell orientation. Weights must be strictly appropriate and given in
/// coordinates of the lattice they generate.
pub fn chart_euler_vectors(s: &SpongeComplex, chart: &VertexChart) -> Result<Vec<(usize, IntVector)>> {
    let ws = &chart.weights;
    let n = ws.n();
    if n != s.n() {
        return Err(Error::DimensionMismatch(format!("chart has n = {}, sponge has n = {}", n, s.n())));
    }
    require_strict(ws)?;
    let c = ws.cramer_coefficients()?.c;
    let mut out = Vec::new();
    if n == 2 {
        let e = local_euler_vector(ws, &c, 0, 1)?;
        out.push((chart.vertex, e.scale(&BigInt::from(chart.orientation))));
        return Ok(out);
    }
    if chart.edges.len() != n {
        return Err(Error::Input(format!(
            "chart at {} lists {} edges, expected {}",
            s.id(chart.vertex),
            chart.edges.len(),
            n
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            let frame: Vec<usize> = (0..n).filter(|&k| k != i && k != j).map(|k| chart.edges[k]).collect();
            let f = cell_spanned_at(s, chart.vertex, &frame, n - 2).ok_or_else(|| {
                Error::Consistency(format!("no unique facet at {} spanned by the chart edges", s.id(chart.vertex)))
            })?;
            let sign = frame_sign(s, f, chart.vertex, &frame)? * chart.orientation;
            let e = local_euler_vector(ws, &c, i, j)?;
            out.push((f, e.scale(&BigInt::from(sign))));
        }
    }
    Ok(out)
}

/// Characteristic data from charts at all vertices: `μ(F)` is the canonical
/// primitive direction of the local Euler vector and `k_F` its sign. The
/// vectors computed at different vertices of a facet must agree.
pub fn data_from_charts(s: &SpongeComplex, charts: &[VertexChart], ambient: Ambient) -> Result<CharacteristicData> {
    let mut euler: BTreeMap<usize, IntVector> = BTreeMap::new();
    for chart in charts {
        for (f, e) in chart_euler_vectors(s, chart)? {
            if let Some(prev) = euler.get(&f) {
                if *prev != e {
                    return Err(Error::Consistency(format!(
                        "local Euler vectors of facet {} disagree: {} vs {} at {}",
                        s.id(f),
                        prev,
                        e,
                        s.id(chart.vertex)
                    )));
                }
            } else {
                euler.insert(f, e);
            }
        }
    }
    let mut mu = BTreeMap::new();
    let mut signs = BTreeMap::new();
    for f in s.facets() {
        let e = euler.get(&f).ok_or_else(|| Error::Input(format!("facet {} has no vertex with a chart", s.id(f))))?;
        let m = e.primitive()?;
        let k = m.ratio_to(e).expect("parallel by construction");
        if !k.abs().is_one() {
            return Err(Error::Consistency(format!("local Euler vector {} of {} is not primitive", e, s.id(f))));
        }
        signs.insert(s.id(f).to_string(), if k.is_positive() { 1 } else { -1 });
        mu.insert(s.id(f).to_string(), m);
    }
    CharacteristicData::new(s.clone(), mu, signs, ambient)
}

/// The local model of a strictly appropriate weight system as characteristic
/// data (coordinates of the effective torus).
pub fn local_model_data(ws: &WeightSystem) -> Result<CharacteristicData> {
    require_strict(ws)?;
    let n = ws.n();
    let lm = local_model(n)?;
    let s = lm.to_complex();
    let origin = s.index_of(&crate::sponge::LocalModel::cone_id(&[])).expect("origin cell");
    let edges = if n == 2 {
        Vec::new()
    } else {
        (0..n).map(|k| s.index_of(&crate::sponge::LocalModel::cone_id(&[k])).expect("ray cell")).collect()
    };
    let chart = VertexChart { vertex: origin, weights: ws.effective()?, edges, orientation: 1 };
    data_from_charts(&s, &[chart], Ambient::Abstract)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix;

    fn local3(mus: [[i64; 2]; 3], signs: [i64; 3]) -> CharacteristicData {
        let s = local_model(3).unwrap().to_complex();
        let mut mu = BTreeMap::new();
        let mut es = BTreeMap::new();
        for k in 0..3 {
            let id = format!("cone({})", k + 1);
            mu.insert(id.clone(), IntVector::from_i64s(&mus[k]));
            es.insert(id, signs[k]);
        }
        CharacteristicData::new(s, mu, es, Ambient::Abstract).unwrap()
    }

    #[test]
    fn validate_mu_examples() {
        assert!(validate_mu(&local3([[1, 0], [0, 1], [1, 1]], [1, 1, -1])).passes());
        let bad = validate_mu(&local3([[1, 0], [0, 1], [1, 0]], [1, 1, 1]));
        assert!(bad.has("mu-pairwise"));
        let equal = validate_mu(&local3([[1, 0], [1, 0], [1, 0]], [1, 1, 1]));
        assert!(equal.has("mu-rank"));
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatibility_check(&local3([[1, 0], [0, 1], [1, 1]], [1, 1, -1])));
        assert!(!compatibility_check(&local3([[1, 0], [0, 1], [1, 1]], [1, 0, -1])));
        assert!(!compatibility_check(&local3([[2, 0], [0, 1], [1, 1]], [1, 1, -1])));
    }

    #[test]
    fn cocycle_examples() {
        // ∂ cone(k) = -origin, so the stored pattern is -(k_1, k_2, k_3).
        assert!(cocycle_check(&local3([[1, 0], [0, 1], [1, 1]], [1, 1, -1])).passes());
        let wrong_sign = cocycle_check(&local3([[1, 0], [0, 1], [1, 1]], [1, 1, 1]));
        assert!(wrong_sign.has("cocycle-sign") && !wrong_sign.has("cocycle-relation"));
        let none = cocycle_check(&local3([[1, 0], [0, 1], [1, 2]], [1, 1, 1]));
        assert!(none.has("cocycle-relation"));
        assert!(assemble_euler_cycle(&local3([[1, 0], [0, 1], [1, 2]], [1, 1, 1])).is_err());
    }

    #[test]
    fn assemble_flags() {
        let ok = assemble_euler_cycle(&local3([[1, 0], [0, 1], [1, 1]], [1, 1, -1])).unwrap();
        assert!(ok.is_cycle);
        assert!(!ok.determines_euler_class);
        let flipped = assemble_euler_cycle(&local3([[1, 0], [0, 1], [1, 1]], [1, -1, -1])).unwrap();
        assert!(!flipped.is_cycle);
        assert_eq!(flipped.defects.len(), 1);
    }

    #[test]
    fn orbit_type_ranks() {
        let cd = local3([[1, 0], [0, 1], [1, 1]], [1, 1, -1]);
        let types = orbit_types(&cd).unwrap();
        assert_eq!(types.len(), 5);
        assert_eq!(types[0].face.as_deref(), Some("cone()"));
        assert_eq!(types[0].orbit_dim, 0);
        assert_eq!(types[0].stabilizer_span.len(), 2);
        assert!(types[1..4].iter().all(|t| t.stabilizer_span.len() == 1 && t.orbit_dim == 1));
        assert_eq!(types[4].face, None);
        assert_eq!(types[4].orbit_dim, 2);
    }

    #[test]
    fn local_euler_signs() {
        let g42 = WeightSystem::from_i64s(&[&[1, 0, -1], &[0, 1, -1], &[-1, 0, -1], &[0, -1, -1]]).unwrap();
        assert_eq!(local_euler_from_weights(&g42, 0, 1).unwrap().1, -1);
        assert_eq!(local_euler_from_weights(&g42, 2, 3).unwrap().1, -1);
        assert_eq!(local_euler_from_weights(&g42, 0, 2).unwrap().1, 1);
        let std4 = WeightSystem::standard(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(local_euler_from_weights(&std4, i, j).unwrap().1, 1);
                }
            }
        }
        let non_strict = WeightSystem::from_i64s(&[&[2, 0], &[0, 2], &[-1, -1]]).unwrap();
        assert!(matches!(local_euler_from_weights(&non_strict, 0, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn local_euler_mu_fixes_other_weights() {
        let f3 = WeightSystem::from_i64s(&[&[1, 0], &[1, 1], &[0, 1]]).unwrap();
        let (mu, _) = local_euler_from_weights(&f3, 0, 1).unwrap();
        assert_eq!(mu.dot(&f3.weights()[2]), BigInt::from(0));
    }

    #[test]
    fn local_model_round_trip() {
        let systems = vec![
            WeightSystem::standard(2).unwrap(),
            WeightSystem::standard(3).unwrap(),
            WeightSystem::standard(5).unwrap(),
            WeightSystem::from_i64s(&[&[1, 0], &[1, 1], &[0, 1]]).unwrap(),
            WeightSystem::from_i64s(&[&[1, 0, -1], &[0, 1, -1], &[-1, 0, -1], &[0, -1, -1]]).unwrap(),
        ];
        for ws in systems {
            let cd = local_model_data(&ws).unwrap();
            assert!(validate_mu(&cd).passes(), "{}", validate_mu(&cd));
            assert!(compatibility_check(&cd));
            assert!(cocycle_check(&cd).passes(), "{}", cocycle_check(&cd));
            assert!(assemble_euler_cycle(&cd).unwrap().is_cycle);
        }
    }

    #[test]
    fn transform_preserves_cycle() {
        let cd = local_model_data(&WeightSystem::standard(4).unwrap()).unwrap();
        let a = IntMatrix::from_i64_rows(&[vec![1, 2, 0], vec![0, 1, 0], vec![3, 5, -1]]).unwrap();
        let t = cd.transformed(&a).unwrap();
        assert!(assemble_euler_cycle(&t).unwrap().is_cycle);
        assert!(cocycle_check(&t).passes());
    }
}
