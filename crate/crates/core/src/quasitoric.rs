//! Quasitoric characteristic pairs `(P, λ)` and their reduction to
//! complexity-one characteristic data for a subtorus `T = ker α_T`.
//!
//! Polytopes are combinatorial: a list of facets and, for every vertex, the `n`
//! facets containing it. A face is identified with the set of facets containing
//! it; faces of codimension `k` are the `k`-subsets of vertex facet sets.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chardata::{chart_euler_vectors, Ambient, CharacteristicData, VertexChart};
use crate::error::{Error, Result};
use crate::lattice::{character_kernel_basis, integer_kernel, is_unimodular_extension, IntMatrix, IntVector};
use crate::report::ValidationReport;
use crate::sponge::{Cell, SpongeComplex};
use crate::weights::{induced_weights, WeightSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePolytope {
    n: usize,
    facets: Vec<String>,
    vertices: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
}

impl SimplePolytope {
    /// Validates simplicity (each vertex in exactly `n` distinct facets), that
    /// every facet has a vertex, that faces are determined by their facet sets
    /// and that every edge has two endpoints.
    pub fn new(n: usize, facets: Vec<String>, vertices: &[Vec<String>]) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateInput(format!("polytope dimension {} < 2", n)));
        }
        let pos: HashMap<&str, usize> = facets.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
        if pos.len() != facets.len() {
            return Err(Error::Input("duplicate facet id".into()));
        }
        let mut vs = Vec::with_capacity(vertices.len());
        for v in vertices {
            let mut idx = v
                .iter()
                .map(|f| pos.get(f.as_str()).copied().ok_or_else(|| Error::Input(format!("unknown facet {}", f))))
                .collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            idx.dedup();
            if idx.len() != n || v.len() != n {
                return Err(Error::Validation(format!("vertex {:?} does not lie in exactly {} distinct facets", v, n)));
            }
            vs.push(idx);
        }
        let distinct: BTreeSet<&Vec<usize>> = vs.iter().collect();
        if distinct.len() != vs.len() {
            return Err(Error::Validation("two vertices lie in the same facets".into()));
        }
        for (i, f) in facets.iter().enumerate() {
            if !vs.iter().any(|v| v.contains(&i)) {
                return Err(Error::Validation(format!("facet {} contains no vertex", f)));
            }
        }
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in &vs {
            for k in 0..=n {
                faces.extend(v.iter().copied().combinations(k));
            }
        }
        let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
        faces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let p = SimplePolytope { n, facets, vertices: vs, faces };
        for face in &p.faces {
            let verts = p.vertices_of_face(face);
            let common: Vec<usize> =
                (0..p.facets.len()).filter(|f| verts.iter().all(|&v| p.vertices[v].contains(f))).collect();
            if common != *face {
                return Err(Error::Validation(format!(
                    "the vertices of face {} lie in further facets",
                    p.face_id(face)
                )));
            }
            if face.len() == n - 1 && verts.len() != 2 {
                return Err(Error::Validation(format!("edge {} has {} vertices", p.face_id(face), verts.len())));
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[String] {
        &self.facets
    }

    pub fn facet_index(&self, id: &str) -> Option<usize> {
        self.facets.iter().position(|f| f == id)
    }

    /// Facet indices of each vertex, sorted.
    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    /// All faces including `P` itself (empty facet set), as sorted facet index
    /// sets, ordered by increasing dimension.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn vertices_of_face(&self, face: &[usize]) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| face.iter().all(|f| self.vertices[v].contains(f))).collect()
    }

    /// Id of a face: its facet ids joined by `&`, or `P` for the polytope.
    pub fn face_id(&self, face: &[usize]) -> String {
        if face.is_empty() {
            "P".to_string()
        } else {
            face.iter().map(|&f| self.facets[f].as_str()).join("&")
        }
    }

    /// Two facets are adjacent when they meet.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.vertices.iter().any(|v| v.contains(&a) && v.contains(&b))
    }

    /// The boundary `∂P` as a closed `(n-1)`-dimensional cell manifold.
    pub fn boundary_manifold(&self) -> Result<CellManifold> {
        let proper: Vec<&Vec<usize>> = self.faces.iter().filter(|f| !f.is_empty()).collect();
        let cells: Vec<Cell> =
            proper.iter().map(|f| Cell { id: self.face_id(f), dim: self.n - f.len(), label: String::new() }).collect();
        let index: HashMap<&Vec<usize>, usize> = proper.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let faces_of: Vec<Vec<usize>> = proper
            .iter()
            .map(|f| {
                if f.len() == self.n {
                    return Vec::new();
                }
                (0..self.facets.len())
                    .filter(|g| !f.contains(g))
                    .filter_map(|g| {
                        let mut h = (*f).clone();
                        h.push(g);
                        h.sort_unstable();
                        index.get(&h).copied()
                    })
                    .collect()
            })
            .collect();
        let boundary = orient_regular_complex(&cells, &faces_of)?;
        CellManifold::from_indexed(self.n, cells, boundary)
    }
}

/// Incidence signs for a regular complex whose cells have sphere boundaries:
/// an edge runs from its lower-index vertex to the other one, and higher cells
/// get the boundary orientation that gives `+1` to their lowest-index face.
fn orient_regular_complex(cells: &[Cell], faces_of: &[Vec<usize>]) -> Result<Vec<Vec<(usize, i64)>>> {
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&c| cells[c].dim);
    let mut boundary: Vec<Vec<(usize, i64)>> = vec![Vec::new(); cells.len()];
    for c in order {
        let mut fs = faces_of[c].clone();
        fs.sort_unstable();
        match cells[c].dim {
            0 => {}
            1 => {
                if fs.len() != 2 {
                    return Err(Error::Validation(format!("edge {} has {} endpoints", cells[c].id, fs.len())));
                }
                boundary[c] = vec![(fs[0], -1), (fs[1], 1)];
            }
            _ => {
                // Propagate signs across shared codimension-two faces.
                let mut sign: HashMap<usize, i64> = HashMap::new();
                let mut queue = VecDeque::new();
                sign.insert(fs[0], 1);
                queue.push_back(fs[0]);
                while let Some(f) = queue.pop_front() {
                    for &(g, k) in &boundary[f] {
                        let others: Vec<usize> = fs
                            .iter()
                            .copied()
                            .filter(|&h| h != f && boundary[h].iter().any(|&(x, _)| x == g))
                            .collect();
                        if others.len() != 1 {
                            return Err(Error::Validation(format!(
                                "boundary of {} is not a manifold at {}",
                                cells[c].id, cells[g].id
                            )));
                        }
                        let h = others[0];
                        let kh = boundary[h].iter().find(|&&(x, _)| x == g).expect("face present").1;
                        let want = -sign[&f] * k * kh;
                        match sign.get(&h) {
                            Some(&s) if s != want => {
                                return Err(Error::Validation(format!("boundary of {} is not orientable", cells[c].id)))
                            }
                            Some(_) => {}
                            None => {
                                sign.insert(h, want);
                                queue.push_back(h);
                            }
                        }
                    }
                }
                if sign.len() != fs.len() {
                    return Err(Error::Validation(format!("boundary of {} is disconnected", cells[c].id)));
                }
                boundary[c] = fs.iter().map(|f| (*f, sign[f])).collect();
            }
        }
    }
    Ok(boundary)
}

/// A closed `(n-1)`-dimensional cell complex together with the value of `n`.
///
/// Stored as a [`SpongeComplex`] with its own dimension bound raised so that
/// top cells fit; [`Self::sponge`] extracts the `(n-2)`-skeleton.
#[derive(Clone, Debug)]
pub struct CellManifold {
    n: usize,
    complex: SpongeComplex,
}

impl CellManifold {
    pub fn new(n: usize, cells: Vec<Cell>, incidence: &BTreeMap<String, Vec<(String, i64)>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateInput(format!("n = {} < 2", n)));
        }
        if let Some(c) = cells.iter().find(|c| c.dim > n - 1) {
            return Err(Error::Input(format!("cell {} has dim {} > n - 1", c.id, c.dim)));
        }
        let complex = SpongeComplex::new(n + 1, cells, incidence)?;
        Ok(CellManifold { n, complex })
    }

    fn from_indexed(n: usize, cells: Vec<Cell>, boundary: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        let complex = SpongeComplex::from_indexed(n + 1, cells, boundary)?;
        Ok(CellManifold { n, complex })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn complex(&self) -> &SpongeComplex {
        &self.complex
    }

    pub fn top_cells(&self) -> Vec<usize> {
        self.complex.cells_of_dim(self.n - 1)
    }

    /// Every `k`-cell lies in exactly `n - k` top cells and `∂∂ = 0`.
    pub fn validate_simple(&self) -> ValidationReport {
        let s = &self.complex;
        let mut report = ValidationReport::new();
        for (c, g, v) in s.boundary_defects() {
            report.push(
                "boundary-squared",
                vec![s.id(c).to_string(), s.id(g).to_string()],
                format!("coefficient {}", v),
            );
        }
        for c in 0..s.len() {
            let k = s.cell_dim(c);
            let tops = self.tops_around(c).len();
            if tops != self.n - k {
                report.push(
                    "simple",
                    vec![s.id(c).to_string()],
                    format!("{}-cell lies in {} top cells, expected {}", k, tops, self.n - k),
                );
            }
        }
        report
    }

    fn tops_around(&self, c: usize) -> Vec<usize> {
        let s = &self.complex;
        std::iter::once(c).chain(s.cells_above(c).iter().copied()).filter(|&t| s.cell_dim(t) == self.n - 1).collect()
    }

    /// Orientation class: `±1` coefficients of the unique top-dimensional cycle.
    pub fn fundamental_cycle(&self) -> Result<Vec<i64>> {
        let s = &self.complex;
        let tops = self.top_cells();
        let kernel = integer_kernel(&s.boundary_matrix(self.n - 1));
        if kernel.len() != 1 {
            return Err(Error::Validation(format!(
                "top-dimensional cycles have rank {}; the manifold must be closed, connected and orientable",
                kernel.len()
            )));
        }
        let w = &kernel[0];
        let mut out = Vec::with_capacity(tops.len());
        for x in w.entries() {
            if !x.abs().is_one() {
                return Err(Error::Validation("fundamental cycle has a coefficient other than ±1".into()));
            }
            out.push(if x.is_positive() { 1 } else { -1 });
        }
        Ok(out)
    }

    /// The `(n-2)`-skeleton as a sponge.
    pub fn sponge(&self) -> Result<SpongeComplex> {
        let s = &self.complex;
        let keep: Vec<usize> = (0..s.len()).filter(|&c| s.cell_dim(c) + 2 <= self.n).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let cells = keep.iter().map(|&c| s.cell(c).clone()).collect();
        let boundary = keep.iter().map(|&c| s.boundary_of(c).iter().map(|&(f, k)| (pos[&f], k)).collect()).collect();
        SpongeComplex::from_indexed(self.n, cells, boundary)
    }
}

/// `λ`: facet (or top cell) id to a primitive vector of `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicFunction {
    pub lambda: BTreeMap<String, IntVector>,
}

impl CharacteristicFunction {
    pub fn new(lambda: BTreeMap<String, IntVector>) -> Self {
        CharacteristicFunction { lambda }
    }

    pub fn from_i64s(values: &[(&str, &[i64])]) -> Self {
        Self::new(values.iter().map(|(k, v)| (k.to_string(), IntVector::from_i64s(v))).collect())
    }

    pub fn get(&self, id: &str) -> Result<&IntVector> {
        self.lambda.get(id).ok_or_else(|| Error::Input(format!("λ is not defined on {}", id)))
    }

    fn at_vertex(&self, p: &SimplePolytope, v: usize) -> Result<Vec<IntVector>> {
        p.vertices()[v].iter().map(|&f| self.get(&p.facets()[f]).cloned()).collect()
    }
}

/// The character `α_T` with `T = ker α_T`, and the projection of characters of
/// `Z^n` onto characters of `T` given by pairing with a basis of `ker α_T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtorusChoice {
    pub alpha_t: IntVector,
    /// Rows: canonical basis of `ker α_T ⊂ Z^n`, an `(n-1) x n` matrix.
    pub complement: IntMatrix,
}

impl SubtorusChoice {
    pub fn new(alpha_t: IntVector) -> Result<Self> {
        if alpha_t.dim() < 2 {
            return Err(Error::DegenerateInput("α_T needs n >= 2".into()));
        }
        if alpha_t.is_zero() || !alpha_t.is_primitive() {
            return Err(Error::DegenerateInput(format!("α_T = {} is not primitive", alpha_t)));
        }
        let basis = character_kernel_basis(&alpha_t)?;
        let complement = IntMatrix::from_rows(&basis, alpha_t.dim())?;
        Ok(SubtorusChoice { alpha_t, complement })
    }

    pub fn from_i64s(alpha: &[i64]) -> Result<Self> {
        Self::new(IntVector::from_i64s(alpha))
    }

    pub fn n(&self) -> usize {
        self.alpha_t.dim()
    }

    /// Coordinates of a vector of `ker α_T` in the complement basis.
    pub fn kernel_coordinates(&self, v: &IntVector) -> Result<IntVector> {
        if !self.alpha_t.dot(v).is_zero() {
            return Err(Error::Consistency(format!("{} is not in ker α_T", v)));
        }
        let rows = self.complement.row_vectors();
        // Solve v = Σ m_r k_r through the square system on a pivot set.
        let n = self.n();
        for skip in 0..n {
            let cols: Vec<usize> = (0..n).filter(|&j| j != skip).collect();
            let sq: Vec<IntVector> =
                rows.iter().map(|r| IntVector::new(cols.iter().map(|&j| r[j].clone()).collect())).collect();
            let target = IntVector::new(cols.iter().map(|&j| v[j].clone()).collect());
            let m = IntMatrix::from_rows(&sq, n - 1)?;
            if m.determinant()?.is_zero() {
                continue;
            }
            if let Some(x) = crate::lattice::coordinates_in_basis(&target, &sq) {
                let back = rows.iter().zip(x.entries()).fold(IntVector::zeros(n), |acc, (r, c)| &acc + &r.scale(c));
                if back == *v {
                    return Ok(x);
                }
            }
        }
        Err(Error::Consistency(format!("{} has no integral coordinates in ker α_T", v)))
    }
}

/// Star condition: at every vertex the `λ` values form a basis of `Z^n`; along
/// every face they extend to one.
pub fn validate_star(p: &SimplePolytope, lambda: &CharacteristicFunction) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = p.n();
    for f in p.facets() {
        match lambda.lambda.get(f) {
            None => report.push("lambda-defined", vec![f.clone()], "λ is not defined"),
            Some(v) if v.dim() != n => {
                report.push("lambda-shape", vec![f.clone()], format!("λ has dimension {}", v.dim()))
            }
            Some(v) if v.is_zero() || !v.is_primitive() => {
                report.push("lambda-shape", vec![f.clone()], format!("λ = {} is not primitive", v))
            }
            _ => {}
        }
    }
    if !report.passes() {
        return report;
    }
    for face in p.faces().iter().filter(|f| !f.is_empty()) {
        let vs: Vec<IntVector> = face.iter().map(|&f| lambda.lambda[&p.facets()[f]].clone()).collect();
        if face.len() == n {
            let det = IntMatrix::from_rows(&vs, n).and_then(|m| m.determinant()).unwrap_or_else(|_| BigInt::zero());
            if !det.abs().is_one() {
                report.push("star-vertex", vec![p.face_id(face)], format!("determinant {}", det));
            }
        } else if !is_unimodular_extension(&vs, n) {
            report.push("star-face", vec![p.face_id(face)], "λ values do not extend to a basis");
        }
    }
    report
}

/// Tangent weights of `G = T^n` at a vertex: the dual basis of the `λ` values
/// of the facets at the vertex (in increasing facet order).
pub fn vertex_weights(p: &SimplePolytope, lambda: &CharacteristicFunction, vertex: usize) -> Result<Vec<IntVector>> {
    let v = p.vertices().get(vertex).ok_or_else(|| Error::Index(format!("no vertex {}", vertex)))?;
    let rows = lambda.at_vertex(p, vertex)?;
    let m = IntMatrix::from_rows(&rows, p.n())?;
    let det = m.determinant()?;
    if !det.abs().is_one() {
        return Err(Error::StarCondition(format!("determinant {} at vertex {}", det, p.face_id(v))));
    }
    crate::weights::dual_basis(&m)
}

/// Every primitive `α` with entries in `[-bound, bound]` (first nonzero entry
/// positive) pairing to `±1` with every `λ` value. Sorted.
pub fn find_strict_subtorus(
    p: &SimplePolytope,
    lambda: &CharacteristicFunction,
    bound: u32,
) -> Result<Vec<SubtorusChoice>> {
    let n = p.n();
    let values: Vec<IntVector> = p.facets().iter().map(|f| lambda.get(f).cloned()).collect::<Result<_>>()?;
    let b = bound as i64;
    let mut out = Vec::new();
    for entries in (0..n).map(|_| -b..=b).multi_cartesian_product() {
        let alpha = IntVector::from_i64s(&entries);
        if alpha.is_zero() || alpha.first_nonzero().is_some_and(|x| x.is_negative()) || !alpha.is_primitive() {
            continue;
        }
        if values.iter().all(|l| alpha.dot(l).abs().is_one()) {
            out.push(SubtorusChoice::new(alpha)?);
        }
    }
    out.sort_by(|a, b| a.alpha_t.entries().cmp(b.alpha_t.entries()));
    Ok(out)
}

/// Circle `μ(F)` of the codimension-two face `F = F_1 ∩ F_2` for `T`: the
/// primitive part of `⟨α_T, λ_2⟩ λ_1 - ⟨α_T, λ_1⟩ λ_2`, in complement
/// coordinates.
pub fn induced_mu(lambda1: &IntVector, lambda2: &IntVector, st: &SubtorusChoice) -> Result<IntVector> {
    let a1 = st.alpha_t.dot(lambda1);
    let a2 = st.alpha_t.dot(lambda2);
    if a1.is_zero() && a2.is_zero() {
        return Err(Error::DegenerateInput("both pairings with α_T vanish: T contains the 2-torus of the face".into()));
    }
    let v = &lambda1.scale(&a2) - &lambda2.scale(&a1);
    let v = v.primitive_part()?;
    st.kernel_coordinates(&v)
}

/// Characteristic data of the `(n-2)`-skeleton of a closed cell manifold `M`
/// with `λ` on its top cells: `μ` from [`induced_mu`] on the two top cells
/// around each sponge facet, Euler signs from the induced tangent weights.
fn manifold_engine(
    m: &CellManifold,
    lambda: &BTreeMap<usize, IntVector>,
    st: &SubtorusChoice,
    ambient: Ambient,
) -> Result<CharacteristicData> {
    let n = m.n();
    let b = m.complex();
    let tops = m.top_cells();
    let omega: HashMap<usize, i64> = tops.iter().copied().zip(m.fundamental_cycle()?).collect();
    let sponge = m.sponge()?;
    let mut charts = Vec::new();
    for v in b.cells_of_dim(0) {
        let around = m.tops_around(v);
        if around.len() != n {
            return Err(Error::Validation(format!(
                "vertex {} lies in {} top cells, expected {}",
                b.id(v),
                around.len(),
                n
            )));
        }
        let rows: Vec<IntVector> = around.iter().map(|t| lambda[t].clone()).collect();
        let det = IntMatrix::from_rows(&rows, n)?.determinant()?;
        if !det.abs().is_one() {
            return Err(Error::StarCondition(format!("determinant {} at vertex {}", det, b.id(v))));
        }
        // E_a: the edge at v lying in every top cell around v except C_a.
        let edges_at: Vec<usize> = b.cells_above(v).iter().copied().filter(|&e| b.cell_dim(e) == 1).collect();
        let mut frame = Vec::with_capacity(n);
        for &ca in &around {
            let e = edges_at
                .iter()
                .copied()
                .filter(|&e| around.iter().all(|&cb| (cb == ca) != b.is_face(e, cb)))
                .exactly_one()
                .map_err(|_| Error::Validation(format!("no unique edge at {} leaving {}", b.id(v), b.id(ca))))?;
            frame.push(e);
        }
        let s = crate::sponge::frame_sign(b, around[0], v, &frame[1..])?;
        let orientation = omega[&around[0]] * s * if det.is_positive() { 1 } else { -1 };
        let weights = induced_weights(&rows, &st.alpha_t)?;
        let edges = if n == 2 {
            Vec::new()
        } else {
            frame.iter().map(|&e| sponge.index_of(b.id(e)).expect("edge in sponge")).collect()
        };
        let vertex = sponge.index_of(b.id(v)).expect("vertex in sponge");
        charts.push((VertexChart { vertex, weights, edges, orientation }, around));
    }
    let mut mu = BTreeMap::new();
    for f in sponge.facets() {
        let fb = b.index_of(sponge.id(f)).expect("facet in manifold");
        let around = m.tops_around(fb);
        if around.len() != 2 {
            return Err(Error::Validation(format!("{} lies in {} top cells", sponge.id(f), around.len())));
        }
        mu.insert(f, induced_mu(&lambda[&around[0]], &lambda[&around[1]], st)?);
    }
    let mut signs: BTreeMap<usize, i64> = BTreeMap::new();
    for (chart, _) in &charts {
        if !chart.weights.is_strictly_appropriate()? {
            return Err(Error::Precondition(format!(
                "induced weights at {} are not strictly appropriate",
                sponge.id(chart.vertex)
            )));
        }
        for (f, e) in chart_euler_vectors(&sponge, chart)? {
            let k = mu[&f].ratio_to(&e).filter(|k| k.abs().is_one()).ok_or_else(|| {
                Error::Consistency(format!("local Euler vector {} is not ±μ({}) = {}", e, sponge.id(f), mu[&f]))
            })?;
            let k = if k.is_positive() { 1 } else { -1 };
            if let Some(&prev) = signs.get(&f) {
                if prev != k {
                    return Err(Error::Consistency(format!(
                        "Euler sign of {} differs between adjacent vertices",
                        sponge.id(f)
                    )));
                }
            }
            signs.insert(f, k);
        }
    }
    let mu = mu.into_iter().map(|(f, v)| (sponge.id(f).to_string(), v)).collect();
    let signs = signs.into_iter().map(|(f, k)| (sponge.id(f).to_string(), k)).collect();
    CharacteristicData::new(sponge, mu, signs, ambient)
}

fn check_strict(values: &[&IntVector], st: &SubtorusChoice) -> Result<()> {
    for l in values {
        if l.dim() != st.n() {
            return Err(Error::DimensionMismatch(format!("λ = {} but α_T has dimension {}", l, st.n())));
        }
        if !st.alpha_t.dot(l).abs().is_one() {
            return Err(Error::Precondition(format!("⟨α_T, {}⟩ = {} is not ±1", l, st.alpha_t.dot(l))));
        }
    }
    Ok(())
}

/// Reduction of a quasitoric pair to characteristic data on the
/// `(n-2)`-skeleton of `∂P` with ambient `S^{n+1}`.
pub fn reduce(p: &SimplePolytope, lambda: &CharacteristicFunction, st: &SubtorusChoice) -> Result<CharacteristicData> {
    let report = validate_star(p, lambda);
    if !report.passes() {
        return Err(Error::StarCondition(report.to_string()));
    }
    let values: Vec<&IntVector> = p.facets().iter().map(|f| &lambda.lambda[f]).collect();
    check_strict(&values, st)?;
    let m = p.boundary_manifold()?;
    let b = m.complex();
    let lam = p.facets().iter().map(|f| (b.index_of(f).expect("facet cell"), lambda.lambda[f].clone())).collect();
    manifold_engine(&m, &lam, st, Ambient::Sphere)
}

/// `λ(F) = e_{c(F)}` for a proper coloring `c` with colors `0..n`.
pub fn coloring_pullback(p: &SimplePolytope, coloring: &BTreeMap<String, usize>) -> Result<CharacteristicFunction> {
    let n = p.n();
    let colors: Vec<usize> = p
        .facets()
        .iter()
        .map(|f| {
            let c = *coloring.get(f).ok_or_else(|| Error::Input(format!("facet {} has no color", f)))?;
            if c >= n {
                return Err(Error::Input(format!("color {} of {} is not below {}", c, f, n)));
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    for a in 0..colors.len() {
        for b in a + 1..colors.len() {
            if colors[a] == colors[b] && p.adjacent(a, b) {
                return Err(Error::Coloring(p.facets()[a].clone(), p.facets()[b].clone(), colors[a]));
            }
        }
    }
    let lambda = CharacteristicFunction::new(
        p.facets().iter().zip(&colors).map(|(f, &c)| (f.clone(), IntVector::unit(n, c))).collect(),
    );
    let report = validate_star(p, &lambda);
    if !report.passes() {
        return Err(Error::Consistency(format!("coloring pullback violates the star condition: {}", report)));
    }
    Ok(lambda)
}

/// Characteristic data of `M × D²` built from a closed simple cell manifold
/// `M` of dimension `n - 1` with `λ` on its top cells.
pub fn cell_manifold_data(
    m: &CellManifold,
    lambda: &CharacteristicFunction,
    st: &SubtorusChoice,
) -> Result<CharacteristicData> {
    let report = m.validate_simple();
    if !report.passes() {
        return Err(Error::Validation(format!("not a simple cell manifold: {}", report)));
    }
    let b = m.complex();
    let tops = m.top_cells();
    let lam: BTreeMap<usize, IntVector> =
        tops.iter().map(|&t| Ok((t, lambda.get(b.id(t))?.clone()))).collect::<Result<_>>()?;
    let values: Vec<&IntVector> = lam.values().collect();
    check_strict(&values, st)?;
    manifold_engine(m, &lam, st, Ambient::Product { boundary_trivial: true })
}

/// Induced weight systems at every vertex, keyed by vertex face id.
pub fn induced_vertex_weights(
    p: &SimplePolytope,
    lambda: &CharacteristicFunction,
    st: &SubtorusChoice,
) -> Result<BTreeMap<String, WeightSystem>> {
    (0..p.vertices().len())
        .map(|v| {
            let rows = lambda.at_vertex(p, v)?;
            Ok((p.face_id(&p.vertices()[v]), induced_weights(&rows, &st.alpha_t)?))
        })
        .collect()
}

/// Standard combinatorial polytopes.
pub mod polytopes {
    use super::*;

    fn build(n: usize, facets: &[&str], vertices: &[&[&str]]) -> SimplePolytope {
        let vs: Vec<Vec<String>> = vertices.iter().map(|v| v.iter().map(|s| s.to_string()).collect()).collect();
        SimplePolytope::new(n, facets.iter().map(|s| s.to_string()).collect(), &vs).expect("valid polytope")
    }

    /// The `n`-simplex with facets `1, ..., n+1`; vertex `k` misses facet `k`.
    pub fn simplex(n: usize) -> SimplePolytope {
        let facets: Vec<String> = (1..=n + 1).map(|i| i.to_string()).collect();
        let vertices: Vec<Vec<String>> = (0..=n)
            .map(|skip| facets.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, f)| f.clone()).collect())
            .collect();
        SimplePolytope::new(n, facets, &vertices).expect("simplex")
    }

    /// The `n`-cube with facets `x1-, x1+, ...`.
    pub fn cube(n: usize) -> SimplePolytope {
        let facets: Vec<String> = (1..=n).flat_map(|i| [format!("x{}-", i), format!("x{}+", i)]).collect();
        let vertices: Vec<Vec<String>> = (0..1u32 << n)
            .map(|bits| (0..n).map(|i| format!("x{}{}", i + 1, if bits >> i & 1 == 1 { '+' } else { '-' })).collect())
            .collect();
        SimplePolytope::new(n, facets, &vertices).expect("cube")
    }

    /// A polygon with `k` edges `1..k`, edge `i` meeting edge `i+1`.
    pub fn polygon(k: usize) -> SimplePolytope {
        let facets: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
        let vertices: Vec<Vec<String>> = (0..k).map(|i| vec![facets[i].clone(), facets[(i + 1) % k].clone()]).collect();
        SimplePolytope::new(2, facets, &vertices).expect("polygon")
    }

    /// Triangle times interval: side facets `s1, s2, s3`, caps `bottom`, `top`.
    pub fn triangular_prism() -> SimplePolytope {
        build(
            3,
            &["s1", "s2", "s3", "bottom", "top"],
            &[
                &["s1", "s2", "bottom"],
                &["s2", "s3", "bottom"],
                &["s3", "s1", "bottom"],
                &["s1", "s2", "top"],
                &["s2", "s3", "top"],
                &["s3", "s1", "top"],
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::polytopes::*;
    use super::*;
    use crate::chardata::{assemble_euler_cycle, cocycle_check, compatibility_check, validate_mu};

    fn delta3_lambda() -> CharacteristicFunction {
        CharacteristicFunction::from_i64s(&[
            ("1", &[1, 0, 0]),
            ("2", &[0, 1, 0]),
            ("3", &[0, 0, 1]),
            ("4", &[-1, -1, -1]),
        ])
    }

    fn square_lambda(third: &[i64]) -> CharacteristicFunction {
        CharacteristicFunction::from_i64s(&[("1", &[1, 0]), ("2", &[0, 1]), ("3", third), ("4", &[0, 1])])
    }

    fn assert_pipeline(cd: &CharacteristicData) {
        assert!(crate::sponge::validate_sponge(&cd.sponge).passes());
        assert!(validate_mu(cd).passes(), "{}", validate_mu(cd));
        assert!(compatibility_check(cd));
        assert!(cocycle_check(cd).passes(), "{}", cocycle_check(cd));
        assert!(assemble_euler_cycle(cd).unwrap().is_cycle);
    }

    #[test]
    fn polytope_face_counts() {
        assert_eq!(simplex(3).faces().len(), 15);
        assert_eq!(cube(3).faces().len(), 27);
        assert_eq!(triangular_prism().faces().len(), 21);
        assert_eq!(polygon(4).faces().len(), 9);
    }

    #[test]
    fn polytope_rejects_nonsimple() {
        let vs = vec![vec!["a".to_string(), "b".to_string()], vec!["a".to_string()]];
        assert!(SimplePolytope::new(2, vec!["a".into(), "b".into()], &vs).is_err());
    }

    #[test]
    fn star_examples() {
        assert!(validate_star(&simplex(3), &delta3_lambda()).passes());
        assert!(validate_star(&polygon(4), &square_lambda(&[1, 0])).passes());
        let bad = validate_star(&polygon(4), &square_lambda(&[2, 1]));
        assert!(bad.has("star-vertex"));
    }

    #[test]
    fn vertex_weights_are_dual() {
        let p = simplex(3);
        let l = delta3_lambda();
        for v in 0..p.vertices().len() {
            let w = vertex_weights(&p, &l, v).unwrap();
            let rows = l.at_vertex(&p, v).unwrap();
            for (a, wa) in w.iter().enumerate() {
                for (b, lb) in rows.iter().enumerate() {
                    assert_eq!(wa.dot(lb), BigInt::from((a == b) as i64));
                }
            }
        }
        let bad = square_lambda(&[2, 1]);
        let p = polygon(4);
        assert!((0..4).any(|v| matches!(vertex_weights(&p, &bad, v), Err(Error::StarCondition(_)))));
    }

    #[test]
    fn strict_subtorus_search() {
        let found = find_strict_subtorus(&simplex(3), &delta3_lambda(), 1).unwrap();
        assert!(found.iter().any(|s| s.alpha_t == IntVector::from_i64s(&[1, 1, -1])));
        let p = polygon(4);
        let l = CharacteristicFunction::from_i64s(&[("1", &[1, 1]), ("2", &[1, 0]), ("3", &[1, -1]), ("4", &[1, 0])]);
        // ⟨α, (1,1)⟩ and ⟨α, (1,-1)⟩ both odd forces α_1 + α_2 and α_1 - α_2 odd.
        for s in find_strict_subtorus(&p, &l, 3).unwrap() {
            assert!(l.lambda.values().all(|v| s.alpha_t.dot(v).abs().is_one()));
        }
    }

    #[test]
    fn induced_mu_examples() {
        let st = SubtorusChoice::from_i64s(&[1, 1, -1]).unwrap();
        assert_eq!(
            st.complement.row_vectors(),
            vec![IntVector::from_i64s(&[1, 0, 1]), IntVector::from_i64s(&[0, 1, 1])]
        );
        let e = |i| IntVector::unit(3, i);
        assert_eq!(induced_mu(&e(0), &e(1), &st).unwrap(), IntVector::from_i64s(&[1, -1]));
        assert_eq!(induced_mu(&e(0), &e(2), &st).unwrap(), IntVector::from_i64s(&[-1, 0]));
        let st2 = SubtorusChoice::from_i64s(&[0, 0, 1]).unwrap();
        assert!(matches!(induced_mu(&e(0), &e(1), &st2), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn reduce_simplex() {
        let st = SubtorusChoice::from_i64s(&[1, 1, -1]).unwrap();
        let cd = reduce(&simplex(3), &delta3_lambda(), &st).unwrap();
        assert_eq!(cd.sponge.cell_counts(), vec![4, 6]);
        assert_eq!(cd.ambient, Ambient::Sphere);
        assert_pipeline(&cd);
    }

    #[test]
    fn reduce_cube_and_prism() {
        let coloring: BTreeMap<String, usize> =
            cube(3).facets().iter().map(|f| (f.clone(), f[1..2].parse::<usize>().unwrap() - 1)).collect();
        let l = coloring_pullback(&cube(3), &coloring).unwrap();
        let st = find_strict_subtorus(&cube(3), &l, 1).unwrap().remove(0);
        assert_pipeline(&reduce(&cube(3), &l, &st).unwrap());

        let prism = triangular_prism();
        let coloring: BTreeMap<String, usize> = [("s1", 0), ("s2", 1), ("s3", 2), ("bottom", 2), ("top", 2)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        assert!(coloring_pullback(&prism, &coloring).is_err());
        let coloring: BTreeMap<String, usize> = [("s1", 0), ("s2", 1), ("s3", 0), ("bottom", 2), ("top", 2)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        assert!(matches!(coloring_pullback(&prism, &coloring), Err(Error::Coloring(..))));
    }

    #[test]
    fn reduce_square() {
        let p = polygon(4);
        let l = square_lambda(&[1, 0]);
        let st = find_strict_subtorus(&p, &l, 2).unwrap().remove(0);
        let cd = reduce(&p, &l, &st).unwrap();
        assert_eq!(cd.sponge.cell_counts(), vec![4]);
        assert!(cd.mu.values().all(|m| m.dim() == 1));
        assert_pipeline(&cd);
    }

    #[test]
    fn simplex_has_no_three_coloring() {
        let coloring: BTreeMap<String, usize> =
            ["1", "2", "3", "4"].iter().enumerate().map(|(i, f)| (f.to_string(), i % 3)).collect();
        assert!(matches!(coloring_pullback(&simplex(3), &coloring), Err(Error::Coloring(..))));
    }

    #[test]
    fn simplex_boundary_as_manifold() {
        let m = simplex(3).boundary_manifold().unwrap();
        assert!(m.validate_simple().passes());
        assert_eq!(m.fundamental_cycle().unwrap().len(), 4);
        let st = SubtorusChoice::from_i64s(&[1, 1, -1]).unwrap();
        let cd = cell_manifold_data(&m, &delta3_lambda(), &st).unwrap();
        assert_eq!(cd.ambient, Ambient::Product { boundary_trivial: true });
        assert_pipeline(&cd);
    }
}
