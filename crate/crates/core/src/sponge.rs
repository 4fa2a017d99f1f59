//! Sponge complexes: regular cell complexes of dimension `n - 2` whose local
//! structure is that of the `(n-2)`-skeleton of the `A_{n-1}` fan.
//!
//! A [`SpongeComplex`] stores cells with their dimension and the signed
//! incidence `[c : f] = ±1` of each codimension-one face. The face relation is
//! the transitive closure of nonzero incidence. Cells are addressed by string id
//! at the API boundary and by dense index internally.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{smith_normal_form, IntMatrix, IntVector};
use crate::poset::{find_isomorphism, GradedPoset};
use crate::report::ValidationReport;

/// Boundary incidences by cell id: `cell -> [(face, coefficient)]`.
pub type Incidence = BTreeMap<String, Vec<(String, i64)>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct SpongeComplex {
    n: usize,
    cells: Vec<Cell>,
    boundary: Vec<Vec<(usize, i64)>>,
    index: HashMap<String, usize>,
    below: Vec<BTreeSet<usize>>,
    above: Vec<BTreeSet<usize>>,
}

/// Binomial coefficient for small arguments.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl SpongeComplex {
    /// Builds a complex from cells and, for each cell id, its signed boundary.
    ///
    /// Structural problems (unknown ids, wrong face dimensions, coefficients
    /// other than `±1`, dimensions above `n - 2`) are input errors. Local-model
    /// conditions are checked by [`validate_sponge`].
    pub fn new(n: usize, cells: Vec<Cell>, incidence: &BTreeMap<String, Vec<(String, i64)>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateInput(format!("sponge needs n >= 2, got {}", n)));
        }
        let mut index = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            if c.dim > n - 2 {
                return Err(Error::Input(format!("cell {} has dim {} > n - 2 = {}", c.id, c.dim, n - 2)));
            }
            if index.insert(c.id.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate cell id {}", c.id)));
            }
        }
        let mut boundary = vec![Vec::new(); cells.len()];
        for (id, faces) in incidence {
            let &ci = index.get(id).ok_or_else(|| Error::Input(format!("incidence for unknown cell {}", id)))?;
            for (fid, coef) in faces {
                let &fi =
                    index.get(fid).ok_or_else(|| Error::Input(format!("cell {} has unknown face {}", id, fid)))?;
                if cells[fi].dim + 1 != cells[ci].dim {
                    return Err(Error::Input(format!(
                        "face {} (dim {}) of cell {} (dim {}) is not of codimension one",
                        fid, cells[fi].dim, id, cells[ci].dim
                    )));
                }
                if *coef != 1 && *coef != -1 {
                    return Err(Error::Input(format!("incidence [{}:{}] = {} is not ±1", id, fid, coef)));
                }
                if boundary[ci].iter().any(|&(f, _)| f == fi) {
                    return Err(Error::Input(format!("repeated face {} of cell {}", fid, id)));
                }
                boundary[ci].push((fi, *coef));
            }
        }
        Ok(Self::from_parts(n, cells, boundary, index))
    }

    fn from_parts(n: usize, cells: Vec<Cell>, boundary: Vec<Vec<(usize, i64)>>, index: HashMap<String, usize>) -> Self {
        let m = cells.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| cells[i].dim);
        let mut below = vec![BTreeSet::new(); m];
        for &c in &order {
            let mut acc = BTreeSet::new();
            for &(f, _) in &boundary[c] {
                acc.insert(f);
                acc.extend(below[f].iter().copied());
            }
            below[c] = acc;
        }
        let mut above = vec![BTreeSet::new(); m];
        for (c, set) in below.iter().enumerate() {
            for &f in set {
                above[f].insert(c);
            }
        }
        SpongeComplex { n, cells, boundary, index, below, above }
    }

    /// Builds a complex from dense-index data (used by constructions).
    pub(crate) fn from_indexed(n: usize, cells: Vec<Cell>, boundary: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        let mut incidence = BTreeMap::new();
        for (c, faces) in boundary.iter().enumerate() {
            if !faces.is_empty() {
                incidence.insert(
                    cells[c].id.clone(),
                    faces.iter().map(|&(f, k)| (cells[f].id.clone(), k)).collect::<Vec<_>>(),
                );
            }
        }
        Self::new(n, cells, &incidence)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Top dimension `n - 2`.
    pub fn dim(&self) -> usize {
        self.n - 2
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn cell_dim(&self, i: usize) -> usize {
        self.cells[i].dim
    }

    /// Signed codimension-one faces of cell `i`.
    pub fn boundary_of(&self, i: usize) -> &[(usize, i64)] {
        &self.boundary[i]
    }

    pub fn incidence(&self, cell: usize, face: usize) -> i64 {
        self.boundary[cell].iter().find(|&&(f, _)| f == face).map_or(0, |&(_, k)| k)
    }

    /// All proper faces of cell `i`.
    pub fn faces_below(&self, i: usize) -> &BTreeSet<usize> {
        &self.below[i]
    }

    /// All cells having cell `i` as a proper face.
    pub fn cells_above(&self, i: usize) -> &BTreeSet<usize> {
        &self.above[i]
    }

    pub fn is_face(&self, face: usize, cell: usize) -> bool {
        face == cell || self.below[cell].contains(&face)
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == d).collect()
    }

    /// Cells of dimension `n - 2`.
    pub fn facets(&self) -> Vec<usize> {
        self.cells_of_dim(self.n - 2)
    }

    pub fn vertices_of(&self, i: usize) -> Vec<usize> {
        if self.cells[i].dim == 0 {
            return vec![i];
        }
        self.below[i].iter().copied().filter(|&f| self.cells[f].dim == 0).collect()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        (0..=self.n - 2).map(|d| self.cells_of_dim(d).len()).collect()
    }

    /// Boundary matrix `C_d -> C_{d-1}` (rows: `(d-1)`-cells, columns: `d`-cells,
    /// both in index order).
    pub fn boundary_matrix(&self, d: usize) -> IntMatrix {
        let cols = self.cells_of_dim(d);
        if d == 0 {
            return IntMatrix::zeros(0, cols.len());
        }
        let rows = self.cells_of_dim(d - 1);
        let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(p, &r)| (r, p)).collect();
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for &(f, k) in &self.boundary[c] {
                m.set(row_pos[&f], j, BigInt::from(k));
            }
        }
        m
    }

    /// Cells whose boundary has nonzero boundary (∂∂ ≠ 0), with the offending
    /// face of codimension two.
    pub fn boundary_defects(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for c in 0..self.cells.len() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(f, k) in &self.boundary[c] {
                for &(g, l) in &self.boundary[f] {
                    *acc.entry(g).or_default() += k * l;
                }
            }
            out.extend(acc.into_iter().filter(|&(_, v)| v != 0).map(|(g, v)| (c, g, v)));
        }
        out
    }

    /// Face poset of the whole complex (rank = dimension).
    pub fn face_poset(&self) -> GradedPoset {
        let rank = self.cells.iter().map(|c| c.dim).collect();
        let covers: Vec<(usize, usize)> =
            (0..self.cells.len()).flat_map(|c| self.boundary[c].iter().map(move |&(f, _)| (f, c))).collect();
        GradedPoset::from_covers(rank, &covers)
    }

    /// The same complex with cells renamed by `rename` (used for relabeling).
    pub fn relabeled(&self, rename: impl Fn(&str) -> String) -> Result<SpongeComplex> {
        let cells = self.cells.iter().map(|c| Cell { id: rename(&c.id), dim: c.dim, label: c.label.clone() }).collect();
        Self::from_indexed(self.n, cells, self.boundary.clone())
    }

    /// The same complex with the cells listed in a different order
    /// (`perm[new] = old`) and selected orientations reversed.
    pub fn permuted(&self, perm: &[usize], flip: &[bool]) -> Result<SpongeComplex> {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let cells = perm.iter().map(|&old| self.cells[old].clone()).collect();
        let boundary = perm
            .iter()
            .map(|&old| {
                self.boundary[old]
                    .iter()
                    .map(|&(f, k)| {
                        let s = if flip[old] != flip[f] { -1 } else { 1 };
                        (inv[f], k * s)
                    })
                    .collect()
            })
            .collect();
        Self::from_indexed(self.n, cells, boundary)
    }
}

/// Faces of the local model: subsets `I ⊆ {0, ..., n-1}` with `|I| <= n - 2`,
/// face `I` being the cone on the rays in `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalModel {
    pub n: usize,
    pub faces: Vec<Vec<usize>>,
}

impl LocalModel {
    pub fn contains(&self, small: usize, big: usize) -> bool {
        self.faces[small].iter().all(|i| self.faces[big].contains(i))
    }

    pub fn face_counts(&self) -> Vec<usize> {
        (0..=self.n - 2).map(|d| self.faces.iter().filter(|f| f.len() == d).count()).collect()
    }

    pub fn poset(&self) -> GradedPoset {
        let rank = self.faces.iter().map(Vec::len).collect();
        let mut covers = Vec::new();
        for (i, a) in self.faces.iter().enumerate() {
            for (j, b) in self.faces.iter().enumerate() {
                if b.len() == a.len() + 1 && self.contains(i, j) {
                    covers.push((i, j));
                }
            }
        }
        GradedPoset::from_covers(rank, &covers)
    }

    /// Id used for the cone on `rays` in [`Self::to_complex`] (one-based).
    pub fn cone_id(rays: &[usize]) -> String {
        let inner: Vec<String> = rays.iter().map(|r| (r + 1).to_string()).collect();
        format!("cone({})", inner.join(","))
    }

    /// The local model as a (Borel-Moore) cell complex: the cone on
    /// `i_1 < ... < i_k` is oriented as the simplex `[o, i_1, ..., i_k]` with the
    /// face at infinity dropped, so `∂ cone(I) = Σ_m (-1)^m cone(I \ i_m)`.
    pub fn to_complex(&self) -> SpongeComplex {
        let cells: Vec<Cell> =
            self.faces.iter().map(|f| Cell { id: Self::cone_id(f), dim: f.len(), label: String::new() }).collect();
        let pos: HashMap<&Vec<usize>, usize> = self.faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let boundary = self
            .faces
            .iter()
            .map(|f| {
                (0..f.len())
                    .map(|m| {
                        let mut sub = f.clone();
                        sub.remove(m);
                        (pos[&sub], if m % 2 == 0 { -1 } else { 1 })
                    })
                    .collect()
            })
            .collect();
        SpongeComplex::from_indexed(self.n, cells, boundary).expect("local model is well formed")
    }

    /// Index of the facet `F_{i,j}`: the cone on all rays except `i` and `j`.
    pub fn facet_index(&self, i: usize, j: usize) -> Option<usize> {
        let rest: Vec<usize> = (0..self.n).filter(|&k| k != i && k != j).collect();
        self.faces.iter().position(|f| *f == rest)
    }
}

pub fn local_model(n: usize) -> Result<LocalModel> {
    if n < 2 {
        return Err(Error::DegenerateInput(format!("local model needs n >= 2, got {}", n)));
    }
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for size in 0..=n - 2 {
        faces.extend(itertools::Itertools::combinations(0..n, size));
    }
    Ok(LocalModel { n, faces })
}

/// Checks `∂∂ = 0` and the upper-set counts of the local model: every `i`-cell
/// lies in exactly `C(n-i, d-i)` cells of dimension `d` (in particular in
/// `C(n-i, 2)` facets).
pub fn validate_sponge(s: &SpongeComplex) -> ValidationReport {
    let mut report = ValidationReport::new();
    for (c, g, v) in s.boundary_defects() {
        report.push(
            "boundary-squared",
            vec![s.id(c).to_string(), s.id(g).to_string()],
            format!("coefficient of {} in ∂∂{} is {}", s.id(g), s.id(c), v),
        );
    }
    let n = s.n();
    for c in 0..s.len() {
        let i = s.cell_dim(c);
        for d in i + 1..=n - 2 {
            let found = s.cells_above(c).iter().filter(|&&u| s.cell_dim(u) == d).count();
            let expected = binomial(n - i, d - i);
            if found != expected {
                let check = if d == n - 2 { "facet-count" } else { "upper-set-count" };
                report.push(
                    check,
                    vec![s.id(c).to_string()],
                    format!("{}-cell lies in {} cells of dim {}, expected {}", i, found, d, expected),
                );
            }
        }
    }
    report
}

/// `Z_0 ⊆ ... ⊆ Z_{n-2}`: `Z_k` holds the ids of all cells of dimension `<= k`.
pub fn filtration(s: &SpongeComplex) -> Vec<Vec<String>> {
    (0..=s.dim())
        .map(|k| {
            let mut ids: Vec<String> =
                (0..s.len()).filter(|&c| s.cell_dim(c) <= k).map(|c| s.id(c).to_string()).collect();
            ids.sort();
            ids
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
}

impl HomologyResult {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti.iter().enumerate().map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

/// Integral cellular homology from Smith forms of the boundary matrices.
pub fn homology(s: &SpongeComplex) -> Result<HomologyResult> {
    if let Some((c, g, v)) = s.boundary_defects().into_iter().next() {
        return Err(Error::Validation(format!(
            "incidence is inconsistent: coefficient of {} in ∂∂{} is {}",
            s.id(g),
            s.id(c),
            v
        )));
    }
    let top = s.dim();
    let ranks: Vec<usize> = (0..=top + 1)
        .map(|d| if d == 0 || d > top { 0 } else { smith_normal_form(&s.boundary_matrix(d)).rank })
        .collect();
    let mut betti = Vec::with_capacity(top + 1);
    let mut torsion = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let cells = s.cells_of_dim(d).len();
        betti.push(cells - ranks[d] - ranks[d + 1]);
        torsion.push(if d < top { smith_normal_form(&s.boundary_matrix(d + 1)).torsion() } else { Vec::new() });
    }
    Ok(HomologyResult { betti, torsion })
}

/// True iff `Σ_F coeffs(F) [F]` is a cycle in `C_{n-2}(Z; Z^m)`.
pub fn weighted_cycle_check(s: &SpongeComplex, coeffs: &BTreeMap<String, IntVector>) -> Result<bool> {
    Ok(weighted_boundary(s, coeffs)?.is_empty())
}

/// Nonzero entries of `∂(Σ_F coeffs(F) [F])`, keyed by `(n-3)`-cell id.
pub fn weighted_boundary(
    s: &SpongeComplex,
    coeffs: &BTreeMap<String, IntVector>,
) -> Result<BTreeMap<String, IntVector>> {
    let facets = s.facets();
    let mut dim = None;
    for &f in &facets {
        let v =
            coeffs.get(s.id(f)).ok_or_else(|| Error::Input(format!("missing coefficient for facet {}", s.id(f))))?;
        if *dim.get_or_insert(v.dim()) != v.dim() {
            return Err(Error::Input("facet coefficients have different dimensions".into()));
        }
    }
    let mut acc: BTreeMap<usize, IntVector> = BTreeMap::new();
    for &f in &facets {
        let v = &coeffs[s.id(f)];
        for &(g, k) in s.boundary_of(f) {
            let term = v.scale(&BigInt::from(k));
            let e = acc.entry(g).or_insert_with(|| IntVector::zeros(v.dim()));
            *e = &*e + &term;
        }
    }
    Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|(g, v)| (s.id(g).to_string(), v)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceStar {
    /// Ids of the cells containing the base cell (including it), sorted.
    pub cells: Vec<String>,
    /// Whether the upper set is poset-isomorphic to the local model of
    /// `n - dim(base)`.
    pub is_local_model: bool,
}

pub fn face_star(s: &SpongeComplex, cell: &str) -> Result<FaceStar> {
    let c = s.index_of(cell).ok_or_else(|| Error::Input(format!("unknown cell {}", cell)))?;
    let k = s.cell_dim(c);
    let mut members: Vec<usize> = std::iter::once(c).chain(s.cells_above(c).iter().copied()).collect();
    members.sort_unstable();
    let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(p, &x)| (x, p)).collect();
    let rank: Vec<usize> = members.iter().map(|&x| s.cell_dim(x) - k).collect();
    let mut covers = Vec::new();
    for &x in &members {
        for &(f, _) in s.boundary_of(x) {
            if let Some(&pf) = pos.get(&f) {
                covers.push((pf, pos[&x]));
            }
        }
    }
    let star = GradedPoset::from_covers(rank, &covers);
    let model = local_model(s.n() - k)?.poset();
    let is_local_model = find_isomorphism(&star, &model).is_some();
    let mut cells: Vec<String> = members.iter().map(|&x| s.id(x).to_string()).collect();
    cells.sort();
    Ok(FaceStar { cells, is_local_model })
}

/// Sign of an ordered frame of edges at a vertex relative to the orientation of
/// a cell.
///
/// `frame` lists `dim(cell)` edges of `cell` incident to `vertex`. The
/// orientation convention is that of boundary orientation with the outward
/// direction first: for the face `G` of `cell` spanned by all frame edges but
/// the first, `sign(cell; e_1, ..., e_k) = -[cell : G] sign(G; e_2, ..., e_k)`,
/// and a vertex has sign `+1`. For an edge this gives `+1` at its tail.
pub fn frame_sign(s: &SpongeComplex, cell: usize, vertex: usize, frame: &[usize]) -> Result<i64> {
    if frame.len() != s.cell_dim(cell) {
        return Err(Error::Consistency(format!(
            "frame of {} edges for the {}-cell {}",
            frame.len(),
            s.cell_dim(cell),
            s.id(cell)
        )));
    }
    if frame.is_empty() {
        return if cell == vertex {
            Ok(1)
        } else {
            Err(Error::Consistency(format!("vertex {} is not the 0-cell {}", s.id(vertex), s.id(cell))))
        };
    }
    let rest = &frame[1..];
    let face = s
        .boundary_of(cell)
        .iter()
        .find(|&&(g, _)| s.is_face(vertex, g) && rest.iter().all(|&e| s.is_face(e, g)) && !s.is_face(frame[0], g))
        .copied();
    let Some((g, k)) = face else {
        return Err(Error::Consistency(format!(
            "no face of {} at vertex {} spanned by the frame",
            s.id(cell),
            s.id(vertex)
        )));
    };
    Ok(-k * frame_sign(s, g, vertex, rest)?)
}

/// Smallest cell containing every cell in `cells` whose dimension is `dim`
/// and which contains `vertex`; used to locate local cells at a vertex.
pub(crate) fn cell_spanned_at(s: &SpongeComplex, vertex: usize, edges: &[usize], dim: usize) -> Option<usize> {
    let candidates: Vec<usize> = s
        .cells_of_dim(dim)
        .into_iter()
        .filter(|&c| s.is_face(vertex, c) && edges.iter().all(|&e| s.is_face(e, c)))
        .collect();
    (candidates.len() == 1).then(|| candidates[0])
}

/// `Σ_d (-1)^d #cells_d`.
pub fn cell_euler_characteristic(s: &SpongeComplex) -> i64 {
    s.cell_counts().iter().enumerate().map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
}

#[allow(dead_code)]
fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}
