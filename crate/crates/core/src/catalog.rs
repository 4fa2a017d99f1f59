//! Built-in worked examples: the Grassmannian `G_{4,2}` and the flag variety
//! `F_3` with their maximal-torus-mod-circle actions, the reduction of a
//! quasitoric `CP^3`, and the local models.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::chardata::{
    assemble_euler_cycle, cocycle_check, compatibility_check, data_from_charts, local_model_data, validate_mu, Ambient,
    CharacteristicData, VertexChart,
};
use crate::error::{Error, Result};
use crate::lattice::{lattice_basis, IntVector};
use crate::quasitoric::{polytopes, reduce, CharacteristicFunction, SubtorusChoice};
use crate::sponge::{face_star, homology, validate_sponge, SpongeComplex};
use crate::weights::WeightSystem;

/// A named expectation checked by [`verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Normalized Cramer coefficients at a fixed point, up to overall sign.
    Cramer {
        vertex: String,
        c: Vec<i64>,
    },
    StrictlyAppropriate {
        vertex: String,
        value: bool,
    },
    Betti(Vec<usize>),
    CellCounts(Vec<usize>),
    FixedPoints(usize),
    /// Every cell's upper set is a local model.
    StarsAreLocalModels,
    EulerCycle(bool),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub data: CharacteristicData,
    /// Tangent weights at the fixed points (vertex id to weights).
    pub weight_systems: BTreeMap<String, WeightSystem>,
    pub expected: Vec<Expectation>,
}

/// Names accepted by [`load`] besides `local-model-<n>` for `2 <= n <= 8`.
pub const NAMES: [&str; 3] = ["g42", "f3", "cp3-reduction"];

pub fn load(name: &str) -> Result<CatalogEntry> {
    match name {
        "g42" => g42(),
        "f3" => f3(),
        "cp3-reduction" => cp3_reduction(),
        _ => {
            let n = name
                .strip_prefix("local-model-")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|n| (2..=8).contains(n))
                .ok_or_else(|| Error::Lookup(name.to_string()))?;
            local_model_entry(n)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs every validator on the entry and compares against its expectations.
pub fn verify(entry: &CatalogEntry) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut push =
        |check: &str, passed: bool, detail: String| out.push(CheckOutcome { check: check.to_string(), passed, detail });
    let cd = &entry.data;
    let detail = |r: &crate::report::ValidationReport| if r.passes() { String::new() } else { r.to_string() };
    let r = validate_sponge(&cd.sponge);
    push("sponge", r.passes(), detail(&r));
    let r = validate_mu(cd);
    push("mu-rank", r.passes(), detail(&r));
    push("compatibility", compatibility_check(cd), String::new());
    let r = cocycle_check(cd);
    push("cocycle", r.passes(), detail(&r));
    let cycle = assemble_euler_cycle(cd);
    let is_cycle = matches!(&cycle, Ok(c) if c.is_cycle);
    push(
        "euler-cycle",
        is_cycle,
        match &cycle {
            Ok(c) => format!("cycle = {}", c.is_cycle),
            Err(e) => e.to_string(),
        },
    );
    for exp in &entry.expected {
        match exp {
            Expectation::Cramer { vertex, c } => {
                let got = entry
                    .weight_systems
                    .get(vertex)
                    .ok_or_else(|| Error::Input(format!("no weights at {}", vertex)))
                    .and_then(|ws| ws.cramer_coefficients());
                let want: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
                let neg: Vec<BigInt> = want.iter().map(|x| -x).collect();
                match got {
                    Ok(cc) => push(
                        "cramer",
                        cc.c == want || cc.c == neg,
                        format!("c = {} at {}", IntVector::new(cc.c.clone()), vertex),
                    ),
                    Err(e) => push("cramer", false, e.to_string()),
                }
            }
            Expectation::StrictlyAppropriate { vertex, value } => {
                let got = entry.weight_systems.get(vertex).map(|ws| ws.is_strictly_appropriate());
                match got {
                    Some(Ok(b)) => push("strictly-appropriate", b == *value, format!("{} at {}", b, vertex)),
                    Some(Err(e)) => push("strictly-appropriate", false, e.to_string()),
                    None => push("strictly-appropriate", false, format!("no weights at {}", vertex)),
                }
            }
            Expectation::Betti(b) => match homology(&cd.sponge) {
                Ok(h) => push("betti", h.betti == *b, format!("betti = {:?}", h.betti)),
                Err(e) => push("betti", false, e.to_string()),
            },
            Expectation::CellCounts(c) => {
                let got = cd.sponge.cell_counts();
                push("cell-counts", got == *c, format!("cells per dimension = {:?}", got));
            }
            Expectation::FixedPoints(k) => {
                let got = cd.sponge.cells_of_dim(0).len();
                push("fixed-points", got == *k, format!("{} fixed points", got));
            }
            Expectation::StarsAreLocalModels => {
                let bad: Vec<String> = (0..cd.sponge.len())
                    .filter(|&c| !face_star(&cd.sponge, cd.sponge.id(c)).is_ok_and(|s| s.is_local_model))
                    .map(|c| cd.sponge.id(c).to_string())
                    .collect();
                push(
                    "stars",
                    bad.is_empty(),
                    if bad.is_empty() { String::new() } else { format!("bad stars: {:?}", bad) },
                );
            }
            Expectation::EulerCycle(b) => push("euler-cycle-expected", is_cycle == *b, format!("cycle = {}", is_cycle)),
        }
    }
    out
}

/// Hand-built cell complexes used by the catalog and tests.
pub mod complexes {
    use std::collections::BTreeMap;

    use crate::quasitoric::CellManifold;
    use crate::sponge::{Cell, Incidence, SpongeComplex};

    pub(crate) const OCT_IDS: [&str; 6] = ["+x", "+y", "-x", "-y", "+z", "-z"];
    pub(crate) const OCT_COORDS: [[i64; 3]; 6] = [[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];

    fn cell(id: &str, dim: usize) -> Cell {
        Cell { id: id.to_string(), dim, label: String::new() }
    }

    fn antipodal(a: usize, b: usize) -> bool {
        (0..3).all(|k| OCT_COORDS[a][k] == -OCT_COORDS[b][k])
    }

    pub(crate) fn edge_id(a: usize, b: usize) -> String {
        let (a, b) = (a.min(b), a.max(b));
        format!("{}:{}", OCT_IDS[a], OCT_IDS[b])
    }

    fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }

    fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
        (0..3).map(|k| a[k] * b[k]).sum()
    }

    /// Incidence of a polygon with outward normal `normal` and an edge `a -> b`:
    /// `+1` when the polygon lies to the left of the edge seen from `normal`.
    fn polygon_incidence(normal: [i64; 3], verts: &[usize], a: usize, b: usize) -> i64 {
        let d: [i64; 3] = std::array::from_fn(|k| OCT_COORDS[b][k] - OCT_COORDS[a][k]);
        let m = verts.len() as i64;
        let to_center: [i64; 3] = std::array::from_fn(|k| {
            2 * verts.iter().map(|&v| OCT_COORDS[v][k]).sum::<i64>() - m * (OCT_COORDS[a][k] + OCT_COORDS[b][k])
        });
        dot(cross(normal, d), to_center).signum()
    }

    /// Octahedron boundary: 6 vertices, 12 edges (from lower to higher vertex
    /// index), 8 triangles oriented by their outward normals. Returns
    /// `(cells, incidence)` for `n = 4`.
    fn octahedron_parts(with_squares: bool) -> (Vec<Cell>, Incidence) {
        let mut cells: Vec<Cell> = OCT_IDS.iter().map(|v| cell(v, 0)).collect();
        let mut inc = BTreeMap::new();
        for (a, va) in OCT_IDS.iter().enumerate() {
            for (b, vb) in OCT_IDS.iter().enumerate().skip(a + 1) {
                if !antipodal(a, b) {
                    let id = edge_id(a, b);
                    cells.push(cell(&id, 1));
                    inc.insert(id, vec![(va.to_string(), -1), (vb.to_string(), 1)]);
                }
            }
        }
        let mut polygons: Vec<(String, [i64; 3], Vec<usize>)> = Vec::new();
        for sz in [1, -1] {
            for sy in [1, -1] {
                for sx in [1, -1] {
                    let verts: Vec<usize> = [[sx, 0, 0], [0, sy, 0], [0, 0, sz]]
                        .iter()
                        .map(|c| OCT_COORDS.iter().position(|x| x == c).unwrap())
                        .collect();
                    let id = verts.iter().map(|&v| OCT_IDS[v]).collect::<Vec<_>>().join(":");
                    polygons.push((id, [sx, sy, sz], verts));
                }
            }
        }
        if with_squares {
            for (k, axis) in ["x", "y", "z"].iter().enumerate() {
                let mut normal = [0; 3];
                normal[k] = 1;
                let verts: Vec<usize> = (0..6).filter(|&v| OCT_COORDS[v][k] == 0).collect();
                polygons.push((format!("square-{}", axis), normal, verts));
            }
        }
        for (id, normal, verts) in polygons {
            let mut faces = Vec::new();
            for (i, &a) in verts.iter().enumerate() {
                for &b in &verts[i + 1..] {
                    if !antipodal(a, b) {
                        let (a, b) = (a.min(b), a.max(b));
                        faces.push((edge_id(a, b), polygon_incidence(normal, &verts, a, b)));
                    }
                }
            }
            cells.push(cell(&id, 2));
            inc.insert(id, faces);
        }
        (cells, inc)
    }

    /// The octahedron boundary alone: not a sponge (edges lie in two facets).
    pub fn octahedron_boundary() -> SpongeComplex {
        let (cells, inc) = octahedron_parts(false);
        SpongeComplex::new(4, cells, &inc).expect("octahedron")
    }

    /// Octahedron boundary with the three equatorial squares attached.
    pub fn octahedron_with_squares() -> SpongeComplex {
        let (cells, inc) = octahedron_parts(true);
        SpongeComplex::new(4, cells, &inc).expect("octahedron with squares")
    }

    fn k33_parts() -> (Vec<Cell>, Incidence) {
        let mut cells: Vec<Cell> = (0..3).map(|i| cell(&format!("a{}", i), 0)).collect();
        cells.extend((0..3).map(|j| cell(&format!("b{}", j), 0)));
        let mut inc = BTreeMap::new();
        for i in 0..3 {
            for j in 0..3 {
                let id = format!("a{}b{}", i, j);
                cells.push(cell(&id, 1));
                inc.insert(id, vec![(format!("a{}", i), -1), (format!("b{}", j), 1)]);
            }
        }
        (cells, inc)
    }

    /// `K_{3,3}` with edges oriented from the `a` side to the `b` side (`n = 3`).
    pub fn k33() -> SpongeComplex {
        let (cells, inc) = k33_parts();
        SpongeComplex::new(3, cells, &inc).expect("K33")
    }

    /// The torus cut into three hexagons `H0, H1, H2` with 1-skeleton `K_{3,3}`:
    /// `H_k` is bounded by the edges `a_i b_j` with `j - i ≡ k+1` (traversed
    /// `a -> b`) or `k+2` (traversed `b -> a`) modulo 3.
    pub fn three_hexagon_torus() -> CellManifold {
        let (mut cells, mut inc) = k33_parts();
        for k in 0..3 {
            let id = format!("H{}", k);
            let mut faces = Vec::new();
            for i in 0..3 {
                faces.push((format!("a{}b{}", i, (i + k + 1) % 3), 1));
                faces.push((format!("a{}b{}", i, (i + k + 2) % 3), -1));
            }
            cells.push(cell(&id, 2));
            inc.insert(id, faces);
        }
        CellManifold::new(3, cells, &inc).expect("torus")
    }
}

fn entry_weight_systems(charts: &[(String, WeightSystem)]) -> BTreeMap<String, WeightSystem> {
    charts.iter().cloned().collect()
}

/// Charts from weights given in a common lattice: expressed in a basis of the
/// lattice generated by all weights so that the torus acts effectively.
fn effective_charts(s: &SpongeComplex, raw: &[(String, WeightSystem, Vec<String>)]) -> Result<Vec<VertexChart>> {
    let all: Vec<IntVector> = raw.iter().flat_map(|(_, ws, _)| ws.weights().to_vec()).collect();
    let dim = all[0].dim();
    let basis = lattice_basis(&all, dim)?;
    raw.iter()
        .map(|(v, ws, edges)| {
            let vertex = s.index_of(v).ok_or_else(|| Error::Input(format!("unknown vertex {}", v)))?;
            let edges = edges
                .iter()
                .map(|e| s.index_of(e).ok_or_else(|| Error::Input(format!("unknown edge {}", e))))
                .collect::<Result<_>>()?;
            Ok(VertexChart { vertex, weights: ws.in_basis(&basis)?, edges, orientation: 1 })
        })
        .collect()
}

fn g42() -> Result<CatalogEntry> {
    use complexes::{edge_id, OCT_COORDS, OCT_IDS};
    let s = complexes::octahedron_with_squares();
    let mut raw = Vec::new();
    for v in 0..6 {
        let nbrs: Vec<usize> =
            (0..6).filter(|&w| w != v && (0..3).any(|k| OCT_COORDS[w][k] != -OCT_COORDS[v][k])).collect();
        let weights: Vec<IntVector> = nbrs
            .iter()
            .map(|&w| IntVector::new((0..3).map(|k| BigInt::from(OCT_COORDS[w][k] - OCT_COORDS[v][k])).collect()))
            .collect();
        let edges = nbrs.iter().map(|&w| edge_id(v, w)).collect();
        raw.push((OCT_IDS[v].to_string(), WeightSystem::new(weights)?, edges));
    }
    let charts = effective_charts(&s, &raw)?;
    let data = data_from_charts(&s, &charts, Ambient::Sphere)?;
    let ws: Vec<(String, WeightSystem)> = raw.into_iter().map(|(v, w, _)| (v, w)).collect();
    Ok(CatalogEntry {
        name: "g42".into(),
        description: "Grassmannian G(4,2) with the action of T^3 = T^4/diagonal; orbit space S^5".into(),
        data,
        weight_systems: entry_weight_systems(&ws),
        expected: vec![
            Expectation::FixedPoints(6),
            Expectation::CellCounts(vec![6, 12, 11]),
            Expectation::Cramer { vertex: "+z".into(), c: vec![1, -1, 1, -1] },
            Expectation::StrictlyAppropriate { vertex: "+z".into(), value: true },
            Expectation::Betti(vec![1, 0, 4]),
            Expectation::StarsAreLocalModels,
            Expectation::EulerCycle(true),
        ],
    })
}

/// Vertex id of a permutation of `{1, 2, 3}` in one-line notation.
fn perm_id(p: &[usize; 3]) -> String {
    p.iter().map(|x| x.to_string()).collect()
}

fn is_even(p: &[usize; 3]) -> bool {
    let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    inversions % 2 == 0
}

fn f3_edge_id(p: &[usize; 3], q: &[usize; 3]) -> String {
    let (a, b) = if is_even(p) { (p, q) } else { (q, p) };
    format!("{}-{}", perm_id(a), perm_id(b))
}

const PERMS: [[usize; 3]; 6] = [[1, 2, 3], [2, 3, 1], [3, 1, 2], [2, 1, 3], [1, 3, 2], [3, 2, 1]];

/// `K_{3,3}` as the moment graph of the flag variety: even permutations on one
/// side, odd on the other, edges `w, w∘(i j)` oriented from even to odd.
pub fn flag_sponge() -> SpongeComplex {
    use crate::sponge::Cell;
    let mut cells: Vec<Cell> = PERMS.iter().map(|p| Cell { id: perm_id(p), dim: 0, label: String::new() }).collect();
    let mut inc = BTreeMap::new();
    for p in PERMS.iter().filter(|p| is_even(p)) {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut q = *p;
            q.swap(i, j);
            let id = f3_edge_id(p, &q);
            cells.push(Cell { id: id.clone(), dim: 1, label: String::new() });
            inc.insert(id, vec![(perm_id(p), -1), (perm_id(&q), 1)]);
        }
    }
    SpongeComplex::new(3, cells, &inc).expect("flag moment graph")
}

/// Tangent weights of `F_3` at `w`: `e_{w(i)} - e_{w(j)}` for `i > j`, in the
/// basis `e_1 - e_2, e_2 - e_3` of the root lattice, together with the edge to
/// `w∘(i j)`.
fn flag_weights(p: &[usize; 3]) -> Result<(WeightSystem, Vec<String>)> {
    let mut weights = Vec::new();
    let mut edges = Vec::new();
    for (i, j) in [(1, 0), (2, 0), (2, 1)] {
        let mut v = [0i64; 3];
        v[p[i] - 1] += 1;
        v[p[j] - 1] -= 1;
        weights.push(IntVector::from_i64s(&[v[0], -v[2]]));
        let mut q = *p;
        q.swap(i, j);
        edges.push(f3_edge_id(p, &q));
    }
    Ok((WeightSystem::new(weights)?, edges))
}

fn f3() -> Result<CatalogEntry> {
    let s = flag_sponge();
    let raw: Vec<(String, WeightSystem, Vec<String>)> =
        PERMS.iter().map(|p| flag_weights(p).map(|(ws, e)| (perm_id(p), ws, e))).collect::<Result<_>>()?;
    let charts = effective_charts(&s, &raw)?;
    let data = data_from_charts(&s, &charts, Ambient::Product { boundary_trivial: true })?;
    let ws: Vec<(String, WeightSystem)> = raw.into_iter().map(|(v, w, _)| (v, w)).collect();
    Ok(CatalogEntry {
        name: "f3".into(),
        description: "Complete flag variety F_3 with the action of T^2 = T^3/diagonal; sponge K_{3,3} on a torus"
            .into(),
        data,
        weight_systems: entry_weight_systems(&ws),
        expected: vec![
            Expectation::FixedPoints(6),
            Expectation::CellCounts(vec![6, 9]),
            Expectation::Cramer { vertex: "123".into(), c: vec![1, -1, 1] },
            Expectation::StrictlyAppropriate { vertex: "123".into(), value: true },
            Expectation::Betti(vec![1, 4]),
            Expectation::EulerCycle(true),
        ],
    })
}

/// `λ` of the standard `CP^3` over the simplex with facets `1..4`.
pub fn cp3_lambda() -> CharacteristicFunction {
    CharacteristicFunction::from_i64s(&[("1", &[1, 0, 0]), ("2", &[0, 1, 0]), ("3", &[0, 0, 1]), ("4", &[-1, -1, -1])])
}

/// `λ` of `(CP^1)^3` over the 3-cube: both facets normal to `x_i` get `e_i`.
pub fn cube_lambda() -> CharacteristicFunction {
    CharacteristicFunction::from_i64s(&[
        ("x1-", &[1, 0, 0]),
        ("x1+", &[1, 0, 0]),
        ("x2-", &[0, 1, 0]),
        ("x2+", &[0, 1, 0]),
        ("x3-", &[0, 0, 1]),
        ("x3+", &[0, 0, 1]),
    ])
}

/// A `λ` over the triangular prism admitting a strict subtorus. The standard
/// `CP^2 × CP^1` values admit none, since `⟨α, e_1 + e_2⟩` is even whenever
/// `⟨α, e_1⟩` and `⟨α, e_2⟩` are odd.
pub fn prism_lambda() -> CharacteristicFunction {
    CharacteristicFunction::from_i64s(&[
        ("s1", &[1, 0, 0]),
        ("s2", &[0, 1, 0]),
        ("s3", &[1, 1, 1]),
        ("bottom", &[0, 0, 1]),
        ("top", &[0, 0, 1]),
    ])
}

fn cp3_reduction() -> Result<CatalogEntry> {
    let p = polytopes::simplex(3);
    let lambda = cp3_lambda();
    let st = SubtorusChoice::from_i64s(&[1, 1, -1])?;
    let data = reduce(&p, &lambda, &st)?;
    let weight_systems = crate::quasitoric::induced_vertex_weights(&p, &lambda, &st)?;
    Ok(CatalogEntry {
        name: "cp3-reduction".into(),
        description: "CP^3 with the circle-quotient subtorus ker(1,1,-1); sponge is the 1-skeleton of the tetrahedron"
            .into(),
        data,
        weight_systems,
        expected: vec![
            Expectation::FixedPoints(4),
            Expectation::CellCounts(vec![4, 6]),
            Expectation::StrictlyAppropriate { vertex: "1&2&3".into(), value: true },
            Expectation::Betti(vec![1, 3]),
            Expectation::EulerCycle(true),
        ],
    })
}

fn local_model_entry(n: usize) -> Result<CatalogEntry> {
    let ws = WeightSystem::standard(n)?;
    let data = local_model_data(&ws)?;
    let counts: Vec<usize> = (0..=n - 2).map(|k| crate::sponge::binomial(n, k)).collect();
    let ones = vec![1; n];
    let mut weight_systems = BTreeMap::new();
    weight_systems.insert("cone()".to_string(), ws);
    Ok(CatalogEntry {
        name: format!("local-model-{}", n),
        description: format!("local model of {} weights: the (n-2)-skeleton of the A_{} fan", n, n - 1),
        data,
        weight_systems,
        expected: vec![
            Expectation::CellCounts(counts),
            Expectation::Cramer { vertex: "cone()".into(), c: ones },
            Expectation::StarsAreLocalModels,
            Expectation::EulerCycle(true),
        ],
    })
}

/// True when every check of [`verify`] passed.
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

#[allow(dead_code)]
fn abs_all(v: &[BigInt]) -> Vec<BigInt> {
    v.iter().map(|x| x.abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_verify() {
        let mut names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
        names.extend((2..=6).map(|n| format!("local-model-{}", n)));
        for name in names {
            let entry = load(&name).unwrap();
            let outcomes = verify(&entry);
            assert!(all_passed(&outcomes), "{}: {:?}", name, outcomes.iter().filter(|o| !o.passed).collect::<Vec<_>>());
        }
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(load("nope"), Err(Error::Lookup(_))));
        assert!(matches!(load("local-model-1"), Err(Error::Lookup(_))));
    }

    #[test]
    fn local_model_4_counts() {
        let e = load("local-model-4").unwrap();
        assert_eq!(e.data.sponge.cell_counts(), vec![1, 4, 6]);
    }

    #[test]
    fn torus_is_simple_and_orientable() {
        let m = complexes::three_hexagon_torus();
        assert!(m.validate_simple().passes());
        assert_eq!(m.fundamental_cycle().unwrap(), vec![1, 1, 1]);
    }
}
