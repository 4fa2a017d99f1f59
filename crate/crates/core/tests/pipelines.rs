mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use torus_sponge::catalog::{self, complexes};
use torus_sponge::chardata::{
    assemble_euler_cycle, cocycle_check, compatibility_check, orbit_types, validate_mu, Ambient, CharacteristicData,
};
use torus_sponge::classify::{canonical_invariants, compare, Comparison};
use torus_sponge::format;
use torus_sponge::quasitoric::{
    cell_manifold_data, find_strict_subtorus, polytopes, reduce, CharacteristicFunction, SubtorusChoice,
};
use torus_sponge::sponge::{homology, local_model, validate_sponge, weighted_cycle_check, Cell, SpongeComplex};
use torus_sponge::{IntMatrix, IntVector};

fn simplex_id(s: &[usize]) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}

/// The simplicial complex generated by `facets` as a cell complex.
fn simplicial_complex(facets: &[Vec<usize>]) -> SpongeComplex {
    let mut all: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        let mut f = f.clone();
        f.sort_unstable();
        for mask in 1u32..(1 << f.len()) {
            all.push((0..f.len()).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect());
        }
    }
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    all.dedup();
    let top = all.last().unwrap().len() - 1;
    let cells = all.iter().map(|s| Cell { id: simplex_id(s), dim: s.len() - 1, label: String::new() }).collect();
    let mut inc = BTreeMap::new();
    for s in all.iter().filter(|s| s.len() > 1) {
        let faces = (0..s.len())
            .map(|i| {
                let mut t = s.clone();
                t.remove(i);
                (simplex_id(&t), if i % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        inc.insert(simplex_id(s), faces);
    }
    SpongeComplex::new(top + 2, cells, &inc).unwrap()
}

fn cell_vertex_lists(s: &SpongeComplex) -> Vec<Vec<usize>> {
    (0..s.len()).map(|c| s.vertices_of(c)).collect()
}

#[test]
fn local_model_homology_is_a_shifted_skeleton() {
    for n in 3..=7 {
        let lm = local_model(n).unwrap().to_complex();
        let h = homology(&lm).unwrap();
        // cone(I) ↔ simplex I, cone() ↔ the empty simplex: the reduced
        // homology of the (n-3)-skeleton of an (n-1)-simplex, shifted by one.
        let skeleton: Vec<Vec<usize>> = itertools_subsets(n, n - 2).into_iter().collect();
        let mut oracle = simplicial_betti(&skeleton);
        oracle[0] -= 1;
        let mut expected = vec![0];
        expected.extend(oracle);
        assert_eq!(h.betti, expected, "n = {}", n);
        assert_eq!(h.betti[n - 2], n - 1);
    }
}

fn itertools_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

#[test]
fn simplicial_sponges_match_the_oracle() {
    let oct = complexes::octahedron_boundary();
    let h = homology(&oct).unwrap();
    let tris: Vec<Vec<usize>> = oct.cells_of_dim(2).iter().map(|&t| oct.vertices_of(t)).collect();
    assert_eq!(h.betti, simplicial_betti(&tris));
    assert_eq!(h.betti, vec![1, 0, 1]);

    for (name, p, lambda) in [
        ("simplex", polytopes::simplex(3), catalog::cp3_lambda()),
        ("cube", polytopes::cube(3), catalog::cube_lambda()),
        ("prism", polytopes::triangular_prism(), catalog::prism_lambda()),
    ] {
        let st = find_strict_subtorus(&p, &lambda, 1).unwrap().remove(0);
        let cd = reduce(&p, &lambda, &st).unwrap();
        let s = &cd.sponge;
        let h = homology(s).unwrap();
        assert_eq!(h.betti, simplicial_betti(&cell_vertex_lists(s)), "{}", name);
        assert_eq!(h.euler_characteristic(), s.cell_counts()[0] as i64 - s.cell_counts()[1] as i64);
    }
}

#[test]
fn g42_sponge_homology() {
    let s = complexes::octahedron_with_squares();
    let h = homology(&s).unwrap();
    assert_eq!(h.betti, vec![1, 0, 4]);
    assert!(h.torsion.iter().all(Vec::is_empty));
}

#[test]
fn hexagon_torus_data() {
    let m = complexes::three_hexagon_torus();
    let lambda = CharacteristicFunction::from_i64s(&[("H0", &[1, 0, 0]), ("H1", &[0, 1, 0]), ("H2", &[0, 0, 1])]);
    let st = SubtorusChoice::from_i64s(&[1, 1, 1]).unwrap();
    let cd = cell_manifold_data(&m, &lambda, &st).unwrap();
    assert_eq!(cd.ambient, Ambient::Product { boundary_trivial: true });
    assert!(validate_sponge(&cd.sponge).passes());
    assert!(validate_mu(&cd).passes());
    assert!(compatibility_check(&cd));
    assert!(cocycle_check(&cd).passes());
    let cycle = assemble_euler_cycle(&cd).unwrap();
    assert!(cycle.is_cycle && cycle.determines_euler_class);
    // The sponge is the 1-skeleton: six vertices, nine edges.
    assert_eq!(homology(&cd.sponge).unwrap().betti, vec![1, 4]);
}

#[test]
fn orbit_types_cover_every_cell() {
    for name in ["g42", "f3", "cp3-reduction"] {
        let cd = catalog::load(name).unwrap().data;
        let types = orbit_types(&cd).unwrap();
        let with_face = types.iter().filter(|t| t.face.is_some()).count();
        assert_eq!(with_face, cd.sponge.len(), "{}", name);
    }
}

#[test]
fn json_round_trips_are_stable() {
    let mut names: Vec<String> = catalog::NAMES.iter().map(|s| s.to_string()).collect();
    names.push("local-model-5".into());
    for name in names {
        let cd = catalog::load(&name).unwrap().data;
        let text = format::to_canonical_string(&format::chardata_to_json(&cd));
        let back = format::chardata_from_json(&format::parse(&text).unwrap()).unwrap();
        assert_eq!(format::to_canonical_string(&format::chardata_to_json(&back)), text, "{}", name);
        assert_eq!(back.mu, cd.mu);
        assert_eq!(back.euler_sign, cd.euler_sign);
        let s = format::to_canonical_string(&format::sponge_to_json(&cd.sponge));
        let sb = format::sponge_from_json(&format::parse(&s).unwrap()).unwrap();
        assert_eq!(sb.cell_counts(), cd.sponge.cell_counts());
    }
    let p = polytopes::triangular_prism();
    let text = format::to_canonical_string(&format::polytope_to_json(&p));
    let back = format::polytope_from_json(&format::parse(&text).unwrap()).unwrap();
    assert_eq!(format::to_canonical_string(&format::polytope_to_json(&back)), text);
}

#[test]
fn reductions_along_different_subtori_are_compared() {
    let p = polytopes::cube(3);
    let lambda = catalog::cube_lambda();
    let found = find_strict_subtorus(&p, &lambda, 1).unwrap();
    assert_eq!(found.len(), 4);
    let data: Vec<CharacteristicData> = found.iter().map(|st| reduce(&p, &lambda, st).unwrap()).collect();
    // Symmetries of the cube exchange every choice of signs.
    for d in &data[1..] {
        assert!(matches!(compare(&data[0], d).unwrap(), Comparison::Equivalent(_)));
    }
}

fn transform_lambda(lambda: &CharacteristicFunction, g: &IntMatrix) -> CharacteristicFunction {
    CharacteristicFunction::new(lambda.lambda.iter().map(|(f, v)| (f.clone(), g.mul_vec(v).unwrap())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_simplicial_homology(tris in proptest::collection::btree_set((0usize..6, 0usize..6, 0usize..6), 1..10)) {
        let facets: Vec<Vec<usize>> = tris
            .into_iter()
            .filter(|(a, b, c)| a != b && b != c && a != c)
            .map(|(a, b, c)| vec![a, b, c])
            .collect();
        prop_assume!(!facets.is_empty());
        let s = simplicial_complex(&facets);
        let h = homology(&s).unwrap();
        prop_assert_eq!(h.betti, simplicial_betti(&facets));
    }

    #[test]
    fn euler_cycle_is_basis_independent(seed in any::<u64>(), which in 0usize..4) {
        let name = ["g42", "f3", "cp3-reduction", "local-model-5"][which];
        let cd = catalog::load(name).unwrap().data;
        let mut rng = StdRng::seed_from_u64(seed);
        let a = to_matrix(&random_unimodular(&mut rng, cd.n - 1, 10));
        let moved = cd.transformed(&a).unwrap();
        prop_assert!(weighted_cycle_check(&cd.sponge, &cd.euler_vectors()).unwrap());
        prop_assert!(weighted_cycle_check(&moved.sponge, &moved.euler_vectors()).unwrap());
        prop_assert!(cocycle_check(&moved).passes());
        prop_assert_eq!(canonical_invariants(&cd).unwrap(), canonical_invariants(&moved).unwrap());
    }

    #[test]
    fn reduction_is_natural_in_the_torus(seed in any::<u64>(), which in 0usize..3) {
        let (p, lambda) = match which {
            0 => (polytopes::simplex(3), catalog::cp3_lambda()),
            1 => (polytopes::cube(3), catalog::cube_lambda()),
            _ => (polytopes::triangular_prism(), catalog::prism_lambda()),
        };
        let st = find_strict_subtorus(&p, &lambda, 1).unwrap().remove(0);
        let mut rng = StdRng::seed_from_u64(seed);
        let g = to_matrix(&random_unimodular(&mut rng, 3, 8));
        // λ ↦ gλ and α ↦ α g⁻¹ keep every pairing.
        let g_inv = g.inverse_unimodular().unwrap();
        let alpha = g_inv.transpose().mul_vec(&st.alpha_t).unwrap();
        let alpha = if alpha.first_nonzero().is_some_and(|x| x < &0.into()) { -&alpha } else { alpha };
        let moved_st = SubtorusChoice::new(alpha).unwrap();
        let moved_lambda = transform_lambda(&lambda, &g);
        let a = reduce(&p, &lambda, &st).unwrap();
        let b = reduce(&p, &moved_lambda, &moved_st).unwrap();
        prop_assert!(cocycle_check(&b).passes());
        prop_assert!(matches!(compare(&a, &b).unwrap(), Comparison::Equivalent(_)));
    }
}

#[test]
fn mu_values_are_primitive() {
    for name in ["g42", "f3", "cp3-reduction"] {
        let cd = catalog::load(name).unwrap().data;
        assert!(cd.mu.values().all(IntVector::is_primitive), "{}", name);
    }
}

#[test]
fn induced_coefficients_are_the_pairings() {
    for (p, lambda) in [
        (polytopes::simplex(3), catalog::cp3_lambda()),
        (polytopes::cube(3), catalog::cube_lambda()),
        (polytopes::triangular_prism(), catalog::prism_lambda()),
    ] {
        for st in find_strict_subtorus(&p, &lambda, 2).unwrap() {
            let weights = torus_sponge::quasitoric::induced_vertex_weights(&p, &lambda, &st).unwrap();
            for (vertex, facets) in p.vertices().iter().enumerate() {
                let ws = &weights[&p.face_id(facets)];
                let c: Vec<i128> = ws.cramer_coefficients().unwrap().c.iter().map(big).collect();
                let pairings: Vec<i128> = facets
                    .iter()
                    .map(|&f| {
                        let l = vec_i128(&lambda.lambda[&p.facets()[f]]);
                        vec_i128(&st.alpha_t).iter().zip(&l).map(|(a, b)| a * b).sum()
                    })
                    .collect();
                let neg: Vec<i128> = pairings.iter().map(|x| -x).collect();
                assert!(c == pairings || c == neg, "vertex {}: c = {:?}, pairings {:?}", vertex, c, pairings);
            }
        }
    }
}
