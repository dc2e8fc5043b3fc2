use std::collections::BTreeMap;

use mckay_core::bratteli::{dim_centralizer_walks, multiplicities};
use mckay_core::groups::{character_projector, generators, SubgroupSpec};
use mckay_core::matrix_units::*;
use mckay_core::repgraph::build_graph;
use mckay_core::tensor_endo::{commutant_basis, group_action, SparseEndo};
use mckay_core::CycloNum;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

fn binom(n: usize, r: usize) -> usize {
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn walk_dim(sel: &str, k: usize) -> usize {
    let g = build_graph(&SubgroupSpec::parse(sel).unwrap(), Some(k + 1)).unwrap();
    dim_centralizer_walks(&g, k).unwrap().to_usize().unwrap()
}

fn walk_mults(sel: &str, k: usize) -> BTreeMap<String, usize> {
    let g = build_graph(&SubgroupSpec::parse(sel).unwrap(), Some(k + 1)).unwrap();
    multiplicities(&g, k).unwrap().level_map(k).into_iter().map(|(l, m)| (l, m.to_usize().unwrap())).collect()
}

fn realize_all(labels: &[MatrixUnitLabel]) -> Vec<SparseEndo> {
    labels.iter().map(MatrixUnitLabel::realize).collect()
}

#[test]
fn cyclic_c8_k6_counts_and_classes() {
    let basis = cyclic_basis(8, 6).unwrap();
    assert_eq!(basis.len(), 1056);
    let mut classes = [0usize; 4];
    for l in &basis {
        classes[l.row.weight() % 4] += 1;
    }
    assert_eq!(classes, [256, 144, 256, 400]);
    assert_eq!(walk_dim("C8", 6), 1056);
    assert_eq!(commutant_basis(&SubgroupSpec::cyclic(8), 6).unwrap().len(), 1056);
    let spec = SubgroupSpec::cyclic(8);
    assert!(commute_with_generators(&spec, 6, &realize_all(&basis)).unwrap());
}

#[test]
fn cyclic_counts_match_walks_on_grid() {
    for n in 1..=9u32 {
        for k in 1..=6 {
            let count = cyclic_basis(n, k).unwrap().len();
            assert_eq!(count, walk_dim(&format!("C{n}"), k), "C{n} k={k}");
        }
    }
    assert_eq!(cyclic_basis(13, 6).unwrap().len(), binom(12, 6));
    assert_eq!(cyclic_basis(20, 7).unwrap().len(), binom(14, 7));
}

#[test]
fn cyclic_odd_double_has_same_labels() {
    for nt in [3u32, 5] {
        for k in 1..=6 {
            let pairs = |n| -> Vec<(usize, usize)> {
                cyclic_basis(n, k).unwrap().iter().map(|l| (l.row_index(), l.col_index())).collect()
            };
            assert_eq!(pairs(nt), pairs(2 * nt));
        }
    }
}

#[test]
fn cyclic_matrix_unit_tables() {
    for (n, k) in [(3u32, 3usize), (4, 4), (5, 4), (8, 6)] {
        let blocks = cyclic_blocks(n, k).unwrap();
        assert_eq!(sum_of_block_squares(&blocks), cyclic_basis(n, k).unwrap().len());
        assert!(matrix_unit_table_check(&blocks, 7).holds(), "C{n} k={k}");
    }
}

#[test]
fn cyclic_central_elements() {
    let z = cyclic_central_basis(3, 1).unwrap();
    let nodes: Vec<&str> = z.iter().map(|c| c.node.as_str()).collect();
    assert_eq!(nodes, ["1", "2"]);
    assert_eq!(z[0].element.add(&z[1].element), SparseEndo::identity(1, 1));

    let basis = realize_all(&cyclic_basis(8, 6).unwrap());
    assert!(central_idempotents_check(&cyclic_central_basis(8, 6).unwrap(), &basis));

    for n in 2..=9u32 {
        let nt = mckay_core::groups::n_tilde(n) as usize;
        for k in nt.saturating_sub(1).max(1)..=nt + 1 {
            let support = walk_mults(&format!("C{n}"), k).len();
            let centre = cyclic_central_basis(n, k).unwrap().len();
            assert_eq!(centre, support, "C{n} k={k}");
            assert_eq!(centre, nt, "C{n} k={k}");
        }
    }
}

#[test]
fn cyclic_modules() {
    assert_eq!(cyclic_module_basis(8, 6, 0).unwrap().dim(), 20);
    assert_eq!(cyclic_module_basis(8, 6, 4).unwrap().dim(), 12);
    assert_eq!(cyclic_module_basis(13, 6, 6).unwrap().dim(), 1);
    assert!(cyclic_module_basis(8, 6, 1).is_err());

    for (n, k) in [(3u32, 4usize), (4, 5), (6, 5), (8, 6)] {
        let spec = SubgroupSpec::cyclic(n);
        let g = group_action(&generators(&spec).unwrap()[0].matrix, k);
        let basis = realize_all(&cyclic_basis(n, k).unwrap());
        let blocks = cyclic_blocks(n, k).unwrap();
        let mults = walk_mults(&format!("C{n}"), k);
        let mut total = 0;
        for ell in cyclic_lambda(n, k) {
            let m = cyclic_module_basis(n, k, ell).unwrap();
            let a = a_ell(n, k, ell).unwrap();
            assert_eq!(m.dim(), mults[&ell.to_string()]);
            assert_eq!(m.dim() as u128, wrapped_binomial(k, a, mckay_core::groups::n_tilde(n) as usize));
            assert!(m.is_independent());
            assert!(m.invariant_under(&basis));
            assert!(module_action_check(&blocks, &m));
            let zeta = CycloNum::root_of_unity(n, ell as i64);
            for v in &m.vectors {
                let expect: BTreeMap<usize, CycloNum> = v.iter().map(|(i, x)| (*i, x * &zeta)).collect();
                assert_eq!(g.apply(v), expect);
            }
            total += m.dim();
        }
        assert_eq!(total, 1 << k);
    }
}

#[test]
fn planar_rook() {
    assert_eq!(planar_rook_units(2).unwrap().len(), 6);
    for k in 1..=4 {
        assert_eq!(planar_rook_units(k).unwrap().len(), binom(2 * k, k));
        let report = planar_rook_iso_check(k).unwrap();
        assert!(report.holds(), "{report:?}");
    }
    let dims: Vec<usize> = (0..=5).map(|a| cinfty_module_basis(5, a).unwrap().dim()).collect();
    assert_eq!(dims, [1, 5, 10, 10, 5, 1]);
    let mults = walk_mults("Cinf", 5);
    for a in 0..=5usize {
        assert_eq!(mults[&(5 - 2 * a as i64).to_string()], dims[a]);
    }
}

#[test]
fn rook_units_multiply_as_matrix_units() {
    use rand::{Rng, SeedableRng};
    let k = 4;
    let subsets: Vec<u32> = (0..1u32 << k).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut pick = |size: u32| loop {
        let s = subsets[rng.gen_range(0..subsets.len())];
        if s.count_ones() == size {
            return s;
        }
    };
    for trial in 0..300 {
        let size = (trial % 5) as u32;
        let (r, s, u) = (pick(size), pick(size), pick(size));
        let t = if trial % 2 == 0 { s } else { pick(size) };
        let lhs = RookElement::unit(r, s).mul(&RookElement::unit(t, u));
        if s == t {
            assert_eq!(lhs, RookElement::unit(r, u));
        } else {
            assert!(lhs.is_zero());
        }
    }
}

#[test]
fn dihedral_basis_counts_and_commutation() {
    assert_eq!(dihedral_basis(5, 4).unwrap().len(), 35);
    assert_eq!(dihedral_basis(4, 4).unwrap().len(), 36);
    for n in 2..=6u32 {
        for k in 1..=5 {
            let basis = dihedral_basis(n, k).unwrap();
            assert_eq!(2 * basis.len(), walk_dim(&format!("C{}", 2 * n), k), "D{n} k={k}");
            assert_eq!(basis.len(), walk_dim(&format!("D{n}"), k));
            let spec = SubgroupSpec::dihedral(n);
            if k <= 4 {
                assert_eq!(basis.len(), commutant_basis(&spec, k).unwrap().len());
            }
            assert!(commute_with_generators(&spec, k, &realize_all(&basis)).unwrap(), "D{n} k={k}");
        }
    }
}

#[test]
fn dihedral_blocks_example() {
    for n in [5u32, 6, 7] {
        let blocks = dihedral_matrix_unit_basis(n, 4).unwrap();
        let sizes: Vec<(String, usize)> = blocks.iter().map(|b| (b.node.clone(), b.size)).collect();
        let expect = [("0", 3), ("0'", 3), ("2", 4), ("4", 1)];
        assert_eq!(sizes, expect.map(|(a, b)| (a.to_string(), b)));
    }
    let blocks = dihedral_matrix_unit_basis(4, 4).unwrap();
    let sizes: Vec<(String, usize)> = blocks.iter().map(|b| (b.node.clone(), b.size)).collect();
    let expect = [("0", 3), ("0'", 3), ("2", 4), ("4", 1), ("4'", 1)];
    assert_eq!(sizes, expect.map(|(a, b)| (a.to_string(), b)));
    assert_eq!(sum_of_block_squares(&blocks), 36);
    assert!(matrix_unit_table_check(&blocks, 3).holds());
}

#[test]
fn dihedral_blocks_match_walks_on_grid() {
    for n in 2..=6u32 {
        for k in 1..=6 {
            let blocks = dihedral_matrix_unit_basis(n, k).unwrap();
            let sizes: BTreeMap<String, usize> = blocks.iter().map(|b| (b.node.clone(), b.size)).collect();
            assert_eq!(sizes, walk_mults(&format!("D{n}"), k), "D{n} k={k}");
            assert_eq!(sum_of_block_squares(&blocks), dihedral_basis(n, k).unwrap().len());
            if k <= 5 {
                let spec = SubgroupSpec::dihedral(n);
                let units: Vec<SparseEndo> = blocks.iter().flat_map(|b| realize_all(&b.units)).collect();
                assert!(commute_with_generators(&spec, k, &units).unwrap());
                assert!(matrix_unit_table_check(&blocks, n as u64).holds(), "D{n} k={k}");
            }
        }
    }
}

#[test]
fn printed_k_set_undercounts() {
    // D3, k = 5, ℓ = 1: the all-(−1) tuple satisfies 5 − 10 ≡ 1 mod 6 but fails r ≻ −r.
    assert_eq!(k_set(3, 5, 1).len(), 11);
    assert_eq!(k_set_as_printed(3, 5, 1).len(), 10);
    assert_eq!(walk_mults("D3", 5)["1"], 11);
    assert_eq!(wrapped_binomial(5, a_ell(6, 5, 1).unwrap(), 3), 11);
    // Within k ≤ 2n − 1 and the middle range the two readings agree.
    assert_eq!(k_set(5, 4, 2), k_set_as_printed(5, 4, 2));
}

#[test]
fn dihedral_central_elements() {
    for (n, k) in [(3u32, 4usize), (4, 4), (5, 4), (3, 5)] {
        let basis = realize_all(&dihedral_basis(n, k).unwrap());
        let central = dihedral_central_basis(n, k).unwrap();
        assert_eq!(central.len(), walk_mults(&format!("D{n}"), k).len());
        assert!(central_idempotents_check(&central, &basis), "D{n} k={k}");
    }
}

#[test]
fn dihedral_modules_examples() {
    assert_eq!(dihedral_module_basis(5, 4, "0'").unwrap().dim(), 3);
    assert_eq!(dihedral_module_basis(5, 4, "2").unwrap().dim(), 4);
    assert_eq!(dihedral_module_basis(5, 4, "4").unwrap().dim(), 1);
    assert!(dihedral_module_basis(5, 4, "1").is_err());
}

#[test]
fn dihedral_modules_on_grid() {
    for (n, k) in [(2u32, 3usize), (3, 4), (3, 5), (4, 4), (5, 4), (5, 5)] {
        let spec = SubgroupSpec::dihedral(n);
        let basis = realize_all(&dihedral_basis(n, k).unwrap());
        let blocks = dihedral_matrix_unit_basis(n, k).unwrap();
        let gens: Vec<SparseEndo> = generators(&spec).unwrap().iter().map(|g| group_action(&g.matrix, k)).collect();
        let mults = walk_mults(&format!("D{n}"), k);
        let mut total = 0;
        for (node, mult) in &mults {
            let m = dihedral_module_basis(n, k, node).unwrap();
            assert_eq!(m.dim(), *mult, "D{n} k={k} {node}");
            assert!(m.is_independent());
            assert!(m.invariant_under(&basis));
            assert!(module_action_check(&blocks, &m), "D{n} k={k} {node}");
            // Every vector lies in the isotypic component of its node.
            let proj = character_projector(&spec, node, k).unwrap();
            for v in &m.vectors {
                let pv: BTreeMap<usize, CycloNum> = proj.apply(v);
                let v_embedded: BTreeMap<usize, CycloNum> =
                    v.iter().map(|(i, x)| (*i, x.embed_into(pv.values().next().unwrap().conductor()).unwrap())).collect();
                assert_eq!(pv, v_embedded, "D{n} k={k} {node}");
            }
            let (ell, _) = parse_dihedral_label(n, node).unwrap();
            let one_dim = ell == 0 || ell == n;
            // One-dimensional nodes give G-stable lines; two-dimensional ones are only g-stable.
            assert_eq!(m.invariant_under(&gens), one_dim, "D{n} k={k} {node}");
            assert!(m.invariant_under(&gens[..1]));
            if !one_dim {
                assert!(standard_basis_check(n, k, ell).unwrap());
            }
            total += if one_dim { 1 } else { 2 } * m.dim();
        }
        assert_eq!(total, 1 << k);
    }
}

#[test]
fn dinfty() {
    for k in 1..=8 {
        assert_eq!(dinfty_basis(k).unwrap().len(), binom(2 * k - 1, k));
        let dims = dinfty_module_dims(k);
        let mults = walk_mults("Dinf", k);
        let dims_usize: BTreeMap<String, usize> = dims.iter().map(|(l, d)| (l.clone(), *d as usize)).collect();
        assert_eq!(dims_usize, mults, "k={k}");
        let blocks = dinfty_matrix_units(k).unwrap();
        let sizes: BTreeMap<String, usize> = blocks.iter().map(|b| (b.node.clone(), b.size)).collect();
        assert_eq!(sizes, mults);
    }
    assert_eq!(dinfty_module_dims(5)["1"], 10);
    let two = dinfty_module_dims(2);
    assert_eq!((two["2"], two["0"], two["0'"]), (1, 1, 1));
    for k in 1..=5 {
        let report = dinfty_iso_check(k).unwrap();
        assert!(report.holds(), "k={k}: {report:?}");
        let blocks = dinfty_matrix_units(k).unwrap();
        assert!(matrix_unit_table_check(&blocks, 5).holds());
    }
}

#[test]
fn labels_serialize() {
    let l = &cyclic_basis(3, 2).unwrap()[0];
    let json = serde_json::to_value(l).unwrap();
    assert_eq!(json["family"], "cyclic");
    assert_eq!(json["row"], serde_json::json!([1, 1]));
    let m = dihedral_module_basis(5, 4, "0").unwrap().to_json();
    assert_eq!(m.dim, 3);
    let _unused: BigUint = BigUint::from(0u8);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cyclic_units_multiply_as_matrix_units(n in 1u32..=8, k in 1usize..=4, a in any::<usize>(), b in any::<usize>()) {
            let labels = cyclic_basis(n, k).unwrap();
            let (x, y) = (&labels[a % labels.len()], &labels[b % labels.len()]);
            let product = x.realize().mul(&y.realize());
            if x.col == y.row {
                let expected = labels.iter().find(|l| l.row == x.row && l.col == y.col);
                prop_assert!(expected.is_some());
                prop_assert_eq!(product, expected.unwrap().realize());
            } else {
                prop_assert!(product.is_zero());
            }
            for g in generators(&SubgroupSpec::cyclic(n)).unwrap() {
                prop_assert!(x.realize().commutes_with(&group_action(&g.matrix, k)));
            }
        }

        #[test]
        fn dihedral_units_commute_with_the_group(n in 2u32..=6, k in 1usize..=4, a in any::<usize>()) {
            let labels = dihedral_basis(n, k).unwrap();
            let x = labels[a % labels.len()].realize();
            for g in generators(&SubgroupSpec::dihedral(n)).unwrap() {
                prop_assert!(x.commutes_with(&group_action(&g.matrix, k)));
            }
        }
    }
}
