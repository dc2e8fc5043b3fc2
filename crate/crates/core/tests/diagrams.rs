use std::collections::{BTreeMap, BTreeSet};

use mckay_core::bratteli::dim_centralizer_walks;
use mckay_core::diagrams::*;
use mckay_core::groups::SubgroupSpec;
use mckay_core::matrix_units::{cyclic_basis, dihedral_basis, MatrixUnitLabel};
use mckay_core::repgraph::build_graph;
use mckay_core::tensor_endo::SignTuple;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tuple(s: &[i64]) -> SignTuple {
    SignTuple::parse(s).unwrap()
}

fn walk_dim(sel: &str, k: usize) -> usize {
    let g = build_graph(&SubgroupSpec::parse(sel).unwrap(), None).unwrap();
    dim_centralizer_walks(&g, k).unwrap().to_usize().unwrap()
}

#[test]
fn cyclic_k12_example() {
    let r = tuple(&[-1, -1, 1, -1, -1, 1, 1, 1, 1, 1, 1, -1]);
    let s = tuple(&[1, -1, -1, -1, -1, -1, 1, -1, -1, 1, -1, 1]);
    let d = TwoRowDiagram::from_pair(&r, &s, DiagramFamily::Cyclic, 6).unwrap();
    assert_eq!(d.top_block(), [1, 2, 4, 5, 12]);
    assert_eq!(d.bottom_block(), [2, 3, 4, 5, 6, 8, 9, 11]);
    assert_eq!((d.top_block().len() % 3, d.bottom_block().len() % 3), (2, 2));
}

#[test]
fn cyclic_worked_product() {
    let d1 = TwoRowDiagram::from_pair(
        &tuple(&[-1, -1, 1, -1, -1, 1, 1, -1]),
        &tuple(&[1, -1, -1, -1, 1, -1, 1, -1]),
        DiagramFamily::Cyclic,
        3,
    )
    .unwrap();
    let d2 = TwoRowDiagram::from_pair(
        &tuple(&[1, -1, -1, -1, 1, -1, 1, -1]),
        &tuple(&[1, 1, -1, 1, 1, -1, 1, 1]),
        DiagramFamily::Cyclic,
        3,
    )
    .unwrap();
    let d3 = TwoRowDiagram::from_pair(
        &tuple(&[-1, -1, 1, -1, -1, 1, 1, -1]),
        &tuple(&[1, 1, -1, 1, 1, -1, 1, 1]),
        DiagramFamily::Cyclic,
        3,
    )
    .unwrap();
    assert_eq!(d1.multiply(&d2).unwrap(), Some(d3));
    assert_eq!(d2.multiply(&d1).unwrap(), None);
    assert_eq!(d1.action().mul(&d2.action()), d3.action());
}

fn dihedral_example() -> TwoRowDiagram {
    TwoRowDiagram::from_pair(
        &tuple(&[-1, -1, 1, -1, -1, 1, 1, -1]),
        &tuple(&[1, -1, -1, -1, 1, -1, 1, -1]),
        DiagramFamily::Dihedral,
        3,
    )
    .unwrap()
}

#[test]
fn dihedral_example_partition() {
    let d = dihedral_example();
    let blocks: Vec<Vec<String>> = d.blocks().iter().map(|b| b.iter().map(Vertex::to_string).collect()).collect();
    let as_sets: BTreeSet<BTreeSet<String>> = blocks.into_iter().map(|b| b.into_iter().collect()).collect();
    let expect: BTreeSet<BTreeSet<String>> = [
        vec!["1", "2", "4", "5", "8", "2'", "3'", "4'", "6'", "8'"],
        vec!["3", "6", "7", "1'", "5'", "7'"],
    ]
    .into_iter()
    .map(|b| b.into_iter().map(String::from).collect())
    .collect();
    assert_eq!(as_sets, expect);

    let swapped = TwoRowDiagram::from_pair(
        &tuple(&[1, 1, -1, 1, 1, -1, -1, 1]),
        &tuple(&[-1, 1, 1, 1, -1, 1, -1, 1]),
        DiagramFamily::Dihedral,
        3,
    )
    .unwrap();
    assert_eq!(swapped, d);
}

#[test]
fn dihedral_example_action() {
    let d = dihedral_example();
    let a = d.action();
    // v_a⊗v_b⊗v_b⊗v_b⊗v_a⊗v_b⊗v_a⊗v_b ↦ v_b⊗v_b⊗v_a⊗v_b⊗v_b⊗v_a⊗v_a⊗v_b for {a, b} = {±1}.
    let pattern_in = [0, 1, 1, 1, 0, 1, 0, 1];
    let pattern_out = [1, 1, 0, 1, 1, 0, 0, 1];
    let mut expected = Vec::new();
    for (a_sign, b_sign) in [(1i64, -1i64), (-1, 1)] {
        let pick = |p: &[usize]| tuple(&p.iter().map(|&x| if x == 0 { a_sign } else { b_sign }).collect::<Vec<_>>());
        expected.push((pick(&pattern_out).to_index(), pick(&pattern_in).to_index()));
    }
    let got: Vec<(usize, usize)> = a.entries().map(|(r, c, v)| {
        assert!(v.is_one());
        (r, c)
    }).collect();
    let got: BTreeSet<_> = got.into_iter().collect();
    assert_eq!(got, expected.into_iter().collect());
}

#[test]
fn dihedral_worked_product() {
    let d1 = dihedral_example();
    let d2 = TwoRowDiagram::from_pair(
        &tuple(&[-1, 1, 1, 1, -1, 1, -1, 1]),
        &tuple(&[-1, -1, 1, -1, -1, 1, -1, -1]),
        DiagramFamily::Dihedral,
        3,
    )
    .unwrap();
    let d3 = TwoRowDiagram::from_pair(
        &tuple(&[-1, -1, 1, -1, -1, 1, 1, -1]),
        &tuple(&[1, 1, -1, 1, 1, -1, 1, 1]),
        DiagramFamily::Dihedral,
        3,
    )
    .unwrap();
    assert_eq!(d1.multiply(&d2).unwrap(), Some(d3));
    assert_eq!(d1.action().mul(&d2.action()), d3.action());
    let other = TwoRowDiagram::from_pair(&tuple(&[1; 8]), &tuple(&[1; 8]), DiagramFamily::Dihedral, 3).unwrap();
    assert_eq!(d1.multiply(&other).unwrap(), None);
}

#[test]
fn dihedral_d4_k4_shapes() {
    let all = enumerate_diagrams(DiagramFamily::Dihedral, 4, 4).unwrap();
    assert_eq!(all.len(), 36);
    let mut shapes: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    for d in &all {
        *shapes.entry(d.shape()).or_default() += 1;
    }
    assert_eq!(shapes[&vec![(4, 4)]], 1);
    assert_eq!(shapes[&vec![(0, 4), (4, 0)]], 1);
    assert_eq!(shapes[&vec![(1, 1), (3, 3)]], 16);
    assert_eq!(shapes[&vec![(2, 2), (2, 2)]], 18);
    assert_eq!(shapes.len(), 4);
}

#[test]
fn cyclic_c8_k6_count() {
    assert_eq!(enumerate_diagrams(DiagramFamily::Cyclic, 8, 6).unwrap().len(), 1056);
}

#[test]
fn actions_match_bases_on_grid() {
    for n in 1..=6u32 {
        for k in 1..=4 {
            let diagrams = enumerate_diagrams(DiagramFamily::Cyclic, n, k).unwrap();
            assert_eq!(diagrams.len(), walk_dim(&format!("C{n}"), k));
            let from_diagrams: BTreeSet<String> = diagrams.iter().map(|d| d.action().fingerprint()).collect();
            let from_units: BTreeSet<String> =
                cyclic_basis(n, k).unwrap().iter().map(|l| l.realize().fingerprint()).collect();
            assert_eq!(from_diagrams.len(), diagrams.len());
            assert_eq!(from_diagrams, from_units, "C{n} k={k}");
        }
    }
    for n in 2..=5u32 {
        for k in 1..=5 {
            let diagrams = enumerate_diagrams(DiagramFamily::Dihedral, n, k).unwrap();
            assert_eq!(diagrams.len(), walk_dim(&format!("D{n}"), k));
            let from_diagrams: BTreeSet<String> = diagrams.iter().map(|d| d.action().fingerprint()).collect();
            let from_units: BTreeSet<String> =
                dihedral_basis(n, k).unwrap().iter().map(|l| l.realize().fingerprint()).collect();
            assert_eq!(from_diagrams.len(), diagrams.len());
            assert_eq!(from_diagrams, from_units, "D{n} k={k}");
        }
    }
}

#[test]
fn random_dihedral_action_is_pair_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let labels = dihedral_basis(3, 5).unwrap();
    for _ in 0..40 {
        let l: &MatrixUnitLabel = &labels[rng.gen_range(0..labels.len())];
        let d = TwoRowDiagram::from_pair(&l.row, &l.col, DiagramFamily::Dihedral, 3).unwrap();
        assert_eq!(d.action(), l.realize());
    }
}

#[test]
fn multiplication_matches_action_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (family, n, k) in [(DiagramFamily::Cyclic, 6u32, 4usize), (DiagramFamily::Dihedral, 3, 4), (DiagramFamily::Dihedral, 2, 5)] {
        let all = enumerate_diagrams(family, n, k).unwrap();
        let pick = |rng: &mut ChaCha8Rng| all[rng.gen_range(0..all.len())];
        for trial in 0..150 {
            let a = pick(&mut rng);
            // Bias toward composable pairs so nonzero products are exercised.
            let b = if trial % 2 == 0 {
                let candidates: Vec<&TwoRowDiagram> = all.iter().filter(|d| a.multiply(d).unwrap().is_some()).collect();
                *candidates[rng.gen_range(0..candidates.len())]
            } else {
                pick(&mut rng)
            };
            let c = pick(&mut rng);
            let ab = a.multiply(&b).unwrap();
            let act = |d: Option<TwoRowDiagram>| d.map(|d| d.action()).unwrap_or_else(|| mckay_core::tensor_endo::SparseEndo::zero(k, 1));
            assert_eq!(act(ab), a.action().mul(&b.action()));
            let left = ab.and_then(|x| x.multiply(&c).unwrap());
            let right = b.multiply(&c).unwrap().and_then(|x| a.multiply(&x).unwrap());
            assert_eq!(left, right);
        }
    }
}

#[test]
fn json_round_trip() {
    let d = dihedral_example();
    let j = d.to_json();
    let text = serde_json::to_string(&j).unwrap();
    assert!(text.contains("\"family\":\"dihedral\""));
    let back: DiagramJson = serde_json::from_str(&text).unwrap();
    assert_eq!(TwoRowDiagram::from_json(&back).unwrap(), d);
    assert!(d.render_ascii().lines().count() == 3);
}

mod properties {
    use super::*;
    use mckay_core::groups::generators;
    use mckay_core::tensor_endo::{group_action, SparseEndo};
    use proptest::prelude::*;

    fn case() -> impl Strategy<Value = (DiagramFamily, u32, usize, usize, usize)> {
        (prop_oneof![Just(DiagramFamily::Cyclic), Just(DiagramFamily::Dihedral)], 2u32..=6, 1usize..=4, any::<usize>(), any::<usize>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn diagrams_lie_in_the_centralizer((family, n, k, a, _) in case()) {
            let all = enumerate_diagrams(family, n, k).unwrap();
            let d = all[a % all.len()];
            let sel = match family {
                DiagramFamily::Cyclic => format!("C{n}"),
                DiagramFamily::Dihedral => format!("D{n}"),
            };
            for g in generators(&SubgroupSpec::parse(&sel).unwrap()).unwrap() {
                prop_assert!(d.action().commutes_with(&group_action(&g.matrix, k)));
            }
            let back = TwoRowDiagram::from_json(&serde_json::from_str(&serde_json::to_string(&d.to_json()).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(back, d);
            let (r, s) = d.pair();
            prop_assert_eq!(TwoRowDiagram::from_pair(&r, &s, family, n).unwrap(), d);
        }

        #[test]
        fn product_is_the_operator_product((family, n, k, a, b) in case()) {
            let all = enumerate_diagrams(family, n, k).unwrap();
            let (x, y) = (all[a % all.len()], all[b % all.len()]);
            let product = x.multiply(&y).unwrap().map(|d| d.action()).unwrap_or_else(|| SparseEndo::zero(k, 1));
            prop_assert_eq!(product, x.action().mul(&y.action()));
        }
    }
}
