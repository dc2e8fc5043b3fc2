use mckay_core::bratteli::{dim_centralizer_walks, multiplicities};
use mckay_core::dimforms::*;
use mckay_core::groups::SubgroupSpec;
use mckay_core::repgraph::build_graph;
use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

fn b(x: u64) -> BigUint {
    BigUint::from(x)
}

#[test]
fn truncated_binomial_examples() {
    assert_eq!(binomial_sum_mod(6, 4, 3).unwrap(), b(20));
    assert_eq!(binomial_sum_mod(6, 4, 1).unwrap(), b(12));
    for k in 0..20 {
        assert_eq!(binomial_sum_mod(k, 1, 0).unwrap(), b(1 << k));
    }
    assert!(binomial_sum_mod(6, 4, 4).is_err());
    assert!(binomial_sum_mod(6, 0, 0).is_err());
}

#[test]
fn family_dimension_examples() {
    assert_eq!(dim_cyclic(8, 6).unwrap(), b(1056));
    assert_eq!(dim_dihedral(4, 4).unwrap(), b(36));
    assert_eq!(dim_dihedral(5, 4).unwrap(), b(35));
    for n in 1..=12u32 {
        let nt = if n % 2 == 0 { n / 2 } else { n } as usize;
        assert_eq!(dim_cyclic(n, nt).unwrap(), binomial(2 * nt, nt) + b(2), "C{n}");
    }
    assert_eq!(dim_cinf(4).unwrap(), b(70));
    assert_eq!(dim_dinf(4).unwrap(), b(35));
}

#[test]
fn lucas_values() {
    // Independent oracle: the closed form L_m = φ^m + ψ^m rounds to the nearest integer.
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    for m in 0..30 {
        let approx = (phi.powi(m as i32) + (1.0 - phi).powi(m as i32)).round() as u64;
        assert_eq!(lucas(m), b(approx), "L_{m}");
    }
    assert_eq!(lucas(12), b(322));
    assert_eq!(lucas(6), b(18));
}

#[test]
fn exceptional_examples() {
    assert_eq!(dim_exceptional(Exceptional::T, 4).unwrap(), b(22));
    assert_eq!(dim_exceptional(Exceptional::O, 4).unwrap(), b(15));
    assert_eq!(dim_exceptional(Exceptional::I, 6).unwrap(), b(133));
    assert_eq!(dim_exceptional(Exceptional::I, 3).unwrap(), b(5));
}

#[test]
fn exceptional_divisibility_to_64() {
    for which in Exceptional::ALL {
        for k in 1..=64 {
            let num = exceptional_numerator(which, k);
            assert!((num % which.denominator()).is_zero(), "{which:?} k={k}");
        }
    }
}

#[test]
fn exceptional_totals_match_walks() {
    for which in Exceptional::ALL {
        let g = build_graph(&which.spec(), None).unwrap();
        for k in 1..=14 {
            assert_eq!(dim_exceptional(which, k).unwrap(), dim_centralizer_walks(&g, k).unwrap(), "{which:?} k={k}");
        }
    }
}

#[test]
fn per_node_forms_match_walks() {
    for which in Exceptional::ALL {
        let g = build_graph(&which.spec(), None).unwrap();
        let table = multiplicities(&g, 14).unwrap();
        for k in 1..=14 {
            let level = closed_form_level(which, k).unwrap();
            let walks = table.level_map(k);
            for (lab, m) in &walks {
                assert_eq!(level.get(lab), Some(m), "{which:?} k={k} node {lab}");
            }
            for (lab, v) in &level {
                assert_eq!(walks.get(lab).cloned().unwrap_or_default(), *v, "{which:?} k={k} node {lab}");
            }
        }
    }
}

#[test]
fn per_node_examples() {
    let n = 3usize;
    let t = irr_dim_exceptional(Exceptional::T, 2 * n, "2").unwrap();
    assert_eq!(t.value, b(3 * 4u64.pow(n as u32) / 12));
    assert_eq!(t.source, IrrDimSource::ClosedForm);
    let o = irr_dim_exceptional(Exceptional::O, 2 * n + 1, "5").unwrap();
    assert_eq!(o.value, b((4u64.pow(n as u32 + 1) + 8 - 6 * 2u64.pow(n as u32 + 1)) / 24));
    let i = irr_dim_exceptional(Exceptional::I, 6, "4").unwrap();
    assert_eq!(i.value, b(5));
    let g = build_graph(&SubgroupSpec::icosahedral(), None).unwrap();
    assert_eq!(multiplicities(&g, 6).unwrap().get(6, "4").unwrap(), b(5));
}

#[test]
fn pre_stable_fallback_is_flagged() {
    let r = irr_dim_exceptional(Exceptional::I, 5, "5").unwrap();
    assert_eq!(r.source, IrrDimSource::PreStable);
    let g = build_graph(&SubgroupSpec::icosahedral(), None).unwrap();
    assert_eq!(r.value, multiplicities(&g, 5).unwrap().get(5, "5").unwrap());
    assert_eq!(irr_dim_exceptional(Exceptional::T, 1, "1").unwrap().source, IrrDimSource::PreStable);
    assert!(irr_dim_exceptional(Exceptional::T, 4, "1").is_err());
    assert!(irr_dim_exceptional(Exceptional::T, 4, "9").is_err());
}

#[test]
fn printed_six_minus_index_disagrees_with_walks() {
    let g = build_graph(&SubgroupSpec::icosahedral(), None).unwrap();
    let table = multiplicities(&g, 14).unwrap();
    let mut mismatches = 0;
    for k in (6..=14).step_by(2) {
        let walks = table.get(k, "6-").unwrap();
        assert_eq!(closed_form_level(Exceptional::I, k).unwrap()["6-"], walks);
        if num_bigint::BigInt::from(walks) != icosahedral_six_minus_as_printed(k) {
            mismatches += 1;
        }
    }
    assert_eq!(mismatches, 5);
}

#[test]
fn neighbour_sum_recursion() {
    for which in Exceptional::ALL {
        for k in 2..=14 {
            let r = node_recursion_check(which, k).unwrap();
            assert!(r.holds(), "{which:?} k={k}: {:?}", r.failures);
        }
    }
}

#[test]
fn formula_table_agrees_for_all_families() {
    let specs = [
        SubgroupSpec::cyclic(1),
        SubgroupSpec::cyclic(5),
        SubgroupSpec::cyclic(8),
        SubgroupSpec::cyclic(12),
        SubgroupSpec::dihedral(2),
        SubgroupSpec::dihedral(5),
        SubgroupSpec::tetrahedral(),
        SubgroupSpec::cyclic_infinite(),
        SubgroupSpec::dihedral_infinite(),
        SubgroupSpec::su2(),
    ];
    for spec in specs {
        for row in formula_table(&spec, 1..=12).unwrap() {
            assert!(row.agree, "{row:?}");
        }
    }
}

proptest! {
    #[test]
    fn binomial_routes_agree(k in 0usize..60, m in 1usize..20, r in 0usize..20) {
        let r = r % m;
        prop_assert_eq!(binomial_sum_direct(k, m, r).unwrap(), binomial_sum_poly(k, m, r).unwrap());
    }

    #[test]
    fn residue_sums_partition_power_of_two(k in 0usize..60, m in 1usize..20) {
        let total: BigUint = (0..m).map(|r| binomial_sum_mod(k, m, r).unwrap()).sum();
        prop_assert_eq!(total, BigUint::from(1u8) << k);
    }

    #[test]
    fn dihedral_is_half_cyclic(n in 2u32..20, k in 1usize..16) {
        prop_assert_eq!(dim_dihedral(n, k).unwrap() * 2u32, dim_cyclic(2 * n, k).unwrap());
    }

    #[test]
    fn cyclic_square_and_coefficient_routes_agree(n in 1u32..30, k in 1usize..25) {
        prop_assert_eq!(dim_cyclic(n, k).unwrap(), dim_cyclic_coefficient(n, k).unwrap());
    }

    #[test]
    fn lucas_recurrence(m in 0usize..200) {
        prop_assert_eq!(lucas(m + 2), lucas(m + 1) + lucas(m));
    }
}
