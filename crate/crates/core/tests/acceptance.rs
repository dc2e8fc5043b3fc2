//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest harness so
//! the lines are always printed; the process exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use mckay_core::bratteli::{bimodule_identity_check, dim_centralizer_walks, multiplicities};
use mckay_core::diagrams::{enumerate_diagrams, DiagramFamily, TwoRowDiagram};
use mckay_core::dimforms::{dim_cyclic, dim_exceptional, exceptional_numerator, lucas, node_recursion_check, Exceptional};
use mckay_core::groups::SubgroupSpec;
use mckay_core::linalg::algebra_closure;
use mckay_core::matrix_units::{
    cyclic_basis, cyclic_module_basis, dihedral_basis, dihedral_matrix_unit_basis, dinfty_basis, dinfty_iso_check,
    matrix_unit_table_check, planar_rook_iso_check, planar_rook_units, MatrixUnitLabel,
};
use mckay_core::repgraph::build_graph;
use mckay_core::tensor_endo::{commutant_basis, tl_generator, SignTuple, SparseEndo};
use mckay_core::tl_idem::{
    branch_idempotent_chain, jones_wenzl_suite, symmetric_projection_check, tl_relations, verify_chain,
    verify_relation_suite,
};
use mckay_core::verify::conditional_expectation_suite;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(s: &str) -> SubgroupSpec {
    SubgroupSpec::parse(s).expect("valid selector")
}

fn walks(sel: &str, k: usize) -> BigUint {
    let s = spec(sel);
    let depth = if s.is_finite() { None } else { Some(k) };
    dim_centralizer_walks(&build_graph(&s, depth).unwrap(), k).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

/// Binomial coefficient by the multiplicative formula over u128.
fn choose(n: u64, r: u64) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn criterion_1() -> Outcome {
    let (a, ta) = timed(|| dim_cyclic(8, 6).unwrap());
    let (b, tb) = timed(|| walks("C8", 6));
    let (c, tc) = timed(|| cyclic_basis(8, 6).unwrap().len());
    let (d, td) = timed(|| commutant_basis(&spec("C8"), 6).unwrap().len());
    let target = BigUint::from(1056u32);
    ensure(a == target && b == target && c == 1056 && d == 1056, || format!("formula {a}, walks {b}, basis {c}, commutant {d}"))?;
    ensure(td < Duration::from_secs(10), || format!("commutant took {td:?}"))?;
    let fast = Duration::from_millis(100);
    ensure(ta < fast && tb < fast && tc < fast, || format!("closed routes took {ta:?}, {tb:?}, {tc:?}"))?;
    Ok(format!("1056 by formula, walks, basis and commutant (commutant {td:?})"))
}

fn criterion_2() -> Outcome {
    let expect = [(0u32, 20usize), (2, 16), (4, 12), (6, 16)];
    let mults = multiplicities(&build_graph(&spec("C8"), None).unwrap(), 6).unwrap();
    let mut squares = 0;
    for (ell, dim) in expect {
        let module = cyclic_module_basis(8, 6, ell).map_err(|e| e.to_string())?;
        ensure(module.dim() == dim && module.is_independent(), || format!("module {ell} has dim {}", module.dim()))?;
        let m = mults.get(6, &ell.to_string()).unwrap();
        ensure(m == BigUint::from(dim), || format!("walk multiplicity of {ell} is {m}"))?;
        squares += dim * dim;
    }
    ensure(squares == 1056, || format!("sum of squares {squares}"))?;
    Ok("(20, 16, 12, 16), sum of squares 1056".into())
}

fn block_check(n: u32, expect: &[(&str, usize)], total: usize) -> Result<String, String> {
    let basis = dihedral_basis(n, 4).map_err(|e| e.to_string())?;
    ensure(basis.len() == total, || format!("D{n}: basis has {} elements", basis.len()))?;
    let blocks = dihedral_matrix_unit_basis(n, 4).map_err(|e| e.to_string())?;
    let sizes: Vec<(String, usize)> = blocks.iter().map(|b| (b.node.clone(), b.size)).collect();
    let want: Vec<(String, usize)> = expect.iter().map(|(a, b)| (a.to_string(), *b)).collect();
    ensure(sizes == want, || format!("D{n}: blocks {sizes:?}"))?;
    let table = matrix_unit_table_check(&blocks, 1);
    let all_pairs: usize = {
        let sq: usize = blocks.iter().map(|b| b.size * b.size).sum();
        sq * sq
    };
    ensure(table.holds() && table.products_checked == all_pairs, || format!("D{n}: table {table:?}, expected {all_pairs} products"))?;
    Ok(format!("D{n}: {total} = {:?}, {all_pairs} products", sizes.iter().map(|s| s.1).collect::<Vec<_>>()))
}

fn criterion_3() -> Outcome {
    let a = block_check(5, &[("0", 3), ("0'", 3), ("2", 4), ("4", 1)], 35)?;
    let b = block_check(4, &[("0", 3), ("0'", 3), ("2", 4), ("4", 1), ("4'", 1)], 36)?;
    Ok(format!("{a}; {b}"))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    // Independent Lucas oracle: L_m = F_{m-1} + F_{m+1} with Fibonacci numbers.
    let mut fib = vec![BigUint::zero(), BigUint::from(1u32)];
    for i in 2..40 {
        let next = &fib[i - 1] + &fib[i - 2];
        fib.push(next);
    }
    for m in 1..38 {
        ensure(lucas(m) == &fib[m - 1] + &fib[m + 1], || format!("L_{m}"))?;
        ensure(lucas(m + 1) == lucas(m) + lucas(m - 1), || format!("Lucas recurrence at {m}"))?;
    }
    for which in Exceptional::ALL {
        let g = build_graph(&which.spec(), None).unwrap();
        for k in 1..=14 {
            ensure((exceptional_numerator(which, k) % which.denominator()).is_zero(), || format!("{which:?} k={k} divisibility"))?;
            let f = dim_exceptional(which, k).map_err(|e| e.to_string())?;
            let w = dim_centralizer_walks(&g, k).unwrap();
            ensure(f == w, || format!("{which:?} k={k}: formula {f}, walks {w}"))?;
            if k >= 2 {
                let r = node_recursion_check(which, k).map_err(|e| e.to_string())?;
                ensure(r.holds(), || format!("{which:?} k={k}: recursion fails at {:?}", r.failures))?;
            }
        }
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("T, O, I for k = 1..14 with per-node recursion ({el:?})"))
}

fn criterion_5() -> Outcome {
    let mut catalan = vec![BigUint::from(1u32)];
    for n in 0..14 {
        let next: BigUint = (0..=n).map(|i| &catalan[i] * &catalan[n - i]).sum();
        catalan.push(next);
    }
    for k in 1..=14 {
        let w = walks("SU2", k);
        ensure(w == catalan[k], || format!("k={k}: walks {w}, Catalan {}", catalan[k]))?;
    }
    for k in 1..=7 {
        let mut checks = Vec::new();
        tl_relations(k, &mut checks);
        ensure(checks.iter().all(|c| c.holds()), || format!("TL relations fail at k={k}"))?;
    }
    for k in 1..=6 {
        let gens: Vec<SparseEndo> = (1..k).map(|i| tl_generator(k, i).unwrap()).collect();
        let dim = if gens.is_empty() { 1 } else { algebra_closure(k, 1, &gens, None).dim() };
        ensure(BigUint::from(dim) == catalan[k], || format!("TL span at k={k} has dim {dim}"))?;
    }
    Ok("Catalan for k <= 14, TL relations for k <= 7, TL span = Catalan for k <= 6".into())
}

fn criterion_6() -> Outcome {
    let mut total = 0;
    for k in 1..=7 {
        let r = jones_wenzl_suite(k).map_err(|e| e.to_string())?;
        ensure(r.all_pass(), || format!("k={k}: {:?}", r.failures().iter().map(|c| &c.id).collect::<Vec<_>>()))?;
        total += r.checks.len();
        let s = symmetric_projection_check(k).map_err(|e| e.to_string())?;
        ensure(s.holds && s.trace == (k + 1).to_string(), || format!("k={k}: symmetric projection {s:?}"))?;
    }
    Ok(format!("{total} JW checks for k <= 7; f_k fixes w_t with trace k+1"))
}

fn criterion_7() -> Outcome {
    let mut total = 0;
    for sel in ["D3", "C5"] {
        for k in 1..=5 {
            let r = conditional_expectation_suite(&spec(sel), k, 100, 1000 + k as u64).map_err(|e| e.to_string())?;
            ensure(r.all_pass(), || format!("{sel} k={k}: {:?}", r.failures().iter().map(|c| &c.id).collect::<Vec<_>>()))?;
            ensure(k < 2 || r.checks.iter().any(|c| c.id.starts_with("compression.identity")), || "no compression checks".into())?;
            total += r.checks.len();
        }
    }
    Ok(format!("{total} exact checks on 100 seeded elements per (group, k)"))
}

fn criterion_8() -> Outcome {
    let groups = ["T", "O", "I", "D2", "D3", "D4", "D5", "C3", "C4", "C5", "C6", "C7", "C8"];
    let mut total = 0;
    for sel in groups {
        let chain = branch_idempotent_chain(&spec(sel), usize::MAX).map_err(|e| e.to_string())?;
        let r = verify_chain(&chain).map_err(|e| e.to_string())?;
        ensure(r.all_pass(), || format!("{sel}: {:?}", r.failures().iter().map(|c| &c.id).collect::<Vec<_>>()))?;
        total += r.checks.len();
    }
    let r = verify_relation_suite(&spec("O"), 4).map_err(|e| e.to_string())?;
    let branch = r.find("tower.branch[4+]");
    ensure(branch.len() == 1 && branch[0].holds() && branch[0].lhs == "15", || format!("O: {branch:?}"))?;
    ensure(r.all_pass(), || format!("O k=4: {:?}", r.failures().iter().map(|c| &c.id).collect::<Vec<_>>()))?;
    Ok(format!("{total} chain checks over {} groups; Z_4(O) = <Z_3, e_3, f_(4+)> of dim 15", groups.len()))
}

fn criterion_9() -> Outcome {
    let mut sels: Vec<String> = (1..=12).map(|n| format!("C{n}")).collect();
    sels.extend((2..=12).map(|n| format!("D{n}")));
    sels.extend(["T", "O", "I"].map(String::from));
    for sel in &sels {
        let g = build_graph(&spec(sel), None).unwrap();
        let table = multiplicities(&g, 28).unwrap();
        for k in 1..=14 {
            let b = bimodule_identity_check(&g, k).map_err(|e| e.to_string())?;
            ensure(b.holds, || format!("{sel} k={k}: {} vs {}", b.lhs, b.rhs))?;
            let weighted = table.weighted_sum(k);
            ensure(weighted == BigUint::from(1u8) << k, || format!("{sel} k={k}: weighted sum {weighted}"))?;
            let closed = table.get(2 * k, "0").unwrap();
            ensure(table.sum_of_squares(k) == closed, || format!("{sel} k={k}: squares vs closed walks"))?;
        }
    }
    Ok(format!("{} groups, k <= 14", sels.len()))
}

fn tuple(s: &[i64]) -> SignTuple {
    SignTuple::parse(s).unwrap()
}

fn criterion_10() -> Outcome {
    let pair = |r: &[i64], s: &[i64], fam, n| TwoRowDiagram::from_pair(&tuple(r), &tuple(s), fam, n).unwrap();
    let cyc = DiagramFamily::Cyclic;
    let c1 = pair(&[-1, -1, 1, -1, -1, 1, 1, -1], &[1, -1, -1, -1, 1, -1, 1, -1], cyc, 3);
    let c2 = pair(&[1, -1, -1, -1, 1, -1, 1, -1], &[1, 1, -1, 1, 1, -1, 1, 1], cyc, 3);
    let c3 = pair(&[-1, -1, 1, -1, -1, 1, 1, -1], &[1, 1, -1, 1, 1, -1, 1, 1], cyc, 3);
    ensure(c1.multiply(&c2).map_err(|e| e.to_string())? == Some(c3), || "cyclic worked product".into())?;
    let dih = DiagramFamily::Dihedral;
    let d1 = pair(&[-1, -1, 1, -1, -1, 1, 1, -1], &[1, -1, -1, -1, 1, -1, 1, -1], dih, 3);
    let d2 = pair(&[-1, 1, 1, 1, -1, 1, -1, 1], &[-1, -1, 1, -1, -1, 1, -1, -1], dih, 3);
    let d3 = pair(&[-1, -1, 1, -1, -1, 1, 1, -1], &[1, 1, -1, 1, 1, -1, 1, 1], dih, 3);
    ensure(d1.multiply(&d2).map_err(|e| e.to_string())? == Some(d3), || "dihedral worked product".into())?;
    ensure(d1.action().mul(&d2.action()) == d3.action(), || "dihedral product action".into())?;

    let all = enumerate_diagrams(dih, 4, 4).map_err(|e| e.to_string())?;
    let mut shapes: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    for d in &all {
        *shapes.entry(d.shape()).or_default() += 1;
    }
    let mut counts: Vec<usize> = shapes.values().copied().collect();
    counts.sort();
    ensure(counts == [1, 1, 16, 18], || format!("D4 k=4 shapes {shapes:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cache: BTreeMap<(DiagramFamily, u32, usize), (Vec<TwoRowDiagram>, BTreeMap<(usize, usize), MatrixUnitLabel>)> = BTreeMap::new();
    for trial in 0..200 {
        let family = if trial % 2 == 0 { cyc } else { dih };
        let n = rng.gen_range(2..=8u32);
        let k = rng.gen_range(1..=6usize);
        let (diagrams, units) = cache.entry((family, n, k)).or_insert_with(|| {
            let labels = if family == cyc { cyclic_basis(n, k) } else { dihedral_basis(n, k) }.unwrap();
            let units = labels.into_iter().map(|l| ((l.row_index(), l.col_index()), l)).collect();
            (enumerate_diagrams(family, n, k).unwrap(), units)
        });
        let d = diagrams[rng.gen_range(0..diagrams.len())];
        let (r, s) = d.pair();
        let unit = units.get(&(r.to_index(), s.to_index())).ok_or_else(|| format!("no unit for {d:?}"))?;
        ensure(d.action() == unit.realize(), || format!("action mismatch for {d:?}"))?;
    }
    Ok("both worked products, D4 k=4 = 1+1+16+18, 200 random actions".into())
}

fn criterion_11() -> Outcome {
    for k in 1..=4 {
        let r = planar_rook_iso_check(k).map_err(|e| e.to_string())?;
        ensure(r.holds() && r.products_checked == r.basis_size * r.basis_size, || format!("k={k}: {r:?}"))?;
    }
    for k in 1..=7usize {
        let n = planar_rook_units(k).map_err(|e| e.to_string())?.len() as u128;
        ensure(n == choose(2 * k as u64, k as u64), || format!("C_inf k={k}: {n}"))?;
        ensure(walks("Cinf", k).to_u128() == Some(n), || format!("C_inf walks k={k}"))?;
        let m = dinfty_basis(k).map_err(|e| e.to_string())?.len() as u128;
        ensure(m == choose(2 * k as u64 - 1, k as u64), || format!("D_inf k={k}: {m}"))?;
        ensure(walks("Dinf", k).to_u128() == Some(m), || format!("D_inf walks k={k}"))?;
    }
    for k in [3, 4] {
        let r = dinfty_iso_check(k).map_err(|e| e.to_string())?;
        ensure(r.holds(), || format!("D_inf correspondence k={k}: {r:?}"))?;
        ensure(r.basis_size as u128 == choose(2 * k as u64 - 1, k as u64), || format!("D_inf basis k={k}"))?;
    }
    Ok("rook isomorphism for k <= 4, C(2k,k) and C(2k-1,k), D_inf correspondence at k = 3, 4".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("dim Z_6(C_8) = 1056 by four routes", criterion_1),
        ("module dims of Z_6(C_8)", criterion_2),
        ("D_5 and D_4 blocks with full matrix-unit tables", criterion_3),
        ("exceptional closed forms against walks", criterion_4),
        ("Catalan dimensions and Temperley-Lieb relations", criterion_5),
        ("Jones-Wenzl suite", criterion_6),
        ("conditional expectation and compression", criterion_7),
        ("branch idempotent chains", criterion_8),
        ("bimodule identity and closed walks", criterion_9),
        ("diagram calculus", criterion_10),
        ("planar rook isomorphism and D_inf", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (outcome, el) = timed(f);
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail} [{el:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why} [{el:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
