//! Cross-oracle harness: for every (G, k) of a grid, computes each quantity by all
//! available independent routes and records whether they agree exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bratteli::{dim_centralizer_walks, multiplicities};
use crate::cyclotomic::CycloNum;
use crate::diagrams::{enumerate_diagrams, DiagramFamily, TwoRowDiagram};
use crate::dimforms::{binomial, binomial_sum_mod, dim_formula, irr_dim_exceptional, walk_graph, Exceptional};
use crate::error::{Error, Result};
use crate::groups::{generators, n_tilde, Family, SubgroupSpec};
use crate::matrix_units::{
    a_ell, cyclic_basis, cyclic_lambda, dihedral_basis, dihedral_lambda, dinfty_basis, dinfty_module_dims, k_set,
    planar_rook_units,
};
use crate::tensor_endo::{
    commutant_basis_with_guard, compression_identity_holds, conditional_expectation, group_action, neg_index,
    tl_generator, unique_compression, SparseEndo, COMMUTANT_GUARD_EXCEPTIONAL, COMMUTANT_GUARD_MONOMIAL,
};
use crate::tl_idem::{verify_relation_suite, RelationCheck, RelationReport, Status};

/// Version of the report JSON layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Seed used for every randomized spot check unless a grid overrides it.
pub const DEFAULT_SEED: u64 = 0x5eed_2014;
/// Largest k for operator-level checks in the default grid.
pub const DEFAULT_OPERATOR_MAX_K: usize = 8;
/// Largest k for walk and closed-form checks in the default grid.
pub const DEFAULT_WALK_MAX_K: usize = 14;
/// Largest k for the relation suite in the default grid.
pub const DEFAULT_RELATION_MAX_K: usize = 5;
/// Largest k for the exceptional commutant in the default grid.
pub const DEFAULT_EXCEPTIONAL_GUARD: usize = 4;
/// Random diagrams whose action is compared with the matrix units, per case.
pub const DIAGRAM_SAMPLES: usize = 10;
/// Random elements per level in the conditional expectation spot check of a grid case.
pub const GRID_EXPECTATION_SAMPLES: usize = 5;

/// Which checks run for a case.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckMask {
    pub formula: bool,
    pub walks: bool,
    pub commutant: bool,
    pub basis: bool,
    pub modules: bool,
    pub relations: bool,
    pub diagrams: bool,
}

impl CheckMask {
    pub fn all() -> Self {
        CheckMask { formula: true, walks: true, commutant: true, basis: true, modules: true, relations: true, diagrams: true }
    }

    pub fn counting_only() -> Self {
        CheckMask { formula: true, walks: true, modules: true, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCase {
    /// Group selector such as "C8", "D5", "T", "Cinf".
    pub group: String,
    pub k: usize,
    pub checks: CheckMask,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationGrid {
    pub cases: Vec<GridCase>,
    /// Largest k handed to the commutant nullspace for cyclic and dihedral groups.
    #[serde(default = "default_guard")]
    pub solver_guard: usize,
    /// Largest k handed to the commutant nullspace for T, O and I.
    #[serde(default = "default_exceptional_guard")]
    pub exceptional_solver_guard: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub report_path: Option<String>,
}

fn default_guard() -> usize {
    COMMUTANT_GUARD_MONOMIAL
}

fn default_exceptional_guard() -> usize {
    DEFAULT_EXCEPTIONAL_GUARD.min(COMMUTANT_GUARD_EXCEPTIONAL)
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl VerificationGrid {
    /// C_n for n ∈ {2,3,5,6,8,12}, D_n for n ∈ {2,3,4,5,7}, T, O, I; operator checks up to
    /// k = 8 (relation suites up to k = 5), walk and formula checks up to k = 14.
    pub fn default_grid() -> Self {
        let mut groups: Vec<String> = [2, 3, 5, 6, 8, 12].iter().map(|n| format!("C{n}")).collect();
        groups.extend([2, 3, 4, 5, 7].iter().map(|n| format!("D{n}")));
        groups.extend(["T", "O", "I"].map(String::from));
        let mut cases = Vec::new();
        for group in groups {
            for k in 1..=DEFAULT_WALK_MAX_K {
                let checks = if k <= DEFAULT_OPERATOR_MAX_K {
                    CheckMask { relations: k <= DEFAULT_RELATION_MAX_K, ..CheckMask::all() }
                } else {
                    CheckMask::counting_only()
                };
                cases.push(GridCase { group: group.clone(), k, checks });
            }
        }
        VerificationGrid {
            cases,
            solver_guard: default_guard(),
            exceptional_solver_guard: default_exceptional_guard(),
            seed: DEFAULT_SEED,
            report_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("verification grid: {e}")))
    }
}

/// Summary of a list of exact checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub checks: usize,
    pub failures: Vec<String>,
    pub skipped: usize,
    pub pass: bool,
}

impl SuiteOutcome {
    pub fn from_reports(reports: &[RelationReport]) -> Self {
        let all: Vec<&RelationCheck> = reports.iter().flat_map(|r| &r.checks).collect();
        let failures: Vec<String> = reports.iter().flat_map(|r| r.failures()).map(|c| c.id.clone()).collect();
        let skipped = all.iter().filter(|c| c.status == Status::Skipped).count();
        SuiteOutcome { checks: all.len(), pass: failures.is_empty(), failures, skipped }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramOutcome {
    pub count: usize,
    pub sampled: usize,
    pub action_mismatches: usize,
    pub pass: bool,
}

/// Everything recorded for one (G, k). Integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub group: String,
    pub k: usize,
    /// Oracle name (formula, walks, commutant, basis, diagrams) to dim Z_k(G).
    pub dims: BTreeMap<String, String>,
    /// Oracles that were requested but not run, with the reason.
    pub skipped: BTreeMap<String, String>,
    /// m_k^λ by walk count, keyed by node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modules: Option<BTreeMap<String, String>>,
    /// Whether an independent module-dimension route reproduces the walk multiplicities.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modules_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relations: Option<SuiteOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagrams: Option<DiagramOutcome>,
    pub errors: Vec<String>,
    pub pass: bool,
}

impl CaseReport {
    pub fn dims_agree(&self) -> bool {
        let mut values = self.dims.values();
        match values.next() {
            Some(first) => values.all(|v| v == first),
            None => true,
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.errors.is_empty()
            && self.dims_agree()
            && self.modules_agree != Some(false)
            && self.relations.as_ref().is_none_or(|r| r.pass)
            && self.diagrams.as_ref().is_none_or(|d| d.pass);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub seed: u64,
    pub solver_guard: usize,
    pub exceptional_solver_guard: usize,
    pub cases: Vec<CaseReport>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("verification report: {e}")))
    }

    /// One line per case: group, k, the agreed dimension, oracle count and status.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<6} {:>3} {:>24} {:<40} status", "group", "k", "dim", "oracles");
        for c in &self.cases {
            let dim = c.dims.get("walks").or_else(|| c.dims.values().next()).cloned().unwrap_or_else(|| "-".into());
            let oracles = c.dims.keys().cloned().collect::<Vec<_>>().join(",");
            let mut status = if c.pass { "ok".to_string() } else { "FAIL".to_string() };
            if let Some(r) = &c.relations {
                let _ = write!(status, " rel {}/{}", r.checks - r.failures.len() - r.skipped, r.checks - r.skipped);
            }
            if !c.errors.is_empty() {
                let _ = write!(status, " errors: {}", c.errors.join("; "));
            }
            let _ = writeln!(out, "{:<6} {:>3} {:>24} {:<40} {}", c.group, c.k, dim, oracles, status);
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }
}

fn case_seed(seed: u64, group: &str, k: usize) -> u64 {
    group.bytes().fold(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15), |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Runs every case of the grid in order.
pub fn run_grid(grid: &VerificationGrid) -> Result<VerificationReport> {
    if grid.cases.is_empty() {
        return Err(Error::Domain("the verification grid has no cases".into()));
    }
    let cases: Vec<CaseReport> = grid.cases.iter().map(|c| run_case(grid, c)).collect::<Result<_>>()?;
    let pass = cases.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        seed: grid.seed,
        solver_guard: grid.solver_guard,
        exceptional_solver_guard: grid.exceptional_solver_guard,
        cases,
        pass,
    })
}

fn skip_or_fail(report: &mut CaseReport, oracle: &str, err: Error) {
    match err {
        Error::GuardExceeded { .. } | Error::Unsupported { .. } => {
            report.skipped.insert(oracle.into(), err.to_string());
        }
        other => report.errors.push(format!("{oracle}: {other}")),
    }
}

/// Runs one case; malformed selectors and k = 0 are errors, oracle failures are recorded.
pub fn run_case(grid: &VerificationGrid, case: &GridCase) -> Result<CaseReport> {
    let spec = SubgroupSpec::parse(&case.group)?;
    let k = case.k;
    if k == 0 {
        return Err(Error::Domain("grid cases need k >= 1".into()));
    }
    let seed = case_seed(grid.seed, &case.group, k);
    let mut report = CaseReport {
        group: case.group.clone(),
        k,
        dims: BTreeMap::new(),
        skipped: BTreeMap::new(),
        modules: None,
        modules_agree: None,
        relations: None,
        diagrams: None,
        errors: Vec::new(),
        pass: false,
    };
    let m = case.checks;
    if m.formula {
        match dim_formula(&spec, k) {
            Ok(v) => {
                report.dims.insert("formula".into(), v.to_string());
            }
            Err(e) => skip_or_fail(&mut report, "formula", e),
        }
    }
    if m.walks {
        match walk_graph(&spec, k).and_then(|g| dim_centralizer_walks(&g, k)) {
            Ok(v) => {
                report.dims.insert("walks".into(), v.to_string());
            }
            Err(e) => skip_or_fail(&mut report, "walks", e),
        }
    }
    if m.commutant {
        let limit = if Exceptional::from_spec(&spec).is_some() { grid.exceptional_solver_guard } else { grid.solver_guard };
        match commutant_basis_with_guard(&spec, k, limit) {
            Ok(b) => {
                report.dims.insert("commutant".into(), b.len().to_string());
            }
            Err(e) => skip_or_fail(&mut report, "commutant", e),
        }
    }
    if m.basis {
        match basis_count(&spec, k) {
            Ok(v) => {
                report.dims.insert("basis".into(), v.to_string());
            }
            Err(e) => skip_or_fail(&mut report, "basis", e),
        }
    }
    if m.modules {
        match module_routes(&spec, k) {
            Ok((walks, other)) => {
                report.modules_agree = other.map(|o| o == walks);
                report.modules = Some(walks.into_iter().map(|(l, v)| (l, v.to_string())).collect());
            }
            Err(e) => skip_or_fail(&mut report, "modules", e),
        }
    }
    if m.relations {
        match relation_outcome(&spec, k, seed) {
            Ok(o) => report.relations = Some(o),
            Err(e) => skip_or_fail(&mut report, "relations", e),
        }
    }
    if m.diagrams {
        match diagram_outcome(&spec, k, seed) {
            Ok(o) => {
                report.dims.insert("diagrams".into(), o.count.to_string());
                report.diagrams = Some(o);
            }
            Err(e) => skip_or_fail(&mut report, "diagrams", e),
        }
    }
    Ok(report.finish())
}

/// Size of the explicit basis for the families that have one.
pub fn basis_count(spec: &SubgroupSpec, k: usize) -> Result<usize> {
    Ok(match spec.family {
        Family::Cyclic(n) => cyclic_basis(n, k)?.len(),
        Family::BinaryDihedral(n) => dihedral_basis(n, k)?.len(),
        Family::CyclicInfinite => planar_rook_units(k)?.len(),
        Family::BinaryDihedralInfinite => dinfty_basis(k)?.len(),
        _ => return Err(Error::Unsupported { family: spec.to_string(), what: "explicit basis enumeration".into() }),
    })
}

/// Walk multiplicities at level k and, where available, the same vector from an
/// independent route: truncated binomial sums for C_n, the index sets K_ℓ for D_n,
/// binomials for C_∞, the D_∞ basis counts, or the exceptional closed forms.
pub fn module_routes(
    spec: &SubgroupSpec,
    k: usize,
) -> Result<(BTreeMap<String, BigUint>, Option<BTreeMap<String, BigUint>>)> {
    let graph = walk_graph(spec, k)?;
    let walks = multiplicities(&graph, k)?.level_map(k);
    let other = match spec.family {
        Family::Cyclic(n) => {
            let nt = n_tilde(n) as usize;
            let mut out = BTreeMap::new();
            for ell in cyclic_lambda(n, k) {
                let a = a_ell(n, k, ell).expect("ℓ comes from a weight");
                out.insert(ell.to_string(), binomial_sum_mod(k, nt, a % nt)?);
            }
            Some(out)
        }
        Family::BinaryDihedral(n) => {
            let mut out = BTreeMap::new();
            for ell in dihedral_lambda(n, k) {
                let size = BigUint::from(k_set(n, k, ell).len());
                if ell == 0 || ell == n {
                    out.insert(format!("{ell}'"), size.clone());
                }
                out.insert(ell.to_string(), size);
            }
            Some(out)
        }
        Family::CyclicInfinite => Some((0..=k).map(|a| ((k as i64 - 2 * a as i64).to_string(), binomial(k, a))).collect()),
        Family::BinaryDihedralInfinite => {
            Some(dinfty_module_dims(k).into_iter().map(|(l, v)| (l, BigUint::from(v))).collect())
        }
        Family::SpecialUnitary => None,
        _ => {
            let which = Exceptional::from_spec(spec).expect("exceptional family");
            let mut out = BTreeMap::new();
            for lab in walks.keys() {
                out.insert(lab.clone(), irr_dim_exceptional(which, k, lab)?.value);
            }
            Some(out)
        }
    };
    Ok((walks, other))
}

fn relation_outcome(spec: &SubgroupSpec, k: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut reports = vec![verify_relation_suite(spec, k)?];
    if matches!(spec.family, Family::Cyclic(_) | Family::BinaryDihedral(_)) {
        reports.push(conditional_expectation_suite(spec, k, GRID_EXPECTATION_SAMPLES, seed)?);
    }
    Ok(SuiteOutcome::from_reports(&reports))
}

/// The matrix unit realized by a diagram: E_{r,s} for cyclic diagrams and
/// E_{r,s} + E_{−r,−s} for dihedral ones.
pub fn diagram_unit(d: &TwoRowDiagram) -> SparseEndo {
    let (r, s) = d.pair();
    let (ri, si) = (r.to_index(), s.to_index());
    let e = SparseEndo::matrix_unit(d.k, 1, ri, si);
    match d.family {
        DiagramFamily::Cyclic => e,
        DiagramFamily::Dihedral => e.add(&SparseEndo::matrix_unit(d.k, 1, neg_index(d.k, ri), neg_index(d.k, si))),
    }
}

/// Diagram count plus the action of `samples` seeded random diagrams against the matrix units.
pub fn diagram_check(family: DiagramFamily, n: u32, k: usize, samples: usize, seed: u64) -> Result<DiagramOutcome> {
    let all = enumerate_diagrams(family, n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled = samples.min(all.len());
    let action_mismatches =
        (0..sampled).map(|_| &all[rng.gen_range(0..all.len())]).filter(|d| d.action() != diagram_unit(d)).count();
    Ok(DiagramOutcome { count: all.len(), sampled, action_mismatches, pass: action_mismatches == 0 })
}

fn diagram_outcome(spec: &SubgroupSpec, k: usize, seed: u64) -> Result<DiagramOutcome> {
    let (family, n) = match spec.family {
        Family::Cyclic(n) => (DiagramFamily::Cyclic, n),
        Family::BinaryDihedral(n) => (DiagramFamily::Dihedral, n),
        _ => return Err(Error::Unsupported { family: spec.to_string(), what: "two-row diagrams".into() }),
    };
    diagram_check(family, n, k, DIAGRAM_SAMPLES, seed)
}

/// Integer combination of a few basis elements with coefficients in ±1..±3.
pub fn random_combination(basis: &[SparseEndo], terms: usize, rng: &mut ChaCha8Rng) -> SparseEndo {
    let first = &basis[0];
    let mut acc = SparseEndo::zero(first.k(), first.conductor());
    for _ in 0..terms {
        let b = &basis[rng.gen_range(0..basis.len())];
        let mut c = rng.gen_range(1..=3i64);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        acc = acc.add(&b.scale(&CycloNum::from_int(first.conductor(), c)));
    }
    acc
}

/// Basis elements combined into each random element of the expectation suite.
pub const EXPECTATION_TERMS: usize = 6;

fn centralizer_basis(spec: &SubgroupSpec, k: usize) -> Result<Vec<SparseEndo>> {
    if k == 0 {
        return Ok(vec![SparseEndo::identity(0, 1)]);
    }
    let basis = commutant_basis_with_guard(spec, k, COMMUTANT_GUARD_MONOMIAL.max(COMMUTANT_GUARD_EXCEPTIONAL))?;
    let n = basis.iter().fold(1u32, |acc, b| num_integer::Integer::lcm(&acc, &b.conductor()));
    Ok(basis.into_iter().map(|b| b.with_conductor(n)).collect())
}

/// Exact checks of the conditional expectation ε_k on `samples` seeded random elements of
/// Z_k(G): e_k a e_k = 2 ε_k(a) e_k on V^⊗(k+1); ε_k(a₁ b a₂) = a₁ ε_k(b) a₂ and ε_k(a₁) = a₁
/// for a₁, a₂ ∈ Z_{k−1}; tr_k(a b) = tr_k(ε_k(a) b) for b ∈ Z_{k−1}; and for k ≥ 2 the
/// compression b of a satisfies a e_{k−1} = (b ⊗ 1) e_{k−1} with b ∈ Z_{k−1}.
pub fn conditional_expectation_suite(spec: &SubgroupSpec, k: usize, samples: usize, seed: u64) -> Result<RelationReport> {
    if k == 0 {
        return Err(Error::Domain("the conditional expectation needs k >= 1".into()));
    }
    let zk = centralizer_basis(spec, k)?;
    let zk1 = centralizer_basis(spec, k - 1)?;
    let n = num_integer::Integer::lcm(&zk[0].conductor(), &zk1[0].conductor());
    let zk: Vec<SparseEndo> = zk.into_iter().map(|b| b.with_conductor(n)).collect();
    let zk1: Vec<SparseEndo> = zk1.into_iter().map(|b| b.with_conductor(n)).collect();
    let gens = generators(spec)?;
    let actions_below: Vec<SparseEndo> = gens.iter().map(|g| group_action(&g.matrix, k - 1)).collect();
    let ek1 = tl_generator(k + 1, k)?.with_conductor(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for t in 0..samples {
        let a = random_combination(&zk, EXPECTATION_TERMS, &mut rng);
        let a1 = random_combination(&zk1, EXPECTATION_TERMS, &mut rng);
        let a2 = random_combination(&zk1, EXPECTATION_TERMS, &mut rng);
        let eps = conditional_expectation(&a)?;
        let lhs = ek1.mul(&a.lift_to(k + 1)).mul(&ek1);
        let rhs = eps.lift_to(k + 1).mul(&ek1).scale_q(2, 1);
        checks.push(RelationCheck::endo(format!("expectation.contraction[{t}]"), &lhs, &rhs));
        let commutes = actions_below.iter().all(|g| eps.commutes_with(g));
        checks.push(RelationCheck::value(format!("expectation.lands-in-previous[{t}]"), commutes, true, commutes));
        let sandwiched = a1.lift_to(k).mul(&a).mul(&a2.lift_to(k));
        let lhs = conditional_expectation(&sandwiched)?;
        let rhs = a1.mul(&eps).mul(&a2);
        checks.push(RelationCheck::endo(format!("expectation.bimodule[{t}]"), &lhs, &rhs));
        checks.push(RelationCheck::endo(format!("expectation.fixes-previous[{t}]"), &conditional_expectation(&a1.lift_to(k))?, &a1));
        let tr_l = a.mul(&a1.lift_to(k)).trace();
        let tr_r = eps.mul(&a1).lift_to(k).trace();
        checks.push(RelationCheck::value(format!("expectation.trace[{t}]"), &tr_l, &tr_r, tr_l == tr_r));
        if k >= 2 {
            let b = unique_compression(&a)?;
            checks.push(RelationCheck::value(
                format!("compression.identity[{t}]"),
                "a e = (b x 1) e",
                "",
                compression_identity_holds(&a, &b),
            ));
            let commutes = actions_below.iter().all(|g| b.commutes_with(g));
            checks.push(RelationCheck::value(format!("compression.in-previous[{t}]"), commutes, true, commutes));
        }
    }
    Ok(RelationReport { group: spec.to_string(), k, checks })
}

/// One difference between a report and its golden copy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub kind: DiffKind,
    pub group: String,
    pub k: usize,
    /// Dotted path inside the case, e.g. "dims.walks"; empty for whole-case entries.
    pub field: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffKind {
    Added,
    Removed,
    Changed,
}

fn flatten_json(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Object(map) => {
            for (key, x) in map {
                let p = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten_json(&p, x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

fn case_fields(c: &CaseReport) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let v = serde_json::to_value(c).expect("case serializes");
    flatten_json("", &v, &mut out);
    out.remove("group");
    out.remove("k");
    out
}

/// Structural diff of `report` against `golden`, keyed by (group, k) and field path.
pub fn golden_compare(report: &VerificationReport, golden: &VerificationReport) -> Vec<DiffEntry> {
    let index = |r: &VerificationReport| -> BTreeMap<(String, usize), BTreeMap<String, String>> {
        r.cases.iter().map(|c| ((c.group.clone(), c.k), case_fields(c))).collect()
    };
    let (now, gold) = (index(report), index(golden));
    let mut diff = Vec::new();
    for (key, fields) in &now {
        let Some(expected) = gold.get(key) else {
            diff.push(DiffEntry { kind: DiffKind::Added, group: key.0.clone(), k: key.1, field: String::new(), expected: None, actual: None });
            continue;
        };
        for (field, value) in fields {
            match expected.get(field) {
                Some(e) if e == value => {}
                Some(e) => diff.push(DiffEntry {
                    kind: DiffKind::Changed,
                    group: key.0.clone(),
                    k: key.1,
                    field: field.clone(),
                    expected: Some(e.clone()),
                    actual: Some(value.clone()),
                }),
                None => diff.push(DiffEntry {
                    kind: DiffKind::Added,
                    group: key.0.clone(),
                    k: key.1,
                    field: field.clone(),
                    expected: None,
                    actual: Some(value.clone()),
                }),
            }
        }
        for (field, e) in expected.iter().filter(|(f, _)| !fields.contains_key(*f)) {
            diff.push(DiffEntry {
                kind: DiffKind::Removed,
                group: key.0.clone(),
                k: key.1,
                field: field.clone(),
                expected: Some(e.clone()),
                actual: None,
            });
        }
    }
    for key in gold.keys().filter(|k| !now.contains_key(*k)) {
        diff.push(DiffEntry { kind: DiffKind::Removed, group: key.0.clone(), k: key.1, field: String::new(), expected: None, actual: None });
    }
    diff
}
