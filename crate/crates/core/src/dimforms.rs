//! Closed-form dimension arithmetic: truncated binomial sums through (1+z)^m modulo
//! z^ñ − 1, the cyclic and dihedral formulas, Lucas numbers, and the exceptional
//! totals and per-node multiplicity formulas for T, O and I.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bratteli::{dim_centralizer_walks, multiplicities};
use crate::error::{Error, Result};
use crate::groups::{n_tilde, Family, SubgroupSpec};
use crate::repgraph::{build_graph, RepGraph};

/// An element of Z[z]/(z^ñ − 1), stored as the coefficients of 1, z, …, z^{ñ−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffPoly {
    pub modulus: usize,
    pub coeffs: Vec<BigUint>,
}

impl CoeffPoly {
    pub fn one(modulus: usize) -> Self {
        let mut coeffs = vec![BigUint::zero(); modulus];
        coeffs[0] = BigUint::one();
        CoeffPoly { modulus, coeffs }
    }

    /// 1 + z reduced modulo z^ñ − 1 (for ñ = 1 this is the constant 2).
    pub fn one_plus_z(modulus: usize) -> Self {
        let mut p = Self::one(modulus);
        p.coeffs[1 % modulus] += 1u32;
        p
    }

    /// Cyclic convolution.
    pub fn mul(&self, other: &CoeffPoly) -> CoeffPoly {
        assert_eq!(self.modulus, other.modulus, "moduli must agree");
        let m = self.modulus;
        let mut coeffs = vec![BigUint::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                coeffs[(i + j) % m] += a * b;
            }
        }
        CoeffPoly { modulus: m, coeffs }
    }

    /// self^e by repeated squaring.
    pub fn pow(&self, mut e: u64) -> CoeffPoly {
        let mut base = self.clone();
        let mut acc = Self::one(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn coeff(&self, i: usize) -> &BigUint {
        &self.coeffs[i % self.modulus]
    }
}

/// C(k, 0), …, C(k, k).
pub fn binomial_row(k: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(k + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for b in 1..=k {
        c = c * BigUint::from(k + 1 - b) / BigUint::from(b);
        row.push(c.clone());
    }
    row
}

pub fn binomial(k: usize, b: usize) -> BigUint {
    if b > k {
        BigUint::zero()
    } else {
        binomial_row(k).swap_remove(b)
    }
}

fn check_residue(modulus: usize, residue: usize) -> Result<()> {
    if modulus == 0 || residue >= modulus {
        return Err(Error::Domain(format!("need ñ ≥ 1 and 0 ≤ residue < ñ, got ñ = {modulus}, residue = {residue}")));
    }
    Ok(())
}

/// Σ_{b ≡ residue mod ñ} C(k, b) by direct summation of binomial coefficients.
pub fn binomial_sum_direct(k: usize, modulus: usize, residue: usize) -> Result<BigUint> {
    check_residue(modulus, residue)?;
    Ok(binomial_row(k).into_iter().enumerate().filter(|(b, _)| b % modulus == residue).map(|(_, c)| c).sum())
}

/// The coefficient of z^residue in (1+z)^k modulo z^ñ − 1.
pub fn binomial_sum_poly(k: usize, modulus: usize, residue: usize) -> Result<BigUint> {
    check_residue(modulus, residue)?;
    Ok(CoeffPoly::one_plus_z(modulus).pow(k as u64).coeff(residue).clone())
}

/// Σ_{b ≡ residue mod ñ} C(k, b); both routes are evaluated and must agree.
pub fn binomial_sum_mod(k: usize, modulus: usize, residue: usize) -> Result<BigUint> {
    let direct = binomial_sum_direct(k, modulus, residue)?;
    let poly = binomial_sum_poly(k, modulus, residue)?;
    if direct != poly {
        return Err(Error::Domain(format!(
            "truncated binomial sum ({k}, {modulus}, {residue}): direct {direct} but polynomial {poly}"
        )));
    }
    Ok(direct)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    Ok(())
}

/// dim Z_k(C_n) = Σ_{a ≡ b mod ñ} C(k,a) C(k,b), evaluated as a sum of squared residue sums.
pub fn dim_cyclic(n: u32, k: usize) -> Result<BigUint> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::Domain("C_n needs n ≥ 1".into()));
    }
    let m = n_tilde(n) as usize;
    (0..m).map(|c| binomial_sum_mod(k, m, c).map(|s| &s * &s)).sum()
}

/// dim Z_k(C_n) read as the coefficient of z^{k mod ñ} in (1+z)^{2k} modulo z^ñ − 1.
pub fn dim_cyclic_coefficient(n: u32, k: usize) -> Result<BigUint> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::Domain("C_n needs n ≥ 1".into()));
    }
    let m = n_tilde(n) as usize;
    binomial_sum_mod(2 * k, m, k % m)
}

/// dim Z_k(D_n) = ½ dim Z_k(C_{2n}).
pub fn dim_dihedral(n: u32, k: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Domain(format!("D_n needs n ≥ 2, got {n}")));
    }
    let c = dim_cyclic(2 * n, k)?;
    let (half, rem) = c.div_rem(&BigUint::from(2u32));
    if !rem.is_zero() {
        return Err(Error::Domain(format!("dim Z_{k}(C_{}) = {c} is odd", 2 * n)));
    }
    Ok(half)
}

/// dim Z_k(C_∞) = C(2k, k).
pub fn dim_cinf(k: usize) -> Result<BigUint> {
    check_k(k)?;
    Ok(binomial(2 * k, k))
}

/// dim Z_k(D_∞) = C(2k − 1, k).
pub fn dim_dinf(k: usize) -> Result<BigUint> {
    check_k(k)?;
    Ok(binomial(2 * k - 1, k))
}

/// dim Z_k(SU₂) = Catalan number C(2k, k)/(k + 1).
pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k, k) / BigUint::from(k + 1)
}

/// Lucas numbers: L_0 = 2, L_1 = 1, L_{m+2} = L_{m+1} + L_m.
pub fn lucas(m: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::from(2u32), BigUint::one());
    for _ in 0..m {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// The three exceptional subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Exceptional {
    T,
    O,
    I,
}

impl Exceptional {
    pub const ALL: [Exceptional; 3] = [Exceptional::T, Exceptional::O, Exceptional::I];

    pub fn from_spec(spec: &SubgroupSpec) -> Option<Self> {
        match spec.family {
            Family::BinaryTetrahedral => Some(Exceptional::T),
            Family::BinaryOctahedral => Some(Exceptional::O),
            Family::BinaryIcosahedral => Some(Exceptional::I),
            _ => None,
        }
    }

    pub fn spec(self) -> SubgroupSpec {
        match self {
            Exceptional::T => SubgroupSpec::tetrahedral(),
            Exceptional::O => SubgroupSpec::octahedral(),
            Exceptional::I => SubgroupSpec::icosahedral(),
        }
    }

    /// Denominator of the closed forms: 12, 24, 60.
    pub fn denominator(self) -> u32 {
        match self {
            Exceptional::T => 12,
            Exceptional::O => 24,
            Exceptional::I => 60,
        }
    }

    /// Smallest k covered by the per-node closed forms.
    pub fn stable_from(self) -> usize {
        match self {
            Exceptional::T | Exceptional::O => 2,
            Exceptional::I => 6,
        }
    }
}

fn big(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

fn pow_int(base: u32, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), e)
}

fn lucas_int(m: usize) -> BigInt {
    big(&lucas(m))
}

fn exact_quotient(num: BigInt, den: u32, what: &str) -> Result<BigUint> {
    let (q, r) = num.div_rem(&BigInt::from(den));
    if !r.is_zero() || q.is_negative() {
        return Err(Error::Domain(format!("{what}: {num} is not a nonnegative multiple of {den}")));
    }
    Ok(q.to_biguint().expect("nonnegative"))
}

/// Numerator of the total dimension formula, before division by 12, 24 or 60.
pub fn exceptional_numerator(which: Exceptional, k: usize) -> BigInt {
    match which {
        Exceptional::T => pow_int(4, k) + 8,
        Exceptional::O => pow_int(4, k) + 6 * pow_int(2, k) + 8,
        Exceptional::I => pow_int(4, k) + 12 * lucas_int(2 * k) + 20,
    }
}

/// dim Z_k(T) = (4^k+8)/12, dim Z_k(O) = (4^k+6·2^k+8)/24, dim Z_k(I) = (4^k+12L_{2k}+20)/60.
pub fn dim_exceptional(which: Exceptional, k: usize) -> Result<BigUint> {
    check_k(k)?;
    exact_quotient(exceptional_numerator(which, k), which.denominator(), &format!("dim Z_{k}({which:?})"))
}

/// Numerators of the per-node closed forms at level k, keyed by node label. With k = 2n
/// or k = 2n + 1 the expressions are written in n; only nodes at the parity of k appear.
fn node_numerators(which: Exceptional, k: usize) -> Vec<(&'static str, BigInt)> {
    let n = k / 2;
    let p4 = |e: usize| pow_int(4, e);
    let p2 = |e: usize| pow_int(2, e);
    let l = lucas_int;
    match (which, k.is_multiple_of(2)) {
        (Exceptional::T, true) => vec![("0", p4(n) + 8), ("2", 3 * p4(n)), ("4+", p4(n) - 4), ("4-", p4(n) - 4)],
        (Exceptional::T, false) => vec![("1", p4(n + 1) + 8), ("3+", p4(n + 1) - 4), ("3-", p4(n + 1) - 4)],
        (Exceptional::O, true) => vec![
            ("0", p4(n) + 6 * p2(n) + 8),
            ("2", 3 * p4(n) + 6 * p2(n)),
            ("4+", 3 * p4(n) - 6 * p2(n)),
            ("4-", 2 * p4(n) - 8),
            ("6", p4(n) - 6 * p2(n) + 8),
        ],
        (Exceptional::O, false) => vec![
            ("1", p4(n + 1) + 6 * p2(n + 1) + 8),
            ("3", 2 * p4(n + 1) - 8),
            ("5", p4(n + 1) - 6 * p2(n + 1) + 8),
        ],
        // Even k ≥ 2 gives n ≥ 1, so 2n − 1 is a valid Lucas index.
        (Exceptional::I, true) => vec![
            ("0", p4(n) + 12 * l(2 * n) + 20),
            ("2", 3 * p4(n) + 12 * l(2 * n + 1)),
            ("4", 5 * p4(n) - 20),
            ("6+", 4 * p4(n) - 12 * l(2 * n) + 20),
            ("6-", 3 * p4(n) - 12 * l(2 * n - 1)),
        ],
        (Exceptional::I, false) => vec![
            ("1", p4(n + 1) + 12 * l(2 * n + 2) + 20),
            ("3", 2 * p4(n + 1) + 12 * l(2 * n + 1) - 20),
            ("5", 3 * p4(n + 1) - 12 * l(2 * n + 1)),
            ("7", p4(n + 1) - 12 * l(2 * n) + 20),
        ],
    }
}

/// Every per-node closed form evaluated at level k ≥ 1, without the validity scoping of
/// [`irr_dim_exceptional`]. Keys are node labels of the representation graph.
pub fn closed_form_level(which: Exceptional, k: usize) -> Result<BTreeMap<String, BigUint>> {
    check_k(k)?;
    node_numerators(which, k)
        .into_iter()
        .map(|(lab, num)| {
            let v = exact_quotient(num, which.denominator(), &format!("{which:?} node {lab} at k = {k}"))?;
            Ok((lab.to_string(), v))
        })
        .collect()
}

/// The icosahedral node 6− at even k = 2n with the Lucas index 2n + 1, as the labelled
/// diagram prints it. The value that matches the walk counts uses index 2n − 1.
pub fn icosahedral_six_minus_as_printed(k: usize) -> BigInt {
    let n = k / 2;
    (3 * pow_int(4, n) - 12 * lucas_int(2 * n + 1)) / 60
}

fn decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Where an irreducible multiplicity came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrrDimSource {
    ClosedForm,
    /// k is below the range covered by the closed forms; the value is a walk count.
    PreStable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrDim {
    #[serde(serialize_with = "decimal")]
    pub value: BigUint,
    pub source: IrrDimSource,
}

/// m_k^λ for λ a node of Ê₆, Ê₇ or Ê₈ at the parity of k, from the per-node closed forms
/// (k ≥ 2 for T and O, k ≥ 6 for I) and from walk counts below that range.
pub fn irr_dim_exceptional(which: Exceptional, k: usize, node: &str) -> Result<IrrDim> {
    check_k(k)?;
    let graph = build_graph(&which.spec(), None)?;
    let v = graph.node(node)?;
    let parity = graph.distances()[v].expect("connected graph") % 2;
    if parity != k % 2 {
        return Err(Error::Domain(format!("node {node} of {which:?} does not occur at level {k}")));
    }
    if k < which.stable_from() {
        let table = multiplicities(&graph, k)?;
        return Ok(IrrDim { value: table.get(k, node)?, source: IrrDimSource::PreStable });
    }
    let level = closed_form_level(which, k)?;
    let value = level.get(node).cloned().ok_or_else(|| Error::Domain(format!("no closed form for {which:?} node {node}")))?;
    Ok(IrrDim { value, source: IrrDimSource::ClosedForm })
}

/// Outcome of the neighbour-sum recursion at one level.
#[derive(Clone, Debug, Serialize)]
pub struct RecursionReport {
    pub which: Exceptional,
    pub k: usize,
    /// Nodes where the value at level k differs from the sum over neighbours at level k − 1.
    pub failures: Vec<String>,
}

impl RecursionReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that each closed-form value at level k ≥ 2 equals the sum of the closed-form
/// values of its graph neighbours at level k − 1.
pub fn node_recursion_check(which: Exceptional, k: usize) -> Result<RecursionReport> {
    if k < 2 {
        return Err(Error::Domain("the recursion needs k ≥ 2".into()));
    }
    let graph = build_graph(&which.spec(), None)?;
    let here = closed_form_level(which, k)?;
    let below = closed_form_level(which, k - 1)?;
    let mut failures = Vec::new();
    for (lab, value) in &here {
        let v = graph.node(lab)?;
        let sum: BigUint = graph
            .neighbors(v)
            .map(|(u, a)| below.get(&graph.labels[u]).cloned().unwrap_or_default() * BigUint::from(a))
            .sum();
        if &sum != value {
            failures.push(lab.clone());
        }
    }
    Ok(RecursionReport { which, k, failures })
}

/// dim Z_k(G) from the closed formula of the family; infinite families and SU₂ included.
pub fn dim_formula(spec: &SubgroupSpec, k: usize) -> Result<BigUint> {
    match spec.family {
        Family::Cyclic(n) => dim_cyclic(n, k),
        Family::BinaryDihedral(n) => dim_dihedral(n, k),
        Family::CyclicInfinite => dim_cinf(k),
        Family::BinaryDihedralInfinite => dim_dinf(k),
        Family::SpecialUnitary => {
            check_k(k)?;
            Ok(catalan(k))
        }
        _ => dim_exceptional(Exceptional::from_spec(spec).expect("exceptional family"), k),
    }
}

/// The graph whose walks count dim Z_k(G); infinite families are truncated at depth k.
pub fn walk_graph(spec: &SubgroupSpec, k: usize) -> Result<RepGraph> {
    let depth = if spec.is_finite() { None } else { Some(k.max(1)) };
    build_graph(spec, depth)
}

/// One row of the formula versus walk-count table; integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimRow {
    pub group: String,
    pub k: usize,
    pub formula: String,
    pub walks: String,
    pub agree: bool,
}

/// Formula value, walk count and agreement flag for each k in `ks`.
pub fn formula_table(spec: &SubgroupSpec, ks: impl IntoIterator<Item = usize>) -> Result<Vec<DimRow>> {
    ks.into_iter()
        .map(|k| {
            let formula = dim_formula(spec, k)?;
            let walks = dim_centralizer_walks(&walk_graph(spec, k)?, k)?;
            Ok(DimRow { group: spec.to_string(), k, agree: formula == walks, formula: formula.to_string(), walks: walks.to_string() })
        })
        .collect()
}

/// Converts a small value to u64 for callers that need machine integers.
pub fn to_u64(x: &BigUint) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::Domain(format!("{x} does not fit in 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_basics() {
        let p = CoeffPoly::one_plus_z(1).pow(5);
        assert_eq!(p.coeffs, vec![BigUint::from(32u32)]);
        let q = CoeffPoly::one_plus_z(4).pow(6);
        let got: Vec<u32> = q.coeffs.iter().map(|c| c.to_u32().unwrap()).collect();
        assert_eq!(got, vec![16, 12, 16, 20]);
    }

    #[test]
    fn lucas_start() {
        assert_eq!(lucas(0), BigUint::from(2u32));
        assert_eq!(lucas(1), BigUint::from(1u32));
        assert_eq!(lucas(2), BigUint::from(3u32));
    }
}
