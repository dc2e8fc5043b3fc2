//! Exact arithmetic in the cyclotomic field Q(ζ_N).
//!
//! An element is stored in the power basis 1, ζ, ..., ζ^(φ(N)-1) as a vector of
//! integer numerators over one common positive denominator. Reduction is modulo
//! the N-th cyclotomic polynomial, so the coefficient vector of a value is unique.
//! Small values use machine integers with checked `i128` intermediates and fall back
//! to big integers on overflow. A value is stored as big only when it does not fit,
//! which keeps the representation canonical.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Precomputed data for one conductor.
#[derive(Debug)]
pub struct FieldData {
    n: u32,
    phi: usize,
    /// `red[j]` holds the power-basis coordinates of ζ^j for `0 <= j < n`.
    red: Vec<Vec<i64>>,
    units: Vec<u32>,
}

impl FieldData {
    pub fn conductor(&self) -> u32 {
        self.n
    }

    /// Degree φ(N) of the field over Q.
    pub fn degree(&self) -> usize {
        self.phi
    }

    /// Residues in 1..N coprime to N (just `[1]` when N <= 2).
    pub fn units(&self) -> &[u32] {
        &self.units
    }
}

fn poly_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Integer coefficients of the N-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    let n = n as usize;
    let mut p = vec![0i64; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_monic(&p, &cyclotomic_polynomial(d as u32));
        }
    }
    p
}

fn build_field(n: u32) -> FieldData {
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut red: Vec<Vec<i64>> = Vec::with_capacity(n as usize);
    for j in 0..n as usize {
        if j < phi {
            let mut v = vec![0i64; phi];
            v[j] = 1;
            red.push(v);
        } else {
            let prev = &red[j - 1];
            let top = prev[phi - 1];
            let mut v = vec![0i64; phi];
            for i in 1..phi {
                v[i] = prev[i - 1];
            }
            for i in 0..phi {
                v[i] -= top * phi_poly[i];
            }
            red.push(v);
        }
    }
    let units = (1..n.max(2)).filter(|a| a.gcd(&n) == 1).collect::<Vec<_>>();
    let units = if units.is_empty() { vec![1] } else { units };
    FieldData { n, phi, red, units }
}

/// Shared, leaked-once field data for conductor `n`.
pub fn field(n: u32) -> &'static FieldData {
    assert!(n >= 1, "conductor must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, &'static FieldData>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("field cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(build_field(n))))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: Vec<i64>, den: i64 },
    Big { num: Vec<BigInt>, den: BigInt },
}

trait Int: Integer + Signed + Clone + CheckedAdd + CheckedMul + From<i64> {}
impl Int for i128 {}
impl Int for BigInt {}

fn normalize<T: Int>(mut num: Vec<T>, mut den: T) -> (Vec<T>, T) {
    if den.is_negative() {
        den = -den;
        for x in num.iter_mut() {
            *x = -x.clone();
        }
    }
    if num.iter().all(Zero::is_zero) {
        return (num, T::one());
    }
    if den.is_one() {
        return (num, den);
    }
    let mut g = den.clone();
    for x in &num {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    if !g.is_one() {
        for x in num.iter_mut() {
            *x = x.div_floor(&g);
        }
        den = den.div_floor(&g);
    }
    (num, den)
}

fn add_generic<T: Int>(a: &[T], da: &T, b: &[T], db: &T, sign: i64) -> Option<(Vec<T>, T)> {
    let s = T::from(sign);
    if da == db {
        let mut out = Vec::with_capacity(a.len());
        for (x, y) in a.iter().zip(b) {
            out.push(x.checked_add(&y.checked_mul(&s)?)?);
        }
        return Some((out, da.clone()));
    }
    let g = da.gcd(db);
    let ma = db.div_floor(&g);
    let mb = da.div_floor(&g).checked_mul(&s)?;
    let den = da.checked_mul(&ma)?;
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        out.push(x.checked_mul(&ma)?.checked_add(&y.checked_mul(&mb)?)?);
    }
    Some((out, den))
}

fn mul_generic<T: Int>(f: &FieldData, a: &[T], da: &T, b: &[T], db: &T) -> Option<(Vec<T>, T)> {
    let phi = f.phi;
    let den = da.checked_mul(db)?;
    if phi == 1 {
        return Some((vec![a[0].checked_mul(&b[0])?], den));
    }
    let mut conv = vec![T::zero(); 2 * phi - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            conv[i + j] = conv[i + j].checked_add(&x.checked_mul(y)?)?;
        }
    }
    let mut out: Vec<T> = conv[..phi].to_vec();
    let n = f.n as usize;
    for (d, t) in conv.iter().enumerate().skip(phi) {
        if t.is_zero() {
            continue;
        }
        for (i, &r) in f.red[d % n].iter().enumerate() {
            if r != 0 {
                out[i] = out[i].checked_add(&t.checked_mul(&T::from(r))?)?;
            }
        }
    }
    Some((out, den))
}

fn lin_generic<T: Int>(
    f: &FieldData,
    a: &[T],
    map: impl Fn(usize) -> usize,
) -> Option<Vec<T>> {
    let mut out = vec![T::zero(); f.phi];
    for (j, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (i, &r) in f.red[map(j)].iter().enumerate() {
            if r != 0 {
                out[i] = out[i].checked_add(&x.checked_mul(&T::from(r))?)?;
            }
        }
    }
    Some(out)
}

impl Repr {
    fn zero(phi: usize) -> Self {
        Repr::Small { num: vec![0; phi], den: 1 }
    }

    fn from_i128(p: (Vec<i128>, i128)) -> Self {
        let (num, den) = normalize(p.0, p.1);
        let fits = |x: &i128| x.unsigned_abs() <= i64::MAX as u128;
        if fits(&den) && num.iter().all(fits) {
            Repr::Small { num: num.into_iter().map(|x| x as i64).collect(), den: den as i64 }
        } else {
            Repr::Big { num: num.into_iter().map(BigInt::from).collect(), den: BigInt::from(den) }
        }
    }

    fn from_big(p: (Vec<BigInt>, BigInt)) -> Self {
        let (num, den) = normalize(p.0, p.1);
        let small: Option<Vec<i64>> = num.iter().map(|x| x.to_i64()).collect();
        match (small, den.to_i64()) {
            (Some(num), Some(den)) if num.iter().all(|&x| x != i64::MIN) && den != i64::MIN => {
                Repr::Small { num, den }
            }
            _ => Repr::Big { num, den },
        }
    }

    fn wide(&self) -> (Vec<i128>, i128) {
        match self {
            Repr::Small { num, den } => (num.iter().map(|&x| x as i128).collect(), *den as i128),
            Repr::Big { .. } => unreachable!("wide() on a big value"),
        }
    }

    fn big(&self) -> (Vec<BigInt>, BigInt) {
        match self {
            Repr::Small { num, den } => (num.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(*den)),
            Repr::Big { num, den } => (num.clone(), den.clone()),
        }
    }

    fn is_small(&self) -> bool {
        matches!(self, Repr::Small { .. })
    }

    fn is_zero(&self) -> bool {
        match self {
            Repr::Small { num, .. } => num.iter().all(|&x| x == 0),
            Repr::Big { num, .. } => num.iter().all(Zero::is_zero),
        }
    }

    fn is_rational(&self) -> bool {
        match self {
            Repr::Small { num, .. } => num[1..].iter().all(|&x| x == 0),
            Repr::Big { num, .. } => num[1..].iter().all(Zero::is_zero),
        }
    }

    fn add(&self, other: &Repr, sign: i64) -> Repr {
        if self.is_small() && other.is_small() {
            let (a, da) = self.wide();
            let (b, db) = other.wide();
            if let Some(r) = add_generic(&a, &da, &b, &db, sign) {
                return Repr::from_i128(r);
            }
        }
        let (a, da) = self.big();
        let (b, db) = other.big();
        Repr::from_big(add_generic(&a, &da, &b, &db, sign).expect("big arithmetic cannot overflow"))
    }

    fn mul(&self, other: &Repr, f: &FieldData) -> Repr {
        if self.is_small() && other.is_small() {
            let (a, da) = self.wide();
            let (b, db) = other.wide();
            if let Some(r) = mul_generic(f, &a, &da, &b, &db) {
                return Repr::from_i128(r);
            }
        }
        let (a, da) = self.big();
        let (b, db) = other.big();
        Repr::from_big(mul_generic(f, &a, &da, &b, &db).expect("big arithmetic cannot overflow"))
    }

    fn linear_map(&self, f: &FieldData, map: impl Fn(usize) -> usize + Copy) -> Repr {
        if let Repr::Small { .. } = self {
            let (a, da) = self.wide();
            if let Some(v) = lin_generic(f, &a, map) {
                return Repr::from_i128((v, da));
            }
        }
        let (a, da) = self.big();
        Repr::from_big((lin_generic(f, &a, map).expect("big arithmetic cannot overflow"), da))
    }

    fn coeff(&self, i: usize) -> BigRational {
        match self {
            Repr::Small { num, den } => BigRational::new(BigInt::from(num[i]), BigInt::from(*den)),
            Repr::Big { num, den } => BigRational::new(num[i].clone(), den.clone()),
        }
    }
}

/// An exact element of Q(ζ_N).
#[derive(Clone)]
pub struct CycloNum {
    field: &'static FieldData,
    repr: Repr,
}

impl CycloNum {
    pub fn zero(n: u32) -> Self {
        let f = field(n);
        CycloNum { field: f, repr: Repr::zero(f.phi) }
    }

    pub fn one(n: u32) -> Self {
        Self::from_int(n, 1)
    }

    pub fn from_int(n: u32, v: i64) -> Self {
        Self::from_ratio(n, v, 1)
    }

    /// The rational number `p/q` viewed in Q(ζ_n). Panics if `q == 0`.
    pub fn from_ratio(n: u32, p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        let f = field(n);
        let mut num = vec![0i128; f.phi];
        num[0] = p as i128;
        CycloNum { field: f, repr: Repr::from_i128((num, q as i128)) }
    }

    pub fn from_rational(n: u32, q: &BigRational) -> Self {
        let f = field(n);
        let mut num = vec![BigInt::zero(); f.phi];
        num[0] = q.numer().clone();
        CycloNum { field: f, repr: Repr::from_big((num, q.denom().clone())) }
    }

    /// ζ_n^j; the exponent is taken modulo n.
    pub fn root_of_unity(n: u32, j: i64) -> Self {
        let f = field(n);
        let e = j.rem_euclid(n as i64) as usize;
        CycloNum { field: f, repr: Repr::Small { num: f.red[e].clone(), den: 1 } }
    }

    /// Builds Σ c_j ζ_n^j from arbitrary exponents (reduced modulo n).
    pub fn from_terms(n: u32, terms: &[(i64, BigRational)]) -> Self {
        let mut acc = CycloNum::zero(n);
        for (j, c) in terms {
            acc += &(&CycloNum::root_of_unity(n, *j) * &CycloNum::from_rational(n, c));
        }
        acc
    }

    pub fn conductor(&self) -> u32 {
        self.field.n
    }

    pub fn field_data(&self) -> &'static FieldData {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.repr.coeff(0).is_one()
    }

    /// True when the value lies in Q.
    pub fn is_rational(&self) -> bool {
        self.repr.is_rational()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.repr.coeff(0))
    }

    /// Power-basis coordinates: `(j, c_j)` for every nonzero coefficient of ζ^j, `j < φ(N)`.
    pub fn terms(&self) -> Vec<(u32, BigRational)> {
        (0..self.field.phi)
            .map(|i| (i as u32, self.repr.coeff(i)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// The representation is kept canonical by every operation; this returns a copy.
    pub fn canonicalize(&self) -> Self {
        self.clone()
    }

    /// Image under the field automorphism ζ ↦ ζ^a (`a` coprime to the conductor).
    pub fn galois(&self, a: u32) -> Self {
        let n = self.field.n as usize;
        assert!((a as usize).gcd(&n) == 1 || n <= 2, "Galois exponent must be a unit");
        let a = a as usize % n.max(1);
        CycloNum { field: self.field, repr: self.repr.linear_map(self.field, move |j| (a * j) % n) }
    }

    /// Complex conjugation ζ ↦ ζ^(N-1).
    pub fn conj(&self) -> Self {
        if self.field.n <= 2 {
            return self.clone();
        }
        self.galois(self.field.n - 1)
    }

    /// Value-preserving embedding into Q(ζ_m), `N | m`.
    pub fn embed_into(&self, m: u32) -> Result<Self> {
        let n = self.field.n;
        if m == 0 || !m.is_multiple_of(n) {
            return Err(Error::NotADivisor { from: n, to: m });
        }
        if m == n {
            return Ok(self.clone());
        }
        let target = field(m);
        let step = (m / n) as usize;
        let mm = m as usize;
        let pad = |r: &Repr| -> Repr {
            match r {
                Repr::Small { num, den } => {
                    let mut v = vec![0i64; target.phi];
                    v[..num.len()].copy_from_slice(num);
                    Repr::Small { num: v, den: *den }
                }
                Repr::Big { num, den } => {
                    let mut v = vec![BigInt::zero(); target.phi];
                    v[..num.len()].clone_from_slice(num);
                    Repr::Big { num: v, den: den.clone() }
                }
            }
        };
        let widened = pad(&self.repr);
        Ok(CycloNum { field: target, repr: widened.linear_map(target, move |j| (j * step) % mm) })
    }

    fn lift_pair(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        let (n, m) = (a.field.n, b.field.n);
        if n == m {
            return (a.clone(), b.clone());
        }
        let l = n.lcm(&m);
        (a.embed_into(l).expect("lcm"), b.embed_into(l).expect("lcm"))
    }

    /// Field norm N(x) = Π σ_a(x) over all units a; a rational number.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for &a in self.field.units.iter().filter(|&&a| a != 1) {
            acc = &acc * &self.galois(a);
        }
        acc.to_rational().expect("norm is rational")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero { conductor: self.field.n });
        }
        let mut others = CycloNum::one(self.field.n);
        for &a in self.field.units.iter().filter(|&&a| a != 1) {
            others = &others * &self.galois(a);
        }
        let norm = (self * &others).to_rational().expect("norm is rational");
        let scale = CycloNum::from_rational(self.field.n, &norm.recip());
        Ok(&others * &scale)
    }

    pub fn checked_div(&self, other: &CycloNum) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycloNum::one(self.field.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplies by the rational `p/q`.
    pub fn scale(&self, p: i64, q: i64) -> Self {
        self * &CycloNum::from_ratio(1, p, q)
    }

    /// Floating-point approximation, for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.field.n as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.terms() {
            let v = c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
            let t = 2.0 * std::f64::consts::PI * j as f64 / n;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }

    pub fn add_assign_ref(&mut self, other: &CycloNum) {
        if self.field.n == other.field.n {
            self.repr = self.repr.add(&other.repr, 1);
        } else {
            *self = &*self + other;
        }
    }
}

impl Hash for CycloNum {
    /// Hashes conductor and coordinates: consistent with `==` for values of equal conductor.
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.n.hash(state);
        self.repr.hash(state);
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.field.n == other.field.n {
            return self.repr == other.repr;
        }
        let (a, b) = CycloNum::lift_pair(self, other);
        a.repr == b.repr
    }
}

impl Eq for CycloNum {}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        if self.field.n == rhs.field.n {
            return CycloNum { field: self.field, repr: self.repr.add(&rhs.repr, 1) };
        }
        let (a, b) = CycloNum::lift_pair(self, rhs);
        &a + &b
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        if self.field.n == rhs.field.n {
            return CycloNum { field: self.field, repr: self.repr.add(&rhs.repr, -1) };
        }
        let (a, b) = CycloNum::lift_pair(self, rhs);
        &a - &b
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        if self.field.n != rhs.field.n {
            if rhs.field.n == 1 || (rhs.is_rational() && self.field.n.is_multiple_of(rhs.field.n)) {
                let r = rhs.embed_into(self.field.n).expect("divides");
                return self * &r;
            }
            if self.field.n == 1 || (self.is_rational() && rhs.field.n.is_multiple_of(self.field.n)) {
                let l = self.embed_into(rhs.field.n).expect("divides");
                return &l * rhs;
            }
            let (a, b) = CycloNum::lift_pair(self, rhs);
            return &a * &b;
        }
        CycloNum { field: self.field, repr: self.repr.mul(&rhs.repr, self.field) }
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum::zero(self.field.n).sub(self)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl AddAssign<&CycloNum> for CycloNum {
    fn add_assign(&mut self, rhs: &CycloNum) {
        self.add_assign_ref(rhs);
    }
}

impl SubAssign<&CycloNum> for CycloNum {
    fn sub_assign(&mut self, rhs: &CycloNum) {
        *self = &*self - rhs;
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.field.n;
        for (idx, (j, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            match *j {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if *j == 1 {
                        write!(f, "z{n}")?;
                    } else {
                        write!(f, "z{n}^{j}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Formats a rational as `p/q` in lowest terms (q = 1 for integers).
pub fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|e| Error::Parse(format!("{t:?}: {e}")));
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    conductor: u32,
    terms: Vec<(i64, String)>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson {
            conductor: self.field.n,
            terms: self.terms().iter().map(|(j, c)| (*j as i64, rational_to_string(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CycloJson::deserialize(d)?;
        if raw.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let terms = raw
            .terms
            .iter()
            .map(|(j, c)| parse_rational(c).map(|q| (*j, q)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(CycloNum::from_terms(raw.conductor, &terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, j: i64) -> CycloNum {
        CycloNum::root_of_unity(n, j)
    }

    #[test]
    fn cyclotomic_polynomials_match_known_values() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(20), vec![1, 0, -1, 0, 1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).iter().filter(|&&c| c == -2).count(), 2);
    }

    #[test]
    fn roots_of_unity() {
        assert!(z(1, 0).is_one());
        assert_eq!(&z(4, 1) * &z(4, 1), CycloNum::from_int(4, -1));
        assert!(z(8, 1).pow(8).unwrap().is_one());
        assert_eq!(z(8, 1).pow(4).unwrap(), CycloNum::from_int(8, -1));
        assert_eq!(z(8, 13), z(8, 5));
        assert_eq!(z(8, -3), z(8, 5));
    }

    #[test]
    fn field_operations() {
        assert!((&z(8, 1).inv().unwrap() * &z(8, 1)).is_one());
        assert!((&(&CycloNum::one(3) + &z(3, 1)) + &z(3, 2)).is_zero());
        assert_eq!(z(4, 1).conj(), -z(4, 1));
        assert!(CycloNum::zero(5).inv().is_err());
        let x = &CycloNum::from_ratio(20, 3, 7) + &z(20, 3);
        assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn embeddings() {
        assert_eq!(z(4, 1).embed_into(8).unwrap(), z(8, 2));
        assert!(CycloNum::one(1).embed_into(60).unwrap().is_one());
        let w = z(3, 1).embed_into(12).unwrap();
        assert!(w.pow(3).unwrap().is_one());
        assert!(z(3, 1).embed_into(8).is_err());
        assert_eq!(z(3, 1), z(12, 4));
        assert_eq!(&z(3, 1) * &z(4, 1), z(12, 7));
    }

    #[test]
    fn big_fallback_and_back() {
        let mut x = CycloNum::from_ratio(8, i64::MAX, 3);
        x = &x * &x;
        assert!(!x.repr.is_small());
        let y = x.inv().unwrap();
        let one = &x * &y;
        assert!(one.is_one() && one.repr.is_small());
    }

    #[test]
    fn json_roundtrip() {
        let x = &CycloNum::from_ratio(8, -1, 2) + &z(8, 3);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"conductor":8,"terms":[[0,"-1/2"],[3,"1/1"]]}"#);
        let back: CycloNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
