//! Exact coefficient ring.
//!
//! A [`SymCoeff`] is a finite rational combination of monomials in the closed
//! alphabet `τ`, `(2πi)^{±1}`, `ζ(n)` (n ≥ 2) and the Eichler-integral symbols
//! `I[n,2k]`. Every scalar in the engine lives here. [`eval_numeric`] is the ring
//! homomorphism to `ℂ` that substitutes numeric values for each symbol.
//!
//! Bernoulli numbers follow the convention `B_1 = -1/2`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::numeric;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `1/n!` as a rational.
pub fn inv_factorial(n: u32) -> Rational {
    Rational::new(BigInt::one(), factorial(n))
}

static BERNOULLI: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// Bernoulli number `B_k` with `B_1 = -1/2`, memoized.
///
/// Computed from `Σ_{j=0}^{k} C(k+1, j) B_j = 0`.
pub fn bernoulli(k: u32) -> Rational {
    let cache = BERNOULLI.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut table = cache.lock().expect("bernoulli cache poisoned");
    while table.len() <= k as usize {
        let m = table.len() as u32;
        let mut sum = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            sum += Rational::from_integer(binomial(m + 1, j as u32)) * b;
        }
        let next = -sum / Rational::from_integer(BigInt::from(m + 1));
        table.push(next);
    }
    table[k as usize].clone()
}

/// Index of an Eichler-integral symbol `I[n, 2k]`; `weight` stores `2k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EichlerIndex {
    pub n: u32,
    pub weight: u32,
}

impl EichlerIndex {
    pub fn new(n: u32, weight: u32) -> Result<Self> {
        if weight < 2 || !weight.is_multiple_of(2) {
            return Err(Error::InvalidWeight(
                weight as i64,
                "Eichler symbols need even weight 2k >= 2",
            ));
        }
        Ok(EichlerIndex { n, weight })
    }
}

type ExpList<K> = SmallVec<[(K, u32); 2]>;

fn merge_exps<K: Ord + Copy>(a: &[(K, u32)], b: &[(K, u32)]) -> ExpList<K> {
    let mut out = ExpList::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn collapse<K: Ord + Copy>(sorted: Vec<(K, u32)>) -> ExpList<K> {
    let mut out: ExpList<K> = ExpList::new();
    for (k, e) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += e,
            _ => out.push((k, e)),
        }
    }
    out.retain(|p| p.1 != 0);
    out
}

/// Monomial `τ^e0 (2πi)^e1 Π ζ(n)^{e_n} Π I[n,2k]^{e_{n,2k}}`.
///
/// Exponent lists are kept sorted by key with no zero exponents, so structural
/// equality is monomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymMonomial {
    tau: u32,
    twopii: i32,
    zeta: ExpList<u32>,
    ei: ExpList<EichlerIndex>,
}

impl SymMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn tau_pow(e: u32) -> Self {
        SymMonomial { tau: e, ..Self::default() }
    }

    pub fn twopii_pow(e: i32) -> Self {
        SymMonomial { twopii: e, ..Self::default() }
    }

    pub fn zeta(n: u32) -> Self {
        assert!(n >= 2, "zeta({n}) is not in the alphabet");
        let mut zeta = ExpList::new();
        zeta.push((n, 1));
        SymMonomial { zeta, ..Self::default() }
    }

    pub fn eichler(idx: EichlerIndex) -> Self {
        let mut ei = ExpList::new();
        ei.push((idx, 1));
        SymMonomial { ei, ..Self::default() }
    }

    pub fn tau_exp(&self) -> u32 {
        self.tau
    }

    pub fn twopii_exp(&self) -> i32 {
        self.twopii
    }

    pub fn zeta_exps(&self) -> &[(u32, u32)] {
        &self.zeta
    }

    pub fn ei_exps(&self) -> &[(EichlerIndex, u32)] {
        &self.ei
    }

    pub fn is_one(&self) -> bool {
        self.tau == 0 && self.twopii == 0 && self.zeta.is_empty() && self.ei.is_empty()
    }

    /// Total degree in the ζ symbols.
    pub fn zeta_degree(&self) -> u32 {
        self.zeta.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &SymMonomial) -> SymMonomial {
        SymMonomial {
            tau: self.tau + other.tau,
            twopii: self.twopii + other.twopii,
            zeta: if other.zeta.is_empty() {
                self.zeta.clone()
            } else {
                merge_exps(&self.zeta, &other.zeta)
            },
            ei: if other.ei.is_empty() {
                self.ei.clone()
            } else {
                merge_exps(&self.ei, &other.ei)
            },
        }
    }

    fn from_parts(tau: u32, twopii: i32, mut zeta: Vec<(u32, u32)>, mut ei: Vec<(EichlerIndex, u32)>) -> Self {
        zeta.sort();
        ei.sort();
        SymMonomial { tau, twopii, zeta: collapse(zeta), ei: collapse(ei) }
    }
}

/// Finite map monomial ↦ nonzero rational.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymCoeff {
    terms: BTreeMap<SymMonomial, Rational>,
}

impl SymCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::monomial(SymMonomial::one(), r)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn monomial(m: SymMonomial, r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(m, r);
        }
        SymCoeff { terms }
    }

    pub fn tau() -> Self {
        Self::monomial(SymMonomial::tau_pow(1), Rational::one())
    }

    pub fn tau_pow(e: u32) -> Self {
        Self::monomial(SymMonomial::tau_pow(e), Rational::one())
    }

    /// `(2πi)^e`, `e` may be negative.
    pub fn twopii_pow(e: i32) -> Self {
        Self::monomial(SymMonomial::twopii_pow(e), Rational::one())
    }

    /// `πi = (2πi)/2`.
    pub fn pi_i() -> Self {
        Self::monomial(SymMonomial::twopii_pow(1), rat(1, 2))
    }

    pub fn zeta(n: u32) -> Self {
        Self::monomial(SymMonomial::zeta(n), Rational::one())
    }

    pub fn eichler(n: u32, weight: u32) -> Result<Self> {
        Ok(Self::monomial(SymMonomial::eichler(EichlerIndex::new(n, weight)?), Rational::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, m: &SymMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Returns the rational value if the coefficient has no symbols.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, r) = self.terms.iter().next().unwrap();
                m.is_one().then(|| r.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: SymMonomial, r: Rational) {
        if r.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(r);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += r;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> SymCoeff {
        if r.is_zero() {
            return SymCoeff::zero();
        }
        SymCoeff { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect() }
    }

    pub fn mul_monomial(&self, m: &SymMonomial) -> SymCoeff {
        SymCoeff { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    /// `self += a·b`, dropping products whose ζ-degree exceeds `zeta_cap`.
    pub fn add_mul_assign(&mut self, a: &SymCoeff, b: &SymCoeff, zeta_cap: Option<u32>) {
        for (ma, ra) in &a.terms {
            let da = ma.zeta_degree();
            for (mb, rb) in &b.terms {
                if let Some(cap) = zeta_cap {
                    if da + mb.zeta_degree() > cap {
                        continue;
                    }
                }
                self.add_term(ma.mul(mb), ra * rb);
            }
        }
    }

    pub fn mul_capped(&self, other: &SymCoeff, zeta_cap: Option<u32>) -> SymCoeff {
        let mut out = SymCoeff::zero();
        out.add_mul_assign(self, other, zeta_cap);
        out
    }

    /// Drops every monomial of ζ-degree above `cap`.
    pub fn truncate_zeta_degree(&self, cap: u32) -> SymCoeff {
        SymCoeff {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.zeta_degree() <= cap)
                .map(|(m, r)| (m.clone(), r.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> SymCoeff {
        (0..e).fold(SymCoeff::one(), |acc, _| &acc * self)
    }

    /// Keeps only monomials satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&SymMonomial) -> bool) -> SymCoeff {
        SymCoeff {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, r)| (m.clone(), r.clone()))
                .collect(),
        }
    }

    pub fn euler_rewrite(&self) -> SymCoeff {
        euler_rewrite(self)
    }

    pub fn to_latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, r)) in self.terms.iter().enumerate() {
            let neg = r.is_negative();
            let abs = r.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = monomial_latex(m);
            let rat_str = if abs.is_integer() {
                abs.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", abs.numer(), abs.denom())
            };
            if mono.is_empty() {
                out.push_str(&rat_str);
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&rat_str);
                out.push_str(&mono);
            }
        }
        out
    }
}

fn monomial_latex(m: &SymMonomial) -> String {
    let mut s = String::new();
    let pow = |base: &str, e: i64| if e == 1 { base.to_string() } else { format!("{base}^{{{e}}}") };
    if m.twopii != 0 {
        s.push_str(&pow("(2\\pi i)", m.twopii as i64));
    }
    if m.tau != 0 {
        s.push_str(&pow("\\tau", m.tau as i64));
    }
    for &(n, e) in &m.zeta {
        s.push_str(&pow(&format!("\\zeta({n})"), e as i64));
    }
    for &(idx, e) in &m.ei {
        s.push_str(&pow(&format!("I_{{{}}}(G_{{{}}})", idx.n, idx.weight), e as i64));
    }
    s
}

impl fmt::Display for SymMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let pow = |base: String, e: i64| if e == 1 { base } else { format!("{base}^{e}") };
        if self.twopii != 0 {
            parts.push(pow("(2πi)".into(), self.twopii as i64));
        }
        if self.tau != 0 {
            parts.push(pow("τ".into(), self.tau as i64));
        }
        for &(n, e) in &self.zeta {
            parts.push(pow(format!("ζ({n})"), e as i64));
        }
        for &(idx, e) in &self.ei {
            parts.push(pow(format!("I[{},{}]", idx.n, idx.weight), e as i64));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Display for SymCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, r)) in self.terms.iter().enumerate() {
            let neg = r.is_negative();
            let abs = r.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a SymCoeff> for &'a SymCoeff {
    type Output = SymCoeff;
    fn add(self, rhs: &SymCoeff) -> SymCoeff {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for SymCoeff {
    type Output = SymCoeff;
    fn add(mut self, rhs: SymCoeff) -> SymCoeff {
        self += &rhs;
        self
    }
}

impl AddAssign<&SymCoeff> for SymCoeff {
    fn add_assign(&mut self, rhs: &SymCoeff) {
        for (m, r) in &rhs.terms {
            self.add_term(m.clone(), r.clone());
        }
    }
}

impl SubAssign<&SymCoeff> for SymCoeff {
    fn sub_assign(&mut self, rhs: &SymCoeff) {
        for (m, r) in &rhs.terms {
            self.add_term(m.clone(), -r.clone());
        }
    }
}

impl<'a> Sub<&'a SymCoeff> for &'a SymCoeff {
    type Output = SymCoeff;
    fn sub(self, rhs: &SymCoeff) -> SymCoeff {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for SymCoeff {
    type Output = SymCoeff;
    fn sub(mut self, rhs: SymCoeff) -> SymCoeff {
        self -= &rhs;
        self
    }
}

impl Neg for &SymCoeff {
    type Output = SymCoeff;
    fn neg(self) -> SymCoeff {
        SymCoeff { terms: self.terms.iter().map(|(m, r)| (m.clone(), -r.clone())).collect() }
    }
}

impl Neg for SymCoeff {
    type Output = SymCoeff;
    fn neg(self) -> SymCoeff {
        -&self
    }
}

impl<'a> Mul<&'a SymCoeff> for &'a SymCoeff {
    type Output = SymCoeff;
    fn mul(self, rhs: &SymCoeff) -> SymCoeff {
        self.mul_capped(rhs, None)
    }
}

impl Mul for SymCoeff {
    type Output = SymCoeff;
    fn mul(self, rhs: SymCoeff) -> SymCoeff {
        &self * &rhs
    }
}

impl From<Rational> for SymCoeff {
    fn from(r: Rational) -> Self {
        SymCoeff::from_rational(r)
    }
}

/// Replaces every even zeta `ζ(2m)` by `-B_{2m}(2πi)^{2m} / (2·(2m)!)`.
pub fn euler_rewrite(c: &SymCoeff) -> SymCoeff {
    let mut out = SymCoeff::zero();
    for (m, r) in &c.terms {
        if m.zeta.iter().all(|&(n, _)| n % 2 == 1) {
            out.add_term(m.clone(), r.clone());
            continue;
        }
        let odd: Vec<(u32, u32)> = m.zeta.iter().copied().filter(|&(n, _)| n % 2 == 1).collect();
        let mut factor = Rational::one();
        let mut twopii = m.twopii;
        for &(n, e) in m.zeta.iter().filter(|&&(n, _)| n % 2 == 0) {
            let value = -bernoulli(n) / Rational::from_integer(BigInt::from(2) * factorial(n));
            for _ in 0..e {
                factor *= &value;
            }
            twopii += (n * e) as i32;
        }
        let base = SymMonomial::from_parts(m.tau, twopii, odd, m.ei.to_vec());
        out.add_term(base, r * factor);
    }
    out
}

/// Numeric assignment for evaluating symbolic coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NumContext {
    pub tau: Complex64,
    pub q_cutoff: usize,
    /// Requested significant digits. Evaluation runs in `f64`, so at most 15 are meaningful.
    pub precision: u32,
    pub quad_tol: f64,
}

impl NumContext {
    pub const DEFAULT_Q_CUTOFF: usize = 64;
    pub const DEFAULT_PRECISION: u32 = 30;
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn new(tau: Complex64, q_cutoff: usize, precision: u32, quad_tol: f64) -> Result<Self> {
        if tau.im.is_nan() || tau.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane { re: tau.re, im: tau.im });
        }
        if q_cutoff < 1 {
            return Err(Error::InvalidTruncation { value: q_cutoff as i64, reason: "q-series cutoff must be >= 1" });
        }
        Ok(NumContext { tau, q_cutoff, precision, quad_tol })
    }

    pub fn at(tau: Complex64) -> Result<Self> {
        Self::new(tau, Self::DEFAULT_Q_CUTOFF, Self::DEFAULT_PRECISION, Self::DEFAULT_TOL)
    }

    pub fn effective_digits(&self) -> u32 {
        self.precision.min(15)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles large numerators and denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn twopii_numeric() -> Complex64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI)
}

/// Evaluates `c` at `ctx.tau`, numeric `2πi`, numeric zeta values and the supplied Eichler values.
pub fn eval_numeric(
    c: &SymCoeff,
    ctx: &NumContext,
    ei_values: &HashMap<EichlerIndex, Complex64>,
) -> Result<Complex64> {
    let twopii = twopii_numeric();
    let mut total = Complex64::new(0.0, 0.0);
    for (m, r) in &c.terms {
        let mut v = Complex64::new(rational_to_f64(r), 0.0);
        if m.tau != 0 {
            v *= ctx.tau.powi(m.tau as i32);
        }
        if m.twopii != 0 {
            v *= twopii.powi(m.twopii);
        }
        for &(n, e) in &m.zeta {
            v *= numeric::zeta(n).powi(e as i32);
        }
        for &(idx, e) in &m.ei {
            let val = ei_values
                .get(&idx)
                .ok_or(Error::UnboundEichler { n: idx.n, weight: idx.weight })?;
            v *= val.powi(e as i32);
        }
        total += v;
    }
    Ok(total)
}

/// Every Eichler symbol occurring in `c`.
pub fn eichler_symbols(c: &SymCoeff) -> Vec<EichlerIndex> {
    let mut out: Vec<EichlerIndex> = c.terms.keys().flat_map(|m| m.ei.iter().map(|&(i, _)| i)).collect();
    out.sort();
    out.dedup();
    out
}

// JSON form: {"terms":[{"rat":"p/q","tau":e0,"twopii":e1,"zeta":{"3":1},"ei":{"0,4":1}}]}

#[derive(Serialize, Deserialize)]
struct TermJson {
    rat: String,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    tau: u32,
    #[serde(default, skip_serializing_if = "is_zero_i32")]
    twopii: i32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    zeta: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    ei: BTreeMap<String, u32>,
}

fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

fn is_zero_i32(v: &i32) -> bool {
    *v == 0
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    terms: Vec<TermJson>,
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for SymCoeff {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, r)| TermJson {
                rat: format_rational(r),
                tau: m.tau,
                twopii: m.twopii,
                zeta: m.zeta.iter().map(|&(n, e)| (n.to_string(), e)).collect(),
                ei: m.ei.iter().map(|&(i, e)| (format!("{},{}", i.n, i.weight), e)).collect(),
            })
            .collect();
        CoeffJson { terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymCoeff {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CoeffJson::deserialize(deserializer)?;
        SymCoeff::from_json_terms(raw).map_err(serde::de::Error::custom)
    }
}

impl SymCoeff {
    fn from_json_terms(raw: CoeffJson) -> Result<SymCoeff> {
        let mut out = SymCoeff::zero();
        for t in raw.terms {
            let r = parse_rational(&t.rat)?;
            let mut zeta = Vec::new();
            for (k, e) in t.zeta {
                let n: u32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad zeta key {k:?}")))?;
                if n < 2 {
                    return Err(Error::Parse(format!("zeta({n}) is not allowed")));
                }
                zeta.push((n, e));
            }
            let mut ei = Vec::new();
            for (k, e) in t.ei {
                let (n, w) = k
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad Eichler key {k:?}")))?;
                let n: u32 = n.trim().parse().map_err(|_| Error::Parse(format!("bad Eichler key {k:?}")))?;
                let w: u32 = w.trim().parse().map_err(|_| Error::Parse(format!("bad Eichler key {k:?}")))?;
                ei.push((EichlerIndex::new(n, w)?, e));
            }
            out.add_term(SymMonomial::from_parts(t.tau, t.twopii, zeta, ei), r);
        }
        Ok(out)
    }

    pub fn from_json(s: &str) -> Result<SymCoeff> {
        let raw: CoeffJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_terms(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("SymCoeff serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_i() -> NumContext {
        NumContext::at(Complex64::new(0.0, 1.0)).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat(0, 1));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        for k in (3..30).step_by(2) {
            assert!(bernoulli(k).is_zero());
        }
    }

    #[test]
    fn euler_rewrite_zeta2() {
        let r = euler_rewrite(&SymCoeff::zeta(2));
        assert_eq!(r, SymCoeff::twopii_pow(2).scale(&rat(-1, 24)));
        assert_eq!(euler_rewrite(&SymCoeff::zeta(3)), SymCoeff::zeta(3));
        assert_eq!(euler_rewrite(&SymCoeff::one()), SymCoeff::one());
    }

    #[test]
    fn euler_rewrite_mixed_monomial() {
        // ζ(2)ζ(3)τ(2πi)^{-1} → -1/24 (2πi) ζ(3) τ
        let c = &(&SymCoeff::zeta(2) * &SymCoeff::zeta(3)) * &(&SymCoeff::tau() * &SymCoeff::twopii_pow(-1));
        let expected = &(&SymCoeff::zeta(3) * &SymCoeff::tau()) * &SymCoeff::twopii_pow(1).scale(&rat(-1, 24));
        assert_eq!(euler_rewrite(&c), expected);
    }

    #[test]
    fn eval_examples() {
        let ctx = ctx_i();
        let none = HashMap::new();
        let v = eval_numeric(&SymCoeff::twopii_pow(2), &ctx, &none).unwrap();
        assert!((v.re + 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12 && v.im.abs() < 1e-12);
        let z2 = eval_numeric(&SymCoeff::zeta(2), &ctx, &none).unwrap();
        assert!((z2.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        let t = eval_numeric(&SymCoeff::tau(), &ctx, &none).unwrap();
        assert_eq!(t, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn unbound_eichler_symbol_errors() {
        let c = SymCoeff::eichler(1, 4).unwrap();
        let err = eval_numeric(&c, &ctx_i(), &HashMap::new()).unwrap_err();
        assert_eq!(err, Error::UnboundEichler { n: 1, weight: 4 });
    }

    #[test]
    fn json_layout_matches_schema() {
        let c = &(&SymCoeff::zeta(3) * &SymCoeff::eichler(0, 4).unwrap()) * &SymCoeff::twopii_pow(-1).scale(&rat(-3, 7));
        let c = &c * &SymCoeff::tau();
        let s = c.to_json();
        assert_eq!(s, r#"{"terms":[{"rat":"-3/7","tau":1,"twopii":-1,"zeta":{"3":1},"ei":{"0,4":1}}]}"#);
        assert_eq!(SymCoeff::from_json(&s).unwrap(), c);
    }

    #[test]
    fn json_rejects_bad_symbols() {
        assert!(SymCoeff::from_json(r#"{"terms":[{"rat":"1","zeta":{"1":1}}]}"#).is_err());
        assert!(SymCoeff::from_json(r#"{"terms":[{"rat":"1/0"}]}"#).is_err());
        assert!(SymCoeff::from_json(r#"{"terms":[{"rat":"1","ei":{"0,3":1}}]}"#).is_err());
    }

    #[test]
    fn json_normalizes_duplicates() {
        let c = SymCoeff::from_json(r#"{"terms":[{"rat":"1/2","tau":1},{"rat":"1/2","tau":1},{"rat":"0"}]}"#).unwrap();
        assert_eq!(c, SymCoeff::tau());
    }

    #[test]
    fn zeta_cap_drops_products() {
        let z = &SymCoeff::zeta(3) + &SymCoeff::one();
        let sq = z.mul_capped(&z, Some(1));
        assert_eq!(sq, &SymCoeff::one() + &SymCoeff::zeta(3).scale(&rat(2, 1)));
    }
}
