//! Truncated noncommutative power series in the letters `a`, `b`.
//!
//! Series are stored densely in the word basis: every word of length `≤ N`
//! owns a slot. Lie elements are ordinary series whose homogeneous components
//! pass the Dynkin criterion, see [`NcSeries::is_lie`].

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symring::{bernoulli, inv_factorial, rat, rat_int, Rational, SymCoeff};

pub const MAX_TRUNCATION: usize = 20;
pub const DEFAULT_TRUNCATION: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
}

/// A word over `{a, b}`; the first letter sits in the most significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NcWord {
    len: u8,
    bits: u32,
}

impl NcWord {
    pub const EMPTY: NcWord = NcWord { len: 0, bits: 0 };

    pub fn from_letters(letters: &[Letter]) -> NcWord {
        assert!(letters.len() <= MAX_TRUNCATION);
        let bits = letters.iter().fold(0u32, |acc, l| (acc << 1) | (*l == Letter::B) as u32);
        NcWord { len: letters.len() as u8, bits }
    }

    pub fn parse(s: &str) -> Result<NcWord> {
        let letters = s
            .chars()
            .map(|c| match c {
                'a' => Ok(Letter::A),
                'b' => Ok(Letter::B),
                other => Err(Error::Parse(format!("unexpected letter {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() > MAX_TRUNCATION {
            return Err(Error::Parse(format!("word longer than {MAX_TRUNCATION}")));
        }
        Ok(NcWord::from_letters(&letters))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.len as usize
    }

    pub fn letter(&self, i: usize) -> Letter {
        debug_assert!(i < self.len());
        if (self.bits >> (self.len as usize - 1 - i)) & 1 == 1 {
            Letter::B
        } else {
            Letter::A
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len()).map(move |i| self.letter(i))
    }

    pub fn concat(&self, other: &NcWord) -> NcWord {
        NcWord { len: self.len + other.len, bits: (self.bits << other.len) | other.bits }
    }

    /// Number of `a` letters and number of `b` letters.
    pub fn letter_counts(&self) -> (usize, usize) {
        let nb = self.bits.count_ones() as usize;
        (self.len() - nb, nb)
    }

    fn index(&self) -> usize {
        (1usize << self.len) - 1 + self.bits as usize
    }

    fn from_index(idx: usize) -> NcWord {
        let len = usize::BITS - (idx + 1).leading_zeros() - 1;
        NcWord { len: len as u8, bits: (idx + 1 - (1 << len)) as u32 }
    }
}

impl fmt::Display for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in self.letters() {
            write!(f, "{}", if l == Letter::A { 'a' } else { 'b' })?;
        }
        Ok(())
    }
}

/// Truncated series `Σ c_w w` over words of length `≤ trunc_weight`.
///
/// `zeta_cap`, when set, drops every coefficient monomial whose total ζ-degree
/// exceeds the cap after each product.
#[derive(Clone, Debug, PartialEq)]
pub struct NcSeries {
    coeffs: Vec<SymCoeff>,
    trunc: usize,
    zeta_cap: Option<u32>,
}

impl NcSeries {
    pub fn zero(trunc: usize) -> Result<NcSeries> {
        if !(1..=MAX_TRUNCATION).contains(&trunc) {
            return Err(Error::InvalidTruncation { value: trunc as i64, reason: "truncation weight must be in 1..=20" });
        }
        Ok(NcSeries { coeffs: vec![SymCoeff::zero(); (1 << (trunc + 1)) - 1], trunc, zeta_cap: None })
    }

    pub fn one(trunc: usize) -> Result<NcSeries> {
        let mut s = NcSeries::zero(trunc)?;
        s.coeffs[0] = SymCoeff::one();
        Ok(s)
    }

    pub fn letter(l: Letter, trunc: usize) -> Result<NcSeries> {
        NcSeries::word(NcWord::from_letters(&[l]), SymCoeff::one(), trunc)
    }

    pub fn a(trunc: usize) -> Result<NcSeries> {
        NcSeries::letter(Letter::A, trunc)
    }

    pub fn b(trunc: usize) -> Result<NcSeries> {
        NcSeries::letter(Letter::B, trunc)
    }

    pub fn word(w: NcWord, c: SymCoeff, trunc: usize) -> Result<NcSeries> {
        let mut s = NcSeries::zero(trunc)?;
        if w.len() <= trunc {
            s.coeffs[w.index()] = c;
        }
        Ok(s)
    }

    pub fn with_zeta_cap(mut self, cap: Option<u32>) -> NcSeries {
        self.zeta_cap = cap;
        if let Some(c) = cap {
            for v in &mut self.coeffs {
                *v = v.truncate_zeta_degree(c);
            }
        }
        self
    }

    pub fn zeta_cap(&self) -> Option<u32> {
        self.zeta_cap
    }

    pub fn trunc_weight(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, w: &NcWord) -> &SymCoeff {
        static ZERO: std::sync::OnceLock<SymCoeff> = std::sync::OnceLock::new();
        if w.len() > self.trunc {
            return ZERO.get_or_init(SymCoeff::zero);
        }
        &self.coeffs[w.index()]
    }

    pub fn constant_term(&self) -> &SymCoeff {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(SymCoeff::is_zero)
    }

    /// Nonzero `(word, coefficient)` pairs in length-then-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (NcWord, &SymCoeff)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (NcWord::from_index(i), c))
    }

    /// Homogeneous component of the given weight, as a series.
    pub fn component(&self, weight: usize) -> NcSeries {
        let mut out = NcSeries { coeffs: vec![SymCoeff::zero(); self.coeffs.len()], trunc: self.trunc, zeta_cap: self.zeta_cap };
        if weight <= self.trunc {
            let lo = (1usize << weight) - 1;
            let hi = (1usize << (weight + 1)) - 1;
            out.coeffs[lo..hi].clone_from_slice(&self.coeffs[lo..hi]);
        }
        out
    }

    pub fn set_coeff(&mut self, w: NcWord, c: SymCoeff) {
        if w.len() <= self.trunc {
            self.coeffs[w.index()] = c;
        }
    }

    fn check_compatible(&self, other: &NcSeries) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(self.trunc as i64, other.trunc as i64));
        }
        Ok(())
    }

    fn joint_cap(&self, other: &NcSeries) -> Option<u32> {
        match (self.zeta_cap, other.zeta_cap) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, other: &NcSeries) -> Result<NcSeries> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y).collect();
        Ok(NcSeries { coeffs, trunc: self.trunc, zeta_cap: self.joint_cap(other) })
    }

    pub fn sub(&self, other: &NcSeries) -> Result<NcSeries> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x - y).collect();
        Ok(NcSeries { coeffs, trunc: self.trunc, zeta_cap: self.joint_cap(other) })
    }

    pub fn neg(&self) -> NcSeries {
        NcSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), ..self.clone_shape() }
    }

    fn clone_shape(&self) -> NcSeries {
        NcSeries { coeffs: Vec::new(), trunc: self.trunc, zeta_cap: self.zeta_cap }
    }

    pub fn scale(&self, c: &SymCoeff) -> NcSeries {
        let coeffs = self.coeffs.iter().map(|x| x.mul_capped(c, self.zeta_cap)).collect();
        NcSeries { coeffs, ..self.clone_shape() }
    }

    pub fn scale_rational(&self, r: &Rational) -> NcSeries {
        NcSeries { coeffs: self.coeffs.iter().map(|x| x.scale(r)).collect(), ..self.clone_shape() }
    }

    /// Concatenation product truncated at `N`.
    pub fn mul(&self, other: &NcSeries) -> Result<NcSeries> {
        self.check_compatible(other)?;
        let n = self.trunc;
        let cap = self.joint_cap(other);
        let by_len = |s: &NcSeries| -> Vec<Vec<(NcWord, usize)>> {
            let mut out = vec![Vec::new(); n + 1];
            for (i, c) in s.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let w = NcWord::from_index(i);
                    out[w.len()].push((w, i));
                }
            }
            out
        };
        let left = by_len(self);
        let right = by_len(other);
        // Each output length is independent, so lengths are filled in parallel.
        let blocks: Vec<Vec<SymCoeff>> = (0..=n)
            .into_par_iter()
            .map(|len| {
                let mut block = vec![SymCoeff::zero(); 1 << len];
                for llen in 0..=len {
                    let rlen = len - llen;
                    for &(lw, li) in &left[llen] {
                        let lc = &self.coeffs[li];
                        for &(rw, ri) in &right[rlen] {
                            let w = lw.concat(&rw);
                            block[w.bits as usize].add_mul_assign(lc, &other.coeffs[ri], cap);
                        }
                    }
                }
                block
            })
            .collect();
        let coeffs = blocks.into_iter().flatten().collect();
        Ok(NcSeries { coeffs, trunc: n, zeta_cap: cap })
    }

    /// Commutator `xy - yx`.
    pub fn bracket(&self, other: &NcSeries) -> Result<NcSeries> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `Σ_{n≤N} xⁿ/n!`; requires zero constant term.
    pub fn exp(&self) -> Result<NcSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::ExpConstantTerm(self.constant_term().to_string()));
        }
        let mut result = NcSeries::one(self.trunc)?.with_zeta_cap(self.zeta_cap);
        let mut power = result.clone();
        for k in 1..=self.trunc as u32 {
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
            result = result.add(&power.scale_rational(&inv_factorial(k)))?;
        }
        Ok(result)
    }

    /// `Σ_{n≤N} (-1)^{n+1}(x-1)ⁿ/n`; requires constant term 1.
    pub fn log(&self) -> Result<NcSeries> {
        if self.constant_term() != &SymCoeff::one() {
            return Err(Error::LogConstantTerm(self.constant_term().to_string()));
        }
        let mut y = self.clone();
        y.coeffs[0] = SymCoeff::zero();
        let mut result = NcSeries::zero(self.trunc)?.with_zeta_cap(self.zeta_cap);
        let mut power = y.clone();
        for k in 1..=self.trunc as i64 {
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale_rational(&rat(sign, k)))?;
            power = power.mul(&y)?;
        }
        Ok(result)
    }

    /// `ad(self)^k (other)`.
    pub fn ad_pow(&self, k: usize, other: &NcSeries) -> Result<NcSeries> {
        let mut out = other.clone();
        for _ in 0..k {
            out = self.bracket(&out)?;
        }
        Ok(out)
    }

    /// Dynkin map: each word `x₁…x_n` goes to `[…[[x₁,x₂],x₃]…,x_n]`.
    pub fn dynkin(&self) -> NcSeries {
        let mut out = NcSeries { coeffs: vec![SymCoeff::zero(); self.coeffs.len()], ..self.clone_shape() };
        for weight in 1..=self.trunc {
            let lo = (1usize << weight) - 1;
            let block: BTreeMap<u32, SymCoeff> = self.coeffs[lo..lo + (1 << weight)]
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(bits, c)| (bits as u32, c.clone()))
                .collect();
            if block.is_empty() {
                continue;
            }
            let image = dynkin_homogeneous(weight, &block);
            for (bits, c) in image {
                out.coeffs[lo + bits as usize] = c;
            }
        }
        out
    }

    /// Dynkin criterion: zero constant term and `D(L_w) = w·L_w` for each weight `w`.
    pub fn lie_defect(&self) -> Option<usize> {
        if !self.constant_term().is_zero() {
            return Some(0);
        }
        let d = self.dynkin();
        for weight in 1..=self.trunc {
            let lo = (1usize << weight) - 1;
            let w = rat_int(weight as i64);
            for i in lo..lo + (1 << weight) {
                if d.coeffs[i] != self.coeffs[i].scale(&w) {
                    return Some(weight);
                }
            }
        }
        None
    }

    pub fn is_lie(&self) -> bool {
        self.lie_defect().is_none()
    }

    pub fn ensure_lie(&self) -> Result<()> {
        match self.lie_defect() {
            Some(weight) => Err(Error::NotLie { weight }),
            None => Ok(()),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&SymCoeff) -> SymCoeff) -> NcSeries {
        NcSeries { coeffs: self.coeffs.iter().map(f).collect(), ..self.clone_shape() }
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.terms().map(|(w, c)| format!("({c}) {w}")).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&NcSeriesJson::from(self)).expect("series serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<NcSeries> {
        let raw: NcSeriesJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = NcSeries::zero(raw.trunc)?;
        for (k, c) in raw.coeffs {
            let w = if k.is_empty() || k == "1" { NcWord::EMPTY } else { NcWord::parse(&k)? };
            if w.len() > raw.trunc {
                return Err(Error::Parse(format!("word {k:?} exceeds truncation {}", raw.trunc)));
            }
            out.coeffs[w.index()] += &c;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct NcSeriesJson {
    trunc: usize,
    coeffs: BTreeMap<String, SymCoeff>,
}

impl From<&NcSeries> for NcSeriesJson {
    fn from(s: &NcSeries) -> Self {
        NcSeriesJson {
            trunc: s.trunc,
            coeffs: s
                .terms()
                .map(|(w, c)| (if w.is_empty() { String::new() } else { w.to_string() }, c.clone()))
                .collect(),
        }
    }
}

fn dynkin_homogeneous(weight: usize, block: &BTreeMap<u32, SymCoeff>) -> BTreeMap<u32, SymCoeff> {
    if weight == 1 {
        return block.clone();
    }
    // D(Σ P_x x) = Σ_x [D(P_x), x], splitting words by their last letter.
    let mut prefixes: [BTreeMap<u32, SymCoeff>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for (bits, c) in block {
        prefixes[(bits & 1) as usize].insert(bits >> 1, c.clone());
    }
    let mut out: BTreeMap<u32, SymCoeff> = BTreeMap::new();
    for (letter, pre) in prefixes.iter().enumerate() {
        if pre.is_empty() {
            continue;
        }
        let d = dynkin_homogeneous(weight - 1, pre);
        let letter = letter as u32;
        for (bits, c) in d {
            // P x
            *out.entry((bits << 1) | letter).or_default() += &c;
            // - x P
            *out.entry((letter << (weight - 1)) | bits).or_default() -= &c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Generators of the genus-zero Lie algebra mapped by [`iota`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenusZeroGen {
    X0,
    X1,
    XInf,
}

/// The morphism `x₀ ↦ Σ_{k<N} B_k/k! ad^k(a)(b)`, `x₁ ↦ [a,b]`, `x_∞ ↦ -x₀ - x₁`.
pub fn iota(gen: GenusZeroGen, trunc: usize) -> Result<NcSeries> {
    if trunc < 2 {
        return Err(Error::InvalidTruncation { value: trunc as i64, reason: "iota needs N >= 2" });
    }
    let a = NcSeries::a(trunc)?;
    let b = NcSeries::b(trunc)?;
    let x1 = a.bracket(&b)?;
    let x0 = || -> Result<NcSeries> {
        let mut acc = NcSeries::zero(trunc)?;
        let mut ad = b.clone();
        for k in 0..trunc as u32 {
            acc = acc.add(&ad.scale_rational(&(bernoulli(k) * inv_factorial(k))))?;
            ad = a.bracket(&ad)?;
        }
        Ok(acc)
    };
    match gen {
        GenusZeroGen::X1 => Ok(x1),
        GenusZeroGen::X0 => x0(),
        GenusZeroGen::XInf => Ok(x0()?.add(&x1)?.neg()),
    }
}

/// Value of the Tsunogai derivation `ε_{2k}` on the letter `a`.
pub fn epsilon_on_a(two_k: u32, trunc: usize) -> Result<NcSeries> {
    check_even(two_k)?;
    let a = NcSeries::a(trunc)?;
    let b = NcSeries::b(trunc)?;
    if two_k == 0 {
        return Ok(b.neg());
    }
    let prefactor = rat_int(2) * inv_factorial(two_k - 2);
    Ok(a.ad_pow(two_k as usize, &b)?.scale_rational(&prefactor))
}

/// Value of `ε_{2k}` on `b`: `2/(2k-2)! Σ_{0≤j<k} (-1)^j [ad^j(a)(b), ad^{2k-1-j}(a)(b)]`.
pub fn epsilon_on_b(two_k: u32, trunc: usize) -> Result<NcSeries> {
    check_even(two_k)?;
    if two_k == 0 {
        return NcSeries::zero(trunc);
    }
    let a = NcSeries::a(trunc)?;
    let b = NcSeries::b(trunc)?;
    let mut ads = vec![b.clone()];
    for _ in 1..two_k {
        let next = a.bracket(ads.last().unwrap())?;
        ads.push(next);
    }
    let k = two_k / 2;
    let mut acc = NcSeries::zero(trunc)?;
    for j in 0..k as usize {
        let term = ads[j].bracket(&ads[two_k as usize - 1 - j])?;
        acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc.scale_rational(&(rat_int(2) * inv_factorial(two_k - 2))))
}

fn check_even(two_k: u32) -> Result<()> {
    if !two_k.is_multiple_of(2) {
        return Err(Error::InvalidWeight(two_k as i64, "derivation index must be even"));
    }
    Ok(())
}

/// Applies the derivation `ε_{2k}` to a Lie element.
pub fn epsilon_free(two_k: u32, x: &NcSeries) -> Result<NcSeries> {
    x.ensure_lie()?;
    apply_derivation(x, &epsilon_on_a(two_k, x.trunc)?, &epsilon_on_b(two_k, x.trunc)?)
}

/// Extends `a ↦ da`, `b ↦ db` to a derivation of the associative algebra and applies it.
pub fn apply_derivation(x: &NcSeries, da: &NcSeries, db: &NcSeries) -> Result<NcSeries> {
    x.check_compatible(da)?;
    x.check_compatible(db)?;
    let n = x.trunc;
    let mut out = NcSeries::zero(n)?.with_zeta_cap(x.zeta_cap);
    let images = [da.terms().map(|(w, c)| (w, c.clone())).collect::<Vec<_>>(), db.terms().map(|(w, c)| (w, c.clone())).collect()];
    for (w, c) in x.terms() {
        for i in 0..w.len() {
            let prefix = NcWord { len: i as u8, bits: w.bits >> (w.len() - i) };
            let rest_len = w.len() - i - 1;
            let suffix = NcWord { len: rest_len as u8, bits: w.bits & ((1u32 << rest_len) - 1) };
            let li = (w.letter(i) == Letter::B) as usize;
            for (iw, ic) in &images[li] {
                if prefix.len() + iw.len() + suffix.len() > n {
                    continue;
                }
                let word = prefix.concat(iw).concat(&suffix);
                out.coeffs[word.index()].add_mul_assign(c, ic, x.zeta_cap);
            }
        }
    }
    Ok(out)
}

impl NcWord {
    /// All words of the given length.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = NcWord> {
        (0..1u32 << len).map(move |bits| NcWord { len: len as u8, bits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> NcWord {
        NcWord::parse(s).unwrap()
    }

    #[test]
    fn index_roundtrip() {
        for len in 0..6 {
            for word in NcWord::all_of_length(len) {
                assert_eq!(NcWord::from_index(word.index()), word);
            }
        }
    }

    #[test]
    fn products() {
        let n = 4;
        let a = NcSeries::a(n).unwrap();
        let b = NcSeries::b(n).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.terms().count(), 1);
        assert_eq!(ab.coeff(&w("ab")), &SymCoeff::one());

        let one = NcSeries::one(n).unwrap();
        let p = one.add(&a).unwrap().mul(&one.add(&b).unwrap()).unwrap();
        for word in ["", "a", "b", "ab"] {
            let key = if word.is_empty() { NcWord::EMPTY } else { w(word) };
            assert_eq!(p.coeff(&key), &SymCoeff::one());
        }
        assert_eq!(p.terms().count(), 4);

        let br = a.bracket(&b).unwrap();
        assert_eq!(br.coeff(&w("ab")), &SymCoeff::one());
        assert_eq!(br.coeff(&w("ba")), &SymCoeff::from_int(-1));
    }

    #[test]
    fn mismatched_truncation() {
        let a = NcSeries::a(3).unwrap();
        let b = NcSeries::b(4).unwrap();
        assert_eq!(a.mul(&b).unwrap_err(), Error::TruncationMismatch(3, 4));
    }

    #[test]
    fn exp_and_log_examples() {
        let a = NcSeries::a(2).unwrap();
        let e = a.exp().unwrap();
        assert_eq!(e.coeff(&NcWord::EMPTY), &SymCoeff::one());
        assert_eq!(e.coeff(&w("a")), &SymCoeff::one());
        assert_eq!(e.coeff(&w("aa")), &SymCoeff::from_rational(rat(1, 2)));
        assert_eq!(e.log().unwrap(), a);

        let n = 4;
        let a = NcSeries::a(n).unwrap();
        let b = NcSeries::b(n).unwrap();
        let bch = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap().log().unwrap();
        let half_bracket = a.bracket(&b).unwrap().scale_rational(&rat(1, 2));
        assert_eq!(bch.component(2), half_bracket.component(2));
        assert!(bch.is_lie());
    }

    #[test]
    fn exp_log_preconditions() {
        let one = NcSeries::one(3).unwrap();
        assert!(matches!(one.exp(), Err(Error::ExpConstantTerm(_))));
        let a = NcSeries::a(3).unwrap();
        assert!(matches!(a.log(), Err(Error::LogConstantTerm(_))));
    }

    #[test]
    fn lie_check_examples() {
        let n = 5;
        let a = NcSeries::a(n).unwrap();
        let b = NcSeries::b(n).unwrap();
        assert!(a.ad_pow(2, &b).unwrap().is_lie());
        let ab = a.mul(&b).unwrap();
        assert!(!ab.is_lie());
        assert_eq!(ab.lie_defect(), Some(2));
        assert_eq!(epsilon_free(0, &ab).unwrap_err(), Error::NotLie { weight: 2 });
    }

    #[test]
    fn dynkin_of_ab_is_bracket() {
        let n = 3;
        let ab = NcSeries::word(w("ab"), SymCoeff::one(), n).unwrap();
        let expected = NcSeries::a(n).unwrap().bracket(&NcSeries::b(n).unwrap()).unwrap();
        assert_eq!(ab.dynkin(), expected);
    }

    #[test]
    fn iota_examples() {
        let n = 6;
        let x1 = iota(GenusZeroGen::X1, n).unwrap();
        assert_eq!(x1.coeff(&w("ab")), &SymCoeff::one());
        assert_eq!(x1.coeff(&w("ba")), &SymCoeff::from_int(-1));

        let x0 = iota(GenusZeroGen::X0, n).unwrap();
        assert_eq!(x0.component(1), NcSeries::b(n).unwrap());
        let ab = NcSeries::a(n).unwrap().bracket(&NcSeries::b(n).unwrap()).unwrap();
        assert_eq!(x0.component(2), ab.scale_rational(&rat(-1, 2)));
        assert!(x0.is_lie());

        let xinf = iota(GenusZeroGen::XInf, n).unwrap();
        assert_eq!(xinf.component(1), NcSeries::b(n).unwrap().neg());
    }

    #[test]
    fn epsilon_examples() {
        let n = 10;
        let a = NcSeries::a(n).unwrap();
        let b = NcSeries::b(n).unwrap();
        assert_eq!(epsilon_free(0, &a).unwrap(), b.neg());
        assert!(epsilon_free(0, &b).unwrap().is_zero());
        let ab = a.bracket(&b).unwrap();
        for two_k in [0, 2, 4, 6] {
            assert!(epsilon_free(two_k, &ab).unwrap().is_zero(), "eps_{two_k}([a,b]) != 0");
        }
        assert!(epsilon_free(3, &a).is_err());
    }

    #[test]
    fn json_and_text() {
        let n = 3;
        let s = NcSeries::a(n).unwrap().bracket(&NcSeries::b(n).unwrap()).unwrap();
        assert_eq!(s.to_text(), "(1) ab + (-1) ba");
        let j = s.to_json();
        assert_eq!(NcSeries::from_json(&j).unwrap(), s);
        assert!(NcSeries::from_json(r#"{"trunc":2,"coeffs":{"aba":{"terms":[{"rat":"1"}]}}}"#).is_err());
        assert!(NcSeries::from_json(r#"{"trunc":2,"coeffs":{"ac":{"terms":[{"rat":"1"}]}}}"#).is_err());
    }
}
