//! The meta-abelian quotient `L/[D,D]` with `D = [L,L]`.
//!
//! An element is `αa + βb + P`, where the depth-one part `P(Ū,V)` stands for
//! `P(ad a, ad b)([a,b])` with `ad a = U = 2πi·Ū` and `ad b = V`. Storing
//! the rescaled variable `Ū` keeps the coefficients of every associator
//! component free of stray powers of `2πi`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncseries::{Letter, NcSeries};
use crate::symring::{binomial, eval_numeric, inv_factorial, rat, rat_int, EichlerIndex, NumContext, Rational, SymCoeff};

/// Sparse polynomial in `(Ū, V)` with symbolic coefficients.
///
/// Negative exponents are rejected unless the polynomial was created with
/// [`BiPoly::laurent`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BiPoly {
    terms: BTreeMap<(i32, i32), SymCoeff>,
    laurent: bool,
}

impl BiPoly {
    pub fn zero() -> BiPoly {
        BiPoly::default()
    }

    pub fn laurent() -> BiPoly {
        BiPoly { terms: BTreeMap::new(), laurent: true }
    }

    pub fn constant(c: SymCoeff) -> BiPoly {
        let mut p = BiPoly::zero();
        p.add_term(0, 0, c).expect("constant term is polynomial");
        p
    }

    pub fn monomial(u: i32, v: i32, c: SymCoeff) -> Result<BiPoly> {
        let mut p = BiPoly { terms: BTreeMap::new(), laurent: u < 0 || v < 0 };
        p.add_term(u, v, c)?;
        Ok(p)
    }

    pub fn is_laurent(&self) -> bool {
        self.laurent
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

    pub fn terms(&self) -> impl Iterator<Item = (i32, i32, &SymCoeff)> {
        self.terms.iter().map(|(&(u, v), c)| (u, v, c))
    }

    pub fn coeff(&self, u: i32, v: i32) -> SymCoeff {
        self.terms.get(&(u, v)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, u: i32, v: i32, c: SymCoeff) -> Result<()> {
        if (u < 0 || v < 0) && !self.laurent {
            return Err(Error::LaurentNotAllowed(u, v));
        }
        if c.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry((u, v)).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&(u, v));
        }
        Ok(())
    }

    /// Total degree of the highest monomial, `None` for zero.
    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().map(|(u, v)| u + v).max()
    }

    /// Component of the given total degree.
    pub fn homogeneous(&self, degree: i32) -> BiPoly {
        self.filter(|u, v| u + v == degree)
    }

    pub fn filter(&self, pred: impl Fn(i32, i32) -> bool) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().filter(|((u, v), _)| pred(*u, *v)).map(|(k, c)| (*k, c.clone())).collect(),
            laurent: self.laurent,
        }
    }

    pub fn truncate_degree(&self, max_degree: i32) -> BiPoly {
        self.filter(|u, v| u + v <= max_degree)
    }

    pub fn map_coeffs(&self, f: impl Fn(i32, i32, &SymCoeff) -> SymCoeff) -> BiPoly {
        let mut out = BiPoly { terms: BTreeMap::new(), laurent: self.laurent };
        for (&(u, v), c) in &self.terms {
            out.add_term(u, v, f(u, v, c)).expect("exponents unchanged");
        }
        out
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        out.laurent |= other.laurent;
        for (&(u, v), c) in &other.terms {
            out.add_term(u, v, c.clone()).expect("laurent flag merged");
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BiPoly {
        self.map_coeffs(|_, _, c| -c)
    }

    pub fn scale(&self, c: &SymCoeff) -> BiPoly {
        self.map_coeffs(|_, _, x| x * c)
    }

    pub fn scale_rational(&self, r: &Rational) -> BiPoly {
        self.map_coeffs(|_, _, x| x.scale(r))
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly { terms: BTreeMap::new(), laurent: self.laurent || other.laurent };
        for (&(u1, v1), c1) in &self.terms {
            for (&(u2, v2), c2) in &other.terms {
                out.add_term(u1 + u2, v1 + v2, c1 * c2).expect("laurent flag merged");
            }
        }
        out
    }

    /// Multiplies by `Ū^du V^dv`.
    pub fn shift(&self, du: i32, dv: i32) -> Result<BiPoly> {
        let mut out = BiPoly { terms: BTreeMap::new(), laurent: self.laurent };
        for (&(u, v), c) in &self.terms {
            out.add_term(u + du, v + dv, c.clone())?;
        }
        Ok(out)
    }

    /// `∂/∂Ū`.
    pub fn d_u(&self) -> BiPoly {
        let mut out = BiPoly { terms: BTreeMap::new(), laurent: self.laurent };
        for (&(u, v), c) in &self.terms {
            if u != 0 {
                out.add_term(u - 1, v, c.scale(&rat_int(u as i64))).expect("laurent flag kept");
            }
        }
        out
    }

    /// Substitutes `Ū ↦ Ū + τV`; defined for nonnegative `Ū`-exponents.
    pub fn shear(&self) -> Result<BiPoly> {
        let mut out = BiPoly { terms: BTreeMap::new(), laurent: self.laurent };
        for (&(u, v), c) in &self.terms {
            if u < 0 {
                return Err(Error::NegativeShear(u));
            }
            for j in 0..=u as u32 {
                let coeff = c * &SymCoeff::tau_pow(j).scale(&Rational::from(binomial(u as u32, j)));
                out.add_term(u - j as i32, v + j as i32, coeff)?;
            }
        }
        Ok(out)
    }

    /// Rewrites to the variables `(U, V)` by dividing each `Ū^k` term by `(2πi)^k`.
    pub fn to_u_convention(&self) -> BiPoly {
        self.map_coeffs(|u, _, c| c * &SymCoeff::twopii_pow(-u))
    }

    /// Inverse of [`BiPoly::to_u_convention`].
    pub fn from_u_convention(&self) -> BiPoly {
        self.map_coeffs(|u, _, c| c * &SymCoeff::twopii_pow(u))
    }

    pub fn euler_rewrite(&self) -> BiPoly {
        self.map_coeffs(|_, _, c| c.euler_rewrite())
    }

    /// Evaluates every coefficient, keeping the monomial structure.
    pub fn eval_coeffs(
        &self,
        ctx: &NumContext,
        eichler: &std::collections::HashMap<EichlerIndex, Complex64>,
    ) -> Result<BTreeMap<(i32, i32), Complex64>> {
        self.terms.iter().map(|(k, c)| Ok((*k, eval_numeric(c, ctx, eichler)?))).collect()
    }

    /// Evaluates at numeric `(Ū, V)`.
    pub fn eval_at(
        &self,
        u: Complex64,
        v: Complex64,
        ctx: &NumContext,
        eichler: &std::collections::HashMap<EichlerIndex, Complex64>,
    ) -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for ((eu, ev), c) in self.eval_coeffs(ctx, eichler)? {
            acc += c * u.powi(eu) * v.powi(ev);
        }
        Ok(acc)
    }

    /// First monomial (in exponent order) where the two polynomials differ.
    pub fn first_difference(&self, other: &BiPoly) -> Option<(i32, i32, SymCoeff)> {
        let diff = self.sub(other);
        diff.terms.into_iter().next().map(|((u, v), c)| (u, v, c))
    }
}

impl BiPoly {
    pub fn to_latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let var = |name: &str, e: i32| match e {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{{{e}}}"),
        };
        self.terms
            .iter()
            .map(|(&(u, v), c)| {
                let mono = [var("\\overline{U}", u), var("V", v)].join(" ");
                format!("\\left({}\\right) {}", c.to_latex(), mono.trim())
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(u, v), c)| {
                let mut mono = String::new();
                if u != 0 {
                    mono.push_str(&if u == 1 { "Ū".to_string() } else { format!("Ū^{u}") });
                }
                if v != 0 {
                    if !mono.is_empty() {
                        mono.push('*');
                    }
                    mono.push_str(&if v == 1 { "V".to_string() } else { format!("V^{v}") });
                }
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{mono}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Element `αa + βb + P` of the meta-abelian quotient truncated at weight `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetabElem {
    pub alpha: SymCoeff,
    pub beta: SymCoeff,
    pub depth1: BiPoly,
    trunc: usize,
}

impl MetabElem {
    pub fn new(alpha: SymCoeff, beta: SymCoeff, depth1: BiPoly, trunc: usize) -> Result<MetabElem> {
        if trunc < 1 {
            return Err(Error::InvalidTruncation { value: trunc as i64, reason: "truncation weight must be positive" });
        }
        if depth1.is_laurent() {
            return Err(Error::LaurentNotAllowed(-1, -1));
        }
        Ok(MetabElem { alpha, beta, depth1: depth1.truncate_degree(trunc as i32 - 2), trunc })
    }

    pub fn zero(trunc: usize) -> Result<MetabElem> {
        MetabElem::new(SymCoeff::zero(), SymCoeff::zero(), BiPoly::zero(), trunc)
    }

    pub fn a(trunc: usize) -> Result<MetabElem> {
        MetabElem::new(SymCoeff::one(), SymCoeff::zero(), BiPoly::zero(), trunc)
    }

    pub fn b(trunc: usize) -> Result<MetabElem> {
        MetabElem::new(SymCoeff::zero(), SymCoeff::one(), BiPoly::zero(), trunc)
    }

    pub fn from_depth1(p: BiPoly, trunc: usize) -> Result<MetabElem> {
        MetabElem::new(SymCoeff::zero(), SymCoeff::zero(), p, trunc)
    }

    pub fn trunc_weight(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero() && self.depth1.is_zero()
    }

    fn check(&self, other: &MetabElem) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(self.trunc as i64, other.trunc as i64));
        }
        Ok(())
    }

    pub fn add(&self, other: &MetabElem) -> Result<MetabElem> {
        self.check(other)?;
        MetabElem::new(&self.alpha + &other.alpha, &self.beta + &other.beta, self.depth1.add(&other.depth1), self.trunc)
    }

    pub fn sub(&self, other: &MetabElem) -> Result<MetabElem> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MetabElem {
        MetabElem { alpha: -&self.alpha, beta: -&self.beta, depth1: self.depth1.neg(), trunc: self.trunc }
    }

    pub fn scale(&self, c: &SymCoeff) -> MetabElem {
        MetabElem { alpha: &self.alpha * c, beta: &self.beta * c, depth1: self.depth1.scale(c), trunc: self.trunc }
    }

    pub fn map_coeffs(&self, f: impl Fn(&SymCoeff) -> SymCoeff) -> MetabElem {
        MetabElem { alpha: f(&self.alpha), beta: f(&self.beta), depth1: self.depth1.map_coeffs(|_, _, c| f(c)), trunc: self.trunc }
    }

    pub fn euler_rewrite(&self) -> MetabElem {
        self.map_coeffs(SymCoeff::euler_rewrite)
    }

    /// Depth-one image of the linear part: `αU + βV`.
    fn linear_as_multiplier(&self) -> BiPoly {
        let mut p = BiPoly::zero();
        p.add_term(1, 0, &self.alpha * &SymCoeff::twopii_pow(1)).unwrap();
        p.add_term(0, 1, self.beta.clone()).unwrap();
        p
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MetabJson::from(self)).expect("metab serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<MetabElem> {
        let raw: MetabJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.trunc < 1 || raw.trunc > 64 {
            return Err(Error::Parse(format!("truncation {} out of range", raw.trunc)));
        }
        let mut p = BiPoly::zero();
        for t in raw.depth1 {
            if t.u < 0 || t.v < 0 {
                return Err(Error::Parse(format!("negative exponent ({}, {})", t.u, t.v)));
            }
            if (t.u + t.v) as i64 > raw.trunc as i64 - 2 {
                return Err(Error::Parse(format!("monomial ({}, {}) exceeds truncation {}", t.u, t.v, raw.trunc)));
            }
            p.add_term(t.u, t.v, t.c)?;
        }
        MetabElem::new(raw.alpha, raw.beta, p, raw.trunc)
    }
}

impl MetabElem {
    pub fn to_latex(&self) -> String {
        format!(
            "\\left({}\\right) a + \\left({}\\right) b + {}",
            self.alpha.to_latex(),
            self.beta.to_latex(),
            self.depth1.to_latex()
        )
    }
}

impl fmt::Display for MetabElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*a + ({})*b + [{}]", self.alpha, self.beta, self.depth1)
    }
}

#[derive(Serialize, Deserialize)]
struct MetabTermJson {
    u: i32,
    v: i32,
    c: SymCoeff,
}

#[derive(Serialize, Deserialize)]
struct MetabJson {
    trunc: usize,
    alpha: SymCoeff,
    beta: SymCoeff,
    depth1: Vec<MetabTermJson>,
}

impl From<&MetabElem> for MetabJson {
    fn from(m: &MetabElem) -> Self {
        MetabJson {
            trunc: m.trunc,
            alpha: m.alpha.clone(),
            beta: m.beta.clone(),
            depth1: m.depth1.terms().map(|(u, v, c)| MetabTermJson { u, v, c: c.clone() }).collect(),
        }
    }
}

/// Lie bracket in the quotient:
/// `[x, y] = (α₁β₂ - β₁α₂) + (α₁U + β₁V)P₂ - (α₂U + β₂V)P₁`.
pub fn bracket_metab(x: &MetabElem, y: &MetabElem) -> Result<MetabElem> {
    x.check(y)?;
    let constant = &(&x.alpha * &y.beta) - &(&x.beta * &y.alpha);
    let p = BiPoly::constant(constant)
        .add(&x.linear_as_multiplier().mul(&y.depth1))
        .sub(&y.linear_as_multiplier().mul(&x.depth1));
    MetabElem::from_depth1(p, x.trunc)
}

/// Image of a Lie series in the quotient. Fails with [`Error::NotLie`] when the
/// input is not Lie.
pub fn project(x: &NcSeries) -> Result<MetabElem> {
    x.ensure_lie()?;
    Ok(project_unchecked(x))
}

/// [`project`] without the Lie check. Each word `w` of length `L` contributes
/// `c_w/L` times the image of its left-normed bracket, which is exact on Lie input.
pub fn project_unchecked(x: &NcSeries) -> MetabElem {
    let n = x.trunc_weight();
    let s = SymCoeff::twopii_pow(1);
    let mut alpha = SymCoeff::zero();
    let mut beta = SymCoeff::zero();
    let mut p = BiPoly::zero();
    for (w, c) in x.terms() {
        match w.len() {
            0 => {}
            1 => match w.letter(0) {
                Letter::A => alpha += c,
                Letter::B => beta += c,
            },
            len => {
                let sign = match (w.letter(0), w.letter(1)) {
                    (Letter::A, Letter::B) => 1,
                    (Letter::B, Letter::A) => -1,
                    _ => continue,
                };
                let mut na = 0;
                let mut nb = 0;
                for i in 2..len {
                    match w.letter(i) {
                        Letter::A => na += 1,
                        Letter::B => nb += 1,
                    }
                }
                let sign = if (na + nb) % 2 == 0 { sign } else { -sign };
                let coeff = c.scale(&rat(sign, len as i64)).mul_capped(&s.pow(na as u32), None);
                p.add_term(na, nb, coeff).unwrap();
            }
        }
    }
    MetabElem { alpha, beta, depth1: p.truncate_degree(n as i32 - 2), trunc: n }
}

/// The derivation `ε_{2k}` on the quotient.
///
/// `ε₀` sends `a ↦ -b`, `b ↦ 0` and acts on depth one as `-(2πi)⁻¹V∂/∂Ū`.
/// For `2k > 0`, `a ↦ c·U^{2k-1}` and `b ↦ c·U^{2k-2}V` with `c = 2/(2k-2)!`,
/// and depth one is killed.
pub fn eps_metab(two_k: u32, x: &MetabElem) -> Result<MetabElem> {
    if !two_k.is_multiple_of(2) {
        return Err(Error::InvalidWeight(two_k as i64, "derivation index must be even"));
    }
    let n = x.trunc;
    if two_k == 0 {
        let d = x.depth1.d_u().shift(0, 1)?.scale(&-SymCoeff::twopii_pow(-1));
        return MetabElem::new(SymCoeff::zero(), -&x.alpha, d, n);
    }
    let c = rat_int(2) * inv_factorial(two_k - 2);
    let e = two_k as i32;
    let image_a = BiPoly::monomial(e - 1, 0, SymCoeff::twopii_pow(e - 1).scale(&c))?;
    let image_b = BiPoly::monomial(e - 2, 1, SymCoeff::twopii_pow(e - 2).scale(&c))?;
    let p = image_a.scale(&x.alpha).add(&image_b.scale(&x.beta));
    MetabElem::from_depth1(p, n)
}

/// `exp(-(2πi)τ ε₀)` on depth one, i.e. the substitution `Ū ↦ Ū + τV`.
pub fn exp_shear(p: &BiPoly) -> Result<BiPoly> {
    p.shear()
}

/// Depth-one polynomial in the `(U, V)` variables.
pub fn u_convention(x: &MetabElem) -> BiPoly {
    x.depth1.to_u_convention()
}
