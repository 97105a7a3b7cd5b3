//! The automorphism `g(τ)` on the meta-abelian quotient and the resulting
//! formulas for `𝔄(τ)` and `𝔅(τ)`.
//!
//! On the quotient `g(τ)` reduces to three families of ε-words,
//! `(-2πi)ⁿ𝒢({0}_n)·ε₀ⁿ`, `(-2πi)^{n+1}𝒢({0}_n,2k)·ε₀ⁿ∘ε_{2k}` and
//! `(-2πi)^{n+1}𝒢({0}_{n-1},2k,0)·ε₀^{n-1}∘ε_{2k}∘ε₀`, with the rightmost
//! derivation applied first.

use crate::assoc::{a_inf_closed, a_inf_depth1, b_inf_closed, b_inf_depth1};
use crate::error::{Error, Result};
use crate::metab::{eps_metab, exp_shear, BiPoly, MetabElem};
use crate::modular::{rewrite_iter_eis, IterEisSymbol};
use crate::symring::{bernoulli, binomial, inv_factorial, rat, rat_int, Rational, SymCoeff};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Finite sum `Σ c·(ε_{w₁}∘…∘ε_{w_m})`; each word is stored left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct GOperator {
    trunc: usize,
    terms: Vec<(SymCoeff, Vec<u32>)>,
}

fn check_trunc(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidTruncation { value: n as i64, reason: "g(τ) needs N >= 2" });
    }
    Ok(())
}

/// Weights `2k` with `2k - 1 ≤ N - 2`.
fn eisenstein_weights(n: usize) -> impl Iterator<Item = u32> {
    (2..=(n as u32).saturating_sub(1)).step_by(2)
}

fn minus_twopii_pow(e: u32) -> SymCoeff {
    let sign = if e.is_multiple_of(2) { 1 } else { -1 };
    SymCoeff::twopii_pow(e as i32).scale(&rat_int(sign))
}

pub fn build_g(n: usize) -> Result<GOperator> {
    check_trunc(n)?;
    let mut terms = Vec::new();
    let max_shear = (n - 1) as u32;
    for k in 0..=max_shear {
        let c = minus_twopii_pow(k) * rewrite_iter_eis(&IterEisSymbol::new(vec![0; k as usize]))?;
        terms.push((c, vec![0; k as usize]));
    }
    for w in eisenstein_weights(n) {
        for k in 0..w {
            let mut idx = vec![0; k as usize];
            idx.push(w);
            let c = minus_twopii_pow(k + 1) * rewrite_iter_eis(&IterEisSymbol::new(idx))?;
            let mut word = vec![0; k as usize];
            word.push(w);
            terms.push((c, word));
        }
        for k in 1..=w {
            let mut idx = vec![0; k as usize - 1];
            idx.extend([w, 0]);
            let c = minus_twopii_pow(k + 1) * rewrite_iter_eis(&IterEisSymbol::new(idx))?;
            let mut word = vec![0; k as usize - 1];
            word.extend([w, 0]);
            terms.push((c, word));
        }
    }
    Ok(GOperator { trunc: n, terms })
}

impl GOperator {
    pub fn trunc_weight(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> &[(SymCoeff, Vec<u32>)] {
        &self.terms
    }

    pub fn apply(&self, x: &MetabElem) -> Result<MetabElem> {
        if x.trunc_weight() != self.trunc {
            return Err(Error::TruncationMismatch(self.trunc as i64, x.trunc_weight() as i64));
        }
        let mut acc = MetabElem::zero(self.trunc)?;
        for (c, word) in &self.terms {
            let mut y = x.clone();
            for &e in word.iter().rev() {
                if y.is_zero() {
                    break;
                }
                y = eps_metab(e, &y)?;
            }
            if !y.is_zero() {
                acc = acc.add(&y.scale(c))?;
            }
        }
        Ok(acc)
    }
}

/// `Σ_k 2/(2k-2)!·∫_τ^{→1∞} G̲_{2k}` with
/// `∫G̲_{2k} = (2πi)^{2k-1} Σ_j C(2k-2,j) I[j,2k] Ū^{2k-2-j} Vʲ`.
pub fn eichler_sum(n: usize) -> Result<BiPoly> {
    eichler_sum_with(n, SymCoeff::eichler)
}

fn eichler_sum_with(n: usize, integral: impl Fn(u32, u32) -> Result<SymCoeff>) -> Result<BiPoly> {
    let mut p = BiPoly::zero();
    for w in eisenstein_weights(n) {
        let pre = rat_int(2) * inv_factorial(w - 2);
        for j in 0..=w - 2 {
            let c = SymCoeff::twopii_pow(w as i32 - 1).scale(&(&pre * Rational::from(binomial(w - 2, j))));
            p.add_term((w - 2 - j) as i32, j as i32, c * integral(j, w)?)?;
        }
    }
    Ok(p)
}

/// `W = Ū + τV`.
pub fn w_poly() -> BiPoly {
    BiPoly::monomial(1, 0, SymCoeff::one()).unwrap().add(&BiPoly::monomial(0, 1, SymCoeff::tau()).unwrap())
}

fn v_poly() -> BiPoly {
    BiPoly::monomial(0, 1, SymCoeff::one()).unwrap()
}

/// Closed form of `g(τ)` on a generator: `a ↦ a + 2πiτb - 2πiW·Σ` and
/// `b ↦ b - V·Σ`.
pub fn geometric_closed(gen_a: bool, n: usize) -> Result<MetabElem> {
    check_trunc(n)?;
    let sum = eichler_sum(n)?;
    if gen_a {
        let p = w_poly().mul(&sum).scale(&-SymCoeff::twopii_pow(1));
        MetabElem::new(SymCoeff::one(), SymCoeff::twopii_pow(1) * SymCoeff::tau(), p, n)
    } else {
        MetabElem::new(SymCoeff::zero(), SymCoeff::one(), v_poly().mul(&sum).neg(), n)
    }
}

/// `g(τ)(b)` in the form `2πi·b - 2πiV·Σ`.
pub fn geometric_b_scaled(n: usize) -> Result<MetabElem> {
    check_trunc(n)?;
    let p = v_poly().mul(&eichler_sum(n)?).scale(&-SymCoeff::twopii_pow(1));
    MetabElem::new(SymCoeff::zero(), SymCoeff::twopii_pow(1), p, n)
}

/// Uniform factor `λ` with `candidate = λ·reference`, if one exists.
pub fn uniform_factor(candidate: &MetabElem, reference: &MetabElem) -> Option<SymCoeff> {
    let (num, den) = if !reference.beta.is_zero() {
        (&candidate.beta, &reference.beta)
    } else if !reference.alpha.is_zero() {
        (&candidate.alpha, &reference.alpha)
    } else {
        return None;
    };
    if den != &SymCoeff::one() {
        return None;
    }
    let lambda = num.clone();
    (&reference.scale(&lambda) == candidate).then_some(lambda)
}

/// Closed right-hand side of the main formula for `𝔄(τ)` or `𝔅(τ)`.
pub fn main_theorem(side: Side, n: usize) -> Result<MetabElem> {
    check_trunc(n)?;
    let sum = eichler_sum(n)?;
    let s = SymCoeff::twopii_pow(1);
    match side {
        Side::A => {
            let p = exp_shear(&a_inf_depth1(n)?)?.sub(&v_poly().mul(&sum).scale(&s));
            MetabElem::new(SymCoeff::zero(), s, p, n)
        }
        Side::B => {
            let p = exp_shear(&b_inf_depth1(n)?)?.sub(&w_poly().mul(&sum).scale(&s));
            MetabElem::new(SymCoeff::one(), s * SymCoeff::tau(), p, n)
        }
    }
}

/// `g(τ)` applied to `𝔄_∞` or `𝔅_∞`.
pub fn assoc_route(side: Side, n: usize) -> Result<MetabElem> {
    let g = build_g(n)?;
    match side {
        Side::A => g.apply(&a_inf_closed(n)?),
        Side::B => g.apply(&b_inf_closed(n)?),
    }
}

/// `2πi·b + 𝔄⁽¹⁾_∞ - 2πiV·Σ⁰`, where `Σ⁰` uses the constant-term-subtracted
/// integrals `∫_τ^{i∞}(G_{2k} - a₀)(τ-z)ʲ dz = I[j,2k] + a₀τ^{j+1}/(j+1)`.
pub fn simplified_a(n: usize) -> Result<MetabElem> {
    check_trunc(n)?;
    let sum0 = eichler_sum_with(n, |j, w| {
        let a0 = -bernoulli(w) * rat(1, 2 * w as i64);
        Ok(SymCoeff::eichler(j, w)? + SymCoeff::tau_pow(j + 1).scale(&(a0 * rat(1, j as i64 + 1))))
    })?;
    let s = SymCoeff::twopii_pow(1);
    let p = a_inf_depth1(n)?.sub(&v_poly().mul(&sum0).scale(&s));
    MetabElem::new(SymCoeff::zero(), s, p, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metab::{bracket_metab, MetabElem};

    #[test]
    fn g_on_generators_depth_zero() {
        let n = 6;
        let g = build_g(n).unwrap();
        let ga = g.apply(&MetabElem::a(n).unwrap()).unwrap();
        assert_eq!(ga.alpha, SymCoeff::one());
        assert_eq!(ga.beta, SymCoeff::twopii_pow(1) * SymCoeff::tau());
        let gb = g.apply(&MetabElem::b(n).unwrap()).unwrap();
        assert_eq!(gb.alpha, SymCoeff::zero());
        assert_eq!(gb.beta, SymCoeff::one());
    }

    #[test]
    fn g_on_depth_one_is_shear() {
        let n = 10;
        let g = build_g(n).unwrap();
        let mut p = BiPoly::zero();
        p.add_term(4, 2, SymCoeff::zeta(3)).unwrap();
        p.add_term(7, 0, SymCoeff::one()).unwrap();
        p.add_term(0, 3, SymCoeff::tau()).unwrap();
        let x = MetabElem::from_depth1(p.clone(), n).unwrap();
        assert_eq!(g.apply(&x).unwrap().depth1, exp_shear(&p).unwrap());
    }

    #[test]
    fn geometric_generators() {
        for n in [3, 6, 9] {
            let g = build_g(n).unwrap();
            assert_eq!(g.apply(&MetabElem::a(n).unwrap()).unwrap(), geometric_closed(true, n).unwrap());
            assert_eq!(g.apply(&MetabElem::b(n).unwrap()).unwrap(), geometric_closed(false, n).unwrap());
        }
    }

    #[test]
    fn scaled_b_is_a_multiple() {
        let n = 7;
        let op = geometric_closed(false, n).unwrap();
        let variant = geometric_b_scaled(n).unwrap();
        assert_eq!(uniform_factor(&variant, &op), Some(SymCoeff::twopii_pow(1)));
    }

    #[test]
    fn top_degree_weight_four() {
        // 2k = 4, j = 0: -2πi·(2πi)³·(2/2!)·I[0,4] on Ū³.
        let ga = geometric_closed(true, 5).unwrap();
        let expected = SymCoeff::twopii_pow(4).scale(&rat(-1, 1)) * SymCoeff::eichler(0, 4).unwrap();
        let coeff = ga.depth1.coeff(3, 0);
        assert_eq!(coeff.filter(|m| m.ei_exps().iter().any(|(i, _)| i.weight == 4)), expected);
    }

    #[test]
    fn main_theorem_small() {
        for n in [3, 5, 8] {
            for side in [Side::A, Side::B] {
                assert_eq!(assoc_route(side, n).unwrap(), main_theorem(side, n).unwrap(), "{side:?} N={n}");
            }
            assert_eq!(simplified_a(n).unwrap(), main_theorem(Side::A, n).unwrap(), "simplified N={n}");
        }
    }

    #[test]
    fn g_preserves_brackets() {
        let n = 7;
        let g = build_g(n).unwrap();
        let a = MetabElem::a(n).unwrap();
        let b = MetabElem::b(n).unwrap();
        let lhs = g.apply(&bracket_metab(&a, &b).unwrap()).unwrap();
        let rhs = bracket_metab(&g.apply(&a).unwrap(), &g.apply(&b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
