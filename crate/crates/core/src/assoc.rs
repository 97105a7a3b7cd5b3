//! The elliptic KZB associator at `τ = i∞` in the meta-abelian quotient.
//!
//! `A∞ = log(e^{πiι(x₁)} Φ(ι(x₀),ι(x₁)) e^{2πiι(x₀)} Φ(ι(x₀),ι(x₁))⁻¹)` and
//! `B∞ = log(Φ(ι(x_∞),ι(x₁)) e^{a} Φ(ι(x₀),ι(x₁))⁻¹)`, where the Drinfeld
//! associator enters through its depth-one part
//! `Φ ≡ exp(-Σ_n ζ(n) ad^{n-1}(x)(y))`.
//!
//! Modulo the second derived algebra every term with two or more factors of
//! `log Φ` vanishes, and those are exactly the coefficient monomials of
//! ζ-degree at least two. The free computation therefore runs with a ζ-degree
//! cap of one, which is exact after projection.

use crate::error::{Error, Result};
use crate::metab::{project, BiPoly, MetabElem};
use crate::ncseries::{iota, GenusZeroGen, NcSeries};
use crate::symring::{bernoulli, inv_factorial, rat, rat_int, SymCoeff};

pub const ZETA_CAP: Option<u32> = Some(1);

fn check_trunc(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidTruncation { value: n as i64, reason: "associator components need N >= 2" });
    }
    Ok(())
}

/// `-Σ_{2≤n≤N-1} ζ(n) ad^{n-1}(x)(y)`.
pub fn phi_log(x: &NcSeries, y: &NcSeries) -> Result<NcSeries> {
    let n = x.trunc_weight();
    let mut acc = NcSeries::zero(n)?.with_zeta_cap(x.zeta_cap());
    let mut ad = y.clone();
    for k in 2..n as u32 {
        ad = x.bracket(&ad)?;
        acc = acc.sub(&ad.scale(&SymCoeff::zeta(k)))?;
    }
    Ok(acc)
}

fn gens(n: usize, cap: Option<u32>) -> Result<(NcSeries, NcSeries, NcSeries)> {
    Ok((
        iota(GenusZeroGen::X0, n)?.with_zeta_cap(cap),
        iota(GenusZeroGen::X1, n)?.with_zeta_cap(cap),
        iota(GenusZeroGen::XInf, n)?.with_zeta_cap(cap),
    ))
}

/// Free-algebra logarithm of `A∞` with the given ζ-degree cap.
pub fn a_inf_series(n: usize, cap: Option<u32>) -> Result<NcSeries> {
    check_trunc(n)?;
    let (x0, x1, _) = gens(n, cap)?;
    let phi = phi_log(&x0, &x1)?;
    let prod = x1
        .scale(&SymCoeff::pi_i())
        .exp()?
        .mul(&phi.exp()?)?
        .mul(&x0.scale(&SymCoeff::twopii_pow(1)).exp()?)?
        .mul(&phi.neg().exp()?)?;
    prod.log()
}

/// Free-algebra logarithm of `B∞` with the given ζ-degree cap.
pub fn b_inf_series(n: usize, cap: Option<u32>) -> Result<NcSeries> {
    check_trunc(n)?;
    let (x0, x1, xinf) = gens(n, cap)?;
    let phi_inf = phi_log(&xinf, &x1)?;
    let phi_0 = phi_log(&x0, &x1)?;
    let a = NcSeries::a(n)?.with_zeta_cap(cap);
    let prod = phi_inf.exp()?.mul(&a.exp()?)?.mul(&phi_0.neg().exp()?)?;
    prod.log()
}

/// `A∞` computed in the free algebra, projected and Euler-rewritten.
pub fn a_inf_free(n: usize) -> Result<MetabElem> {
    Ok(project(&a_inf_series(n, ZETA_CAP)?)?.euler_rewrite())
}

/// `B∞` computed in the free algebra, projected and Euler-rewritten.
pub fn b_inf_free(n: usize) -> Result<MetabElem> {
    Ok(project(&b_inf_series(n, ZETA_CAP)?)?.euler_rewrite())
}

/// Depth-one part of `A∞` in closed form:
/// `2πi(c(U) - (2πi/4)V + Σ_{odd n≥3} ζ(n)Vⁿ)` with `c(x) = Σ_{k≥2} B_k x^{k-1}/k!`.
pub fn a_inf_depth1(n: usize) -> Result<BiPoly> {
    check_trunc(n)?;
    let max = n as i32 - 2;
    let mut p = BiPoly::zero();
    for k in 2..=(max + 1) as u32 {
        let c = SymCoeff::twopii_pow(k as i32).scale(&(bernoulli(k) * inv_factorial(k)));
        p.add_term(k as i32 - 1, 0, c)?;
    }
    if max >= 1 {
        p.add_term(0, 1, SymCoeff::twopii_pow(2).scale(&rat(-1, 4)))?;
    }
    for odd in (3..=max).step_by(2) {
        p.add_term(0, odd, SymCoeff::twopii_pow(1) * SymCoeff::zeta(odd as u32))?;
    }
    Ok(p)
}

/// Depth-one part of `B∞` in closed form:
/// `-2πi(c(2πiV) + U·c(U)·c(2πiV)) + 2πi Σ_{odd n≥3} ζ(n) Ū V^{n-1}`.
pub fn b_inf_depth1(n: usize) -> Result<BiPoly> {
    b_inf_depth1_signed(n, 1)
}

/// The variant `-2πi(c(2πiV) - U·c(U)·c(2πiV)) + …`, kept for comparison
/// against the free computation.
pub fn b_inf_depth1_alt_sign(n: usize) -> Result<BiPoly> {
    b_inf_depth1_signed(n, -1)
}

fn b_inf_depth1_signed(n: usize, product_sign: i64) -> Result<BiPoly> {
    check_trunc(n)?;
    let max = n as i32 - 2;
    let mut p = BiPoly::zero();
    for m in 2..=(max + 1) as u32 {
        let bm = bernoulli(m) * inv_factorial(m);
        p.add_term(0, m as i32 - 1, SymCoeff::twopii_pow(m as i32).scale(&-bm.clone()))?;
        for q in 2..=(max + 1 - m as i32) as u32 {
            let c = bernoulli(q) * inv_factorial(q) * &bm * rat_int(-product_sign);
            p.add_term(q as i32, m as i32 - 1, SymCoeff::twopii_pow((q + m) as i32).scale(&c))?;
        }
    }
    for odd in (3..=max).step_by(2) {
        p.add_term(1, odd - 1, SymCoeff::twopii_pow(1) * SymCoeff::zeta(odd as u32))?;
    }
    Ok(p)
}

/// `A∞ = 2πi·b + 𝔄⁽¹⁾`.
pub fn a_inf_closed(n: usize) -> Result<MetabElem> {
    MetabElem::new(SymCoeff::zero(), SymCoeff::twopii_pow(1), a_inf_depth1(n)?, n)
}

/// `B∞ = a + 𝔅⁽¹⁾`.
pub fn b_inf_closed(n: usize) -> Result<MetabElem> {
    MetabElem::new(SymCoeff::one(), SymCoeff::zero(), b_inf_depth1(n)?, n)
}

pub fn b_inf_closed_alt_sign(n: usize) -> Result<MetabElem> {
    MetabElem::new(SymCoeff::one(), SymCoeff::zero(), b_inf_depth1_alt_sign(n)?, n)
}
