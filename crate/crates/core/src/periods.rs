//! Extended period polynomials of Eisenstein series and the special values of
//! elliptic polylogarithms at the zero section.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::assoc::{a_inf_depth1, b_inf_depth1};
use crate::error::{Error, Result};
use crate::kzbmetab::eichler_sum;
use crate::metab::BiPoly;
use crate::modular::{eichler_values, eisenstein_q};
use crate::quad::integrate;
use crate::symring::{
    bernoulli, binomial, eichler_symbols, factorial, inv_factorial, rat, rational_to_f64, twopii_numeric, NumContext, Rational,
    SymCoeff,
};

/// `r(X,Y) = Σ c_{ij} Xⁱ Yʲ`, homogeneous of degree `2k - 2` with `i, j ≥ -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodPolynomial {
    pub weight: u32,
    pub poly: BiPoly,
}

impl PeriodPolynomial {
    pub fn coeff(&self, i: i32, j: i32) -> SymCoeff {
        self.poly.coeff(i, j)
    }

    pub fn to_text(&self) -> String {
        render(&self.poly, |c| c.to_string(), "*")
    }

    pub fn to_latex(&self) -> String {
        render(&self.poly, |c| c.to_latex(), " ")
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Term<'a> {
            x: i32,
            y: i32,
            c: &'a SymCoeff,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            weight: u32,
            terms: Vec<Term<'a>>,
        }
        let terms = self.poly.terms().map(|(x, y, c)| Term { x, y, c }).collect();
        serde_json::to_string(&Out { weight: self.weight, terms }).expect("serialization is infallible")
    }
}

fn render(p: &BiPoly, coeff: impl Fn(&SymCoeff) -> String, sep: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let var = |name: &str, e: i32| match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{{{e}}}"),
    };
    p.terms()
        .map(|(i, j, c)| {
            let mono: Vec<String> = [var("X", i), var("Y", j)].into_iter().filter(|s| !s.is_empty()).collect();
            if mono.is_empty() {
                format!("({})", coeff(c))
            } else {
                format!("({}){sep}{}", coeff(c), mono.join(sep))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn check_weight(two_k: u32) -> Result<()> {
    if two_k < 4 || !two_k.is_multiple_of(2) {
        return Err(Error::InvalidWeight(two_k as i64, "period polynomials need even weight 2k >= 4"));
    }
    Ok(())
}

/// `ω⁻ = -(2k-2)!/2`.
pub fn omega_minus(two_k: u32) -> Rational {
    -Rational::from(factorial(two_k - 2)) * rat(1, 2)
}

/// `ω⁺ = ζ(2k-1)/(2πi)^{2k-1}·ω⁻`.
pub fn omega_plus(two_k: u32) -> SymCoeff {
    (SymCoeff::zeta(two_k - 1) * SymCoeff::twopii_pow(1 - two_k as i32)).scale(&omega_minus(two_k))
}

/// `r_{G_{2k}} = ω⁺(X^{2k-2} - Y^{2k-2}) + ω⁻ Σ_{-1≤n≤2k-1} B_{n+1}B_{2k-n-1}/((n+1)!(2k-1-n)!) XⁿY^{2k-2-n}`.
pub fn period_poly_direct(two_k: u32) -> Result<PeriodPolynomial> {
    check_weight(two_k)?;
    let d = two_k as i32 - 2;
    let mut p = BiPoly::laurent();
    let wp = omega_plus(two_k);
    p.add_term(d, 0, wp.clone())?;
    p.add_term(0, d, -wp)?;
    let wm = omega_minus(two_k);
    for n in -1..=(two_k as i32 - 1) {
        let i = (n + 1) as u32;
        let j = two_k - i;
        let c = bernoulli(i) * bernoulli(j) * inv_factorial(i) * inv_factorial(j) * &wm;
        p.add_term(n, d - n, SymCoeff::from_rational(c))?;
    }
    Ok(PeriodPolynomial { weight: two_k, poly: p })
}

/// `f(X,Y) ↦ f(Y, λX)`, with `λ = (2πi)^{scale}`.
fn swap_scaled(p: &BiPoly, scale: i32) -> BiPoly {
    let mut out = BiPoly::laurent();
    for (i, j, c) in p.terms() {
        out.add_term(j, i, c * &SymCoeff::twopii_pow(scale * j)).unwrap();
    }
    out
}

/// `f(X,Y) ↦ f(X, λY)`.
fn scale_second(p: &BiPoly, scale: i32) -> BiPoly {
    p.map_coeffs(|_, j, c| c * &SymCoeff::twopii_pow(scale * j))
}

/// `f(X,Y) ↦ f(λX, Y)`.
fn scale_first(p: &BiPoly, scale: i32) -> BiPoly {
    p.map_coeffs(|i, _, c| c * &SymCoeff::twopii_pow(scale * i))
}

fn odd_part(p: &BiPoly) -> BiPoly {
    p.filter(|i, _| i.rem_euclid(2) == 1)
}

fn even_part(p: &BiPoly) -> BiPoly {
    p.filter(|i, _| i.rem_euclid(2) == 0)
}

/// `Ã = 𝔄⁽¹⁾_∞/V` and `B̃ = 𝔅⁽¹⁾_∞/U` in the variables `(U, V)`, restricted to degree `2k - 2`.
fn tilde_parts(two_k: u32, n: usize) -> Result<(BiPoly, BiPoly)> {
    check_weight(two_k)?;
    if n < two_k as usize + 1 {
        return Err(Error::InvalidTruncation {
            value: n as i64,
            reason: "extracting weight 2k needs N >= 2k + 1",
        });
    }
    let d = two_k as i32 - 2;
    let mut a = BiPoly::laurent().add(&a_inf_depth1(n)?.to_u_convention()).shift(0, -1)?;
    let mut b = BiPoly::laurent().add(&b_inf_depth1(n)?.to_u_convention()).shift(-1, 0)?;
    a = a.homogeneous(d);
    b = b.homogeneous(d);
    Ok((a, b))
}

/// `r_{G_{2k}}(X,Y) = (ω⁻/2πi)[Ã(X,Y)⁻ + B̃(Y, X/2πi)⁺ - B̃(X, Y/2πi)]`, where `±`
/// is the parity in `X`.
pub fn period_poly_via_assoc(two_k: u32, n: usize) -> Result<PeriodPolynomial> {
    let (a, b) = tilde_parts(two_k, n)?;
    let bracket = odd_part(&a).add(&even_part(&swap_scaled(&b, -1))).sub(&scale_second(&b, -1));
    let pre = SymCoeff::twopii_pow(-1).scale(&omega_minus(two_k));
    Ok(PeriodPolynomial { weight: two_k, poly: bracket.scale(&pre) })
}

/// The combination `(ω⁻/2πi)[Ã(Ū,V)⁺ + B̃(V,Ū)⁺ - Ã(Ū,V)⁻ - B̃(Ū,V)⁻]` with `Ū = X/2πi`
/// and `V = Y`, kept for comparison with [`period_poly_via_assoc`].
pub fn period_poly_via_assoc_naive(two_k: u32, n: usize) -> Result<PeriodPolynomial> {
    let (a, b) = tilde_parts(two_k, n)?;
    let a_bar = scale_first(&a, -1);
    let b_bar = scale_first(&b, -1);
    let b_swapped = swap_scaled(&b, -1);
    let bracket = even_part(&a_bar).add(&even_part(&b_swapped)).sub(&odd_part(&a_bar)).sub(&odd_part(&b_bar));
    let pre = SymCoeff::twopii_pow(-1).scale(&omega_minus(two_k));
    Ok(PeriodPolynomial { weight: two_k, poly: bracket.scale(&pre) })
}

/// Expansion of `Ξ*(0,i∞;X,Y) = -Σ_{n≥2} ζ(n)/(2πi)ⁿ Y^{n-1} + (e^X-1)⁻¹((e^Y-1)⁻¹ - Y⁻¹)`
/// through total degree `max_degree`.
pub fn xi_star_infinity(max_degree: i32) -> BiPoly {
    let mut p = BiPoly::laurent();
    for n in 2..=(max_degree + 1).max(1) as u32 {
        p.add_term(0, n as i32 - 1, -(SymCoeff::zeta(n) * SymCoeff::twopii_pow(-(n as i32)))).unwrap();
    }
    for k in 0..=(max_degree + 2).max(0) as u32 {
        for m in 1..=(max_degree + 2 - k as i32).max(0) as u32 {
            let c = bernoulli(k) * bernoulli(m) * inv_factorial(k) * inv_factorial(m);
            p.add_term(k as i32 - 1, m as i32 - 1, SymCoeff::from_rational(c)).unwrap();
        }
    }
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub w: [f64; 2],
    pub v: [f64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_err: f64,
    pub rhs_literal: [f64; 2],
    pub literal_err: f64,
    /// Weight `2k` with the largest discrepancy at this sample.
    pub worst_weight: u32,
    pub worst_weight_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolylogReport {
    pub tau: [f64; 2],
    pub degree: i32,
    pub tolerance: f64,
    pub samples: Vec<SampleReport>,
    pub max_abs_err: f64,
    pub laurent_err: f64,
    pub zeta_sector_consistent: bool,
    /// Whether `E_k = Σ(mτ+n)^{-k}` also passes. It differs from the `E_k/(2πi)^k`
    /// normalization used for `pass` by `(2πi)^k` in weight `k`.
    pub literal_normalization_pass: bool,
    pub literal_ratio_by_weight: BTreeMap<u32, [f64; 2]>,
    pub pass: bool,
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `∫_τ^{→1∞} G_{2k}(z)(X - zY)^{2k-2} dz` by quadrature along the vertical ray, with the
/// regularized constant term `-a₀∫_0^τ(X - zY)^{2k-2}dz` expanded in closed form.
fn regularized_integral(two_k: u32, x: Complex64, y: Complex64, tau: Complex64, tol: f64) -> Result<Complex64> {
    let g = eisenstein_q(two_k, 80)?;
    let m = two_k as i32 - 2;
    let i = Complex64::new(0.0, 1.0);
    let ray = integrate(
        |t| {
            let z = tau + Complex64::new(0.0, t);
            g.eval_nonconstant(z) * (x - z * y).powi(m) * i
        },
        0.0,
        14.0,
        tol * 1e-3,
        tol * 1e-3,
    );
    let mut elementary = Complex64::new(0.0, 0.0);
    for j in 0..=m as u32 {
        let c = rational_to_f64(&Rational::from(binomial(m as u32, j))) / f64::from(j + 1);
        elementary += x.powi(m - j as i32) * (-y).powi(j as i32) * tau.powi(j as i32 + 1) * c;
    }
    Ok(ray - elementary * g.a0_f64())
}

/// Compares `(g(τ)(a) - a)/(-(2πi)²W)`, with `2πi·b` replaced by `(W - τV)⁻¹`, against
/// `Ξ*(0,τ;2πiW,2πiV) - Ξ*(0,i∞;2πiW,2πiV)`.
///
/// The left side evaluates the Eichler symbols of `g(τ)(a)` from their q-series; the right
/// side integrates `E_k(z)(X - zY)^{k-2}` numerically, with integration constants taken
/// from `Ξ*(0,i∞)` so that those cancel in the difference.
pub fn corollary56_check(ctx: &NumContext, degree: i32, samples: &[(Complex64, Complex64)], tol: f64) -> Result<PolylogReport> {
    if degree < 0 {
        return Err(Error::InvalidWeight(degree as i64, "degree must be nonnegative"));
    }
    let s = twopii_numeric();
    let tau = ctx.tau;
    let n = degree as usize + 3;
    let weights: Vec<u32> = (2..=degree as u32 + 2).step_by(2).collect();
    let full = eichler_sum(n)?;
    let per_weight: Vec<(u32, BiPoly)> = weights.iter().map(|&w| (w, full.homogeneous(w as i32 - 2))).collect();
    let values = eichler_values(full.terms().flat_map(|(_, _, c)| eichler_symbols(c)), ctx)?;

    let mut reports = Vec::new();
    let mut max_err: f64 = 0.0;
    let mut laurent_err: f64 = 0.0;
    let mut literal_pass = true;
    let mut ratios = BTreeMap::new();
    for &(w, v) in samples {
        let u_bar = w - tau * v;
        let x = s * w;
        let y = s * v;
        let mut lhs = Complex64::new(0.0, 0.0);
        let mut rhs = Complex64::new(0.0, 0.0);
        let mut rhs_literal = Complex64::new(0.0, 0.0);
        let mut worst = (0u32, 0.0f64);
        for (weight, poly) in &per_weight {
            let k = *weight as i32;
            let l = poly.eval_at(u_bar, v, ctx, &values)? / s;
            let integral = regularized_integral(*weight, x, y, tau, tol)?;
            let fact_km1 = rational_to_f64(&Rational::from(factorial(*weight - 1)));
            let normalized = 2.0 / fact_km1;
            let r = integral * normalized * f64::from(k - 1);
            let r_lit = r * s.powi(k);
            let e = (l - r).norm();
            if e > worst.1 {
                worst = (*weight, e);
            }
            if l.norm() > 1e-300 {
                ratios.entry(*weight).or_insert_with(|| c2(r_lit / l));
            }
            lhs += l;
            rhs += r;
            rhs_literal += r_lit;
        }
        // Laurent sector: τ/(W - τV) over -(2πi)²W against -τ/(X(X - τY)).
        let lhs_laurent = tau / u_bar / (-(s * s) * w);
        let rhs_laurent = -tau / (x * (x - tau * y));
        laurent_err = laurent_err.max((lhs_laurent - rhs_laurent).norm() / (1.0 + lhs_laurent.norm()));
        lhs += lhs_laurent;
        rhs += rhs_laurent;
        rhs_literal += rhs_laurent;
        let abs_err = (lhs - rhs).norm() / (1.0 + lhs.norm());
        let literal_err = (lhs - rhs_literal).norm() / (1.0 + lhs.norm());
        if literal_err.is_nan() || literal_err > tol {
            literal_pass = false;
        }
        max_err = max_err.max(abs_err);
        reports.push(SampleReport {
            w: c2(w),
            v: c2(v),
            lhs: c2(lhs),
            rhs: c2(rhs),
            abs_err,
            rhs_literal: c2(rhs_literal),
            literal_err,
            worst_weight: worst.0,
            worst_weight_err: worst.1,
        });
    }
    let zeta_sector_consistent = zeta_sector_check(degree)?;
    let pass = max_err <= tol && laurent_err <= tol && zeta_sector_consistent;
    Ok(PolylogReport {
        tau: c2(tau),
        degree,
        tolerance: tol,
        samples: reports,
        max_abs_err: max_err,
        laurent_err,
        zeta_sector_consistent,
        literal_normalization_pass: literal_pass,
        literal_ratio_by_weight: ratios,
        pass,
    })
}

/// The odd-ζ terms of `𝔄⁽¹⁾_∞` equal `-(2πi)²V·Ξ*(0,i∞;X,2πiV)` restricted to odd ζ.
fn zeta_sector_check(degree: i32) -> Result<bool> {
    let n = (degree + 3).max(3) as usize;
    let a = a_inf_depth1(n)?.to_u_convention().filter(|i, _| i == 0);
    let xi = xi_star_infinity(degree + 1).filter(|i, _| i == 0);
    let mut ok = true;
    for (_, j, c) in xi.terms() {
        let odd_zeta = c.filter(|m| m.zeta_exps().iter().any(|&(z, _)| z % 2 == 1));
        if odd_zeta.is_zero() || j + 1 > n as i32 - 2 {
            continue;
        }
        let expected = (odd_zeta * SymCoeff::twopii_pow(j + 2)).scale(&rat(-1, 1));
        let actual = a.coeff(0, j + 1).filter(|m| !m.zeta_exps().is_empty());
        ok &= expected == actual;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_weight_four() {
        let r = period_poly_direct(4).unwrap();
        assert_eq!(omega_minus(4), rat(-1, 1));
        assert_eq!(r.coeff(2, 0).filter(|m| !m.zeta_exps().is_empty()), omega_plus(4));
        // n = -1: B₀B₄/4! ω⁻ = 1/720.
        assert_eq!(r.coeff(-1, 3), SymCoeff::from_rational(rat(1, 720)));
        assert_eq!(r.coeff(3, -1), SymCoeff::from_rational(rat(1, 720)));
        assert_eq!(r.coeff(1, 1), SymCoeff::from_rational(rat(-1, 144)));
        assert!(period_poly_direct(2).is_err());
    }

    #[test]
    fn via_assoc_matches_direct() {
        for w in [4, 6, 8] {
            assert_eq!(period_poly_via_assoc(w, w as usize + 1).unwrap(), period_poly_direct(w).unwrap(), "weight {w}");
        }
        assert!(period_poly_via_assoc(6, 6).is_err());
    }

    #[test]
    fn naive_reading_differs() {
        assert_ne!(period_poly_via_assoc_naive(4, 5).unwrap(), period_poly_direct(4).unwrap());
    }

    #[test]
    fn a_tilde_has_v_inverse() {
        let (a, _) = tilde_parts(4, 5).unwrap();
        assert!(!a.coeff(3, -1).is_zero());
    }

    #[test]
    fn xi_star_examples() {
        let xi = xi_star_infinity(4);
        assert_eq!(xi.coeff(0, 2), -(SymCoeff::zeta(3) * SymCoeff::twopii_pow(-3)));
        assert_eq!(xi.coeff(-1, 0), SymCoeff::from_rational(rat(-1, 2)));
        assert_eq!(xi.coeff(0, 0), SymCoeff::from_rational(rat(1, 4)));
    }

    #[test]
    fn corollary_at_i() {
        let ctx = NumContext::at(Complex64::new(0.0, 1.0)).unwrap();
        let samples = [
            (Complex64::new(0.3, 0.0), Complex64::new(0.2, 0.0)),
            (Complex64::new(0.1, 0.0), Complex64::new(-0.4, 0.0)),
            (Complex64::new(0.25, 0.0), Complex64::new(0.0, 0.0)),
        ];
        let rep = corollary56_check(&ctx, 6, &samples, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(!rep.literal_normalization_pass);
        assert!(rep.zeta_sector_consistent);
    }
}
