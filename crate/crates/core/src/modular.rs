//! Eisenstein series, Eichler integrals and iterated Eisenstein integrals.
//!
//! `G_{2k}(τ) = -B_{2k}/(4k) + Σ_{m≥1} σ_{2k-1}(m) qᵐ` with `q = e^{2πiτ}`, and
//! `G_0 = -1`. The regularized Eichler integral is
//! `I_n(G_{2k};τ) = ∫_τ^{i∞} (G_{2k}(z) - a₀)(τ-z)ⁿ dz - a₀τ^{n+1}/(n+1)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::symring::{bernoulli, inv_factorial, rat, rational_to_f64, EichlerIndex, NumContext, Rational, SymCoeff};

/// Length of the vertical ray used by the quadrature oracles, in units of `Im z`.
const RAY_LENGTH: f64 = 14.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EisensteinSeries {
    pub weight: u32,
    pub a0: Rational,
    /// `σ_{2k-1}(m)` for `m = 1..=M`.
    pub q_coeffs: Vec<BigUint>,
}

pub fn divisor_sigma(power: u32, m: u64) -> BigUint {
    let mut acc = BigUint::zero();
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            acc += BigUint::from(d).pow(power);
            let e = m / d;
            if e != d {
                acc += BigUint::from(e).pow(power);
            }
        }
        d += 1;
    }
    acc
}

/// `G_{2k}` truncated after `q^M`.
pub fn eisenstein_q(two_k: u32, m: usize) -> Result<EisensteinSeries> {
    if !two_k.is_multiple_of(2) {
        return Err(Error::InvalidWeight(two_k as i64, "Eisenstein series need even weight"));
    }
    if two_k == 0 {
        return Ok(EisensteinSeries { weight: 0, a0: rat(-1, 1), q_coeffs: Vec::new() });
    }
    if m < 1 {
        return Err(Error::InvalidTruncation { value: m as i64, reason: "q-series cutoff must be >= 1" });
    }
    let a0 = -bernoulli(two_k) / Rational::from_integer((2 * two_k).into());
    let q_coeffs = (1..=m as u64).map(|n| divisor_sigma(two_k - 1, n)).collect();
    Ok(EisensteinSeries { weight: two_k, a0, q_coeffs })
}

impl EisensteinSeries {
    pub fn a0_f64(&self) -> f64 {
        rational_to_f64(&self.a0)
    }

    fn coeffs_f64(&self) -> Vec<f64> {
        self.q_coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect()
    }

    /// `G(z) - a₀` from the truncated q-expansion.
    pub fn eval_nonconstant(&self, z: Complex64) -> Complex64 {
        let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp();
        let mut acc = Complex64::zero();
        let mut qm = q;
        for c in self.coeffs_f64() {
            acc += qm * c;
            qm *= q;
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_nonconstant(z) + self.a0_f64()
    }
}

/// Index tuple `(2k₁,…,2k_n)` of an iterated Eisenstein integral `𝒢(2k₁,…,2k_n;τ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterEisSymbol {
    pub indices: Vec<u32>,
}

impl IterEisSymbol {
    pub fn new(indices: Vec<u32>) -> IterEisSymbol {
        IterEisSymbol { indices }
    }
}

/// Rewrites the three supported shapes into `τ` and `I[n,2k]` symbols:
/// `({0}_n) ↦ τⁿ/n!`, `({0}_n,2k) ↦ I[n,2k]/n!` and
/// `({0}_{n-1},2k,0) ↦ (τ·I[n-1,2k] - I[n,2k])/(n-1)!`.
pub fn rewrite_iter_eis(s: &IterEisSymbol) -> Result<SymCoeff> {
    let idx = &s.indices;
    let unsupported = || Error::UnsupportedIndexShape(idx.clone());
    let nonzero: Vec<usize> = idx.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, _)| i).collect();
    match nonzero.as_slice() {
        [] => {
            let n = idx.len() as u32;
            Ok(SymCoeff::tau_pow(n).scale(&inv_factorial(n)))
        }
        [pos] if *pos == idx.len() - 1 => {
            let n = *pos as u32;
            Ok(SymCoeff::eichler(n, idx[*pos])?.scale(&inv_factorial(n)))
        }
        [pos] if *pos + 2 == idx.len() => {
            let n = *pos as u32 + 1;
            let w = idx[*pos];
            let lhs = SymCoeff::tau() * SymCoeff::eichler(n - 1, w)?;
            Ok((lhs - SymCoeff::eichler(n, w)?).scale(&inv_factorial(n - 1)))
        }
        _ => Err(unsupported()),
    }
}

fn check_weight(two_k: u32) -> Result<()> {
    if two_k < 2 || !two_k.is_multiple_of(2) {
        return Err(Error::InvalidWeight(two_k as i64, "Eichler integrals need even weight 2k >= 2"));
    }
    Ok(())
}

/// Bound on the discarded modes `Σ_{m>M} σ_{2k-1}(m)|q|ᵐ n!/(2πm)^{n+1}`.
fn tail_bound(n: u32, two_k: u32, m: usize, im_tau: f64) -> f64 {
    let r = (-2.0 * std::f64::consts::PI * im_tau).exp();
    let first = (m + 1) as f64;
    // σ_{2k-1}(m) ≤ ζ(2k-1)·m^{2k-1} ≤ 2m^{2k-1} for 2k ≥ 4; m^{1}·(1+ln m) covers 2k = 2.
    let growth = |x: f64| 2.0 * x.powi(two_k as i32 - 1) * (1.0 + x.ln());
    let ratio = growth(first + 1.0) / growth(first) * r;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let fact: f64 = (1..=n).map(f64::from).product();
    growth(first) * r.powf(first) * fact / (2.0 * std::f64::consts::PI * first).powi(n as i32 + 1) / (1.0 - ratio)
}

/// `I_n(G_{2k};τ)` from the termwise-integrated q-series:
/// `-n!·Σ_m σ_{2k-1}(m) qᵐ/(2πi·m)^{n+1} - a₀τ^{n+1}/(n+1)`.
pub fn eichler_in_numeric(n: u32, two_k: u32, ctx: &NumContext) -> Result<Complex64> {
    check_weight(two_k)?;
    let bound = tail_bound(n, two_k, ctx.q_cutoff, ctx.tau.im);
    if bound.is_nan() || bound > ctx.quad_tol {
        return Err(Error::CutoffTooSmall { cutoff: ctx.q_cutoff, im_tau: ctx.tau.im, tol: ctx.quad_tol });
    }
    let g = eisenstein_q(two_k, ctx.q_cutoff)?;
    let twopii = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let q = (twopii * ctx.tau).exp();
    let fact: f64 = (1..=n).map(f64::from).product();
    let mut acc = Complex64::zero();
    let mut qm = Complex64::new(1.0, 0.0);
    for (i, c) in g.coeffs_f64().into_iter().enumerate() {
        qm *= q;
        let m = (i + 1) as f64;
        acc += qm * c / (twopii * m).powi(n as i32 + 1);
    }
    Ok(-acc * fact - g.a0_f64() * ctx.tau.powi(n as i32 + 1) / f64::from(n + 1))
}

/// Evaluates every symbol `I[n,2k]` in the set.
pub fn eichler_values(
    symbols: impl IntoIterator<Item = EichlerIndex>,
    ctx: &NumContext,
) -> Result<HashMap<EichlerIndex, Complex64>> {
    let unique: BTreeSet<EichlerIndex> = symbols.into_iter().collect();
    unique.into_iter().map(|i| Ok((i, eichler_in_numeric(i.n, i.weight, ctx)?))).collect()
}

fn ray_point(tau: Complex64, t: f64) -> Complex64 {
    tau + Complex64::new(0.0, t)
}

/// Quadrature of `∫_τ^{i∞}(G_{2k} - a₀)(τ-z)ⁿ dz` along `z = τ + it`, minus `a₀τ^{n+1}/(n+1)`.
pub fn eichler_quadrature(n: u32, two_k: u32, tau: Complex64, tol: f64) -> Result<Complex64> {
    check_weight(two_k)?;
    let g = eisenstein_q(two_k, quadrature_cutoff(tau))?;
    let i = Complex64::new(0.0, 1.0);
    let f = |t: f64| {
        let z = ray_point(tau, t);
        g.eval_nonconstant(z) * (tau - z).powi(n as i32) * i
    };
    let integral = integrate(f, 0.0, RAY_LENGTH, tol * 1e-3, tol * 1e-3);
    Ok(integral - g.a0_f64() * tau.powi(n as i32 + 1) / f64::from(n + 1))
}

/// `(n-1)!·𝒢({0}_{n-1},2k,0;τ) = τI_{n-1} - I_n` computed as a double integral.
///
/// With `F(z) = ∫_z^{i∞}(G - a₀)` and `h(z) = z(τ-z)^{n-1}`, integration by parts
/// gives `∫_τ^{i∞} h(G - a₀) = h(τ)F(τ) + ∫_τ^{i∞} h'F`, and the elementary part is
/// `-a₀τ^{n+1}/(n(n+1))`. `F` is itself evaluated by quadrature.
pub fn iterated_quadrature(n: u32, two_k: u32, tau: Complex64, tol: f64) -> Result<Complex64> {
    check_weight(two_k)?;
    if n < 1 {
        return Err(Error::UnsupportedIndexShape(vec![two_k, 0]));
    }
    let g = eisenstein_q(two_k, quadrature_cutoff(tau))?;
    let i = Complex64::new(0.0, 1.0);
    let inner_tol = tol * 1e-4;
    let tail = |z: Complex64| -> Complex64 {
        integrate(|t| g.eval_nonconstant(ray_point(z, t)) * i, 0.0, RAY_LENGTH, inner_tol, inner_tol)
    };
    let h_prime = |z: Complex64| -> Complex64 {
        let w = tau - z;
        let lead = if n == 1 { Complex64::new(1.0, 0.0) } else { w.powi(n as i32 - 1) };
        let second = if n >= 2 { z * w.powi(n as i32 - 2) * f64::from(n - 1) } else { Complex64::zero() };
        lead - second
    };
    let outer = integrate(
        |t| {
            let z = ray_point(tau, t);
            h_prime(z) * tail(z) * i
        },
        0.0,
        RAY_LENGTH,
        tol * 1e-3,
        tol * 1e-3,
    );
    let boundary = if n == 1 { tau * tail(tau) } else { Complex64::zero() };
    let a0 = g.a0_f64();
    Ok(outer + boundary - a0 * tau.powi(n as i32 + 1) / f64::from(n * (n + 1)))
}

fn quadrature_cutoff(tau: Complex64) -> usize {
    // Enough modes that |q|^M is below 1e-30 on the ray.
    ((30.0 * std::f64::consts::LN_10) / (2.0 * std::f64::consts::PI * tau.im)).ceil() as usize + 8
}

/// Checks `𝒢({0}_{n-1},2k,0) = 𝒢(0)·𝒢({0}_{n-1},2k) - n·𝒢({0}_n,2k)` numerically.
pub fn shuffle_check(n: u32, two_k: u32, ctx: &NumContext) -> Result<bool> {
    let (lhs, rhs) = shuffle_sides(n, two_k, ctx)?;
    Ok((lhs - rhs).norm() <= ctx.quad_tol * (1.0 + lhs.norm().max(rhs.norm())))
}

/// Both sides of the shuffle identity after rewriting into `I`-symbols.
pub fn shuffle_sides(n: u32, two_k: u32, ctx: &NumContext) -> Result<(Complex64, Complex64)> {
    if n < 1 {
        return Err(Error::InvalidWeight(n as i64, "shuffle identity needs n >= 1"));
    }
    check_weight(two_k)?;
    let zeros = |len: u32| vec![0u32; len as usize];
    let lhs_sym = rewrite_iter_eis(&IterEisSymbol::new([zeros(n - 1), vec![two_k, 0]].concat()))?;
    let g0 = rewrite_iter_eis(&IterEisSymbol::new(zeros(1)))?;
    let g1 = rewrite_iter_eis(&IterEisSymbol::new([zeros(n - 1), vec![two_k]].concat()))?;
    let g2 = rewrite_iter_eis(&IterEisSymbol::new([zeros(n), vec![two_k]].concat()))?;
    let rhs_sym = &g0 * &g1 - g2.scale(&Rational::from_integer(n.into()));
    let values = eichler_values(
        crate::symring::eichler_symbols(&lhs_sym).into_iter().chain(crate::symring::eichler_symbols(&rhs_sym)),
        ctx,
    )?;
    let lhs = crate::symring::eval_numeric(&lhs_sym, ctx, &values)?;
    let rhs = crate::symring::eval_numeric(&rhs_sym, ctx, &values)?;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EichlerRow {
    pub tau: Complex64,
    pub n: u32,
    pub weight: u32,
    pub value: Complex64,
}

/// Table of `I_n(G_{2k};τ)` for `n ≤ max_n`, `2 ≤ 2k ≤ max_weight`, at each `τ`.
pub fn eichler_table(taus: &[Complex64], max_n: u32, max_weight: u32, q_cutoff: usize, tol: f64) -> Result<Vec<EichlerRow>> {
    let mut rows = Vec::new();
    for &tau in taus {
        let ctx = NumContext::new(tau, q_cutoff, NumContext::DEFAULT_PRECISION, tol)?;
        for weight in (2..=max_weight).step_by(2) {
            for n in 0..=max_n {
                rows.push(EichlerRow { tau, n, weight, value: eichler_in_numeric(n, weight, &ctx)? });
            }
        }
    }
    Ok(rows)
}

/// CSV with columns `n,2k,re,im`; `tau_re,tau_im` are prepended for multi-point grids.
pub fn eichler_csv(rows: &[EichlerRow], with_tau: bool) -> String {
    let mut out = String::new();
    if with_tau {
        out.push_str("tau_re,tau_im,");
    }
    out.push_str("n,2k,re,im\n");
    for r in rows {
        if with_tau {
            let _ = write!(out, "{:e},{:e},", r.tau.re, r.tau.im);
        }
        let _ = writeln!(out, "{},{},{:.17e},{:.17e}", r.n, r.weight, r.value.re, r.value.im);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn eisenstein_examples() {
        let g4 = eisenstein_q(4, 2).unwrap();
        assert_eq!(g4.a0, rat(1, 240));
        assert_eq!(g4.q_coeffs, vec![BigUint::from(1u32), BigUint::from(9u32)]);
        let g0 = eisenstein_q(0, 5).unwrap();
        assert_eq!(g0.a0, rat(-1, 1));
        assert!(g0.q_coeffs.is_empty());
        assert_eq!(eisenstein_q(2, 1).unwrap().a0, rat(-1, 24));
        assert!(eisenstein_q(3, 4).is_err());
    }

    #[test]
    fn g4_is_modular() {
        // G₄(-1/τ) = τ⁴ G₄(τ).
        let g = eisenstein_q(4, 80).unwrap();
        let tau = Complex64::new(0.2, 1.1);
        let lhs = g.eval(-1.0 / tau);
        assert!(rel_err(lhs, tau.powi(4) * g.eval(tau)) < 1e-12);
    }

    #[test]
    fn rewrite_examples() {
        let s = |v: &[u32]| rewrite_iter_eis(&IterEisSymbol::new(v.to_vec())).unwrap();
        assert_eq!(s(&[0, 0]), SymCoeff::tau_pow(2).scale(&rat(1, 2)));
        assert_eq!(s(&[0, 4]), SymCoeff::eichler(1, 4).unwrap());
        assert_eq!(s(&[4, 0]), SymCoeff::tau() * SymCoeff::eichler(0, 4).unwrap() - SymCoeff::eichler(1, 4).unwrap());
        assert_eq!(s(&[]), SymCoeff::one());
        assert!(matches!(
            rewrite_iter_eis(&IterEisSymbol::new(vec![4, 4])),
            Err(Error::UnsupportedIndexShape(_))
        ));
        assert!(rewrite_iter_eis(&IterEisSymbol::new(vec![4, 0, 0])).is_err());
    }

    #[test]
    fn eichler_matches_quadrature() {
        let tau = Complex64::new(0.0, 1.0);
        let ctx = NumContext::at(tau).unwrap();
        for (n, w) in [(0, 4), (2, 4), (3, 6)] {
            let series = eichler_in_numeric(n, w, &ctx).unwrap();
            let quad = eichler_quadrature(n, w, tau, 1e-12).unwrap();
            assert!(rel_err(series, quad) < 1e-9, "I[{n},{w}]: {series} vs {quad}");
        }
    }

    #[test]
    fn iterated_matches_symbols() {
        let tau = Complex64::new(0.3, 1.2);
        let ctx = NumContext::at(tau).unwrap();
        for (n, w) in [(1, 4), (2, 4)] {
            let sym = tau * eichler_in_numeric(n - 1, w, &ctx).unwrap() - eichler_in_numeric(n, w, &ctx).unwrap();
            let quad = iterated_quadrature(n, w, tau, 1e-11).unwrap();
            assert!((sym - quad).norm() < 1e-8 * (1.0 + sym.norm()), "n={n}: {sym} vs {quad}");
        }
    }

    #[test]
    fn cutoff_guard() {
        let ctx = NumContext::new(Complex64::new(0.0, 0.05), 4, 30, 1e-9).unwrap();
        assert!(matches!(eichler_in_numeric(0, 4, &ctx), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn cutoff_stability() {
        let tau = Complex64::new(0.1, 0.8);
        let lo = NumContext::new(tau, 40, 30, 1e-9).unwrap();
        let hi = NumContext::new(tau, 80, 30, 1e-9).unwrap();
        for (n, w) in [(0, 2), (3, 8), (6, 12)] {
            let d = (eichler_in_numeric(n, w, &lo).unwrap() - eichler_in_numeric(n, w, &hi).unwrap()).norm();
            assert!(d < 1e-9, "I[{n},{w}] moved by {d}");
        }
    }

    #[test]
    fn shuffle_examples() {
        assert!(shuffle_check(1, 4, &NumContext::at(Complex64::new(0.0, 1.0)).unwrap()).unwrap());
        assert!(shuffle_check(2, 6, &NumContext::at(Complex64::new(0.0, 2.0)).unwrap()).unwrap());
    }

    #[test]
    fn csv_layout() {
        let rows = eichler_table(&[Complex64::new(0.0, 1.0)], 1, 4, 64, 1e-9).unwrap();
        let csv = eichler_csv(&rows, false);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,2k,re,im"));
        assert_eq!(lines.count(), 4);
    }
}
