//! Floating-point special values.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const BORWEIN_TERMS: usize = 40;

fn borwein_weights() -> &'static [f64] {
    static D: OnceLock<Vec<f64>> = OnceLock::new();
    D.get_or_init(|| {
        // d_k = n Σ_{i=0}^{k} (n+i-1)! 4^i / ((n-i)! (2i)!)
        let n = BORWEIN_TERMS;
        let mut d = Vec::with_capacity(n + 1);
        let mut term = 1.0 / n as f64; // i = 0: (n-1)!/n! = 1/n
        let mut acc = 0.0;
        for i in 0..=n {
            if i > 0 {
                let i_f = i as f64;
                term *= (n as f64 + i_f - 1.0) * 4.0 * (n as f64 - i_f + 1.0)
                    / ((2.0 * i_f - 1.0) * (2.0 * i_f));
            }
            acc += term;
            d.push(n as f64 * acc);
        }
        d
    })
    .as_slice()
}

/// Riemann zeta at an integer `s ≥ 2`, via Borwein's alternating-series acceleration.
///
/// Independent of Bernoulli numbers, so it can cross-check the even-zeta rewrite.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta({s}) diverges or is not in the alphabet");
    if s > 60 {
        return 1.0 + 2f64.powi(-(s as i32));
    }
    let d = borwein_weights();
    let n = BORWEIN_TERMS;
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - d[n]) / ((k + 1) as f64).powi(s as i32);
    }
    -sum / (d[n] * (1.0 - 2f64.powi(1 - s as i32)))
}

/// `Σ_{m=1}^{cutoff} m^{-s}` summed from the small end, plus the Euler–Maclaurin
/// tail `Σ_{m>cutoff} m^{-s}`.
pub fn zeta_direct_sum(s: u32, cutoff: u64) -> f64 {
    let mut partial = 0.0;
    for m in (1..=cutoff).rev() {
        partial += (m as f64).powi(-(s as i32));
    }
    partial + zeta_tail(s, cutoff)
}

/// Raw partial sum `Σ_{m=1}^{cutoff} m^{-s}` without tail.
pub fn zeta_partial_sum(s: u32, cutoff: u64) -> f64 {
    (1..=cutoff).rev().map(|m| (m as f64).powi(-(s as i32))).sum()
}

/// Euler–Maclaurin estimate of `Σ_{m>N} m^{-s}`:
/// `N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12 - s(s+1)(s+2) N^{-s-3}/720`.
pub fn zeta_tail(s: u32, cutoff: u64) -> f64 {
    let n = cutoff as f64;
    let s_f = s as f64;
    n.powf(1.0 - s_f) / (s_f - 1.0) - 0.5 * n.powf(-s_f) + s_f * n.powf(-s_f - 1.0) / 12.0
        - s_f * (s_f + 1.0) * (s_f + 2.0) * n.powf(-s_f - 3.0) / 720.0
}

/// Parses `"re,im"` into a point of the upper half plane.
pub fn parse_tau(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [re, im] = parts.as_slice() else {
        return Err(Error::Parse(format!("expected \"re,im\", got {s:?}")));
    };
    let parse = |p: &str| p.parse::<f64>().map_err(|e| Error::Parse(format!("{p:?}: {e}")));
    let (re, im) = (parse(re)?, parse(im)?);
    if !re.is_finite() || !(im.is_finite() && im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { re, im });
    }
    Ok(Complex64::new(re, im))
}
