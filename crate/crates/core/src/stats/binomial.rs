use crate::error::{Error, Result};
use crate::math::{exp, ln, ln_1p, ln_gamma};

/// `Pr(Binomial(n, p) ≥ k)`, summed term by term in log space.
pub fn binomial_tail(n: u64, p: f64, k: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("p must lie in (0, 1), got {p}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(alloc::format!("k = {k} exceeds n = {n}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let (lp, lq) = (ln(p), ln_1p(-p));
    let ln_choose = |i: u64| ln_gamma(n as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((n - i) as f64 + 1.0);
    let terms = (k..=n).map(|i| ln_choose(i) + i as f64 * lp + (n - i) as f64 * lq);
    let peak = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.map(|t| exp(t - peak)).sum();
    Ok((exp(peak) * sum).min(1.0))
}
