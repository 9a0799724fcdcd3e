//! Regularized incomplete gamma and beta functions and the distribution
//! tails built on them.

use crate::math::{abs, erfc, exp, ln, ln_gamma};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 1000;

/// Lower regularized incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Upper regularized incomplete gamma `Q(a, x) = 1 − P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if abs(term) < abs(sum) * EPS {
            break;
        }
    }
    sum * exp(-x + a * ln(x) - ln_gamma(a))
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if abs(d) < TINY {
            d = TINY;
        }
        c = b + an / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if abs(delta - 1.0) < EPS {
            break;
        }
    }
    exp(-x + a * ln(x) - ln_gamma(a)) * h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    beta_inc_pair(a, b, x).0
}

/// `(I_x(a, b), 1 − I_x(a, b))`, with whichever side the continued fraction
/// evaluates directly kept at full relative precision.
pub fn beta_inc_pair(a: f64, b: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * ln(x) + b * ln(1.0 - x);
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = exp(ln_front) * beta_cf(a, b, x) / a;
        (lower, 1.0 - lower)
    } else {
        let upper = exp(ln_front) * beta_cf(b, a, 1.0 - x) / b;
        (1.0 - upper, upper)
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if abs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if abs(delta - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / core::f64::consts::SQRT_2)
}

/// Standard normal upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / core::f64::consts::SQRT_2)
}

/// `Pr(χ²(df) ≥ x)`.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    gamma_q(df / 2.0, x / 2.0)
}

/// `Pr(F(d1, d2) ≥ x)`.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    beta_inc_pair(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)).0
}

/// Two-sided `Pr(|T(df)| ≥ |t|)`.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    beta_inc_pair(df / 2.0, 0.5, df / (df + t * t)).0
}

/// `Pr(T(df) ≥ t)`.
pub fn t_sf(t: f64, df: f64) -> f64 {
    let half = 0.5 * t_two_sided(t, df);
    if t >= 0.0 {
        half
    } else {
        1.0 - half
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from scipy.special / scipy.stats.

    #[test]
    fn incomplete_gamma() {
        let cases = [
            (0.5, 0.1, 0.34527915398142317),
            (1.0, 1.0, 0.6321205588285577),
            (2.5, 3.0, 0.6937810815867212),
            (10.0, 5.0, 0.03182805730620481),
            (10.0, 20.0, 0.9950045876916924),
            (100.0, 90.0, 0.15822098918643007),
        ];
        for (a, x, p) in cases {
            assert_relative_eq!(gamma_p(a, x), p, max_relative = 1e-10);
            assert_relative_eq!(gamma_q(a, x), 1.0 - p, max_relative = 1e-9);
        }
        assert_relative_eq!(gamma_q(10.0, 20.0), 0.0049954123083075785, max_relative = 1e-10);
    }

    #[test]
    fn incomplete_beta() {
        let cases = [
            (0.5, 0.5, 0.3, 0.36901011956554536),
            (2.0, 3.0, 0.4, 0.5248),
            (10.0, 2.0, 0.9, 0.6973568802000002),
            (0.5, 15.0, 0.01, 0.4139350352236643),
            (50.0, 60.0, 0.45, 0.46423529143060444),
            (1.0, 1.0, 0.7, 0.7),
        ];
        for (a, b, x, i) in cases {
            assert_relative_eq!(beta_inc(a, b, x), i, max_relative = 1e-10);
            let (lo, hi) = beta_inc_pair(b, a, 1.0 - x);
            assert_relative_eq!(hi, i, max_relative = 1e-10);
            assert_relative_eq!(lo + hi, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn distribution_tails() {
        assert_relative_eq!(chi2_sf(2.8824, 2.0), 0.23664361589147478, max_relative = 1e-10);
        assert_relative_eq!(chi2_sf(3.84, 1.0), 0.05004352124870519, max_relative = 1e-10);
        assert_relative_eq!(chi2_sf(50.0, 10.0), 2.669083424904495e-07, max_relative = 1e-10);
        assert_relative_eq!(chi2_sf(0.5, 3.0), 0.9188914116546758, max_relative = 1e-10);

        assert_relative_eq!(f_sf(1.98578, 2.0, 70.0), 0.14493196500091576, max_relative = 1e-10);
        assert_relative_eq!(f_sf(3.0, 5.0, 10.0), 0.06555756209384413, max_relative = 1e-10);
        assert_relative_eq!(f_sf(0.1, 1.0, 1.0), 0.805017770957863, max_relative = 1e-10);
        assert_relative_eq!(f_sf(40.0, 3.0, 200.0), 2.7079201317013677e-20, max_relative = 1e-9);

        assert_relative_eq!(t_two_sided(2.0, 4.0), 0.1161165235168155, max_relative = 1e-10);
        assert_relative_eq!(t_two_sided(0.5, 99.0), 0.6181846440244061, max_relative = 1e-10);
        assert_relative_eq!(t_two_sided(-10.0, 3.0), 0.0021283990584141494, max_relative = 1e-10);
        assert_relative_eq!(t_two_sided(1.0, 1.0), 0.5, max_relative = 1e-10);
        assert_relative_eq!(t_sf(-2.0, 4.0), 1.0 - 0.1161165235168155 / 2.0, max_relative = 1e-12);

        for (z, p) in [
            (-3.0, 0.0013498980316300933),
            (-1.0, 0.15865525393145707),
            (0.0, 0.5),
            (1.5, 0.9331927987311419),
            (6.0, 0.9999999990134123),
        ] {
            assert_relative_eq!(normal_cdf(z), p, max_relative = 1e-12);
            assert_relative_eq!(normal_sf(-z), p, max_relative = 1e-12);
        }
    }
}
