//! Scalar math shims and the integer log-factorial.
//!
//! Under `std` the shims forward to the intrinsic `f64` methods; without it
//! they fall back to `libm` so the crate stays `no_std`-clean.

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    #[inline]
    pub fn ln_1p(x: f64) -> f64 {
        x.ln_1p()
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        x.round()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn ln_1p(x: f64) -> f64 {
        libm::log1p(x)
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
}

pub use imp::{abs, cos, exp, floor, ln, ln_1p, powf, round, sin, sqrt};

/// `x^n` by binary exponentiation; exact for `n = 0` (returns 1).
pub fn powi(x: f64, n: u32) -> f64 {
    let mut base = x;
    let mut e = n;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Exact `ln(m!)` for m ≤ 33, from u128 factorials.
const LN_FACT_SMALL: usize = 34;

fn ln_fact_small(m: usize) -> f64 {
    debug_assert!(m < LN_FACT_SMALL);
    let mut f: u128 = 1;
    for i in 2..=(m as u128) {
        f *= i;
    }
    ln(f as f64)
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

/// `ln(m!)` for any nonnegative `m`.
///
/// Exact-table route below 34, Stirling series (terms through `1/z⁷`) above;
/// relative accuracy ~1e-15 over the whole range, finite past `m = 10⁶`.
pub fn ln_factorial(m: usize) -> f64 {
    if m < LN_FACT_SMALL {
        return ln_fact_small(m);
    }
    // ln Γ(z) at z = m+1.
    let z = (m + 1) as f64;
    let zinv = 1.0 / z;
    let z2 = zinv * zinv;
    let series = zinv * (1.0 / 12.0 + z2 * (-1.0 / 360.0 + z2 * (1.0 / 1260.0 - z2 / 1680.0)));
    (z - 0.5) * ln(z) - z + LN_SQRT_2PI + series
}

/// Least-squares slope of `y` against `x` (simple linear regression).
///
/// Returns `None` when fewer than two points are given or the abscissas are
/// degenerate.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_small_exact() {
        // 20! = 2432902008176640000 fits u64 exactly.
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        let exact20 = (2432902008176640000u64 as f64).ln();
        assert!((ln_factorial(20) - exact20).abs() < 1e-13);
    }

    #[test]
    fn ln_factorial_matches_reference() {
        // Reference values computed with 40-digit arithmetic.
        let cases = [
            (2usize, 0.6931471805599453),
            (5, 4.787491742782046),
            (10, 15.104412573075516),
            (20, 42.335616460753485),
            (21, 45.38013889847691),
            (50, 148.47776695177302),
            (170, 706.5730622457873),
            (171, 711.71472580229),
            (500, 2611.3304584601564),
            (501, 2617.547064561241),
            (1000, 5912.128178488163),
            (1_000_000, 12815518.384658169),
        ];
        for (m, want) in cases {
            let got = ln_factorial(m);
            let rel = ((got - want) / want.max(1.0)).abs();
            assert!(rel < 1e-13, "ln({m}!): got {got}, want {want}");
        }
    }

    #[test]
    fn ln_factorial_recurrence() {
        // ln((m+1)!) - ln(m!) = ln(m+1), across the table/Stirling seam.
        for m in [30usize, 33, 34, 100, 5000] {
            let lhs = ln_factorial(m + 1) - ln_factorial(m);
            let rhs = ln((m + 1) as f64);
            assert!(
                (lhs - rhs).abs() < 1e-9 * rhs.max(1.0),
                "recurrence at m={m}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn powi_matches_powf() {
        for n in 0..20u32 {
            let a = powi(1.7, n);
            let b = powf(1.7, n as f64);
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        assert_eq!(powi(3.0, 0), 1.0);
    }

    #[test]
    fn slope_of_line_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let s = ls_slope(&xs, &ys).unwrap();
        assert!((s - 2.5).abs() < 1e-12);
        assert!(ls_slope(&[1.0], &[2.0]).is_none());
        assert!(ls_slope(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
