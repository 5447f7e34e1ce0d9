//! Composite Gauss–Legendre quadrature with panels centered on the Beta mode.
//!
//! For large `k+l` the weight `ρ_{k,l}` is a spike of width `σ ≈ √(kl)/n^{3/2}`
//! around `k/n`; uniform paneling would waste almost every node where
//! `ρ ≈ 0`. The panel builder places a core panel of half-width
//! `max(6σ, 1/points)` at the mode and fills the rest of `[0,1]` with
//! geometrically growing panels. Known integrand breakpoints (kink locations,
//! polyline knots) become additional panel boundaries. Refinement bisects
//! every panel and the result is accepted once two successive refinements
//! agree to the target tolerance.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::kernel::KernelIndex;
use crate::math;

/// Quadrature configuration: nodes per panel, mode-panel growth factor, and
/// target relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Gauss–Legendre nodes per panel (≥ 2).
    pub points: usize,
    /// Growth factor of the panels filling the space away from the mode.
    pub growth: f64,
    /// Target relative tolerance (absolute below magnitude 1).
    pub rel_tol: f64,
    /// Maximum number of panel bisection rounds before giving up.
    pub max_refinements: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            points: 16,
            growth: 2.0,
            rel_tol: 1e-11,
            max_refinements: 14,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if self.points < 2 {
            return Err(QuadError::BadConfig("points per panel must be >= 2"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(QuadError::BadConfig("tolerance must be positive"));
        }
        if !(self.growth > 1.0) {
            return Err(QuadError::BadConfig("growth factor must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    BadConfig(&'static str),
    /// Refinement stalled above tolerance; carries the last two values.
    NonConvergence { last: f64, previous: f64 },
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::BadConfig(msg) => write!(f, "invalid quadrature config: {msg}"),
            QuadError::NonConvergence { last, previous } => write!(
                f,
                "quadrature did not converge: last two refinements {previous} and {last}"
            ),
        }
    }
}

impl core::error::Error for QuadError {}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-based initial guess.
            let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if math::abs(dx) < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: &F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel boundaries in `[0,1]` centered on the Beta mode, merged with any
/// required breakpoints, sorted and deduplicated.
fn mode_panels(idx: KernelIndex, breaks: &[f64], cfg: &QuadConfig) -> Vec<f64> {
    let n = idx.n();
    let center = if n == 0 {
        0.5
    } else {
        idx.k as f64 / n as f64
    };
    let sigma = idx.std_dev();
    let w = (6.0 * sigma).max(1.0 / cfg.points as f64);

    let mut cuts = vec![0.0, 1.0];
    let lo = (center - w).max(0.0);
    let hi = (center + w).min(1.0);
    if lo > 0.0 {
        cuts.push(lo);
    }
    if hi < 1.0 {
        cuts.push(hi);
    }
    if lo < center && center < hi {
        cuts.push(center);
    }
    // Geometric fill toward both ends.
    let mut width = 2.0 * w * cfg.growth;
    let mut left = lo;
    let mut right = hi;
    while left > 0.0 || right < 1.0 {
        left = (left - width).max(0.0);
        right = (right + width).min(1.0);
        if left > 0.0 {
            cuts.push(left);
        }
        if right < 1.0 {
            cuts.push(right);
        }
        width *= cfg.growth;
    }
    for &b in breaks {
        if b > 0.0 && b < 1.0 {
            cuts.push(b);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts
}

fn composite(rule: &GaussLegendre, cuts: &[f64], splits: usize, f: &impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = (b - a) / splits as f64;
        for j in 0..splits {
            let lo = a + j as f64 * h;
            acc += rule.integrate(lo, lo + h, f);
        }
    }
    acc
}

/// `∫₀¹ ρ_{k,l}(s)·f(s) ds` by adaptive mode-centered composite quadrature.
///
/// `breaks` lists interior points where `f` is not smooth; they are honored
/// as panel boundaries. Returns the value together with the achieved
/// refinement difference.
pub fn integrate_against_rho<F: Fn(f64) -> f64>(
    idx: KernelIndex,
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<(f64, f64), QuadError> {
    cfg.validate()?;
    let prefactor = idx.log_prefactor();
    let (k, l) = (idx.k as f64, idx.l as f64);
    let weighted = move |s: f64| {
        let mut lr = prefactor;
        if idx.k > 0 {
            lr += k * math::ln(s);
        }
        if idx.l > 0 {
            lr += l * math::ln_1p(-s);
        }
        math::exp(lr) * f(s)
    };
    let rule = GaussLegendre::new(cfg.points);
    let cuts = mode_panels(idx, breaks, cfg);
    adaptive(&rule, &cuts, cfg, &weighted)
}

/// `∫₀¹ f` by the same adaptive composite scheme on uniform base panels.
///
/// Used as the independent oracle for `L¹` distances and norm references.
pub fn integrate_unit_interval<F: Fn(f64) -> f64>(
    f: F,
    base_panels: usize,
    cfg: &QuadConfig,
) -> Result<(f64, f64), QuadError> {
    cfg.validate()?;
    let rule = GaussLegendre::new(cfg.points);
    let cuts: Vec<f64> = (0..=base_panels.max(1))
        .map(|j| j as f64 / base_panels.max(1) as f64)
        .collect();
    adaptive(&rule, &cuts, cfg, &f)
}

fn adaptive(
    rule: &GaussLegendre,
    cuts: &[f64],
    cfg: &QuadConfig,
    f: &impl Fn(f64) -> f64,
) -> Result<(f64, f64), QuadError> {
    let mut prev = composite(rule, cuts, 1, f);
    let mut splits = 2usize;
    for _ in 0..cfg.max_refinements {
        let cur = composite(rule, cuts, splits, f);
        let diff = math::abs(cur - prev);
        if diff <= cfg.rel_tol * math::abs(cur).max(1.0) {
            return Ok((cur, diff));
        }
        prev = cur;
        splits *= 2;
    }
    let last = composite(rule, cuts, splits, f);
    if math::abs(last - prev) <= cfg.rel_tol * math::abs(last).max(1.0) {
        return Ok((last, math::abs(last - prev)));
    }
    Err(QuadError::NonConvergence {
        last,
        previous: prev,
    })
}

/// Beta-distribution expectations by an independent route (closed forms),
/// used in tests as oracles for the quadrature.
pub mod oracle {
    use super::KernelIndex;

    /// `E[B] = (k+1)/(n+2)` for `B ~ Be(k+1, l+1)`.
    pub fn beta_mean(idx: KernelIndex) -> f64 {
        idx.mean()
    }

    /// `E[B^m]` via the rising-factorial ratio.
    pub fn beta_moment(idx: KernelIndex, m: usize) -> f64 {
        let a = (idx.k + 1) as f64;
        let ab = (idx.n() + 2) as f64;
        let mut acc = 1.0;
        for j in 0..m {
            acc *= (a + j as f64) / (ab + j as f64);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // n-point Gauss-Legendre is exact through degree 2n-1.
        for pts in [2usize, 5, 8, 16, 32] {
            let rule = GaussLegendre::new(pts);
            assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * pts - 1;
            let f = |x: f64| x.powi(deg as i32) + 0.5 * x.powi((deg - 1) as i32);
            let got = rule.integrate(-1.0, 1.0, &f);
            let exact = 0.5 * 2.0 / deg as f64; // odd part cancels
            assert!(
                (got - exact).abs() < 1e-12,
                "pts={pts}: got {got}, want {exact}"
            );
        }
    }

    #[test]
    fn composite_error_drops_at_gauss_rate() {
        // Halving the panel width must shrink the error by at least
        // 2^(2·points - 1) on a smooth non-polynomial integrand.
        let pts = 3usize;
        let rule = GaussLegendre::new(pts);
        let f = |x: f64| (4.0 * x).sin();
        let exact = (1.0 - (4.0f64).cos()) / 4.0;
        let cuts = [0.0, 1.0];
        let e1 = (composite(&rule, &cuts, 1, &f) - exact).abs();
        let e2 = (composite(&rule, &cuts, 2, &f) - exact).abs();
        let order = 2.0f64.powi(2 * pts as i32 - 1);
        assert!(
            e1 / e2 >= order * 0.5,
            "observed ratio {} below {}",
            e1 / e2,
            order
        );
    }

    #[test]
    fn rho_normalization_sampled() {
        let cfg = QuadConfig::default();
        for (k, l) in [(0, 0), (1, 1), (3, 40), (170, 170), (499, 1), (250, 250)] {
            let idx = KernelIndex::new(k, l);
            let (v, _) = integrate_against_rho(idx, |_| 1.0, &[], &cfg).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "k={k} l={l}: got {v}");
        }
    }

    #[test]
    fn rho_mean_matches_closed_form() {
        let cfg = QuadConfig::default();
        for (k, l) in [(0, 0), (2, 7), (100, 30), (400, 100)] {
            let idx = KernelIndex::new(k, l);
            let (v, _) = integrate_against_rho(idx, |s| s, &[], &cfg).unwrap();
            let want = oracle::beta_mean(idx);
            assert!((v - want).abs() < 1e-10, "k={k} l={l}: {v} vs {want}");
        }
    }

    #[test]
    fn zero_integrand_is_zero() {
        let cfg = QuadConfig::default();
        let (v, _) = integrate_against_rho(KernelIndex::new(5, 5), |_| 0.0, &[], &cfg).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn breakpoints_admit_kinked_integrands() {
        let cfg = QuadConfig::with_tol(1e-9);
        let idx = KernelIndex::new(8, 8);
        let f = |s: f64| (s - 0.5f64).abs().sqrt();
        let with = integrate_against_rho(idx, f, &[0.5], &cfg).unwrap().0;
        // Oracle: E|B - 1/2|^(1/2) via dense Simpson on the kink halves.
        let oracle = {
            let g = 200_000usize;
            let mut acc = 0.0;
            for j in 0..g {
                let a = j as f64 / g as f64;
                let b = (j + 1) as f64 / g as f64;
                let m = 0.5 * (a + b);
                let rho = |s: f64| crate::kernel::rho(idx, s).unwrap() * f(s);
                acc += (b - a) / 6.0 * (rho(a) + 4.0 * rho(m) + rho(b));
            }
            acc
        };
        assert!(
            (with - oracle).abs() < 1e-7,
            "kink quadrature {with} vs oracle {oracle}"
        );
    }

    #[test]
    fn non_convergence_reports_last_two() {
        // An unannounced kink with an impossible tolerance and almost no
        // refinement budget must fail and carry both refinement values.
        let cfg = QuadConfig {
            points: 2,
            growth: 2.0,
            rel_tol: 1e-16,
            max_refinements: 2,
        };
        let f = |s: f64| (s - 0.337f64).abs().sqrt();
        match integrate_against_rho(KernelIndex::new(0, 0), f, &[], &cfg) {
            Err(QuadError::NonConvergence { last, previous }) => {
                assert!(last.is_finite() && previous.is_finite());
                assert_ne!(last, previous);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = QuadConfig::default();
        cfg.points = 1;
        assert!(integrate_against_rho(KernelIndex::new(1, 1), |_| 1.0, &[], &cfg).is_err());
        let mut cfg = QuadConfig::default();
        cfg.rel_tol = 0.0;
        assert!(integrate_unit_interval(|_| 1.0, 4, &cfg).is_err());
    }

    #[test]
    fn unit_interval_oracle() {
        let cfg = QuadConfig::with_tol(1e-12);
        let (v, _) = integrate_unit_interval(|s| (2.0 * core::f64::consts::PI * s).cos().abs(), 64, &cfg)
            .unwrap();
        assert!((v - 2.0 / core::f64::consts::PI).abs() < 1e-8, "got {v}");
    }
}
