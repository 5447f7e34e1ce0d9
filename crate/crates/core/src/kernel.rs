//! The Beta kernels `ρ_{k,l}` in log space, their mode, and the
//! fast-decay envelope `3n^{3/2}·exp(−n^{2ε₀}/18)`.
//!
//! `ρ_{k,l}(s) = (k+l+1)!/(k!·l!) · s^k (1−s)^l` is the `Be(k+1, l+1)`
//! density. The prefactor overflows `f64` near `k+l ≈ 170`, so everything is
//! evaluated as `ln ρ` via the integer log-factorial and only exponentiated
//! inside quadrature weights.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Index pair of a Beta kernel; `n = k + l` is the level minus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelIndex {
    pub k: usize,
    pub l: usize,
}

impl KernelIndex {
    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }

    /// `n = k + l`.
    pub fn n(&self) -> usize {
        self.k + self.l
    }

    /// `ln[(n+1)!/(k!·l!)]`, the log of the density prefactor.
    pub fn log_prefactor(&self) -> f64 {
        math::ln_factorial(self.n() + 1) - math::ln_factorial(self.k) - math::ln_factorial(self.l)
    }

    /// Mean of `Be(k+1, l+1)`: `(k+1)/(n+2)`.
    pub fn mean(&self) -> f64 {
        (self.k + 1) as f64 / (self.n() + 2) as f64
    }

    /// Standard deviation of `Be(k+1, l+1)`.
    pub fn std_dev(&self) -> f64 {
        let (a, b) = ((self.k + 1) as f64, (self.l + 1) as f64);
        let n2 = a + b;
        math::sqrt(a * b / (n2 * n2 * (n2 + 1.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelError {
    /// Argument outside `[0,1]`.
    OutOfDomain { s: f64 },
    /// The uniform density `ρ_{0,0}` has no unique mode.
    NoMode,
    /// `ε₀` must lie in the open interval `(0, ½)`.
    BadExponent { eps0: f64 },
    /// `n` must be positive.
    BadLevel { n: usize },
    /// Grid must have at least two points.
    BadGrid { size: usize },
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::OutOfDomain { s } => write!(f, "s = {s} is outside [0, 1]"),
            KernelError::NoMode => write!(f, "rho_{{0,0}} is uniform and has no unique mode"),
            KernelError::BadExponent { eps0 } => {
                write!(f, "epsilon0 = {eps0} is outside the open interval (0, 1/2)")
            }
            KernelError::BadLevel { n } => write!(f, "level n = {n} must be >= 1"),
            KernelError::BadGrid { size } => write!(f, "grid size {size} must be >= 2"),
        }
    }
}

impl core::error::Error for KernelError {}

/// `ln ρ_{k,l}(s)` with the `0·ln 0 := 0` endpoint convention.
///
/// Returns `-∞` when an endpoint meets a positive exponent; finite for all
/// `s ∈ (0,1)` and all `k+l` well past `10⁶`.
pub fn log_rho(idx: KernelIndex, s: f64) -> Result<f64, KernelError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(KernelError::OutOfDomain { s });
    }
    let mut acc = idx.log_prefactor();
    if idx.k > 0 {
        if s == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += idx.k as f64 * math::ln(s);
    }
    if idx.l > 0 {
        if s == 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += idx.l as f64 * math::ln_1p(-s);
    }
    Ok(acc)
}

/// `ρ_{k,l}(s)`, exponentiated from [`log_rho`] (may underflow to 0).
pub fn rho(idx: KernelIndex, s: f64) -> Result<f64, KernelError> {
    log_rho(idx, s).map(math::exp)
}

/// The unique maximizer `k/n` of `ρ_{k,l}`; rejects `n = 0`.
pub fn rho_mode(idx: KernelIndex) -> Result<f64, KernelError> {
    let n = idx.n();
    if n == 0 {
        return Err(KernelError::NoMode);
    }
    Ok(idx.k as f64 / n as f64)
}

/// The envelope `3·n^{3/2}·exp(−n^{2ε₀}/18)` bounding `ρ_{k,l}` away from
/// its mode.
pub fn fast_decay_envelope(n: usize, eps0: f64) -> Result<f64, KernelError> {
    if n == 0 {
        return Err(KernelError::BadLevel { n });
    }
    if !(eps0 > 0.0 && eps0 < 0.5) {
        return Err(KernelError::BadExponent { eps0 });
    }
    Ok(math::exp(log_fast_decay_envelope(n, eps0)))
}

fn log_fast_decay_envelope(n: usize, eps0: f64) -> f64 {
    let nf = n as f64;
    math::ln(3.0) + 1.5 * math::ln(nf) - math::powf(nf, 2.0 * eps0) / 18.0
}

/// One row of a fast-decay sweep: the worst `ρ/envelope` ratio over the
/// excluded region `|s − k/n| ≥ n^{−1/2+ε₀}` and the number of grid points
/// violating the bound.
#[derive(Debug, Clone, Copy)]
pub struct FastDecayRow {
    pub n: usize,
    pub eps0: f64,
    pub worst_ratio: f64,
    pub violations: usize,
}

/// Sweep output of [`check_fast_decay`].
#[derive(Debug, Clone)]
pub struct FastDecayReport {
    pub rows: Vec<FastDecayRow>,
    /// Smallest scanned `n` from which no later scanned `n` violates the
    /// bound; `None` when the largest scanned `n` still violates it.
    pub empirical_n0: Option<usize>,
}

/// Scans `ρ_{k,l} ≤ envelope` over every `k ≤ n`, for each `n` in `ns`, on a
/// uniform `s_grid`-point grid restricted to `|s − k/n| ≥ n^{−1/2+ε₀}`.
///
/// Report-only: violations are counted, never fatal. The bound is checked in
/// log space so ratios far below underflow are still ordered correctly.
pub fn check_fast_decay(
    ns: &[usize],
    eps0: f64,
    s_grid: usize,
) -> Result<FastDecayReport, KernelError> {
    if !(eps0 > 0.0 && eps0 < 0.5) {
        return Err(KernelError::BadExponent { eps0 });
    }
    if s_grid < 2 {
        return Err(KernelError::BadGrid { size: s_grid });
    }
    let mut sorted: Vec<usize> = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let grid: Vec<f64> = (0..s_grid)
        .map(|j| j as f64 / (s_grid - 1) as f64)
        .collect();
    // ln s and ln(1-s); the endpoint infinities are skipped per (k,l) below.
    let ln_s: Vec<f64> = grid.iter().map(|&s| math::ln(s)).collect();
    let ln_1ms: Vec<f64> = grid.iter().map(|&s| math::ln_1p(-s)).collect();

    let mut rows = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        if n == 0 {
            return Err(KernelError::BadLevel { n });
        }
        let nf = n as f64;
        let delta = math::powf(nf, -0.5 + eps0);
        let log_env = log_fast_decay_envelope(n, eps0);
        let mut worst = f64::NEG_INFINITY;
        let mut violations = 0usize;
        for k in 0..=n {
            let idx = KernelIndex::new(k, n - k);
            let prefactor = idx.log_prefactor();
            let mode = k as f64 / nf;
            let (kf, lf) = (k as f64, (n - k) as f64);
            for (j, &s) in grid.iter().enumerate() {
                if math::abs(s - mode) < delta {
                    continue;
                }
                // rho vanishes at an endpoint met by a positive exponent.
                if (s == 0.0 && k > 0) || (s == 1.0 && k < n) {
                    continue;
                }
                let mut lr = prefactor;
                if k > 0 {
                    lr += kf * ln_s[j];
                }
                if k < n {
                    lr += lf * ln_1ms[j];
                }
                let diff = lr - log_env;
                if diff > worst {
                    worst = diff;
                }
                if diff > 0.0 {
                    violations += 1;
                }
            }
        }
        rows.push(FastDecayRow {
            n,
            eps0,
            worst_ratio: math::exp(worst),
            violations,
        });
    }

    let mut empirical_n0 = None;
    for row in rows.iter().rev() {
        if row.violations == 0 {
            empirical_n0 = Some(row.n);
        } else {
            break;
        }
    }
    Ok(FastDecayReport { rows, empirical_n0 })
}
