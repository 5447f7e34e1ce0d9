//! Recovery of derivatives, profiles, ratios, length, and traces from a
//! coefficient table.
//!
//! In scaled storage the recovery estimate *is* the table cell: the limit
//! tracks `(q+1)!·S_{p,q−p}/C₀^q = Ŝ_{p,q−p}` along a rational approximation
//! `p_n/q_n → x`, so no arithmetic beyond a lookup happens per step. The
//! final estimate is the last sequence element; a stagnation diagnostic (max
//! step over the last three terms) stands in for any extrapolation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::curve::{CurveError, Polyline};
use crate::engine::CoeffTable;
use crate::math;
use crate::rational::{RationalScheme, SchemeError};

#[derive(Debug, Clone, PartialEq)]
pub enum InvertError {
    AxialComponent { j: usize },
    ComponentOutOfRange { j: usize, dim: usize },
    TruncationExceeded { n: usize, n_max: usize },
    Scheme(SchemeError),
    /// No scheme pair fits inside the table truncation.
    NoUsablePairs,
    EmptyProfile,
    ProfileMismatch,
    Curve(CurveError),
}

impl fmt::Display for InvertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvertError::AxialComponent { j } => {
                write!(f, "component {j} is axial; its derivative is C0 by definition")
            }
            InvertError::ComponentOutOfRange { j, dim } => {
                write!(f, "component {j} out of range 1..={dim}")
            }
            InvertError::TruncationExceeded { n, n_max } => {
                write!(f, "level {n} exceeds table truncation {n_max}")
            }
            InvertError::Scheme(e) => write!(f, "scheme error: {e}"),
            InvertError::NoUsablePairs => {
                write!(f, "no rational pair has a denominator within the table truncation")
            }
            InvertError::EmptyProfile => write!(f, "profile has no samples"),
            InvertError::ProfileMismatch => write!(f, "profiles disagree on the sample grid"),
            InvertError::Curve(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for InvertError {}

impl From<SchemeError> for InvertError {
    fn from(e: SchemeError) -> Self {
        InvertError::Scheme(e)
    }
}

/// One recovery step: the pair `(p, q)` and the table cell it reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryStep {
    /// 1-based position in the scheme sequence.
    pub n: usize,
    pub p: u64,
    pub q: u64,
    pub estimate: f64,
}

/// The full estimate sequence for one `(j, x)` query.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySequence {
    pub target_x: f64,
    pub scheme: &'static str,
    pub steps: Vec<RecoveryStep>,
    pub final_estimate: f64,
    /// Max |Δ estimate| over the last three terms.
    pub stagnation: f64,
    /// Set when scheme pairs beyond the table truncation were dropped.
    pub truncated: bool,
}

fn validate_component(table: &CoeffTable, j: usize) -> Result<(), InvertError> {
    if j == 0 || j > table.dim() {
        return Err(InvertError::ComponentOutOfRange {
            j,
            dim: table.dim(),
        });
    }
    if j == table.axial_index() {
        return Err(InvertError::AxialComponent { j });
    }
    Ok(())
}

fn sequence_from_cells(
    table: &CoeffTable,
    j: usize,
    x: f64,
    scheme: &RationalScheme,
    n_max: usize,
    divide_by_c0: bool,
) -> Result<RecoverySequence, InvertError> {
    validate_component(table, j)?;
    let pairs = scheme.pairs(x, n_max as u64)?;
    let mut truncated = false;
    let mut steps = Vec::with_capacity(pairs.len());
    let scale = if divide_by_c0 {
        1.0 / table.axial_speed()
    } else {
        1.0
    };
    for (pos, pair) in pairs.iter().enumerate() {
        if pair.q as usize > table.n_max() {
            truncated = true;
            break;
        }
        let k = pair.p as usize;
        let l = (pair.q - pair.p) as usize;
        let estimate = table.get(j, k, l).expect("q <= table truncation") * scale;
        steps.push(RecoveryStep {
            n: pos + 1,
            p: pair.p,
            q: pair.q,
            estimate,
        });
    }
    let last = steps.last().ok_or(InvertError::NoUsablePairs)?;
    let final_estimate = last.estimate;
    let tail = &steps[steps.len().saturating_sub(3)..];
    let stagnation = tail
        .windows(2)
        .map(|w| math::abs(w[1].estimate - w[0].estimate))
        .fold(0.0, f64::max);
    Ok(RecoverySequence {
        target_x: x,
        scheme: scheme.name(),
        steps,
        final_estimate,
        stagnation,
        truncated,
    })
}

/// Recovers `x_j′(x)` of the axial-linear parameterization: the estimates
/// are the scaled cells `Ŝ^{(j;i)}_{p, q−p}` read straight from the table.
pub fn recover_derivative_at(
    table: &CoeffTable,
    j: usize,
    x: f64,
    scheme: &RationalScheme,
    n_max: usize,
) -> Result<RecoverySequence, InvertError> {
    sequence_from_cells(table, j, x, scheme, n_max, false)
}

/// Recovers the parameterization-invariant ratio `x_j′(t_x)/x_i′(t_x)`:
/// one extra division by `C₀` relative to [`recover_derivative_at`].
pub fn recover_ratio(
    table: &CoeffTable,
    j: usize,
    x: f64,
    scheme: &RationalScheme,
    n_max: usize,
) -> Result<RecoverySequence, InvertError> {
    sequence_from_cells(table, j, x, scheme, n_max, true)
}

/// A derivative sampled on the uniform grid `{k/n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeProfile {
    pub n: usize,
    /// `values[k]` estimates the derivative at `s = k/n`; length `n+1`.
    pub values: Vec<f64>,
}

impl DerivativeProfile {
    pub fn abscissa(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    /// Sup distance to a reference function sampled on the same grid.
    pub fn sup_error(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| math::abs(v - reference(self.abscissa(k))))
            .fold(0.0, f64::max)
    }
}

/// The level-`(n+1)` cross-section `{(k/n, Ŝ^{(j;i)}_{k,n−k})}` of the table
/// read as a derivative profile (the uniform scheme at stage `n`).
pub fn recover_profile(
    table: &CoeffTable,
    j: usize,
    n: usize,
) -> Result<DerivativeProfile, InvertError> {
    validate_component(table, j)?;
    if n == 0 || n > table.n_max() {
        return Err(InvertError::TruncationExceeded {
            n,
            n_max: table.n_max(),
        });
    }
    let values = (0..=n)
        .map(|k| table.get(j, k, n - k).expect("within truncation"))
        .collect();
    Ok(DerivativeProfile { n, values })
}

/// Length estimate at stage `n`, written in scaled arithmetic:
///
/// ```text
/// L_n = (1/(n+1))·Σ_{k=1}^n √(C₀² + Σ_{j≠i} Ŝ²_{k,n−k})
/// ```
///
/// which is algebraically the raw sum `Σ √(Σ_j (S^{(j;i)}_{k,n−k})²)·n!/C₀ⁿ`
/// with the analytic axial cells `S^{(i;i)} = C₀^{n+1}/(n+1)!` substituted.
/// The `k = 0` term is omitted exactly as the sum is written, accepting the
/// O(1/n) bias.
pub fn recover_length(table: &CoeffTable, n: usize) -> Result<f64, InvertError> {
    if n == 0 || n > table.n_max() {
        return Err(InvertError::TruncationExceeded {
            n,
            n_max: table.n_max(),
        });
    }
    let c0sq = table.axial_speed() * table.axial_speed();
    let mut sum = 0.0;
    for k in 1..=n {
        let mut acc = c0sq;
        for j in (1..=table.dim()).filter(|&j| j != table.axial_index()) {
            let cell = table.get(j, k, n - k).expect("within truncation");
            acc += cell * cell;
        }
        sum += math::sqrt(acc);
    }
    Ok(sum / (n + 1) as f64)
}

/// Integrates recovered derivative profiles into a trace from the origin:
/// cumulative trapezoid for the non-axial components, `C₀·s` for the axial
/// one.
pub fn reconstruct_trace(
    profiles: &[DerivativeProfile],
    axial_index: usize,
    axial_speed: f64,
) -> Result<Polyline, InvertError> {
    if profiles.is_empty() {
        return Err(InvertError::EmptyProfile);
    }
    let n = profiles[0].n;
    if profiles.iter().any(|p| p.n != n || p.values.len() != n + 1) {
        return Err(InvertError::ProfileMismatch);
    }
    let d = profiles.len() + 1;
    if axial_index == 0 || axial_index > d {
        return Err(InvertError::ComponentOutOfRange {
            j: axial_index,
            dim: d,
        });
    }
    let h = 1.0 / n as f64;
    let mut grid = Vec::with_capacity(n + 1);
    let mut points = vec![vec![0.0; d]; n + 1];
    for k in 0..=n {
        let s = if k == n { 1.0 } else { k as f64 * h };
        grid.push(s);
        points[k][axial_index - 1] = axial_speed * s;
    }
    for (which, profile) in profiles.iter().enumerate() {
        let col = if which + 1 < axial_index {
            which
        } else {
            which + 1
        };
        let mut acc = 0.0;
        for k in 1..=n {
            acc += 0.5 * h * (profile.values[k - 1] + profile.values[k]);
            points[k][col] = acc;
        }
    }
    Polyline::new(grid, points).map_err(InvertError::Curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Component, Curve};
    use crate::engine::{self, build_table};
    use crate::quad::QuadConfig;
    use alloc::sync::Arc;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn linear_recovery_is_flat() {
        let table = build_table(&Curve::linear(2.5), 40, &cfg()).unwrap();
        for scheme in [RationalScheme::Naive, RationalScheme::ContinuedFraction] {
            let seq = recover_derivative_at(&table, 2, 0.3, &scheme, 40).unwrap();
            for step in &seq.steps {
                assert!((step.estimate - 2.5).abs() < 1e-10);
            }
            assert!(!seq.truncated);
            assert!(seq.stagnation < 1e-10);
        }
    }

    #[test]
    fn monomial_recovery_hits_beta_mean() {
        let table = build_table(&Curve::monomial(1), 100, &cfg()).unwrap();
        let seq = recover_derivative_at(&table, 2, 0.5, &RationalScheme::Naive, 100).unwrap();
        for step in &seq.steps {
            let want = (step.p + 1) as f64 / (step.q + 2) as f64;
            assert!((step.estimate - want).abs() < 1e-10);
        }
        // At q = 100 the estimate is (50+1)/(100+2) = 0.5 exactly.
        assert!((seq.final_estimate - 0.5).abs() < 1e-10);
    }

    #[test]
    fn endpoint_recovery() {
        let table = build_table(&Curve::monomial(1), 60, &cfg()).unwrap();
        let seq = recover_derivative_at(&table, 2, 0.0, &RationalScheme::Naive, 60).unwrap();
        // Cells (0, q): estimates 1/(q+2) -> y'(0) = 0.
        assert!(seq.final_estimate < 0.02);
        let last = seq.steps.last().unwrap();
        assert_eq!(last.p, 0);
        let seq1 = recover_derivative_at(&table, 2, 1.0, &RationalScheme::Naive, 60).unwrap();
        assert!((seq1.final_estimate - 1.0).abs() < 0.02);
    }

    #[test]
    fn truncation_is_flagged_not_silent() {
        let table = build_table(&Curve::monomial(1), 20, &cfg()).unwrap();
        let seq = recover_derivative_at(&table, 2, 0.5, &RationalScheme::Naive, 50).unwrap();
        assert!(seq.truncated);
        assert_eq!(seq.steps.len(), 20);
        // A fixed list entirely beyond the truncation has no usable pair.
        let far = RationalScheme::FixedList(alloc::vec![crate::rational::RationalPair {
            p: 21,
            q: 42
        }]);
        assert!(matches!(
            recover_derivative_at(&table, 2, 0.5, &far, 50),
            Err(InvertError::NoUsablePairs)
        ));
    }

    #[test]
    fn component_validation() {
        let table = build_table(&Curve::monomial(1), 10, &cfg()).unwrap();
        assert!(matches!(
            recover_derivative_at(&table, 1, 0.5, &RationalScheme::Naive, 10),
            Err(InvertError::AxialComponent { j: 1 })
        ));
        assert!(recover_derivative_at(&table, 5, 0.5, &RationalScheme::Naive, 10).is_err());
    }

    #[test]
    fn ratio_of_constant_curve() {
        // gamma(t) = (2t, 6t): ratio x2'/x1' = 3 at every x.
        let curve = Curve::from_components(
            1,
            2.0,
            alloc::vec![Arc::new(move |_| 6.0) as Component],
            None,
        )
        .unwrap();
        let table = build_table(&curve, 30, &cfg()).unwrap();
        let seq = recover_ratio(&table, 2, 0.7, &RationalScheme::Naive, 30).unwrap();
        for step in &seq.steps {
            assert!((step.estimate - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ratio_matches_derivative_when_unit_speed() {
        let table = build_table(&Curve::monomial(2), 30, &cfg()).unwrap();
        let a = recover_derivative_at(&table, 2, 0.4, &RationalScheme::Naive, 30).unwrap();
        let b = recover_ratio(&table, 2, 0.4, &RationalScheme::Naive, 30).unwrap();
        assert_eq!(a.final_estimate, b.final_estimate);
    }

    #[test]
    fn ratio_of_parabola_over_double_speed() {
        // gamma(t) = (2t, t^2): x2'(s) = 2s in axial-linear form, ratio s.
        let curve = Curve::from_components(
            1,
            2.0,
            alloc::vec![Arc::new(move |s: f64| 2.0 * s) as Component],
            None,
        )
        .unwrap();
        let table = build_table(&curve, 100, &cfg()).unwrap();
        let seq = recover_ratio(&table, 2, 0.5, &RationalScheme::Naive, 100).unwrap();
        assert!((seq.final_estimate - 0.5).abs() < 1e-10);
    }

    #[test]
    fn profile_of_monomial() {
        let table = build_table(&Curve::monomial(1), 8, &cfg()).unwrap();
        let profile = recover_profile(&table, 2, 4).unwrap();
        let want = [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0, 4.0 / 6.0, 5.0 / 6.0];
        for (k, w) in want.iter().enumerate() {
            assert!((profile.values[k] - w).abs() < 1e-10);
            assert!((profile.abscissa(k) - k as f64 / 4.0).abs() < 1e-15);
        }
        assert!(recover_profile(&table, 2, 9).is_err());
        assert!(recover_profile(&table, 2, 0).is_err());
    }

    #[test]
    fn profile_sup_error_shrinks_for_sine() {
        let curve = Curve::sine(1.0).unwrap();
        let table = build_table(&curve, 64, &cfg()).unwrap();
        let w = 2.0 * core::f64::consts::PI;
        let err32 = recover_profile(&table, 2, 32)
            .unwrap()
            .sup_error(|s| math::cos(w * s));
        let err64 = recover_profile(&table, 2, 64)
            .unwrap()
            .sup_error(|s| math::cos(w * s));
        assert!(err64 < err32, "{err64} !< {err32}");
    }

    #[test]
    fn length_of_diagonal_matches_closed_form() {
        let table = build_table(&Curve::linear(1.0), 64, &cfg()).unwrap();
        for n in [1usize, 2, 5, 17, 64] {
            let got = recover_length(&table, n).unwrap();
            let want = n as f64 * 2.0f64.sqrt() / (n + 1) as f64;
            assert!((got - want).abs() < 1e-9, "n={n}: {got} vs {want}");
        }
        assert!(recover_length(&table, 65).is_err());
    }

    #[test]
    fn length_of_flat_curve() {
        let table = build_table(&Curve::linear(0.0), 32, &cfg()).unwrap();
        for n in [1usize, 8, 32] {
            let got = recover_length(&table, n).unwrap();
            let want = n as f64 / (n + 1) as f64;
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn scaled_length_equals_raw_formula_at_small_n() {
        // Property guard of the algebraic rewrite: compare against the raw
        // sum computed with explicit factorials, n small enough for exact
        // doubles.
        let curve = Curve::sine(1.0).unwrap();
        let table = build_table(&curve, 20, &cfg()).unwrap();
        let c0 = table.axial_speed();
        for n in [1usize, 3, 7, 12, 20] {
            let scaled = recover_length(&table, n).unwrap();
            let mut raw_sum = 0.0;
            for k in 1..=n {
                let mut acc = 0.0;
                // Axial cell C0^{n+1}/(n+1)!.
                let axial = math::powi(c0, (n + 1) as u32)
                    * math::exp(-math::ln_factorial(n + 1));
                acc += axial * axial;
                for j in (1..=table.dim()).filter(|&j| j != table.axial_index()) {
                    let raw = engine::raw_from_scaled(table.get(j, k, n - k).unwrap(), n, c0);
                    acc += raw * raw;
                }
                raw_sum += math::sqrt(acc);
            }
            let raw_value =
                raw_sum * math::exp(math::ln_factorial(n) - n as f64 * math::ln(c0));
            assert!(
                (scaled - raw_value).abs() < 1e-12 * raw_value.max(1.0),
                "n={n}: scaled {scaled} vs raw {raw_value}"
            );
        }
    }

    #[test]
    fn trace_of_constant_profile_is_segment() {
        let profile = DerivativeProfile {
            n: 4,
            values: alloc::vec![3.0; 5],
        };
        let trace = reconstruct_trace(&[profile], 1, 2.0).unwrap();
        assert_eq!(trace.dim(), 2);
        let end = trace.vertex(4);
        assert!((end[0] - 2.0).abs() < 1e-15);
        assert!((end[1] - 3.0).abs() < 1e-15);
        // Interior vertices sit on the straight segment.
        let mid = trace.vertex(2);
        assert!((mid[0] - 1.0).abs() < 1e-15 && (mid[1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn trace_of_monomial_profile_close_to_parabola() {
        let n = 64;
        let table = build_table(&Curve::monomial(1), n, &cfg()).unwrap();
        let profile = recover_profile(&table, 2, n).unwrap();
        let trace = reconstruct_trace(&[profile], 1, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            let s = k as f64 / n as f64;
            let v = trace.vertex(k);
            worst = worst.max((v[1] - s * s / 2.0).abs());
        }
        // Trapezoid error + recovery bias are both O(1/n).
        assert!(worst < 3.0 / n as f64, "worst {worst}");
    }

    #[test]
    fn round_trip_sup_distance_shrinks() {
        let curve = Curve::sine(1.0).unwrap();
        let table = build_table(&curve, 96, &cfg()).unwrap();
        let w = 2.0 * core::f64::consts::PI;
        let y = |s: f64| math::sin(w * s) / w;
        let mut prev = f64::INFINITY;
        for n in [24usize, 48, 96] {
            let profile = recover_profile(&table, 2, n).unwrap();
            let trace = reconstruct_trace(&[profile], 1, 1.0).unwrap();
            let mut worst: f64 = 0.0;
            for k in 0..=n {
                let s = k as f64 / n as f64;
                worst = worst.max((trace.vertex(k)[1] - y(s)).abs());
            }
            assert!(worst < prev, "n={n}: {worst} !< {prev}");
            prev = worst;
        }
    }
}
