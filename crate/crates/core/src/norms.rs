//! Finite-truncation asymptotic norms, projective-norm bounds, and the
//! isometry / discontinuity / modulus-of-continuity experiments.
//!
//! The asymptotic supremum seminorm is `limsup (n+1)!·sup_{k+l=n} ‖·‖_{k,l}`
//! and the asymptotic L¹ seminorm `limsup n!·Σ_{k=1}^n ‖·‖_{k,n−k}`, where
//! `‖a‖_{k,l}` is the Euclidean norm over `j ≠ i` of the raw coefficients on
//! `e_i^{⊗k}⊗e_j⊗e_i^{⊗l}`. In scaled storage the factorials cancel: with
//! `C₀ = 1` the supremum value at stage `n` is just `sup_k |scaled cell
//! vector|` and the L¹ value `Σ_k |scaled cell vector|/(n+1)`. A limsup of a
//! computed prefix is undefined, so sequences report their values, last
//! element, and trend slope instead of claiming convergence.

use alloc::vec::Vec;
use core::fmt;

use crate::curve::{self, Curve, CurveError, Polyline};
use crate::engine::{
    build_table, chen_truncated_signature, CoeffTable, EngineError, TruncatedSignature,
};
use crate::math;
use crate::quad::QuadConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum NormsError {
    ShapeMismatch,
    /// Two-table seminorms need both tables in the `C₀ = 1` class.
    NotUnitSpeed { c0: f64 },
    IndexOutOfRange { k: usize, l: usize, n_max: usize },
    Engine(EngineError),
    Curve(CurveError),
    EmptyInput(&'static str),
}

impl fmt::Display for NormsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormsError::ShapeMismatch => write!(f, "tables disagree on (d, i, N)"),
            NormsError::NotUnitSpeed { c0 } => {
                write!(f, "difference seminorms need C0 = 1 on both tables, got {c0}")
            }
            NormsError::IndexOutOfRange { k, l, n_max } => {
                write!(f, "cell ({k},{l}) exceeds truncation {n_max}")
            }
            NormsError::Engine(e) => write!(f, "{e}"),
            NormsError::Curve(e) => write!(f, "{e}"),
            NormsError::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}

impl core::error::Error for NormsError {}

impl From<EngineError> for NormsError {
    fn from(e: EngineError) -> Self {
        NormsError::Engine(e)
    }
}

impl From<CurveError> for NormsError {
    fn from(e: CurveError) -> Self {
        NormsError::Curve(e)
    }
}

fn check_pair(a: &CoeffTable, b: Option<&CoeffTable>) -> Result<(), NormsError> {
    if let Some(b) = b {
        if a.dim() != b.dim() || a.axial_index() != b.axial_index() || a.n_max() != b.n_max() {
            return Err(NormsError::ShapeMismatch);
        }
        if a.axial_speed() != 1.0 {
            return Err(NormsError::NotUnitSpeed {
                c0: a.axial_speed(),
            });
        }
        if b.axial_speed() != 1.0 {
            return Err(NormsError::NotUnitSpeed {
                c0: b.axial_speed(),
            });
        }
    }
    Ok(())
}

/// Euclidean norm over `j ≠ i` of the *scaled* cell vector (difference when
/// `b` is present).
fn scaled_vector_norm(
    a: &CoeffTable,
    b: Option<&CoeffTable>,
    k: usize,
    l: usize,
) -> Result<f64, NormsError> {
    if k + l > a.n_max() {
        return Err(NormsError::IndexOutOfRange {
            k,
            l,
            n_max: a.n_max(),
        });
    }
    let mut acc = 0.0;
    for j in (1..=a.dim()).filter(|&j| j != a.axial_index()) {
        let mut v = a.get(j, k, l).expect("checked truncation");
        if let Some(b) = b {
            v -= b.get(j, k, l).expect("same shape");
        }
        acc += v * v;
    }
    Ok(math::sqrt(acc))
}

/// `ln` of the raw seminorm `‖a − b‖_{k,l} = |L_{k,l}(a − b)|`, reconstructed
/// from scaled storage (`−∞` for an exactly zero vector).
pub fn seminorm_kl_log(
    a: &CoeffTable,
    b: Option<&CoeffTable>,
    k: usize,
    l: usize,
) -> Result<f64, NormsError> {
    check_pair(a, b)?;
    let scaled = scaled_vector_norm(a, b, k, l)?;
    if scaled == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let n = k + l;
    Ok(math::ln(scaled) - math::ln_factorial(n + 1) + n as f64 * math::ln(a.axial_speed()))
}

/// The raw seminorm `‖·‖_{k,l}` as a real; underflows to 0 once `(n+1)!`
/// exceeds the f64 range (use [`seminorm_kl_log`] there).
pub fn seminorm_kl(
    a: &CoeffTable,
    b: Option<&CoeffTable>,
    k: usize,
    l: usize,
) -> Result<f64, NormsError> {
    seminorm_kl_log(a, b, k, l).map(math::exp)
}

/// Which asymptotic seminorm a sequence approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    AsymptoticSup,
    AsymptoticL1,
}

impl NormKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormKind::AsymptoticSup => "AS",
            NormKind::AsymptoticL1 => "AL1",
        }
    }
}

/// One stage of a norm sequence; `arg_k` records the sup tie-break (smallest
/// maximizing `k`) for the supremum kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormPoint {
    pub n: usize,
    pub value: f64,
    pub arg_k: Option<usize>,
}

/// Finite-`n` approximants of an asymptotic seminorm, with an optional
/// ground-truth reference.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSequence {
    pub kind: NormKind,
    pub points: Vec<NormPoint>,
    pub reference: Option<f64>,
}

impl NormSequence {
    pub fn last_value(&self) -> f64 {
        self.points.last().map(|p| p.value).unwrap_or(0.0)
    }

    /// Least-squares slope of `ln |value_n − reference|` against `ln n` over
    /// the tail half; `None` without a reference or enough nonzero residuals.
    pub fn trend_slope(&self) -> Option<f64> {
        let reference = self.reference?;
        let from = self.points.len() / 2;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for p in &self.points[from..] {
            let resid = math::abs(p.value - reference);
            if p.n > 0 && resid > 0.0 {
                xs.push(math::ln(p.n as f64));
                ys.push(math::ln(resid));
            }
        }
        math::ls_slope(&xs, &ys)
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self
    }
}

/// Asymptotic supremum sequence: `value_n = (n+1)!·sup_{k+l=n} ‖·‖_{k,l}`,
/// computed in scaled space as `C₀ⁿ·sup_k |scaled cell vector|`. Ties break
/// toward the smallest `k`.
pub fn as_sequence(
    a: &CoeffTable,
    b: Option<&CoeffTable>,
    n_max: usize,
) -> Result<NormSequence, NormsError> {
    check_pair(a, b)?;
    if n_max > a.n_max() {
        return Err(NormsError::IndexOutOfRange {
            k: n_max,
            l: 0,
            n_max: a.n_max(),
        });
    }
    let ln_c0 = math::ln(a.axial_speed());
    let mut points = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut best = f64::NEG_INFINITY;
        let mut arg_k = 0usize;
        for k in 0..=n {
            let v = scaled_vector_norm(a, b, k, n - k)?;
            if v > best {
                best = v;
                arg_k = k;
            }
        }
        let value = best * math::exp(n as f64 * ln_c0);
        points.push(NormPoint {
            n,
            value,
            arg_k: Some(arg_k),
        });
    }
    Ok(NormSequence {
        kind: NormKind::AsymptoticSup,
        points,
        reference: None,
    })
}

/// Asymptotic L¹ sequence: `value_n = n!·Σ_{k=1}^n ‖·‖_{k,n−k}`, in scaled
/// space `C₀ⁿ·Σ_{k=1}^n |scaled cell vector|/(n+1)`. The sum starts at
/// `k = 1` exactly as the seminorm is defined.
pub fn al1_sequence(
    a: &CoeffTable,
    b: Option<&CoeffTable>,
    n_max: usize,
) -> Result<NormSequence, NormsError> {
    check_pair(a, b)?;
    if n_max > a.n_max() {
        return Err(NormsError::IndexOutOfRange {
            k: n_max,
            l: 0,
            n_max: a.n_max(),
        });
    }
    let ln_c0 = math::ln(a.axial_speed());
    let mut points = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut sum = 0.0;
        for k in 1..=n {
            sum += scaled_vector_norm(a, b, k, n - k)?;
        }
        let value = sum / (n + 1) as f64 * math::exp(n as f64 * ln_c0);
        points.push(NormPoint {
            n,
            value,
            arg_k: None,
        });
    }
    Ok(NormSequence {
        kind: NormKind::AsymptoticL1,
        points,
        reference: None,
    })
}

/// Certified sandwich of the truncated projective norm of `A − B`:
/// coordinate-max from below, coefficient ℓ¹ from above.
pub fn proj_bounds(
    a: &TruncatedSignature,
    b: &TruncatedSignature,
) -> Result<(f64, f64), NormsError> {
    if a.dim() != b.dim() || a.n_max() != b.n_max() {
        return Err(NormsError::ShapeMismatch);
    }
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for n in 0..=a.n_max() {
        for (x, y) in a.level(n).iter().zip(b.level(n)) {
            let d = math::abs(x - y);
            lower = lower.max(d);
            upper += d;
        }
    }
    Ok((lower, upper))
}

// ---------------------------------------------------------------------------
// Isometry check
// ---------------------------------------------------------------------------

/// Numerical comparison of the finite-truncation asymptotic norms of a
/// signature difference against the `C¹` and BV distances of the two curves.
#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub as_seq: NormSequence,
    pub al1_seq: NormSequence,
    pub d_c1: f64,
    pub d_bv: f64,
    pub as_rel_dev: f64,
    pub al1_rel_dev: f64,
}

/// Builds both tables and compares the difference norm sequences at stage
/// `N` against quadrature/grid oracles of `d_{C¹}` and `d_{BV}`.
pub fn isometry_check(
    curve_a: &Curve,
    curve_b: &Curve,
    n_max: usize,
    cfg: &QuadConfig,
) -> Result<IsometryReport, NormsError> {
    if curve_a.axial_speed() != 1.0 || curve_b.axial_speed() != 1.0 {
        return Err(NormsError::NotUnitSpeed {
            c0: curve_a.axial_speed().max(curve_b.axial_speed()),
        });
    }
    let table_a = build_table(curve_a, n_max, cfg)?;
    let table_b = build_table(curve_b, n_max, cfg)?;
    let d_c1 = curve::distance_c1(curve_a, curve_b, 8192)?;
    let d_bv = curve::distance_bv(curve_a, curve_b, 256, cfg)?;
    let as_seq = as_sequence(&table_a, Some(&table_b), n_max)?.with_reference(d_c1);
    let al1_seq = al1_sequence(&table_a, Some(&table_b), n_max)?.with_reference(d_bv);
    let denom_c1 = d_c1.max(1e-12);
    let denom_bv = d_bv.max(1e-12);
    let as_rel_dev = math::abs(as_seq.last_value() - d_c1) / denom_c1;
    let al1_rel_dev = math::abs(al1_seq.last_value() - d_bv) / denom_bv;
    Ok(IsometryReport {
        as_seq,
        al1_seq,
        d_c1,
        d_bv,
        as_rel_dev,
        al1_rel_dev,
    })
}

// ---------------------------------------------------------------------------
// Discontinuity demo
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct DiscontRow {
    pub m: u32,
    pub proj_lower: f64,
    pub proj_upper: f64,
    pub d_bv: f64,
}

#[derive(Debug, Clone)]
pub struct DiscontReport {
    pub rows: Vec<DiscontRow>,
    /// Whether the proj upper bound strictly decreased along `m`.
    pub upper_strictly_decreasing: bool,
}

/// Shrinking-loop demonstration: the truncated projective distance between
/// `helix(m)` and the straight line `(t,0,0)` collapses with `m` while the
/// BV distance stays put at 1.
pub fn discontinuity_demo(
    ms: &[u32],
    n_max: usize,
    vertices: usize,
    cfg: &QuadConfig,
) -> Result<DiscontReport, NormsError> {
    if ms.is_empty() {
        return Err(NormsError::EmptyInput("m range"));
    }
    let straight = Curve::from_components(
        1,
        1.0,
        alloc::vec![
            alloc::sync::Arc::new(|_| 0.0) as crate::curve::Component,
            alloc::sync::Arc::new(|_| 0.0) as crate::curve::Component,
        ],
        None,
    )?;
    let straight_sig = chen_truncated_signature(
        &Polyline::segment(alloc::vec![0.0; 3], alloc::vec![1.0, 0.0, 0.0])?,
        n_max,
    )?;
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        let helix = Curve::helix(m)?;
        let poly = Polyline::sample_curve(&helix, vertices)?;
        let sig = chen_truncated_signature(&poly, n_max)?;
        let (proj_lower, proj_upper) = proj_bounds(&sig, &straight_sig)?;
        let d_bv = curve::distance_bv(&helix, &straight, 64.max(4 * m as usize), cfg)?;
        rows.push(DiscontRow {
            m,
            proj_lower,
            proj_upper,
            d_bv,
        });
    }
    let upper_strictly_decreasing = rows.windows(2).all(|w| w[1].proj_upper < w[0].proj_upper);
    Ok(DiscontReport {
        rows,
        upper_strictly_decreasing,
    })
}

// ---------------------------------------------------------------------------
// Modulus-of-continuity experiment
// ---------------------------------------------------------------------------

/// Configuration of the modulus-of-continuity frontier sweep.
#[derive(Debug, Clone)]
pub struct ModContConfig {
    /// ε grid, each in (0, 1).
    pub eps_grid: Vec<f64>,
    /// Hölder exponent of the curve class.
    pub alpha: f64,
    /// Decay exponent ε₀ ∈ (0, ½).
    pub eps0: f64,
    /// Ball radius `K` bounding `‖γ′‖_∞` and `‖γ′‖_α`.
    pub k_bound: f64,
    /// The theorem's existential constants, supplied explicitly.
    pub cbar1: f64,
    pub cbar2: f64,
    /// Truncation level of the projective bounds.
    pub n_max: usize,
    /// Polyline vertices for the Chen signatures.
    pub vertices: usize,
    /// Perturbation scales λ (0 allowed).
    pub scales: Vec<f64>,
    /// Perturbation frequency: λ·(0, sin(2πks)/(2πk)).
    pub frequency: u32,
    /// Grid for the K-ball membership check.
    pub check_grid: usize,
}

impl Default for ModContConfig {
    fn default() -> Self {
        Self {
            eps_grid: alloc::vec![0.5, 0.3, 0.2, 0.1],
            alpha: 1.0,
            eps0: 0.25,
            k_bound: 8.0,
            cbar1: 1.0,
            cbar2: 1.0,
            n_max: 8,
            vertices: 512,
            scales: alloc::vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0],
            frequency: 1,
            check_grid: 512,
        }
    }
}

/// One tested perturbation scale.
#[derive(Debug, Clone, Copy)]
pub struct ModContPoint {
    pub lambda: f64,
    pub proj_upper: f64,
    pub d_c1: f64,
}

/// One ε row of the frontier.
#[derive(Debug, Clone, Copy)]
pub struct ModContRow {
    pub epsilon: f64,
    /// Smallest admissible truncation `n` from the theorem's recipe.
    pub n_required: f64,
    /// `δ(ε) = (C̄₂/√d)·C₀ⁿ/(n+1)!·ε` (0 on underflow).
    pub delta_theorem: f64,
    /// Largest tested proj upper bound whose perturbation kept `d_C¹ < ε`.
    pub delta_empirical: f64,
    /// Worst `d_C¹` among perturbations with proj bound ≤ δ(ε).
    pub d_c1_inside: f64,
    /// Whether every tested point inside δ(ε) satisfied `d_C¹ < ε`.
    pub implication_holds: bool,
}

#[derive(Debug, Clone)]
pub struct ModContReport {
    pub points: Vec<ModContPoint>,
    pub rows: Vec<ModContRow>,
    /// Scales skipped because the perturbed curve left the K-ball.
    pub skipped: Vec<f64>,
}

/// Charts the empirical (δ, ε) frontier of the signature inverse against the
/// theorem's explicit δ(ε) curve for a 2-d base curve and the perturbation
/// family `λ·(0, sin(2πks)/(2πk))`.
pub fn modcont_experiment(base: &Curve, cfg: &ModContConfig) -> Result<ModContReport, NormsError> {
    if base.dim() != 2 {
        return Err(NormsError::EmptyInput(
            "modulus experiment expects a 2-d base curve",
        ));
    }
    if cfg.eps_grid.is_empty() || cfg.scales.is_empty() {
        return Err(NormsError::EmptyInput("epsilon grid / scales"));
    }
    let w = 2.0 * core::f64::consts::PI * cfg.frequency.max(1) as f64;
    let base_poly = Polyline::sample_curve(base, cfg.vertices)?;
    let base_sig = chen_truncated_signature(&base_poly, cfg.n_max)?;

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &lambda in &cfg.scales {
        let perturbed = {
            let inner = base.clone();
            let others: Vec<crate::curve::Component> = alloc::vec![alloc::sync::Arc::new(
                move |s: f64| inner.deriv_component(2, s) + lambda * math::cos(w * s)
            )];
            Curve::from_components(base.axial_index(), base.axial_speed(), others, None)?
        };
        let (sup, holder) =
            curve::sup_norm_and_holder(&perturbed, cfg.alpha, cfg.check_grid)?;
        if sup > cfg.k_bound || holder > cfg.k_bound {
            skipped.push(lambda);
            continue;
        }
        let poly = Polyline::sample_curve(&perturbed, cfg.vertices)?;
        let sig = chen_truncated_signature(&poly, cfg.n_max)?;
        let (_, proj_upper) = proj_bounds(&sig, &base_sig)?;
        let d_c1 = curve::distance_c1(&perturbed, base, 4096)?;
        points.push(ModContPoint {
            lambda,
            proj_upper,
            d_c1,
        });
    }

    let d = base.dim() as f64;
    let ln_c0 = math::ln(base.axial_speed());
    let mut rows = Vec::with_capacity(cfg.eps_grid.len());
    for &eps in &cfg.eps_grid {
        let exponent = 1.0 / ((-0.5 + cfg.eps0) * cfg.alpha);
        let n_required = cfg.cbar1 * math::powf(eps, exponent);
        let delta_theorem = if n_required.is_finite() && n_required < 1e7 {
            let n = math::floor(n_required) as usize + 1;
            math::exp(
                math::ln(cfg.cbar2 / math::sqrt(d) * eps) + n as f64 * ln_c0
                    - math::ln_factorial(n + 1),
            )
        } else {
            0.0
        };
        let mut delta_empirical = 0.0f64;
        let mut d_c1_inside = 0.0f64;
        let mut implication_holds = true;
        for p in &points {
            if p.d_c1 < eps {
                delta_empirical = delta_empirical.max(p.proj_upper);
            }
            if p.proj_upper <= delta_theorem {
                d_c1_inside = d_c1_inside.max(p.d_c1);
                if p.d_c1 >= eps {
                    implication_holds = false;
                }
            }
        }
        rows.push(ModContRow {
            epsilon: eps,
            n_required,
            delta_theorem,
            delta_empirical,
            d_c1_inside,
            implication_holds,
        });
    }
    Ok(ModContReport {
        points,
        rows,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Component;
    use crate::engine;
    use alloc::sync::Arc;
    use alloc::vec;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn parabola() -> Curve {
        // (t, t^2/2): y'(s) = s.
        Curve::monomial(1)
    }

    fn zero_curve() -> Curve {
        Curve::linear(0.0)
    }

    #[test]
    fn seminorm_of_linear_table() {
        let table = build_table(&Curve::linear(1.0), 12, &cfg()).unwrap();
        for (k, l) in [(0usize, 0usize), (2, 3), (5, 7)] {
            let v = seminorm_kl(&table, None, k, l).unwrap();
            let want = math::exp(-math::ln_factorial(k + l + 1));
            assert!(
                (v - want).abs() < 1e-10 * want,
                "({k},{l}): {v} vs {want}"
            );
        }
    }

    #[test]
    fn seminorm_of_equal_tables_is_zero() {
        let table = build_table(&parabola(), 8, &cfg()).unwrap();
        assert_eq!(seminorm_kl(&table, Some(&table), 2, 3).unwrap(), 0.0);
        assert_eq!(
            seminorm_kl_log(&table, Some(&table), 2, 3).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn seminorm_combines_components_euclidean() {
        // (t, t, t^2/2): raw (0,0) cells are (1, 1/2); norm sqrt(1.25)/1!.
        let curve = Curve::from_components(
            1,
            1.0,
            vec![
                Arc::new(|_| 1.0) as Component,
                Arc::new(|s: f64| s) as Component,
            ],
            None,
        )
        .unwrap();
        let table = build_table(&curve, 4, &cfg()).unwrap();
        let v = seminorm_kl(&table, None, 0, 0).unwrap();
        assert!((v - (1.25f64).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn two_table_seminorm_requires_unit_speed() {
        let fast = Curve::from_components(
            1,
            2.0,
            vec![Arc::new(|_| 1.0) as Component],
            None,
        )
        .unwrap();
        let t1 = build_table(&fast, 4, &cfg()).unwrap();
        let t2 = build_table(&fast, 4, &cfg()).unwrap();
        assert!(matches!(
            seminorm_kl(&t1, Some(&t2), 0, 0),
            Err(NormsError::NotUnitSpeed { .. })
        ));
        let t3 = build_table(&parabola(), 6, &cfg()).unwrap();
        assert!(matches!(
            seminorm_kl(&t3, Some(&build_table(&parabola(), 4, &cfg()).unwrap()), 0, 0),
            Err(NormsError::ShapeMismatch)
        ));
    }

    #[test]
    fn as_sequence_of_monomial() {
        let table = build_table(&parabola(), 32, &cfg()).unwrap();
        let seq = as_sequence(&table, None, 32).unwrap();
        for p in &seq.points {
            let want = (p.n + 1) as f64 / (p.n + 2) as f64;
            assert!((p.value - want).abs() < 1e-9, "n={}: {}", p.n, p.value);
            assert_eq!(p.arg_k, Some(p.n), "sup sits at k = n for y' = s");
        }
    }

    #[test]
    fn as_sequence_of_linear_is_constant() {
        let table = build_table(&Curve::linear(-2.0), 16, &cfg()).unwrap();
        let seq = as_sequence(&table, None, 16).unwrap();
        for p in &seq.points {
            assert!((p.value - 2.0).abs() < 1e-9);
        }
        // Tie-breaking is observable on exactly constant cells.
        let n_max = 5;
        let cells = vec![1.5; (n_max + 1) * (n_max + 2) / 2];
        let flat = CoeffTable::from_parts(2, 1, 1.0, n_max, 1e-12, 1.5, cells).unwrap();
        let seq = as_sequence(&flat, None, n_max).unwrap();
        for p in &seq.points {
            assert_eq!(p.arg_k, Some(0), "ties break toward smallest k");
        }
    }

    #[test]
    fn al1_sequence_of_monomial_closed_form() {
        let table = build_table(&parabola(), 40, &cfg()).unwrap();
        let seq = al1_sequence(&table, None, 40).unwrap();
        for p in seq.points.iter().skip(1) {
            let n = p.n as f64;
            let want = n * (n + 3.0) / (2.0 * (n + 1.0) * (n + 2.0));
            assert!((p.value - want).abs() < 1e-9, "n={}: {}", p.n, p.value);
        }
    }

    #[test]
    fn difference_of_same_curve_vanishes() {
        let t1 = build_table(&parabola(), 12, &cfg()).unwrap();
        let t2 = build_table(&parabola(), 12, &cfg()).unwrap();
        let seq = as_sequence(&t1, Some(&t2), 12).unwrap();
        for p in &seq.points {
            assert!(p.value.abs() < 1e-10);
        }
        let seq = al1_sequence(&t1, Some(&t2), 12).unwrap();
        for p in &seq.points {
            assert!(p.value.abs() < 1e-10);
        }
    }

    #[test]
    fn seminorm_axioms_on_sampled_tables() {
        // d = 2 tables: the cell "vector" is a single number, so the
        // triangle inequality holds in float arithmetic up to one rounding.
        let u = build_table(&parabola(), 10, &cfg()).unwrap();
        let v = build_table(&Curve::sine(1.0).unwrap(), 10, &cfg()).unwrap();
        let sum_table = CoeffTable::from_parts(
            2,
            1,
            1.0,
            10,
            u.tol(),
            u.deriv_bound() + v.deriv_bound(),
            u.iter_cells()
                .zip(v.iter_cells())
                .map(|((_, _, _, a), (_, _, _, b))| a + b)
                .collect(),
        )
        .unwrap();
        let su = as_sequence(&u, None, 10).unwrap();
        let sv = as_sequence(&v, None, 10).unwrap();
        let ssum = as_sequence(&sum_table, None, 10).unwrap();
        for ((a, b), c) in su.points.iter().zip(&sv.points).zip(&ssum.points) {
            assert!(c.value <= a.value + b.value + 1e-14);
        }
        // Absolute homogeneity, exact for a power-of-two factor.
        let doubled = CoeffTable::from_parts(
            2,
            1,
            1.0,
            10,
            u.tol(),
            2.0 * u.deriv_bound(),
            u.iter_cells().map(|(_, _, _, a)| -2.0 * a).collect(),
        )
        .unwrap();
        let sd = as_sequence(&doubled, None, 10).unwrap();
        let ld = al1_sequence(&doubled, None, 10).unwrap();
        let lu = al1_sequence(&u, None, 10).unwrap();
        for (d2, u1) in sd.points.iter().zip(&su.points) {
            assert_eq!(d2.value, 2.0 * u1.value);
        }
        for (d2, u1) in ld.points.iter().zip(&lu.points) {
            assert_eq!(d2.value, 2.0 * u1.value);
        }
    }

    #[test]
    fn signature_linearity_on_unit_speed_class() {
        // Table of the combined curve equals the cell-wise combination.
        let a = parabola();
        let b = Curve::sine(1.0).unwrap();
        let combo = Curve::linear_combination(1.0, &a, 1.0, &b).unwrap();
        let ta = build_table(&a, 8, &cfg()).unwrap();
        let tb = build_table(&b, 8, &cfg()).unwrap();
        let tc = build_table(&combo, 8, &cfg()).unwrap();
        let summed = CoeffTable::from_parts(
            2,
            1,
            1.0,
            8,
            ta.tol(),
            ta.deriv_bound() + tb.deriv_bound(),
            ta.iter_cells()
                .zip(tb.iter_cells())
                .map(|((_, _, _, x), (_, _, _, y))| x + y)
                .collect(),
        )
        .unwrap();
        let s1 = as_sequence(&tc, None, 8).unwrap();
        let s2 = as_sequence(&summed, None, 8).unwrap();
        for (p1, p2) in s1.points.iter().zip(&s2.points) {
            assert!(
                (p1.value - p2.value).abs() <= 2.0 * cfg().rel_tol.max(1e-12),
                "n={}: {} vs {}",
                p1.n,
                p1.value,
                p2.value
            );
        }
    }

    #[test]
    fn proj_bounds_examples() {
        let a = TruncatedSignature::identity(2, 3).unwrap();
        let b = TruncatedSignature::identity(2, 3).unwrap();
        assert_eq!(proj_bounds(&a, &b).unwrap(), (0.0, 0.0));
        assert!(proj_bounds(&a, &TruncatedSignature::identity(3, 3).unwrap()).is_err());

        // Single-word difference: exp(0.7·e1) at N = 1 differs from the
        // identity on the word e1 alone, so both bounds equal 0.7.
        let seg = engine::chen_truncated_signature(
            &Polyline::segment(vec![0.0, 0.0], vec![0.7, 0.0]).unwrap(),
            1,
        )
        .unwrap();
        let id1 = TruncatedSignature::identity(2, 1).unwrap();
        assert_eq!(proj_bounds(&seg, &id1).unwrap(), (0.7, 0.7));

        // Right-then-up minus up-then-right: the level-2 difference is
        // exactly e1⊗e2 − e2⊗e1, giving (coordinate max, l1) = (1, 2).
        let right_up = engine::chen_truncated_signature(
            &Polyline::new(
                vec![0.0, 0.5, 1.0],
                vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            )
            .unwrap(),
            2,
        )
        .unwrap();
        let up_right = engine::chen_truncated_signature(
            &Polyline::new(
                vec![0.0, 0.5, 1.0],
                vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            )
            .unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(proj_bounds(&right_up, &up_right).unwrap(), (1.0, 2.0));
    }

    #[test]
    fn isometry_parabola_vs_zero() {
        let report = isometry_check(&parabola(), &zero_curve(), 64, &cfg()).unwrap();
        // d_C1 = sup|s - 0| = 1, AS value_N = (N+1)/(N+2).
        assert!((report.d_c1 - 1.0).abs() < 1e-9);
        assert!((report.as_seq.last_value() - 65.0 / 66.0).abs() < 1e-9);
        // d_BV = 1/2, AL1 value_N -> 1/2.
        assert!((report.d_bv - 0.5).abs() < 1e-9);
        assert!((report.al1_seq.last_value() - 0.5).abs() < 0.01);
        assert!(report.as_rel_dev < 0.05);
    }

    #[test]
    fn isometry_identical_curves_is_zero() {
        let report = isometry_check(&parabola(), &parabola(), 16, &cfg()).unwrap();
        assert!(report.as_seq.points.iter().all(|p| p.value < 1e-10));
        assert!(report.al1_seq.points.iter().all(|p| p.value < 1e-10));
    }

    #[test]
    fn isometry_rejects_non_unit_speed() {
        let fast = Curve::from_components(
            1,
            2.0,
            vec![Arc::new(|_| 1.0) as Component],
            None,
        )
        .unwrap();
        assert!(isometry_check(&fast, &zero_curve(), 8, &cfg()).is_err());
    }

    #[test]
    fn discontinuity_small_sweep() {
        let report = discontinuity_demo(&[1, 2, 4], 6, 512, &cfg()).unwrap();
        assert!(report.upper_strictly_decreasing);
        for row in &report.rows {
            assert!((row.d_bv - 1.0).abs() < 1e-9, "m={}: {}", row.m, row.d_bv);
            assert!(row.proj_lower <= row.proj_upper);
        }
        // Level-1 difference vanishes (same endpoints), so the lower bound
        // comes from levels >= 2 and stays below the upper bound.
        assert!(discontinuity_demo(&[], 6, 128, &cfg()).is_err());
    }

    #[test]
    fn modcont_zero_perturbation_trivially_inside() {
        let base = parabola();
        let config = ModContConfig {
            eps_grid: vec![0.5, 0.25],
            scales: vec![0.0, 1e-3, 1e-2],
            n_max: 6,
            vertices: 256,
            ..ModContConfig::default()
        };
        let report = modcont_experiment(&base, &config).unwrap();
        assert!(report.skipped.is_empty());
        let zero = report.points.iter().find(|p| p.lambda == 0.0).unwrap();
        assert!(zero.proj_upper < 1e-12 && zero.d_c1 < 1e-12);
        for row in &report.rows {
            assert!(row.implication_holds);
            assert!(row.delta_theorem >= 0.0);
        }
        // dC1 scales linearly with lambda; proj bound roughly so.
        let p1 = report.points.iter().find(|p| p.lambda == 1e-3).unwrap();
        let p2 = report.points.iter().find(|p| p.lambda == 1e-2).unwrap();
        assert!((p1.d_c1 - 1e-3).abs() < 1e-6);
        assert!((p2.d_c1 - 1e-2).abs() < 1e-5);
        assert!(p2.proj_upper > p1.proj_upper);
        let ratio = p2.proj_upper / p1.proj_upper;
        assert!((ratio - 10.0).abs() < 1.0, "proj growth ratio {ratio}");
    }

    #[test]
    fn modcont_kball_violation_is_skipped() {
        let base = parabola();
        let config = ModContConfig {
            k_bound: 1.5,
            scales: vec![0.0, 50.0],
            n_max: 4,
            vertices: 128,
            ..ModContConfig::default()
        };
        let report = modcont_experiment(&base, &config).unwrap();
        assert_eq!(report.skipped, vec![50.0]);
        assert_eq!(report.points.len(), 1);
    }
}
