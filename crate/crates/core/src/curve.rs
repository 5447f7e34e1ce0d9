//! Curves on `[0,1]` with an axial-linear coordinate.
//!
//! Curves are presented by their *derivative*: every coefficient formula
//! consumes `γ′`, and positions are recovered by integration only at output
//! time. The axial component is a constant closure built by the constructor,
//! so `x_i′(s) = C₀` holds by construction rather than by trust.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::quad::{self, QuadConfig};

/// A scalar derivative component `s ↦ x_j′(s)`.
pub type Component = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Optional Hölder regularity metadata for `γ′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderMeta {
    /// Exponent `α ∈ (0, 1]`.
    pub alpha: f64,
    /// An upper bound on the `α`-Hölder norm of `γ′`.
    pub norm: f64,
}

/// Value of a preset parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
}

/// Key-value parameter map for [`make_preset`].
pub type Params = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveError {
    UnknownPreset(String),
    BadParam { name: &'static str, reason: String },
    MissingParam { name: &'static str },
    /// The would-be axial component is not strictly increasing; carries the
    /// first violating vertex index.
    NonMonotoneAxis { index: usize },
    BadAxialIndex { index: usize, dim: usize },
    BadPolyline(String),
    DimensionMismatch { left: usize, right: usize },
    BadGrid { size: usize },
    BadExponent { alpha: f64 },
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::UnknownPreset(name) => write!(f, "unknown preset `{name}`"),
            CurveError::BadParam { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            CurveError::MissingParam { name } => write!(f, "missing parameter `{name}`"),
            CurveError::NonMonotoneAxis { index } => write!(
                f,
                "axial component is not strictly increasing at vertex {index}"
            ),
            CurveError::BadAxialIndex { index, dim } => {
                write!(f, "axial index {index} out of range 1..={dim}")
            }
            CurveError::BadPolyline(msg) => write!(f, "invalid polyline: {msg}"),
            CurveError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            CurveError::BadGrid { size } => write!(f, "grid size {size} must be >= 2"),
            CurveError::BadExponent { alpha } => {
                write!(f, "Holder exponent {alpha} must lie in (0, 1]")
            }
        }
    }
}

impl core::error::Error for CurveError {}

/// A `C¹` curve on `[0,1]` with `x_i(s) = C₀·s`, presented by its derivative.
#[derive(Clone)]
pub struct Curve {
    dim: usize,
    axial_index: usize, // 1-based
    axial_speed: f64,
    components: Vec<Component>, // length dim; slot axial_index-1 is constant C0
    breakpoints: Vec<f64>,      // interior points where the derivative is not smooth
    holder: Option<HolderMeta>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("dim", &self.dim)
            .field("axial_index", &self.axial_index)
            .field("axial_speed", &self.axial_speed)
            .field("breakpoints", &self.breakpoints)
            .field("holder", &self.holder)
            .finish()
    }
}

impl Curve {
    /// Builds a curve from the non-axial derivative components, listed in
    /// increasing coordinate order with the axial slot skipped.
    pub fn from_components(
        axial_index: usize,
        axial_speed: f64,
        others: Vec<Component>,
        holder: Option<HolderMeta>,
    ) -> Result<Self, CurveError> {
        let dim = others.len() + 1;
        if dim < 2 {
            return Err(CurveError::BadPolyline(String::from(
                "a curve needs at least one non-axial component",
            )));
        }
        if axial_index == 0 || axial_index > dim {
            return Err(CurveError::BadAxialIndex {
                index: axial_index,
                dim,
            });
        }
        if !(axial_speed > 0.0) || !axial_speed.is_finite() {
            return Err(CurveError::BadParam {
                name: "axial_speed",
                reason: alloc::format!("C0 = {axial_speed} must be a positive real"),
            });
        }
        let mut components: Vec<Component> = Vec::with_capacity(dim);
        let mut rest = others.into_iter();
        let c0 = axial_speed;
        for j in 1..=dim {
            if j == axial_index {
                components.push(Arc::new(move |_| c0));
            } else {
                components.push(rest.next().expect("length checked above"));
            }
        }
        Ok(Self {
            dim,
            axial_index,
            axial_speed,
            components,
            breakpoints: Vec::new(),
            holder,
        })
    }

    pub fn with_breakpoints(mut self, mut breaks: Vec<f64>) -> Self {
        breaks.retain(|b| *b > 0.0 && *b < 1.0);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        self.breakpoints = breaks;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 1-based index of the linear coordinate.
    pub fn axial_index(&self) -> usize {
        self.axial_index
    }

    /// `C₀ = x_i(1) − x_i(0)`.
    pub fn axial_speed(&self) -> f64 {
        self.axial_speed
    }

    pub fn holder(&self) -> Option<HolderMeta> {
        self.holder
    }

    /// Interior points where the derivative is known to be non-smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `x_j′(s)` for a 1-based component index.
    pub fn deriv_component(&self, j: usize, s: f64) -> f64 {
        (self.components[j - 1])(s)
    }

    /// Writes `γ′(s)` into `out` (length `dim`).
    pub fn deriv_into(&self, s: f64, out: &mut [f64]) {
        for (slot, c) in out.iter_mut().zip(&self.components) {
            *slot = c(s);
        }
    }

    /// `γ′(s)` as a fresh vector.
    pub fn deriv(&self, s: f64) -> Vec<f64> {
        self.components.iter().map(|c| c(s)).collect()
    }

    /// The 1-based non-axial component indices in increasing order.
    pub fn non_axial(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.dim).filter(move |&j| j != self.axial_index)
    }

    /// Grid estimate of `max_{j≠i} ‖x_j′‖_∞` (a lower bound of the true sup).
    pub fn non_axial_sup_estimate(&self, grid: usize) -> f64 {
        let g = grid.max(2);
        let mut best: f64 = 0.0;
        for j in self.non_axial() {
            for t in 0..g {
                let s = t as f64 / (g - 1) as f64;
                best = best.max(math::abs(self.deriv_component(j, s)));
            }
        }
        best
    }

    /// The non-axial combination `λ₁γ₁ + λ₂γ₂` within a shared axial class:
    /// both curves must agree on `(d, i, C₀)` and only the non-axial
    /// components are combined (the axial coordinate stays `C₀·s`).
    pub fn linear_combination(
        lambda1: f64,
        a: &Curve,
        lambda2: f64,
        b: &Curve,
    ) -> Result<Curve, CurveError> {
        if a.dim != b.dim {
            return Err(CurveError::DimensionMismatch {
                left: a.dim,
                right: b.dim,
            });
        }
        if a.axial_index != b.axial_index || a.axial_speed != b.axial_speed {
            return Err(CurveError::BadParam {
                name: "axial",
                reason: String::from("curves must share axial index and speed"),
            });
        }
        let mut others: Vec<Component> = Vec::new();
        for j in a.non_axial() {
            let ca = Arc::clone(&a.components[j - 1]);
            let cb = Arc::clone(&b.components[j - 1]);
            others.push(Arc::new(move |s| lambda1 * ca(s) + lambda2 * cb(s)));
        }
        let holder = match (a.holder, b.holder) {
            (Some(ha), Some(hb)) if ha.alpha == hb.alpha => Some(HolderMeta {
                alpha: ha.alpha,
                norm: math::abs(lambda1) * ha.norm + math::abs(lambda2) * hb.norm,
            }),
            _ => None,
        };
        let mut breaks = a.breakpoints.clone();
        breaks.extend_from_slice(&b.breakpoints);
        Curve::from_components(a.axial_index, a.axial_speed, others, holder)
            .map(|c| c.with_breakpoints(breaks))
    }

    // ----- analytic presets -------------------------------------------------

    /// `γ(s) = (s, c·s)`: constant derivative `(1, c)`.
    pub fn linear(slope: f64) -> Self {
        Self::from_components(
            1,
            1.0,
            vec![Arc::new(move |_| slope) as Component],
            Some(HolderMeta {
                alpha: 1.0,
                norm: 0.0,
            }),
        )
        .expect("valid preset")
    }

    /// `y′(s) = s^m`.
    pub fn monomial(m: u32) -> Self {
        Self::from_components(
            1,
            1.0,
            vec![Arc::new(move |s| math::powi(s, m)) as Component],
            Some(HolderMeta {
                alpha: 1.0,
                norm: m as f64,
            }),
        )
        .expect("valid preset")
    }

    /// `y(s) = sin(2πf s)/(2πf)`, so `y′(s) = cos(2πf s)`.
    pub fn sine(freq: f64) -> Result<Self, CurveError> {
        if !(freq > 0.0) {
            return Err(CurveError::BadParam {
                name: "freq",
                reason: alloc::format!("frequency {freq} must be positive"),
            });
        }
        let w = 2.0 * core::f64::consts::PI * freq;
        Self::from_components(
            1,
            1.0,
            vec![Arc::new(move |s| math::cos(w * s)) as Component],
            Some(HolderMeta {
                alpha: 1.0,
                norm: w,
            }),
        )
    }

    /// `γ_n(t) = (t, cos(2nπt)/(2nπ), sin(2nπt)/(2nπ))`; `|γ′| ≡ √2`.
    pub fn helix(turns: u32) -> Result<Self, CurveError> {
        if turns == 0 {
            return Err(CurveError::BadParam {
                name: "n",
                reason: String::from("helix needs at least one turn"),
            });
        }
        let w = 2.0 * core::f64::consts::PI * turns as f64;
        Self::from_components(
            1,
            1.0,
            vec![
                Arc::new(move |s| -math::sin(w * s)) as Component,
                Arc::new(move |s| math::cos(w * s)) as Component,
            ],
            Some(HolderMeta {
                alpha: 1.0,
                norm: w,
            }),
        )
    }

    /// `y′(s) = |s − x₀|^α`: an exactly `α`-Hölder derivative with unit
    /// Hölder norm, for rate experiments.
    pub fn holder_kink(alpha: f64, x0: f64) -> Result<Self, CurveError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(CurveError::BadExponent { alpha });
        }
        if !(0.0..=1.0).contains(&x0) {
            return Err(CurveError::BadParam {
                name: "x0",
                reason: alloc::format!("kink location {x0} must lie in [0, 1]"),
            });
        }
        let curve = Self::from_components(
            1,
            1.0,
            vec![Arc::new(move |s: f64| math::powf(math::abs(s - x0), alpha)) as Component],
            Some(HolderMeta { alpha, norm: 1.0 }),
        )?;
        Ok(curve.with_breakpoints(vec![x0]))
    }

    /// `y′(s) = Σ c_i s^i`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self, CurveError> {
        if coeffs.is_empty() {
            return Err(CurveError::BadParam {
                name: "coeffs",
                reason: String::from("need at least one coefficient"),
            });
        }
        // |y''| <= sum |c_i · i| bounds the Lipschitz norm of y'.
        let lipschitz: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| math::abs(*c) * i as f64)
            .sum();
        let cs = coeffs;
        Self::from_components(
            1,
            1.0,
            vec![Arc::new(move |s: f64| {
                cs.iter().rev().fold(0.0, |acc, c| acc * s + c)
            }) as Component],
            Some(HolderMeta {
                alpha: 1.0,
                norm: lipschitz,
            }),
        )
    }
}

fn number(params: &Params, name: &'static str) -> Result<f64, CurveError> {
    match params.get(name) {
        Some(ParamValue::Number(v)) => Ok(*v),
        Some(ParamValue::List(_)) => Err(CurveError::BadParam {
            name,
            reason: String::from("expected a number, got a list"),
        }),
        None => Err(CurveError::MissingParam { name }),
    }
}

fn number_or(params: &Params, name: &'static str, default: f64) -> Result<f64, CurveError> {
    match params.get(name) {
        None => Ok(default),
        _ => number(params, name),
    }
}

fn positive_integer(params: &Params, name: &'static str) -> Result<u32, CurveError> {
    let v = number(params, name)?;
    if v < 0.0 || v != math::floor(v) || v > u32::MAX as f64 {
        return Err(CurveError::BadParam {
            name,
            reason: alloc::format!("{v} is not a nonnegative integer"),
        });
    }
    Ok(v as u32)
}

/// Builds one of the named analytic presets from a key-value map.
///
/// Known presets: `linear{slope}`, `monomial{m}`, `sine{freq}`,
/// `helix{n}`, `holder_kink{alpha, x0}`, `polynomial{coeffs}`.
pub fn make_preset(name: &str, params: &Params) -> Result<Curve, CurveError> {
    match name {
        "linear" => Ok(Curve::linear(number_or(params, "slope", 1.0)?)),
        "monomial" => Ok(Curve::monomial(positive_integer(params, "m")?)),
        "sine" => Curve::sine(number_or(params, "freq", 1.0)?),
        "helix" => Curve::helix(positive_integer(params, "n")?),
        "holder_kink" => Curve::holder_kink(
            number(params, "alpha")?,
            number_or(params, "x0", 0.5)?,
        ),
        "polynomial" => match params.get("coeffs") {
            Some(ParamValue::List(cs)) => Curve::polynomial(cs.clone()),
            Some(ParamValue::Number(c)) => Curve::polynomial(vec![*c]),
            None => Err(CurveError::MissingParam { name: "coeffs" }),
        },
        other => Err(CurveError::UnknownPreset(String::from(other))),
    }
}

/// A sampled curve: vertices over a parameter grid in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    grid: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl Polyline {
    /// Validates that the grid runs from 0 to 1 strictly increasing and that
    /// every vertex shares one dimension.
    pub fn new(grid: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self, CurveError> {
        if grid.len() != points.len() {
            return Err(CurveError::BadPolyline(alloc::format!(
                "{} grid values vs {} vertices",
                grid.len(),
                points.len()
            )));
        }
        if grid.is_empty() {
            return Err(CurveError::BadPolyline(String::from("empty polyline")));
        }
        if grid[0] != 0.0 || *grid.last().unwrap() != 1.0 {
            return Err(CurveError::BadPolyline(String::from(
                "grid must start at 0 and end at 1",
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CurveError::BadPolyline(String::from(
                "grid must be strictly increasing",
            )));
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(CurveError::BadPolyline(String::from(
                "vertices must share one positive dimension",
            )));
        }
        Ok(Self { grid, points })
    }

    /// Uniform-grid constructor for exactly two vertices per endpoint pair.
    pub fn segment(from: Vec<f64>, to: Vec<f64>) -> Result<Self, CurveError> {
        Self::new(vec![0.0, 1.0], vec![from, to])
    }

    /// Samples a curve's positions at `count` uniform parameters, integrating
    /// the derivative segment-by-segment with a 5-point Gauss rule so the
    /// vertices carry no cumulative drift.
    pub fn sample_curve(curve: &Curve, count: usize) -> Result<Self, CurveError> {
        if count < 2 {
            return Err(CurveError::BadGrid { size: count });
        }
        let rule = quad::GaussLegendre::new(5);
        let d = curve.dim();
        let mut grid = Vec::with_capacity(count);
        let mut points = Vec::with_capacity(count);
        let mut pos = vec![0.0; d];
        grid.push(0.0);
        points.push(pos.clone());
        for t in 1..count {
            let a = (t - 1) as f64 / (count - 1) as f64;
            let b = t as f64 / (count - 1) as f64;
            for j in 1..=d {
                pos[j - 1] += rule.integrate(a, b, &|s| curve.deriv_component(j, s));
            }
            grid.push(if t == count - 1 { 1.0 } else { b });
            points.push(pos.clone());
        }
        Self::new(grid, points)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn vertex(&self, idx: usize) -> &[f64] {
        &self.points[idx]
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Polygonal length `Σ |Δv|`.
    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let mut acc = 0.0;
                for (a, b) in w[0].iter().zip(&w[1]) {
                    acc += (b - a) * (b - a);
                }
                math::sqrt(acc)
            })
            .sum()
    }
}

/// Converts an axial-monotone polyline into an axial-linear [`Curve`] on
/// `[0,1]` by the piecewise-linear inverse time change.
///
/// Component `i` of the result moves at exactly `C₀ = x_i(end) − x_i(start)`;
/// the other components become piecewise-constant derivatives
/// `x_j′(s) = C₀·Δx_j/Δx_i` with knots at the image of the vertices.
pub fn reparameterize_to_axial_linear(
    samples: &Polyline,
    axial_index: usize,
) -> Result<Curve, CurveError> {
    let d = samples.dim();
    if axial_index == 0 || axial_index > d {
        return Err(CurveError::BadAxialIndex {
            index: axial_index,
            dim: d,
        });
    }
    if samples.len() < 2 {
        return Err(CurveError::BadPolyline(String::from(
            "need at least two vertices",
        )));
    }
    let xi = |v: usize| samples.vertex(v)[axial_index - 1];
    for v in 1..samples.len() {
        if xi(v) <= xi(v - 1) {
            return Err(CurveError::NonMonotoneAxis { index: v });
        }
    }
    let c0 = xi(samples.len() - 1) - xi(0);
    // Knots in the new parameter and per-segment slopes dx_j/ds.
    let knots: Arc<Vec<f64>> = Arc::new(
        (0..samples.len())
            .map(|v| (xi(v) - xi(0)) / c0)
            .collect(),
    );
    let mut others: Vec<Component> = Vec::new();
    for j in 1..=d {
        if j == axial_index {
            continue;
        }
        let slopes: Vec<f64> = (1..samples.len())
            .map(|v| {
                let dxj = samples.vertex(v)[j - 1] - samples.vertex(v - 1)[j - 1];
                let dxi = xi(v) - xi(v - 1);
                c0 * dxj / dxi
            })
            .collect();
        let knots = Arc::clone(&knots);
        others.push(Arc::new(move |s: f64| {
            // Right-continuous step function; the last segment owns s = 1.
            let seg = match knots[1..knots.len() - 1]
                .iter()
                .position(|&b| s < b)
            {
                Some(p) => p,
                None => slopes.len() - 1,
            };
            slopes[seg]
        }));
    }
    let breaks = knots[1..knots.len() - 1].to_vec();
    Curve::from_components(axial_index, c0, others, None).map(|c| c.with_breakpoints(breaks))
}

/// Grid estimates of `‖γ′‖_∞` and the `α`-Hölder norm of `γ′`, maximizing
/// over all grid pairs. Both are lower bounds of the true norms; cost is
/// quadratic in `grid_size`.
pub fn sup_norm_and_holder(
    curve: &Curve,
    alpha: f64,
    grid_size: usize,
) -> Result<(f64, f64), CurveError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CurveError::BadExponent { alpha });
    }
    if grid_size < 2 {
        return Err(CurveError::BadGrid { size: grid_size });
    }
    let d = curve.dim();
    let g = grid_size;
    let mut derivs = Vec::with_capacity(g);
    for t in 0..g {
        let s = t as f64 / (g - 1) as f64;
        derivs.push(curve.deriv(s));
    }
    let mut sup: f64 = 0.0;
    for v in &derivs {
        sup = sup.max(math::sqrt(v.iter().map(|x| x * x).sum()));
    }
    let mut holder: f64 = 0.0;
    for a in 0..g {
        for b in (a + 1)..g {
            let mut dv = 0.0;
            for c in 0..d {
                let diff = derivs[b][c] - derivs[a][c];
                dv += diff * diff;
            }
            let ds = (b - a) as f64 / (g - 1) as f64;
            holder = holder.max(math::sqrt(dv) / math::powf(ds, alpha));
        }
    }
    Ok((sup, holder))
}

/// `d_{C¹}` between two curves of equal dimension: `sup_s |γ_A′ − γ_B′|`
/// estimated on a uniform grid.
pub fn distance_c1(a: &Curve, b: &Curve, grid: usize) -> Result<f64, CurveError> {
    if a.dim() != b.dim() {
        return Err(CurveError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let g = grid.max(2);
    let mut sup: f64 = 0.0;
    let mut va = vec![0.0; a.dim()];
    let mut vb = vec![0.0; b.dim()];
    for t in 0..g {
        let s = t as f64 / (g - 1) as f64;
        a.deriv_into(s, &mut va);
        b.deriv_into(s, &mut vb);
        let d2: f64 = va.iter().zip(&vb).map(|(x, y)| (x - y) * (x - y)).sum();
        sup = sup.max(math::sqrt(d2));
    }
    Ok(sup)
}

/// `d_{BV}` between two curves: `∫₀¹ |γ_A′ − γ_B′| ds` by composite
/// quadrature over `base_panels` uniform panels.
pub fn distance_bv(
    a: &Curve,
    b: &Curve,
    base_panels: usize,
    cfg: &QuadConfig,
) -> Result<f64, CurveError> {
    if a.dim() != b.dim() {
        return Err(CurveError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let d = a.dim();
    let f = |s: f64| {
        let mut acc = 0.0;
        for j in 1..=d {
            let diff = a.deriv_component(j, s) - b.deriv_component(j, s);
            acc += diff * diff;
        }
        math::sqrt(acc)
    };
    quad::integrate_unit_interval(f, base_panels, cfg)
        .map(|(v, _)| v)
        .map_err(|e| CurveError::BadPolyline(alloc::format!("BV quadrature failed: {e}")))
}
