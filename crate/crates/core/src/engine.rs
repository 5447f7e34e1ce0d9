//! Signature coefficients two independent ways.
//!
//! The quadrature route fills a [`CoeffTable`] with *scaled* axial
//! coefficients
//!
//! ```text
//! Ŝ^{(j;i)}_{k,l} = (k+l+1)!·S^{(j;i)}_{k,l} / C₀^{k+l} = ∫₀¹ ρ_{k,l}(s)·x_j′(s) ds,
//! ```
//!
//! plain numbers of magnitude at most `‖x_j′‖_∞`, immune to the factorial
//! overflow the raw coefficients hit near level 170. The Chen route computes
//! full truncated signatures of polylines as tensor products of segment
//! exponentials; [`cross_check`] compares the two where both are affordable.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::curve::{Curve, Polyline};
use crate::kernel::KernelIndex;
use crate::math;
use crate::quad::{self, QuadConfig, QuadError};

/// Hard cap on dense tensor storage: `Σ_{n≤N} dⁿ` coefficients.
pub const MAX_DENSE_COEFFS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    /// Axial coefficients are analytic (`Ŝ ≡ C₀`); quadrature refuses them.
    AxialComponent { j: usize },
    ComponentOutOfRange { j: usize, dim: usize },
    IndexOutOfRange { k: usize, l: usize, n_max: usize },
    LevelOutOfRange { level: usize, n_max: usize },
    Quadrature {
        j: usize,
        k: usize,
        l: usize,
        source: QuadError,
    },
    ShapeMismatch,
    BudgetExceeded { dim: usize, n_max: usize },
    EmptyPolyline,
    BadTruncation { n_max: usize },
    BadSpeed { c0: f64 },
    BadCellCount { got: usize, want: usize },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::AxialComponent { j } => {
                write!(f, "component {j} is the axial index; its scaled cells are C0 exactly")
            }
            EngineError::ComponentOutOfRange { j, dim } => {
                write!(f, "component {j} out of range 1..={dim}")
            }
            EngineError::IndexOutOfRange { k, l, n_max } => {
                write!(f, "cell ({k},{l}) exceeds truncation {n_max}")
            }
            EngineError::LevelOutOfRange { level, n_max } => {
                write!(f, "level {level} exceeds truncation {n_max}")
            }
            EngineError::Quadrature { j, k, l, source } => {
                write!(f, "quadrature failed at (j={j}, k={k}, l={l}): {source}")
            }
            EngineError::ShapeMismatch => write!(f, "operands have different (d, i, N) shapes"),
            EngineError::BudgetExceeded { dim, n_max } => write!(
                f,
                "dense signature of dimension {dim} at level {n_max} exceeds the coefficient budget"
            ),
            EngineError::EmptyPolyline => write!(f, "polyline needs at least two vertices"),
            EngineError::BadTruncation { n_max } => write!(f, "truncation {n_max} must be >= 1"),
            EngineError::BadSpeed { c0 } => write!(f, "axial speed {c0} must be positive"),
            EngineError::BadCellCount { got, want } => {
                write!(f, "cell array has {got} entries, expected {want}")
            }
        }
    }
}

impl core::error::Error for EngineError {}

// ---------------------------------------------------------------------------
// Scaled coefficient quadrature
// ---------------------------------------------------------------------------

/// `Ŝ^{(j;i)}_{k,l} = ∫₀¹ ρ_{k,l}(s)·x_j′(s) ds` by mode-centered quadrature.
pub fn scaled_coefficient(
    curve: &Curve,
    j: usize,
    idx: KernelIndex,
    cfg: &QuadConfig,
) -> Result<f64, EngineError> {
    if j == 0 || j > curve.dim() {
        return Err(EngineError::ComponentOutOfRange {
            j,
            dim: curve.dim(),
        });
    }
    if j == curve.axial_index() {
        return Err(EngineError::AxialComponent { j });
    }
    quad::integrate_against_rho(idx, |s| curve.deriv_component(j, s), curve.breakpoints(), cfg)
        .map(|(v, _)| v)
        .map_err(|source| EngineError::Quadrature {
            j,
            k: idx.k,
            l: idx.l,
            source,
        })
}

/// Dense grid of scaled axial coefficients `Ŝ^{(j;i)}_{k,l}` for all
/// `j ≠ i`, `k+l ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    dim: usize,
    axial_index: usize,
    axial_speed: f64,
    n_max: usize,
    /// Quadrature tolerance the cells were computed to.
    tol: f64,
    /// Recorded grid estimate of `max_{j≠i} ‖x_j′‖_∞`.
    deriv_bound: f64,
    cells: Vec<f64>,
}

fn tri(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

impl CoeffTable {
    /// Assembles a table from raw parts; `cells` is laid out per non-axial
    /// component (ascending `j`), each block triangular by `n = k+l`, then `k`.
    pub fn from_parts(
        dim: usize,
        axial_index: usize,
        axial_speed: f64,
        n_max: usize,
        tol: f64,
        deriv_bound: f64,
        cells: Vec<f64>,
    ) -> Result<Self, EngineError> {
        if axial_index == 0 || axial_index > dim || dim < 2 {
            return Err(EngineError::ComponentOutOfRange {
                j: axial_index,
                dim,
            });
        }
        if !(axial_speed > 0.0) || !axial_speed.is_finite() {
            return Err(EngineError::BadSpeed { c0: axial_speed });
        }
        let want = (dim - 1) * tri(n_max);
        if cells.len() != want {
            return Err(EngineError::BadCellCount {
                got: cells.len(),
                want,
            });
        }
        Ok(Self {
            dim,
            axial_index,
            axial_speed,
            n_max,
            tol,
            deriv_bound,
            cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axial_index(&self) -> usize {
        self.axial_index
    }

    pub fn axial_speed(&self) -> f64 {
        self.axial_speed
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn deriv_bound(&self) -> f64 {
        self.deriv_bound
    }

    fn j_rank(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.dim || j == self.axial_index {
            return None;
        }
        Some(if j < self.axial_index { j - 1 } else { j - 2 })
    }

    fn slot(&self, j: usize, k: usize, l: usize) -> Option<usize> {
        let rank = self.j_rank(j)?;
        let n = k + l;
        if n > self.n_max {
            return None;
        }
        Some(rank * tri(self.n_max) + n * (n + 1) / 2 + k)
    }

    /// Scaled cell `Ŝ^{(j;i)}_{k,l}`; `None` off the stored grid.
    pub fn get(&self, j: usize, k: usize, l: usize) -> Option<f64> {
        self.slot(j, k, l).map(|s| self.cells[s])
    }

    /// The scaled axial diagonal is analytic: `Ŝ^{(i;i)}_{k,l} ≡ C₀`.
    pub fn scaled_axial_cell(&self) -> f64 {
        self.axial_speed
    }

    /// Storage-ordered cell coordinates `(j, k, l)`.
    pub fn cell_coords(&self) -> Vec<(usize, usize, usize)> {
        cell_coords(self.dim, self.axial_index, self.n_max)
    }

    /// Storage-ordered iteration over `(j, k, l, value)`.
    pub fn iter_cells(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.cell_coords()
            .into_iter()
            .zip(&self.cells)
            .map(|((j, k, l), v)| (j, k, l, *v))
    }

    /// Cells violating the boundedness invariant `|Ŝ| ≤ bound + tol`.
    pub fn bound_violations(&self) -> Vec<(usize, usize, usize, f64)> {
        self.iter_cells()
            .filter(|&(_, _, _, v)| math::abs(v) > self.deriv_bound + self.tol.max(1e-12))
            .collect()
    }
}

/// Storage order of table cells: non-axial `j` ascending, then `n = k+l`,
/// then `k`.
pub fn cell_coords(dim: usize, axial_index: usize, n_max: usize) -> Vec<(usize, usize, usize)> {
    let mut coords = Vec::with_capacity((dim - 1) * tri(n_max));
    for j in (1..=dim).filter(|&j| j != axial_index) {
        for n in 0..=n_max {
            for k in 0..=n {
                coords.push((j, k, n - k));
            }
        }
    }
    coords
}

/// Fills the whole table by quadrature, one independent cell at a time.
pub fn build_table(curve: &Curve, n_max: usize, cfg: &QuadConfig) -> Result<CoeffTable, EngineError> {
    if n_max == 0 {
        return Err(EngineError::BadTruncation { n_max });
    }
    let coords = cell_coords(curve.dim(), curve.axial_index(), n_max);
    let mut cells = Vec::with_capacity(coords.len());
    for (j, k, l) in coords {
        cells.push(scaled_coefficient(curve, j, KernelIndex::new(k, l), cfg)?);
    }
    CoeffTable::from_parts(
        curve.dim(),
        curve.axial_index(),
        curve.axial_speed(),
        n_max,
        cfg.rel_tol,
        curve.non_axial_sup_estimate(1024),
        cells,
    )
}

// ---------------------------------------------------------------------------
// Raw <-> scaled conversions
// ---------------------------------------------------------------------------

/// Rescales a raw coefficient stored as `(sign, ln|S|)` into the scaled form
/// `Ŝ = sign·exp(ln (n+1)! + ln|S| − n·ln C₀)`, `n = k+l`.
pub fn scaled_from_sign_log(sign: i8, log_abs: f64, n: usize, c0: f64) -> f64 {
    if sign == 0 || log_abs == f64::NEG_INFINITY {
        return 0.0;
    }
    sign.signum() as f64 * math::exp(math::ln_factorial(n + 1) + log_abs - n as f64 * math::ln(c0))
}

/// Inverse of [`scaled_from_sign_log`].
pub fn sign_log_from_scaled(value: f64, n: usize, c0: f64) -> (i8, f64) {
    if value == 0.0 {
        return (0, f64::NEG_INFINITY);
    }
    let sign = if value > 0.0 { 1 } else { -1 };
    (
        sign,
        math::ln(math::abs(value)) - math::ln_factorial(n + 1) + n as f64 * math::ln(c0),
    )
}

/// Raw coefficient from a scaled cell; meaningful while `(n+1)!` is
/// representable, used by cross-checks at small levels.
pub fn raw_from_scaled(value: f64, n: usize, c0: f64) -> f64 {
    value * math::exp(n as f64 * math::ln(c0) - math::ln_factorial(n + 1))
}

// ---------------------------------------------------------------------------
// Truncated signatures by Chen products
// ---------------------------------------------------------------------------

/// Dense truncated signature: level `n ≤ N` holds all `dⁿ` word coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSignature {
    dim: usize,
    n_max: usize,
    levels: Vec<Vec<f64>>,
}

fn dense_size(dim: usize, n_max: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..=n_max {
        total = total.checked_add(level)?;
        if total > MAX_DENSE_COEFFS {
            return None;
        }
        level = level.checked_mul(dim)?;
    }
    Some(total)
}

impl TruncatedSignature {
    /// The group identity `(1, 0, 0, …)`.
    pub fn identity(dim: usize, n_max: usize) -> Result<Self, EngineError> {
        if n_max == 0 {
            return Err(EngineError::BadTruncation { n_max });
        }
        if dense_size(dim, n_max).is_none() {
            return Err(EngineError::BudgetExceeded { dim, n_max });
        }
        let mut levels = Vec::with_capacity(n_max + 1);
        let mut size = 1usize;
        for n in 0..=n_max {
            levels.push(if n == 0 { vec![1.0] } else { vec![0.0; size] });
            size *= dim;
        }
        Ok(Self { dim, n_max, levels })
    }

    /// Truncated tensor exponential of a straight segment: level `n` is
    /// `Δ^{⊗n}/n!`.
    pub fn segment_exponential(increment: &[f64], n_max: usize) -> Result<Self, EngineError> {
        let dim = increment.len();
        let mut sig = Self::identity(dim, n_max)?;
        let mut prev: Vec<f64> = vec![1.0];
        for n in 1..=n_max {
            let mut cur = vec![0.0; prev.len() * dim];
            let inv = 1.0 / n as f64;
            for (u, &a) in prev.iter().enumerate() {
                for (c, &vc) in increment.iter().enumerate() {
                    cur[u * dim + c] = a * vc * inv;
                }
            }
            sig.levels[n].copy_from_slice(&cur);
            prev = cur;
        }
        Ok(sig)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dense coefficients of level `n`, indexed by base-`d` words.
    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n]
    }

    /// Coefficient of a word given with 1-based letters.
    pub fn coefficient(&self, word: &[usize]) -> Option<f64> {
        if word.len() > self.n_max {
            return None;
        }
        let mut index = 0usize;
        for &letter in word {
            if letter == 0 || letter > self.dim {
                return None;
            }
            index = index * self.dim + (letter - 1);
        }
        Some(self.levels[word.len()][index])
    }

    /// Chen product: level `n` of the result is `Σ_{p+q=n} A_p ⊗ B_q`.
    pub fn chen_mul(&self, other: &Self) -> Result<Self, EngineError> {
        if self.dim != other.dim || self.n_max != other.n_max {
            return Err(EngineError::ShapeMismatch);
        }
        let mut out = Self::identity(self.dim, self.n_max)?;
        for n in 0..=self.n_max {
            let mut acc = vec![0.0; self.levels[n].len()];
            for p in 0..=n {
                let a = &self.levels[p];
                let b = &other.levels[n - p];
                for (u, &av) in a.iter().enumerate() {
                    if av == 0.0 {
                        continue;
                    }
                    let base = u * b.len();
                    for (v, &bv) in b.iter().enumerate() {
                        acc[base + v] += av * bv;
                    }
                }
            }
            out.levels[n] = acc;
        }
        Ok(out)
    }

    /// ℓ¹ norm of one level's coefficients.
    pub fn level_l1(&self, n: usize) -> f64 {
        self.levels[n].iter().map(|v| math::abs(*v)).sum()
    }

    /// Right-multiplies by a segment exponential in place. `scratch` must be
    /// an identity-shaped buffer; it is consumed and refilled each call.
    fn mul_segment(&mut self, increment: &[f64], vpow: &mut Vec<Vec<f64>>, scratch: &mut [Vec<f64>]) {
        let d = self.dim;
        // vpow[b] = increment^{⊗b} / b!, flattened.
        vpow.clear();
        vpow.push(vec![1.0]);
        for b in 1..=self.n_max {
            let prev = &vpow[b - 1];
            let mut cur = vec![0.0; prev.len() * d];
            let inv = 1.0 / b as f64;
            for (u, &a) in prev.iter().enumerate() {
                for (c, &vc) in increment.iter().enumerate() {
                    cur[u * d + c] = a * vc * inv;
                }
            }
            vpow.push(cur);
        }
        for n in (1..=self.n_max).rev() {
            let acc = &mut scratch[n];
            acc.copy_from_slice(&self.levels[n]);
            for b in 1..=n {
                let a = &self.levels[n - b];
                let w = &vpow[b];
                for (u, &av) in a.iter().enumerate() {
                    if av == 0.0 {
                        continue;
                    }
                    let base = u * w.len();
                    for (v, &wv) in w.iter().enumerate() {
                        acc[base + v] += av * wv;
                    }
                }
            }
            core::mem::swap(&mut self.levels[n], acc);
        }
    }
}

/// Truncated signature of a polyline: the ⊗-product over segments of the
/// tensor exponentials of the increments.
pub fn chen_truncated_signature(
    path: &Polyline,
    n_max: usize,
) -> Result<TruncatedSignature, EngineError> {
    if path.len() < 2 {
        return Err(EngineError::EmptyPolyline);
    }
    let d = path.dim();
    let mut sig = TruncatedSignature::identity(d, n_max)?;
    let mut scratch: Vec<Vec<f64>> = sig.levels.iter().map(|l| vec![0.0; l.len()]).collect();
    let mut vpow: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    let mut inc = vec![0.0; d];
    for t in 1..path.len() {
        let (a, b) = (path.vertex(t - 1), path.vertex(t));
        let mut moved = false;
        for c in 0..d {
            inc[c] = b[c] - a[c];
            moved |= inc[c] != 0.0;
        }
        if !moved {
            continue;
        }
        sig.mul_segment(&inc, &mut vpow, &mut scratch);
    }
    Ok(sig)
}

/// Raw axial coefficient `S^{(j;i)}_{k,l} = ⟨e_i^{⊗k}⊗e_j⊗e_i^{⊗l}, S⟩`.
///
/// `j = i` addresses the pure axial diagonal.
pub fn extract_axial_coefficient(
    sig: &TruncatedSignature,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<f64, EngineError> {
    let d = sig.dim();
    if i == 0 || i > d {
        return Err(EngineError::ComponentOutOfRange { j: i, dim: d });
    }
    if j == 0 || j > d {
        return Err(EngineError::ComponentOutOfRange { j, dim: d });
    }
    let level = k + l + 1;
    if level > sig.n_max() {
        return Err(EngineError::LevelOutOfRange {
            level,
            n_max: sig.n_max(),
        });
    }
    let mut index = 0usize;
    for pos in 0..level {
        let letter = if pos == k { j - 1 } else { i - 1 };
        index = index * d + letter;
    }
    Ok(sig.level(level)[index])
}

/// One compared cell of a [`cross_check`].
#[derive(Debug, Clone, Copy)]
pub struct CrossCheckRow {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub table_value: f64,
    pub chen_value: f64,
    pub rel_err: f64,
}

/// Comparison of the quadrature table against Chen-extracted coefficients.
#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub rows: Vec<CrossCheckRow>,
    pub max_rel_err: f64,
    pub worst: Option<(usize, usize, usize)>,
}

/// Compares every `(j,k,l)` with `k+l+1 ≤ max_level`: table cell vs
/// `(k+l+1)!·⟨word⟩/C₀^{k+l}` from the signature.
pub fn cross_check(
    table: &CoeffTable,
    sig: &TruncatedSignature,
    max_level: usize,
) -> Result<CrossCheckReport, EngineError> {
    if sig.dim() != table.dim() {
        return Err(EngineError::ShapeMismatch);
    }
    if max_level > (table.n_max() + 1).min(sig.n_max()) {
        return Err(EngineError::LevelOutOfRange {
            level: max_level,
            n_max: (table.n_max() + 1).min(sig.n_max()),
        });
    }
    let i = table.axial_index();
    let c0 = table.axial_speed();
    let mut rows = Vec::new();
    let mut max_rel_err: f64 = 0.0;
    let mut worst = None;
    for j in (1..=table.dim()).filter(|&j| j != i) {
        for n in 0..max_level {
            for k in 0..=n {
                let l = n - k;
                let raw = extract_axial_coefficient(sig, i, j, k, l)?;
                let chen_value = raw
                    * math::exp(math::ln_factorial(n + 1) - n as f64 * math::ln(c0));
                let table_value = table.get(j, k, l).expect("within truncation");
                let rel_err = math::abs(table_value - chen_value)
                    / math::abs(table_value).max(math::abs(chen_value)).max(1e-12);
                if rel_err > max_rel_err {
                    max_rel_err = rel_err;
                    worst = Some((j, k, l));
                }
                rows.push(CrossCheckRow {
                    j,
                    k,
                    l,
                    table_value,
                    chen_value,
                    rel_err,
                });
            }
        }
    }
    Ok(CrossCheckReport {
        rows,
        max_rel_err,
        worst,
    })
}
