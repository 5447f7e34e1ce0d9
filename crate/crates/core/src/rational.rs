//! Integer pair sequences `(p_n, q_n)` with `p_n/q_n → x`, the drivers of
//! every recovery limit.
//!
//! Three generators: the naive scheme `(⌊qx⌋, q)` (also the uniform scheme),
//! the decimal scheme `(round(10ʲx), 10ʲ)`, and continued-fraction
//! convergents. The CF expansion runs in exact integer arithmetic on the
//! dyadic rational the `f64` target actually is, so every emitted convergent
//! satisfies the Dirichlet bound `|p/q − x| < 1/q²` by construction, and a
//! rational-at-machine-precision target terminates with its exact pair.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// One rational approximant `p/q ∈ [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalPair {
    pub p: u64,
    pub q: u64,
}

impl RationalPair {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn error_to(&self, x: f64) -> f64 {
        math::abs(self.value() - x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemeError {
    BadTarget { x: f64 },
    BadCount,
    /// Fixed lists must have `p ≤ q` and strictly increasing `q`.
    BadFixedList { position: usize },
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::BadTarget { x } => write!(f, "target {x} is outside [0, 1]"),
            SchemeError::BadCount => write!(f, "need at least one pair"),
            SchemeError::BadFixedList { position } => {
                write!(f, "fixed pair list invalid at position {position}")
            }
        }
    }
}

impl core::error::Error for SchemeError {}

fn check_target(x: f64) -> Result<(), SchemeError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(SchemeError::BadTarget { x })
    }
}

/// `(⌊nx⌋, n)`; satisfies `|p/q − x| < 1/q`.
pub fn naive_pair(x: f64, n: u64) -> Result<RationalPair, SchemeError> {
    check_target(x)?;
    if n == 0 {
        return Err(SchemeError::BadCount);
    }
    let p = (math::floor(n as f64 * x) as u64).min(n);
    Ok(RationalPair { p, q: n })
}

/// The uniform scheme at stage `n`: the map `x ↦ (⌊nx⌋, n)`.
pub fn uniform_pairs(n: u64) -> Result<impl Fn(f64) -> RationalPair, SchemeError> {
    if n == 0 {
        return Err(SchemeError::BadCount);
    }
    Ok(move |x: f64| {
        let clamped = x.clamp(0.0, 1.0);
        let p = (math::floor(n as f64 * clamped) as u64).min(n);
        RationalPair { p, q: n }
    })
}

/// `(round(10ʲ·x), 10ʲ)`; denominators capped at 10⁹ to stay in exact
/// integer range.
pub fn decimal_pair(x: f64, j: u32) -> Result<RationalPair, SchemeError> {
    check_target(x)?;
    if j == 0 || j > 9 {
        return Err(SchemeError::BadCount);
    }
    let q = 10u64.pow(j);
    let p = (math::round(q as f64 * x) as u64).min(q);
    Ok(RationalPair { p, q })
}

/// Continued-fraction convergents of `x`, exact early termination reported.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergents {
    pub pairs: Vec<RationalPair>,
    /// The expansion ended with the exact pair (target rational at machine
    /// precision).
    pub terminated: bool,
}

/// The f64 in `[0,1]` as an exact dyadic rational `num/den`.
///
/// Targets below `2⁻¹²⁶` collapse to 0 (their first nontrivial convergent
/// denominator would overflow `u64` anyway).
fn dyadic(x: f64) -> (u128, u128) {
    if x <= 0.0 {
        return (0, 1);
    }
    if x >= 1.0 {
        return (1, 1);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if biased == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    while mant & 1 == 0 && exp < 0 {
        mant >>= 1;
        exp += 1;
    }
    if -exp > 126 {
        return (0, 1);
    }
    (mant as u128, 1u128 << (-exp) as u32)
}

/// First `count` continued-fraction convergents of `x ∈ [0,1]`.
///
/// Every emitted pair satisfies `|p/q − x| < 1/q²`; a convergent replacing
/// another with the same denominator keeps only the later (better) one, so
/// denominators are strictly increasing. Emission also stops once the error
/// drops below `2⁻⁵²` relative resolution, where further partial quotients
/// say nothing about the underlying real.
pub fn continued_fraction_convergents(x: f64, count: usize) -> Result<Convergents, SchemeError> {
    check_target(x)?;
    if count == 0 {
        return Err(SchemeError::BadCount);
    }
    let (num, den) = dyadic(x);
    let mut pairs: Vec<RationalPair> = Vec::new();
    // Euclid on (a, b) = (num, den); convergent recurrence
    // p_n = a_n p_{n-1} + p_{n-2} seeded with p_{-2} = 0, p_{-1} = 1,
    // q_{-2} = 1, q_{-1} = 0.
    let (mut a, mut b) = (num, den);
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let mut terminated = false;
    // First quotient of x in [0,1) is 0; of x = 1 it is 1.
    loop {
        if b == 0 {
            terminated = true;
            break;
        }
        let quot = a / b;
        let rem = a % b;
        let h_next = match quot.checked_mul(h).and_then(|v| v.checked_add(h_prev)) {
            Some(v) => v,
            None => break,
        };
        let k_next = match quot.checked_mul(k).and_then(|v| v.checked_add(k_prev)) {
            Some(v) => v,
            None => break,
        };
        if h_next > u64::MAX as u128 || k_next > u64::MAX as u128 {
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        let pair = RationalPair {
            p: h as u64,
            q: k as u64,
        };
        match pairs.last() {
            Some(last) if last.q == pair.q => {
                *pairs.last_mut().unwrap() = pair;
            }
            _ => pairs.push(pair),
        }
        a = b;
        b = rem;
        if b == 0 {
            terminated = true;
            break;
        }
        if pairs.len() >= count {
            break;
        }
        // |p/q - x| = |p·den - q·num| / (q·den); stop when below 2^-52.
        let err_num = (h * den).abs_diff(k * num);
        if let (Some(scaled), Some(res)) = (err_num.checked_mul(1 << 52), k.checked_mul(den)) {
            if scaled < res {
                terminated = true;
                break;
            }
        }
    }
    Ok(Convergents { pairs, terminated })
}

/// True iff every pair obeys `|p/q − x| < q^{−1/2}` and denominators
/// strictly increase.
pub fn meets_rate_condition(pairs: &[RationalPair], x: f64) -> bool {
    if pairs.is_empty() {
        return false;
    }
    let mut prev_q = 0u64;
    for pair in pairs {
        if pair.q <= prev_q || pair.p > pair.q {
            return false;
        }
        if pair.error_to(x) >= 1.0 / math::sqrt(pair.q as f64) {
            return false;
        }
        prev_q = pair.q;
    }
    true
}

/// A generator of rational approximation sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum RationalScheme {
    /// `(⌊qx⌋, q)` for `q = 1, 2, …`.
    Naive,
    /// `(round(10ʲx), 10ʲ)` for `j = 1, 2, …` (denominators ≤ 10⁹).
    Decimal,
    /// Continued-fraction convergents.
    ContinuedFraction,
    /// A user-supplied sequence.
    FixedList(Vec<RationalPair>),
}

impl RationalScheme {
    pub fn name(&self) -> &'static str {
        match self {
            RationalScheme::Naive => "naive",
            RationalScheme::Decimal => "decimal",
            RationalScheme::ContinuedFraction => "cf",
            RationalScheme::FixedList(_) => "fixed_list",
        }
    }

    /// The scheme's pairs for target `x`, with denominators capped by
    /// `q_max`.
    pub fn pairs(&self, x: f64, q_max: u64) -> Result<Vec<RationalPair>, SchemeError> {
        check_target(x)?;
        if q_max == 0 {
            return Err(SchemeError::BadCount);
        }
        match self {
            RationalScheme::Naive => (1..=q_max).map(|q| naive_pair(x, q)).collect(),
            RationalScheme::Decimal => {
                let mut pairs = Vec::new();
                for j in 1..=9u32 {
                    if 10u64.pow(j) > q_max {
                        break;
                    }
                    pairs.push(decimal_pair(x, j)?);
                }
                if pairs.is_empty() {
                    return Err(SchemeError::BadCount);
                }
                Ok(pairs)
            }
            RationalScheme::ContinuedFraction => {
                let conv = continued_fraction_convergents(x, 64)?;
                let pairs: Vec<RationalPair> =
                    conv.pairs.into_iter().filter(|p| p.q <= q_max).collect();
                if pairs.is_empty() {
                    return Err(SchemeError::BadCount);
                }
                Ok(pairs)
            }
            RationalScheme::FixedList(list) => {
                let mut prev_q = 0u64;
                for (pos, pair) in list.iter().enumerate() {
                    if pair.p > pair.q || pair.q <= prev_q {
                        return Err(SchemeError::BadFixedList { position: pos });
                    }
                    prev_q = pair.q;
                }
                let pairs: Vec<RationalPair> =
                    list.iter().copied().filter(|p| p.q <= q_max).collect();
                if pairs.is_empty() {
                    return Err(SchemeError::BadCount);
                }
                Ok(pairs)
            }
        }
    }
}
