//! Index orders, the Krull-dimension witness family, chain witnesses and
//! annihilators.
//!
//! The index order `m(f, k)` is the length of the run of vanishing
//! coefficients starting at `k`. Since `p(n) > 0`, a coefficient vanishes
//! exactly when its normalized value does, so everything here reads `u`.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Certainty, Coeffs, Element};
use crate::coeffseq::{EpSeq, GenSeq};
use crate::error::{Error, Result, SeqError};
use crate::weights::Weight;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Default exploration horizon; covers `a_k = 2^k` for `k <= 14`.
pub const DEFAULT_HORIZON: usize = 1 << 14;

/// A run length, possibly infinite. `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOrderReport {
    pub k: usize,
    /// Run length. When `certainty` is `Horizon(h)` the run reached `h` and
    /// this is the truncated length `h - k + 1`.
    pub m: Order,
    pub horizon: usize,
    pub certainty: Certainty,
}

#[derive(Serialize)]
struct ReportLine {
    k: usize,
    m: Option<usize>,
    flag: &'static str,
}

impl IndexOrderReport {
    /// `{"k": .., "m": .., "flag": "exact"|"horizon"}`, with `m = null` for an
    /// infinite run.
    pub fn to_json_line(&self) -> String {
        let m = match self.m {
            Order::Finite(m) => Some(m),
            Order::Infinite => None,
        };
        let flag = if self.certainty == Certainty::Exact { "exact" } else { "horizon" };
        serde_json::to_string(&ReportLine { k: self.k, m, flag }).expect("plain struct")
    }
}

/// Zero run of `u` from `k`. Exact for periodic elements (a run that covers
/// one full cycle past the prefix never ends). Generated elements are scanned
/// up to `min(horizon, own horizon)`.
pub fn index_order(f: &Element, k: usize, horizon: usize) -> Result<IndexOrderReport> {
    match f.coeffs() {
        Coeffs::Periodic(u) => Ok(IndexOrderReport { k, m: periodic_run(u, k), horizon, certainty: Certainty::Exact }),
        Coeffs::Generated(g) => {
            let h = horizon.min(g.horizon());
            if k > h {
                return Err(SeqError::HorizonExceeded { lo: k, hi: k, horizon: h }.into());
            }
            Ok(generated_run(g, k, h))
        }
    }
}

fn periodic_run(u: &EpSeq, k: usize) -> Order {
    let end = k.max(u.prefix().len()) + u.cycle().len();
    match (k..end).find(|&n| u.get(n) != ZERO) {
        Some(n) => Order::Finite(n - k),
        None => Order::Infinite,
    }
}

fn generated_run(g: &GenSeq, k: usize, h: usize) -> IndexOrderReport {
    let rule = g.rule();
    match (k..=h).find(|&n| rule(n) != ZERO) {
        Some(n) => IndexOrderReport { k, m: Order::Finite(n - k), horizon: h, certainty: Certainty::Exact },
        None => IndexOrderReport { k, m: Order::Finite(h - k + 1), horizon: h, certainty: Certainty::Horizon(h) },
    }
}

/// `true` when `m` lies in some block `{2^k + l : 0 <= l <= k^(n+1)}`.
pub fn krull_zero(n: u32, m: usize) -> bool {
    let mut k = 0u32;
    while k < usize::BITS && (1usize << k) <= m {
        let len = (k as usize).checked_pow(n + 1).unwrap_or(usize::MAX);
        if m - (1usize << k) <= len {
            return true;
        }
        k += 1;
    }
    false
}

/// The witness `f_n` with `u(m) = 0` on the blocks `2^k + l`,
/// `0 <= l <= k^(n+1)`, and `u(m) = 1` elsewhere.
pub fn krull_family(weight: Weight, n: u32, horizon: usize) -> Result<Element> {
    if n == 0 {
        return Err(Error::PreconditionFailed("n must be positive".into()));
    }
    if horizon < 4 {
        return Err(Error::PreconditionFailed("horizon must be at least 4".into()));
    }
    let g = GenSeq::new(move |m| if krull_zero(n, m) { ZERO } else { ONE }, horizon, 1.0);
    Ok(Element::from_generated(weight, g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub k: usize,
    /// `a_k = 2^k`
    pub a_k: usize,
    pub order: IndexOrderReport,
    /// `m(f, a_k) / k^n`; infinite when the run is.
    pub ratio: f64,
}

/// `m(f, a_k) / k^n` for `1 <= k` with `2^k <= horizon`. Advisory only: the
/// memberships it hints at are defined by limits.
pub fn growth_trajectory(f: &Element, n: u32, horizon: usize) -> Result<Vec<TrajectoryPoint>> {
    let mut out = Vec::new();
    let mut k = 1usize;
    while k < usize::BITS as usize && (1usize << k) <= horizon {
        let a_k = 1usize << k;
        let order = index_order(f, a_k, horizon)?;
        let ratio = match order.m {
            Order::Finite(m) => m as f64 / (k as f64).powi(n as i32),
            Order::Infinite => f64::INFINITY,
        };
        out.push(TrajectoryPoint { k, a_k, order, ratio });
        k += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderInequalities {
    /// `m(f+g, k) >= min(m(f, k), m(g, k))`
    pub sum: bool,
    /// `m(f*g, k) >= max(m(f, k), m(g, k))`
    pub product: bool,
}

impl OrderInequalities {
    pub fn both(&self) -> bool {
        self.sum && self.product
    }
}

pub fn p1_p2_check(f: &Element, g: &Element, k: usize, horizon: usize) -> Result<OrderInequalities> {
    let mf = index_order(f, k, horizon)?.m;
    let mg = index_order(g, k, horizon)?.m;
    let msum = index_order(&f.add(g)?, k, horizon)?.m;
    let mprod = index_order(&f.star(g)?, k, horizon)?.m;
    Ok(OrderInequalities { sum: msum >= mf.min(mg), product: mprod >= mf.max(mg) })
}

/// `chi` with `u_chi = 1` where `u_f = 0` and `0` elsewhere. Every `h` with
/// `f * h = 0` is `h = h * chi`, so `ker(h -> f * h) = <chi>`.
pub fn annihilator_generator(f: &Element) -> Result<Element> {
    let chi = f.u()?.map(|z| if z == ZERO { ONE } else { ZERO })?;
    Ok(Element::from_normalized(f.weight().clone(), chi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    /// Ascending chain `I_n = {f : f^(k) = 0 for k >= n}`, witness `z^n`.
    Noetherian,
    /// Descending chain `I_n = {f : f^(k) = 0 for k <= n}`, witness `z^(n+1)`.
    Artinian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub n: usize,
    /// Witness exponent.
    pub degree: usize,
    /// Witness lies in the larger ideal of the pair.
    pub in_larger: bool,
    /// Witness lies outside the smaller ideal.
    pub outside_smaller: bool,
    pub pass: bool,
}

/// `u(k) = 0` for every `k >= start`.
fn zero_from(u: &EpSeq, start: usize) -> bool {
    u.prefix().iter().skip(start).all(|&z| z == ZERO) && u.cycle().iter().all(|&z| z == ZERO)
}

/// `u(k) = 0` for every `k <= end`.
fn zero_upto(u: &EpSeq, end: usize) -> bool {
    (0..=end).all(|k| u.get(k) == ZERO)
}

/// The monomial witnessing a strict step of the ascending (`I_n` inside
/// `I_{n+1}`) or descending (`I_{n+1}` inside `I_n`) chain, with the
/// memberships checked on its coefficients.
pub fn chain_witness(kind: ChainKind, n: usize, weight: Weight) -> Result<(Element, ChainReport)> {
    if n == 0 {
        return Err(Error::PreconditionFailed("n must be positive".into()));
    }
    let degree = match kind {
        ChainKind::Noetherian => n,
        ChainKind::Artinian => n + 1,
    };
    let f = Element::monomial(weight, degree, ONE)?;
    let u = f.u()?;
    let (in_larger, outside_smaller) = match kind {
        ChainKind::Noetherian => (zero_from(u, n + 1), !zero_from(u, n)),
        ChainKind::Artinian => (zero_upto(u, n), !zero_upto(u, n + 1)),
    };
    let report = ChainReport { kind, n, degree, in_larger, outside_smaller, pass: in_larger && outside_smaller };
    Ok((f, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonfixedTrajectory {
    /// `|u_f(k_j)|` along the given indices.
    pub values: Vec<f64>,
    /// For a periodic `f` and indices forming an arithmetic progression past
    /// the prefix: whether `u_f` tends to zero along the progression
    /// continued forever. `None` when no exact verdict is available.
    pub in_ideal: Option<bool>,
}

/// Values of `|u_f|` along `ks`, the quantity whose limit decides membership
/// in `{f : lim p(k_j) f^(k_j) = 0}`.
pub fn nonfixed_ideal_trajectory(f: &Element, ks: &[usize]) -> Result<NonfixedTrajectory> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PreconditionFailed("indices must be strictly increasing".into()));
    }
    let values = ks.iter().map(|&k| f.normalized_at(k).map(|z| z.norm())).collect::<Result<Vec<_>>>()?;
    let in_ideal = match f.coeffs() {
        Coeffs::Periodic(u) if ks.len() >= 2 && ks[0] >= u.prefix().len() => {
            let step = ks[1] - ks[0];
            let progression = ks.windows(2).all(|w| w[1] - w[0] == step);
            progression.then(|| progression_tends_to_zero(u, ks[0], step))
        }
        _ => None,
    };
    Ok(NonfixedTrajectory { values, in_ideal })
}

/// Along `start + j * step` past the prefix the residues mod the cycle length
/// repeat, so `u` tends to zero iff it vanishes on every residue visited.
fn progression_tends_to_zero(u: &EpSeq, start: usize, step: usize) -> bool {
    let l = u.cycle().len();
    (0..l).all(|j| u.get(start + j * step) == ZERO)
}
