//! Eventually periodic complex sequences and horizon-limited generated sequences.
//!
//! An [`EpSeq`] is `prefix ++ cycle ++ cycle ++ ...`. Values are finite and
//! stored with negative zero folded into positive zero, so structural equality
//! of canonical forms is exact equality of the sequences.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::SeqError;
use crate::C64;

/// Largest cycle length produced by combining sequences.
pub const MAX_CYCLE: usize = 1 << 20;

/// Sampling layout shared by a group of sequences: values at positions
/// `0..prefix_len + cycle_len` determine every sequence on the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub prefix_len: usize,
    pub cycle_len: usize,
}

impl Layout {
    pub fn new(prefix_len: usize, cycle_len: usize) -> Self {
        assert!(cycle_len > 0, "cycle length must be positive");
        Layout { prefix_len, cycle_len }
    }

    /// Smallest layout on which both inputs are representable.
    pub fn merge(self, other: Layout) -> Result<Layout, SeqError> {
        let cycle_len = lcm(self.cycle_len, other.cycle_len).ok_or(SeqError::CycleTooLong(MAX_CYCLE))?;
        Ok(Layout {
            prefix_len: self.prefix_len.max(other.prefix_len),
            cycle_len,
        })
    }

    pub fn len(&self) -> usize {
        self.prefix_len + self.cycle_len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample position holding the value at index `n`.
    pub fn position_of(&self, n: usize) -> usize {
        if n < self.prefix_len {
            n
        } else {
            self.prefix_len + (n - self.prefix_len) % self.cycle_len
        }
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: usize, b: usize) -> Option<usize> {
    let l = (a / gcd(a, b)).checked_mul(b)?;
    (l <= MAX_CYCLE).then_some(l)
}

#[inline]
fn clean(z: C64) -> C64 {
    // fold -0.0 into +0.0
    C64::new(z.re + 0.0, z.im + 0.0)
}

#[inline]
fn same(a: C64, b: C64) -> bool {
    a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
}

/// Eventually periodic complex sequence in canonical form.
#[derive(Clone, PartialEq)]
pub struct EpSeq {
    prefix: Vec<C64>,
    cycle: Vec<C64>,
}

impl fmt::Debug for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[C64]| {
            v.iter()
                .map(|z| if z.im == 0.0 { format!("{}", z.re) } else { format!("{}{:+}i", z.re, z.im) })
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "EpSeq[{} | ({})]", show(&self.prefix), show(&self.cycle))
    }
}

impl EpSeq {
    pub fn new(prefix: Vec<C64>, cycle: Vec<C64>) -> Result<Self, SeqError> {
        if cycle.is_empty() {
            return Err(SeqError::EmptyCycle);
        }
        let plen = prefix.len();
        let mut prefix = prefix;
        let mut cycle = cycle;
        for (i, z) in prefix.iter_mut().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(SeqError::NonFinite(i));
            }
            *z = clean(*z);
        }
        for (i, z) in cycle.iter_mut().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(SeqError::NonFinite(plen + i));
            }
            *z = clean(*z);
        }
        Ok(Self::canonicalize(prefix, cycle))
    }

    pub fn from_real(prefix: &[f64], cycle: &[f64]) -> Result<Self, SeqError> {
        Self::new(
            prefix.iter().map(|&x| C64::new(x, 0.0)).collect(),
            cycle.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn constant(c: C64) -> Result<Self, SeqError> {
        Self::new(Vec::new(), vec![c])
    }

    pub fn zero() -> Self {
        EpSeq { prefix: Vec::new(), cycle: vec![C64::new(0.0, 0.0)] }
    }

    pub fn one() -> Self {
        EpSeq { prefix: Vec::new(), cycle: vec![C64::new(1.0, 0.0)] }
    }

    fn canonicalize(mut prefix: Vec<C64>, cycle: Vec<C64>) -> Self {
        // minimal period
        let l = cycle.len();
        let period = (1..=l)
            .filter(|&d| l.is_multiple_of(d))
            .find(|&d| (d..l).all(|i| same(cycle[i], cycle[i - d])))
            .unwrap_or(l);
        let mut cycle: Vec<C64> = cycle[..period].to_vec();
        // absorb prefix entries equal to the cycle value they precede
        while let Some(&last) = prefix.last() {
            if !same(last, cycle[cycle.len() - 1]) {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        EpSeq { prefix, cycle }
    }

    pub fn prefix(&self) -> &[C64] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[C64] {
        &self.cycle
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.prefix.len(), self.cycle.len())
    }

    /// Value at index `n`.
    pub fn get(&self, n: usize) -> C64 {
        let p = self.prefix.len();
        if n < p {
            self.prefix[n]
        } else {
            self.cycle[(n - p) % self.cycle.len()]
        }
    }

    /// Values at every sample position of `layout`. The layout must be at
    /// least as fine as this sequence's own layout.
    pub fn samples(&self, layout: Layout) -> Vec<C64> {
        (0..layout.len()).map(|n| self.get(n)).collect()
    }

    /// Rebuilds a sequence from its values on `layout`.
    pub fn from_samples(layout: Layout, values: Vec<C64>) -> Result<Self, SeqError> {
        assert_eq!(values.len(), layout.len(), "sample count must match layout");
        let mut prefix = values;
        let cycle = prefix.split_off(layout.prefix_len);
        Self::new(prefix, cycle)
    }

    /// All values that the sequence takes: prefix followed by one cycle.
    pub fn distinct_positions(&self) -> impl Iterator<Item = C64> + '_ {
        self.prefix.iter().chain(self.cycle.iter()).copied()
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.cycle.len() == 1 && self.cycle[0] == C64::new(0.0, 0.0)
    }

    /// Pointwise binary combination. Non-finite results are reported as a
    /// domain error at the first offending index.
    pub fn zip<F>(&self, other: &EpSeq, op: F) -> Result<EpSeq, SeqError>
    where
        F: Fn(C64, C64) -> C64,
    {
        let layout = self.layout().merge(other.layout())?;
        let values = (0..layout.len()).map(|n| op(self.get(n), other.get(n)));
        Self::collect_checked(layout, values)
    }

    pub fn map<F>(&self, op: F) -> Result<EpSeq, SeqError>
    where
        F: Fn(C64) -> C64,
    {
        let layout = self.layout();
        Self::collect_checked(layout, (0..layout.len()).map(|n| op(self.get(n))))
    }

    /// Pointwise combination of any number of sequences. `op` sees the values
    /// of all inputs at one index.
    pub fn zip_many<F>(seqs: &[&EpSeq], op: F) -> Result<EpSeq, SeqError>
    where
        F: Fn(&[C64]) -> C64,
    {
        let layout = common_layout(seqs.iter().copied())?;
        let mut buf = vec![C64::new(0.0, 0.0); seqs.len()];
        let values: Vec<C64> = (0..layout.len())
            .map(|n| {
                for (slot, s) in buf.iter_mut().zip(seqs) {
                    *slot = s.get(n);
                }
                op(&buf)
            })
            .collect();
        Self::collect_checked(layout, values.into_iter())
    }

    fn collect_checked(layout: Layout, values: impl Iterator<Item = C64>) -> Result<EpSeq, SeqError> {
        let values: Vec<C64> = values.collect();
        if let Some(pos) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SeqError::PointwiseDomain(pos));
        }
        Self::from_samples(layout, values)
    }

    /// `sup_n |a(n)|`, exact.
    pub fn sup_abs(&self) -> f64 {
        self.distinct_positions().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `inf_n |a(n)|`, exact.
    pub fn inf_abs(&self) -> f64 {
        self.distinct_positions().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// First index whose value satisfies `pred`, searching prefix then one cycle.
    pub fn find_index(&self, pred: impl Fn(C64) -> bool) -> Option<usize> {
        self.distinct_positions().position(pred)
    }
}

/// Common layout of a collection of sequences.
pub fn common_layout<'a>(seqs: impl IntoIterator<Item = &'a EpSeq>) -> Result<Layout, SeqError> {
    let mut layout = Layout::new(0, 1);
    for s in seqs {
        layout = layout.merge(s.layout())?;
    }
    Ok(layout)
}

/// JSON form: `{"prefix": [[re, im], ...], "cycle": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpSeqDoc {
    #[serde(default)]
    pub prefix: Vec<[f64; 2]>,
    pub cycle: Vec<[f64; 2]>,
}

impl From<&EpSeq> for EpSeqDoc {
    fn from(s: &EpSeq) -> Self {
        EpSeqDoc {
            prefix: s.prefix.iter().map(|z| [z.re, z.im]).collect(),
            cycle: s.cycle.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<EpSeqDoc> for EpSeq {
    type Error = SeqError;

    fn try_from(doc: EpSeqDoc) -> Result<Self, SeqError> {
        EpSeq::new(
            doc.prefix.iter().map(|p| C64::new(p[0], p[1])).collect(),
            doc.cycle.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
    }
}

impl Serialize for EpSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EpSeqDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EpSeq {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = EpSeqDoc::deserialize(deserializer)?;
        EpSeq::try_from(doc).map_err(serde::de::Error::custom)
    }
}

pub type Rule = dyn Fn(usize) -> C64 + Send + Sync;

/// A sequence given by a rule, trusted only up to `horizon`. The bound is a
/// declaration about *all* indices and is spot-checked on the horizon.
#[derive(Clone)]
pub struct GenSeq {
    rule: Arc<Rule>,
    horizon: usize,
    bound: f64,
}

impl fmt::Debug for GenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenSeq {{ horizon: {}, bound: {} }}", self.horizon, self.bound)
    }
}

impl GenSeq {
    pub fn new(rule: impl Fn(usize) -> C64 + Send + Sync + 'static, horizon: usize, bound: f64) -> Self {
        GenSeq { rule: Arc::new(rule), horizon, bound }
    }

    pub fn from_arc(rule: Arc<Rule>, horizon: usize, bound: f64) -> Self {
        GenSeq { rule, horizon, bound }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn certified_bound(&self) -> f64 {
        self.bound
    }

    pub fn rule(&self) -> &Arc<Rule> {
        &self.rule
    }

    pub fn get(&self, n: usize) -> Result<C64, SeqError> {
        if n > self.horizon {
            return Err(SeqError::HorizonExceeded { lo: n, hi: n, horizon: self.horizon });
        }
        Ok((self.rule)(n))
    }

    /// Values at `lo..=hi`.
    pub fn window(&self, lo: usize, hi: usize) -> Result<Vec<C64>, SeqError> {
        if lo > hi {
            return Err(SeqError::InvalidWindow { lo, hi });
        }
        if hi > self.horizon {
            return Err(SeqError::HorizonExceeded { lo, hi, horizon: self.horizon });
        }
        Ok((lo..=hi).map(|n| (self.rule)(n)).collect())
    }

    /// Checks the declared bound on every index up to the horizon.
    pub fn bound_holds(&self) -> bool {
        (0..=self.horizon).all(|n| (self.rule)(n).norm() <= self.bound)
    }

    /// `max_{n <= horizon} |value(n)|`.
    pub fn sup_abs_horizon(&self) -> f64 {
        (0..=self.horizon).map(|n| (self.rule)(n).norm()).fold(0.0, f64::max)
    }

    pub fn inf_abs_horizon(&self) -> f64 {
        (0..=self.horizon).map(|n| (self.rule)(n).norm()).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn constants_multiply() {
        let a = EpSeq::from_real(&[], &[2.0]).unwrap();
        let b = EpSeq::from_real(&[], &[3.0]).unwrap();
        let p = a.zip(&b, |x, y| x * y).unwrap();
        assert_eq!(p, EpSeq::from_real(&[], &[6.0]).unwrap());
    }

    #[test]
    fn add_with_prefix() {
        let a = EpSeq::from_real(&[1.0], &[0.0, 1.0]).unwrap();
        let b = EpSeq::from_real(&[], &[1.0]).unwrap();
        let s = a.zip(&b, |x, y| x + y).unwrap();
        // oracle: direct indexing
        for n in 0..8 {
            assert_eq!(s.get(n), a.get(n) + b.get(n));
        }
        // [2 | (1, 2)] canonicalizes to the purely periodic (2, 1)
        assert!(s.prefix().is_empty());
        assert_eq!(s.cycle(), &[c(2.0), c(1.0)]);
        assert_eq!(s, EpSeq::from_real(&[2.0], &[1.0, 2.0]).unwrap());
    }

    #[test]
    fn period_two_times_period_three() {
        let a = EpSeq::from_real(&[], &[1.0, 0.0]).unwrap();
        let b = EpSeq::from_real(&[], &[0.0, 1.0, 0.0]).unwrap();
        let p = a.zip(&b, |x, y| x * y).unwrap();
        for n in 0..12 {
            assert_eq!(a.get(n) * b.get(n), p.get(n));
        }
        // n = 4 is even and 1 mod 3
        assert_eq!(p.cycle(), &[c(0.0), c(0.0), c(0.0), c(0.0), c(1.0), c(0.0)]);
        let q = a.zip(&EpSeq::from_real(&[], &[0.0, 1.0]).unwrap(), |x, y| x * y).unwrap();
        assert_eq!(q, EpSeq::zero());
    }

    #[test]
    fn canonical_form_absorbs_prefix_and_period() {
        let s = EpSeq::from_real(&[5.0, 1.0, 2.0], &[1.0, 2.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.prefix(), &[c(5.0)]);
        assert_eq!(s.cycle(), &[c(1.0), c(2.0)]);
        let t = EpSeq::from_real(&[2.0], &[1.0, 2.0]).unwrap();
        assert!(t.prefix().is_empty());
        assert_eq!(t.cycle(), &[c(2.0), c(1.0)]);
    }

    #[test]
    fn negative_zero_is_folded() {
        let s = EpSeq::new(vec![], vec![C64::new(-0.0, -0.0)]).unwrap();
        assert_eq!(s, EpSeq::zero());
        assert!(s.is_zero());
    }

    #[test]
    fn division_by_zero_reports_index() {
        let a = EpSeq::from_real(&[], &[1.0]).unwrap();
        let b = EpSeq::from_real(&[1.0, 2.0], &[3.0, 0.0]).unwrap();
        assert_eq!(a.zip(&b, |x, y| x / y), Err(SeqError::PointwiseDomain(3)));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(EpSeq::new(vec![], vec![]), Err(SeqError::EmptyCycle));
        assert_eq!(EpSeq::from_real(&[1.0, f64::NAN], &[1.0]), Err(SeqError::NonFinite(1)));
    }

    #[test]
    fn sup_inf() {
        let one = EpSeq::one();
        assert_eq!((one.sup_abs(), one.inf_abs()), (1.0, 1.0));
        let s = EpSeq::from_real(&[5.0], &[0.0, 2.0]).unwrap();
        let scan: Vec<f64> = (0..=10).map(|n| s.get(n).norm()).collect();
        assert_eq!(s.sup_abs(), scan.iter().cloned().fold(0.0, f64::max));
        assert_eq!(s.inf_abs(), scan.iter().cloned().fold(f64::INFINITY, f64::min));
        assert_eq!((s.sup_abs(), s.inf_abs()), (5.0, 0.0));
        let z = EpSeq::constant(C64::new(3.0, 4.0)).unwrap();
        assert_eq!((z.sup_abs(), z.inf_abs()), (5.0, 5.0));
    }

    #[test]
    fn json_shape() {
        let s = EpSeq::new(vec![C64::new(1.0, -2.0)], vec![c(0.5)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"prefix":[[1.0,-2.0]],"cycle":[[0.5,0.0]]}"#);
        let back: EpSeq = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<EpSeq>(r#"{"prefix":[],"cycle":[]}"#).is_err());
    }

    #[test]
    fn gen_windows() {
        let g = GenSeq::new(|n| C64::new(n as f64, 0.0), 20, 20.0);
        assert_eq!(g.window(0, 0).unwrap(), vec![c(0.0)]);
        assert_eq!(g.window(3, 5).unwrap(), vec![c(3.0), c(4.0), c(5.0)]);
        assert_eq!(g.window(5, 3), Err(SeqError::InvalidWindow { lo: 5, hi: 3 }));
        assert!(matches!(g.window(0, 21), Err(SeqError::HorizonExceeded { .. })));
        assert!(g.bound_holds());
        assert_eq!(g.sup_abs_horizon(), 20.0);
    }

    #[test]
    fn layout_positions() {
        let l = Layout::new(2, 3);
        assert_eq!(l.position_of(1), 1);
        assert_eq!(l.position_of(2), 2);
        assert_eq!(l.position_of(5), 2);
        assert_eq!(l.position_of(7), 4);
        let m = l.merge(Layout::new(4, 2)).unwrap();
        assert_eq!(m, Layout::new(4, 6));
    }
}
