//! Elements of the weighted Hadamard algebra and the scalar criteria.
//!
//! Everything works in normalized coordinates `u(n) = p(n) * f^(n)`. In these
//! coordinates the weighted Hadamard product is the pointwise product, the unit
//! is the all-ones sequence and the norm is `sup |u|`. Raw Taylor coefficients
//! only show up in [`Element::from_raw_prefix`], [`Element::raw_coefficient`]
//! and [`Element::eval_at`].

use std::f64::consts::PI;
use std::sync::Arc;

use crate::coeffseq::{common_layout, EpSeq, GenSeq, Layout};
use crate::error::{Error, Result};
use crate::weights::Weight;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Whether a numeric answer is exact or was checked only up to a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    Exact,
    /// Checked on indices `0..=horizon` only; advisory.
    Horizon(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    pub certainty: Certainty,
}

impl<T> Certified<T> {
    pub fn exact(value: T) -> Self {
        Certified { value, certainty: Certainty::Exact }
    }

    pub fn is_exact(&self) -> bool {
        self.certainty == Certainty::Exact
    }
}

#[derive(Debug, Clone)]
pub enum Coeffs {
    Periodic(EpSeq),
    Generated(GenSeq),
}

/// An element of the algebra: a weight and normalized coefficients.
#[derive(Debug, Clone)]
pub struct Element {
    weight: Weight,
    coeffs: Coeffs,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Periodic(a), Coeffs::Periodic(b)) => self.weight == other.weight && a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: C64,
    /// Certified bound on `|value - f(z)|` from truncation.
    pub error_bound: f64,
    /// Highest index included in the partial sum.
    pub last_index: usize,
}

#[derive(Debug, Clone)]
pub struct Inverse {
    /// `inf_n |u(n)|`
    pub delta: f64,
    pub inverse: Element,
}

#[derive(Debug, Clone)]
pub struct Quotient {
    /// Least `C` with `|u_f| <= C |u_g|` everywhere.
    pub constant: f64,
    pub quotient: Element,
}

#[derive(Debug, Clone)]
pub struct IdealMembership {
    /// Least `C` with `|u_f| <= C * sum_k |u_{g_k}|` everywhere.
    pub constant: f64,
    pub coefficients: Vec<Element>,
}

#[derive(Debug, Clone)]
pub struct CoronaSolution {
    /// `inf_n sum_i |u_{f_i}(n)|`
    pub delta: f64,
    /// `inf_n (sum_i |u_{f_i}(n)|^2)^(1/2)`; every `||g_i|| <= 1 / delta_euclid`.
    pub delta_euclid: f64,
    pub solutions: Vec<Element>,
}

#[derive(Debug, Clone)]
pub struct BassReduction {
    pub h: Element,
    /// `f1 + h * f2`, invertible.
    pub witness: Element,
    /// `inf |u_witness|`
    pub delta: f64,
}

fn same_weight(a: &Element, b: &Element) -> Result<()> {
    if a.weight != b.weight {
        return Err(Error::WeightMismatch(a.weight.name().into(), b.weight.name().into()));
    }
    Ok(())
}

fn check_weights(items: &[&Element]) -> Result<()> {
    if let Some(first) = items.first() {
        for e in &items[1..] {
            same_weight(first, e)?;
        }
    }
    Ok(())
}

/// Common layout of a list of periodic elements.
pub(crate) fn layout_of(items: &[&Element]) -> Result<Layout> {
    let seqs = items.iter().map(|e| e.u()).collect::<Result<Vec<_>>>()?;
    Ok(common_layout(seqs)?)
}

impl Element {
    pub fn from_normalized(weight: Weight, u: EpSeq) -> Self {
        Element { weight, coeffs: Coeffs::Periodic(u) }
    }

    pub fn from_generated(weight: Weight, g: GenSeq) -> Self {
        Element { weight, coeffs: Coeffs::Generated(g) }
    }

    /// Element with normalized values `values` on `layout`.
    pub fn from_samples(weight: Weight, layout: Layout, values: Vec<C64>) -> Result<Self> {
        Ok(Element::from_normalized(weight, EpSeq::from_samples(layout, values)?))
    }

    /// Polynomial with the given raw Taylor coefficients, zero afterwards.
    pub fn from_raw_prefix(weight: Weight, raw: &[C64]) -> Result<Self> {
        let mut prefix = Vec::with_capacity(raw.len());
        for (n, &a) in raw.iter().enumerate() {
            if a == ZERO {
                prefix.push(ZERO);
                continue;
            }
            let v = match weight.p_eval(n) {
                Ok(p) => a * p,
                Err(_) => a * weight.log_p(n).exp(),
            };
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(crate::error::WeightError::OverflowAtIndex(n).into());
            }
            prefix.push(v);
        }
        Ok(Element::from_normalized(weight, EpSeq::new(prefix, vec![ZERO])?))
    }

    /// `c * z^m`.
    pub fn monomial(weight: Weight, m: usize, c: C64) -> Result<Self> {
        let mut raw = vec![ZERO; m + 1];
        raw[m] = c;
        Element::from_raw_prefix(weight, &raw)
    }

    /// The identity `eps` with `u == 1`. For the factorial weight this is `exp z`.
    pub fn unit(weight: Weight) -> Self {
        Element::from_normalized(weight, EpSeq::one())
    }

    pub fn zero(weight: Weight) -> Self {
        Element::from_normalized(weight, EpSeq::zero())
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.coeffs, Coeffs::Periodic(_))
    }

    /// Normalized coefficients, for periodic elements.
    pub fn u(&self) -> Result<&EpSeq> {
        match &self.coeffs {
            Coeffs::Periodic(s) => Ok(s),
            Coeffs::Generated(_) => Err(Error::HorizonCertifiedOnly),
        }
    }

    /// `u(n)`; generated elements fail past their horizon.
    pub fn normalized_at(&self, n: usize) -> Result<C64> {
        match &self.coeffs {
            Coeffs::Periodic(s) => Ok(s.get(n)),
            Coeffs::Generated(g) => Ok(g.get(n)?),
        }
    }

    /// Raw Taylor coefficient `f^(n) = u(n) / p(n)`.
    pub fn raw_coefficient(&self, n: usize) -> Result<C64> {
        let u = self.normalized_at(n)?;
        Ok(u * (-self.weight.log_p(n)).exp())
    }

    fn horizon(&self) -> Option<usize> {
        match &self.coeffs {
            Coeffs::Periodic(_) => None,
            Coeffs::Generated(g) => Some(g.horizon()),
        }
    }

    fn rule(&self) -> Arc<dyn Fn(usize) -> C64 + Send + Sync> {
        match &self.coeffs {
            Coeffs::Periodic(s) => {
                let s = s.clone();
                Arc::new(move |n| s.get(n))
            }
            Coeffs::Generated(g) => g.rule().clone(),
        }
    }

    fn declared_bound(&self) -> f64 {
        match &self.coeffs {
            Coeffs::Periodic(s) => s.sup_abs(),
            Coeffs::Generated(g) => g.certified_bound(),
        }
    }

    /// Pointwise combination; falls back to a generated element when either
    /// side is horizon-limited.
    fn combine(
        &self,
        other: &Element,
        op: impl Fn(C64, C64) -> C64 + Send + Sync + 'static,
        bound: impl Fn(f64, f64) -> f64,
    ) -> Result<Element> {
        same_weight(self, other)?;
        match (&self.coeffs, &other.coeffs) {
            (Coeffs::Periodic(a), Coeffs::Periodic(b)) => {
                Ok(Element::from_normalized(self.weight.clone(), a.zip(b, op)?))
            }
            _ => {
                let horizon = match (self.horizon(), other.horizon()) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!(),
                };
                let (ra, rb) = (self.rule(), other.rule());
                let b = bound(self.declared_bound(), other.declared_bound());
                let g = GenSeq::new(move |n| op(ra(n), rb(n)), horizon, b);
                Ok(Element::from_generated(self.weight.clone(), g))
            }
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.combine(other, |a, b| a + b, |x, y| x + y)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.combine(other, |a, b| a - b, |x, y| x + y)
    }

    /// Weighted Hadamard product: pointwise product of normalized coefficients.
    pub fn star(&self, other: &Element) -> Result<Element> {
        self.combine(other, |a, b| a * b, |x, y| x * y)
    }

    pub fn scalar_mul(&self, c: C64) -> Result<Element> {
        match &self.coeffs {
            Coeffs::Periodic(s) => Ok(Element::from_normalized(self.weight.clone(), s.map(|x| c * x)?)),
            Coeffs::Generated(g) => {
                let r = g.rule().clone();
                let b = g.certified_bound() * c.norm();
                Ok(Element::from_generated(
                    self.weight.clone(),
                    GenSeq::new(move |n| c * r(n), g.horizon(), b),
                ))
            }
        }
    }

    pub fn neg(&self) -> Result<Element> {
        self.scalar_mul(C64::new(-1.0, 0.0))
    }

    /// Apply a pointwise map to a periodic element.
    pub fn map(&self, op: impl Fn(C64) -> C64) -> Result<Element> {
        Ok(Element::from_normalized(self.weight.clone(), self.u()?.map(op)?))
    }

    /// `||f|| = sup_n |u(n)|`. Exact for periodic elements, horizon-certified otherwise.
    pub fn norm(&self) -> Certified<f64> {
        match &self.coeffs {
            Coeffs::Periodic(s) => Certified::exact(s.sup_abs()),
            Coeffs::Generated(g) => Certified {
                value: g.sup_abs_horizon(),
                certainty: Certainty::Horizon(g.horizon()),
            },
        }
    }

    /// Evaluates the entire function at `z` with a certified truncation error `<= tol`.
    ///
    /// The partial sum stops at the first `N` for which the weight certifies
    /// `sup|u| * sum_{n>N} |z|^n / p(n) <= tol`. Generated elements use their
    /// declared bound and must reach that `N` within their horizon.
    pub fn eval_at(&self, z: C64, tol: f64) -> Result<Evaluation> {
        if !(tol > 0.0) {
            return Err(Error::PreconditionFailed("tol must be positive".into()));
        }
        let sup = self.declared_bound();
        let r = z.norm();
        let limit = self.horizon().unwrap_or(1 << 20);
        let mut big_n = 0usize;
        let error_bound = loop {
            if sup == 0.0 {
                break 0.0;
            }
            if let Ok(t) = self.weight.tail_bound(big_n, r) {
                if sup * t <= tol {
                    break sup * t;
                }
            }
            big_n += 1;
            if big_n > limit {
                return match self.horizon() {
                    Some(_) => Err(Error::HorizonCertifiedOnly),
                    None => Err(crate::error::WeightError::BoundUnavailable { n: big_n, r }.into()),
                };
            }
        };
        let (log_r, arg) = (r.ln(), z.arg());
        let mut value = ZERO;
        for n in 0..=big_n {
            let u = self.normalized_at(n)?;
            if u == ZERO {
                continue;
            }
            let term = if n == 0 {
                u * (-self.weight.log_p(0)).exp()
            } else if r == 0.0 {
                continue;
            } else {
                let mag = (n as f64 * log_r - self.weight.log_p(n)).exp();
                u * C64::from_polar(mag, n as f64 * arg)
            };
            value += term;
        }
        Ok(Evaluation { value, error_bound, last_index: big_n })
    }

    /// `f` is invertible iff `inf |u| > 0`. Generated elements are refused.
    pub fn invertible(&self) -> Result<Option<Inverse>> {
        let u = self.u()?;
        let delta = u.inf_abs();
        if delta > 0.0 {
            let inverse = self.map(|x| ONE / x)?;
            Ok(Some(Inverse { delta, inverse }))
        } else {
            Ok(None)
        }
    }

    /// Like [`Element::invertible`] but reports the first vanishing index.
    pub fn inverse(&self) -> Result<Inverse> {
        match self.invertible()? {
            Some(inv) => Ok(inv),
            None => {
                let idx = self.u()?.find_index(|x| x == ZERO).unwrap_or(0);
                Err(Error::NotInvertible(idx))
            }
        }
    }

    /// `g` divides `f` iff `|u_f| <= C |u_g|` for some `C`. Returns the
    /// least such `C` and `h` with `g * h = f`.
    pub fn divide(&self, divisor: &Element) -> Result<Quotient> {
        same_weight(self, divisor)?;
        let layout = layout_of(&[self, divisor])?;
        let (f, g) = (self.u()?, divisor.u()?);
        let mut constant = 0.0f64;
        let mut values = Vec::with_capacity(layout.len());
        for n in 0..layout.len() {
            let (a, b) = (f.get(n), g.get(n));
            if b == ZERO {
                if a != ZERO {
                    return Err(Error::NotDivisible(n));
                }
                values.push(ZERO);
            } else {
                constant = constant.max(a.norm() / b.norm());
                values.push(a / b);
            }
        }
        let quotient = Element::from_samples(self.weight.clone(), layout, values)?;
        Ok(Quotient { constant, quotient })
    }

    /// Membership of `f` in the ideal generated by `gens`.
    pub fn in_ideal(&self, gens: &[Element]) -> Result<IdealMembership> {
        if gens.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut all: Vec<&Element> = vec![self];
        all.extend(gens.iter());
        check_weights(&all)?;
        let layout = layout_of(&all)?;
        let f = self.u()?;
        let gs = gens.iter().map(|g| g.u()).collect::<Result<Vec<_>>>()?;
        let mut constant = 0.0f64;
        let mut columns = vec![Vec::with_capacity(layout.len()); gens.len()];
        for n in 0..layout.len() {
            let a = f.get(n);
            let vals: Vec<C64> = gs.iter().map(|g| g.get(n)).collect();
            let sum_abs: f64 = vals.iter().map(|v| v.norm()).sum();
            let sum_sq: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
            if sum_abs == 0.0 {
                if a != ZERO {
                    return Err(Error::NotInIdeal(n));
                }
                columns.iter_mut().for_each(|c| c.push(ZERO));
                continue;
            }
            constant = constant.max(a.norm() / sum_abs);
            for (col, v) in columns.iter_mut().zip(&vals) {
                col.push(a * v.conj() / sum_sq);
            }
        }
        let coefficients = columns
            .into_iter()
            .map(|vals| Element::from_samples(self.weight.clone(), layout, vals))
            .collect::<Result<Vec<_>>>()?;
        Ok(IdealMembership { constant, coefficients })
    }

    /// Uniform approximation by an invertible element: values with
    /// `|u| <= eps` are replaced by `eps`. The result has `inf |u| >= eps`
    /// and lies within `2 eps` of `self`.
    pub fn approx_invertible(&self, eps: f64) -> Result<Element> {
        if !(eps > 0.0) {
            return Err(Error::PreconditionFailed("eps must be positive".into()));
        }
        let e = C64::new(eps, 0.0);
        self.map(|x| if x.norm() > eps { x } else { e })
    }

    /// `u(n) in {0, 1}` for every `n`.
    pub fn is_idempotent(&self) -> Result<bool> {
        Ok(self.u()?.distinct_positions().all(|x| x == ZERO || x == ONE))
    }

    /// `exp(f)`: pointwise exponential of normalized coefficients.
    pub fn exp_el(&self) -> Result<Element> {
        self.map(|x| x.exp())
    }

    /// Principal logarithm of an invertible element: `u_f = Log(u_g)` with
    /// imaginary part in `(-pi, pi]`.
    pub fn log_el(&self) -> Result<Element> {
        self.inverse()?;
        self.map(|x| x.ln())
    }
}

/// Upper bound `sqrt(max(|ln delta|, |ln ||g|||)^2 + pi^2)` on `||log g||`.
pub fn log_norm_bound(delta: f64, norm: f64) -> f64 {
    let m = delta.ln().abs().max(norm.ln().abs());
    (m * m + PI * PI).sqrt()
}

/// Greatest common divisor with `u_d(n) = max_k |u_{f_k}(n)|`.
pub fn gcd(fs: &[Element]) -> Result<Element> {
    let first = fs.first().ok_or(Error::EmptyInput)?;
    let refs: Vec<&Element> = fs.iter().collect();
    check_weights(&refs)?;
    let seqs = fs.iter().map(|f| f.u()).collect::<Result<Vec<_>>>()?;
    let d = EpSeq::zip_many(&seqs, |vals| {
        C64::new(vals.iter().map(|v| v.norm()).fold(0.0, f64::max), 0.0)
    })?;
    Ok(Element::from_normalized(first.weight.clone(), d))
}

/// Solves `sum_i g_i * f_i = eps` under the corona condition
/// `inf_n sum_i |u_{f_i}(n)| > 0`, with `u_{g_i} = conj(u_{f_i}) / sum_j |u_{f_j}|^2`.
pub fn corona_solve(fs: &[Element]) -> Result<CoronaSolution> {
    let first = fs.first().ok_or(Error::EmptyInput)?;
    let refs: Vec<&Element> = fs.iter().collect();
    check_weights(&refs)?;
    let layout = layout_of(&refs)?;
    let seqs = fs.iter().map(|f| f.u()).collect::<Result<Vec<_>>>()?;
    let mut delta = f64::INFINITY;
    let mut delta_sq = f64::INFINITY;
    let mut columns = vec![Vec::with_capacity(layout.len()); fs.len()];
    for n in 0..layout.len() {
        let vals: Vec<C64> = seqs.iter().map(|s| s.get(n)).collect();
        let sum_abs: f64 = vals.iter().map(|v| v.norm()).sum();
        let sum_sq: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
        if sum_abs == 0.0 {
            return Err(Error::CoronaFails(n));
        }
        delta = delta.min(sum_abs);
        delta_sq = delta_sq.min(sum_sq);
        for (col, v) in columns.iter_mut().zip(&vals) {
            col.push(v.conj() / sum_sq);
        }
    }
    let solutions = columns
        .into_iter()
        .map(|vals| Element::from_samples(first.weight.clone(), layout, vals))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoronaSolution { delta, delta_euclid: delta_sq.sqrt(), solutions })
}

/// Idempotent with `u = mask`; mask values must be exactly 0 or 1.
pub fn idempotent_from_mask(weight: Weight, mask: EpSeq) -> Result<Element> {
    if let Some(i) = mask.find_index(|x| x != ZERO && x != ONE) {
        return Err(Error::BadMask(i));
    }
    Ok(Element::from_normalized(weight, mask))
}

/// Default threshold used by [`bass_reduce`].
pub const BASS_EPSILON: f64 = 0.25;

/// Tolerance on `sup |u_{g1 f1 + g2 f2} - 1|` accepted as a Bezout identity.
pub const BEZOUT_TOL: f64 = 1e-12;

/// Given `g1 * f1 + g2 * f2 = eps`, finds `h` with `f1 + h * f2` invertible.
///
/// `u = 1 + |u_{f1}|`, `F1 = f1 / u`, `G1 = g1 * u`, `H1` thresholds `G1` at
/// `threshold`, and `h = u * g2 / H1`. Then
/// `f1 + h f2 = (u / H1) * (eps + (H1 - G1) F1)` with `||(H1 - G1) F1|| <= 2 threshold < 1`.
pub fn bass_reduce(f1: &Element, f2: &Element, g1: &Element, g2: &Element) -> Result<BassReduction> {
    bass_reduce_with(f1, f2, g1, g2, BASS_EPSILON)
}

pub fn bass_reduce_with(
    f1: &Element,
    f2: &Element,
    g1: &Element,
    g2: &Element,
    threshold: f64,
) -> Result<BassReduction> {
    if !(threshold > 0.0 && threshold < 0.5) {
        return Err(Error::PreconditionFailed("threshold must lie in (0, 1/2)".into()));
    }
    check_weights(&[f1, f2, g1, g2])?;
    let layout = layout_of(&[f1, f2, g1, g2])?;
    let (a1, a2, b1, b2) = (f1.u()?, f2.u()?, g1.u()?, g2.u()?);
    let mut h_vals = Vec::with_capacity(layout.len());
    let mut w_vals = Vec::with_capacity(layout.len());
    for n in 0..layout.len() {
        let (x1, x2, y1, y2) = (a1.get(n), a2.get(n), b1.get(n), b2.get(n));
        let bezout = y1 * x1 + y2 * x2;
        if (bezout - ONE).norm() > BEZOUT_TOL {
            return Err(Error::PreconditionFailed(format!(
                "g1*f1 + g2*f2 differs from the unit at index {n}"
            )));
        }
        let u = 1.0 + x1.norm();
        let big_g = y1 * u;
        let big_h = if big_g.norm() > threshold { big_g } else { C64::new(threshold, 0.0) };
        let h = y2 * u / big_h;
        h_vals.push(h);
        w_vals.push(x1 + h * x2);
    }
    let h = Element::from_samples(f1.weight.clone(), layout, h_vals)?;
    let witness = Element::from_samples(f1.weight.clone(), layout, w_vals)?;
    let delta = witness.u()?.inf_abs();
    if !(delta > 0.0) {
        return Err(Error::Numerical("reduction witness is not invertible".into()));
    }
    Ok(BassReduction { h, witness, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fw() -> Weight {
        Weight::factorial()
    }

    fn el(prefix: &[f64], cycle: &[f64]) -> Element {
        Element::from_normalized(fw(), EpSeq::from_real(prefix, cycle).unwrap())
    }

    fn elc(cycle: &[C64]) -> Element {
        Element::from_normalized(fw(), EpSeq::new(vec![], cycle.to_vec()).unwrap())
    }

    #[test]
    fn unit_is_identity_and_exp() {
        let e = Element::unit(fw());
        let f = el(&[3.0, -1.0], &[2.0, 0.5]);
        assert_eq!(e.star(&f).unwrap(), f);
        assert_eq!(e.norm().value, 1.0);
        // eps(z) = exp z for factorial weight
        let v = e.eval_at(C64::new(1.0, 0.0), 1e-12).unwrap();
        assert!((v.value.re - std::f64::consts::E).abs() <= 1e-12);
        assert!(v.error_bound <= 1e-12);
        let w = e.eval_at(C64::new(0.3, -1.2), 1e-13).unwrap();
        assert!((w.value - C64::new(0.3, -1.2).exp()).norm() <= 1e-12);
    }

    #[test]
    fn z_star_z_squared_vanishes() {
        let z = Element::monomial(fw(), 1, ONE).unwrap();
        let z2 = Element::monomial(fw(), 2, ONE).unwrap();
        assert_eq!(z.u().unwrap().prefix(), &[ZERO, ONE]);
        assert_eq!(z2.u().unwrap().prefix(), &[ZERO, ZERO, C64::new(2.0, 0.0)]);
        assert!(z.star(&z2).unwrap().u().unwrap().is_zero());
    }

    #[test]
    fn norm_examples() {
        let f = el(&[5.0], &[0.0, 2.0]);
        assert_eq!(f.norm().value, 5.0);
        let c = C64::new(0.6, -0.8);
        assert_eq!(f.scalar_mul(c).unwrap().norm().value, 5.0 * c.norm());
    }

    #[test]
    fn eval_cosh_and_zero() {
        let f = el(&[], &[1.0, 0.0]);
        let v = f.eval_at(ONE, 1e-12).unwrap();
        let oracle: f64 = (0..25).map(|m| 1.0 / (1..=2 * m).map(|k| k as f64).product::<f64>()).sum();
        assert!((v.value.re - oracle).abs() <= 1e-12);
        assert!((oracle - 1f64.cosh()).abs() < 1e-15);
        let zero = Element::zero(fw());
        assert_eq!(zero.eval_at(C64::new(7.0, 1.0), 1e-9).unwrap().value, ZERO);
    }

    #[test]
    fn eval_respects_generated_horizon() {
        let g = GenSeq::new(|_| ONE, 10, 1.0);
        let f = Element::from_generated(fw(), g);
        assert!(f.eval_at(ONE, 1e-3).is_ok());
        assert_eq!(f.eval_at(ONE, 1e-14).unwrap_err(), Error::HorizonCertifiedOnly);
    }

    #[test]
    fn invertible_examples() {
        let e = Element::unit(fw());
        let inv = e.invertible().unwrap().unwrap();
        assert_eq!(inv.delta, 1.0);
        assert_eq!(inv.inverse, e);

        let f = elc(&[C64::new(2.0, 0.0), C64::new(0.0, 4.0)]);
        let inv = f.invertible().unwrap().unwrap();
        assert_eq!(inv.delta, 2.0);
        assert_eq!(inv.inverse, elc(&[C64::new(0.5, 0.0), C64::new(0.0, -0.25)]));
        assert_eq!(f.star(&inv.inverse).unwrap(), e);

        assert!(el(&[1.0], &[0.0]).invertible().unwrap().is_none());
        assert_eq!(el(&[1.0], &[0.0]).inverse().unwrap_err(), Error::NotInvertible(1));

        let g = Element::from_generated(fw(), GenSeq::new(|_| ONE, 5, 1.0));
        assert_eq!(g.invertible().unwrap_err(), Error::HorizonCertifiedOnly);
    }

    #[test]
    fn divide_examples() {
        let f = el(&[4.0, -2.0], &[1.0, 3.0]);
        let q = f.divide(&Element::unit(fw())).unwrap();
        assert_eq!(q.constant, f.norm().value);
        assert_eq!(q.quotient, f);

        let f = el(&[], &[1.0, 0.0]);
        let g = el(&[], &[2.0, 0.0]);
        let q = f.divide(&g).unwrap();
        assert_eq!(q.constant, 0.5);
        assert_eq!(q.quotient, el(&[], &[0.5, 0.0]));
        assert_eq!(g.star(&q.quotient).unwrap(), f);

        let err = el(&[], &[1.0]).divide(&el(&[], &[1.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::NotDivisible(1));
    }

    #[test]
    fn weight_mismatch() {
        let a = Element::unit(fw());
        let b = Element::unit(Weight::super_exp(2.0, 2.0).unwrap());
        assert!(matches!(a.star(&b), Err(Error::WeightMismatch(..))));
    }

    #[test]
    fn gcd_examples() {
        let f = elc(&[C64::new(3.0, 4.0), C64::new(-1.0, 0.0)]);
        assert_eq!(gcd(std::slice::from_ref(&f)).unwrap(), el(&[], &[5.0, 1.0]));
        let d = gcd(&[el(&[], &[1.0, 0.0]), el(&[], &[0.0, 2.0])]).unwrap();
        assert_eq!(d, el(&[], &[1.0, 2.0]));
        el(&[], &[1.0, 0.0]).divide(&d).unwrap();
        el(&[], &[0.0, 2.0]).divide(&d).unwrap();
        assert!(gcd(&[Element::zero(fw()), Element::zero(fw())]).unwrap().u().unwrap().is_zero());
        assert_eq!(gcd(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn ideal_examples() {
        let f = el(&[2.0], &[1.0, -3.0]);
        let m = f.in_ideal(&[Element::unit(fw())]).unwrap();
        assert_eq!(m.constant, f.norm().value);
        assert_eq!(m.coefficients, vec![f.clone()]);

        let f = el(&[], &[1.0, 1.0]);
        let gens = [el(&[], &[2.0, 0.0]), el(&[], &[0.0, 3.0])];
        let m = f.in_ideal(&gens).unwrap();
        assert_eq!(m.constant, 0.5);
        let mut acc = Element::zero(fw());
        for (h, g) in m.coefficients.iter().zip(&gens) {
            acc = acc.add(&h.star(g).unwrap()).unwrap();
        }
        let residual = acc.sub(&f).unwrap();
        assert!(residual.norm().value <= 4.0 * f64::EPSILON);

        let err = el(&[], &[1.0]).in_ideal(&[el(&[], &[1.0, 0.0])]).unwrap_err();
        assert_eq!(err, Error::NotInIdeal(1));
    }

    #[test]
    fn corona_examples() {
        let e = Element::unit(fw());
        let s = corona_solve(std::slice::from_ref(&e)).unwrap();
        assert_eq!(s.delta, 1.0);
        assert_eq!(s.solutions, vec![e.clone()]);

        let fs = [el(&[], &[1.0, 0.0]), el(&[], &[0.0, 1.0])];
        let s = corona_solve(&fs).unwrap();
        assert_eq!(s.delta, 1.0);
        let sum = s.solutions[0].star(&fs[0]).unwrap().add(&s.solutions[1].star(&fs[1]).unwrap()).unwrap();
        assert_eq!(sum, e);

        let z = Element::monomial(fw(), 1, ONE).unwrap();
        assert_eq!(corona_solve(&[z]).unwrap_err(), Error::CoronaFails(0));
    }

    #[test]
    fn corona_norm_bound_is_euclidean() {
        // sum-of-moduli delta is 1.1 here, but ||g_1|| = 1/1.01 > 1/1.1
        let fs = [el(&[], &[1.0]), el(&[], &[0.1])];
        let s = corona_solve(&fs).unwrap();
        assert!((s.delta - 1.1).abs() < 1e-15);
        for g in &s.solutions {
            assert!(g.norm().value <= 1.0 / s.delta_euclid * (1.0 + 1e-15));
            assert!(g.norm().value <= 2f64.sqrt() / s.delta);
        }
    }

    #[test]
    fn approx_invertible_examples() {
        let f = el(&[], &[2.0, -1.5]);
        assert_eq!(f.approx_invertible(0.5).unwrap(), f);

        let f = el(&[], &[2.0, 0.0]);
        let g = f.approx_invertible(0.25).unwrap();
        assert_eq!(g, el(&[], &[2.0, 0.25]));
        assert_eq!(g.sub(&f).unwrap().norm().value, 0.25);

        let z = Element::zero(fw());
        let g = z.approx_invertible(1.0).unwrap();
        assert_eq!(g, Element::unit(fw()));
        assert_eq!(g.sub(&z).unwrap().norm().value, 1.0);
    }

    #[test]
    fn bass_examples() {
        let e = Element::unit(fw());
        let z = Element::zero(fw());
        let r = bass_reduce(&e, &z, &e, &z).unwrap();
        assert!(r.witness.invertible().unwrap().is_some());

        let f1 = el(&[], &[1.0, 0.0]);
        let f2 = el(&[], &[0.0, 1.0]);
        let r = bass_reduce(&f1, &f2, &f1, &f2).unwrap();
        assert!(r.delta > 0.0);
        assert_eq!(r.witness.add(&z).unwrap(), f1.add(&r.h.star(&f2).unwrap()).unwrap());

        let err = bass_reduce(&f1, &f2, &f1, &z).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(_)));
        assert!(bass_reduce_with(&e, &z, &e, &z, 0.5).is_err());
    }

    #[test]
    fn idempotents() {
        assert!(Element::unit(fw()).is_idempotent().unwrap());
        let p = idempotent_from_mask(fw(), EpSeq::from_real(&[], &[1.0, 0.0]).unwrap()).unwrap();
        assert!(p.is_idempotent().unwrap());
        assert_eq!(p.star(&p).unwrap(), p);
        // P = sum z^(2m) / p(2m) = cosh for the factorial weight
        assert!((p.eval_at(ONE, 1e-13).unwrap().value.re - 1f64.cosh()).abs() < 1e-12);
        assert!(!el(&[], &[0.5]).is_idempotent().unwrap());
        assert_eq!(
            idempotent_from_mask(fw(), EpSeq::from_real(&[1.0], &[0.5]).unwrap()).unwrap_err(),
            Error::BadMask(1)
        );
    }

    #[test]
    fn exp_log_examples() {
        let z = Element::zero(fw());
        assert_eq!(z.exp_el().unwrap(), Element::unit(fw()));
        let e1 = el(&[], &[1.0]).exp_el().unwrap();
        assert_eq!(e1, el(&[], &[std::f64::consts::E]));
        assert_eq!(Element::unit(fw()).log_el().unwrap(), z);
        let g = el(&[], &[std::f64::consts::E, 1.0]);
        let l = g.log_el().unwrap();
        assert_eq!(l, el(&[], &[1.0, 0.0]));
        assert_eq!(el(&[], &[1.0, 0.0]).log_el().unwrap_err(), Error::NotInvertible(1));
        // principal branch on the negative axis
        let m = el(&[], &[-1.0]).log_el().unwrap();
        assert_eq!(m.u().unwrap().get(0), C64::new(0.0, PI));
    }

    #[test]
    fn exp_matches_series() {
        let f = elc(&[C64::new(0.7, -1.1), C64::new(-1.3, 0.4), C64::new(0.0, 1.9)]);
        let mut term = Element::unit(fw());
        let mut sum = Element::unit(fw());
        for m in 1..=20 {
            term = term.star(&f).unwrap().scalar_mul(C64::new(1.0 / m as f64, 0.0)).unwrap();
            sum = sum.add(&term).unwrap();
        }
        let diff = sum.sub(&f.exp_el().unwrap()).unwrap();
        assert!(diff.norm().value <= 1e-10);
    }

    #[test]
    fn raw_round_trip() {
        let raw = [C64::new(1.0, 0.0), C64::new(0.5, -1.0), ZERO, C64::new(0.25, 0.0)];
        let f = Element::from_raw_prefix(fw(), &raw).unwrap();
        for (n, a) in raw.iter().enumerate() {
            assert!((f.raw_coefficient(n).unwrap() - a).norm() < 1e-15);
        }
        assert_eq!(f.raw_coefficient(10).unwrap(), ZERO);
    }
}
