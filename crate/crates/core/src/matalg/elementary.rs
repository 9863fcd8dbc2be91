//! Factorization of determinant-one matrices into elementary matrices.
//!
//! The matrix is joined to the identity by the path
//! `gamma(t) = exp((1-t) B) diag(c(t), 1, ..., 1)` with `B = log A` and
//! `c(t) = exp(-(1-t) tr B)`, so `gamma(0) = A`, `gamma(1) = I` and every
//! `gamma(t)` has determinant one. Splitting `[0, 1]` at `t_0 < ... < t_N`
//! gives `A = M_0 M_1 ... M_{N-1}` with `M_i = gamma(t_i) gamma(t_{i+1})^-1`,
//! each close to `I`. A near-identity step is split as `L D U` without
//! pivoting and the diagonal part is rewritten with
//! `diag(a, 1/a) = W(a) W(-1)`, `W(a) = E12(a) E21(-1/a) E12(a)`.

use super::functions::log_view;
use super::{MatElement, UView};
use crate::algebra::Element;
use crate::coeffseq::Layout;
use crate::dense::{expm, spectral_norm, CMat};
use crate::error::{Error, Result};
use crate::C64;

/// `I + alpha * e_ij` with `i != j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryFactor {
    pub i: usize,
    pub j: usize,
    pub alpha: Element,
}

impl ElementaryFactor {
    pub fn to_matrix(&self, n: usize) -> Result<MatElement> {
        if self.i == self.j || self.i >= n || self.j >= n {
            return Err(Error::DimensionMismatch(format!("elementary ({}, {}) in dimension {n}", self.i, self.j)));
        }
        let w = self.alpha.weight().clone();
        let mut entries = MatElement::identity(w.clone(), n).entries;
        entries[self.i * n + self.j] = self.alpha.clone();
        MatElement::new(w, n, n, entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlOptions {
    /// Bound on `sup_k ||U_M(k) - I||_2` for every path step.
    pub step_norm: f64,
    /// Allowed per-position error of the reconstructed product.
    pub tol: f64,
}

impl Default for SlOptions {
    fn default() -> Self {
        SlOptions { step_norm: 0.5, tol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct SlFactorization {
    /// Ordered so that the product of the factors is `A`.
    pub factors: Vec<ElementaryFactor>,
    /// Number of path steps (0 when no path was needed).
    pub steps: usize,
    /// `max_k ||prod U_F(k) - U_A(k)||_2`.
    pub max_error: f64,
}

/// Bisection depth limit, so at most `2^20` path steps.
pub const MAX_DEPTH: u32 = 20;

pub fn sl_factor(a: &MatElement, step_norm: f64, tol: f64) -> Result<SlFactorization> {
    sl_factor_with(a, &SlOptions { step_norm, tol })
}

/// Factor at one position, before values are collected across positions.
#[derive(Clone, Copy)]
struct Raw {
    i: usize,
    j: usize,
    alpha: C64,
    /// First of a six-factor block `W(c) W(-1)`; `alpha` is `c`.
    block: bool,
}

impl Raw {
    fn new(i: usize, j: usize, alpha: C64) -> Self {
        Raw { i, j, alpha, block: false }
    }
}

pub fn sl_factor_with(a: &MatElement, opts: &SlOptions) -> Result<SlFactorization> {
    if !(opts.step_norm > 0.0 && opts.step_norm < 1.0) {
        return Err(Error::PreconditionFailed(format!("step_norm {} not in (0, 1)", opts.step_norm)));
    }
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!("sl_factor of {:?}", a.shape())));
    }
    let n = a.rows();
    a.gl_bound()?;
    let view = a.u_view()?;
    for (position, m) in view.mats.iter().enumerate() {
        let deviation = (m.determinant() - C64::new(1.0, 0.0)).norm();
        if !(deviation <= opts.tol) {
            return Err(Error::NotSL { position, deviation });
        }
    }

    let id = CMat::identity(n, n);
    let is_identity = view.mats.iter().all(|m| *m == id);
    let (per_position, steps) = if n <= 1 || is_identity {
        (vec![Vec::new(); view.mats.len()], 0)
    } else if let Some((i, j)) = single_elementary(&view) {
        (view.mats.iter().map(|m| vec![Raw::new(i, j, m[(i, j)])]).collect(), 0)
    } else if view.mats.iter().all(|m| m.is_diagonal_like()) {
        (view.mats.iter().map(|m| diagonal_factors(&m.diagonal().iter().copied().collect::<Vec<_>>())).collect(), 0)
    } else {
        path_factors(&view, opts.step_norm)?
    };

    let factors = collect(a, view.layout, &per_position)?;
    let max_error = reconstruction_error(&view, &per_position);
    if !(max_error <= opts.tol) {
        return Err(Error::Numerical(format!("factor product misses A by {max_error:e}")));
    }
    Ok(SlFactorization { factors, steps, max_error })
}

trait DiagonalLike {
    fn is_diagonal_like(&self) -> bool;
}

impl DiagonalLike for CMat {
    fn is_diagonal_like(&self) -> bool {
        self.iter().enumerate().all(|(idx, z)| {
            let (r, c) = (idx % self.nrows(), idx / self.nrows());
            r == c || *z == C64::new(0.0, 0.0)
        })
    }
}

/// `(i, j)` when every position is `I` except possibly entry `(i, j)`.
fn single_elementary(view: &UView) -> Option<(usize, usize)> {
    let n = view.mats[0].nrows();
    let mut found: Option<(usize, usize)> = None;
    for m in &view.mats {
        for r in 0..n {
            for c in 0..n {
                let expect = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                if m[(r, c)] == expect {
                    continue;
                }
                if r == c || found.is_some_and(|f| f != (r, c)) {
                    return None;
                }
                found = Some((r, c));
            }
        }
    }
    found
}

/// `diag(d_1, ..., d_n)` with product one as blocks `diag(c, 1/c)` on
/// `(j, j+1)`, `c = d_1 ... d_{j+1}`, six factors per block.
fn diagonal_factors(d: &[C64]) -> Vec<Raw> {
    let mut out = Vec::new();
    let mut c = C64::new(1.0, 0.0);
    for (j, &dj) in d.iter().enumerate().take(d.len().saturating_sub(1)) {
        c *= dj;
        whitehead(j, c, &mut out);
    }
    out
}

fn whitehead(j: usize, c: C64, out: &mut Vec<Raw>) {
    let one = C64::new(1.0, 0.0);
    let (i, k) = (j, j + 1);
    // W(c) W(-1)
    out.extend([
        Raw { block: true, ..Raw::new(i, k, c) },
        Raw::new(k, i, -one / c),
        Raw::new(i, k, c),
        Raw::new(i, k, -one),
        Raw::new(k, i, one),
        Raw::new(i, k, -one),
    ]);
}

/// `M = gamma(ta) gamma(tb)^-1 = exp((1-ta) B) diag(exp(-(tb-ta) tr B), 1, ...) exp(-(1-tb) B)`.
fn step_matrix(b: &CMat, trace: C64, ta: f64, tb: f64) -> CMat {
    let mut left = expm(&(b * C64::new(1.0 - ta, 0.0)));
    let scale = (-trace * (tb - ta)).exp();
    for r in 0..left.nrows() {
        left[(r, 0)] *= scale;
    }
    left * expm(&(b * C64::new(-(1.0 - tb), 0.0)))
}

fn path_factors(view: &UView, step_norm: f64) -> Result<(Vec<Vec<Raw>>, usize)> {
    let (logs, _) = log_view(view);
    let traces: Vec<C64> = logs.iter().map(|b| b.trace()).collect();
    let n = view.mats[0].nrows();
    let id = CMat::identity(n, n);

    // dyadic subdivision, left to right
    let mut stack = vec![(0.0f64, 1.0f64, 0u32)];
    let mut accepted: Vec<Vec<CMat>> = Vec::new();
    while let Some((ta, tb, depth)) = stack.pop() {
        let steps: Vec<CMat> = logs.iter().zip(&traces).map(|(b, &tr)| step_matrix(b, tr, ta, tb)).collect();
        let worst = steps.iter().map(|m| spectral_norm(&(m - &id))).fold(0.0, f64::max);
        if worst <= step_norm {
            accepted.push(steps);
            continue;
        }
        if depth >= MAX_DEPTH {
            return Err(Error::SubdivisionOverflow { max_steps: 1 << MAX_DEPTH });
        }
        let mid = 0.5 * (ta + tb);
        stack.push((mid, tb, depth + 1));
        stack.push((ta, mid, depth + 1));
    }

    let mut out = vec![Vec::new(); view.mats.len()];
    for steps in &accepted {
        for (k, m) in steps.iter().enumerate() {
            ldu_factors(m, &mut out[k]).ok_or_else(|| Error::Numerical(format!("zero pivot in a path step at position {k}")))?;
        }
    }
    Ok((out, accepted.len()))
}

/// `M = L D U` without pivoting, emitted as `L_1 ... L_{n-1}`, the diagonal
/// blocks, then `U_{n-1} ... U_1` (row `j` of `U` in `U_j`).
fn ldu_factors(m: &CMat, out: &mut Vec<Raw>) -> Option<()> {
    let n = m.nrows();
    let mut u = m.clone();
    let mut l = CMat::identity(n, n);
    for j in 0..n {
        let pivot = u[(j, j)];
        if pivot.norm() == 0.0 || !pivot.is_finite() {
            return None;
        }
        for i in j + 1..n {
            let f = u[(i, j)] / pivot;
            l[(i, j)] = f;
            for c in j..n {
                let v = u[(j, c)];
                u[(i, c)] -= f * v;
            }
        }
    }
    let d: Vec<C64> = (0..n).map(|j| u[(j, j)]).collect();
    for j in 0..n {
        for i in j + 1..n {
            out.push(Raw::new(i, j, l[(i, j)]));
        }
    }
    out.extend(diagonal_factors(&d));
    for j in (0..n).rev() {
        for c in j + 1..n {
            out.push(Raw::new(j, c, u[(j, c)] / d[j]));
        }
    }
    Some(())
}

/// Gathers the same slot across positions into one element. Slots that are
/// zero at every position and Whitehead blocks with `c = 1` at every
/// position are dropped.
fn collect(a: &MatElement, layout: Layout, per_position: &[Vec<Raw>]) -> Result<Vec<ElementaryFactor>> {
    let count = per_position.first().map_or(0, |f| f.len());
    let mut out = Vec::with_capacity(count);
    let mut s = 0;
    while s < count {
        let (i, j) = (per_position[0][s].i, per_position[0][s].j);
        let values: Vec<C64> = per_position.iter().map(|f| f[s].alpha).collect();
        if per_position[0][s].block && values.iter().all(|z| *z == C64::new(1.0, 0.0)) {
            s += 6;
            continue;
        }
        s += 1;
        if values.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        let alpha = Element::from_samples(a.weight().clone(), layout, values)?;
        out.push(ElementaryFactor { i, j, alpha });
    }
    Ok(out)
}

fn reconstruction_error(view: &UView, per_position: &[Vec<Raw>]) -> f64 {
    let n = view.mats[0].nrows();
    view.mats
        .iter()
        .zip(per_position)
        .map(|(m, factors)| {
            let mut x = CMat::identity(n, n);
            for f in factors {
                // x (I + alpha e_ij): column j += alpha * column i
                let col = x.column(f.i).clone_owned() * f.alpha;
                let mut target = x.column_mut(f.j);
                target += col;
            }
            spectral_norm(&(x - m))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffseq::EpSeq;
    use crate::weights::Weight;

    fn fw() -> Weight {
        Weight::factorial()
    }

    fn cmat(rows: usize, vals: &[f64]) -> CMat {
        CMat::from_row_iterator(rows, vals.len() / rows, vals.iter().map(|&x| C64::new(x, 0.0)))
    }

    fn product(factors: &[ElementaryFactor], n: usize) -> MatElement {
        let mut p = MatElement::identity(fw(), n);
        for f in factors {
            p = p.mul(&f.to_matrix(n).unwrap()).unwrap();
        }
        p
    }

    #[test]
    fn identity_gives_no_factors() {
        let f = sl_factor(&MatElement::identity(fw(), 3), 0.5, 1e-9).unwrap();
        assert!(f.factors.is_empty());
    }

    #[test]
    fn single_elementary_is_kept() {
        let alpha = Element::from_normalized(fw(), EpSeq::from_real(&[3.0], &[1.0, -1.0]).unwrap());
        let e = ElementaryFactor { i: 0, j: 1, alpha };
        let a = e.to_matrix(2).unwrap();
        let f = sl_factor(&a, 0.5, 1e-9).unwrap();
        assert_eq!(f.factors, vec![e]);
    }

    #[test]
    fn whitehead_diagonal_uses_six() {
        let a = MatElement::constant(fw(), &cmat(2, &[2.0, 0.0, 0.0, 0.5])).unwrap();
        let f = sl_factor(&a, 0.5, 1e-9).unwrap();
        assert!(f.factors.len() <= 6);
        assert!(product(&f.factors, 2).max_deviation(&a).unwrap() < 1e-9);
    }

    #[test]
    fn rotation_through_the_path() {
        let (c, s) = (2.5f64.cos(), 2.5f64.sin());
        let a = MatElement::constant(fw(), &cmat(2, &[c, -s, s, c])).unwrap();
        let f = sl_factor(&a, 0.5, 1e-9).unwrap();
        assert!(f.steps >= 2);
        assert!(f.factors.iter().all(|x| x.i != x.j));
        assert!(product(&f.factors, 2).max_deviation(&a).unwrap() < 1e-9);
    }

    #[test]
    fn three_by_three_periodic() {
        let view = UView {
            layout: Layout::new(1, 2),
            mats: vec![
                cmat(3, &[1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
                cmat(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]),
                cmat(3, &[2.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 3.0, 1.0]),
            ],
        };
        let a = MatElement::from_u_view(fw(), &view).unwrap();
        let f = sl_factor(&a, 0.5, 1e-9).unwrap();
        assert!(product(&f.factors, 3).max_deviation(&a).unwrap() < 1e-9);
    }

    #[test]
    fn rejects_non_sl() {
        let a = MatElement::constant(fw(), &cmat(2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(matches!(sl_factor(&a, 0.5, 1e-9).unwrap_err(), Error::NotSL { position: 0, .. }));
        let s = MatElement::constant(fw(), &cmat(2, &[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(sl_factor(&s, 0.5, 1e-9).unwrap_err(), Error::NotInGL(0));
    }
}
