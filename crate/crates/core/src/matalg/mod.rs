//! Matrices over the algebra.
//!
//! A matrix `A` is viewed through its normalized coefficient matrices
//! `U_A(k) = p(k) A^(k)`. Products, determinants, exponentials and logarithms
//! over the algebra become the corresponding complex operations on each
//! `U_A(k)`, and only the positions of the common prefix and one cycle need to
//! be computed.

mod elementary;
mod functions;

use crate::algebra::{layout_of, Element};
use crate::coeffseq::Layout;
use crate::dense::{min_singular, spectral_norm, CMat};
use crate::error::{Error, Result};
use crate::weights::Weight;
use crate::C64;

pub use elementary::{sl_factor, sl_factor_with, ElementaryFactor, SlFactorization, SlOptions};
pub use functions::{
    mat_exp, mat_log, mat_log_with, resolvent_bound_check, LogOptions, MatrixLog, ResolventCheck,
};

/// `rows x cols` matrix of elements, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatElement {
    weight: Weight,
    rows: usize,
    cols: usize,
    entries: Vec<Element>,
}

/// Normalized coefficient matrices at every sample position of a layout.
#[derive(Debug, Clone)]
pub struct UView {
    pub layout: Layout,
    pub mats: Vec<CMat>,
}

impl MatElement {
    pub fn new(weight: Weight, rows: usize, cols: usize, entries: Vec<Element>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| *e.weight() != weight) {
            return Err(Error::WeightMismatch(weight.name().into(), bad.weight().name().into()));
        }
        Ok(MatElement { weight, rows, cols, entries })
    }

    pub fn from_rows(weight: Weight, rows: Vec<Vec<Element>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(weight, r, c, rows.into_iter().flatten().collect())
    }

    /// `I_n = diag(eps, ..., eps)`.
    pub fn identity(weight: Weight, n: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { Element::unit(weight.clone()) } else { Element::zero(weight.clone()) })
            .collect();
        MatElement { weight, rows: n, cols: n, entries }
    }

    /// Matrix whose normalized coefficients equal `m` at every index.
    pub fn constant(weight: Weight, m: &CMat) -> Result<Self> {
        let layout = Layout::new(0, 1);
        Self::from_u_view(weight, &UView { layout, mats: vec![m.clone()] })
    }

    /// Reassembles a matrix from per-position coefficient matrices.
    pub fn from_u_view(weight: Weight, view: &UView) -> Result<Self> {
        let first = view.mats.first().ok_or(Error::EmptyInput)?;
        let (rows, cols) = first.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let values = view.mats.iter().map(|m| m[(i, j)]).collect();
                entries.push(Element::from_samples(weight.clone(), view.layout, values)?);
            }
        }
        Ok(MatElement { weight, rows, cols, entries })
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn layout(&self) -> Result<Layout> {
        let refs: Vec<&Element> = self.entries.iter().collect();
        if refs.is_empty() {
            return Ok(Layout::new(0, 1));
        }
        layout_of(&refs)
    }

    /// `U_A(k)` for every sample position of `layout`.
    pub fn u_view_on(&self, layout: Layout) -> Result<UView> {
        let seqs = self.entries.iter().map(|e| e.u()).collect::<Result<Vec<_>>>()?;
        let mats = (0..layout.len())
            .map(|k| CMat::from_fn(self.rows, self.cols, |i, j| seqs[i * self.cols + j].get(k)))
            .collect();
        Ok(UView { layout, mats })
    }

    pub fn u_view(&self) -> Result<UView> {
        self.u_view_on(self.layout()?)
    }

    /// `U_A(k)` at an arbitrary index.
    pub fn u_at(&self, k: usize) -> Result<CMat> {
        let mut m = CMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).normalized_at(k)?;
            }
        }
        Ok(m)
    }

    /// `max_ij ||a_ij||`.
    pub fn entry_norm_max(&self) -> f64 {
        self.entries.iter().map(|e| e.norm().value).fold(0.0, f64::max)
    }

    fn check_weight(&self, other: &MatElement) -> Result<()> {
        if self.weight != other.weight {
            return Err(Error::WeightMismatch(self.weight.name().into(), other.weight.name().into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &MatElement) -> Result<MatElement> {
        self.check_weight(other)?;
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!("{:?} + {:?}", self.shape(), other.shape())));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        MatElement::new(self.weight.clone(), self.rows, self.cols, entries)
    }

    /// Matrix product over the algebra, entries combined with `star` and `add`.
    pub fn mul(&self, other: &MatElement) -> Result<MatElement> {
        self.check_weight(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("{:?} * {:?}", self.shape(), other.shape())));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Element::zero(self.weight.clone());
                for l in 0..self.cols {
                    acc = acc.add(&self.get(i, l).star(other.get(l, j))?)?;
                }
                entries.push(acc);
            }
        }
        MatElement::new(self.weight.clone(), self.rows, other.cols, entries)
    }

    /// Determinant by cofactor expansion over the algebra.
    pub fn det(&self) -> Result<Element> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("det of {:?}", self.shape())));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor_det(&idx, 0)
    }

    fn minor_det(&self, cols: &[usize], row: usize) -> Result<Element> {
        if cols.is_empty() {
            return Ok(Element::unit(self.weight.clone()));
        }
        let mut acc = Element::zero(self.weight.clone());
        for (pos, &c) in cols.iter().enumerate() {
            let entry = self.get(row, c);
            if entry.u().map(|u| u.is_zero()).unwrap_or(false) {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry.star(&self.minor_det(&rest, row + 1)?)?;
            acc = if pos % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        }
        Ok(acc)
    }

    /// `(sup_k ||U_A(k)||_2, n * max_ij ||a_ij||)`.
    pub fn norm_bounds(&self) -> Result<NormBounds> {
        let view = self.u_view()?;
        let spectral_sup = view.mats.iter().map(spectral_norm).fold(0.0, f64::max);
        let upper = self.rows.max(self.cols) as f64 * self.entry_norm_max();
        Ok(NormBounds { spectral_sup, upper, holds: spectral_sup <= upper * (1.0 + 1e-12) })
    }

    /// Checks every `U_A(k)` is invertible and returns `sup_k ||U_A(k)^-1||_2`.
    pub fn gl_bound(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("square matrix required".into()));
        }
        let view = self.u_view()?;
        let mut worst = 0.0f64;
        for (k, m) in view.mats.iter().enumerate() {
            let smax = spectral_norm(m);
            let smin = min_singular(m);
            if !(smin > 1e-13 * smax) {
                return Err(Error::NotInGL(k));
            }
            worst = worst.max(1.0 / smin);
        }
        Ok(worst)
    }

    /// Largest entrywise gap `|U_A(k) - U_B(k)|` over the common layout.
    pub fn max_deviation(&self, other: &MatElement) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        let layout = self.layout()?.merge(other.layout()?)?;
        let (a, b) = (self.u_view_on(layout)?, other.u_view_on(layout)?);
        Ok(a.mats
            .iter()
            .zip(&b.mats)
            .map(|(x, y)| (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    /// `sup_k ||U_A(k)||_{2,2}`, exact over prefix and cycle.
    pub spectral_sup: f64,
    /// `n * max_ij ||a_ij||`
    pub upper: f64,
    pub holds: bool,
}

/// Result of [`mat_solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    /// `1 / sup_k ||x_k||_2`; infinite when `x = 0`.
    pub delta: f64,
    pub x: MatElement,
    pub max_residual: f64,
}

/// Default relative rank tolerance for [`mat_solve`].
pub const DEFAULT_RTOL: f64 = 1e-10;

/// Solves `A * x = b` position by position with the minimal-norm least
/// squares solution. Singular values at or below `rtol * sigma_max` count as
/// zero; a position is consistent when the part of `b` outside the numerical
/// range of `U_A(k)` has norm at most `rtol * ||b_k||`.
///
/// On inconsistency the error carries the position and a unit vector `y` with
/// `U_A(k)^* y ~ 0` but `<y, b_k> != 0`.
pub fn mat_solve(a: &MatElement, b: &MatElement, rtol: f64) -> Result<Solution> {
    a.check_weight(b)?;
    if b.cols != 1 || b.rows != a.rows {
        return Err(Error::DimensionMismatch(format!("A {:?}, b {:?}", a.shape(), b.shape())));
    }
    let layout = a.layout()?.merge(b.layout()?)?;
    let (va, vb) = (a.u_view_on(layout)?, b.u_view_on(layout)?);
    let n = a.cols;
    let mut xs = Vec::with_capacity(layout.len());
    let mut sup_x = 0.0f64;
    let mut max_residual = 0.0f64;
    for (k, (m, rhs)) in va.mats.iter().zip(&vb.mats).enumerate() {
        let rhs_norm = rhs.norm();
        if rhs_norm == 0.0 {
            xs.push(CMat::zeros(n, 1));
            continue;
        }
        let svd = m.clone().svd(true, true);
        let (u, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let smax = svd.singular_values.max();
        let cutoff = rtol * smax;
        let mut x = CMat::zeros(n, 1);
        let mut in_range = CMat::zeros(a.rows, 1);
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff || s == 0.0 {
                continue;
            }
            let ui = u.column(i);
            let coeff = (ui.adjoint() * rhs)[(0, 0)];
            in_range += ui * coeff;
            x += v_t.row(i).adjoint() * (coeff / s);
        }
        let outside = rhs - &in_range;
        if outside.norm() > rtol * rhs_norm {
            let witness = (&outside / C64::new(outside.norm(), 0.0)).iter().copied().collect();
            return Err(Error::Inconsistent { position: k, witness });
        }
        max_residual = max_residual.max((m * &x - rhs).norm());
        sup_x = sup_x.max(x.norm());
        xs.push(x);
    }
    let x = MatElement::from_u_view(a.weight.clone(), &UView { layout, mats: xs })?;
    let delta = if sup_x > 0.0 { 1.0 / sup_x } else { f64::INFINITY };
    Ok(Solution { delta, x, max_residual })
}
