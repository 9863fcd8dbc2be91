use std::f64::consts::PI;

use super::{MatElement, UView};
use crate::dense::{eigenvalues, expm, logm_cut, resolvent_norm, sector_direction, spectral_norm, CMat, Keyhole};
use crate::error::{Error, Result};
use crate::C64;

/// `U_{exp B}(k) = exp(U_B(k))`, scaling and squaring with a Taylor kernel.
pub fn mat_exp(b: &MatElement) -> Result<MatElement> {
    if b.rows() != b.cols() {
        return Err(Error::DimensionMismatch(format!("exp of {:?}", b.shape())));
    }
    let view = b.u_view()?;
    let mats = view.mats.iter().map(expm).collect();
    MatElement::from_u_view(b.weight().clone(), &UView { layout: view.layout, mats })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogOptions {
    /// Trapezoid nodes for the contour cross-check, shared over the four pieces.
    pub nodes: usize,
    /// Largest allowed spectral-norm gap between the two logarithms.
    pub agreement_tol: f64,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions { nodes: 2048, agreement_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixLog {
    pub log: MatElement,
    /// Branch-cut direction chosen at each sample position.
    pub thetas: Vec<f64>,
    /// `max_k ||eigen log - contour log||_2`.
    pub max_disagreement: f64,
    /// `max_k ||exp(log) - U_A(k)||_2`.
    pub max_roundtrip: f64,
}

/// Round-trip tolerance, relative to `max(1, ||U_A(k)||_2)`.
const ROUNDTRIP_TOL: f64 = 1e-9;

/// Per-position logarithm on the eigen/Schur path with the widest-gap cut.
pub(crate) fn log_view(view: &UView) -> (Vec<CMat>, Vec<f64>) {
    view.mats
        .iter()
        .map(|m| {
            let theta = sector_direction(&eigenvalues(m));
            (logm_cut(m, theta), theta)
        })
        .unzip()
}

/// [`mat_log_with`] using `nodes` quadrature nodes and the default agreement tolerance.
pub fn mat_log(a: &MatElement, nodes: usize) -> Result<MatElement> {
    mat_log_with(a, &LogOptions { nodes, ..LogOptions::default() }).map(|l| l.log)
}

/// Logarithm of an invertible matrix over the algebra.
///
/// At each position the cut runs along the middle of the widest gap between
/// eigenvalue arguments. The Schur-based value is returned; the contour
/// integral over the keyhole path with inner radius `r / 2` and outer radius
/// `R + 1` (`r`, `R` the smallest and largest eigenvalue moduli over all
/// positions) must agree with it within `agreement_tol`.
pub fn mat_log_with(a: &MatElement, opts: &LogOptions) -> Result<MatrixLog> {
    a.gl_bound()?;
    let n = a.rows();
    let view = a.u_view()?;
    let spectra: Vec<Vec<C64>> = view.mats.iter().map(eigenvalues).collect();
    let moduli = spectra.iter().flatten().map(|z| z.norm());
    let (r, big_r) = moduli.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (logs, thetas) = log_view(&view);

    let mut max_disagreement = 0.0f64;
    let mut max_roundtrip = 0.0f64;
    for (k, m) in view.mats.iter().enumerate() {
        let path = Keyhole { theta: thetas[k], half_angle: PI / (2.0 * n as f64), inner: r / 2.0, outer: big_r + 1.0 };
        let contour = path
            .log_integral(m, opts.nodes)
            .ok_or_else(|| Error::Numerical(format!("contour passes through the spectrum at position {k}")))?;
        let difference = spectral_norm(&(&contour - &logs[k]));
        if !(difference <= opts.agreement_tol) {
            return Err(Error::QuadratureDisagreement { position: k, difference });
        }
        max_disagreement = max_disagreement.max(difference);

        let back = spectral_norm(&(expm(&logs[k]) - m));
        if !(back <= ROUNDTRIP_TOL * spectral_norm(m).max(1.0)) {
            return Err(Error::Numerical(format!("exp(log A) misses A by {back:e} at position {k}")));
        }
        max_roundtrip = max_roundtrip.max(back);
    }
    let log = MatElement::from_u_view(a.weight().clone(), &UView { layout: view.layout, mats: logs })?;
    Ok(MatrixLog { log, thetas, max_disagreement, max_roundtrip })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventCheck {
    pub position: usize,
    /// `||(z I - U)^-1||_2`
    pub lhs: f64,
    /// `(1/d) exp(c2 * 2n ||U||^2 / d^2 + b2)`
    pub rhs: f64,
    pub distance: f64,
    pub holds: bool,
}

/// Evaluates both sides of the resolvent estimate at each sample position.
/// Diagnostic only: the constants `c2`, `b2` are inputs.
pub fn resolvent_bound_check(a: &MatElement, z: C64, c2: f64, b2: f64) -> Result<Vec<ResolventCheck>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!("resolvent of {:?}", a.shape())));
    }
    let n = a.rows() as f64;
    let view = a.u_view()?;
    let mut out = Vec::with_capacity(view.mats.len());
    for (position, m) in view.mats.iter().enumerate() {
        let norm = spectral_norm(m);
        let (lhs, distance) = resolvent_norm(m, z).ok_or(Error::SpectrumHit(position))?;
        if distance <= 1e-14 * norm.max(1.0) || !lhs.is_finite() {
            return Err(Error::SpectrumHit(position));
        }
        let rhs = (c2 * 2.0 * n * norm * norm / (distance * distance) + b2).exp() / distance;
        out.push(ResolventCheck { position, lhs, rhs, distance, holds: lhs <= rhs });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Element;
    use crate::coeffseq::EpSeq;
    use crate::weights::Weight;

    fn fw() -> Weight {
        Weight::factorial()
    }

    fn cmat(rows: usize, vals: &[f64]) -> CMat {
        CMat::from_row_iterator(rows, vals.len() / rows, vals.iter().map(|&x| C64::new(x, 0.0)))
    }

    #[test]
    fn exp_of_zero_and_nilpotent() {
        let z = MatElement::constant(fw(), &CMat::zeros(2, 2)).unwrap();
        assert_eq!(mat_exp(&z).unwrap(), MatElement::identity(fw(), 2));
        let n = MatElement::constant(fw(), &cmat(2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        let e = mat_exp(&n).unwrap();
        assert!(e.max_deviation(&MatElement::constant(fw(), &cmat(2, &[1.0, 1.0, 0.0, 1.0])).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn exp_one_by_one_matches_scalar() {
        let f = Element::from_normalized(fw(), EpSeq::from_real(&[0.5], &[1.0, -2.0, 0.25]).unwrap());
        let m = MatElement::new(fw(), 1, 1, vec![f.clone()]).unwrap();
        let e = mat_exp(&m).unwrap();
        let s = f.exp_el().unwrap();
        let d = e.get(0, 0).sub(&s).unwrap().norm().value;
        assert!(d < 1e-14);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = mat_log(&MatElement::identity(fw(), 3), 2048).unwrap();
        assert!(l.entry_norm_max() < 1e-12);
    }

    #[test]
    fn log_of_minus_one_round_trips() {
        let a = MatElement::constant(fw(), &cmat(1, &[-1.0])).unwrap();
        let l = mat_log_with(&a, &LogOptions::default()).unwrap();
        // cut along theta = 0 puts the eigenvalue's log at -i pi
        assert_eq!(l.thetas, vec![0.0]);
        let v = l.log.get(0, 0).normalized_at(0).unwrap();
        assert!((v - C64::new(0.0, -PI)).norm() < 1e-12);
        assert!(mat_exp(&l.log).unwrap().max_deviation(&a).unwrap() < 1e-12);
    }

    #[test]
    fn log_rejects_singular_position() {
        let f = Element::from_normalized(fw(), EpSeq::from_real(&[], &[1.0, 0.0]).unwrap());
        let a = MatElement::new(fw(), 1, 1, vec![f]).unwrap();
        assert_eq!(mat_log(&a, 256).unwrap_err(), Error::NotInGL(1));
    }

    #[test]
    fn too_few_nodes_disagree() {
        let a = MatElement::constant(fw(), &cmat(2, &[3.0, 1.0, 0.0, 0.05])).unwrap();
        let err = mat_log_with(&a, &LogOptions { nodes: 16, agreement_tol: 1e-10 }).unwrap_err();
        assert!(matches!(err, Error::QuadratureDisagreement { position: 0, .. }));
    }

    #[test]
    fn resolvent_normal_and_jordan() {
        let d = MatElement::constant(fw(), &cmat(2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        let c = resolvent_bound_check(&d, C64::new(0.0, 0.5), 0.1, 0.1).unwrap();
        assert!((c[0].lhs - 1.0 / c[0].distance).abs() < 1e-14);
        assert!(c[0].holds);

        let j = MatElement::constant(fw(), &cmat(2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        let c = resolvent_bound_check(&j, C64::new(0.1, 0.0), 1e-6, 1e-6).unwrap();
        assert!(c[0].lhs > 100.0);
        assert!(c[0].rhs >= 1.0 / c[0].distance);
        assert_eq!(resolvent_bound_check(&j, C64::new(0.0, 0.0), 1.0, 1.0).unwrap_err(), Error::SpectrumHit(0));
    }
}
