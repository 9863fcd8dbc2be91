//! Dense complex matrix kernels used one coefficient position at a time.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::C64;

pub type CMat = DMatrix<C64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Smallest singular value of a square matrix.
pub fn min_singular(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().min()
}

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Complex Schur form `m = q t q^*` with `t` upper triangular.
pub fn schur(m: &CMat) -> (CMat, CMat) {
    let n = m.nrows();
    if n == 1 {
        return (CMat::identity(1, 1), m.clone());
    }
    let (q, mut t) = m.clone().schur().unpack();
    // strictly lower part is rounding noise
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    (q, t)
}

pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let (_, t) = schur(m);
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Matrix exponential by scaling and squaring with a Taylor polynomial.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = one_norm(m);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let x = m.scale(0.5f64.powi(s));
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=30 {
        term = &term * &x / C64::new(k as f64, 0.0);
        sum += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root of an upper triangular matrix whose eigenvalues
/// avoid the closed negative real axis.
fn sqrtm_upper(t: &CMat) -> CMat {
    let n = t.nrows();
    let mut r = CMat::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = t[(i, i)].sqrt();
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// Principal logarithm of an upper triangular matrix by inverse scaling and
/// squaring: repeated square roots until close to `I`, then the `log(1 + x)`
/// series, then undo the scaling.
fn logm_upper(t: &CMat) -> CMat {
    let n = t.nrows();
    let id = CMat::identity(n, n);
    let mut r = t.clone();
    let mut s = 0;
    while (&r - &id).norm() > 0.2 && s < 64 {
        r = sqrtm_upper(&r);
        s += 1;
    }
    let x = &r - &id;
    let mut power = x.clone();
    let mut sum = x.clone();
    for k in 2..=60 {
        power = &power * &x;
        let term = power.scale(if k % 2 == 0 { -1.0 / k as f64 } else { 1.0 / k as f64 });
        sum += &term;
        if term.norm() <= 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    // diagonal exactly from the scalar logarithm
    let mut out = sum.scale(2f64.powi(s));
    for i in 0..n {
        out[(i, i)] = t[(i, i)].ln();
    }
    out
}

/// Argument in `[0, 2pi)`.
fn arg_2pi(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Direction `theta` in `[0, 2pi)` at the middle of the widest angular gap
/// between eigenvalue arguments; ties go to the smallest `theta`.
pub fn sector_direction(eigs: &[C64]) -> f64 {
    const TIE: f64 = 1e-12;
    let mut args: Vec<f64> = eigs.iter().map(|&z| arg_2pi(z)).collect();
    args.sort_by(|a, b| a.partial_cmp(b).unwrap());
    args.dedup();
    let k = args.len();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..k {
        let start = args[i];
        let end = if i + 1 < k { args[i + 1] } else { args[0] + 2.0 * PI };
        let gap = end - start;
        let mut mid = start + gap / 2.0;
        if mid >= 2.0 * PI {
            mid -= 2.0 * PI;
        }
        let better = match best {
            None => true,
            Some((g, m)) => gap > g + TIE || ((gap - g).abs() <= TIE && mid < m),
        };
        if better {
            best = Some((gap, mid));
        }
    }
    best.map(|(_, m)| m).unwrap_or(0.0)
}

/// Logarithm with the branch cut along the ray at angle `theta`: the
/// imaginary parts of the eigenvalues of the result lie in `(theta - 2pi, theta)`.
pub fn logm_cut(m: &CMat, theta: f64) -> CMat {
    let n = m.nrows();
    let phi = theta - PI;
    let rot = C64::from_polar(1.0, -phi);
    let (q, t) = schur(m);
    let l = logm_upper(&t.map(|z| z * rot));
    let shift = CMat::identity(n, n) * (I * phi);
    &q * l * q.adjoint() + shift
}

/// Closed keyhole path around an annular sector: outer arc of radius
/// `outer` anticlockwise, radial segment inward at `theta - half`, inner arc
/// of radius `inner` clockwise, radial segment outward at `theta + half`.
#[derive(Debug, Clone, Copy)]
pub struct Keyhole {
    pub theta: f64,
    pub half_angle: f64,
    pub inner: f64,
    pub outer: f64,
}

/// Point on the path with the branch value of `log` and `dzeta/ds`.
struct PathPoint {
    zeta: C64,
    log: C64,
    dz: C64,
}

impl Keyhole {
    fn pieces(&self) -> [(f64, Box<dyn Fn(f64) -> PathPoint + '_>); 4] {
        let a1 = self.theta - self.half_angle;
        let a2 = self.theta + self.half_angle;
        let (ri, ro) = (self.inner, self.outer);
        let (li, lo) = (ri.ln(), ro.ln());
        let span = 2.0 * PI - 2.0 * self.half_angle;
        let radial = lo - li;
        [
            // outer arc, psi from a2 to a1 + 2pi
            (
                span,
                Box::new(move |t: f64| {
                    let psi = a2 + span * t;
                    let zeta = C64::from_polar(ro, psi);
                    PathPoint { zeta, log: C64::new(lo, psi - 2.0 * PI), dz: I * zeta * span }
                }),
            ),
            // inward segment at a1, log-radius parametrization
            (
                radial,
                Box::new(move |t: f64| {
                    let lr = lo - radial * t;
                    let zeta = C64::from_polar(lr.exp(), a1);
                    PathPoint { zeta, log: C64::new(lr, a1), dz: zeta * (-radial) }
                }),
            ),
            // inner arc clockwise, psi from a1 down to a2 - 2pi
            (
                span,
                Box::new(move |t: f64| {
                    let psi = a1 - span * t;
                    let zeta = C64::from_polar(ri, psi);
                    PathPoint { zeta, log: C64::new(li, psi), dz: I * zeta * (-span) }
                }),
            ),
            // outward segment at a2
            (
                radial,
                Box::new(move |t: f64| {
                    let lr = li + radial * t;
                    let zeta = C64::from_polar(lr.exp(), a2);
                    PathPoint { zeta, log: C64::new(lr, a2 - 2.0 * PI), dz: zeta * radial }
                }),
            ),
        ]
    }

    /// `(1 / 2 pi i) * integral of log(zeta) (zeta I - m)^-1 dzeta` by the
    /// trapezoid rule after the endpoint-flattening substitution
    /// `t = s - sin(2 pi s) / (2 pi)` on each piece. `nodes` is shared among
    /// the pieces in proportion to their angular / log-radial extent.
    pub fn log_integral(&self, m: &CMat, nodes: usize) -> Option<CMat> {
        let n = m.nrows();
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(|(w, _)| *w).sum();
        let id = CMat::identity(n, n);
        let mut acc = CMat::zeros(n, n);
        for (extent, point) in pieces.iter() {
            let count = ((nodes as f64) * extent / total).round().max(16.0) as usize;
            let h = 1.0 / count as f64;
            // endpoint weights vanish under the substitution
            for k in 1..count {
                let s = k as f64 * h;
                let t = s - (2.0 * PI * s).sin() / (2.0 * PI);
                let dt = 1.0 - (2.0 * PI * s).cos();
                let p = point(t);
                let resolvent = (id.map(|z| z * p.zeta) - m).try_inverse()?;
                acc += resolvent * (p.log * p.dz * (dt * h));
            }
        }
        Some(acc / (2.0 * PI * I))
    }
}

/// Spectral norm of `(z I - m)^-1` and the distance from `z` to the spectrum.
pub fn resolvent_norm(m: &CMat, z: C64) -> Option<(f64, f64)> {
    let n = m.nrows();
    let d = eigenvalues(m).iter().map(|l| (z - l).norm()).fold(f64::INFINITY, f64::min);
    let shifted = CMat::identity(n, n) * z - m;
    let inv = shifted.try_inverse()?;
    Some((spectral_norm(&inv), d))
}
