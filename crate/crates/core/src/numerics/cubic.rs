use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real cubic `a3 s^3 + a2 s^2 + a1 s + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Cubic {
    pub fn new(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self { a3, a2, a1, a0 }
    }

    pub fn monic(a2: f64, a1: f64, a0: f64) -> Self {
        Self::new(1.0, a2, a1, a0)
    }

    /// Coefficients in descending degree.
    pub fn coefficients(&self) -> [f64; 4] {
        [self.a3, self.a2, self.a1, self.a0]
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        ((s * self.a3 + self.a2) * s + self.a1) * s + self.a0
    }

    fn derivative(&self, s: Complex64) -> Complex64 {
        (s * (3.0 * self.a3) + 2.0 * self.a2) * s + self.a1
    }
}

/// Three roots of a real cubic, conjugate-paired and sorted by ascending
/// `|re|`, then ascending `im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTriple(pub [Complex64; 3]);

impl RootTriple {
    fn sorted(mut roots: [Complex64; 3]) -> Self {
        roots.sort_by(|a, b| match a.re.abs().total_cmp(&b.re.abs()) {
            Ordering::Equal => a.im.total_cmp(&b.im),
            o => o,
        });
        Self(roots)
    }

    pub fn roots(&self) -> &[Complex64; 3] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.0.iter()
    }

    /// Largest real part among the roots.
    pub fn max_real(&self) -> f64 {
        self.0.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// The complex root with positive imaginary part, if the triple has one.
    pub fn upper_complex(&self) -> Option<Complex64> {
        self.0.iter().copied().find(|r| r.im > 0.0)
    }
}

/// Roots of `c` by the depressed-cubic method: trigonometric branch for
/// three real roots, Cardano otherwise, then one Newton polish per root.
pub fn solve_cubic(c: &Cubic) -> Result<RootTriple> {
    let scale = c.max_abs_coefficient();
    if c.a3.is_nan() || c.a3.abs() <= 1e-14 * scale {
        return Err(Error::DegenerateLeadingCoefficient(c.a3));
    }
    if !c.coefficients().iter().all(|a| a.is_finite()) {
        return Err(Error::InvalidInput("cubic coefficients must be finite".into()));
    }

    let b = c.a2 / c.a3;
    let cc = c.a1 / c.a3;
    let d = c.a0 / c.a3;
    let shift = b / 3.0;

    // t^3 + p t + q = 0 with s = t - b/3
    let p = cc - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let raw: [Complex64; 3] = if disc > 0.0 {
        let sq = disc.sqrt();
        // pick the cube root that avoids cancellation
        let u = -q.signum() * (q.abs() / 2.0 + sq).cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let re = -(u + v) / 2.0 - shift;
        let im = (3.0_f64.sqrt() / 2.0) * (u - v).abs();
        [
            Complex64::new(u + v - shift, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    } else if p >= 0.0 {
        // disc <= 0 with p >= 0 forces p = q = 0: triple root
        [Complex64::new(-shift, 0.0); 3]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let t = |k: f64| Complex64::new(r * (theta - 2.0 * PI * k / 3.0).cos() - shift, 0.0);
        [t(0.0), t(1.0), t(2.0)]
    };

    let mut roots = raw;
    for root in roots.iter_mut() {
        if root.im < 0.0 {
            continue;
        }
        *root = polish(c, *root);
    }
    // restore exact conjugate symmetry after polishing the upper root
    if let Some(upper) = roots.iter().copied().find(|r| r.im > 0.0) {
        for root in roots.iter_mut().filter(|r| r.im < 0.0) {
            *root = upper.conj();
        }
    }
    Ok(RootTriple::sorted(roots))
}

fn polish(c: &Cubic, root: Complex64) -> Complex64 {
    let f = c.eval(root);
    let df = c.derivative(root);
    if df.norm() == 0.0 || !df.is_finite() {
        return root;
    }
    let mut candidate = root - f / df;
    if root.im == 0.0 {
        candidate.im = 0.0;
    }
    if candidate.is_finite() && c.eval(candidate).norm() < f.norm() {
        candidate
    } else {
        root
    }
}
