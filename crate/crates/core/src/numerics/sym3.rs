use crate::error::{Error, Result};

/// Symmetric 3×3 real matrix stored as its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3 {
    pub m11: f64,
    pub m12: f64,
    pub m13: f64,
    pub m22: f64,
    pub m23: f64,
    pub m33: f64,
}

impl Sym3 {
    pub fn new(m11: f64, m12: f64, m13: f64, m22: f64, m23: f64, m33: f64) -> Self {
        Self { m11, m12, m13, m22, m23, m33 }
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Self::new(d[0], 0.0, 0.0, d[1], 0.0, d[2])
    }

    /// Symmetric part of a dense matrix.
    pub fn from_dense(a: &[[f64; 3]; 3]) -> Self {
        let s = |i: usize, j: usize| 0.5 * (a[i][j] + a[j][i]);
        Self::new(a[0][0], s(0, 1), s(0, 2), a[1][1], s(1, 2), a[2][2])
    }

    pub fn to_dense(&self) -> [[f64; 3]; 3] {
        [
            [self.m11, self.m12, self.m13],
            [self.m12, self.m22, self.m23],
            [self.m13, self.m23, self.m33],
        ]
    }

    /// Entries in the order (11, 12, 13, 22, 23, 33).
    pub fn entries(&self) -> [f64; 6] {
        [self.m11, self.m12, self.m13, self.m22, self.m23, self.m33]
    }

    pub fn third_row(&self) -> [f64; 3] {
        [self.m13, self.m23, self.m33]
    }

    pub fn scale(&self, c: f64) -> Self {
        let e = self.entries().map(|v| v * c);
        Self::new(e[0], e[1], e[2], e[3], e[4], e[5])
    }

    pub fn frobenius_norm(&self) -> f64 {
        let off = self.m12 * self.m12 + self.m13 * self.m13 + self.m23 * self.m23;
        (self.m11 * self.m11 + self.m22 * self.m22 + self.m33 * self.m33 + 2.0 * off).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22 + self.m33
    }

    pub fn det(&self) -> f64 {
        self.m11 * (self.m22 * self.m33 - self.m23 * self.m23)
            - self.m12 * (self.m12 * self.m33 - self.m23 * self.m13)
            + self.m13 * (self.m12 * self.m23 - self.m22 * self.m13)
    }

    pub fn mul_vec(&self, x: &[f64; 3]) -> [f64; 3] {
        let a = self.to_dense();
        [0, 1, 2].map(|i| a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2])
    }

    /// `xᵀ M x`
    pub fn quad_form(&self, x: &[f64; 3]) -> f64 {
        let mx = self.mul_vec(x);
        x[0] * mx[0] + x[1] * mx[1] + x[2] * mx[2]
    }
}

impl std::ops::Sub for Sym3 {
    type Output = Sym3;

    fn sub(self, rhs: Sym3) -> Sym3 {
        let (a, b) = (self.entries(), rhs.entries());
        Sym3::new(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4], a[5] - b[5])
    }
}

/// Eigenvalues in ascending order with unit eigenvectors stored as columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> [f64; 3] {
        [self.vectors[0][k], self.vectors[1][k], self.vectors[2][k]]
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of `m`, ascending.
pub fn eig_sym3(m: &Sym3) -> Result<[f64; 3]> {
    eigen_sym3(m).map(|e| e.values)
}

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal norm
/// falls below `1e-12 · ‖M‖_F`.
pub fn eigen_sym3(m: &Sym3) -> Result<SymEigen> {
    let mut a = m.to_dense();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let tol = 1e-12 * m.frobenius_norm();

    let off = |a: &[[f64; 3]; 3]| (2.0 * (a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2))).sqrt();

    let mut converged = off(&a) <= tol;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps });
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            rotate(&mut a, &mut v, p, q, c, s);
        }
        sweeps += 1;
        converged = off(&a) <= tol;
    }

    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.map(|k| a[k][k]);
    let mut vectors = [[0.0; 3]; 3];
    for (col, &k) in order.iter().enumerate() {
        for row in 0..3 {
            vectors[row][col] = v[row][k];
        }
    }
    Ok(SymEigen { values, vectors })
}

// A <- Jᵀ A J and V <- V J for the Givens rotation J in the (p, q) plane.
fn rotate(a: &mut [[f64; 3]; 3], v: &mut [[f64; 3]; 3], p: usize, q: usize, c: f64, s: f64) {
    for row in a.iter_mut() {
        let (akp, akq) = (row[p], row[q]);
        row[p] = c * akp - s * akq;
        row[q] = s * akp + c * akq;
    }
    let (rp, rq) = (a[p], a[q]);
    for (k, (apk, aqk)) in rp.into_iter().zip(rq).enumerate() {
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for row in v.iter_mut() {
        let (vp, vq) = (row[p], row[q]);
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn residual(m: &Sym3, e: &SymEigen) -> f64 {
        (0..3)
            .map(|k| {
                let x = e.vector(k);
                let mx = m.mul_vec(&x);
                (0..3).map(|i| (mx[i] - e.values[k] * x[i]).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal() {
        let e = eig_sym3(&Sym3::diag([3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(eig_sym3(&Sym3::default()).unwrap(), [0.0; 3]);
    }

    #[test]
    fn riccati_difference_of_low_and_high_damping() {
        let p_h = Sym3::new(6337.2, 1844.0, 78.4, 1822.8, 80.8, 23.5);
        let p_l = Sym3::new(2940.0, 1080.0, 60.0, 822.0, 49.0, 18.0);
        let d = p_h - p_l;
        let e = eigen_sym3(&d).unwrap();
        assert_relative_eq!(e.values[0], 4.5, max_relative = 0.05);
        assert_relative_eq!(e.values[1], 778.8, max_relative = 0.01);
        assert_relative_eq!(e.values[2], 3620.3, max_relative = 0.01);
        assert!(residual(&d, &e) <= 1e-10 * d.frobenius_norm());
    }

    #[test]
    fn trace_and_determinant() {
        let m = Sym3::new(4.0, -1.0, 0.5, 3.0, 2.0, -6.0);
        let e = eigen_sym3(&m).unwrap();
        assert_relative_eq!(e.values.iter().sum::<f64>(), m.trace(), max_relative = 1e-10);
        assert_relative_eq!(e.values.iter().product::<f64>(), m.det(), max_relative = 1e-8);
        assert!(residual(&m, &e) <= 1e-10 * m.frobenius_norm());
    }

    #[test]
    fn non_finite_input_does_not_converge() {
        let m = Sym3::new(f64::NAN, 1.0, 0.0, 1.0, 0.0, 1.0);
        assert!(matches!(eig_sym3(&m), Err(Error::ConvergenceFailure { .. })));
    }
}
