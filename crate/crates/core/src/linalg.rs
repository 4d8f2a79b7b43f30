//! Small dense complex linear algebra: 2x2 spinor matrices and column-major
//! square matrices backed by `matrixmultiply`'s complex kernel.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Two-component spinor.
pub type Spinor = [C64; 2];

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2([[C64::from(a), ZERO], [ZERO, C64::from(b)]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [C64::from(m[0][0]), C64::from(m[0][1])],
            [C64::from(m[1][0]), C64::from(m[1][1])],
        ])
    }

    pub fn scale(self, s: C64) -> Self {
        let m = self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn adjoint(self) -> Self {
        let m = self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn apply(&self, v: Spinor) -> Spinor {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Outer product `a b^dagger`.
    pub fn outer(a: Spinor, b: Spinor) -> Self {
        Mat2([
            [a[0] * b[0].conj(), a[0] * b[1].conj()],
            [a[1] * b[0].conj(), a[1] * b[1].conj()],
        ])
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(C64::from(-1.0))
    }
}

/// `a^dagger diag(metric) b`.
pub fn metric_dot(a: Spinor, metric: [f64; 2], b: Spinor) -> C64 {
    a[0].conj() * b[0] * metric[0] + a[1].conj() * b[1] * metric[1]
}

/// Dense square complex matrix in column-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_columns(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "column data does not match dimension");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[col * self.n + row]
    }

    pub fn set(&mut self, row: usize, col: usize, v: C64) {
        self.data[col * self.n + row] = v;
    }

    pub fn column(&self, col: usize) -> &[C64] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [C64] {
        &mut self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for c in 0..n {
            for r in 0..n {
                out.data[r * n + c] = self.data[c * n + r].conj();
            }
        }
        out
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&mut self, d: &[f64]) {
        let n = self.n;
        for col in self.data.chunks_mut(n) {
            for (z, &s) in col.iter_mut().zip(d) {
                *z *= s;
            }
        }
    }

    /// Scales column `j` by `d[j]` (right multiplication by a diagonal).
    pub fn scale_columns(&mut self, d: &[f64]) {
        let n = self.n;
        for (col, &s) in self.data.chunks_mut(n).zip(d) {
            for z in col {
                *z *= s;
            }
        }
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![ZERO; self.n];
        for (col, &x) in self.data.chunks(self.n).zip(v) {
            if x == ZERO {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(col) {
                *o += a * x;
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        let cs = n as isize;
        // SAFETY: all three buffers hold n*n elements in column-major layout
        // (row stride 1, column stride n); `Complex<f64>` is `repr(C)` with the
        // same layout as `[f64; 2]`; `out` does not alias the inputs.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                n,
                n,
                n,
                [1.0, 0.0],
                self.data.as_ptr() as *const [f64; 2],
                1,
                cs,
                other.data.as_ptr() as *const [f64; 2],
                1,
                cs,
                [0.0, 0.0],
                out.data.as_mut_ptr() as *mut [f64; 2],
                1,
                cs,
            );
        }
        out
    }

    /// Largest `|self - other|` entry.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|self - diag(d)|` entry.
    pub fn max_abs_diff_diag(&self, d: &[f64]) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for c in 0..n {
            for r in 0..n {
                let target = if r == c { d[r] } else { 0.0 };
                worst = worst.max((self.data[c * n + r] - target).norm());
            }
        }
        worst
    }
}
