//! Dense complex linear algebra sized for the small Hermitian problems that
//! appear in the transceiver design (dimension ≤ 8), and a log-determinant
//! barrier solver for linear objectives under linear matrix inequalities.
//!
//! Everything here is deterministic: eigenvectors and null-space vectors carry
//! a fixed phase convention so downstream beamformers are reproducible.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error(
        "null space is not one-dimensional (|eigenvalues| {smallest:.3e} and {next:.3e}, threshold {threshold:.3e})"
    )]
    DegenerateNullSpace {
        smallest: f64,
        next: f64,
        threshold: f64,
    },
    #[error("no strictly feasible point exists for the LMI program")]
    Infeasible,
    #[error("LMI program is unbounded below")]
    Unbounded,
    #[error("barrier method did not converge within {steps} Newton steps (best value {value:.6e})")]
    NotConverged {
        steps: usize,
        best: Vec<f64>,
        value: f64,
    },
}

// ── Vectors ────────────────────────────────────────────────────────────────

/// Inner product `xᴴ y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

pub fn scale(x: &[C64], s: C64) -> Vec<C64> {
    x.iter().map(|v| v * s).collect()
}

pub fn scale_real(x: &[C64], s: f64) -> Vec<C64> {
    x.iter().map(|v| v * s).collect()
}

pub fn add(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Returns `x / ‖x‖`.
pub fn normalize(x: &[C64]) -> Result<Vec<C64>, NumericsError> {
    let n = norm(x);
    if n == 0.0 || !n.is_finite() {
        return Err(NumericsError::ZeroVector);
    }
    Ok(scale_real(x, 1.0 / n))
}

/// Rotates `x` so its first component with non-negligible magnitude is real
/// and positive.
pub fn fix_phase(x: &mut [C64]) {
    let peak = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return;
    }
    if let Some(first) = x.iter().find(|v| v.norm() > 1e-8 * peak) {
        let phase = first.conj() / first.norm();
        for v in x.iter_mut() {
            *v *= phase;
        }
    }
}

// ── Matrices ───────────────────────────────────────────────────────────────

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let v = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has the wrong length");
        Self {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    /// Outer product `x xᴴ`.
    pub fn outer(x: &[C64]) -> Self {
        Self::from_fn(x.len(), x.len(), |r, c| x[r] * x[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn row(&self, r: usize) -> Vec<C64> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    /// Keeps the first `cols` columns.
    pub fn leading_columns(&self, cols: usize) -> Self {
        Self::from_fn(self.rows, cols.min(self.cols), |r, c| self[(r, c)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other[(k, c)];
                }
            }
        }
        out
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `Aᴴ x`.
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len(), "adjoint_mul_vec dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (r, xr) in x.iter().enumerate() {
            for (c, o) in out.iter_mut().enumerate() {
                *o += self[(r, c)].conj() * xr;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn plus(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn minus(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermitian symmetry to `1e-12` relative to the matrix scale,
    /// then stores the exactly-symmetrized matrix.
    pub fn new(m: CMatrix) -> Result<Self, NumericsError> {
        if !m.is_square() {
            return Err(NumericsError::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        let asymmetry = m.hermitian_asymmetry();
        if !(asymmetry <= HERMITIAN_TOL * m.frobenius_norm().max(1.0)) {
            return Err(NumericsError::NotHermitian { asymmetry });
        }
        Ok(Self::symmetrize(m))
    }

    /// `(M + Mᴴ) / 2` without validation.
    pub fn symmetrize(m: CMatrix) -> Self {
        let n = m.rows;
        let sym = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(m[(r, r)].re, 0.0)
            } else {
                (m[(r, c)] + m[(c, r)].conj()) * 0.5
            }
        });
        Self(sym)
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    /// `x xᴴ`.
    pub fn outer(x: &[C64]) -> Self {
        Self::symmetrize(CMatrix::outer(x))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = CMatrix::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `xᴴ A x`, which is real for Hermitian `A`.
    pub fn quad_form(&self, x: &[C64]) -> f64 {
        dot(x, &self.0.mul_vec(x)).re
    }

    /// `Σ sᵢ Aᵢ`.
    pub fn combination(terms: &[(f64, &HermitianMatrix)]) -> Self {
        let n = terms.first().map_or(0, |(_, m)| m.dim());
        let mut acc = CMatrix::zeros(n, n);
        for (s, m) in terms {
            acc.axpy(*s, &m.0);
        }
        Self(acc)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scaled(s))
    }

    pub fn plus(&self, other: &HermitianMatrix) -> Self {
        Self(self.0.plus(&other.0))
    }

    pub fn minus(&self, other: &HermitianMatrix) -> Self {
        Self(self.0.minus(&other.0))
    }

    /// `Vᴴ A V` for a (possibly rectangular) `V`.
    pub fn congruence(&self, v: &CMatrix) -> Self {
        Self::symmetrize(v.adjoint().matmul(&self.0).matmul(v))
    }

    /// Lower Cholesky factor, or `None` if the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<CMatrix> {
        let n = self.dim();
        let a = &self.0;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = C64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }
}

/// Inverse of a Hermitian positive definite matrix from its Cholesky factor.
fn inverse_from_cholesky(l: &CMatrix) -> CMatrix {
    let n = l.rows;
    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᴴ L⁻¹.
    let mut linv = CMatrix::zeros(n, n);
    for c in 0..n {
        for r in c..n {
            let mut s = if r == c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            for k in c..r {
                s -= l[(r, k)] * linv[(k, c)];
            }
            linv[(r, c)] = s / l[(r, r)];
        }
    }
    linv.adjoint().matmul(&linv)
}

fn log_det_from_cholesky(l: &CMatrix) -> f64 {
    (0..l.rows).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

// ── Jacobi rotations ────────────────────────────────────────────────────────

/// Unitary 2×2 factor `[[u00, u01], [u10, u11]]` that diagonalizes the
/// Hermitian pair block `[[app, apq], [conj(apq), aqq]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let mag = apq.norm();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    [
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        e * (-s),
        e * c,
    ]
}

/// Eigen-decomposition `A = V diag(values) Vᴴ` with eigenvalues ascending and
/// eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
pub fn eigh(a: &HermitianMatrix) -> EigenDecomposition {
    let n = a.dim();
    let mut m = a.0.clone();
    let mut v = CMatrix::identity(n);
    let scale_sq = m.frobenius_norm().powi(2);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off <= 1e-32 * scale_sq || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm_sqr() <= 1e-36 * scale_sq || apq.norm() == 0.0 {
                    continue;
                }
                let u = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, apq);
                apply_right(&mut m, p, q, &u);
                apply_left_adjoint(&mut m, p, q, &u);
                apply_right(&mut v, p, q, &u);
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| {
            let mut col = v.column(i);
            fix_phase(&mut col);
            col
        })
        .collect();
    EigenDecomposition {
        values,
        vectors: CMatrix::from_columns(&columns),
    }
}

/// `M ← M U` on columns `p`, `q`.
fn apply_right(m: &mut CMatrix, p: usize, q: usize, u: &[C64; 4]) {
    for k in 0..m.rows {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * u[0] + mq * u[2];
        m[(k, q)] = mp * u[1] + mq * u[3];
    }
}

/// `M ← Uᴴ M` on rows `p`, `q`.
fn apply_left_adjoint(m: &mut CMatrix, p: usize, q: usize, u: &[C64; 4]) {
    for k in 0..m.cols {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = u[0].conj() * mp + u[2].conj() * mq;
        m[(q, k)] = u[1].conj() * mp + u[3].conj() * mq;
    }
}

/// Largest eigenvalue. Rejects inputs that are not Hermitian.
pub fn max_eigenvalue(a: &CMatrix) -> Result<f64, NumericsError> {
    let h = HermitianMatrix::new(a.clone())?;
    Ok(max_eigenvalue_hermitian(&h))
}

pub fn max_eigenvalue_hermitian(a: &HermitianMatrix) -> f64 {
    match a.dim() {
        1 => return a.0[(0, 0)].re,
        2 => {
            let (p, q, off) = (a.0[(0, 0)].re, a.0[(1, 1)].re, a.0[(0, 1)]);
            let half = 0.5 * (p - q);
            return 0.5 * (p + q) + half.hypot(off.norm());
        }
        _ => {}
    }
    *eigh(a).values.last().expect("nonempty matrix")
}

/// Unit vector spanning the one-dimensional null space of `a`, where an
/// eigenvalue counts as zero when its magnitude is at most `tol·‖a‖_F`.
pub fn null_space_unit_vector(a: &HermitianMatrix, tol: f64) -> Result<Vec<C64>, NumericsError> {
    null_space_unit_vector_scaled(a, tol, a.frobenius_norm())
}

/// As [`null_space_unit_vector`], with an explicit reference scale for the
/// zero threshold.
pub fn null_space_unit_vector_scaled(
    a: &HermitianMatrix,
    tol: f64,
    reference: f64,
) -> Result<Vec<C64>, NumericsError> {
    let eig = eigh(a);
    let threshold = tol * reference;
    let mut by_magnitude: Vec<usize> = (0..eig.values.len()).collect();
    by_magnitude.sort_by(|&i, &j| eig.values[i].abs().total_cmp(&eig.values[j].abs()));
    let smallest = eig.values[by_magnitude[0]].abs();
    let next = by_magnitude
        .get(1)
        .map_or(f64::INFINITY, |&i| eig.values[i].abs());
    if smallest > threshold || next <= threshold {
        return Err(NumericsError::DegenerateNullSpace {
            smallest,
            next,
            threshold,
        });
    }
    let mut v = eig.vector(by_magnitude[0]);
    fix_phase(&mut v);
    Ok(v)
}

// ── Projections and null spaces ────────────────────────────────────────────

/// Orthogonal projection of `x` onto the span of `y`.
pub fn project_onto(x: &[C64], y: &[C64]) -> Result<Vec<C64>, NumericsError> {
    let yy = norm_sqr(y);
    if yy == 0.0 {
        return Err(NumericsError::ZeroVector);
    }
    Ok(scale(y, dot(y, x) / yy))
}

/// Projection of `x` onto the orthogonal complement of the span of `y`.
pub fn project_orth(x: &[C64], y: &[C64]) -> Result<Vec<C64>, NumericsError> {
    Ok(sub(x, &project_onto(x, y)?))
}

/// Orthonormal basis (as columns of an `M × (M−1)` matrix) of the vectors `v`
/// with `hᴴ v = 0`, taken from the Householder reflector that maps `h` onto
/// a multiple of the first unit vector.
pub fn null_space_of_row(h: &[C64]) -> Result<CMatrix, NumericsError> {
    let m = h.len();
    if m < 2 {
        return Err(NumericsError::Dimension(format!(
            "null space of a row needs length ≥ 2, got {m}"
        )));
    }
    let hn = norm(h);
    if hn == 0.0 {
        return Err(NumericsError::ZeroVector);
    }
    let phase = if h[0].norm() > 0.0 {
        h[0] / h[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    // v = h + phase·‖h‖·e₁ ; Q = I − 2 v vᴴ / ‖v‖² is unitary, Hermitian,
    // and Q h = −phase·‖h‖·e₁, so columns 2..M of Q are orthogonal to h.
    let mut v = h.to_vec();
    v[0] += phase * hn;
    let vv = norm_sqr(&v);
    let q = CMatrix::from_fn(m, m, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        C64::new(id, 0.0) - v[r] * v[c].conj() * (2.0 / vv)
    });
    let columns: Vec<Vec<C64>> = (1..m)
        .map(|c| {
            let mut col = q.column(c);
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(CMatrix::from_columns(&columns))
}

/// Thin singular value decomposition `A = U diag(s) Vᴴ` with singular values
/// in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &CMatrix) -> Svd {
    let (rows, cols) = (a.rows, a.cols);
    let mut g = a.clone();
    let mut v = CMatrix::identity(cols);
    let scale_sq = a.frobenius_norm().powi(2).max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let gp = g.column(p);
                let gq = g.column(q);
                let alpha = norm_sqr(&gp);
                let beta = norm_sqr(&gq);
                let gamma = dot(&gp, &gq);
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm_sqr() <= 1e-36 * scale_sq * scale_sq {
                    continue;
                }
                rotated = true;
                let u = jacobi_rotation(alpha, beta, gamma);
                apply_right(&mut g, p, q, &u);
                apply_right(&mut v, p, q, &u);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|c| norm(&g.column(c))).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let k = rows.min(cols);
    let mut u_cols = Vec::with_capacity(k);
    let mut v_cols = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let s = norms[c];
        let mut vc = v.column(c);
        let mut uc = if s > 0.0 {
            scale_real(&g.column(c), 1.0 / s)
        } else {
            vec![C64::new(0.0, 0.0); rows]
        };
        // Fix the phase on the right vector and carry it to the left one.
        let peak = vc.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if let Some(first) = vc.iter().find(|z| z.norm() > 1e-8 * peak).copied() {
            let ph = first.conj() / first.norm();
            vc.iter_mut().for_each(|z| *z *= ph);
            uc.iter_mut().for_each(|z| *z *= ph);
        }
        values.push(s);
        u_cols.push(uc);
        v_cols.push(vc);
    }
    Svd {
        u: CMatrix::from_columns(&u_cols),
        singular_values: values,
        v: CMatrix::from_columns(&v_cols),
    }
}

// ── Scalar minimization ────────────────────────────────────────────────────

/// Golden-section search for the minimizer of a unimodal `f` on `[a, b]`,
/// returning `(x, f(x))`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// ── LMI barrier solver ─────────────────────────────────────────────────────

/// Affine Hermitian-valued map `F(x) = F₀ + Σⱼ xⱼ Fⱼ`.
#[derive(Debug, Clone)]
pub struct AffineHermitian {
    constant: HermitianMatrix,
    coefficients: Vec<HermitianMatrix>,
}

impl AffineHermitian {
    pub fn new(
        constant: HermitianMatrix,
        coefficients: Vec<HermitianMatrix>,
    ) -> Result<Self, NumericsError> {
        let k = constant.dim();
        if let Some(bad) = coefficients.iter().find(|c| c.dim() != k) {
            return Err(NumericsError::Dimension(format!(
                "affine block mixes {k}x{k} and {0}x{0} terms",
                bad.dim()
            )));
        }
        Ok(Self {
            constant,
            coefficients,
        })
    }

    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    pub fn num_vars(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval(&self, x: &[f64]) -> HermitianMatrix {
        let mut acc = self.constant.0.clone();
        for (xj, fj) in x.iter().zip(&self.coefficients) {
            if *xj != 0.0 {
                acc.axpy(*xj, &fj.0);
            }
        }
        HermitianMatrix(acc)
    }
}

/// `minimize cᵀx + offset  s.t.  Fᵢ(x) ⪯ 0,  xⱼ ≥ lⱼ` (where a bound is given).
#[derive(Debug, Clone)]
pub struct LmiProgram {
    pub objective: Vec<f64>,
    pub offset: f64,
    pub blocks: Vec<AffineHermitian>,
    pub lower_bounds: Vec<Option<f64>>,
}

impl LmiProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest eigenvalue over all blocks and the largest bound violation.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for b in &self.blocks {
            worst = worst.max(max_eigenvalue_hermitian(&b.eval(x)));
        }
        for (xj, lb) in x.iter().zip(&self.lower_bounds) {
            if let Some(l) = lb {
                worst = worst.max(l - xj);
            }
        }
        worst
    }

    fn barrier_parameter(&self) -> f64 {
        let blocks: usize = self.blocks.iter().map(AffineHermitian::dim).sum();
        let bounds = self.lower_bounds.iter().filter(|b| b.is_some()).count();
        (blocks + bounds) as f64
    }

    fn validate(&self) -> Result<(), NumericsError> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n || self.blocks.iter().any(|b| b.num_vars() != n) {
            return Err(NumericsError::Dimension(format!(
                "LMI program with {n} variables has inconsistent blocks or bounds"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective value at the end of each centering step.
    pub trace: Vec<f64>,
    pub newton_steps: usize,
}

const MAX_NEWTON_STEPS: usize = 3000;
const MAX_CENTERING_STEPS: usize = 200;
const BARRIER_SHRINK: f64 = 0.2;
const UNBOUNDED_NORM: f64 = 1e13;

/// Barrier value, gradient and Hessian at a strictly feasible point.
struct BarrierEval {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

/// Strict-feasibility check returning the barrier value, or `None`.
fn barrier_value(prog: &LmiProgram, x: &[f64], tau: f64) -> Option<f64> {
    let mut value = tau * prog.value(x);
    for (xj, lb) in x.iter().zip(&prog.lower_bounds) {
        if let Some(l) = lb {
            let d = xj - l;
            if !(d > 0.0) {
                return None;
            }
            value -= d.ln();
        }
    }
    for b in &prog.blocks {
        let g = b.eval(x).scaled(-1.0);
        let l = g.cholesky()?;
        value -= log_det_from_cholesky(&l);
    }
    value.is_finite().then_some(value)
}

fn barrier_eval(prog: &LmiProgram, x: &[f64], tau: f64) -> Option<BarrierEval> {
    let n = prog.num_vars();
    let value = barrier_value(prog, x, tau)?;
    let mut grad: Vec<f64> = prog.objective.iter().map(|c| tau * c).collect();
    let mut hess = vec![0.0; n * n];
    for (j, (xj, lb)) in x.iter().zip(&prog.lower_bounds).enumerate() {
        if let Some(l) = lb {
            let d = xj - l;
            grad[j] -= 1.0 / d;
            hess[j * n + j] += 1.0 / (d * d);
        }
    }
    for b in &prog.blocks {
        // G = −F(x) ≻ 0; −log det G has gradient Tr(G⁻¹ Fⱼ) and Hessian
        // Tr(G⁻¹ Fᵢ G⁻¹ Fⱼ).
        let g = b.eval(x).scaled(-1.0);
        let l = g.cholesky()?;
        let ginv = inverse_from_cholesky(&l);
        let y: Vec<CMatrix> = b.coefficients.iter().map(|f| ginv.matmul(&f.0)).collect();
        let k = b.dim();
        for i in 0..n {
            grad[i] += y[i].trace().re;
            for j in i..n {
                let mut s = 0.0;
                for r in 0..k {
                    for c in 0..k {
                        s += (y[i][(r, c)] * y[j][(c, r)]).re;
                    }
                }
                hess[i * n + j] += s;
                if i != j {
                    hess[j * n + i] += s;
                }
            }
        }
    }
    Some(BarrierEval { value, grad, hess })
}

/// Solves `H d = −g` for symmetric positive (semi)definite `H` with Jacobi
/// scaling, adding a small ridge if the factorization breaks down.
fn newton_direction(hess: &[f64], grad: &[f64]) -> Option<Vec<f64>> {
    let n = grad.len();
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let h = hess[i * n + i];
            if h > 0.0 {
                1.0 / h.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = d[i] * hess[i * n + j] * d[j];
            }
            a[i * n + i] += ridge;
        }
        if let Some(sol) = cholesky_solve(&mut a, n, &grad.iter().zip(&d).map(|(g, s)| -g * s).collect::<Vec<_>>()) {
            return Some(sol.iter().zip(&d).map(|(y, s)| y * s).collect());
        }
        ridge = if ridge == 0.0 { 1e-14 } else { ridge * 100.0 };
    }
    None
}

fn cholesky_solve(a: &mut [f64], n: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut dj = a[j * n + j];
        for k in 0..j {
            dj -= a[j * n + k] * a[j * n + k];
        }
        if !(dj > 0.0) {
            return None;
        }
        let dj = dj.sqrt();
        a[j * n + j] = dj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / dj;
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i * n + k] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= a[k * n + i] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    y.iter().all(|v| v.is_finite()).then_some(y)
}

enum CenterOutcome {
    Centered,
    EarlyStop,
}

/// Damped Newton minimization of the barrier function at fixed `tau`.
fn center(
    prog: &LmiProgram,
    x: &mut Vec<f64>,
    tau: f64,
    steps: &mut usize,
    scale_ref: f64,
    stop: &dyn Fn(&[f64]) -> bool,
) -> Result<CenterOutcome, NumericsError> {
    for _ in 0..MAX_CENTERING_STEPS {
        if stop(x) {
            return Ok(CenterOutcome::EarlyStop);
        }
        *steps += 1;
        if *steps > MAX_NEWTON_STEPS {
            return Err(NumericsError::NotConverged {
                steps: *steps,
                value: prog.value(x),
                best: x.clone(),
            });
        }
        let eval = barrier_eval(prog, x, tau).ok_or(NumericsError::NotConverged {
            steps: *steps,
            value: prog.value(x),
            best: x.clone(),
        })?;
        let Some(dir) = newton_direction(&eval.hess, &eval.grad) else {
            return Ok(CenterOutcome::Centered);
        };
        let slope: f64 = eval.grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let decrement_sq = -slope;
        if !(decrement_sq > 1e-9) {
            return Ok(CenterOutcome::Centered);
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
            if let Some(v) = barrier_value(prog, &trial, tau) {
                if v <= eval.value + 0.25 * alpha * slope {
                    *x = trial;
                    accepted = v < eval.value - 8.0 * f64::EPSILON * eval.value.abs();
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            // No decrease possible at working precision.
            return Ok(CenterOutcome::Centered);
        }
        let size = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if size > UNBOUNDED_NORM * scale_ref {
            return Err(NumericsError::Unbounded);
        }
    }
    Ok(CenterOutcome::Centered)
}

fn strictly_feasible(prog: &LmiProgram, x: &[f64]) -> bool {
    barrier_value(prog, x, 0.0).is_some()
}

/// Phase one: finds a strictly feasible point by minimizing a shared slack
/// `r` with `Fᵢ(x) ⪯ r·I` and `lⱼ − xⱼ ≤ r`, stopping once `r < 0`.
fn restore_feasibility(prog: &LmiProgram, start: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let n = prog.num_vars();
    let mut blocks = Vec::with_capacity(prog.blocks.len() + n);
    for b in &prog.blocks {
        let mut coeffs = b.coefficients.clone();
        coeffs.push(HermitianMatrix::identity(b.dim()).scaled(-1.0));
        blocks.push(AffineHermitian::new(b.constant.clone(), coeffs)?);
    }
    for (j, lb) in prog.lower_bounds.iter().enumerate() {
        if let Some(l) = lb {
            let mut coeffs = vec![HermitianMatrix::zeros(1); n + 1];
            coeffs[j] = HermitianMatrix::from_real_diagonal(&[-1.0]);
            coeffs[n] = HermitianMatrix::from_real_diagonal(&[-1.0]);
            blocks.push(AffineHermitian::new(
                HermitianMatrix::from_real_diagonal(&[*l]),
                coeffs,
            )?);
        }
    }
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lower_bounds = vec![None; n + 1];
    let r0 = prog.max_violation(start);
    let floor = -1.0 - r0.abs();
    lower_bounds[n] = Some(floor);
    let phase_one = LmiProgram {
        objective,
        offset: 0.0,
        blocks,
        lower_bounds,
    };
    let mut x0 = start.to_vec();
    x0.push(r0 + 1.0 + 0.1 * r0.abs());
    let stop = |x: &[f64]| x[n] < 0.0 && strictly_feasible(prog, &x[..n]);
    let sol = run_barrier(&phase_one, x0, 1e-9, &stop)?;
    let candidate = sol.x[..n].to_vec();
    if strictly_feasible(prog, &candidate) {
        Ok(candidate)
    } else {
        Err(NumericsError::Infeasible)
    }
}

fn run_barrier(
    prog: &LmiProgram,
    start: Vec<f64>,
    tol: f64,
    stop: &dyn Fn(&[f64]) -> bool,
) -> Result<LmiSolution, NumericsError> {
    let theta = prog.barrier_parameter().max(1.0);
    let mut x = start;
    let scale_ref = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut tau = theta / (prog.value(&x).abs() + 1.0);
    let mut steps = 0;
    let mut trace = Vec::new();
    loop {
        let outcome = center(prog, &mut x, tau, &mut steps, scale_ref, stop)?;
        let value = prog.value(&x);
        trace.push(value);
        if matches!(outcome, CenterOutcome::EarlyStop) || theta / tau <= tol * (1.0 + value.abs()) {
            return Ok(LmiSolution {
                x,
                value,
                trace,
                newton_steps: steps,
            });
        }
        if trace.len() > 200 {
            return Err(NumericsError::NotConverged {
                steps,
                value,
                best: x,
            });
        }
        tau /= BARRIER_SHRINK;
    }
}

/// Minimizes an [`LmiProgram`] with a log-determinant barrier on every block
/// and a damped Newton inner loop; the barrier weight shrinks by 0.2 per
/// outer step until the duality-gap bound is below `tol·(1 + |value|)`.
///
/// If `start` is not strictly feasible a phase-one problem is solved first.
pub fn solve_lmi(prog: &LmiProgram, start: &[f64], tol: f64) -> Result<LmiSolution, NumericsError> {
    prog.validate()?;
    if start.len() != prog.num_vars() {
        return Err(NumericsError::Dimension(format!(
            "start has {} entries, program has {} variables",
            start.len(),
            prog.num_vars()
        )));
    }
    let x0 = if strictly_feasible(prog, start) {
        start.to_vec()
    } else {
        restore_feasibility(prog, start)?
    };
    run_barrier(prog, x0, tol, &|_| false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn herm(rows: &[&[C64]]) -> HermitianMatrix {
        let n = rows.len();
        let data: Vec<C64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        HermitianMatrix::new(CMatrix::from_row_slice(n, n, &data)).unwrap()
    }

    #[test]
    fn max_eigenvalue_of_diagonal() {
        let a = HermitianMatrix::from_real_diagonal(&[-1.0, -2.0]);
        assert_eq!(max_eigenvalue_hermitian(&a), -1.0);
    }

    #[test]
    fn max_eigenvalue_of_swap() {
        let a = herm(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        assert!((max_eigenvalue_hermitian(&a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(max_eigenvalue(&m), Err(NumericsError::NotHermitian { .. })));
    }

    #[test]
    fn null_space_of_diagonals() {
        let a = HermitianMatrix::from_real_diagonal(&[-1.0, 0.0]);
        let v = null_space_unit_vector(&a, 1e-12).unwrap();
        assert!((v[0].norm()) < 1e-15 && (v[1] - c(1.0, 0.0)).norm() < 1e-15);

        let a = HermitianMatrix::from_real_diagonal(&[0.0, -3.0, -5.0]);
        let v = null_space_unit_vector(&a, 1e-12).unwrap();
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_null_space_is_reported() {
        let a = HermitianMatrix::from_real_diagonal(&[0.0, 0.0, -1.0]);
        assert!(matches!(
            null_space_unit_vector(&a, 1e-9),
            Err(NumericsError::DegenerateNullSpace { .. })
        ));
        let a = HermitianMatrix::from_real_diagonal(&[-2.0, -1.0]);
        assert!(null_space_unit_vector(&a, 1e-9).is_err());
    }

    #[test]
    fn projections_of_parallel_and_orthogonal_vectors() {
        let y = vec![c(1.0, 1.0), c(0.0, 2.0)];
        let x = scale(&y, c(0.5, -2.0));
        assert!(norm(&sub(&project_onto(&x, &y).unwrap(), &x)) < 1e-14);
        assert!(norm(&project_orth(&x, &y).unwrap()) < 1e-14);

        let y = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let x = vec![c(0.0, 0.0), c(3.0, -1.0)];
        assert!(norm(&project_onto(&x, &y).unwrap()) < 1e-15);
        assert_eq!(project_orth(&x, &y).unwrap(), x);
        assert_eq!(project_onto(&x, &[c(0.0, 0.0); 2]), Err(NumericsError::ZeroVector));
    }

    #[test]
    fn null_space_of_simple_rows() {
        let v = null_space_of_row(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!((v.rows(), v.cols()), (2, 1));
        assert!(v[(0, 0)].norm() < 1e-15 && (v[(1, 0)].norm() - 1.0).abs() < 1e-15);

        let s = 0.5f64.sqrt();
        let v = null_space_of_row(&[c(s, 0.0), c(s, 0.0)]).unwrap();
        assert!((v[(0, 0)] + v[(1, 0)]).norm() < 1e-15);
        assert!(null_space_of_row(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn lmi_single_variable() {
        // minimize λ s.t. (1 − λ) I ⪯ 0, λ ≥ 0
        let prog = LmiProgram {
            objective: vec![1.0],
            offset: 0.0,
            blocks: vec![AffineHermitian::new(
                HermitianMatrix::identity(2),
                vec![HermitianMatrix::identity(2).scaled(-1.0)],
            )
            .unwrap()],
            lower_bounds: vec![Some(0.0)],
        };
        let sol = solve_lmi(&prog, &[3.0], 1e-10).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-8, "{:?}", sol.x);
        assert!((sol.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lmi_separable_with_phase_one() {
        // minimize λ₁ + λ₂ s.t. diag(2 − λ₁, 3 − λ₂) ⪯ 0; start infeasible.
        let prog = LmiProgram {
            objective: vec![1.0, 1.0],
            offset: 0.0,
            blocks: vec![AffineHermitian::new(
                HermitianMatrix::from_real_diagonal(&[2.0, 3.0]),
                vec![
                    HermitianMatrix::from_real_diagonal(&[-1.0, 0.0]),
                    HermitianMatrix::from_real_diagonal(&[0.0, -1.0]),
                ],
            )
            .unwrap()],
            lower_bounds: vec![None, None],
        };
        let sol = solve_lmi(&prog, &[0.0, 0.0], 1e-10).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-8 && (sol.x[1] - 3.0).abs() < 1e-8);
        assert!((sol.value - 5.0).abs() < 1e-8);
        assert!(sol.trace.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn lmi_infeasible_and_unbounded() {
        // x ≤ −1 and x ≥ 0 cannot both hold.
        let prog = LmiProgram {
            objective: vec![1.0],
            offset: 0.0,
            blocks: vec![AffineHermitian::new(
                HermitianMatrix::from_real_diagonal(&[1.0]),
                vec![HermitianMatrix::from_real_diagonal(&[1.0])],
            )
            .unwrap()],
            lower_bounds: vec![Some(0.0)],
        };
        assert_eq!(solve_lmi(&prog, &[1.0], 1e-9).unwrap_err(), NumericsError::Infeasible);

        // minimize −x s.t. x ≥ 0 only.
        let prog = LmiProgram {
            objective: vec![-1.0],
            offset: 0.0,
            blocks: vec![],
            lower_bounds: vec![Some(0.0)],
        };
        assert_eq!(solve_lmi(&prog, &[1.0], 1e-9).unwrap_err(), NumericsError::Unbounded);
    }
}
