//! Dense and structured kernels: tridiagonal characteristic polynomials,
//! a cyclic Jacobi eigensolver for Hermitian matrices, closed-form entries of
//! inverse tridiagonal matrices and a one-sided Jacobi null-direction finder.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum number of Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Off-diagonal convergence threshold relative to the Frobenius norm.
pub const JACOBI_REL_TOL: f64 = 1e-14;

const RESCALE_THRESHOLD: f64 = 1e150;

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal. An order-zero matrix is the empty matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        let expected = diag.len().saturating_sub(1);
        if offdiag.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "tridiagonal of order {} needs {} off-diagonal entries, got {}",
                diag.len(),
                expected,
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let e: f64 = self.offdiag.iter().map(|x| x * x).sum();
        (d + 2.0 * e).sqrt()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(v.len(), n, "vector length must match matrix order");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Contiguous principal sub-block on rows `start..end` (0-based, half open).
    pub fn sub_block(&self, start: usize, end: usize) -> SymTridiag {
        if end <= start {
            return SymTridiag::empty();
        }
        SymTridiag {
            diag: self.diag[start..end].to_vec(),
            offdiag: self.offdiag[start..end - 1].to_vec(),
        }
    }

    pub fn to_dense(&self) -> HermitianDense {
        let n = self.order();
        let mut m = HermitianDense::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(self.diag[i], 0.0));
        }
        for (i, &e) in self.offdiag.iter().enumerate() {
            m.set_pair(i, i + 1, Complex64::new(e, 0.0));
        }
        m
    }
}

/// Dense Hermitian matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianDense {
    order: usize,
    entries: Vec<Complex64>,
}

impl HermitianDense {
    /// Wraps row-major entries. Hermiticity is checked by [`hermitian_eig`],
    /// not here.
    pub fn new(order: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "order {} needs {} entries, got {}",
                order,
                order * order,
                entries.len()
            )));
        }
        Ok(Self { order, entries })
    }

    pub fn from_real(order: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            order,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![Complex64::new(0.0, 0.0); order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.order + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.order + col] = value;
    }

    /// Sets `a[row][col] = value` and `a[col][row] = conj(value)`.
    pub fn set_pair(&mut self, row: usize, col: usize, value: Complex64) {
        self.set(row, col, value);
        self.set(col, row, value.conj());
    }

    /// Adds `value` at `(row, col)` and its conjugate at `(col, row)`.
    pub fn add_pair(&mut self, row: usize, col: usize, value: Complex64) {
        let n = self.order;
        self.entries[row * n + col] += value;
        if row != col {
            self.entries[col * n + row] += value.conj();
        } else {
            self.entries[row * n + col] += value.conj();
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn conj_transpose(&self) -> HermitianDense {
        let n = self.order;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Largest `|a[r][c] - conj(a[c][r])|` together with its location.
    pub fn max_asymmetry(&self) -> (usize, usize, f64) {
        let n = self.order;
        let mut worst = (0, 0, 0.0);
        for r in 0..n {
            for c in r..n {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                if d > worst.2 {
                    worst = (r, c, d);
                }
            }
        }
        worst
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.order;
        assert_eq!(v.len(), n, "vector length must match matrix order");
        (0..n)
            .map(|r| {
                self.entries[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    pub fn matvec_real(&self, v: &[f64]) -> Vec<f64> {
        let n = self.order;
        assert_eq!(v.len(), n, "vector length must match matrix order");
        (0..n)
            .map(|r| {
                self.entries[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a.re * x)
                    .sum()
            })
            .collect()
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Real parts of the `i`-th eigenvector.
    pub fn real_vector(&self, i: usize) -> Vec<f64> {
        self.vectors[i].iter().map(|z| z.re).collect()
    }
}

/// Characteristic value `det(T - lambda I)` as `mantissa * 2^exp2`.
///
/// The three-term recurrence `p_s = (d_s - lambda) p_{s-1} - e_{s-1}^2 p_{s-2}`
/// is rescaled by powers of two whenever `|p_s|` exceeds 1e150, so the split
/// representation never overflows for any practical order.
pub fn tridiag_char_scaled(t: &SymTridiag, lambda: f64) -> (f64, i32) {
    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut exp2 = 0_i32;
    for (s, &d) in t.diag.iter().enumerate() {
        let e2 = if s > 0 {
            t.offdiag[s - 1] * t.offdiag[s - 1]
        } else {
            0.0
        };
        let next = (d - lambda) * cur - e2 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_THRESHOLD {
            let shift = cur.abs().log2().floor() as i32;
            cur = ldexp(cur, -shift);
            prev = ldexp(prev, -shift);
            exp2 += shift;
        }
    }
    (cur, exp2)
}

/// `det(T - lambda I)`, with `1` for the empty matrix.
pub fn tridiag_char(t: &SymTridiag, lambda: f64) -> f64 {
    let (m, e) = tridiag_char_scaled(t, lambda);
    ldexp(m, e)
}

pub(crate) fn ldexp(x: f64, exp: i32) -> f64 {
    // Split so that 2^exp never overflows on its own.
    let mut x = x;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Singularity guard for `det(T - lambda I)`:
/// `1e-10 (1 + |lambda|)^(order+1) prod_i max(1, row_scale_i)`, where the
/// row scale is the absolute row sum of `T`.
pub fn degeneracy_guard(t: &SymTridiag, lambda: f64) -> f64 {
    let n = t.order();
    let mut g = 1e-10 * (1.0 + lambda.abs()).powi(n as i32 + 1);
    for i in 0..n {
        let mut row = t.diag[i].abs();
        if i > 0 {
            row += t.offdiag[i - 1].abs();
        }
        if i + 1 < n {
            row += t.offdiag[i].abs();
        }
        g *= row.max(1.0);
    }
    g
}

/// Entry `(row, col)` (0-based) of `(T - lambda I)^{-1}` from leading and
/// trailing principal minors:
///
/// `P[i][j] = (-1)^{i+j} theta_i e_i ... e_{j-1} phi_{j+1} / theta_n` for `i <= j`,
///
/// where `theta_i` is the determinant of the leading `i x i` block and
/// `phi_{j+1}` that of the trailing block starting at row `j + 1`.
pub fn inverse_tridiag_entry(t: &SymTridiag, lambda: f64, row: usize, col: usize) -> Result<f64> {
    let n = t.order();
    if row >= n || col >= n {
        return Err(Error::DimensionMismatch(format!(
            "index ({row}, {col}) outside order {n}"
        )));
    }
    let full = tridiag_char(t, lambda);
    let guard = degeneracy_guard(t, lambda);
    if !(full.abs() > guard) {
        return Err(Error::SingularShift {
            lambda,
            det: full,
            guard,
        });
    }
    let (i, j) = if row <= col { (row, col) } else { (col, row) };
    let leading = tridiag_char(&t.sub_block(0, i), lambda);
    let trailing = tridiag_char(&t.sub_block(j + 1, n), lambda);
    let couplings: f64 = t.offdiag[i..j].iter().product();
    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * leading * couplings * trailing / full)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// `tol` bounds the admissible asymmetry relative to `max(1, ||M||_F)`.
/// Real input takes a purely real rotation path.
pub fn hermitian_eig(m: &HermitianDense, tol: f64) -> Result<EigenDecomposition> {
    let n = m.order();
    let norm = m.frobenius_norm();
    let (row, col, asym) = m.max_asymmetry();
    if asym > tol * norm.max(1.0) {
        return Err(Error::NonHermitianInput {
            row,
            col,
            asymmetry: asym,
        });
    }
    for i in 0..n {
        if m.get(i, i).im.abs() > tol * norm.max(1.0) {
            return Err(Error::NonHermitianInput {
                row: i,
                col: i,
                asymmetry: 2.0 * m.get(i, i).im.abs(),
            });
        }
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let (values, vectors) = if m.is_real() {
        let a: Vec<f64> = m.entries().iter().map(|z| z.re).collect();
        let (vals, vecs) = jacobi_real(n, a, norm)?;
        let vecs = vecs
            .into_iter()
            .map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect();
        (vals, vecs)
    } else {
        jacobi_complex(n, m.entries().to_vec(), norm)?
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(EigenDecomposition {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
    })
}

fn rotation(app: f64, aqq: f64, apq_abs: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * apq_abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    (t, c, t * c)
}

#[allow(clippy::type_complexity)]
fn jacobi_real(n: usize, mut a: Vec<f64>, norm: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    // v is stored column-major: v[col * n + row]
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = JACOBI_REL_TOL * norm;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };
    let mut sweeps = 0;
    loop {
        let off_norm = off(&a);
        if off_norm <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let (t, c, s) = rotation(app, aqq, apq.abs());
                let (t, s) = if apq < 0.0 { (-t, -s) } else { (t, s) };
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[p * n + r];
                    let vrq = v[q * n + r];
                    v[p * n + r] = c * vrp - s * vrq;
                    v[q * n + r] = s * vrp + c * vrq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    let vectors = (0..n).map(|c| v[c * n..(c + 1) * n].to_vec()).collect();
    Ok((values, vectors))
}

#[allow(clippy::type_complexity)]
fn jacobi_complex(
    n: usize,
    mut a: Vec<Complex64>,
    norm: f64,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let threshold = JACOBI_REL_TOL * norm;
    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };
    let mut sweeps = 0;
    loop {
        let off_norm = off(&a);
        if off_norm <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Column q is first rephased by conj(apq)/|apq| so the pivot
                // becomes real, then a real rotation clears it.
                let phase = apq.conj() / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let (t, c, s) = rotation(app, aqq, r);
                a[p * n + p] = Complex64::new(app - t * r, 0.0);
                a[q * n + q] = Complex64::new(aqq + t * r, 0.0);
                a[p * n + q] = zero;
                a[q * n + p] = zero;
                for row in 0..n {
                    if row == p || row == q {
                        continue;
                    }
                    let arp = a[row * n + p];
                    let arq = a[row * n + q] * phase;
                    let new_rp = arp * c - arq * s;
                    let new_rq = arp * s + arq * c;
                    a[row * n + p] = new_rp;
                    a[p * n + row] = new_rp.conj();
                    a[row * n + q] = new_rq;
                    a[q * n + row] = new_rq.conj();
                }
                for row in 0..n {
                    let vrp = v[p * n + row];
                    let vrq = v[q * n + row] * phase;
                    v[p * n + row] = vrp * c - vrq * s;
                    v[q * n + row] = vrp * s + vrq * c;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i].re).collect();
    let vectors = (0..n).map(|c| v[c * n..(c + 1) * n].to_vec()).collect();
    Ok((values, vectors))
}

/// Solves `(T - sigma I) x = b` in place by Gaussian elimination with
/// partial pivoting on the tridiagonal band. Exactly zero pivots are
/// replaced by `tiny`, which is what inverse iteration wants.
fn shifted_tridiag_solve(t: &SymTridiag, sigma: f64, tiny: f64, b: &mut [f64]) {
    let n = t.order();
    let mut d: Vec<f64> = t.diag().iter().map(|x| x - sigma).collect();
    let mut du: Vec<f64> = t.offdiag().to_vec();
    let mut dl: Vec<f64> = t.offdiag().to_vec();
    // After elimination dl[i] holds the second superdiagonal fill.
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
    }
    if n == 0 {
        return;
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
}

/// Unit eigenvector of `T` for the eigenvalue closest to `lambda`, by a few
/// steps of inverse iteration. Intended for well-separated eigenvalues that
/// are already known to working precision.
pub fn tridiag_eigvec_near(t: &SymTridiag, lambda: f64) -> Vec<f64> {
    let n = t.order();
    let tiny = f64::EPSILON * (1.0 + t.frobenius_norm());
    // Fixed, generic start vector so results are reproducible.
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin())
        .collect();
    for _ in 0..4 {
        shifted_tridiag_solve(t, lambda, tiny, &mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// Right singular direction of the smallest singular value of a real
/// `rows x cols` matrix (row-major), via one-sided Jacobi. Returns the unit
/// direction and the singular value.
pub fn smallest_singular_direction(
    rows: usize,
    cols: usize,
    entries: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if entries.len() != rows * cols || cols == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    // u holds the columns of A V, column-major; v the accumulated rotations.
    let mut u = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            u[c * rows + r] = entries[r * cols + c];
        }
    }
    let mut v = vec![0.0; cols * cols];
    for i in 0..cols {
        v[i * cols + i] = 1.0;
    }
    let frob = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
    let negligible = (f64::EPSILON * frob).powi(2);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..rows {
                    let x = u[i * rows + r];
                    let y = u[j * rows + r];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0
                    || alpha <= negligible
                    || beta <= negligible
                    || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let x = u[i * rows + r];
                    let y = u[j * rows + r];
                    u[i * rows + r] = c * x - s * y;
                    u[j * rows + r] = s * x + c * y;
                }
                for r in 0..cols {
                    let x = v[i * cols + r];
                    let y = v[j * cols + r];
                    v[i * cols + r] = c * x - s * y;
                    v[j * cols + r] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    let norms: Vec<f64> = (0..cols)
        .map(|c| {
            u[c * rows..(c + 1) * rows]
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    if !converged {
        let off_norm = norms.iter().cloned().fold(0.0, f64::max);
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm,
        });
    }
    let best = (0..cols)
        .min_by(|&a, &b| norms[a].total_cmp(&norms[b]))
        .expect("cols > 0");
    Ok((v[best * cols..(best + 1) * cols].to_vec(), norms[best]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_iteration_finds_nearest_vector() {
        let t = SymTridiag::new(vec![0.0; 5], vec![1.0; 4]).unwrap();
        let lambda = 2.0 * (std::f64::consts::PI / 6.0).cos();
        let x = tridiag_eigvec_near(&t, lambda);
        let r: f64 = t
            .matvec(&x)
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(r < 1e-13);
    }

    #[test]
    fn pivoted_solve_matches_dense() {
        let t = SymTridiag::new(vec![0.1, -2.0, 0.3, 1.0], vec![3.0, 0.5, -4.0]).unwrap();
        let mut b = vec![1.0, 2.0, -1.0, 0.5];
        let rhs = b.clone();
        shifted_tridiag_solve(&t, 0.2, 1e-300, &mut b);
        let back: Vec<f64> = t
            .matvec(&b)
            .iter()
            .zip(&b)
            .map(|(a, x)| a - 0.2 * x)
            .collect();
        for (x, y) in back.iter().zip(&rhs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_determinant_is_one() {
        assert_eq!(tridiag_char(&SymTridiag::empty(), 5.0), 1.0);
    }

    #[test]
    fn one_by_one_zero() {
        let t = SymTridiag::new(vec![0.0], vec![]).unwrap();
        assert_eq!(tridiag_char(&t, 0.0), 0.0);
    }

    #[test]
    fn two_by_two_hand_expansion() {
        let t = SymTridiag::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        for lambda in [-2.0, -0.5, 0.0, 0.3, 4.0] {
            let expected = lambda * lambda - 1.0;
            assert!((tridiag_char(&t, lambda) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_offdiag_length() {
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn rescaling_keeps_large_orders_finite() {
        let n = 400;
        let t = SymTridiag::new(vec![10.0; n], vec![0.1; n - 1]).unwrap();
        let (m, e) = tridiag_char_scaled(&t, -50.0);
        assert!(m.is_finite() && m > 0.0);
        // Leading behaviour is about 60^400, whose log2 is about 2363.
        let log2 = m.log2() + e as f64;
        assert!((log2 - 400.0 * 60f64.log2()).abs() < 1.0);
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&HermitianDense::identity(3), 1e-12).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let m = HermitianDense::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let eig = hermitian_eig(&m, 1e-12).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[0, 1 + 1/q], [1 + q, 0]] with q = 1 has eigenvalues +-2; with a
        // non-trivial phase the modulus |1 + q| sets them.
        let q = Complex64::from_polar(1.0, 0.7);
        let off = c(1.0, 0.0) + q.inv();
        let mut m = HermitianDense::zeros(2);
        m.set_pair(0, 1, off);
        let eig = hermitian_eig(&m, 1e-12).unwrap();
        let r = off.norm();
        assert!((eig.values[0] + r).abs() < 1e-14);
        assert!((eig.values[1] - r).abs() < 1e-14);
        for (i, &lam) in eig.values.iter().enumerate() {
            let mv = m.matvec(&eig.vectors[i]);
            let res: f64 = mv
                .iter()
                .zip(&eig.vectors[i])
                .map(|(a, b)| (a - b * lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = HermitianDense::from_real(2, &[0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eig(&m, 1e-12),
            Err(Error::NonHermitianInput { .. })
        ));
        let mut m = HermitianDense::zeros(1);
        m.set(0, 0, c(1.0, 0.5));
        assert!(hermitian_eig(&m, 1e-12).is_err());
    }

    #[test]
    fn inverse_entry_scalar() {
        let t = SymTridiag::new(vec![2.0 * 0.7], vec![]).unwrap();
        let p = inverse_tridiag_entry(&t, 0.0, 0, 0).unwrap();
        assert!((p - 1.0 / 1.4).abs() < 1e-15);
    }

    #[test]
    fn inverse_entry_two_by_two() {
        let d1 = 1.3;
        let t = SymTridiag::new(vec![0.0, 0.0], vec![d1]).unwrap();
        // T - 3I = [[-3, d1], [d1, -3]], det = 9 - d1^2,
        // inverse = [[-3, -d1], [-d1, -3]] / det.
        let p = inverse_tridiag_entry(&t, 3.0, 0, 1).unwrap();
        assert!((p - (-d1) / (9.0 - d1 * d1)).abs() < 1e-15);
        let p21 = inverse_tridiag_entry(&t, 3.0, 1, 0).unwrap();
        assert_eq!(p, p21);
    }

    #[test]
    fn singular_shift_is_reported() {
        let t = SymTridiag::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        assert!(matches!(
            inverse_tridiag_entry(&t, 1.0, 0, 0),
            Err(Error::SingularShift { .. })
        ));
    }

    #[test]
    fn null_direction_of_bidiagonal() {
        // rows: x_i + 2 x_{i+1} = 0  ->  x = (1, -1/2, 1/4) up to scale.
        let m = [1.0, 2.0, 0.0, 0.0, 1.0, 2.0];
        let (v, sigma) = smallest_singular_direction(2, 3, &m).unwrap();
        assert!(sigma < 1e-14);
        let scale = 1.0 / v[0];
        assert!((v[1] * scale + 0.5).abs() < 1e-14);
        assert!((v[2] * scale - 0.25).abs() < 1e-14);
    }
}
