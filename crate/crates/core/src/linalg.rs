//! Dense kernels: LU solve and eigenvalues of `diag(d)^{-1} A`.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out.row_mut(i).iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `s * self`.
    pub fn scaled(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            data: self.data.iter().map(|v| v * s).collect(),
            ..*self
        }
    }

    /// Drops row and column `k`.
    pub fn without(&self, k: usize) -> DenseMatrix {
        let keep = |i: usize| i != k;
        let data = (0..self.rows)
            .filter(|&i| keep(i))
            .flat_map(|i| (0..self.cols).filter(|&j| keep(j)).map(move |j| (i, j)))
            .map(|(i, j)| self[(i, j)])
            .collect();
        DenseMatrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// LU factors with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!("LU of a {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .unwrap_or(k);
            if lu[(p, k)] == 0.0 || !lu[(p, k)].is_finite() {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / piv;
                lu[(i, k)] = m;
                if m != 0.0 {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= m * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows;
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs of length {} for order {n}", b.len())));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Lu::factor(a)?.solve(b)
}

/// One eigenvalue of `A y = λ diag(d) y` with a unit eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||A y - λ diag(d) y|| / (||A|| ||y||)` in the infinity norm.
    pub residual: f64,
}

const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// The `count` smallest-magnitude eigenvalues of `diag(d)^{-1} A`.
pub fn eig_generalized_diag(a: &DenseMatrix, d: &[f64], count: usize) -> Result<Vec<EigenPair>> {
    if !a.is_square() || d.len() != a.rows {
        return Err(Error::Dimension(format!(
            "{}x{} operator with {} weights",
            a.rows,
            a.cols,
            d.len()
        )));
    }
    if let Some(k) = d.iter().position(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::InvalidParam(format!("weight d[{k}] = {} is not positive", d[k])));
    }
    let n = a.rows;
    let (wr, wi) = match Lu::factor(a) {
        Ok(lu) => inverse_spectrum(&lu, d)?,
        Err(_) => direct_spectrum(a, d)?,
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| wr[i].hypot(wi[i]).total_cmp(&wr[j].hypot(wi[j])));
    let anorm = a.norm_inf();
    order
        .into_iter()
        .take(count.min(n))
        .map(|i| {
            if wi[i].abs() > 1e-8 * wr[i].abs() {
                return Err(Error::ComplexEigenvalue {
                    value: wr[i],
                    imag: wi[i],
                });
            }
            refine_pair(a, d, wr[i], anorm)
        })
        .collect()
}

/// Eigenvalues of `diag(d)^{-1} A` as reciprocals of those of
/// `A^{-1} diag(d)`. When `d` spans many orders of magnitude the direct
/// form is badly scaled and QR loses the small eigenvalues; here they are
/// the dominant ones.
fn inverse_spectrum(lu: &Lu, d: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut c = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = d[j];
        let col = lu.solve(&e)?;
        e[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            c[(i, j)] = v;
        }
    }
    balance(&mut c);
    hessenberg(&mut c);
    let (mr, mi) = hqr(&mut c)?;
    Ok(mr
        .iter()
        .zip(&mi)
        .map(|(&r, &i)| {
            let m = r * r + i * i;
            if m == 0.0 {
                (f64::INFINITY, 0.0)
            } else {
                (r / m, -i / m)
            }
        })
        .unzip())
}

fn direct_spectrum(a: &DenseMatrix, d: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut b = a.clone();
    for (i, w) in d.iter().enumerate() {
        b.row_mut(i).iter_mut().for_each(|v| *v /= w);
    }
    balance(&mut b);
    hessenberg(&mut b);
    hqr(&mut b)
}

/// Inverse iteration at a fixed shift next to the QR estimate, then one
/// guarded quotient correction of the eigenvalue.
fn refine_pair(a: &DenseMatrix, d: &[f64], lambda0: f64, anorm: f64) -> Result<EigenPair> {
    let n = a.rows;
    let shift = lambda0 + 64.0 * f64::EPSILON * lambda0.abs().max(anorm * f64::EPSILON);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift * d[i];
    }
    let plain = |y: &[f64]| residual_pair(a, d, lambda0, y, anorm);
    let Ok(lu) = Lu::factor(&shifted) else {
        return Ok(plain(&vec![1.0; n]));
    };
    let mut y: Vec<f64> = (0..n)
        .map(|i| 1.0 + (i as f64 * 0.618_033_988_749_895).fract())
        .collect();
    let mut quotient = lambda0;
    for _ in 0..3 {
        let dy: Vec<f64> = y.iter().zip(d).map(|(v, w)| v * w).collect();
        let w = lu.solve(&dy)?;
        let ww = norm_inf(&w);
        if !(ww.is_finite() && ww > 0.0) {
            break;
        }
        // (A - σD) w = D y  gives  λ ≈ σ + <y, y> / <y, w>
        let yw: f64 = y.iter().zip(&w).map(|(p, q)| p * q).sum();
        let yy: f64 = y.iter().map(|p| p * p).sum();
        quotient = shift + yy / yw;
        y = w.iter().map(|v| v / ww).collect();
    }
    let first = plain(&y);
    let close = (quotient - lambda0).abs() <= 1e-6 * lambda0.abs().max(f64::MIN_POSITIVE);
    if close {
        let second = residual_pair(a, d, quotient, &y, anorm);
        if second.residual < first.residual {
            return Ok(second);
        }
    }
    Ok(first)
}

fn residual_pair(a: &DenseMatrix, d: &[f64], lambda: f64, y: &[f64], anorm: f64) -> EigenPair {
    let ay = a.matvec(y);
    let r: Vec<f64> = ay
        .iter()
        .zip(d.iter().zip(y))
        .map(|(p, (w, v))| p - lambda * w * v)
        .collect();
    EigenPair {
        value: lambda,
        vector: y.to_vec(),
        residual: norm_inf(&r) / (anorm * norm_inf(y)),
    }
}

/// Diagonal similarity scaling so row and column norms are comparable.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows;
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for m in 1..n - 1 {
        let scale: f64 = (m..n).map(|i| a[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..n).rev() {
            v[i] = a[(i, m - 1)] / scale;
            h += v[i] * v[i];
        }
        let g = if v[m] > 0.0 { -h.sqrt() } else { h.sqrt() };
        h -= v[m] * g;
        v[m] -= g;
        // A <- (I - v v^T / h) A (I - v v^T / h)
        for j in m..n {
            let f: f64 = (m..n).rev().map(|i| v[i] * a[(i, j)]).sum::<f64>() / h;
            for i in m..n {
                a[(i, j)] -= f * v[i];
            }
        }
        for i in 0..n {
            let f: f64 = (m..n).rev().map(|j| v[j] * a[(i, j)]).sum::<f64>() / h;
            for j in m..n {
                a[(i, j)] -= f * v[j];
            }
        }
        a[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            a[(i, m - 1)] = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift
/// QR iteration. Returns real and imaginary parts.
fn hqr(a: &mut DenseMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.rows;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok((wr, wi));
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let budget = QR_ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // look for a small subdiagonal element
            let mut l = nu;
            while l >= 1 {
                let s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[(l, l - 1)].abs() <= f64::EPSILON * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let y = a[(nu - 1, nu - 1)];
            let w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let xt = x + t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    wr[nu - 1] = xt + z;
                    wr[nu] = if z != 0.0 { xt - w / z } else { xt + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = xt + p;
                    wr[nu] = xt + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if total >= budget {
                return Err(Error::EigenNoConvergence { iterations: budget });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            // double QR step on rows l..=nu, columns m..=nu
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(lu_solve(&DenseMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn two_by_two_solve() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = lu_solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn singular_names_pivot() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(lu_solve(&a, &[1.0, 1.0]), Err(Error::Singular { pivot: 1 }));
    }

    #[test]
    fn without_drops_row_and_column() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 9.0]]).unwrap();
        assert_eq!(a.without(0).as_slice(), &[5.0, 6.0, 8.0, 9.0]);
    }

    #[test]
    fn diagonal_eigenvalues() {
        let a = DenseMatrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]).unwrap();
        let e = eig_generalized_diag(&a, &[1.0, 1.0, 1.0], 1).unwrap();
        assert!((e[0].value - 1.0).abs() < 1e-15);
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 6.0]]).unwrap();
        let e = eig_generalized_diag(&a, &[1.0, 2.0], 2).unwrap();
        assert!((e[0].value - 2.0).abs() < 1e-15);
        assert!((e[1].value - 3.0).abs() < 1e-15);
    }

    #[test]
    fn nonsymmetric_known_spectrum() {
        // companion-like matrix with eigenvalues 1, 2, 3, 4
        let a = DenseMatrix::from_rows(&[
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let e = eig_generalized_diag(&a, &[1.0; 4], 4).unwrap();
        for (k, p) in e.iter().enumerate() {
            assert!((p.value - (k + 1) as f64).abs() < 1e-10, "{} {}", p.value, p.residual);
            assert!(p.residual < 1e-12);
        }
    }

    #[test]
    fn complex_pair_is_reported() {
        let a = DenseMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            eig_generalized_diag(&a, &[1.0, 1.0], 1),
            Err(Error::ComplexEigenvalue { .. })
        ));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        let a = DenseMatrix::identity(2);
        assert!(eig_generalized_diag(&a, &[1.0, 0.0], 1).is_err());
    }
}
