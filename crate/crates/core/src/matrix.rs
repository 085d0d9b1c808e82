//! Dense complex matrices for the sampling side: row-major `Complex64`
//! storage, a blocked split-plane multiply kernel, Haar unitaries via
//! Householder QR with phase correction, bipartite flip-symbol application,
//! trace helpers that avoid unnecessary multiplies, and a small binary dump
//! format for deterministic matrix inputs.

use crate::error::{Error, Result};
use crate::word::Symbol;
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{Read, Write};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Below this many scalar multiply-adds the multiply kernel stays
/// single-threaded; above it the row blocks go through the rayon pool.
const PARALLEL_FLOP_THRESHOLD: usize = 1 << 18;
/// Row-block height of the multiply kernel (keeps each B-row pass feeding
/// several output rows).
const ROW_BLOCK: usize = 8;

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn conj_entries(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::invalid("trace of a non-square matrix"));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// Trace divided by the dimension.
    pub fn normalized_trace(&self) -> Result<Complex64> {
        Ok(self.trace()? / self.rows as f64)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn split_planes(&self) -> (Vec<f64>, Vec<f64>) {
        let mut re = Vec::with_capacity(self.data.len());
        let mut im = Vec::with_capacity(self.data.len());
        for z in &self.data {
            re.push(z.re);
            im.push(z.im);
        }
        (re, im)
    }

    /// Matrix product using a row-blocked kernel on separate real and
    /// imaginary planes (vectorizes well and keeps B-row traffic low).
    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "dimension mismatch: ({}x{}) * ({}x{})",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, kk, n) = (self.rows, self.cols, other.cols);
        let (a_re, a_im) = self.split_planes();
        let (b_re, b_im) = other.split_planes();
        let mut out_re = vec![0.0f64; m * n];
        let mut out_im = vec![0.0f64; m * n];

        let block_job = |i0: usize, o_re: &mut [f64], o_im: &mut [f64]| {
            let height = o_re.len() / n;
            for k in 0..kk {
                let br = &b_re[k * n..(k + 1) * n];
                let bi = &b_im[k * n..(k + 1) * n];
                for r in 0..height {
                    let i = i0 + r;
                    let ar = a_re[i * kk + k];
                    let ai = a_im[i * kk + k];
                    let or_ = &mut o_re[r * n..(r + 1) * n];
                    let oi_ = &mut o_im[r * n..(r + 1) * n];
                    for j in 0..n {
                        or_[j] += ar * br[j] - ai * bi[j];
                        oi_[j] += ar * bi[j] + ai * br[j];
                    }
                }
            }
        };

        if m * kk * n < PARALLEL_FLOP_THRESHOLD {
            for (bi_idx, (o_re, o_im)) in out_re
                .chunks_mut(ROW_BLOCK * n)
                .zip(out_im.chunks_mut(ROW_BLOCK * n))
                .enumerate()
            {
                block_job(bi_idx * ROW_BLOCK, o_re, o_im);
            }
        } else {
            out_re
                .par_chunks_mut(ROW_BLOCK * n)
                .zip(out_im.par_chunks_mut(ROW_BLOCK * n))
                .enumerate()
                .for_each(|(bi_idx, (o_re, o_im))| block_job(bi_idx * ROW_BLOCK, o_re, o_im));
        }

        let data = out_re
            .into_iter()
            .zip(out_im)
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix {
            rows: m,
            cols: n,
            data,
        })
    }

    /// Applies a flip symbol on the bipartite index split `dim = b * d`
    /// (row-major tensor order: index = left * d + right).
    pub fn apply_symbol(&self, symbol: Symbol, b: usize, d: usize) -> Result<ComplexMatrix> {
        if !self.is_square() || self.rows != b * d || b == 0 || d == 0 {
            return Err(Error::invalid(format!(
                "flip symbols need a square matrix of dimension {b}*{d}"
            )));
        }
        if symbol == Symbol::Identity {
            return Ok(self.clone());
        }
        let dim = self.rows;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for r in 0..dim {
            let (a, alpha) = (r / d, r % d);
            for c in 0..dim {
                let (g, gamma) = (c / d, c % d);
                let (tr, tc) = match symbol {
                    Symbol::Identity => (r, c),
                    Symbol::Transpose => (c, r),
                    Symbol::PartialRight => (a * d + gamma, g * d + alpha),
                    Symbol::PartialLeft => (g * d + alpha, a * d + gamma),
                };
                out.data[tr * dim + tc] = self.data[r * dim + c];
            }
        }
        Ok(out)
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(Error::invalid("trace of a non-square product"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    Ok(acc)
}

/// Normalized traces of the first four powers of a square matrix using a
/// single matrix multiply: with `S = C*C`, `tr C^3 = sum S[i,j] C[j,i]` and
/// `tr C^4 = sum S[i,j] S[j,i]`.
pub fn normalized_trace_powers(c: &ComplexMatrix, max_order: usize) -> Result<Vec<Complex64>> {
    if !c.is_square() {
        return Err(Error::invalid("powers of a non-square matrix"));
    }
    if max_order == 0 || max_order > 4 {
        return Err(Error::Unsupported(
            "trace powers are provided for orders 1 through 4".into(),
        ));
    }
    let dim = c.rows() as f64;
    let mut out = vec![c.trace()? / dim];
    if max_order >= 2 {
        out.push(trace_product(c, c)? / dim);
    }
    if max_order >= 3 {
        let s = c.mul(c)?;
        out.push(trace_product(&s, c)? / dim);
        if max_order == 4 {
            out.push(trace_product(&s, &s)? / dim);
        }
    }
    Ok(out)
}

/// `X X^* / divisor` for a rectangular `X`, computed on the upper triangle
/// and mirrored (the result is exactly Hermitian).
pub fn gram_hermitian(x: &ComplexMatrix, divisor: f64) -> Result<ComplexMatrix> {
    if divisor <= 0.0 {
        return Err(Error::invalid("divisor must be positive"));
    }
    let m = x.rows();
    let n = x.cols();
    let (re, im) = x.split_planes();
    let mut out = ComplexMatrix::zeros(m, m);
    let inv = 1.0 / divisor;

    let row_job = |i: usize, out_row: &mut [Complex64]| {
        let xi_re = &re[i * n..(i + 1) * n];
        let xi_im = &im[i * n..(i + 1) * n];
        for j in i..m {
            let xj_re = &re[j * n..(j + 1) * n];
            let xj_im = &im[j * n..(j + 1) * n];
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for k in 0..n {
                // x[i,k] * conj(x[j,k])
                acc_re += xi_re[k] * xj_re[k] + xi_im[k] * xj_im[k];
                acc_im += xi_im[k] * xj_re[k] - xi_re[k] * xj_im[k];
            }
            out_row[j] = Complex64::new(acc_re * inv, acc_im * inv);
        }
    };

    if m * m * n / 2 < PARALLEL_FLOP_THRESHOLD {
        for (i, out_row) in out.data.chunks_mut(m).enumerate() {
            row_job(i, out_row);
        }
    } else {
        out.data
            .par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, out_row)| row_job(i, out_row));
    }

    for i in 0..m {
        out.data[i * m + i] = Complex64::new(out.data[i * m + i].re, 0.0);
        for j in 0..i {
            out.data[i * m + j] = out.data[j * m + i].conj();
        }
    }
    Ok(out)
}

/// Turns an independent-Gaussian-entry matrix into a Haar-distributed
/// unitary: Householder QR followed by the diagonal phase correction that
/// removes the sign ambiguity of the factorization.
pub fn haar_from_ginibre(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !g.is_square() {
        return Err(Error::invalid("unitaries require a square input"));
    }
    let n = g.rows();
    let mut r = g.clone();
    // q_dag accumulates the product of reflectors applied to the identity,
    // i.e. the adjoint of the orthogonal factor.
    let mut q_dag = ComplexMatrix::identity(n);
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let mut norm_sq = 0.0;
        for i in k..n {
            let z = r.get(i, k);
            v[i - k] = z;
            norm_sq += z.norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let v_norm_sq: f64 = v[..n - k].iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sq == 0.0 {
            continue;
        }
        let scale = 2.0 / v_norm_sq;
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in k..n {
                s += v[i - k].conj() * r.get(i, j);
            }
            let t = s * scale;
            for i in k..n {
                let cur = r.get(i, j);
                r.set(i, j, cur - t * v[i - k]);
            }
        }
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in k..n {
                s += v[i - k].conj() * q_dag.get(i, j);
            }
            let t = s * scale;
            for i in k..n {
                let cur = q_dag.get(i, j);
                q_dag.set(i, j, cur - t * v[i - k]);
            }
        }
    }
    let mut u = q_dag.adjoint();
    for j in 0..n {
        let rjj = r.get(j, j);
        let lambda = if rjj.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            rjj / rjj.norm()
        };
        for i in 0..n {
            let cur = u.get(i, j);
            u.set(i, j, cur * lambda);
        }
    }
    Ok(u)
}

const DUMP_MAGIC: &[u8; 4] = b"FPTM";
const DUMP_MAX_DIM: u32 = 1 << 15;

/// Writes a square matrix with its bipartite split: magic `FPTM`, then
/// little-endian `u32` dimension, `u32` left-leg dimension, `u32` reserved
/// zero, then row-major interleaved `f64` real/imaginary parts.
pub fn write_matrix_dump(w: &mut impl Write, m: &ComplexMatrix, b: usize) -> Result<()> {
    if !m.is_square() {
        return Err(Error::invalid("matrix dumps hold square matrices"));
    }
    let dim = m.rows();
    if dim as u32 > DUMP_MAX_DIM || b == 0 || dim % b != 0 {
        return Err(Error::invalid(format!(
            "left-leg dimension {b} must divide the matrix dimension {dim}"
        )));
    }
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&(dim as u32).to_le_bytes())?;
    w.write_all(&(b as u32).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for z in m.data() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a matrix dump; returns the matrix and its left-leg dimension.
pub fn read_matrix_dump(r: &mut impl Read) -> Result<(ComplexMatrix, usize)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::parse("bad matrix dump magic"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let dim = u32::from_le_bytes(word);
    r.read_exact(&mut word)?;
    let b = u32::from_le_bytes(word);
    r.read_exact(&mut word)?;
    let reserved = u32::from_le_bytes(word);
    if dim == 0 || dim > DUMP_MAX_DIM || b == 0 || dim % b != 0 || reserved != 0 {
        return Err(Error::parse("bad matrix dump header"));
    }
    let dim = dim as usize;
    let mut data = Vec::with_capacity(dim * dim);
    let mut buf = [0u8; 16];
    for _ in 0..dim * dim {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("eight bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("eight bytes"));
        data.push(Complex64::new(re, im));
    }
    Ok((
        ComplexMatrix {
            rows: dim,
            cols: dim,
            data,
        },
        b as usize,
    ))
}
