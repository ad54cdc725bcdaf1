//! Dense complex matrices carrying a quadrature-weighted inner product.
//!
//! The weighted metric ⟨u, v⟩ = Σ w_i u_i conj(v_i) is the discrete L_2
//! product of the underlying grid, so adjoints, norms and accretivity
//! statements transfer from the continuous setting without assuming a
//! uniform mesh.

use crate::error::{Error, Result};
use crate::scalar::{cfinite, cnorm, Cx, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub type CMat<T> = DMatrix<Cx<T>>;
pub type CVec<T> = DVector<Cx<T>>;

/// How a matrix was produced; carried through serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Generator,
    Weight,
    Transform,
    Elliptic,
    Assembled,
    Power,
    General,
}

/// Sparsity pattern used to pick a fast path in shifted solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandStructure {
    UpperBidiagonal,
    LowerBidiagonal,
    General,
}

/// Square complex matrix with the quadrature weights of its inner product.
#[derive(Debug, Clone)]
pub struct OpMatrix<T: Scalar> {
    pub mat: CMat<T>,
    pub weights: Vec<T>,
    pub provenance: Provenance,
}

/// Weighted inner product ⟨u, v⟩ = Σ w_i u_i conj(v_i).
pub fn weighted_inner<T: Scalar>(weights: &[T], u: &CVec<T>, v: &CVec<T>) -> Cx<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..weights.len() {
        acc += u[i] * v[i].conj() * weights[i];
    }
    acc
}

/// Weighted vector norm.
pub fn weighted_norm<T: Scalar>(weights: &[T], u: &CVec<T>) -> T {
    weighted_inner(weights, u, u).re.sqrt()
}

impl<T: Scalar> OpMatrix<T> {
    pub fn new(mat: CMat<T>, weights: Vec<T>, provenance: Provenance) -> Result<Self> {
        if !mat.is_square() || mat.nrows() != weights.len() {
            return Err(Error::Argument("matrix shape and weight count differ".into()));
        }
        if mat.iter().any(|z| !cfinite(*z)) {
            return Err(Error::Argument("matrix entries must be finite".into()));
        }
        if weights.iter().any(|&w| w <= T::zero() || !w.finite()) {
            return Err(Error::Argument("weights must be positive and finite".into()));
        }
        Ok(Self { mat, weights, provenance })
    }

    /// Identity with uniform unit weights.
    pub fn identity(n: usize) -> Self {
        Self {
            mat: DMatrix::identity(n, n),
            weights: vec![T::one(); n],
            provenance: Provenance::General,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        &self.mat * v
    }

    pub fn inner(&self, u: &CVec<T>, v: &CVec<T>) -> Cx<T> {
        weighted_inner(&self.weights, u, v)
    }

    pub fn vec_norm(&self, u: &CVec<T>) -> T {
        weighted_norm(&self.weights, u)
    }

    /// Adjoint w.r.t. the weighted inner product: W^{-1} A^H W.
    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut adj = self.mat.adjoint();
        for i in 0..n {
            for j in 0..n {
                adj[(i, j)] *= self.weights[j] / self.weights[i];
            }
        }
        Self { mat: adj, weights: self.weights.clone(), provenance: self.provenance }
    }

    /// Matrix with the same action expressed in the orthonormal metric,
    /// D A D^{-1} with D = diag(√w); weighted operator norms and numerical
    /// ranges are plain Euclidean ones of this matrix.
    pub fn euclidean_conjugate(&self) -> CMat<T> {
        let n = self.dim();
        let mut out = self.mat.clone();
        for i in 0..n {
            for j in 0..n {
                let s = (self.weights[i] / self.weights[j]).sqrt();
                out[(i, j)] *= s;
            }
        }
        out
    }

    /// Weighted operator norm via the singular values of the conjugated
    /// matrix.
    pub fn op_norm(&self) -> T {
        let sv = self.euclidean_conjugate().singular_values();
        sv.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Solve (A + ζ) x = b. Upper- and lower-bidiagonal matrices take an
    /// O(N) substitution path; everything else goes through LU.
    pub fn solve_shifted(&self, zeta: Cx<T>, b: &CVec<T>) -> Result<CVec<T>> {
        self.solve_shifted_as(self.band_structure(), zeta, b)
    }

    /// [`Self::solve_shifted`] with the structure probe hoisted out, for
    /// callers that solve against the same matrix many times.
    pub fn solve_shifted_as(
        &self,
        structure: BandStructure,
        zeta: Cx<T>,
        b: &CVec<T>,
    ) -> Result<CVec<T>> {
        let n = self.dim();
        if structure == BandStructure::UpperBidiagonal {
            let mut x = CVec::<T>::zeros(n);
            for i in (0..n).rev() {
                let diag = self.mat[(i, i)] + zeta;
                if cnorm(diag) == T::zero() {
                    return Err(Error::Linalg("singular bidiagonal diagonal".into()));
                }
                let mut rhs = b[i];
                if i + 1 < n {
                    rhs -= self.mat[(i, i + 1)] * x[i + 1];
                }
                x[i] = rhs / diag;
            }
            return Ok(x);
        }
        if structure == BandStructure::LowerBidiagonal {
            let mut x = CVec::<T>::zeros(n);
            for i in 0..n {
                let diag = self.mat[(i, i)] + zeta;
                if cnorm(diag) == T::zero() {
                    return Err(Error::Linalg("singular bidiagonal diagonal".into()));
                }
                let mut rhs = b[i];
                if i > 0 {
                    rhs -= self.mat[(i, i - 1)] * x[i - 1];
                }
                x[i] = rhs / diag;
            }
            return Ok(x);
        }
        let mut shifted = self.mat.clone();
        for i in 0..n {
            shifted[(i, i)] += zeta;
        }
        shifted
            .lu()
            .solve(b)
            .ok_or_else(|| Error::Linalg("shifted matrix is singular".into()))
    }

    pub fn solve(&self, b: &CVec<T>) -> Result<CVec<T>> {
        self.solve_shifted(Complex::new(T::zero(), T::zero()), b)
    }

    /// Detect a bidiagonal sparsity pattern (O(N²) scan; hoist out of loops
    /// via [`Self::solve_shifted_as`]).
    pub fn band_structure(&self) -> BandStructure {
        if self.is_upper_bidiagonal() {
            BandStructure::UpperBidiagonal
        } else if self.is_lower_bidiagonal() {
            BandStructure::LowerBidiagonal
        } else {
            BandStructure::General
        }
    }

    fn is_upper_bidiagonal(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if j != i && j != i + 1 && cnorm(self.mat[(i, j)]) != T::zero() {
                    return false;
                }
            }
        }
        true
    }

    fn is_lower_bidiagonal(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if j != i && j + 1 != i && cnorm(self.mat[(i, j)]) != T::zero() {
                    return false;
                }
            }
        }
        true
    }

    /// exp(s·A) by Padé(13) scaling and squaring.
    pub fn expm(&self, s: T) -> Self {
        let scaled = self.mat.clone() * Complex::new(s, T::zero());
        Self {
            mat: expm_mat(&scaled),
            weights: self.weights.clone(),
            provenance: self.provenance,
        }
    }

    /// Dense binary layout: u64 N, then N weights, then the row-major
    /// entries as (re, im) pairs, all little-endian f64.
    pub fn write_bin<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.dim() as u64;
        w.write_all(&n.to_le_bytes())?;
        for &wt in &self.weights {
            w.write_all(&wt.f64().to_le_bytes())?;
        }
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.mat[(i, j)];
                w.write_all(&z.re.f64().to_le_bytes())?;
                w.write_all(&z.im.f64().to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_bin<R: Read>(mut r: R, provenance: Provenance) -> Result<Self> {
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n = u64::from_le_bytes(buf8) as usize;
        let read_f64 = |r: &mut R| -> Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            weights.push(T::c(read_f64(&mut r)?));
        }
        let mut mat = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                mat[(i, j)] = Complex::new(T::c(re), T::c(im));
            }
        }
        Self::new(mat, weights, provenance)
    }

    /// JSON metadata companion of the binary layout.
    pub fn write_meta<W: Write>(&self, w: W) -> Result<()> {
        let meta = MatMeta {
            n: self.dim(),
            provenance: self.provenance,
            op_norm: self.op_norm().f64(),
        };
        serde_json::to_writer_pretty(w, &meta)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatMeta {
    pub n: usize,
    pub provenance: Provenance,
    pub op_norm: f64,
}

fn mat_norm_inf<T: Scalar>(a: &CMat<T>) -> T {
    let mut best = T::zero();
    for i in 0..a.nrows() {
        let row: T = (0..a.ncols()).map(|j| cnorm(a[(i, j)])).sum();
        if row > best {
            best = row;
        }
    }
    best
}

/// Matrix exponential by Padé(13) with scaling and squaring.
pub fn expm_mat<T: Scalar>(a: &CMat<T>) -> CMat<T> {
    let n = a.nrows();
    let norm = mat_norm_inf(a).f64();
    let theta13 = 5.371_920_351_148_152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.map(|z| z * Cx::<T>::new(T::c(0.5f64.powi(s)), T::zero()));

    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let id: CMat<T> = DMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let bc = |k: usize| Complex::new(T::c(B[k]), T::zero());
    let u_inner = &a6 * (&a6 * bc(13) + &a4 * bc(11) + &a2 * bc(9))
        + &a6 * bc(7)
        + &a4 * bc(5)
        + &a2 * bc(3)
        + &id * bc(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * bc(12) + &a4 * bc(10) + &a2 * bc(8))
        + &a6 * bc(6)
        + &a4 * bc(4)
        + &a2 * bc(2)
        + &id * bc(0);
    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
