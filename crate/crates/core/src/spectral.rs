//! Spectral machinery for non-selfadjoint matrices: Jordan-chain systems of
//! the compact surrogate B = W^{-1}, biorthogonal expansions, operator
//! functions φ(W), and the block-series solver for fractional-order abstract
//! Cauchy problems D^{1/α}_- u = φ(W)u.

use crate::error::{Error, Result};
use crate::frac1d::{self, TimeSeries};
use crate::linalg::{CMat, CVec, OpMatrix, Provenance};
use crate::opcalc::{numerical_range_sample, AccretivityReport};
use crate::scalar::{cexp, cfinite, cnorm, cx, Cx, Scalar};
use crate::series::Jet;
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn czero<T: Scalar>() -> Cx<T> {
    cx(T::zero(), T::zero())
}

fn cone<T: Scalar>() -> Cx<T> {
    cx(T::one(), T::zero())
}

fn inv_mat<T: Scalar>(m: &CMat<T>) -> Result<CMat<T>> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Linalg("matrix is singular".into()))
}

fn eig<T: Scalar>(m: &CMat<T>) -> Result<Vec<Cx<T>>> {
    let schur = m
        .clone()
        .try_schur(T::c(1e-13), 30_000)
        .ok_or_else(|| Error::Linalg("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Orthonormal basis of the (right) null space at a relative rank tolerance.
fn nullspace<T: Scalar>(m: &CMat<T>, rank_tol: T) -> Vec<CVec<T>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v^t");
    let smax = svd
        .singular_values
        .iter()
        .copied()
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let thresh = rank_tol * if smax > T::one() { smax } else { T::one() };
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < thresh {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}

/// Modified Gram-Schmidt step: residual of `v` against the orthonormal set.
fn project_out<T: Scalar>(v: &CVec<T>, basis: &[CVec<T>]) -> CVec<T> {
    let mut r = v.clone();
    for q in basis {
        let coef = q.dotc(&r);
        r -= q * coef;
    }
    r
}

fn orthonormalize<T: Scalar>(vecs: &[CVec<T>]) -> Vec<CVec<T>> {
    let mut out: Vec<CVec<T>> = Vec::new();
    for v in vecs {
        let r = project_out(v, &out);
        let nrm = r.norm();
        if nrm > T::c(1e-12) {
            out.push(r / cx(nrm, T::zero()));
        }
    }
    out
}

/// One Jordan chain of the compact surrogate: `len` columns of the major
/// matrix starting at `start`, eigenvector first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JordanChain {
    /// Index into the eigenvalue list.
    pub q: usize,
    pub start: usize,
    pub len: usize,
}

/// Jordan system of B = W^{-1}: characteristic numbers λ_q = 1/μ_q ordered
/// by modulus, chains, major vectors, optional biorthogonal system, and a
/// block partition of the eigenvalue indices.
#[derive(Debug, Clone)]
pub struct JordanSystem<T: Scalar> {
    /// Characteristic numbers λ_q, ascending modulus.
    pub eigenvalues: Vec<Cx<T>>,
    /// Eigenvalues μ_q = 1/λ_q of the surrogate B.
    pub mus: Vec<Cx<T>>,
    pub chains: Vec<JordanChain>,
    /// Major vectors as columns, chains concatenated.
    pub majors: CMat<T>,
    /// Biorthogonal vectors aligned with the majors (intra-chain reversed
    /// pairing); built by [`biorthogonal_construct`].
    pub biorth: Option<CMat<T>>,
    /// Cumulative eigenvalue counts N_0 = 0 < N_1 < ... = Q; block ν covers
    /// q in (N_ν, N_{ν+1}].
    pub partition: Vec<usize>,
    pub weights: Vec<T>,
    /// Worst chain-relation residual, as a conditioning report.
    pub max_residual: T,
}

impl<T: Scalar> JordanSystem<T> {
    pub fn geometric_multiplicity(&self, q: usize) -> usize {
        self.chains.iter().filter(|c| c.q == q).count()
    }

    pub fn block_count(&self) -> usize {
        self.partition.len() - 1
    }
}

/// Default block partition: group eigenvalue indices by modulus decade.
fn decade_partition<T: Scalar>(lambdas: &[Cx<T>]) -> Vec<usize> {
    let mut bounds = vec![0usize];
    let mut current = f64::NAN;
    for (q, l) in lambdas.iter().enumerate() {
        let dec = cnorm(*l).f64().max(1e-300).log10().floor();
        if q == 0 {
            current = dec;
        } else if dec != current {
            bounds.push(q);
            current = dec;
        }
    }
    bounds.push(lambdas.len());
    bounds.dedup();
    bounds
}

struct Cluster<T: Scalar> {
    mu: Cx<T>,
    count: usize,
}

fn cluster_eigenvalues<T: Scalar>(mus: &[Cx<T>], tol: T) -> Vec<Cluster<T>> {
    let scale = mus.iter().map(|m| cnorm(*m)).fold(T::one(), |a, b| if b > a { b } else { a });
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    for &m in mus {
        let mut placed = false;
        for c in clusters.iter_mut() {
            if cnorm(m - c.mu) <= tol * scale {
                // running mean keeps the representative centered
                let n = T::usz(c.count);
                c.mu = (c.mu * n + m) / (n + T::one());
                c.count += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(Cluster { mu: m, count: 1 });
        }
    }
    clusters
}

/// Extract the Jordan chains of one cluster of B by the kernel-staircase
/// construction; returns chains as vectors ordered eigenvector-first.
fn extract_cluster_chains<T: Scalar>(
    b: &CMat<T>,
    mu: Cx<T>,
    count: usize,
    tol: T,
) -> Result<Vec<Vec<CVec<T>>>> {
    let n = b.nrows();
    let mut m = b.clone();
    for i in 0..n {
        m[(i, i)] -= mu;
    }
    let defect = |residual: f64| Error::DefectiveCluster {
        eigenvalue: format!("{:?}", mu),
        residual,
    };
    // kernel dimensions d_p of (B - μ)^p until they stabilize
    let mut kernels: Vec<Vec<CVec<T>>> = Vec::new();
    let mut power = DMatrix::identity(n, n);
    loop {
        power = &power * &m;
        let ns = nullspace(&power, tol);
        if let Some(last) = kernels.last() {
            if ns.len() == last.len() {
                break;
            }
        }
        let stop = ns.len() >= count;
        kernels.push(ns);
        if stop || kernels.len() > n {
            break;
        }
    }
    if kernels.is_empty() || kernels[0].is_empty() {
        return Err(defect(0.0));
    }
    let depth = kernels.len();
    let dim = |p: usize| -> usize {
        if p == 0 {
            0
        } else {
            kernels[p.min(depth) - 1].len()
        }
    };
    if dim(depth) != count {
        return Err(defect(dim(depth) as f64 - count as f64));
    }

    let mut chains: Vec<Vec<CVec<T>>> = Vec::new();
    for p in (1..=depth).rev() {
        let wanted = dim(p) - dim(p - 1);
        loop {
            let have = chains.iter().filter(|c| c.len() >= p).count();
            if have >= wanted {
                break;
            }
            // block out the lower kernel and the height-p vectors of the
            // chains already chosen
            let mut blocked: Vec<CVec<T>> = if p >= 2 { kernels[p - 2].clone() } else { Vec::new() };
            for c in chains.iter().filter(|c| c.len() >= p) {
                blocked.push(c[p - 1].clone());
            }
            let blocked = orthonormalize(&blocked);
            let mut best: Option<(T, CVec<T>)> = None;
            for cand in &kernels[p - 1] {
                let r = project_out(cand, &blocked);
                let nrm = r.norm();
                if best.as_ref().map_or(true, |(b, _)| nrm > *b) {
                    best = Some((nrm, r));
                }
            }
            let (nrm, top) = best.ok_or_else(|| defect(0.0))?;
            if nrm <= T::c(1e-8) {
                return Err(defect(nrm.f64()));
            }
            let top = top / cx(nrm, T::zero());
            let mut chain = vec![top];
            for _ in 1..p {
                let next = &m * chain.last().unwrap();
                chain.push(next);
            }
            chain.reverse(); // eigenvector first
            chains.push(chain);
        }
    }
    Ok(chains)
}

fn assemble_system<T: Scalar>(
    w: &OpMatrix<T>,
    b: &CMat<T>,
    groups: Vec<(Cx<T>, Vec<Vec<CVec<T>>>)>,
) -> Result<JordanSystem<T>> {
    let n = w.dim();
    // order eigenvalues by ascending |λ| = 1/|μ|
    let mut groups = groups;
    groups.sort_by(|a, b| {
        cnorm(b.0)
            .f64()
            .partial_cmp(&cnorm(a.0).f64())
            .expect("finite eigenvalues")
    });
    let mut eigenvalues = Vec::new();
    let mut mus = Vec::new();
    let mut chains = Vec::new();
    let mut majors = CMat::<T>::zeros(n, n);
    let mut col = 0usize;
    let mut max_residual = T::zero();
    let b_scale = b.iter().map(|z| cnorm(*z)).fold(T::one(), |a, v| if v > a { v } else { a });
    for (q, (mu, group_chains)) in groups.into_iter().enumerate() {
        mus.push(mu);
        eigenvalues.push(cone::<T>() / mu);
        for chain in group_chains {
            let start = col;
            for (i, v) in chain.iter().enumerate() {
                if col >= n {
                    return Err(Error::Linalg("chain vectors exceed the dimension".into()));
                }
                majors.set_column(col, v);
                // audit the chain relation B e_i = μ e_i + e_{i-1}
                let mut resid = b * v - v * mu;
                if i > 0 {
                    resid -= &chain[i - 1];
                }
                let r = resid.norm() / (b_scale * v.norm());
                if r > max_residual {
                    max_residual = r;
                }
                col += 1;
            }
            chains.push(JordanChain { q, start, len: chain.len() });
        }
    }
    if col != n {
        return Err(Error::Linalg(format!(
            "chain system spans {col} of {n} dimensions"
        )));
    }
    let partition = decade_partition(&eigenvalues);
    Ok(JordanSystem {
        eigenvalues,
        mus,
        chains,
        majors,
        biorth: None,
        partition,
        weights: w.weights.clone(),
        max_residual,
    })
}

/// Decompose W through its compact surrogate B = W^{-1}: cluster the
/// eigenvalues of B within `tol` and extract Jordan chains per cluster.
pub fn jordan_decompose<T: Scalar>(w: &OpMatrix<T>, tol: T) -> Result<JordanSystem<T>> {
    let b = inv_mat(&w.mat)?;
    let mus = eig(&b)?;
    let clusters = cluster_eigenvalues(&mus, tol);
    let mut groups = Vec::new();
    for c in &clusters {
        let chains = extract_cluster_chains(&b, c.mu, c.count, tol)?;
        groups.push((c.mu, chains));
    }
    let mut sys = assemble_system(w, &b, groups)?;
    if sys.max_residual > T::c(1e-8) {
        return Err(Error::DefectiveCluster {
            eigenvalue: "post-extraction audit".into(),
            residual: sys.max_residual.f64(),
        });
    }
    biorthogonal_construct(&mut sys)?;
    Ok(sys)
}

/// Exact-structure path: the caller supplies V and the Jordan data of W
/// (eigenvalue, chain length) with W = V J V^{-1}; chains of B = W^{-1} are
/// regenerated from the top vectors of V.
pub fn jordan_from_structure<T: Scalar>(
    w: &OpMatrix<T>,
    v: &CMat<T>,
    blocks: &[(Cx<T>, usize)],
    tol: T,
) -> Result<JordanSystem<T>> {
    let n = w.dim();
    let total: usize = blocks.iter().map(|(_, l)| *l).sum();
    if total != n || v.nrows() != n {
        return Err(Error::Argument("prescribed structure must span the dimension".into()));
    }
    // audit W V = V J
    let mut j = CMat::<T>::zeros(n, n);
    let mut col = 0usize;
    for (lambda, len) in blocks {
        for i in 0..*len {
            j[(col + i, col + i)] = *lambda;
            if i + 1 < *len {
                j[(col + i, col + i + 1)] = cone();
            }
        }
        col += len;
    }
    let lhs = &w.mat * v;
    let rhs = v * &j;
    let scale = rhs.iter().map(|z| cnorm(*z)).fold(T::one(), |a, b| if b > a { b } else { a });
    let resid: T = lhs
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| cnorm(*a - *b))
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    if resid > tol * scale {
        return Err(Error::Argument(format!(
            "supplied structure fails W V = V J: residual {:?}",
            resid
        )));
    }
    let b = inv_mat(&w.mat)?;
    // group chains by eigenvalue and regenerate B-chains from the tops
    let mut groups: Vec<(Cx<T>, Vec<Vec<CVec<T>>>)> = Vec::new();
    let mut col = 0usize;
    for (lambda, len) in blocks {
        let mu = cone::<T>() / *lambda;
        let mut m = b.clone();
        for i in 0..n {
            m[(i, i)] -= mu;
        }
        let top = v.column(col + len - 1).into_owned();
        let mut chain = vec![top];
        for _ in 1..*len {
            let next = &m * chain.last().unwrap();
            chain.push(next);
        }
        chain.reverse();
        match groups.iter_mut().find(|(l, _)| cnorm(*l - mu) <= tol) {
            Some((_, g)) => g.push(chain),
            None => groups.push((mu, vec![chain])),
        }
        col += len;
    }
    let mut sys = assemble_system(w, &b, groups)?;
    biorthogonal_construct(&mut sys)?;
    Ok(sys)
}

/// Build the biorthogonal system from the inverse-adjoint of the major
/// matrix, reversing the pairing inside each chain:
/// g_{q_ξ+k-i} pairs with e_{q_ξ+i}.
pub fn biorthogonal_construct<T: Scalar>(sys: &mut JordanSystem<T>) -> Result<()> {
    let n = sys.majors.nrows();
    let e_inv = inv_mat(&sys.majors)?;
    // dual basis in the weighted metric: columns of D^{-1} E^{-H}
    let mut dual = e_inv.adjoint();
    for i in 0..n {
        for j in 0..n {
            dual[(i, j)] /= sys.weights[i];
        }
    }
    let mut g = CMat::<T>::zeros(n, n);
    for chain in &sys.chains {
        for i in 0..chain.len {
            let src = chain.start + i;
            let dst = chain.start + (chain.len - 1 - i);
            g.set_column(dst, &dual.column(src));
        }
    }
    sys.biorth = Some(g);
    Ok(())
}

/// Certificate for the infinite-regular-part growth condition; the constants
/// come from external analysis and are supplied, not computed.
#[derive(Debug, Clone, Copy)]
pub struct GrowthCertificate<T: Scalar> {
    pub theta0: T,
    pub h_theta0: T,
    pub rho: T,
    pub zeta: T,
}

/// Operator function φ(W) = Σ_{n=l}^{k} c_n W^n given by a coefficient
/// table, with the sector semi-angle of W and an optional growth
/// certificate.
#[derive(Debug, Clone)]
pub struct OperatorFunction<T: Scalar> {
    pub l: i64,
    /// Coefficients c_l ..= c_k in order.
    pub coeffs: Vec<Cx<T>>,
    pub theta: T,
    pub growth: Option<GrowthCertificate<T>>,
}

impl<T: Scalar> OperatorFunction<T> {
    pub fn new(l: i64, coeffs: Vec<Cx<T>>, theta: T) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Argument("operator function needs coefficients".into()));
        }
        if coeffs.iter().any(|c| !cfinite(*c)) {
            return Err(Error::Argument("operator function coefficients must be finite".into()));
        }
        Ok(Self { l, coeffs, theta, growth: None })
    }

    /// Monomial helper: φ(z) = z.
    pub fn identity(theta: T) -> Self {
        Self { l: 1, coeffs: vec![cone()], theta, growth: None }
    }

    pub fn k(&self) -> i64 {
        self.l + self.coeffs.len() as i64 - 1
    }

    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>> {
        if self.l < 0 && cnorm(z) == T::zero() {
            return Err(Error::Domain("principal part requires z != 0".into()));
        }
        let mut acc = czero::<T>();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let n = self.l + i as i64;
            acc += c * cpow_int(z, n);
        }
        Ok(acc)
    }

    /// Jet of φ(ζ^{-1}) about ζ = ζ0 (so z = 1/ζ0): Σ c_n (ζ0 + δ)^{-n}.
    pub fn symbol_jet(&self, zeta0: Cx<T>, order: usize) -> Result<Jet<T>> {
        if cnorm(zeta0) == T::zero() {
            return Err(Error::Domain("symbol jet requires a nonzero expansion point".into()));
        }
        let zeta = Jet::variable(zeta0, order);
        let mut acc = Jet::zero(order);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let n = self.l + i as i64;
            acc = acc.add(&zeta.powi(-n)?.scale(c));
        }
        Ok(acc)
    }

    /// Matrix realization Σ c_n W^n (negative powers through the inverse).
    pub fn of_matrix(&self, w: &OpMatrix<T>) -> Result<OpMatrix<T>> {
        let n = w.dim();
        let mut acc = CMat::<T>::zeros(n, n);
        let inv = if self.l < 0 { Some(inv_mat(&w.mat)?) } else { None };
        for (i, &c) in self.coeffs.iter().enumerate() {
            let p = self.l + i as i64;
            let mut term: CMat<T> = DMatrix::identity(n, n);
            if p >= 0 {
                for _ in 0..p {
                    term = &term * &w.mat;
                }
            } else {
                let inv = inv.as_ref().unwrap();
                for _ in 0..(-p) {
                    term = &term * inv;
                }
            }
            acc += term * c;
        }
        OpMatrix::new(acc, w.weights.clone(), Provenance::General)
    }
}

fn cpow_int<T: Scalar>(z: Cx<T>, n: i64) -> Cx<T> {
    if n == 0 {
        return cone();
    }
    let base = if n < 0 { cone::<T>() / z } else { z };
    let mut out = base;
    for _ in 1..n.unsigned_abs() {
        out *= base;
    }
    out
}

/// Values H_0..H_max of the chain coefficients
/// H_j(φ^α, z, t) = (e^{φ^α(z)t}/j!) d^j/dζ^j e^{-φ^α(ζ^{-1})t} at ζ = 1/z,
/// computed as the Taylor coefficients of exp(-t(ψ(δ) - ψ(0))) with
/// ψ(δ) = (φ(1/(ζ0+δ)))^α; the large exponentials cancel analytically.
pub fn h_values<T: Scalar>(
    phi: &OperatorFunction<T>,
    alpha: T,
    z: Cx<T>,
    t: T,
    max_j: usize,
) -> Result<Vec<Cx<T>>> {
    if cnorm(z) == T::zero() {
        return Err(Error::Domain("H_j requires z != 0".into()));
    }
    let zeta0 = cone::<T>() / z;
    let mut psi = phi.symbol_jet(zeta0, max_j)?;
    if alpha != T::one() {
        psi = psi.powc(cx(alpha, T::zero()))?;
    }
    let mut centered = psi.clone();
    centered.c[0] = czero();
    let h = centered.scale(cx(-t, T::zero())).exp();
    if h.c.iter().any(|c| !cfinite(*c)) {
        return Err(Error::Domain("H_j series evaluation overflowed".into()));
    }
    Ok(h.c)
}

/// Single coefficient H_j for the α = 1 symbol.
pub fn h_j<T: Scalar>(phi: &OperatorFunction<T>, z: Cx<T>, t: T, j: usize) -> Result<Cx<T>> {
    Ok(h_values(phi, T::one(), z, t, j)?[j])
}

#[derive(Debug, Clone)]
pub struct SectorReport<T: Scalar> {
    pub pass: bool,
    /// Coefficient index that violates (or binds) the condition.
    pub witness: Option<i64>,
    pub max_value: T,
}

/// Sector condition max_n (|arg c_n| + nθ) < π/2 over the regular part
/// n = 0..k (strict inequality; zero coefficients are skipped).
pub fn sector_check<T: Scalar>(phi: &OperatorFunction<T>, theta: T) -> SectorReport<T> {
    let half_pi = T::c(PI / 2.0);
    let mut max_value = T::c(f64::NEG_INFINITY);
    let mut witness = None;
    for (i, &c) in phi.coeffs.iter().enumerate() {
        let n = phi.l + i as i64;
        if n < 0 || cnorm(c) == T::zero() {
            continue;
        }
        let value = c.im.atan2(c.re).abs() + T::c(n as f64) * theta;
        if value > max_value {
            max_value = value;
            witness = Some(n);
        }
    }
    if witness.is_none() {
        return SectorReport { pass: true, witness: None, max_value: T::zero() };
    }
    SectorReport { pass: max_value < half_pi, witness, max_value }
}

#[derive(Debug, Clone)]
pub struct GrowthReport<T: Scalar> {
    pub pass: bool,
    pub fitted_c: T,
    pub min_re: T,
}

/// Audit Re φ(z) > C e^{H(θ0) r^ϱ} along the ray arg z = θ0; the constants
/// H(θ0), ϱ come from the user-supplied certificate.
pub fn growth_check<T: Scalar>(
    phi: &OperatorFunction<T>,
    theta0: T,
    ray_samples: &[T],
) -> Result<GrowthReport<T>> {
    let cert = phi
        .growth
        .as_ref()
        .ok_or_else(|| Error::Argument("growth audit needs a certificate (H(θ0), ϱ)".into()))?;
    if ray_samples.is_empty() || ray_samples.iter().any(|&r| r <= T::zero()) {
        return Err(Error::Argument("ray samples must be positive radii".into()));
    }
    let mut fitted_c = T::c(f64::INFINITY);
    let mut min_re = T::c(f64::INFINITY);
    for &r in ray_samples {
        let z = cx(r * theta0.cos(), r * theta0.sin());
        let value = phi.eval(z)?;
        let envelope = (cert.h_theta0 * r.powf(cert.rho)).exp();
        let ratio = value.re / envelope;
        if ratio < fitted_c {
            fitted_c = ratio;
        }
        if value.re < min_re {
            min_re = value.re;
        }
    }
    Ok(GrowthReport { pass: fitted_c > T::zero(), fitted_c, min_re })
}

/// Fractional-order abstract Cauchy problem D^{1/α}_- u = φ(W)u, u(0) = f.
#[derive(Debug, Clone)]
pub struct CauchyProblem<T: Scalar> {
    pub w: OpMatrix<T>,
    pub phi: OperatorFunction<T>,
    /// Time-order parameter α ≥ 1 (the derivative order is 1/α).
    pub alpha: T,
    pub f: CVec<T>,
    pub times: Vec<T>,
}

impl<T: Scalar> CauchyProblem<T> {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < T::one() {
            return Err(Error::Domain("time-order parameter must satisfy α ≥ 1".into()));
        }
        if self.f.len() != self.w.dim() {
            return Err(Error::Argument("initial vector dimension mismatch".into()));
        }
        if self.times.is_empty() || self.times[0] != T::zero() {
            return Err(Error::Argument("time grid must start at 0".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("time grid must be increasing".into()));
        }
        Ok(())
    }
}

/// Block contribution 𝒜_ν(φ^α, t)f over the eigenvalues of block ν.
pub fn block_a_nu<T: Scalar>(
    sys: &JordanSystem<T>,
    phi: &OperatorFunction<T>,
    alpha: T,
    t: T,
    f: &CVec<T>,
    nu: usize,
) -> Result<CVec<T>> {
    if nu + 1 >= sys.partition.len() + 1 && nu >= sys.block_count() {
        return Err(Error::Argument("block index outside the partition".into()));
    }
    let g = sys
        .biorth
        .as_ref()
        .ok_or_else(|| Error::Argument("biorthogonal system not constructed".into()))?;
    let (q_lo, q_hi) = (sys.partition[nu], sys.partition[nu + 1]);
    let n = sys.majors.nrows();
    let mut out = CVec::<T>::zeros(n);
    for chain in sys.chains.iter().filter(|c| c.q >= q_lo && c.q < q_hi) {
        let lambda = sys.eigenvalues[chain.q];
        let k = chain.len - 1;
        let h = h_values(phi, alpha, lambda, t, k)?;
        let psi0 = if alpha == T::one() {
            phi.eval(lambda)?
        } else {
            crate::scalar::cpow(phi.eval(lambda)?, cx(alpha, T::zero()))
        };
        let decay = cexp(psi0 * cx(-t, T::zero()));
        // scalar coordinates c_{qξ+i} = (f, g_{qξ+k-i}) / (e_{qξ+i}, g_{qξ+k-i})
        let mut coords = Vec::with_capacity(chain.len);
        for i in 0..chain.len {
            let g_col = g.column(chain.start + (k - i)).into_owned();
            let e_col = sys.majors.column(chain.start + i).into_owned();
            let num = crate::linalg::weighted_inner(&sys.weights, f, &g_col);
            let den = crate::linalg::weighted_inner(&sys.weights, &e_col, &g_col);
            if cnorm(den) < T::c(1e-300) {
                return Err(Error::Linalg("vanishing biorthogonal pairing denominator".into()));
            }
            coords.push(num / den);
        }
        for i in 0..chain.len {
            let mut amp = czero::<T>();
            for j in 0..=(k - i) {
                amp += h[j] * coords[i + j];
            }
            amp *= decay;
            let e_col = sys.majors.column(chain.start + i);
            for r in 0..n {
                out[r] += e_col[r] * amp;
            }
        }
    }
    Ok(out)
}

/// Series solution: per-time values, per-block norms, partial sums and the
/// truncation index actually used.
#[derive(Debug, Clone)]
pub struct SeriesSolution<T: Scalar> {
    pub times: Vec<T>,
    pub values: Vec<CVec<T>>,
    pub block_norms: Vec<Vec<T>>,
    pub partial_sums: Vec<Vec<T>>,
    pub truncation: Vec<usize>,
}

/// Solve the Cauchy problem by the block series u(t) = Σ_ν 𝒜_ν(φ^α, t)f.
/// Blocks stop once three consecutive block norms fall below tol times the
/// running sum.
pub fn solve_cauchy<T: Scalar>(
    problem: &CauchyProblem<T>,
    sys: &JordanSystem<T>,
    tol: T,
) -> Result<SeriesSolution<T>> {
    problem.validate()?;
    // admission: sector condition for the finite regular part, growth
    // condition when a certificate marks the infinite-regular-part regime
    if let Some(cert) = &problem.phi.growth {
        let radii: Vec<T> = (0..40).map(|i| T::c(0.05) * T::usz(i + 1)).collect();
        let rep = growth_check(&problem.phi, cert.theta0, &radii)?;
        if !rep.pass {
            return Err(Error::Domain("growth condition fails along the audited ray".into()));
        }
    } else {
        let rep = sector_check(&problem.phi, problem.phi.theta);
        if !rep.pass {
            return Err(Error::Domain(format!(
                "sector condition fails at coefficient n = {:?}",
                rep.witness
            )));
        }
    }
    let n_blocks = sys.block_count();
    let mut values = Vec::with_capacity(problem.times.len());
    let mut block_norms = Vec::new();
    let mut partial_sums = Vec::new();
    let mut truncation = Vec::new();
    let budget = T::c(1e12) * (problem.f.norm() + T::one());
    for &t in &problem.times {
        let mut acc = CVec::<T>::zeros(problem.w.dim());
        let mut norms = Vec::new();
        let mut sums = Vec::new();
        let mut running = T::zero();
        let mut quiet = 0usize;
        let mut used = n_blocks;
        for nu in 0..n_blocks {
            let contrib = block_a_nu(sys, &problem.phi, problem.alpha, t, &problem.f, nu)?;
            let nrm = crate::linalg::weighted_norm(&sys.weights, &contrib);
            if !nrm.finite() || running > budget {
                return Err(Error::SeriesDivergence {
                    retained: nu,
                    partial_sums: sums.iter().map(|s: &T| s.f64()).collect(),
                });
            }
            acc += contrib;
            running += nrm;
            norms.push(nrm);
            sums.push(running);
            if nrm < tol * (running + T::c(1e-300)) {
                quiet += 1;
                if quiet >= 3 {
                    used = nu + 1;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        values.push(acc);
        block_norms.push(norms);
        partial_sums.push(sums);
        truncation.push(used);
    }
    Ok(SeriesSolution { times: problem.times.clone(), values, block_norms, partial_sums, truncation })
}

#[derive(Debug, Clone)]
pub struct ResidualReport<T: Scalar> {
    /// Worst relative residual ‖D^{1/α}_- u - φ(W)u‖ / ‖φ(W)u‖ over the
    /// audited interior times.
    pub max_rel: T,
    pub audited: usize,
    pub tail_warning: bool,
}

/// Audit the solved trajectory against the defining equation using the
/// generalized fractional time derivative.
pub fn residual_check<T: Scalar>(
    solution: &SeriesSolution<T>,
    problem: &CauchyProblem<T>,
) -> Result<ResidualReport<T>> {
    let n = solution.times.len();
    if n < 8 {
        return Err(Error::Argument("residual audit needs at least eight samples".into()));
    }
    let dt = solution.times[1] - solution.times[0];
    for w in solution.times.windows(2) {
        if ((w[1] - w[0] - dt) / dt).abs() > T::c(1e-10) {
            return Err(Error::Argument("residual audit needs a uniform time grid".into()));
        }
    }
    let samples: Vec<Vec<Cx<T>>> = solution
        .values
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    let deriv = frac1d::frac_time_deriv(&TimeSeries { dt, samples }, T::one() / problem.alpha)?;
    let phi_w = problem.phi.of_matrix(&problem.w)?;
    // skip the one-sided ends and the tail-fit window
    let hi = n - (n / 10).max(3);
    let mut max_rel = T::zero();
    let mut audited = 0usize;
    for i in 2..hi {
        let rhs = phi_w.apply(&solution.values[i]);
        let lhs = CVec::<T>::from_vec(deriv.values[i].clone());
        let denom = crate::linalg::weighted_norm(&phi_w.weights, &rhs);
        if denom <= T::c(1e-14) {
            continue;
        }
        let diff = &lhs - &rhs;
        let rel = crate::linalg::weighted_norm(&phi_w.weights, &diff) / denom;
        if rel > max_rel {
            max_rel = rel;
        }
        audited += 1;
    }
    Ok(ResidualReport { max_rel, audited, tail_warning: deriv.tail_warning })
}

#[derive(Debug, Clone)]
pub struct UniquenessReport<T: Scalar> {
    pub accretive: bool,
    pub min_re: T,
    pub range: AccretivityReport<T>,
}

/// Informational accretivity audit of φ(W), a proxy for the accretivity of
/// the time-axis operator appearing in the uniqueness condition.
pub fn uniqueness_diagnostic<T: Scalar>(problem: &CauchyProblem<T>) -> Result<UniquenessReport<T>> {
    let phi_w = problem.phi.of_matrix(&problem.w)?;
    let range = numerical_range_sample(&phi_w, 64, 23)?;
    Ok(UniquenessReport { accretive: range.min_re >= -T::c(1e-10), min_re: range.min_re, range })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_mat;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    fn op(mat: CMat<f64>) -> OpMatrix<f64> {
        let n = mat.nrows();
        OpMatrix::new(mat, vec![1.0; n], Provenance::General).unwrap()
    }

    fn herm_pd(n: usize, seed: u64) -> OpMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = CMat::<f64>::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        op(&b * b.adjoint() + CMat::<f64>::identity(n, n) * c(0.5, 0.0))
    }

    #[test]
    fn diagonalizable_gives_trivial_chains() {
        let w = herm_pd(6, 1);
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        assert_eq!(sys.chains.len(), 6);
        assert!(sys.chains.iter().all(|c| c.len == 1));
        assert!(sys.max_residual < 1e-10);
        // λ ordered by modulus
        for w in sys.eigenvalues.windows(2) {
            assert!(cnorm(w[0]) <= cnorm(w[1]) + 1e-12);
        }
    }

    #[test]
    fn two_by_two_jordan_block() {
        let w = op(CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]));
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        assert_eq!(sys.chains.len(), 1);
        assert_eq!(sys.chains[0].len, 2);
        assert!(cnorm(sys.eigenvalues[0] - c(2.0, 0.0)) < 1e-10);
        // pairing is anti-diagonal within the chain
        let g = sys.biorth.as_ref().unwrap();
        let e0 = sys.majors.column(0).into_owned();
        let e1 = sys.majors.column(1).into_owned();
        let g0 = g.column(0).into_owned();
        let g1 = g.column(1).into_owned();
        let pair = |e: &CVec<f64>, gg: &CVec<f64>| crate::linalg::weighted_inner(&sys.weights, e, gg);
        assert!(cnorm(pair(&e0, &g1)) > 0.5);
        assert!(cnorm(pair(&e1, &g0)) > 0.5);
        assert!(cnorm(pair(&e0, &g0)) < 1e-10);
    }

    #[test]
    fn prescribed_structure_recovered_generically() {
        // W = V J V^{-1} with chains (λ=1, len 2) and (λ=3, len 1)
        let v = CMat::from_row_slice(3, 3, &[
            c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.3),
            c(0.1, 0.0), c(1.0, 0.0), c(0.2, 0.0),
            c(0.0, 0.2), c(0.1, 0.0), c(1.0, 0.0),
        ]);
        let blocks = [(c(1.0, 0.0), 2usize), (c(3.0, 0.0), 1usize)];
        let mut j = CMat::<f64>::zeros(3, 3);
        j[(0, 0)] = c(1.0, 0.0);
        j[(0, 1)] = c(1.0, 0.0);
        j[(1, 1)] = c(1.0, 0.0);
        j[(2, 2)] = c(3.0, 0.0);
        let w_mat = &v * j * inv_mat(&v).unwrap();
        let w = op(w_mat);

        let generic = jordan_decompose(&w, 1e-6).unwrap();
        let mut lens: Vec<usize> = generic.chains.iter().map(|c| c.len).collect();
        lens.sort();
        assert_eq!(lens, vec![1, 2]);

        let exact = jordan_from_structure(&w, &v, &blocks, 1e-8).unwrap();
        let mut lens: Vec<usize> = exact.chains.iter().map(|c| c.len).collect();
        lens.sort();
        assert_eq!(lens, vec![1, 2]);
        assert!(exact.max_residual < 1e-8);
    }

    #[test]
    fn merged_cluster_reports_defect() {
        let w = op(CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(1.05, 0.0)])));
        let err = jordan_decompose(&w, 0.2).unwrap_err();
        assert!(matches!(err, Error::DefectiveCluster { .. }), "{err}");
    }

    #[test]
    fn biorthogonality_across_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = CMat::<f64>::from_fn(5, 5, |i, j| {
            if i == j { c(1.0, 0.0) } else { c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)) }
        });
        let blocks = [
            (c(0.8, 0.0), 2usize),
            (c(2.0, 0.5), 2usize),
            (c(4.0, 0.0), 1usize),
        ];
        let mut j = CMat::<f64>::zeros(5, 5);
        let mut col = 0;
        for (lam, len) in &blocks {
            for i in 0..*len {
                j[(col + i, col + i)] = *lam;
                if i + 1 < *len {
                    j[(col + i, col + i + 1)] = c(1.0, 0.0);
                }
            }
            col += len;
        }
        let w = op(&v * j * inv_mat(&v).unwrap());
        let sys = jordan_from_structure(&w, &v, &blocks, 1e-7).unwrap();
        let g = sys.biorth.as_ref().unwrap();
        for ci in &sys.chains {
            for cj in &sys.chains {
                if ci.q == cj.q {
                    continue;
                }
                for a in 0..ci.len {
                    for b in 0..cj.len {
                        let e = sys.majors.column(ci.start + a).into_owned();
                        let gg = g.column(cj.start + b).into_owned();
                        let p = crate::linalg::weighted_inner(&sys.weights, &e, &gg);
                        assert!(cnorm(p) < 1e-10, "cross pairing {}", cnorm(p));
                    }
                }
            }
        }
    }

    #[test]
    fn hermitian_biorthogonal_collinear() {
        let w = herm_pd(5, 9);
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        let g = sys.biorth.as_ref().unwrap();
        for k in 0..5 {
            let e = sys.majors.column(k).into_owned();
            let gg = g.column(k).into_owned();
            // g ∝ e: the normalized overlap has modulus one
            let overlap = cnorm(e.dotc(&gg)) / (e.norm() * gg.norm());
            assert_relative_eq!(overlap, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn h0_is_one_and_h1_matches_hand_value() {
        let phi = OperatorFunction::<f64>::identity(0.1);
        for (z, t) in [(c(2.0, 0.0), 0.7), (c(0.5, 1.0), 2.0), (c(-1.0, 3.0), 0.01)] {
            let h = h_values(&phi, 1.0, z, t, 3).unwrap();
            assert!(cnorm(h[0] - c(1.0, 0.0)) < 1e-14);
            // φ(z)=z gives H_1 = t z²
            assert!(cnorm(h[1] - z * z * c(t, 0.0)) < 1e-10, "H1 {:?}", h[1]);
        }
    }

    #[test]
    fn h_j_matches_contour_oracle() {
        // Cauchy-integral cross-check of the series derivatives
        let phi = OperatorFunction::new(
            0,
            vec![c(0.3, 0.1), c(1.0, 0.0), c(0.2, -0.1), c(0.05, 0.0)],
            0.1,
        )
        .unwrap();
        let z = c(1.4, 0.6);
        let t = 0.8;
        let h = h_values(&phi, 1.0, z, t, 4).unwrap();
        let zeta0 = c(1.0, 0.0) / z;
        let psi0 = phi.eval(z).unwrap();
        let radius = 0.2 * cnorm(zeta0);
        let m = 512;
        for j in 0..=4usize {
            let mut acc = c(0.0, 0.0);
            for p in 0..m {
                let th = 2.0 * PI * p as f64 / m as f64;
                let zeta = zeta0 + c(radius * th.cos(), radius * th.sin());
                let val = cexp(phi.eval(c(1.0, 0.0) / zeta).unwrap() * c(-t, 0.0));
                let rot = c((j as f64 * th).cos(), -(j as f64 * th).sin());
                acc += val * rot;
            }
            let coeff = acc / c(m as f64 * radius.powi(j as i32), 0.0);
            let oracle = cexp(psi0 * c(t, 0.0)) * coeff;
            assert!(
                cnorm(h[j] - oracle) / cnorm(oracle).max(1.0) < 1e-8,
                "j={j}: {:?} vs {:?}",
                h[j],
                oracle
            );
        }
    }

    #[test]
    fn sector_check_cases() {
        let pos = OperatorFunction::new(0, vec![c(1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)], 0.0).unwrap();
        assert!(sector_check(&pos, PI / 8.0).pass);
        let bad = OperatorFunction::new(0, vec![c(1.0, 0.0), c(0.0, 1.0)], 0.0).unwrap();
        let rep = sector_check(&bad, PI / 8.0);
        assert!(!rep.pass);
        assert_eq!(rep.witness, Some(1));
        // boundary equality fails (strict inequality)
        let boundary = OperatorFunction::new(1, vec![c(1.0, 0.0)], 0.0).unwrap();
        let rep = sector_check(&boundary, PI / 2.0);
        assert!(!rep.pass);
    }

    #[test]
    fn growth_check_cases() {
        let mut phi = OperatorFunction::<f64>::identity(0.1);
        phi.growth = Some(GrowthCertificate { theta0: 0.0, h_theta0: 0.01, rho: 0.1, zeta: 0.5 });
        let radii: Vec<f64> = (1..=30).map(|i| 0.2 * i as f64).collect();
        let rep = growth_check(&phi, 0.0, &radii).unwrap();
        assert!(rep.pass && rep.fitted_c > 0.0);

        let mut neg = OperatorFunction::new(1, vec![c(-1.0, 0.0)], 0.1).unwrap();
        neg.growth = Some(GrowthCertificate { theta0: 0.0, h_theta0: 0.01, rho: 0.1, zeta: 0.5 });
        let rep = growth_check(&neg, 0.0, &radii).unwrap();
        assert!(!rep.pass);

        let plain = OperatorFunction::<f64>::identity(0.1);
        assert!(growth_check(&plain, 0.0, &radii).is_err());
    }

    #[test]
    fn blocks_reconstruct_at_t_zero() {
        let w = herm_pd(6, 3);
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        let phi = OperatorFunction::<f64>::identity(0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = CVec::from_fn(6, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut acc = CVec::<f64>::zeros(6);
        for nu in 0..sys.block_count() {
            acc += block_a_nu(&sys, &phi, 1.0, 0.0, &f, nu).unwrap();
        }
        assert!((acc - f).norm() < 1e-8);
    }

    #[test]
    fn jordan_block_matches_matrix_exponential() {
        let w = op(CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]));
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        let phi = OperatorFunction::<f64>::identity(0.1);
        let f = CVec::from_vec(vec![c(0.7, -0.2), c(1.1, 0.4)]);
        for t in [0.0, 0.3, 1.5] {
            let mut u = CVec::<f64>::zeros(2);
            for nu in 0..sys.block_count() {
                u += block_a_nu(&sys, &phi, 1.0, t, &f, nu).unwrap();
            }
            let oracle = expm_mat(&(w.mat.clone() * c(-t, 0.0))) * &f;
            assert!((u - oracle).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn solve_matches_exponential_oracle() {
        // Hermitian PD with a polynomial symbol
        let w = herm_pd(8, 7);
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        let phi = OperatorFunction::new(0, vec![c(0.2, 0.0), c(1.0, 0.0), c(0.1, 0.0)], 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = CVec::from_fn(8, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let problem = CauchyProblem {
            w: w.clone(),
            phi: phi.clone(),
            alpha: 1.0,
            f: f.clone(),
            times: vec![0.0, 0.1, 1.0, 5.0],
        };
        let sol = solve_cauchy(&problem, &sys, 1e-14).unwrap();
        let phi_w = phi.of_matrix(&w).unwrap();
        for (i, &t) in problem.times.iter().enumerate() {
            let oracle = expm_mat(&(phi_w.mat.clone() * c(-t, 0.0))) * &f;
            let rel = (&sol.values[i] - &oracle).norm() / oracle.norm().max(1e-30);
            assert!(rel < 1e-8, "t={t}: rel {rel}");
        }
        // partial sums are monotone
        for sums in &sol.partial_sums {
            for w in sums.windows(2) {
                assert!(w[1] >= w[0] - 1e-15);
            }
        }
    }

    #[test]
    fn solve_matches_oracle_for_defective_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = CMat::<f64>::from_fn(6, 6, |i, j| {
            if i == j { c(1.0, 0.0) } else { c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)) }
        });
        let blocks = [
            (c(1.0, 0.0), 2usize),
            (c(2.5, 0.0), 1usize),
            (c(0.6, 0.4), 2usize),
            (c(4.0, 0.0), 1usize),
        ];
        let mut j = CMat::<f64>::zeros(6, 6);
        let mut col = 0;
        for (lam, len) in &blocks {
            for i in 0..*len {
                j[(col + i, col + i)] = *lam;
                if i + 1 < *len {
                    j[(col + i, col + i + 1)] = c(1.0, 0.0);
                }
            }
            col += len;
        }
        let w = op(&v * j * inv_mat(&v).unwrap());
        let sys = jordan_from_structure(&w, &v, &blocks, 1e-7).unwrap();
        let phi = OperatorFunction::<f64>::identity(0.3);
        let f = CVec::from_fn(6, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let problem = CauchyProblem {
            w: w.clone(),
            phi,
            alpha: 1.0,
            f: f.clone(),
            times: vec![0.0, 0.1, 1.0, 5.0],
        };
        let sol = solve_cauchy(&problem, &sys, 1e-14).unwrap();
        for (i, &t) in problem.times.iter().enumerate() {
            let oracle = expm_mat(&(w.mat.clone() * c(-t, 0.0))) * &f;
            let rel = (&sol.values[i] - &oracle).norm() / oracle.norm().max(1e-30);
            assert!(rel < 1e-8, "t={t}: rel {rel}");
        }
    }

    #[test]
    fn residual_audit_fractional_order() {
        // α = 2: D^{1/2}_- u = W u with diagonal W
        let w = op(CMat::from_diagonal(&CVec::from_vec(vec![c(0.8, 0.0), c(1.5, 0.0)])));
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        let phi = OperatorFunction::<f64>::identity(0.05);
        let f = CVec::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        let mut last = f64::INFINITY;
        for (n, t_max) in [(200usize, 6.0), (400, 8.0)] {
            let dt = t_max / (n - 1) as f64;
            let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
            let problem = CauchyProblem { w: w.clone(), phi: phi.clone(), alpha: 2.0, f: f.clone(), times };
            let sol = solve_cauchy(&problem, &sys, 1e-14).unwrap();
            let rep = residual_check(&sol, &problem).unwrap();
            assert!(rep.audited > 0);
            assert!(rep.max_rel < last, "residual {} did not drop below {}", rep.max_rel, last);
            last = rep.max_rel.f64();
        }
        assert!(last < 0.05, "final residual {last}");
    }

    #[test]
    fn block_norms_summable_on_spread_spectrum() {
        // eigenvalues across decades force several partition blocks
        let diag: Vec<Cx<f64>> = (0..12)
            .map(|i| c(0.5 * 3.0f64.powi(i % 6) + i as f64 * 0.01, 0.0))
            .collect();
        let w = op(CMat::from_diagonal(&CVec::from_vec(diag)));
        let sys = jordan_decompose(&w, 1e-9).unwrap();
        assert!(sys.block_count() >= 2);
        let phi = OperatorFunction::<f64>::identity(0.05);
        let f = CVec::from_fn(12, |i, _| c(1.0 / (i + 1) as f64, 0.0));
        let problem = CauchyProblem {
            w,
            phi,
            alpha: 1.0,
            f,
            times: vec![0.0, 0.2, 1.0],
        };
        let sol = solve_cauchy(&problem, &sys, 1e-14).unwrap();
        for sums in &sol.partial_sums {
            assert!(sums.last().unwrap().is_finite());
        }
    }

    #[test]
    fn uniqueness_diagnostic_cases() {
        let w = herm_pd(4, 21);
        let phi = OperatorFunction::<f64>::identity(0.1);
        let problem = CauchyProblem {
            w,
            phi,
            alpha: 1.0,
            f: CVec::from_element(4, c(1.0, 0.0)),
            times: vec![0.0, 1.0],
        };
        let rep = uniqueness_diagnostic(&problem).unwrap();
        assert!(rep.accretive);

        let skew = op(CMat::<f64>::identity(3, 3) * c(0.0, 1.0) - CMat::<f64>::identity(3, 3) * c(0.1, 0.0));
        let problem = CauchyProblem {
            w: skew,
            phi: OperatorFunction::<f64>::identity(0.1),
            alpha: 1.0,
            f: CVec::from_element(3, c(1.0, 0.0)),
            times: vec![0.0, 1.0],
        };
        let rep = uniqueness_diagnostic(&problem).unwrap();
        assert!(!rep.accretive);
    }

    #[test]
    fn solver_rejects_sector_violation() {
        let w = herm_pd(3, 30);
        let sys = jordan_decompose(&w, 1e-8).unwrap();
        let phi = OperatorFunction::new(0, vec![c(1.0, 0.0), c(0.0, 1.0)], 0.1).unwrap();
        let problem = CauchyProblem {
            w,
            phi,
            alpha: 1.0,
            f: CVec::from_element(3, c(1.0, 0.0)),
            times: vec![0.0, 1.0],
        };
        assert!(solve_cauchy(&problem, &sys, 1e-12).is_err());
    }
}
