//! Directional fractional calculus on convex domains discretized by a
//! [`RayMesh`]: directional integrals, the truncated difference operators, the
//! directional Marchaud-type derivative with its boundary term, the
//! normalized kernel of the representation machinery, and accretivity
//! constants and audits.

use crate::error::{Error, Result};
use crate::frac1d::FracParams;
use crate::mesh::{RayFn, RayMesh};
use crate::prodint::{self, DerivKind, RayData};
use crate::scalar::{cfinite, factorial, gamma, Cx, Scalar};
use num_complex::Complex;
use std::sync::Arc;

/// Real non-negative weight on a ray mesh with a Hölder-Lipschitz
/// certificate |ρ(Q) - ρ(T)| ≤ M |QT|^λ and an optional per-ray
/// monotone-nonincreasing flag.
#[derive(Debug, Clone)]
pub struct DirWeight<T: Scalar> {
    pub samples: RayFn<T>,
    pub lambda: T,
    pub lip_const: T,
    pub monotone: bool,
}

impl<T: Scalar> DirWeight<T> {
    /// Validates non-negativity, audits the Lipschitz certificate on all
    /// along-ray sample pairs, and verifies the monotone flag when set.
    pub fn new(samples: RayFn<T>, lambda: T, lip_const: T, monotone: bool) -> Result<Self> {
        if lambda <= T::zero() || lambda > T::one() {
            return Err(Error::Domain("Lipschitz exponent must lie in (0, 1]".into()));
        }
        if lip_const < T::zero() {
            return Err(Error::Domain("Lipschitz constant must be non-negative".into()));
        }
        for (k, vals) in samples.values.iter().enumerate() {
            let nodes = &samples.mesh.rays[k].nodes;
            for (i, v) in vals.iter().enumerate() {
                if v.im != T::zero() || v.re < T::zero() {
                    return Err(Error::Domain("weight must be real non-negative".into()));
                }
                for (j, u) in vals.iter().enumerate().skip(i + 1) {
                    let gap = nodes[j] - nodes[i];
                    if (v.re - u.re).abs() > lip_const * gap.powf(lambda) + T::c(1e-12) {
                        return Err(Error::Domain(
                            "weight samples violate the Lipschitz certificate".into(),
                        ));
                    }
                    if monotone && u.re > v.re + T::c(1e-12) {
                        return Err(Error::Domain(
                            "weight is not monotone non-increasing along a ray".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self { samples, lambda, lip_const, monotone })
    }

    pub fn constant(mesh: &Arc<RayMesh<T>>, c: T) -> Result<Self> {
        Self::new(
            RayFn::constant(mesh, Complex::new(c, T::zero())),
            T::one(),
            T::zero(),
            true,
        )
    }

    /// Infimum of the weight over the sampled mesh.
    pub fn inf(&self) -> T {
        self.samples
            .values
            .iter()
            .flatten()
            .map(|v| v.re)
            .fold(T::c(f64::INFINITY), |a, b| if b < a { b } else { a })
    }
}

/// The explicit constants of the directional calculus.
#[derive(Debug, Clone, Copy)]
pub struct KipConstants<T: Scalar> {
    /// (n-1)!/Γ(n-α), the boundary-term coefficient.
    pub c_n_alpha: T,
    /// Accretivity lower bound; negative values mean the bound is vacuous.
    pub c_alpha_rho: T,
    /// d^α/Γ(α+1), the directional-integral norm constant.
    pub c_alpha_d: T,
}

pub fn c_n_alpha<T: Scalar>(alpha: T, n_dim: usize) -> T {
    factorial::<T>(n_dim - 1) / gamma(T::usz(n_dim) - alpha)
}

pub fn kip_constants<T: Scalar>(
    alpha: T,
    n_dim: usize,
    diam: T,
    rho: Option<&DirWeight<T>>,
) -> Result<KipConstants<T>> {
    let (c_rho, _) = match rho {
        Some(w) => accretivity_constant(alpha, w, diam, n_dim)?,
        None => (T::zero(), false),
    };
    Ok(KipConstants {
        c_n_alpha: c_n_alpha(alpha, n_dim),
        c_alpha_rho: c_rho,
        c_alpha_d: diam.powf(alpha) / gamma(alpha + T::one()),
    })
}

fn check_order<T: Scalar>(alpha: T) -> Result<()> {
    if alpha < T::zero() || alpha >= T::one() {
        return Err(Error::Domain("order must lie in [0, 1)".into()));
    }
    Ok(())
}

/// Left directional fractional integral,
/// (1/Γ(α)) ∫_0^r f(P+te) (r-t)^{α-1} (t/r)^{n-1} dt per ray; at n = 1 this is
/// the same evaluation as the 1D integral, node for node.
pub fn dir_integral_left<T: Scalar>(f: &RayFn<T>, alpha: T) -> Result<RayFn<T>> {
    check_order(alpha)?;
    if alpha == T::zero() {
        return Ok(f.clone());
    }
    let n = f.mesh.dim;
    let values = f
        .mesh
        .rays
        .iter()
        .zip(&f.values)
        .map(|(ray, vals)| prodint::frac_integral_left(&ray.nodes, vals, alpha, n))
        .collect();
    RayFn::new(f.mesh.clone(), values)
}

/// Right directional integral, (1/Γ(α)) ∫_r^{d(e)} f (t-r)^{α-1} dt per ray
/// (no radial weight).
pub fn dir_integral_right<T: Scalar>(f: &RayFn<T>, alpha: T) -> Result<RayFn<T>> {
    check_order(alpha)?;
    if alpha == T::zero() {
        return Ok(f.clone());
    }
    let values = f
        .mesh
        .rays
        .iter()
        .zip(&f.values)
        .map(|(ray, vals)| prodint::frac_integral_right(&ray.nodes, vals, alpha))
        .collect();
    RayFn::new(f.mesh.clone(), values)
}

/// Weighted left integral: dir_integral_left applied to μ·f.
pub fn dir_integral_weighted<T: Scalar>(
    f: &RayFn<T>,
    alpha: T,
    mu: &DirWeight<T>,
) -> Result<RayFn<T>> {
    dir_integral_left(&f.scale_by(&mu.samples), alpha)
}

/// A truncated difference operator together with the rays that fell entirely
/// into the closed-form branch (ε ≥ d(e)).
#[derive(Debug, Clone)]
pub struct PsiResult<T: Scalar> {
    pub fun: RayFn<T>,
    pub closed_form_rays: Vec<usize>,
}

/// ψ⁺_ε per ray, both branches (the r < ε branch in closed form, non-finite
/// at r = 0).
pub fn psi_plus<T: Scalar>(f: &RayFn<T>, params: &FracParams<T>) -> Result<PsiResult<T>> {
    let n = f.mesh.dim;
    let mut closed = Vec::new();
    let values = f
        .mesh
        .rays
        .iter()
        .zip(&f.values)
        .enumerate()
        .map(|(k, (ray, vals))| {
            if params.epsilon >= ray.length {
                closed.push(k);
            }
            prodint::psi_plus(&ray.nodes, vals, params.alpha, params.epsilon, n)
        })
        .collect();
    Ok(PsiResult { fun: RayFn::new(f.mesh.clone(), values)?, closed_form_rays: closed })
}

/// ψ⁻_ε per ray, both branches (non-finite at r = d(e)).
pub fn psi_minus<T: Scalar>(f: &RayFn<T>, params: &FracParams<T>) -> Result<PsiResult<T>> {
    let mut closed = Vec::new();
    let values = f
        .mesh
        .rays
        .iter()
        .zip(&f.values)
        .enumerate()
        .map(|(k, (ray, vals))| {
            if params.epsilon >= ray.length {
                closed.push(k);
            }
            prodint::psi_minus(&ray.nodes, vals, params.alpha, params.epsilon)
        })
        .collect();
    Ok(PsiResult { fun: RayFn::new(f.mesh.clone(), values)?, closed_form_rays: closed })
}

/// A directional derivative with the achieved truncation radius and the
/// successive-distance sequence of the limit protocol.
#[derive(Debug, Clone)]
pub struct KipDeriv<T: Scalar> {
    pub fun: RayFn<T>,
    pub epsilon: T,
    pub distances: Vec<T>,
}

/// The directional Marchaud-type derivative
/// (α/Γ(1-α)) ∫_0^r [f(Q)-f(T)] (r-t)^{-α-1} (t/r)^{n-1} dt
///   + ((n-1)!/Γ(n-α)) f(Q) r^{-α},
/// realized as the L_2 limit ε → 0 of the truncated operator across all rays
/// simultaneously. At n = 1 this coincides with the left Marchaud derivative.
pub fn kipriyanov_apply<T: Scalar>(f: &RayFn<T>, alpha: T, tol: T) -> Result<KipDeriv<T>> {
    if alpha <= T::zero() || alpha >= T::one() {
        return Err(Error::Domain("order must lie in (0, 1)".into()));
    }
    let mesh = &f.mesh;
    let quads: Vec<Vec<T>> = (0..mesh.rays.len())
        .map(|k| (0..mesh.rays[k].nodes.len()).map(|i| mesh.node_measure(k, i)).collect())
        .collect();
    let rays: Vec<RayData<'_, T>> = mesh
        .rays
        .iter()
        .zip(&f.values)
        .zip(&quads)
        .map(|((ray, vals), q)| RayData { nodes: &ray.nodes, values: vals, quad: q })
        .collect();
    let eps0 = mesh.diam * T::c(0.25);
    let outcome = prodint::eps_limit(
        &rays,
        alpha,
        mesh.dim,
        DerivKind::Kipriyanov,
        eps0,
        tol,
        900,
        T::c(2.0),
    )?;
    Ok(KipDeriv {
        fun: RayFn::new(mesh.clone(), outcome.values)?,
        epsilon: outcome.epsilon,
        distances: outcome.distances,
    })
}

/// Normalized kernel (sin απ/π)(t₊^α - (t-1)₊^α)/t; positive on (0, ∞) with
/// unit integral, non-finite at t = 0.
pub fn kernel_k<T: Scalar>(t: T, alpha: T) -> T {
    if t < T::zero() {
        return T::zero();
    }
    if t == T::zero() {
        return T::c(f64::INFINITY);
    }
    let scale = T::c((alpha.f64() * std::f64::consts::PI).sin() / std::f64::consts::PI);
    let tm1 = if t > T::one() { (t - T::one()).powf(alpha) } else { T::zero() };
    scale * (t.powf(alpha) - tm1) / t
}

/// |∫_0^∞ 𝒦(t)dt − 1|. The (0,1) part integrates in closed form to
/// (sin απ/π)/α; the tail is mapped onto (0,1) by t = 1/s and integrated
/// adaptively.
pub fn kernel_normalization_residual(alpha: f64) -> f64 {
    let scale = (alpha * std::f64::consts::PI).sin() / std::f64::consts::PI;
    let head = scale / alpha;
    // tail integrand s^{-α} (1-(1-s)^α)/s; s = v^{1/(1-α)} absorbs the
    // endpoint singularity, leaving a smooth integrand
    let g = |s: f64| {
        if s < 1e-8 {
            alpha * (1.0 + 0.5 * (alpha - 1.0).abs() * s)
        } else {
            (1.0 - (1.0 - s).powf(alpha)) / s
        }
    };
    let (tail, _) = crate::quad::adaptive(
        &|v: f64| scale / (1.0 - alpha) * g(v.powf(1.0 / (1.0 - alpha))),
        0.0,
        1.0,
        1e-12,
    );
    (head + tail - 1.0).abs()
}

/// Representation approximant φ⁺_ε f = (1/Γ(1-α))(f r^{-α} + α ψ⁺_ε f).
///
/// The r = 0 node, where r^{-α} is genuinely singular, is filled by linear
/// extrapolation from its two neighbors so the approximant stays composable
/// with the directional integral (a single node is a null set in L_p).
pub fn representation_approximant<T: Scalar>(
    f: &RayFn<T>,
    params: &FracParams<T>,
) -> Result<RayFn<T>> {
    let g1 = T::one() / gamma(T::one() - params.alpha);
    let psi = psi_plus(f, params)?;
    let mut values: Vec<Vec<Cx<T>>> = Vec::with_capacity(f.mesh.rays.len());
    for (k, ray) in f.mesh.rays.iter().enumerate() {
        let mut out: Vec<Cx<T>> = ray
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let lead = if crate::scalar::cnorm(f.values[k][i]) == T::zero() {
                    Complex::new(T::zero(), T::zero())
                } else {
                    f.values[k][i] * r.powf(-params.alpha)
                };
                (lead + psi.fun.values[k][i] * params.alpha) * g1
            })
            .collect();
        for i in 0..out.len() {
            if !cfinite(out[i]) && i + 2 < out.len() && cfinite(out[i + 1]) && cfinite(out[i + 2]) {
                out[i] = out[i + 1] * T::c(2.0) - out[i + 2];
            }
        }
        values.push(out);
    }
    RayFn::new(f.mesh.clone(), values)
}

/// The three-region split of ‖𝔈^α_{0+} φ⁺_ε f − f‖_p^p: rays with d(e) ≥ ε
/// contribute the r ∈ (ε, d) part (i1) and the r < ε part (i2); rays with
/// d(e) < ε contribute i3. Each component vanishes as ε → 0.
#[derive(Debug, Clone, Copy)]
pub struct RepresentationSplit<T: Scalar> {
    pub i1: T,
    pub i2: T,
    pub i3: T,
}

impl<T: Scalar> RepresentationSplit<T> {
    pub fn total_norm(&self, p: T) -> T {
        (self.i1 + self.i2 + self.i3).powf(T::one() / p)
    }
}

pub fn representation_split<T: Scalar>(
    f: &RayFn<T>,
    params: &FracParams<T>,
) -> Result<RepresentationSplit<T>> {
    let approx = representation_approximant(f, params)?;
    let composed = dir_integral_left(&approx, params.alpha)?;
    let mesh = &f.mesh;
    let (mut i1, mut i2, mut i3) = (T::zero(), T::zero(), T::zero());
    for (k, ray) in mesh.rays.iter().enumerate() {
        let short_ray = ray.length < params.epsilon;
        for (i, &r) in ray.nodes.iter().enumerate() {
            let dv = composed.values[k][i] - f.values[k][i];
            if !cfinite(dv) {
                continue;
            }
            let contrib = mesh.node_measure(k, i) * crate::scalar::cnorm(dv).powf(params.p);
            if short_ray {
                i3 += contrib;
            } else if r < params.epsilon {
                i2 += contrib;
            } else {
                i1 += contrib;
            }
        }
    }
    Ok(RepresentationSplit { i1, i2, i3 })
}

/// Lower accretivity bound C_{α,ρ}; returns (value, non_coercive). The
/// monotone-weight form is used when the weight carries the flag, otherwise
/// the general Lipschitz form, which requires λ > α and may come out
/// non-positive (reported, not asserted).
pub fn accretivity_constant<T: Scalar>(
    alpha: T,
    rho: &DirWeight<T>,
    diam: T,
    n_dim: usize,
) -> Result<(T, bool)> {
    let base = T::one() / gamma(T::one() - alpha) + c_n_alpha(alpha, n_dim);
    let scale = T::one() / (T::c(2.0) * diam.powf(alpha));
    if rho.monotone {
        return Ok((scale * base, false));
    }
    if rho.lambda <= alpha {
        return Err(Error::Domain(
            "general accretivity constant requires Lipschitz exponent > order".into(),
        ));
    }
    let inf_rho = rho.inf();
    if inf_rho <= T::zero() {
        return Err(Error::Domain("general constant requires inf ρ > 0".into()));
    }
    let lip_term = alpha * rho.lip_const * diam.powf(rho.lambda)
        / (T::c(2.0) * gamma(T::one() - alpha) * (rho.lambda - alpha) * inf_rho);
    let c = scale * (base - lip_term);
    Ok((c, c <= T::zero()))
}

/// Outcome of the accretivity inequality audit over a function suite.
#[derive(Debug, Clone)]
pub struct AccretivityReport<T: Scalar> {
    pub ratios: Vec<T>,
    pub min_ratio: T,
    pub constant: T,
    pub non_coercive: bool,
    pub pass: bool,
}

/// Audits Re(f, 𝔇^α f)_ρ ≥ C_{α,ρ} ‖f‖²_ρ over a suite of functions
/// vanishing on the boundary; passes iff the minimum Rayleigh ratio stays
/// above C_{α,ρ}(1 − slack). In the non-coercive regime the inequality is
/// reported but not asserted.
pub fn accretivity_check<T: Scalar>(
    suite: &[RayFn<T>],
    alpha: T,
    rho: &DirWeight<T>,
    deriv_tol: T,
    slack: T,
) -> Result<AccretivityReport<T>> {
    if suite.is_empty() {
        return Err(Error::Argument("empty probe suite".into()));
    }
    let mesh = &suite[0].mesh;
    let (constant, non_coercive) = accretivity_constant(alpha, rho, mesh.diam, mesh.dim)?;
    let mut ratios = Vec::with_capacity(suite.len());
    for f in suite {
        let norm2 = f.inner_product(f, Some(&rho.samples)).re;
        if norm2 <= T::zero() {
            return Err(Error::Argument("probe with zero weighted norm".into()));
        }
        let df = kipriyanov_apply(f, alpha, deriv_tol)?;
        let ratio = f.inner_product(&df.fun, Some(&rho.samples)).re / norm2;
        ratios.push(ratio);
    }
    let min_ratio = ratios
        .iter()
        .copied()
        .fold(T::c(f64::INFINITY), |a, b| if b < a { b } else { a });
    let pass = non_coercive || min_ratio >= constant * (T::one() - slack);
    Ok(AccretivityReport { ratios, min_ratio, constant, non_coercive, pass })
}
