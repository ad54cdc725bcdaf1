//! Product-integration kernels shared by the 1D and directional modules.
//!
//! The sampled function is interpolated piecewise-linearly and the singular
//! kernel moments are integrated analytically, which keeps uniform O(h^2)
//! accuracy despite the endpoint singularities. The directional operators at
//! n = 1 reuse exactly these routines, so the dimensional reduction is
//! bit-for-bit.

use crate::error::Error;
use crate::scalar::{binomial, gamma, Cx, Scalar};
use num_complex::Complex;

fn czero<T: Scalar>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

/// Polynomial coefficients of (a0 + a1 (r - u)) (r - u)^{n-1} in powers of u.
/// Returns c[0..=n] with the convention n >= 1.
fn poly_in_u<T: Scalar>(a0: Cx<T>, a1: Cx<T>, r: T, n: usize) -> Vec<Cx<T>> {
    let b0 = a0 + a1 * r;
    // (r - u)^{n-1} = sum_m C(n-1, m) r^{n-1-m} (-1)^m u^m
    let mut base = vec![T::zero(); n];
    for (m, entry) in base.iter_mut().enumerate() {
        let sign = if m % 2 == 0 { T::one() } else { -T::one() };
        *entry = sign * T::c(binomial(n - 1, m)) * r.powi((n - 1 - m) as i32);
    }
    let mut c = vec![czero::<T>(); n + 1];
    for (m, &bm) in base.iter().enumerate() {
        c[m] += b0 * bm;
        c[m + 1] -= a1 * bm;
    }
    c
}

/// ∫_{u_hi}^{u_lo} u^{e} du for e != -1.
fn moment<T: Scalar>(e: T, u_lo: T, u_hi: T) -> T {
    let p = e + T::one();
    (u_lo.powf(p) - u_hi.powf(p)) / p
}

/// Left-side directional fractional integral along one ray:
/// (1/Γ(α)) ∫_0^{r_i} f(t) (r_i - t)^{α-1} (t/r_i)^{n-1} dt at every node.
/// `nodes` are radii measured from the ray origin, starting at or above zero.
pub fn frac_integral_left<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    alpha: T,
    n_dim: usize,
) -> Vec<Cx<T>> {
    let inv_gamma = T::one() / gamma(alpha);
    let m = nodes.len();
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        if r <= T::zero() {
            out[i] = czero();
            continue;
        }
        let rw = r.powi((n_dim - 1) as i32);
        let mut acc = czero::<T>();
        for j in 0..i {
            let (t0, t1) = (nodes[j], nodes[j + 1]);
            let a1 = (values[j + 1] - values[j]) / (t1 - t0);
            let a0 = values[j] - a1 * t0;
            let c = poly_in_u(a0, a1, r, n_dim);
            let (u_lo, u_hi) = (r - t0, r - t1);
            for (mm, cm) in c.iter().enumerate() {
                acc += *cm * moment(alpha - T::one() + T::usz(mm), u_lo, u_hi);
            }
        }
        out[i] = acc * (inv_gamma / rw);
    }
    out
}

/// Right-side fractional integral along one ray:
/// (1/Γ(α)) ∫_{r_i}^{d} f(t) (t - r_i)^{α-1} dt at every node.
pub fn frac_integral_right<T: Scalar>(nodes: &[T], values: &[Cx<T>], alpha: T) -> Vec<Cx<T>> {
    let inv_gamma = T::one() / gamma(alpha);
    let m = nodes.len();
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        let mut acc = czero::<T>();
        for j in i..m.saturating_sub(1) {
            let (t0, t1) = (nodes[j], nodes[j + 1]);
            let a1 = (values[j + 1] - values[j]) / (t1 - t0);
            let a0 = values[j] - a1 * t0;
            // f(r + u) = (a0 + a1 r) + a1 u, u = t - r
            let b0 = a0 + a1 * r;
            let (u_lo, u_hi) = (t1 - r, t0 - r);
            acc += b0 * moment(alpha - T::one(), u_lo, u_hi)
                + a1 * moment(alpha, u_lo, u_hi);
        }
        out[i] = acc * inv_gamma;
    }
    out
}

/// Truncated difference operator ψ⁺_ε along one ray, both branches:
/// r >= ε: ∫_0^{r-ε} [f(Q) r^{n-1} - f(T) t^{n-1}] (r-t)^{-α-1} r^{1-n} dt;
/// r <  ε: f(Q) (ε^{-α} - r^{-α}) / α   (non-finite at r = 0).
pub fn psi_plus<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    alpha: T,
    eps: T,
    n_dim: usize,
) -> Vec<Cx<T>> {
    let m = nodes.len();
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        if r < eps {
            let sing = (eps.powf(-alpha) - r.powf(-alpha)) / alpha;
            out[i] = values[i] * sing;
        } else {
            out[i] = psi_plus_integral(nodes, values, values[i], alpha, eps, n_dim, i);
        }
    }
    out
}

/// The ψ⁺ integral branch at node index `i` (requires r_i >= ε).
pub(crate) fn psi_plus_integral<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    fq: Cx<T>,
    alpha: T,
    eps: T,
    n_dim: usize,
    i: usize,
) -> Cx<T> {
    psi_plus_window(nodes, values, fq, alpha, n_dim, i, T::zero(), nodes[i] - eps)
}

/// ∫_{t_lo}^{t_hi} [f(Q) - f(T)(t/r)^{n-1}] (r - t)^{-α-1} dt with the sampled
/// function interpolated piecewise-linearly; the window is clipped to [0, r).
pub(crate) fn psi_plus_window<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    fq: Cx<T>,
    alpha: T,
    n_dim: usize,
    i: usize,
    t_lo: T,
    t_hi: T,
) -> Cx<T> {
    if n_dim == 1 {
        // the integrands coincide at n = 1; sharing the evaluation keeps the
        // dimensional reduction bit-for-bit
        return kipriyanov_window(nodes, values, fq, alpha, 1, i, t_lo, t_hi);
    }
    let r = nodes[i];
    let rw = r.powi((n_dim - 1) as i32);
    let mut acc = czero::<T>();
    for j in 0..i {
        let (t0, t1) = (nodes[j], nodes[j + 1]);
        if t0 >= t_hi {
            break;
        }
        if t1 <= t_lo {
            continue;
        }
        let s0 = if t0 < t_lo { t_lo } else { t0 };
        let s1 = if t1 > t_hi { t_hi } else { t1 };
        if s1 <= s0 {
            continue;
        }
        let a1 = (values[j + 1] - values[j]) / (t1 - t0);
        let a0 = values[j] - a1 * t0;
        // g(u) = f(Q) - P(u)/r^{n-1}, integrated against u^{-α-1}
        let c = poly_in_u(a0, a1, r, n_dim);
        let (u_lo, u_hi) = (r - s0, r - s1);
        acc += fq * moment(-alpha - T::one(), u_lo, u_hi);
        for (mm, cm) in c.iter().enumerate() {
            acc -= *cm / rw * moment(-alpha - T::one() + T::usz(mm), u_lo, u_hi);
        }
    }
    acc
}

/// Truncated difference operator ψ⁻_ε along one ray, both branches:
/// r <= d-ε: ∫_{r+ε}^{d} [f(Q) - f(T)] (t-r)^{-α-1} dt;
/// r >  d-ε: f(Q) (ε^{-α} - (d-r)^{-α}) / α   (non-finite at r = d).
pub fn psi_minus<T: Scalar>(nodes: &[T], values: &[Cx<T>], alpha: T, eps: T) -> Vec<Cx<T>> {
    let m = nodes.len();
    let d = nodes[m - 1];
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        if d - r < eps {
            let sing = (eps.powf(-alpha) - (d - r).powf(-alpha)) / alpha;
            out[i] = values[i] * sing;
        } else {
            out[i] = psi_minus_integral(nodes, values, values[i], alpha, eps, i);
        }
    }
    out
}

pub(crate) fn psi_minus_integral<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    fq: Cx<T>,
    alpha: T,
    eps: T,
    i: usize,
) -> Cx<T> {
    let d = nodes[nodes.len() - 1];
    psi_minus_window(nodes, values, fq, alpha, i, nodes[i] + eps, d)
}

/// ∫_{t_lo}^{t_hi} [f(Q) - f(T)] (t - r)^{-α-1} dt, window clipped to (r, d].
pub(crate) fn psi_minus_window<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    fq: Cx<T>,
    alpha: T,
    i: usize,
    t_lo: T,
    t_hi: T,
) -> Cx<T> {
    let m = nodes.len();
    let r = nodes[i];
    let mut acc = czero::<T>();
    for j in i..m - 1 {
        let (t0, t1) = (nodes[j], nodes[j + 1]);
        if t1 <= t_lo {
            continue;
        }
        if t0 >= t_hi {
            break;
        }
        let s0 = if t0 < t_lo { t_lo } else { t0 };
        let s1 = if t1 > t_hi { t_hi } else { t1 };
        if s1 <= s0 {
            continue;
        }
        let a1 = (values[j + 1] - values[j]) / (t1 - t0);
        let a0 = values[j] - a1 * t0;
        // g(u) = f(Q) - f(r+u) = (fq - a0 - a1 r) - a1 u, u = t - r
        let c0 = fq - a0 - a1 * r;
        let (u_lo, u_hi) = (s1 - r, s0 - r);
        acc += c0 * moment(-alpha - T::one(), u_lo, u_hi) - a1 * moment(-alpha, u_lo, u_hi);
    }
    acc
}

/// Truncated left-side Marchaud derivative 𝔇^α_{0+,ε}; the r < ε branch is
/// evaluated in the algebraically cancelled form f ε^{-α}/Γ(1-α), which is the
/// exact value of the two-term expression.
pub fn trunc_deriv_left<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    alpha: T,
    eps: T,
    n_dim: usize,
) -> Vec<Cx<T>> {
    let g1 = T::one() / gamma(T::one() - alpha);
    let m = nodes.len();
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        if r < eps {
            out[i] = values[i] * (eps.powf(-alpha) * g1);
        } else {
            let psi = psi_plus_integral(nodes, values, values[i], alpha, eps, n_dim, i);
            out[i] = (values[i] * r.powf(-alpha) + psi * alpha) * g1;
        }
    }
    out
}

/// Truncated right-side Marchaud derivative 𝔇^α_{d-,ε} with the same
/// cancellation in the d - ε < r branch.
pub fn trunc_deriv_right<T: Scalar>(nodes: &[T], values: &[Cx<T>], alpha: T, eps: T) -> Vec<Cx<T>> {
    let g1 = T::one() / gamma(T::one() - alpha);
    let m = nodes.len();
    let d = nodes[m - 1];
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        if d - r < eps {
            out[i] = values[i] * (eps.powf(-alpha) * g1);
        } else {
            let psi = psi_minus_integral(nodes, values, values[i], alpha, eps, i);
            out[i] = (values[i] * (d - r).powf(-alpha) + psi * alpha) * g1;
        }
    }
    out
}

/// Truncated Kipriyanov operator along one ray:
/// (α/Γ(1-α)) ∫_0^{r-ε} [f(Q)-f(T)] (r-t)^{-α-1} (t/r)^{n-1} dt
///   + C_n^{(α)} f(Q) r^{-α}.
/// Nodes at r = 0 come out non-finite (the weight r^{-α} is genuinely
/// singular there).
pub fn kipriyanov_trunc<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    alpha: T,
    eps: T,
    n_dim: usize,
) -> Vec<Cx<T>> {
    let g1 = T::one() / gamma(T::one() - alpha);
    let c_n = crate::scalar::factorial::<T>(n_dim - 1) / gamma(T::usz(n_dim) - alpha);
    let m = nodes.len();
    let mut out = vec![czero::<T>(); m];
    for i in 0..m {
        let r = nodes[i];
        // guard the 0 * inf case at r = 0 with vanishing samples
        let boundary = if crate::scalar::cnorm(values[i]) == T::zero() {
            czero()
        } else {
            values[i] * (c_n * r.powf(-alpha))
        };
        if r < eps {
            out[i] = boundary;
            continue;
        }
        let acc = kipriyanov_window(nodes, values, values[i], alpha, n_dim, i, T::zero(), r - eps);
        out[i] = acc * (alpha * g1) + boundary;
    }
    out
}

/// ∫_{t_lo}^{t_hi} [f(Q) - f(T)] (r - t)^{-α-1} (t/r)^{n-1} dt, window
/// clipped to [0, r).
pub(crate) fn kipriyanov_window<T: Scalar>(
    nodes: &[T],
    values: &[Cx<T>],
    fq: Cx<T>,
    alpha: T,
    n_dim: usize,
    i: usize,
    t_lo: T,
    t_hi: T,
) -> Cx<T> {
    let r = nodes[i];
    let rw = r.powi((n_dim - 1) as i32);
    let mut acc = czero::<T>();
    for j in 0..i {
        let (t0, t1) = (nodes[j], nodes[j + 1]);
        if t0 >= t_hi {
            break;
        }
        if t1 <= t_lo {
            continue;
        }
        let s0 = if t0 < t_lo { t_lo } else { t0 };
        let s1 = if t1 > t_hi { t_hi } else { t1 };
        if s1 <= s0 {
            continue;
        }
        // [f(Q) - f(T)] (t/r)^{n-1} = [fq - a0 - a1 t] t^{n-1} / r^{n-1}
        let a1 = (values[j + 1] - values[j]) / (t1 - t0);
        let a0 = values[j] - a1 * t0;
        let c = poly_in_u(fq - a0, -a1, r, n_dim);
        let (u_lo, u_hi) = (r - s0, r - s1);
        for (mm, cm) in c.iter().enumerate() {
            acc += *cm / rw * moment(-alpha - T::one() + T::usz(mm), u_lo, u_hi);
        }
    }
    acc
}

/// One ray's data for the ε-limit protocol. `quad` holds the effective
/// measure per node (quadrature weight times radial weight times solid-angle
/// weight), so the driver is agnostic of the mesh dimension.
pub(crate) struct RayData<'a, T: Scalar> {
    pub nodes: &'a [T],
    pub values: &'a [Cx<T>],
    pub quad: &'a [T],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DerivKind {
    MarchaudLeft,
    MarchaudRight,
    Kipriyanov,
}

pub(crate) struct LimitOutcome<T: Scalar> {
    pub values: Vec<Vec<Cx<T>>>,
    pub epsilon: T,
    pub distances: Vec<T>,
}

/// Realize the L_p limit ε → 0 of a truncated derivative over a geometric
/// sequence ε_k = ε_0 2^{-k}, stopping at the first iterate whose successive
/// L_p distance drops below `tol`. Iterates are updated incrementally: only
/// the freshly uncovered kernel window is integrated at each step.
pub(crate) fn eps_limit<T: Scalar>(
    rays: &[RayData<'_, T>],
    alpha: T,
    n_dim: usize,
    kind: DerivKind,
    eps0: T,
    tol: T,
    k_max: usize,
    p: T,
) -> Result<LimitOutcome<T>, Error> {
    // at n = 1 the directional derivative is the 1D left Marchaud derivative;
    // routing it through the same arm keeps the reduction bit-for-bit
    let kind = if kind == DerivKind::Kipriyanov && n_dim == 1 {
        DerivKind::MarchaudLeft
    } else {
        kind
    };
    let g1 = T::one() / gamma(T::one() - alpha);
    let c_n = crate::scalar::factorial::<T>(n_dim - 1) / gamma(T::usz(n_dim) - alpha);
    let half = T::c(0.5);

    let singular_node = |nodes: &[T], i: usize| -> bool {
        match kind {
            DerivKind::MarchaudLeft | DerivKind::Kipriyanov => nodes[i] <= T::zero(),
            DerivKind::MarchaudRight => nodes[i] >= nodes[nodes.len() - 1],
        }
    };

    let full_eval = |ray: &RayData<'_, T>, i: usize, eps: T| -> Cx<T> {
        let nodes = ray.nodes;
        let values = ray.values;
        let r = nodes[i];
        match kind {
            DerivKind::MarchaudLeft => {
                if r < eps {
                    values[i] * (eps.powf(-alpha) * g1)
                } else {
                    let psi = psi_plus_window(nodes, values, values[i], alpha, n_dim, i, T::zero(), r - eps);
                    (values[i] * r.powf(-alpha) + psi * alpha) * g1
                }
            }
            DerivKind::MarchaudRight => {
                let d = nodes[nodes.len() - 1];
                if d - r < eps {
                    values[i] * (eps.powf(-alpha) * g1)
                } else {
                    let psi = psi_minus_window(nodes, values, values[i], alpha, i, r + eps, d);
                    (values[i] * (d - r).powf(-alpha) + psi * alpha) * g1
                }
            }
            DerivKind::Kipriyanov => {
                let boundary = if crate::scalar::cnorm(values[i]) == T::zero() {
                    Complex::new(T::zero(), T::zero())
                } else {
                    values[i] * (c_n * r.powf(-alpha))
                };
                if r < eps {
                    boundary
                } else {
                    let w = kipriyanov_window(nodes, values, values[i], alpha, n_dim, i, T::zero(), r - eps);
                    boundary + w * (alpha * g1)
                }
            }
        }
    };

    let mut cur: Vec<Vec<Cx<T>>> = rays
        .iter()
        .map(|ray| (0..ray.nodes.len()).map(|i| full_eval(ray, i, eps0)).collect())
        .collect();

    let mut eps = eps0;
    let mut distances = Vec::new();
    for _ in 1..=k_max {
        let eps_new = eps * half;
        let mut dist_acc = T::zero();
        let mut next: Vec<Vec<Cx<T>>> = Vec::with_capacity(rays.len());
        for (ray, cur_ray) in rays.iter().zip(&cur) {
            let nodes = ray.nodes;
            let values = ray.values;
            let d = nodes[nodes.len() - 1];
            let mut out = cur_ray.clone();
            for i in 0..nodes.len() {
                let r = nodes[i];
                let in_lower_new = match kind {
                    DerivKind::MarchaudLeft | DerivKind::Kipriyanov => r < eps_new,
                    DerivKind::MarchaudRight => d - r < eps_new,
                };
                let in_lower_old = match kind {
                    DerivKind::MarchaudLeft | DerivKind::Kipriyanov => r < eps,
                    DerivKind::MarchaudRight => d - r < eps,
                };
                if in_lower_new {
                    out[i] = full_eval(ray, i, eps_new);
                } else if in_lower_old {
                    // node transitions into the integral branch: evaluate fresh
                    out[i] = full_eval(ray, i, eps_new);
                } else {
                    // widen the kernel window incrementally
                    let delta = match kind {
                        DerivKind::MarchaudLeft => {
                            psi_plus_window(nodes, values, values[i], alpha, n_dim, i, r - eps, r - eps_new)
                                * (alpha * g1)
                        }
                        DerivKind::MarchaudRight => {
                            psi_minus_window(nodes, values, values[i], alpha, i, r + eps_new, r + eps)
                                * (alpha * g1)
                        }
                        DerivKind::Kipriyanov => {
                            kipriyanov_window(nodes, values, values[i], alpha, n_dim, i, r - eps, r - eps_new)
                                * (alpha * g1)
                        }
                    };
                    out[i] = cur_ray[i] + delta;
                }
                if !singular_node(nodes, i) {
                    let dv = crate::scalar::cnorm(out[i] - cur_ray[i]);
                    if dv.finite() {
                        dist_acc += ray.quad[i] * dv.powf(p);
                    }
                }
            }
            next.push(out);
        }
        let dist = dist_acc.powf(T::one() / p);
        distances.push(dist);
        cur = next;
        eps = eps_new;
        if dist < tol {
            // flag the genuinely singular nodes as non-finite rather than
            // reporting the last truncated value there
            let nan = Complex::new(T::c(f64::NAN), T::c(f64::NAN));
            for (ray, cur_ray) in rays.iter().zip(cur.iter_mut()) {
                for i in 0..ray.nodes.len() {
                    if singular_node(ray.nodes, i) && crate::scalar::cnorm(ray.values[i]) > T::zero() {
                        cur_ray[i] = nan;
                    }
                }
            }
            return Ok(LimitOutcome { values: cur, epsilon: eps, distances });
        }
    }
    Err(Error::Convergence {
        iterations: k_max,
        last: distances.last().map(|d| d.f64()).unwrap_or(f64::NAN),
        distances: distances.iter().map(|d| d.f64()).collect(),
    })
}
