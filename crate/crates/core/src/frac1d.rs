//! One-dimensional fractional integrals and Marchaud-type derivatives on an
//! interval, plus the generalized fractional derivative on the time axis.
//!
//! These are the n = 1 base cases of the directional operators and double as
//! oracles for them.

use crate::error::{Error, Result};
use crate::grid::GridFn;
use crate::prodint::{self, DerivKind, RayData};
use crate::scalar::{gamma, upper_incomplete_gamma, Cx, Scalar};
use num_complex::Complex;

/// Order, truncation radius and Lebesgue exponent for the derivative limit.
#[derive(Debug, Clone, Copy)]
pub struct FracParams<T: Scalar> {
    pub alpha: T,
    pub epsilon: T,
    pub p: T,
}

impl<T: Scalar> FracParams<T> {
    pub fn new(alpha: T, epsilon: T, p: T) -> Result<Self> {
        if alpha <= T::zero() || alpha >= T::one() {
            return Err(Error::Domain("alpha must lie in (0, 1)".into()));
        }
        if epsilon <= T::zero() {
            return Err(Error::Domain("epsilon must be positive".into()));
        }
        if p < T::one() {
            return Err(Error::Domain("p must satisfy 1 <= p < inf".into()));
        }
        Ok(Self { alpha, epsilon, p })
    }
}

/// A fractional derivative together with the achieved truncation radius and
/// the successive-distance sequence of the limit protocol.
#[derive(Debug, Clone)]
pub struct FracDeriv<T: Scalar> {
    pub fun: GridFn<T>,
    pub epsilon: T,
    pub distances: Vec<T>,
}

fn check_order<T: Scalar>(alpha: T) -> Result<()> {
    if alpha < T::zero() || alpha >= T::one() {
        return Err(Error::Domain("order must lie in [0, 1)".into()));
    }
    Ok(())
}

fn radii<T: Scalar>(f: &GridFn<T>) -> Vec<T> {
    let a = f.grid.a;
    f.grid.nodes.iter().map(|&x| x - a).collect()
}

/// Left-side Riemann-Liouville integral 𝔈^α_{0+} with the zero-order
/// convention 𝔈^0_{0+} = I.
pub fn rl_integral_left<T: Scalar>(f: &GridFn<T>, alpha: T) -> Result<GridFn<T>> {
    check_order(alpha)?;
    if f.values.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    if alpha == T::zero() {
        return Ok(f.clone());
    }
    let r = radii(f);
    let out = prodint::frac_integral_left(&r, &f.values, alpha, 1);
    GridFn::new(f.grid.clone(), out)
}

/// Right-side integral 𝔈^α_{d-}.
pub fn rl_integral_right<T: Scalar>(f: &GridFn<T>, alpha: T) -> Result<GridFn<T>> {
    check_order(alpha)?;
    if f.values.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    if alpha == T::zero() {
        return Ok(f.clone());
    }
    let r = radii(f);
    let out = prodint::frac_integral_right(&r, &f.values, alpha);
    GridFn::new(f.grid.clone(), out)
}

/// Truncated left Marchaud derivative 𝔇^α_{0+,ε}; both branches of the
/// truncated difference operator are honored, with the r < ε branch in its
/// algebraically cancelled closed form.
pub fn marchaud_trunc_left<T: Scalar>(f: &GridFn<T>, params: &FracParams<T>) -> Result<GridFn<T>> {
    let r = radii(f);
    let out = prodint::trunc_deriv_left(&r, &f.values, params.alpha, params.epsilon, 1);
    GridFn::new(f.grid.clone(), out)
}

/// Truncated right Marchaud derivative 𝔇^α_{d-,ε}.
pub fn marchaud_trunc_right<T: Scalar>(f: &GridFn<T>, params: &FracParams<T>) -> Result<GridFn<T>> {
    let r = radii(f);
    let out = prodint::trunc_deriv_right(&r, &f.values, params.alpha, params.epsilon);
    GridFn::new(f.grid.clone(), out)
}

fn marchaud_limit<T: Scalar>(f: &GridFn<T>, alpha: T, tol: T, kind: DerivKind) -> Result<FracDeriv<T>> {
    if alpha <= T::zero() || alpha >= T::one() {
        return Err(Error::Domain("order must lie in (0, 1)".into()));
    }
    let r = radii(f);
    let span = f.grid.b - f.grid.a;
    let eps0 = span * T::c(0.25);
    let ray = RayData { nodes: &r, values: &f.values, quad: &f.grid.weights };
    let outcome = prodint::eps_limit(&[ray], alpha, 1, kind, eps0, tol, 900, T::c(2.0))?;
    Ok(FracDeriv {
        fun: GridFn::new(f.grid.clone(), outcome.values.into_iter().next().unwrap())?,
        epsilon: outcome.epsilon,
        distances: outcome.distances,
    })
}

/// Left Marchaud derivative as the L_2 limit of the truncated operators over
/// the geometric sequence ε_k = ε_0 2^{-k}.
pub fn marchaud_deriv_left<T: Scalar>(f: &GridFn<T>, alpha: T, tol: T) -> Result<FracDeriv<T>> {
    marchaud_limit(f, alpha, tol, DerivKind::MarchaudLeft)
}

/// Right Marchaud derivative (limit of the ε-truncated operator).
pub fn marchaud_deriv_right<T: Scalar>(f: &GridFn<T>, alpha: T, tol: T) -> Result<FracDeriv<T>> {
    marchaud_limit(f, alpha, tol, DerivKind::MarchaudRight)
}

/// Weighted composition 𝔈^σ_{0+} ρ 𝔇^γ_{d-}.
pub fn weighted_composition<T: Scalar>(
    f: &GridFn<T>,
    sigma: T,
    gamma_ord: T,
    rho: &GridFn<T>,
    tol: T,
) -> Result<GridFn<T>> {
    check_order(sigma)?;
    check_order(gamma_ord)?;
    let derived = if gamma_ord == T::zero() {
        f.clone()
    } else {
        let d = marchaud_deriv_right(f, gamma_ord, tol)?;
        d.fun
    };
    let weighted = derived.scale_by(rho);
    rl_integral_left(&weighted, sigma)
}

/// A trajectory t -> H sampled uniformly on [0, t_max].
#[derive(Debug, Clone)]
pub struct TimeSeries<T: Scalar> {
    pub dt: T,
    pub samples: Vec<Vec<Cx<T>>>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn t_max(&self) -> T {
        self.dt * T::usz(self.samples.len() - 1)
    }
}

/// Result of the generalized fractional time derivative.
#[derive(Debug, Clone)]
pub struct TimeDeriv<T: Scalar> {
    pub values: Vec<Vec<Cx<T>>>,
    /// Set when the exponential tail could not be fitted (non-decaying data)
    /// and the tail of the defining integral had to be dropped.
    pub tail_warning: bool,
    /// Fitted decay rate of the tail extrapolation.
    pub fitted_decay: T,
    /// Estimated magnitude of the neglected tail (infinite when no decay).
    pub tail_bound: T,
}

/// Generalized fractional derivative on the time axis,
/// D^β_- u(t) = -(1/Γ(1-β)) d/dt ∫_0^∞ u(t+x) x^{-β} dx with β = 1/α in (0, 1].
///
/// β = 1 reduces to -du/dt (central differencing); the β -> 0 limit is the
/// identity. The integral beyond the sampled horizon uses exponential
/// extrapolation fitted on the last decade of samples.
pub fn frac_time_deriv<T: Scalar>(u: &TimeSeries<T>, alpha_inv: T) -> Result<TimeDeriv<T>> {
    if alpha_inv <= T::zero() || alpha_inv > T::one() {
        return Err(Error::Domain("1/alpha must lie in (0, 1]".into()));
    }
    let n = u.samples.len();
    if n < 5 {
        return Err(Error::Argument("need at least five time samples".into()));
    }
    let dt = u.dt;
    let dim = u.samples[0].len();
    let beta = alpha_inv;

    if beta == T::one() {
        // D^1_- u = -du/dt
        let mut values = vec![vec![Complex::new(T::zero(), T::zero()); dim]; n];
        for c in 0..dim {
            for i in 0..n {
                let d = if i == 0 {
                    (u.samples[2][c] * T::c(-1.0) + u.samples[1][c] * T::c(4.0)
                        - u.samples[0][c] * T::c(3.0))
                        / (dt * T::c(2.0))
                } else if i == n - 1 {
                    (u.samples[n - 1][c] * T::c(3.0) - u.samples[n - 2][c] * T::c(4.0)
                        + u.samples[n - 3][c])
                        / (dt * T::c(2.0))
                } else {
                    (u.samples[i + 1][c] - u.samples[i - 1][c]) / (dt * T::c(2.0))
                };
                values[i][c] = -d;
            }
        }
        return Ok(TimeDeriv {
            values,
            tail_warning: false,
            fitted_decay: T::zero(),
            tail_bound: T::zero(),
        });
    }

    // exponential tail fit over the last decade of samples
    let tail_start = n - (n / 10).max(3);
    let mut sx = 0.0f64;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    for i in tail_start..n {
        let norm: T = u.samples[i].iter().map(|v| v.re * v.re + v.im * v.im).sum::<T>().sqrt();
        let nf = norm.f64();
        if nf > 0.0 {
            let x = i as f64 * dt.f64();
            let y = nf.ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            count += 1.0;
        }
    }
    let lambda = if count >= 2.0 {
        let denom = count * sxx - sx * sx;
        if denom.abs() > 1e-300 {
            -(count * sxy - sx * sy) / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    let decaying = lambda > 1e-10;
    let lam = T::c(lambda);

    let one_m_b = T::one() - beta;
    let two_m_b = T::c(2.0) - beta;
    // g_i = ∫_0^∞ u(t_i + x) x^{-β} dx by product integration + tail
    let mut g = vec![vec![Complex::new(T::zero(), T::zero()); dim]; n];
    let mut tail_bound = T::zero();
    for i in 0..n {
        for j in i..n - 1 {
            let x0 = dt * T::usz(j - i);
            let x1 = dt * T::usz(j + 1 - i);
            // u linear on [x0, x1]: u = a0 + a1 x
            let m0 = (x1.powf(one_m_b) - x0.powf(one_m_b)) / one_m_b;
            let m1 = (x1.powf(two_m_b) - x0.powf(two_m_b)) / two_m_b;
            for c in 0..dim {
                let a1 = (u.samples[j + 1][c] - u.samples[j][c]) / dt;
                let a0 = u.samples[j][c] - a1 * x0;
                g[i][c] += a0 * m0 + a1 * m1;
            }
        }
        let x_last = u.t_max() - dt * T::usz(i);
        if decaying && x_last > T::zero() {
            // ∫_{X}^∞ e^{-λ(x-X)} x^{-β} dx = e^{λX} λ^{β-1} Γ(1-β, λX)
            let gx = T::c(upper_incomplete_gamma(
                one_m_b.f64(),
                (lam * x_last).f64(),
            ));
            let factor = (lam * x_last).exp() * lam.powf(beta - T::one()) * gx;
            for c in 0..dim {
                g[i][c] += u.samples[n - 1][c] * factor;
            }
        } else if !decaying {
            tail_bound = T::c(f64::INFINITY);
        }
    }

    let scale = -T::one() / gamma(one_m_b);
    let mut values = vec![vec![Complex::new(T::zero(), T::zero()); dim]; n];
    for c in 0..dim {
        for i in 0..n {
            let d = if i == 0 {
                (g[2][c] * T::c(-1.0) + g[1][c] * T::c(4.0) - g[0][c] * T::c(3.0))
                    / (dt * T::c(2.0))
            } else if i == n - 1 {
                (g[n - 1][c] * T::c(3.0) - g[n - 2][c] * T::c(4.0) + g[n - 3][c])
                    / (dt * T::c(2.0))
            } else {
                (g[i + 1][c] - g[i - 1][c]) / (dt * T::c(2.0))
            };
            values[i][c] = d * scale;
        }
    }
    Ok(TimeDeriv {
        values,
        tail_warning: !decaying,
        fitted_decay: lam,
        tail_bound,
    })
}
