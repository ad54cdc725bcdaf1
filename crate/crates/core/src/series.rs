//! Truncated Taylor ("jet") arithmetic over complex scalars.
//!
//! A jet stores the coefficients a_0..a_m of a power series about a fixed
//! point; products, inverses, exponentials, logarithms and complex powers
//! propagate derivatives exactly up to the truncation order.

use crate::error::{Error, Result};
use crate::scalar::{cexp, cln, cnorm, cx, Cx, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T: Scalar> {
    /// Taylor coefficients; c[j] multiplies δ^j.
    pub c: Vec<Cx<T>>,
}

fn czero<T: Scalar>() -> Cx<T> {
    cx(T::zero(), T::zero())
}

impl<T: Scalar> Jet<T> {
    pub fn zero(order: usize) -> Self {
        Self { c: vec![czero(); order + 1] }
    }

    pub fn constant(value: Cx<T>, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = value;
        j
    }

    /// The identity jet z0 + δ.
    pub fn variable(z0: Cx<T>, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = z0;
        if order >= 1 {
            j.c[1] = cx(T::one(), T::zero());
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(other.c.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(other.c.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { c: self.c.iter().map(|&a| a * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order();
        let mut out = Self::zero(m);
        for i in 0..=m {
            for j in 0..=(m - i) {
                out.c[i + j] += self.c[i] * other.c[j];
            }
        }
        out
    }

    /// Series inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.c[0];
        if cnorm(a0) == T::zero() {
            return Err(Error::Domain("series inverse needs a nonzero constant term".into()));
        }
        let m = self.order();
        let mut out = Self::zero(m);
        out.c[0] = cx(T::one(), T::zero()) / a0;
        for n in 1..=m {
            let mut acc = czero::<T>();
            for k in 1..=n {
                acc += self.c[k] * out.c[n - k];
            }
            out.c[n] = -acc / a0;
        }
        Ok(out)
    }

    /// exp of the jet via the derivative recurrence
    /// e_n = (1/n) Σ_{k=1}^{n} k·a_k·e_{n-k}.
    pub fn exp(&self) -> Self {
        let m = self.order();
        let mut out = Self::zero(m);
        out.c[0] = cexp(self.c[0]);
        for n in 1..=m {
            let mut acc = czero::<T>();
            for k in 1..=n {
                acc += self.c[k] * out.c[n - k] * cx(T::usz(k), T::zero());
            }
            out.c[n] = acc / cx(T::usz(n), T::zero());
        }
        out
    }

    /// Principal-branch logarithm; requires a nonzero constant term.
    pub fn ln(&self) -> Result<Self> {
        let a0 = self.c[0];
        if cnorm(a0) == T::zero() {
            return Err(Error::Domain("series logarithm needs a nonzero constant term".into()));
        }
        let m = self.order();
        let mut out = Self::zero(m);
        out.c[0] = cln(a0);
        for n in 1..=m {
            let mut acc = czero::<T>();
            for k in 1..n {
                acc += out.c[k] * self.c[n - k] * cx(T::usz(k), T::zero());
            }
            out.c[n] = (self.c[n] - acc / cx(T::usz(n), T::zero())) / a0;
        }
        Ok(out)
    }

    /// Principal-branch complex power exp(p·ln self).
    pub fn powc(&self, p: Cx<T>) -> Result<Self> {
        Ok(self.ln()?.scale(p).exp())
    }

    /// Integer power; negative exponents go through the series inverse.
    pub fn powi(&self, n: i64) -> Result<Self> {
        let m = self.order();
        if n == 0 {
            return Ok(Self::constant(cx(T::one(), T::zero()), m));
        }
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut out = base.clone();
        for _ in 1..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }
}
