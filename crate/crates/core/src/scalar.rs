//! Scalar abstraction and special functions.
//!
//! Everything downstream is generic over [`Scalar`], which is implemented for
//! `f32` and `f64`. Special functions are evaluated through `f64`-seeded
//! coefficient tables converted on the fly.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::Debug;
use std::iter::Sum;

/// Real scalar usable throughout the workbench.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Sum<Self> + Default + Debug + 'static
{
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable")
    }

    fn usz(v: usize) -> Self {
        Self::from_usize(v).expect("usize not representable")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    fn finite(self) -> bool {
        let a = self.f64();
        a.is_finite()
    }
}

impl<T> Scalar for T where
    T: RealField + Copy + FromPrimitive + ToPrimitive + Sum<T> + Default + Debug + 'static
{
}

/// Complex number over a workbench scalar.
pub type Cx<T> = Complex<T>;

pub fn cx<T: Scalar>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub fn cfinite<T: Scalar>(z: Cx<T>) -> bool {
    z.re.finite() && z.im.finite()
}

/// Modulus of a complex scalar (avoids the `Float` bound on `Complex::norm`).
pub fn cnorm<T: Scalar>(z: Cx<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Complex exponential (avoids the `Float` bound on `Complex::exp`).
pub fn cexp<T: Scalar>(z: Cx<T>) -> Cx<T> {
    let r = z.re.exp();
    cx(r * z.im.cos(), r * z.im.sin())
}

/// Principal-branch complex logarithm.
pub fn cln<T: Scalar>(z: Cx<T>) -> Cx<T> {
    cx(cnorm(z).ln(), z.im.atan2(z.re))
}

/// Principal-branch complex power z^p.
pub fn cpow<T: Scalar>(z: Cx<T>, p: Cx<T>) -> Cx<T> {
    cexp(cln(z) * p)
}

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (poles at non-positive integers return NaN).
pub fn gamma<T: Scalar>(x: T) -> T {
    let xf = x.f64();
    if xf <= 0.0 && xf == xf.floor() {
        return T::c(f64::NAN);
    }
    T::c(gamma_f64(xf))
}

fn gamma_f64(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_f64(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + 7.5;
        for (i, &l) in LANCZOS.iter().enumerate().skip(1) {
            a += l / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument");
    if x < 0.5 {
        (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        gamma_f64(x).ln()
    }
}

/// Upper incomplete gamma Γ(s, x) for x > 0, s in (0, 1].
///
/// Continued-fraction (Lentz) evaluation, adequate for the exponential-tail
/// moments used by the fractional time derivative.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> f64 {
    assert!(x > 0.0);
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..400 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + s * x.ln()).exp() * h
}

/// Factorial as a scalar; panics over ~170 at f64.
pub fn factorial<T: Scalar>(n: usize) -> T {
    let mut acc = 1.0f64;
    for k in 2..=n {
        acc *= k as f64;
    }
    T::c(acc)
}

/// Binomial coefficient C(n, k) as f64.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
