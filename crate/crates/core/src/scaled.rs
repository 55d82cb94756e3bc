use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::Serialize;

/// Complex number held as (ln|z|, arg z) so partition functions far outside
/// the f64 range stay usable. Zero is `ln_abs == -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledComplex {
    pub ln_abs: f64,
    pub arg: f64,
}

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

impl ScaledComplex {
    pub const ZERO: Self = Self {
        ln_abs: f64::NEG_INFINITY,
        arg: 0.0,
    };

    pub fn new(ln_abs: f64, arg: f64) -> Self {
        Self {
            ln_abs,
            arg: wrap_phase(arg),
        }
    }

    /// e^{w} for complex `w`.
    pub fn exp(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.norm() == 0.0 {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    /// Principal complex logarithm.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs, self.arg)
    }

    /// May overflow to infinity; check [`ScaledComplex::is_representable`].
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.ln_abs.exp(), self.arg)
    }

    pub fn abs(&self) -> f64 {
        self.ln_abs.exp()
    }

    pub fn is_representable(&self) -> bool {
        self.ln_abs < f64::MAX.ln()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.ln_abs, -self.arg)
    }

    /// |self − other| / |other|, computed without leaving log space.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        if other.ln_abs == f64::NEG_INFINITY {
            return if self.ln_abs == f64::NEG_INFINITY {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let ratio = Self::new(self.ln_abs - other.ln_abs, self.arg - other.arg).to_complex();
        (ratio - 1.0).norm()
    }
}

impl Mul for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.ln_abs + rhs.ln_abs, self.arg + rhs.arg)
    }
}

impl Div for ScaledComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.ln_abs - rhs.ln_abs, self.arg - rhs.arg)
    }
}

/// ln Σ eˣ over a slice; `-inf` for an empty slice.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
