//! Scalar abstraction so that maps and 2-norms can be evaluated either in
//! plain `f64` or in double-double precision.
//!
//! The analyzer evaluates its sampled ratios in double-double: near-dependent
//! triples turn the ratio into a quotient of two small areas, and plain `f64`
//! rounding in `Tx - Ty` then overshoots the true supremum by up to ~1e-10.

use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(v: f64) -> Self {
        TwoFloat::from(v)
    }
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
}

pub(crate) fn lift<R: Real>(coords: &[f64]) -> Vec<R> {
    coords.iter().map(|&c| R::from_f64(c)).collect()
}

/// `|u1 v2 - u2 v1|`.
pub(crate) fn cross2<R: Real>(u: &[R], v: &[R]) -> R {
    (u[0] * v[1] - u[1] * v[0]).abs()
}

/// Area of the parallelogram spanned by `x` and `y`, computed through the
/// Lagrange identity `|x|^2 |y|^2 - <x,y>^2 = sum_{i<j} (x_i y_j - x_j y_i)^2`.
/// The minors are rescaled by their largest magnitude before squaring.
pub(crate) fn gram<R: Real>(x: &[R], y: &[R]) -> R {
    let n = x.len();
    let mut minors = Vec::with_capacity(n * (n - 1) / 2);
    let mut largest = R::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = (x[i] * y[j] - x[j] * y[i]).abs();
            if m > largest {
                largest = m;
            }
            minors.push(m);
        }
    }
    if largest == R::zero() {
        return R::zero();
    }
    let mut radicand = R::zero();
    for m in minors {
        let s = m / largest;
        radicand = radicand + s * s;
    }
    if radicand < R::zero() {
        radicand = R::zero();
    }
    radicand.sqrt() * largest
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_direct_formula_on_easy_input() {
        let x = [1.0, 2.0, 3.0];
        let y = [-1.0, 0.5, 2.0];
        let nx: f64 = x.iter().map(|a| a * a).sum();
        let ny: f64 = y.iter().map(|a| a * a).sum();
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let direct = (nx * ny - dot * dot).sqrt();
        assert!((gram(&x, &y) - direct).abs() < 1e-12);
    }

    #[test]
    fn twofloat_cross_is_exact_for_f64_inputs() {
        let u: Vec<TwoFloat> = lift(&[0.1, 0.3]);
        let v: Vec<TwoFloat> = lift(&[0.2, 0.6]);
        // 0.1*0.6 - 0.3*0.2 is not zero in binary, but double-double carries it
        let c = cross2(&u, &v);
        let exact = {
            let a = TwoFloat::new_mul(0.1, 0.6);
            let b = TwoFloat::new_mul(0.3, 0.2);
            (a - b).abs()
        };
        assert_eq!(c, exact);
    }
}
