//! Forward-mode automatic differentiation with nestable dual numbers.
//!
//! Every pointwise evaluation in this crate (chart embeddings, frames,
//! spinor fields, endomorphism fields) is written generically over [`Real`],
//! so the same code runs on plain `f64` and on dual numbers of nesting depth
//! up to three. One nesting level is consumed per derivative: connection
//! coefficients need one, curvature and Laplacians need two on top of fields
//! that already consumed one.
//!
//! Dyn-dispatchable maps come in two flavours: [`SmoothMap`] is the trait
//! implementers write (one generic `eval`), and [`SmoothMapDyn`] is the
//! object-safe mirror with one entry point per nesting level. The bridge
//! between generic code and `dyn` objects is [`Real::eval_map`].

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Scalar type usable in chart evaluations: `f64` or a nested dual number.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    /// The scalar with one more derivative slot.
    type Up: Real;

    fn from_f64(x: f64) -> Self;
    /// Underlying value with every derivative part stripped.
    fn value(self) -> f64;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// Four-quadrant arctangent; `self` is the y argument.
    fn atan2(self, x: Self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    /// Multiply by a plain constant.
    fn mulf(self, c: f64) -> Self {
        self * Self::from_f64(c)
    }
    /// Seed a value/derivative pair one level up.
    fn lift(v: Self, d: Self) -> Self::Up;
    /// Split a one-level-up scalar into (value, derivative).
    fn unlift(u: Self::Up) -> (Self, Self);
    /// Evaluate a dyn map at this nesting level.
    fn eval_map(map: &dyn SmoothMapDyn, x: &[Self], out: &mut [Self]);
}

/// Dual number over an arbitrary base scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Real> Dual<T> {
    pub fn constant(v: T) -> Self {
        Dual { v, d: T::zero() }
    }
    pub fn seeded(v: T, d: T) -> Self {
        Dual { v, d }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual {
            v: self.v * o.v,
            d: self.v * o.d + self.d * o.v,
        }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Dual {
            v: q,
            d: (self.d - q * o.d) / o.v,
        }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            d: -self.d,
        }
    }
}

impl<T: Real> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Dual<T> {
    fn d_sqrt(self) -> Self {
        let s = self.v.sqrt();
        Dual {
            v: s,
            d: self.d / (s + s),
        }
    }
    fn d_abs(self) -> Self {
        if self.v.value() >= 0.0 {
            self
        } else {
            -self
        }
    }
    fn d_atan2(self, x: Self) -> Self {
        let y = self;
        let denom = x.v * x.v + y.v * y.v;
        Dual {
            v: y.v.atan2(x.v),
            d: (x.v * y.d - y.v * x.d) / denom,
        }
    }
    fn d_sin_cos(self) -> (Self, Self) {
        let (s, c) = self.v.sin_cos();
        (
            Dual {
                v: s,
                d: self.d * c,
            },
            Dual {
                v: c,
                d: -(self.d * s),
            },
        )
    }
}

/// First-level dual (value + one derivative).
pub type D1 = Dual<f64>;
/// Second-level dual, for second derivatives.
pub type D2 = Dual<D1>;
/// Third-level dual; deepest level any shipped computation reaches.
pub type D3 = Dual<D2>;
/// Guard level: arithmetic works, evaluating a dyn map at this depth panics.
pub type D4 = Dual<D3>;

impl Real for f64 {
    type Up = D1;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn lift(v: Self, d: Self) -> D1 {
        Dual { v, d }
    }
    fn unlift(u: D1) -> (Self, Self) {
        (u.v, u.d)
    }
    fn eval_map(map: &dyn SmoothMapDyn, x: &[Self], out: &mut [Self]) {
        map.eval_l0(x, out);
    }
}

macro_rules! impl_real_dual {
    ($t:ty, $base:ty, $up:ty, $eval:ident) => {
        impl Real for $t {
            type Up = $up;
            fn from_f64(x: f64) -> Self {
                Dual {
                    v: <$base>::from_f64(x),
                    d: <$base>::zero(),
                }
            }
            fn value(self) -> f64 {
                self.v.value()
            }
            fn sqrt(self) -> Self {
                self.d_sqrt()
            }
            fn abs(self) -> Self {
                self.d_abs()
            }
            fn atan2(self, x: Self) -> Self {
                self.d_atan2(x)
            }
            fn sin_cos(self) -> (Self, Self) {
                self.d_sin_cos()
            }
            fn lift(v: Self, d: Self) -> Self::Up {
                Dual { v, d }
            }
            fn unlift(u: Self::Up) -> (Self, Self) {
                (u.v, u.d)
            }
            fn eval_map(map: &dyn SmoothMapDyn, x: &[Self], out: &mut [Self]) {
                map.$eval(x, out);
            }
        }
    };
}

impl_real_dual!(D1, f64, D2, eval_l1);
impl_real_dual!(D2, D1, D3, eval_l2);
impl_real_dual!(D3, D2, D4, eval_l3);

impl Real for D4 {
    type Up = D4;
    fn from_f64(x: f64) -> Self {
        Dual {
            v: D3::from_f64(x),
            d: D3::zero(),
        }
    }
    fn value(self) -> f64 {
        self.v.value()
    }
    fn sqrt(self) -> Self {
        self.d_sqrt()
    }
    fn abs(self) -> Self {
        self.d_abs()
    }
    fn atan2(self, x: Self) -> Self {
        self.d_atan2(x)
    }
    fn sin_cos(self) -> (Self, Self) {
        self.d_sin_cos()
    }
    fn lift(_v: Self, _d: Self) -> Self::Up {
        panic!("dual number nesting depth exceeded (level 4 is a guard level)");
    }
    fn unlift(_u: Self::Up) -> (Self, Self) {
        panic!("dual number nesting depth exceeded (level 4 is a guard level)");
    }
    fn eval_map(_map: &dyn SmoothMapDyn, _x: &[Self], _out: &mut [Self]) {
        panic!("dual number nesting depth exceeded (level 4 is a guard level)");
    }
}

/// A smooth map between coordinate tuples, evaluatable at any nesting level.
///
/// Implementers write a single generic `eval`; the blanket impl of
/// [`SmoothMapDyn`] makes the map usable behind `Arc<dyn SmoothMapDyn>`.
pub trait SmoothMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]);
}

/// Object-safe mirror of [`SmoothMap`] with one entry point per AD level.
pub trait SmoothMapDyn: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval_l0(&self, x: &[f64], out: &mut [f64]);
    fn eval_l1(&self, x: &[D1], out: &mut [D1]);
    fn eval_l2(&self, x: &[D2], out: &mut [D2]);
    fn eval_l3(&self, x: &[D3], out: &mut [D3]);
}

impl<M: SmoothMap> SmoothMapDyn for M {
    fn dim_in(&self) -> usize {
        SmoothMap::dim_in(self)
    }
    fn dim_out(&self) -> usize {
        SmoothMap::dim_out(self)
    }
    fn eval_l0(&self, x: &[f64], out: &mut [f64]) {
        self.eval(x, out);
    }
    fn eval_l1(&self, x: &[D1], out: &mut [D1]) {
        self.eval(x, out);
    }
    fn eval_l2(&self, x: &[D2], out: &mut [D2]) {
        self.eval(x, out);
    }
    fn eval_l3(&self, x: &[D3], out: &mut [D3]) {
        self.eval(x, out);
    }
}

/// Evaluate `map` at `x`.
pub fn eval_at<T: Real>(map: &dyn SmoothMapDyn, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); map.dim_out()];
    T::eval_map(map, x, &mut out);
    out
}

/// Value and directional derivative of `map` at `x` along `dir`.
///
/// `dir` are chart-coordinate components, so for a frame direction pass the
/// frame vector's chart components.
pub fn eval_with_deriv<T: Real>(map: &dyn SmoothMapDyn, x: &[T], dir: &[T]) -> (Vec<T>, Vec<T>) {
    debug_assert_eq!(x.len(), dir.len());
    let xs: Vec<T::Up> = x.iter().zip(dir).map(|(&v, &d)| T::lift(v, d)).collect();
    let mut out = vec![T::Up::zero(); map.dim_out()];
    T::Up::eval_map(map, &xs, &mut out);
    out.into_iter().map(T::unlift).unzip()
}

/// Directional derivative only.
pub fn dir_deriv<T: Real>(map: &dyn SmoothMapDyn, x: &[T], dir: &[T]) -> Vec<T> {
    eval_with_deriv(map, x, dir).1
}

/// Partial derivative along coordinate axis `a`.
pub fn partial<T: Real>(map: &dyn SmoothMapDyn, x: &[T], a: usize) -> Vec<T> {
    let mut dir = vec![T::zero(); x.len()];
    dir[a] = T::one();
    dir_deriv(map, x, &dir)
}

/// Central finite difference along axis `a`, an AD-independent cross-check.
pub fn central_difference(map: &dyn SmoothMapDyn, x: &[f64], a: usize, step: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[a] += step;
    xm[a] -= step;
    let fp = eval_at::<f64>(map, &xp);
    let fm = eval_at::<f64>(map, &xm);
    fp.iter()
        .zip(&fm)
        .map(|(p, m)| (p - m) / (2.0 * step))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(x, y) = (x^2 y, sqrt(x^2 + y^2), atan2(y, x))
    struct Sample;

    impl SmoothMap for Sample {
        fn dim_in(&self) -> usize {
            2
        }
        fn dim_out(&self) -> usize {
            3
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            out[0] = x[0] * x[0] * x[1];
            out[1] = (x[0] * x[0] + x[1] * x[1]).sqrt();
            out[2] = x[1].atan2(x[0]);
        }
    }

    #[test]
    fn first_derivative_matches_hand_computation() {
        let x = [1.3, -0.7];
        let d = partial::<f64>(&Sample, &x, 0);
        assert!((d[0] - 2.0 * x[0] * x[1]).abs() < 1e-14);
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        assert!((d[1] - x[0] / r).abs() < 1e-14);
        assert!((d[2] - (-x[1] / (r * r))).abs() < 1e-14);
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let x = [0.4, 1.9];
        for a in 0..2 {
            let ad = partial::<f64>(&Sample, &x, a);
            let fd = central_difference(&Sample, &x, a, 1e-5);
            for (u, v) in ad.iter().zip(&fd) {
                assert!((u - v).abs() < 1e-9, "axis {a}: ad {u} vs fd {v}");
            }
        }
    }

    #[test]
    fn nested_duals_give_second_derivatives() {
        // d^2/dx^2 of x^2 y is 2y; mixed d^2/dxdy is 2x.
        let x = [1.1_f64, 0.6];
        let dir0 = [1.0, 0.0];
        let inner: Vec<D1> = x.iter().zip(&dir0).map(|(&v, &d)| D1 { v, d }).collect();
        let second = dir_deriv::<D1>(&Sample, &inner, &[D1::one(), D1::zero()]);
        assert!((second[0].d - 2.0 * x[1]).abs() < 1e-14);
        let mixed = dir_deriv::<D1>(&Sample, &inner, &[D1::zero(), D1::one()]);
        assert!((mixed[0].d - 2.0 * x[0]).abs() < 1e-14);
    }

    #[test]
    fn third_level_evaluates() {
        let x: Vec<D3> = vec![D3::from_f64(0.5), D3::from_f64(0.25)];
        let out = eval_at::<D3>(&Sample, &x);
        assert!((out[0].value() - 0.0625).abs() < 1e-15);
    }
}
