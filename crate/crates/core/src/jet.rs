//! Second-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its exact gradient and Hessian
//! with respect to a fixed set of coordinates. Arithmetic and the usual
//! elementary functions propagate both orders by the chain rule, so a metric
//! written as an ordinary expression in its coordinates yields exact first
//! and second partial derivatives at a point.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

/// Value, gradient and (dense, symmetric, row-major) Hessian of a scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

/// A jet-evaluable map from coordinates to a list of components.
pub type JetMap = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;

/// A jet-evaluable scalar function of the coordinates.
pub type JetScalar = Arc<dyn Fn(&[Jet]) -> Jet + Send + Sync>;

impl Jet {
    /// Constant with `nvars` zero derivatives.
    pub fn constant(value: f64, nvars: usize) -> Self {
        Jet {
            value,
            grad: vec![0.0; nvars],
            hess: vec![0.0; nvars * nvars],
        }
    }

    /// The `index`-th coordinate evaluated at `value`.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        let mut j = Jet::constant(value, nvars);
        j.grad[index] = 1.0;
        j
    }

    /// Seeds one jet per coordinate of `point`.
    pub fn seed(point: &[f64]) -> Vec<Jet> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i, n))
            .collect()
    }

    /// Constant sharing this jet's number of variables.
    pub fn cst(&self, value: f64) -> Jet {
        Jet::constant(value, self.nvars())
    }

    pub fn zero_like(&self) -> Jet {
        self.cst(0.0)
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.nvars() + j]
    }

    /// Applies a scalar function given f(a), f'(a), f''(a).
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let n = self.nvars();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = f1 * self.hess[i * n + j] + f2 * self.grad[i] * self.grad[j];
            }
        }
        Jet {
            value: f0,
            grad: self.grad.iter().map(|g| f1 * g).collect(),
            hess,
        }
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn recip(&self) -> Jet {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn powi(&self, k: i32) -> Jet {
        let v = self.value;
        let kf = f64::from(k);
        let f1 = if k == 0 { 0.0 } else { kf * v.powi(k - 1) };
        let f2 = if k <= 1 { 0.0 } else { kf * (kf - 1.0) * v.powi(k - 2) };
        self.chain(v.powi(k), f1, f2)
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        let n = self.nvars();
        debug_assert_eq!(n, other.nvars(), "jets over different coordinate sets");
        let (a, b) = (self.value, other.value);
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                hess[k] = a * other.hess[k]
                    + b * self.hess[k]
                    + self.grad[i] * other.grad[j]
                    + other.grad[i] * self.grad[j];
            }
        }
        Jet {
            value: a * b,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(da, db)| a * db + b * da)
                .collect(),
            hess,
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert_eq!(self.nvars(), other.nvars(), "jets over different coordinate sets");
        Jet {
            value: f(self.value, other.value),
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| f(*a, *b)).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn scale(&self, c: f64) -> Jet {
        Jet {
            value: self.value * c,
            grad: self.grad.iter().map(|g| g * c).collect(),
            hess: self.hess.iter().map(|h| h * c).collect(),
        }
    }
}

/// Sum of products `Σ a_i b_i` of two jet slices.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    let mut acc = a[0].zero_like();
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}

/// Inverts a square matrix of jets (row-major) by Gauss–Jordan elimination
/// with partial pivoting on the value part.
pub fn invert(m: &[Jet], dim: usize) -> Option<Vec<Jet>> {
    let mut a = m.to_vec();
    let mut inv: Vec<Jet> = (0..dim * dim)
        .map(|k| m[0].cst(if k / dim == k % dim { 1.0 } else { 0.0 }))
        .collect();
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.value.abs()));
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| {
                a[i * dim + col]
                    .value
                    .abs()
                    .total_cmp(&a[j * dim + col].value.abs())
            })
            .unwrap();
        if a[pivot * dim + col].value.abs() <= 1e-14 * scale.max(1e-300) {
            return None;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(pivot * dim + k, col * dim + k);
                inv.swap(pivot * dim + k, col * dim + k);
            }
        }
        let p = a[col * dim + col].recip();
        for k in 0..dim {
            a[col * dim + k] = &a[col * dim + k] * &p;
            inv[col * dim + k] = &inv[col * dim + k] * &p;
        }
        for row in 0..dim {
            if row == col {
                continue;
            }
            let f = a[row * dim + col].clone();
            if f.value == 0.0 && f.grad.iter().all(|g| *g == 0.0) {
                continue;
            }
            for k in 0..dim {
                let da = &f * &a[col * dim + k];
                let di = &f * &inv[col * dim + k];
                a[row * dim + k] -= &da;
                inv[row * dim + k] -= &di;
            }
        }
    }
    Some(inv)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
forward_binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
forward_binop!(Mul, mul, |a, b| a.mul_jet(b));
forward_binop!(Div, div, |a, b| a.mul_jet(&b.recip()));

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $jet_f64:expr, $f64_jet:expr) => {
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                let f: fn(&Jet, f64) -> Jet = $jet_f64;
                f(self, rhs)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(f64, &Jet) -> Jet = $f64_jet;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(
    Add,
    add,
    |a, c| {
        let mut r = a.clone();
        r.value += c;
        r
    },
    |c, a| {
        let mut r = a.clone();
        r.value += c;
        r
    }
);
scalar_binop!(
    Sub,
    sub,
    |a, c| {
        let mut r = a.clone();
        r.value -= c;
        r
    },
    |c, a| {
        let mut r = a.scale(-1.0);
        r.value += c;
        r
    }
);
scalar_binop!(Mul, mul, |a, c| a.scale(c), |c, a| a.scale(c));
scalar_binop!(Div, div, |a, c| a.scale(1.0 / c), |c, a| a.recip().scale(c));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(&rhs.grad) {
            *a += b;
        }
        for (a, b) in self.hess.iter_mut().zip(&rhs.hess) {
            *a += b;
        }
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self += &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.value -= rhs.value;
        for (a, b) in self.grad.iter_mut().zip(&rhs.grad) {
            *a -= b;
        }
        for (a, b) in self.hess.iter_mut().zip(&rhs.hess) {
            *a -= b;
        }
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self -= &rhs;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        *self = self.scale(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(f: &dyn Fn(&[Jet]) -> Jet, p: &[f64], h: f64) -> Vec<f64> {
        (0..p.len())
            .map(|i| {
                let mut a = p.to_vec();
                let mut b = p.to_vec();
                a[i] += h;
                b[i] -= h;
                let fa = f(&Jet::seed(&a)).value;
                let fb = f(&Jet::seed(&b)).value;
                (fa - fb) / (2.0 * h)
            })
            .collect()
    }

    fn fd_hess(f: &dyn Fn(&[Jet]) -> Jet, p: &[f64], h: f64) -> Vec<f64> {
        let n = p.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[i] += h;
            b[i] -= h;
            let ga = fd_grad(f, &a, h);
            let gb = fd_grad(f, &b, h);
            for j in 0..n {
                out[i * n + j] = (ga[j] - gb[j]) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn product_rule_exact() {
        let x = Jet::seed(&[2.0, 3.0]);
        let f = &x[0] * &x[1];
        assert_eq!(f.value, 6.0);
        assert_eq!(f.grad, vec![3.0, 2.0]);
        assert_eq!(f.hess, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn transcendental_jets_match_finite_differences() {
        let f = |x: &[Jet]| {
            let a = (&x[0] * 2.0).cosh() * x[1].sin().square();
            let b = (x[2].exp() + 1.0).ln() / (x[0].powi(2) + 3.0);
            let c = (x[1].cos() + 2.0).sqrt() - x[2].sinh().recip();
            a + b - c
        };
        let p = [0.3, -0.7, 0.9];
        let j = f(&Jet::seed(&p));
        let g = fd_grad(&f, &p, 1e-4);
        let h = fd_hess(&f, &p, 1e-4);
        for i in 0..3 {
            assert!((j.grad[i] - g[i]).abs() < 1e-6, "grad {i}");
        }
        for k in 0..9 {
            assert!((j.hess[k] - h[k]).abs() < 1e-5, "hess {k}: {} vs {}", j.hess[k], h[k]);
        }
    }

    #[test]
    fn invert_recovers_identity_with_derivatives() {
        let x = Jet::seed(&[0.4, 1.1]);
        let m = vec![
            x[0].cosh(),
            x[0].sinh() * &x[1],
            x[1].sin(),
            &x[0] * &x[0] + 2.0,
        ];
        let inv = invert(&m, 2).expect("nonsingular");
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = x[0].zero_like();
                for k in 0..2 {
                    acc += &m[i * 2 + k] * &inv[k * 2 + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((acc.value - target).abs() < 1e-13);
                assert!(acc.grad.iter().all(|g| g.abs() < 1e-12));
                assert!(acc.hess.iter().all(|h| h.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn invert_rejects_singular() {
        let x = Jet::seed(&[1.0]);
        let m = vec![x[0].clone(), &x[0] * 2.0, x[0].clone(), &x[0] * 2.0];
        assert!(invert(&m, 2).is_none());
    }
}
