//! Second-order truncated Taylor arithmetic ("2-jets") in `N` variables.
//!
//! A [`Jet`] carries a value, its gradient and its (symmetric) Hessian with
//! respect to `N` seeded variables. All arithmetic propagates the chain rule
//! exactly, so evaluating an analytic expression on seeded jets yields its
//! first and second partial derivatives to machine precision.
//!
//! The coefficient type is itself any [`Scalar`], which allows nesting: an
//! outer `Jet<Jet<f64, 2>, 2>` seeded in the same two variables exposes
//! derivatives up to fourth order. The envelope and curvature code relies on
//! this to differentiate expressions that already contain first derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<S, const N: usize> {
    pub v: S,
    pub g: [S; N],
    pub h: [[S; N]; N],
}

impl<S: Scalar, const N: usize> Jet<S, N> {
    pub fn constant(v: S) -> Self {
        Jet {
            v,
            g: [S::zero(); N],
            h: [[S::zero(); N]; N],
        }
    }

    /// The `k`-th independent variable with value `v`.
    pub fn variable(v: S, k: usize) -> Self {
        assert!(k < N, "variable index {k} out of range for a {N}-jet");
        let mut j = Self::constant(v);
        j.g[k] = S::one();
        j
    }

    /// Apply a scalar function given its value and first two derivatives at `self.v`.
    fn chain(self, f0: S, f1: S, f2: S) -> Self {
        let g = std::array::from_fn(|i| f1 * self.g[i]);
        let h = std::array::from_fn(|i| {
            std::array::from_fn(|j| f1 * self.h[i][j] + f2 * self.g[i] * self.g[j])
        });
        Jet { v: f0, g, h }
    }
}

impl<S: Scalar, const N: usize> Add for Jet<S, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet {
            v: self.v + o.v,
            g: std::array::from_fn(|i| self.g[i] + o.g[i]),
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[i][j] + o.h[i][j])),
        }
    }
}

impl<S: Scalar, const N: usize> Sub for Jet<S, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet {
            v: self.v - o.v,
            g: std::array::from_fn(|i| self.g[i] - o.g[i]),
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[i][j] - o.h[i][j])),
        }
    }
}

impl<S: Scalar, const N: usize> Neg for Jet<S, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            v: -self.v,
            g: self.g.map(|x| -x),
            h: self.h.map(|row| row.map(|x| -x)),
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<S: Scalar, const N: usize> Mul for Jet<S, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Jet {
            v: self.v * o.v,
            g: std::array::from_fn(|i| self.g[i] * o.v + self.v * o.g[i]),
            h: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    self.h[i][j] * o.v
                        + self.g[i] * o.g[j]
                        + self.g[j] * o.g[i]
                        + self.v * o.h[i][j]
                })
            }),
        }
    }
}

impl<S: Scalar, const N: usize> Div for Jet<S, N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<S: Scalar, const N: usize> Scalar for Jet<S, N> {
    fn cst(v: f64) -> Self {
        Self::constant(S::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let d = S::one() - t * t;
        self.chain(t, d, (t * d).scale(-2.0))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn atan(self) -> Self {
        let q = (S::one() + self.v * self.v).recip();
        self.chain(self.v.atan(), q, (self.v * q * q).scale(-2.0))
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let r = s.recip();
        self.chain(s, r.scale(0.5), (r * r * r).scale(-0.25))
    }
    fn ln(self) -> Self {
        let r = self.v.recip();
        self.chain(self.v.ln(), r, -(r * r))
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        self.chain(r, -(r * r), (r * r * r).scale(2.0))
    }
    fn scale(self, k: f64) -> Self {
        Jet {
            v: self.v.scale(k),
            g: self.g.map(|x| x.scale(k)),
            h: self.h.map(|row| row.map(|x| x.scale(k))),
        }
    }
}
