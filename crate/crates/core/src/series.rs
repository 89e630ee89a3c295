//! Truncated Laurent series in `s` with exact rational coefficients, used for
//! small-`t` expansions of exponential-trigonometric products.

use num_traits::{One, Zero};

use crate::rational::{qi, Q};

/// `s^low · Σ_{j < N} c_j s^j`, truncated at a fixed relative order.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub low: i64,
    pub c: Vec<Q>,
}

impl Series {
    pub fn constant(v: Q, order: usize) -> Self {
        let mut c = vec![Q::zero(); order];
        c[0] = v;
        Self { low: 0, c }
    }

    /// `e^{α s}`.
    pub fn exp(alpha: &Q, order: usize) -> Self {
        let mut c = Vec::with_capacity(order);
        let mut term = Q::one();
        for j in 0..order {
            c.push(term.clone());
            term = term * alpha / qi(j as i64 + 1);
        }
        Self { low: 0, c }
    }

    /// `sinh(β s) / (β s)`.
    pub fn sinhc(beta: &Q, order: usize) -> Self {
        let mut c = vec![Q::zero(); order];
        let b2 = beta * beta;
        let mut term = Q::one();
        let mut j = 0;
        while j < order {
            c[j] = term.clone();
            term = term * &b2 / qi(((j + 2) * (j + 3)) as i64);
            j += 2;
        }
        Self { low: 0, c }
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut c = vec![Q::zero(); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += &self.c[i] * &other.c[j];
            }
        }
        Self {
            low: self.low + other.low,
            c,
        }
    }

    /// Multiplicative inverse; requires a non-zero leading coefficient.
    pub fn inv(&self) -> Self {
        let n = self.order();
        assert!(!self.c[0].is_zero(), "series inverse needs c0 != 0");
        let inv0 = Q::one() / &self.c[0];
        let mut c = vec![Q::zero(); n];
        c[0] = inv0.clone();
        for m in 1..n {
            let mut acc = Q::zero();
            for j in 1..=m {
                acc += &self.c[j] * &c[m - j];
            }
            c[m] = -acc * &inv0;
        }
        Self { low: -self.low, c }
    }

    pub fn powi(&self, e: i32) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Self {
            low: 0,
            c: Self::constant(Q::one(), self.order()).c,
        };
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn scale(&self, v: &Q) -> Self {
        Self {
            low: self.low,
            c: self.c.iter().map(|x| x * v).collect(),
        }
    }

    /// Coefficient of `s^p` (zero outside the stored window).
    pub fn coeff(&self, p: i64) -> Q {
        let idx = p - self.low;
        if idx < 0 || idx as usize >= self.c.len() {
            Q::zero()
        } else {
            self.c[idx as usize].clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn inverse_of_sinhc() {
        // s / sinh(s) = 1 - s^2/6 + 7 s^4/360 - ...
        let inv = Series::sinhc(&q(1, 1), 6).inv();
        assert_eq!(inv.c[2], q(-1, 6));
        assert_eq!(inv.c[4], q(7, 360));
    }

    #[test]
    fn exp_product() {
        let a = Series::exp(&q(1, 2), 5).mul(&Series::exp(&q(-1, 2), 5));
        assert_eq!(a.c, Series::constant(q(1, 1), 5).c);
    }
}
