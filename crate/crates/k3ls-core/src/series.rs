//! Truncated bivariate power series over a prime field.
//!
//! Coefficients are stored triangularly for total degree `<= order`, indexed
//! by `(a, b)` with `a + b <= order`; all operations truncate at that order.

use alloc::vec::Vec;

use crate::error::Error;
use crate::fp::{add_mod, inv_mod, mul_mod, neg_mod, sub_mod};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    p: u64,
    order: usize,
    c: Vec<u64>,
}

fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl TruncSeries {
    pub fn zero(p: u64, order: usize) -> Self {
        Self {
            p,
            order,
            c: alloc::vec![0; tri_len(order)],
        }
    }

    pub fn constant(p: u64, order: usize, v: u64) -> Self {
        let mut s = Self::zero(p, order);
        s.c[0] = v % p;
        s
    }

    /// `base + u` (var = 0) or `base + v` (var = 1).
    pub fn shifted_param(p: u64, order: usize, base: u64, var: usize) -> Self {
        let mut s = Self::constant(p, order, base);
        if order >= 1 {
            match var {
                0 => s.set(1, 0, 1),
                1 => s.set(0, 1, 1),
                _ => panic!("bivariate series has parameters 0 and 1"),
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn idx(a: usize, b: usize) -> usize {
        let t = a + b;
        t * (t + 1) / 2 + b
    }

    pub fn coeff(&self, a: usize, b: usize) -> u64 {
        if a + b > self.order {
            0
        } else {
            self.c[Self::idx(a, b)]
        }
    }

    pub fn set(&mut self, a: usize, b: usize, v: u64) {
        assert!(a + b <= self.order);
        self.c[Self::idx(a, b)] = v % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        let mut out = self.clone();
        for (o, &x) in out.c.iter_mut().zip(other.c.iter()) {
            *o = add_mod(*o, x, self.p);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        let mut out = self.clone();
        for (o, &x) in out.c.iter_mut().zip(other.c.iter()) {
            *o = sub_mod(*o, x, self.p);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for o in out.c.iter_mut() {
            *o = neg_mod(*o, self.p);
        }
        out
    }

    pub fn scale(&self, k: u64) -> Self {
        let mut out = self.clone();
        for o in out.c.iter_mut() {
            *o = mul_mod(*o, k, self.p);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        let mut out = Self::zero(self.p, self.order);
        for a1 in 0..=self.order {
            for b1 in 0..=(self.order - a1) {
                let x = self.coeff(a1, b1);
                if x == 0 {
                    continue;
                }
                for a2 in 0..=(self.order - a1 - b1) {
                    for b2 in 0..=(self.order - a1 - b1 - a2) {
                        let y = other.coeff(a2, b2);
                        if y == 0 {
                            continue;
                        }
                        let i = Self::idx(a1 + a2, b1 + b2);
                        out.c[i] = add_mod(out.c[i], mul_mod(x, y, self.p), self.p);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::constant(self.p, self.order, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn invert(&self) -> Result<Self, Error> {
        if self.c[0] == 0 {
            return Err(Error::SingularPoint);
        }
        let mut inv = Self::constant(self.p, self.order, inv_mod(self.c[0], self.p));
        let two = Self::constant(self.p, self.order, 2);
        // Newton iteration doubles the correct order each step.
        let mut steps = 0usize;
        let mut correct = 1usize;
        while correct <= self.order {
            inv = inv.mul(&two.sub(&self.mul(&inv)));
            correct *= 2;
            steps += 1;
            assert!(steps < 64);
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 1_000_003;

    #[test]
    fn constants_and_params() {
        let c = TruncSeries::constant(P, 3, 7);
        assert_eq!(c.coeff(0, 0), 7);
        assert_eq!(c.coeff(1, 0), 0);
        let u = TruncSeries::shifted_param(P, 3, 5, 0);
        assert_eq!(u.coeff(0, 0), 5);
        assert_eq!(u.coeff(1, 0), 1);
        assert_eq!(u.coeff(0, 1), 0);
    }

    #[test]
    fn product_of_params() {
        let u = TruncSeries::shifted_param(P, 4, 2, 0);
        let v = TruncSeries::shifted_param(P, 4, 3, 1);
        let uv = u.mul(&v);
        assert_eq!(uv.coeff(0, 0), 6);
        assert_eq!(uv.coeff(1, 0), 3);
        assert_eq!(uv.coeff(0, 1), 2);
        assert_eq!(uv.coeff(1, 1), 1);
        assert_eq!(uv.coeff(2, 0), 0);
    }

    #[test]
    fn truncation_drops_high_degrees() {
        let u = TruncSeries::shifted_param(P, 2, 0, 0);
        let u3 = u.pow(3);
        assert!(u3.is_zero());
    }

    #[test]
    fn inverse_is_inverse() {
        let mut s = TruncSeries::constant(P, 5, 4);
        s.set(1, 0, 9);
        s.set(0, 1, 13);
        s.set(1, 1, 2);
        let inv = s.invert().unwrap();
        let prod = s.mul(&inv);
        assert_eq!(prod, TruncSeries::constant(P, 5, 1));
    }

    #[test]
    fn inverse_needs_unit() {
        let s = TruncSeries::shifted_param(P, 3, 0, 0);
        assert!(s.invert().is_err());
    }
}
