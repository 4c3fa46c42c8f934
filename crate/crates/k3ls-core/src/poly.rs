//! Sparse multivariate polynomials over a prime field, plus univariate
//! root finding used by point sampling.

use alloc::vec::Vec;

use crate::fp::{add_mod, inv_mod, mul_mod, neg_mod, pow_mod, sub_mod};
use crate::rng::HashStream;
use crate::series::TruncSeries;

/// A sparse polynomial: terms are `(exponent tuple, coefficient)` with
/// coefficients already reduced mod the prime of the ambient model.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: Vec<(Vec<u8>, u64)>,
}

/// All exponent tuples of `nvars` variables with total degree exactly `deg`,
/// in a fixed deterministic order.
pub fn monomials(nvars: usize, deg: u64) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = alloc::vec![0u8; nvars];
    fn rec(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: u64) {
        if var + 1 == current.len() {
            current[var] = remaining as u8;
            out.push(current.clone());
            return;
        }
        for e in (0..=remaining).rev() {
            current[var] = e as u8;
            rec(out, current, var + 1, remaining - e);
        }
    }
    if nvars == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut out, &mut current, 0, deg);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

impl MPoly {
    pub fn new(nvars: usize, terms: Vec<(Vec<u8>, u64)>) -> Self {
        Self { nvars, terms }
    }

    /// Dense random homogeneous form of the given degree. The pure power of
    /// the last variable gets a nonzero coefficient so that solving for that
    /// coordinate always yields a degree-`deg` univariate.
    pub fn random_form(nvars: usize, deg: u64, p: u64, stream: &mut HashStream) -> Self {
        let mut terms = Vec::new();
        for exps in monomials(nvars, deg) {
            let pure_last = exps[nvars - 1] as u64 == deg;
            let c = if pure_last {
                stream.nonzero_field_elem(p)
            } else {
                stream.field_elem(p)
            };
            if c != 0 {
                terms.push((exps, c));
            }
        }
        Self { nvars, terms }
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as u64).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous_of(&self, deg: u64) -> bool {
        self.terms
            .iter()
            .all(|(e, _)| e.iter().map(|&x| x as u64).sum::<u64>() == deg)
    }

    pub fn eval(&self, p: u64, point: &[u64]) -> u64 {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = 0u64;
        for (exps, coeff) in &self.terms {
            let mut t = *coeff;
            for (e, &x) in exps.iter().zip(point.iter()) {
                if *e > 0 {
                    t = mul_mod(t, pow_mod(x, *e as u64, p), p);
                }
            }
            acc = add_mod(acc, t, p);
        }
        acc
    }

    pub fn partial(&self, p: u64, var: usize) -> MPoly {
        let mut terms = Vec::new();
        for (exps, coeff) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let c = mul_mod(*coeff, e as u64 % p, p);
            if c == 0 {
                continue;
            }
            let mut ne = exps.clone();
            ne[var] = e - 1;
            terms.push((ne, c));
        }
        MPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Substitute a constant for one variable, dropping it from the tuple.
    pub fn substitute(&self, p: u64, var: usize, value: u64) -> MPoly {
        let mut terms: Vec<(Vec<u8>, u64)> = Vec::new();
        for (exps, coeff) in &self.terms {
            let c = mul_mod(*coeff, pow_mod(value, exps[var] as u64, p), p);
            if c == 0 {
                continue;
            }
            let mut ne = exps.clone();
            ne.remove(var);
            match terms.iter_mut().find(|(e, _)| *e == ne) {
                Some((_, acc)) => *acc = add_mod(*acc, c, p),
                None => terms.push((ne, c)),
            }
        }
        terms.retain(|(_, c)| *c != 0);
        MPoly {
            nvars: self.nvars - 1,
            terms,
        }
    }

    /// Reorder variables: new variable `i` is old variable `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> MPoly {
        let terms = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let ne: Vec<u8> = perm.iter().map(|&old| exps[old]).collect();
                (ne, *c)
            })
            .collect();
        MPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Collect the univariate polynomial in `var` after substituting the
    /// given values for all other variables. Returned little-endian.
    pub fn univariate_in(&self, p: u64, var: usize, values: &[u64]) -> Vec<u64> {
        debug_assert_eq!(values.len(), self.nvars);
        let deg = self
            .terms
            .iter()
            .map(|(e, _)| e[var] as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = alloc::vec![0u64; deg + 1];
        for (exps, coeff) in &self.terms {
            let mut c = *coeff;
            for (i, (&e, &x)) in exps.iter().zip(values.iter()).enumerate() {
                if i != var && e > 0 {
                    c = mul_mod(c, pow_mod(x, e as u64, p), p);
                }
            }
            coeffs[exps[var] as usize] = add_mod(coeffs[exps[var] as usize], c, p);
        }
        coeffs
    }

    /// Evaluate at a tuple of truncated bivariate series.
    pub fn eval_series(&self, coords: &[TruncSeries]) -> TruncSeries {
        debug_assert_eq!(coords.len(), self.nvars);
        let p = coords[0].prime();
        let order = coords[0].order();
        let mut acc = TruncSeries::zero(p, order);
        for (exps, coeff) in &self.terms {
            let mut t = TruncSeries::constant(p, order, *coeff);
            for (e, s) in exps.iter().zip(coords.iter()) {
                if *e > 0 {
                    t = t.mul(&s.pow(*e as u64));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

// --- univariate helpers over F_p (dense, little-endian) ---

fn uv_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn uv_deg(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn uv_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    uv_trim(&mut r);
    let db = uv_deg(b).expect("division by zero polynomial");
    let lead_inv = inv_mod(b[db], p);
    while let Some(dr) = uv_deg(&r) {
        if dr < db {
            break;
        }
        let f = mul_mod(r[dr], lead_inv, p);
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = sub_mod(r[idx], mul_mod(f, b[i], p), p);
        }
        uv_trim(&mut r);
    }
    r
}

fn uv_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    uv_trim(&mut a);
    uv_trim(&mut b);
    while !b.is_empty() {
        let r = uv_rem(&a, &b, p);
        a = b;
        b = r;
    }
    // Monic normalization.
    if let Some(d) = uv_deg(&a) {
        let inv = inv_mod(a[d], p);
        for c in a.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    a
}

fn uv_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = alloc::vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
        }
    }
    uv_rem(&prod, m, p)
}

fn uv_powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = alloc::vec![1u64];
    let mut base = uv_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = uv_mulmod(&acc, &base, m, p);
        }
        base = uv_mulmod(&base, &base, m, p);
        exp >>= 1;
    }
    acc
}

/// All roots in `F_p` of a univariate polynomial (little-endian coefficients).
pub fn univariate_roots(f: &[u64], p: u64, stream: &mut HashStream) -> Vec<u64> {
    let mut f = f.to_vec();
    uv_trim(&mut f);
    let mut roots = Vec::new();
    if f.is_empty() {
        return roots; // identically zero: caller resamples
    }
    if uv_deg(&f) == Some(0) {
        return roots;
    }
    // Split off the product of linear factors: gcd(x^p - x, f).
    let xp = uv_powmod(&[0, 1], p, &f, p);
    let mut xp_minus_x = xp;
    while xp_minus_x.len() < 2 {
        xp_minus_x.push(0);
    }
    xp_minus_x[1] = sub_mod(xp_minus_x[1], 1, p);
    let g = uv_gcd(&xp_minus_x, &f, p);
    collect_roots(&g, p, stream, &mut roots);
    roots.sort_unstable();
    roots
}

fn collect_roots(g: &[u64], p: u64, stream: &mut HashStream, roots: &mut Vec<u64>) {
    match uv_deg(g) {
        None | Some(0) => {}
        Some(1) => {
            // monic: x + c0 = 0
            roots.push(neg_mod(mul_mod(g[0], inv_mod(g[1], p), p), p));
        }
        Some(_) => {
            // Random equal-degree splitting with (x + a)^((p-1)/2) - 1.
            for _ in 0..64 {
                let a = stream.field_elem(p);
                let mut w = uv_powmod(&[a, 1], (p - 1) / 2, g, p);
                if w.is_empty() {
                    w.push(0);
                }
                w[0] = sub_mod(w[0], 1, p);
                let h = uv_gcd(&w, g, p);
                if let Some(dh) = uv_deg(&h) {
                    if dh > 0 && dh < uv_deg(g).unwrap() {
                        let other = uv_quotient(g, &h, p);
                        collect_roots(&h, p, stream, roots);
                        collect_roots(&other, p, stream, roots);
                        return;
                    }
                }
            }
            panic!("equal-degree splitting did not converge");
        }
    }
}

fn uv_quotient(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    uv_trim(&mut r);
    let db = uv_deg(b).unwrap();
    let lead_inv = inv_mod(b[db], p);
    let mut q = alloc::vec![0u64; r.len().saturating_sub(db)];
    while let Some(dr) = uv_deg(&r) {
        if dr < db {
            break;
        }
        let f = mul_mod(r[dr], lead_inv, p);
        q[dr - db] = f;
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = sub_mod(r[idx], mul_mod(f, b[i], p), p);
        }
        uv_trim(&mut r);
    }
    q
}
