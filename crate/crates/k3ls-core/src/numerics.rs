//! Exact integer calculus on the Picard lattice of the blown-up generic K3.
//!
//! A [`SystemClass`] `(n; d; m_1, ..., m_r)` records the class
//! `dH - sum m_i E_i` on the blow-up of a degree-`n` generic K3 surface at
//! `r` general points. All arithmetic is checked 128-bit; overflow is a hard
//! error, never wraparound.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A divisor class on the blow-up of a degree-`n` generic K3 surface.
///
/// Zero multiplicities are admitted internally so binary operations can share
/// a common point labeling; they are stripped by [`SystemClass::normalized`].
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemClass {
    n: u64,
    d: u64,
    mults: Vec<u64>,
}

/// Virtual and expected dimension of a system, with `e = max(v, -1)`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionPair {
    pub v: i128,
    pub e: i128,
}

fn conditions(m: u64) -> Result<i128, Error> {
    let m = m as i128;
    m.checked_mul(m + 1)
        .map(|x| x / 2)
        .ok_or(Error::Overflow("point conditions"))
}

impl SystemClass {
    /// Builds a class, validating the lattice invariants (`n` even, `n >= 2`).
    pub fn new(n: u64, d: u64, mults: impl Into<Vec<u64>>) -> Result<Self, Error> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidClass(alloc::format!(
                "n must be even and >= 2, got {n}"
            )));
        }
        Ok(Self {
            n,
            d,
            mults: mults.into(),
        })
    }

    /// The zero class `(n; 0; ())`, the identity of [`SystemClass::add`].
    pub fn zero(n: u64) -> Result<Self, Error> {
        Self::new(n, 0, Vec::new())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn mults(&self) -> &[u64] {
        &self.mults
    }

    /// Number of points carrying a positive multiplicity.
    pub fn point_count(&self) -> usize {
        self.mults.iter().filter(|&&m| m > 0).count()
    }

    /// True when every multiplicity is >= 1.
    pub fn is_normalized(&self) -> bool {
        self.mults.iter().all(|&m| m > 0)
    }

    /// Strips zero multiplicities (the output convention).
    pub fn normalized(&self) -> Self {
        Self {
            n: self.n,
            d: self.d,
            mults: self.mults.iter().copied().filter(|&m| m > 0).collect(),
        }
    }

    /// Positive multiplicities sorted in non-increasing order. Classification
    /// depends only on this multiset (points are general).
    pub fn sorted_mults(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.mults.iter().copied().filter(|&m| m > 0).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Virtual dimension `v = d^2 n/2 + 1 - sum m_i(m_i+1)/2`.
    pub fn virtual_dim(&self) -> Result<i128, Error> {
        let d = self.d as i128;
        let n = self.n as i128;
        let dd = d.checked_mul(d).ok_or(Error::Overflow("virtual_dim"))?;
        // n is even, so d^2 n / 2 is exact.
        let mut v = dd
            .checked_mul(n / 2)
            .and_then(|x| x.checked_add(1))
            .ok_or(Error::Overflow("virtual_dim"))?;
        for &m in &self.mults {
            v = v
                .checked_sub(conditions(m)?)
                .ok_or(Error::Overflow("virtual_dim"))?;
        }
        Ok(v)
    }

    /// `(v, e)` with `e = max(v, -1)`.
    pub fn expected_dim(&self) -> Result<DimensionPair, Error> {
        let v = self.virtual_dim()?;
        Ok(DimensionPair { v, e: v.max(-1) })
    }

    /// Intersection of strict transforms: `A.B = n d_A d_B - sum m_i^A m_i^B`,
    /// zero-padding the shorter multiplicity sequence.
    pub fn intersect(&self, other: &SystemClass) -> Result<i128, Error> {
        if self.n != other.n {
            return Err(Error::MismatchedLattice {
                left: self.n,
                right: other.n,
            });
        }
        let mut acc = (self.n as i128)
            .checked_mul(self.d as i128)
            .and_then(|x| x.checked_mul(other.d as i128))
            .ok_or(Error::Overflow("intersect"))?;
        let len = self.mults.len().max(other.mults.len());
        for i in 0..len {
            let a = *self.mults.get(i).unwrap_or(&0) as i128;
            let b = *other.mults.get(i).unwrap_or(&0) as i128;
            acc = acc
                .checked_sub(a.checked_mul(b).ok_or(Error::Overflow("intersect"))?)
                .ok_or(Error::Overflow("intersect"))?;
        }
        Ok(acc)
    }

    /// Self-intersection `d^2 n - sum m_i^2`.
    pub fn self_intersect(&self) -> Result<i128, Error> {
        self.intersect(self)
    }

    /// Componentwise lattice sum with zero-padding.
    pub fn add(&self, other: &SystemClass) -> Result<SystemClass, Error> {
        if self.n != other.n {
            return Err(Error::MismatchedLattice {
                left: self.n,
                right: other.n,
            });
        }
        let d = self
            .d
            .checked_add(other.d)
            .ok_or(Error::Overflow("add"))?;
        let len = self.mults.len().max(other.mults.len());
        let mut mults = Vec::with_capacity(len);
        for i in 0..len {
            let a = *self.mults.get(i).unwrap_or(&0);
            let b = *other.mults.get(i).unwrap_or(&0);
            mults.push(a.checked_add(b).ok_or(Error::Overflow("add"))?);
        }
        SystemClass::new(self.n, d, mults)
    }

    /// Scalar multiple `k * L` in the lattice.
    pub fn scale(&self, k: u64) -> Result<SystemClass, Error> {
        let d = self.d.checked_mul(k).ok_or(Error::Overflow("scale"))?;
        let mults = self
            .mults
            .iter()
            .map(|&m| m.checked_mul(k).ok_or(Error::Overflow("scale")))
            .collect::<Result<Vec<_>, _>>()?;
        SystemClass::new(self.n, d, mults)
    }

    /// Pairing with the canonical class of the blow-up, `L.K = sum m_i`.
    ///
    /// Satisfies the Riemann-Roch consistency `v = (L.L - L.K)/2 + 1`.
    pub fn canonical_pairing(&self) -> Result<i128, Error> {
        let mut acc: i128 = 0;
        for &m in &self.mults {
            acc = acc
                .checked_add(m as i128)
                .ok_or(Error::Overflow("canonical_pairing"))?;
        }
        Ok(acc)
    }

    /// Exponent-shorthand rendering of the multiplicities, e.g. `2^4,3`.
    pub fn mults_shorthand(&self) -> String {
        let mults = self.normalized();
        let mut out = String::new();
        let mut i = 0;
        let ms = mults.mults();
        while i < ms.len() {
            let mut j = i;
            while j < ms.len() && ms[j] == ms[i] {
                j += 1;
            }
            if !out.is_empty() {
                out.push(',');
            }
            if j - i > 1 {
                out.push_str(&alloc::format!("{}^{}", ms[i], j - i));
            } else {
                out.push_str(&alloc::format!("{}", ms[i]));
            }
            i = j;
        }
        out
    }
}

impl fmt::Display for SystemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sh = self.mults_shorthand();
        if sh.is_empty() {
            write!(f, "L^{}({})", self.n, self.d)
        } else {
            write!(f, "L^{}({},{})", self.n, self.d, sh)
        }
    }
}

/// `v(A+B) - v(A) - v(B) - A.B + 1`; identically zero on the lattice.
///
/// Exposed as an operation so the property test is a one-liner and
/// certificate audits can cite it.
pub fn additivity_defect(a: &SystemClass, b: &SystemClass) -> Result<i128, Error> {
    let sum = a.add(b)?;
    let defect = sum.virtual_dim()?
        - a.virtual_dim()?
        - b.virtual_dim()?
        - a.intersect(b)?
        + 1;
    Ok(defect)
}
