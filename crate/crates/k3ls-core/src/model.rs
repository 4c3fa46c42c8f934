//! Concrete K3 models over a prime field: point sampling and local charts.
//!
//! Two model variants are supported: a quartic surface in P^3 (`n = 4`) and
//! the double plane `w^2 = f6(x, y, z)` in weighted projective (1,1,1,3)
//! space (`n = 2`). Points are sampled in a fixed affine chart (first
//! coordinate of the quartic, third plane coordinate of the double plane set
//! to 1); the complement is measure zero for random sampling.

use alloc::vec::Vec;

use crate::error::Error;
use crate::fp::{is_prime_u64, is_quadratic_residue, sqrt_mod};
use crate::poly::{binomial, univariate_roots, MPoly};
use crate::rng::HashStream;
use crate::series::TruncSeries;

/// Minimum prime admitted by model validation; leaves room for generic
/// coefficient and point choices.
pub const MIN_PRIME: u64 = 1_000_000;

/// Retry budget for point sampling.
pub const SAMPLE_RETRY_BUDGET: u32 = 1000;

/// Degree cap of the double plane model: products of `w`-sections would need
/// `w^2`-reduction from degree 6 on.
pub const DOUBLE_PLANE_DEGREE_CAP: u64 = 5;

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    QuarticInP3,
    DoubleSexticPlane,
}

impl ModelVariant {
    /// Self-intersection of the polarization realized by this model.
    pub fn lattice_n(&self) -> u64 {
        match self {
            ModelVariant::QuarticInP3 => 4,
            ModelVariant::DoubleSexticPlane => 2,
        }
    }

    pub fn for_n(n: u64) -> Option<Self> {
        match n {
            4 => Some(ModelVariant::QuarticInP3),
            2 => Some(ModelVariant::DoubleSexticPlane),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelVariant::QuarticInP3 => "quartic",
            ModelVariant::DoubleSexticPlane => "double-plane",
        }
    }

    pub fn form_nvars(&self) -> usize {
        match self {
            ModelVariant::QuarticInP3 => 4,
            ModelVariant::DoubleSexticPlane => 3,
        }
    }

    pub fn form_degree(&self) -> u64 {
        match self {
            ModelVariant::QuarticInP3 => 4,
            ModelVariant::DoubleSexticPlane => 6,
        }
    }
}

/// Specification of a concrete model: variant, prime and seed. The defining
/// form is derived deterministically from the seed.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct K3ModelSpec {
    pub variant: ModelVariant,
    pub prime: u64,
    pub seed: u64,
}

impl K3ModelSpec {
    pub fn new(variant: ModelVariant, prime: u64, seed: u64) -> Result<Self, Error> {
        if !is_prime_u64(prime) || prime <= MIN_PRIME {
            return Err(Error::InvalidPrime(prime));
        }
        Ok(Self {
            variant,
            prime,
            seed,
        })
    }

    /// Builds the model, generating the defining form from the seed stream.
    pub fn build(&self) -> K3Model {
        let mut stream = HashStream::new(self.seed, "model-form", 0);
        let form = MPoly::random_form(
            self.variant.form_nvars(),
            self.variant.form_degree(),
            self.prime,
            &mut stream,
        );
        K3Model {
            spec: *self,
            form,
        }
    }
}

/// A concrete model: spec plus the defining form (`f4` in 4 variables for
/// the quartic, `f6` in 3 variables for the double plane).
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K3Model {
    pub spec: K3ModelSpec,
    pub form: MPoly,
}

/// A smooth point of the model. For the quartic, `coords` are the four
/// projective coordinates (first normalized to 1). For the double plane,
/// `coords = [x, y, z, w]` with `z = 1` and `w^2 = f6(x, y, z)`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePoint {
    pub coords: Vec<u64>,
}

/// Local analytic chart at a smooth point: every ambient coordinate as a
/// truncated power series in two local parameters `(u, v)`.
#[derive(Debug, Clone)]
pub struct LocalChart {
    pub point: SurfacePoint,
    pub order: usize,
    /// One series per ambient coordinate, in ambient order.
    pub coord_series: Vec<TruncSeries>,
    pub params: (usize, usize),
    pub dependent: usize,
}

impl K3Model {
    /// Builds a model from an explicit defining form, validating shape.
    pub fn from_form(
        variant: ModelVariant,
        prime: u64,
        seed: u64,
        form: MPoly,
    ) -> Result<Self, Error> {
        let spec = K3ModelSpec::new(variant, prime, seed)?;
        if form.nvars != variant.form_nvars() || !form.is_homogeneous_of(variant.form_degree()) {
            return Err(Error::InvalidClass(alloc::format!(
                "defining form must be homogeneous of degree {} in {} variables",
                variant.form_degree(),
                variant.form_nvars()
            )));
        }
        Ok(Self { spec, form })
    }

    pub fn n(&self) -> u64 {
        self.spec.variant.lattice_n()
    }

    /// Dimension of the space of degree-`d` sections, `d^2 n/2 + 2`.
    pub fn basis_dim(&self, d: u64) -> Result<u64, Error> {
        model_basis_dim(self.spec.variant, d)
    }

    /// Samples a smooth point, consuming randomness from the stream.
    pub fn sample_point(&self, stream: &mut HashStream) -> Result<SurfacePoint, Error> {
        let p = self.spec.prime;
        for _ in 0..SAMPLE_RETRY_BUDGET {
            match self.spec.variant {
                ModelVariant::QuarticInP3 => {
                    // Chart x0 = 1; random x1, x2; solve the quartic in x3.
                    let x1 = stream.field_elem(p);
                    let x2 = stream.field_elem(p);
                    let uni = self.form.univariate_in(p, 3, &[1, x1, x2, 0]);
                    let roots = univariate_roots(&uni, p, stream);
                    if roots.is_empty() {
                        continue;
                    }
                    let x3 = roots[stream.below(roots.len() as u64) as usize];
                    let pt = SurfacePoint {
                        coords: alloc::vec![1, x1, x2, x3],
                    };
                    if self.smoothness_probe(&pt) {
                        return Ok(pt);
                    }
                }
                ModelVariant::DoubleSexticPlane => {
                    // Chart z = 1; random x, y; w a square root of f6.
                    let x = stream.field_elem(p);
                    let y = stream.field_elem(p);
                    let g = self.form.eval(p, &[x, y, 1]);
                    if g == 0 || !is_quadratic_residue(g, p) {
                        continue;
                    }
                    let mut w = sqrt_mod(g, p).expect("residue has a root");
                    if stream.bit() {
                        w = p - w;
                    }
                    let pt = SurfacePoint {
                        coords: alloc::vec![x, y, 1, w],
                    };
                    if self.smoothness_probe(&pt) {
                        return Ok(pt);
                    }
                }
            }
        }
        Err(Error::Sampling(alloc::format!(
            "no smooth point found in {SAMPLE_RETRY_BUDGET} attempts (prime {p})"
        )))
    }

    /// Some partial derivative of the defining equation is nonzero at the
    /// point. For the double plane this is `w != 0` (the branch locus is the
    /// only place where the `w`-partial vanishes).
    pub fn smoothness_probe(&self, pt: &SurfacePoint) -> bool {
        let p = self.spec.prime;
        match self.spec.variant {
            ModelVariant::QuarticInP3 => (0..4).any(|v| {
                self.form.partial(p, v).eval(p, &pt.coords) != 0
            }),
            ModelVariant::DoubleSexticPlane => pt.coords[3] != 0,
        }
    }

    fn equation_residual(&self, pt: &SurfacePoint) -> u64 {
        let p = self.spec.prime;
        match self.spec.variant {
            ModelVariant::QuarticInP3 => self.form.eval(p, &pt.coords),
            ModelVariant::DoubleSexticPlane => {
                let f = self.form.eval(p, &pt.coords[..3]);
                let w2 = crate::fp::mul_mod(pt.coords[3], pt.coords[3], p);
                crate::fp::sub_mod(w2, f, p)
            }
        }
    }

    /// Builds the local chart at a smooth point, truncated at total order
    /// `order`. Deterministic given `(model, point, order)`.
    pub fn local_chart(&self, pt: &SurfacePoint, order: usize) -> Result<LocalChart, Error> {
        let p = self.spec.prime;
        debug_assert_eq!(self.equation_residual(pt), 0);
        match self.spec.variant {
            ModelVariant::QuarticInP3 => {
                debug_assert_eq!(pt.coords[0], 1);
                // Affine equation in (x1, x2, x3).
                let aff = self.form.substitute(p, 0, 1);
                // Dependent coordinate: an affine variable with nonzero
                // partial; prefer the last.
                let dep_aff = (0..3)
                    .rev()
                    .find(|&v| aff.partial(p, v).eval(p, &pt.coords[1..]) != 0)
                    .ok_or(Error::SingularPoint)?;
                let dep = dep_aff + 1;
                let params: Vec<usize> = (1..4).filter(|&v| v != dep).collect();
                // Reorder affine variables to (param0, param1, dependent).
                let perm = alloc::vec![params[0] - 1, params[1] - 1, dep_aff];
                let f3 = aff.permute_vars(&perm);
                let z = lift_dependent(
                    &f3,
                    p,
                    pt.coords[params[0]],
                    pt.coords[params[1]],
                    pt.coords[dep],
                    order,
                )?;
                let mut coord_series =
                    alloc::vec![TruncSeries::constant(p, order, 1); 4];
                coord_series[params[0]] =
                    TruncSeries::shifted_param(p, order, pt.coords[params[0]], 0);
                coord_series[params[1]] =
                    TruncSeries::shifted_param(p, order, pt.coords[params[1]], 1);
                coord_series[dep] = z;
                Ok(LocalChart {
                    point: pt.clone(),
                    order,
                    coord_series,
                    params: (params[0], params[1]),
                    dependent: dep,
                })
            }
            ModelVariant::DoubleSexticPlane => {
                debug_assert_eq!(pt.coords[2], 1);
                if pt.coords[3] == 0 {
                    return Err(Error::SingularPoint);
                }
                // F(u, v, w) = w^2 - f6(u, v, 1); dependent coordinate w.
                let f_plane = self.form.substitute(p, 2, 1);
                let mut terms: Vec<(Vec<u8>, u64)> = f_plane
                    .terms
                    .iter()
                    .map(|(e, c)| {
                        (alloc::vec![e[0], e[1], 0], crate::fp::neg_mod(*c, p))
                    })
                    .collect();
                terms.push((alloc::vec![0, 0, 2], 1));
                let f3 = MPoly::new(3, terms);
                let w = lift_dependent(
                    &f3,
                    p,
                    pt.coords[0],
                    pt.coords[1],
                    pt.coords[3],
                    order,
                )?;
                let coord_series = alloc::vec![
                    TruncSeries::shifted_param(p, order, pt.coords[0], 0),
                    TruncSeries::shifted_param(p, order, pt.coords[1], 1),
                    TruncSeries::constant(p, order, 1),
                    w,
                ];
                Ok(LocalChart {
                    point: pt.clone(),
                    order,
                    coord_series,
                    params: (0, 1),
                    dependent: 3,
                })
            }
        }
    }
}

/// Dimension of `H^0(O_S(dH))` on the model, `d^2 n/2 + 2` for `d >= 1`.
pub fn model_basis_dim(variant: ModelVariant, d: u64) -> Result<u64, Error> {
    if d == 0 {
        return Err(Error::EmptySystem);
    }
    let dim = match variant {
        ModelVariant::QuarticInP3 => binomial(d + 3, 3) - binomial(d.saturating_sub(1), 3),
        ModelVariant::DoubleSexticPlane => {
            binomial(d + 2, 2)
                + if d >= 3 {
                    binomial(d - 1, 2)
                } else {
                    0
                }
        }
    };
    debug_assert_eq!(dim, d * d * variant.lattice_n() / 2 + 2);
    Ok(dim)
}

/// Newton-lifts the dependent coordinate of `f3(u, v, z) = 0` as a truncated
/// power series around `(u0, v0, z0)`; requires `f3_z` nonzero at the point.
///
/// Each iteration doubles the correct order; the loop exits when the residual
/// vanishes identically in the truncated ring.
pub fn lift_dependent(
    f3: &MPoly,
    p: u64,
    u0: u64,
    v0: u64,
    z0: u64,
    order: usize,
) -> Result<TruncSeries, Error> {
    debug_assert_eq!(f3.nvars, 3);
    debug_assert_eq!(f3.eval(p, &[u0, v0, z0]), 0);
    let fz = f3.partial(p, 2);
    if fz.eval(p, &[u0, v0, z0]) == 0 {
        return Err(Error::SingularPoint);
    }
    let u = TruncSeries::shifted_param(p, order, u0, 0);
    let v = TruncSeries::shifted_param(p, order, v0, 1);
    let mut z = TruncSeries::constant(p, order, z0);
    for _ in 0..64 {
        let coords = [u.clone(), v.clone(), z.clone()];
        let residual = f3.eval_series(&coords);
        if residual.is_zero() {
            return Ok(z);
        }
        let dz = fz.eval_series(&coords).invert()?;
        z = z.sub(&residual.mul(&dz));
    }
    Err(Error::Sampling(alloc::string::String::from(
        "Newton lifting did not converge",
    )))
}
