//! Distributions described by their cumulant generating function.
//!
//! A [`CumulantModel`] exposes Λ(θ) = ln E[e^{θ·X}] on the interior of its
//! effective domain, its analytic continuation to the strip θ + iu, the
//! derivatives needed by the saddle-point solver, and samplers for the
//! original and exponentially tilted laws.

use std::fmt::Debug;

use num_complex::Complex;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::real::Real;

/// Declared constants (α₀, γ) with ∫|u|^{α₀}|φ(u)|^γ du < ∞.
///
/// These are metadata supplied by the model author, not verified. The
/// density estimator needs n ≥ γ so that the characteristic function of the
/// sample mean is integrable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrability<T> {
    pub alpha0: T,
    pub gamma: usize,
}

pub trait CumulantModel<T: Real>: Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Ok when θ lies in the interior of the effective domain; otherwise a
    /// domain error naming the offending coordinate.
    fn check_domain(&self, theta: &[T]) -> Result<()>;

    fn in_domain(&self, theta: &[T]) -> bool {
        self.check_domain(theta).is_ok()
    }

    fn cgf(&self, theta: &[T]) -> T;

    /// Analytic continuation Λ(z), valid when Re z lies in the domain.
    fn cgf_complex(&self, z: &[Complex<T>]) -> Complex<T>;

    fn grad(&self, theta: &[T]) -> Vec<T>;

    fn hess(&self, theta: &[T]) -> Matrix<T>;

    /// One draw from the original law.
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]);

    /// One draw from the tilted law dF_θ = e^{θ·x − Λ(θ)} dF. The caller has
    /// checked the domain.
    fn sample_tilted_into(&self, theta: &[T], rng: &mut dyn RngCore, out: &mut [T]);

    /// Density of a one-dimensional model, when it has one.
    fn density(&self, _x: T) -> Option<T> {
        None
    }

    fn integrability(&self) -> Integrability<T>;

    fn mean(&self) -> Vec<T> {
        self.grad(&vec![T::zero(); self.dim()])
    }
}

fn check_len<T>(expected: usize, v: &[T]) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got: v.len() })
    }
}

/// Draws from the tilted law F_θ after validating θ.
pub fn tilted_sample<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    theta: &[T],
    rng: &mut dyn RngCore,
) -> Result<Vec<T>> {
    check_len(model.dim(), theta)?;
    model.check_domain(theta)?;
    let mut out = vec![T::zero(); model.dim()];
    model.sample_tilted_into(theta, rng, &mut out);
    Ok(out)
}

/// Characteristic function of X − x₀ under F_θ:
/// φ_θ(u) = exp(Λ(θ + iu) − Λ(θ) − i u·x₀).
pub fn phi_tilted<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    theta: &[T],
    u: &[T],
    x0: &[T],
) -> Result<Complex<T>> {
    check_len(model.dim(), theta)?;
    check_len(model.dim(), u)?;
    check_len(model.dim(), x0)?;
    model.check_domain(theta)?;
    let z: Vec<Complex<T>> = theta.iter().zip(u).map(|(&t, &ui)| Complex::new(t, ui)).collect();
    let log = model.cgf_complex(&z) - model.cgf(theta) - Complex::new(T::zero(), dot(u, x0));
    Ok(log.exp())
}

/// Built-in families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    Exponential {
        rate: T,
    },
    Gamma {
        shape: T,
        scale: T,
    },
    Normal {
        mean: T,
        variance: T,
    },
    /// Independent one-dimensional components stacked into a vector.
    IidProduct(Vec<Family<T>>),
    /// X = B·E with E drawn from `base`; B is square and nonsingular.
    LinearMap {
        base: Box<Family<T>>,
        matrix: Matrix<T>,
    },
}

impl<T: Real> Family<T> {
    pub fn exponential(rate: T) -> Result<Self> {
        if !(rate > T::zero()) || !rate.is_finite() {
            return Err(Error::Parameter(format!(
                "exponential rate must be positive, got {rate}"
            )));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn gamma(shape: T, scale: T) -> Result<Self> {
        if !(shape > T::zero() && scale > T::zero()) || !(shape * scale).is_finite() {
            return Err(Error::Parameter(format!(
                "gamma shape and scale must be positive, got ({shape}, {scale})"
            )));
        }
        Ok(Self::Gamma { shape, scale })
    }

    pub fn normal(mean: T, variance: T) -> Result<Self> {
        if !(variance > T::zero()) || !variance.is_finite() || !mean.is_finite() {
            return Err(Error::Parameter(format!(
                "normal variance must be positive, got {variance}"
            )));
        }
        Ok(Self::Normal { mean, variance })
    }

    pub fn iid_product(components: Vec<Family<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Parameter("product needs at least one component".into()));
        }
        if let Some(bad) = components.iter().position(|c| c.dim() != 1) {
            return Err(Error::Parameter(format!(
                "product component {bad} is not one-dimensional"
            )));
        }
        Ok(Self::IidProduct(components))
    }

    pub fn linear_map(base: Family<T>, matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.cols() != base.dim() {
            return Err(Error::Parameter(format!(
                "linear map must be {d}x{d}, got {}x{}",
                matrix.rows(),
                matrix.cols(),
                d = base.dim()
            )));
        }
        if matrix.lu().is_none() {
            return Err(Error::Parameter("linear map matrix is singular".into()));
        }
        Ok(Self::LinearMap {
            base: Box::new(base),
            matrix,
        })
    }

    /// `d` independent copies of a one-dimensional family.
    pub fn iid(component: Family<T>, d: usize) -> Result<Self> {
        Self::iid_product(vec![component; d])
    }

    // --- scalar building blocks for the one-dimensional families ---

    fn scalar_domain(&self, t: T) -> bool {
        match *self {
            Self::Exponential { rate } => t < rate,
            Self::Gamma { scale, .. } => t * scale < T::one(),
            Self::Normal { .. } => t.is_finite(),
            _ => unreachable!("scalar helper on a vector family"),
        }
    }

    fn scalar_cgf(&self, t: T) -> T {
        match *self {
            Self::Exponential { rate } => -(T::one() - t / rate).ln(),
            Self::Gamma { shape, scale } => -shape * (T::one() - scale * t).ln(),
            Self::Normal { mean, variance } => mean * t + T::lit(0.5) * variance * t * t,
            _ => unreachable!(),
        }
    }

    // Principal log per factor; Re(1 − z/λ) > 0 on the strip so no branch
    // crossing occurs.
    fn scalar_cgf_complex(&self, z: Complex<T>) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        match *self {
            Self::Exponential { rate } => -(one - z / rate).ln(),
            Self::Gamma { shape, scale } => -(one - z * scale).ln() * shape,
            Self::Normal { mean, variance } => z * mean + z * z * (variance * T::lit(0.5)),
            _ => unreachable!(),
        }
    }

    fn scalar_grad(&self, t: T) -> T {
        match *self {
            Self::Exponential { rate } => T::one() / (rate - t),
            Self::Gamma { shape, scale } => shape * scale / (T::one() - scale * t),
            Self::Normal { mean, variance } => mean + variance * t,
            _ => unreachable!(),
        }
    }

    fn scalar_hess(&self, t: T) -> T {
        match *self {
            Self::Exponential { rate } => (rate - t).powi(-2),
            Self::Gamma { shape, scale } => {
                let r = scale / (T::one() - scale * t);
                shape * r * r
            }
            Self::Normal { variance, .. } => variance,
            _ => unreachable!(),
        }
    }

    fn scalar_sample(&self, t: T, rng: &mut dyn RngCore) -> T {
        match *self {
            Self::Exponential { rate } => T::sample_standard_exp(rng) / (rate - t),
            Self::Gamma { shape, scale } => T::sample_gamma(shape, rng) * scale / (T::one() - scale * t),
            Self::Normal { mean, variance } => mean + variance * t + variance.sqrt() * T::sample_standard_normal(rng),
            _ => unreachable!(),
        }
    }

    fn scalar_density(&self, x: T) -> T {
        match *self {
            Self::Exponential { rate } => {
                if x < T::zero() {
                    T::zero()
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Self::Gamma { shape, scale } => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    ((shape - T::one()) * x.ln() - x / scale - crate::special::ln_gamma(shape) - shape * scale.ln())
                        .exp()
                }
            }
            Self::Normal { mean, variance } => {
                let z = x - mean;
                (-(z * z) / (T::lit(2.0) * variance)).exp() / (T::lit(2.0) * T::PI() * variance).sqrt()
            }
            _ => unreachable!(),
        }
    }

    fn scalar_integrability(&self) -> Integrability<T> {
        let alpha0 = T::lit(1.5);
        match *self {
            // |φ(u)| decays like |u|^{−shape}.
            Self::Exponential { .. } => Integrability { alpha0, gamma: 3 },
            Self::Gamma { shape, .. } => {
                let need = (alpha0 + T::one()) / shape;
                let gamma = need.floor().to_usize().unwrap_or(usize::MAX).saturating_add(1);
                Integrability {
                    alpha0,
                    gamma: gamma.max(1),
                }
            }
            Self::Normal { .. } => Integrability { alpha0, gamma: 1 },
            _ => unreachable!(),
        }
    }

    fn is_scalar(&self) -> bool {
        matches!(
            self,
            Self::Exponential { .. } | Self::Gamma { .. } | Self::Normal { .. }
        )
    }

    fn tilted_draw(&self, theta: &[T], rng: &mut dyn RngCore, out: &mut [T]) {
        match self {
            s if s.is_scalar() => out[0] = s.scalar_sample(theta[0], rng),
            Self::IidProduct(cs) => {
                for ((c, &t), o) in cs.iter().zip(theta).zip(out.iter_mut()) {
                    *o = c.scalar_sample(t, rng);
                }
            }
            Self::LinearMap { base, matrix } => {
                let bt = matrix.tr_mul_vec(theta);
                let mut e = vec![T::zero(); base.dim()];
                base.tilted_draw(&bt, rng, &mut e);
                out.copy_from_slice(&matrix.mul_vec(&e));
            }
            _ => unreachable!(),
        }
    }
}

impl<T: Real> CumulantModel<T> for Family<T> {
    fn dim(&self) -> usize {
        match self {
            Self::IidProduct(cs) => cs.len(),
            Self::LinearMap { matrix, .. } => matrix.rows(),
            _ => 1,
        }
    }

    fn check_domain(&self, theta: &[T]) -> Result<()> {
        check_len(self.dim(), theta)?;
        match self {
            s if s.is_scalar() => {
                if s.scalar_domain(theta[0]) {
                    Ok(())
                } else {
                    Err(Error::Domain {
                        coordinate: 0,
                        detail: format!("theta = {} is outside the effective domain", theta[0]),
                    })
                }
            }
            Self::IidProduct(cs) => {
                for (i, (c, &t)) in cs.iter().zip(theta).enumerate() {
                    if !c.scalar_domain(t) {
                        return Err(Error::Domain {
                            coordinate: i,
                            detail: format!("theta_{i} = {t} is outside the effective domain"),
                        });
                    }
                }
                Ok(())
            }
            Self::LinearMap { base, matrix } => {
                let bt = matrix.tr_mul_vec(theta);
                base.check_domain(&bt).map_err(|e| match e {
                    Error::Domain { coordinate, .. } => Error::Domain {
                        coordinate,
                        detail: format!(
                            "(B^T theta)_{coordinate} = {} is outside the base domain",
                            bt[coordinate]
                        ),
                    },
                    other => other,
                })
            }
            _ => unreachable!(),
        }
    }

    fn cgf(&self, theta: &[T]) -> T {
        match self {
            s if s.is_scalar() => s.scalar_cgf(theta[0]),
            Self::IidProduct(cs) => cs.iter().zip(theta).map(|(c, &t)| c.scalar_cgf(t)).sum(),
            Self::LinearMap { base, matrix } => base.cgf(&matrix.tr_mul_vec(theta)),
            _ => unreachable!(),
        }
    }

    fn cgf_complex(&self, z: &[Complex<T>]) -> Complex<T> {
        match self {
            s if s.is_scalar() => s.scalar_cgf_complex(z[0]),
            Self::IidProduct(cs) => cs
                .iter()
                .zip(z)
                .map(|(c, &zi)| c.scalar_cgf_complex(zi))
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b),
            Self::LinearMap { base, matrix } => {
                let n = matrix.cols();
                let bt: Vec<Complex<T>> = (0..n)
                    .map(|j| {
                        z.iter()
                            .enumerate()
                            .map(|(i, &zi)| zi * matrix[(i, j)])
                            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
                    })
                    .collect();
                base.cgf_complex(&bt)
            }
            _ => unreachable!(),
        }
    }

    fn grad(&self, theta: &[T]) -> Vec<T> {
        match self {
            s if s.is_scalar() => vec![s.scalar_grad(theta[0])],
            Self::IidProduct(cs) => cs.iter().zip(theta).map(|(c, &t)| c.scalar_grad(t)).collect(),
            Self::LinearMap { base, matrix } => matrix.mul_vec(&base.grad(&matrix.tr_mul_vec(theta))),
            _ => unreachable!(),
        }
    }

    fn hess(&self, theta: &[T]) -> Matrix<T> {
        match self {
            s if s.is_scalar() => Matrix::diagonal(&[s.scalar_hess(theta[0])]),
            Self::IidProduct(cs) => {
                let diag: Vec<T> = cs.iter().zip(theta).map(|(c, &t)| c.scalar_hess(t)).collect();
                Matrix::diagonal(&diag)
            }
            Self::LinearMap { base, matrix } => {
                let inner = base.hess(&matrix.tr_mul_vec(theta));
                matrix.matmul(&inner).matmul(&matrix.transpose())
            }
            _ => unreachable!(),
        }
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) {
        let zero = vec![T::zero(); self.dim()];
        self.tilted_draw(&zero, rng, out);
    }

    fn sample_tilted_into(&self, theta: &[T], rng: &mut dyn RngCore, out: &mut [T]) {
        self.tilted_draw(theta, rng, out);
    }

    fn density(&self, x: T) -> Option<T> {
        match self {
            s if s.is_scalar() => Some(s.scalar_density(x)),
            Self::IidProduct(cs) if cs.len() == 1 => Some(cs[0].scalar_density(x)),
            Self::LinearMap { base, matrix } if matrix.rows() == 1 => {
                let b = matrix[(0, 0)];
                base.density(x / b).map(|f| f / b.abs())
            }
            _ => None,
        }
    }

    fn integrability(&self) -> Integrability<T> {
        match self {
            s if s.is_scalar() => s.scalar_integrability(),
            Self::IidProduct(cs) => cs.iter().map(Family::scalar_integrability).fold(
                Integrability {
                    alpha0: T::infinity(),
                    gamma: 1,
                },
                |acc, c| Integrability {
                    alpha0: acc.alpha0.min(c.alpha0),
                    gamma: acc.gamma.max(c.gamma),
                },
            ),
            Self::LinearMap { base, .. } => base.integrability(),
            _ => unreachable!(),
        }
    }
}

/// The leading `k` coordinates of a model, with CGF Λ((θ′, 0)).
///
/// Used for partial-orthant tail sets, where the trailing coordinates are
/// unconstrained and integrate out.
#[derive(Debug)]
pub struct Marginal<'a, M: ?Sized> {
    inner: &'a M,
    k: usize,
}

impl<'a, M: ?Sized> Marginal<'a, M> {
    pub fn new<T: Real>(inner: &'a M, k: usize) -> Result<Self>
    where
        M: CumulantModel<T>,
    {
        if k == 0 || k > inner.dim() {
            return Err(Error::Dimension {
                expected: inner.dim(),
                got: k,
            });
        }
        Ok(Self { inner, k })
    }

    fn pad<X: Copy>(&self, v: &[X], zero: X, full: usize) -> Vec<X> {
        let mut out = vec![zero; full];
        out[..self.k].copy_from_slice(&v[..self.k]);
        out
    }
}

impl<T: Real, M: CumulantModel<T> + ?Sized> CumulantModel<T> for Marginal<'_, M> {
    fn dim(&self) -> usize {
        self.k
    }

    fn check_domain(&self, theta: &[T]) -> Result<()> {
        check_len(self.k, theta)?;
        self.inner.check_domain(&self.pad(theta, T::zero(), self.inner.dim()))
    }

    fn cgf(&self, theta: &[T]) -> T {
        self.inner.cgf(&self.pad(theta, T::zero(), self.inner.dim()))
    }

    fn cgf_complex(&self, z: &[Complex<T>]) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        self.inner.cgf_complex(&self.pad(z, zero, self.inner.dim()))
    }

    fn grad(&self, theta: &[T]) -> Vec<T> {
        let mut g = self.inner.grad(&self.pad(theta, T::zero(), self.inner.dim()));
        g.truncate(self.k);
        g
    }

    fn hess(&self, theta: &[T]) -> Matrix<T> {
        self.inner
            .hess(&self.pad(theta, T::zero(), self.inner.dim()))
            .leading_block(self.k)
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) {
        let mut full = vec![T::zero(); self.inner.dim()];
        self.inner.sample_into(rng, &mut full);
        out.copy_from_slice(&full[..self.k]);
    }

    fn sample_tilted_into(&self, theta: &[T], rng: &mut dyn RngCore, out: &mut [T]) {
        let mut full = vec![T::zero(); self.inner.dim()];
        let padded = self.pad(theta, T::zero(), self.inner.dim());
        self.inner.sample_tilted_into(&padded, rng, &mut full);
        out.copy_from_slice(&full[..self.k]);
    }

    fn integrability(&self) -> Integrability<T> {
        self.inner.integrability()
    }
}
