//! The importance-sampling density gₙ on the whitened Fourier variable and
//! the integrand ψ it is paired with.
//!
//! gₙ(v) = b·φ_d(v) for |v| < a and C·|v|^{−α} for |v| ≥ a, so the core
//! carries mass p = b·IG(d/2, a²/2) and the power-law tail carries 1 − p.

use num_complex::Complex;
use rand::RngCore;

use crate::cgf::CumulantModel;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::real::Real;
use crate::saddlepoint::SaddlePoint;
use crate::special::{gamma_p, ln_std_normal_pdf, unit_sphere_area};

const PSI_EXPONENT_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ISDensityParams<T> {
    pub d: usize,
    pub alpha: T,
    /// Core radius a.
    pub radius: T,
    /// Core scale b.
    pub core_scale: T,
    /// Core mass p = b·IG(d/2, a²/2).
    pub core_mass: T,
    /// C = (1 − p)(α − d) / (S_{d−1} a^{d−α}).
    pub tail_constant: T,
    /// IG(d/2, a²/2), the standard normal mass inside the core.
    pub normal_core_mass: T,
}

impl<T: Real> ISDensityParams<T> {
    /// Parameters from the core mass p.
    pub fn new(d: usize, alpha: T, radius: T, core_mass: T) -> Result<Self> {
        let ig = Self::check_shape(d, alpha, radius)?;
        if !(core_mass > T::zero() && core_mass < T::one()) {
            return Err(Error::Parameter(format!(
                "core mass p = {core_mass} must lie in (0, 1)"
            )));
        }
        Ok(Self::build(d, alpha, radius, core_mass / ig, ig))
    }

    /// Parameters from the core scale b; requires 0 < b < 1/IG(d/2, a²/2).
    pub fn from_core_scale(d: usize, alpha: T, radius: T, core_scale: T) -> Result<Self> {
        let ig = Self::check_shape(d, alpha, radius)?;
        if !(core_scale > T::zero() && core_scale * ig < T::one()) {
            return Err(Error::Parameter(format!(
                "core scale b = {core_scale} must lie in (0, 1/IG) = (0, {})",
                T::one() / ig
            )));
        }
        Ok(Self::build(d, alpha, radius, core_scale, ig))
    }

    /// The vanishing-tail schedule bₙ = 1 − n^{−ξ}.
    pub fn with_schedule(d: usize, alpha: T, radius: T, n: usize, xi: T) -> Result<Self> {
        if !(xi > T::zero()) {
            return Err(Error::Parameter(format!(
                "schedule exponent xi = {xi} must be positive"
            )));
        }
        let b = T::one() - T::from_usize_lossy(n).powf(-xi);
        Self::from_core_scale(d, alpha, radius, b)
    }

    fn check_shape(d: usize, alpha: T, radius: T) -> Result<T> {
        if d == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if !(alpha > T::from_usize_lossy(d)) || !alpha.is_finite() {
            return Err(Error::Parameter(format!(
                "tail not normalizable: alpha = {alpha} must exceed d = {d}"
            )));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Parameter(format!("core radius a = {radius} must be positive")));
        }
        Ok(gamma_p(
            T::from_usize_lossy(d) * T::lit(0.5),
            radius * radius * T::lit(0.5),
        ))
    }

    fn build(d: usize, alpha: T, radius: T, b: T, ig: T) -> Self {
        let p = b * ig;
        let dd = T::from_usize_lossy(d);
        let tail_integral = unit_sphere_area::<T>(d) * radius.powf(dd - alpha) / (alpha - dd);
        Self {
            d,
            alpha,
            radius,
            core_scale: b,
            core_mass: p,
            tail_constant: (T::one() - p) / tail_integral,
            normal_core_mass: ig,
        }
    }

    pub fn ln_pdf(&self, v: &[T]) -> T {
        let r2 = dot(v, v);
        if r2 < self.radius * self.radius {
            self.core_scale.ln() + ln_std_normal_pdf(self.d, r2)
        } else {
            self.tail_constant.ln() - self.alpha * T::lit(0.5) * r2.ln()
        }
    }

    pub fn pdf(&self, v: &[T]) -> T {
        self.ln_pdf(v).exp()
    }

    /// One draw from gₙ: a normal conditioned on the core by rejection, or
    /// a power-law radius by inverse CDF with a uniform direction.
    pub fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) {
        debug_assert_eq!(out.len(), self.d);
        let a2 = self.radius * self.radius;
        if T::sample_open01(rng) < self.core_mass {
            loop {
                for x in out.iter_mut() {
                    *x = T::sample_standard_normal(rng);
                }
                if dot(out, out) < a2 {
                    return;
                }
            }
        }
        let u = T::sample_open01(rng);
        let r = self.radius * u.powf(-T::one() / (self.alpha - T::from_usize_lossy(self.d)));
        loop {
            for x in out.iter_mut() {
                *x = T::sample_standard_normal(rng);
            }
            let len = norm(out);
            if len > T::zero() {
                for x in out.iter_mut() {
                    *x = *x * r / len;
                }
                return;
            }
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<T> {
        let mut v = vec![T::zero(); self.d];
        self.sample_into(rng, &mut v);
        v
    }
}

/// Optional overrides for [`choose_parameters`]. `core_scale` and
/// `schedule_xi` take precedence over `core_mass` in that order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ISOverrides<T> {
    pub alpha: Option<T>,
    pub radius: Option<T>,
    pub core_mass: Option<T>,
    pub core_scale: Option<T>,
    pub schedule_xi: Option<T>,
}

/// Practical defaults: α = d + 1, a = 2, p = 0.9 (d = 1) or 0.95 (d ≥ 2).
///
/// An override α ≤ d cannot be normalized; it is replaced by d + 1 and the
/// substitution is returned as a note.
pub fn choose_parameters<T: Real>(
    n: usize,
    d: usize,
    overrides: &ISOverrides<T>,
) -> Result<(ISDensityParams<T>, Vec<String>)> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let dd = T::from_usize_lossy(d);
    let mut notes = Vec::new();
    let mut alpha = overrides.alpha.unwrap_or(dd + T::one());
    if alpha <= dd {
        let msg = format!(
            "alpha = {alpha} <= d = {d} is not normalizable; using alpha = {}",
            dd + T::one()
        );
        log::warn!("{msg}");
        notes.push(msg);
        alpha = dd + T::one();
    }
    let radius = overrides.radius.unwrap_or(T::lit(2.0));
    let params = if let Some(b) = overrides.core_scale {
        ISDensityParams::from_core_scale(d, alpha, radius, b)?
    } else if let Some(xi) = overrides.schedule_xi {
        ISDensityParams::with_schedule(d, alpha, radius, n, xi)?
    } else {
        let p = overrides
            .core_mass
            .unwrap_or_else(|| if d == 1 { T::lit(0.9) } else { T::lit(0.95) });
        ISDensityParams::new(d, alpha, radius, p)?
    };
    Ok((params, notes))
}

/// Everything needed to evaluate ψ(n^{−1/2}A(θ*)v, θ*, n) for one saddle
/// point. The model must have the saddle point's dimension.
#[derive(Debug)]
pub struct PsiContext<'a, T, M: ?Sized> {
    model: &'a M,
    sp: &'a SaddlePoint<T>,
    n: T,
    inv_sqrt_n: T,
    ln_norm: T,
}

impl<'a, T: Real, M: CumulantModel<T> + ?Sized> PsiContext<'a, T, M> {
    pub fn new(model: &'a M, sp: &'a SaddlePoint<T>, n: usize) -> Result<Self> {
        if model.dim() != sp.dim() {
            return Err(Error::Dimension {
                expected: model.dim(),
                got: sp.dim(),
            });
        }
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        model.check_domain(&sp.theta)?;
        let nn = T::from_usize_lossy(n);
        let d = T::from_usize_lossy(sp.dim());
        Ok(Self {
            model,
            sp,
            n: nn,
            inv_sqrt_n: T::one() / nn.sqrt(),
            ln_norm: -T::lit(0.5) * d * (T::lit(2.0) * T::PI()).ln(),
        })
    }

    pub fn saddle(&self) -> &SaddlePoint<T> {
        self.sp
    }

    /// y = n^{−1/2}A(θ*)v.
    pub fn y(&self, v: &[T]) -> Vec<T> {
        self.sp
            .inv_sqrt
            .mul_vec(v)
            .into_iter()
            .map(|x| x * self.inv_sqrt_n)
            .collect()
    }

    /// n·[Λ(θ* + iy) − Λ(θ*) − iy·x₀], i.e. n·log φ_θ*(y).
    fn log_phi_n(&self, y: &[T]) -> Complex<T> {
        let z: Vec<Complex<T>> = self
            .sp
            .theta
            .iter()
            .zip(y)
            .map(|(&t, &yi)| Complex::new(t, yi))
            .collect();
        let l = self.model.cgf_complex(&z) - self.sp.cgf - Complex::new(T::zero(), dot(y, &self.sp.x0));
        l * self.n
    }

    /// n·η(y, θ*).
    pub fn exponent(&self, v: &[T]) -> Complex<T> {
        let y = self.y(v);
        let quad = T::lit(0.5) * self.n * self.sp.hessian.bilinear(&y, &y);
        self.log_phi_n(&y) + quad
    }

    pub fn psi(&self, v: &[T]) -> Result<Complex<T>> {
        let e = self.exponent(v);
        if e.re > T::lit(PSI_EXPONENT_LIMIT) || e.re.is_nan() {
            return Err(Error::PsiOverflow {
                norm_v: norm(v).to_f64().unwrap_or(f64::NAN),
                exponent: e.re.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(e.exp())
    }

    /// exp(|v|²/2)·φ_θ*(y)ⁿ, an independent evaluation path for `psi`.
    pub fn psi_alt(&self, v: &[T]) -> Result<Complex<T>> {
        let e = self.log_phi_n(&self.y(v)) + T::lit(0.5) * dot(v, v);
        if e.re > T::lit(PSI_EXPONENT_LIMIT) || e.re.is_nan() {
            return Err(Error::PsiOverflow {
                norm_v: norm(v).to_f64().unwrap_or(f64::NAN),
                exponent: e.re.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(e.exp())
    }

    /// ψ(v)·φ_d(v)/g(v) evaluated in one exponent. ψ·φ_d equals
    /// (2π)^{−d/2}φ_θ*(y)ⁿ, whose modulus is at most (2π)^{−d/2}, so this
    /// never overflows even where ψ alone would.
    pub fn weight(&self, params: &ISDensityParams<T>, v: &[T]) -> Complex<T> {
        let e = self.log_phi_n(&self.y(v)) + (self.ln_norm - params.ln_pdf(v));
        e.exp()
    }
}
