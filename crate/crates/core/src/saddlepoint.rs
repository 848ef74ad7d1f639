//! Saddle point θ* solving Λ′(θ) = x₀, the whitening matrix
//! A = Λ″(θ*)^{−1/2}, and the deterministic exact-asymptotic prefactors.

use crate::cgf::CumulantModel;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, norm, Matrix};
use crate::real::Real;
use crate::tail_sets::TailSet;

const MAX_ITERATIONS: usize = 200;
const MIN_STEP_EXP: i32 = 30;
const POLISH_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint<T> {
    pub theta: Vec<T>,
    pub x0: Vec<T>,
    /// Λ(θ*).
    pub cgf: T,
    /// Λ″(θ*).
    pub hessian: Matrix<T>,
    /// Λ″(θ*)^{−1/2}, symmetric.
    pub inv_sqrt: Matrix<T>,
    pub det: T,
    pub kappa_min: T,
    pub kappa_max: T,
    /// ‖Λ′(θ*) − x₀‖.
    pub residual: T,
}

impl<T: Real> SaddlePoint<T> {
    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Large-deviation exponent θ*·x₀ − Λ(θ*).
    pub fn rate(&self) -> T {
        dot(&self.theta, &self.x0) - self.cgf
    }

    /// Completes a saddle point from θ*, x₀, Λ(θ*) and the Hessian.
    pub fn from_parts(theta: Vec<T>, x0: Vec<T>, cgf: T, hessian: Matrix<T>, residual: T) -> Result<Self> {
        let eig = hessian.symmetric_eigen();
        let (kmin, kmax) = (eig.min(), eig.max());
        if !(kmax > T::zero()) || !(kmin > T::lit(1e-12) * kmax) {
            return Err(Error::DegenerateSaddle {
                min_eigenvalue: kmin.to_f64().unwrap_or(f64::NAN),
                max_eigenvalue: kmax.to_f64().unwrap_or(f64::NAN),
            });
        }
        let inv_sqrt = eig.map(|l| T::one() / l.sqrt());
        let det = eig.values.iter().copied().fold(T::one(), |a, b| a * b);
        Ok(Self {
            theta,
            x0,
            cgf,
            hessian,
            inv_sqrt,
            det,
            kappa_min: kmin,
            kappa_max: kmax,
            residual,
        })
    }

    /// The saddle point of the marginal on the leading `k` coordinates,
    /// valid when θ*ᵢ = 0 for i ≥ k.
    pub fn leading(&self, k: usize) -> Result<Self> {
        Self::from_parts(
            self.theta[..k].to_vec(),
            self.x0[..k].to_vec(),
            self.cgf,
            self.hessian.leading_block(k),
            self.residual,
        )
    }
}

/// Damped Newton iteration on θ ↦ Λ′(θ) − x₀.
///
/// Each step starts at the full Newton step and halves until the iterate is
/// inside the domain and the residual norm decreases.
pub fn solve_saddle_point<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    x0: &[T],
    init: Option<&[T]>,
) -> Result<SaddlePoint<T>> {
    let d = model.dim();
    if x0.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: x0.len(),
        });
    }
    let mut theta = init.map_or_else(|| vec![T::zero(); d], <[T]>::to_vec);
    if theta.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: theta.len(),
        });
    }
    model.check_domain(&theta)?;

    let tol = T::tol(1e-10) * (T::one() + norm(x0));
    let min_step = T::lit(2f64.powi(-MIN_STEP_EXP));
    let residual_of = |th: &[T]| -> Vec<T> { model.grad(th).iter().zip(x0).map(|(&g, &x)| g - x).collect() };
    let mut r = residual_of(&theta);
    let mut rnorm = norm(&r);
    let mut iterations = 0;
    while rnorm > tol {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: rnorm.to_f64().unwrap_or(f64::NAN),
            });
        }
        iterations += 1;
        let h = model.hess(&theta);
        let l = h.cholesky().ok_or_else(|| {
            let eig = h.symmetric_eigen();
            Error::DegenerateSaddle {
                min_eigenvalue: eig.min().to_f64().unwrap_or(f64::NAN),
                max_eigenvalue: eig.max().to_f64().unwrap_or(f64::NAN),
            }
        })?;
        let step = cholesky_solve(&l, &r);
        let mut t = T::one();
        loop {
            let cand: Vec<T> = theta.iter().zip(&step).map(|(&a, &s)| a - t * s).collect();
            if model.in_domain(&cand) {
                let rc = residual_of(&cand);
                let nc = norm(&rc);
                if nc < rnorm {
                    theta = cand;
                    r = rc;
                    rnorm = nc;
                    break;
                }
            }
            t *= T::lit(0.5);
            if t < min_step {
                return Err(Error::SaddleNotInDomain {
                    residual: rnorm.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    // Newton converges quadratically here, so a few more full steps take
    // the residual to rounding level; keep them only while they help.
    for _ in 0..POLISH_STEPS {
        let Some(l) = model.hess(&theta).cholesky() else { break };
        let step = cholesky_solve(&l, &r);
        let cand: Vec<T> = theta.iter().zip(&step).map(|(&a, &s)| a - s).collect();
        if !model.in_domain(&cand) {
            break;
        }
        let rc = residual_of(&cand);
        let nc = norm(&rc);
        if nc.is_nan() || nc >= rnorm {
            break;
        }
        theta = cand;
        r = rc;
        rnorm = nc;
    }
    log::trace!("saddle point solved in {iterations} iterations, residual {rnorm}");
    SaddlePoint::from_parts(theta.clone(), x0.to_vec(), model.cgf(&theta), model.hess(&theta), rnorm)
}

/// θ with Λ′(θ) = m for a one-dimensional model: the same damped Newton
/// iteration without building a [`SaddlePoint`]. Used inside per-step
/// sampling loops.
pub fn solve_scalar_tilt<T: Real, M: CumulantModel<T> + ?Sized>(model: &M, m: T, init: T) -> Result<T> {
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            what: "scalar tilt",
            got: model.dim(),
        });
    }
    let tol = T::tol(1e-10) * (T::one() + m.abs());
    let min_step = T::lit(2f64.powi(-MIN_STEP_EXP));
    let mut theta = init;
    model.check_domain(&[theta])?;
    let mut r = model.grad(&[theta])[0] - m;
    for _ in 0..MAX_ITERATIONS {
        if r.abs() <= tol {
            return Ok(theta);
        }
        let h = model.hess(&[theta])[(0, 0)];
        if !(h > T::zero()) {
            return Err(Error::DegenerateSaddle {
                min_eigenvalue: h.to_f64().unwrap_or(f64::NAN),
                max_eigenvalue: h.to_f64().unwrap_or(f64::NAN),
            });
        }
        let step = r / h;
        let mut t = T::one();
        loop {
            let cand = theta - t * step;
            if model.in_domain(&[cand]) {
                let rc = model.grad(&[cand])[0] - m;
                if rc.abs() < r.abs() {
                    theta = cand;
                    r = rc;
                    break;
                }
            }
            t *= T::lit(0.5);
            if t < min_step {
                return Err(Error::SaddleNotInDomain {
                    residual: r.abs().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: r.abs().to_f64().unwrap_or(f64::NAN),
    })
}

/// (n/2π)^{d/2} e^{n(Λ(θ*) − θ*·x₀)} / √det Λ″(θ*): leading-order density
/// of the sample mean at x₀.
pub fn exact_asymptotic_density<T: Real>(sp: &SaddlePoint<T>, n: usize) -> T {
    let nn = T::from_usize_lossy(n);
    let d = T::from_usize_lossy(sp.dim());
    let log = T::lit(0.5) * d * (nn / (T::lit(2.0) * T::PI())).ln() - nn * sp.rate();
    log.exp() / sp.det.sqrt()
}

/// (2π)^{−d/2} c(n, θ*, x₀) e^{−n(θ*·x₀ − Λ(θ*))} / √det Λ″(θ*): leading-order
/// probability of the tail set. For a partial orthant the dimension and
/// determinant are those of the constrained coordinates.
pub fn exact_asymptotic_tail<T: Real>(sp: &SaddlePoint<T>, set: &TailSet<T>, n: usize) -> Result<T> {
    let c = set.c_constant(sp, n)?;
    let reduced = set.effective_saddle(sp)?;
    Ok(tail_prefactor(&reduced, c, n))
}

pub(crate) fn tail_prefactor<T: Real>(sp: &SaddlePoint<T>, c: T, n: usize) -> T {
    let nn = T::from_usize_lossy(n);
    let d = T::from_usize_lossy(sp.dim());
    let log = -T::lit(0.5) * d * (T::lit(2.0) * T::PI()).ln() - nn * sp.rate();
    c * log.exp() / sp.det.sqrt()
}

/// (2πn)^{−1/2} e^{−n(θ*x₀ − Λ(θ*))} / (θ*² √Λ″(θ*)): leading-order expected
/// overshoot E[(Sₙ − nx₀)⁺] in one dimension.
pub fn exact_asymptotic_overshoot<T: Real>(sp: &SaddlePoint<T>, n: usize) -> Result<T> {
    let theta = overshoot_theta(sp)?;
    let nn = T::from_usize_lossy(n);
    let log = -T::lit(0.5) * (T::lit(2.0) * T::PI() * nn).ln() - nn * sp.rate();
    Ok(log.exp() / (theta * theta * sp.det.sqrt()))
}

/// Limit of overshoot / tail probability, 1/θ*.
pub fn overshoot_ratio_limit<T: Real>(sp: &SaddlePoint<T>) -> Result<T> {
    overshoot_theta(sp).map(|t| T::one() / t)
}

pub(crate) fn overshoot_theta<T: Real>(sp: &SaddlePoint<T>) -> Result<T> {
    if sp.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            what: "expected overshoot",
            got: sp.dim(),
        });
    }
    let theta = sp.theta[0];
    if !(theta > T::zero()) {
        return Err(Error::NotTailEvent {
            theta: theta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(theta)
}
