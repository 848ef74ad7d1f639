//! Reference estimators: naive Monte Carlo, conditional Monte Carlo for
//! densities, optimal state-independent exponential twisting (OET), and
//! state-dependent twisting in one dimension (BGL).
//!
//! All of them simulate the n summands, so their per-draw cost is linear in n.

use std::time::Instant;

use num_complex::Complex;

use crate::cgf::{CumulantModel, Marginal};
use crate::error::{Error, Result};
use crate::estimators::{aggregate, finish, simulate, EstimateReport, SimulationSettings};
use crate::linalg::dot;
use crate::real::Real;
use crate::saddlepoint::{solve_saddle_point, solve_scalar_tilt};
use crate::tail_sets::TailSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Naive,
    Cmc,
    Oet,
    Bgl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineTarget<T> {
    /// Density of X̄ₙ at x₀ (CMC only).
    Density(Vec<T>),
    Tail(TailSet<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig<T> {
    pub kind: BaselineKind,
    pub target: BaselineTarget<T>,
    pub n: usize,
    pub settings: SimulationSettings,
    /// BGL stops updating the twist once the remaining mean reaches this
    /// multiple of x₀.
    pub freeze_multiplier: T,
}

impl<T: Real> BaselineConfig<T> {
    pub fn new(kind: BaselineKind, target: BaselineTarget<T>, n: usize, settings: SimulationSettings) -> Self {
        Self {
            kind,
            target,
            n,
            settings,
            freeze_multiplier: T::lit(2.0),
        }
    }
}

pub fn run_baseline<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    config: &BaselineConfig<T>,
) -> Result<EstimateReport<T>> {
    let (n, s) = (config.n, &config.settings);
    match (config.kind, &config.target) {
        (BaselineKind::Naive, BaselineTarget::Tail(set)) => naive_mc(model, set, n, s),
        (BaselineKind::Cmc, BaselineTarget::Density(x0)) => match x0.as_slice() {
            [x] => cmc_density(model, *x, n, s),
            _ => Err(Error::UnsupportedDimension {
                what: "conditional Monte Carlo",
                got: x0.len(),
            }),
        },
        (BaselineKind::Oet, BaselineTarget::Tail(set)) => oet_tail(model, set, n, s),
        (BaselineKind::Bgl, BaselineTarget::Tail(set)) => match set {
            TailSet::FullOrthant { x0 } if x0.len() == 1 => bgl_tail_1d(model, x0[0], n, s, config.freeze_multiplier),
            _ => Err(Error::Unsupported(
                "BGL needs a one-dimensional full orthant [x0, inf)".into(),
            )),
        },
        (kind, _) => Err(Error::Unsupported(format!("{kind:?} does not apply to this target"))),
    }
}

fn sum_of_draws<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    count: usize,
    rng: &mut dyn rand::RngCore,
    sum: &mut [T],
    buf: &mut [T],
) {
    sum.iter_mut().for_each(|s| *s = T::zero());
    for _ in 0..count {
        model.sample_into(rng, buf);
        sum.iter_mut().zip(buf.iter()).for_each(|(s, &x)| *s += x);
    }
}

/// Indicator average. A signed combination averages Σ ±𝟙.
pub fn naive_mc<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    set: &TailSet<T>,
    n: usize,
    settings: &SimulationSettings,
) -> Result<EstimateReport<T>> {
    let start = Instant::now();
    let d = model.dim();
    if set.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            got: set.dim(),
        });
    }
    check_n(n)?;
    let nn = T::from_usize_lossy(n);
    let weights = simulate(settings, |rng| {
        let (mut sum, mut buf) = (vec![T::zero(); d], vec![T::zero(); d]);
        sum_of_draws(model, n, rng, &mut sum, &mut buf);
        sum.iter_mut().for_each(|s| *s /= nn);
        Ok(Complex::new(set.indicator(&sum), T::zero()))
    })?;
    let mut report = finish(aggregate(&weights, T::one())?, n, settings, start);
    if weights.iter().all(|w| w.re == T::zero()) {
        report.notes.push("no hits".into());
    }
    Ok(report)
}

/// Average of n·f(nx₀ − S_{n−1}) over draws of the first n − 1 summands.
pub fn cmc_density<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    x0: T,
    n: usize,
    settings: &SimulationSettings,
) -> Result<EstimateReport<T>> {
    let start = Instant::now();
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            what: "conditional Monte Carlo",
            got: model.dim(),
        });
    }
    check_n(n)?;
    if model.density(x0).is_none() {
        return Err(Error::Unsupported(
            "conditional Monte Carlo needs a model density".into(),
        ));
    }
    let nn = T::from_usize_lossy(n);
    let weights = simulate(settings, |rng| {
        let (mut sum, mut buf) = ([T::zero()], [T::zero()]);
        sum_of_draws(model, n - 1, rng, &mut sum, &mut buf);
        let f = model.density(nn * x0 - sum[0]).unwrap_or(T::zero());
        Ok(Complex::new(nn * f, T::zero()))
    })?;
    Ok(finish(aggregate(&weights, T::one())?, n, settings, start))
}

/// Every summand tilted by θ*; weight 𝟙(X̄ₙ ∈ 𝒜)·exp(nΛ(θ*) − θ*·Sₙ).
pub fn oet_tail<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    set: &TailSet<T>,
    n: usize,
    settings: &SimulationSettings,
) -> Result<EstimateReport<T>> {
    let start = Instant::now();
    let d = model.dim();
    check_n(n)?;
    let x0 = set
        .x0()
        .ok_or_else(|| Error::Unsupported("OET needs a single dominating point, not a signed combination".into()))?;
    if x0.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: x0.len(),
        });
    }
    let theta = match set {
        TailSet::PartialOrthant { dims, .. } if *dims < d => {
            if *dims == 0 {
                vec![T::zero(); d]
            } else {
                let marginal = Marginal::new(model, *dims)?;
                let sp = solve_saddle_point(&marginal, &x0[..*dims], None)?;
                TailSet::full_orthant(sp.x0.clone()).rates(&sp)?;
                let mut th = sp.theta;
                th.resize(d, T::zero());
                th
            }
        }
        _ => {
            let sp = solve_saddle_point(model, x0, None)?;
            set.rates(&sp)?;
            sp.theta
        }
    };
    let nn = T::from_usize_lossy(n);
    let n_cgf = nn * model.cgf(&theta);
    let weights = simulate(settings, |rng| {
        let (mut sum, mut buf) = (vec![T::zero(); d], vec![T::zero(); d]);
        for _ in 0..n {
            model.sample_tilted_into(&theta, rng, &mut buf);
            sum.iter_mut().zip(&buf).for_each(|(s, &x)| *s += x);
        }
        let log_lr = n_cgf - dot(&theta, &sum);
        sum.iter_mut().for_each(|s| *s /= nn);
        let w = if set.contains(&sum) { log_lr.exp() } else { T::zero() };
        Ok(Complex::new(w, T::zero()))
    })?;
    Ok(finish(aggregate(&weights, T::one())?, n, settings, start))
}

/// Sequential twisting for P(Sₙ ≥ nx₀) in one dimension.
///
/// Before step k + 1 the twist is re-solved so the tilted mean equals the
/// remaining mean (nx₀ − Sₖ)/(n − k). The twist is clamped at θ ≥ 0, it
/// is frozen once the remaining mean reaches `freeze_multiplier`·x₀ or the
/// solve fails, and the original law is used after Sₖ ≥ nx₀.
pub fn bgl_tail_1d<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    x0: T,
    n: usize,
    settings: &SimulationSettings,
    freeze_multiplier: T,
) -> Result<EstimateReport<T>> {
    let start = Instant::now();
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            what: "BGL twisting",
            got: model.dim(),
        });
    }
    check_n(n)?;
    if !(x0 > model.mean()[0]) {
        return Err(Error::NotTailEvent {
            theta: solve_scalar_tilt(model, x0, T::zero()).map_or(f64::NAN, |t| t.to_f64().unwrap_or(f64::NAN)),
        });
    }
    let theta_star = solve_scalar_tilt(model, x0, T::zero())?;
    let target = T::from_usize_lossy(n) * x0;
    let freeze_at = freeze_multiplier * x0;
    let weights = simulate(settings, |rng| {
        let (mut sum, mut log_lr) = (T::zero(), T::zero());
        let mut theta = theta_star;
        let mut frozen = false;
        let mut x = [T::zero()];
        for k in 0..n {
            if sum >= target {
                for _ in k..n {
                    model.sample_into(rng, &mut x);
                    sum += x[0];
                }
                break;
            }
            if !frozen {
                let remaining = (target - sum) / T::from_usize_lossy(n - k);
                if remaining >= freeze_at {
                    frozen = true;
                } else {
                    match solve_scalar_tilt(model, remaining, theta) {
                        Ok(t) => theta = t.max(T::zero()),
                        Err(_) => frozen = true,
                    }
                }
            }
            if theta == T::zero() {
                model.sample_into(rng, &mut x);
            } else {
                model.sample_tilted_into(&[theta], rng, &mut x);
                log_lr += model.cgf(&[theta]) - theta * x[0];
            }
            sum += x[0];
        }
        let w = if sum >= target { log_lr.exp() } else { T::zero() };
        Ok(Complex::new(w, T::zero()))
    })?;
    Ok(finish(aggregate(&weights, T::one())?, n, settings, start))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::Family;
    use crate::special::gamma_q;

    fn exp1() -> Family<f64> {
        Family::exponential(1.0).unwrap()
    }

    fn within(r: &EstimateReport<f64>, truth: f64, k: f64) -> bool {
        (r.estimate - truth).abs() <= k * r.std_error()
    }

    #[test]
    fn naive_examples() {
        let set = TailSet::full_orthant(vec![1.5]);
        let r = naive_mc(&exp1(), &set, 1, &SimulationSettings::new(1_000_000, 1, "naive")).unwrap();
        assert!(within(&r, (-1.5f64).exp(), 3.0));
        let rare = naive_mc(
            &exp1(),
            &TailSet::full_orthant(vec![2.5]),
            30,
            &SimulationSettings::new(10_000, 1, "rare"),
        )
        .unwrap();
        assert_eq!((rare.estimate, rare.ci_half_width, rare.cov), (0.0, 0.0, None));
        assert_eq!(rare.notes, vec!["no hits".to_string()]);
        let m = Family::iid(exp1(), 2).unwrap();
        let all = TailSet::partial_orthant(vec![0.0, 0.0], 0).unwrap();
        let r = naive_mc(&m, &all, 5, &SimulationSettings::new(100, 1, "all")).unwrap();
        assert_eq!((r.estimate, r.weight_variance), (1.0, 0.0));
    }

    #[test]
    fn cmc_examples() {
        let r = cmc_density(&exp1(), 1.5, 1, &SimulationSettings::new(10, 1, "cmc1")).unwrap();
        assert_eq!((r.estimate, r.weight_variance), ((-1.5f64).exp(), 0.0));
        let r = cmc_density(&exp1(), 1.5, 30, &SimulationSettings::new(100_000, 2, "cmc")).unwrap();
        assert!(within(&r, 0.085_210_604_9, 3.0), "{r:?}");
    }

    #[test]
    fn oet_examples() {
        let set = TailSet::full_orthant(vec![1.5]);
        let r = oet_tail(&exp1(), &set, 50, &SimulationSettings::new(50_000, 3, "oet")).unwrap();
        assert!(within(&r, gamma_q(50.0, 75.0), 3.0));
        // Weight on a hit is bounded by exp(n(Λ(θ*) − θ*x₀)).
        let bound = (50.0 * ((1.5f64).ln() - 0.5)).exp();
        let s = SimulationSettings::new(2_000, 4, "oet-bound");
        let w = simulate(&s, |rng| {
            let th = 1.0 / 3.0;
            let mut sum = 0.0;
            for _ in 0..50 {
                let mut x = [0.0];
                exp1().sample_tilted_into(&[th], rng, &mut x);
                sum += x[0];
            }
            Ok(if sum >= 75.0 {
                (50.0 * (1.5f64).ln() - th * sum).exp()
            } else {
                0.0
            })
        })
        .unwrap();
        assert!(w.iter().all(|&x| x <= bound * (1.0 + 1e-12)));
        assert!(oet_tail(&exp1(), &TailSet::full_orthant(vec![0.5]), 5, &s).is_err());
    }

    #[test]
    fn bgl_examples() {
        let s = SimulationSettings::new(20_000, 5, "bgl");
        let one = bgl_tail_1d(&exp1(), 1.5, 1, &s, 2.0).unwrap();
        let oet = oet_tail(&exp1(), &TailSet::full_orthant(vec![1.5]), 1, &s).unwrap();
        assert!((one.estimate - oet.estimate).abs() <= 1e-12 * oet.estimate);
        let r = bgl_tail_1d(&exp1(), 1.5, 50, &s, 2.0).unwrap();
        assert!(within(&r, gamma_q(50.0, 75.0), 3.0));
        assert!(bgl_tail_1d(&exp1(), 0.8, 10, &s, 2.0).is_err());
        let m = Family::iid(exp1(), 2).unwrap();
        assert!(bgl_tail_1d(&m, 1.5, 10, &s, 2.0).is_err());
    }

    #[test]
    fn dispatch_rejects_inadmissible_pairs() {
        let s = SimulationSettings::new(10, 1, "x");
        let cfg = BaselineConfig::new(
            BaselineKind::Cmc,
            BaselineTarget::Tail(TailSet::full_orthant(vec![1.5])),
            5,
            s.clone(),
        );
        assert!(run_baseline(&exp1(), &cfg).is_err());
        let cfg = BaselineConfig::new(BaselineKind::Naive, BaselineTarget::Density(vec![1.5]), 5, s);
        assert!(run_baseline(&exp1(), &cfg).is_err());
    }
}
