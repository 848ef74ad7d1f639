//! Saddle-point importance-sampling estimators of the density of X̄ₙ, of
//! tail probabilities P(X̄ₙ ∈ 𝒜), and of the expected overshoot
//! E[(Sₙ − nx₀)⁺].
//!
//! Each estimator is a deterministic prefactor times the mean of the real
//! parts of complex per-draw weights. Draw `j` uses its own random stream,
//! so results are identical for any number of rayon workers.

use std::time::{Duration, Instant};

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cgf::{CumulantModel, Marginal};
use crate::error::{Error, Result};
use crate::is_density::{choose_parameters, ISDensityParams, ISOverrides, PsiContext};
use crate::real::Real;
use crate::rng::{scenario_id, StreamKey};
use crate::saddlepoint::{
    exact_asymptotic_density, exact_asymptotic_overshoot, overshoot_theta, solve_saddle_point, tail_prefactor,
    SaddlePoint,
};
use crate::tail_sets::{Sign, TailSet};

const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationSettings {
    pub draws: usize,
    pub seed: u64,
    /// Label hashed into the stream key, so scenarios sharing a seed still
    /// draw independent numbers.
    pub scenario: String,
    /// Average each weight with its mirror image at −v.
    pub antithetic: bool,
}

impl SimulationSettings {
    pub fn new(draws: usize, seed: u64, scenario: impl Into<String>) -> Self {
        Self {
            draws,
            seed,
            scenario: scenario.into(),
            antithetic: false,
        }
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    fn key(&self) -> StreamKey {
        StreamKey::new(self.seed, scenario_id(&self.scenario))
    }
}

/// Runs `draw` once per index on the current rayon pool. The output order
/// is the index order.
pub(crate) fn simulate<R, F>(settings: &SimulationSettings, draw: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<R> + Sync,
{
    if settings.draws < 2 {
        return Err(Error::TooFewSamples(settings.draws));
    }
    let key = settings.key();
    (0..settings.draws as u64)
        .into_par_iter()
        .map(|j| draw(&mut key.stream(j)))
        .collect()
}

/// Welford mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RunningStats<T> {
    count: usize,
    mean: T,
    m2: T,
}

impl<T: Real> RunningStats<T> {
    pub(crate) fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / T::from_usize_lossy(self.count);
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn mean(&self) -> T {
        self.mean
    }

    /// Sample variance (N − 1 denominator).
    pub(crate) fn variance(&self) -> T {
        if self.count < 2 {
            T::zero()
        } else {
            (self.m2 / T::from_usize_lossy(self.count - 1)).max(T::zero())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<T> {
    pub estimate: T,
    /// Deterministic factor multiplying the mean weight; 1 for plain
    /// averages.
    pub prefactor: T,
    pub weight_mean: T,
    /// Sample variance of the real parts of the weights.
    pub weight_variance: T,
    /// prefactor² × weight variance: per-draw variance on the estimate's
    /// scale, comparable across methods.
    pub scaled_variance: T,
    /// 1.96·√(weight variance / N)·prefactor.
    pub ci_half_width: T,
    /// Per-draw std / mean; `None` when the mean is zero.
    pub cov: Option<T>,
    pub mean_imag: T,
    pub imag_variance: T,
    pub draws: usize,
    pub n: usize,
    pub seed: u64,
    pub wall_time: Duration,
    pub notes: Vec<String>,
}

impl<T: Real> EstimateReport<T> {
    pub fn std_error(&self) -> T {
        self.prefactor * (self.weight_variance / T::from_usize_lossy(self.draws)).sqrt()
    }

    /// Sample second moment of the real weights.
    pub fn weight_second_moment(&self) -> T {
        let nn = T::from_usize_lossy(self.draws);
        self.weight_variance * (nn - T::one()) / nn + self.weight_mean * self.weight_mean
    }

    /// Second moment of the weight divided by its sample mean, 1 + CoV²
    /// up to the N/(N−1) factor.
    pub fn normalized_second_moment(&self) -> Option<T> {
        (self.weight_mean != T::zero()).then(|| self.weight_second_moment() / (self.weight_mean * self.weight_mean))
    }

    pub fn per_sample_time(&self) -> Duration {
        self.wall_time / self.draws.max(1) as u32
    }
}

/// Statistics of complex weights: estimate = prefactor × mean real part.
pub fn aggregate<T: Real>(weights: &[Complex<T>], prefactor: T) -> Result<EstimateReport<T>> {
    if weights.len() < 2 {
        return Err(Error::TooFewSamples(weights.len()));
    }
    let mut re = RunningStats::default();
    let mut im = RunningStats::default();
    for w in weights {
        re.push(w.re);
        im.push(w.im);
    }
    let nn = T::from_usize_lossy(weights.len());
    let var = re.variance();
    let mean = re.mean();
    Ok(EstimateReport {
        estimate: prefactor * mean,
        prefactor,
        weight_mean: mean,
        weight_variance: var,
        scaled_variance: prefactor * prefactor * var,
        ci_half_width: T::lit(Z95) * (var / nn).sqrt() * prefactor.abs(),
        cov: (mean != T::zero()).then(|| var.sqrt() / mean.abs()),
        mean_imag: im.mean(),
        imag_variance: im.variance(),
        draws: weights.len(),
        n: 0,
        seed: 0,
        wall_time: Duration::ZERO,
        notes: Vec::new(),
    })
}

pub(crate) fn finish<T>(
    mut report: EstimateReport<T>,
    n: usize,
    settings: &SimulationSettings,
    start: Instant,
) -> EstimateReport<T> {
    report.n = n;
    report.seed = settings.seed;
    report.wall_time = start.elapsed();
    report
}

fn check_params<T>(params: &ISDensityParams<T>, d: usize) -> Result<()> {
    if params.d != d {
        return Err(Error::Dimension {
            expected: d,
            got: params.d,
        });
    }
    Ok(())
}

/// Draws V ~ g and returns `f(V)`, averaged with `f(−V)` when antithetic.
fn is_draw<T: Real>(
    params: &ISDensityParams<T>,
    antithetic: bool,
    rng: &mut ChaCha8Rng,
    f: impl Fn(&[T]) -> Complex<T>,
) -> Complex<T> {
    let mut v = params.sample(rng);
    let w = f(&v);
    if !antithetic {
        return w;
    }
    v.iter_mut().for_each(|x| *x = -*x);
    (w + f(&v)) * T::lit(0.5)
}

/// Density of X̄ₙ at x₀.
pub fn estimate_density<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    x0: &[T],
    n: usize,
    params: &ISDensityParams<T>,
    settings: &SimulationSettings,
) -> Result<EstimateReport<T>> {
    let start = Instant::now();
    let gamma = model.integrability().gamma;
    if n < gamma {
        return Err(Error::Parameter(format!(
            "density of the mean needs n >= {gamma} for this model, got n = {n}"
        )));
    }
    check_params(params, model.dim())?;
    let sp = solve_saddle_point(model, x0, None)?;
    let ctx = PsiContext::new(model, &sp, n)?;
    let weights = simulate(settings, |rng| {
        Ok(is_draw(params, settings.antithetic, rng, |v| ctx.weight(params, v)))
    })?;
    let report = aggregate(&weights, exact_asymptotic_density(&sp, n))?;
    Ok(finish(report, n, settings, start))
}

/// The model and set the SP-IS tail estimator actually runs on: a partial
/// orthant becomes a full orthant for the marginal of its constrained
/// coordinates.
fn with_reduced<T: Real, M: CumulantModel<T> + ?Sized, R>(
    model: &M,
    set: &TailSet<T>,
    run: impl FnOnce(&dyn CumulantModel<T>, &TailSet<T>) -> Result<R>,
) -> Result<R> {
    let x0 = set
        .x0()
        .ok_or_else(|| Error::Unsupported("a signed combination is estimated term by term (estimate_signed)".into()))?;
    if x0.len() != model.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            got: x0.len(),
        });
    }
    match set {
        TailSet::PartialOrthant { dims, .. } => {
            if *dims == 0 {
                return Err(Error::Unsupported(
                    "a partial orthant with no constrained coordinate is the whole space".into(),
                ));
            }
            let marginal = Marginal::new(model, *dims)?;
            run(&marginal, &TailSet::full_orthant(x0[..*dims].to_vec()))
        }
        _ => run(&ForwardModel(model), set),
    }
}

/// Lets a possibly unsized model be passed as `&dyn CumulantModel`.
#[derive(Debug)]
struct ForwardModel<'a, M: ?Sized>(&'a M);

impl<T: Real, M: CumulantModel<T> + ?Sized> CumulantModel<T> for ForwardModel<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn check_domain(&self, theta: &[T]) -> Result<()> {
        self.0.check_domain(theta)
    }
    fn cgf(&self, theta: &[T]) -> T {
        self.0.cgf(theta)
    }
    fn cgf_complex(&self, z: &[Complex<T>]) -> Complex<T> {
        self.0.cgf_complex(z)
    }
    fn grad(&self, theta: &[T]) -> Vec<T> {
        self.0.grad(theta)
    }
    fn hess(&self, theta: &[T]) -> crate::linalg::Matrix<T> {
        self.0.hess(theta)
    }
    fn sample_into(&self, rng: &mut dyn rand::RngCore, out: &mut [T]) {
        self.0.sample_into(rng, out)
    }
    fn sample_tilted_into(&self, theta: &[T], rng: &mut dyn rand::RngCore, out: &mut [T]) {
        self.0.sample_tilted_into(theta, rng, out)
    }
    fn density(&self, x: T) -> Option<T> {
        self.0.density(x)
    }
    fn integrability(&self) -> crate::cgf::Integrability<T> {
        self.0.integrability()
    }
}

/// Saddle point of the (possibly reduced) tail problem.
pub fn tail_saddle_point<T: Real, M: CumulantModel<T> + ?Sized>(model: &M, set: &TailSet<T>) -> Result<SaddlePoint<T>> {
    with_reduced(model, set, |m, s| {
        let sp = solve_saddle_point(m, s.x0().expect("reduced set has x0"), None)?;
        s.rates(&sp)?;
        Ok(sp)
    })
}

/// The exact-asymptotic tail probability. A partial orthant is evaluated on
/// its marginal, so its trailing x₀ coordinates are irrelevant.
pub fn tail_asymptotic<T: Real, M: CumulantModel<T> + ?Sized>(model: &M, set: &TailSet<T>, n: usize) -> Result<T> {
    with_reduced(model, set, |m, s| {
        let sp = solve_saddle_point(m, s.x0().expect("reduced set has x0"), None)?;
        Ok(tail_prefactor(&sp, s.c_constant(&sp, n)?, n))
    })
}

/// P(X̄ₙ ∈ 𝒜) for a set with a dominating point.
pub fn estimate_tail<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    set: &TailSet<T>,
    n: usize,
    params: &ISDensityParams<T>,
    settings: &SimulationSettings,
) -> Result<EstimateReport<T>> {
    let start = Instant::now();
    with_reduced(model, set, |m, s| {
        let sp = solve_saddle_point(m, s.x0().expect("reduced set has x0"), None)?;
        let rates = s.rates(&sp)?;
        check_params(params, sp.dim())?;
        let prefactor = tail_prefactor(&sp, s.c_constant(&sp, n)?, n);
        let ctx = PsiContext::new(m, &sp, n)?;
        let weights = simulate(settings, |rng| {
            Ok(is_draw(params, settings.antithetic, rng, |v| {
                let t = sp.inv_sqrt.mul_vec(v);
                s.rho_with_rates(&rates, n, &t) * ctx.weight(params, v)
            }))
        })?;
        let report = aggregate(&weights, prefactor)?;
        Ok(finish(report, n, settings, start))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OvershootReport<T> {
    pub overshoot: EstimateReport<T>,
    /// P(Sₙ > nx₀) from the same draws.
    pub tail: EstimateReport<T>,
    pub ratio: T,
    /// Delta-method standard error of `ratio`, including the covariance
    /// of the two weight sequences.
    pub ratio_std_error: T,
    /// 1/θ*.
    pub ratio_limit: T,
}

/// E[(Sₙ − nx₀)⁺] for a one-dimensional model.
pub fn estimate_overshoot<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    x0: T,
    n: usize,
    params: &ISDensityParams<T>,
    settings: &SimulationSettings,
) -> Result<OvershootReport<T>> {
    let start = Instant::now();
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            what: "expected overshoot",
            got: model.dim(),
        });
    }
    check_params(params, 1)?;
    let sp = solve_saddle_point(model, &[x0], None)?;
    let theta = overshoot_theta(&sp)?;
    let nn = T::from_usize_lossy(n);
    let lambda = nn.sqrt() * theta;
    let tail_pref = tail_prefactor(&sp, T::one() / lambda, n);
    let over_pref = exact_asymptotic_overshoot(&sp, n)?;
    let a = sp.inv_sqrt[(0, 0)];
    let ctx = PsiContext::new(model, &sp, n)?;
    let one = Complex::new(T::one(), T::zero());
    let pairs = simulate(settings, |rng| {
        let pair = |v: &[T]| {
            let rho = one / Complex::new(T::one(), a * v[0] / lambda);
            let w = ctx.weight(params, v);
            (rho * w, rho * rho * w)
        };
        let mut v = params.sample(rng);
        let (mut t, mut o) = pair(&v);
        if settings.antithetic {
            v[0] = -v[0];
            let (t2, o2) = pair(&v);
            t = (t + t2) * T::lit(0.5);
            o = (o + o2) * T::lit(0.5);
        }
        Ok((t, o))
    })?;
    let tails: Vec<Complex<T>> = pairs.iter().map(|p| p.0).collect();
    let overs: Vec<Complex<T>> = pairs.iter().map(|p| p.1).collect();
    let tail = finish(aggregate(&tails, tail_pref)?, n, settings, start);
    let overshoot = finish(aggregate(&overs, over_pref)?, n, settings, start);

    // Welford co-moment of the real parts.
    let (mut mt, mut mo, mut c) = (T::zero(), T::zero(), T::zero());
    for (k, (t, o)) in pairs.iter().enumerate() {
        let kk = T::from_usize_lossy(k + 1);
        let dt = t.re - mt;
        mt += dt / kk;
        mo += (o.re - mo) / kk;
        c += dt * (o.re - mo);
    }
    let draws = T::from_usize_lossy(pairs.len());
    let cov = c / (draws - T::one());
    let ratio = overshoot.estimate / tail.estimate;
    let rel_var = (overshoot.weight_variance / (mo * mo) + tail.weight_variance / (mt * mt)
        - T::lit(2.0) * cov / (mo * mt))
        / draws;
    Ok(OvershootReport {
        ratio,
        ratio_std_error: ratio.abs() * rel_var.max(T::zero()).sqrt(),
        ratio_limit: T::one() / theta,
        overshoot,
        tail,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignedEstimate<T> {
    pub terms: Vec<(Sign, EstimateReport<T>)>,
    pub estimate: T,
    /// Variance of the combined estimate, Σ scaled varianceₖ / Nₖ.
    pub variance: T,
    pub ci_half_width: T,
}

pub fn combine_signed<T: Real>(terms: Vec<(Sign, EstimateReport<T>)>) -> SignedEstimate<T> {
    let estimate = terms.iter().map(|(s, r)| s.value::<T>() * r.estimate).sum();
    let variance: T = terms
        .iter()
        .map(|(_, r)| r.scaled_variance / T::from_usize_lossy(r.draws))
        .sum();
    SignedEstimate {
        terms,
        estimate,
        variance,
        ci_half_width: T::lit(Z95) * variance.sqrt(),
    }
}

/// Runs SP-IS on every term of a signed combination, each with its own
/// saddle point, IS parameters for its effective dimension, and stream
/// label `scenario#k`.
pub fn estimate_signed<T: Real, M: CumulantModel<T> + ?Sized>(
    model: &M,
    set: &TailSet<T>,
    n: usize,
    overrides: &ISOverrides<T>,
    settings: &SimulationSettings,
) -> Result<SignedEstimate<T>> {
    let TailSet::SignedCombination(terms) = set else {
        return Err(Error::Unsupported("estimate_signed needs a signed combination".into()));
    };
    let mut reports = Vec::with_capacity(terms.len());
    for (k, (sign, term)) in terms.iter().enumerate() {
        let (params, notes) = choose_parameters(n, term.effective_dim(), overrides)?;
        let term_settings = SimulationSettings {
            scenario: format!("{}#{k}", settings.scenario),
            ..settings.clone()
        };
        let mut report = estimate_tail(model, term, n, &params, &term_settings)?;
        report.notes.extend(notes);
        reports.push((*sign, report));
    }
    Ok(combine_signed(reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::Family;
    use crate::special::gamma_q;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn aggregate_examples() {
        let r = aggregate(&[c(1.0); 10], 2.0).unwrap();
        assert_eq!((r.weight_variance, r.cov, r.estimate), (0.0, Some(0.0), 2.0));
        let r = aggregate(&[c(0.0), c(2.0)], 1.0).unwrap();
        assert_eq!((r.weight_mean, r.weight_variance), (1.0, 2.0));
        assert!(matches!(aggregate::<f64>(&[], 1.0), Err(Error::TooFewSamples(0))));
        let r = aggregate(&[c(0.0), c(0.0)], 1.0).unwrap();
        assert_eq!(r.cov, None);
    }

    #[test]
    fn aggregate_normal_weights() {
        let settings = SimulationSettings::new(1_000_000, 1, "normal");
        let w = simulate(&settings, |rng| Ok(c(f64::sample_standard_normal(rng)))).unwrap();
        let r = aggregate(&w, 1.0).unwrap();
        assert!((r.weight_variance - 1.0).abs() < 0.01);
        assert_relative_eq!(r.ci_half_width, 1.96 * (r.weight_variance / 1e6).sqrt());
    }

    #[test]
    fn aggregation_keeps_precision_near_one() {
        let w: Vec<Complex<f64>> = (0..1000)
            .map(|k| c(1e8 + if k % 2 == 0 { 1e-4 } else { -1e-4 }))
            .collect();
        let r = aggregate(&w, 1.0).unwrap();
        assert_relative_eq!(r.weight_variance, 1e-8 * 1000.0 / 999.0, max_relative = 1e-4);
    }

    fn exp1() -> Family<f64> {
        Family::exponential(1.0).unwrap()
    }

    fn p1() -> ISDensityParams<f64> {
        ISDensityParams::new(1, 2.0, 2.0, 0.9).unwrap()
    }

    #[test]
    fn n_equal_one_oracles() {
        let m = exp1();
        let set = TailSet::full_orthant(vec![1.5]);
        let s = SimulationSettings::new(200_000, 17, "n1-tail");
        let r = estimate_tail(&m, &set, 1, &p1(), &s).unwrap();
        let truth = (-1.5f64).exp();
        assert!(
            (r.estimate - truth).abs() < 3.0 * r.std_error(),
            "{} ± {}",
            r.estimate,
            r.std_error()
        );
        let o = estimate_overshoot(&m, 1.5, 1, &p1(), &s).unwrap();
        assert!((o.overshoot.estimate - truth).abs() < 3.0 * o.overshoot.std_error());
    }

    #[test]
    fn density_respects_integrability() {
        let s = SimulationSettings::new(100, 1, "x");
        assert!(matches!(
            estimate_density(&exp1(), &[1.5], 2, &p1(), &s),
            Err(Error::Parameter(_))
        ));
        let p3 = ISDensityParams::new(3, 4.0, 2.0, 0.9).unwrap();
        assert!(matches!(
            estimate_density(&exp1(), &[1.5], 30, &p3, &s),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn density_close_to_truth() {
        let s = SimulationSettings::new(20_000, 5, "density");
        let r = estimate_density(&exp1(), &[1.5], 30, &p1(), &s).unwrap();
        // 30·Gamma(30, 1) density at 45.
        let truth = 0.085_210_604_9;
        assert!((r.estimate - truth).abs() < 4.0 * r.std_error());
        assert!(r.mean_imag.abs() <= 3.0 * (r.imag_variance / 20_000.0).sqrt());
    }

    #[test]
    fn tail_matches_gamma_oracle_and_is_worker_independent() {
        let set = TailSet::full_orthant(vec![1.5]);
        let s = SimulationSettings::new(20_000, 9, "tail");
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_tail(&exp1(), &set, 50, &p1(), &s)).unwrap();
        let b = four.install(|| estimate_tail(&exp1(), &set, 50, &p1(), &s)).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.weight_variance.to_bits(), b.weight_variance.to_bits());
        let truth = gamma_q(50.0, 75.0);
        assert!((a.estimate - truth).abs() < 3.0 * a.std_error());
        assert!(a.cov.unwrap() > 0.2 && a.cov.unwrap() < 0.45);
    }

    #[test]
    fn antithetic_keeps_real_variance() {
        let set = TailSet::full_orthant(vec![1.5]);
        let s = SimulationSettings::new(5_000, 2, "anti");
        let plain = estimate_tail(&exp1(), &set, 50, &p1(), &s).unwrap();
        let anti = estimate_tail(&exp1(), &set, 50, &p1(), &s.clone().with_antithetic(true)).unwrap();
        assert!(anti.weight_variance <= plain.weight_variance * (1.0 + 1e-12));
        assert!(anti.mean_imag.abs() < 1e-15);
    }

    #[test]
    fn partial_orthant_on_independent_coordinates() {
        // P(X̄₁ ≥ 1.5) does not depend on the free second coordinate.
        let m = Family::iid(exp1(), 2).unwrap();
        let set = TailSet::partial_orthant(vec![1.5, 7.0], 1).unwrap();
        let s = SimulationSettings::new(20_000, 4, "partial");
        let r = estimate_tail(&m, &set, 20, &p1(), &s).unwrap();
        let truth = gamma_q(20.0, 30.0);
        assert!((r.estimate - truth).abs() < 3.0 * r.std_error());
        let one_d = tail_asymptotic(&exp1(), &TailSet::full_orthant(vec![1.5]), 20).unwrap();
        assert_relative_eq!(tail_asymptotic(&m, &set, 20).unwrap(), one_d, max_relative = 1e-12);
        let whole = TailSet::partial_orthant(vec![1.5, 1.0], 0).unwrap();
        assert!(estimate_tail(&m, &whole, 20, &p1(), &s).is_err());
    }

    #[test]
    fn overshoot_errors() {
        let s = SimulationSettings::new(100, 1, "x");
        assert!(matches!(
            estimate_overshoot(&exp1(), 0.5, 10, &p1(), &s),
            Err(Error::NotTailEvent { .. })
        ));
        let m = Family::iid(exp1(), 2).unwrap();
        assert!(matches!(
            estimate_overshoot(&m, 1.5, 10, &p1(), &s),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn combine_signed_adds_variances() {
        let mut a = aggregate(&[c(1.0), c(3.0)], 1.0).unwrap();
        let b = aggregate(&[c(0.5), c(0.5), c(0.5), c(0.5)], 1.0).unwrap();
        a.draws = 2;
        let s = combine_signed(vec![(Sign::Plus, a.clone()), (Sign::Minus, b)]);
        assert_relative_eq!(s.estimate, 1.5);
        assert_relative_eq!(s.variance, a.scaled_variance / 2.0);
    }
}
