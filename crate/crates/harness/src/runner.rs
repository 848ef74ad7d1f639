//! Executes every (target unit, n, N, method) cell of a validated config.

use serde::{Deserialize, Serialize};
use spis_core::{
    choose_parameters, estimate_density, estimate_overshoot, estimate_signed, estimate_tail, exact_asymptotic_density,
    exact_asymptotic_overshoot, run_baseline, solve_saddle_point, tail_asymptotic, BaselineConfig, BaselineTarget,
    EstimateReport, Family, ISOverrides, SimulationSettings, TailSet,
};

use crate::config::{Method, Target, ValidatedConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub method: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub draws: usize,
    pub estimate: Option<f64>,
    pub ci_half_width: Option<f64>,
    /// Per-draw variance on the estimate's scale.
    pub weight_variance: Option<f64>,
    pub cov: Option<f64>,
    pub exact_asymptotic: Option<f64>,
    pub variance_reduction: Option<f64>,
    pub per_sample_time_us: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRow {
    fn new(scenario: String, method: Method, n: usize, draws: usize, seed: u64) -> Self {
        Self {
            scenario,
            method: method.label().to_string(),
            n,
            draws,
            estimate: None,
            ci_half_width: None,
            weight_variance: None,
            cov: None,
            exact_asymptotic: None,
            variance_reduction: None,
            per_sample_time_us: None,
            seed,
            error: None,
        }
    }

    fn fill(&mut self, r: &EstimateReport<f64>) {
        self.estimate = finite(r.estimate);
        self.ci_half_width = finite(r.ci_half_width);
        self.weight_variance = finite(r.scaled_variance);
        self.cov = r.cov.and_then(finite);
        self.per_sample_time_us = finite(r.wall_time.as_secs_f64() * 1e6 / r.draws as f64);
        for note in &r.notes {
            log::info!(
                "{} {} n={} N={}: {note}",
                self.scenario,
                self.method,
                self.n,
                self.draws
            );
        }
    }

    fn fail(&mut self, e: impl std::fmt::Display) {
        log::error!("{} {} n={} N={}: {e}", self.scenario, self.method, self.n, self.draws);
        self.error = Some(e.to_string());
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, thiserror::Error)]
#[error("runtime error: {0}")]
pub struct RunError(pub String);

/// Runs the experiment on a pool of `workers` threads (config value, then
/// the available parallelism). Cells run one after another; the draws of
/// each cell are spread over the pool.
pub fn run_experiment(cfg: &ValidatedConfig, workers: Option<usize>) -> Result<Vec<ResultRow>, RunError> {
    let workers = workers
        .or(cfg.config.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError(e.to_string()))?;
    Ok(pool.install(|| run_cells(cfg)))
}

fn fmt_point(p: &[f64]) -> String {
    p.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

fn run_cells(cfg: &ValidatedConfig) -> Vec<ResultRow> {
    let c = &cfg.config;
    let mut rows = Vec::new();
    let overrides: ISOverrides<f64> = c.is_params.into();
    for &n in &c.ns {
        for &draws in &c.draws {
            let cell = Cell {
                cfg,
                n,
                draws,
                overrides: &overrides,
            };
            match &cfg.target {
                Target::Density(points) => {
                    for p in points {
                        let label = format!("{}@x={}", c.scenario, fmt_point(p));
                        rows.extend(cell.density(&label, p));
                    }
                }
                Target::Tail(set) => rows.extend(cell.tail(&c.scenario, set)),
                Target::Overshoot(thresholds) => {
                    for &t in thresholds {
                        let label = format!("{}@x0={t}", c.scenario);
                        rows.extend(cell.overshoot(&label, t));
                    }
                }
            }
        }
    }
    rows
}

struct Cell<'a> {
    cfg: &'a ValidatedConfig,
    n: usize,
    draws: usize,
    overrides: &'a ISOverrides<f64>,
}

impl Cell<'_> {
    fn model(&self) -> &Family<f64> {
        &self.cfg.model
    }

    fn row(&self, label: &str, method: Method) -> ResultRow {
        ResultRow::new(label.to_string(), method, self.n, self.draws, self.cfg.config.seed)
    }

    fn settings(&self, label: &str, method: Method) -> SimulationSettings {
        SimulationSettings::new(
            self.draws,
            self.cfg.config.seed,
            format!("{label}/{}/n={}", method.label(), self.n),
        )
        .with_antithetic(self.cfg.config.antithetic)
    }

    fn baseline(&self, label: &str, method: Method, target: BaselineTarget<f64>) -> ResultRow {
        let mut row = self.row(label, method);
        let kind = method.baseline().expect("baseline method");
        let mut bc = BaselineConfig::new(kind, target, self.n, self.settings(label, method));
        if let Some(f) = self.cfg.config.freeze_multiplier {
            bc.freeze_multiplier = f;
        }
        match run_baseline(self.model(), &bc) {
            Ok(r) => row.fill(&r),
            Err(e) => row.fail(e),
        }
        row
    }

    fn density(&self, label: &str, x0: &[f64]) -> Vec<ResultRow> {
        let asym = solve_saddle_point(self.model(), x0, None)
            .ok()
            .map(|sp| exact_asymptotic_density(&sp, self.n));
        let mut rows: Vec<ResultRow> = self
            .cfg
            .config
            .methods
            .iter()
            .map(|&m| {
                let mut row = match m {
                    Method::Spis => {
                        let mut row = self.row(label, m);
                        let run = choose_parameters(self.n, x0.len(), self.overrides).and_then(|(p, notes)| {
                            notes.iter().for_each(|s| log::warn!("{label}: {s}"));
                            estimate_density(self.model(), x0, self.n, &p, &self.settings(label, m))
                        });
                        match run {
                            Ok(r) => row.fill(&r),
                            Err(e) => row.fail(e),
                        }
                        row
                    }
                    _ => self.baseline(label, m, BaselineTarget::Density(x0.to_vec())),
                };
                row.exact_asymptotic = asym.and_then(finite);
                row
            })
            .collect();
        self.variance_reduction(&mut rows);
        rows
    }

    fn tail(&self, label: &str, set: &TailSet<f64>) -> Vec<ResultRow> {
        let asym = match set {
            TailSet::SignedCombination(terms) => terms
                .iter()
                .map(|(s, t)| tail_asymptotic(self.model(), t, self.n).map(|a| s.value::<f64>() * a))
                .sum::<spis_core::Result<f64>>()
                .ok(),
            _ => tail_asymptotic(self.model(), set, self.n).ok(),
        };
        let mut term_rows = Vec::new();
        let mut rows: Vec<ResultRow> = Vec::new();
        for &m in &self.cfg.config.methods {
            let mut row = match (m, set) {
                (Method::Spis, TailSet::SignedCombination(terms)) => {
                    let mut row = self.row(label, m);
                    let settings = self.settings(label, m);
                    match estimate_signed(self.model(), set, self.n, self.overrides, &settings) {
                        Ok(s) => {
                            for (k, ((_, r), (_, term))) in s.terms.iter().zip(terms).enumerate() {
                                let mut tr = self.row(&format!("{label}#{k}"), m);
                                tr.fill(r);
                                tr.exact_asymptotic = tail_asymptotic(self.model(), term, self.n).ok().and_then(finite);
                                term_rows.push(tr);
                            }
                            let wall: f64 = s.terms.iter().map(|(_, r)| r.wall_time.as_secs_f64()).sum();
                            row.estimate = finite(s.estimate);
                            row.ci_half_width = finite(s.ci_half_width);
                            row.weight_variance = finite(s.variance * self.draws as f64);
                            row.cov = (s.estimate != 0.0)
                                .then(|| (s.variance * self.draws as f64).sqrt() / s.estimate.abs())
                                .and_then(finite);
                            row.per_sample_time_us = finite(wall * 1e6 / self.draws as f64);
                        }
                        Err(e) => row.fail(e),
                    }
                    row
                }
                (Method::Spis, _) => {
                    let mut row = self.row(label, m);
                    let run = choose_parameters(self.n, set.effective_dim(), self.overrides).and_then(|(p, notes)| {
                        notes.iter().for_each(|s| log::warn!("{label}: {s}"));
                        estimate_tail(self.model(), set, self.n, &p, &self.settings(label, m))
                    });
                    match run {
                        Ok(r) => row.fill(&r),
                        Err(e) => row.fail(e),
                    }
                    row
                }
                _ => self.baseline(label, m, BaselineTarget::Tail(set.clone())),
            };
            row.exact_asymptotic = asym.and_then(finite);
            rows.push(row);
        }
        self.variance_reduction(&mut rows);
        term_rows.extend(rows);
        term_rows
    }

    fn overshoot(&self, label: &str, x0: f64) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for &m in &self.cfg.config.methods {
            if m != Method::Spis {
                continue;
            }
            let mut over = self.row(label, m);
            let mut tail = self.row(&format!("{label}/tail"), m);
            let mut ratio = self.row(&format!("{label}/ratio"), m);
            let sp = solve_saddle_point(self.model(), &[x0], None);
            let run = choose_parameters(self.n, 1, self.overrides)
                .and_then(|(p, _)| estimate_overshoot(self.model(), x0, self.n, &p, &self.settings(label, m)));
            match run {
                Ok(r) => {
                    over.fill(&r.overshoot);
                    tail.fill(&r.tail);
                    ratio.estimate = finite(r.ratio);
                    ratio.ci_half_width = finite(1.96 * r.ratio_std_error);
                    ratio.exact_asymptotic = finite(r.ratio_limit);
                    ratio.per_sample_time_us = over.per_sample_time_us;
                }
                Err(e) => {
                    over.fail(&e);
                    tail.fail(&e);
                    ratio.fail(&e);
                }
            }
            if let Ok(sp) = sp {
                over.exact_asymptotic = exact_asymptotic_overshoot(&sp, self.n).ok().and_then(finite);
                let set = TailSet::full_orthant(vec![x0]);
                tail.exact_asymptotic = tail_asymptotic(self.model(), &set, self.n).ok().and_then(finite);
            }
            rows.extend([over, tail, ratio]);
        }
        rows
    }

    /// VR = per-draw variance of the reference / per-draw variance of the
    /// row, for rows sharing the cell.
    fn variance_reduction(&self, rows: &mut [ResultRow]) {
        let Some(reference) = self.cfg.config.reference else {
            return;
        };
        let Some(ref_var) = rows
            .iter()
            .find(|r| r.method == reference.label())
            .and_then(|r| r.weight_variance)
        else {
            return;
        };
        for r in rows.iter_mut() {
            r.variance_reduction = r.weight_variance.filter(|&v| v > 0.0).and_then(|v| finite(ref_var / v));
        }
    }
}
