//! Monte Carlo runners and their estimators.
//!
//! Trial `t` of a run draws everything from streams keyed by
//! `(master_seed, t, label)` and runs independently; records are collected
//! in trial order before any reduction, so results do not depend on the
//! number of workers.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::amoeba::{mean_amoeba_area, RasterParams};
use crate::error::{Error, Result};
use crate::fiber::{count_fiber_with, FiberOptions, FiberRecord};
use crate::poly::{ExponentVector, Field, MultiPoly, ThetaPoint};
use crate::polytope::{mikhalkin_alpha, LatticePoint, LatticePolytope};
use crate::rng::SeedContext;
use crate::sampler::{sample, EnsembleKind, EnsembleSpec};
use crate::solve::{real_solutions, solve_all, PolySystem};
use crate::univariate::UniPoly;

/// Largest tolerated fraction of discarded trials.
pub const DISCARD_CAP: f64 = 0.02;

/// Width, in standard errors, of every acceptance band.
pub const ACCEPTANCE_SE: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Valid (non-discarded) trials.
    pub n_trials: usize,
    pub n_discarded: usize,
    pub ci95: (f64, f64),
    pub target: Option<f64>,
    pub seed: u64,
}

impl MCEstimate {
    /// Mean and standard error of the valid samples. Fails when the discard
    /// rate reaches [`DISCARD_CAP`] or nothing is valid.
    pub fn from_samples(
        values: &[f64],
        n_discarded: usize,
        target: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let n = values.len();
        let total = n + n_discarded;
        if n == 0 || (n_discarded > 0 && n_discarded as f64 >= DISCARD_CAP * total as f64) {
            return Err(Error::InvalidRun {
                discarded: n_discarded,
                total,
                cap: DISCARD_CAP,
            });
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error,
            n_trials: n,
            n_discarded,
            ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
            target,
            seed,
        })
    }

    pub fn discard_rate(&self) -> f64 {
        self.n_discarded as f64 / (self.n_trials + self.n_discarded) as f64
    }

    /// The same estimate for `factor` times the sampled quantity.
    pub fn scaled(&self, factor: f64) -> Self {
        let (lo, hi) = (self.ci95.0 * factor, self.ci95.1 * factor);
        Self {
            mean: self.mean * factor,
            std_error: self.std_error * factor.abs(),
            ci95: (lo.min(hi), lo.max(hi)),
            target: self.target.map(|t| t * factor),
            ..self.clone()
        }
    }

    /// `|mean - target|` in standard errors; zero-variance estimates must hit
    /// the target to relative precision `1e-12`.
    pub fn z_score(&self) -> Option<f64> {
        let t = self.target?;
        let diff = (self.mean - t).abs();
        Some(if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff <= 1e-12 * t.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        })
    }

    pub fn within_target(&self, k: f64) -> bool {
        self.z_score().is_some_and(|z| z <= k)
    }
}

/// `|a - b| / sqrt(se_a^2 + se_b^2)` for independent estimates.
pub fn two_sample_z(a: &MCEstimate, b: &MCEstimate) -> f64 {
    let se = a.std_error.hypot(b.std_error);
    let diff = (a.mean - b.mean).abs();
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "angles")]
pub enum ThetaMode {
    Uniform,
    Fixed(Vec<f64>),
}

/// One fiber-counting Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Half-dimension: `n` equations in `2n` variables.
    pub n: usize,
    /// Ensemble of each equation; dense ensembles are homogeneous in
    /// `2n + 1` variables and get dehomogenized at the first one.
    pub ensembles: Vec<EnsembleSpec>,
    pub theta_mode: ThetaMode,
    pub n_trials: usize,
    pub master_seed: u64,
    /// Separates independent runs sharing a master seed.
    pub stream: String,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    #[serde(skip)]
    pub fiber: FiberOptions,
}

impl ExperimentConfig {
    /// Complex Kostlan equations of the given degrees with uniform angles.
    pub fn dense(n: usize, degrees: &[u32], n_trials: usize, master_seed: u64) -> Result<Self> {
        if degrees.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: degrees.len(),
            });
        }
        let ensembles = degrees
            .iter()
            .map(|&d| EnsembleSpec::dense(2 * n + 1, d, Field::Complex))
            .collect::<Result<_>>()?;
        let cfg = Self {
            n,
            ensembles,
            theta_mode: ThetaMode::Uniform,
            n_trials,
            master_seed,
            stream: "trial".into(),
            workers: 0,
            fiber: FiberOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `n` independent equations from one sparse ensemble in `2n` variables.
    pub fn toric(n: usize, spec: EnsembleSpec, n_trials: usize, master_seed: u64) -> Result<Self> {
        let cfg = Self {
            n,
            ensembles: vec![spec; n],
            theta_mode: ThetaMode::Uniform,
            n_trials,
            master_seed,
            stream: "trial".into(),
            workers: 0,
            fiber: FiberOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_theta(mut self, mode: ThetaMode) -> Result<Self> {
        self.theta_mode = mode;
        self.validate()?;
        Ok(self)
    }

    pub fn with_stream(mut self, stream: &str) -> Self {
        self.stream = stream.into();
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::InvalidArgument(format!(
                "half-dimension {} not supported (1 or 2)",
                self.n
            )));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidArgument("at least one trial is required".into()));
        }
        if self.ensembles.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.ensembles.len(),
            });
        }
        for spec in &self.ensembles {
            spec.validate()?;
            let nvars = match spec.kind {
                EnsembleKind::DenseKostlan => spec.nvars_ambient - 1,
                EnsembleKind::SparseToric => spec.nvars_ambient,
            };
            if nvars != 2 * self.n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * self.n,
                    got: nvars,
                });
            }
        }
        if let ThetaMode::Fixed(a) = &self.theta_mode {
            ThetaPoint::new(a.clone())?;
            if a.len() != 2 * self.n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * self.n,
                    got: a.len(),
                });
            }
        }
        Ok(())
    }

    /// Expected fiber count `prod d_i` for dense ensembles; none for toric
    /// ones.
    fn fiber_target(&self) -> Option<f64> {
        self.ensembles
            .iter()
            .map(|s| (s.kind == EnsembleKind::DenseKostlan).then_some(f64::from(s.degree_or_dilation)))
            .product()
    }

    /// The system of trial `t`.
    pub fn sample_system(&self, seed: &SeedContext) -> Result<Vec<MultiPoly>> {
        self.ensembles
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let f = sample(spec, &seed.child(&format!("f{i}")))?;
                match spec.kind {
                    EnsembleKind::DenseKostlan => f.dehomogenize(0),
                    EnsembleKind::SparseToric => Ok(f),
                }
            })
            .collect()
    }

    /// Newton polytopes of the equations, used for the mixed-volume bound.
    pub fn newton_polytopes(&self) -> Result<Vec<LatticePolytope>> {
        let m = 2 * self.n;
        self.ensembles
            .iter()
            .map(|spec| match spec.kind {
                EnsembleKind::DenseKostlan => Ok(LatticePolytope::simplex(
                    m,
                    i64::from(spec.degree_or_dilation),
                )),
                EnsembleKind::SparseToric => {
                    let pts: Vec<LatticePoint> = spec
                        .variance_profile()?
                        .iter()
                        .map(|(e, _)| e.entries().iter().map(|&a| i64::from(a)).collect())
                        .collect();
                    LatticePolytope::from_points(m, &pts)
                }
            })
            .collect()
    }
}

/// Runs `job(t)` for every trial index in order, on `workers` threads.
fn run_trials<T, F>(workers: usize, n_trials: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let collect = || (0..n_trials as u64).into_par_iter().map(&job).collect();
    if workers == 0 {
        collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(collect)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberRun {
    /// Mean fiber count.
    pub fiber: MCEstimate,
    /// `pi^{2n}` times the mean fiber count.
    pub multivolume: MCEstimate,
    #[serde(skip)]
    pub records: Vec<FiberRecord>,
}

impl FiberRun {
    /// Valid fiber counts in trial order.
    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.records.iter().filter_map(|r| r.count)
    }
}

/// Expected multivolume through fiber counts over uniform (or fixed) angles.
pub fn run_multivolume(config: &ExperimentConfig) -> Result<FiberRun> {
    config.validate()?;
    let m = 2 * config.n;
    let records = run_trials(config.workers, config.n_trials, |t| {
        let seed = SeedContext::new(config.master_seed, t, config.stream.as_str());
        let polys = config.sample_system(&seed)?;
        let angles = match &config.theta_mode {
            ThetaMode::Fixed(a) => a.clone(),
            ThetaMode::Uniform => {
                let mut rng = seed.child("theta").rng();
                (0..m).map(|_| rng.random_range(0.0..PI)).collect()
            }
        };
        let theta = ThetaPoint::wrapped(&angles);
        let result = count_fiber_with(&polys, &angles, &seed, &config.fiber);
        FiberRecord::from_result(t, &theta, result)
    })?;
    let counts: Vec<f64> = records.iter().filter_map(|r| r.count).map(|c| c as f64).collect();
    let discarded = records.len() - counts.len();
    let fiber = MCEstimate::from_samples(&counts, discarded, config.fiber_target(), config.master_seed)?;
    let multivolume = fiber.scaled(PI.powi(m as i32));
    Ok(FiberRun {
        fiber,
        multivolume,
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaInvariance {
    pub first: MCEstimate,
    pub second: MCEstimate,
    pub z: f64,
}

/// Fiber means at two fixed angle vectors, on independent trial streams.
pub fn run_theta_invariance(
    config: &ExperimentConfig,
    first: &[f64],
    second: &[f64],
) -> Result<ThetaInvariance> {
    let run = |angles: &[f64], stream: &str| {
        let cfg = config
            .clone()
            .with_stream(&format!("{}/{stream}", config.stream))
            .with_theta(ThetaMode::Fixed(angles.to_vec()))?;
        run_multivolume(&cfg).map(|r| r.fiber)
    };
    let first = run(first, "first")?;
    let second = run(second, "second")?;
    let z = two_sample_z(&first, &second);
    Ok(ThetaInvariance { first, second, z })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShubSmaleConfig {
    pub degrees: Vec<u32>,
    pub n_trials: usize,
    pub master_seed: u64,
    pub workers: usize,
}

/// Mean number of real zeros in `(R^x)^k` of `k` real Kostlan polynomials in
/// `k` affine variables; the target is `sqrt(prod d_i)`.
pub fn run_shub_smale(config: &ShubSmaleConfig) -> Result<MCEstimate> {
    let k = config.degrees.len();
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!("k = {k} not supported (1 to 3)")));
    }
    if config.n_trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let specs = config
        .degrees
        .iter()
        .map(|&d| EnsembleSpec::dense(k + 1, d, Field::Real))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = run_trials(config.workers, config.n_trials, |t| {
        let seed = SeedContext::new(config.master_seed, t, "shub-smale");
        let polys = specs
            .iter()
            .enumerate()
            .map(|(i, s)| sample(s, &seed.child(&format!("f{i}")))?.dehomogenize(0))
            .collect::<Result<Vec<_>>>()?;
        let count = if k == 1 {
            UniPoly::from_multi(&polys[0]).and_then(|p| p.sturm_count_real_roots())
        } else {
            PolySystem::new(polys)
                .and_then(|s| solve_all(&s, &seed.child("solve")))
                .and_then(|rep| real_solutions(&rep, 1e-8, 1e-8))
                .map(|r| r.points.len())
        };
        match count {
            Ok(c) => Ok(Some(c as f64)),
            Err(
                Error::UnreliableCount(_)
                | Error::UnreliableSolve { .. }
                | Error::AmbiguousClassification { .. },
            ) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let counts: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let target = config.degrees.iter().map(|&d| f64::from(d)).product::<f64>().sqrt();
    MCEstimate::from_samples(
        &counts,
        outcomes.len() - counts.len(),
        Some(target),
        config.master_seed,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToricScaling {
    pub base: MCEstimate,
    pub dilated: MCEstimate,
    pub ratio: f64,
    pub ratio_std_error: f64,
    pub target: f64,
}

impl ToricScaling {
    pub fn z_score(&self) -> f64 {
        let diff = (self.ratio - self.target).abs();
        if self.ratio_std_error > 0.0 {
            diff / self.ratio_std_error
        } else if diff <= 1e-12 * self.target {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Multivolume estimates for the toric ensemble on `support` and on its
/// `dilation`-fold dilate, with the ratio's propagated standard error.
pub fn run_toric_scaling(
    n: usize,
    support: &[ExponentVector],
    base_variances: Option<&[f64]>,
    dilation: u32,
    n_trials: usize,
    master_seed: u64,
    workers: usize,
) -> Result<ToricScaling> {
    let run = |d: u32, stream: &str| -> Result<MCEstimate> {
        let spec = EnsembleSpec::sparse(
            support.to_vec(),
            base_variances.map(<[f64]>::to_vec),
            d,
            Field::Complex,
        )?;
        let cfg = ExperimentConfig::toric(n, spec, n_trials, master_seed)?
            .with_stream(stream)
            .with_workers(workers);
        run_multivolume(&cfg).map(|r| r.multivolume)
    };
    let base = run(1, "toric-base")?;
    let dilated = run(dilation, "toric-dilated")?;
    let ratio = dilated.mean / base.mean;
    let ratio_std_error =
        ratio.abs() * (base.std_error / base.mean).hypot(dilated.std_error / dilated.mean);
    Ok(ToricScaling {
        base,
        dilated,
        ratio,
        ratio_std_error,
        target: f64::from(dilation).powi(n as i32),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaCheck {
    pub area: MCEstimate,
    /// `pi^2 d / 2`.
    pub bound: f64,
    pub within_bound: bool,
    /// Mean area against half the multivolume estimate, with combined slack.
    pub within_half_multivolume: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub multivolume: MCEstimate,
    pub alpha: f64,
    pub mikhalkin_bound: f64,
    pub within_mikhalkin: bool,
    pub area: Option<AreaCheck>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.within_mikhalkin
            && self
                .area
                .as_ref()
                .is_none_or(|a| a.within_bound && a.within_half_multivolume)
    }
}

/// Compares the multivolume estimate with `pi^{2n} alpha(V)`; for a dense
/// curve (`n = 1`) also compares the mean raster area of `n_curves` random
/// curves with `pi^2 d / 2` and with half the multivolume estimate.
pub fn check_bounds(
    config: &ExperimentConfig,
    raster: Option<(RasterParams, usize)>,
) -> Result<BoundsReport> {
    let run = run_multivolume(config)?;
    let mv = run.multivolume;
    let alpha = mikhalkin_alpha(&config.newton_polytopes()?)?.value;
    let bound = PI.powi(2 * config.n as i32) * alpha;
    let within_mikhalkin = mv.mean <= bound + ACCEPTANCE_SE * mv.std_error;
    let area = match (raster, config.n, config.ensembles.first()) {
        (Some((params, n_curves)), 1, Some(spec)) if spec.kind == EnsembleKind::DenseKostlan => {
            let d = spec.degree_or_dilation;
            let area = mean_amoeba_area(d, n_curves, params, config.master_seed)?;
            let bound = PI * PI * f64::from(d) / 2.0;
            let half_slack = area.std_error.hypot(mv.std_error / 2.0);
            Some(AreaCheck {
                within_bound: area.mean <= bound + ACCEPTANCE_SE * area.std_error,
                within_half_multivolume: area.mean <= mv.mean / 2.0 + ACCEPTANCE_SE * half_slack,
                area,
                bound,
            })
        }
        _ => None,
    };
    Ok(BoundsReport {
        multivolume: mv,
        alpha,
        mikhalkin_bound: bound,
        within_mikhalkin,
        area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_statistics() {
        let e = MCEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 0, Some(2.5), 9).unwrap();
        assert_eq!(e.mean, 2.5);
        // sample sd sqrt(5/3), over sqrt(4)
        assert!((e.std_error - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(e.z_score(), Some(0.0));
        let s = e.scaled(2.0);
        assert_eq!((s.mean, s.target), (5.0, Some(5.0)));
    }

    #[test]
    fn discard_cap() {
        let vals = vec![1.0; 98];
        assert!(MCEstimate::from_samples(&vals, 1, None, 0).is_ok());
        assert!(matches!(
            MCEstimate::from_samples(&vals, 2, None, 0),
            Err(Error::InvalidRun { .. })
        ));
        assert!(MCEstimate::from_samples(&[], 0, None, 0).is_err());
    }

    #[test]
    fn zero_variance_targets() {
        let e = MCEstimate::from_samples(&[1.0; 10], 0, Some(1.0), 0).unwrap();
        assert!(e.within_target(4.0));
        let e = MCEstimate::from_samples(&[1.0; 10], 0, Some(1.1), 0).unwrap();
        assert!(!e.within_target(4.0));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::dense(1, &[2], 0, 1).is_err());
        assert!(ExperimentConfig::dense(3, &[1, 1, 1], 10, 1).is_err());
        assert!(ExperimentConfig::dense(1, &[2, 2], 10, 1).is_err());
        let cfg = ExperimentConfig::dense(1, &[2], 10, 1).unwrap();
        assert!(cfg.with_theta(ThetaMode::Fixed(vec![0.1, 4.0])).is_err());
    }

    #[test]
    fn linear_curves_have_one_point_fibers() {
        let cfg = ExperimentConfig::dense(1, &[1], 50, 3).unwrap();
        let run = run_multivolume(&cfg).unwrap();
        assert!(run.counts().all(|c| c == 1));
        assert_eq!(run.fiber.std_error, 0.0);
        assert!((run.multivolume.mean - PI * PI).abs() < 1e-12);
    }
}
