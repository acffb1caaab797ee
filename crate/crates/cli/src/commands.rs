use std::fs;
use std::path::Path;

use amoebalab::amoeba::{raster_amoeba, RasterParams};
use amoebalab::experiments::{
    check_bounds, run_multivolume, run_shub_smale, run_theta_invariance, run_toric_scaling,
    two_sample_z, ExperimentConfig, ShubSmaleConfig, ThetaMode, ACCEPTANCE_SE,
};
use amoebalab::jacobian::check_curves;
use amoebalab::poly::{ExponentVector, Field, MultiPoly};
use amoebalab::polytope::{mikhalkin_alpha, mixed_volume, LatticePoint, LatticePolytope};
use amoebalab::rng::SeedContext;
use amoebalab::sampler::{sample_dense_complex, EnsembleSpec};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{
    BoundsArgs, JacobianArgs, MixedVolumeArgs, MultivolumeArgs, RasterArgs, RasterOpts,
    ShubSmaleArgs, ThetaArgs, ToricArgs,
};
use crate::output::{to_json, OutputDir};
use crate::CliError;

/// Summary of one subcommand run and its acceptance verdict, if it has one.
pub struct Outcome {
    pub summary: Value,
    pub verdict: Option<bool>,
}

/// `{"points": [[a, b], ...], "variances": [v, ...]}`, or several point sets
/// under `"polytopes"`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportFile {
    points: Option<Vec<LatticePoint>>,
    variances: Option<Vec<f64>>,
    polytopes: Option<Vec<Vec<LatticePoint>>>,
}

impl SupportFile {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed support file {}: {e}", path.display())))
    }

    fn exponents(&self) -> Result<Vec<ExponentVector>, CliError> {
        let points = self
            .points
            .as_ref()
            .ok_or_else(|| CliError::Usage("support file has no \"points\"".into()))?;
        points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&a| u32::try_from(a))
                    .collect::<Result<Vec<u32>, _>>()
                    .map(ExponentVector::new)
                    .map_err(|_| CliError::Usage("support exponents must be non-negative".into()))
            })
            .collect()
    }

    fn point_sets(&self) -> Result<Vec<Vec<LatticePoint>>, CliError> {
        match (&self.polytopes, &self.points) {
            (Some(sets), None) => Ok(sets.clone()),
            (None, Some(points)) => Ok(vec![points.clone()]),
            _ => Err(CliError::Usage(
                "support file needs exactly one of \"points\" and \"polytopes\"".into(),
            )),
        }
    }
}

fn verdict_json(v: Option<bool>) -> Value {
    match v {
        Some(true) => json!("pass"),
        Some(false) => json!("fail"),
        None => Value::Null,
    }
}

fn parse_angles(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad angle {t:?}: {e}")))
        })
        .collect()
}

fn raster_params(o: &RasterOpts) -> RasterParams {
    RasterParams {
        radius: o.radius,
        resolution: o.resolution,
        samples_per_axis: o.samples,
    }
}

pub fn multivolume(a: &MultivolumeArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = match &a.support_file {
        Some(path) => {
            let file = SupportFile::load(path)?;
            let spec = EnsembleSpec::sparse(
                file.exponents()?,
                file.variances.clone(),
                a.dilation,
                Field::Complex,
            )?;
            ExperimentConfig::toric(a.n, spec, a.trials, a.common.seed)?
        }
        None => ExperimentConfig::dense(a.n, &a.degrees, a.trials, a.common.seed)?,
    };
    let mut cfg = cfg.with_workers(a.common.workers);
    if let Some(theta) = &a.theta {
        cfg = cfg.with_theta(ThetaMode::Fixed(theta.clone()))?;
    }
    let run = run_multivolume(&cfg)?;
    out.write_lines("trials.jsonl", &run.records)?;
    let verdict = run.multivolume.target.map(|_| run.multivolume.within_target(ACCEPTANCE_SE));
    Ok(Outcome {
        summary: json!({
            "fiber_count": to_json(&run.fiber)?,
            "multivolume": to_json(&run.multivolume)?,
            "mean": to_json(&run.multivolume.mean)?,
            "target": to_json(&run.multivolume.target)?,
            "valid": run.multivolume.discard_rate() < amoebalab::experiments::DISCARD_CAP,
            "verdict": verdict_json(verdict),
        }),
        verdict,
    })
}

pub fn theta_invariance(a: &ThetaArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let thetas = a
        .theta
        .iter()
        .map(|s| parse_angles(s))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = ExperimentConfig::dense(a.n, &a.degrees, a.trials, a.common.seed)?
        .with_workers(a.common.workers);
    let (first, second, z) = match thetas.as_slice() {
        [t1, t2] => {
            let r = run_theta_invariance(&cfg, t1, t2)?;
            (r.first, r.second, r.z)
        }
        [t] => {
            let fixed = run_multivolume(
                &cfg.clone()
                    .with_stream("trial/fixed")
                    .with_theta(ThetaMode::Fixed(t.clone()))?,
            )?;
            let uniform = run_multivolume(&cfg.clone().with_stream("trial/uniform"))?;
            out.write_lines("trials_fixed.jsonl", &fixed.records)?;
            out.write_lines("trials_uniform.jsonl", &uniform.records)?;
            let z = two_sample_z(&fixed.fiber, &uniform.fiber);
            (fixed.fiber, uniform.fiber, z)
        }
        _ => {
            return Err(CliError::Usage("give --theta once or twice".into()));
        }
    };
    let verdict = Some(z < ACCEPTANCE_SE);
    Ok(Outcome {
        summary: json!({
            "first": to_json(&first)?,
            "second": to_json(&second)?,
            "z": to_json(&z)?,
            "verdict": verdict_json(verdict),
        }),
        verdict,
    })
}

pub fn shub_smale(a: &ShubSmaleArgs) -> Result<Outcome, CliError> {
    if a.degrees.len() != a.k {
        return Err(CliError::Usage(format!(
            "--k {} needs {} degrees, got {}",
            a.k,
            a.k,
            a.degrees.len()
        )));
    }
    let est = run_shub_smale(&ShubSmaleConfig {
        degrees: a.degrees.clone(),
        n_trials: a.trials,
        master_seed: a.common.seed,
        workers: a.common.workers,
    })?;
    let verdict = Some(est.within_target(ACCEPTANCE_SE));
    Ok(Outcome {
        summary: json!({
            "real_zeros": to_json(&est)?,
            "mean": to_json(&est.mean)?,
            "target": to_json(&est.target)?,
            "verdict": verdict_json(verdict),
        }),
        verdict,
    })
}

pub fn toric_scaling(a: &ToricArgs) -> Result<Outcome, CliError> {
    let file = SupportFile::load(&a.support_file)?;
    let support = file.exponents()?;
    let r = run_toric_scaling(
        a.n,
        &support,
        file.variances.as_deref(),
        a.dilation,
        a.trials,
        a.common.seed,
        a.common.workers,
    )?;
    let verdict = Some(r.z_score() <= ACCEPTANCE_SE);
    Ok(Outcome {
        summary: json!({
            "scaling": to_json(&r)?,
            "z": to_json(&r.z_score())?,
            "verdict": verdict_json(verdict),
        }),
        verdict,
    })
}

pub fn bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let cfg = ExperimentConfig::dense(a.n, &a.degrees, a.trials, a.common.seed)?
        .with_workers(a.common.workers);
    let raster = (a.n == 1 && a.curves > 0).then(|| (raster_params(&a.raster), a.curves));
    let report = check_bounds(&cfg, raster)?;
    let verdict = Some(report.passed());
    Ok(Outcome {
        summary: json!({
            "bounds": to_json(&report)?,
            "verdict": verdict_json(verdict),
        }),
        verdict,
    })
}

pub fn jacobian_check(a: &JacobianArgs) -> Result<Outcome, CliError> {
    if a.max_degree == 0 || a.curves == 0 || a.points == 0 {
        return Err(CliError::Usage(
            "--curves, --points and --max-degree must be positive".into(),
        ));
    }
    let curves = (0..a.curves)
        .map(|i| {
            let d = 1 + (i as u32) % a.max_degree;
            let spec = EnsembleSpec::dense(3, d, Field::Complex)?;
            let seed = SeedContext::new(a.common.seed, i as u64, "jacobian-curve");
            sample_dense_complex(&spec, &seed)?.dehomogenize(0)
        })
        .collect::<amoebalab::Result<Vec<_>>>()?;
    let summary = check_curves(
        &curves,
        a.points,
        &SeedContext::new(a.common.seed, 0, "jacobian-points"),
    )?;
    let verdict = Some(summary.max_rel_err_analytic <= 1e-10 && summary.max_rel_err_fd <= 1e-4);
    let mut value = to_json(&summary)?;
    value["verdict"] = verdict_json(verdict);
    Ok(Outcome {
        summary: value,
        verdict,
    })
}

pub fn raster(a: &RasterArgs, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let f = match &a.poly_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            MultiPoly::from_text(&text)?
        }
        None => {
            let &[d] = a.degrees.as_slice() else {
                return Err(CliError::Usage("raster takes a single degree".into()));
            };
            let spec = EnsembleSpec::dense(3, d, Field::Complex)?;
            sample_dense_complex(&spec, &SeedContext::new(a.common.seed, 0, "raster-curve"))?
                .dehomogenize(0)?
        }
    };
    let grid = raster_amoeba(&f, raster_params(&a.raster))?;
    out.write_with("amoeba.pgm", |w| Ok(grid.write_pgm(w)?))?;
    let sidecar = to_json(&grid.sidecar())?;
    out.write_json("amoeba.json", &sidecar)?;
    Ok(Outcome {
        summary: sidecar,
        verdict: None,
    })
}

pub fn mixed_volume_cmd(a: &MixedVolumeArgs) -> Result<Outcome, CliError> {
    let sets = SupportFile::load(&a.support_file)?.point_sets()?;
    let dim = sets
        .first()
        .and_then(|s| s.first())
        .map(Vec::len)
        .ok_or_else(|| CliError::Usage("empty support file".into()))?;
    let polytopes = sets
        .iter()
        .map(|pts| LatticePolytope::from_points(dim, pts))
        .collect::<amoebalab::Result<Vec<_>>>()?;
    let exact = |x: f64| -> Value {
        if x.fract() == 0.0 && x.abs() < 1e15 {
            json!(x as i64)
        } else {
            json!(x)
        }
    };
    let summary = if a.doubled {
        // a single polytope in dimension 2n stands for n equal ones
        let deltas = if polytopes.len() == 1 && dim % 2 == 0 {
            vec![polytopes[0].clone(); dim / 2]
        } else {
            polytopes
        };
        let alpha = mikhalkin_alpha(&deltas)?;
        json!({"alpha": exact(alpha.value), "lower_dimensional": alpha.lower_dimensional})
    } else {
        let ks = if polytopes.len() == 1 {
            vec![polytopes[0].clone(); dim]
        } else {
            polytopes
        };
        json!({"mixed_volume": exact(mixed_volume(&ks)?)})
    };
    Ok(Outcome {
        summary,
        verdict: None,
    })
}
