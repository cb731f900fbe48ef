use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use discsde::experiments::{
    affine_fit_csv, empirical_diff, empirical_error, empirical_sup_error, error_table_csv, fmt_real, histogram_csv,
    neighborhood_csv, neighborhood_study, occupation_csv, occupation_decay, rates_csv, scaled_diff_histogram,
    ErrorTable, RateFit, Scheme,
};
use discsde::geometry::{property_report, Hyperplane, Hypersurface, PointSet1d, Sphere};
use discsde::model::{example1, example2, gbm, piecewise_constant, sign1d, SdeModel};
use discsde::transform::{Transform, TransformParams};

use crate::config::{ConfigError, Experiment, ModelSpec, RunConfig, SchemeKind, SurfaceSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Model {
        context: &'static str,
        source: discsde::Error,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: io::Error,
    },
    #[error("{0}")]
    CheckFailed(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        use discsde::Error as E;
        match self {
            RunError::Config(_) => EXIT_VALIDATION,
            RunError::Model { source, .. } => match source {
                E::InvalidParameter(_) | E::GridMismatch { .. } | E::DimensionMismatch { .. } => EXIT_VALIDATION,
                _ => EXIT_NUMERICAL,
            },
            RunError::Io { .. } | RunError::CheckFailed(_) => EXIT_NUMERICAL,
        }
    }
}

trait Context<T> {
    fn context(self, what: &'static str) -> Result<T, RunError>;
}

impl<T> Context<T> for discsde::Result<T> {
    fn context(self, what: &'static str) -> Result<T, RunError> {
        self.map_err(|source| RunError::Model { context: what, source })
    }
}

fn io_context(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        context: path.display().to_string(),
        source,
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<SdeModel, RunError> {
    let x0 = spec.x0.clone();
    let model = match spec.name.as_str() {
        "example1" => example1(),
        "example2" => {
            let x = x0.clone().unwrap_or_else(|| vec![0.0, 2.0]);
            if x.len() != 2 {
                return Err(ConfigError::Validation("example2 needs a 2-d x0".into()).into());
            }
            example2(spec.a, spec.b, [x[0], x[1]])
        }
        "sign1d" => sign1d(spec.scale, 0.0),
        "gbm" => gbm(spec.mu, spec.sigma, 1.0),
        "custom" => {
            let surface: Arc<dyn Hypersurface> = match spec.surface.clone() {
                Some(SurfaceSpec::Sphere { center, radius }) => {
                    Arc::new(Sphere::new(center, radius).context("surface")?)
                }
                Some(SurfaceSpec::Hyperplane { base, normal }) => {
                    Arc::new(Hyperplane::new(base, normal).context("surface")?)
                }
                Some(SurfaceSpec::Points1d { points }) => Arc::new(PointSet1d::new(points).context("surface")?),
                None => return Err(ConfigError::Validation("model custom needs a [surface] section".into()).into()),
            };
            let d = surface.dim();
            let start = x0.clone().unwrap_or_else(|| vec![0.0; d]);
            piecewise_constant(surface, spec.pieces.clone(), spec.noise, start).context("custom model")?
        }
        other => {
            return Err(ConfigError::Validation(format!(
                "unknown model `{other}` (see list-models)"
            ))
            .into())
        }
    };
    match (spec.name.as_str(), x0) {
        ("example2", _) | ("custom", _) | (_, None) => Ok(model),
        (_, Some(x)) => model.with_x0(x).context("x0"),
    }
}

fn transform_params(c: &RunConfig) -> TransformParams {
    TransformParams {
        eps: c.transform_eps,
        fd_step: c.fd_step,
        newton_tol: c.newton_tol,
        certificate_samples: c.samples,
        certificate_seed: c.seed,
        ..Default::default()
    }
}

/// Files written to `*.partial` and renamed together once the run succeeds.
struct Staging {
    dir: PathBuf,
    staged: Vec<String>,
}

impl Staging {
    fn stage(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(format!("{name}.partial"));
        fs::write(&path, contents).map_err(io_context(&path))?;
        self.staged.push(name.to_string());
        Ok(())
    }

    fn commit(&mut self) -> Result<Vec<String>, RunError> {
        for name in &self.staged {
            let from = self.dir.join(format!("{name}.partial"));
            fs::rename(&from, self.dir.join(name)).map_err(io_context(&from))?;
        }
        Ok(std::mem::take(&mut self.staged))
    }
}

fn manifest(config: &RunConfig, status: &str, wall: Option<f64>, files: &[String]) -> String {
    let mut s = String::from("key,value\n");
    let _ = writeln!(s, "tool,{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    for (k, v) in config.echo() {
        let _ = writeln!(s, "{k},{v}");
    }
    let _ = writeln!(s, "status,{status}");
    if let Some(w) = wall {
        let _ = writeln!(s, "wall_time_s,{w:.3}");
    }
    if !files.is_empty() {
        let _ = writeln!(s, "outputs,{}", files.join(" "));
    }
    s
}

/// Runs the configured experiment on a dedicated pool of `config.threads`
/// workers. `manifest.csv` is written before any computation and rewritten
/// with the final status.
pub fn run(config: &RunConfig) -> Result<Vec<String>, RunError> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(io_context(dir))?;
    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, manifest(config, "running", None, &[])).map_err(io_context(&manifest_path))?;

    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| RunError::CheckFailed(format!("thread pool: {e}")))?;
    let mut staging = Staging {
        dir: dir.clone(),
        staged: Vec::new(),
    };
    let outcome = pool.install(|| dispatch(config, &mut staging));
    let wall = Some(start.elapsed().as_secs_f64());
    let (status, files) = match &outcome {
        Ok(files) => ("ok".to_string(), files.clone()),
        Err(e) => (format!("failed (exit {}): {}", e.exit_code(), e.to_string().replace(['\n', ','], " ")), vec![]),
    };
    fs::write(&manifest_path, manifest(config, &status, wall, &files)).map_err(io_context(&manifest_path))?;
    outcome
}

fn write_table(staging: &mut Staging, name: &str, table: &ErrorTable) -> Result<(), RunError> {
    staging.stage(&format!("{name}.csv"), &error_table_csv(table))?;
    staging.stage("rates.csv", &rates_csv(&table.rates()))
}

fn occupation_rate_csv(fit: &discsde::Result<RateFit>) -> String {
    let mut s = String::from("slope,rate,intercept,r2,dropped_zeros\n");
    match fit {
        Ok(f) => {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_real(f.slope),
                fmt_real(f.rate),
                fmt_real(f.intercept),
                fmt_real(f.r_squared),
                f.dropped_zeros
            );
        }
        Err(e) => {
            let _ = writeln!(s, "nan,nan,nan,nan,0\n# {e}");
        }
    }
    s
}

fn dispatch(c: &RunConfig, staging: &mut Staging) -> Result<Vec<String>, RunError> {
    let model = build_model(&c.model)?;
    match c.experiment {
        Experiment::Error => {
            let transform;
            let scheme = match c.scheme {
                SchemeKind::Em => Scheme::Em,
                SchemeKind::EmTransformed => {
                    transform = Transform::new(model.clone(), transform_params(c)).context("transform")?;
                    Scheme::EmTransformed(&transform)
                }
            };
            let t = empirical_error(&model, scheme, &c.p_list, &c.n_list, c.big_n, c.m, c.seed)
                .context("error experiment")?;
            write_table(staging, "error", &t)?;
        }
        Experiment::Diff => {
            let t = empirical_diff(&model, &c.p_list, &c.n_list, c.m, c.seed).context("diff experiment")?;
            write_table(staging, "diff", &t)?;
        }
        Experiment::SupError => {
            let t = empirical_sup_error(&model, &c.p_list, &c.n_list, c.big_n, c.m, c.seed)
                .context("sup-error experiment")?;
            write_table(staging, "sup_error", &t)?;
        }
        Experiment::Hist => {
            let h = scaled_diff_histogram(&model, c.p_list[0], &c.n_list, c.m, c.exponent, c.seed)
                .context("histogram experiment")?;
            staging.stage("histogram.csv", &histogram_csv(&h))?;
        }
        Experiment::Occupation => {
            let o = occupation_decay(&model, &c.n_list, c.big_n, c.m, c.seed).context("occupation experiment")?;
            staging.stage("occupation.csv", &occupation_csv(&o))?;
            staging.stage("occupation_rate.csv", &occupation_rate_csv(&o.fit))?;
            if !c.eps_list.is_empty() {
                let nb = neighborhood_study(&model, &c.n_list, &c.eps_list, c.big_n, c.m, c.seed)
                    .context("neighborhood occupation")?;
                staging.stage("neighborhood.csv", &neighborhood_csv(&nb))?;
                match &nb.fit {
                    Ok(f) => staging.stage("neighborhood_fit.csv", &affine_fit_csv(f, &["eps", "n^-1/2"]))?,
                    Err(e) => staging.stage("neighborhood_fit.csv", &format!("term,coefficient\n# {e}\n"))?,
                }
            }
        }
        Experiment::CheckTransform => {
            let t = Transform::build(model, transform_params(c)).context("transform")?;
            let report = t.certificate_report().context("transform certificate")?;
            let mut s = String::from("quantity,sampled_sup,bound,pass\n");
            for r in &report.rows {
                let _ = writeln!(s, "{},{},{},{}", r.quantity, fmt_real(r.sampled_sup), fmt_real(r.bound), r.pass);
            }
            staging.stage("transform_certificate.csv", &s)?;
            let files = staging.commit()?;
            if !report.passed() {
                let failed: Vec<String> = report
                    .failures()
                    .map(|r| format!("{} = {:e} (bound {:e})", r.quantity, r.sampled_sup, r.bound))
                    .collect();
                return Err(RunError::CheckFailed(format!(
                    "transform certificate failed at eps = {}: {}",
                    report.eps,
                    failed.join("; ")
                )));
            }
            return Ok(files);
        }
        Experiment::CheckGeometry => {
            let rows = property_report(model.surface().as_ref(), c.samples, c.seed).context("geometry check")?;
            let mut s = String::from("property,samples,failures,max_error,pass\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{},{}", r.property, r.samples, r.failures, fmt_real(r.max_error), r.pass);
            }
            staging.stage("geometry_report.csv", &s)?;
            let files = staging.commit()?;
            if let Some(bad) = rows.iter().find(|r| !r.pass) {
                return Err(RunError::CheckFailed(format!(
                    "geometry property `{}` failed on {} of {} samples",
                    bad.property, bad.failures, bad.samples
                )));
            }
            return Ok(files);
        }
    }
    staging.commit()
}
