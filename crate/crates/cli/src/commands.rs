//! One function per subcommand; each returns the artifacts it produced.

use std::path::Path;
use std::sync::Arc;

use fbh_core::basis::{make_quadrature, read_xy_csv, Domain, EigenBasis, MeasureTag, SampledFunction, StepFunction};
use fbh_core::hardy::{
    atom_maximal_norm, atomic_decompose, h1_norm_report, named_source, random_batch, validate_atom, Atom, Family,
    H1Config, Interval,
};
use fbh_core::kernels::{check_sharp_estimates, Decay, heat_kernel_halfline, poisson_kernel_halfline, EstimateKind, SeriesKernels};
use fbh_core::maximal::{
    apply_poisson, check_uchiyama_conditions, required_modes, duhamel_residuals, maximal_function, CutoffRho, DuhamelConfig,
    KernelKind, UchiyamaFamily, UchiyamaGrid,
};
use fbh_core::specfun::{bessel_zeros, Order};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, MAX_TERMS};
use crate::output::Artifact;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{source}")]
    Numeric {
        operation: String,
        #[source]
        source: fbh_core::Error,
    },
    #[error("{operation}: {detail}")]
    Failed { operation: String, detail: String },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }

    /// Failing operation for the JSON error report.
    pub fn operation(&self) -> &str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric { operation, .. } | CliError::Failed { operation, .. } => operation,
            CliError::Output(_) => "output",
        }
    }
}

type Out = Result<Vec<Artifact>, CliError>;

/// Argument errors from the core count as validation failures; everything else is
/// reported against `op`, or the core's own operation name when it has one.
fn at<T>(op: &str, r: fbh_core::Result<T>) -> Result<T, CliError> {
    use fbh_core::Error as E;
    r.map_err(|e| match e {
        E::InvalidArgument(m) => CliError::Config(ConfigError::Invalid(m)),
        e @ (E::MeasureMismatch { .. } | E::IndexOutOfRange { .. }) => CliError::Config(ConfigError::Invalid(e.to_string())),
        e => CliError::Numeric {
            operation: e.operation().unwrap_or(op).to_string(),
            source: e,
        },
    })
}

fn json_art<T: Serialize>(name: &str, v: &T) -> Result<Artifact, CliError> {
    Artifact::json(name, v).map_err(|e| CliError::Failed {
        operation: "serialize".into(),
        detail: e.to_string(),
    })
}

fn csv_art<R: Serialize>(name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<Artifact, CliError> {
    let fail = |e: csv::Error| CliError::Failed {
        operation: "serialize".into(),
        detail: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed {
        operation: "serialize".into(),
        detail: e.to_string(),
    })?;
    Ok(Artifact::csv(name, bytes))
}

fn order(cfg: &RunConfig) -> Result<Order, CliError> {
    at("order", Order::new(cfg.nu))
}

fn basis(cfg: &RunConfig) -> Result<EigenBasis, CliError> {
    at("eigenbasis", EigenBasis::new(order(cfg)?, cfg.n_terms))
}

fn family(s: &str) -> Result<Family, CliError> {
    at("family", Family::parse(s))
}

/// A named test function or an `x,value` table, sampled on the quadrature grid.
fn sampled_input(cfg: &RunConfig, function: &str, input: Option<&Path>, tag: MeasureTag) -> Result<SampledFunction, CliError> {
    let o = order(cfg)?;
    let grid = Arc::new(at("quadrature", make_quadrature(Domain::UnitInterval, cfg.quad_nodes, tag, o))?);
    match input {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|source| ConfigError::Read {
                path: path.to_path_buf(),
                source,
            })?;
            let rows = at("read_input", read_xy_csv(file))?;
            at("read_input", SampledFunction::from_table(grid, &rows))
        }
        None => {
            let src = at("function", named_source(function, o))?;
            Ok(SampledFunction::from_fn(grid, |x| src.eval(x)))
        }
    }
}

fn sampled_csv(name: &str, f: &SampledFunction) -> Result<Artifact, CliError> {
    let mut buf = Vec::new();
    at("serialize", f.write_csv(&mut buf))?;
    Ok(Artifact::csv(name, buf))
}

pub fn zeros(cfg: &RunConfig, count: usize) -> Out {
    let t = at("bessel_zeros", bessel_zeros(order(cfg)?, count))?;
    let rows = t.zeros().iter().enumerate().map(|(i, &z)| (i + 1, z));
    Ok(vec![csv_art("zeros.csv", &["n", "lambda"], rows)?])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelName {
    /// Poisson kernel of the Bessel operator on (0, 1).
    #[value(name = "calP")]
    BesselPoisson,
    /// Poisson kernel of the Lebesgue-measure operator on (0, 1).
    #[value(name = "P")]
    Poisson,
    /// Heat kernel of the Bessel operator on (0, 1).
    #[value(name = "calT")]
    BesselHeat,
    /// Heat kernel on (0, 1) relative to Lebesgue measure.
    #[value(name = "Ttilde")]
    HeatTilde,
    #[value(name = "T-halfline")]
    HalfLineHeat,
    #[value(name = "P-halfline")]
    HalfLinePoisson,
}

pub fn kernel(cfg: &RunConfig, name: KernelName, times: &[f64], points: usize) -> Out {
    if points == 0 || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(ConfigError::Invalid("kernel needs positive times and at least one point".into()).into());
    }
    let o = order(cfg)?;
    let b = match name {
        KernelName::HalfLineHeat | KernelName::HalfLinePoisson => None,
        _ => Some(basis(cfg)?),
    };
    let sk = b.as_ref().map(|b| SeriesKernels::new(b).with_tolerance(cfg.series_tolerance));
    let xs: Vec<f64> = (1..=points).map(|i| i as f64 / (points + 1) as f64).collect();
    let mut rows = Vec::with_capacity(times.len() * points * points);
    for &t in times {
        for &x in &xs {
            for &y in &xs {
                let v = match (name, &sk) {
                    (KernelName::BesselPoisson, Some(k)) => at("poisson_kernel_l", k.poisson_kernel_l(t, x, y))?.value,
                    (KernelName::Poisson, Some(k)) => at("poisson_kernel_lsq", k.poisson_kernel_lsq(t, x, y))?.value,
                    (KernelName::BesselHeat, Some(k)) => at("heat_kernel_l", k.heat_kernel_l(t, x, y))?.value,
                    (KernelName::HeatTilde, Some(k)) => at("heat_kernel_tilde", k.heat_kernel_tilde(t, x, y))?,
                    (KernelName::HalfLineHeat, _) => at("heat_kernel_halfline", heat_kernel_halfline(o, t, x, y))?,
                    (KernelName::HalfLinePoisson, _) => at("poisson_kernel_halfline", poisson_kernel_halfline(o, t, x, y))?,
                    _ => unreachable!("interval kernels always have a basis"),
                };
                rows.push(vec![t, x, y, v]);
            }
        }
    }
    Ok(vec![csv_art("kernel.csv", &["t", "x", "y", "value"], rows)?])
}

pub fn estimates(cfg: &RunConfig, lemma: &str, grid: Option<usize>) -> Out {
    let kind: EstimateKind = at("estimates", lemma.parse())?;
    let n = grid.unwrap_or(cfg.grid);
    if n < 2 {
        return Err(ConfigError::Invalid("grid must be at least 2".into()).into());
    }
    let report = at("check_sharp_estimates", check_sharp_estimates(&basis(cfg)?, kind, &kind.default_grid(n)))?;
    if !(report.min_ratio.is_finite() && report.max_ratio.is_finite()) {
        return Err(CliError::Failed {
            operation: "check_sharp_estimates".into(),
            detail: format!("non-finite ratio range [{}, {}]", report.min_ratio, report.max_ratio),
        });
    }
    Ok(vec![json_art("estimates.json", &report)?])
}

pub fn maximal(cfg: &RunConfig, function: &str, input: Option<&Path>, kind: &str) -> Out {
    let kind: KernelKind = at("maximal", kind.parse())?;
    let f = sampled_input(cfg, function, input, kind.tag())?;
    let grid = cfg.time_grid()?;
    let m = at("maximal_function", maximal_function(&basis(cfg)?, kind, &f, &grid))?;
    let summary = json!({
        "kind": kind.id(),
        "function": input.map_or(function.to_string(), |p| p.display().to_string()),
        "nu": cfg.nu,
        "nodes": f.nodes().len(),
        "times": grid.times().len(),
        "t_min": grid.t_min(),
        "t_max": grid.t_max(),
        "input_l1_norm": f.values().iter().zip(f.weights()).map(|(v, w)| v.abs() * w).sum::<f64>(),
        "maximal_l1_norm": m.l1_norm(),
    });
    Ok(vec![sampled_csv("maximal.csv", &m.function())?, json_art("maximal.json", &summary)?])
}

pub fn duhamel(cfg: &RunConfig, t: f64, center: f64, radius: f64) -> Out {
    let o = order(cfg)?;
    let grid = Arc::new(at("quadrature", make_quadrature(Domain::UnitInterval, cfg.quad_nodes, MeasureTag::Mu, o))?);
    let f = SampledFunction::from_fn(grid, |x| {
        let u = (x - center) / radius;
        if u.abs() < 1.0 {
            (-1.0 / (1.0 - u * u)).exp()
        } else {
            0.0
        }
    });
    let d = at(
        "duhamel_residuals",
        duhamel_residuals(&basis(cfg)?, &CutoffRho::standard(), &f, t, &DuhamelConfig::default()),
    )?;
    let sup = |g: &SampledFunction| g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let points: Vec<_> = (0..d.lhs.nodes().len())
        .map(|i| {
            json!({
                "x": d.lhs.nodes()[i],
                "lhs": d.lhs.values()[i],
                "r1": d.r1.values()[i],
                "r2": d.r2.values()[i],
                "r3": d.r3.values()[i],
            })
        })
        .collect();
    let report = json!({
        "t": d.t,
        "nu": cfg.nu,
        "input": {"center": center, "radius": radius},
        "closure_error": d.closure_error(),
        "sup_lhs": sup(&d.lhs),
        "sup_r1": sup(&d.r1),
        "sup_r2": sup(&d.r2),
        "sup_r3": sup(&d.r3),
        "points": points,
    });
    Ok(vec![json_art("duhamel.json", &report)?])
}

pub fn uchiyama(cfg: &RunConfig, fam: &str, j: i32) -> Out {
    let family = match fam {
        "calK" => UchiyamaFamily::BesselPoisson { j },
        "K" => UchiyamaFamily::Poisson { j },
        "K_r" => UchiyamaFamily::Reparametrized,
        other => return Err(ConfigError::Invalid(format!("unknown kernel family '{other}' (calK, K, K_r)")).into()),
    };
    let grid = UchiyamaGrid::default();
    // the smallest scale fixes the basis; n_terms acts as a floor
    let need = at("check_uchiyama_conditions", family.required_modes(order(cfg)?, &grid))?;
    if need > MAX_TERMS {
        return Err(CliError::Failed {
            operation: "check_uchiyama_conditions".into(),
            detail: format!("needs {need} modes, above the limit {MAX_TERMS}"),
        });
    }
    let b = at("eigenbasis", EigenBasis::new(order(cfg)?, cfg.n_terms.max(need)))?;
    let r = at("check_uchiyama_conditions", check_uchiyama_conditions(&b, family, &grid))?;
    if !r.is_finite() {
        return Err(CliError::Failed {
            operation: "check_uchiyama_conditions".into(),
            detail: format!("non-finite constants for {}", r.family),
        });
    }
    Ok(vec![json_art("uchiyama.json", &r)?])
}

/// How `atoms validate` builds its atom.
pub enum AtomSpec {
    Special(i32),
    Step { interval: Option<(f64, f64)>, breaks: Vec<f64>, heights: Vec<f64> },
    Haar((f64, f64)),
}

pub fn atoms_validate(cfg: &RunConfig, fam: &str, spec: AtomSpec) -> Out {
    let (family, o) = (family(fam)?, order(cfg)?);
    let atom = match spec {
        AtomSpec::Special(j) => at("atom", Atom::special(family, o, j))?,
        AtomSpec::Haar((a, b)) => Atom::haar(family, o, at("atom", Interval::new(a, b))?, None),
        AtomSpec::Step { interval, breaks, heights } => {
            let (a, b) = interval.unwrap_or((
                breaks.first().copied().unwrap_or(0.0),
                breaks.last().copied().unwrap_or(0.0),
            ));
            let iv = at("atom", Interval::new(a, b))?;
            Atom::from_step(family, o, iv, at("atom", StepFunction::new(breaks, heights))?)
        }
    };
    Ok(vec![json_art("atom.json", &validate_atom(&atom))?])
}

pub fn atoms_decompose(cfg: &RunConfig, function: &str, fam: &str, depth: Option<u32>) -> Out {
    let (family, o) = (family(fam)?, order(cfg)?);
    let depth = depth.unwrap_or(cfg.depth);
    if depth > fbh_core::hardy::MAX_DEPTH {
        return Err(ConfigError::Invalid(format!("depth must be at most {}", fbh_core::hardy::MAX_DEPTH)).into());
    }
    let src = at("function", named_source(function, o))?;
    let d = at("atomic_decompose", atomic_decompose(&src, family, o, depth))?;
    if !(d.reconstruction_l1_error <= cfg.reconstruct_tolerance) {
        return Err(CliError::Failed {
            operation: "atomic_decompose".into(),
            detail: format!(
                "reconstruction error {:e} exceeds tolerance {:e}",
                d.reconstruction_l1_error, cfg.reconstruct_tolerance
            ),
        });
    }
    let mut v = d.to_json();
    v["function"] = json!(function);
    Ok(vec![json_art("decomposition.json", &v)?])
}

#[derive(Serialize)]
struct BatchEntry {
    index: usize,
    scale: u32,
    profile: fbh_core::hardy::Profile,
    interval: [f64; 2],
    valid: bool,
    sup_norm: f64,
    sup_bound: f64,
    cancellation_defect: f64,
    constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    maximal_norm: Option<f64>,
}

pub fn atoms_batch(cfg: &RunConfig, fam: &str, count: Option<usize>, max_scale: Option<u32>, norms: bool) -> Out {
    let (family, o) = (family(fam)?, order(cfg)?);
    let count = count.unwrap_or(cfg.batch_size);
    let max_scale = max_scale.unwrap_or(cfg.max_scale);
    let batch = at("random_batch", random_batch(cfg.seed, count, family, o, max_scale))?;
    let norm_ctx = if norms {
        let grid = cfg.time_grid()?;
        let need = required_modes(Decay::Poisson, grid.t_min()).max(cfg.n_terms);
        if need > MAX_TERMS {
            return Err(ConfigError::Invalid(format!("t_min {} needs {need} modes, above {MAX_TERMS}", grid.t_min())).into());
        }
        Some((at("eigenbasis", EigenBasis::new(o, need))?, grid))
    } else {
        None
    };
    let mut entries = Vec::with_capacity(batch.len());
    for (index, r) in batch.iter().enumerate() {
        let rep = validate_atom(&r.atom);
        let maximal_norm = match &norm_ctx {
            Some((b, g)) => Some(at("maximal_step", atom_maximal_norm(b, &r.atom, g))?),
            None => None,
        };
        entries.push(BatchEntry {
            index,
            scale: r.scale,
            profile: r.profile,
            interval: [r.atom.interval.a, r.atom.interval.b],
            valid: rep.valid,
            sup_norm: rep.sup_norm,
            sup_bound: rep.sup_bound,
            cancellation_defect: rep.cancellation_defect,
            constant: rep.constant,
            maximal_norm,
        });
    }
    let max_constant = entries.iter().fold(0.0f64, |m, e| m.max(e.constant));
    let max_maximal = entries.iter().filter_map(|e| e.maximal_norm).reduce(f64::max);
    let report = json!({
        "seed": cfg.seed,
        "family": family.name(),
        "nu": cfg.nu,
        "count": count,
        "max_scale": max_scale,
        "all_valid": entries.iter().all(|e| e.valid),
        "max_constant": max_constant,
        "max_maximal_norm": max_maximal,
        "atoms": entries,
    });
    Ok(vec![json_art("batch.json", &report)?])
}

pub fn h1_report(cfg: &RunConfig, function: &str, fam: &str, depth: Option<u32>) -> Out {
    let (family, o) = (family(fam)?, order(cfg)?);
    let src = at("function", named_source(function, o))?;
    let h1 = H1Config {
        depth: depth.unwrap_or(cfg.depth),
        sample_nodes: cfg.quad_nodes,
    };
    if h1.depth > fbh_core::hardy::MAX_DEPTH {
        return Err(ConfigError::Invalid(format!("depth must be at most {}", fbh_core::hardy::MAX_DEPTH)).into());
    }
    let r = at("h1_norm_report", h1_norm_report(&basis(cfg)?, &src, family, h1))?;
    Ok(vec![json_art("h1_report.json", &r)?])
}

/// Traces of the bounded solution of `u_tt + d_xx u + (2 nu + 1)/x d_x u = 0`
/// with `u(x, 0) = f`, namely `u(., t) = calP_t f`.
pub fn dirichlet(cfg: &RunConfig, function: &str, input: Option<&Path>, times: &[f64]) -> Out {
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(ConfigError::Invalid("times must be finite and non-negative".into()).into());
    }
    let f = sampled_input(cfg, function, input, MeasureTag::Mu)?;
    let b = basis(cfg)?;
    let mut rows = Vec::with_capacity(times.len() * f.nodes().len());
    for &t in times {
        let u = if t == 0.0 {
            f.clone()
        } else {
            at("apply_poisson", apply_poisson(&b, KernelKind::BesselPoisson, &f, t))?
        };
        rows.extend(u.nodes().iter().zip(u.values()).map(|(&x, &v)| vec![t, x, v]));
    }
    Ok(vec![csv_art("dirichlet.csv", &["t", "x", "value"], rows)?])
}
