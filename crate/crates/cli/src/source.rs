use std::path::Path;

use homflow::algebra::Subspace;
use homflow::bochner::reduce_to_semisimple;
use homflow::catalog;
use homflow::io::{self, RawSpace};
use homflow::{Error, Metric, Presentation};

use crate::{IdealArgs, MetricArgs, SpaceArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_VIOLATED: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoundViolated { .. } => EXIT_VIOLATED,
            _ => EXIT_INVALID,
        };
        Self { code, message: e.to_string() }
    }
}

pub struct Space {
    pub name: String,
    pub presentation: Presentation,
    pub compact_ideal: Option<Subspace>,
}

/// Unvalidated pieces, for reporting every structural check separately.
pub fn load_raw(args: &SpaceArgs) -> Result<(String, RawSpace), Failure> {
    match (&args.builtin, &args.space_file) {
        (Some(name), None) => {
            let e = catalog::get(name)?;
            let p = e.presentation;
            let raw = RawSpace {
                algebra: p.algebra().clone(),
                isotropy: p.isotropy().clone(),
                background: p.background().clone(),
                compact_ideal: e.compact_ideal,
            };
            Ok((e.name, raw))
        }
        (None, Some(path)) => Ok((path.display().to_string(), io::read_presentation_parts(path)?)),
        _ => Err(Failure::invalid("exactly one of --builtin and --space-file is required")),
    }
}

pub fn load_space(args: &SpaceArgs) -> Result<Space, Failure> {
    match (&args.builtin, &args.space_file) {
        (Some(name), None) => {
            let e = catalog::get(name)?;
            Ok(Space { name: e.name, presentation: e.presentation, compact_ideal: e.compact_ideal })
        }
        (None, Some(path)) => {
            let loaded = io::read_presentation(path)?;
            Ok(Space {
                name: path.display().to_string(),
                presentation: loaded.presentation,
                compact_ideal: loaded.compact_ideal,
            })
        }
        _ => Err(Failure::invalid("exactly one of --builtin and --space-file is required")),
    }
}

pub fn load_metric(space: &Space, args: &MetricArgs) -> Result<Metric, Failure> {
    let p = &space.presentation;
    match args.metric.as_str() {
        "identity" => Ok(p.identity_metric()),
        "random" => Ok(catalog::random_metric_for(p, args.seed)),
        path => Ok(io::read_metric(Path::new(path), p)?),
    }
}

pub fn parse_vectors(raw: &[String], dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    raw.iter()
        .map(|s| {
            let v: Vec<f64> =
                serde_json::from_str(s).map_err(|e| Failure::invalid(format!("bad --ideal vector `{s}`: {e}")))?;
            if v.len() != dim {
                return Err(Failure::from(Error::DimensionMismatch { expected: dim, got: v.len() }));
            }
            Ok(v)
        })
        .collect()
}

/// Explicit `--ideal` vectors, the derived-series reduction for `--auto`, or
/// the space's own compact ideal.
pub fn resolve_ideal(space: &Space, args: &IdealArgs) -> Result<Option<Subspace>, Failure> {
    let p = &space.presentation;
    if !args.ideal.is_empty() {
        let vectors = parse_vectors(&args.ideal, p.dim_g())?;
        return Ok(Some(Subspace::new(p.dim_g(), &vectors)?));
    }
    if args.auto {
        return Ok(Some(reduce_to_semisimple(p, &Subspace::whole(p.dim_g()))?));
    }
    Ok(space.compact_ideal.clone())
}
