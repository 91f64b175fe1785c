use std::fs;
use std::path::Path;

use frame_shadows::frame::{canonical_dual, canonical_estimator, min_variance_dual, DualFrame, DualMode};
use frame_shadows::operator_space::{pauli_string, random_pure_state, random_traceless_observable, HermOperator};
use frame_shadows::povm::{operator_from_rows, AppendixPovm, Povm, PovmDocument};
use frame_shadows::simulate::stream_rng;
use serde_json::Value;

use crate::args::{Builtin, DualChoice, EstimatorParams};
use crate::error::{CliError, CliResult};

pub const POVM_STREAM: u64 = 11;
pub const OBSERVABLE_STREAM: u64 = 12;
pub const STATE_STREAM: u64 = 13;

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Accepts a bare POVM document or an `fshadow povm` envelope.
pub fn povm_from_json(value: Value) -> CliResult<Povm<f64>> {
    let doc = match value.pointer("/result/document") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let doc: PovmDocument =
        serde_json::from_value(doc).map_err(|e| CliError::Validation(format!("malformed POVM document: {e}")))?;
    Ok(doc.to_povm()?)
}

pub fn resolve_povm(
    builtin: Option<Builtin>,
    json: Option<&Path>,
    dim: Option<usize>,
    outcomes: Option<usize>,
    seed: u64,
) -> CliResult<Povm<f64>> {
    let need_dim = || dim.ok_or_else(|| CliError::Usage("--dim is required for this POVM".into()));
    let p = match (builtin, json) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--builtin and --json are mutually exclusive".into())),
        (None, None) => return Err(CliError::Usage("one of --builtin or --json is required".into())),
        (None, Some(path)) => povm_from_json(read_json(path)?)?,
        (Some(b), None) => match b {
            Builtin::Mub => Povm::mub(need_dim()?)?,
            Builtin::Computational => Povm::computational(need_dim()?)?,
            Builtin::Random => {
                let d = need_dim()?;
                let l = outcomes.unwrap_or(d * d + d);
                Povm::random_rank1(d, l, &mut stream_rng(seed, POVM_STREAM))?
            }
            Builtin::AppendixProjective => Povm::appendix(AppendixPovm::Projective),
            Builtin::AppendixNonIc => Povm::appendix(AppendixPovm::NonIc4),
            Builtin::AppendixH3 => Povm::appendix(AppendixPovm::Ic4),
        },
    };
    if let (Some(d), Some(Builtin::AppendixProjective | Builtin::AppendixNonIc | Builtin::AppendixH3)) = (dim, builtin)
    {
        if d != 2 {
            return Err(CliError::Usage(format!(
                "appendix POVMs are qubit POVMs, got --dim {d}"
            )));
        }
    }
    Ok(p)
}

fn split_spec(spec: &str) -> (&str, Option<&str>) {
    match spec.split_once(':') {
        Some((k, v)) => (k, Some(v)),
        None => (spec, None),
    }
}

fn basis_index(arg: Option<&str>, d: usize, spec: &str) -> CliResult<usize> {
    let k: usize = arg
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("`{spec}`: expected a basis index")))?;
    if k >= d {
        return Err(CliError::Usage(format!("`{spec}`: index {k} out of range for d = {d}")));
    }
    Ok(k)
}

fn operator_file(path: &str) -> CliResult<HermOperator<f64>> {
    let value = read_json(Path::new(path))?;
    let rows = value.get("matrix").cloned().unwrap_or(value);
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(rows)
        .map_err(|e| CliError::Validation(format!("{path}: expected rows of [re, im] pairs: {e}")))?;
    Ok(operator_from_rows(&rows)?)
}

fn check_dim(x: &HermOperator<f64>, d: usize, what: &str) -> CliResult<()> {
    if x.dim() != d {
        return Err(CliError::Validation(format!(
            "{what} has dimension {}, POVM has {d}",
            x.dim()
        )));
    }
    Ok(())
}

/// `pure:k`, `mixed`, `random` or `json:PATH`.
pub fn parse_state(spec: &str, d: usize, seed: u64) -> CliResult<HermOperator<f64>> {
    let rho = match split_spec(spec) {
        ("pure", arg) => HermOperator::basis_projector(d, basis_index(arg, d, spec)?),
        ("mixed", None) => HermOperator::maximally_mixed(d),
        ("random", None) => random_pure_state(d, &mut stream_rng(seed, STATE_STREAM)),
        ("json", Some(path)) => operator_file(path)?,
        _ => return Err(CliError::Usage(format!("unrecognised state `{spec}`"))),
    };
    check_dim(&rho, d, "state")?;
    rho.check_density_matrix()?;
    Ok(rho)
}

/// `pauli:XZ`, `random`, `proj:k` or `json:PATH`.
pub fn parse_observable(spec: &str, d: usize, seed: u64) -> CliResult<HermOperator<f64>> {
    let o = match split_spec(spec) {
        ("pauli", Some(labels)) => pauli_string(labels)
            .ok_or_else(|| CliError::Usage(format!("`{spec}`: Pauli labels must be I, X, Y or Z")))?,
        ("random", None) => random_traceless_observable(d, &mut stream_rng(seed, OBSERVABLE_STREAM)),
        ("proj", arg) => HermOperator::basis_projector(d, basis_index(arg, d, spec)?),
        ("json", Some(path)) => operator_file(path)?,
        _ => return Err(CliError::Usage(format!("unrecognised observable `{spec}`"))),
    };
    check_dim(&o, d, "observable")?;
    Ok(o)
}

pub fn build_dual(
    p: &Povm<f64>,
    params: &EstimatorParams,
    state: Option<&HermOperator<f64>>,
    seed: u64,
) -> CliResult<DualFrame<f64>> {
    if params.pseudo && params.dual != DualChoice::Canonical {
        return Err(CliError::Usage("--pseudo applies to --dual canonical only".into()));
    }
    if (params.prior.is_some() || params.floor.is_some()) && params.dual != DualChoice::MinVariance {
        return Err(CliError::Usage(
            "--prior and --floor apply to --dual min-variance only".into(),
        ));
    }
    Ok(match params.dual {
        DualChoice::CanonicalEstimator => canonical_estimator(p)?,
        DualChoice::Canonical => {
            let mode = if params.pseudo {
                DualMode::Pseudo
            } else {
                DualMode::Strict
            };
            canonical_dual(p, mode)?
        }
        DualChoice::MinVariance => {
            let prior = match (&params.prior, state) {
                (Some(spec), _) => parse_state(spec, p.dim(), seed)?,
                (None, Some(rho)) => rho.clone(),
                (None, None) => HermOperator::maximally_mixed(p.dim()),
            };
            min_variance_dual(p, &prior, params.floor)?
        }
    })
}
