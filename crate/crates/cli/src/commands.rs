use frame_shadows::frame::{canonical_frame_superop, frame_superop, is_tight, DualFrame};
use frame_shadows::operator_space::{random_traceless_observable, HermOperator};
use frame_shadows::povm::{content_hash, is_2design, is_3design, operator_rows, Povm, PovmDocument};
use frame_shadows::simulate::{
    covariant_realizations, covariant_shots, evaluate_estimator, growth_curve, partitioned_run,
    sample_mean_realizations, sample_outcomes, stream_rng, summarize_values, Accumulator, Histogram, Realizations,
    RunSummary,
};
use frame_shadows::variance::{a_operator, analyze, variance_3design, variance_exact, AnalysisInput};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{AnalyzeArgs, DualChoice, PovmArgs, ScanArgs, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::inputs::{build_dual, parse_observable, parse_state, resolve_povm, OBSERVABLE_STREAM};
use crate::output::{emit, emit_file, Provenance};

fn to_value<S: Serialize>(x: &S) -> Value {
    serde_json::to_value(x).expect("result serialises")
}

fn validated(p: Povm<f64>) -> CliResult<Povm<f64>> {
    let report = p.validate();
    if report.passed {
        Ok(p)
    } else {
        Err(CliError::Validation(format!(
            "invalid POVM: {}",
            report.failures.join("; ")
        )))
    }
}

pub fn povm(args: &PovmArgs) -> CliResult<()> {
    let src = &args.povm;
    let seed = args.common.seed;
    let p = resolve_povm(
        src.source.builtin,
        src.source.json.as_deref(),
        src.dim,
        src.outcomes,
        seed,
    )?;
    let validation = p.validate();
    if !validation.passed {
        return Err(CliError::Validation(format!(
            "invalid POVM: {}",
            validation.failures.join("; ")
        )));
    }
    let frame = frame_superop(&p)?;
    let design = |check: frame_shadows::Result<_>| check.ok().map(|c| to_value(&c));
    let result = json!({
        "document": PovmDocument::from_povm(&p),
        "validation": validation,
        "informationally_complete": frame.is_informationally_complete(),
        "frame_rank": frame.rank(),
        "frame_spectrum": frame.spectrum(),
        "tightness": is_tight(&p)?,
        "design2": design(is_2design(&p)),
        "design3": design(is_3design(&p)),
    });
    let mut prov = Provenance::new("povm", args, seed);
    prov.povm_hash = Some(content_hash(&p));
    emit(args.common.out.as_deref(), "povm.json", &prov.envelope(result))?;
    Ok(())
}

pub fn analyze_cmd(args: &AnalyzeArgs) -> CliResult<()> {
    let src = &args.povm;
    let seed = args.common.seed;
    let p = validated(resolve_povm(
        src.source.builtin,
        src.source.json.as_deref(),
        src.dim,
        src.outcomes,
        seed,
    )?)?;
    let d = p.dim();
    let state = args.state.as_deref().map(|s| parse_state(s, d, seed)).transpose()?;
    let o = parse_observable(&args.estimator.observable, d, seed)?;
    let dual = build_dual(&p, &args.estimator, state.as_ref(), seed)?;
    if let Some(purity) = args.purity {
        if !(purity.is_finite() && purity >= 1.0 / d as f64 - 1e-12 && purity <= 1.0 + 1e-12) {
            return Err(CliError::Domain(format!("purity {purity} outside [1/{d}, 1]")));
        }
    }
    let report = analyze(&AnalysisInput {
        povm: &p,
        dual: &dual,
        observable: &o,
        state: state.as_ref(),
        purity: args.purity,
        seed: Some(seed),
    })?;
    let mut result = to_value(&report);
    if args.show_dual {
        let elements: Vec<_> = dual.elements().iter().map(operator_rows).collect();
        result["dual_elements"] = to_value(&elements);
    }
    let mut prov = Provenance::new("analyze", args, seed);
    prov.povm_hash = Some(content_hash(&p));
    emit(args.common.out.as_deref(), "analyze.json", &prov.envelope(result))?;
    Ok(())
}

#[derive(Serialize)]
struct PerShot {
    n: u64,
    mean: f64,
    sample_variance: Option<f64>,
    min: f64,
    max: f64,
}

impl From<&Accumulator> for PerShot {
    fn from(acc: &Accumulator) -> Self {
        Self {
            n: acc.count,
            mean: acc.mean,
            sample_variance: acc.sample_variance(),
            min: acc.min,
            max: acc.max,
        }
    }
}

/// 10, 20, 50, 100, ... up to `n`, always ending at `n`.
fn checkpoints(n: usize) -> Vec<usize> {
    let mut marks = Vec::new();
    let mut decade = 10usize;
    'outer: loop {
        for step in [1, 2, 5] {
            let m = decade * step;
            if m >= n {
                break 'outer;
            }
            marks.push(m);
        }
        decade *= 10;
    }
    marks.push(n);
    marks
}

fn histogram(values: &[f64], args: &SimulateArgs) -> CliResult<Histogram> {
    Ok(if args.pmf {
        Histogram::mass(values)?
    } else {
        Histogram::binned(values, args.bins)?
    })
}

enum Source {
    Finite(Povm<f64>, DualFrame<f64>),
    Covariant(usize),
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let seed = args.common.seed;
    if args.shots < 2 {
        return Err(CliError::Usage("--shots must be at least 2".into()));
    }
    if args.realizations.is_some() && (args.groups.is_some() || args.growth.is_some()) {
        return Err(CliError::Usage(
            "--groups and --growth apply to single runs, not --realizations".into(),
        ));
    }
    let (d, finite) = if args.covariant {
        let d = args
            .dim
            .ok_or_else(|| CliError::Usage("--covariant needs --dim".into()))?;
        let est = &args.estimator;
        if est.dual != DualChoice::CanonicalEstimator || est.pseudo || est.prior.is_some() || est.floor.is_some() {
            return Err(CliError::Usage(
                "--covariant uses its canonical estimator; drop --dual, --prior, --floor and --pseudo".into(),
            ));
        }
        (d, None)
    } else {
        let p = validated(resolve_povm(
            args.builtin,
            args.json.as_deref(),
            args.dim,
            args.outcomes,
            seed,
        )?)?;
        (p.dim(), Some(p))
    };
    let rho = parse_state(&args.state, d, seed)?;
    let o = parse_observable(&args.estimator.observable, d, seed)?;
    let source = match finite {
        Some(p) => {
            let dual = build_dual(&p, &args.estimator, Some(&rho), seed)?;
            Source::Finite(p, dual)
        }
        None => Source::Covariant(d),
    };
    let (exact_variance, povm_hash) = match &source {
        Source::Finite(p, dual) => (variance_exact(p, dual, &rho, &o)?, Some(content_hash(p))),
        Source::Covariant(d) => (variance_3design(&rho, &o, *d)?, None),
    };
    let mut prov = Provenance::new("simulate", args, seed);
    prov.povm_hash = povm_hash;
    let expectation = o.hs_inner(&rho)?;

    let mut result = json!({
        "mode": if args.realizations.is_some() { "realizations" } else { "single" },
        "measurement": if args.covariant { "covariant" } else { "povm" },
        "dim": d,
        "shots": args.shots,
        "expectation": expectation,
        "exact_variance": exact_variance,
    });

    if let Some(count) = args.realizations {
        let runs: Realizations = match &source {
            Source::Finite(p, dual) => {
                sample_mean_realizations(p, dual, &rho, &o, args.shots, count, seed, args.workers)?
            }
            Source::Covariant(d) => covariant_realizations(*d, &rho, &o, args.shots, count, seed, args.workers)?,
        };
        result["realizations"] = json!(count);
        result["means"] = to_value(&runs.summary()?);
        result["per_shot"] = to_value(&PerShot::from(&runs.per_shot));
        result["predicted_mean_std"] = json!((exact_variance / args.shots as f64).sqrt());
        if let Some(path) = &args.histogram {
            emit_file(path, &(prov.csv_header() + &histogram(&runs.means, args)?.to_csv()))?;
        }
    } else if args.workers > 1 {
        let Source::Finite(p, dual) = &source else {
            return Err(CliError::Usage(
                "--workers with a single covariant run is not supported".into(),
            ));
        };
        if args.histogram.is_some() || args.growth.is_some() || args.groups.is_some() {
            return Err(CliError::Usage(
                "--histogram, --growth and --groups need the full shot record; use --workers 1".into(),
            ));
        }
        let summary = partitioned_run(p, dual, &rho, &o, args.shots, seed, args.workers)?;
        result["summary"] = to_value(&summary);
    } else {
        let values: Vec<f64> = match &source {
            Source::Finite(p, dual) => {
                let outcomes = sample_outcomes(p, &rho, args.shots, seed)?;
                evaluate_estimator(dual, &o, &outcomes)?
                    .iter()
                    .map(|r| r.value)
                    .collect()
            }
            Source::Covariant(d) => covariant_shots(*d, &rho, &o, args.shots, seed)?
                .iter()
                .map(|r| r.value)
                .collect(),
        };
        let summary: RunSummary = summarize_values(&values, args.groups)?.with_seed(seed);
        result["summary"] = to_value(&summary);
        if let Some(path) = &args.histogram {
            emit_file(path, &(prov.csv_header() + &histogram(&values, args)?.to_csv()))?;
        }
        if let Some(path) = &args.growth {
            let mut csv = prov.csv_header();
            csv.push_str("n,mean,sample_variance\n");
            for g in growth_curve(&values, &checkpoints(values.len())) {
                csv.push_str(&format!("{},{:?},{:?}\n", g.n, g.mean, g.sample_variance));
            }
            emit_file(path, &csv)?;
        }
    }
    emit(args.common.out.as_deref(), "simulate.json", &prov.envelope(result))?;
    Ok(())
}

/// Per-dimension observable stream, so a row does not depend on the rest of the grid.
pub fn scan_observable(seed: u64, d: usize) -> HermOperator<f64> {
    random_traceless_observable(d, &mut stream_rng(seed, OBSERVABLE_STREAM | ((d as u64) << 16)))
}

pub fn scan(args: &ScanArgs) -> CliResult<()> {
    let seed = args.common.seed;
    if args.dims.is_empty() {
        return Err(CliError::Usage("--dims is empty".into()));
    }
    let prov = Provenance::new("scan", args, seed);
    let mut csv = prov.csv_header();
    csv.push_str("d,outcomes,lambda_min_a,a_op_norm,trace_a_over_d,inverse_form,gap\n");
    for &d in &args.dims {
        let p = Povm::<f64>::mub(d)?;
        let dual = frame_shadows::frame::canonical_estimator(&p)?;
        let o = scan_observable(seed, d);
        let a = a_operator(&p, &dual, &o)?;
        let trace_over_d = a.trace() / d as f64;
        let inverse_form = o.hs_inner(&canonical_frame_superop(&p)?.apply_inverse(&o)?)?;
        csv.push_str(&format!(
            "{},{},{:?},{:?},{:?},{:?},{:?}\n",
            d,
            p.len(),
            a.min_eigenvalue(),
            a.op_norm(),
            trace_over_d,
            inverse_form,
            trace_over_d - inverse_form
        ));
    }
    emit(args.common.out.as_deref(), "scan.csv", &csv)?;
    Ok(())
}
