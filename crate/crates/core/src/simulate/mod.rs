//! Shot-level simulation of frame-based estimators.
//!
//! Every seeded entry point derives its randomness from a `ChaCha8Rng`
//! seeded with the user seed. Parallel drivers give worker or realization
//! `k` the stream `k` of that generator, so results depend only on the seed
//! and, for [`partitioned_run`], on the worker count.

mod stats;

pub use stats::{exact_pmf, median_of_means, Accumulator, Bin, Histogram, HistogramMode, MassPoint, MASS_MERGE_TOL};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::DualFrame;
use crate::operator_space::herm::check_same_dim;
use crate::operator_space::HermOperator;
use crate::povm::{CovariantSampler, Povm};
use crate::scalar::Real;

/// Total-probability slack accepted before renormalising.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `ChaCha8Rng` for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Outcome distribution with a precomputed cumulative vector.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl OutcomeDistribution {
    /// Accepts probabilities that are nonnegative up to `NORMALIZATION_TOL`
    /// and sum to 1 within the same tolerance; they are then renormalised.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((b, &q)) = probs
            .iter()
            .enumerate()
            .find(|(_, q)| !q.is_finite() || **q < -NORMALIZATION_TOL)
        {
            return Err(Error::InvalidDistribution(format!("outcome {b} has probability {q:e}")));
        }
        let clipped: Vec<f64> = probs.iter().map(|q| q.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let probs: Vec<f64> = clipped.iter().map(|q| q / total).collect();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut cum = 0.0;
        for q in &probs {
            cum += q;
            cdf.push(cum);
        }
        // The last outcome with positive probability closes the CDF.
        if let Some(last) = probs.iter().rposition(|q| *q > 0.0) {
            for c in &mut cdf[last..] {
                *c = 1.0;
            }
        }
        Ok(Self { probs, cdf })
    }

    /// `p_b = <mu_b, rho>`.
    pub fn new<T: Real>(p: &Povm<T>, rho: &HermOperator<T>) -> Result<Self> {
        check_same_dim(p.dim(), rho.dim())?;
        rho.check_density_matrix()?;
        let probs: Vec<f64> = p.outcome_probabilities(rho)?.iter().map(|q| q.as_f64()).collect();
        Self::from_probabilities(&probs)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|c| *c <= u).min(self.probs.len() - 1)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// `n` i.i.d. outcomes of measuring `rho` with `p`.
pub fn sample_outcomes<T: Real>(p: &Povm<T>, rho: &HermOperator<T>, n: usize, seed: u64) -> Result<Vec<usize>> {
    let dist = OutcomeDistribution::new(p, rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(dist.sample_n(n, &mut rng))
}

/// One single-shot estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub outcome: usize,
    /// Index of the Haar draw within the seeded stream, for covariant shots.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draw: Option<u64>,
    pub value: f64,
}

/// `o(b_k) = <O, mu~_{b_k}>` for each outcome.
pub fn evaluate_estimator<T: Real>(
    dual: &DualFrame<T>,
    o: &HermOperator<T>,
    outcomes: &[usize],
) -> Result<Vec<ShotRecord>> {
    let table: Vec<f64> = dual.estimator_values(o)?.iter().map(|v| v.as_f64()).collect();
    outcomes
        .iter()
        .map(|&b| {
            table
                .get(b)
                .map(|&value| ShotRecord {
                    outcome: b,
                    draw: None,
                    value,
                })
                .ok_or(Error::IndexOutOfRange {
                    index: b,
                    len: table.len(),
                })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: u64,
    pub mean: f64,
    /// `1/(N-1) sum (o_k - mean)^2`.
    pub sample_variance: f64,
    pub median_of_means: Option<f64>,
    pub groups: Option<usize>,
    pub min: f64,
    pub max: f64,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
}

impl RunSummary {
    pub fn std_error(&self) -> f64 {
        (self.sample_variance / self.n as f64).sqrt()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_histogram(mut self, histogram: Histogram) -> Self {
        self.histogram = Some(histogram);
        self
    }

    fn from_accumulator(acc: &Accumulator) -> Result<Self> {
        let sample_variance = acc.sample_variance().ok_or(Error::BadGroupCount {
            groups: 0,
            samples: acc.count as usize,
        })?;
        Ok(Self {
            n: acc.count,
            mean: acc.mean,
            sample_variance,
            median_of_means: None,
            groups: None,
            min: acc.min,
            max: acc.max,
            seed: None,
            histogram: None,
        })
    }
}

/// Mean, sample variance and optionally the median of `k` group means.
pub fn summarize_values(values: &[f64], k: Option<usize>) -> Result<RunSummary> {
    match values.len() {
        0 => return Err(Error::EmptyInput),
        1 => {
            return Err(Error::BadGroupCount {
                groups: k.unwrap_or(0),
                samples: 1,
            })
        }
        _ => {}
    }
    let acc: Accumulator = values.iter().copied().collect();
    let mut summary = RunSummary::from_accumulator(&acc)?;
    summary.mean = summary.mean.clamp(acc.min, acc.max);
    if let Some(k) = k {
        summary.median_of_means = Some(median_of_means(values, k)?);
        summary.groups = Some(k);
    }
    Ok(summary)
}

pub fn summarize(records: &[ShotRecord], k: Option<usize>) -> Result<RunSummary> {
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    summarize_values(&values, k)
}

/// Running mean and sample variance at the requested shot counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub n: u64,
    pub mean: f64,
    pub sample_variance: f64,
}

pub fn growth_curve(values: &[f64], checkpoints: &[usize]) -> Vec<GrowthPoint> {
    let mut marks: Vec<usize> = checkpoints
        .iter()
        .copied()
        .filter(|&n| n >= 2 && n <= values.len())
        .collect();
    marks.sort_unstable();
    marks.dedup();
    let mut acc = Accumulator::new();
    let mut out = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    for (i, &v) in values.iter().enumerate() {
        acc.push(v);
        while next.peek().is_some_and(|&&m| m == i + 1) {
            next.next();
            out.push(GrowthPoint {
                n: acc.count,
                mean: acc.mean,
                sample_variance: acc.sample_variance().unwrap_or(0.0),
            });
        }
    }
    out
}

/// Single-shot estimate of the covariant measurement with its canonical
/// dual `(d+1) U^† P_b U - I`: `(d+1) <b|U O U^†|b> - tr O`.
fn covariant_value<T: Real>(u: &nalgebra::DMatrix<crate::scalar::Complex<T>>, b: usize, o: &HermOperator<T>) -> f64 {
    let d = o.dim();
    let m = o.matrix();
    let mut acc = T::zero();
    for i in 0..d {
        for j in 0..d {
            acc += (u[(b, i)] * m[(i, j)] * u[(b, j)].conj()).re;
        }
    }
    ((T::of_usize(d + 1)) * acc - o.trace()).as_f64()
}

fn check_covariant<T: Real>(d: usize, rho: &HermOperator<T>, o: &HermOperator<T>) -> Result<()> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    check_same_dim(d, rho.dim())?;
    check_same_dim(d, o.dim())?;
    rho.check_density_matrix()
}

fn covariant_stream<T: Real>(
    d: usize,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
    n: usize,
    rng: ChaCha8Rng,
) -> Vec<ShotRecord> {
    let mut sampler = CovariantSampler::from_rng(d, rng);
    (0..n as u64)
        .map(|k| {
            let (u, b) = sampler.draw_unchecked(rho);
            ShotRecord {
                outcome: b,
                draw: Some(k),
                value: covariant_value(&u, b, o),
            }
        })
        .collect()
}

/// Shots of the covariant (Haar random unitary) measurement.
pub fn covariant_shots<T: Real>(
    d: usize,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
    n: usize,
    seed: u64,
) -> Result<Vec<ShotRecord>> {
    check_covariant(d, rho, o)?;
    Ok(covariant_stream(d, rho, o, n, ChaCha8Rng::seed_from_u64(seed)))
}

pub fn covariant_run<T: Real>(
    d: usize,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
    n: usize,
    seed: u64,
) -> Result<RunSummary> {
    Ok(summarize(&covariant_shots(d, rho, o, n, seed)?, None)?.with_seed(seed))
}

/// Sample means of repeated `N`-shot experiments together with the pooled
/// per-shot statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realizations {
    pub seed: u64,
    pub shots: usize,
    pub means: Vec<f64>,
    pub per_shot: Accumulator,
}

impl Realizations {
    pub fn summary(&self) -> Result<RunSummary> {
        Ok(summarize_values(&self.means, None)?.with_seed(self.seed))
    }
}

/// Runs `count` realizations on up to `workers` threads; realization `r`
/// uses stream `r`, so the output does not depend on `workers`.
fn run_realizations<F>(count: usize, shots: usize, seed: u64, workers: usize, one: F) -> Realizations
where
    F: Fn(ChaCha8Rng) -> Vec<f64> + Sync,
{
    let workers = workers.clamp(1, count.max(1));
    let chunk = count.div_ceil(workers).max(1);
    let parts: Vec<Vec<(f64, Accumulator)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let one = &one;
                s.spawn(move || {
                    let lo = (w * chunk).min(count);
                    let hi = ((w + 1) * chunk).min(count);
                    (lo..hi)
                        .map(|r| {
                            let acc: Accumulator = one(stream_rng(seed, r as u64)).into_iter().collect();
                            (acc.mean, acc)
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut means = Vec::with_capacity(count);
    let mut per_shot = Accumulator::new();
    for (mean, acc) in parts.into_iter().flatten() {
        means.push(mean);
        per_shot.merge(&acc);
    }
    Realizations {
        seed,
        shots,
        means,
        per_shot,
    }
}

/// `count` independent `n`-shot sample means for a finite POVM and dual.
#[allow(clippy::too_many_arguments)]
pub fn sample_mean_realizations<T: Real>(
    p: &Povm<T>,
    dual: &DualFrame<T>,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
    n: usize,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<Realizations> {
    check_same_dim(p.len(), dual.len())?;
    if n == 0 || count == 0 {
        return Err(Error::EmptyInput);
    }
    let dist = OutcomeDistribution::new(p, rho)?;
    let table: Vec<f64> = dual.estimator_values(o)?.iter().map(|v| v.as_f64()).collect();
    Ok(run_realizations(count, n, seed, workers, |mut rng| {
        (0..n).map(|_| table[dist.sample(&mut rng)]).collect()
    }))
}

/// `count` independent `n`-shot sample means of the covariant measurement.
#[allow(clippy::too_many_arguments)]
pub fn covariant_realizations<T: Real>(
    d: usize,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
    n: usize,
    count: usize,
    seed: u64,
    workers: usize,
) -> Result<Realizations> {
    check_covariant(d, rho, o)?;
    if n == 0 || count == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(run_realizations(count, n, seed, workers, |rng| {
        covariant_stream(d, rho, o, n, rng)
            .into_iter()
            .map(|r| r.value)
            .collect()
    }))
}

/// One `n`-shot run split over `workers` threads, worker `w` drawing from
/// stream `w`. Deterministic for a fixed `(seed, workers)` pair.
pub fn partitioned_run<T: Real>(
    p: &Povm<T>,
    dual: &DualFrame<T>,
    rho: &HermOperator<T>,
    o: &HermOperator<T>,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<RunSummary> {
    check_same_dim(p.len(), dual.len())?;
    let dist = OutcomeDistribution::new(p, rho)?;
    let table: Vec<f64> = dual.estimator_values(o)?.iter().map(|v| v.as_f64()).collect();
    let workers = workers.max(1);
    let base = n / workers;
    let extra = n % workers;
    let accs: Vec<Accumulator> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (dist, table) = (&dist, &table);
                s.spawn(move || {
                    let mut rng = stream_rng(seed, w as u64);
                    let len = base + usize::from(w < extra);
                    (0..len).map(|_| table[dist.sample(&mut rng)]).collect::<Accumulator>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut total = Accumulator::new();
    for acc in &accs {
        total.merge(acc);
    }
    Ok(RunSummary::from_accumulator(&total)?.with_seed(seed))
}
