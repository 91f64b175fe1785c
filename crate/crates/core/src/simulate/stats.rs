use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Streaming count, mean and sum of squared deviations. Two accumulators
/// combine exactly with [`Accumulator::merge`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    /// Unbiased sample variance, `m2 / (N - 1)`.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> Option<f64> {
        self.sample_variance().map(|v| (v / self.count as f64).sqrt())
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Median of the means of `k` contiguous groups; the first `N mod k` groups
/// get one extra element.
pub fn median_of_means(values: &[f64], k: usize) -> Result<f64> {
    let n = values.len();
    if k < 2 || k > n {
        return Err(Error::BadGroupCount { groups: k, samples: n });
    }
    let base = n / k;
    let extra = n % k;
    let mut means = Vec::with_capacity(k);
    let mut start = 0;
    for g in 0..k {
        let len = base + usize::from(g < extra);
        let group = &values[start..start + len];
        means.push(group.iter().sum::<f64>() / len as f64);
        start += len;
    }
    Ok(median(&mut means))
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub const MASS_MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramMode {
    /// Fixed-width bins over `[min, max]`; density integrates to 1.
    Binned,
    /// One point per distinct value; density is the probability mass.
    Mass,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub low: f64,
    pub high: f64,
    pub count: u64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub mode: HistogramMode,
    pub total: u64,
    pub bins: Vec<Bin>,
}

impl Histogram {
    /// Fixed-width histogram. A constant sample yields a single mass point.
    pub fn binned(values: &[f64], bins: usize) -> Result<Self> {
        if bins < 1 {
            return Err(Error::BadBinCount);
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let acc: Accumulator = values.iter().copied().collect();
        let (lo, hi) = (acc.min, acc.max);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidDistribution("non-finite sample".into()));
        }
        if hi == lo {
            return Self::mass(values);
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            let k = (((v - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        let n = values.len() as f64;
        let bins = counts
            .into_iter()
            .enumerate()
            .map(|(k, count)| Bin {
                low: lo + k as f64 * width,
                high: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
                count,
                density: count as f64 / (n * width),
            })
            .collect();
        Ok(Self {
            mode: HistogramMode::Binned,
            total: values.len() as u64,
            bins,
        })
    }

    /// Empirical probability mass over the distinct values of the sample.
    /// Values within `MASS_MERGE_TOL` (relative) of the first value of a
    /// point are counted as that point.
    pub fn mass(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut bins: Vec<Bin> = Vec::new();
        for v in sorted {
            match bins.last_mut() {
                Some(b) if (v - b.low).abs() <= MASS_MERGE_TOL * (1.0 + b.low.abs()) => b.count += 1,
                _ => bins.push(Bin {
                    low: v,
                    high: v,
                    count: 1,
                    density: 0.0,
                }),
            }
        }
        for b in &mut bins {
            b.density = b.count as f64 / n;
        }
        Ok(Self {
            mode: HistogramMode::Mass,
            total: values.len() as u64,
            bins,
        })
    }

    /// `sum density * width` for binned histograms, `sum density` for mass.
    pub fn total_mass(&self) -> f64 {
        match self.mode {
            HistogramMode::Binned => self.bins.iter().map(|b| b.density * (b.high - b.low)).sum(),
            HistogramMode::Mass => self.bins.iter().map(|b| b.density).sum(),
        }
    }

    /// CSV with header `low,high,count,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("low,high,count,density\n");
        for b in &self.bins {
            out.push_str(&format!("{:?},{:?},{},{:?}\n", b.low, b.high, b.count, b.density));
        }
        out
    }
}

/// A value of a finite-outcome estimator together with its exact probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassPoint {
    pub value: f64,
    pub probability: f64,
}

/// Exact probability mass function of an estimator taking `values[b]` with
/// probability `probs[b]`. Values closer than `merge_tol` are merged.
pub fn exact_pmf(values: &[f64], probs: &[f64], merge_tol: f64) -> Result<Vec<MassPoint>> {
    if values.len() != probs.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            found: probs.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(probs.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points: Vec<MassPoint> = Vec::new();
    for (v, p) in pairs {
        if p <= 0.0 {
            continue;
        }
        match points.last_mut() {
            Some(last) if (v - last.value).abs() <= merge_tol => last.probability += p,
            _ => points.push(MassPoint {
                value: v,
                probability: p,
            }),
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..101).map(|i| ((i * 37) % 19) as f64 - 4.5).collect();
        let whole: Accumulator = xs.iter().copied().collect();
        let mut left: Accumulator = xs[..40].iter().copied().collect();
        let right: Accumulator = xs[40..].iter().copied().collect();
        left.merge(&right);
        assert_eq!(left.count, whole.count);
        assert!((left.mean - whole.mean).abs() < 1e-12);
        assert!((left.m2 - whole.m2).abs() < 1e-9);
        assert_eq!((left.min, left.max), (whole.min, whole.max));
    }

    #[test]
    fn groups_take_remainder_first() {
        // Groups [0,1,2] [3,4] [5,6] -> means 1, 3.5, 5.5.
        let xs: Vec<f64> = (0..7).map(f64::from).collect();
        assert_eq!(median_of_means(&xs, 3).unwrap(), 3.5);
        assert!(median_of_means(&xs, 1).is_err());
        assert!(median_of_means(&xs, 8).is_err());
    }

    #[test]
    fn histogram_modes() {
        let xs = [5.0, -1.0, -1.0, 5.0, -1.0];
        let mass = Histogram::mass(&xs).unwrap();
        assert_eq!(mass.bins.len(), 2);
        assert!((mass.total_mass() - 1.0).abs() < 1e-12);
        let binned = Histogram::binned(&xs, 4).unwrap();
        assert!((binned.total_mass() - 1.0).abs() < 1e-9);
        assert_eq!(binned.bins.iter().filter(|b| b.count > 0).count(), 2);
        assert!(Histogram::binned(&xs, 0).is_err());
        assert!(binned.to_csv().starts_with("low,high,count,density\n"));
    }

    #[test]
    fn pmf_merges_equal_values() {
        let pmf = exact_pmf(&[5.0, -1.0, -1.0, -1.0], &[0.5, 0.5, 0.0, 0.0], 1e-9).unwrap();
        assert_eq!(pmf.len(), 2);
        assert_eq!(pmf[0].value, -1.0);
    }
}
