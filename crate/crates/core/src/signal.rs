//! Simulated univariate signals with an optional change point.
//!
//! A signal has `m ∈ [100, 200]` values of standard Gaussian noise. Anomalous
//! signals switch regime at a 1-based change index `j_s` drawn uniformly from
//! `⌊2m/10⌋..=⌊8m/10⌋`; every position `j ≥ j_s` follows the shifted law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::{Error, Result};

pub const MIN_LEN: usize = 100;
pub const MAX_LEN: usize = 200;

/// Class of a simulated signal. The integer codes are stable and used in
/// every file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnomalyClass {
    NoAnomaly = 0,
    VarianceShift = 1,
    MeanShift = 2,
    SlopeShift = 3,
}

impl AnomalyClass {
    pub const ALL: [AnomalyClass; 4] =
        [AnomalyClass::NoAnomaly, AnomalyClass::VarianceShift, AnomalyClass::MeanShift, AnomalyClass::SlopeShift];
    pub const COUNT: usize = 4;

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn short_name(self) -> &'static str {
        match self {
            AnomalyClass::NoAnomaly => "no change",
            AnomalyClass::VarianceShift => "variance",
            AnomalyClass::MeanShift => "mean",
            AnomalyClass::SlopeShift => "trend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DatasetVariant {
    A,
    B,
}

impl DatasetVariant {
    /// Closed interval from which the post-change mean is drawn.
    pub fn mean_shift_range(self) -> (f64, f64) {
        match self {
            DatasetVariant::A => (1.01, 5.0),
            DatasetVariant::B => (0.505, 2.5),
        }
    }
}

impl std::str::FromStr for DatasetVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(DatasetVariant::A),
            "B" | "b" => Ok(DatasetVariant::B),
            other => Err(Error::invalid(format!("unknown dataset variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for DatasetVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DatasetVariant::A => "A",
            DatasetVariant::B => "B",
        })
    }
}

pub const VARIANCE_SHIFT_RANGE: (f64, f64) = (1.01, 5.0);
pub const SLOPE_SHIFT_RANGE: (f64, f64) = (0.02, 3.0);

/// One simulated observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub id: u64,
    pub label: AnomalyClass,
    pub values: Vec<f64>,
    /// 1-based position of the first shifted value.
    pub change_index: Option<usize>,
    /// σ, μ or λ depending on the class.
    pub shift_param: Option<f64>,
}

impl Signal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks the metadata invariants tying label, length and change point.
    pub fn validate(&self) -> Result<()> {
        let m = self.values.len();
        if !(MIN_LEN..=MAX_LEN).contains(&m) {
            return Err(Error::invalid(format!("signal {}: length {m} outside [100, 200]", self.id)));
        }
        match (self.label, self.change_index, self.shift_param) {
            (AnomalyClass::NoAnomaly, None, None) => Ok(()),
            (AnomalyClass::NoAnomaly, _, _) => {
                Err(Error::invalid(format!("signal {}: normal signal carries change metadata", self.id)))
            }
            (_, Some(j), Some(_)) => {
                let (lo, hi) = change_point_bounds(m);
                if (lo..=hi).contains(&j) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("signal {}: change index {j} outside [{lo}, {hi}]", self.id)))
                }
            }
            _ => Err(Error::invalid(format!("signal {}: anomalous signal lacks change metadata", self.id))),
        }
    }
}

/// Inclusive bounds `(⌊2m/10⌋, ⌊8m/10⌋)` for the change index.
pub fn change_point_bounds(m: usize) -> (usize, usize) {
    (2 * m / 10, 8 * m / 10)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub variant: DatasetVariant,
    pub count_normal: usize,
    pub count_per_anomaly: usize,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec { variant: DatasetVariant::A, count_normal: 3000, count_per_anomaly: 1000, seed: 0 }
    }
}

impl DatasetSpec {
    pub fn new(variant: DatasetVariant, seed: u64) -> Self {
        DatasetSpec { variant, seed, ..Default::default() }
    }

    pub fn total(&self) -> usize {
        self.count_normal + 3 * self.count_per_anomaly
    }

    /// Class of the signal with the given id. Ids are laid out class by class.
    pub fn class_of(&self, id: u64) -> AnomalyClass {
        let id = id as usize;
        if id < self.count_normal {
            AnomalyClass::NoAnomaly
        } else {
            let k = (id - self.count_normal) / self.count_per_anomaly.max(1);
            AnomalyClass::ALL[1 + k.min(2)]
        }
    }
}

/// Generator stream for one signal: the dataset seed picks the key, the id
/// picks the ChaCha stream.
pub fn signal_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn sample_length<R: Rng + ?Sized>(rng: &mut R) -> usize {
    rng.random_range(MIN_LEN..=MAX_LEN)
}

fn sample_change_index<R: Rng + ?Sized>(rng: &mut R, m: usize) -> usize {
    let (lo, hi) = change_point_bounds(m);
    rng.random_range(lo..=hi)
}

fn sample_closed<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    Uniform::new_inclusive(lo, hi).expect("static bounds").sample(rng)
}

fn check_len(m: usize) -> Result<()> {
    if (MIN_LEN..=MAX_LEN).contains(&m) {
        Ok(())
    } else {
        Err(Error::invalid(format!("signal length {m} outside [100, 200]")))
    }
}

/// Pure noise: `m` i.i.d. N(0, 1) draws.
pub fn gen_normal<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Result<Signal> {
    check_len(m)?;
    let values = (0..m).map(|_| StandardNormal.sample(rng)).collect();
    Ok(Signal { id: 0, label: AnomalyClass::NoAnomaly, values, change_index: None, shift_param: None })
}

pub fn gen_variance_shift<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Result<Signal> {
    check_len(m)?;
    let change = sample_change_index(rng, m);
    let sigma = sample_closed(rng, VARIANCE_SHIFT_RANGE);
    shifted(rng, m, AnomalyClass::VarianceShift, change, sigma)
}

pub fn gen_mean_shift<R: Rng + ?Sized>(rng: &mut R, m: usize, variant: DatasetVariant) -> Result<Signal> {
    check_len(m)?;
    let change = sample_change_index(rng, m);
    let mu = sample_closed(rng, variant.mean_shift_range());
    shifted(rng, m, AnomalyClass::MeanShift, change, mu)
}

pub fn gen_slope_shift<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Result<Signal> {
    check_len(m)?;
    let change = sample_change_index(rng, m);
    let lambda = sample_closed(rng, SLOPE_SHIFT_RANGE);
    shifted(rng, m, AnomalyClass::SlopeShift, change, lambda)
}

/// Draws a signal of class `class` with the change point and shift parameter
/// fixed by the caller. Time stamps are the integer positions, so the slope
/// regime has mean `λ·(j − j_s)`.
pub fn shifted<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    class: AnomalyClass,
    change_index: usize,
    param: f64,
) -> Result<Signal> {
    if class == AnomalyClass::NoAnomaly {
        return Err(Error::invalid("shifted() needs an anomalous class"));
    }
    if change_index == 0 || change_index > m {
        return Err(Error::invalid(format!("change index {change_index} outside 1..={m}")));
    }
    let values = (1..=m)
        .map(|j| {
            let z: f64 = StandardNormal.sample(rng);
            if j < change_index {
                return z;
            }
            match class {
                AnomalyClass::VarianceShift => param * z,
                AnomalyClass::MeanShift => param + z,
                AnomalyClass::SlopeShift => param * (j - change_index) as f64 + z,
                AnomalyClass::NoAnomaly => unreachable!(),
            }
        })
        .collect();
    Ok(Signal { id: 0, label: class, values, change_index: Some(change_index), shift_param: Some(param) })
}

/// Generates the signal with the given id. Depends only on `(spec, id)`.
pub fn gen_signal(spec: &DatasetSpec, id: u64) -> Signal {
    let mut rng = signal_rng(spec.seed, id);
    let m = sample_length(&mut rng);
    let mut signal = match spec.class_of(id) {
        AnomalyClass::NoAnomaly => gen_normal(&mut rng, m),
        AnomalyClass::VarianceShift => gen_variance_shift(&mut rng, m),
        AnomalyClass::MeanShift => gen_mean_shift(&mut rng, m, spec.variant),
        AnomalyClass::SlopeShift => gen_slope_shift(&mut rng, m),
    }
    .expect("sampled length is in range");
    signal.id = id;
    signal
}

pub fn gen_dataset(spec: &DatasetSpec) -> Vec<Signal> {
    gen_dataset_with(spec, Exec::default())
}

pub fn gen_dataset_with(spec: &DatasetSpec, exec: Exec) -> Vec<Signal> {
    exec.map_range(spec.total(), |id| gen_signal(spec, id as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_signal_shape() {
        let mut rng = signal_rng(7, 0);
        let s = gen_normal(&mut rng, 100).unwrap();
        assert_eq!(s.len(), 100);
        let mean = s.values.iter().sum::<f64>() / 100.0;
        assert!(mean.abs() < 0.5, "mean {mean}");
        s.validate().unwrap();
    }

    #[test]
    fn rejects_bad_lengths() {
        let mut rng = signal_rng(0, 0);
        assert!(gen_normal(&mut rng, 99).is_err());
        assert!(gen_slope_shift(&mut rng, 201).is_err());
    }

    #[test]
    fn shift_parameters_respect_ranges() {
        for id in 0..2000 {
            let mut rng = signal_rng(3, id);
            let m = sample_length(&mut rng);
            let v = gen_variance_shift(&mut rng, m).unwrap();
            let a = gen_mean_shift(&mut rng, m, DatasetVariant::A).unwrap();
            let b = gen_mean_shift(&mut rng, m, DatasetVariant::B).unwrap();
            let s = gen_slope_shift(&mut rng, m).unwrap();
            assert!((1.01..=5.0).contains(&v.shift_param.unwrap()));
            assert!((1.01..=5.0).contains(&a.shift_param.unwrap()));
            assert!((0.505..=2.5).contains(&b.shift_param.unwrap()));
            assert!((0.02..=3.0).contains(&s.shift_param.unwrap()));
            for sig in [&v, &a, &b, &s] {
                sig.validate().unwrap();
            }
        }
    }

    #[test]
    fn slope_starts_at_zero_mean() {
        // Value at j_s has mean λ·0 = 0; with λ = 3 a level offset would show.
        let n = 4000;
        let mut acc = 0.0;
        for id in 0..n {
            let mut rng = signal_rng(11, id);
            let s = shifted(&mut rng, 150, AnomalyClass::SlopeShift, 60, 3.0).unwrap();
            acc += s.values[59];
        }
        assert!((acc / n as f64).abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn small_dataset_counts() {
        let spec = DatasetSpec { count_normal: 4, count_per_anomaly: 1, ..Default::default() };
        let data = gen_dataset(&spec);
        assert_eq!(data.len(), 7);
        let labels: Vec<_> = data.iter().map(|s| s.label.code()).collect();
        assert_eq!(labels, vec![0, 0, 0, 0, 1, 2, 3]);
        let ids: Vec<_> = data.iter().map(|s| s.id).collect();
        assert_eq!(ids, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn signal_independent_of_generation_order() {
        let spec = DatasetSpec { count_normal: 10, count_per_anomaly: 5, seed: 99, ..Default::default() };
        let all = gen_dataset_with(&spec, Exec::Sequential);
        assert_eq!(gen_signal(&spec, 17), all[17]);
        assert_eq!(all, gen_dataset_with(&spec, Exec::Parallel));
    }
}
