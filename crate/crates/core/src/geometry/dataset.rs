use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth membership of a generated point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    In,
    Out,
}

/// One observation of the linear residual model `|a·θ - b|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub a: Vec<f64>,
    pub b: f64,
    #[serde(default)]
    pub label: Option<Label>,
}

/// `N` observations of dimension `dim` with inlier tolerance `epsilon`.
/// Oracles over a dataset need `N <= 64`.
///
/// Serialized as `{"dim":8,"epsilon":0.1,"points":[{"a":[..],"b":0.93,"label":"in"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset")]
pub struct Dataset {
    dim: usize,
    epsilon: f64,
    points: Vec<DataPoint>,
}

#[derive(Deserialize)]
struct RawDataset {
    dim: usize,
    epsilon: f64,
    points: Vec<DataPoint>,
}

impl TryFrom<RawDataset> for Dataset {
    type Error = Error;

    fn try_from(raw: RawDataset) -> Result<Self> {
        Dataset::new(raw.dim, raw.epsilon, raw.points)
    }
}

impl Dataset {
    pub fn new(dim: usize, epsilon: f64, points: Vec<DataPoint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDataset("dim must be at least 1".into()));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "epsilon {epsilon} must be positive"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidDataset("at least one point required".into()));
        }
        for (i, pt) in points.iter().enumerate() {
            if pt.a.len() != dim {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has {} coefficients, expected {dim}",
                    pt.a.len()
                )));
            }
            if !pt.b.is_finite() || pt.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has non-finite values"
                )));
            }
        }
        Ok(Self {
            dim,
            epsilon,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices labelled as outliers.
    pub fn outliers(&self) -> Vec<usize> {
        self.labelled(Label::Out)
    }

    pub fn inliers(&self) -> Vec<usize> {
        self.labelled(Label::In)
    }

    fn labelled(&self, which: Label) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.label == Some(which))
            .map(|(i, _)| i)
            .collect()
    }

    /// Copy with every `b` and `epsilon` multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| DataPoint {
                b: p.b * c,
                ..p.clone()
            })
            .collect();
        Self::new(self.dim, self.epsilon * c, points)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.dim, epsilon, self.points.clone())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// CSV `index,residual,label` of every point against `theta`.
    pub fn residuals_csv(&self, theta: &[f64]) -> Result<String> {
        let mut out = String::from("index,residual,label\n");
        for (i, p) in self.points.iter().enumerate() {
            let r = residual(theta, p)?;
            let label = match p.label {
                Some(Label::In) => "in",
                Some(Label::Out) => "out",
                None => "",
            };
            writeln!(out, "{i},{r},{label}").expect("string write");
        }
        Ok(out)
    }
}

/// `|a·θ - b|`.
pub fn residual(theta: &[f64], point: &DataPoint) -> Result<f64> {
    if theta.len() != point.a.len() {
        return Err(Error::DimensionMismatch {
            expected: point.a.len(),
            got: theta.len(),
        });
    }
    let fit: f64 = point.a.iter().zip(theta).map(|(a, t)| a * t).sum();
    Ok((fit - point.b).abs())
}

/// Noise bound of generated inliers; also the generated tolerance.
pub const INLIER_NOISE: f64 = 0.1;
/// Largest outlier perturbation magnitude.
pub const OUTLIER_NOISE: f64 = 5.0;

/// Random linear-regression instance with `n_out` gross outliers.
///
/// The model `θ*` and every `a_i` are drawn from `U[-1, 1]^dim`. Inliers get
/// `b = a·θ* + η` with `η ~ U[-0.1, 0.1]`; outliers get `η` uniform on
/// `[-5, -0.1) ∪ (0.1, 5]`. Which points are outliers is a random subset.
/// `epsilon` is `0.1`.
pub fn gen_synthetic(n: usize, n_out: usize, dim: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || n_out >= n {
        return Err(Error::InvalidDataset(format!(
            "need 0 <= outliers < n, got n={n} outliers={n_out}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidDataset("dim must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let outliers = rand::seq::index::sample(&mut rng, n, n_out).into_vec();
    let mut is_out = vec![false; n];
    for i in outliers {
        is_out[i] = true;
    }
    let points = is_out
        .iter()
        .map(|&out| {
            let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let clean: f64 = a.iter().zip(&theta).map(|(x, t)| x * t).sum();
            let (noise, label) = if out {
                // (0, 1] so the magnitude stays strictly above the inlier band.
                let u = 1.0 - rng.gen::<f64>();
                let mag = INLIER_NOISE + (OUTLIER_NOISE - INLIER_NOISE) * u;
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                (sign * mag, Label::Out)
            } else {
                (rng.gen_range(-INLIER_NOISE..=INLIER_NOISE), Label::In)
            };
            DataPoint {
                a,
                b: clean + noise,
                label: Some(label),
            }
        })
        .collect();
    Dataset::new(dim, INLIER_NOISE, points)
}

/// The model `θ*` used by [`gen_synthetic`] for a given seed and dimension.
pub fn synthetic_model(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}
