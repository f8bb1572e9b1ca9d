//! Study analytics: descriptive statistics, paired t-tests, Van der Laan
//! acceptance scoring and anticipation scoring.

pub mod questionnaire;
mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use special::{ln_gamma, regularized_incomplete_beta};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("paired samples differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("non-finite sample value")]
    NonFinite,
    #[error("all paired differences equal {0}: the t statistic is undefined")]
    Degenerate(f64),
    #[error("degrees of freedom must be >= 1, got {0}")]
    InvalidDf(u32),
    #[error("item {index} = {value} is outside [-2, 2]")]
    ItemOutOfRange { index: usize, value: i32 },
    #[error("expected 9 questionnaire items, got {0}")]
    ItemCount(usize),
    #[error("no answers to score")]
    NoAnswers,
    #[error("{0}")]
    Input(String),
}

pub fn mean(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::TooFewValues { needed: 1, got: 0 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Mean and sample standard deviation (n - 1 denominator).
pub fn mean_sd(values: &[f64]) -> Result<(f64, f64), StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewValues {
            needed: 2,
            got: values.len(),
        });
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Ok((m, (ss / (values.len() - 1) as f64).sqrt()))
}

/// Upper-tail probability `P(T > t)` of Student's t with `df` degrees of
/// freedom, via the regularized incomplete beta function.
pub fn t_sf(t: f64, df: u32) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::InvalidDf(df));
    }
    if t.is_nan() {
        return Err(StatsError::NonFinite);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let nu = f64::from(df);
    let x = nu / (nu + t * t);
    let tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x);
    Ok(if t > 0.0 { tail } else { 1.0 - tail })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSamples {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PairedSamples {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self, StatsError> {
        if a.len() != b.len() {
            return Err(StatsError::LengthMismatch { a: a.len(), b: b.len() });
        }
        if a.is_empty() {
            return Err(StatsError::TooFewValues { needed: 1, got: 0 });
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(PairedSamples { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn differences(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(x, y)| x - y).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tails {
    One,
    Two,
}

/// Alternative hypothesis on the mean difference `a - b`. One-sided tests
/// take an explicit direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

impl Alternative {
    pub fn tails(self) -> Tails {
        match self {
            Alternative::TwoSided => Tails::Two,
            Alternative::Greater | Alternative::Less => Tails::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: u32,
    pub p: f64,
    pub tails: Tails,
    pub alternative: Alternative,
}

/// Two-sided p-value for a t statistic.
pub fn two_sided_p(t: f64, df: u32) -> Result<f64, StatsError> {
    let upper = t_sf(t.abs(), df)?;
    Ok((2.0 * upper).min(1.0))
}

pub fn paired_t_test(samples: &PairedSamples, alternative: Alternative) -> Result<TTestResult, StatsError> {
    let n = samples.len();
    if n < 2 {
        return Err(StatsError::TooFewValues { needed: 2, got: n });
    }
    let d = samples.differences();
    let df = (n - 1) as u32;
    let tails = alternative.tails();
    if d.iter().all(|&v| v == d[0]) {
        if d[0] == 0.0 {
            return Ok(TTestResult {
                t: 0.0,
                df,
                p: 1.0,
                tails,
                alternative,
            });
        }
        return Err(StatsError::Degenerate(d[0]));
    }
    let (m, sd) = mean_sd(&d)?;
    let t = m / (sd / (n as f64).sqrt());
    let p = match alternative {
        Alternative::TwoSided => two_sided_p(t, df)?,
        Alternative::Greater => t_sf(t, df)?,
        Alternative::Less => t_sf(-t, df)?,
    };
    Ok(TTestResult {
        t,
        df,
        p,
        tails,
        alternative,
    })
}

/// Nine ratings in [-2, 2], already oriented so +2 is the positive pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanDerLaanResponse {
    items: [i8; 9],
}

impl VanDerLaanResponse {
    pub fn new(items: &[i32]) -> Result<Self, StatsError> {
        if items.len() != 9 {
            return Err(StatsError::ItemCount(items.len()));
        }
        let mut out = [0i8; 9];
        for (i, &v) in items.iter().enumerate() {
            if !(-2..=2).contains(&v) {
                return Err(StatsError::ItemOutOfRange { index: i + 1, value: v });
            }
            out[i] = v as i8;
        }
        Ok(VanDerLaanResponse { items: out })
    }

    pub fn items(&self) -> &[i8; 9] {
        &self.items
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceScores {
    pub usefulness: f64,
    pub satisfaction: f64,
}

/// Usefulness is the mean of items 1, 3, 5, 7, 9; satisfaction of 2, 4, 6, 8.
pub fn van_der_laan(resp: &VanDerLaanResponse) -> AcceptanceScores {
    let avg = |idx: &[usize]| idx.iter().map(|&i| f64::from(resp.items[i - 1])).sum::<f64>() / idx.len() as f64;
    AcceptanceScores {
        usefulness: avg(&[1, 3, 5, 7, 9]),
        satisfaction: avg(&[2, 4, 6, 8]),
    }
}

/// Fraction of `(chosen, correct)` pairs that match.
pub fn anticipation_score(answers: &[(usize, usize)]) -> Result<f64, StatsError> {
    if answers.is_empty() {
        return Err(StatsError::NoAnswers);
    }
    let hits = answers.iter().filter(|(c, k)| c == k).count();
    Ok(hits as f64 / answers.len() as f64)
}
