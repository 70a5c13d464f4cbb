//! Small statistics helpers shared by the Monte-Carlo drivers.

use serde::Serialize;

/// Sample mean and (n − 1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { n, mean: f64::NAN, std: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { n, mean, std }
    }

    pub fn std_error(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

/// Standard error of the difference of two independent means.
pub fn pooled_std_error(a: &Summary, b: &Summary) -> f64 {
    (a.std_error().powi(2) + b.std_error().powi(2)).sqrt()
}

/// Piecewise-linear cumulative distribution built from density samples on a
/// uniform grid (trapezoid rule), normalized to 1 at the last node.
#[derive(Debug, Clone)]
pub struct GridCdf {
    origin: f64,
    spacing: f64,
    cumulative: Vec<f64>,
}

impl GridCdf {
    pub fn from_density(origin: f64, spacing: f64, density: &[f64]) -> Self {
        let mut cumulative = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * spacing;
            cumulative.push(acc);
        }
        if acc > 0.0 {
            cumulative.iter_mut().for_each(|c| *c /= acc);
        }
        Self { origin, spacing, cumulative }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.origin) / self.spacing;
        if s <= 0.0 {
            return 0.0;
        }
        let last = self.cumulative.len() - 1;
        if s >= last as f64 {
            return 1.0;
        }
        let i = s.floor() as usize;
        let f = s - i as f64;
        self.cumulative[i] * (1.0 - f) + self.cumulative[i + 1] * f
    }
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_basics() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(Summary::of(&[]).mean.is_nan());
        assert_eq!(Summary::of(&[3.0]).std, 0.0);
    }

    #[test]
    fn uniform_cdf_and_ks() {
        let cdf = GridCdf::from_density(0.0, 0.1, &[1.0; 11]);
        assert!((cdf.eval(0.25) - 0.25).abs() < 1e-12);
        assert_eq!(cdf.eval(-1.0), 0.0);
        assert_eq!(cdf.eval(2.0), 1.0);
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_distance(&samples, |x| cdf.eval(x)) - 0.005).abs() < 1e-12);
    }
}
