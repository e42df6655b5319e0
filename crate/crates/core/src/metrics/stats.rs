//! Sample statistics.

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample standard deviation; 0 for fewer than two samples.
pub fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let ss: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// Half-width of the normal-approximation 95% confidence interval.
pub fn ci95(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    1.96 * std_dev(v) / (v.len() as f64).sqrt()
}

/// Mean with its 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci95: f64,
    pub n: usize,
}

impl Estimate {
    pub fn of(v: &[f64]) -> Self {
        Estimate {
            mean: mean(v),
            ci95: ci95(v),
            n: v.len(),
        }
    }

    pub fn lo(&self) -> f64 {
        self.mean - self.ci95
    }

    pub fn hi(&self) -> f64 {
        self.mean + self.ci95
    }
}

/// Empirical CDF points `(value, fraction <= value)`, sorted.
pub fn ecdf(v: &[f64]) -> Vec<(f64, f64)> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter().enumerate().map(|(i, &x)| (x, (i + 1) as f64 / n)).collect()
}
