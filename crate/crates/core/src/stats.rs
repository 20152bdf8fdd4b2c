use serde::Serialize;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Mean, sample standard deviation and standard error of a set of values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub mean: f64,
    pub std: f64,
    pub sem: f64,
    pub count: usize,
}

impl EnsembleStats {
    /// Returns `None` for an empty slice. A single value has zero spread.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = compensated_sum(values.iter().copied()) / n as f64;
        let var = if n > 1 {
            compensated_sum(values.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        let std = var.sqrt();
        Some(EnsembleStats {
            mean,
            std,
            sem: std / (n as f64).sqrt(),
            count: n,
        })
    }
}
