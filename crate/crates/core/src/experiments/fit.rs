use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub name: String,
    pub exponent: f64,
    pub stderr: f64,
    pub prefactor: f64,
    pub points: usize,
}

pub fn fit_power_law(name: &str, x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Config(format!("{name}: a power-law fit needs at least three points")));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Config(format!("{name}: log fit needs positive finite values")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config(format!("{name}: all abscissae coincide")));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        name: name.to_string(),
        exponent: slope,
        stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        prefactor: intercept.exp(),
        points: lx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.0)).collect();
        let f = fit_power_law("s", &x, &y).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-14);
        assert!((f.prefactor - 3.0).abs() < 1e-13);
        assert!(f.stderr < 1e-14);
    }

    #[test]
    fn noisy_fit_has_stderr() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [1.0, 1.5, 1.6, 2.1, 2.2];
        let f = fit_power_law("n", &x, &y).unwrap();
        assert!(f.stderr > 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_power_law("a", &[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law("b", &[1.0, -2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_power_law("c", &[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
