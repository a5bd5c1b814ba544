//! Least-squares fit of a Hong–Ou–Mandel coincidence dip.
//!
//! Model: `C(d) = C∞ · (1 − V · exp(−d² / (2w²)))`, dip centred at zero delay.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::bootstrap::EstimateWithError;
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 5;
const MAX_ITERATIONS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipPoint {
    pub delay_ps: f64,
    pub coincidences: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HomFit {
    pub visibility: EstimateWithError,
    /// Gaussian width `w` in the delay unit; `None` when the data show no dip.
    pub width: Option<f64>,
    pub baseline: f64,
    pub iterations: usize,
}

pub fn dip_model(delay: f64, baseline: f64, visibility: f64, width: f64) -> f64 {
    baseline * (1.0 - visibility * (-delay * delay / (2.0 * width * width)).exp())
}

/// Reads `delay_ps,coincidences` CSV.
pub fn read_dip_csv<R: std::io::Read>(reader: R) -> Result<Vec<DipPoint>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["delay_ps", "coincidences"] {
        return Err(Error::Parse(format!(
            "expected header \"delay_ps,coincidences\", found {:?}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

fn residuals_and_jacobian(points: &[DipPoint], theta: &Vector3<f64>) -> (Vec<f64>, Vec<[f64; 3]>) {
    let (c, v, w) = (theta[0], theta[1], theta[2]);
    let mut r = Vec::with_capacity(points.len());
    let mut jac = Vec::with_capacity(points.len());
    for pt in points {
        let d = pt.delay_ps;
        let e = (-d * d / (2.0 * w * w)).exp();
        r.push(pt.coincidences - c * (1.0 - v * e));
        jac.push([1.0 - v * e, -c * e, -c * v * e * d * d / (w * w * w)]);
    }
    (r, jac)
}

fn normal_equations(r: &[f64], jac: &[[f64; 3]]) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for (ri, row) in r.iter().zip(jac) {
        for i in 0..3 {
            jtr[i] += row[i] * ri;
            for j in 0..3 {
                jtj[(i, j)] += row[i] * row[j];
            }
        }
    }
    (jtj, jtr)
}

fn rss(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn initial_guess(points: &[DipPoint]) -> Vector3<f64> {
    let c0 = points.iter().map(|p| p.coincidences).fold(f64::MIN, f64::max);
    let cmin = points.iter().map(|p| p.coincidences).fold(f64::MAX, f64::min);
    let v0 = (1.0 - cmin / c0).clamp(0.01, 1.0);
    let half = c0 * (1.0 - v0 / 2.0);
    let hwhm = points
        .iter()
        .filter(|p| p.coincidences < half)
        .map(|p| p.delay_ps.abs())
        .fold(0.0, f64::max);
    let span = points.iter().map(|p| p.delay_ps).fold(f64::MIN, f64::max)
        - points.iter().map(|p| p.delay_ps).fold(f64::MAX, f64::min);
    let w0 = if hwhm > 0.0 {
        hwhm / (2.0 * std::f64::consts::LN_2).sqrt()
    } else {
        span / 10.0
    };
    Vector3::new(c0, v0, w0.max(f64::EPSILON))
}

/// Levenberg–Marquardt fit of the Gaussian dip. The visibility sigma comes
/// from the covariance `s² (JᵀJ)⁻¹` at the optimum.
pub fn hom_dip_fit(points: &[DipPoint]) -> Result<HomFit> {
    if points.len() < MIN_POINTS {
        return Err(Error::FitFailed(format!(
            "{} points given, at least {MIN_POINTS} needed",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|p| !p.delay_ps.is_finite() || !p.coincidences.is_finite())
    {
        return Err(Error::FitFailed("non-finite data point".into()));
    }
    let max = points.iter().map(|p| p.coincidences).fold(f64::MIN, f64::max);
    let min = points.iter().map(|p| p.coincidences).fold(f64::MAX, f64::min);
    if max <= 0.0 {
        return Err(Error::FitFailed("no positive coincidence counts".into()));
    }
    if max - min <= 1e-12 * max.abs() {
        let mean = points.iter().map(|p| p.coincidences).sum::<f64>() / points.len() as f64;
        return Ok(HomFit {
            visibility: EstimateWithError::new(0.0, 0.0),
            width: None,
            baseline: mean,
            iterations: 0,
        });
    }

    let mut theta = initial_guess(points);
    let (mut r, mut jac) = residuals_and_jacobian(points, &theta);
    let mut cost = rss(&r);
    let scale = points.iter().map(|p| p.coincidences.powi(2)).sum::<f64>();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(&r, &jac);
        let mut damped = jtj;
        for i in 0..3 {
            damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = theta + step;
        let (r_new, jac_new) = residuals_and_jacobian(points, &trial);
        let cost_new = rss(&r_new);
        if cost_new.is_finite() && cost_new <= cost {
            let small_step = (0..3).all(|i| step[i].abs() <= 1e-12 * (theta[i].abs() + 1e-12));
            let small_gain = cost - cost_new <= 1e-15 * cost;
            theta = trial;
            r = r_new;
            jac = jac_new;
            cost = cost_new;
            lambda = (lambda / 10.0).max(1e-15);
            if small_step || small_gain || cost <= 1e-30 * scale {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e16 {
                // No downhill direction left: at a minimum to working precision.
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::FitFailed(format!(
            "no convergence after {MAX_ITERATIONS} iterations"
        )));
    }

    let dof = (points.len() - 3) as f64;
    let s2 = cost / dof;
    let (jtj, _) = normal_equations(&r, &jac);
    let cov = jtj
        .try_inverse()
        .ok_or_else(|| Error::FitFailed("singular normal matrix at optimum".into()))?;
    let v_sigma = (s2 * cov[(1, 1)]).max(0.0).sqrt();
    Ok(HomFit {
        visibility: EstimateWithError::new(theta[1], v_sigma),
        width: Some(theta[2].abs()),
        baseline: theta[0],
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn synthetic(v: f64, w: f64, n: usize, noise: Option<(f64, u64)>) -> Vec<DipPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.map_or(0, |(_, s)| s));
        let normal = Normal::new(0.0, noise.map_or(0.0, |(s, _)| s)).unwrap();
        (0..n)
            .map(|i| {
                let d = -600.0 + 1200.0 * i as f64 / (n - 1) as f64;
                let clean = dip_model(d, 1000.0, v, w);
                DipPoint {
                    delay_ps: d,
                    coincidences: clean * (1.0 + normal.sample(&mut rng)),
                }
            })
            .collect()
    }

    #[test]
    fn noise_free_round_trip() {
        let fit = hom_dip_fit(&synthetic(0.965, 95.0, 41, None)).unwrap();
        assert!((fit.visibility.value - 0.965).abs() < 1e-6, "{fit:?}");
        assert!((fit.width.unwrap() - 95.0).abs() < 1e-4);
        assert!((fit.baseline - 1000.0).abs() < 1e-4);
    }

    #[test]
    fn flat_data_is_degenerate() {
        let pts: Vec<DipPoint> = (0..10)
            .map(|i| DipPoint {
                delay_ps: i as f64 * 50.0 - 250.0,
                coincidences: 800.0,
            })
            .collect();
        let fit = hom_dip_fit(&pts).unwrap();
        assert_eq!(fit.visibility.value, 0.0);
        assert_eq!(fit.width, None);
        assert_eq!(fit.baseline, 800.0);
    }

    #[test]
    fn too_few_points() {
        assert!(hom_dip_fit(&synthetic(0.9, 100.0, 4, None)).is_err());
    }

    #[test]
    fn noisy_fits_cover_truth() {
        let mut covered = 0;
        for seed in 0..100 {
            let fit = hom_dip_fit(&synthetic(0.965, 120.0, 50, Some((0.01, seed)))).unwrap();
            if (fit.visibility.value - 0.965).abs() <= 3.0 * fit.visibility.sigma {
                covered += 1;
            }
        }
        assert!(covered >= 95, "{covered}/100 within 3 sigma");
    }

    #[test]
    fn csv_parsing() {
        let text = "delay_ps,coincidences\n-100,500\n0,40\n100,510\n";
        let pts = read_dip_csv(text.as_bytes()).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1], DipPoint { delay_ps: 0.0, coincidences: 40.0 });
        assert!(read_dip_csv("delay,counts\n1,2\n".as_bytes()).is_err());
        assert!(read_dip_csv("delay_ps,coincidences\n1,x\n".as_bytes()).is_err());
    }
}
