//! Visibilities, fringe periods, HOM-dip width and a complementarity summary
//! extracted from sampled interferograms. Delays are in seconds.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::Interferogram;

/// Fewest samples per detected fringe period.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 4.0;
/// A fringe must complete this many cycles inside the scan; slower
/// structure counts as envelope.
pub const MIN_FRINGE_CYCLES: f64 = 8.0;
/// Fringe magnitude relative to DC below which a trace is flat.
pub const NO_FRINGE_RATIO: f64 = 1e-6;
/// Shallowest dip that is still reported.
pub const MIN_DIP_DEPTH: f64 = 1e-3;

/// `(max - min)/(max + min)`.
pub fn visibility(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() || samples.iter().any(|&s| !(s >= -1e-9)) {
        return Err(Error::EmptyOrNegative);
    }
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    if !(max > 0.0) {
        return Err(Error::EmptyOrNegative);
    }
    Ok(((max - min) / (max + min)).clamp(0.0, 1.0))
}

fn uniform_step(tau: &[f64]) -> Result<f64> {
    if tau.len() < 8 {
        return Err(Error::UnderResolved(format!("{} samples", tau.len())));
    }
    let step = (tau[tau.len() - 1] - tau[0]) / (tau.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::InvalidScan("delays must increase".into()));
    }
    let uniform = tau
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-6 * step);
    if !uniform {
        return Err(Error::InvalidScan("delay grid is not uniform".into()));
    }
    Ok(step)
}

fn check_lengths(tau: &[f64], samples: &[f64]) -> Result<()> {
    if tau.len() != samples.len() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Period of the strongest fringe, from the zero-padded DFT magnitude with a
/// parabolic refinement of the peak bin.
pub fn fringe_period(tau: &[f64], samples: &[f64]) -> Result<f64> {
    check_lengths(tau, samples)?;
    let dt = uniform_step(tau)?;
    let n = samples.len();
    let dc: f64 = samples.iter().sum::<f64>().abs();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let len = (8 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|&s| Complex64::new(s - mean, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(len)
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf.iter().map(|c| c.norm()).collect();
    let span = dt * (n - 1) as f64;
    let first = ((MIN_FRINGE_CYCLES / span) * len as f64 * dt)
        .ceil()
        .max(1.0) as usize;
    let half = len / 2;
    if first + 1 >= half {
        return Err(Error::UnderResolved(
            "scan too short to hold a fringe".into(),
        ));
    }
    let (k, &peak) = mag[first..half]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, m)| (j + first, m))
        .expect("non-empty search band");
    if !(peak >= NO_FRINGE_RATIO * dc) || peak == 0.0 {
        return Err(Error::NoFringe);
    }
    let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom != 0.0 {
        0.5 * (a - c) / denom
    } else {
        0.0
    };
    let freq = (k as f64 + shift) / (len as f64 * dt);
    let period = 1.0 / freq;
    if period / dt < MIN_SAMPLES_PER_PERIOD {
        return Err(Error::UnderResolved(format!(
            "{:.2} samples per period, need {MIN_SAMPLES_PER_PERIOD}",
            period / dt
        )));
    }
    Ok(period)
}

/// Keeps Fourier components with angular frequency at most `cutoff`. The
/// trace is mirror-extended first so its ends do not ring.
pub fn lowpass(tau: &[f64], samples: &[f64], cutoff: f64) -> Result<Vec<f64>> {
    check_lengths(tau, samples)?;
    let dt = uniform_step(tau)?;
    let n = samples.len();
    let ext: Vec<f64> = samples
        .iter()
        .copied()
        .chain(samples[1..n - 1].iter().rev().copied())
        .collect();
    let len = ext.len();
    let mut buf: Vec<Complex64> = ext.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for (k, x) in buf.iter_mut().enumerate() {
        let j = k.min(len - k);
        let omega = 2.0 * PI * j as f64 / (len as f64 * dt);
        if omega > cutoff {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    Ok(buf[..n].iter().map(|c| c.re / len as f64).collect())
}

/// Removes the pump-frequency fringe, leaving the slow dip envelope.
pub fn remove_fringes(tau: &[f64], samples: &[f64], pump_frequency: f64) -> Result<Vec<f64>> {
    lowpass(tau, samples, 0.25 * pump_frequency)
}

/// Full width at half depth of a dip below a baseline of 1, from linear
/// interpolation between samples.
pub fn hom_dip_fwhm(tau: &[f64], dip: &[f64]) -> Result<f64> {
    check_lengths(tau, dip)?;
    if dip.is_empty() {
        return Err(Error::EmptyOrNegative);
    }
    let (imin, &min) = dip
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let depth = 1.0 - min;
    if !(depth >= MIN_DIP_DEPTH) {
        return Err(Error::NoDip);
    }
    let level = 1.0 - 0.5 * depth;
    let cross = |j0: usize, j1: usize| {
        let t = (level - dip[j0]) / (dip[j1] - dip[j0]);
        tau[j0] + t * (tau[j1] - tau[j0])
    };
    let right = (imin + 1..dip.len())
        .find(|&j| dip[j] >= level)
        .map(|j| cross(j - 1, j));
    let left = (0..imin)
        .rev()
        .find(|&j| dip[j] >= level)
        .map(|j| cross(j + 1, j));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::UnderResolved("dip extends past the scan".into())),
    }
}

/// Least-squares fit `s ≈ c + A cos(ωτ - φ)` to the trace with its slow part
/// (below ω/2) removed. Returns `(A, φ)`.
pub fn sinusoid_component(tau: &[f64], samples: &[f64], omega: f64) -> Result<(f64, f64)> {
    let slow = lowpass(tau, samples, 0.5 * omega)?;
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for ((&t, &s), &l) in tau.iter().zip(samples).zip(&slow) {
        let row = Vector3::new(1.0, (omega * t).cos(), (omega * t).sin());
        ata += row * row.transpose();
        atb += row * (s - l);
    }
    let x = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::UnderResolved("sinusoid fit is singular".into()))?;
    Ok((x[1].hypot(x[2]), x[2].atan2(x[1])))
}

/// Summary of one pair of singles and coincidence scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityReport {
    pub v1: f64,
    pub v12: f64,
    pub complementarity_sum: f64,
    pub window: (f64, f64),
    pub fringe_period_singles: Option<f64>,
    pub fringe_period_coincidence: Option<f64>,
    pub hom_fwhm: Option<f64>,
}

fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoFringe) | Err(Error::NoDip) => Ok(None),
        Err(e) => Err(e),
    }
}

fn windowed(tau: &[f64], samples: &[f64], window: (f64, f64)) -> Vec<f64> {
    tau.iter()
        .zip(samples)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(_, s)| *s)
        .collect()
}

/// Visibilities over `window` (default: ±3 singles periods about zero
/// delay, or the scan center when zero is outside it); periods and dip width
/// over the whole scan. `hom_fwhm` is absent when the dip is not contained.
pub fn report(
    singles: (&[f64], &[f64]),
    coincidence: (&[f64], &[f64]),
    window: Option<(f64, f64)>,
) -> Result<VisibilityReport> {
    let (tau, s) = singles;
    let (tau_c, c) = coincidence;
    check_lengths(tau, s)?;
    check_lengths(tau_c, c)?;
    if tau != tau_c {
        return Err(Error::GridMismatch);
    }
    visibility(s)?;
    visibility(c)?;
    let p1 = optional(fringe_period(tau, s))?;
    let p12 = optional(fringe_period(tau, c))?;
    let (lo, hi) = (tau[0], tau[tau.len() - 1]);
    let window = window.unwrap_or_else(|| {
        let half = p1.map(|p| 3.0 * p).or(p12.map(|p| 6.0 * p));
        let center = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            0.5 * (lo + hi)
        };
        match half {
            Some(h) if windowed(tau, s, (center - h, center + h)).len() >= 2 => {
                (center - h, center + h)
            }
            _ => (lo, hi),
        }
    });
    let ws = windowed(tau, s, window);
    let wc = windowed(tau, c, window);
    if ws.len() < 2 {
        return Err(Error::InvalidScan(format!(
            "window [{:e}, {:e}] holds fewer than two samples",
            window.0, window.1
        )));
    }
    let v1 = visibility(&ws)?;
    let v12 = visibility(&wc)?;
    let pump = p12.map(|p| 2.0 * PI / p).or(p1.map(|p| 4.0 * PI / p));
    let dip = match pump {
        Some(wp) => hom_dip_fwhm(tau, &remove_fringes(tau, c, wp)?),
        None => hom_dip_fwhm(tau, c),
    };
    // A dip wider than the scan is left out rather than failing the report.
    let hom_fwhm = match dip {
        Err(Error::UnderResolved(_)) => None,
        other => optional(other)?,
    };
    Ok(VisibilityReport {
        v1,
        v12,
        complementarity_sum: v1 * v1 + v12 * v12,
        window,
        fringe_period_singles: p1,
        fringe_period_coincidence: p12,
        hom_fwhm,
    })
}

pub fn report_interferogram(
    ig: &Interferogram,
    window: Option<(f64, f64)>,
) -> Result<VisibilityReport> {
    report((&ig.tau, &ig.singles), (&ig.tau, &ig.coincidences), window)
}
