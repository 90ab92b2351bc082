use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::branch::{BeamSplitterConvention, Element, Path};
use crate::error::{Error, Result};

/// One-photon term `w · |p⟩ ⊗ s ⊗ diag(f)`, with `f` the accumulated
/// per-frequency phase.
#[derive(Debug, Clone)]
struct OneBranch {
    path: Path,
    weight: Complex64,
    spatial: Arc<Vec<Complex64>>,
    phase: Arc<Vec<Complex64>>,
}

/// Runs one coherent spatial mode through the element sequence. The spectral
/// part is a diagonal mixture with probabilities `spectral_weights`.
pub fn one_photon_port_probability(
    mode: &[Complex64],
    spectral_weights: &[f64],
    offsets: &[f64],
    pump_frequency: f64,
    convention: BeamSplitterConvention,
    elements: &[Element],
) -> Result<[f64; 2]> {
    let mut branches = vec![OneBranch {
        path: Path::A,
        weight: Complex64::new(1.0, 0.0),
        spatial: Arc::new(mode.to_vec()),
        phase: Arc::new(vec![Complex64::new(1.0, 0.0); offsets.len()]),
    }];
    let mut relabeled = false;
    for e in elements {
        if relabeled {
            return Err(Error::InvalidElement(format!(
                "{e:?} after the outputs were relabeled"
            )));
        }
        let mut next = Vec::new();
        match *e {
            Element::BeamSplitter => {
                for b in &branches {
                    for (p, c) in convention.outputs(b.path) {
                        next.push(OneBranch {
                            path: p,
                            weight: b.weight * c,
                            ..b.clone()
                        });
                    }
                }
            }
            Element::Delay { arm, tau } => {
                let ph: Vec<Complex64> = offsets
                    .iter()
                    .map(|w| Complex64::from_polar(1.0, -w * tau))
                    .collect();
                let carrier = Complex64::from_polar(1.0, -0.5 * pump_frequency * tau);
                let mut cache: HashMap<usize, Arc<Vec<Complex64>>> = HashMap::new();
                for b in &branches {
                    let mut nb = b.clone();
                    if b.path.arm() == Some(arm) {
                        nb.weight *= carrier;
                        nb.phase =
                            Arc::clone(cache.entry(Arc::as_ptr(&b.phase) as usize).or_insert_with(
                                || Arc::new(b.phase.iter().zip(&ph).map(|(a, c)| a * c).collect()),
                            ));
                    }
                    next.push(nb);
                }
            }
            Element::SpatialFlip { arm } => {
                let mut cache: HashMap<usize, Arc<Vec<Complex64>>> = HashMap::new();
                for b in &branches {
                    let mut nb = b.clone();
                    if b.path.arm() == Some(arm) {
                        nb.spatial = Arc::clone(
                            cache
                                .entry(Arc::as_ptr(&b.spatial) as usize)
                                .or_insert_with(|| {
                                    Arc::new(b.spatial.iter().rev().copied().collect())
                                }),
                        );
                    }
                    next.push(nb);
                }
            }
            Element::RelabelOutputs => {
                relabeled = true;
                for b in &branches {
                    next.push(OneBranch {
                        path: b.path.relabeled(),
                        ..b.clone()
                    });
                }
            }
        }
        branches = merge(next);
    }
    if !relabeled {
        return Err(Error::IncompletePipeline);
    }
    let prob = |q: Path| {
        let group: Vec<&OneBranch> = branches.iter().filter(|b| b.path == q).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for a in &group {
            for b in &group {
                let s: Complex64 = a
                    .spatial
                    .iter()
                    .zip(b.spatial.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                if s.norm_sqr() == 0.0 {
                    continue;
                }
                let f: Complex64 = a
                    .phase
                    .iter()
                    .zip(b.phase.iter())
                    .zip(spectral_weights)
                    .map(|((x, y), p)| x.conj() * y * p)
                    .sum();
                total += a.weight.conj() * b.weight * s * f;
            }
        }
        total.re
    };
    Ok([prob(Path::C), prob(Path::D)])
}

fn merge(branches: Vec<OneBranch>) -> Vec<OneBranch> {
    let mut out: Vec<OneBranch> = Vec::new();
    let mut index: HashMap<(Path, usize, usize), usize> = HashMap::new();
    for b in branches {
        let key = (
            b.path,
            Arc::as_ptr(&b.spatial) as usize,
            Arc::as_ptr(&b.phase) as usize,
        );
        match index.get(&key) {
            Some(&j) => out[j].weight += b.weight,
            None => {
                index.insert(key, out.len());
                out.push(b);
            }
        }
    }
    out.retain(|b| b.weight.norm_sqr() > 1e-28);
    out
}

/// Singles at both ports, background 1, for a mixture of coherent spatial
/// modes `(λ_j, u_j)`: `Σ_j λ_j · 2 P_port(u_j)`.
pub fn mixture_singles(
    modes: &[(f64, Vec<Complex64>)],
    spectral_weights: &[f64],
    offsets: &[f64],
    pump_frequency: f64,
    convention: BeamSplitterConvention,
    elements: &[Element],
) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (lambda, u) in modes {
        let p = one_photon_port_probability(
            u,
            spectral_weights,
            offsets,
            pump_frequency,
            convention,
            elements,
        )?;
        out[0] += 2.0 * lambda * p[0];
        out[1] += 2.0 * lambda * p[1];
    }
    Ok(out)
}
