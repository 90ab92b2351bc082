use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::factor::{PairFactor, Slot};
use crate::error::{Error, Result};
use crate::interferometer::{Arm, InterferometerConfig, InterferometerKind};
use crate::spectral::FrequencyGrid;
use crate::state::{SpatialSector, SpectralSector, TwoPhotonState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Path label of one photon. `C` and `D` only exist after relabeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    A,
    B,
    C,
    D,
}

impl Path {
    pub(crate) fn arm(self) -> Option<Arm> {
        match self {
            Path::A => Some(Arm::A),
            Path::B => Some(Arm::B),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Path::A | Path::C => 0,
            Path::B | Path::D => 1,
        }
    }

    pub(crate) fn relabeled(self) -> Path {
        match self {
            Path::A => Path::C,
            Path::B => Path::D,
            p => p,
        }
    }
}

/// Output port after relabeling. `C` is dark at zero delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    C,
    D,
}

impl Port {
    pub(crate) fn path(self) -> Path {
        match self {
            Port::C => Path::C,
            Port::D => Path::D,
        }
    }

    pub(crate) fn other(self) -> Port {
        match self {
            Port::C => Port::D,
            Port::D => Port::C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    BeamSplitter,
    Delay { arm: Arm, tau: f64 },
    SpatialFlip { arm: Arm },
    RelabelOutputs,
}

impl FromStr for Element {
    type Err = Error;

    /// Accepts `bs`, `delay(b, 1e-14)`, `flip(a)` and `relabel`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownElement(s.clone());
        let arm = |a: &str| match a.trim() {
            "a" => Ok(Arm::A),
            "b" => Ok(Arm::B),
            _ => Err(unknown()),
        };
        let args = |name: &str| {
            s.strip_prefix(name)
                .and_then(|r| r.trim().strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .map(|r| r.split(',').map(str::to_string).collect::<Vec<_>>())
        };
        match s.as_str() {
            "bs" | "beamsplitter" | "beam_splitter" => return Ok(Element::BeamSplitter),
            "relabel" | "relabel_outputs" => return Ok(Element::RelabelOutputs),
            _ => {}
        }
        if let Some(a) = args("delay") {
            if a.len() == 2 {
                let tau = a[1].trim().parse::<f64>().map_err(|_| unknown())?;
                return Ok(Element::Delay {
                    arm: arm(&a[0])?,
                    tau,
                });
            }
        }
        if let Some(a) = args("flip") {
            if a.len() == 1 {
                return Ok(Element::SpatialFlip { arm: arm(&a[0])? });
            }
        }
        Err(unknown())
    }
}

/// Phase convention of the 50:50 beam splitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeamSplitterConvention {
    /// `a → (a + i b)/√2`, `b → (i a + b)/√2`.
    #[default]
    Symmetric,
    /// `a → (a + b)/√2`, `b → (-a + b)/√2`.
    Rotation,
}

impl BeamSplitterConvention {
    /// Output paths and amplitudes for a photon entering on `p`.
    pub(crate) fn outputs(self, p: Path) -> [(Path, Complex64); 2] {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let i = Complex64::new(0.0, FRAC_1_SQRT_2);
        match (self, p) {
            (BeamSplitterConvention::Symmetric, Path::A) => [(Path::A, r), (Path::B, i)],
            (BeamSplitterConvention::Symmetric, _) => [(Path::A, i), (Path::B, r)],
            (BeamSplitterConvention::Rotation, Path::A) => [(Path::A, r), (Path::B, r)],
            (BeamSplitterConvention::Rotation, _) => [(Path::A, -r), (Path::B, r)],
        }
    }
}

/// Interferometer as an element sequence.
pub fn pipeline(cfg: &InterferometerConfig, tau: f64) -> Vec<Element> {
    let mut p = vec![
        Element::BeamSplitter,
        Element::Delay {
            arm: cfg.delay_arm,
            tau,
        },
    ];
    if cfg.kind == InterferometerKind::Mzim {
        p.push(Element::SpatialFlip { arm: cfg.flip_arm });
    }
    p.push(Element::BeamSplitter);
    p.push(Element::RelabelOutputs);
    p
}

/// One term `w · |p₁ p₂⟩ ⊗ S ⊗ F`.
#[derive(Debug, Clone)]
pub struct Branch {
    pub paths: [Path; 2],
    pub weight: Complex64,
    pub spatial: Arc<PairFactor>,
    pub spectral: Arc<PairFactor>,
}

/// Two-photon state as a short sum of product terms over
/// (path pair) ⊗ (position pair) ⊗ (frequency pair).
#[derive(Debug, Clone)]
pub struct BranchSumState {
    branches: Vec<Branch>,
    offsets: Arc<Vec<f64>>,
    pump_frequency: f64,
    convention: BeamSplitterConvention,
    relabeled: bool,
}

fn symmetrized(m: DMatrix<Complex64>, what: &str) -> Result<DMatrix<Complex64>> {
    let s = (&m + m.transpose()) * Complex64::new(0.5, 0.0);
    let norm = s.norm();
    if !(norm > 1e-300) {
        return Err(Error::InvalidState(format!(
            "{what} amplitude has no exchange-symmetric part"
        )));
    }
    Ok(s / Complex64::new(norm, 0.0))
}

/// Mode probabilities `p_k w_k`, mirror-averaged so the pair amplitude is
/// exchange symmetric.
pub(crate) fn symmetric_mode_weights(
    density: &crate::spectral::SpectralDensity,
    grid: &FrequencyGrid,
) -> Vec<f64> {
    let p = density.mode_weights(grid);
    let m = p.len();
    let q: Vec<f64> = (0..m).map(|k| 0.5 * (p[k] + p[m - 1 - k])).collect();
    let total: f64 = q.iter().sum();
    q.into_iter().map(|x| x / total).collect()
}

pub(crate) fn initial_factors(state: &TwoPhotonState) -> Result<(PairFactor, PairFactor)> {
    let sg = state.spatial_grid();
    let fg = state.frequency_grid();
    let spatial_ok = (0..sg.point_count()).all(|i| sg.point(sg.mirror(i)) == -sg.point(i));
    if !spatial_ok || !fg.is_symmetric() {
        return Err(Error::GridAsymmetry);
    }
    let spatial = match &state.spatial {
        SpatialSector::CorrelatedPump(phi) => PairFactor::Diagonal(phi.discrete()),
        SpatialSector::GeneralSpatial(j) => PairFactor::Full(symmetrized(j.discrete(), "spatial")?),
    };
    let spectral = match &state.spectral {
        SpectralSector::AntiCorrelated { density, grid } => PairFactor::AntiDiagonal(
            symmetric_mode_weights(density, grid)
                .into_iter()
                .map(|q| Complex64::new(q.sqrt(), 0.0))
                .collect(),
        ),
        SpectralSector::GeneralSpectral(j) => {
            PairFactor::Full(symmetrized(j.discrete(), "spectral")?)
        }
    };
    Ok((spatial, spectral))
}

impl BranchSumState {
    /// Both photons in path `a`, one branch carrying the state's spatial and
    /// spectral pair amplitudes.
    pub fn initial(state: &TwoPhotonState, convention: BeamSplitterConvention) -> Result<Self> {
        let (spatial, spectral) = initial_factors(state)?;
        Ok(Self {
            branches: vec![Branch {
                paths: [Path::A, Path::A],
                weight: Complex64::new(1.0, 0.0),
                spatial: Arc::new(spatial),
                spectral: Arc::new(spectral),
            }],
            offsets: Arc::new(state.frequency_grid().points()),
            pump_frequency: state.pump_frequency,
            convention,
            relabeled: false,
        })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn is_relabeled(&self) -> bool {
        self.relabeled
    }

    pub fn pump_frequency(&self) -> f64 {
        self.pump_frequency
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn convention(&self) -> BeamSplitterConvention {
        self.convention
    }

    pub fn apply(&self, element: &Element) -> Result<Self> {
        if self.relabeled {
            return Err(Error::InvalidElement(format!(
                "{element:?} after the outputs were relabeled"
            )));
        }
        let mut out = Vec::with_capacity(4 * self.branches.len());
        let mut relabeled = false;
        match *element {
            Element::BeamSplitter => {
                for b in &self.branches {
                    for (p0, c0) in self.convention.outputs(b.paths[0]) {
                        for (p1, c1) in self.convention.outputs(b.paths[1]) {
                            out.push(Branch {
                                paths: [p0, p1],
                                weight: b.weight * c0 * c1,
                                ..b.clone()
                            });
                        }
                    }
                }
            }
            Element::Delay { arm, tau } => {
                let ph: Vec<Complex64> = self
                    .offsets
                    .iter()
                    .map(|w| Complex64::from_polar(1.0, -w * tau))
                    .collect();
                let carrier = Complex64::from_polar(1.0, -0.5 * self.pump_frequency * tau);
                let mut cache = HashMap::new();
                for b in &self.branches {
                    let mask = slot_mask(b, arm);
                    let mut nb = b.clone();
                    for _ in 0..mask.count_ones() {
                        nb.weight *= carrier;
                    }
                    nb.spectral =
                        transformed(&mut cache, &b.spectral, mask, |f, s| f.scale_slot(s, &ph));
                    out.push(nb);
                }
            }
            Element::SpatialFlip { arm } => {
                let mut cache = HashMap::new();
                for b in &self.branches {
                    let mask = slot_mask(b, arm);
                    let mut nb = b.clone();
                    nb.spatial =
                        transformed(&mut cache, &b.spatial, mask, |f, s| f.reverse_slot(s));
                    out.push(nb);
                }
            }
            Element::RelabelOutputs => {
                relabeled = true;
                for b in &self.branches {
                    out.push(Branch {
                        paths: [b.paths[0].relabeled(), b.paths[1].relabeled()],
                        ..b.clone()
                    });
                }
            }
        }
        Ok(Self {
            branches: merge(out),
            offsets: Arc::clone(&self.offsets),
            pump_frequency: self.pump_frequency,
            convention: self.convention,
            relabeled,
        })
    }

    pub fn apply_all(&self, elements: &[Element]) -> Result<Self> {
        let mut s = self.clone();
        for e in elements {
            s = s.apply(e)?;
        }
        Ok(s)
    }

    /// `Σ |ψ|²` over all modes with the photons on paths `(q₁, q₂)`.
    pub fn pair_probability(&self, q1: Path, q2: Path) -> f64 {
        let group: Vec<&Branch> = self
            .branches
            .iter()
            .filter(|b| b.paths == [q1, q2])
            .collect();
        gram(&group)
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut keys: Vec<[Path; 2]> = self.branches.iter().map(|b| b.paths).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|[p, q]| self.pair_probability(p, q))
            .sum()
    }

    /// Norm of `ψ - Pψ` with `P` the slot exchange.
    pub fn exchange_asymmetry(&self) -> f64 {
        let mut all: Vec<Branch> = self.branches.clone();
        for b in &self.branches {
            all.push(Branch {
                paths: [b.paths[1], b.paths[0]],
                weight: -b.weight,
                spatial: Arc::new(b.spatial.transpose()),
                spectral: Arc::new(b.spectral.transpose()),
            });
        }
        let mut keys: Vec<[Path; 2]> = all.iter().map(|b| b.paths).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| gram(&all.iter().filter(|b| b.paths == k).collect::<Vec<_>>()))
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }

    /// Coincidences between the two outputs, background 1.
    pub fn coincidence_rate(&self) -> Result<f64> {
        if !self.relabeled {
            return Err(Error::IncompletePipeline);
        }
        Ok(2.0
            * (self.pair_probability(Path::C, Path::D) + self.pair_probability(Path::D, Path::C)))
    }

    /// Expected photon count at `port`, background 1.
    pub fn singles_rate(&self, port: Port) -> Result<f64> {
        if !self.relabeled {
            return Err(Error::IncompletePipeline);
        }
        let q = port.path();
        let o = port.other().path();
        Ok(2.0 * self.pair_probability(q, q)
            + self.pair_probability(q, o)
            + self.pair_probability(o, q))
    }
}

fn slot_mask(b: &Branch, arm: Arm) -> u8 {
    (b.paths[0].arm() == Some(arm)) as u8 | ((b.paths[1].arm() == Some(arm)) as u8) << 1
}

/// Applies `op` to the selected slots, sharing results between branches that
/// hold the same factor so they can merge later.
fn transformed(
    cache: &mut HashMap<(usize, u8), Arc<PairFactor>>,
    f: &Arc<PairFactor>,
    mask: u8,
    op: impl Fn(&PairFactor, Slot) -> PairFactor,
) -> Arc<PairFactor> {
    if mask == 0 {
        return Arc::clone(f);
    }
    let key = (Arc::as_ptr(f) as usize, mask);
    Arc::clone(cache.entry(key).or_insert_with(|| {
        let mut g = (**f).clone();
        if mask & 1 != 0 {
            g = op(&g, Slot::First);
        }
        if mask & 2 != 0 {
            g = op(&g, Slot::Second);
        }
        Arc::new(g)
    }))
}

fn merge(branches: Vec<Branch>) -> Vec<Branch> {
    let mut out: Vec<Branch> = Vec::new();
    let mut index: HashMap<([Path; 2], usize, usize), usize> = HashMap::new();
    for b in branches {
        let key = (
            b.paths,
            Arc::as_ptr(&b.spatial) as usize,
            Arc::as_ptr(&b.spectral) as usize,
        );
        match index.get(&key) {
            Some(&j) => out[j].weight += b.weight,
            None => {
                index.insert(key, out.len());
                out.push(b);
            }
        }
    }
    // Exact cancellations leave roundoff-level weights.
    out.retain(|b| b.weight.norm_sqr() > 1e-28);
    out
}

fn gram(group: &[&Branch]) -> f64 {
    let mut total = ZERO;
    for (j, a) in group.iter().enumerate() {
        for b in &group[j..] {
            let term = a.weight.conj()
                * b.weight
                * a.spatial.inner(&b.spatial)
                * a.spectral.inner(&b.spectral);
            if std::ptr::eq(*a, *b) {
                total += term;
            } else {
                total += 2.0 * term.re;
            }
        }
    }
    total.re
}
