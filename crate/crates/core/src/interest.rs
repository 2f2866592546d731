//! Interest functions: binary classifiability of DTC state sets and the
//! potential-based spectral interest.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{dtc_unitary, Circuit, DtcParams};
use crate::error::{domain, Error, Result};
use crate::hac::{classifiability, hac_ward, ClassifiabilityMode, MergeTree};
use crate::kernel::{center_gram, gram_matrix, leading_components, KernelHyper};
use crate::seeding;
use crate::shadows::{
    frame_from_rotation, MeasurementFrame, ShadowSet, SnapshotSampler, DEFAULT_FRAME_ANGLE,
    DEFAULT_FRAME_AXIS, DEFAULT_SHADOWS,
};
use crate::spectral::{mean_stderr, EnsembleSeries, SpectralSeries};
use crate::statevector::State;

/// Rigid rotation of the lab axes defining the shadow measurement frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameSpec {
    pub angle: f64,
    pub axis: [f64; 3],
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            angle: DEFAULT_FRAME_ANGLE,
            axis: DEFAULT_FRAME_AXIS,
        }
    }
}

impl FrameSpec {
    pub fn frame(&self) -> Result<MeasurementFrame> {
        frame_from_rotation(self.angle, self.axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStates {
    /// Uniformly random computational basis states.
    #[default]
    RandomBasis,
    /// Every trajectory starts from `|0…0⟩`.
    Polarized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DtcInterestConfig {
    pub n_init: usize,
    /// First collected step.
    pub t1: usize,
    /// Number of collected steps `t1 ≤ t < t1 + window`.
    pub window: usize,
    pub n_shadows: usize,
    pub frame: FrameSpec,
    pub kernel: KernelHyper,
    pub mode: ClassifiabilityMode,
    pub initial_states: InitialStates,
}

impl Default for DtcInterestConfig {
    fn default() -> Self {
        Self {
            n_init: 32,
            t1: 10,
            window: 40,
            n_shadows: DEFAULT_SHADOWS,
            frame: FrameSpec::default(),
            kernel: KernelHyper::default(),
            mode: ClassifiabilityMode::Raw,
            initial_states: InitialStates::RandomBasis,
        }
    }
}

impl DtcInterestConfig {
    /// Polarized start with a long early window.
    pub fn polarized() -> Self {
        Self {
            t1: 1,
            window: 100,
            initial_states: InitialStates::Polarized,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_init == 0 {
            return domain("n_init must be at least 1");
        }
        if self.window < 2 {
            return domain(format!("window must be at least 2, got {}", self.window));
        }
        if self.n_shadows == 0 {
            return domain("n_shadows must be positive");
        }
        self.kernel.validate()?;
        self.frame.frame()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalCost {
    /// Floquet periods applied by the simulator.
    pub unitary_applications: u64,
    /// `½ N_s N_init T²`, the count a device measuring every pair would need.
    pub hardware_equivalent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterestEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Per initial state (DTC) or per time step (spectral).
    pub components: Vec<f64>,
    pub cost: EvalCost,
}

impl InterestEstimate {
    fn from_samples(components: Vec<f64>, cost: EvalCost) -> Self {
        let (value, stderr) = mean_stderr(&components);
        Self {
            value,
            stderr,
            components,
            cost,
        }
    }
}

/// Classification of one state set.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSetAnalysis {
    /// First kernel-PCA coordinate per collected step; empty when the
    /// centered Gram matrix has no positive eigenvalue.
    pub pc1: Vec<f64>,
    pub tree: Option<MergeTree>,
    pub value: f64,
}

/// Shadow sets of `U^t|ψ⟩` for `t1 ≤ t < t1 + window`. Step `t` samples from
/// the stream `(seed, t)`.
pub fn collect_state_set(
    c: &Circuit,
    initial: &State,
    cfg: &DtcInterestConfig,
    seed: u64,
) -> Result<Vec<ShadowSet>> {
    let frame = cfg.frame.frame()?;
    let mut sampler = SnapshotSampler::new(frame);
    let mut state = initial.clone();
    for _ in 0..cfg.t1 {
        c.apply_mut(&mut state)?;
    }
    let mut sets = Vec::with_capacity(cfg.window);
    for k in 0..cfg.window {
        if k > 0 {
            c.apply_mut(&mut state)?;
        }
        let mut rng = seeding::stream(seed, &[(cfg.t1 + k) as u64]);
        let rows = (0..cfg.n_shadows)
            .map(|_| sampler.sample(&state, &mut rng))
            .collect();
        sets.push(ShadowSet::new(state.n(), frame, rows)?);
    }
    Ok(sets)
}

/// Gram → center → PC1 → Ward → classifiability.
pub fn analyze_state_set(
    sets: &[ShadowSet],
    kernel: &KernelHyper,
    mode: ClassifiabilityMode,
) -> Result<StateSetAnalysis> {
    let kc = center_gram(&gram_matrix(sets, kernel)?);
    let pcs = match leading_components(&kc, 1) {
        Ok(p) => p,
        // Indistinguishable states: nothing to classify.
        Err(Error::Domain(_)) => {
            return Ok(StateSetAnalysis {
                pc1: Vec::new(),
                tree: None,
                value: 0.0,
            })
        }
        Err(e) => return Err(e),
    };
    let tree = hac_ward(&pcs.coords)?;
    let value = classifiability(&tree, mode);
    Ok(StateSetAnalysis {
        pc1: pcs.coords.iter().map(|c| c[0]).collect(),
        tree: Some(tree),
        value,
    })
}

fn initial_state<R: Rng + ?Sized>(n: usize, kind: InitialStates, rng: &mut R) -> Result<State> {
    let index = match kind {
        InitialStates::RandomBasis => rng.random_range(0..1usize << n),
        InitialStates::Polarized => 0,
    };
    State::basis_state(n, index)
}

/// Uniform spatial disorder of half-width `width` added to every `J_i` and
/// `h_i`. Couplings stop being shared when `width > 0`.
pub fn disorder_realization<R: Rng + ?Sized>(mean: &DtcParams, width: f64, rng: &mut R) -> DtcParams {
    if width == 0.0 {
        return mean.clone();
    }
    let mut jitter = |x: f64| x + rng.random_range(-width..=width);
    let j = mean.j.iter().map(|&x| jitter(x)).collect();
    let h = mean.h.iter().map(|&x| jitter(x)).collect();
    DtcParams {
        j,
        h,
        s_hat: mean.s_hat,
        m_hat: mean.m_hat,
        shared_j: false,
    }
}

fn cost(cfg: &DtcInterestConfig) -> EvalCost {
    let periods = (cfg.t1 + cfg.window - 1) as u64;
    EvalCost {
        unitary_applications: periods * cfg.n_init as u64,
        hardware_equivalent: 0.5
            * cfg.n_shadows as f64
            * cfg.n_init as f64
            * (cfg.window * cfg.window) as f64,
    }
}

/// Mean classifiability over `n_init` initial states of a fixed unitary.
/// Initial state `k` draws everything from the stream `(base, k)`, with the
/// base seed taken from `rng`.
pub fn dtc_interest<R: Rng + ?Sized>(
    p: &DtcParams,
    cfg: &DtcInterestConfig,
    rng: &mut R,
) -> Result<InterestEstimate> {
    dtc_interest_disordered(p, 0.0, cfg, rng)
}

/// Disorder-averaged classifiability: every initial state comes with a
/// fresh disorder realization around `mean`.
pub fn dtc_interest_disordered<R: Rng + ?Sized>(
    mean: &DtcParams,
    width: f64,
    cfg: &DtcInterestConfig,
    rng: &mut R,
) -> Result<InterestEstimate> {
    mean.validate()?;
    cfg.validate()?;
    if !(width >= 0.0 && width.is_finite()) {
        return domain(format!("disorder width must be non-negative, got {width}"));
    }
    let base = seeding::base_seed(rng);
    let clean = if width == 0.0 { Some(dtc_unitary(mean)?.fused()) } else { None };
    let per_state: Vec<Result<f64>> = (0..cfg.n_init)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeding::stream(base, &[k as u64]);
            let psi = initial_state(mean.n(), cfg.initial_states, &mut rng)?;
            let c = match &clean {
                Some(c) => c.clone(),
                None => dtc_unitary(&disorder_realization(mean, width, &mut rng))?.fused(),
            };
            let sets = collect_state_set(&c, &psi, cfg, rng.random())?;
            Ok(analyze_state_set(&sets, &cfg.kernel, cfg.mode)?.value)
        })
        .collect();
    let components = per_state.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(InterestEstimate::from_samples(components, cost(cfg)))
}

/// Polynomial potential `V_t(z) = Σ_m α_{m,t}/(2m) |z|^{2m}` per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    /// `coefficients[t − 1][m − 1] = α_{m,t}`.
    pub coefficients: Vec<Vec<f64>>,
}

impl PotentialSpec {
    pub fn new(coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self { coefficients };
        p.validate()?;
        Ok(p)
    }

    /// `α_{1,t} = 2`: `f` is the negative time-integrated SFF.
    pub fn sff(t_max: usize) -> Self {
        Self {
            coefficients: vec![vec![2.0]; t_max],
        }
    }

    /// Quartic wells `α_{1,t} = −c_t² α`, `α_{2,t} = α` with minima at `|z_t| = c_t`.
    pub fn mexican_hat(radii: &[f64], strength: f64) -> Result<Self> {
        Self::new(radii.iter().map(|&c| vec![-c * c * strength, strength]).collect())
    }

    pub fn t_max(&self) -> usize {
        self.coefficients.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.is_empty() {
            return domain("potential needs t_max ≥ 1");
        }
        if self.coefficients.iter().flatten().any(|a| !a.is_finite()) {
            return domain("potential coefficients must be finite");
        }
        Ok(())
    }

    /// `V_t` as a function of `|z_t|²`.
    pub fn value(&self, t: usize, sq: f64) -> f64 {
        self.coefficients[t - 1]
            .iter()
            .enumerate()
            .map(|(m, &a)| a / (2.0 * (m + 1) as f64) * sq.powi(m as i32 + 1))
            .sum()
    }
}

/// `f = −Σ_t V_t` averaged over the ensemble: each realization contributes
/// its own `|z_t|^{2m}`, and the error is the standard error of the
/// per-realization `f`.
pub fn spectral_interest(ens: &EnsembleSeries, pot: &PotentialSpec) -> Result<InterestEstimate> {
    pot.validate()?;
    if pot.t_max() > ens.t_max {
        return domain(format!(
            "potential reaches t = {} but the ensemble stops at {}",
            pot.t_max(),
            ens.t_max
        ));
    }
    let per_real: Vec<f64> = (0..ens.n_real)
        .map(|r| {
            let sq = ens.realization(r);
            -(1..=pot.t_max()).map(|t| pot.value(t, sq[t - 1])).sum::<f64>()
        })
        .collect();
    let (value, stderr) = mean_stderr(&per_real);
    let components = (1..=pot.t_max())
        .map(|t| {
            -(0..ens.n_real)
                .map(|r| pot.value(t, ens.realization(r)[t - 1]))
                .sum::<f64>()
                / ens.n_real as f64
        })
        .collect();
    Ok(InterestEstimate {
        value,
        stderr,
        components,
        cost: EvalCost {
            unitary_applications: (ens.n_real * ens.t_max * ens.dim()) as u64,
            hardware_equivalent: 0.0,
        },
    })
}

/// `f = −Σ_t V_t(z_t)` for a single unitary.
pub fn spectral_interest_single(series: &SpectralSeries, pot: &PotentialSpec) -> Result<InterestEstimate> {
    pot.validate()?;
    if pot.t_max() > series.t_max() {
        return domain("potential reaches beyond the computed series");
    }
    let sq = series.sff();
    let components: Vec<f64> = (1..=pot.t_max()).map(|t| -pot.value(t, sq[t - 1])).collect();
    Ok(InterestEstimate {
        value: components.iter().sum(),
        stderr: 0.0,
        components,
        cost: EvalCost {
            unitary_applications: (series.t_max() * series.dim()) as u64,
            hardware_equivalent: 0.0,
        },
    })
}

/// Radii `c_t = √(|α_{1,t}|/α_{2,t})` of the potential minima.
pub fn mexican_hat_target(pot: &PotentialSpec) -> Result<Vec<f64>> {
    pot.validate()?;
    pot.coefficients
        .iter()
        .enumerate()
        .map(|(i, a)| match a.as_slice() {
            [a1, a2, rest @ ..] if *a1 < 0.0 && *a2 > 0.0 && rest.iter().all(|&x| x == 0.0) => {
                Ok((a1.abs() / a2).sqrt())
            }
            _ => domain(format!("step {} is not of the form α₁ < 0 < α₂", i + 1)),
        })
        .collect()
}

/// `ρ(θ) = (D/2π)(1 + 2 Σ_ℓ c_ℓ cos ℓθ)`.
pub fn modulated_density(theta: f64, dim: usize, harmonics: &[f64]) -> f64 {
    let s: f64 = harmonics
        .iter()
        .enumerate()
        .map(|(l, c)| c * ((l + 1) as f64 * theta).cos())
        .sum();
    dim as f64 / (2.0 * std::f64::consts::PI) * (1.0 + 2.0 * s)
}

/// Empirical harmonics `(1/D) Σ_j cos(ℓθ_j)` for `ℓ = 1..=l_max`, the
/// coefficients `c_ℓ` of [`modulated_density`] for a given set of phases.
pub fn phase_harmonics(phases: &[f64], l_max: usize) -> Vec<f64> {
    (1..=l_max)
        .map(|l| phases.iter().map(|p| (l as f64 * p).cos()).sum::<f64>() / phases.len() as f64)
        .collect()
}
