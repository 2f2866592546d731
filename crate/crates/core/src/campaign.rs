//! Campaigns: DTC optimization runs, DTC and SFF landscapes, diagonal cuts
//! and the partial-SFF report. Every campaign writes plain CSV/JSON into its
//! output directory.
//!
//! Random streams are keyed by `(seed, tag, indices…)` paths, and results are
//! gathered in index order, so outputs are identical for any worker count.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{brickwork_unitary, dot3, dtc_unitary, unit_vector, DtcParams};
use crate::error::{domain, Error, Result};
use crate::interest::{
    analyze_state_set, collect_state_set, disorder_realization, dtc_interest,
    dtc_interest_disordered, spectral_interest, DtcInterestConfig, PotentialSpec,
};
use crate::optimizer::{maximize, NmConfig, OptTrajectory};
use crate::seeding::{derive_seed, stream};
use crate::spectral::{
    ensemble_sff, fit_dw_tension, mean_stderr, psff_exact, psff_sampled, BrickworkTemplate,
    DwFit, EnsembleSeries, Subsystem,
};
use crate::statevector::State;

pub const SCHEMA: &str = "floquet-discovery/1";

const TAG_OPTIMIZE: u64 = 1;
const TAG_LANDSCAPE: u64 = 2;
const TAG_SCATTER: u64 = 3;
const TAG_SFF: u64 = 4;
const TAG_CUT: u64 = 5;
const TAG_PSFF: u64 = 6;
const TAG_PSFF_SAMPLED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    #[default]
    DtcOptimize,
    DtcLandscape,
    SffLandscape,
    SffCut,
    PsffDemo,
}

impl CampaignKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::DtcOptimize => "dtc-optimize",
            Self::DtcLandscape => "dtc-landscape",
            Self::SffLandscape => "sff-landscape",
            Self::SffCut => "sff-cut",
            Self::PsffDemo => "psff-demo",
        }
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn dtc_window_default() -> DtcInterestConfig {
    DtcInterestConfig {
        window: 32,
        ..DtcInterestConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DtcOptimizeSpec {
    pub n: usize,
    pub runs: usize,
    /// One coupling for all bonds instead of one per bond.
    pub shared_j: bool,
    pub interest: DtcInterestConfig,
    /// Periods are set from the parameter layout; any given here are ignored.
    pub optimizer: NmConfig,
}

impl Default for DtcOptimizeSpec {
    fn default() -> Self {
        Self {
            n: 6,
            runs: 10,
            shared_j: true,
            interest: dtc_window_default(),
            optimizer: NmConfig {
                initial_step: FRAC_PI_2,
                ..NmConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DtcLandscapeSpec {
    pub n: usize,
    pub j_values: Vec<f64>,
    pub h_values: Vec<f64>,
    /// Half-width of the uniform disorder on every `J_i` and `h_i`.
    pub disorder: f64,
    pub s_hat: [f64; 3],
    pub m_hat: [f64; 3],
    pub interest: DtcInterestConfig,
    /// `(⟨J⟩, ⟨h⟩)` points whose PC1 coordinates are exported.
    pub scatter: Vec<[f64; 2]>,
}

impl Default for DtcLandscapeSpec {
    fn default() -> Self {
        Self {
            n: 6,
            j_values: linspace(0.0, FRAC_PI_2, 5),
            h_values: linspace(0.0, FRAC_PI_2, 5),
            disorder: 0.4,
            s_hat: [0.0, 0.0, 1.0],
            m_hat: [1.0, 0.0, 0.0],
            interest: dtc_window_default(),
            scatter: vec![[FRAC_PI_4, FRAC_PI_2], [FRAC_PI_4, 0.2]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SffLandscapeSpec {
    pub n: usize,
    pub jz: f64,
    pub jx_values: Vec<f64>,
    pub jy_values: Vec<f64>,
    pub n_real: usize,
    pub t_max: usize,
}

impl Default for SffLandscapeSpec {
    fn default() -> Self {
        let grid = linspace(0.4 * PI, 1.6 * PI, 11);
        Self {
            n: 6,
            jz: PI / 10.0,
            jx_values: grid.clone(),
            jy_values: grid,
            n_real: 100,
            t_max: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SffCutSpec {
    pub ns: Vec<usize>,
    pub jz: f64,
    /// Points `J_x = J_y = J` along the diagonal.
    pub j_values: Vec<f64>,
    pub n_real: usize,
    pub t_max: usize,
    pub fit_tension: bool,
}

impl Default for SffCutSpec {
    fn default() -> Self {
        Self {
            ns: vec![4, 6, 8],
            jz: PI / 10.0,
            j_values: linspace(0.4 * PI, PI, 7),
            n_real: 100,
            t_max: 20,
            fit_tension: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsffDemoSpec {
    pub n: usize,
    pub subsystem_sizes: Vec<usize>,
    pub jz: f64,
    /// Couplings of the non-dual-unitary comparison ensemble.
    pub generic_j: [f64; 3],
    pub n_real: usize,
    pub t_max: usize,
    pub shots: usize,
    pub repetitions: usize,
    /// Steps at which the sampled estimator is validated.
    pub validation_steps: Vec<usize>,
}

impl Default for PsffDemoSpec {
    fn default() -> Self {
        Self {
            n: 10,
            subsystem_sizes: vec![2, 3],
            jz: PI / 10.0,
            generic_j: [0.6 * PI, 0.8 * PI, PI / 10.0],
            n_real: 40,
            t_max: 4,
            shots: 1000,
            repetitions: 20,
            validation_steps: vec![1, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub schema: String,
    pub kind: CampaignKind,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub out: PathBuf,
    pub dtc_optimize: DtcOptimizeSpec,
    pub dtc_landscape: DtcLandscapeSpec,
    pub sff_landscape: SffLandscapeSpec,
    pub sff_cut: SffCutSpec,
    pub psff_demo: PsffDemoSpec,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA.to_string(),
            kind: CampaignKind::default(),
            seed: 0,
            workers: 1,
            out: PathBuf::from("out"),
            dtc_optimize: DtcOptimizeSpec::default(),
            dtc_landscape: DtcLandscapeSpec::default(),
            sff_landscape: SffLandscapeSpec::default(),
            sff_cut: SffCutSpec::default(),
            psff_demo: PsffDemoSpec::default(),
        }
    }
}

fn non_empty<T>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{what} must not be empty")));
    }
    Ok(())
}

impl CampaignConfig {
    /// Checks the section selected by `kind`.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Config(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        match self.kind {
            CampaignKind::DtcOptimize => {
                let s = &self.dtc_optimize;
                if s.runs == 0 {
                    return Err(Error::Config("runs must be positive".into()));
                }
                s.interest.validate()?;
                let layout = DtcLayout::new(s.n, s.shared_j)?;
                NmConfig {
                    periods: layout.periods(),
                    ..s.optimizer.clone()
                }
                .validate(layout.dim())?;
            }
            CampaignKind::DtcLandscape => {
                let s = &self.dtc_landscape;
                non_empty(&s.j_values, "j_values")?;
                non_empty(&s.h_values, "h_values")?;
                s.interest.validate()?;
                DtcParams::uniform(s.n, 0.0, 0.0, s.s_hat, s.m_hat).validate()?;
                if !(s.disorder >= 0.0) {
                    return Err(Error::Config("disorder must be non-negative".into()));
                }
            }
            CampaignKind::SffLandscape => {
                let s = &self.sff_landscape;
                non_empty(&s.jx_values, "jx_values")?;
                non_empty(&s.jy_values, "jy_values")?;
                check_ensemble(s.n, s.n_real, s.t_max)?;
            }
            CampaignKind::SffCut => {
                let s = &self.sff_cut;
                non_empty(&s.ns, "ns")?;
                non_empty(&s.j_values, "j_values")?;
                for &n in &s.ns {
                    check_ensemble(n, s.n_real, s.t_max)?;
                }
            }
            CampaignKind::PsffDemo => {
                let s = &self.psff_demo;
                non_empty(&s.subsystem_sizes, "subsystem_sizes")?;
                check_ensemble(s.n, s.n_real, s.t_max)?;
                if s.subsystem_sizes.iter().any(|&k| k > s.n) {
                    return Err(Error::Config("subsystem larger than the system".into()));
                }
                if s.shots == 0 || s.repetitions < 2 {
                    return Err(Error::Config("shots ≥ 1 and repetitions ≥ 2 required".into()));
                }
                if s.validation_steps.iter().any(|&t| t == 0 || t > s.t_max) {
                    return Err(Error::Config("validation steps must lie in 1..=t_max".into()));
                }
            }
        }
        Ok(())
    }
}

fn check_ensemble(n: usize, n_real: usize, t_max: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Config(format!("brickwork size must be even and ≥ 2, got {n}")));
    }
    if n_real < 2 || t_max == 0 {
        return Err(Error::Config("n_real ≥ 2 and t_max ≥ 1 required".into()));
    }
    Ok(())
}

/// Parameter vector `[J or J_0…J_{n−1}, h_0…h_{n−1}, θ_s, φ_s, θ_m, φ_m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DtcLayout {
    pub n: usize,
    pub shared_j: bool,
}

impl DtcLayout {
    pub fn new(n: usize, shared_j: bool) -> Result<Self> {
        if n == 0 {
            return domain("layout needs at least one qubit");
        }
        Ok(Self { n, shared_j })
    }

    fn couplings(&self) -> usize {
        if self.shared_j {
            1
        } else {
            self.n
        }
    }

    pub fn dim(&self) -> usize {
        self.couplings() + self.n + 4
    }

    /// `π` for couplings and fields, `2π` for the angles.
    pub fn periods(&self) -> Vec<Option<f64>> {
        let mut p = vec![Some(PI); self.couplings() + self.n];
        p.extend([Some(2.0 * PI); 4]);
        p
    }

    pub fn decode(&self, x: &[f64]) -> DtcParams {
        let c = self.couplings();
        let j = if self.shared_j { vec![x[0]; self.n] } else { x[..c].to_vec() };
        let h = x[c..c + self.n].to_vec();
        let a = &x[c + self.n..];
        DtcParams {
            j,
            h,
            s_hat: unit_vector(a[0], a[1]),
            m_hat: unit_vector(a[2], a[3]),
            shared_j: self.shared_j,
        }
    }

    /// `J_i, h_i ∈ [0, π/2]`, axes uniform on the sphere.
    pub fn random_start<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.couplings() + self.n)
            .map(|_| rng.random_range(0.0..=FRAC_PI_2))
            .collect();
        for _ in 0..2 {
            let cos_theta: f64 = rng.random_range(-1.0..=1.0);
            x.push(cos_theta.acos());
            x.push(rng.random_range(0.0..2.0 * PI));
        }
        x
    }
}

/// Distance of `x` to the nearest point of `target + period·ℤ`.
pub fn periodic_distance(x: f64, target: f64, period: f64) -> f64 {
    let d = (x - target).rem_euclid(period);
    d.min(period - d)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    /// Fresh estimates of `f` at the start and final points, drawn from the
    /// same stream.
    pub initial_f: f64,
    pub final_f: f64,
    /// Largest noisy estimate seen during the run.
    pub best_recorded_f: f64,
    pub params: DtcParams,
    pub s_dot_m: f64,
    pub s_dot_z: f64,
    pub m_dot_z: f64,
    /// Mean over bonds of the distance of `J_i` to `π/4` modulo `π/2`.
    pub j_offset: f64,
    /// Distance of the median `h_i` (modulo `π`) to `π/2`.
    pub h_median_offset: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl RunRecord {
    pub fn improved(&self) -> bool {
        self.final_f > self.initial_f
    }
}

pub fn diagnostics(p: &DtcParams) -> (f64, f64, f64, f64, f64) {
    let z = [0.0, 0.0, 1.0];
    let j_offset = p.j.iter().map(|&j| periodic_distance(j, FRAC_PI_4, FRAC_PI_2)).sum::<f64>()
        / p.j.len() as f64;
    let h_folded: Vec<f64> = p.h.iter().map(|h| h.rem_euclid(PI)).collect();
    (
        dot3(p.s_hat, p.m_hat).abs(),
        dot3(p.s_hat, z).abs(),
        dot3(p.m_hat, z).abs(),
        j_offset,
        (median(&h_folded) - FRAC_PI_2).abs(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtcOptimizeOutcome {
    pub records: Vec<RunRecord>,
    pub trajectories: Vec<OptTrajectory>,
}

fn optimize_one(spec: &DtcOptimizeSpec, seed: u64, run: usize) -> Result<(RunRecord, OptTrajectory)> {
    let layout = DtcLayout::new(spec.n, spec.shared_j)?;
    let x0 = layout.random_start(&mut stream(seed, &[TAG_OPTIMIZE, run as u64, 0]));
    let cfg = NmConfig {
        periods: layout.periods(),
        ..spec.optimizer.clone()
    };
    let mut failure: Option<Error> = None;
    let objective = |x: &[f64], rng: &mut dyn RngCore| -> f64 {
        match dtc_interest(&layout.decode(x), &spec.interest, rng) {
            Ok(e) => e.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let mut rng = stream(seed, &[TAG_OPTIMIZE, run as u64, 1]);
    let result = maximize(objective, &x0, &cfg, &mut rng);
    if let Some(e) = failure {
        return Err(e);
    }
    let traj = result?;
    let start = layout.decode(&x0);
    let best = layout.decode(&traj.best.params);
    let reeval = derive_seed(seed, &[TAG_OPTIMIZE, run as u64, 2]);
    let initial_f = dtc_interest(&start, &spec.interest, &mut stream(reeval, &[]))?.value;
    let final_f = dtc_interest(&best, &spec.interest, &mut stream(reeval, &[]))?.value;
    let (s_dot_m, s_dot_z, m_dot_z, j_offset, h_median_offset) = diagnostics(&best);
    let record = RunRecord {
        run,
        initial_f,
        final_f,
        best_recorded_f: traj.best.value,
        params: best,
        s_dot_m,
        s_dot_z,
        m_dot_z,
        j_offset,
        h_median_offset,
        iterations: traj.iterations,
        evaluations: traj.evaluations.len(),
    };
    Ok((record, traj))
}

/// Independent Nelder–Mead runs from random starting points. Run `r` uses
/// the streams `(seed, ·, r, ·)`.
pub fn run_dtc_optimize(spec: &DtcOptimizeSpec, seed: u64) -> Result<DtcOptimizeOutcome> {
    let results: Vec<Result<(RunRecord, OptTrajectory)>> = (0..spec.runs)
        .into_par_iter()
        .map(|run| optimize_one(spec, seed, run))
        .collect();
    let mut records = Vec::with_capacity(spec.runs);
    let mut trajectories = Vec::with_capacity(spec.runs);
    for r in results {
        let (rec, traj) = r?;
        records.push(rec);
        trajectories.push(traj);
    }
    Ok(DtcOptimizeOutcome { records, trajectories })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub x: f64,
    pub y: f64,
    pub f: f64,
    pub stderr: f64,
}

/// PC1 coordinates of one state set at a scatter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    pub j: f64,
    pub h: f64,
    /// Collected steps, aligned with `pc1` (empty when there is no PC1).
    pub steps: Vec<usize>,
    pub pc1: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtcLandscape {
    pub points: Vec<LandscapePoint>,
    pub scatter: Vec<ScatterSeries>,
}

fn grid(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
}

/// Disorder-averaged classifiability over the `(⟨J⟩, ⟨h⟩)` grid (J-major).
pub fn run_dtc_landscape(spec: &DtcLandscapeSpec, seed: u64) -> Result<DtcLandscape> {
    let mean = |j: f64, h: f64| DtcParams::uniform(spec.n, j, h, spec.s_hat, spec.m_hat);
    let points = grid(&spec.j_values, &spec.h_values)
        .into_par_iter()
        .enumerate()
        .map(|(g, (j, h))| {
            let mut rng = stream(seed, &[TAG_LANDSCAPE, g as u64]);
            let e = dtc_interest_disordered(&mean(j, h), spec.disorder, &spec.interest, &mut rng)?;
            Ok(LandscapePoint { x: j, y: h, f: e.value, stderr: e.stderr })
        })
        .collect::<Result<Vec<_>>>()?;
    let scatter = spec
        .scatter
        .iter()
        .enumerate()
        .map(|(i, &[j, h])| {
            let mut rng = stream(seed, &[TAG_SCATTER, i as u64]);
            let p = disorder_realization(&mean(j, h), spec.disorder, &mut rng);
            let psi = State::basis_state(spec.n, rng.random_range(0..1usize << spec.n))?;
            let c = dtc_unitary(&p)?.fused();
            let sets = collect_state_set(&c, &psi, &spec.interest, rng.random())?;
            let a = analyze_state_set(&sets, &spec.interest.kernel, spec.interest.mode)?;
            let steps = if a.pc1.is_empty() {
                Vec::new()
            } else {
                (spec.interest.t1..spec.interest.t1 + spec.interest.window).collect()
            };
            Ok(ScatterSeries { j, h, steps, pc1: a.pc1, f: a.value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DtcLandscape { points, scatter })
}

fn brickwork_point(n: usize, j_xyz: [f64; 3], n_real: usize, t_max: usize, seed: u64) -> Result<EnsembleSeries> {
    ensemble_sff(&BrickworkTemplate { n, j_xyz }, n_real, t_max, seed)
}

/// `f = −Σ_t mean|z_t|²` over the `(J_x, J_y)` grid (J_x-major).
pub fn run_sff_landscape(spec: &SffLandscapeSpec, seed: u64) -> Result<Vec<LandscapePoint>> {
    let pot = PotentialSpec::sff(spec.t_max);
    grid(&spec.jx_values, &spec.jy_values)
        .into_iter()
        .enumerate()
        .map(|(g, (jx, jy))| {
            let s = derive_seed(seed, &[TAG_SFF, g as u64]);
            let ens = brickwork_point(spec.n, [jx, jy, spec.jz], spec.n_real, spec.t_max, s)?;
            let e = spectral_interest(&ens, &pot)?;
            Ok(LandscapePoint { x: jx, y: jy, f: e.value, stderr: e.stderr })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutPoint {
    pub n: usize,
    pub j: f64,
    pub f: f64,
    pub stderr: f64,
    pub ensemble: EnsembleSeries,
    pub fit: Option<DwFit>,
}

/// Diagonal `J_x = J_y` cut at every requested size.
pub fn run_sff_cut(spec: &SffCutSpec, seed: u64) -> Result<Vec<CutPoint>> {
    let pot = PotentialSpec::sff(spec.t_max);
    let mut out = Vec::new();
    for (ni, &n) in spec.ns.iter().enumerate() {
        for (ji, &j) in spec.j_values.iter().enumerate() {
            let s = derive_seed(seed, &[TAG_CUT, ni as u64, ji as u64]);
            let ens = brickwork_point(n, [j, j, spec.jz], spec.n_real, spec.t_max, s)?;
            let e = spectral_interest(&ens, &pot)?;
            let fit = if spec.fit_tension && spec.t_max >= 2 {
                Some(fit_dw_tension(&ens, n)?)
            } else {
                None
            };
            out.push(CutPoint { n, j, f: e.value, stderr: e.stderr, ensemble: ens, fit });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsffFamily {
    DualUnitary,
    Generic,
}

impl PsffFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::DualUnitary => "dual_unitary",
            Self::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsffCurve {
    pub family: PsffFamily,
    pub size: usize,
    /// Ensemble mean and standard error per `t = 1..=t_max`.
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `1/D_A²`.
    pub plateau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsffValidation {
    pub family: PsffFamily,
    pub size: usize,
    pub t: usize,
    pub exact: f64,
    /// Mean and standard error over repetitions of the `shots`-shot estimate.
    pub sampled: f64,
    pub sampled_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsffReport {
    pub curves: Vec<PsffCurve>,
    pub validation: Vec<PsffValidation>,
}

/// Exact ensemble pSFF curves for both families, and the sampled estimator
/// checked against the exact value on realization 0.
pub fn run_psff_demo(spec: &PsffDemoSpec, seed: u64) -> Result<PsffReport> {
    let families = [
        (PsffFamily::DualUnitary, [PI, PI, spec.jz]),
        (PsffFamily::Generic, spec.generic_j),
    ];
    let mut curves = Vec::new();
    let mut validation = Vec::new();
    for (fi, &(family, j_xyz)) in families.iter().enumerate() {
        let template = BrickworkTemplate { n: spec.n, j_xyz };
        let fam_seed = derive_seed(seed, &[TAG_PSFF, fi as u64]);
        let circuits = (0..spec.n_real)
            .map(|r| brickwork_unitary(&template.realization(fam_seed, r)))
            .collect::<Result<Vec<_>>>()?;
        for (si, &size) in spec.subsystem_sizes.iter().enumerate() {
            let a = Subsystem::contiguous(spec.n, size)?;
            let per_real = circuits
                .par_iter()
                .map(|c| psff_exact(c, spec.t_max, &a))
                .collect::<Result<Vec<_>>>()?;
            let (mean, stderr): (Vec<f64>, Vec<f64>) = (0..spec.t_max)
                .map(|t| mean_stderr(&per_real.iter().map(|v| v[t]).collect::<Vec<_>>()))
                .unzip();
            let da = a.dim_a() as f64;
            curves.push(PsffCurve { family, size, mean, stderr, plateau: 1.0 / (da * da) });
            for &t in &spec.validation_steps {
                let reps = (0..spec.repetitions)
                    .into_par_iter()
                    .map(|rep| {
                        let path = [TAG_PSFF_SAMPLED, fi as u64, si as u64, t as u64, rep as u64];
                        psff_sampled(&circuits[0], t, &a, spec.shots, &mut stream(seed, &path))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (sampled, sampled_stderr) = mean_stderr(&reps);
                validation.push(PsffValidation {
                    family,
                    size,
                    t,
                    exact: per_real[0][t - 1],
                    sampled,
                    sampled_stderr,
                });
            }
        }
    }
    Ok(PsffReport { curves, validation })
}

/// Bin counts over `[lo, hi)`; values outside are clamped into the edge bins.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &v in values {
        let k = ((v - lo) / (hi - lo) * bins as f64).floor();
        let k = (k.max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_histogram<W: Write>(w: &mut W, name: &str, values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<()> {
    let width = (hi - lo) / bins as f64;
    for (k, c) in histogram(values, lo, hi, bins).into_iter().enumerate() {
        let a = lo + k as f64 * width;
        writeln!(w, "{name},{a},{},{c}", a + width)?;
    }
    Ok(())
}

fn write_dtc_optimize(dir: &Path, out: &DtcOptimizeOutcome) -> Result<()> {
    let mut w = create(dir, "trajectories.csv")?;
    let dim = out.trajectories.first().map_or(0, |t| t.best.params.len());
    let cols: Vec<String> = (0..dim).map(|i| format!("p{i}")).collect();
    writeln!(w, "run,iteration,value,{}", cols.join(","))?;
    for (run, traj) in out.trajectories.iter().enumerate() {
        for e in &traj.evaluations {
            let ps: Vec<String> = e.params.iter().map(f64::to_string).collect();
            writeln!(w, "{run},{},{},{}", e.iteration, e.value, ps.join(","))?;
        }
    }
    w.flush()?;

    let mut w = create(dir, "runs.csv")?;
    let n = out.records.first().map_or(0, |r| r.params.n());
    let js: Vec<String> = (0..n).map(|i| format!("j_{i}")).collect();
    let hs: Vec<String> = (0..n).map(|i| format!("h_{i}")).collect();
    writeln!(
        w,
        "run,initial_f,final_f,best_recorded_f,s_dot_m,s_dot_z,m_dot_z,j_offset,h_median_offset,iterations,evaluations,{},{},s_x,s_y,s_z,m_x,m_y,m_z",
        js.join(","),
        hs.join(",")
    )?;
    for r in &out.records {
        let p = &r.params;
        let nums: Vec<String> = p
            .j
            .iter()
            .chain(&p.h)
            .chain(&p.s_hat)
            .chain(&p.m_hat)
            .map(f64::to_string)
            .collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.run,
            r.initial_f,
            r.final_f,
            r.best_recorded_f,
            r.s_dot_m,
            r.s_dot_z,
            r.m_dot_z,
            r.j_offset,
            r.h_median_offset,
            r.iterations,
            r.evaluations,
            nums.join(",")
        )?;
    }
    w.flush()?;

    let mut w = create(dir, "histograms.csv")?;
    writeln!(w, "quantity,lo,hi,count")?;
    let j: Vec<f64> = out.records.iter().flat_map(|r| r.params.j.iter().map(|x| x.rem_euclid(FRAC_PI_2))).collect();
    let h: Vec<f64> = out.records.iter().flat_map(|r| r.params.h.iter().map(|x| x.rem_euclid(PI))).collect();
    let sm: Vec<f64> = out.records.iter().map(|r| r.s_dot_m).collect();
    let mz: Vec<f64> = out.records.iter().map(|r| r.m_dot_z).collect();
    write_histogram(&mut w, "j_mod_half_pi", &j, 0.0, FRAC_PI_2, 18)?;
    write_histogram(&mut w, "h_mod_pi", &h, 0.0, PI, 18)?;
    write_histogram(&mut w, "s_dot_m", &sm, 0.0, 1.0, 10)?;
    write_histogram(&mut w, "m_dot_z", &mz, 0.0, 1.0, 10)?;
    w.flush()?;
    Ok(())
}

fn write_landscape(dir: &Path, header: &str, points: &[LandscapePoint]) -> Result<()> {
    let mut w = create(dir, "landscape.csv")?;
    writeln!(w, "{header}")?;
    for p in points {
        writeln!(w, "{},{},{},{}", p.x, p.y, p.f, p.stderr)?;
    }
    w.flush()?;
    Ok(())
}

fn write_dtc_landscape(dir: &Path, out: &DtcLandscape) -> Result<()> {
    write_landscape(dir, "J,h,f,stderr", &out.points)?;
    let mut w = create(dir, "series.csv")?;
    writeln!(w, "J,h,t,pc1,f")?;
    for s in &out.scatter {
        for (t, v) in s.steps.iter().zip(&s.pc1) {
            writeln!(w, "{},{},{t},{v},{}", s.j, s.h, s.f)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_sff_cut(dir: &Path, out: &[CutPoint]) -> Result<()> {
    let mut w = create(dir, "landscape.csv")?;
    writeln!(w, "n,J,f,stderr,tension,at_zero,delta_f_rescaled")?;
    for p in out {
        let (tension, at_zero, df) = match &p.fit {
            Some(fit) => (fit.tension.to_string(), fit.at_zero.to_string(), fit.delta_f_rescaled.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        writeln!(w, "{},{},{},{},{tension},{at_zero},{df}", p.n, p.j, p.f, p.stderr)?;
    }
    w.flush()?;
    let mut w = create(dir, "series.csv")?;
    writeln!(w, "n,J,t,mean,stderr,mean_quartic,stderr_quartic")?;
    for p in out {
        let e = &p.ensemble;
        for t in 0..e.t_max {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                p.n,
                p.j,
                t + 1,
                e.mean_sq[t],
                e.stderr_sq[t],
                e.mean_quartic[t],
                e.stderr_quartic[t]
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_psff(dir: &Path, out: &PsffReport) -> Result<()> {
    let mut w = create(dir, "series.csv")?;
    writeln!(w, "family,size,t,mean,stderr,plateau")?;
    for c in &out.curves {
        for t in 0..c.mean.len() {
            writeln!(w, "{},{},{},{},{},{}", c.family.name(), c.size, t + 1, c.mean[t], c.stderr[t], c.plateau)?;
        }
    }
    w.flush()?;
    let mut w = create(dir, "validation.csv")?;
    writeln!(w, "family,size,t,exact,sampled,sampled_stderr")?;
    for v in &out.validation {
        writeln!(w, "{},{},{},{},{},{}", v.family.name(), v.size, v.t, v.exact, v.sampled, v.sampled_stderr)?;
    }
    w.flush()?;
    Ok(())
}

/// Fingerprint written next to the results: crate version plus the fully
/// resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub schema: String,
    pub version: String,
    pub config: CampaignConfig,
}

/// Runs `cfg.kind` on a pool of `cfg.workers` threads and writes every
/// output file into `cfg.out`.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let dir = cfg.out.clone();
    fs::create_dir_all(&dir)?;
    let fingerprint = Fingerprint {
        schema: SCHEMA.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
    };
    fs::write(dir.join("fingerprint.json"), serde_json::to_string_pretty(&fingerprint)? + "\n")?;
    crate::config::write_resolved(cfg, &dir)?;
    pool.install(|| -> Result<()> {
        match cfg.kind {
            CampaignKind::DtcOptimize => write_dtc_optimize(&dir, &run_dtc_optimize(&cfg.dtc_optimize, cfg.seed)?),
            CampaignKind::DtcLandscape => write_dtc_landscape(&dir, &run_dtc_landscape(&cfg.dtc_landscape, cfg.seed)?),
            CampaignKind::SffLandscape => {
                write_landscape(&dir, "Jx,Jy,f,stderr", &run_sff_landscape(&cfg.sff_landscape, cfg.seed)?)
            }
            CampaignKind::SffCut => write_sff_cut(&dir, &run_sff_cut(&cfg.sff_cut, cfg.seed)?),
            CampaignKind::PsffDemo => write_psff(&dir, &run_psff_demo(&cfg.psff_demo, cfg.seed)?),
        }
    })?;
    Ok(dir)
}
