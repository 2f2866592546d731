//! Nelder–Mead maximization of noisy objectives with periodic restarts.

use std::io::Write;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NmConfig {
    /// Edge length of the axis-aligned simplex built at start and at every
    /// restart.
    pub initial_step: f64,
    /// Iterations between simplex rebuilds around the incumbent best.
    pub restart_every: usize,
    pub max_iters: usize,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once the simplex diameter falls below this value (0 disables).
    pub xtol: f64,
    /// Per-parameter period; evaluated points are wrapped into `[0, period)`.
    pub periods: Vec<Option<f64>>,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            restart_every: 25,
            max_iters: 500,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            xtol: 0.0,
            periods: Vec::new(),
        }
    }
}

impl NmConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = self.initial_step > 0.0
            && self.restart_every >= 1
            && self.reflection > 0.0
            && self.expansion > 1.0
            && self.expansion > self.reflection
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.xtol >= 0.0;
        if !ok {
            return domain(format!("inadmissible Nelder-Mead configuration {self:?}"));
        }
        if !self.periods.is_empty() && self.periods.len() != dim {
            return domain(format!(
                "{} periods given for a {dim}-dimensional problem",
                self.periods.len()
            ));
        }
        Ok(())
    }

    fn wrap(&self, x: &[f64]) -> Vec<f64> {
        if self.periods.is_empty() {
            return x.to_vec();
        }
        x.iter()
            .zip(&self.periods)
            .map(|(&v, p)| match p {
                Some(p) => v.rem_euclid(*p),
                None => v,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptTrajectory {
    /// Every objective evaluation in order, with the (wrapped) point used.
    pub evaluations: Vec<Evaluation>,
    /// Best recorded estimate after each completed iteration.
    pub best_per_iteration: Vec<f64>,
    pub best: Evaluation,
    pub iterations: usize,
    pub restarts: usize,
    pub final_simplex_diameter: f64,
}

impl OptTrajectory {
    pub fn initial_value(&self) -> f64 {
        self.evaluations[0].value
    }

    /// CSV `iteration,value,p0,p1,…` of every evaluation.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dim = self.best.params.len();
        let cols: Vec<String> = (0..dim).map(|i| format!("p{i}")).collect();
        writeln!(w, "iteration,value,{}", cols.join(","))?;
        for e in &self.evaluations {
            let ps: Vec<String> = e.params.iter().map(|p| p.to_string()).collect();
            writeln!(w, "{},{},{}", e.iteration, e.value, ps.join(","))?;
        }
        Ok(())
    }
}

struct Vertex {
    x: Vec<f64>,
    /// Objective estimate (maximized).
    f: f64,
}

struct Runner<'a, F> {
    obj: F,
    cfg: &'a NmConfig,
    rng: &'a mut dyn RngCore,
    evaluations: Vec<Evaluation>,
    best: Option<Evaluation>,
    iteration: usize,
}

impl<F> Runner<'_, F>
where
    F: FnMut(&[f64], &mut dyn RngCore) -> f64,
{
    fn eval(&mut self, x: Vec<f64>) -> Result<Vertex> {
        let wrapped = self.cfg.wrap(&x);
        let f = (self.obj)(&wrapped, self.rng);
        if !f.is_finite() {
            return Err(Error::NonFiniteObjective {
                iteration: self.iteration,
                value: f,
            });
        }
        let record = Evaluation {
            iteration: self.iteration,
            params: wrapped,
            value: f,
        };
        if self.best.as_ref().is_none_or(|b| f > b.value) {
            self.best = Some(record.clone());
        }
        self.evaluations.push(record);
        Ok(Vertex { x, f })
    }

    fn simplex_around(&mut self, center: Vertex) -> Result<Vec<Vertex>> {
        let mut simplex = Vec::with_capacity(center.x.len() + 1);
        let dim = center.x.len();
        let base = center.x.clone();
        simplex.push(center);
        for d in 0..dim {
            let mut x = base.clone();
            x[d] += self.cfg.initial_step;
            simplex.push(self.eval(x)?);
        }
        Ok(simplex)
    }
}

fn sort_desc(simplex: &mut [Vertex]) {
    simplex.sort_by(|a, b| b.f.total_cmp(&a.f));
}

fn diameter(simplex: &[Vertex]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in simplex.iter().enumerate() {
        for b in &simplex[i + 1..] {
            let dist = a.x.iter().zip(&b.x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            d = d.max(dist);
        }
    }
    d
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Maximizes `obj` starting from `x0`. Standard Nelder–Mead on `−obj`; every
/// `restart_every` iterations the simplex is rebuilt around the incumbent
/// best vertex (keeping its recorded estimate) with fresh axis-aligned steps.
pub fn maximize<F>(
    obj: F,
    x0: &[f64],
    cfg: &NmConfig,
    rng: &mut dyn RngCore,
) -> Result<OptTrajectory>
where
    F: FnMut(&[f64], &mut dyn RngCore) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return domain("optimization needs at least one parameter");
    }
    cfg.validate(dim)?;
    let mut run = Runner {
        obj,
        cfg,
        rng,
        evaluations: Vec::new(),
        best: None,
        iteration: 0,
    };
    let start = run.eval(x0.to_vec())?;
    let mut simplex = run.simplex_around(start)?;
    let mut restarts = 0;
    let mut best_per_iteration = Vec::with_capacity(cfg.max_iters);
    let mut since_restart = 0;

    for it in 1..=cfg.max_iters {
        run.iteration = it;
        if since_restart == cfg.restart_every {
            sort_desc(&mut simplex);
            let best = simplex.swap_remove(0);
            simplex = run.simplex_around(best)?;
            restarts += 1;
            since_restart = 0;
        }
        sort_desc(&mut simplex);
        step(&mut run, &mut simplex)?;
        since_restart += 1;
        best_per_iteration.push(run.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.value));
        if cfg.xtol > 0.0 && diameter(&simplex) < cfg.xtol {
            break;
        }
    }
    let iterations = run.iteration;
    Ok(OptTrajectory {
        evaluations: run.evaluations,
        best_per_iteration,
        best: run.best.expect("at least one evaluation"),
        iterations,
        restarts,
        final_simplex_diameter: diameter(&simplex),
    })
}

/// One Nelder–Mead iteration on a simplex sorted best-first.
fn step<F>(run: &mut Runner<'_, F>, simplex: &mut Vec<Vertex>) -> Result<()>
where
    F: FnMut(&[f64], &mut dyn RngCore) -> f64,
{
    let cfg = run.cfg;
    let dim = simplex.len() - 1;
    let worst = dim;
    let mut centroid = vec![0.0; dim];
    for v in &simplex[..dim] {
        for (c, x) in centroid.iter_mut().zip(&v.x) {
            *c += x / dim as f64;
        }
    }
    let f_best = simplex[0].f;
    let f_second_worst = simplex[dim - 1].f;
    let f_worst = simplex[worst].f;

    let reflected = run.eval(affine(&centroid, &simplex[worst].x, -cfg.reflection))?;
    if reflected.f > f_best {
        let expanded = run.eval(affine(&centroid, &simplex[worst].x, -cfg.expansion))?;
        simplex[worst] = if expanded.f > reflected.f { expanded } else { reflected };
        return Ok(());
    }
    if reflected.f > f_second_worst {
        simplex[worst] = reflected;
        return Ok(());
    }
    if reflected.f > f_worst {
        // Outside contraction.
        let contracted = run.eval(affine(&centroid, &reflected.x, cfg.contraction))?;
        if contracted.f >= reflected.f {
            simplex[worst] = contracted;
            return Ok(());
        }
    } else {
        // Inside contraction.
        let contracted = run.eval(affine(&centroid, &simplex[worst].x, cfg.contraction))?;
        if contracted.f > f_worst {
            simplex[worst] = contracted;
            return Ok(());
        }
    }
    // Shrink toward the best vertex.
    let best_x = simplex[0].x.clone();
    for k in 1..simplex.len() {
        let x = affine(&best_x, &simplex[k].x, cfg.shrink);
        simplex[k] = run.eval(x)?;
    }
    Ok(())
}
