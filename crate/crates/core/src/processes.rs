//! Seeded generators with known entropic ground truth.
//!
//! Two kinds of ensembles are produced:
//!
//! - processes `{x_k}`: i.i.d. draws from a maximum-entropy density, or a
//!   Gaussian AR model;
//! - noisy recursions `r_{k+1}(x_{0..k+1}) = g_k(x_{0..k}) + n_k`, where the
//!   residual `r` is the first difference `x_{k+1} - x_k`, the state itself
//!   `x_{k+1}`, or the second difference `x_{k+1} - 2x_k + x_{k-1}`.
//!
//! Realization `i` draws from its own random stream `(seed, i)`, so an
//! ensemble is bit-identical across runs and thread counts.

use std::io::{self, Read, Write};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EnsembleMatrix;
use crate::levinson;
use crate::maxent::MaxEntDensity;
use crate::rng;

/// Initial condition of an AR process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ArInit {
    /// `x_0..x_{p-1}` drawn from the stationary law.
    #[default]
    Stationary,
    /// `x_0` fixed, pre-sample values zero.
    Deterministic(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProcessSpec {
    Iid {
        density: MaxEntDensity,
    },
    /// `x_k = Σ coeffs[i-1] x_{k-i} + w_k`, `w_k ~ N(0, sigma²)`.
    GaussianAr {
        coeffs: Vec<f64>,
        sigma: f64,
        #[serde(default)]
        init: ArInit,
    },
}

impl ProcessSpec {
    pub fn iid(density: MaxEntDensity) -> Self {
        ProcessSpec::Iid { density }
    }

    pub fn gaussian_ar(coeffs: Vec<f64>, sigma: f64) -> Self {
        ProcessSpec::GaussianAr { coeffs, sigma, init: ArInit::Stationary }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::Iid { .. } => Ok(()),
            ProcessSpec::GaussianAr { coeffs, sigma, init } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid(format!("AR noise sigma must be positive, got {sigma}")));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("AR coefficients must be finite"));
                }
                if let ArInit::Deterministic(v) = init {
                    if !v.is_finite() {
                        return Err(Error::invalid("deterministic x0 must be finite"));
                    }
                }
                levinson::step_down(coeffs).map(|_| ())
            }
        }
    }

    pub fn is_gaussian(&self) -> bool {
        match self {
            ProcessSpec::Iid { density } => density.is_gaussian(),
            ProcessSpec::GaussianAr { .. } => true,
        }
    }
}

/// The map `g_k` of a recursion, drawn from a small registry. Other maps can
/// be plugged in through [`StepMap`] and [`simulate_recursion_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GMap {
    Zero,
    /// `g_k = c x_k`.
    Linear { c: f64 },
    /// Gradient step on `f(x) = x²/2`: `g_k = -eta x_k`.
    QuadraticGradient { eta: f64 },
}

/// A causal update map `g_k(x_0, ..., x_k)`.
pub trait StepMap: Send + Sync {
    /// `history` holds `x_0..=x_k`.
    fn step(&self, k: usize, history: &[f64]) -> f64;
}

impl StepMap for GMap {
    fn step(&self, _k: usize, history: &[f64]) -> f64 {
        let x = history[history.len() - 1];
        match *self {
            GMap::Zero => 0.0,
            GMap::Linear { c } => c * x,
            GMap::QuadraticGradient { eta } => -eta * x,
        }
    }
}

impl<F> StepMap for F
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    fn step(&self, k: usize, history: &[f64]) -> f64 {
        self(k, history)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum X0Mode {
    Deterministic(f64),
    Random(MaxEntDensity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Residual {
    /// `r_{k+1} = x_{k+1} - x_k`
    FirstDifference,
    /// `r_{k+1} = x_{k+1}`
    Identity,
    /// `r_{k+1} = x_{k+1} - 2 x_k + x_{k-1}`, with `x_{-1} = x_0`
    SecondDifference,
}

impl Residual {
    /// Evaluates the residual functional on a state history for step `k -> k+1`.
    pub fn evaluate(&self, states: &[f64], k: usize) -> f64 {
        match self {
            Residual::FirstDifference => states[k + 1] - states[k],
            Residual::Identity => states[k + 1],
            Residual::SecondDifference => {
                let prev = if k == 0 { states[0] } else { states[k - 1] };
                states[k + 1] - 2.0 * states[k] + prev
            }
        }
    }

    /// Solves `r_{k+1} = increment` for `x_{k+1}`.
    fn advance(&self, states: &[f64], k: usize, increment: f64) -> f64 {
        match self {
            Residual::FirstDifference => states[k] + increment,
            Residual::Identity => increment,
            Residual::SecondDifference => {
                let prev = if k == 0 { states[0] } else { states[k - 1] };
                2.0 * states[k] - prev + increment
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursionSpec {
    pub g: GMap,
    /// Additive i.i.d. noise; `None` runs the recursion noise-free.
    #[serde(default)]
    pub noise: Option<MaxEntDensity>,
    pub x0: X0Mode,
    #[serde(default = "default_residual")]
    pub residual: Residual,
}

fn default_residual() -> Residual {
    Residual::FirstDifference
}

impl RecursionSpec {
    pub fn validate(&self, steps: usize) -> Result<()> {
        if self.residual == Residual::SecondDifference && steps < 2 {
            return Err(Error::invalid("second-difference residual needs K >= 2"));
        }
        let finite = match self.g {
            GMap::Zero => true,
            GMap::Linear { c } => c.is_finite(),
            GMap::QuadraticGradient { eta } => eta.is_finite(),
        };
        if !finite {
            return Err(Error::invalid("recursion map parameters must be finite"));
        }
        if let X0Mode::Deterministic(v) = self.x0 {
            if !v.is_finite() {
                return Err(Error::invalid("deterministic x0 must be finite"));
            }
        }
        Ok(())
    }
}

/// `N` realizations of `K + 1` states `x_0..x_K`.
///
/// For recursions `noises[k]` is `n_k` and `residuals[k]` is `r_{k+1}`
/// (`k = 0..K-1`). For AR processes `noises[k]` is the innovation that
/// produced `x_{k+1}`. Both are stored row-major `N x K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    realizations: usize,
    steps: usize,
    states: Vec<f64>,
    noises: Option<Vec<f64>>,
    residuals: Option<Vec<f64>>,
    seed: u64,
}

impl TrajectoryEnsemble {
    pub fn from_states(realizations: usize, steps: usize, states: Vec<f64>, seed: u64) -> Result<Self> {
        if realizations == 0 {
            return Err(Error::EmptyInput);
        }
        if states.len() != realizations * (steps + 1) {
            return Err(Error::invalid("state array does not match N x (K+1)"));
        }
        Ok(TrajectoryEnsemble { realizations, steps, states, noises: None, residuals: None, seed })
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    /// `K`: the number of transitions; there are `K + 1` states per row.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self, i: usize, t: usize) -> f64 {
        self.states[i * (self.steps + 1) + t]
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn state_row(&self, i: usize) -> &[f64] {
        let w = self.steps + 1;
        &self.states[i * w..(i + 1) * w]
    }

    pub fn state_column(&self, t: usize) -> Vec<f64> {
        (0..self.realizations).map(|i| self.state(i, t)).collect()
    }

    pub fn states_matrix(&self) -> EnsembleMatrix {
        EnsembleMatrix::new(self.realizations, self.steps + 1, self.states.clone())
            .expect("ensemble is rectangular")
    }

    pub fn noises(&self) -> Option<&[f64]> {
        self.noises.as_deref()
    }

    pub fn noises_matrix(&self) -> Option<EnsembleMatrix> {
        let noises = self.noises.as_ref()?;
        EnsembleMatrix::new(self.realizations, self.steps, noises.clone()).ok()
    }

    pub fn noise_column(&self, k: usize) -> Option<Vec<f64>> {
        let noises = self.noises.as_ref()?;
        Some((0..self.realizations).map(|i| noises[i * self.steps + k]).collect())
    }

    pub fn residuals_matrix(&self) -> Option<EnsembleMatrix> {
        let r = self.residuals.as_ref()?;
        EnsembleMatrix::new(self.realizations, self.steps, r.clone()).ok()
    }

    /// Residual `r_{k+1}` across realizations.
    pub fn residual_column(&self, k: usize) -> Option<Vec<f64>> {
        let r = self.residuals.as_ref()?;
        Some((0..self.realizations).map(|i| r[i * self.steps + k]).collect())
    }

    /// Columnar CSV with header `realization,t,x,n`. `n` is the noise applied
    /// at step `t` and is empty where none exists.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "realization,t,x,n")?;
        for i in 0..self.realizations {
            for t in 0..=self.steps {
                let x = self.state(i, t);
                match &self.noises {
                    Some(n) if t < self.steps => {
                        writeln!(w, "{i},{t},{x},{}", n[i * self.steps + t])?
                    }
                    _ => writeln!(w, "{i},{t},{x},")?,
                }
            }
        }
        Ok(())
    }

    /// Binary dump, little-endian: magic `ENTB`, version `u16` (= 1),
    /// `N: u64`, `K: u64`, then the `N x (K+1)` states row-major as `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&BINARY_VERSION.to_le_bytes())?;
        w.write_all(&(self.realizations as u64).to_le_bytes())?;
        w.write_all(&(self.steps as u64).to_le_bytes())?;
        for x in &self.states {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`write_binary`](Self::write_binary). Only the
    /// states are stored; the seed is reported as 0.
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Format("not an ENTB ensemble dump".into()));
        }
        let mut b2 = [0u8; 2];
        r.read_exact(&mut b2)?;
        let version = u16::from_le_bytes(b2);
        if version != BINARY_VERSION {
            return Err(Error::Format(format!("unsupported ENTB version {version}")));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let k = u64::from_le_bytes(b8) as usize;
        let count = n
            .checked_mul(k + 1)
            .ok_or_else(|| Error::Format("ENTB dimensions overflow".into()))?;
        let mut states = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            states.push(f64::from_le_bytes(b8));
        }
        Self::from_states(n, k, states, 0)
    }
}

pub const BINARY_MAGIC: &[u8; 4] = b"ENTB";
pub const BINARY_VERSION: u16 = 1;

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::invalid(format!("N and K must be >= 1, got N={n}, K={k}")));
    }
    Ok(())
}

/// Simulates `N` realizations of `x_0..x_K`.
pub fn simulate_process(spec: &ProcessSpec, n: usize, k: usize, seed: u64) -> Result<TrajectoryEnsemble> {
    check_dims(n, k)?;
    spec.validate()?;
    let width = k + 1;
    let rows: Vec<(Vec<f64>, Option<Vec<f64>>)> = match spec {
        ProcessSpec::Iid { density } => {
            let sampler = density.sampler();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng::stream(seed, i as u64);
                    ((0..width).map(|_| sampler.sample(&mut rng)).collect(), None)
                })
                .collect()
        }
        ProcessSpec::GaussianAr { coeffs, sigma, init } => {
            let order = coeffs.len();
            let prefix = match init {
                ArInit::Stationary => {
                    let r = levinson::ar_autocovariance(coeffs, *sigma, order)?;
                    Some(levinson::levinson_durbin(&r, order)?)
                }
                ArInit::Deterministic(_) => None,
            };
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng::stream(seed, i as u64);
                    let mut x = Vec::with_capacity(width);
                    let mut w = Vec::with_capacity(k);
                    for t in 0..width {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        let (pred_coeffs, sd): (&[f64], f64) = match (&prefix, init) {
                            (Some(sol), _) if t < order => (&sol.coeffs[t], sol.errors[t].sqrt()),
                            (None, ArInit::Deterministic(v)) if t == 0 => {
                                x.push(*v);
                                continue;
                            }
                            _ => (coeffs.as_slice(), *sigma),
                        };
                        let mean: f64 = pred_coeffs
                            .iter()
                            .enumerate()
                            .take(t)
                            .map(|(j, a)| a * x[t - 1 - j])
                            .sum();
                        let innovation = sd * z;
                        if t > 0 {
                            w.push(innovation);
                        }
                        x.push(mean + innovation);
                    }
                    (x, Some(w))
                })
                .collect()
        }
    };
    let mut states = Vec::with_capacity(n * width);
    let mut noises = Vec::with_capacity(n * k);
    let mut has_noise = false;
    for (x, w) in rows {
        states.extend(x);
        if let Some(w) = w {
            has_noise = true;
            noises.extend(w);
        }
    }
    let mut ens = TrajectoryEnsemble::from_states(n, k, states, seed)?;
    if has_noise {
        ens.noises = Some(noises);
    }
    Ok(ens)
}

/// Runs one realization of the recursion from `x0` and a noise sequence.
/// Returns the states and the residuals `r_{k+1} = g_k + n_k`.
fn run_recursion_row(
    residual: Residual,
    map: &dyn StepMap,
    x0: f64,
    noises: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(noises.len() + 1);
    let mut r = Vec::with_capacity(noises.len());
    x.push(x0);
    for (k, &n_k) in noises.iter().enumerate() {
        let increment = map.step(k, &x) + n_k;
        let next = residual.advance(&x, k, increment);
        r.push(increment);
        x.push(next);
    }
    (x, r)
}

/// Simulates `N` realizations of the recursion for `K` steps with the
/// built-in map `spec.g`.
pub fn simulate_recursion(spec: &RecursionSpec, n: usize, k: usize, seed: u64) -> Result<TrajectoryEnsemble> {
    simulate_recursion_with(spec, &spec.g, n, k, seed)
}

/// Like [`simulate_recursion`] with a caller-supplied map in place of `spec.g`.
pub fn simulate_recursion_with(
    spec: &RecursionSpec,
    map: &dyn StepMap,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<TrajectoryEnsemble> {
    check_dims(n, k)?;
    spec.validate(k)?;
    let noise_sampler = spec.noise.map(|d| d.sampler());
    let x0_sampler = match spec.x0 {
        X0Mode::Random(d) => Some(d.sampler()),
        X0Mode::Deterministic(_) => None,
    };
    let rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i as u64);
            let x0 = match (&x0_sampler, spec.x0) {
                (Some(s), _) => s.sample(&mut rng),
                (None, X0Mode::Deterministic(v)) => v,
                (None, X0Mode::Random(_)) => unreachable!(),
            };
            let noises: Vec<f64> = match &noise_sampler {
                Some(s) => (0..k).map(|_| s.sample(&mut rng)).collect(),
                None => vec![0.0; k],
            };
            let (x, r) = run_recursion_row(spec.residual, map, x0, &noises);
            (x, noises, r)
        })
        .collect();
    let mut states = Vec::with_capacity(n * (k + 1));
    let mut noises = Vec::with_capacity(n * k);
    let mut residuals = Vec::with_capacity(n * k);
    for (x, w, r) in rows {
        states.extend(x);
        noises.extend(w);
        residuals.extend(r);
    }
    let mut ens = TrajectoryEnsemble::from_states(n, k, states, seed)?;
    ens.noises = Some(noises);
    ens.residuals = Some(residuals);
    Ok(ens)
}

/// Recomputes the states of a recursion from the recorded initial states and
/// noises alone. The states are a deterministic function of `(x_0, n_0..n_{K-1})`,
/// so the result equals the original ensemble bit for bit.
pub fn replay_recursion(spec: &RecursionSpec, map: &dyn StepMap, ens: &TrajectoryEnsemble) -> Result<Vec<f64>> {
    let noises = ens
        .noises()
        .ok_or_else(|| Error::invalid("ensemble carries no noise record"))?;
    let k = ens.steps();
    let rows: Vec<Vec<f64>> = (0..ens.realizations())
        .into_par_iter()
        .map(|i| run_recursion_row(spec.residual, map, ens.state(i, 0), &noises[i * k..(i + 1) * k]).0)
        .collect();
    Ok(rows.concat())
}
