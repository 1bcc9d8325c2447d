//! Imaginary-time lattice path-integral Monte Carlo: single-site Metropolis
//! sampling of fixed-endpoint paths under e^{-S_E/hbar}, length and increment
//! observables with jackknife errors, and the dimension estimate from the
//! power law of <L> against the measured increment scale.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::propagator::PhysParams;
use crate::rng::{split_seed, DetRng};
use crate::specfun::{fit_power_law, PowerLawFit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PimcError {
    #[error("invalid configuration: {0}")]
    BadConfig(&'static str),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(&'static str),
    #[error("degenerate samples: {0}")]
    Degenerate(&'static str),
    #[error(transparent)]
    Fit(#[from] crate::specfun::SpecFunError),
}

/// Discretized Euclidean-time trajectory with fixed endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePath {
    coords: Vec<f64>, // (n_steps + 1) * dim, site-major
    dim: usize,
    pub delta: f64,
}

impl LatticePath {
    /// Straight-line initial path from `x_in` to `x_fi` over `n_steps` slices.
    pub fn bridge(
        n_steps: usize,
        dim: usize,
        delta: f64,
        x_in: &[f64],
        x_fi: &[f64],
    ) -> Result<Self, PimcError> {
        if n_steps < 2 {
            return Err(PimcError::BadConfig("need at least 2 time slices"));
        }
        if dim == 0 || dim > 3 {
            return Err(PimcError::BadConfig("dimension must be 1..=3"));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(PimcError::BadConfig("slice width must be positive"));
        }
        if x_in.len() != dim || x_fi.len() != dim {
            return Err(PimcError::BadConfig("endpoint dimension mismatch"));
        }
        let mut coords = Vec::with_capacity((n_steps + 1) * dim);
        for i in 0..=n_steps {
            let t = i as f64 / n_steps as f64;
            for d in 0..dim {
                coords.push(x_in[d] + t * (x_fi[d] - x_in[d]));
            }
        }
        Ok(Self { coords, dim, delta })
    }

    pub fn n_steps(&self) -> usize {
        self.coords.len() / self.dim - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn site(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// |x_{k+1} - x_k|.
    pub fn increment_norm(&self, k: usize) -> f64 {
        let a = k * self.dim;
        let b = (k + 1) * self.dim;
        let mut s = 0.0;
        for d in 0..self.dim {
            let dx = self.coords[b + d] - self.coords[a + d];
            s += dx * dx;
        }
        s.sqrt()
    }

    /// Polyline length sum_k |x_{k+1} - x_k|.
    pub fn length(&self) -> f64 {
        (0..self.n_steps()).map(|k| self.increment_norm(k)).sum()
    }

    fn mean_abs_increment(&self) -> f64 {
        self.length() / self.n_steps() as f64
    }

    fn mean_sq_increment(&self) -> f64 {
        let n = self.n_steps();
        (0..n)
            .map(|k| {
                let v = self.increment_norm(k);
                v * v
            })
            .sum::<f64>()
            / n as f64
    }
}

/// Interaction entering the Euclidean action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    Free,
    Harmonic { omega: f64 },
    Coulomb { kappa: f64, eps_reg: f64 },
    /// Velocity-dependent term u0 |dx/dt|^alpha_v on each link.
    Velocity { u0: f64, alpha_v: f64 },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<(), PimcError> {
        let ok = match *self {
            PotentialSpec::Free => true,
            PotentialSpec::Harmonic { omega } => omega > 0.0,
            PotentialSpec::Coulomb { kappa, eps_reg } => kappa > 0.0 && eps_reg > 0.0,
            PotentialSpec::Velocity { u0, alpha_v } => u0 > 0.0 && alpha_v > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(PimcError::BadConfig("potential parameters must be positive"))
        }
    }
}

fn site_potential(pot: &PotentialSpec, p: &PhysParams, x: &[f64]) -> f64 {
    match *pot {
        PotentialSpec::Free | PotentialSpec::Velocity { .. } => 0.0,
        PotentialSpec::Harmonic { omega } => {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            0.5 * p.mass_mu * omega * omega * r2
        }
        PotentialSpec::Coulomb { kappa, eps_reg } => {
            let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            -kappa / (r + eps_reg)
        }
    }
}

fn link_term(pot: &PotentialSpec, p: &PhysParams, delta: f64, seg2: f64) -> f64 {
    // kinetic plus any velocity-dependent interaction on one link,
    // already multiplied by delta
    let speed2 = seg2 / (delta * delta);
    let mut s = 0.5 * p.mass_mu * speed2 * delta;
    if let PotentialSpec::Velocity { u0, alpha_v } = *pot {
        s += u0 * speed2.sqrt().powf(alpha_v) * delta;
    }
    s
}

/// Euclidean action S_E = sum_i delta [ mu/2 ((x_{i+1}-x_i)/delta)^2 + V(x_i) ],
/// with the velocity interaction living on the links.
pub fn euclidean_action(path: &LatticePath, pot: &PotentialSpec, p: &PhysParams) -> f64 {
    let n = path.n_steps();
    let mut s = 0.0;
    for k in 0..n {
        let seg = path.increment_norm(k);
        s += link_term(pot, p, path.delta, seg * seg);
        s += path.delta * site_potential(pot, p, path.site(k));
    }
    s
}

/// One full single-site Metropolis pass over the interior sites with uniform
/// component-wise proposals in [-step, step]; returns the acceptance rate.
/// Detailed balance holds for the weight e^{-S_E/hbar}.
pub fn metropolis_sweep(
    path: &mut LatticePath,
    pot: &PotentialSpec,
    p: &PhysParams,
    step: f64,
    rng: &mut DetRng,
) -> f64 {
    let n = path.n_steps();
    let dim = path.dim;
    let delta = path.delta;
    let mut accepted = 0usize;
    let mut proposal = [0.0f64; 3];
    for i in 1..n {
        let base = i * dim;
        for d in 0..dim {
            proposal[d] = path.coords[base + d] + rng.range_f64(-step, step);
        }
        let mut old_s = 0.0;
        let mut new_s = 0.0;
        for (a, b) in [(i - 1, i), (i, i + 1)] {
            let mut old2 = 0.0;
            let mut new2 = 0.0;
            for d in 0..dim {
                let xa = if a == i { proposal[d] } else { path.coords[a * dim + d] };
                let xb = if b == i { proposal[d] } else { path.coords[b * dim + d] };
                let od = path.coords[b * dim + d] - path.coords[a * dim + d];
                old2 += od * od;
                let nd = xb - xa;
                new2 += nd * nd;
            }
            old_s += link_term(pot, p, delta, old2);
            new_s += link_term(pot, p, delta, new2);
        }
        old_s += delta * site_potential(pot, p, path.site(i));
        new_s += delta * site_potential(pot, p, &proposal[..dim]);

        let d_action = new_s - old_s;
        let accept = d_action <= 0.0 || rng.next_f64() < (-d_action / p.hbar).exp();
        if accept {
            path.coords[base..base + dim].copy_from_slice(&proposal[..dim]);
            accepted += 1;
        }
    }
    accepted as f64 / (n - 1) as f64
}

/// Monte Carlo estimate with jackknife error over binned samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub autocorr_time: f64,
}

const JACKKNIFE_BINS: usize = 32;

fn binned_jackknife(series: &[f64], n_bins: usize) -> Option<(f64, f64)> {
    if series.len() < n_bins || n_bins < 2 {
        return None;
    }
    let bin_len = series.len() / n_bins;
    let used = bin_len * n_bins;
    let bins: Vec<f64> = (0..n_bins)
        .map(|b| series[b * bin_len..(b + 1) * bin_len].iter().sum::<f64>() / bin_len as f64)
        .collect();
    let total: f64 = bins.iter().sum();
    let mean = total / n_bins as f64;
    let nb = n_bins as f64;
    let var: f64 = bins
        .iter()
        .map(|&b| {
            let loo = (total - b) / (nb - 1.0);
            (loo - mean) * (loo - mean)
        })
        .sum();
    let stderr = ((nb - 1.0) / nb * var).sqrt();
    let _ = used;
    Some((mean, stderr))
}

/// Integrated autocorrelation time with a self-consistent window.
fn integrated_autocorr(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 8 {
        return 0.5;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    let max_lag = n / 4;
    for k in 1..=max_lag {
        let mut c = 0.0;
        for i in 0..n - k {
            c += (series[i] - mean) * (series[i + k] - mean);
        }
        c /= (n - k) as f64 * var;
        tau += c;
        if k as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// <L> over stored path samples with jackknife stderr.
pub fn measure_length(paths: &[LatticePath]) -> Result<McEstimate, PimcError> {
    let series: Vec<f64> = paths.iter().map(|p| p.length()).collect();
    let (mean, stderr) = binned_jackknife(&series, JACKKNIFE_BINS)
        .ok_or(PimcError::InsufficientSamples("need at least 32 path samples"))?;
    Ok(McEstimate { mean, stderr, n_samples: series.len(), autocorr_time: integrated_autocorr(&series) })
}

/// Per-increment <|dx|>.
pub fn mean_abs_increment(paths: &[LatticePath]) -> Result<McEstimate, PimcError> {
    let series: Vec<f64> = paths.iter().map(|p| p.mean_abs_increment()).collect();
    let (mean, stderr) = binned_jackknife(&series, JACKKNIFE_BINS)
        .ok_or(PimcError::InsufficientSamples("need at least 32 path samples"))?;
    Ok(McEstimate { mean, stderr, n_samples: series.len(), autocorr_time: integrated_autocorr(&series) })
}

/// Per-increment <(dx)^2>.
pub fn mean_sq_increment(paths: &[LatticePath]) -> Result<McEstimate, PimcError> {
    let series: Vec<f64> = paths.iter().map(|p| p.mean_sq_increment()).collect();
    let (mean, stderr) = binned_jackknife(&series, JACKKNIFE_BINS)
        .ok_or(PimcError::InsufficientSamples("need at least 32 path samples"))?;
    Ok(McEstimate { mean, stderr, n_samples: series.len(), autocorr_time: integrated_autocorr(&series) })
}

/// The ratio <|dx|>^2 / <(dx)^2>, jackknifed over bins. Gaussian increments
/// give 2/pi in one dimension.
pub fn check_eq13(paths: &[LatticePath]) -> Result<McEstimate, PimcError> {
    let abs_s: Vec<f64> = paths.iter().map(|p| p.mean_abs_increment()).collect();
    let sq_s: Vec<f64> = paths.iter().map(|p| p.mean_sq_increment()).collect();
    if abs_s.len() < JACKKNIFE_BINS {
        return Err(PimcError::InsufficientSamples("need at least 32 path samples"));
    }
    let n_bins = JACKKNIFE_BINS;
    let bin_len = abs_s.len() / n_bins;
    let bin_mean = |s: &[f64], b: usize| -> f64 {
        s[b * bin_len..(b + 1) * bin_len].iter().sum::<f64>() / bin_len as f64
    };
    let a_bins: Vec<f64> = (0..n_bins).map(|b| bin_mean(&abs_s, b)).collect();
    let q_bins: Vec<f64> = (0..n_bins).map(|b| bin_mean(&sq_s, b)).collect();
    let a_tot: f64 = a_bins.iter().sum();
    let q_tot: f64 = q_bins.iter().sum();
    if q_tot <= 0.0 {
        return Err(PimcError::Degenerate("zero increment variance"));
    }
    let nb = n_bins as f64;
    let full = (a_tot / nb) * (a_tot / nb) / (q_tot / nb);
    let mut var = 0.0;
    for b in 0..n_bins {
        let a = (a_tot - a_bins[b]) / (nb - 1.0);
        let q = (q_tot - q_bins[b]) / (nb - 1.0);
        if q <= 0.0 {
            return Err(PimcError::Degenerate("zero increment variance in a bin"));
        }
        let r = a * a / q;
        var += (r - full) * (r - full);
    }
    let stderr = ((nb - 1.0) / nb * var).sqrt();
    Ok(McEstimate {
        mean: full,
        stderr,
        n_samples: abs_s.len(),
        autocorr_time: integrated_autocorr(&abs_s),
    })
}

/// Single-chain run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n_steps: usize,
    pub dim: usize,
    pub delta: f64,
    pub sweeps: usize,
    pub therm_sweeps: usize,
    pub measure_every: usize,
    pub x_in: Vec<f64>,
    pub x_fi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub samples: Vec<LatticePath>,
    pub step: f64,
    pub accept_rate: f64,
}

/// Equilibrate (tuning the proposal step into the 0.4..0.6 acceptance band,
/// then freezing it) and sample one chain.
pub fn run_chain(
    pot: &PotentialSpec,
    p: &PhysParams,
    cfg: &ChainConfig,
    seed: u64,
) -> Result<ChainOutput, PimcError> {
    pot.validate()?;
    p.validate().map_err(|_| PimcError::BadConfig("invalid physical parameters"))?;
    if cfg.measure_every == 0 {
        return Err(PimcError::BadConfig("measure_every must be >= 1"));
    }
    let mut path = LatticePath::bridge(cfg.n_steps, cfg.dim, cfg.delta, &cfg.x_in, &cfg.x_fi)?;
    let mut rng = DetRng::seed_from(seed);
    let mut step = (p.hbar * cfg.delta / p.mass_mu).sqrt();

    const TUNE_WINDOW: usize = 32;
    let tune_until = cfg.therm_sweeps * 4 / 5;
    let mut window_acc = 0.0;
    for s in 0..cfg.therm_sweeps {
        window_acc += metropolis_sweep(&mut path, pot, p, step, &mut rng);
        if s < tune_until && (s + 1) % TUNE_WINDOW == 0 {
            let rate = window_acc / TUNE_WINDOW as f64;
            if !(0.4..=0.6).contains(&rate) {
                let factor = (rate / 0.5).max(0.5).min(2.0);
                step *= if factor > 0.0 { factor } else { 0.5 };
                step = step.max(1e-9 * cfg.delta.sqrt()).min(1e9);
            }
            window_acc = 0.0;
        } else if (s + 1) % TUNE_WINDOW == 0 {
            window_acc = 0.0;
        }
    }

    let mut samples = Vec::with_capacity(cfg.sweeps / cfg.measure_every + 1);
    let mut acc_sum = 0.0;
    for s in 0..cfg.sweeps {
        acc_sum += metropolis_sweep(&mut path, pot, p, step, &mut rng);
        if (s + 1) % cfg.measure_every == 0 {
            samples.push(path.clone());
        }
    }
    Ok(ChainOutput {
        samples,
        step,
        accept_rate: acc_sum / cfg.sweeps.max(1) as f64,
    })
}

/// Strategy for executing a batch of independent chains; the CLI supplies a
/// parallel version. Results must be positionally aligned with `seeds`.
pub trait ChainRunner {
    fn run(
        &self,
        pot: &PotentialSpec,
        p: &PhysParams,
        cfg: &ChainConfig,
        seeds: &[u64],
    ) -> Result<Vec<ChainOutput>, PimcError>;
}

pub struct SerialRunner;

impl ChainRunner for SerialRunner {
    fn run(
        &self,
        pot: &PotentialSpec,
        p: &PhysParams,
        cfg: &ChainConfig,
        seeds: &[u64],
    ) -> Result<Vec<ChainOutput>, PimcError> {
        seeds.iter().map(|&s| run_chain(pot, p, cfg, s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DhConfig {
    pub delta_values: Vec<f64>,
    pub dim: usize,
    pub sweeps: usize,
    pub therm_sweeps: usize,
    pub measure_every: usize,
    pub n_chains: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRow {
    pub delta: f64,
    pub n_steps: usize,
    pub mean_abs_dx: f64,
    pub stderr_abs_dx: f64,
    pub mean_sq_dx: f64,
    pub stderr_sq_dx: f64,
    pub mean_l: f64,
    pub stderr_l: f64,
    pub ratio_eq13: f64,
    pub stderr_ratio: f64,
    pub autocorr_l: f64,
    pub accept_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DhOutcome {
    pub rows: Vec<DeltaRow>,
    pub fit: PowerLawFit,
    pub d_h: f64,
    pub d_h_stderr: f64,
}

/// Per slice width: run chains, measure <L> and eps = <|dx|>, then fit
/// <L> against eps as a power law; d_H = exponent + 1.
pub fn estimate_dh(
    pot: &PotentialSpec,
    p: &PhysParams,
    cfg: &DhConfig,
    runner: &dyn ChainRunner,
) -> Result<DhOutcome, PimcError> {
    if cfg.delta_values.len() < 3 {
        return Err(PimcError::BadConfig("need at least 3 slice widths"));
    }
    let mut sorted = cfg.delta_values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !(sorted[0] > 0.0) {
        return Err(PimcError::BadConfig("slice widths must be positive"));
    }
    if sorted[sorted.len() - 1] / sorted[0] < 10.0 - 1e-9 {
        return Err(PimcError::BadConfig("slice widths must span at least one decade"));
    }
    if cfg.n_chains == 0 {
        return Err(PimcError::BadConfig("need at least one chain"));
    }

    let mut rows = Vec::with_capacity(cfg.delta_values.len());
    let mut points = Vec::with_capacity(cfg.delta_values.len());
    for (di, &delta) in cfg.delta_values.iter().enumerate() {
        let n_steps = (p.time_t / delta).round() as usize;
        if n_steps < 4 {
            return Err(PimcError::BadConfig("slice width too coarse for the flight time"));
        }
        let ccfg = ChainConfig {
            n_steps,
            dim: cfg.dim,
            delta,
            sweeps: cfg.sweeps,
            therm_sweeps: cfg.therm_sweeps,
            measure_every: cfg.measure_every,
            x_in: vec![0.0; cfg.dim],
            x_fi: vec![0.0; cfg.dim],
        };
        let seeds: Vec<u64> = (0..cfg.n_chains)
            .map(|c| split_seed(cfg.seed, (di * 1024 + c) as u64))
            .collect();
        let outputs = runner.run(pot, p, &ccfg, &seeds)?;
        let mut paths = Vec::new();
        let mut acc = 0.0;
        for o in &outputs {
            paths.extend(o.samples.iter().cloned());
            acc += o.accept_rate;
        }
        let l = measure_length(&paths)?;
        let a = mean_abs_increment(&paths)?;
        let q = mean_sq_increment(&paths)?;
        let r = check_eq13(&paths)?;
        rows.push(DeltaRow {
            delta,
            n_steps,
            mean_abs_dx: a.mean,
            stderr_abs_dx: a.stderr,
            mean_sq_dx: q.mean,
            stderr_sq_dx: q.stderr,
            mean_l: l.mean,
            stderr_l: l.stderr,
            ratio_eq13: r.mean,
            stderr_ratio: r.stderr,
            autocorr_l: l.autocorr_time,
            accept_rate: acc / outputs.len() as f64,
        });
        points.push((a.mean, l.mean));
    }

    let fit = fit_power_law(&points)?;
    Ok(DhOutcome {
        d_h: fit.exponent + 1.0,
        d_h_stderr: fit.stderr_exponent,
        rows,
        fit,
    })
}
