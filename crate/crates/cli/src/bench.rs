use std::time::{Duration, Instant};

use hybrid_dealias::bench::{sparse_spot_check, BenchRow, ExplicitConv, Strategy};
use hybrid_dealias::mult::Product;
use hybrid_dealias::oracle::random_input;
use hybrid_dealias::plan::{derive_params, Placement, PlanParams, Symmetry};
use hybrid_dealias::tuner::{Timer, Tuner};
use hybrid_dealias::{Complex64, Error, Result};

use crate::hybrid::HybridPlan;

/// Hybrid results above this error against the sparse oracle are not reported.
pub const SPOT_TOLERANCE: f64 = 1e-10;

pub struct BenchConfig {
    pub kind: Symmetry,
    pub dims: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub incremental: bool,
}

/// Median of `reps` timed calls after one untimed warmup.
pub fn median_time(reps: usize, mut run: impl FnMut() -> Result<()>) -> Result<Duration> {
    run()?;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        run()?;
        samples.push(start.elapsed());
    }
    samples.sort_unstable();
    Ok(samples[samples.len() / 2])
}

pub fn explicit_row(config: &BenchConfig, len: usize, min_padded: usize, strategy: Strategy) -> Result<BenchRow> {
    let size = strategy.explicit_size(min_padded).expect("explicit strategy");
    let placement = match strategy {
        Strategy::ExplicitOutOfPlace => Placement::OutOfPlace,
        _ => Placement::InPlace,
    };
    let mut plan = ExplicitConv::new(config.dims, len, size, 2, 1, placement)?;
    let count = len.pow(config.dims as u32);
    let f = random_input(config.seed, count);
    let g = random_input(config.seed ^ 1, count);
    let mut out = vec![Complex64::default(); count];
    let product = Product::new(2)?;
    let median = median_time(config.repetitions, || plan.convolve_into(&[&f, &g], &mut [&mut out], &product))?;
    Ok(BenchRow::new(config.kind, config.dims, len, min_padded, strategy, median.as_nanos() as u64))
}

/// Tunes, spot-checks and times the hybrid scheme. `previous` carries the
/// last tuned axes through incremental sweeps.
pub fn hybrid_row<T: Timer>(
    config: &BenchConfig,
    tuner: &mut Tuner<T>,
    len: usize,
    min_padded: usize,
    previous: &mut Option<Vec<PlanParams>>,
) -> Result<BenchRow> {
    let reused = if config.incremental { previous.as_ref().and_then(|axes| carry(axes, len, min_padded)) } else { None };
    let axes = match reused {
        Some(axes) => axes,
        None if config.dims == 1 => vec![tuner.tune_1d(len, min_padded, config.kind, 2, 1)?.params],
        None => tuner.tune_nd(&vec![(len, min_padded); config.dims], config.kind, 2, 1)?.axes,
    };
    let mut plan = HybridPlan::new(&axes)?;
    let err = sparse_spot_check(config.kind, config.dims, len, config.seed, |x| plan.convolve_new(x))?;
    if err.is_nan() || err > SPOT_TOLERANCE {
        return Err(Error::InvalidParameter(format!("hybrid plan {axes:?} failed the spot check: error {err:e}")));
    }
    let f = plan.random_input(config.seed)?;
    let g = plan.random_input(config.seed ^ 1)?;
    let mut out = vec![Complex64::default(); plan.stored_len()];
    let median = median_time(config.repetitions, || plan.convolve_into(&[&f, &g], &mut out))?;
    *previous = Some(axes);
    Ok(BenchRow::new(config.kind, config.dims, len, min_padded, Strategy::Hybrid, median.as_nanos() as u64))
}

// The previous choice of (m, D, placement) per axis, if still valid at the new size.
fn carry(axes: &[PlanParams], len: usize, min_padded: usize) -> Option<Vec<PlanParams>> {
    axes.iter()
        .map(|a| {
            let p = derive_params(len, min_padded, a.m, a.symmetry).ok()?;
            p.validate().ok()?;
            let p = p.with_residues_per_pass(a.residues_per_pass.min(p.n)).ok()?.with_placement(a.placement);
            (p.q > p.p || (a.p == a.q && p.p == p.q)).then_some(p)
        })
        .collect()
}
