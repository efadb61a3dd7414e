use hybrid_dealias::convnd::axis_params;
use hybrid_dealias::oracle::{direct_convolution_nd, relative_error};
use hybrid_dealias::plan::{PlanParams, Symmetry};
use hybrid_dealias::Result;

use crate::hybrid::HybridPlan;

pub const TOLERANCE: f64 = 1e-11;

/// Largest `L` swept by default for each kind and dimension.
pub fn default_max_len(kind: Symmetry, dims: usize) -> usize {
    match (kind, dims) {
        (Symmetry::Complex, 1) => 48,
        (_, 1) => 31,
        (Symmetry::Complex, 2) => 12,
        (_, 2) => 9,
        (Symmetry::Complex, _) => 6,
        _ => 5,
    }
}

/// Padded lengths swept for `L`: `2L-1` and `2L` for complex data, `ceil(3L/2)` otherwise.
pub fn sweep_lengths(kind: Symmetry, len: usize) -> Vec<usize> {
    match kind {
        Symmetry::Complex if len > 1 => vec![2 * len - 1, 2 * len],
        Symmetry::Complex => vec![1, 2],
        _ => vec![(3 * len).div_ceil(2)],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub kind: Symmetry,
    pub dims: usize,
    pub max_len: usize,
    pub cases: usize,
    pub worst: f64,
    /// Parameters of the worst case.
    pub worst_case: Option<(usize, usize, usize)>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.worst <= TOLERANCE
    }
}

/// Every valid `m` (shared by all axes) for every `L <= max_len`, against the direct sum.
pub fn sweep(kind: Symmetry, dims: usize, max_len: usize, seed: u64) -> Result<SweepReport> {
    let seeds = if dims == 1 { 3 } else { 1 };
    let mut report = SweepReport { kind, dims, max_len, cases: 0, worst: 0.0, worst_case: None };
    for len in 1..=max_len {
        for min_padded in sweep_lengths(kind, len) {
            for m in 1..=min_padded {
                let Some(axes) = valid_axes(kind, dims, len, min_padded, m) else {
                    continue;
                };
                let mut plan = HybridPlan::new(&axes)?;
                for s in 0..seeds {
                    let base = seed.wrapping_add(1000 * s + len as u64);
                    let f = plan.random_input(base)?;
                    let g = plan.random_input(base ^ 0x5555)?;
                    let got = plan.convolve_new(&[&f, &g])?;
                    let expected = direct_convolution_nd(&[&f, &g], &vec![len; dims], kind)?;
                    let err = relative_error(&got, &expected);
                    report.cases += 1;
                    if report.worst_case.is_none() || err > report.worst {
                        report.worst = err;
                        report.worst_case = Some((len, min_padded, m));
                    }
                }
            }
        }
    }
    Ok(report)
}

fn valid_axes(kind: Symmetry, dims: usize, len: usize, min_padded: usize, m: usize) -> Option<Vec<PlanParams>> {
    let axes = axis_params(kind, &vec![(len, min_padded, m); dims]).ok()?;
    axes.iter().all(|p| p.validate().is_ok()).then_some(axes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        for kind in [Symmetry::Complex, Symmetry::Centered, Symmetry::Hermitian] {
            for dims in 1..=3 {
                let r = sweep(kind, dims, 4, 9).unwrap();
                assert!(r.cases > 0 && r.passed(), "{r:?}");
            }
        }
    }
}
