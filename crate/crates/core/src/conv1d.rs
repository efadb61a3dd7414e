//! One-dimensional dealiased convolution, one group of residues at a time.

use num_complex::Complex64;

use crate::dft::DftProvider;
use crate::error::{Error, Result};
use crate::mult::MultOperator;
use crate::pfft::{check_origin_real, ComplexKernel, HermitianPfft, KernelBuild, PaddedTransform};
use crate::plan::{PlanParams, Symmetry};

/// A planned convolution of `A` inputs into `B` outputs over one kernel.
///
/// Work storage is `max(A, B) * D` residue blocks plus kernel scratch. A plan
/// is single-flight: concurrent callers need their own clone.
pub struct Conv1d<K: PaddedTransform> {
    kernel: K,
    inputs: usize,
    outputs: usize,
    groups: Vec<Vec<usize>>,
    paired: bool,
    work: Vec<K::Spectral>,
    scratch: Vec<Complex64>,
    acc: Vec<Complex64>,
}

pub type ComplexConv1d = Conv1d<ComplexKernel>;
pub type HermitianConv1d = Conv1d<HermitianPfft>;

impl<K: PaddedTransform + Clone> Clone for Conv1d<K> {
    fn clone(&self) -> Self {
        Conv1d {
            kernel: self.kernel.clone(),
            inputs: self.inputs,
            outputs: self.outputs,
            groups: self.groups.clone(),
            paired: self.paired,
            work: self.work.clone(),
            scratch: self.scratch.clone(),
            acc: self.acc.clone(),
        }
    }
}

// Residues 0..n in chunks of `d`; with conjugate-pair kernels and d = 2, the
// self-conjugate residues run alone and the rest as (v, n - v).
pub(crate) fn residue_groups(n: usize, d: usize, paired: bool) -> Vec<Vec<usize>> {
    if !paired {
        return (0..n).collect::<Vec<_>>().chunks(d).map(<[usize]>::to_vec).collect();
    }
    let mut groups = vec![vec![0]];
    for v in 1..n.div_ceil(2) {
        groups.push(vec![v, n - v]);
    }
    if n % 2 == 0 {
        groups.push(vec![n / 2]);
    }
    groups
}

impl<K: KernelBuild> Conv1d<K> {
    pub fn plan(params: PlanParams, inputs: usize, outputs: usize, provider: &mut DftProvider) -> Result<Self> {
        Conv1d::new(K::build(params, provider)?, inputs, outputs)
    }
}

impl<K: PaddedTransform> Conv1d<K> {
    pub fn new(kernel: K, inputs: usize, outputs: usize) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::Arity(format!("convolution of {inputs} inputs into {outputs} outputs")));
        }
        let params = *kernel.params();
        params.validate()?;
        let d = params.residues_per_pass;
        let paired = d == 2 && kernel.supports_pairs();
        let groups = residue_groups(params.n, d, paired);
        let width = inputs.max(outputs) * d * kernel.block_len();
        Ok(Conv1d {
            work: vec![K::Spectral::default(); width],
            scratch: vec![Complex64::default(); kernel.scratch_len()],
            acc: Vec::new(),
            kernel,
            inputs,
            outputs,
            groups,
            paired,
        })
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn params(&self) -> &PlanParams {
        self.kernel.params()
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.inputs, self.outputs)
    }

    /// Whether residues are grouped as conjugate pairs.
    pub fn paired(&self) -> bool {
        self.paired
    }

    pub fn residue_groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Complex words held by the plan beyond inputs and outputs.
    pub fn work_words(&self) -> usize {
        let spectral = std::mem::size_of::<K::Spectral>() as f64 / std::mem::size_of::<Complex64>() as f64;
        (self.work.len() as f64 * spectral).ceil() as usize + self.scratch.len()
    }

    fn check_call(&self, mult: &dyn MultOperator<K::Spectral>, inputs: &[&[Complex64]], outputs: usize) -> Result<()> {
        if mult.inputs() != self.inputs || mult.outputs() != self.outputs {
            return Err(Error::Arity(format!(
                "plan is {} -> {}, operator is {} -> {}",
                self.inputs,
                self.outputs,
                mult.inputs(),
                mult.outputs()
            )));
        }
        if inputs.len() != self.inputs {
            return Err(Error::Arity(format!("expected {} inputs, got {}", self.inputs, inputs.len())));
        }
        if outputs != self.outputs {
            return Err(Error::Arity(format!("expected {} outputs, got {outputs}", self.outputs)));
        }
        let len = self.kernel.input_len();
        for f in inputs {
            if f.len() != len {
                return Err(Error::LengthMismatch { expected: len, actual: f.len() });
            }
            if self.params().symmetry == Symmetry::Hermitian {
                check_origin_real(f)?;
            }
        }
        Ok(())
    }

    /// Writes the `B` outputs for `A` read-only inputs, normalized by `1/(q*m)`.
    pub fn convolve_into(
        &mut self,
        inputs: &[&[Complex64]],
        outputs: &mut [&mut [Complex64]],
        mult: &dyn MultOperator<K::Spectral>,
    ) -> Result<()> {
        self.check_call(mult, inputs, outputs.len())?;
        let len = self.kernel.input_len();
        for h in outputs.iter() {
            if h.len() != len {
                return Err(Error::LengthMismatch { expected: len, actual: h.len() });
            }
        }
        let scale = 1.0 / self.params().padded_len() as f64;
        self.run(inputs, outputs, mult, scale);
        Ok(())
    }

    /// Overwrites `data[..B]` with the outputs computed from `data[..A]`.
    /// Requires `B <= data.len()` and `A <= data.len()`.
    pub fn convolve(&mut self, data: &mut [Vec<Complex64>], mult: &dyn MultOperator<K::Spectral>) -> Result<()> {
        if data.len() < self.inputs.max(self.outputs) {
            return Err(Error::Arity(format!(
                "in-place convolution needs {} buffers, got {}",
                self.inputs.max(self.outputs),
                data.len()
            )));
        }
        let len = self.kernel.input_len();
        let mut acc = std::mem::take(&mut self.acc);
        acc.resize(self.outputs * len, Complex64::default());
        let result = {
            let inputs: Vec<&[Complex64]> = data[..self.inputs].iter().map(Vec::as_slice).collect();
            self.check_call(mult, &inputs, self.outputs).map(|_| {
                let mut outs: Vec<&mut [Complex64]> = acc.chunks_mut(len).collect();
                let scale = 1.0 / self.params().padded_len() as f64;
                self.run(&inputs, &mut outs, mult, scale);
            })
        };
        if result.is_ok() {
            for (b, h) in acc.chunks(len).enumerate() {
                data[b].clear();
                data[b].extend_from_slice(h);
            }
        }
        self.acc = acc;
        result
    }

    /// Allocating form: returns the `B` outputs.
    pub fn convolve_new(
        &mut self,
        inputs: &[&[Complex64]],
        mult: &dyn MultOperator<K::Spectral>,
    ) -> Result<Vec<Vec<Complex64>>> {
        let len = self.kernel.input_len();
        let mut out = vec![vec![Complex64::default(); len]; self.outputs];
        let mut refs: Vec<&mut [Complex64]> = out.iter_mut().map(Vec::as_mut_slice).collect();
        self.convolve_into(inputs, &mut refs, mult)?;
        Ok(out)
    }

    /// Unchecked driver: `outputs[b] = scale * sum over residues of backward(mult(forward(inputs)))`.
    pub(crate) fn run(
        &mut self,
        inputs: &[&[Complex64]],
        outputs: &mut [&mut [Complex64]],
        mult: &dyn MultOperator<K::Spectral>,
        scale: f64,
    ) {
        let blk = self.kernel.block_len();
        for h in outputs.iter_mut() {
            h.fill(Complex64::default());
        }
        let operands = self.inputs.max(self.outputs);
        for group in &self.groups {
            let g = group.len();
            let width = g * blk;
            let work = &mut self.work[..operands * width];
            for (a, f) in inputs.iter().enumerate() {
                let slot = &mut work[a * width..(a + 1) * width];
                if self.paired && g == 2 {
                    let (first, second) = slot.split_at_mut(blk);
                    self.kernel.forward_pair(f, group[0], first, second, &mut self.scratch);
                } else {
                    for (i, &r) in group.iter().enumerate() {
                        self.kernel.forward(f, r, &mut slot[i * blk..(i + 1) * blk], &mut self.scratch);
                    }
                }
            }
            mult.apply(work, width);
            for (b, h) in outputs.iter_mut().enumerate() {
                for (i, &r) in group.iter().enumerate() {
                    let block = &mut work[b * width + i * blk..b * width + (i + 1) * blk];
                    self.kernel.backward(block, r, h, &mut self.scratch);
                }
            }
        }
        if scale != 1.0 {
            for h in outputs.iter_mut() {
                for x in h.iter_mut() {
                    *x *= scale;
                }
            }
        }
    }
}

/// Builds a complex or centered convolution plan from parameters.
pub fn plan_complex(params: PlanParams, inputs: usize, outputs: usize) -> Result<ComplexConv1d> {
    Conv1d::plan(params, inputs, outputs, &mut DftProvider::default())
}

/// Builds a Hermitian convolution plan from parameters.
pub fn plan_hermitian(params: PlanParams, inputs: usize, outputs: usize) -> Result<HermitianConv1d> {
    Conv1d::plan(params, inputs, outputs, &mut DftProvider::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_cover_every_residue_once() {
        for n in 1..12 {
            for d in 1..=n {
                let mut all: Vec<usize> = residue_groups(n, d, false).concat();
                all.sort_unstable();
                assert_eq!(all, (0..n).collect::<Vec<_>>());
            }
            let mut all: Vec<usize> = residue_groups(n, 2, true).concat();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
        assert_eq!(residue_groups(5, 2, true), vec![vec![0], vec![1, 4], vec![2, 3]]);
        assert_eq!(residue_groups(4, 2, true), vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(residue_groups(5, 2, false), vec![vec![0, 1], vec![2, 3], vec![4]]);
    }
}
