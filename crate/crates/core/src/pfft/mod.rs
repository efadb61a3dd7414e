//! Padded/unpadded FFT kernels, one residue block at a time.
//!
//! A forward kernel maps the stored input to the entries of the implicitly
//! padded length-`q*m` spectrum whose indices fall in one residue block. A
//! backward kernel maps such a block back to its (unnormalized) contribution
//! to the input-space sequence; summing the contributions of all blocks yields
//! `q*m` times the original data.

mod centered;
mod complex;
mod hermitian;

pub use centered::{CenteredPfft, CenteredSeq};
pub use complex::ComplexPfft;
pub use hermitian::{check_origin_real, HermitianPfft, HermitianSeq, ORIGIN_TOLERANCE};

use num_complex::Complex64;

use crate::dft::DftProvider;
use crate::error::{Error, Result};
use crate::plan::{PlanParams, Symmetry};

/// Transformed-space element type: complex, or real for Hermitian data.
pub trait Spectral: Copy + Default + Send + Sync + std::fmt::Debug + 'static {}
impl Spectral for Complex64 {}
impl Spectral for f64 {}

/// The transformed-space contribution of one residue (or residue block).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueBlock<T> {
    pub index: usize,
    pub data: Vec<T>,
}

/// A forward/backward padded FFT pair for one symmetry class.
pub trait PaddedTransform: Send + Sync {
    type Spectral: Spectral;

    fn params(&self) -> &PlanParams;

    /// Entries per residue block.
    fn block_len(&self) -> usize {
        self.params().block_len()
    }

    /// Stored input length.
    fn input_len(&self) -> usize {
        self.params().stored_len()
    }

    fn residue_count(&self) -> usize {
        self.params().n
    }

    /// Complex scratch entries needed by `forward`, `backward` and `forward_pair`.
    fn scratch_len(&self) -> usize;

    /// Writes residue block `residue` of the padded spectrum of `input` into `out`.
    fn forward(&self, input: &[Complex64], residue: usize, out: &mut [Self::Spectral], scratch: &mut [Complex64]);

    /// Adds the contribution of residue block `residue` to `acc`. `block` is clobbered.
    fn backward(
        &self,
        block: &mut [Self::Spectral],
        residue: usize,
        acc: &mut [Complex64],
        scratch: &mut [Complex64],
    );

    /// Whether residues `v` and `n - v` can be computed together.
    fn supports_pairs(&self) -> bool {
        false
    }

    /// Computes the blocks for residues `v` and `n - v` in one pass.
    fn forward_pair(
        &self,
        input: &[Complex64],
        v: usize,
        out_v: &mut [Self::Spectral],
        out_conj: &mut [Self::Spectral],
        scratch: &mut [Complex64],
    ) {
        self.forward(input, v, out_v, scratch);
        self.forward(input, self.residue_count() - v, out_conj, scratch);
    }

    /// Allocating, checked form of [`PaddedTransform::forward`].
    fn forward_block(&self, input: &[Complex64], residue: usize) -> Result<ResidueBlock<Self::Spectral>> {
        check_len(input.len(), self.input_len())?;
        check_residue(residue, self.residue_count())?;
        let mut data = vec![Self::Spectral::default(); self.block_len()];
        let mut scratch = vec![Complex64::default(); self.scratch_len()];
        self.forward(input, residue, &mut data, &mut scratch);
        Ok(ResidueBlock { index: residue, data })
    }

    /// Allocating, checked form of [`PaddedTransform::backward`]: the contribution
    /// of one block, without the `1/(q*m)` factor.
    fn backward_block(&self, block: &ResidueBlock<Self::Spectral>) -> Result<Vec<Complex64>> {
        check_len(block.data.len(), self.block_len())?;
        check_residue(block.index, self.residue_count())?;
        let mut data = block.data.clone();
        let mut acc = vec![Complex64::default(); self.input_len()];
        let mut scratch = vec![Complex64::default(); self.scratch_len()];
        self.backward(&mut data, block.index, &mut acc, &mut scratch);
        Ok(acc)
    }
}

/// Kernels constructible from parameters alone.
pub trait KernelBuild: PaddedTransform + Sized {
    fn build(params: PlanParams, provider: &mut DftProvider) -> Result<Self>;
}

impl KernelBuild for ComplexKernel {
    fn build(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        ComplexKernel::new(params, provider)
    }
}

impl KernelBuild for ComplexPfft {
    fn build(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        ComplexPfft::new(params, provider)
    }
}

impl KernelBuild for CenteredPfft {
    fn build(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        CenteredPfft::new(params, provider)
    }
}

impl KernelBuild for HermitianPfft {
    fn build(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        HermitianPfft::new(params, provider)
    }
}

pub(crate) fn check_residue(index: usize, count: usize) -> Result<()> {
    if index >= count {
        return Err(Error::ResidueOutOfRange { index, count });
    }
    Ok(())
}

pub(crate) fn check_len(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// A padded transform of uncentered or centered complex data, chosen at run time.
#[derive(Clone)]
pub enum ComplexKernel {
    Complex(ComplexPfft),
    Centered(CenteredPfft),
}

impl ComplexKernel {
    pub fn new(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        match params.symmetry {
            Symmetry::Complex => Ok(ComplexKernel::Complex(ComplexPfft::new(params, provider)?)),
            Symmetry::Centered => Ok(ComplexKernel::Centered(CenteredPfft::new(params, provider)?)),
            Symmetry::Hermitian => Err(Error::InvalidParameter(
                "Hermitian transforms produce real spectra; use HermitianPfft".into(),
            )),
        }
    }
}

impl PaddedTransform for ComplexKernel {
    type Spectral = Complex64;

    fn params(&self) -> &PlanParams {
        match self {
            ComplexKernel::Complex(k) => k.params(),
            ComplexKernel::Centered(k) => k.params(),
        }
    }

    fn scratch_len(&self) -> usize {
        match self {
            ComplexKernel::Complex(k) => k.scratch_len(),
            ComplexKernel::Centered(k) => k.scratch_len(),
        }
    }

    fn forward(&self, input: &[Complex64], residue: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        match self {
            ComplexKernel::Complex(k) => k.forward(input, residue, out, scratch),
            ComplexKernel::Centered(k) => k.forward(input, residue, out, scratch),
        }
    }

    fn backward(&self, block: &mut [Complex64], residue: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        match self {
            ComplexKernel::Complex(k) => k.backward(block, residue, acc, scratch),
            ComplexKernel::Centered(k) => k.backward(block, residue, acc, scratch),
        }
    }

    fn supports_pairs(&self) -> bool {
        match self {
            ComplexKernel::Complex(k) => k.supports_pairs(),
            ComplexKernel::Centered(k) => k.supports_pairs(),
        }
    }

    fn forward_pair(
        &self,
        input: &[Complex64],
        v: usize,
        out_v: &mut [Complex64],
        out_conj: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        match self {
            ComplexKernel::Complex(k) => k.forward_pair(input, v, out_v, out_conj, scratch),
            ComplexKernel::Centered(k) => k.forward_pair(input, v, out_v, out_conj, scratch),
        }
    }
}
