use hybrid_dealias::conv1d::{ComplexConv1d, Conv1d, HermitianConv1d};
use hybrid_dealias::convnd::{hermitian_symmetrize_boundary, ComplexConvNd, ConvNd, HermitianConvNd, Layout};
use hybrid_dealias::dft::DftProvider;
use hybrid_dealias::mult::Product;
use hybrid_dealias::oracle::random_input;
use hybrid_dealias::plan::{PlanParams, Symmetry};
use hybrid_dealias::{Complex64, Result};

/// A binary-product convolution plan of any kind and dimension.
pub enum HybridPlan {
    Complex1(ComplexConv1d),
    Hermitian1(HermitianConv1d),
    ComplexNd(ComplexConvNd),
    HermitianNd(HermitianConvNd),
}

impl HybridPlan {
    pub fn new(axes: &[PlanParams]) -> Result<Self> {
        let provider = &mut DftProvider::default();
        let hermitian = axes[axes.len() - 1].symmetry == Symmetry::Hermitian;
        Ok(match (axes.len(), hermitian) {
            (1, false) => HybridPlan::Complex1(Conv1d::plan(axes[0], 2, 1, provider)?),
            (1, true) => HybridPlan::Hermitian1(Conv1d::plan(axes[0], 2, 1, provider)?),
            (_, false) => HybridPlan::ComplexNd(ConvNd::plan(axes.to_vec(), 2, 1, provider)?),
            (_, true) => HybridPlan::HermitianNd(ConvNd::plan(axes.to_vec(), 2, 1, provider)?),
        })
    }

    /// Stored length of each input and output.
    pub fn stored_len(&self) -> usize {
        match self {
            HybridPlan::Complex1(p) => p.params().stored_len(),
            HybridPlan::Hermitian1(p) => p.params().stored_len(),
            HybridPlan::ComplexNd(p) => p.stored_len(),
            HybridPlan::HermitianNd(p) => p.stored_len(),
        }
    }

    pub fn convolve_into(&mut self, inputs: &[&[Complex64]], output: &mut [Complex64]) -> Result<()> {
        let product = Product::new(2)?;
        let mut outs = [output];
        match self {
            HybridPlan::Complex1(p) => p.convolve_into(inputs, &mut outs, &product),
            HybridPlan::Hermitian1(p) => p.convolve_into(inputs, &mut outs, &product),
            HybridPlan::ComplexNd(p) => {
                let layout = Layout::contiguous(p.stored_extents());
                p.convolve_into(inputs, &layout, &mut outs, &layout, &product)
            }
            HybridPlan::HermitianNd(p) => {
                let layout = Layout::contiguous(p.stored_extents());
                p.convolve_into(inputs, &layout, &mut outs, &layout, &product)
            }
        }
    }

    pub fn convolve_new(&mut self, inputs: &[&[Complex64]]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::default(); self.stored_len()];
        self.convolve_into(inputs, &mut out)?;
        Ok(out)
    }

    /// Random admissible input for this plan.
    pub fn random_input(&self, seed: u64) -> Result<Vec<Complex64>> {
        let mut f = random_input(seed, self.stored_len());
        match self {
            HybridPlan::Hermitian1(_) => f[0].im = 0.0,
            HybridPlan::HermitianNd(p) => f = hermitian_symmetrize_boundary(&f, p.axes())?,
            _ => {}
        }
        Ok(f)
    }
}
