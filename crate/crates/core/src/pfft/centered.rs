//! Kernels for complex data centered about the origin.

use std::sync::Arc;

use num_complex::Complex64;

use super::{PaddedTransform, ResidueBlock};
use crate::dft::{DftDirection, DftExecutor, DftProvider, DftRequest};
use crate::error::{Error, Result};
use crate::plan::{Placement, PlanParams, Regime, RootTable, Symmetry};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A centered sequence: stored index `j` holds logical index `j - floor(L/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredSeq {
    values: Vec<Complex64>,
}

impl CenteredSeq {
    pub fn new(values: Vec<Complex64>) -> Self {
        CenteredSeq { values }
    }

    /// Builds a sequence of length `len` from a function of the logical index.
    pub fn from_logical(len: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let origin = (len / 2) as i64;
        CenteredSeq { values: (0..len as i64).map(|j| f(j - origin)).collect() }
    }

    /// Storage index of logical index 0.
    pub fn origin(&self) -> usize {
        self.values.len() / 2
    }

    /// Logical support `[-origin, len - origin - 1]`.
    pub fn support(&self) -> (i64, i64) {
        let h = self.origin() as i64;
        (-h, self.values.len() as i64 - h - 1)
    }

    pub fn get(&self, logical: i64) -> Complex64 {
        let idx = logical + self.origin() as i64;
        if idx < 0 || idx >= self.values.len() as i64 {
            ZERO
        } else {
            self.values[idx as usize]
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// Padded FFT pair for centered data (`p` even). The logical array is padded
/// symmetrically to `[-p*m/2, p*m/2)` and implicitly to `q*m`.
///
/// Block `v` holds `F[q*l + u*n + v]` at offset `u*m + l` for `u in 0..p/2`;
/// with `p = 2` this is the single residue `r = v`.
#[derive(Clone)]
pub struct CenteredPfft {
    params: PlanParams,
    roots: RootTable,
    fwd_m: Arc<DftExecutor>,
    bwd_m: Arc<DftExecutor>,
    inner: Option<(Arc<DftExecutor>, Arc<DftExecutor>)>,
    scratch_len: usize,
}

impl CenteredPfft {
    pub fn new(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        if params.symmetry != Symmetry::Centered {
            return Err(Error::InvalidParameter(format!("{} params given to centered kernel", params.symmetry)));
        }
        params.validate()?;
        let m = params.m;
        let half = params.p / 2;
        let placement = params.placement;
        let fwd_m = provider.plan(DftRequest::complex(m, DftDirection::Forward, placement).batched(half, 1, m))?;
        let bwd_m = provider.plan(DftRequest::complex(m, DftDirection::Backward, placement).batched(half, 1, m))?;
        let mut fft_scratch = fwd_m.scratch_len().max(bwd_m.scratch_len());
        let inner = if half > 1 {
            let f = provider.plan(DftRequest::complex(half, DftDirection::Forward, placement).batched(m, 1, half))?;
            let b = provider.plan(DftRequest::complex(half, DftDirection::Backward, placement).batched(m, 1, half))?;
            fft_scratch = fft_scratch.max(f.scratch_len()).max(b.scratch_len());
            Some((f, b))
        } else {
            None
        };
        Ok(CenteredPfft {
            roots: RootTable::new(params.padded_len())?,
            params,
            fwd_m,
            bwd_m,
            inner,
            scratch_len: 2 * half * m + fft_scratch,
        })
    }

    fn require(&self, kernel: &'static str, regime: Regime) -> Result<()> {
        if self.params.regime() != regime {
            return Err(Error::WrongRegime {
                kernel,
                reason: format!("p = {} selects {:?}", self.params.p, self.params.regime()),
            });
        }
        Ok(())
    }

    /// Residue `r` of the padded centered spectrum when `p = 2`.
    pub fn forward2c(&self, f: &CenteredSeq, r: usize) -> Result<ResidueBlock<Complex64>> {
        self.require("forward2c", Regime::Pair)?;
        self.forward_block(f.values(), r)
    }

    /// Contribution of residue `r`, in centered storage, when `p = 2`.
    pub fn backward2c(&self, block: &ResidueBlock<Complex64>) -> Result<CenteredSeq> {
        self.require("backward2c", Regime::Pair)?;
        self.backward_block(block).map(CenteredSeq::new)
    }

    /// Residue block `v` (length `p/2*m`) when `p > 2`.
    pub fn forward_inner_c(&self, f: &CenteredSeq, v: usize) -> Result<ResidueBlock<Complex64>> {
        self.require("forward_inner_c", Regime::Inner)?;
        self.forward_block(f.values(), v)
    }

    pub fn backward_inner_c(&self, block: &ResidueBlock<Complex64>) -> Result<CenteredSeq> {
        self.require("backward_inner_c", Regime::Inner)?;
        self.backward_block(block).map(CenteredSeq::new)
    }

    // Stored value at logical index `j`.
    #[inline]
    fn positive(&self, f: &[Complex64], j: usize) -> Complex64 {
        let idx = j + self.params.len / 2;
        if idx < self.params.len {
            f[idx]
        } else {
            ZERO
        }
    }

    #[inline]
    fn negative(&self, f: &[Complex64], j: usize, half_width: usize) -> Complex64 {
        // Logical index `j - half_width`, always negative.
        let idx = j + self.params.len / 2;
        if idx >= half_width {
            f[idx - half_width]
        } else {
            ZERO
        }
    }

    fn forward_pair_chunks(&self, f: &[Complex64], r: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        let m = self.params.m;
        let qm = self.params.padded_len();
        let shift = self.roots.at_inv(r * m);
        let fill = |w: &mut [Complex64]| {
            let mut k = 0;
            for s in 0..m {
                let x = self.positive(f, s) + shift * self.negative(f, s, m);
                w[s] = self.roots.at(k) * x;
                k += r;
                if k >= qm {
                    k -= qm;
                }
            }
        };
        match self.params.placement {
            Placement::InPlace => {
                fill(&mut out[..m]);
                self.fwd_m.process(&mut out[..m], scratch);
            }
            Placement::OutOfPlace => {
                let (w, rest) = scratch.split_at_mut(m);
                fill(w);
                self.fwd_m.process_out_of_place(w, &mut out[..m], rest);
            }
        }
    }

    fn forward_inner_kernel(&self, f: &[Complex64], v: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, q, n, .. } = self.params;
        let half = self.params.p / 2;
        let width = half * m;
        let qm = self.params.padded_len();
        let (fwd_p, _) = self.inner.as_ref().expect("inner regime");
        let (t_buf, rest) = scratch.split_at_mut(width);
        let wrap = self.roots.at_inv((v * width) % qm);
        for t in 0..half {
            let z = self.roots.at(((v * t) % q) * m);
            for s in 0..m {
                let j = t * m + s;
                t_buf[s * half + t] = z * (self.positive(f, j) + wrap * self.negative(f, j, width));
            }
        }
        fwd_p.process(t_buf, rest);
        for s in 0..m {
            let step = (n * s) % qm;
            let mut k = (v * s) % qm;
            for u in 0..half {
                out[u * m + s] = self.roots.at(k) * t_buf[s * half + u];
                k += step;
                if k >= qm {
                    k -= qm;
                }
            }
        }
        self.fwd_m.process(&mut out[..width], rest);
    }

    fn backward_kernel(&self, block: &mut [Complex64], v: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, q, n, len, .. } = self.params;
        let half = self.params.p / 2;
        let width = half * m;
        let qm = self.params.padded_len();
        let origin = len / 2;
        let (t_buf, rest) = scratch.split_at_mut(width);
        let g: &[Complex64] = if half == 1 {
            match self.params.placement {
                Placement::InPlace => {
                    self.bwd_m.process(&mut block[..m], rest);
                    let mut k = 0;
                    for s in 0..m {
                        t_buf[s] = self.roots.at_inv(k) * block[s];
                        k += v;
                        if k >= qm {
                            k -= qm;
                        }
                    }
                }
                Placement::OutOfPlace => {
                    self.bwd_m.process_out_of_place(&mut block[..m], t_buf, rest);
                    let mut k = 0;
                    for x in t_buf.iter_mut() {
                        *x *= self.roots.at_inv(k);
                        k += v;
                        if k >= qm {
                            k -= qm;
                        }
                    }
                }
            }
            t_buf
        } else {
            let (_, bwd_p) = self.inner.as_ref().expect("inner regime");
            self.bwd_m.process(&mut block[..width], rest);
            for s in 0..m {
                let step = (n * s) % qm;
                let mut k = (v * s) % qm;
                for u in 0..half {
                    t_buf[s * half + u] = self.roots.at_inv(k) * block[u * m + s];
                    k += step;
                    if k >= qm {
                        k -= qm;
                    }
                }
            }
            bwd_p.process(t_buf, rest);
            t_buf
        };
        let unwrap = self.roots.at((v * width) % qm);
        for t in 0..half {
            let z = self.roots.at_inv(((v * t) % q) * m);
            let zw = z * unwrap;
            for s in 0..m {
                let j = t * m + s;
                let x = g[s * half + t];
                let idx = j + origin;
                if idx < len {
                    acc[idx] += z * x;
                }
                if idx >= width {
                    acc[idx - width] += zw * x;
                }
            }
        }
    }
}

impl PaddedTransform for CenteredPfft {
    type Spectral = Complex64;

    fn params(&self) -> &PlanParams {
        &self.params
    }

    fn scratch_len(&self) -> usize {
        self.scratch_len
    }

    fn forward(&self, input: &[Complex64], residue: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert!(residue < self.params.n);
        if self.params.p == 2 {
            self.forward_pair_chunks(input, residue, out, scratch);
        } else {
            self.forward_inner_kernel(input, residue, out, scratch);
        }
    }

    fn backward(&self, block: &mut [Complex64], residue: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert!(residue < self.params.n);
        self.backward_kernel(block, residue, acc, scratch);
    }
}
