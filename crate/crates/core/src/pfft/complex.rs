//! Kernels for uncentered complex data.

use std::sync::Arc;

use num_complex::Complex64;

use super::{check_len, check_residue, PaddedTransform, ResidueBlock};
use crate::dft::{DftDirection, DftExecutor, DftProvider, DftRequest};
use crate::error::{Error, Result};
use crate::plan::{Placement, PlanParams, Regime, RootTable, Symmetry};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Padded FFT pair for complex data in the `p = 1`, `p = 2` and `p > 2` regimes.
///
/// Residue blocks hold `F[q*l + r]` for `l in 0..m` when `p <= 2`. For `p > 2`
/// block `v` holds `F[q*l + u*n + v]` at offset `u*m + l`.
#[derive(Clone)]
pub struct ComplexPfft {
    params: PlanParams,
    roots: RootTable,
    fwd_m: Arc<DftExecutor>,
    bwd_m: Arc<DftExecutor>,
    inner: Option<(Arc<DftExecutor>, Arc<DftExecutor>)>,
    scratch_len: usize,
}

impl ComplexPfft {
    pub fn new(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        if params.symmetry != Symmetry::Complex {
            return Err(Error::InvalidParameter(format!("{} params given to complex kernel", params.symmetry)));
        }
        params.validate()?;
        let (m, p) = (params.m, params.p);
        let segments = params.inner_size();
        let placement = params.placement;
        let fwd_m = provider.plan(
            DftRequest::complex(m, DftDirection::Forward, placement).batched(segments, 1, m),
        )?;
        let bwd_m = provider.plan(
            DftRequest::complex(m, DftDirection::Backward, placement).batched(segments, 1, m),
        )?;
        let mut fft_scratch = fwd_m.scratch_len().max(bwd_m.scratch_len());
        let inner = if params.regime() == Regime::Inner {
            let f = provider.plan(DftRequest::complex(p, DftDirection::Forward, placement).batched(m, 1, p))?;
            let b = provider.plan(DftRequest::complex(p, DftDirection::Backward, placement).batched(m, 1, p))?;
            fft_scratch = fft_scratch.max(f.scratch_len()).max(b.scratch_len());
            Some((f, b))
        } else {
            None
        };
        // Work buffers: one block (two for conjugate pairs) plus FFT scratch.
        let work = if params.regime() == Regime::Inner { 2 * p * m } else { m };
        Ok(ComplexPfft {
            roots: RootTable::new(params.padded_len())?,
            params,
            fwd_m,
            bwd_m,
            inner,
            scratch_len: work + fft_scratch,
        })
    }

    pub fn with_provider_default(params: PlanParams) -> Result<Self> {
        ComplexPfft::new(params, &mut DftProvider::default())
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

    /// Residue `r` of the padded spectrum when `p = 1`.
    pub fn forward1(&self, f: &[Complex64], r: usize) -> Result<ResidueBlock<Complex64>> {
        self.require("forward1", Regime::Single)?;
        self.forward_block(f, r)
    }

    /// Contribution of residue `r` to the inverse when `p = 1`.
    pub fn backward1(&self, block: &ResidueBlock<Complex64>) -> Result<Vec<Complex64>> {
        self.require("backward1", Regime::Single)?;
        self.backward_block(block)
    }

    pub fn forward2(&self, f: &[Complex64], r: usize) -> Result<ResidueBlock<Complex64>> {
        self.require("forward2", Regime::Pair)?;
        self.forward_block(f, r)
    }

    pub fn backward2(&self, block: &ResidueBlock<Complex64>) -> Result<Vec<Complex64>> {
        self.require("backward2", Regime::Pair)?;
        self.backward_block(block)
    }

    /// Residue block `v` (length `p*m`) when `p > 2`.
    pub fn forward_inner(&self, f: &[Complex64], v: usize) -> Result<ResidueBlock<Complex64>> {
        self.require("forward_inner", Regime::Inner)?;
        self.forward_block(f, v)
    }

    pub fn backward_inner(&self, block: &ResidueBlock<Complex64>) -> Result<Vec<Complex64>> {
        self.require("backward_inner", Regime::Inner)?;
        self.backward_block(block)
    }

    /// Residue blocks `v` and `n - v` computed together from the real and
    /// imaginary parts of the input. Requires `p > 2` and `v` not self-paired.
    pub fn forward_conjugate_pair(
        &self,
        f: &[Complex64],
        v: usize,
    ) -> Result<(ResidueBlock<Complex64>, ResidueBlock<Complex64>)> {
        self.require("forward_conjugate_pair", Regime::Inner)?;
        check_len(f.len(), self.params.len)?;
        check_residue(v, self.params.n)?;
        let n = self.params.n;
        if v == 0 || 2 * v == n {
            return Err(Error::InvalidParameter(format!("residue {v} is its own conjugate for n = {n}")));
        }
        let len = self.block_len();
        let mut a = vec![ZERO; len];
        let mut b = vec![ZERO; len];
        let mut scratch = vec![ZERO; self.scratch_len];
        self.pair_kernel(f, v, &mut a, &mut b, &mut scratch);
        Ok((ResidueBlock { index: v, data: a }, ResidueBlock { index: n - v, data: b }))
    }

    fn forward_single(&self, f: &[Complex64], r: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, len, .. } = self.params;
        let m_len = len.min(m);
        let fill = |w: &mut [Complex64]| {
            let mut k = 0;
            for s in 0..m_len {
                w[s] = self.roots.at(k) * f[s];
                k += r;
            }
            w[m_len..m].fill(ZERO);
        };
        self.run_forward_m(out, scratch, fill);
    }

    fn forward_pair_chunks(&self, f: &[Complex64], r: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, len, .. } = self.params;
        let qm = self.params.padded_len();
        let shift = self.roots.at(r * m);
        let fill = |w: &mut [Complex64]| {
            let mut k = 0;
            for s in 0..m {
                let z = self.roots.at(k);
                w[s] = if m + s < len { z * (f[s] + shift * f[m + s]) } else { z * f[s] };
                k += r;
                if k >= qm {
                    k -= qm;
                }
            }
        };
        self.run_forward_m(out, scratch, fill);
    }

    // Builds the pre-processed block with `fill` and applies the m-point DFT,
    // honoring the placement.
    fn run_forward_m(&self, out: &mut [Complex64], scratch: &mut [Complex64], fill: impl Fn(&mut [Complex64])) {
        let m = self.params.m;
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

    fn backward_le2(&self, block: &mut [Complex64], r: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, len, .. } = self.params;
        let qm = self.params.padded_len();
        let w: &[Complex64] = match self.params.placement {
            Placement::InPlace => {
                self.bwd_m.process(&mut block[..m], scratch);
                &block[..m]
            }
            Placement::OutOfPlace => {
                let (w, rest) = scratch.split_at_mut(m);
                self.bwd_m.process_out_of_place(&mut block[..m], w, rest);
                w
            }
        };
        let head = len.min(m);
        let tail = len.saturating_sub(m);
        let shift = self.roots.at_inv(r * m);
        let mut k = 0;
        for s in 0..head {
            let z = self.roots.at_inv(k) * w[s];
            acc[s] += z;
            if s < tail {
                acc[m + s] += shift * z;
            }
            k += r;
            if k >= qm {
                k -= qm;
            }
        }
    }

    fn forward_inner_kernel(&self, f: &[Complex64], v: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, p, .. } = self.params;
        let pm = p * m;
        let (fwd_p, _) = self.inner.as_ref().expect("inner regime");
        let (t_buf, rest) = scratch.split_at_mut(pm);
        // t_buf[s*p + t] = zeta_q^{v t} f[t m + s]
        self.load_transposed(f, v, t_buf);
        match self.params.placement {
            Placement::InPlace => {
                fwd_p.process(t_buf, rest);
                self.twiddle_transpose(t_buf, v, out, false);
                self.fwd_m.process(&mut out[..pm], rest);
            }
            Placement::OutOfPlace => {
                fwd_p.process_out_of_place(t_buf, &mut out[..pm], rest);
                self.twiddle_transpose(&out[..pm], v, t_buf, false);
                self.fwd_m.process_out_of_place(t_buf, &mut out[..pm], rest);
            }
        }
    }

    fn load_transposed(&self, f: &[Complex64], v: usize, t_buf: &mut [Complex64]) {
        let PlanParams { m, p, q, len, .. } = self.params;
        for t in 0..p {
            let z = self.roots.at(((v * t) % q) * m);
            let base = t * m;
            let valid = len.saturating_sub(base).min(m);
            for s in 0..valid {
                t_buf[s * p + t] = z * f[base + s];
            }
            for s in valid..m {
                t_buf[s * p + t] = ZERO;
            }
        }
    }

    // Moves `src[s*p + u]` to `dst[u*m + s]` times zeta_qm^{(u n + v) s}; with
    // `inverse` the direction of both the move and the twiddle is reversed.
    fn twiddle_transpose(&self, src: &[Complex64], v: usize, dst: &mut [Complex64], inverse: bool) {
        let PlanParams { m, p, n, .. } = self.params;
        let qm = self.params.padded_len();
        for s in 0..m {
            let step = (n * s) % qm;
            let mut k = (v * s) % qm;
            for u in 0..p {
                if inverse {
                    dst[s * p + u] = self.roots.at_inv(k) * src[u * m + s];
                } else {
                    dst[u * m + s] = self.roots.at(k) * src[s * p + u];
                }
                k += step;
                if k >= qm {
                    k -= qm;
                }
            }
        }
    }

    fn backward_inner_kernel(&self, block: &mut [Complex64], v: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, p, q, len, .. } = self.params;
        let pm = p * m;
        let (_, bwd_p) = self.inner.as_ref().expect("inner regime");
        let (t_buf, rest) = scratch.split_at_mut(pm);
        let g: &[Complex64] = match self.params.placement {
            Placement::InPlace => {
                self.bwd_m.process(&mut block[..pm], rest);
                self.twiddle_transpose(&block[..pm], v, t_buf, true);
                bwd_p.process(t_buf, rest);
                t_buf
            }
            Placement::OutOfPlace => {
                self.bwd_m.process_out_of_place(&mut block[..pm], t_buf, rest);
                self.twiddle_transpose(t_buf, v, &mut block[..pm], true);
                bwd_p.process_out_of_place(&mut block[..pm], t_buf, rest);
                t_buf
            }
        };
        for t in 0..p {
            let z = self.roots.at_inv(((v * t) % q) * m);
            let base = t * m;
            let valid = len.saturating_sub(base).min(m);
            for s in 0..valid {
                acc[base + s] += z * g[s * p + t];
            }
        }
    }

    fn pair_kernel(&self, f: &[Complex64], v: usize, out_v: &mut [Complex64], out_c: &mut [Complex64], scratch: &mut [Complex64]) {
        let PlanParams { m, p, q, n, len, .. } = self.params;
        let pm = p * m;
        let qm = self.params.padded_len();
        let (fwd_p, _) = self.inner.as_ref().expect("inner regime");
        let (tx, rest) = scratch.split_at_mut(pm);
        let (ty, rest) = rest.split_at_mut(pm);
        for t in 0..p {
            let z = self.roots.at(((v * t) % q) * m);
            let base = t * m;
            let valid = len.saturating_sub(base).min(m);
            for s in 0..valid {
                let x = f[base + s];
                // a = z Re f, b = z Im f; X = a + i b, Y = conj(a) + i conj(b).
                let (a, b) = (z * x.re, z * x.im);
                tx[s * p + t] = Complex64::new(a.re - b.im, a.im + b.re);
                ty[s * p + t] = Complex64::new(a.re + b.im, b.re - a.im);
            }
            for s in valid..m {
                tx[s * p + t] = ZERO;
                ty[s * p + t] = ZERO;
            }
        }
        fwd_p.process(tx, rest);
        fwd_p.process(ty, rest);
        let conj_residue = n - v;
        for s in 0..m {
            let step = (n * s) % qm;
            let mut kv = (v * s) % qm;
            let mut kc = (conj_residue * s) % qm;
            for u in 0..p {
                out_v[u * m + s] = self.roots.at(kv) * tx[s * p + u];
                let shifted = if u + 1 == p { 0 } else { u + 1 };
                out_c[u * m + s] = self.roots.at(kc) * ty[s * p + shifted];
                kv += step;
                if kv >= qm {
                    kv -= qm;
                }
                kc += step;
                if kc >= qm {
                    kc -= qm;
                }
            }
        }
        self.fwd_m.process(&mut out_v[..pm], rest);
        self.fwd_m.process(&mut out_c[..pm], rest);
    }
}

impl PaddedTransform for ComplexPfft {
    type Spectral = Complex64;

    fn params(&self) -> &PlanParams {
        &self.params
    }

    fn scratch_len(&self) -> usize {
        self.scratch_len
    }

    fn forward(&self, input: &[Complex64], residue: usize, out: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert!(residue < self.params.n);
        match self.params.regime() {
            Regime::Single => self.forward_single(input, residue, out, scratch),
            Regime::Pair => self.forward_pair_chunks(input, residue, out, scratch),
            Regime::Inner => self.forward_inner_kernel(input, residue, out, scratch),
        }
    }

    fn backward(&self, block: &mut [Complex64], residue: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert!(residue < self.params.n);
        match self.params.regime() {
            Regime::Single | Regime::Pair => self.backward_le2(block, residue, acc, scratch),
            Regime::Inner => self.backward_inner_kernel(block, residue, acc, scratch),
        }
    }

    fn supports_pairs(&self) -> bool {
        self.params.regime() == Regime::Inner && self.params.n >= 3
    }

    fn forward_pair(
        &self,
        input: &[Complex64],
        v: usize,
        out_v: &mut [Complex64],
        out_conj: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        debug_assert!(v != 0 && 2 * v != self.params.n);
        self.pair_kernel(input, v, out_v, out_conj, scratch);
    }
}
