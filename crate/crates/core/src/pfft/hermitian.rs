//! Kernels for Hermitian-symmetric centered data. Transformed values are real.

use std::sync::Arc;

use num_complex::Complex64;

use super::{check_residue, CenteredSeq, PaddedTransform, ResidueBlock};
use crate::dft::{DftDirection, DftExecutor, DftProvider, DftRequest};
use crate::error::{Error, Result};
use crate::plan::{PlanParams, Regime, RootTable, Symmetry};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative tolerance on `Im f_0`.
pub const ORIGIN_TOLERANCE: f64 = 1e-14;

/// The nonnegative half `f_0 .. f_{H-1}` of a sequence with `f_{-j} = conj(f_j)`.
///
/// A sequence of logical length `L` stores `H = ceil(L/2)` entries; its
/// symmetrized support is `[1 - H, H - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSeq {
    values: Vec<Complex64>,
}

/// Fails unless `Im values[0]` is within `ORIGIN_TOLERANCE * max|values|`.
pub fn check_origin_real(values: &[Complex64]) -> Result<()> {
    let Some(first) = values.first() else {
        return Ok(());
    };
    let norm = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if first.im.abs() > ORIGIN_TOLERANCE * norm {
        return Err(Error::NotHermitian(format!(
            "Im f_0 = {:e} exceeds {:e}",
            first.im,
            ORIGIN_TOLERANCE * norm
        )));
    }
    Ok(())
}

impl HermitianSeq {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty Hermitian sequence".into()));
        }
        check_origin_real(&values)?;
        Ok(HermitianSeq { values })
    }

    /// Like `new`, but discards `Im f_0` instead of checking it.
    pub fn project(mut values: Vec<Complex64>) -> Result<Self> {
        match values.first_mut() {
            Some(z) => z.im = 0.0,
            None => return Err(Error::InvalidParameter("empty Hermitian sequence".into())),
        }
        Ok(HermitianSeq { values })
    }

    /// Takes logical indices `0 .. ceil(L/2)` of a centered sequence of length `L`.
    pub fn from_centered(seq: &CenteredSeq) -> Result<Self> {
        let h = seq.values().len().div_ceil(2);
        HermitianSeq::new((0..h as i64).map(|j| seq.get(j)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, logical: i64) -> Complex64 {
        let j = logical.unsigned_abs() as usize;
        match self.values.get(j) {
            Some(z) if logical >= 0 => *z,
            Some(z) => z.conj(),
            None => ZERO,
        }
    }

    /// The full centered sequence of length `len`; `ceil(len/2)` must equal the stored count.
    pub fn symmetrize(&self, len: usize) -> Result<CenteredSeq> {
        if len.div_ceil(2) != self.values.len() {
            return Err(Error::LengthMismatch { expected: self.values.len(), actual: len.div_ceil(2) });
        }
        Ok(CenteredSeq::from_logical(len, |j| self.get(j)))
    }
}

/// Padded FFT pair for Hermitian data. Block `v` holds the real values
/// `F[q*l + u*n + v]` at offset `u*m + l` for `u in 0..p/2`.
#[derive(Clone)]
pub struct HermitianPfft {
    params: PlanParams,
    roots: RootTable,
    c2r: Arc<DftExecutor>,
    r2c: Arc<DftExecutor>,
    inner: Option<(Arc<DftExecutor>, Arc<DftExecutor>)>,
    half_spectrum: usize,
    scratch_len: usize,
}

impl HermitianPfft {
    pub fn new(params: PlanParams, provider: &mut DftProvider) -> Result<Self> {
        if params.symmetry != Symmetry::Hermitian {
            return Err(Error::InvalidParameter(format!("{} params given to Hermitian kernel", params.symmetry)));
        }
        params.validate()?;
        let m = params.m;
        let half = params.p / 2;
        let e = m / 2 + 1;
        let c2r = provider.plan(DftRequest::complex_to_real(m).batched(half, 1, m))?;
        let r2c = provider.plan(DftRequest::real_to_complex(m).batched(half, 1, m))?;
        let mut fft_scratch = c2r.scratch_len().max(r2c.scratch_len());
        let inner = if half > 1 {
            let placement = crate::plan::Placement::InPlace;
            let f = provider.plan(DftRequest::complex(half, DftDirection::Forward, placement).batched(e, 1, half))?;
            let b = provider.plan(DftRequest::complex(half, DftDirection::Backward, placement).batched(m, 1, half))?;
            fft_scratch = fft_scratch.max(f.scratch_len()).max(b.scratch_len());
            Some((f, b))
        } else {
            None
        };
        Ok(HermitianPfft {
            roots: RootTable::new(params.padded_len())?,
            params,
            c2r,
            r2c,
            inner,
            half_spectrum: e,
            scratch_len: half * m + half * e + fft_scratch,
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

    /// Residue `r` of the real padded spectrum when `p = 2`.
    pub fn forward2h(&self, f: &HermitianSeq, r: usize) -> Result<ResidueBlock<f64>> {
        self.require("forward2h", Regime::Pair)?;
        self.forward_block(f.values(), r)
    }

    /// Contribution of residue `r` to logical indices `0 .. ceil(L/2)` when `p = 2`.
    pub fn backward2h(&self, block: &ResidueBlock<f64>) -> Result<Vec<Complex64>> {
        self.require("backward2h", Regime::Pair)?;
        self.backward_block(block)
    }

    /// Residue block `v` (length `p/2*m`) when `p > 2`.
    pub fn forward_inner_h(&self, f: &HermitianSeq, v: usize) -> Result<ResidueBlock<f64>> {
        self.require("forward_inner_h", Regime::Inner)?;
        self.forward_block(f.values(), v)
    }

    pub fn backward_inner_h(&self, block: &ResidueBlock<f64>) -> Result<Vec<Complex64>> {
        self.require("backward_inner_h", Regime::Inner)?;
        self.backward_block(block)
    }

    /// The length-`m` sequence whose DFT is residue `r`, computed for every `s`
    /// without exploiting its conjugate symmetry. Requires `p = 2`.
    pub fn work_values(&self, f: &HermitianSeq, r: usize) -> Result<Vec<Complex64>> {
        self.require("work_values", Regime::Pair)?;
        check_residue(r, self.params.n)?;
        let m = self.params.m;
        let shift = self.roots.inv((r * m) % self.params.padded_len());
        Ok((0..m)
            .map(|s| {
                let (s, signed) = (s as i64, s as i64 - m as i64);
                self.roots.pow(r as i64 * s) * (f.get(s) + shift * f.get(signed))
            })
            .collect())
    }

    #[inline]
    fn stored(&self, f: &[Complex64], logical: isize) -> Complex64 {
        let j = logical.unsigned_abs();
        if j >= f.len() {
            ZERO
        } else if logical >= 0 {
            f[j]
        } else {
            f[j].conj()
        }
    }
}

impl PaddedTransform for HermitianPfft {
    type Spectral = f64;

    fn params(&self) -> &PlanParams {
        &self.params
    }

    fn scratch_len(&self) -> usize {
        self.scratch_len
    }

    fn forward(&self, input: &[Complex64], v: usize, out: &mut [f64], scratch: &mut [Complex64]) {
        debug_assert!(v < self.params.n);
        let PlanParams { m, q, n, .. } = self.params;
        let half = self.params.p / 2;
        let e = self.half_spectrum;
        let width = (half * m) as isize;
        let qm = self.params.padded_len();
        let (t_buf, rest) = scratch.split_at_mut(half * e);
        let (h_buf, rest) = rest.split_at_mut(half * e);
        let wrap = self.roots.at_inv((v * half * m) % qm);
        for t in 0..half {
            let z = self.roots.at(((v * t) % q) * m);
            for s in 0..e {
                let j = (t * m + s) as isize;
                t_buf[s * half + t] = z * (self.stored(input, j) + wrap * self.stored(input, j - width));
            }
        }
        if let Some((fwd_p, _)) = &self.inner {
            fwd_p.process(t_buf, rest);
        }
        for s in 0..e {
            let step = (n * s) % qm;
            let mut k = (v * s) % qm;
            for u in 0..half {
                h_buf[u * e + s] = self.roots.at(k) * t_buf[s * half + u];
                k += step;
                if k >= qm {
                    k -= qm;
                }
            }
        }
        self.c2r.process_c2r(h_buf, &mut out[..half * m], rest);
    }

    fn backward(&self, block: &mut [f64], v: usize, acc: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert!(v < self.params.n);
        let PlanParams { m, q, n, .. } = self.params;
        let half = self.params.p / 2;
        let e = self.half_spectrum;
        let qm = self.params.padded_len();
        let (g_buf, rest) = scratch.split_at_mut(half * e);
        let (t_buf, rest) = rest.split_at_mut(half * m);
        self.r2c.process_r2c(&mut block[..half * m], g_buf, rest);
        for s in 0..m {
            let step = (n * s) % qm;
            let mut k = (v * s) % qm;
            for u in 0..half {
                let g = if s < e { g_buf[u * e + s] } else { g_buf[u * e + m - s].conj() };
                t_buf[s * half + u] = self.roots.at_inv(k) * g;
                k += step;
                if k >= qm {
                    k -= qm;
                }
            }
        }
        if let Some((_, bwd_p)) = &self.inner {
            bwd_p.process(t_buf, rest);
        }
        let stored = acc.len();
        for t in 0..half {
            if t * m >= stored {
                break;
            }
            let z = self.roots.at_inv(((v * t) % q) * m);
            for s in 0..m.min(stored - t * m) {
                acc[t * m + s] += z * t_buf[s * half + t];
            }
        }
    }
}
