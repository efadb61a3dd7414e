//! Full-size DFT engines.
//!
//! Every transform here is unnormalized. `Forward` uses the kernel
//! `exp(+2*pi*i*j*k/N)` and `Backward` its conjugate, so a forward transform
//! followed by a backward one multiplies the data by `N`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::plan::Placement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DftDirection {
    /// `F_k = sum_j exp(+2*pi*i*j*k/N) f_j`.
    Forward,
    /// `f_j = sum_k exp(-2*pi*i*j*k/N) F_k`.
    Backward,
}

impl DftDirection {
    fn sign(self) -> f64 {
        match self {
            DftDirection::Forward => 1.0,
            DftDirection::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Realness {
    ComplexToComplex,
    /// Hermitian half-spectrum of `size/2 + 1` entries to `size` reals.
    ComplexToReal,
    /// `size` reals to the half-spectrum of `size/2 + 1` entries.
    RealToComplex,
}

/// Which library computes the transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    /// `rustfft` / `realfft`.
    #[default]
    Fast,
    /// The literal O(N^2) summation.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DftRequest {
    pub size: usize,
    /// Number of transforms per call.
    pub count: usize,
    /// Element stride within one transform.
    pub stride: usize,
    /// Offset between the first elements of consecutive transforms.
    pub distance: usize,
    pub realness: Realness,
    pub placement: Placement,
    pub direction: DftDirection,
}

impl DftRequest {
    /// A single contiguous complex-to-complex transform.
    pub fn complex(size: usize, direction: DftDirection, placement: Placement) -> Self {
        DftRequest {
            size,
            count: 1,
            stride: 1,
            distance: size,
            realness: Realness::ComplexToComplex,
            placement,
            direction,
        }
    }

    pub fn complex_to_real(size: usize) -> Self {
        DftRequest {
            realness: Realness::ComplexToReal,
            placement: Placement::OutOfPlace,
            ..DftRequest::complex(size, DftDirection::Forward, Placement::OutOfPlace)
        }
    }

    pub fn real_to_complex(size: usize) -> Self {
        DftRequest {
            realness: Realness::RealToComplex,
            placement: Placement::OutOfPlace,
            ..DftRequest::complex(size, DftDirection::Backward, Placement::OutOfPlace)
        }
    }

    pub fn batched(mut self, count: usize, stride: usize, distance: usize) -> Self {
        self.count = count;
        self.stride = stride;
        self.distance = distance;
        self
    }

    /// Length of the complex half-spectrum for real transforms.
    pub fn half_len(&self) -> usize {
        self.size / 2 + 1
    }

    fn contiguous(&self) -> bool {
        self.stride == 1 && (self.count == 1 || self.distance == self.size)
    }
}

enum Backend {
    Complex(Arc<dyn Fft<f64>>),
    ComplexToReal(Arc<dyn ComplexToReal<f64>>),
    RealToComplex(Arc<dyn RealToComplex<f64>>),
    Naive(Vec<Complex64>),
}

/// A planned transform; immutable, callers supply data and scratch buffers.
pub struct DftExecutor {
    req: DftRequest,
    backend: Backend,
    scratch_len: usize,
}

impl std::fmt::Debug for DftExecutor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftExecutor")
            .field("req", &self.req)
            .field("scratch_len", &self.scratch_len)
            .finish()
    }
}

/// Plans transforms, sharing twiddle tables between plans of equal size.
pub struct DftProvider {
    engine: Engine,
    complex: FftPlanner<f64>,
    real: RealFftPlanner<f64>,
}

impl Default for DftProvider {
    fn default() -> Self {
        DftProvider::new(Engine::Fast)
    }
}

impl DftProvider {
    pub fn new(engine: Engine) -> Self {
        DftProvider { engine, complex: FftPlanner::new(), real: RealFftPlanner::new() }
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn plan(&mut self, req: DftRequest) -> Result<Arc<DftExecutor>> {
        plan_dft_with(self, req).map(Arc::new)
    }
}

/// Plans a transform with a fresh provider for the default engine.
pub fn plan_dft(req: DftRequest) -> Result<DftExecutor> {
    plan_dft_with(&mut DftProvider::default(), req)
}

fn plan_dft_with(provider: &mut DftProvider, req: DftRequest) -> Result<DftExecutor> {
    if req.size == 0 || req.count == 0 || req.stride == 0 {
        return Err(Error::InvalidParameter(format!("degenerate DFT request {req:?}")));
    }
    if req.count > 1 && req.distance == 0 {
        return Err(Error::InvalidParameter("batched DFT needs a nonzero distance".into()));
    }
    match (req.realness, req.placement, req.direction) {
        (Realness::ComplexToComplex, _, _) => {}
        (Realness::ComplexToReal, Placement::OutOfPlace, DftDirection::Forward)
        | (Realness::RealToComplex, Placement::OutOfPlace, DftDirection::Backward) => {
            if !req.contiguous() {
                return Err(Error::Unsupported("strided real transforms".into()));
            }
        }
        (realness, placement, direction) => {
            return Err(Error::Unsupported(format!(
                "{realness:?} with {placement:?} placement in {direction:?} direction"
            )))
        }
    }
    let gather = if req.contiguous() { 0 } else { 2 * req.size };
    let (backend, scratch_len) = match provider.engine {
        Engine::Naive => {
            let table = (0..req.size)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / req.size as f64))
                .collect();
            (Backend::Naive(table), req.size.max(2 * req.half_len()) + gather)
        }
        Engine::Fast => match req.realness {
            Realness::ComplexToComplex => {
                // rustfft's forward direction is ours reversed.
                let dir = match req.direction {
                    DftDirection::Forward => FftDirection::Inverse,
                    DftDirection::Backward => FftDirection::Forward,
                };
                let fft = provider.complex.plan_fft(req.size, dir);
                let scratch = match req.placement {
                    Placement::InPlace => fft.get_inplace_scratch_len(),
                    Placement::OutOfPlace => fft.get_outofplace_scratch_len(),
                }
                .max(fft.get_inplace_scratch_len());
                (Backend::Complex(fft), scratch + gather)
            }
            Realness::ComplexToReal => {
                let c2r = provider.real.plan_fft_inverse(req.size);
                let scratch = c2r.get_scratch_len();
                (Backend::ComplexToReal(c2r), scratch)
            }
            Realness::RealToComplex => {
                let r2c = provider.real.plan_fft_forward(req.size);
                let scratch = r2c.get_scratch_len();
                (Backend::RealToComplex(r2c), scratch)
            }
        },
    };
    Ok(DftExecutor { req, backend, scratch_len })
}

impl DftExecutor {
    pub fn request(&self) -> &DftRequest {
        &self.req
    }

    pub fn size(&self) -> usize {
        self.req.size
    }

    /// Complex scratch entries required by every processing call.
    pub fn scratch_len(&self) -> usize {
        self.scratch_len
    }

    /// In-place complex transform of `count` sequences laid out per the request.
    pub fn process(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        assert_eq!(self.req.realness, Realness::ComplexToComplex, "process() needs a complex plan");
        let n = self.req.size;
        if self.req.contiguous() {
            let total = n * self.req.count;
            self.transform_contiguous(&mut data[..total], scratch);
            return;
        }
        let (tmp, rest) = scratch.split_at_mut(n);
        for c in 0..self.req.count {
            let base = c * self.req.distance;
            for (j, t) in tmp.iter_mut().enumerate() {
                *t = data[base + j * self.req.stride];
            }
            self.transform_contiguous(tmp, rest);
            for (j, t) in tmp.iter().enumerate() {
                data[base + j * self.req.stride] = *t;
            }
        }
    }

    /// Out-of-place complex transform of contiguous sequences; `input` is clobbered.
    pub fn process_out_of_place(
        &self,
        input: &mut [Complex64],
        output: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        assert_eq!(self.req.realness, Realness::ComplexToComplex);
        let total = self.req.size * self.req.count;
        match &self.backend {
            Backend::Complex(fft) if self.req.contiguous() => {
                let len = fft.get_outofplace_scratch_len();
                fft.process_outofplace_with_scratch(&mut input[..total], &mut output[..total], &mut scratch[..len]);
            }
            _ => {
                output[..total].copy_from_slice(&input[..total]);
                self.process(output, scratch);
            }
        }
    }

    fn transform_contiguous(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        match &self.backend {
            Backend::Complex(fft) => {
                let len = fft.get_inplace_scratch_len();
                fft.process_with_scratch(data, &mut scratch[..len]);
            }
            Backend::Naive(table) => {
                let n = self.req.size;
                let sign = self.req.direction.sign();
                for chunk in data.chunks_exact_mut(n) {
                    let tmp = &mut scratch[..n];
                    naive_with_table(chunk, tmp, table, sign);
                    chunk.copy_from_slice(tmp);
                }
            }
            _ => unreachable!("real backend in complex transform"),
        }
    }

    /// Half-spectrum to real sequence (forward direction). The imaginary parts of
    /// the zero and Nyquist entries are ignored.
    pub fn process_c2r(&self, input: &mut [Complex64], output: &mut [f64], scratch: &mut [Complex64]) {
        assert_eq!(self.req.realness, Realness::ComplexToReal, "process_c2r() needs a c2r plan");
        let n = self.req.size;
        let h = self.req.half_len();
        for c in 0..self.req.count {
            let inp = &mut input[c * h..(c + 1) * h];
            let out = &mut output[c * n..(c + 1) * n];
            inp[0].im = 0.0;
            if n % 2 == 0 {
                inp[h - 1].im = 0.0;
            }
            match &self.backend {
                Backend::ComplexToReal(c2r) => {
                    c2r.process_with_scratch(inp, out, &mut scratch[..self.scratch_len])
                        .expect("c2r lengths checked by plan");
                }
                Backend::Naive(table) => {
                    for (j, o) in out.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..n {
                            let x = if k < h { inp[k] } else { inp[n - k].conj() };
                            acc += table[(j * k) % n] * x;
                        }
                        *o = acc.re;
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    /// Real sequence to half-spectrum (backward direction); `input` is clobbered.
    pub fn process_r2c(&self, input: &mut [f64], output: &mut [Complex64], scratch: &mut [Complex64]) {
        assert_eq!(self.req.realness, Realness::RealToComplex, "process_r2c() needs an r2c plan");
        let n = self.req.size;
        let h = self.req.half_len();
        for c in 0..self.req.count {
            let inp = &mut input[c * n..(c + 1) * n];
            let out = &mut output[c * h..(c + 1) * h];
            match &self.backend {
                Backend::RealToComplex(r2c) => {
                    r2c.process_with_scratch(inp, out, &mut scratch[..self.scratch_len])
                        .expect("r2c lengths checked by plan");
                }
                Backend::Naive(table) => {
                    for (k, o) in out.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (j, x) in inp.iter().enumerate() {
                            acc += table[(j * k) % n].conj() * *x;
                        }
                        *o = acc;
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

fn naive_with_table(x: &[Complex64], out: &mut [Complex64], table: &[Complex64], sign: f64) {
    let n = x.len();
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in x.iter().enumerate() {
            let w = table[(j * k) % n];
            acc += Complex64::new(w.re, sign * w.im) * v;
        }
        *o = acc;
    }
}

/// Literal double-loop DFT: `sum_j exp(+-2*pi*i*j*k/N) x_j`.
pub fn naive_dft(x: &[Complex64], direction: DftDirection) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let table: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    naive_with_table(x, &mut out, &table, direction.sign());
    out
}
