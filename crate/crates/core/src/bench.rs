//! Explicitly padded baselines and the CSV rows reported by benchmark sweeps.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::mult::MultOperator;
use crate::plan::{Placement, Symmetry};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

// Lines of a strided axis are transposed in bundles of this many.
const BUNDLE: usize = 16;

/// Smallest integer `>= n` whose only prime factors are 2, 3, 5 and 7.
pub fn smooth_at_least(n: usize) -> usize {
    let mut k = n.max(1);
    loop {
        let mut r = k;
        for f in [2, 3, 5, 7] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return k;
        }
        k += 1;
    }
}

/// Whether `n` has no prime factor above 7.
pub fn is_smooth(n: usize) -> bool {
    n > 0 && smooth_at_least(n) == n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    ExplicitInPlace,
    ExplicitOutOfPlace,
    ExplicitPow2,
    Hybrid,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::ExplicitInPlace, Strategy::ExplicitOutOfPlace, Strategy::ExplicitPow2, Strategy::Hybrid];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::ExplicitInPlace => "explicit-ip",
            Strategy::ExplicitOutOfPlace => "explicit-op",
            Strategy::ExplicitPow2 => "explicit-pow2",
            Strategy::Hybrid => "hybrid",
        }
    }

    /// Padded size per axis for the explicit strategies.
    pub fn explicit_size(self, min_padded: usize) -> Option<usize> {
        match self {
            Strategy::ExplicitInPlace | Strategy::ExplicitOutOfPlace => Some(smooth_at_least(min_padded)),
            Strategy::ExplicitPow2 => Some(min_padded.next_power_of_two()),
            Strategy::Hybrid => None,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy `{s}`")))
    }
}

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mode: Symmetry,
    pub dims: usize,
    pub len: usize,
    pub min_padded: usize,
    pub strategy: Strategy,
    pub median_ns: u64,
    /// `median_ns / (N log2 N)` with `N = L^dims`; zero when `N = 1`.
    pub normalized_ns: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "mode,dims,L,M,strategy,median_ns,normalized_ns";

    pub fn new(mode: Symmetry, dims: usize, len: usize, min_padded: usize, strategy: Strategy, median_ns: u64) -> Self {
        let points = (len as f64).powi(dims as i32);
        let normalized_ns = if points > 1.0 { median_ns as f64 / (points * points.log2()) } else { 0.0 };
        BenchRow { mode, dims, len, min_padded, strategy, median_ns, normalized_ns }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:e}",
            self.mode, self.dims, self.len, self.min_padded, self.strategy, self.median_ns, self.normalized_ns
        )
    }

    pub fn parse(line: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("malformed benchmark row `{line}`"));
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [mode, dims, len, min_padded, strategy, median, normalized] = fields[..] else {
            return Err(bad());
        };
        Ok(BenchRow {
            mode: mode.parse()?,
            dims: dims.parse().map_err(|_| bad())?,
            len: len.parse().map_err(|_| bad())?,
            min_padded: min_padded.parse().map_err(|_| bad())?,
            strategy: strategy.parse()?,
            median_ns: median.parse().map_err(|_| bad())?,
            normalized_ns: normalized.parse().map_err(|_| bad())?,
        })
    }
}

/// Convolution by zero padding every axis to `size` and running full FFTs.
///
/// Inputs are `len^dims` arrays in row-major order, indexed from zero; the
/// outputs are the first `len` entries of every axis of the cyclic result.
/// With `size >= 2*len - 1` this is the linear convolution.
pub struct ExplicitConv {
    dims: usize,
    len: usize,
    size: usize,
    inputs: usize,
    outputs: usize,
    placement: Placement,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
    data: Vec<Complex64>,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl ExplicitConv {
    pub fn new(
        dims: usize,
        len: usize,
        size: usize,
        inputs: usize,
        outputs: usize,
        placement: Placement,
    ) -> Result<Self> {
        if !(1..=3).contains(&dims) {
            return Err(Error::Unsupported(format!("{dims}-dimensional explicit convolution")));
        }
        if len == 0 || size < len || inputs == 0 || outputs == 0 {
            return Err(Error::InvalidParameter(format!(
                "explicit convolution with L={len}, size={size}, A={inputs}, B={outputs}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_inverse(size);
        let backward = planner.plan_fft_forward(size);
        let total = size.checked_pow(dims as u32).ok_or_else(|| Error::Unsupported("size overflow".into()))?;
        let words = total.checked_mul(inputs.max(outputs)).ok_or_else(|| Error::Unsupported("size overflow".into()))?;
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(forward.get_outofplace_scratch_len())
            .max(backward.get_inplace_scratch_len())
            .max(backward.get_outofplace_scratch_len());
        let mut data = Vec::new();
        data.try_reserve_exact(words)
            .map_err(|_| Error::Unsupported(format!("cannot allocate {words} complex words")))?;
        data.resize(words, ZERO);
        Ok(ExplicitConv {
            dims,
            len,
            size,
            inputs,
            outputs,
            placement,
            forward,
            backward,
            data,
            line: vec![ZERO; 2 * BUNDLE * size],
            scratch: vec![ZERO; scratch_len],
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Complex words of work storage.
    pub fn work_words(&self) -> usize {
        self.data.len() + self.line.len() + self.scratch.len()
    }

    pub fn convolve_into(
        &mut self,
        inputs: &[&[Complex64]],
        outputs: &mut [&mut [Complex64]],
        mult: &dyn MultOperator<Complex64>,
    ) -> Result<()> {
        if inputs.len() != self.inputs || outputs.len() != self.outputs {
            return Err(Error::Arity(format!(
                "plan is {} -> {}, called with {} -> {}",
                self.inputs,
                self.outputs,
                inputs.len(),
                outputs.len()
            )));
        }
        if mult.inputs() != self.inputs || mult.outputs() != self.outputs {
            return Err(Error::Arity("operator arity differs from the plan".into()));
        }
        let stored = self.len.pow(self.dims as u32);
        for f in inputs.iter().map(|f| f.len()).chain(outputs.iter().map(|h| h.len())) {
            if f != stored {
                return Err(Error::LengthMismatch { expected: stored, actual: f });
            }
        }
        let total = self.size.pow(self.dims as u32);
        self.data.fill(ZERO);
        for (a, f) in inputs.iter().enumerate() {
            let block = &mut self.data[a * total..(a + 1) * total];
            for (r, row) in f.chunks(self.len).enumerate() {
                let at = padded_offset(self.dims, self.len, self.size, r);
                block[at..at + self.len].copy_from_slice(row);
            }
        }
        for a in 0..self.inputs {
            self.transform(a * total, true);
        }
        mult.apply(&mut self.data, total);
        let scale = 1.0 / total as f64;
        for (b, h) in outputs.iter_mut().enumerate() {
            self.transform(b * total, false);
            let block = &self.data[b * total..(b + 1) * total];
            for (r, row) in h.chunks_mut(self.len).enumerate() {
                let at = padded_offset(self.dims, self.len, self.size, r);
                for (y, x) in row.iter_mut().zip(&block[at..at + self.len]) {
                    *y = x * scale;
                }
            }
        }
        Ok(())
    }

    pub fn convolve_new(
        &mut self,
        inputs: &[&[Complex64]],
        mult: &dyn MultOperator<Complex64>,
    ) -> Result<Vec<Vec<Complex64>>> {
        let stored = self.len.pow(self.dims as u32);
        let mut out = vec![vec![ZERO; stored]; self.outputs];
        let mut refs: Vec<&mut [Complex64]> = out.iter_mut().map(Vec::as_mut_slice).collect();
        self.convolve_into(inputs, &mut refs, mult)?;
        Ok(out)
    }

    fn transform(&mut self, base: usize, forward: bool) {
        let n = self.size;
        let total = n.pow(self.dims as u32);
        let fft = if forward { &self.forward } else { &self.backward };
        let block = &mut self.data[base..base + total];
        let out_of_place = self.placement == Placement::OutOfPlace;
        for axis in 0..self.dims {
            let stride = n.pow((self.dims - 1 - axis) as u32);
            if stride == 1 {
                if out_of_place {
                    let (tmp, _) = self.line.split_at_mut(n);
                    for row in block.chunks_mut(n) {
                        fft.process_outofplace_with_scratch(row, tmp, &mut self.scratch);
                        row.copy_from_slice(tmp);
                    }
                } else {
                    fft.process_with_scratch(block, &mut self.scratch);
                }
                continue;
            }
            for slab in block.chunks_mut(n * stride) {
                let mut c0 = 0;
                while c0 < stride {
                    let w = BUNDLE.min(stride - c0);
                    let (lines, tmp) = self.line.split_at_mut(BUNDLE * n);
                    let lines = &mut lines[..w * n];
                    for i in 0..n {
                        let row = &slab[i * stride + c0..i * stride + c0 + w];
                        for (j, x) in row.iter().enumerate() {
                            lines[j * n + i] = *x;
                        }
                    }
                    let result: &[Complex64] = if out_of_place {
                        let tmp = &mut tmp[..w * n];
                        fft.process_outofplace_with_scratch(lines, tmp, &mut self.scratch);
                        tmp
                    } else {
                        fft.process_with_scratch(lines, &mut self.scratch);
                        lines
                    };
                    for i in 0..n {
                        let row = &mut slab[i * stride + c0..i * stride + c0 + w];
                        for (j, x) in row.iter_mut().enumerate() {
                            *x = result[j * n + i];
                        }
                    }
                    c0 += w;
                }
            }
        }
    }
}

/// Checks a convolution routine on sparse random inputs against a direct sum
/// over their nonzero entries, so that any size can be verified cheaply.
///
/// `run` receives two stored arrays (row-major, extents of a `kind`
/// convolution over `dims` axes of length `len`) and returns the stored
/// product. Returns the relative error.
pub fn sparse_spot_check(
    kind: Symmetry,
    dims: usize,
    len: usize,
    seed: u64,
    run: impl FnOnce(&[&[Complex64]]) -> Result<Vec<Complex64>>,
) -> Result<f64> {
    use rand::{Rng, SeedableRng};

    if dims == 0 || len == 0 {
        return Err(Error::InvalidParameter(format!("spot check of {dims} axes of length {len}")));
    }
    let mut extents = vec![len; dims];
    if kind == Symmetry::Hermitian {
        extents[dims - 1] = len.div_ceil(2);
    }
    let total: usize = extents.iter().product();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // Hermitian points avoid the innermost zero hyperplane, which must be self-conjugate.
    let low = usize::from(kind == Symmetry::Hermitian && extents[dims - 1] > 1);
    let allowed = kind != Symmetry::Hermitian || low == 1;
    let mut sparse = |count: usize| -> Vec<(Vec<usize>, Complex64)> {
        (0..count)
            .map(|_| {
                let mut idx: Vec<usize> = extents.iter().map(|&e| rng.gen_range(0..e)).collect();
                idx[dims - 1] = rng.gen_range(low.min(extents[dims - 1] - 1)..extents[dims - 1]);
                let mut z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if !allowed {
                    // Only the origin is its own mirror.
                    for i in &mut idx[..dims - 1] {
                        *i = len / 2;
                    }
                    z.im = 0.0;
                }
                (idx, z)
            })
            .collect()
    };
    let points = [sparse(6), sparse(6)];
    let dense: Vec<Vec<Complex64>> = points
        .iter()
        .map(|pts| {
            let mut v = vec![ZERO; total];
            for (idx, z) in pts {
                v[linear(idx, &extents)] += z;
            }
            v
        })
        .collect();
    let logical = |axis: usize, i: usize| -> i64 {
        match kind {
            Symmetry::Complex => i as i64,
            Symmetry::Hermitian if axis + 1 == dims => i as i64,
            _ => i as i64 - (len / 2) as i64,
        }
    };
    // Full logical support of each input, including Hermitian mirrors.
    let full: Vec<Vec<(Vec<i64>, Complex64)>> = dense
        .iter()
        .map(|v| {
            let mut out = Vec::new();
            for (k, z) in v.iter().enumerate() {
                if *z == ZERO {
                    continue;
                }
                let idx = unlinear(k, &extents);
                let x: Vec<i64> = idx.iter().enumerate().map(|(a, &i)| logical(a, i)).collect();
                if kind == Symmetry::Hermitian && x[dims - 1] != 0 {
                    out.push((x.iter().map(|c| -c).collect(), z.conj()));
                }
                out.push((x, *z));
            }
            out
        })
        .collect();
    let mut expected = vec![ZERO; total];
    for (x, a) in &full[0] {
        for (y, b) in &full[1] {
            let mut k = 0;
            let mut inside = true;
            for axis in 0..dims {
                let s = x[axis] + y[axis];
                let origin = logical(axis, 0);
                let i = s - origin;
                if i < 0 || i >= extents[axis] as i64 {
                    inside = false;
                    break;
                }
                k = k * extents[axis] + i as usize;
            }
            if inside {
                expected[k] += a * b;
            }
        }
    }
    let refs: Vec<&[Complex64]> = dense.iter().map(Vec::as_slice).collect();
    let got = run(&refs)?;
    if got.len() != total {
        return Err(Error::LengthMismatch { expected: total, actual: got.len() });
    }
    Ok(crate::oracle::relative_error(&got, &expected))
}

fn linear(idx: &[usize], extents: &[usize]) -> usize {
    idx.iter().zip(extents).fold(0, |k, (&i, &e)| k * e + i)
}

fn unlinear(mut k: usize, extents: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; extents.len()];
    for a in (0..extents.len()).rev() {
        idx[a] = k % extents[a];
        k /= extents[a];
    }
    idx
}

// Offset in the padded array of stored row `r` (rows run along the last axis).
fn padded_offset(dims: usize, len: usize, size: usize, r: usize) -> usize {
    match dims {
        1 => 0,
        2 => r * size,
        _ => (r / len) * size * size + (r % len) * size,
    }
}
