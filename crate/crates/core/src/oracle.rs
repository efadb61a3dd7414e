//! Brute-force references: direct linear convolutions and naive padded DFTs.
//!
//! Nothing here calls into the kernels or the root tables they use.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::plan::{PlanParams, Symmetry};

/// Maximum multiply-adds for one direct convolution.
pub const WORK_GUARD: u64 = 100_000_000;
/// Maximum transform length for a naive DFT.
pub const DFT_GUARD: usize = 4096;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Deterministic uniform values in the unit square, one stream per seed.
pub fn random_input(seed: u64, len: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// `max|a - e| / max|e|`, or the absolute error when `e` vanishes.
pub fn relative_error(actual: &[Complex64], expected: &[Complex64]) -> f64 {
    assert_eq!(actual.len(), expected.len(), "compared sequences differ in length");
    let err = actual.iter().zip(expected).map(|(a, e)| (a - e).norm()).fold(0.0, f64::max);
    let scale = expected.iter().map(|e| e.norm()).fold(0.0, f64::max);
    if scale < 1e-300 {
        err
    } else {
        err / scale
    }
}

/// Parameters of one verified case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseDescriptor {
    pub kind: Symmetry,
    pub dims: usize,
    pub len: usize,
    pub min_padded: usize,
    pub m: usize,
    pub residues_per_pass: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub case: CaseDescriptor,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(case: CaseDescriptor, max_rel_error: f64, tolerance: f64) -> Self {
        let passed = max_rel_error <= tolerance;
        OracleReport { case, max_rel_error, tolerance, passed }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.case;
        write!(
            f,
            "{} kind={} dims={} L={} M={} m={} D={} seed={} err={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            c.kind,
            c.dims,
            c.len,
            c.min_padded,
            c.m,
            c.residues_per_pass,
            c.seed,
            self.max_rel_error,
            self.tolerance
        )
    }
}

// Row-major array over logical indices `storage - origin`.
#[derive(Debug, Clone)]
struct Grid {
    dims: Vec<usize>,
    origin: Vec<i64>,
    data: Vec<Complex64>,
}

impl Grid {
    fn size(dims: &[usize]) -> usize {
        dims.iter().product()
    }

    fn unravel(dims: &[usize], mut idx: usize, out: &mut [usize]) {
        for a in (0..dims.len()).rev() {
            out[a] = idx % dims[a];
            idx /= dims[a];
        }
    }

    fn at_logical(&self, logical: &[i64]) -> Complex64 {
        let mut idx = 0usize;
        for a in 0..self.dims.len() {
            let s = logical[a] + self.origin[a];
            if s < 0 || s >= self.dims[a] as i64 {
                return ZERO;
            }
            idx = idx * self.dims[a] + s as usize;
        }
        self.data[idx]
    }

    fn linear_convolution(&self, other: &Grid) -> Result<Grid> {
        let work = self.data.len() as u64 * other.data.len() as u64;
        if work > WORK_GUARD {
            return Err(Error::GuardExceeded(format!("direct convolution needs {work} multiply-adds")));
        }
        let d = self.dims.len();
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b - 1).collect();
        let origin = self.origin.iter().zip(&other.origin).map(|(a, b)| a + b).collect();
        let mut data = vec![ZERO; Grid::size(&dims)];
        let mut ia = vec![0; d];
        let mut ib = vec![0; d];
        for (a, &x) in self.data.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            Grid::unravel(&self.dims, a, &mut ia);
            for (b, &y) in other.data.iter().enumerate() {
                Grid::unravel(&other.dims, b, &mut ib);
                let mut idx = 0;
                for k in 0..d {
                    idx = idx * dims[k] + ia[k] + ib[k];
                }
                data[idx] += x * y;
            }
        }
        Ok(Grid { dims, origin, data })
    }

    fn window(&self, dims: &[usize], origin: &[i64]) -> Grid {
        let d = dims.len();
        let mut idx = vec![0; d];
        let mut logical = vec![0i64; d];
        let data = (0..Grid::size(dims))
            .map(|k| {
                Grid::unravel(dims, k, &mut idx);
                for a in 0..d {
                    logical[a] = idx[a] as i64 - origin[a];
                }
                self.at_logical(&logical)
            })
            .collect();
        Grid { dims: dims.to_vec(), origin: origin.to_vec(), data }
    }
}

/// Stored extents for logical extents `dims`: the innermost axis is halved for
/// Hermitian data.
pub fn stored_dims(dims: &[usize], symmetry: Symmetry) -> Vec<usize> {
    let mut out = dims.to_vec();
    if symmetry == Symmetry::Hermitian {
        if let Some(last) = out.last_mut() {
            *last = last.div_ceil(2);
        }
    }
    out
}

fn centered_origin(dims: &[usize]) -> Vec<i64> {
    dims.iter().map(|&l| (l / 2) as i64).collect()
}

// Full array of a Hermitian half-array: `g(-x) = conj(g(x))`, outer axes centered.
fn symmetrize(values: &[Complex64], dims: &[usize]) -> Grid {
    let d = dims.len();
    let half = stored_dims(dims, Symmetry::Hermitian);
    let stored = Grid { dims: half.clone(), origin: centered_origin(&dims[..d - 1]).into_iter().chain([0]).collect(), data: values.to_vec() };
    let h = half[d - 1] as i64;
    // Mirrors of the outer windows reach +floor(L/2), one past an even window.
    let mut full_dims: Vec<usize> = dims.iter().map(|&l| 2 * (l / 2) + 1).collect();
    full_dims[d - 1] = (2 * h - 1) as usize;
    let mut origin = centered_origin(dims);
    origin[d - 1] = h - 1;
    let mut idx = vec![0; d];
    let mut logical = vec![0i64; d];
    let mut mirrored = vec![0i64; d];
    let data = (0..Grid::size(&full_dims))
        .map(|k| {
            Grid::unravel(&full_dims, k, &mut idx);
            for a in 0..d {
                logical[a] = idx[a] as i64 - origin[a];
                mirrored[a] = -logical[a];
            }
            if logical[d - 1] >= 0 {
                stored.at_logical(&logical)
            } else {
                stored.at_logical(&mirrored).conj()
            }
        })
        .collect();
    Grid { dims: full_dims, origin, data }
}

/// Direct A-fold linear convolution (pointwise product in transformed space) of
/// arrays with logical extents `dims`, truncated to the stored window.
///
/// Complex data is indexed from 0; centered data from `-floor(L/2)` on each
/// axis; Hermitian data holds `ceil(L/2)` entries on the innermost axis and is
/// symmetrized before convolving.
pub fn direct_convolution_nd(inputs: &[&[Complex64]], dims: &[usize], symmetry: Symmetry) -> Result<Vec<Complex64>> {
    if inputs.is_empty() || dims.is_empty() {
        return Err(Error::InvalidParameter("direct convolution needs inputs and extents".into()));
    }
    let stored = stored_dims(dims, symmetry);
    let size = Grid::size(&stored);
    for f in inputs {
        if f.len() != size {
            return Err(Error::LengthMismatch { expected: size, actual: f.len() });
        }
    }
    let grids: Vec<Grid> = inputs
        .iter()
        .map(|f| match symmetry {
            Symmetry::Complex => Grid { dims: dims.to_vec(), origin: vec![0; dims.len()], data: f.to_vec() },
            Symmetry::Centered => Grid { dims: dims.to_vec(), origin: centered_origin(dims), data: f.to_vec() },
            Symmetry::Hermitian => symmetrize(f, dims),
        })
        .collect();
    let mut acc = grids[0].clone();
    for g in &grids[1..] {
        acc = acc.linear_convolution(g)?;
    }
    let origin = match symmetry {
        Symmetry::Complex => vec![0; dims.len()],
        Symmetry::Centered => centered_origin(dims),
        Symmetry::Hermitian => {
            let mut o = centered_origin(dims);
            *o.last_mut().expect("nonempty") = 0;
            o
        }
    };
    Ok(acc.window(&stored, &origin).data)
}

/// First `window` terms of the linear convolution of equal-length inputs.
pub fn direct_convolution(inputs: &[&[Complex64]], window: usize) -> Result<Vec<Complex64>> {
    let Some(first) = inputs.first() else {
        return Err(Error::InvalidParameter("direct convolution needs inputs".into()));
    };
    let grid = |f: &[Complex64]| Grid { dims: vec![f.len()], origin: vec![0], data: f.to_vec() };
    let mut acc = grid(first);
    for g in &inputs[1..] {
        if g.len() != first.len() {
            return Err(Error::LengthMismatch { expected: first.len(), actual: g.len() });
        }
        acc = acc.linear_convolution(&grid(g))?;
    }
    Ok(acc.window(&[window], &[0]).data)
}

/// Centered 1D convolution over the window `[-floor(L/2), L - floor(L/2))`.
pub fn direct_convolution_centered(inputs: &[&[Complex64]]) -> Result<Vec<Complex64>> {
    let len = inputs.first().map_or(0, |f| f.len());
    direct_convolution_nd(inputs, &[len], Symmetry::Centered)
}

/// Hermitian 1D convolution of stored halves; returns logical indices `0 .. H`.
pub fn direct_convolution_hermitian(inputs: &[&[Complex64]]) -> Result<Vec<Complex64>> {
    let h = inputs.first().map_or(0, |f| f.len());
    direct_convolution_nd(inputs, &[2 * h - 1], Symmetry::Hermitian)
}

/// Naive DFT `F_k = sum_j exp(2 pi i k j / N) f_j` over logical indices `j`.
pub fn naive_padded_dft(logical: &[(i64, Complex64)], size: usize) -> Result<Vec<Complex64>> {
    if size > DFT_GUARD {
        return Err(Error::GuardExceeded(format!("naive DFT of length {size}")));
    }
    let n = size as i64;
    Ok((0..n)
        .map(|k| {
            logical
                .iter()
                .map(|&(j, f)| {
                    let e = (k * j).rem_euclid(n);
                    Complex64::from_polar(1.0, 2.0 * PI * e as f64 / size as f64) * f
                })
                .sum()
        })
        .collect())
}

fn logical_entries(stored: &[Complex64], symmetry: Symmetry) -> Vec<(i64, Complex64)> {
    match symmetry {
        Symmetry::Complex => stored.iter().enumerate().map(|(j, &f)| (j as i64, f)).collect(),
        Symmetry::Centered => {
            let origin = (stored.len() / 2) as i64;
            stored.iter().enumerate().map(|(j, &f)| (j as i64 - origin, f)).collect()
        }
        Symmetry::Hermitian => {
            let mut out: Vec<(i64, Complex64)> = stored.iter().enumerate().map(|(j, &f)| (j as i64, f)).collect();
            out.extend(stored.iter().enumerate().skip(1).map(|(j, &f)| (-(j as i64), f.conj())));
            out
        }
    }
}

/// Spectral indices held by block `block`, in block order.
pub fn residue_indices(params: &PlanParams, block: usize) -> Vec<usize> {
    let (m, q, n, p) = (params.m, params.q, params.n, params.p);
    let width = match params.symmetry {
        Symmetry::Complex if p > 2 => p,
        Symmetry::Complex => 1,
        _ => p / 2,
    };
    (0..width).flat_map(|u| (0..m).map(move |l| q * l + u * n + block)).collect()
}

/// The slice of the naive length-`q*m` DFT of the zero-padded stored input
/// that block `block` should hold.
pub fn padded_dft_slice(stored: &[Complex64], params: &PlanParams, block: usize) -> Result<Vec<Complex64>> {
    let qm = params.m * params.q;
    let full = naive_padded_dft(&logical_entries(stored, params.symmetry), qm)?;
    Ok(residue_indices(params, block).into_iter().map(|k| full[k]).collect())
}
