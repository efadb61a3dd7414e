//! Empirical choice of the subtransform size `m`, the residues per pass `D`
//! and the FFT placement, with an on-disk cache of past choices.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::bench::{is_smooth, smooth_at_least};
use crate::conv1d::Conv1d;
use crate::convnd::axis_symmetry;
use crate::dft::DftProvider;
use crate::error::{Error, Result};
use crate::mult::{MultOperator, Product};
use crate::oracle::random_input;
use crate::pfft::{ComplexKernel, HermitianPfft, KernelBuild, Spectral};
use crate::plan::{derive_params, Placement, PlanParams, Symmetry};

/// Environment variable overriding the cache location.
pub const CACHE_ENV: &str = "HYBRID_CONV_CACHE";

/// Default cap on the number of timed candidates.
pub const MAX_CANDIDATES: usize = 64;

/// Smallest subtransform considered is `ceil(L / MAX_CHUNKS)`.
pub const MAX_CHUNKS: usize = 32;

/// Fewest timed repetitions per candidate, after one warmup.
pub const MIN_REPETITIONS: usize = 5;

// Wall-clock samples shorter than this are repeated and averaged.
const MIN_SAMPLE: Duration = Duration::from_micros(200);

/// Source of timings. `run` executes one instance of the candidate.
pub trait Timer {
    fn measure(&mut self, candidate: &PlanParams, run: &mut dyn FnMut()) -> Duration;
}

/// Monotonic wall-clock timer.
#[derive(Debug, Default, Clone, Copy)]
pub struct WallClock;

impl Timer for WallClock {
    fn measure(&mut self, _candidate: &PlanParams, run: &mut dyn FnMut()) -> Duration {
        let start = Instant::now();
        run();
        let once = start.elapsed();
        if once >= MIN_SAMPLE {
            return once;
        }
        let count = (MIN_SAMPLE.as_nanos() / once.as_nanos().max(1)).min(10_000) as u32 + 1;
        let start = Instant::now();
        for _ in 0..count {
            run();
        }
        start.elapsed() / count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuneOptions {
    pub budget: Duration,
    pub repetitions: usize,
    /// `None` searches every candidate.
    pub max_candidates: Option<usize>,
    /// Restricts the placement; `None` tries both.
    pub placement: Option<Placement>,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            budget: Duration::from_secs(2),
            repetitions: MIN_REPETITIONS,
            max_candidates: Some(MAX_CANDIDATES),
            placement: None,
        }
    }
}

impl TuneOptions {
    pub fn with_budget(budget: Duration) -> Self {
        TuneOptions { budget, ..TuneOptions::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.budget.is_zero() {
            return Err(Error::InvalidParameter("tuning budget must be positive".into()));
        }
        if self.repetitions < MIN_REPETITIONS {
            return Err(Error::InvalidParameter(format!(
                "{} repetitions; at least {MIN_REPETITIONS} are required",
                self.repetitions
            )));
        }
        if self.max_candidates == Some(0) {
            return Err(Error::InvalidParameter("candidate cap must be positive".into()));
        }
        Ok(())
    }
}

/// Candidates for one transform, explicit ones first.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    candidates: Vec<PlanParams>,
}

impl SearchSpace {
    pub fn new(symmetry: Symmetry, len: usize, min_padded: usize, options: &TuneOptions) -> Result<Self> {
        if len == 0 || min_padded < len {
            return Err(Error::InvalidParameter(format!("cannot tune L={len}, M={min_padded}")));
        }
        let min_padded = effective_min(symmetry, min_padded);
        let explicit: Vec<PlanParams> = explicit_sizes(symmetry, min_padded)
            .into_iter()
            .filter_map(|m| valid(len, min_padded, m, symmetry))
            .collect();
        if explicit.is_empty() {
            return Err(Error::InvalidParameter(format!("no explicit {symmetry} plan for L={len}, M={min_padded}")));
        }
        let mut implicit: Vec<PlanParams> = (len.div_ceil(MAX_CHUNKS)..=smooth_at_least(min_padded))
            .filter(|&m| is_smooth(m) || m == len)
            .filter_map(|m| valid(len, min_padded, m, symmetry))
            .filter(|p| p.q > p.p)
            .collect();
        implicit.sort_by_key(|p| (p.padded_len(), p.m));
        let placements = match options.placement {
            Some(p) => vec![p],
            None => vec![Placement::OutOfPlace, Placement::InPlace],
        };
        let mut candidates: Vec<PlanParams> = explicit.iter().flat_map(|p| expand(p, &placements)).collect();
        let cap = options.max_candidates.unwrap_or(usize::MAX);
        for base in &implicit {
            let group = expand(base, &placements);
            if candidates.len() + group.len() <= cap {
                candidates.extend(group);
            }
        }
        Ok(SearchSpace { candidates })
    }

    pub fn candidates(&self) -> &[PlanParams] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

// Centered data needs at least two residues, so a unit `M` is raised to 2.
fn effective_min(symmetry: Symmetry, min_padded: usize) -> usize {
    match symmetry {
        Symmetry::Complex => min_padded,
        Symmetry::Centered | Symmetry::Hermitian => min_padded.max(2),
    }
}

// Complex data pads explicitly to one subtransform `m >= M` (p = q = 1).
// Centered data has no p = 1 case; its explicit plans use two chunks of
// `m >= M/2` with q = p = 2.
fn explicit_sizes(symmetry: Symmetry, min_padded: usize) -> Vec<usize> {
    let target = match symmetry {
        Symmetry::Complex => min_padded,
        Symmetry::Centered | Symmetry::Hermitian => min_padded.div_ceil(2),
    };
    let mut sizes = vec![smooth_at_least(target), target.next_power_of_two()];
    sizes.dedup();
    sizes
}

fn valid(len: usize, min_padded: usize, m: usize, symmetry: Symmetry) -> Option<PlanParams> {
    let p = derive_params(len, min_padded, m, symmetry).ok()?;
    p.validate().ok().map(|_| p)
}

fn expand(base: &PlanParams, placements: &[Placement]) -> Vec<PlanParams> {
    let mut ds = vec![1, 2, 4, base.n];
    ds.retain(|&d| d <= base.n);
    ds.sort_unstable();
    ds.dedup();
    let mut out = Vec::new();
    for d in ds {
        for &placement in placements {
            out.push(base.with_residues_per_pass(d).expect("D within 1..=n").with_placement(placement));
        }
    }
    out
}

/// Median time of one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRecord {
    pub params: PlanParams,
    pub median: Duration,
    pub repetitions: usize,
    /// Range of the samples after dropping the fastest and the slowest.
    pub spread: Duration,
}

impl TimingRecord {
    fn from_samples(params: PlanParams, mut samples: Vec<Duration>) -> Self {
        samples.sort_unstable();
        let n = samples.len();
        let median = if n % 2 == 1 { samples[n / 2] } else { (samples[n / 2 - 1] + samples[n / 2]) / 2 };
        let trimmed = if n > 2 { &samples[1..n - 1] } else { &samples[..] };
        let spread = trimmed[trimmed.len() - 1] - trimmed[0];
        TimingRecord { params, median, repetitions: n, spread }
    }
}

// Faster first; ties go to smaller m, then smaller D, then out-of-place.
fn rank(r: &TimingRecord) -> (Duration, usize, usize, bool) {
    (r.median, r.params.m, r.params.residues_per_pass, r.params.placement == Placement::InPlace)
}

/// Result of tuning one transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuned {
    pub params: PlanParams,
    pub median: Duration,
    /// Every measurement, in search order; empty for cache hits.
    pub records: Vec<TimingRecord>,
    /// The budget ran out before every candidate was timed.
    pub exhausted: bool,
    pub cached: bool,
}

/// Result of tuning every axis of a multidimensional convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedNd {
    pub axes: Vec<PlanParams>,
    pub per_axis: Vec<Tuned>,
    pub exhausted: bool,
}

/// Key of a cache entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub symmetry: Symmetry,
    pub len: usize,
    pub min_padded: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub copies: usize,
    pub stride: usize,
    pub placement: Option<Placement>,
}

/// Line-oriented cache of tuned choices:
/// `kind,L,M,A,B,C,S,constraint,m,D,placement,median_ns`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuneCache {
    path: PathBuf,
}

impl TuneCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        TuneCache { path: path.into() }
    }

    /// The location named by `HYBRID_CONV_CACHE`, else a file in the temporary directory.
    pub fn default_path() -> PathBuf {
        std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("hybrid-dealias-tune.csv"))
    }

    pub fn from_env() -> Self {
        TuneCache::new(TuneCache::default_path())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// The most recent valid entry for `key`.
    pub fn lookup(&self, key: &CacheKey) -> Result<Option<(PlanParams, Duration)>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_error(&self.path, e)),
        };
        file.lock_shared().map_err(|e| io_error(&self.path, e))?;
        let mut found = None;
        for line in BufReader::new(&file).lines() {
            let line = line.map_err(|e| io_error(&self.path, e))?;
            if let Some((k, params, median)) = parse_entry(&line) {
                if k == *key {
                    found = Some((params, median));
                }
            }
        }
        file.unlock().map_err(|e| io_error(&self.path, e))?;
        Ok(found)
    }

    pub fn store(&self, key: &CacheKey, params: &PlanParams, median: Duration) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| io_error(&self.path, e))?;
        file.lock().map_err(|e| io_error(&self.path, e))?;
        let line = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            key.symmetry,
            key.len,
            key.min_padded,
            key.inputs,
            key.outputs,
            key.copies,
            key.stride,
            key.placement.map_or("any", Placement::as_str),
            params.m,
            params.residues_per_pass,
            params.placement.as_str(),
            median.as_nanos()
        );
        let written = file.write_all(line.as_bytes()).map_err(|e| io_error(&self.path, e));
        file.unlock().map_err(|e| io_error(&self.path, e))?;
        written
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Cache(format!("{}: {e}", path.display()))
}

fn parse_entry(line: &str) -> Option<(CacheKey, PlanParams, Duration)> {
    let f: Vec<&str> = line.trim().split(',').collect();
    let [kind, len, min_padded, a, b, c, s, constraint, m, d, placement, median] = f[..] else {
        return None;
    };
    let key = CacheKey {
        symmetry: kind.parse().ok()?,
        len: len.parse().ok()?,
        min_padded: min_padded.parse().ok()?,
        inputs: a.parse().ok()?,
        outputs: b.parse().ok()?,
        copies: c.parse().ok()?,
        stride: s.parse().ok()?,
        placement: match constraint {
            "any" => None,
            p => Some(p.parse().ok()?),
        },
    };
    let params = valid(key.len, effective_min(key.symmetry, key.min_padded), m.parse().ok()?, key.symmetry)?;
    let params = params
        .with_residues_per_pass(d.parse().ok()?)
        .ok()?
        .with_placement(placement.parse().ok()?)
        .with_copies(key.copies, key.stride)
        .ok()?;
    params.validate().ok()?;
    Some((key, params, Duration::from_nanos(median.parse().ok()?)))
}

/// Times candidates with a pluggable timer and optional cache.
pub struct Tuner<T: Timer = WallClock> {
    options: TuneOptions,
    timer: T,
    cache: Option<TuneCache>,
}

impl Tuner<WallClock> {
    pub fn new(options: TuneOptions) -> Self {
        Tuner::with_timer(options, WallClock)
    }
}

impl<T: Timer> Tuner<T> {
    pub fn with_timer(options: TuneOptions, timer: T) -> Self {
        Tuner { options, timer, cache: None }
    }

    pub fn with_cache(mut self, cache: TuneCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn options(&self) -> &TuneOptions {
        &self.options
    }

    /// Tunes a one-dimensional convolution of `A` inputs into `B` outputs
    /// with the built-in product (`B = 1`) or a pass-through operator.
    pub fn tune_1d(
        &mut self,
        len: usize,
        min_padded: usize,
        symmetry: Symmetry,
        inputs: usize,
        outputs: usize,
    ) -> Result<Tuned> {
        self.tune_axis(len, min_padded, symmetry, inputs, outputs, 1, true, self.options.budget)
    }

    /// Tunes each axis independently; outer axes are timed over their copy
    /// count without the multiplication, the innermost axis with it.
    pub fn tune_nd(&mut self, axes: &[(usize, usize)], kind: Symmetry, inputs: usize, outputs: usize) -> Result<TunedNd> {
        let d = axes.len();
        if !(2..=3).contains(&d) {
            return Err(Error::Unsupported(format!("tuning a {d}-dimensional convolution")));
        }
        let stored: Vec<usize> = (0..d)
            .map(|k| match axis_symmetry(kind, k, d) {
                Symmetry::Hermitian => axes[k].0.div_ceil(2),
                _ => axes[k].0,
            })
            .collect();
        let budget = self.options.budget / d as u32;
        let mut per_axis = Vec::with_capacity(d);
        for (k, &(len, min_padded)) in axes.iter().enumerate() {
            let copies: usize = stored[k + 1..].iter().product();
            let innermost = k + 1 == d;
            let tuned =
                self.tune_axis(len, min_padded, axis_symmetry(kind, k, d), inputs, outputs, copies, innermost, budget)?;
            per_axis.push(tuned);
        }
        Ok(TunedNd {
            axes: per_axis.iter().map(|t| t.params).collect(),
            exhausted: per_axis.iter().any(|t| t.exhausted),
            per_axis,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn tune_axis(
        &mut self,
        len: usize,
        min_padded: usize,
        symmetry: Symmetry,
        inputs: usize,
        outputs: usize,
        copies: usize,
        with_mult: bool,
        budget: Duration,
    ) -> Result<Tuned> {
        self.options.validate()?;
        if inputs == 0 || outputs == 0 || copies == 0 {
            return Err(Error::Arity(format!("tuning {inputs} -> {outputs} with {copies} copies")));
        }
        if with_mult && outputs != 1 {
            return Err(Error::Arity("the built-in product has one output".into()));
        }
        let key = CacheKey {
            symmetry,
            len,
            min_padded,
            inputs,
            outputs,
            copies,
            stride: copies,
            placement: self.options.placement,
        };
        if let Some(cache) = &self.cache {
            if let Some((params, median)) = cache.lookup(&key)? {
                return Ok(Tuned { params, median, records: Vec::new(), exhausted: false, cached: true });
            }
        }
        let space = SearchSpace::new(symmetry, len, min_padded, &self.options)?;
        let start = Instant::now();
        let mut records = Vec::with_capacity(space.len());
        let mut exhausted = false;
        for candidate in space.candidates() {
            if !records.is_empty() && start.elapsed() >= budget {
                exhausted = true;
                break;
            }
            let candidate = candidate.with_copies(copies, copies)?;
            let record = if symmetry == Symmetry::Hermitian {
                self.time::<HermitianPfft>(candidate, inputs, outputs, with_mult)?
            } else {
                self.time::<ComplexKernel>(candidate, inputs, outputs, with_mult)?
            };
            records.push(record);
        }
        let best = *records.iter().min_by_key(|r| rank(r)).expect("explicit candidate is always timed");
        if let Some(cache) = &self.cache {
            cache.store(&key, &best.params, best.median)?;
        }
        Ok(Tuned { params: best.params, median: best.median, records, exhausted, cached: false })
    }

    fn time<K: KernelBuild>(
        &mut self,
        params: PlanParams,
        inputs: usize,
        outputs: usize,
        with_mult: bool,
    ) -> Result<TimingRecord>
    where
        Product: MultOperator<K::Spectral>,
    {
        let mut plan: Conv1d<K> = Conv1d::plan(params, inputs, outputs, &mut DftProvider::default())?;
        let stored = params.stored_len();
        let data: Vec<Vec<Complex64>> = (0..inputs)
            .map(|a| {
                let mut f = random_input(a as u64, stored);
                f[0].im = 0.0;
                f
            })
            .collect();
        let refs: Vec<&[Complex64]> = data.iter().map(Vec::as_slice).collect();
        let mut out = vec![vec![Complex64::default(); stored]; outputs];
        let product;
        let pass = PassThrough { inputs, outputs };
        let mult: &dyn MultOperator<K::Spectral> = if with_mult {
            product = Product::new(inputs)?;
            &product
        } else {
            &pass
        };
        // Copies are independent columns; a few are timed and the rest extrapolated.
        let sampled = params.copies.min(4);
        let mut run = || {
            for _ in 0..sampled {
                let mut outs: Vec<&mut [Complex64]> = out.iter_mut().map(Vec::as_mut_slice).collect();
                plan.run(&refs, &mut outs, mult, 1.0);
            }
        };
        self.timer.measure(&params, &mut run);
        let samples = (0..self.options.repetitions)
            .map(|_| self.timer.measure(&params, &mut run) * params.copies as u32 / sampled as u32)
            .collect();
        Ok(TimingRecord::from_samples(params, samples))
    }
}

// Leaves transformed data untouched, so only the padded FFTs are timed.
struct PassThrough {
    inputs: usize,
    outputs: usize,
}

impl<T: Spectral> MultOperator<T> for PassThrough {
    fn inputs(&self) -> usize {
        self.inputs
    }

    fn outputs(&self) -> usize {
        self.outputs
    }

    fn apply(&self, _data: &mut [T], _width: usize) {}
}

/// Tunes a one-dimensional convolution with the wall clock and no cache.
pub fn tune_1d(
    len: usize,
    min_padded: usize,
    symmetry: Symmetry,
    inputs: usize,
    outputs: usize,
    budget: Duration,
) -> Result<Tuned> {
    Tuner::new(TuneOptions::with_budget(budget)).tune_1d(len, min_padded, symmetry, inputs, outputs)
}

/// Tunes every axis of a two- or three-dimensional convolution.
pub fn tune_nd(
    axes: &[(usize, usize)],
    kind: Symmetry,
    inputs: usize,
    outputs: usize,
    budget: Duration,
) -> Result<TunedNd> {
    Tuner::new(TuneOptions::with_budget(budget)).tune_nd(axes, kind, inputs, outputs)
}
