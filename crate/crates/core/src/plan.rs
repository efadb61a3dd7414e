//! Hybrid-padding parameters and roots-of-unity tables.
//!
//! A padded transform of `L` input values to an (at least) `M`-point spectrum is
//! described by a subtransform size `m`, the explicit chunk count `p` (input
//! padded with zeros to `p*m`) and the implicit chunk count `q` (spectrum of
//! length `q*m >= M`). Residue blocks are the units of work handed to the
//! kernels; there are `n` of them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Symmetry class of the data being convolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    /// Uncentered complex data stored at indices `0..L`.
    Complex,
    /// Complex data centered about the origin.
    Centered,
    /// Centered Hermitian-symmetric data; only non-negative indices are stored.
    Hermitian,
}

impl Symmetry {
    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::Complex => "complex",
            Symmetry::Centered => "centered",
            Symmetry::Hermitian => "hermitian",
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Symmetry::Complex),
            "centered" => Ok(Symmetry::Centered),
            "hermitian" => Ok(Symmetry::Hermitian),
            other => invalid(format!("unknown symmetry `{other}`")),
        }
    }
}

/// Which family of kernels handles a transform; fixed by the chunk count `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `p = 1`: the input fits in one subtransform.
    Single,
    /// `p = 2`: two chunks summed directly.
    Pair,
    /// `p > 2`: the chunk sum is itself computed with `p`-point (or `p/2`-point) DFTs.
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransformKind {
    pub symmetry: Symmetry,
    pub regime: Regime,
}

/// FFT placement used by the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Placement {
    InPlace,
    OutOfPlace,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::InPlace => "in",
            Placement::OutOfPlace => "out",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" | "inplace" | "in-place" => Ok(Placement::InPlace),
            "out" | "outofplace" | "out-of-place" => Ok(Placement::OutOfPlace),
            other => invalid(format!("unknown placement `{other}`")),
        }
    }
}

/// Parameters of one padded-FFT direction.
///
/// Field correspondence with the usual notation: `len = L`, `min_padded = M`,
/// `m`, `p`, `q`, `n`, `residues_per_pass = D`, `copies = C`, `stride = S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlanParams {
    pub symmetry: Symmetry,
    /// Logical input length `L` (for Hermitian data, the full symmetrized length).
    pub len: usize,
    /// Minimum dealiased length `M`.
    pub min_padded: usize,
    /// Subtransform size.
    pub m: usize,
    /// Explicit chunk count; the input is treated as zero padded to `p*m`.
    pub p: usize,
    /// Implicit chunk count; the spectrum has `q*m` entries.
    pub q: usize,
    /// Number of residue blocks.
    pub n: usize,
    pub residues_per_pass: usize,
    pub copies: usize,
    pub stride: usize,
    pub placement: Placement,
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Computes the hybrid-padding parameters for input length `len`, minimum
/// padded length `min_padded` and subtransform size `m`.
///
/// `m` is taken as given. `D`, `C` and `S` default to 1 and the placement to in-place.
pub fn derive_params(len: usize, min_padded: usize, m: usize, symmetry: Symmetry) -> Result<PlanParams> {
    if len == 0 || min_padded == 0 || m == 0 {
        return invalid(format!("L={len}, M={min_padded}, m={m} must all be positive"));
    }
    if min_padded < len {
        return invalid(format!("M={min_padded} is smaller than L={len}"));
    }
    let (p, q, n) = match symmetry {
        Symmetry::Complex => {
            let p = ceil_div(len, m);
            if p <= 2 {
                let q = ceil_div(min_padded, m);
                (p, q, q)
            } else {
                let n = ceil_div(min_padded, p * m);
                (p, n * p, n)
            }
        }
        Symmetry::Centered | Symmetry::Hermitian => {
            let p = 2 * ceil_div(len, 2 * m);
            let n = ceil_div(2 * min_padded, p * m);
            (p, n * p / 2, n)
        }
    };
    Ok(PlanParams {
        symmetry,
        len,
        min_padded,
        m,
        p,
        q,
        n,
        residues_per_pass: 1,
        copies: 1,
        stride: 1,
        placement: Placement::InPlace,
    })
}

impl PlanParams {
    /// The explicitly padded case: one subtransform of size `m >= M`.
    pub fn explicit(len: usize, min_padded: usize, m: usize, symmetry: Symmetry) -> Result<Self> {
        if m < min_padded {
            return invalid(format!("explicit padding needs m={m} >= M={min_padded}"));
        }
        derive_params(len, min_padded, m, symmetry)
    }

    pub fn with_residues_per_pass(mut self, d: usize) -> Result<Self> {
        if d == 0 || d > self.n {
            return invalid(format!("residues per pass D={d} must lie in [1, {}]", self.n));
        }
        self.residues_per_pass = d;
        Ok(self)
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_copies(mut self, copies: usize, stride: usize) -> Result<Self> {
        if copies == 0 || stride == 0 {
            return invalid("copies and stride must be positive");
        }
        self.copies = copies;
        self.stride = stride;
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        match self.p {
            1 => Regime::Single,
            2 => Regime::Pair,
            _ => Regime::Inner,
        }
    }

    pub fn kind(&self) -> TransformKind {
        TransformKind { symmetry: self.symmetry, regime: self.regime() }
    }

    /// Length `q*m` of the implicitly padded spectrum.
    pub fn padded_len(&self) -> usize {
        self.q * self.m
    }

    /// Number of chunks combined by the inner DFTs: `p` (complex) or `p/2` (centered, Hermitian).
    pub fn inner_size(&self) -> usize {
        match self.symmetry {
            Symmetry::Complex if self.p <= 2 => 1,
            Symmetry::Complex => self.p,
            Symmetry::Centered | Symmetry::Hermitian => self.p / 2,
        }
    }

    /// Entries in one residue block of transformed data.
    pub fn block_len(&self) -> usize {
        self.inner_size() * self.m
    }

    /// Number of stored input values: `L`, or `ceil(L/2)` for Hermitian data.
    pub fn stored_len(&self) -> usize {
        match self.symmetry {
            Symmetry::Hermitian => self.len.div_ceil(2),
            _ => self.len,
        }
    }

    /// True for the degenerate explicit case `p = q = 1`.
    pub fn is_explicit(&self) -> bool {
        self.p == 1 && self.q == 1
    }

    /// Checks every structural invariant of the parameter record.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| invalid::<()>(format!("{what} violated by {self:?}"));
        if self.len == 0 || self.m == 0 || self.min_padded < self.len {
            return fail("positivity / M >= L");
        }
        let step = if self.symmetry == Symmetry::Complex { 1 } else { 2 };
        if self.p < step || self.p * self.m < self.len || (self.p - step) * self.m >= self.len {
            return fail("p minimality");
        }
        if self.q * self.m < self.min_padded || self.q < self.p {
            return fail("q*m >= M and q >= p");
        }
        let expected = derive_params(self.len, self.min_padded, self.m, self.symmetry)?;
        if (expected.p, expected.q, expected.n) != (self.p, self.q, self.n) {
            return fail("ceiling formulas");
        }
        if self.residues_per_pass == 0 || self.residues_per_pass > self.n {
            return fail("1 <= D <= n");
        }
        if matches!(self.symmetry, Symmetry::Centered | Symmetry::Hermitian) && self.p % 2 != 0 {
            return fail("even p");
        }
        Ok(())
    }
}

/// `exp(2*pi*i*k/n)`, with `k` reduced modulo `n`.
pub fn root(n: usize, k: i64) -> Result<Complex64> {
    if n == 0 {
        return invalid("root of unity modulus must be positive");
    }
    Ok(unit_root(k.rem_euclid(n as i64) as usize, n))
}

// Quarter turns are returned exactly; other angles are folded into [-pi, pi].
pub(crate) fn unit_root(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let signed = if 2 * k > n { k as f64 - n as f64 } else { k as f64 };
    let (s, c) = (2.0 * PI * signed / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// Flat table of `exp(2*pi*i*k/N)` for `k in 0..N`.
#[derive(Debug, Clone)]
pub struct RootTable {
    modulus: usize,
    entries: Vec<Complex64>,
}

impl RootTable {
    pub fn new(modulus: usize) -> Result<Self> {
        if modulus == 0 {
            return invalid("root table modulus must be positive");
        }
        let entries = (0..modulus).map(|k| unit_root(k, modulus)).collect();
        Ok(RootTable { modulus, entries })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `zeta_N^k` for a non-negative exponent.
    #[inline]
    pub fn get(&self, k: usize) -> Complex64 {
        self.entries[k % self.modulus]
    }

    /// `zeta_N^k` for a signed exponent.
    #[inline]
    pub fn pow(&self, k: i64) -> Complex64 {
        self.entries[k.rem_euclid(self.modulus as i64) as usize]
    }

    /// `zeta_N^{-k}`.
    #[inline]
    pub fn inv(&self, k: usize) -> Complex64 {
        let k = k % self.modulus;
        if k == 0 {
            self.entries[0]
        } else {
            self.entries[self.modulus - k]
        }
    }

    /// `zeta_N^k` for `k < N`.
    #[inline(always)]
    pub(crate) fn at(&self, k: usize) -> Complex64 {
        self.entries[k]
    }

    /// `zeta_N^{-k}` for `k < N`.
    #[inline(always)]
    pub(crate) fn at_inv(&self, k: usize) -> Complex64 {
        if k == 0 {
            self.entries[0]
        } else {
            self.entries[self.modulus - k]
        }
    }
}

/// Work-memory estimates in complex words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkMemory {
    /// `(A+B)*p*m*L^(d-1)`, the requirement of the recursive hybrid scheme.
    pub implicit: usize,
    /// `max(A,B)*(q/p)^d*L^d`, the buffer needed by explicit padding.
    pub explicit: f64,
}

impl WorkMemory {
    pub fn ratio(&self) -> f64 {
        self.implicit as f64 / self.explicit
    }
}

pub fn work_memory_words(
    params: &PlanParams,
    inputs: usize,
    outputs: usize,
    dims: usize,
    len: usize,
) -> Result<WorkMemory> {
    if inputs == 0 || outputs == 0 {
        return invalid("A and B must be positive");
    }
    if !(1..=3).contains(&dims) {
        return invalid(format!("dimension {dims} outside 1..=3"));
    }
    let inner = len.pow(dims as u32 - 1);
    let implicit = (inputs + outputs) * params.p * params.m * inner;
    let ratio = params.q as f64 / params.p as f64;
    let explicit = inputs.max(outputs) as f64 * (ratio * len as f64).powi(dims as i32);
    Ok(WorkMemory { implicit, explicit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hybrid_padding_geometry() {
        let p = derive_params(6, 11, 4, Symmetry::Complex).unwrap();
        assert_eq!((p.p, p.q, p.n), (2, 3, 3));
        assert_eq!(p.regime(), Regime::Pair);
        assert_eq!(p.padded_len(), 12);
    }

    #[test]
    fn unpadded_case() {
        let p = derive_params(8, 8, 8, Symmetry::Complex).unwrap();
        assert_eq!((p.p, p.q, p.n), (1, 1, 1));
        assert!(p.is_explicit());
    }

    #[test]
    fn inner_regime_complex() {
        let p = derive_params(10, 30, 2, Symmetry::Complex).unwrap();
        assert_eq!((p.p, p.n, p.q), (5, 3, 15));
        assert_eq!(p.block_len(), 10);
    }

    #[test]
    fn centered_forces_even_chunks() {
        let p = derive_params(11, 17, 2, Symmetry::Centered).unwrap();
        assert_eq!((p.p, p.n, p.q), (6, 3, 9));
        let h = derive_params(19, 29, 2, Symmetry::Hermitian).unwrap();
        assert_eq!((h.p, h.n, h.q), (10, 3, 15));
        assert_eq!(h.stored_len(), 10);
        let c = derive_params(5, 7, 3, Symmetry::Centered).unwrap();
        assert_eq!((c.p, c.n, c.q), (2, 3, 3));
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(derive_params(0, 4, 2, Symmetry::Complex).is_err());
        assert!(derive_params(4, 3, 2, Symmetry::Complex).is_err());
        assert!(derive_params(4, 8, 0, Symmetry::Complex).is_err());
        let p = derive_params(4, 8, 2, Symmetry::Complex).unwrap();
        assert!(p.with_residues_per_pass(0).is_err());
        assert!(p.with_residues_per_pass(p.n + 1).is_err());
    }

    #[test]
    fn roots() {
        let i = root(4, 1).unwrap();
        assert_eq!(i, Complex64::new(0.0, 1.0));
        assert_eq!(root(1, 7).unwrap(), Complex64::new(1.0, 0.0));
        let z = root(12, 5).unwrap();
        let expected = Complex64::from_polar(1.0, 5.0 * PI / 6.0);
        assert!((z - expected).norm() < 1e-15);
        assert!((root(12, -7).unwrap() - z).norm() < 1e-15);
        assert!(root(0, 1).is_err());
    }

    #[test]
    fn root_table_group_law() {
        for n in [1usize, 2, 3, 7, 12, 60, 97] {
            let t = RootTable::new(n).unwrap();
            assert_eq!(t.get(0), Complex64::new(1.0, 0.0));
            for a in 0..n {
                assert!((t.get(a).norm() - 1.0).abs() <= 1e-15);
                assert!((t.get(a) * t.inv(a) - 1.0).norm() <= 1e-14);
                for b in 0..n {
                    assert!((t.get(a) * t.get(b) - t.get(a + b)).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn memory_formulas() {
        let len = 64;
        let p = derive_params(len, 2 * len, len, Symmetry::Complex).unwrap();
        let w = work_memory_words(&p, 2, 1, 1, len).unwrap();
        assert_eq!(w.implicit, 3 * len);
        assert_eq!(w.explicit, 2.0 * p.q as f64 * len as f64);
        let w2 = work_memory_words(&p, 2, 1, 2, len).unwrap();
        assert!((w2.ratio() - 3.0 / 8.0).abs() < 1e-12);
        assert!(work_memory_words(&p, 0, 1, 1, len).is_err());
    }
}
