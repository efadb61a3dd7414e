use std::fmt;
use std::str::FromStr;

/// `n` or an inclusive range `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub first: usize,
    pub last: usize,
}

impl SizeRange {
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.first..=self.last
    }

    pub fn single(&self) -> Option<usize> {
        (self.first == self.last).then_some(self.first)
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a size"));
        let (first, last) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if first == 0 {
            return Err("sizes must be positive".into());
        }
        if last < first {
            return Err(format!("empty size range {s}"));
        }
        Ok(SizeRange { first, last })
    }
}

/// Padding ratio `M/L` as a fraction `a/b` or a decimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Fraction(u64, u64),
    Decimal(f64),
}

impl Ratio {
    /// The smallest `M >= ratio * len`, never below `len`.
    pub fn min_padded(&self, len: usize) -> usize {
        let m = match *self {
            Ratio::Fraction(a, b) => (len as u64 * a).div_ceil(b) as usize,
            Ratio::Decimal(r) => (r * len as f64 - 1e-9).ceil() as usize,
        };
        m.max(len)
    }
}

impl FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("`{s}` is not a ratio of at least 1");
        let ratio = match s.split_once('/') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                if b == 0 || a < b {
                    return Err(bad());
                }
                Ratio::Fraction(a, b)
            }
            None => {
                let r: f64 = s.trim().parse().map_err(|_| bad())?;
                if !r.is_finite() || r < 1.0 {
                    return Err(bad());
                }
                Ratio::Decimal(r)
            }
        };
        Ok(ratio)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Fraction(a, b) => write!(f, "{a}/{b}"),
            Ratio::Decimal(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Switch {
    On,
    Off,
}

impl FromStr for Switch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "on" => Ok(Switch::On),
            "off" => Ok(Switch::Off),
            other => Err(format!("expected on or off, got `{other}`")),
        }
    }
}
