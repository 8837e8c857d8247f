use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Scalar type for edge weights and distances.
///
/// Core algorithms are generic over this trait so the same code runs on
/// exact rationals (the default, see [`crate::Rat`]) and on floats when
/// speed matters more than exactness. Distances are always nonnegative,
/// so `floor_u64` only has to cover that range.
pub trait Scalar:
    Num + FromPrimitive + PartialOrd + Clone + Debug + Display + Send + Sync + 'static
{
    /// Exact `num / den` where the representation allows it.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Floor of a nonnegative value.
    fn floor_u64(&self) -> u64;

    /// Token used in the text formats (`p/q` or an integer for rationals).
    fn format_token(&self) -> String {
        self.to_string()
    }

    /// Parse a text-format token. Accepts `p/q` and plain integers;
    /// float impls additionally accept decimals.
    fn parse_token(s: &str) -> Option<Self>;

    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn floor_u64(&self) -> u64 {
        self.floor().to_integer().max(0) as u64
    }

    fn parse_token(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().ok()?;
                let q: i64 = q.trim().parse().ok()?;
                if q == 0 {
                    return None;
                }
                Some(Ratio::new(p, q))
            }
            None => s.trim().parse::<i64>().ok().map(Ratio::from_integer),
        }
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn floor_u64(&self) -> u64 {
        if *self <= 0.0 {
            0
        } else {
            self.floor() as u64
        }
    }

    fn parse_token(s: &str) -> Option<Self> {
        match s.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().ok()?;
                let q: f64 = q.trim().parse().ok()?;
                Some(p / q)
            }
            None => s.trim().parse().ok(),
        }
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

/// Total-order comparison; panics on incomparable values (NaN). Exact
/// scalars are always comparable.
pub fn cmp_scalar<W: Scalar>(a: &W, b: &W) -> Ordering {
    a.partial_cmp(b).expect("incomparable scalar values")
}

pub fn max_scalar<W: Scalar>(a: W, b: W) -> W {
    if cmp_scalar(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

pub fn min_scalar<W: Scalar>(a: W, b: W) -> W {
    if cmp_scalar(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Signum-free absolute difference usable for unsigned-ish scalars.
pub fn abs_diff<W: Scalar>(a: W, b: W) -> W {
    if cmp_scalar(&a, &b) == Ordering::Less {
        b - a
    } else {
        a - b
    }
}

/// `Ord` wrapper for heap keys.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdKey<W>(pub W);

impl<W: Scalar> Eq for OrdKey<W> {}

impl<W: Scalar> PartialOrd for OrdKey<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Scalar> Ord for OrdKey<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scalar(&self.0, &other.0)
    }
}

/// A distortion-like quantity: finite or infinite (a map that collapses
/// two distinct points has infinite contraction, not an error).
#[derive(Clone, Debug, PartialEq)]
pub enum Stretch<W> {
    Finite(W),
    Infinite,
}

impl<W: Scalar> Stretch<W> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Stretch::Finite(_))
    }

    pub fn finite(&self) -> Option<&W> {
        match self {
            Stretch::Finite(w) => Some(w),
            Stretch::Infinite => None,
        }
    }

    pub fn cmp_stretch(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Stretch::Finite(a), Stretch::Finite(b)) => cmp_scalar(a, b),
            (Stretch::Finite(_), Stretch::Infinite) => Ordering::Less,
            (Stretch::Infinite, Stretch::Finite(_)) => Ordering::Greater,
            (Stretch::Infinite, Stretch::Infinite) => Ordering::Equal,
        }
    }

    /// Product with a finite factor.
    pub fn scale(&self, factor: &W) -> Stretch<W> {
        match self {
            Stretch::Finite(w) => Stretch::Finite(w.clone() * factor.clone()),
            Stretch::Infinite => Stretch::Infinite,
        }
    }

    pub fn format_token(&self) -> String {
        match self {
            Stretch::Finite(w) => w.format_token(),
            Stretch::Infinite => "inf".to_string(),
        }
    }
}

impl<W: Scalar> Display for Stretch<W> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.format_token())
    }
}

/// Mean of a nonempty slice.
pub fn mean<W: Scalar>(values: &[W]) -> W {
    let mut sum = W::zero();
    for v in values {
        sum = sum + v.clone();
    }
    sum / W::from_usize(values.len()).expect("usize fits scalar")
}

/// Ratio `a / b` with the convention that `a > 0, b = 0` is infinite.
pub fn ratio_or_inf<W: Scalar>(a: W, b: W) -> Stretch<W> {
    if b.is_zero() {
        Stretch::Infinite
    } else {
        Stretch::Finite(a / b)
    }
}

pub fn is_unit<W: Scalar>(w: &W) -> bool {
    w.clone() == W::one()
}

/// Sample standard deviation (f64, for statistical summaries only).
pub fn stddev_f64(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}
