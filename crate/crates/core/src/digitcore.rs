//! Radix arithmetic: the boxcar indicator, the digit function and conversions
//! between integers and their base-`p` digit strings.
//!
//! Digit positions are 1-based and counted from the least significant end,
//! so `digit_of(p, 1, a)` is `a mod p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Zero indicator `B(x, 1/2)` for integer arguments.
#[inline]
pub fn boxcar(x: i64) -> u8 {
    u8::from(x == 0)
}

/// Arbitrary-precision nonnegative integer.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `base^exp`.
    pub fn pow(base: u64, exp: u32) -> Self {
        BigCount(num_traits::pow(BigUint::from(base), exp as usize))
    }

    /// Parses a nonempty string of ASCII decimal digits.
    pub fn parse_decimal(s: &str) -> Result<Self> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse("decimal integer", s));
        }
        BigUint::parse_bytes(s.as_bytes(), 10)
            .map(BigCount)
            .ok_or_else(|| Error::parse("decimal integer", s))
    }

    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// Number of base-`p` digits, i.e. `floor(log_p A) + 1`, and 0 for zero.
    pub fn digit_count(&self, p: u32) -> usize {
        let mut n = 0;
        let mut rest = self.0.clone();
        let p = BigUint::from(p);
        while !rest.is_zero() {
            rest /= &p;
            n += 1;
        }
        n
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl FromStr for BigCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BigCount::parse_decimal(s)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Base-`p` digits, least significant first. The empty sequence is zero.
///
/// Trailing (most significant) zeros are allowed so that fixed-width
/// vectors such as rule tables can be carried around without loss.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitVector {
    radix: u32,
    digits: Vec<u32>,
}

impl DigitVector {
    pub fn new(radix: u32, digits: Vec<u32>) -> Result<Self> {
        check_radix(radix as u64)?;
        if let Some((index, &digit)) = digits.iter().enumerate().find(|(_, &d)| d >= radix) {
            return Err(Error::DigitOutOfRange {
                digit: digit as u64,
                index,
                radix,
            });
        }
        Ok(DigitVector { radix, digits })
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Drops most-significant zeros.
    pub fn trimmed(mut self) -> Self {
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
        self
    }

    /// Parses the comma-separated least-significant-first form, e.g. `0,1,1`.
    pub fn parse_list(radix: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return DigitVector::new(radix, Vec::new());
        }
        let digits = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::parse("digit list", s))
            })
            .collect::<Result<Vec<_>>>()?;
        DigitVector::new(radix, digits)
    }
}

impl fmt::Display for DigitVector {
    /// Comma-separated, least significant digit first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

fn check_radix(p: u64) -> Result<()> {
    if p < 2 {
        Err(Error::InvalidRadix(p))
    } else {
        Ok(())
    }
}

/// The `i`-th base-`p` digit of `a`: `floor(a / p^(i-1)) - p * floor(a / p^i)`.
///
/// Positions past the most significant digit yield 0.
pub fn digit_of(p: u32, i: u64, a: &BigCount) -> Result<u32> {
    check_radix(p as u64)?;
    if i < 1 {
        return Err(Error::InvalidPosition(i));
    }
    // p^(i-1) > a as soon as (i-1)*log2(p) >= bits(a)
    let bits = a.0.bits();
    let p_bits_floor = 31 - p.leading_zeros() as u64;
    if p_bits_floor > 0 && (i - 1).saturating_mul(p_bits_floor) >= bits {
        return Ok(0);
    }
    let pb = BigUint::from(p);
    let scale = num_traits::pow(pb.clone(), (i - 1) as usize);
    let lower = &a.0 / &scale;
    let upper = &lower / &pb;
    let d = lower - upper * pb;
    Ok(d.to_u32().expect("digit is below radix"))
}

/// The first `count` base-`p` digits of `a`, least significant first.
pub fn digits_lsd(p: u32, a: &BigCount, count: usize) -> Result<DigitVector> {
    check_radix(p as u64)?;
    let pb = BigUint::from(p);
    let mut rest = a.0.clone();
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        let (q, r) = rest.div_rem(&pb);
        digits.push(r.to_u32().expect("remainder is below radix"));
        rest = q;
    }
    DigitVector::new(p, digits)
}

/// `sum p^(i-1) * v[i-1]`.
pub fn from_digits(v: &DigitVector) -> BigCount {
    let pb = BigUint::from(v.radix);
    let value = v
        .digits
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * &pb + BigUint::from(d));
    BigCount(value)
}

/// Converts a decimal string into its canonical base-`p` digit vector by
/// repeated division. Zero becomes the empty vector.
pub fn radix_convert(s: &str, p: u32) -> Result<DigitVector> {
    check_radix(p as u64)?;
    let value = BigCount::parse_decimal(s)?;
    let pb = BigUint::from(p);
    let mut rest = value.0;
    let mut digits = Vec::new();
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&pb);
        digits.push(r.to_u32().expect("remainder is below radix"));
        rest = q;
    }
    DigitVector::new(p, digits)
}

/// Decimal rendering of a digit vector's value.
pub fn decimal_string(v: &DigitVector) -> String {
    from_digits(v).to_decimal()
}

/// Exact decimal text for `num / den`: a terminating decimal when `den`
/// has no prime factors besides 2 and 5, otherwise the reduced `num/den`.
pub fn exact_fraction(num: &BigUint, den: &BigUint) -> String {
    assert!(!den.is_zero(), "zero denominator");
    let g = num.gcd(den);
    let (num, den) = (num / &g, den / &g);
    let two = BigUint::from(2u32);
    let five = BigUint::from(5u32);
    let mut rest = den.clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{num}/{den}");
    }
    let places = twos.max(fives);
    let scaled = &num * BigUint::from(10u32).pow(places) / &den;
    if places == 0 {
        return scaled.to_string();
    }
    let text = format!(
        "{:0>width$}",
        scaled.to_string(),
        width = places as usize + 1
    );
    let (int, frac) = text.split_at(text.len() - places as usize);
    format!("{int}.{frac}")
}

/// Scan forms of integer division and of the digit function, built only from
/// boxcar sums. They cost `O(m * p)` and exist as independent references.
pub mod scan {
    use super::boxcar;

    /// `(floor(m / p), m mod p)` by scanning every pair `(j, k)` with `m = j*p + k`.
    pub fn scan_form_oracle(m: u64, p: u64) -> (u64, u64) {
        let mut quotient = 0;
        let mut remainder = 0;
        for j in 0..=m {
            for k in 0..p {
                let hit = boxcar(m as i64 - (j * p) as i64 - k as i64) as u64;
                quotient += j * hit;
                remainder += k * hit;
            }
        }
        (quotient, remainder)
    }

    /// Digit `i` of `a` as the boxcar scan over `floor(a / p^(i-1))`.
    pub fn digit_scan_form(p: u64, i: u32, a: u64) -> u64 {
        let lead = a / p.pow(i - 1);
        let mut digit = 0;
        for j in 0..=lead {
            for k in 0..p {
                digit += k * boxcar(lead as i64 - (j * p) as i64 - k as i64) as u64;
            }
        }
        digit
    }
}
