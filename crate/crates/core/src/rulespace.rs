//! CA rules `lR^r_p`: output tables, codes, shift rules and the local update.
//!
//! Sites are indexed with `i` increasing to the left. A window around site `i`
//! is written `(x^{i+l}, ..., x^i, ..., x^{i-r})`, and its neighborhood value is
//! `n = sum_{k=-r}^{l} p^{k+r} x^{i+k}`, so the leftmost entry is the most
//! significant base-`p` digit and digit `k+r+1` of `n` is `x^{i+k}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::digitcore::{self, boxcar, digit_of, BigCount, DigitVector};
use crate::error::{Error, Result};

/// Largest rule table the engine will materialize.
pub const MAX_TABLE_LEN: usize = 1 << 24;

/// Neighborhood shape and alphabet of a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub left: usize,
    pub right: usize,
    pub radix: u32,
}

impl Geometry {
    pub fn new(left: usize, right: usize, radix: u32) -> Result<Self> {
        if radix < 2 {
            return Err(Error::InvalidRadix(radix as u64));
        }
        let g = Geometry { left, right, radix };
        if g.checked_table_len().is_none() {
            return Err(Error::guard(
                format!("rule table size {radix}^{}", g.range()),
                MAX_TABLE_LEN,
            ));
        }
        Ok(g)
    }

    /// `rho = l + r + 1`.
    pub fn range(&self) -> usize {
        self.left + self.right + 1
    }

    /// `q = p^rho`, the number of neighborhood values.
    pub fn table_len(&self) -> usize {
        self.checked_table_len().expect("validated at construction")
    }

    fn checked_table_len(&self) -> Option<usize> {
        let rho = u32::try_from(self.range()).ok()?;
        let q = (self.radix as usize).checked_pow(rho)?;
        (q <= MAX_TABLE_LEN).then_some(q)
    }

    /// Neighborhood value of a window given as `(x^{i+l}, ..., x^{i-r})`.
    pub fn neighborhood_value(&self, window: &Window) -> usize {
        debug_assert_eq!(window.len(), self.range());
        window
            .values()
            .iter()
            .fold(0usize, |acc, &x| acc * self.radix as usize + x as usize)
    }

    /// Inverse of [`Geometry::neighborhood_value`].
    pub fn window_of(&self, n: usize) -> Window {
        let p = self.radix as usize;
        let rho = self.range();
        let mut values = vec![0u32; rho];
        let mut rest = n;
        for slot in values.iter_mut().rev() {
            *slot = (rest % p) as u32;
            rest /= p;
        }
        Window { values }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.left, self.right, self.radix)
    }
}

/// Site values of one neighborhood, leftmost (`x^{i+l}`) first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    values: Vec<u32>,
}

impl Window {
    pub fn new(geometry: &Geometry, values: Vec<u32>) -> Result<Self> {
        if values.len() != geometry.range() {
            return Err(Error::Geometry(format!(
                "window of length {} for range {}",
                values.len(),
                geometry.range()
            )));
        }
        if let Some((index, &d)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| v >= geometry.radix)
        {
            return Err(Error::DigitOutOfRange {
                digit: d as u64,
                index,
                radix: geometry.radix,
            });
        }
        Ok(Window { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `x^{i+k}` for `k` in `[-r, l]`.
    pub fn at(&self, geometry: &Geometry, k: isize) -> u32 {
        self.values[(geometry.left as isize - k) as usize]
    }
}

/// A rule stored as its explicit output table `a_n`, `n in [0, p^rho)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    geometry: Geometry,
    table: Vec<u32>,
}

impl RuleSpec {
    pub fn from_table(geometry: Geometry, table: Vec<u32>) -> Result<Self> {
        if table.len() != geometry.table_len() {
            return Err(Error::TableLength {
                got: table.len(),
                expected: geometry.table_len(),
            });
        }
        // reuse the digit validation
        let table = DigitVector::new(geometry.radix, table)?.into_digits();
        Ok(RuleSpec { geometry, table })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn radix(&self) -> u32 {
        self.geometry.radix
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn output(&self, n: usize) -> u32 {
        self.table[n]
    }

    /// Output for a window, by table lookup.
    pub fn apply(&self, window: &Window) -> u32 {
        self.table[self.geometry.neighborhood_value(window)]
    }
}

/// `a_n = d_p(n+1, R)`; rejects codes with `R >= p^(p^rho)`.
pub fn rule_from_code(geometry: Geometry, code: &str) -> Result<RuleSpec> {
    let value = BigCount::parse_decimal(code)?;
    let q = geometry.table_len();
    let digits = digitcore::digits_lsd(geometry.radix, &value, q)?;
    let rebuilt = digitcore::from_digits(&digits);
    if rebuilt != value {
        return Err(Error::CodeOutOfRange {
            code: code.to_string(),
            bound: format!("{}^{}", geometry.radix, q),
        });
    }
    RuleSpec::from_table(geometry, digits.into_digits())
}

/// `R = sum a_n p^n` as a decimal string.
pub fn code_of_rule(rule: &RuleSpec) -> String {
    let v = DigitVector::new(rule.radix(), rule.table.clone()).expect("valid table");
    digitcore::decimal_string(&v)
}

/// Shift operator `T^m`: `a_n = d_p(m, n)`, realizing `x'^i = x^{i+m-r-1}`.
pub fn shift_rule(geometry: Geometry, m: usize) -> Result<RuleSpec> {
    let rho = geometry.range();
    if m < 1 || m > rho {
        return Err(Error::ShiftOutOfRange { m, range: rho });
    }
    let p = geometry.radix as usize;
    let scale = p.pow((m - 1) as u32);
    let table = (0..geometry.table_len())
        .map(|n| ((n / scale) % p) as u32)
        .collect();
    RuleSpec::from_table(geometry, table)
}

/// The identity rule, `T^{r+1}`.
pub fn identity_rule(geometry: Geometry) -> RuleSpec {
    shift_rule(geometry, geometry.right + 1).expect("r+1 lies in [1, rho]")
}

/// A totalistic rule `lRT^r_p`: output depends only on the window sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TotalisticRuleSpec {
    geometry: Geometry,
    table: Vec<u32>,
}

impl TotalisticRuleSpec {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// `a_s` for `s in [0, rho(p-1)]`.
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// `a_s` with `s` the window sum, evaluated as the boxcar scan over `s`.
    pub fn update(&self, window: &Window) -> u32 {
        let sum: i64 = window.values().iter().map(|&x| x as i64).sum();
        self.table
            .iter()
            .enumerate()
            .map(|(s, &a)| a * boxcar(s as i64 - sum) as u32)
            .sum()
    }

    /// Equivalent general rule with `a_n = a_{digit sum of n}`.
    pub fn to_rule(&self) -> RuleSpec {
        let g = self.geometry;
        let table = (0..g.table_len())
            .map(|n| {
                let s: u32 = g.window_of(n).values().iter().sum();
                self.table[s as usize]
            })
            .collect();
        RuleSpec::from_table(g, table).expect("outputs already validated")
    }
}

pub fn totalistic_from_code(geometry: Geometry, code: &str) -> Result<TotalisticRuleSpec> {
    let value = BigCount::parse_decimal(code)?;
    let len = geometry.range() * (geometry.radix as usize - 1) + 1;
    let digits = digitcore::digits_lsd(geometry.radix, &value, len)?;
    if digitcore::from_digits(&digits) != value {
        return Err(Error::CodeOutOfRange {
            code: code.to_string(),
            bound: format!("{}^{}", geometry.radix, len),
        });
    }
    Ok(TotalisticRuleSpec {
        geometry,
        table: digits.into_digits(),
    })
}

/// Independent formulas for the local update. All return `a_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvalPath {
    /// `sum_n a_n B(n - n(window))`.
    Boxcar,
    /// `sum_n a_n d_p(n(window), p^(n-1))`.
    DigitKrone,
    /// `sum_n a_n prod_k B(d_p(k+r+1, n) - x^{i+k})`.
    DigitProduct,
    /// Polynomial in the three site values, elementary rules only.
    WolframPoly,
}

impl EvalPath {
    pub const ALL: [EvalPath; 4] = [
        EvalPath::Boxcar,
        EvalPath::DigitKrone,
        EvalPath::DigitProduct,
        EvalPath::WolframPoly,
    ];
}

pub fn local_update(rule: &RuleSpec, window: &Window, path: EvalPath) -> Result<u32> {
    let g = rule.geometry();
    if window.len() != g.range() {
        return Err(Error::Geometry(format!(
            "window of length {} for range {}",
            window.len(),
            g.range()
        )));
    }
    match path {
        EvalPath::Boxcar => {
            let nv = g.neighborhood_value(window) as i64;
            Ok(rule
                .table()
                .iter()
                .enumerate()
                .map(|(n, &a)| a * boxcar(n as i64 - nv) as u32)
                .sum())
        }
        EvalPath::DigitKrone => {
            // d_p(i, p^(n-1)) = d_p(i+1, p^n) keeps every argument a
            // nonnegative integer and every position >= 1, including n = 0
            // and i = 0.
            let nv = g.neighborhood_value(window) as u64;
            let p = g.radix;
            let mut power = BigCount::one();
            let pb = BigUint::from(p);
            let mut acc = 0u32;
            for &a in rule.table() {
                acc += a * digit_of(p, nv + 1, &power)?;
                power = BigCount::from(power.into_biguint() * &pb);
            }
            Ok(acc)
        }
        EvalPath::DigitProduct => {
            let p = g.radix;
            let mut acc = 0u32;
            for (n, &a) in rule.table().iter().enumerate() {
                let n_big = BigCount::from(n as u64);
                let mut prod = 1u8;
                for k in -(g.right as isize)..=(g.left as isize) {
                    let d = digit_of(p, (k + g.right as isize + 1) as u64, &n_big)?;
                    prod *= boxcar(d as i64 - window.at(g, k) as i64);
                }
                acc += a * prod as u32;
            }
            Ok(acc)
        }
        EvalPath::WolframPoly => {
            if g.radix != 2 || g.left != 1 || g.right != 1 {
                return Err(Error::Geometry(format!(
                    "polynomial path needs l = r = 1, p = 2; got {g}"
                )));
            }
            Ok(wolfram_polynomial(rule.table(), window.values()) as u32)
        }
    }
}

/// Product form of the elementary-rule polynomial. `w = (x^{i+1}, x^i, x^{i-1})`.
fn wolfram_polynomial(a: &[u32], w: &[u32]) -> i64 {
    let a: Vec<i64> = a.iter().map(|&v| v as i64).collect();
    let (xl, xc, xr) = (w[0] as i64, w[1] as i64, w[2] as i64);
    a[0] * (1 - xl) * (1 - xc) * (1 - xr)
        + a[1] * xr * (1 - xl) * (1 - xc)
        + a[2] * xc * (1 - xl) * (1 - xr)
        + a[3] * xc * xr * (1 - xl)
        + a[4] * xl * (1 - xc) * (1 - xr)
        + a[5] * xl * xr * (1 - xc)
        + a[6] * xl * xc * (1 - xr)
        + a[7] * xl * xc * xr
}

/// A parsed rule argument: `l:r:p:code`, `l:r:p:[a0,a1,...]`, with an optional
/// trailing `T` for totalistic codes or tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleArg {
    General(RuleSpec),
    Totalistic(TotalisticRuleSpec),
}

impl RuleArg {
    /// The rule as an explicit table over neighborhood values.
    pub fn to_rule(&self) -> RuleSpec {
        match self {
            RuleArg::General(r) => r.clone(),
            RuleArg::Totalistic(t) => t.to_rule(),
        }
    }
}

impl FromStr for RuleArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse("rule (l:r:p:code or l:r:p:[a0,...])", s);
        let mut parts = s.trim().splitn(4, ':');
        let mut next_num = || -> Result<u64> {
            parts
                .next()
                .and_then(|t| t.trim().parse::<u64>().ok())
                .ok_or_else(bad)
        };
        let left = next_num()? as usize;
        let right = next_num()? as usize;
        let radix = u32::try_from(next_num()?).map_err(|_| bad())?;
        let body = parts.next().ok_or_else(bad)?.trim();
        let (body, totalistic) = match body.strip_suffix(['T', 't']) {
            Some(b) => (b, true),
            None => (body, false),
        };
        let geometry = Geometry::new(left, right, radix)?;
        if let Some(list) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let table = DigitVector::parse_list(radix, list)?.into_digits();
            if totalistic {
                let expected = geometry.range() * (radix as usize - 1) + 1;
                if table.len() != expected {
                    return Err(Error::TableLength {
                        got: table.len(),
                        expected,
                    });
                }
                Ok(RuleArg::Totalistic(TotalisticRuleSpec { geometry, table }))
            } else {
                Ok(RuleArg::General(RuleSpec::from_table(geometry, table)?))
            }
        } else if totalistic {
            Ok(RuleArg::Totalistic(totalistic_from_code(geometry, body)?))
        } else {
            Ok(RuleArg::General(rule_from_code(geometry, body)?))
        }
    }
}
