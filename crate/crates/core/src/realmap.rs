//! Real maps on `[0, 1]` compiled into global CA at precision `p^{-N_s}`:
//! `I' = min(floor(P * chi(I / P)), P - 1)` with `P = p^{N_s}`, plus orbit
//! analysis and parameter sweeps.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::digitcore::{exact_fraction, BigCount};
use crate::error::{Error, Result};
use crate::globaldyn::{state_count, GlobalIndex};

/// Largest `P` an opaque double-precision map may be sampled at.
pub const MAX_OPAQUE_STATES: u64 = 1 << 52;
/// Cycle states kept in an [`OrbitReport`].
pub const CYCLE_CAP: usize = 4096;
/// Budget on total orbit steps in one parameter sweep.
pub const MAX_SCAN_WORK: u64 = 1 << 27;

/// Parses `"3.2"`, `"-0.5"`, `"7"` or `"16/5"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::parse("rational number", s);
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_signed_integer(n.trim()).ok_or_else(bad)?;
        let d = parse_signed_integer(d.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut num = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    if negative {
        num = -num;
    }
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(num, den))
}

fn parse_signed_integer(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

/// Exact decimal (or `num/den`) text of a non-negative rational.
pub fn rational_text(q: &BigRational) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let num = q.numer().abs().to_biguint().expect("absolute value");
    let den = q.denom().to_biguint().expect("positive denominator");
    format!("{sign}{}", exact_fraction(&num, &den))
}

fn to_natural(q: &BigInt) -> BigUint {
    q.to_biguint().expect("non-negative")
}

type HostFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum MapKind {
    Logistic { num: BigUint, den: BigUint },
    Polynomial(Vec<BigRational>),
    Opaque { f: Arc<HostFn>, tolerance: f64 },
}

/// A map `chi: [0, 1] -> [0, 1]`.
#[derive(Clone)]
pub struct MapSpec {
    kind: MapKind,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Logistic { num, den } => write!(f, "Logistic({num}/{den})"),
            MapKind::Polynomial(c) => {
                let terms: Vec<String> = c.iter().map(rational_text).collect();
                write!(f, "Polynomial[{}]", terms.join(", "))
            }
            MapKind::Opaque { tolerance, .. } => write!(f, "Opaque(tolerance {tolerance})"),
        }
    }
}

impl MapSpec {
    /// `chi(x) = mu x (1 - x)` with `0 <= mu <= 4`.
    pub fn logistic(mu: &BigRational) -> Result<Self> {
        if mu.is_negative() || mu > &BigRational::from_integer(BigInt::from(4)) {
            return Err(Error::Parameter(format!(
                "logistic parameter {} is outside [0, 4]",
                rational_text(mu)
            )));
        }
        Ok(MapSpec {
            kind: MapKind::Logistic {
                num: to_natural(mu.numer()),
                den: to_natural(mu.denom()),
            },
        })
    }

    pub fn logistic_str(mu: &str) -> Result<Self> {
        MapSpec::logistic(&parse_rational(mu)?)
    }

    /// `chi(x) = sum_k c_k x^k`, lowest degree first.
    pub fn polynomial(coefficients: Vec<BigRational>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Parameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(MapSpec {
            kind: MapKind::Polynomial(coefficients),
        })
    }

    /// Host function evaluated in double precision. Values within
    /// `tolerance` outside `[0, 1]` are clamped.
    pub fn opaque(f: impl Fn(f64) -> f64 + Send + Sync + 'static, tolerance: f64) -> Self {
        MapSpec {
            kind: MapKind::Opaque {
                f: Arc::new(f),
                tolerance,
            },
        }
    }

    pub fn mu(&self) -> Option<BigRational> {
        match &self.kind {
            MapKind::Logistic { num, den } => Some(BigRational::new(
                BigInt::from(num.clone()),
                BigInt::from(den.clone()),
            )),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, MapKind::Opaque { .. })
    }

    /// Exact `chi(x)`; `None` for opaque maps.
    pub fn evaluate_exact(&self, x: &BigRational) -> Option<BigRational> {
        match &self.kind {
            MapKind::Logistic { .. } => {
                let mu = self.mu().expect("logistic");
                Some(mu * x * (BigRational::one() - x))
            }
            MapKind::Polynomial(c) => Some(
                c.iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, ck| acc * x + ck),
            ),
            MapKind::Opaque { .. } => None,
        }
    }

    /// `min(floor(P chi(I / P)), P - 1)` for a grid point `I / P`.
    pub fn image(&self, index: &BigUint, total: &BigUint) -> Result<BigUint> {
        let top = total - 1u32;
        let q = match &self.kind {
            MapKind::Logistic { num, den } => logistic_floor(num, den, index, total),
            MapKind::Polynomial(_) => {
                let x = BigRational::new(BigInt::from(index.clone()), BigInt::from(total.clone()));
                let y = self.evaluate_exact(&x).expect("exact map");
                if y.is_negative() || y > BigRational::one() {
                    return Err(Error::Domain {
                        phi: exact_fraction(index, total),
                        value: rational_text(&y),
                    });
                }
                to_natural(&(y * BigInt::from(total.clone())).floor().to_integer())
            }
            MapKind::Opaque { f, tolerance } => {
                let p = total
                    .to_u64()
                    .filter(|&v| v <= MAX_OPAQUE_STATES)
                    .ok_or_else(|| Error::guard("opaque map grid size", MAX_OPAQUE_STATES))?;
                let i = index.to_u64().expect("below total");
                let x = i as f64 / p as f64;
                let y = f(x);
                if !y.is_finite() || y < -tolerance || y > 1.0 + tolerance {
                    return Err(Error::Domain {
                        phi: exact_fraction(index, total),
                        value: format!("{y}"),
                    });
                }
                BigUint::from((y.clamp(0.0, 1.0) * p as f64).floor() as u64)
            }
        };
        Ok(if q > top { top } else { q })
    }
}

/// `floor(a I (P - I) / (b P))`.
fn logistic_floor(a: &BigUint, b: &BigUint, index: &BigUint, total: &BigUint) -> BigUint {
    (a * index * (total - index)) / (b * total)
}

fn check_index(p: u32, sites: usize, g: &GlobalIndex) -> Result<()> {
    if g.radix() != p {
        return Err(Error::AlphabetMismatch {
            rule: p,
            state: g.radix(),
        });
    }
    if g.sites() != sites {
        return Err(Error::SizeMismatch {
            expected: sites,
            got: g.sites(),
        });
    }
    Ok(())
}

/// One step of the CA induced by `map` on `N_s` base-`p` digits.
pub fn induced_ca_step(
    map: &MapSpec,
    p: u32,
    sites: usize,
    g: &GlobalIndex,
) -> Result<GlobalIndex> {
    check_index(p, sites, g)?;
    let total = state_count(p, sites).into_biguint();
    let next = map.image(g.index().as_biguint(), &total)?;
    GlobalIndex::new(p, sites, BigCount::from(next))
}

/// Induced logistic step in exact integers:
/// `I' = floor(a I (P - I) / (b P))` for `mu = a / b`.
pub fn logistic_ca_step(
    mu: &BigRational,
    p: u32,
    sites: usize,
    g: &GlobalIndex,
) -> Result<GlobalIndex> {
    let map = MapSpec::logistic(mu)?;
    induced_ca_step(&map, p, sites, g)
}

/// Digits `x'^1..x'^{N_s}` (LSD first), each computed on its own as
/// `floor(y / p^{i-1}) - p floor(y / p^i)` with `y = P chi(I / P)` rational.
/// Exact maps only; no clamp is applied.
pub fn map2ca_digits(map: &MapSpec, p: u32, sites: usize, g: &GlobalIndex) -> Result<Vec<u32>> {
    check_index(p, sites, g)?;
    let total = BigInt::from(state_count(p, sites).into_biguint());
    let x = BigRational::new(BigInt::from(g.index().as_biguint().clone()), total.clone());
    let y = map
        .evaluate_exact(&x)
        .ok_or_else(|| Error::Parameter("digit formulation needs an exact map".into()))?
        * total;
    let pb = BigInt::from(p);
    let mut low = BigInt::one();
    (1..=sites)
        .map(|_| {
            let high = &low * &pb;
            let d = (&y / &low).floor().to_integer() - &pb * (&y / &high).floor().to_integer();
            low = high;
            d.to_u32().ok_or_else(|| Error::Domain {
                phi: rational_text(&x),
                value: d.to_string(),
            })
        })
        .collect()
}

/// Asymptotic map on one digit: `min(floor(p chi(x / p)), p - 1)`.
pub fn asymptotic_step(map: &MapSpec, p: u64, x: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::InvalidRadix(p));
    }
    if x >= p {
        return Err(Error::Parameter(format!("state {x} is not below {p}")));
    }
    let next = map.image(&BigUint::from(x), &BigUint::from(p))?;
    Ok(next.to_u64().expect("below p"))
}

/// Stepper for the CA induced by a map at fixed `(p, N_s)`, on raw indices.
#[derive(Clone, Debug)]
pub struct InducedCa {
    map: MapSpec,
    radix: u32,
    sites: usize,
    total: BigUint,
}

impl InducedCa {
    pub fn new(map: MapSpec, radix: u32, sites: usize) -> Result<Self> {
        if radix < 2 {
            return Err(Error::InvalidRadix(radix as u64));
        }
        if sites == 0 {
            return Err(Error::Geometry("a ring needs at least one site".into()));
        }
        Ok(InducedCa {
            map,
            radix,
            sites,
            total: state_count(radix, sites).into_biguint(),
        })
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn step(&self, index: &BigUint) -> Result<BigUint> {
        self.map.image(index, &self.total)
    }

    /// Index of the state with a single 1 at site `site`.
    pub fn seed_index(&self, site: usize) -> Result<BigUint> {
        if site == 0 || site > self.sites {
            return Err(Error::Parameter(format!(
                "seed site {site} is outside [1, {}]",
                self.sites
            )));
        }
        Ok(BigUint::from(self.radix).pow(site as u32 - 1))
    }

    /// True when every site holds the same digit.
    pub fn is_homogeneous(&self, index: &BigUint) -> bool {
        let repunit = (&self.total - 1u32) / BigUint::from(self.radix - 1);
        let (q, r) = index.div_rem(&repunit);
        r.is_zero() && q < BigUint::from(self.radix)
    }

    /// `s_0, ..., s_steps`.
    pub fn orbit(&self, start: &BigUint, steps: usize) -> Result<Vec<BigUint>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(start.clone());
        for _ in 0..steps {
            let next = self.step(out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// A closed orbit: `transient` steps to reach a cycle of length `period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport<S> {
    pub transient: u64,
    pub period: u64,
    /// Cycle states from the first one reached, at most [`CYCLE_CAP`].
    pub cycle: Vec<S>,
    pub cycle_truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orbit<S> {
    Resolved(OrbitReport<S>),
    /// No cycle with `transient + period <= max_steps`.
    Unresolved {
        max_steps: u64,
    },
}

impl<S> Orbit<S> {
    pub fn report(&self) -> Option<&OrbitReport<S>> {
        match self {
            Orbit::Resolved(r) => Some(r),
            Orbit::Unresolved { .. } => None,
        }
    }

    pub fn period(&self) -> Option<u64> {
        self.report().map(|r| r.period)
    }
}

/// Brent's cycle detection on `start, f(start), ...`. Resolves exactly when
/// `transient + period <= max_steps`.
pub fn cycle_detect<S, F>(mut f: F, start: S, max_steps: u64) -> Result<Orbit<S>>
where
    S: Clone + Eq,
    F: FnMut(&S) -> Result<S>,
{
    let max_steps = max_steps.max(1);
    // Brent finds any cycle with mu + lambda <= n within 3n evaluations.
    let budget = max_steps.saturating_mul(3).saturating_add(1);
    let mut power = 1u64;
    let mut lambda = 1u64;
    let mut tortoise = start.clone();
    let mut hare = f(&start)?;
    let mut spent = 1u64;
    while tortoise != hare {
        if power == lambda {
            tortoise = hare.clone();
            power *= 2;
            lambda = 0;
        }
        hare = f(&hare)?;
        lambda += 1;
        spent += 1;
        if spent > budget || lambda > max_steps {
            return Ok(Orbit::Unresolved { max_steps });
        }
    }

    let mut tortoise = start.clone();
    let mut hare = start;
    for _ in 0..lambda {
        hare = f(&hare)?;
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = f(&tortoise)?;
        hare = f(&hare)?;
        mu += 1;
        if mu + lambda > max_steps {
            return Ok(Orbit::Unresolved { max_steps });
        }
    }

    let keep = (lambda as usize).min(CYCLE_CAP);
    let mut cycle = Vec::with_capacity(keep);
    cycle.push(tortoise);
    while cycle.len() < keep {
        let next = f(cycle.last().expect("non-empty"))?;
        cycle.push(next);
    }
    Ok(Orbit::Resolved(OrbitReport {
        transient: mu,
        period: lambda,
        cycle,
        cycle_truncated: (lambda as usize) > CYCLE_CAP,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Behavior {
    /// Settles on a homogeneous fixed point.
    Class1,
    /// Settles on a cycle of period at most `t2`.
    Class2,
    /// No cycle found within the step budget.
    Class3Candidate,
    /// Closed orbit with period above `t2`.
    Unresolved,
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Behavior::Class1 => "class 1",
            Behavior::Class2 => "class 2",
            Behavior::Class3Candidate => "class 3 candidate",
            Behavior::Unresolved => "unresolved",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub t2: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { t2: 1024 }
    }
}

pub fn classify_behavior<S>(
    orbit: &Orbit<S>,
    homogeneous: impl Fn(&S) -> bool,
    thresholds: Thresholds,
) -> Behavior {
    match orbit {
        Orbit::Unresolved { .. } => Behavior::Class3Candidate,
        Orbit::Resolved(r) if r.period == 1 && homogeneous(&r.cycle[0]) => Behavior::Class1,
        Orbit::Resolved(r) if r.period <= thresholds.t2 => Behavior::Class2,
        Orbit::Resolved(_) => Behavior::Unresolved,
    }
}

/// Logistic sweep over an evenly spaced `mu` grid.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub mu_lo: BigRational,
    pub mu_hi: BigRational,
    /// Grid points including both ends; 1 samples `mu_lo` only.
    pub points: usize,
    pub radix: u32,
    pub sites: usize,
    pub initial: BigUint,
    pub t_transient: u64,
    /// Step budget for the period search after the transient.
    pub t_sample: u64,
    /// Number of `phi` values recorded after the transient.
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub mu: BigRational,
    /// 0 when no cycle closes within `t_sample`.
    pub period: u64,
    pub phi: Vec<BigUint>,
}

pub fn mu_grid(lo: &BigRational, hi: &BigRational, points: usize) -> Vec<BigRational> {
    match points {
        0 => Vec::new(),
        1 => vec![lo.clone()],
        _ => {
            let step = (hi - lo) / BigInt::from(points - 1);
            (0..points).map(|j| lo + &step * BigInt::from(j)).collect()
        }
    }
}

pub fn bifurcation_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    if cfg.points == 0 {
        return Err(Error::Parameter(
            "scan needs at least one grid point".into(),
        ));
    }
    let per_point = cfg
        .t_transient
        .saturating_add(cfg.t_sample.saturating_mul(4))
        .saturating_add(cfg.samples as u64);
    if per_point.saturating_mul(cfg.points as u64) > MAX_SCAN_WORK {
        return Err(Error::guard(
            format!("{} grid points x {per_point} steps", cfg.points),
            MAX_SCAN_WORK,
        ));
    }
    let grid = mu_grid(&cfg.mu_lo, &cfg.mu_hi, cfg.points);
    let steppers: Vec<InducedCa> = grid
        .iter()
        .map(|mu| InducedCa::new(MapSpec::logistic(mu)?, cfg.radix, cfg.sites))
        .collect::<Result<_>>()?;
    if let Some(s) = steppers.first() {
        if &cfg.initial >= s.total() {
            return Err(Error::Parameter("initial state is outside the grid".into()));
        }
    }
    steppers
        .par_iter()
        .zip(grid.par_iter())
        .map(|(ca, mu)| {
            let mut state = cfg.initial.clone();
            for _ in 0..cfg.t_transient {
                state = ca.step(&state)?;
            }
            let orbit = cycle_detect(|s| ca.step(s), state.clone(), cfg.t_sample)?;
            let mut phi = Vec::with_capacity(cfg.samples);
            for _ in 0..cfg.samples {
                phi.push(state.clone());
                state = ca.step(&state)?;
            }
            Ok(ScanRow {
                mu: mu.clone(),
                period: orbit.period().unwrap_or(0),
                phi,
            })
        })
        .collect()
}

/// CSV `mu,period,phi_1,...,phi_k` with exact decimals.
pub fn scan_csv(cfg: &ScanConfig, rows: &[ScanRow]) -> String {
    let total = state_count(cfg.radix, cfg.sites).into_biguint();
    let mut out = String::from("mu,period");
    for k in 1..=cfg.samples {
        out.push_str(&format!(",phi_{k}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&rational_text(&row.mu));
        out.push_str(&format!(",{}", row.period));
        for v in &row.phi {
            out.push(',');
            out.push_str(&exact_fraction(v, &total));
        }
        out.push('\n');
    }
    out
}

/// `I / P` as an exact rational.
pub fn phi_of(index: &BigUint, total: &BigUint) -> BigRational {
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, index.clone()),
        BigInt::from(total.clone()),
    )
}
