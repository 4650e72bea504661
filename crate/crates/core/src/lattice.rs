//! Periodic rings of sites and their evolution under a rule.
//!
//! `sites()[j]` holds `x^{j+1}`. Text and raster output put the highest site
//! `x^{N_s}` on the left, matching the left-increasing site index.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rulespace::{Geometry, RuleSpec};

/// One configuration of a ring of `N_s >= 1` sites over the alphabet `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingState {
    radix: u32,
    sites: Vec<u32>,
}

impl RingState {
    pub fn new(radix: u32, sites: Vec<u32>) -> Result<Self> {
        if radix < 2 {
            return Err(Error::InvalidRadix(radix as u64));
        }
        if sites.is_empty() {
            return Err(Error::Geometry("a ring needs at least one site".into()));
        }
        if let Some((index, &d)) = sites.iter().enumerate().find(|(_, &x)| x >= radix) {
            return Err(Error::DigitOutOfRange {
                digit: d as u64,
                index,
                radix,
            });
        }
        Ok(RingState { radix, sites })
    }

    pub fn zeros(radix: u32, len: usize) -> Result<Self> {
        RingState::new(radix, vec![0; len])
    }

    /// All zero except `x^site = 1`.
    pub fn single_seed(radix: u32, len: usize, site: usize) -> Result<Self> {
        if site < 1 || site > len {
            return Err(Error::Parameter(format!(
                "seed site {site} outside [1, {len}]"
            )));
        }
        let mut sites = vec![0; len];
        sites[site - 1] = 1;
        RingState::new(radix, sites)
    }

    pub fn random(radix: u32, len: usize, rng: &mut impl Rng) -> Result<Self> {
        let sites = (0..len).map(|_| rng.gen_range(0..radix)).collect();
        RingState::new(radix, sites)
    }

    /// Parses a digit string written with `x^{N_s}` first. Digits above 9 use
    /// `a..z`.
    pub fn parse_msd(radix: u32, s: &str) -> Result<Self> {
        let mut sites = s
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .filter(|&d| d < radix)
                    .ok_or_else(|| Error::parse("ring state digits", s))
            })
            .collect::<Result<Vec<_>>>()?;
        sites.reverse();
        RingState::new(radix, sites)
    }

    /// Digit string with `x^{N_s}` first.
    pub fn to_msd_string(&self) -> String {
        self.sites
            .iter()
            .rev()
            .map(|&d| char::from_digit(d, 36).unwrap_or('?'))
            .collect()
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn sites(&self) -> &[u32] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `x^i` with cyclic indexing, `i` may be any integer.
    pub fn site(&self, i: isize) -> u32 {
        self.sites[(i - 1).rem_euclid(self.sites.len() as isize) as usize]
    }

    /// Rotation: result has `y^i = x^{i+offset}`.
    pub fn rotated(&self, offset: isize) -> RingState {
        let n = self.sites.len() as isize;
        let sites = (0..n)
            .map(|j| self.sites[(j + offset).rem_euclid(n) as usize])
            .collect();
        RingState {
            radix: self.radix,
            sites,
        }
    }

    /// Spatial reflection, `y^i = x^{N_s + 1 - i}`.
    pub fn reflected(&self) -> RingState {
        let mut sites = self.sites.clone();
        sites.reverse();
        RingState {
            radix: self.radix,
            sites,
        }
    }
}

/// `n^i` at each site: `sum_{k=-r}^{l} p^{k+r} x^{i+k}`, `i = 1..N_s`.
pub fn neighborhood_sequence(geometry: &Geometry, s: &RingState) -> Vec<usize> {
    let p = geometry.radix as usize;
    let (l, r) = (geometry.left as isize, geometry.right as isize);
    (1..=s.len() as isize)
        .map(|i| {
            (-r..=l)
                .rev()
                .fold(0usize, |acc, k| acc * p + s.site(i + k) as usize)
        })
        .collect()
}

/// One synchronous update of every site.
pub fn step(rule: &RuleSpec, s: &RingState) -> Result<RingState> {
    if rule.radix() != s.radix {
        return Err(Error::AlphabetMismatch {
            rule: rule.radix(),
            state: s.radix,
        });
    }
    let mut out = vec![0; s.len()];
    step_into(rule, &s.sites, &mut out);
    Ok(RingState {
        radix: s.radix,
        sites: out,
    })
}

/// Raw update on site slices. `out` must have the length of `sites`.
pub(crate) fn step_into(rule: &RuleSpec, sites: &[u32], out: &mut [u32]) {
    let g = rule.geometry();
    let p = g.radix as usize;
    let ns = sites.len() as isize;
    let (l, r) = (g.left as isize, g.right as isize);
    for (j, slot) in out.iter_mut().enumerate() {
        let j = j as isize;
        let mut n = 0usize;
        for k in (-r..=l).rev() {
            n = n * p + sites[(j + k).rem_euclid(ns) as usize] as usize;
        }
        *slot = rule.output(n);
    }
}

/// Rows `0..=T` of the evolution; row 0 is the initial condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeRaster {
    radix: u32,
    rows: Vec<RingState>,
}

impl SpacetimeRaster {
    pub fn from_rows(radix: u32, rows: Vec<RingState>) -> Result<Self> {
        let width = rows.first().map(RingState::len).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|r| r.len() != width || r.radix != radix) {
            return Err(Error::SizeMismatch {
                expected: width,
                got: bad.len(),
            });
        }
        Ok(SpacetimeRaster { radix, rows })
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn rows(&self) -> &[RingState] {
        &self.rows
    }

    /// Plain PGM (P2), gray level `255 x / (p - 1)`, `x^{N_s}` leftmost.
    pub fn to_pgm(&self) -> String {
        let width = self.rows.first().map(RingState::len).unwrap_or(0);
        let mut out = format!("P2\n{} {}\n255\n", width, self.rows.len());
        let scale = self.radix - 1;
        for row in &self.rows {
            let line: Vec<String> = row
                .sites
                .iter()
                .rev()
                .map(|&x| (255 * x / scale).to_string())
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// One line per row: `.` for 0, `#` for `p - 1` when `p = 2`, digits otherwise.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            for &x in row.sites.iter().rev() {
                let c = match (self.radix, x) {
                    (_, 0) => '.',
                    (2, _) => '#',
                    _ => char::from_digit(x, 36).unwrap_or('?'),
                };
                out.push(c);
            }
            let _ = writeln!(out);
        }
        out
    }
}

pub fn evolve(rule: &RuleSpec, s0: &RingState, steps: usize) -> Result<SpacetimeRaster> {
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(s0.clone());
    for t in 0..steps {
        let next = step(rule, &rows[t])?;
        rows.push(next);
    }
    SpacetimeRaster::from_rows(s0.radix, rows)
}
