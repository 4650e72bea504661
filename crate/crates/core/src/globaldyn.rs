//! Global dynamics: a ring of `N_s` sites read as one base-`p` integer
//! `I = sum_i p^{i-1} x^i` (site 1 least significant), `phi = I / p^{N_s}`.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::digitcore::{boxcar, digit_of, exact_fraction, BigCount};
use crate::error::{Error, Result};
use crate::lattice::{self, RingState};
use crate::rulespace::{shift_rule, Geometry, RuleSpec};

/// Largest state space that tables and samples may enumerate.
pub const MAX_TABLE_STATES: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GlobalIndex {
    radix: u32,
    sites: usize,
    index: BigCount,
}

impl GlobalIndex {
    pub fn new(radix: u32, sites: usize, index: BigCount) -> Result<Self> {
        if radix < 2 {
            return Err(Error::InvalidRadix(radix as u64));
        }
        if sites == 0 {
            return Err(Error::Geometry("a ring needs at least one site".into()));
        }
        let states = state_count(radix, sites);
        if index.as_biguint() >= states.as_biguint() {
            return Err(Error::Parameter(format!(
                "global index {index} is not below {radix}^{sites}"
            )));
        }
        Ok(GlobalIndex {
            radix,
            sites,
            index,
        })
    }

    pub fn from_u64(radix: u32, sites: usize, index: u64) -> Result<Self> {
        GlobalIndex::new(radix, sites, BigCount::from(index))
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn index(&self) -> &BigCount {
        &self.index
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.index.to_u64()
    }

    /// `(I, p^{N_s})`, the exact value of `phi` as a fraction.
    pub fn phi_parts(&self) -> (BigUint, BigUint) {
        (
            self.index.as_biguint().clone(),
            state_count(self.radix, self.sites).into_biguint(),
        )
    }
}

/// `p^{N_s}`.
pub fn state_count(radix: u32, sites: usize) -> BigCount {
    BigCount::pow(radix as u64, sites as u32)
}

fn small_state_count(radix: u32, sites: usize) -> Result<u64> {
    let total = state_count(radix, sites);
    match total.to_u64() {
        Some(v) if v <= MAX_TABLE_STATES => Ok(v),
        _ => Err(Error::guard(
            format!("state space {radix}^{sites}"),
            MAX_TABLE_STATES,
        )),
    }
}

pub fn encode(s: &RingState) -> GlobalIndex {
    let p = BigUint::from(s.radix());
    let index = s
        .sites()
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &x| acc * &p + BigUint::from(x));
    GlobalIndex {
        radix: s.radix(),
        sites: s.len(),
        index: BigCount::from(index),
    }
}

pub fn decode(g: &GlobalIndex) -> RingState {
    let digits = crate::digitcore::digits_lsd(g.radix, &g.index, g.sites).expect("radix validated");
    RingState::new(g.radix, digits.into_digits()).expect("digits below radix")
}

fn decode_small(radix: u32, mut index: u64, out: &mut [u32]) {
    for slot in out.iter_mut() {
        *slot = (index % radix as u64) as u32;
        index /= radix as u64;
    }
}

fn encode_small(radix: u32, sites: &[u32]) -> u64 {
    sites
        .iter()
        .rev()
        .fold(0u64, |acc, &x| acc * radix as u64 + x as u64)
}

/// `p^{N_s} chi_tau(p^{-N_s} I)`: decode, step `tau` times, encode.
pub fn characteristic_value(rule: &RuleSpec, g: &GlobalIndex, tau: usize) -> Result<GlobalIndex> {
    let mut s = decode(g);
    for _ in 0..tau {
        s = lattice::step(rule, &s)?;
    }
    Ok(encode(&s))
}

/// The characteristic function evaluated term by term:
/// `I' = sum_i p^{i-1} sum_n a_n B(n - sum_k p^{k+r} d_p(i+k, I))`, with the
/// digit position `i + k` taken cyclically in `[1, N_s]`. Shares nothing with
/// the lattice step.
pub fn characteristic_direct(rule: &RuleSpec, g: &GlobalIndex) -> Result<GlobalIndex> {
    let geo = rule.geometry();
    if geo.radix != g.radix {
        return Err(Error::AlphabetMismatch {
            rule: geo.radix,
            state: g.radix,
        });
    }
    let p = g.radix;
    let ns = g.sites as i64;
    let mut out = BigUint::zero();
    let mut weight = BigUint::from(1u32);
    for i in 1..=ns {
        let mut nv: i64 = 0;
        let mut pk: i64 = 1;
        for k in -(geo.right as i64)..=(geo.left as i64) {
            let pos = (i + k - 1).rem_euclid(ns) + 1;
            nv += pk * digit_of(p, pos as u64, &g.index)? as i64;
            pk *= p as i64;
        }
        let x: i64 = rule
            .table()
            .iter()
            .enumerate()
            .map(|(n, &a)| a as i64 * boxcar(n as i64 - nv) as i64)
            .sum();
        out += &weight * BigUint::from(x as u64);
        weight *= p;
    }
    GlobalIndex::new(p, g.sites, BigCount::from(out))
}

/// Complete map `I -> I'` over all `p^{N_s}` states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionTable {
    radix: u32,
    sites: usize,
    image: Vec<u32>,
}

impl TransitionTable {
    pub fn from_image(radix: u32, sites: usize, image: Vec<u32>) -> Result<Self> {
        let total = small_state_count(radix, sites)?;
        if image.len() as u64 != total {
            return Err(Error::TableLength {
                got: image.len(),
                expected: total as usize,
            });
        }
        if let Some(&bad) = image.iter().find(|&&v| v as u64 >= total) {
            return Err(Error::Parameter(format!(
                "image entry {bad} is not below {total}"
            )));
        }
        Ok(TransitionTable {
            radix,
            sites,
            image,
        })
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        for &v in &self.image {
            if std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
        true
    }

    /// `self` after `first`: `I -> self(first(I))`.
    pub fn compose(&self, first: &TransitionTable) -> TransitionTable {
        let image = first
            .image
            .iter()
            .map(|&v| self.image[v as usize])
            .collect();
        TransitionTable {
            radix: self.radix,
            sites: self.sites,
            image,
        }
    }
}

/// Builds the table in parallel over disjoint index chunks.
pub fn transition_table(rule: &RuleSpec, sites: usize) -> Result<TransitionTable> {
    if sites == 0 {
        return Err(Error::Geometry("a ring needs at least one site".into()));
    }
    let total = small_state_count(rule.radix(), sites)?;
    let p = rule.radix();
    let mut image = vec![0u32; total as usize];
    image
        .par_chunks_mut(4096)
        .enumerate()
        .for_each(|(chunk, slots)| {
            let mut cur = vec![0u32; sites];
            let mut next = vec![0u32; sites];
            for (offset, slot) in slots.iter_mut().enumerate() {
                let index = (chunk * 4096 + offset) as u64;
                decode_small(p, index, &mut cur);
                lattice::step_into(rule, &cur, &mut next);
                *slot = encode_small(p, &next) as u32;
            }
        });
    Ok(TransitionTable {
        radix: p,
        sites,
        image,
    })
}

/// `(y, chi(y))` for every grid point `y = I / p^{N_s}`, as integer pairs
/// `(I, I')` sharing the denominator `p^{N_s}`.
pub fn characteristic_samples(rule: &RuleSpec, sites: usize) -> Result<Vec<(u64, u64)>> {
    let table = transition_table(rule, sites)?;
    Ok(table
        .image
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as u64, v as u64))
        .collect())
}

/// CSV `y,chi` with exact decimals, one row per grid point.
pub fn samples_csv(radix: u32, sites: usize, samples: &[(u64, u64)]) -> String {
    let den = state_count(radix, sites).into_biguint();
    let mut out = String::from("y,chi\n");
    for &(y, chi) in samples {
        out.push_str(&exact_fraction(&BigUint::from(y), &den));
        out.push(',');
        out.push_str(&exact_fraction(&BigUint::from(chi), &den));
        out.push('\n');
    }
    out
}

/// States with no preimage, ascending.
pub fn gardens_of_eden(t: &TransitionTable) -> Vec<u64> {
    let mut hit = vec![false; t.image.len()];
    for &v in &t.image {
        hit[v as usize] = true;
    }
    hit.iter()
        .enumerate()
        .filter(|(_, &h)| !h)
        .map(|(i, _)| i as u64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    /// Cycle states in dynamical order, starting where the ascending scan of
    /// initial states first entered the cycle.
    pub cycle: Vec<u64>,
    /// Number of states (cycle included) flowing into this cycle.
    pub basin: u64,
}

/// Every cycle of the functional graph with its basin size.
pub fn attractors(t: &TransitionTable) -> Vec<Attractor> {
    const UNSEEN: u32 = u32::MAX;
    const ON_PATH: u32 = u32::MAX - 1;
    let n = t.image.len();
    // owner[v] = attractor id once v is finished
    let mut owner = vec![UNSEEN; n];
    let mut found: Vec<Attractor> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for start in 0..n {
        if owner[start] != UNSEEN {
            continue;
        }
        path.clear();
        let mut v = start;
        while owner[v] == UNSEEN {
            owner[v] = ON_PATH;
            path.push(v);
            v = t.image[v] as usize;
        }
        let id = if owner[v] == ON_PATH {
            let entry = path.iter().position(|&u| u == v).expect("v is on the path");
            let cycle = path[entry..].iter().map(|&u| u as u64).collect();
            found.push(Attractor { cycle, basin: 0 });
            (found.len() - 1) as u32
        } else {
            owner[v]
        };
        for &u in &path {
            owner[u] = id;
        }
        found[id as usize].basin += path.len() as u64;
    }
    found
}

/// Table, Gardens of Eden and attractors as one JSON document with sorted keys.
pub fn table_report_json(rule: &RuleSpec, t: &TransitionTable) -> String {
    let attractors: Vec<serde_json::Value> = attractors(t)
        .into_iter()
        .map(|a| serde_json::json!({ "basin": a.basin, "cycle": a.cycle }))
        .collect();
    let doc = serde_json::json!({
        "Ns": t.sites,
        "attractors": attractors,
        "gardens_of_eden": gardens_of_eden(t),
        "image": t.image,
        "p": t.radix,
        "rule": format!("{}:{}", rule.geometry(), crate::rulespace::code_of_rule(rule)),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("plain values serialize");
    text.push('\n');
    text
}

/// Outcome of checking one group axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Group structure of the shift operators `T^1..T^rho` acting on rings of
/// `sites` sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftGroupReport {
    pub geometry: Geometry,
    pub sites: usize,
    /// Number of distinct global maps among the shift operators.
    pub order: usize,
    /// Shift indices `m` whose powers reach every element.
    pub generators: Vec<usize>,
    pub axioms: Vec<AxiomCheck>,
}

impl ShiftGroupReport {
    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomCheck> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "shift operators {} on N_s = {}: {} distinct elements\n",
            self.geometry, self.sites, self.order
        );
        for a in &self.axioms {
            out.push_str(&format!(
                "{:<14} {}  {}\n",
                a.name,
                if a.passed { "pass" } else { "FAIL" },
                a.detail
            ));
        }
        out
    }
}

/// Checks closure, associativity, identity, inverses, commutativity and
/// cyclicity on full transition tables. Limited to `p^{N_s} <= 2^24`.
pub fn shift_group_report(geometry: Geometry, sites: usize) -> Result<ShiftGroupReport> {
    let rho = geometry.range();
    let elements: Vec<TransitionTable> = (1..=rho)
        .map(|m| transition_table(&shift_rule(geometry, m)?, sites))
        .collect::<Result<_>>()?;
    let find = |t: &TransitionTable| elements.iter().position(|e| e == t).map(|i| i + 1);
    let mut axioms = Vec::new();

    // closure: every product is some T^m
    let mut product = vec![vec![None; rho + 1]; rho + 1];
    let mut missing = Vec::new();
    for h in 1..=rho {
        for k in 1..=rho {
            let c = elements[h - 1].compose(&elements[k - 1]);
            product[h][k] = find(&c);
            if product[h][k].is_none() {
                missing.push(format!("T{h}*T{k}"));
            }
        }
    }
    axioms.push(AxiomCheck {
        name: "closure",
        passed: missing.is_empty(),
        detail: if missing.is_empty() {
            "all products are shift operators".into()
        } else {
            format!("not a shift operator: {}", missing.join(", "))
        },
    });

    let mut assoc_ok = true;
    for h in 0..rho {
        for k in 0..rho {
            let hk = elements[h].compose(&elements[k]);
            for j in 0..rho {
                let left = hk.compose(&elements[j]);
                let right = elements[h].compose(&elements[k].compose(&elements[j]));
                assoc_ok &= left == right;
            }
        }
    }
    axioms.push(AxiomCheck {
        name: "associativity",
        passed: assoc_ok,
        detail: format!("{} triples over all states", rho * rho * rho),
    });

    let identity_index = geometry.right + 1;
    let id_table = &elements[identity_index - 1];
    let is_identity = id_table
        .image
        .iter()
        .enumerate()
        .all(|(i, &v)| i as u32 == v);
    let neutral = elements
        .iter()
        .all(|e| &e.compose(id_table) == e && &id_table.compose(e) == e);
    axioms.push(AxiomCheck {
        name: "identity",
        passed: is_identity && neutral,
        detail: format!("T{identity_index} is the identity"),
    });

    let mut inverse_notes = Vec::new();
    let mut inverse_ok = true;
    for m in 1..=rho {
        let paired = 2 * geometry.right as isize + 2 - m as isize;
        let found = (1..=rho).find(|&k| {
            let c = elements[k - 1].compose(&elements[m - 1]);
            c.image.iter().enumerate().all(|(i, &v)| i as u32 == v)
        });
        match found {
            Some(k) if (k as isize - paired).rem_euclid(sites as isize) == 0 => {
                inverse_notes.push(format!("T{m}^-1 = T{k}"));
            }
            Some(k) => {
                inverse_ok = false;
                inverse_notes.push(format!(
                    "T{m}^-1 = T{k}, expected index {paired} mod {sites}"
                ));
            }
            None => {
                inverse_ok = false;
                inverse_notes.push(format!("T{m} has no inverse"));
            }
        }
    }
    axioms.push(AxiomCheck {
        name: "inverse",
        passed: inverse_ok,
        detail: inverse_notes.join(", "),
    });

    let mut commute_ok = true;
    for h in 0..rho {
        for k in 0..rho {
            commute_ok &= elements[h].compose(&elements[k]) == elements[k].compose(&elements[h]);
        }
    }
    axioms.push(AxiomCheck {
        name: "commutativity",
        passed: commute_ok,
        detail: "all pairs".into(),
    });

    let mut distinct: Vec<&TransitionTable> = Vec::new();
    for e in &elements {
        if !distinct.contains(&e) {
            distinct.push(e);
        }
    }
    let order = distinct.len();
    let mut generators = Vec::new();
    for m in 1..=rho {
        let g = &elements[m - 1];
        let mut power = g.clone();
        let mut reached = vec![power.clone()];
        for _ in 0..order {
            power = g.compose(&power);
            if !reached.contains(&power) {
                reached.push(power.clone());
            }
        }
        if reached.len() == order && distinct.iter().all(|d| reached.contains(d)) {
            generators.push(m);
        }
    }
    axioms.push(AxiomCheck {
        name: "cyclicity",
        passed: !generators.is_empty(),
        detail: if generators.is_empty() {
            "no single generator".into()
        } else {
            format!(
                "generators: {}",
                generators
                    .iter()
                    .map(|m| format!("T{m}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        },
    });

    Ok(ShiftGroupReport {
        geometry,
        sites,
        order,
        generators,
        axioms,
    })
}

/// Global-CA step built from digit rotations of `I` alone:
/// `I' = sum_{k=1}^{N_s} p^{k-1} R'(n^k)`, where the neighborhood of site `k`
/// is `I` rotated by `k - r - 1` digits.
pub fn global_ca_step(rule: &RuleSpec, g: &GlobalIndex) -> Result<GlobalIndex> {
    let geo = rule.geometry();
    if geo.range() != g.sites {
        return Err(Error::Geometry(format!(
            "global step needs l + r + 1 = N_s, got rho = {} and N_s = {}",
            geo.range(),
            g.sites
        )));
    }
    if geo.radix != g.radix {
        return Err(Error::AlphabetMismatch {
            rule: geo.radix,
            state: g.radix,
        });
    }
    let index = g
        .index
        .to_u64()
        .filter(|&v| v < geo.table_len() as u64)
        .ok_or_else(|| Error::Parameter("index outside the rule table".into()))?;
    let ns = g.sites as u64;
    let p = g.radix as u64;
    let total = p.pow(ns as u32);
    let rotate = |shift: i64| -> u64 {
        // digit j of the result is digit j + shift of `index`, cyclically
        let s = shift.rem_euclid(ns as i64) as u32;
        let low = p.pow(s);
        (index / low) + (index % low) * (total / low)
    };
    let mut out = 0u64;
    let mut weight = 1u64;
    for k in 1..=ns as i64 {
        let n_k = rotate(k - geo.right as i64 - 1);
        out += weight * rule.output(n_k as usize) as u64;
        weight *= p;
    }
    GlobalIndex::from_u64(g.radix, g.sites, out)
}

/// Shorthand used by table-driven callers.
pub fn global_ca_step_u64(rule: &RuleSpec, index: u64) -> Result<u64> {
    let g = GlobalIndex::from_u64(rule.radix(), rule.geometry().range(), index)?;
    Ok(global_ca_step(rule, &g)?
        .to_u64()
        .expect("fits the rule table"))
}
