//! Neighborhood-level dynamics on the de Bruijn graph of a rule.
//!
//! Vertices are neighborhood values `n in [0, p^rho)`. An edge `n -> n'` joins
//! the neighborhood of site `i` to that of site `i + 1`: the lower `rho - 1`
//! digits of `n'` are the upper `rho - 1` digits of `n`, so
//! `n' = floor(n / p) + d p^(rho-1)` for a free digit `d`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::RingState;
use crate::rulespace::{Geometry, RuleSpec};

/// Enumeration limits for [`enumerate_spatial_fixed_points`].
pub const MAX_ENUM_VERTICES: usize = 1 << 16;
pub const MAX_ENUM_SITES: usize = 24;

fn vertex_count(p: u32, rho: usize) -> Result<usize> {
    (p as usize)
        .checked_pow(rho as u32)
        .ok_or_else(|| Error::guard(format!("vertex count {p}^{rho}"), usize::MAX))
}

/// The `p` vertices reachable from `n`, in increasing order of the free digit.
pub fn successors(p: u32, rho: usize, n: usize) -> Result<Vec<usize>> {
    let q = vertex_count(p, rho)?;
    if n >= q {
        return Err(Error::Parameter(format!("vertex {n} outside [0, {q})")));
    }
    let top = q / p as usize;
    Ok((0..p as usize).map(|d| n / p as usize + d * top).collect())
}

/// `b_{n n'}`: 1 iff digit `k` of `n'` equals digit `k + 1` of `n` for all
/// `k in [1, rho - 1]`.
pub fn adjacency_entry(p: u32, rho: usize, n: usize, n_next: usize) -> u8 {
    let p = p as usize;
    let (mut a, mut b) = (n / p, n_next);
    for _ in 1..rho {
        if a % p != b % p {
            return 0;
        }
        a /= p;
        b /= p;
    }
    1
}

/// A de Bruijn graph whose vertices carry the rule output as color, with an
/// optional mask selecting a subgraph. Vertex ids never change under masking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeBruijnGraph {
    geometry: Geometry,
    colors: Vec<u32>,
    mask: Option<Vec<bool>>,
}

impl DeBruijnGraph {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn radix(&self) -> u32 {
        self.geometry.radix
    }

    pub fn range(&self) -> usize {
        self.geometry.range()
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, n: usize) -> u32 {
        self.colors[n]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn is_kept(&self, n: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m[n])
    }

    pub fn kept_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(move |&n| self.is_kept(n))
    }

    /// Successors of a kept vertex that are themselves kept.
    pub fn out_edges(&self, n: usize) -> Vec<usize> {
        if !self.is_kept(n) {
            return Vec::new();
        }
        let p = self.radix() as usize;
        let top = self.vertex_count() / p;
        (0..p)
            .map(|d| n / p + d * top)
            .filter(|&m| self.is_kept(m))
            .collect()
    }

    pub fn in_degree(&self, n: usize) -> usize {
        self.kept_vertices()
            .filter(|&m| self.out_edges(m).contains(&n))
            .count()
    }

    pub fn edge_count(&self) -> usize {
        self.kept_vertices().map(|n| self.out_edges(n).len()).sum()
    }

    /// Fixed-width base-`p` label, most significant digit first.
    pub fn label(&self, n: usize) -> String {
        let p = self.radix();
        let mut digits: Vec<char> = Vec::with_capacity(self.range());
        let mut rest = n;
        for _ in 0..self.range() {
            digits.push(char::from_digit((rest % p as usize) as u32, 36).unwrap_or('?'));
            rest /= p as usize;
        }
        digits.iter().rev().collect()
    }
}

pub fn build_colored_graph(rule: &RuleSpec) -> DeBruijnGraph {
    DeBruijnGraph {
        geometry: *rule.geometry(),
        colors: rule.table().to_vec(),
        mask: None,
    }
}

/// Keeps vertex `n` iff its color equals its center digit `d_p(r + 1, n)`.
pub fn fixed_point_subgraph(rule: &RuleSpec) -> DeBruijnGraph {
    let g = rule.geometry();
    let p = g.radix as usize;
    let center_scale = p.pow(g.right as u32);
    let mask = (0..g.table_len())
        .map(|n| rule.output(n) as usize == (n / center_scale) % p)
        .collect();
    DeBruijnGraph {
        geometry: *g,
        colors: rule.table().to_vec(),
        mask: Some(mask),
    }
}

/// Every ring of `N_s` sites left unchanged by the rule, as the closed walks
/// of length `N_s` in the fixed-point subgraph. Sorted by the state's value
/// read with `x^1` least significant.
pub fn enumerate_spatial_fixed_points(rule: &RuleSpec, sites: usize) -> Result<Vec<RingState>> {
    let g = rule.geometry();
    if g.table_len() > MAX_ENUM_VERTICES {
        return Err(Error::guard(
            format!("fixed-point enumeration over {} vertices", g.table_len()),
            MAX_ENUM_VERTICES,
        ));
    }
    if sites > MAX_ENUM_SITES {
        return Err(Error::guard(
            format!("fixed-point enumeration on {sites} sites"),
            MAX_ENUM_SITES,
        ));
    }
    if sites == 0 {
        return Err(Error::Geometry("a ring needs at least one site".into()));
    }
    let graph = fixed_point_subgraph(rule);
    let p = g.radix as usize;
    let center_scale = p.pow(g.right as u32);
    let center = |n: usize| ((n / center_scale) % p) as u32;

    let mut found = Vec::new();
    // walk[j] is the neighborhood of site j+1; iterative DFS over edge choices
    for start in graph.kept_vertices() {
        let mut walk = vec![start];
        let mut choice: Vec<usize> = vec![0];
        while let Some(&at) = walk.last() {
            let depth = walk.len() - 1;
            if depth == sites {
                if at == start {
                    let cells = walk[..sites].iter().map(|&n| center(n)).collect();
                    found.push(RingState::new(g.radix, cells)?);
                }
                walk.pop();
                choice.pop();
                continue;
            }
            let edges = graph.out_edges(at);
            let c = choice[depth];
            if c < edges.len() {
                choice[depth] += 1;
                walk.push(edges[c]);
                choice.push(0);
            } else {
                walk.pop();
                choice.pop();
            }
        }
    }
    found.sort_by(|a, b| a.sites().iter().rev().cmp(b.sites().iter().rev()));
    Ok(found)
}

/// One step of the neighborhood map
/// `n_{t+1}^i = sum_{k=1}^{rho} p^{k-1} T^k[R'(n_t^i)]`, where `R'` colors each
/// neighborhood with the rule output and `T^k` shifts that field by
/// `k - r - 1` sites.
pub fn nonlocal_step(rule: &RuleSpec, sequence: &[usize]) -> Result<Vec<usize>> {
    let g = rule.geometry();
    let (p, rho, q) = (g.radix, g.range(), g.table_len());
    let ns = sequence.len();
    if ns == 0 {
        return Err(Error::Geometry("empty neighborhood sequence".into()));
    }
    for (j, &n) in sequence.iter().enumerate() {
        if n >= q {
            return Err(Error::Parameter(format!("vertex {n} outside [0, {q})")));
        }
        let next = sequence[(j + 1) % ns];
        if adjacency_entry(p, rho, n, next) == 0 {
            return Err(Error::InconsistentSequence {
                site: j + 1,
                from: n,
                to: next,
            });
        }
    }
    let colors: Vec<u32> = sequence.iter().map(|&n| rule.output(n)).collect();
    let right = g.right as isize;
    let out = (0..ns as isize)
        .map(|j| {
            (1..=rho as isize).rev().fold(0usize, |acc, k| {
                let shifted = colors[(j + k - right - 1).rem_euclid(ns as isize) as usize];
                acc * p as usize + shifted as usize
            })
        })
        .collect();
    Ok(out)
}

/// Graphviz rendering: one node per kept vertex, one edge per kept successor.
pub fn export_dot(graph: &DeBruijnGraph) -> String {
    let mut out = String::new();
    let g = graph.geometry();
    let _ = writeln!(out, "digraph debruijn {{");
    let _ = writeln!(out, "  // l={} r={} p={}", g.left, g.right, g.radix);
    for n in graph.kept_vertices() {
        let _ = writeln!(
            out,
            "  v{n} [label=\"{} / {}\", color={}];",
            graph.label(n),
            graph.color(n),
            graph.color(n)
        );
    }
    for n in graph.kept_vertices() {
        for m in graph.out_edges(n) {
            let _ = writeln!(out, "  v{n} -> v{m};");
        }
    }
    out.push_str("}\n");
    out
}
