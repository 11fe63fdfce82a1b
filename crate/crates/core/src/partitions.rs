//! Combinatorial skeletons of vacuum Goldstone diagrams.
//!
//! Vertices are indexed `1..=n` with index 1 the earliest time. A contraction
//! edge `(i, j)` always has `i > j`: the creator leg sits on the earlier vertex
//! `j`, the annihilator leg on the later vertex `i`. Every vertex carries at
//! most one creator and one annihilator leg, so each connected component of a
//! diagram is a chain through the sorted elements of a block, and diagrams are
//! in bijection with set partitions of the vertices.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`enumerate_set_partitions`].
pub const MAX_SET_PARTITION_N: usize = 14;
/// Largest vertex count accepted by [`enumerate_pair_partitions`].
pub const MAX_PAIR_PARTITION_N: usize = 16;
/// Largest vertex count accepted when parsing a diagram string.
pub const MAX_PARSED_VERTICES: usize = 256;

/// A partition of `{1, .., n}` into non-empty blocks, stored canonically:
/// blocks ordered by their smallest element, elements ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from arbitrary blocks, checking coverage and
    /// disjointness, and brings it to canonical form.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &v in block.iter() {
                if v == 0 || v > n {
                    return Err(Error::InvalidPartition(format!(
                        "element {v} outside 1..={n}"
                    )));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidPartition(format!(
                        "element {v} appears twice"
                    )));
                }
            }
            block.sort_unstable();
        }
        if let Some(missing) = (1..=n).find(|&v| !seen[v]) {
            return Err(Error::InvalidPartition(format!(
                "element {missing} not covered"
            )));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Builds a partition from a restricted growth string (`labels[v - 1]` is
    /// the block label of vertex `v`, labels appear in first-use order).
    pub fn from_growth_string(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (idx, &label) in labels.iter().enumerate() {
            if label == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[label].push(idx + 1);
        }
        Self {
            n: labels.len(),
            blocks,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block sizes in ascending order.
    pub fn profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        sizes
    }

    /// True when every block is a run of consecutive integers.
    pub fn has_interval_blocks(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.windows(2).all(|w| w[1] == w[0] + 1))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, block) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (l, v) in block.iter().enumerate() {
                if l > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Streams set partitions of `{1..n}` in restricted-growth-string order.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    labels: Vec<usize>,
    // prefix_max[i] = max(labels[0..i]), with prefix_max[0] unused
    prefix_max: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    fn new(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        }
    }

    fn advance(&mut self) {
        let n = self.labels.len();
        for i in (1..n).rev() {
            if self.labels[i] <= self.prefix_max[i] {
                self.labels[i] += 1;
                let top = self.prefix_max[i].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = top;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let current = SetPartition::from_growth_string(&self.labels);
        self.advance();
        Some(current)
    }
}

/// Every set partition of `{1..n}` exactly once, in canonical form.
/// `n = 0` yields the single empty partition.
pub fn enumerate_set_partitions(n: usize) -> Result<SetPartitions> {
    if n > MAX_SET_PARTITION_N {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_SET_PARTITION_N,
        });
    }
    Ok(SetPartitions::new(n))
}

/// Row `S(n, 0..=n)` of Stirling numbers of the second kind.
pub fn stirling2_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 1..=n {
        let mut next = vec![BigUint::zero(); i + 1];
        for m in 1..=i {
            let mut v = if m < i {
                &row[m] * BigUint::from(m)
            } else {
                BigUint::zero()
            };
            v += &row[m - 1];
            next[m] = v;
        }
        row = next;
    }
    row
}

/// Stirling number of the second kind `S(n, m)`; zero when `m > n`.
pub fn stirling2(n: usize, m: usize) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    stirling2_row(n).swap_remove(m)
}

/// Bell number `B_n`.
pub fn bell(n: usize) -> BigUint {
    stirling2_row(n).into_iter().sum()
}

/// Number of perfect matchings of `n` points, `(n - 1)!!` for even `n`.
pub fn pair_partition_count(n: usize) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    (1..n).step_by(2).map(BigUint::from).product()
}

/// Role of a vertex in a vacuum diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexRole {
    Constant,
    Emission,
    Absorption,
    Scattering,
}

/// A vacuum Goldstone diagram: `n` time-ordered vertices and the contraction
/// edges between them. Edges are kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoldstoneDiagram {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GoldstoneDiagram {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut incoming = vec![false; n + 1];
        let mut outgoing = vec![false; n + 1];
        for &(i, j) in &edges {
            if i > n || j == 0 {
                return Err(Error::InvalidDiagram(format!(
                    "edge ({i},{j}) outside 1..={n}"
                )));
            }
            if i <= j {
                return Err(Error::InvalidDiagram(format!(
                    "edge ({i},{j}) must run from an earlier to a later vertex (i > j)"
                )));
            }
            if std::mem::replace(&mut incoming[i], true) {
                return Err(Error::InvalidDiagram(format!(
                    "vertex {i} has two annihilator legs"
                )));
            }
            if std::mem::replace(&mut outgoing[j], true) {
                return Err(Error::InvalidDiagram(format!(
                    "vertex {j} has two creator legs"
                )));
            }
        }
        edges.sort_unstable();
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn roles(&self) -> Vec<VertexRole> {
        let mut incoming = vec![false; self.n + 1];
        let mut outgoing = vec![false; self.n + 1];
        for &(i, j) in &self.edges {
            incoming[i] = true;
            outgoing[j] = true;
        }
        (1..=self.n)
            .map(|v| match (outgoing[v], incoming[v]) {
                (false, false) => VertexRole::Constant,
                (true, false) => VertexRole::Emission,
                (false, true) => VertexRole::Absorption,
                (true, true) => VertexRole::Scattering,
            })
            .collect()
    }

    /// Connected components as a set partition.
    pub fn blocks(&self) -> SetPartition {
        let mut next = vec![0usize; self.n + 1];
        let mut has_prev = vec![false; self.n + 1];
        for &(i, j) in &self.edges {
            next[j] = i;
            has_prev[i] = true;
        }
        let mut blocks = Vec::new();
        for start in 1..=self.n {
            if has_prev[start] {
                continue;
            }
            let mut block = vec![start];
            let mut v = start;
            while next[v] != 0 {
                v = next[v];
                block.push(v);
            }
            blocks.push(block);
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        SetPartition {
            n: self.n,
            blocks,
        }
    }

    /// Compact form `n;edges=(i,j),(k,l)`.
    pub fn compact(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GoldstoneDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};edges=", self.n)?;
        for (k, (i, j)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({i},{j})")?;
        }
        Ok(())
    }
}

impl FromStr for GoldstoneDiagram {
    type Err = Error;

    /// Accepts `n;(i,j),(k,l)` as well as the canonical `n;edges=(i,j),...`.
    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::DiagramParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (head, tail) = s.split_once(';').ok_or_else(|| fail("missing `;`"))?;
        let n: usize = head
            .trim()
            .parse()
            .map_err(|_| fail("vertex count is not a non-negative integer"))?;
        if n > MAX_PARSED_VERTICES {
            return Err(fail(&format!("more than {MAX_PARSED_VERTICES} vertices")));
        }
        let tail = tail.trim();
        let tail = tail.strip_prefix("edges=").unwrap_or(tail).trim();
        let mut edges = Vec::new();
        let mut rest = tail;
        while !rest.is_empty() {
            let inner = rest
                .strip_prefix('(')
                .ok_or_else(|| fail("expected `(`"))?;
            let close = inner.find(')').ok_or_else(|| fail("missing `)`"))?;
            let (a, b) = inner[..close]
                .split_once(',')
                .ok_or_else(|| fail("edge needs two indices"))?;
            let i = a.trim().parse().map_err(|_| fail("bad edge index"))?;
            let j = b.trim().parse().map_err(|_| fail("bad edge index"))?;
            edges.push((i, j));
            rest = inner[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(fail("trailing `,`"));
                }
            } else if !rest.is_empty() {
                return Err(fail("expected `,` between edges"));
            }
        }
        GoldstoneDiagram::new(n, edges).map_err(|e| fail(&e.to_string()))
    }
}

/// Chain diagram of a partition: consecutive elements of each sorted block
/// are contracted.
pub fn diagram_from_partition(p: &SetPartition) -> GoldstoneDiagram {
    let mut edges: Vec<(usize, usize)> = p
        .blocks
        .iter()
        .flat_map(|b| b.windows(2).map(|w| (w[1], w[0])))
        .collect();
    edges.sort_unstable();
    GoldstoneDiagram { n: p.n, edges }
}

/// Streams all perfect matchings of `n` vertices as pair diagrams. Odd `n`
/// gives an empty stream; `n = 0` gives the empty diagram.
#[derive(Debug, Clone)]
pub struct PairPartitions {
    n: usize,
    // choices[k] selects the partner of the k-th lowest unmatched vertex
    choices: Vec<usize>,
    done: bool,
}

impl PairPartitions {
    fn radix(&self, k: usize) -> usize {
        self.n - 2 * k - 1
    }

    fn build(&self) -> GoldstoneDiagram {
        let mut free: Vec<usize> = (1..=self.n).collect();
        let mut edges = Vec::with_capacity(self.n / 2);
        for &c in &self.choices {
            let first = free.remove(0);
            let partner = free.remove(c);
            edges.push((partner, first));
        }
        edges.sort_unstable();
        GoldstoneDiagram { n: self.n, edges }
    }
}

impl Iterator for PairPartitions {
    type Item = GoldstoneDiagram;

    fn next(&mut self) -> Option<GoldstoneDiagram> {
        if self.done {
            return None;
        }
        let current = self.build();
        self.done = true;
        for k in (0..self.choices.len()).rev() {
            if self.choices[k] + 1 < self.radix(k) {
                self.choices[k] += 1;
                for c in &mut self.choices[k + 1..] {
                    *c = 0;
                }
                self.done = false;
                break;
            }
        }
        Some(current)
    }
}

pub fn enumerate_pair_partitions(n: usize) -> Result<PairPartitions> {
    if n > MAX_PAIR_PARTITION_N {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_PAIR_PARTITION_N,
        });
    }
    Ok(PairPartitions {
        n,
        choices: vec![0; n / 2],
        done: n % 2 == 1,
    })
}

/// True when every contraction joins time-adjacent vertices.
pub fn is_time_consecutive(d: &GoldstoneDiagram) -> bool {
    d.edges.iter().all(|&(i, j)| i == j + 1)
}

/// A relabelling of vertices: vertex `v` moves to position `sigma[v - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdmissiblePermutation {
    sigma: Vec<usize>,
}

impl AdmissiblePermutation {
    pub fn as_slice(&self) -> &[usize] {
        &self.sigma
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(k, &s)| s == k + 1)
    }

    pub fn apply(&self, d: &GoldstoneDiagram) -> Result<GoldstoneDiagram> {
        if d.n != self.sigma.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sigma.len(),
                found: d.n,
            });
        }
        let edges = d
            .edges
            .iter()
            .map(|&(i, j)| (self.sigma[i - 1], self.sigma[j - 1]))
            .collect();
        GoldstoneDiagram::new(d.n, edges)
    }
}

/// The block-sorted diagram for a profile: blocks laid out on consecutive
/// positions in ascending size, singletons first.
pub fn canonical_diagram(profile: &[usize]) -> GoldstoneDiagram {
    let mut sizes = profile.to_vec();
    sizes.sort_unstable();
    let mut edges = Vec::new();
    let mut pos = 1;
    for s in sizes {
        for k in 1..s {
            edges.push((pos + k, pos + k - 1));
        }
        pos += s;
    }
    edges.sort_unstable();
    GoldstoneDiagram { n: pos - 1, edges }
}

/// The permutation carrying `d` onto its block-sorted canonical layout. Blocks
/// of equal size keep the order of their first (emission) vertices, and each
/// block keeps its internal time order.
pub fn admissible_reorder(d: &GoldstoneDiagram) -> AdmissiblePermutation {
    let mut blocks = d.blocks().blocks;
    blocks.sort_by_key(|b| (b.len(), b[0]));
    let mut sigma = vec![0; d.n];
    let mut pos = 1;
    for block in &blocks {
        for &v in block {
            sigma[v - 1] = pos;
            pos += 1;
        }
    }
    AdmissiblePermutation { sigma }
}

/// Output format for [`render_diagram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Svg,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "svg" => Ok(Self::Svg),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Assigns each edge a drawing height so that arcs sharing a level never
/// overlap except at a shared endpoint. Shorter arcs go lower.
fn arc_levels(d: &GoldstoneDiagram) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.edges.len()).collect();
    order.sort_by_key(|&k| {
        let (i, j) = d.edges[k];
        (i - j, std::cmp::Reverse(i))
    });
    let mut levels = vec![0; d.edges.len()];
    for &k in &order {
        let (i, j) = d.edges[k];
        let mut level = 1;
        loop {
            let clash = order.iter().any(|&o| {
                let (oi, oj) = d.edges[o];
                levels[o] == level && oj < i && j < oi
            });
            if !clash {
                break;
            }
            level += 1;
        }
        levels[k] = level;
    }
    levels
}

fn render_text(d: &GoldstoneDiagram) -> String {
    let n = d.n;
    let width = 4 * n + 1;
    let col = |v: usize| 4 * (n - v) + 2;
    let levels = arc_levels(d);
    let height = levels.iter().copied().max().unwrap_or(0);
    let mut grid = vec![vec![' '; width]; height + 1];

    fn put(grid: &mut [Vec<char>], r: usize, c: usize, ch: char) {
        let cell = &mut grid[r][c];
        *cell = match (*cell, ch) {
            (' ', x) => x,
            (a, b) if a == b => a,
            _ => '+',
        };
    }

    for (&(i, j), &level) in d.edges.iter().zip(&levels) {
        let row = height - level;
        let (l, r) = (col(i), col(j));
        put(&mut grid, row, l, '+');
        put(&mut grid, row, r, '+');
        for c in l + 1..r {
            put(&mut grid, row, c, '-');
        }
        for rr in row + 1..height {
            put(&mut grid, rr, l, '|');
            put(&mut grid, rr, r, '|');
        }
    }
    for c in 0..width {
        grid[height][c] = if c % 2 == 0 { '-' } else { ' ' };
    }
    for v in 1..=n {
        grid[height][col(v)] = 'o';
    }
    let mut out = String::new();
    for row in grid {
        let line: String = row.into_iter().collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn render_svg(d: &GoldstoneDiagram) -> String {
    const STEP: usize = 40;
    const MARGIN: usize = 20;
    const RISE: usize = 18;
    let n = d.n;
    let levels = arc_levels(d);
    let height_levels = levels.iter().copied().max().unwrap_or(0);
    let width = STEP * n.max(1) + 2 * MARGIN;
    let base = MARGIN + RISE * height_levels + 10;
    let height = base + 30;
    let x = |v: usize| MARGIN + STEP / 2 + STEP * (n - v);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{base}\" x2=\"{}\" y2=\"{base}\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n",
        MARGIN / 2,
        width - MARGIN / 2
    ));
    for (&(i, j), &level) in d.edges.iter().zip(&levels) {
        let (x1, x2) = (x(i), x(j));
        let rx = (x2 - x1) / 2;
        let ry = RISE * level;
        out.push_str(&format!(
            "  <path d=\"M {x1} {base} A {rx} {ry} 0 0 1 {x2} {base}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n"
        ));
    }
    for v in 1..=n {
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{base}\" r=\"4\" fill=\"black\"/>\n",
            x(v)
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{v}</text>\n",
            x(v),
            base + 18
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Draws a diagram with the earliest vertex on the right and arcs above a
/// dashed time line.
pub fn render_diagram(d: &GoldstoneDiagram, format: &str) -> Result<String> {
    Ok(match format.parse::<RenderFormat>()? {
        RenderFormat::Text => render_text(d),
        RenderFormat::Svg => render_svg(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Independent count: assign each of `n` items to one of `n` labels and
    /// keep assignments whose labels appear in first-use order.
    fn brute_force_partition_count(n: usize, blocks: Option<usize>) -> usize {
        let mut count = 0;
        let total = n.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let labels: Vec<usize> = (0..n)
                .map(|_| {
                    let l = c % n;
                    c /= n;
                    l
                })
                .collect();
            let mut max_seen = None::<usize>;
            let ok = labels.iter().all(|&l| {
                let good = match max_seen {
                    None => l == 0,
                    Some(m) => l <= m + 1,
                };
                max_seen = Some(max_seen.map_or(l, |m| m.max(l)));
                good
            });
            let used = max_seen.map_or(0, |m| m + 1);
            if ok && blocks.is_none_or(|b| b == used) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn singleton_partition() {
        let all: Vec<_> = enumerate_set_partitions(1).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].blocks(), &[vec![1]]);
    }

    #[test]
    fn four_items_match_brute_force() {
        let oracle = brute_force_partition_count(4, None);
        assert_eq!(oracle, 15);
        assert_eq!(enumerate_set_partitions(4).unwrap().count(), oracle);
        assert_eq!(bell(4), BigUint::from(15u32));
        let s42 = brute_force_partition_count(4, Some(2));
        assert_eq!(s42, 7);
        assert_eq!(stirling2(4, 2), BigUint::from(7u32));
    }

    #[test]
    fn seven_vertices() {
        assert_eq!(enumerate_set_partitions(7).unwrap().count(), 877);
        assert_eq!(bell(7), BigUint::from(877u32));
        assert_eq!(stirling2(7, 3), BigUint::from(301u32));
        let row: Vec<u32> = stirling2_row(7)[1..]
            .iter()
            .map(|b| b.try_into().unwrap())
            .collect();
        assert_eq!(row, vec![1, 63, 301, 350, 140, 21, 1]);
    }

    #[test]
    fn stirling_edges() {
        assert_eq!(bell(0), BigUint::one());
        for n in 0..12 {
            assert_eq!(stirling2(n, n), BigUint::one());
        }
        assert_eq!(stirling2(3, 5), BigUint::zero());
        assert_eq!(stirling2(5, 0), BigUint::zero());
        // B_20 still fits in u64; B_30 does not
        assert_eq!(bell(20), BigUint::from(51_724_158_235_372u64));
        assert!(bell(30) > BigUint::from(u64::MAX) / BigUint::from(1_000_000u32));
    }

    #[test]
    fn enumeration_is_bounded() {
        assert!(matches!(
            enumerate_set_partitions(15),
            Err(Error::EnumerationBound { n: 15, .. })
        ));
        assert!(enumerate_pair_partitions(18).is_err());
    }

    #[test]
    fn partitions_are_distinct_and_canonical() {
        let all: Vec<_> = enumerate_set_partitions(6).unwrap().collect();
        let unique: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
        for p in &all {
            let rebuilt = SetPartition::from_blocks(6, p.blocks().to_vec()).unwrap();
            assert_eq!(&rebuilt, p);
        }
    }

    #[test]
    fn from_blocks_rejects_bad_input() {
        assert!(SetPartition::from_blocks(3, vec![vec![1, 2]]).is_err());
        assert!(SetPartition::from_blocks(3, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(SetPartition::from_blocks(2, vec![vec![1], vec![]]).is_err());
        assert!(SetPartition::from_blocks(2, vec![vec![1, 4]]).is_err());
    }

    #[test]
    fn pair_partition_counts() {
        assert_eq!(enumerate_pair_partitions(2).unwrap().count(), 1);
        assert_eq!(enumerate_pair_partitions(4).unwrap().count(), 3);
        assert_eq!(enumerate_pair_partitions(3).unwrap().count(), 0);
        assert_eq!(enumerate_pair_partitions(0).unwrap().count(), 1);
        // brute force over all set partitions of 6 with blocks of size two
        let oracle = enumerate_set_partitions(6)
            .unwrap()
            .filter(|p| p.blocks().iter().all(|b| b.len() == 2))
            .count();
        assert_eq!(oracle, 15);
        let pairs: HashSet<_> = enumerate_pair_partitions(6).unwrap().collect();
        assert_eq!(pairs.len(), 15);
        assert_eq!(pair_partition_count(6), BigUint::from(15u32));
    }

    #[test]
    fn fourth_moment_diagrams() {
        let found: HashSet<String> = enumerate_pair_partitions(4)
            .unwrap()
            .map(|d| d.compact())
            .collect();
        let expected: HashSet<String> = ["4;edges=(2,1),(4,3)", "4;edges=(3,2),(4,1)", "4;edges=(3,1),(4,2)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(found, expected);
    }

    #[test]
    fn chain_from_partition() {
        let single = SetPartition::from_blocks(1, vec![vec![1]]).unwrap();
        let d = diagram_from_partition(&single);
        assert!(d.edges().is_empty());
        assert_eq!(d.roles(), vec![VertexRole::Constant]);

        let p = SetPartition::from_blocks(4, vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(diagram_from_partition(&p).edges(), &[(2, 1), (4, 3)]);
    }

    #[test]
    fn seventh_moment_example_diagram() {
        // times t7,t6,t5,t3 | t4,t1 | t2 become indices 1,2,3,5 | 4,7 | 6
        let p = SetPartition::from_blocks(7, vec![vec![3, 5, 6, 7], vec![1, 4], vec![2]])
            .unwrap();
        let d = diagram_from_partition(&p);
        assert_eq!(d.edges(), &[(4, 1), (5, 3), (6, 5), (7, 6)]);
        let roles = d.roles();
        let count = |r| roles.iter().filter(|&&x| x == r).count();
        assert_eq!(count(VertexRole::Emission), 2);
        assert_eq!(count(VertexRole::Absorption), 2);
        assert_eq!(count(VertexRole::Scattering), 2);
        assert_eq!(count(VertexRole::Constant), 1);
        assert!(!is_time_consecutive(&d));
    }

    #[test]
    fn time_consecutive_examples() {
        let a: GoldstoneDiagram = "4;(2,1),(4,3)".parse().unwrap();
        let b: GoldstoneDiagram = "4;(4,1),(3,2)".parse().unwrap();
        assert!(is_time_consecutive(&a));
        assert!(!is_time_consecutive(&b));
    }

    #[test]
    fn blocks_roundtrip_and_interval_criterion() {
        for n in 0..=8 {
            for p in enumerate_set_partitions(n).unwrap() {
                let d = diagram_from_partition(&p);
                assert_eq!(d.blocks(), p);
                assert_eq!(is_time_consecutive(&d), p.has_interval_blocks());
                for (role, v) in d.roles().iter().zip(1..) {
                    let block = p.blocks().iter().find(|b| b.contains(&v)).unwrap();
                    let expected = match (block.len(), block[0] == v, *block.last().unwrap() == v) {
                        (1, _, _) => VertexRole::Constant,
                        (_, true, _) => VertexRole::Emission,
                        (_, _, true) => VertexRole::Absorption,
                        _ => VertexRole::Scattering,
                    };
                    assert_eq!(*role, expected);
                }
            }
        }
    }

    #[test]
    fn diagram_validation() {
        assert!(GoldstoneDiagram::new(3, vec![(1, 2)]).is_err());
        assert!(GoldstoneDiagram::new(3, vec![(3, 1), (2, 1)]).is_err());
        assert!(GoldstoneDiagram::new(3, vec![(3, 1), (3, 2)]).is_err());
        assert!(GoldstoneDiagram::new(3, vec![(4, 1)]).is_err());
        assert!(GoldstoneDiagram::new(3, vec![(3, 2), (2, 1)]).is_ok());
    }

    #[test]
    fn compact_form_parsing() {
        let d: GoldstoneDiagram = "4;(4,1),(3,2)".parse().unwrap();
        assert_eq!(d.compact(), "4;edges=(3,2),(4,1)");
        let again: GoldstoneDiagram = d.compact().parse().unwrap();
        assert_eq!(again, d);
        let empty: GoldstoneDiagram = "3;".parse().unwrap();
        assert_eq!(empty.compact(), "3;edges=");
        for bad in ["", "4", "x;(2,1)", "4;(2,1", "4;(2,1),", "4;(1,2)", "4;(2,1)(4,3)", "2;(3,1)", "99999999999;"] {
            assert!(bad.parse::<GoldstoneDiagram>().is_err(), "{bad}");
        }
    }

    #[test]
    fn reorder_identity_on_canonical() {
        let d = canonical_diagram(&[1, 2, 2, 3]);
        assert!(admissible_reorder(&d).is_identity());
    }

    #[test]
    fn reorder_interleaved_pairs() {
        let d: GoldstoneDiagram = "4;(3,1),(4,2)".parse().unwrap();
        let sigma = admissible_reorder(&d);
        assert_eq!(sigma.as_slice(), &[1, 3, 2, 4]);
        assert_eq!(sigma.apply(&d).unwrap().edges(), &[(2, 1), (4, 3)]);
    }

    #[test]
    fn reorder_is_injective_per_profile() {
        use std::collections::HashMap;
        for n in 1..=8 {
            let mut seen: HashMap<Vec<usize>, HashSet<Vec<usize>>> = HashMap::new();
            let mut count = 0;
            for p in enumerate_set_partitions(n).unwrap() {
                let d = diagram_from_partition(&p);
                let sigma = admissible_reorder(&d);
                let image = sigma.apply(&d).unwrap();
                assert_eq!(image, canonical_diagram(&p.profile()));
                let fresh = seen
                    .entry(p.profile())
                    .or_default()
                    .insert(sigma.as_slice().to_vec());
                assert!(fresh, "two diagrams share a permutation at n = {n}");
                count += 1;
            }
            assert_eq!(BigUint::from(count as u64), bell(n));
        }
    }

    #[test]
    fn render_single_vertex() {
        let d = GoldstoneDiagram::new(1, vec![]).unwrap();
        assert_eq!(render_diagram(&d, "text").unwrap(), "- o -\n");
    }

    #[test]
    fn render_nested_golden() {
        let d: GoldstoneDiagram = "4;(4,1),(3,2)".parse().unwrap();
        let expected = concat!(
            "  +-----------+\n",
            "  |   +---+   |\n",
            "- o - o - o - o -\n",
        );
        assert_eq!(render_diagram(&d, "text").unwrap(), expected);
    }

    #[test]
    fn render_rejects_unknown_format() {
        let d = GoldstoneDiagram::new(1, vec![]).unwrap();
        assert_eq!(
            render_diagram(&d, "png"),
            Err(Error::UnsupportedFormat("png".into()))
        );
    }

    #[test]
    fn render_svg_is_well_formed() {
        for s in ["1;", "4;(4,1),(3,2)", "7;(4,1),(5,3),(6,5),(7,6)", "4;(3,1),(4,2)"] {
            let d: GoldstoneDiagram = s.parse().unwrap();
            let svg = render_diagram(&d, "svg").unwrap();
            let doc = roxmltree::Document::parse(&svg).expect("valid XML");
            let root = doc.root_element();
            assert_eq!(root.tag_name().name(), "svg");
            let circles = root.children().filter(|c| c.has_tag_name("circle")).count();
            let paths = root.children().filter(|c| c.has_tag_name("path")).count();
            assert_eq!(circles, d.n());
            assert_eq!(paths, d.edges().len());
        }
    }
}
