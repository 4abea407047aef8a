//! Non-crossing, interval and irreducible non-crossing set partitions, their
//! nesting structure, and direct partition sums for the moment-cumulant
//! formulas. These evaluators share no code with the shuffle engine.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::functionals::{CumulantTable, MomentTable, WordTable};
use crate::words::{complement_components, compositions, subword, Word};
use crate::{Error, Result, Scalar};

/// Largest order accepted by the enumerators.
pub const MAX_ORDER: usize = 14;

/// A set partition of `[n]` with increasing blocks sorted by minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates that `blocks` partition `[n]` and canonicalizes them.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i == 0 || i > n || std::mem::replace(&mut seen[i - 1], true) {
                    return Err(Error::InvalidPartition(format!("position {i} in a partition of [{n}]")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("position {} is not covered", i + 1)));
        }
        blocks.sort_unstable();
        Ok(SetPartition { blocks })
    }

    fn from_canonical(mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.sort_unstable();
        SetPartition { blocks }
    }

    pub fn order(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// No `i < j < l < m` with `i, l` in one block and `j, m` in another.
    pub fn is_noncrossing(&self) -> bool {
        let mut owner = vec![0; self.order() + 1];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                owner[i] = b;
            }
        }
        // Between two consecutive elements of a block, every other block is
        // either entirely inside or entirely outside.
        for (b, block) in self.blocks.iter().enumerate() {
            for pair in block.windows(2) {
                for &inside in &owner[pair[0] + 1..pair[1]] {
                    if inside != b {
                        let other = &self.blocks[inside];
                        if other[0] < pair[0] || *other.last().unwrap() > pair[1] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Every block is an interval.
    pub fn is_interval(&self) -> bool {
        self.blocks.iter().all(|b| b.last().unwrap() - b[0] + 1 == b.len())
    }

    /// `1` and `n` lie in the same block.
    pub fn is_irreducible(&self) -> bool {
        self.blocks.first().is_some_and(|b| *b.last().unwrap() == self.order())
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(&self.blocks).expect("partitions serialize"))
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::PartitionOrder(n));
    }
    Ok(())
}

/// Non-crossing partitions of the interval `[lo, hi)`.
fn nc_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let rest = hi - lo - 1;
    let mut out = Vec::new();
    for mask in 0u32..1 << rest {
        let mut block = vec![lo];
        block.extend((0..rest).filter(|k| mask >> k & 1 == 1).map(|k| lo + 1 + k));
        // gaps between consecutive block elements, then the tail
        let mut gaps: Vec<(usize, usize)> = block.windows(2).map(|p| (p[0] + 1, p[1])).collect();
        gaps.push((block.last().unwrap() + 1, hi));
        let mut partial = vec![vec![block]];
        for (a, b) in gaps {
            if a >= b {
                continue;
            }
            let fill = nc_interval(a, b);
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    fill.iter().map(move |g| {
                        let mut q = p.clone();
                        q.extend(g.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// All of `NC_n`, generated by the block containing `1`.
pub fn enumerate_nc(n: usize) -> Result<Vec<SetPartition>> {
    check_order(n)?;
    let mut all: Vec<_> = nc_interval(1, n + 1).into_iter().map(SetPartition::from_canonical).collect();
    all.sort();
    Ok(all)
}

/// All interval partitions of `[n]`.
pub fn enumerate_boolean(n: usize) -> Result<Vec<SetPartition>> {
    check_order(n)?;
    let mut all: Vec<_> = compositions(n)
        .into_iter()
        .map(|parts| {
            let mut start = 1;
            let blocks = parts
                .into_iter()
                .map(|len| {
                    let block = (start..start + len).collect();
                    start += len;
                    block
                })
                .collect();
            SetPartition::from_canonical(blocks)
        })
        .collect();
    all.sort();
    Ok(all)
}

/// `NC^irr_n`: non-crossing partitions with `1` and `n` in one block.
pub fn enumerate_nc_irreducible(n: usize) -> Result<Vec<SetPartition>> {
    Ok(enumerate_nc(n)?.into_iter().filter(SetPartition::is_irreducible).collect())
}

/// Catalan numbers by `C_{n+1} = Σ C_i C_{n−i}`.
pub fn catalan(n: usize) -> BigInt {
    let mut c = vec![BigInt::one()];
    for m in 0..n {
        let next = (0..=m).map(|i| &c[i] * &c[m - i]).sum();
        c.push(next);
    }
    c.swap_remove(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Inner,
    Outer,
}

fn require_noncrossing(pi: &SetPartition) -> Result<()> {
    if pi.is_noncrossing() {
        Ok(())
    } else {
        Err(Error::Crossing(pi.to_string()))
    }
}

/// Block `i` strictly nests inside block `j`.
fn nests(pi: &SetPartition, i: usize, j: usize) -> bool {
    let (bi, bj) = (&pi.blocks[i], &pi.blocks[j]);
    bj[0] < bi[0] && bi.last() < bj.last()
}

/// Inner or outer, per block in canonical order.
pub fn classify_blocks(pi: &SetPartition) -> Result<Vec<BlockKind>> {
    require_noncrossing(pi)?;
    Ok((0..pi.len())
        .map(|i| if (0..pi.len()).any(|j| nests(pi, i, j)) { BlockKind::Inner } else { BlockKind::Outer })
        .collect())
}

/// The forest `τ(π)`: each block's parent is the innermost block nesting it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestingForest {
    parent: Vec<Option<usize>>,
}

impl NestingForest {
    pub fn parent(&self, block: usize) -> Option<usize> {
        self.parent[block]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&i| self.parent[i].is_none()).collect()
    }

    pub fn children(&self, block: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&i| self.parent[i] == Some(block)).collect()
    }

    /// Number of blocks in the subtree below each block, itself included.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![1; self.parent.len()];
        for i in 0..self.parent.len() {
            let mut up = self.parent[i];
            while let Some(p) = up {
                sizes[p] += 1;
                up = self.parent[p];
            }
        }
        sizes
    }
}

pub fn nesting_forest(pi: &SetPartition) -> Result<NestingForest> {
    require_noncrossing(pi)?;
    let span = |j: usize| pi.blocks[j].last().unwrap() - pi.blocks[j][0];
    let parent = (0..pi.len()).map(|i| (0..pi.len()).filter(|&j| nests(pi, i, j)).min_by_key(|&j| span(j))).collect();
    Ok(NestingForest { parent })
}

/// `τ(π)!`, the product of subtree sizes of the nesting forest.
pub fn tree_factorial(pi: &SetPartition) -> Result<BigInt> {
    Ok(nesting_forest(pi)?.subtree_sizes().into_iter().map(BigInt::from).product())
}

fn block_value(table: &WordTable, w: &Word, block: &[usize]) -> Result<Scalar> {
    let sub = subword(w, block)?.expect("blocks are nonempty");
    table.get(&sub).cloned()
}

fn product_over<'a>(
    w: &Word,
    pi: &'a SetPartition,
    mut table_for: impl FnMut(usize) -> &'a WordTable,
) -> Result<Scalar> {
    let mut acc = Scalar::one();
    for (i, block) in pi.blocks.iter().enumerate() {
        acc *= block_value(table_for(i), w, block)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// `Σ_{π ∈ NC_n} Π κ(a_{π_i})`.
pub fn free_moment_sum(kappa: &CumulantTable, w: &Word) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for pi in enumerate_nc(w.len())? {
        acc += product_over(w, &pi, |_| kappa)?;
    }
    Ok(acc)
}

/// `Σ_{I ∈ B_n} Π β(a_{I_k})`.
pub fn boolean_moment_sum(beta: &CumulantTable, w: &Word) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for pi in enumerate_boolean(w.len())? {
        acc += product_over(w, &pi, |_| beta)?;
    }
    Ok(acc)
}

/// `Σ_{γ ∈ NC_n} Π ρ(a_{γ_i}) / τ(γ)!`.
pub fn monotone_moment_sum(rho: &CumulantTable, w: &Word) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for pi in enumerate_nc(w.len())? {
        let term = product_over(w, &pi, |_| rho)?;
        if !term.is_zero() {
            acc += term / Scalar::from_integer(tree_factorial(&pi)?);
        }
    }
    Ok(acc)
}

fn outer_inner_sum(
    partitions: Vec<SetPartition>,
    outer: &CumulantTable,
    inner: &CumulantTable,
    signed: bool,
    w: &Word,
) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for pi in partitions {
        let kinds = classify_blocks(&pi)?;
        let term = product_over(w, &pi, |i| match kinds[i] {
            BlockKind::Outer => outer,
            BlockKind::Inner => inner,
        })?;
        if signed && pi.len() % 2 == 0 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}

/// `Σ_{π ∈ NC_n} Π_{outer} R(a_{π_j}) Π_{inner} κ′(a_{π_i})`.
pub fn cfree_moment_sum(r: &CumulantTable, kappa_prime: &CumulantTable, w: &Word) -> Result<Scalar> {
    outer_inner_sum(enumerate_nc(w.len())?, r, kappa_prime, false, w)
}

/// `Σ_{π ∈ NC^irr_n} μ(outer block) Π_{inner} ν(a_{π_i})`, the value of
/// `Ad_ν(μ)` with `ν` the free cumulants of the conjugating state.
pub fn adjoint_sum_lower(mu: &CumulantTable, nu: &CumulantTable, w: &Word) -> Result<Scalar> {
    outer_inner_sum(enumerate_nc_irreducible(w.len())?, mu, nu, false, w)
}

/// `Σ_{π ∈ NC^irr_n} (−1)^{|π|−1} μ(outer block) Π_{inner} τ(a_{π_i})`, the
/// value of `Ad^ν(μ)` with `τ` the boolean cumulants of the conjugating state.
pub fn adjoint_sum_upper(mu: &CumulantTable, tau: &CumulantTable, w: &Word) -> Result<Scalar> {
    outer_inner_sum(enumerate_nc_irreducible(w.len())?, mu, tau, true, w)
}

/// `Σ_{S ∋ 1, n} μ(a_S) Γ(a_{J^S_{[n]}})` with `Γ` extended multiplicatively
/// over the components.
pub fn adjoint_subset_sum(mu: &CumulantTable, gamma: &MomentTable, w: &Word) -> Result<Scalar> {
    let n = w.len();
    check_order(n)?;
    let full: Vec<usize> = (1..=n).collect();
    let mut acc = Scalar::zero();
    for mask in 0u32..1 << n {
        if mask & 1 == 0 || mask >> (n - 1) & 1 == 0 {
            continue;
        }
        let s: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let head = block_value(mu, w, &s)?;
        if head.is_zero() {
            continue;
        }
        let mut term = head;
        for part in complement_components(w, &s, &full)?.factors() {
            term *= gamma.get(part)?;
        }
        acc += term;
    }
    Ok(acc)
}

/// `|B_n| = 2^{n−1}`, used by count checks.
pub fn boolean_count(n: usize) -> BigInt {
    BigInt::from(2).pow(n.saturating_sub(1) as u32)
}
