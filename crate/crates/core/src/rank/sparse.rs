//! Sparse Gaussian elimination with minimum-degree (Markowitz-style) pivoting.
//!
//! The matrix is first split into the connected components of its row/column
//! incidence graph; each block is eliminated independently. Inside a block the
//! pivot column is the one with the fewest remaining nonzeros and the pivot
//! row is the shortest row in that column, ties broken by lowest index.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::modular::ModArith;

pub(crate) type Row<V> = Vec<(u32, V)>;

pub(crate) trait Eliminator: Sync {
    type V: Clone + Send + Sync;
    type Pivot;

    fn prepare(&self, pivot: &Row<Self::V>, col: u32) -> Self::Pivot;

    /// Returns `target` with its `col` entry cancelled against `pivot`,
    /// zeros dropped, still sorted by column.
    fn eliminate(
        &self,
        target: &Row<Self::V>,
        pivot: &Row<Self::V>,
        prep: &Self::Pivot,
        col: u32,
    ) -> Row<Self::V>;
}

fn coefficient<V>(row: &Row<V>, col: u32) -> &V {
    let at = row.binary_search_by_key(&col, |e| e.0).expect("column present in row");
    &row[at].1
}

/// Merges `lhs(x) ⊕ rhs(y)` over the union of supports, dropping zeros.
fn merge<V, W>(
    a: &Row<V>,
    b: &Row<V>,
    only_a: impl Fn(&V) -> W,
    only_b: impl Fn(&V) -> W,
    both: impl Fn(&V, &V) -> W,
    is_zero: impl Fn(&W) -> bool,
) -> Row<W> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (col, v) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            i += 1;
            (a[i - 1].0, only_a(&a[i - 1].1))
        } else if i == a.len() || b[j].0 < a[i].0 {
            j += 1;
            (b[j - 1].0, only_b(&b[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (a[i - 1].0, both(&a[i - 1].1, &b[j - 1].1))
        };
        if !is_zero(&v) {
            out.push((col, v));
        }
    }
    out
}

pub(crate) struct ModPEliminator<'a, A: ModArith>(pub(crate) &'a A);

impl<A: ModArith> Eliminator for ModPEliminator<'_, A> {
    type V = u64;
    type Pivot = u64;

    fn prepare(&self, pivot: &Row<u64>, col: u32) -> u64 {
        self.0.inv(*coefficient(pivot, col))
    }

    fn eliminate(&self, target: &Row<u64>, pivot: &Row<u64>, inv: &u64, col: u32) -> Row<u64> {
        let arith = self.0;
        let f = arith.mul(*coefficient(target, col), *inv);
        merge(
            target,
            pivot,
            |&x| x,
            |&y| arith.sub(0, arith.mul(f, y)),
            |&x, &y| arith.sub(x, arith.mul(f, y)),
            |v| *v == 0,
        )
    }
}

/// Fraction-free elimination over the integers: `row <- (piv/g)·row - (a/g)·pivot`
/// followed by division by the row content.
pub(crate) struct IntegerEliminator;

impl Eliminator for IntegerEliminator {
    type V = BigInt;
    type Pivot = BigInt;

    fn prepare(&self, pivot: &Row<BigInt>, col: u32) -> BigInt {
        coefficient(pivot, col).clone()
    }

    fn eliminate(&self, target: &Row<BigInt>, pivot: &Row<BigInt>, piv: &BigInt, col: u32) -> Row<BigInt> {
        let a = coefficient(target, col);
        let g = a.gcd(piv);
        let (fa, fb) = (piv / &g, a / &g);
        let mut out = if fa.is_one() {
            merge(target, pivot, |x| x.clone(), |y| -(&fb * y), |x, y| x - &fb * y, BigInt::is_zero)
        } else {
            merge(target, pivot, |x| &fa * x, |y| -(&fb * y), |x, y| &fa * x - &fb * y, BigInt::is_zero)
        };
        let mut content = BigInt::zero();
        for (_, v) in &out {
            content = content.gcd(v);
            if content.is_one() {
                return out;
            }
        }
        if !content.is_zero() {
            for (_, v) in &mut out {
                *v /= &content;
            }
        }
        out
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let parent = self.0[x as usize];
            self.0[x as usize] = self.0[parent as usize];
            x = parent;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Splits rows into blocks with disjoint column supports. Blocks come out in
/// order of their lowest column; columns are renumbered locally preserving order.
pub(crate) fn split_components<V>(cols: usize, rows: Vec<Row<V>>) -> Vec<(usize, Vec<Row<V>>)> {
    let mut uf = UnionFind((0..cols as u32).collect());
    for row in &rows {
        if let Some(&(first, _)) = row.first() {
            for &(c, _) in &row[1..] {
                uf.union(first, c);
            }
        }
    }
    let mut block_of_root = vec![u32::MAX; cols];
    let mut local_col = vec![0u32; cols];
    let mut block_cols: Vec<u32> = Vec::new();
    let mut used = vec![false; cols];
    for row in &rows {
        for &(c, _) in row {
            used[c as usize] = true;
        }
    }
    for c in 0..cols {
        if !used[c] {
            continue;
        }
        let root = uf.find(c as u32) as usize;
        if block_of_root[root] == u32::MAX {
            block_of_root[root] = block_cols.len() as u32;
            block_cols.push(0);
        }
        let b = block_of_root[root] as usize;
        local_col[c] = block_cols[b];
        block_cols[b] += 1;
    }
    let mut blocks: Vec<(usize, Vec<Row<V>>)> =
        block_cols.iter().map(|&n| (n as usize, Vec::new())).collect();
    for row in rows {
        let Some(&(first, _)) = row.first() else {
            continue;
        };
        let b = block_of_root[uf.find(first) as usize] as usize;
        let local = row.into_iter().map(|(c, v)| (local_col[c as usize], v)).collect();
        blocks[b].1.push(local);
    }
    blocks
}

pub(crate) fn sparse_rank<E: Eliminator>(elim: &E, cols: usize, rows: Vec<Row<E::V>>) -> usize {
    split_components(cols, rows).into_par_iter().map(|(ncols, rows)| eliminate_block(elim, ncols, rows)).sum()
}

fn eliminate_block<E: Eliminator>(elim: &E, ncols: usize, mut rows: Vec<Row<E::V>>) -> usize {
    let mut col_rows: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c as usize].insert(r as u32);
        }
    }
    let mut queue: BTreeSet<(usize, u32)> = col_rows
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(c, s)| (s.len(), c as u32))
        .collect();

    fn update(
        queue: &mut BTreeSet<(usize, u32)>,
        col_rows: &mut [BTreeSet<u32>],
        col: u32,
        row: u32,
        insert: bool,
    ) {
        let set = &mut col_rows[col as usize];
        queue.remove(&(set.len(), col));
        if insert {
            set.insert(row);
        } else {
            set.remove(&row);
        }
        if !set.is_empty() {
            queue.insert((set.len(), col));
        }
    }

    let mut rank = 0;
    while let Some((_, col)) = queue.pop_first() {
        let in_col: Vec<u32> = std::mem::take(&mut col_rows[col as usize]).into_iter().collect();
        let pivot_idx = *in_col
            .iter()
            .min_by_key(|&&r| (rows[r as usize].len(), r))
            .expect("queued columns are nonempty");
        let pivot = std::mem::take(&mut rows[pivot_idx as usize]);
        for &(c, _) in &pivot {
            if c != col {
                update(&mut queue, &mut col_rows, c, pivot_idx, false);
            }
        }
        let prep = elim.prepare(&pivot, col);
        for &r in in_col.iter().filter(|&&r| r != pivot_idx) {
            let old = std::mem::take(&mut rows[r as usize]);
            let new = elim.eliminate(&old, &pivot, &prep, col);
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < new.len() {
                let (c, insert) = if j == new.len() || (i < old.len() && old[i].0 < new[j].0) {
                    i += 1;
                    (old[i - 1].0, Some(false))
                } else if i == old.len() || new[j].0 < old[i].0 {
                    j += 1;
                    (new[j - 1].0, Some(true))
                } else {
                    i += 1;
                    j += 1;
                    (old[i - 1].0, None)
                };
                if let (Some(insert), true) = (insert, c != col) {
                    update(&mut queue, &mut col_rows, c, r, insert);
                }
            }
            rows[r as usize] = new;
        }
        rank += 1;
    }
    rank
}

/// Integer rows from a rational row: scale by the lcm of the denominators.
pub(crate) fn integer_row(row: Vec<(u32, &crate::scalars::Rational)>) -> Row<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denominator()));
    row.into_iter().map(|(c, v)| (c, v.numerator() * (&lcm / v.denominator()))).collect()
}
