//! Exterior-power bases and the Koszul flattening
//! `T_A^∧p : B* ⊗ Λ^p A → Λ^{p+1} A ⊗ C`.
//!
//! Basis vectors of `Λ^p A` are `p`-subsets of `0..a`, ordered
//! colexicographically; a subset's position is `Σ_t C(s_t, t+1)`.
//! Wedging follows `a_i ∧ (a_{s1} ∧ … ∧ a_{sp})`, i.e. the new vector enters
//! on the left, and the sign is `(-1)^{#{s ∈ S : s < i}}`.
//!
//! Column `(j, S)` sits at index `pos(S)·b + j`, row `(k, S')` at
//! `pos(S')·c + k`.

use log::warn;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::tensor::Tensor3;

/// A strictly increasing subset of `0..ambient`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SubsetIndex {
    elements: Vec<usize>,
    ambient: usize,
}

impl SubsetIndex {
    pub fn new(elements: Vec<usize>, ambient: usize) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("{elements:?} is not strictly increasing")));
        }
        if elements.last().is_some_and(|&e| e >= ambient) {
            return Err(Error::InvalidDimension(format!("{elements:?} not inside 0..{ambient}")));
        }
        Ok(SubsetIndex { elements, ambient })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elements.binary_search(&i).is_ok()
    }

    /// Position in the colex order of `len()`-subsets.
    pub fn position(&self) -> usize {
        self.elements.iter().enumerate().map(|(t, &s)| binom(s, t + 1)).sum()
    }

    /// Inverse of [`SubsetIndex::position`].
    pub fn from_position(mut position: usize, size: usize, ambient: usize) -> Result<Self> {
        if size > ambient || position >= binom(ambient, size) {
            return Err(Error::InvalidDimension(format!(
                "no {size}-subset of 0..{ambient} at position {position}"
            )));
        }
        let mut elements = vec![0; size];
        let mut bound = ambient;
        for t in (0..size).rev() {
            // Largest s < bound with C(s, t+1) <= position.
            let mut s = bound - 1;
            while binom(s, t + 1) > position {
                s -= 1;
            }
            elements[t] = s;
            position -= binom(s, t + 1);
            bound = s;
        }
        Ok(SubsetIndex { elements, ambient })
    }
}

fn binom(n: usize, k: usize) -> usize {
    crate::repcomb::binomial(n as u64, k as u64) as usize
}

/// All `p`-subsets of `0..a` in colex order.
pub fn enumerate_subsets(a: usize, p: usize) -> Result<Vec<SubsetIndex>> {
    if p > a {
        return Err(Error::InvalidDimension(format!("p = {p} exceeds a = {a}")));
    }
    let mut out = Vec::with_capacity(binom(a, p));
    let mut current: Vec<usize> = (0..p).collect();
    loop {
        out.push(SubsetIndex { elements: current.clone(), ambient: a });
        // Bump the lowest element that has room, reset everything below it.
        let Some(t) = (0..p).find(|&t| current[t] + 1 < current.get(t + 1).copied().unwrap_or(a)) else {
            break;
        };
        current[t] += 1;
        for (u, slot) in current.iter_mut().enumerate().take(t) {
            *slot = u;
        }
    }
    Ok(out)
}

/// `a_i ∧ a_S`: `None` when `i ∈ S`, otherwise the sign and the sorted union.
pub fn wedge_insert(i: usize, s: &SubsetIndex) -> Option<(i8, SubsetIndex)> {
    match s.elements.binary_search(&i) {
        Ok(_) => None,
        Err(below) => {
            let mut elements = s.elements.clone();
            elements.insert(below, i);
            let sign = if below % 2 == 0 { 1 } else { -1 };
            Some((sign, SubsetIndex { elements, ambient: s.ambient }))
        }
    }
}

/// Colex position of `S ∪ {i}` given `i ∉ S` lands at sorted position `at`.
fn inserted_position(s: &[usize], i: usize, at: usize) -> usize {
    let mut pos = binom(i, at + 1);
    for (t, &e) in s.iter().enumerate() {
        pos += if t < at { binom(e, t + 1) } else { binom(e, t + 2) };
    }
    pos
}

/// Largest `p` outside of which the flattening is redundant: `⌈a/2⌉ - 1`.
pub fn useful_p_max(a: usize) -> usize {
    a.div_ceil(2).saturating_sub(1)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KoszulMatrix {
    pub matrix: SparseMatrix,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub p: usize,
}

impl KoszulMatrix {
    /// `p > ⌈a/2⌉ - 1`.
    pub fn outside_useful_range(&self) -> bool {
        self.p > useful_p_max(self.a)
    }

    /// Source dimension `b·C(a, p)`.
    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row_label(&self, row: usize) -> (usize, SubsetIndex) {
        let subset = SubsetIndex::from_position(row / self.c, self.p + 1, self.a).expect("row in range");
        (row % self.c, subset)
    }

    pub fn col_label(&self, col: usize) -> (usize, SubsetIndex) {
        let subset = SubsetIndex::from_position(col / self.b, self.p, self.a).expect("column in range");
        (col % self.b, subset)
    }

    /// `(k, S')` for every row, in row order.
    pub fn row_labels(&self) -> Vec<(usize, SubsetIndex)> {
        let subsets = enumerate_subsets(self.a, self.p + 1).expect("p < a");
        subsets.into_iter().flat_map(|s| (0..self.c).map(move |k| (k, s.clone()))).collect()
    }

    /// `(j, S)` for every column, in column order.
    pub fn col_labels(&self) -> Vec<(usize, SubsetIndex)> {
        let subsets = enumerate_subsets(self.a, self.p).expect("p <= a");
        subsets.into_iter().flat_map(|s| (0..self.b).map(move |j| (j, s.clone()))).collect()
    }

    /// Text dump of the labels: `row <r> <k> <s1,s2,...>` then
    /// `col <c> <j> <s1,...>`, one per line.
    pub fn labels_text(&self) -> String {
        let fmt_set =
            |s: &SubsetIndex| s.elements().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for (r, (k, s)) in self.row_labels().iter().enumerate() {
            out.push_str(&format!("row {r} {k} {}\n", fmt_set(s)));
        }
        for (c, (j, s)) in self.col_labels().iter().enumerate() {
            out.push_str(&format!("col {c} {j} {}\n", fmt_set(s)));
        }
        out
    }
}

/// Builds `T_A^∧p`. Each tensor entry `(i, j, k, v)` and each column `(j, S)`
/// with `i ∉ S` contributes `±v` at row `(k, S ∪ {i})`.
pub fn koszul_flattening(t: &Tensor3, p: usize) -> Result<KoszulMatrix> {
    let (a, b, c) = t.dims();
    if p >= a {
        return Err(Error::InvalidDimension(format!("p = {p} must be below a = {a}")));
    }
    if p > useful_p_max(a) {
        warn!("p = {p} exceeds ceil(a/2) - 1 = {} for a = {a}; flattening is redundant", useful_p_max(a));
    }
    let rows = c * binom(a, p + 1);
    let cols = b * binom(a, p);

    // Entries grouped by their B index so each column is built from its own slice.
    let mut by_j: Vec<Vec<(usize, usize, &crate::scalars::Scalar)>> = vec![Vec::new(); b];
    for (i, j, k, v) in t.entries() {
        by_j[*j].push((*i, *k, v));
    }
    let mut triplets = Vec::new();
    for (s_pos, subset) in enumerate_subsets(a, p)?.into_iter().enumerate() {
        for (j, slice) in by_j.iter().enumerate() {
            let col = s_pos * b + j;
            for &(i, k, v) in slice {
                let Err(at) = subset.elements.binary_search(&i) else {
                    continue;
                };
                let row = inserted_position(&subset.elements, i, at) * c + k;
                let value = if at % 2 == 0 { v.clone() } else { -v };
                triplets.push((row, col, value));
            }
        }
    }
    let matrix = SparseMatrix::from_triplets(rows, cols, t.field(), triplets)?;
    Ok(KoszulMatrix { matrix, a, b, c, p })
}
