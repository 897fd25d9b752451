//! Partitions, Schur module dimensions and the two kernel-dimension
//! predictions for the Koszul flattening of matrix multiplication.
//!
//! With `U` of dimension `n` and `M` of dimension `m`, the kernel of
//! `(M<m,n,l>)_A^∧p` is predicted in two independent ways:
//!
//! * [`kernel_dim_pieri`]: sum of `dim S_{π'}M · dim S_{π+(1)}U` over the
//!   modules of [`kernel_modules`], times `l`;
//! * [`kernel_dim_formula`]: the alternating binomial sum obtained from the
//!   Euler characteristic of the resolving complex, times `l`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Trailing zeros are dropped; otherwise parts must be weakly decreasing.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::Parse(format!("{parts:?} is not a partition")));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.0.len()
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Largest part (zero for the empty partition).
    pub fn width(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    /// Adds one box to the first row.
    pub fn add_to_first_row(&self) -> Partition {
        let mut parts = self.0.clone();
        match parts.first_mut() {
            Some(first) => *first += 1,
            None => parts.push(1),
        }
        Partition(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad partition {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Transpose of the Young diagram.
pub fn conjugate(pi: &Partition) -> Partition {
    let parts = (1..=pi.width()).map(|col| pi.0.iter().take_while(|&&row| row >= col).count()).collect();
    Partition(parts)
}

/// `dim S_π(C^v)` by the hook-content formula `Π (v + c(x)) / Π h(x)`.
pub fn dim_schur(pi: &Partition, v: usize) -> u128 {
    if pi.length() > v {
        return 0;
    }
    let conj = conjugate(pi);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for (row, &len) in pi.0.iter().enumerate() {
        for col in 0..len {
            num *= (v + col - row) as u64;
            let hook = (len - col - 1) + (conj.0[col] - row - 1) + 1;
            den *= hook as u64;
        }
    }
    let q = num / den;
    q.to_u128().expect("Schur module dimension exceeds u128")
}

/// Partitions obtained from `pi` by adding one box, keeping at most `v` rows,
/// listed from the top row down.
pub fn pieri_add_box(pi: &Partition, v: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for row in 0..=pi.length() {
        let can_grow = row == 0 || pi.0[row - 1] > pi.0.get(row).copied().unwrap_or(0);
        if !can_grow || row >= v {
            continue;
        }
        let mut parts = pi.0.clone();
        if row == parts.len() {
            parts.push(1);
        } else {
            parts[row] += 1;
        }
        out.push(Partition(parts));
    }
    out
}

/// All partitions of `size` with parts at most `max_part` and at most
/// `max_len` parts, in reverse lexicographic order.
pub fn partitions_bounded(size: usize, max_part: usize, max_len: usize) -> Vec<Partition> {
    fn rec(rest: usize, max_part: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            prefix.push(part);
            rec(rest - part, part, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(size, max_part, max_len, &mut Vec::new(), &mut out);
    out
}

/// One summand `S_{piM} M ⊗ S_{piU} U` of a decomposition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct IsotypicSummand {
    pub pi_m: Partition,
    pub pi_u: Partition,
    pub multiplicity: u32,
    pub dimension: u128,
}

/// `Λ^p(M ⊗ U) = ⊕_{|π| = p} S_π M ⊗ S_{π'} U` for `dim M = m`, `dim U = n`,
/// keeping only summands that are nonzero on both sides.
pub fn cauchy_wedge(p: usize, m: usize, n: usize) -> Result<Vec<IsotypicSummand>> {
    if p > m * n {
        return Err(Error::InvalidDimension(format!("p = {p} exceeds mn = {}", m * n)));
    }
    Ok(partitions_bounded(p, n, m)
        .into_iter()
        .map(|pi| {
            let pi_u = conjugate(&pi);
            let dimension = dim_schur(&pi, m) * dim_schur(&pi_u, n);
            IsotypicSummand { pi_m: pi, pi_u, multiplicity: 1, dimension }
        })
        .collect())
}

fn check_order(m: usize, n: usize) -> Result<()> {
    if n > m {
        return Err(Error::OrderViolation { m, n });
    }
    if n == 0 {
        return Err(Error::InvalidDimension("n must be positive".into()));
    }
    Ok(())
}

/// Pairs `(π', π + (1))` with `π = (m, ν)`, `|ν| = p - m`, `ν₁ <= m`,
/// `ℓ(ν) <= n - 1`; each contributes `S_{π'}M ⊗ S_{π+(1)}U ⊗ L` to the kernel.
pub fn kernel_modules(m: usize, n: usize, p: usize) -> Result<Vec<(Partition, Partition)>> {
    check_order(m, n)?;
    if p < m {
        return Ok(Vec::new());
    }
    Ok(partitions_bounded(p - m, m, n - 1)
        .into_iter()
        .map(|nu| {
            let mut parts = vec![m];
            parts.extend_from_slice(nu.parts());
            let pi = Partition(parts);
            (conjugate(&pi), pi.add_to_first_row())
        })
        .collect())
}

pub fn kernel_dim_pieri(m: usize, n: usize, p: usize, l: usize) -> Result<u128> {
    Ok(kernel_modules(m, n, p)?
        .iter()
        .map(|(pi_m, pi_u)| dim_schur(pi_m, m) * dim_schur(pi_u, n))
        .sum::<u128>()
        * l as u128)
}

/// Result of the alternating-sum kernel formula.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct KernelDimension {
    pub value: u128,
    /// False when `p > ⌈mn/2⌉ - 1`, outside the range where the formula is
    /// established.
    pub validated: bool,
}

/// `l · Σ_{j=0}^{p-m} (-1)^j C(mn, p-m-j) C(m+j-1, j) C(m+n+j, m+j+1)`.
pub fn kernel_dim_formula(m: usize, n: usize, p: usize, l: usize) -> Result<KernelDimension> {
    check_order(m, n)?;
    let validated = p <= (m * n).div_ceil(2).saturating_sub(1);
    if p < m {
        return Ok(KernelDimension { value: 0, validated });
    }
    let (m64, n64) = (m as u64, n as u64);
    let mut sum = SignedSum::default();
    for j in 0..=(p - m) as u64 {
        let term = binomial(m64 * n64, (p - m) as u64 - j)
            * binomial(m64 + j - 1, j)
            * binomial(m64 + n64 + j, m64 + j + 1);
        sum.add(term, j % 2 == 1);
    }
    let total = sum.finish()?;
    Ok(KernelDimension { value: total * l as u128, validated })
}

#[derive(Default)]
struct SignedSum {
    pos: u128,
    neg: u128,
}

impl SignedSum {
    fn add(&mut self, term: u128, negative: bool) {
        if negative {
            self.neg += term;
        } else {
            self.pos += term;
        }
    }

    fn finish(self) -> Result<u128> {
        self.pos
            .checked_sub(self.neg)
            .ok_or_else(|| Error::InvalidDimension("alternating kernel sum is negative".into()))
    }
}

/// Degree `r·C(a-1, p) + 1` of the minors of `T_A^∧p` cutting out border rank `<= r`.
pub fn equation_degree(r: usize, a: usize, p: usize) -> Result<u128> {
    if r == 0 || a == 0 || p >= a {
        return Err(Error::InvalidDimension(format!(
            "need r >= 1 and 0 <= p <= a-1, got r={r}, a={a}, p={p}"
        )));
    }
    Ok(r as u128 * binomial(a as u64 - 1, p as u64) + 1)
}
