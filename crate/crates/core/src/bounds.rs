//! Border-rank lower-bound certificates and closed-form comparison bounds.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::binaryforms::{restricted_koszul, restriction_projector};
use crate::error::{Error, Result};
use crate::exterior::koszul_flattening;
use crate::rank::{compute_rank, Method, RankResult, RankStrategy};
use crate::repcomb::binomial;
use crate::scalars::{normalize, FieldTag, Rational};
use crate::tensor::{flatten_classical, Mode, Tensor3};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundMethod {
    Classical,
    Strassen,
    Koszul(usize),
    KoszulRestricted(usize),
    Theorem1Formula,
    LickteigSquare,
    Corollary2nl,
}

impl BoundMethod {
    pub fn name(self) -> &'static str {
        match self {
            BoundMethod::Classical => "classical",
            BoundMethod::Strassen => "strassen",
            BoundMethod::Koszul(_) => "koszul",
            BoundMethod::KoszulRestricted(_) => "koszul-restricted",
            BoundMethod::Theorem1Formula => "theorem1-formula",
            BoundMethod::LickteigSquare => "lickteig-square",
            BoundMethod::Corollary2nl => "corollary-2nl",
        }
    }

    pub fn p(self) -> Option<usize> {
        match self {
            BoundMethod::Strassen => Some(1),
            BoundMethod::Koszul(p) | BoundMethod::KoszulRestricted(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for BoundMethod {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// How far a certificate's rank can be trusted.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Soundness {
    /// Rank computed exactly over `Q`.
    #[serde(rename = "exact-Q")]
    ExactQ,
    /// Rank of an integer matrix computed modulo a prime: a lower bound for
    /// the rank over `Q`.
    #[serde(rename = "mod-p-lower-bound")]
    ModPLowerBound,
    /// Tensor given over `F_p`, rank computed exactly there.
    #[serde(rename = "exact-Fp")]
    ExactFp,
    /// Evaluation of a closed formula, no matrix involved.
    #[serde(rename = "closed-form")]
    ClosedForm,
}

impl Soundness {
    fn of(matrix_field: FieldTag, r: &RankResult) -> Self {
        match (matrix_field, r.field) {
            (FieldTag::PrimeField(_), _) => Soundness::ExactFp,
            (FieldTag::Rationals, FieldTag::Rationals) => Soundness::ExactQ,
            (FieldTag::Rationals, FieldTag::PrimeField(_)) => Soundness::ModPLowerBound,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Timings {
    pub construct: u128,
    pub rank: u128,
    pub total: u128,
}

fn fraction<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", q.numerator(), q.denominator()))
}

/// A lower bound `bound = ⌈quotient⌉` with `quotient = rank / divisor`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BoundCertificate {
    pub method: BoundMethod,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub p: Option<usize>,
    pub tensor_dims: Option<[usize; 3]>,
    pub tensor_hash: Option<String>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub rank: Option<usize>,
    pub divisor: u128,
    #[serde(serialize_with = "fraction")]
    pub quotient: Rational,
    pub bound: u128,
    pub field: Option<FieldTag>,
    pub soundness: Soundness,
    pub rank_method: Option<Method>,
    pub prime_ranks: Vec<(u64, usize)>,
    /// Koszul degree above `⌈a/2⌉ - 1`; the bound still holds but such
    /// flattenings are redundant.
    pub outside_useful_range: bool,
    pub timings_ms: Timings,
}

impl BoundCertificate {
    /// Records the matrix multiplication shape the certificate is about.
    pub fn with_matmul(mut self, m: usize, n: usize, l: usize) -> Self {
        self.m = Some(m);
        self.n = Some(n);
        self.l = Some(l);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn ceil_u128(q: &Rational) -> u128 {
    q.ceil().to_u128().expect("bound is nonnegative and fits u128")
}

fn ms(since: Instant) -> u128 {
    since.elapsed().as_millis()
}

struct Computed {
    rows: usize,
    cols: usize,
    matrix_field: FieldTag,
    result: RankResult,
}

fn rank_certificate(
    method: BoundMethod,
    tensor: Option<&Tensor3>,
    computed: Computed,
    divisor: u128,
    outside_useful_range: bool,
    timings: Timings,
) -> BoundCertificate {
    let quotient =
        normalize(BigInt::from(computed.result.rank), BigInt::from(divisor)).expect("divisor is positive");
    BoundCertificate {
        method,
        m: None,
        n: None,
        l: None,
        p: method.p(),
        tensor_dims: tensor.map(|t| {
            let (a, b, c) = t.dims();
            [a, b, c]
        }),
        tensor_hash: tensor.map(Tensor3::content_hash),
        rows: Some(computed.rows),
        cols: Some(computed.cols),
        rank: Some(computed.result.rank),
        divisor,
        bound: ceil_u128(&quotient),
        quotient,
        field: Some(computed.result.field),
        soundness: Soundness::of(computed.matrix_field, &computed.result),
        rank_method: Some(computed.result.method),
        prime_ranks: computed.result.prime_ranks,
        outside_useful_range,
        timings_ms: timings,
    }
}

pub fn bound_classical(t: &Tensor3) -> Result<BoundCertificate> {
    bound_classical_with(t, &RankStrategy::Auto)
}

/// Maximum rank of the three classical flattenings.
pub fn bound_classical_with(t: &Tensor3, strategy: &RankStrategy) -> Result<BoundCertificate> {
    let start = Instant::now();
    let mut best: Option<Computed> = None;
    let mut construct = 0;
    let mut rank = 0;
    for mode in [Mode::A, Mode::B, Mode::C] {
        let s = Instant::now();
        let flat = flatten_classical(t, mode);
        construct += ms(s);
        let s = Instant::now();
        let result = compute_rank(&flat, strategy)?;
        rank += ms(s);
        if best.as_ref().is_none_or(|b| result.rank > b.result.rank) {
            best =
                Some(Computed { rows: flat.rows(), cols: flat.cols(), matrix_field: flat.field(), result });
        }
    }
    let timings = Timings { construct, rank, total: ms(start) };
    Ok(rank_certificate(BoundMethod::Classical, Some(t), best.expect("three modes"), 1, false, timings))
}

pub fn bound_koszul(t: &Tensor3, p: usize) -> Result<BoundCertificate> {
    bound_koszul_with(t, p, &RankStrategy::Auto)
}

/// `⌈rank T_A^∧p / C(a-1, p)⌉`; `p = 1` is labelled Strassen.
pub fn bound_koszul_with(t: &Tensor3, p: usize, strategy: &RankStrategy) -> Result<BoundCertificate> {
    let start = Instant::now();
    let k = koszul_flattening(t, p)?;
    let construct = ms(start);
    let s = Instant::now();
    let result = compute_rank(&k.matrix, strategy)?;
    let timings = Timings { construct, rank: ms(s), total: ms(start) };
    let method = if p == 1 { BoundMethod::Strassen } else { BoundMethod::Koszul(p) };
    let divisor = binomial((k.a - 1) as u64, p as u64);
    let computed =
        Computed { rows: k.matrix.rows(), cols: k.matrix.cols(), matrix_field: k.matrix.field(), result };
    Ok(rank_certificate(method, Some(t), computed, divisor, k.outside_useful_range(), timings))
}

pub fn bound_matmul_restricted(m: usize, n: usize, l: usize) -> Result<BoundCertificate> {
    bound_matmul_restricted_with(m, n, l, &RankStrategy::Auto)
}

/// Koszul bound with `p = n - 1` for `M<m,n,l>` restricted to `A' = S^{m+n-2}W*`.
pub fn bound_matmul_restricted_with(
    m: usize,
    n: usize,
    l: usize,
    strategy: &RankStrategy,
) -> Result<BoundCertificate> {
    restriction_projector(m, n)?;
    if l == 0 {
        return Err(Error::InvalidDimension("l must be positive".into()));
    }
    let start = Instant::now();
    let k = restricted_koszul(m, n, l, n - 1)?;
    let construct = ms(start);
    let s = Instant::now();
    let result = compute_rank(&k.matrix, strategy)?;
    let timings = Timings { construct, rank: ms(s), total: ms(start) };
    let divisor = binomial((m + n - 2) as u64, (n - 1) as u64);
    let computed =
        Computed { rows: k.matrix.rows(), cols: k.matrix.cols(), matrix_field: k.matrix.field(), result };
    let mut cert = rank_certificate(
        BoundMethod::KoszulRestricted(n - 1),
        None,
        computed,
        divisor,
        k.outside_useful_range(),
        timings,
    );
    cert.tensor_dims = Some([k.a, k.b, k.c]);
    Ok(cert.with_matmul(m, n, l))
}

fn check_shape(m: usize, n: usize, l: usize) -> Result<()> {
    if m == 0 || n == 0 || l == 0 {
        return Err(Error::InvalidDimension(format!("m, n, l must be positive, got {m}, {n}, {l}")));
    }
    if n > m {
        return Err(Error::OrderViolation { m, n });
    }
    Ok(())
}

fn theorem1_quotient(m: usize, n: usize, l: usize) -> Rational {
    normalize(BigInt::from(n * l * (n + m - 1)), BigInt::from(m)).expect("m > 0")
}

/// `⌈n·l·(n+m-1)/m⌉` for `n ≤ m`.
pub fn bound_formula_theorem1(m: usize, n: usize, l: usize) -> Result<u128> {
    check_shape(m, n, l)?;
    Ok(ceil_u128(&theorem1_quotient(m, n, l)))
}

/// `2nl - l`, the square case of [`bound_formula_theorem1`].
pub fn corollary_2nl(n: usize, l: usize) -> Result<u128> {
    check_shape(n, n, l)?;
    Ok((2 * n * l - l) as u128)
}

/// `⌈3n²/2 + n/2 - 1⌉`, zero for `n = 0`.
pub fn lickteig_square(n: usize) -> u128 {
    let n = n as u128;
    (3 * n * n + n).saturating_sub(2).div_ceil(2)
}

fn closed_form(
    method: BoundMethod,
    m: Option<usize>,
    n: usize,
    l: Option<usize>,
    quotient: Rational,
) -> BoundCertificate {
    BoundCertificate {
        method,
        m,
        n: Some(n),
        l,
        p: None,
        tensor_dims: None,
        tensor_hash: None,
        rows: None,
        cols: None,
        rank: None,
        divisor: 1,
        bound: ceil_u128(&quotient),
        quotient,
        field: None,
        soundness: Soundness::ClosedForm,
        rank_method: None,
        prime_ranks: Vec::new(),
        outside_useful_range: false,
        timings_ms: Timings::default(),
    }
}

pub fn theorem1_certificate(m: usize, n: usize, l: usize) -> Result<BoundCertificate> {
    check_shape(m, n, l)?;
    Ok(closed_form(BoundMethod::Theorem1Formula, Some(m), n, Some(l), theorem1_quotient(m, n, l)))
}

pub fn corollary_2nl_certificate(n: usize, l: usize) -> Result<BoundCertificate> {
    let value = corollary_2nl(n, l)?;
    Ok(closed_form(BoundMethod::Corollary2nl, Some(n), n, Some(l), Rational::from(value as i64)))
}

pub fn lickteig_certificate(n: usize) -> Result<BoundCertificate> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be positive".into()));
    }
    let n_big = BigInt::from(n);
    let q = normalize(BigInt::from(3) * &n_big * &n_big + &n_big - 2, BigInt::from(2))?;
    Ok(closed_form(BoundMethod::LickteigSquare, Some(n), n, Some(n), q))
}

/// Which `l` each table row uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LRule {
    EqualN,
    Fixed(usize),
}

/// Default cap on `rows * cols` of the restricted matrix for the computed
/// column of [`compare_table`].
pub const DEFAULT_TABLE_BUDGET: usize = 10_000_000_000;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub l: usize,
    /// `max(n², nl)`, the classical flattening bound for `M<n,n,l>`.
    pub classical: u128,
    /// `⌈3nl/2⌉`.
    pub strassen: u128,
    /// Only defined for `l = n`.
    pub lickteig: Option<u128>,
    pub theorem1: u128,
    /// Restricted Koszul bound from an actual rank, when within budget.
    pub computed: Option<u128>,
}

/// Size `rows * cols` of the restricted flattening for `M<m,n,l>`.
pub fn restricted_matrix_size(m: usize, n: usize, l: usize) -> u128 {
    let rows = (l * m) as u128 * binomial((m + n - 1) as u64, n as u64);
    let cols = (n * l) as u128 * binomial((m + n - 1) as u64, (n - 1) as u64);
    rows * cols
}

/// One row per `n` in `n_min..=n_max` for square `n × n` by `n × l` products.
pub fn compare_table(n_min: usize, n_max: usize, rule: LRule, budget: usize) -> Result<Vec<TableRow>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidDimension(format!("bad n range {n_min}..={n_max}")));
    }
    if rule == LRule::Fixed(0) {
        return Err(Error::InvalidDimension("l must be positive".into()));
    }
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let l = match rule {
                LRule::EqualN => n,
                LRule::Fixed(l) => l,
            };
            let computed = if restricted_matrix_size(n, n, l) <= budget as u128 {
                Some(bound_matmul_restricted(n, n, l)?.bound)
            } else {
                None
            };
            Ok(TableRow {
                n,
                l,
                classical: (n * n.max(l)) as u128,
                strassen: (3 * n * l).div_ceil(2) as u128,
                lickteig: (l == n).then(|| lickteig_square(n)),
                theorem1: bound_formula_theorem1(n, n, l)?,
                computed,
            })
        })
        .collect()
}

/// Aligned text rendering of a table.
pub fn format_table(rows: &[TableRow]) -> String {
    let header = ["n", "l", "classical", "strassen", "lickteig", "theorem1", "computed"];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            let opt = |v: Option<u128>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
            [
                r.n.to_string(),
                r.l.to_string(),
                r.classical.to_string(),
                r.strassen.to_string(),
                opt(r.lickteig),
                r.theorem1.to_string(),
                opt(r.computed),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..7)
        .map(|i| cells.iter().map(|c| c[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<&str>| {
        items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for c in &cells {
        out.push_str(&line(c.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
