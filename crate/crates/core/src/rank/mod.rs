//! Exact rank of sparse matrices over `Q` and `F_p`.
//!
//! A rank over `F_p` of an integer matrix never exceeds its rank over `Q`, so
//! modular ranks of integer matrices are sound lower bounds for the rational
//! rank. [`RankResult::certified_lower_bound_over_q`] records when that
//! reasoning applies.

mod dense;
mod modular;
mod sparse;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalars::{default_primes, FieldTag, PrimeField, Scalar};

use modular::{ModArith, Montgomery, Plain};
use sparse::{IntegerEliminator, ModPEliminator, Row};

/// Matrices with `rows * cols` at most this size are eliminated densely.
pub const DENSE_THRESHOLD: usize = 4_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DenseElimination,
    SparseElimination,
    FractionFree,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankResult {
    pub rank: usize,
    /// The field the rank was computed in; for multi-prime runs, the prime
    /// that attained the maximum.
    pub field: FieldTag,
    pub method: Method,
    pub certified_lower_bound_over_q: bool,
    /// Per-prime ranks of a multi-prime run, in the order tried.
    pub prime_ranks: Vec<(u64, usize)>,
}

/// How to certify a rank.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CertStrategy {
    /// Maximum over several primes; requires integer entries.
    MultiPrime(Vec<PrimeField>),
    ExactQ,
}

impl CertStrategy {
    /// Multi-prime over the first `k` default certification primes.
    pub fn multi_prime(k: usize) -> Self {
        CertStrategy::MultiPrime(default_primes(k))
    }
}

/// Rank strategy used by higher-level code.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub enum RankStrategy {
    /// Exact over `Q` when `rows * cols <= DENSE_THRESHOLD` (or entries are
    /// not integers), otherwise multi-prime with the given primes. Matrices
    /// over a prime field are ranked in that field.
    #[default]
    Auto,
    AutoWithPrimes(Vec<PrimeField>),
    ExactQ,
    MultiPrime(Vec<PrimeField>),
    Prime(PrimeField),
}

fn check_prime_field(m: &SparseMatrix, p: PrimeField) -> Result<()> {
    match m.field() {
        FieldTag::PrimeField(q) if q != p => {
            Err(Error::FieldMismatch(format!("matrix over {} ranked mod {}", m.field(), p.modulus())))
        }
        _ => Ok(()),
    }
}

fn residue(v: &Scalar, p: PrimeField) -> Result<u64> {
    match v {
        Scalar::Rational(r) => r.reduce_mod(p),
        Scalar::Prime(e) => Ok(e.value()),
    }
}

fn modular_rows<A: ModArith>(m: &SparseMatrix, p: PrimeField, arith: &A) -> Result<Vec<Row<u64>>> {
    let mut rows: Vec<Row<u64>> = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.entries() {
        let x = residue(v, p)?;
        if x != 0 {
            rows[*r].push((*c as u32, arith.enter(x)));
        }
    }
    Ok(rows)
}

fn modular_dense<A: ModArith>(m: &SparseMatrix, p: PrimeField, arith: &A) -> Result<usize> {
    // Eliminate along the shorter dimension.
    let t;
    let m = if m.rows() > m.cols() {
        t = m.transpose();
        &t
    } else {
        m
    };
    let cols = m.cols();
    let mut buf = vec![0u64; m.rows() * cols];
    for (r, c, v) in m.entries() {
        buf[r * cols + c] = arith.enter(residue(v, p)?);
    }
    Ok(dense::dense_rank(arith, m.rows(), cols, buf))
}

fn with_arith<T>(p: PrimeField, f: impl FnOnce(&dyn DynArith) -> T) -> T {
    if p.modulus() % 2 == 1 {
        f(&Montgomery::new(p))
    } else {
        f(&Plain(p))
    }
}

trait DynArith {
    fn dense(&self, m: &SparseMatrix, p: PrimeField) -> Result<usize>;
    fn sparse(&self, m: &SparseMatrix, p: PrimeField) -> Result<usize>;
}

impl<A: ModArith> DynArith for A {
    fn dense(&self, m: &SparseMatrix, p: PrimeField) -> Result<usize> {
        modular_dense(m, p, self)
    }

    fn sparse(&self, m: &SparseMatrix, p: PrimeField) -> Result<usize> {
        let rows = modular_rows(m, p, self)?;
        Ok(sparse::sparse_rank(&ModPEliminator(self), m.cols(), rows))
    }
}

fn mod_p_result(m: &SparseMatrix, p: PrimeField, method: Method) -> Result<RankResult> {
    check_prime_field(m, p)?;
    let rank = with_arith(p, |a| match method {
        Method::DenseElimination => a.dense(m, p),
        _ => a.sparse(m, p),
    })?;
    Ok(RankResult {
        rank,
        field: FieldTag::PrimeField(p),
        method,
        certified_lower_bound_over_q: m.has_integer_entries(),
        prime_ranks: vec![(p.modulus(), rank)],
    })
}

/// Rank over `F_p`, dense or sparse by size.
pub fn rank_mod_p(m: &SparseMatrix, p: PrimeField) -> Result<RankResult> {
    let method = if m.rows().saturating_mul(m.cols()) <= DENSE_THRESHOLD {
        Method::DenseElimination
    } else {
        Method::SparseElimination
    };
    mod_p_result(m, p, method)
}

pub fn rank_mod_p_dense(m: &SparseMatrix, p: PrimeField) -> Result<RankResult> {
    mod_p_result(m, p, Method::DenseElimination)
}

pub fn rank_mod_p_sparse(m: &SparseMatrix, p: PrimeField) -> Result<RankResult> {
    mod_p_result(m, p, Method::SparseElimination)
}

/// Exact rank over `Q` by fraction-free sparse elimination.
pub fn rank_exact_q(m: &SparseMatrix) -> Result<RankResult> {
    if m.field() != FieldTag::Rationals {
        return Err(Error::FieldMismatch(format!("exact Q rank of a matrix over {}", m.field())));
    }
    let mut grouped: Vec<Vec<(u32, &crate::scalars::Rational)>> = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.entries() {
        grouped[*r].push((*c as u32, v.as_rational().expect("rational matrix")));
    }
    let rows = grouped.into_iter().filter(|r| !r.is_empty()).map(sparse::integer_row).collect();
    let rank = sparse::sparse_rank(&IntegerEliminator, m.cols(), rows);
    Ok(RankResult {
        rank,
        field: FieldTag::Rationals,
        method: Method::FractionFree,
        certified_lower_bound_over_q: true,
        prime_ranks: Vec::new(),
    })
}

pub fn rank_certified(m: &SparseMatrix, strategy: &CertStrategy) -> Result<RankResult> {
    match strategy {
        CertStrategy::ExactQ => rank_exact_q(m),
        CertStrategy::MultiPrime(primes) => {
            if !m.has_integer_entries() {
                return Err(Error::NonIntegerEntries);
            }
            if primes.is_empty() {
                return Err(Error::InvalidDimension("multi-prime run needs at least one prime".into()));
            }
            let results: Vec<RankResult> = primes.iter().map(|&p| rank_mod_p(m, p)).collect::<Result<_>>()?;
            let best = results
                .iter()
                .enumerate()
                .max_by_key(|(i, r)| (r.rank, std::cmp::Reverse(*i)))
                .map(|(_, r)| r)
                .expect("nonempty");
            Ok(RankResult {
                rank: best.rank,
                field: best.field,
                method: best.method,
                certified_lower_bound_over_q: true,
                prime_ranks: results.iter().flat_map(|r| r.prime_ranks.clone()).collect(),
            })
        }
    }
}

/// Rank according to a [`RankStrategy`].
pub fn compute_rank(m: &SparseMatrix, strategy: &RankStrategy) -> Result<RankResult> {
    if let FieldTag::PrimeField(own) = m.field() {
        return match strategy {
            RankStrategy::Auto | RankStrategy::AutoWithPrimes(_) => rank_mod_p(m, own),
            RankStrategy::Prime(p) => rank_mod_p(m, *p),
            _ => Err(Error::FieldMismatch(format!("matrix over {} cannot be ranked over Q", m.field()))),
        };
    }
    let auto = |primes: Vec<PrimeField>| {
        if m.rows().saturating_mul(m.cols()) <= DENSE_THRESHOLD || !m.has_integer_entries() {
            rank_exact_q(m)
        } else {
            rank_certified(m, &CertStrategy::MultiPrime(primes))
        }
    };
    match strategy {
        RankStrategy::Auto => auto(default_primes(3)),
        RankStrategy::AutoWithPrimes(ps) => auto(ps.clone()),
        RankStrategy::ExactQ => rank_exact_q(m),
        RankStrategy::MultiPrime(ps) => rank_certified(m, &CertStrategy::MultiPrime(ps.clone())),
        RankStrategy::Prime(p) => rank_mod_p(m, *p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::DEFAULT_PRIMES;

    const Q: FieldTag = FieldTag::Rationals;

    fn int_matrix(rows: &[&[i64]]) -> SparseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        SparseMatrix::from_triplets(
            r,
            c,
            Q,
            rows.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, Q.from_i64(v)))),
        )
        .unwrap()
    }

    fn pf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn all_ranks(m: &SparseMatrix, p: u64) -> [usize; 3] {
        [
            rank_mod_p_dense(m, pf(p)).unwrap().rank,
            rank_mod_p_sparse(m, pf(p)).unwrap().rank,
            rank_mod_p(m, pf(p)).unwrap().rank,
        ]
    }

    #[test]
    fn identity_has_full_rank() {
        let id = SparseMatrix::identity(5, Q);
        for p in [2, 3, 65521, DEFAULT_PRIMES[0]] {
            assert_eq!(all_ranks(&id, p), [5, 5, 5]);
        }
        assert_eq!(rank_exact_q(&id).unwrap().rank, 5);
    }

    #[test]
    fn rank_drops_mod_small_primes() {
        let two = int_matrix(&[&[2]]);
        assert_eq!(all_ranks(&two, 2), [0, 0, 0]);
        assert_eq!(all_ranks(&two, 3), [1, 1, 1]);
        let r = rank_mod_p(&two, pf(2)).unwrap();
        assert!(r.certified_lower_bound_over_q);
    }

    #[test]
    fn bad_prime_on_denominators() {
        let m = SparseMatrix::new(1, 1, Q, vec![(0, 0, Q.parse_scalar("1/3").unwrap())]).unwrap();
        assert_eq!(rank_mod_p(&m, pf(3)), Err(Error::BadPrime(3)));
        let ok = rank_mod_p(&m, pf(5)).unwrap();
        assert_eq!(ok.rank, 1);
        assert!(!ok.certified_lower_bound_over_q);
        assert_eq!(rank_exact_q(&m).unwrap().rank, 1);
        assert_eq!(rank_certified(&m, &CertStrategy::multi_prime(3)), Err(Error::NonIntegerEntries));
    }

    #[test]
    fn permutation_matrix_full_rank() {
        let perm = [3usize, 0, 4, 1, 2];
        let m = SparseMatrix::from_triplets(5, 5, Q, perm.iter().enumerate().map(|(i, &j)| (i, j, Q.one())))
            .unwrap();
        assert_eq!(rank_exact_q(&m).unwrap().rank, 5);
        assert_eq!(all_ranks(&m, 7), [5, 5, 5]);
    }

    #[test]
    fn zero_matrix() {
        let z = SparseMatrix::zero(4, 6, Q);
        assert_eq!(rank_exact_q(&z).unwrap().rank, 0);
        assert_eq!(rank_certified(&z, &CertStrategy::multi_prime(3)).unwrap().rank, 0);
        assert_eq!(all_ranks(&z, 5), [0, 0, 0]);
    }

    #[test]
    fn small_known_ranks() {
        let m = int_matrix(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(rank_exact_q(&m).unwrap().rank, 2);
        assert_eq!(all_ranks(&m, 65521), [2, 2, 2]);
        // mod 3 every row reduces to (1, 2, 0)
        assert_eq!(all_ranks(&m, 3), [1, 1, 1]);
        let half = SparseMatrix::new(
            2,
            2,
            Q,
            vec![
                (0, 0, Q.parse_scalar("1/2").unwrap()),
                (0, 1, Q.parse_scalar("1/3").unwrap()),
                (1, 0, Q.parse_scalar("3").unwrap()),
                (1, 1, Q.parse_scalar("2").unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(rank_exact_q(&half).unwrap().rank, 1);
    }

    /// `diag(1, ..., 1, P)` scrambled by unimodular row and column operations,
    /// so the determinant is exactly `P`.
    fn det_p_matrix(n: usize, prime: i64) -> SparseMatrix {
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1;
        }
        a[n - 1][n - 1] = prime;
        for i in 0..n - 1 {
            let prev = a[i].clone();
            for (x, y) in a[i + 1].iter_mut().zip(&prev) {
                *x += y;
            }
        }
        for j in 0..n - 1 {
            for row in a.iter_mut() {
                row[j + 1] += 2 * row[j];
            }
        }
        let rows: Vec<&[i64]> = a.iter().map(|r| r.as_slice()).collect();
        int_matrix(&rows)
    }

    #[test]
    fn multiprime_recovers_from_unlucky_prime() {
        let m = det_p_matrix(6, 65521);
        assert_eq!(rank_exact_q(&m).unwrap().rank, 6);
        assert_eq!(rank_mod_p(&m, pf(65521)).unwrap().rank, 5);
        let strategy =
            CertStrategy::MultiPrime(vec![pf(65521), pf(DEFAULT_PRIMES[0]), pf(DEFAULT_PRIMES[1])]);
        let r = rank_certified(&m, &strategy).unwrap();
        assert_eq!(r.rank, 6);
        assert_eq!(r.prime_ranks[0], (65521, 5));
        assert!(r.certified_lower_bound_over_q);
        assert_eq!(r.field, FieldTag::PrimeField(pf(DEFAULT_PRIMES[0])));
    }

    #[test]
    fn prime_field_matrices() {
        let f7 = FieldTag::prime(7).unwrap();
        let m = SparseMatrix::new(2, 2, f7, vec![(0, 0, f7.from_i64(1)), (1, 1, f7.from_i64(3))]).unwrap();
        let r = compute_rank(&m, &RankStrategy::Auto).unwrap();
        assert_eq!(r.rank, 2);
        assert!(!r.certified_lower_bound_over_q);
        assert!(rank_mod_p(&m, pf(5)).is_err());
        assert!(rank_exact_q(&m).is_err());
    }

    #[test]
    fn auto_strategy_selection() {
        let m = SparseMatrix::identity(3, Q);
        let r = compute_rank(&m, &RankStrategy::Auto).unwrap();
        assert_eq!(r.method, Method::FractionFree);
        let big = SparseMatrix::identity(2001, Q);
        let r = compute_rank(&big, &RankStrategy::Auto).unwrap();
        assert_eq!((r.rank, r.method), (2001, Method::SparseElimination));
        assert_eq!(r.prime_ranks.len(), 3);
    }

    #[test]
    fn block_diagonal_split() {
        // Two decoupled 2x2 blocks interleaved in index space.
        let m = int_matrix(&[&[1, 0, 1, 0], &[0, 2, 0, 4], &[1, 0, 1, 0], &[0, 1, 0, 3]]);
        assert_eq!(rank_exact_q(&m).unwrap().rank, 3);
        assert_eq!(all_ranks(&m, 65521), [3, 3, 3]);
    }
}
