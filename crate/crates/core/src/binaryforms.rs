//! Binary forms and the restriction of matrix multiplication to the top
//! `SL_2`-summand `A' = S^{m+n-2}W*` of `M ⊗ U = S^{m-1}W* ⊗ S^{n-1}W*`.
//!
//! Forms are coefficient lists in the monomial basis `x^d, x^{d-1}y, …, y^d`.
//! The same representation serves `S^d W` and `S^d W*`; which one is meant
//! depends on the operation.

use crate::error::{Error, Result};
use crate::exterior::{koszul_flattening, KoszulMatrix};
use crate::rank::{compute_rank, RankStrategy};
use crate::repcomb::binomial;
use crate::scalars::{normalize, FieldTag, Scalar};
use crate::tensor::{matmul_tensor, project_factor_a, FactorMap, Tensor3};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryForm {
    field: FieldTag,
    coeffs: Vec<Scalar>,
}

impl BinaryForm {
    pub fn new(field: FieldTag, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidDimension("a binary form needs degree + 1 coefficients".into()));
        }
        if coeffs.iter().any(|c| !field.contains(c)) {
            return Err(Error::FieldMismatch(format!("coefficients not in {field}")));
        }
        Ok(BinaryForm { field, coeffs })
    }

    pub fn from_ints(field: FieldTag, coeffs: &[i64]) -> Result<Self> {
        BinaryForm::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: FieldTag, degree: usize) -> Self {
        BinaryForm { field, coeffs: vec![field.zero(); degree + 1] }
    }

    /// `x^{d-index} y^index`.
    pub fn monomial(field: FieldTag, degree: usize, index: usize) -> Self {
        let mut f = BinaryForm::zero(field, degree);
        f.coeffs[index] = field.one();
        f
    }

    /// `(a·x + b·y)^degree`.
    pub fn linear_power(a: &Scalar, b: &Scalar, degree: usize) -> Result<Self> {
        let field = a.field();
        if b.field() != field {
            return Err(Error::FieldMismatch(format!("{} vs {}", a.field(), b.field())));
        }
        let coeffs = (0..=degree)
            .map(|i| {
                let binom = field.from_rational(&normalize(binomial(degree as u64, i as u64) as i64, 1)?)?;
                Ok(&(&binom * &pow(a, degree - i)) * &pow(b, i))
            })
            .collect::<Result<_>>()?;
        Ok(BinaryForm { field, coeffs })
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Value of a dual form `g ∈ S^β W*` at the point `a·x + b·y ∈ W`.
    pub fn evaluate(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let beta = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .fold(self.field.zero(), |acc, (k, g)| &acc + &(&(g * &pow(a, beta - k)) * &pow(b, k)))
    }
}

fn pow(x: &Scalar, e: usize) -> Scalar {
    (0..e).fold(x.field().one(), |acc, _| &acc * x)
}

fn check_same_field(f: &BinaryForm, g: &BinaryForm) -> Result<()> {
    if f.field != g.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", f.field, g.field)));
    }
    Ok(())
}

/// Polynomial product; degrees add.
pub fn multiply(f: &BinaryForm, g: &BinaryForm) -> Result<BinaryForm> {
    check_same_field(f, g)?;
    let mut out = BinaryForm::zero(f.field, f.degree() + g.degree());
    for (i, a) in f.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate() {
            out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
        }
    }
    Ok(out)
}

/// Apolar contraction `g · f ∈ S^{α-β} W` of `g ∈ S^β W*` and `f ∈ S^α W`,
/// scaled so that `g · l^α = g(l) · l^{α-β}`.
///
/// In monomial bases, `(ξ^{β-k} η^k) · (x^{α-i} y^i)` is
/// `C(α-β, i-k) / C(α, i)` times `x^{α-β-(i-k)} y^{i-k}`.
pub fn contract(g: &BinaryForm, f: &BinaryForm) -> Result<BinaryForm> {
    check_same_field(f, g)?;
    let (alpha, beta) = (f.degree(), g.degree());
    if beta > alpha {
        return Err(Error::DegreeMismatch { dual: beta, form: alpha });
    }
    let field = f.field;
    let mut out = BinaryForm::zero(field, alpha - beta);
    for (k, gk) in g.coeffs.iter().enumerate() {
        if gk.is_zero() {
            continue;
        }
        for (i, fi) in f.coeffs.iter().enumerate() {
            if fi.is_zero() || i < k || i - k > alpha - beta {
                continue;
            }
            let weight = normalize(
                binomial((alpha - beta) as u64, (i - k) as u64) as i64,
                binomial(alpha as u64, i as u64) as i64,
            )?;
            let term = &(gk * fi) * &field.from_rational(&weight)?;
            out.coeffs[i - k] = &out.coeffs[i - k] + &term;
        }
    }
    Ok(out)
}

/// The projection `M ⊗ U -> A'` for given `(m, n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictedSetup {
    pub m: usize,
    pub n: usize,
    pub projector: FactorMap,
}

impl RestrictedSetup {
    pub fn dim_a_prime(&self) -> usize {
        self.m + self.n - 1
    }
}

fn check_order(m: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be positive".into()));
    }
    if n > m {
        return Err(Error::OrderViolation { m, n });
    }
    Ok(())
}

/// Monomial multiplication `S^{m-1}W* ⊗ S^{n-1}W* -> S^{m+n-2}W*`: the basis
/// vector at A-index `α·n + s` goes to monomial `α + s` with coefficient 1.
pub fn restriction_projector(m: usize, n: usize) -> Result<RestrictedSetup> {
    check_order(m, n)?;
    let q = FieldTag::Rationals;
    let rows = (0..m + n - 1)
        .map(|d| (0..m * n).map(|i| q.from_i64((i / n + i % n == d) as i64)).collect())
        .collect();
    Ok(RestrictedSetup { m, n, projector: FactorMap::new(q, rows)? })
}

/// A right inverse of [`restriction_projector`]: monomial `d` goes to the
/// basis vector `(α, s) = (min(d, m-1), d - α)`.
pub fn monomial_section(m: usize, n: usize) -> Result<FactorMap> {
    check_order(m, n)?;
    let q = FieldTag::Rationals;
    let rows = (0..m * n)
        .map(|i| {
            (0..m + n - 1)
                .map(|d| {
                    let alpha = d.min(m - 1);
                    q.from_i64((i == alpha * n + (d - alpha)) as i64)
                })
                .collect()
        })
        .collect();
    FactorMap::new(q, rows)
}

/// `π̃(M<m,n,l>) ∈ A' ⊗ B ⊗ C`.
pub fn restricted_tensor(m: usize, n: usize, l: usize) -> Result<Tensor3> {
    let setup = restriction_projector(m, n)?;
    project_factor_a(&matmul_tensor(m, n, l, FieldTag::Rationals)?, &setup.projector)
}

/// Koszul flattening of the restricted matrix multiplication tensor.
pub fn restricted_koszul(m: usize, n: usize, l: usize, p: usize) -> Result<KoszulMatrix> {
    koszul_flattening(&restricted_tensor(m, n, l)?, p)
}

/// Whether the transpose of the restricted flattening at `l = 1`, `p = n-1`
/// is surjective onto its `n·C(m+n-1, n-1)`-dimensional target.
pub fn dual_surjectivity_check(m: usize, n: usize) -> Result<bool> {
    let k = restricted_koszul(m, n, 1, n - 1)?;
    let dual = k.matrix.transpose();
    let target = n * binomial((m + n - 1) as u64, (n - 1) as u64) as usize;
    debug_assert_eq!(dual.rows(), target);
    Ok(compute_rank(&dual, &RankStrategy::Auto)?.rank == target)
}
