//! Sparse exact 3-tensors in `A ⊗ B ⊗ C`.
//!
//! Entries are kept sorted lexicographically by `(i, j, k)` with zeros never
//! stored. Tensors are immutable; every operation returns a new value.
//!
//! Classical flattenings use these layouts (the remaining two factors form
//! the row index, the flattened factor is the column):
//!
//! | mode | shape       | row       | column |
//! |------|-------------|-----------|--------|
//! | A    | (b·c) × a   | `j·c + k` | `i`    |
//! | B    | (a·c) × b   | `i·c + k` | `j`    |
//! | C    | (a·b) × c   | `i·b + j` | `k`    |

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalars::{FieldTag, Scalar};

pub type Entry = (usize, usize, usize, Scalar);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    field: FieldTag,
    entries: Vec<Entry>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    A,
    B,
    C,
}

impl Tensor3 {
    /// Validating constructor. Entry order is irrelevant; duplicates, zeros,
    /// out-of-range indices and foreign scalars are rejected.
    pub fn new(field: FieldTag, dims: (usize, usize, usize), mut entries: Vec<Entry>) -> Result<Self> {
        check_dims(dims)?;
        for (i, j, k, v) in &entries {
            if *i >= dims.0 || *j >= dims.1 || *k >= dims.2 {
                return Err(Error::DimensionMismatch(format!("entry ({i}, {j}, {k}) outside dims {dims:?}")));
            }
            if !field.contains(v) {
                return Err(Error::FieldMismatch(format!("{} entry in {field} tensor", v.field())));
            }
            if v.is_zero() {
                return Err(Error::Parse(format!("stored zero at ({i}, {j}, {k})")));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1, e.2));
        if let Some(w) = entries.windows(2).find(|w| key(&w[0]) == key(&w[1])) {
            return Err(Error::DuplicateEntry(vec![w[0].0, w[0].1, w[0].2]));
        }
        Ok(Tensor3 { dims, field, entries })
    }

    pub fn zero(field: FieldTag, dims: (usize, usize, usize)) -> Result<Self> {
        check_dims(dims)?;
        Ok(Tensor3 { dims, field, entries: Vec::new() })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<&Scalar> {
        self.entries.binary_search_by_key(&(i, j, k), key).ok().map(|x| &self.entries[x].3)
    }

    pub fn to_json(&self) -> String {
        let file = TensorFile {
            field: self.field.to_string(),
            dims: [self.dims.0, self.dims.1, self.dims.2],
            entries: self.entries.iter().map(|(i, j, k, v)| (*i, *j, *k, v.to_string())).collect(),
        };
        serde_json::to_string(&file).expect("tensor serializes")
    }

    /// Parses the tensor file format; entries must be strictly sorted.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: TensorFile = serde_json::from_str(s)?;
        let field: FieldTag = file.field.parse()?;
        let dims = (file.dims[0], file.dims[1], file.dims[2]);
        let mut entries = Vec::with_capacity(file.entries.len());
        for (i, j, k, v) in file.entries {
            if let Some(last) = entries.last() {
                if key(last) >= (i, j, k) {
                    return Err(Error::Parse(format!("entries not strictly sorted at ({i}, {j}, {k})")));
                }
            }
            entries.push((i, j, k, field.parse_scalar(&v)?));
        }
        Tensor3::new(field, dims, entries)
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn content_hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    field: String,
    dims: [usize; 3],
    entries: Vec<(usize, usize, usize, String)>,
}

fn key(e: &Entry) -> (usize, usize, usize) {
    (e.0, e.1, e.2)
}

fn check_dims(dims: (usize, usize, usize)) -> Result<()> {
    if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
        return Err(Error::InvalidDimension(format!("tensor dims must be positive, got {dims:?}")));
    }
    Ok(())
}

/// The structure tensor of `m×n` by `n×l` matrix multiplication, in
/// `(M⊗N*) ⊗ (N⊗L*) ⊗ (L⊗M*)` with flat indices `i = α·n + s`,
/// `j = s·l + t`, `k = t·m + α`.
pub fn matmul_tensor(m: usize, n: usize, l: usize, field: FieldTag) -> Result<Tensor3> {
    if m == 0 || n == 0 || l == 0 {
        return Err(Error::InvalidDimension(format!(
            "matrix multiplication sizes must be positive, got <{m},{n},{l}>"
        )));
    }
    let mut entries = Vec::with_capacity(m * n * l);
    for alpha in 0..m {
        for s in 0..n {
            for t in 0..l {
                entries.push((alpha * n + s, s * l + t, t * m + alpha, field.one()));
            }
        }
    }
    entries.sort_by_key(key);
    Ok(Tensor3 { dims: (m * n, n * l, m * l), field, entries })
}

fn vector_field(v: &[Scalar]) -> Result<FieldTag> {
    let field =
        v.first().map(Scalar::field).ok_or_else(|| Error::InvalidDimension("empty factor vector".into()))?;
    if v.iter().any(|x| x.field() != field) {
        return Err(Error::FieldMismatch("mixed fields in factor vector".into()));
    }
    if v.iter().all(Scalar::is_zero) {
        return Err(Error::ZeroFactor);
    }
    Ok(field)
}

/// `u ⊗ v ⊗ w`.
pub fn rank_one_tensor(u: &[Scalar], v: &[Scalar], w: &[Scalar]) -> Result<Tensor3> {
    let field = vector_field(u)?;
    for f in [vector_field(v)?, vector_field(w)?] {
        if f != field {
            return Err(Error::FieldMismatch(format!("{field} vs {f}")));
        }
    }
    let mut entries = Vec::new();
    for (i, ui) in u.iter().enumerate().filter(|x| !x.1.is_zero()) {
        for (j, vj) in v.iter().enumerate().filter(|x| !x.1.is_zero()) {
            let uv = ui * vj;
            for (k, wk) in w.iter().enumerate().filter(|x| !x.1.is_zero()) {
                entries.push((i, j, k, &uv * wk));
            }
        }
    }
    Ok(Tensor3 { dims: (u.len(), v.len(), w.len()), field, entries })
}

pub fn add_tensors(s: &Tensor3, t: &Tensor3) -> Result<Tensor3> {
    if s.dims != t.dims {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", s.dims, t.dims)));
    }
    if s.field != t.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", s.field, t.field)));
    }
    let (mut a, mut b) = (s.entries.iter().peekable(), t.entries.iter().peekable());
    let mut entries = Vec::with_capacity(s.nnz() + t.nnz());
    loop {
        match (a.peek(), b.peek()) {
            (Some(x), Some(y)) if key(x) == key(y) => {
                let v = &x.3 + &y.3;
                if !v.is_zero() {
                    entries.push((x.0, x.1, x.2, v));
                }
                a.next();
                b.next();
            }
            (Some(x), Some(y)) if key(x) < key(y) => entries.push(a.next().unwrap().clone()),
            (Some(_), Some(_)) => entries.push(b.next().unwrap().clone()),
            (Some(_), None) => entries.push(a.next().unwrap().clone()),
            (None, Some(_)) => entries.push(b.next().unwrap().clone()),
            (None, None) => break,
        }
    }
    Ok(Tensor3 { dims: s.dims, field: s.field, entries })
}

/// `λ·T`; scaling by zero is rejected.
pub fn scale_tensor(t: &Tensor3, lambda: &Scalar) -> Result<Tensor3> {
    if !t.field.contains(lambda) {
        return Err(Error::FieldMismatch(format!("{} scalar for {} tensor", lambda.field(), t.field)));
    }
    if lambda.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let entries = t.entries.iter().map(|(i, j, k, v)| (*i, *j, *k, v * lambda)).collect();
    Ok(Tensor3 { dims: t.dims, field: t.field, entries })
}

pub fn flatten_classical(t: &Tensor3, mode: Mode) -> SparseMatrix {
    let (a, b, c) = t.dims;
    let (rows, cols) = match mode {
        Mode::A => (b * c, a),
        Mode::B => (a * c, b),
        Mode::C => (a * b, c),
    };
    let mut entries: Vec<_> = t
        .entries
        .iter()
        .map(|(i, j, k, v)| {
            let (r, col) = match mode {
                Mode::A => (j * c + k, *i),
                Mode::B => (i * c + k, *j),
                Mode::C => (i * b + j, *k),
            };
            (r, col, v.clone())
        })
        .collect();
    entries.sort_by_key(|e| (e.0, e.1));
    SparseMatrix::from_sorted_unchecked(rows, cols, t.field, entries)
}

/// A linear map between factor spaces, stored densely as a
/// `target_dim × source_dim` matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactorMap {
    source_dim: usize,
    target_dim: usize,
    field: FieldTag,
    matrix: Vec<Scalar>,
}

impl FactorMap {
    /// `rows` is the row-major `target_dim × source_dim` matrix.
    pub fn new(field: FieldTag, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let target_dim = rows.len();
        let source_dim = rows.first().map_or(0, Vec::len);
        if target_dim == 0 || source_dim == 0 {
            return Err(Error::InvalidDimension("factor map needs positive dimensions".into()));
        }
        if rows.iter().any(|r| r.len() != source_dim) {
            return Err(Error::DimensionMismatch("ragged factor map rows".into()));
        }
        if rows.iter().flatten().any(|x| !field.contains(x)) {
            return Err(Error::FieldMismatch(format!("factor map entries not in {field}")));
        }
        Ok(FactorMap { source_dim, target_dim, field, matrix: rows.into_iter().flatten().collect() })
    }

    pub fn identity(dim: usize, field: FieldTag) -> Result<Self> {
        FactorMap::new(
            field,
            (0..dim).map(|r| (0..dim).map(|c| field.from_i64((r == c) as i64)).collect()).collect(),
        )
    }

    pub fn zero(target_dim: usize, source_dim: usize, field: FieldTag) -> Result<Self> {
        FactorMap::new(field, vec![vec![field.zero(); source_dim]; target_dim])
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn get(&self, target: usize, source: usize) -> &Scalar {
        &self.matrix[target * self.source_dim + source]
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(
            self.target_dim,
            self.source_dim,
            self.field,
            (0..self.target_dim)
                .flat_map(|r| (0..self.source_dim).map(move |c| (r, c, self.get(r, c).clone()))),
        )
        .expect("factor map entries are in range")
    }
}

/// Applies `P` to the A factor: `T'_{i'jk} = Σ_i P_{i'i} T_{ijk}`.
pub fn project_factor_a(t: &Tensor3, p: &FactorMap) -> Result<Tensor3> {
    if p.source_dim != t.dims.0 {
        return Err(Error::DimensionMismatch(format!(
            "projection source {} but tensor has a = {}",
            p.source_dim, t.dims.0
        )));
    }
    if p.field != t.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", p.field, t.field)));
    }
    let mut acc = std::collections::BTreeMap::new();
    for (i, j, k, v) in &t.entries {
        for target in 0..p.target_dim {
            let coeff = p.get(target, *i);
            if coeff.is_zero() {
                continue;
            }
            let term = coeff * v;
            acc.entry((target, *j, *k)).and_modify(|x: &mut Scalar| *x = &*x + &term).or_insert(term);
        }
    }
    let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((i, j, k), v)| (i, j, k, v)).collect();
    Ok(Tensor3 { dims: (p.target_dim, t.dims.1, t.dims.2), field: t.field, entries })
}
