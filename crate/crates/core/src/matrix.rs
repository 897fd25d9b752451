//! Sparse matrices over an exact field and their text file format.
//!
//! File layout: a header line `rows cols field`, then one `r c val` line per
//! nonzero entry, sorted by `(r, c)`. Values use the scalar serialization
//! (`num/den` for rationals, decimal residues for `F_p`).

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalars::{FieldTag, Scalar};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    field: FieldTag,
    /// Sorted by (row, col), no duplicates, no zeros.
    entries: Vec<(usize, usize, Scalar)>,
}

impl SparseMatrix {
    /// Strict constructor: rejects duplicates, stored zeros, out-of-range
    /// indices and foreign scalars. Entry order is irrelevant.
    pub fn new(
        rows: usize,
        cols: usize,
        field: FieldTag,
        mut entries: Vec<(usize, usize, Scalar)>,
    ) -> Result<Self> {
        for (r, c, v) in &entries {
            check_entry(rows, cols, field, *r, *c, v)?;
            if v.is_zero() {
                return Err(Error::Parse(format!("stored zero at ({r}, {c})")));
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEntry(vec![w[0].0, w[0].1]));
        }
        Ok(SparseMatrix { rows, cols, field, entries })
    }

    /// Sums repeated coordinates and drops the zeros that result.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        field: FieldTag,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (r, c, v) in triplets {
            check_entry(rows, cols, field, r, c, &v)?;
            acc.entry((r, c)).and_modify(|x| *x = &*x + &v).or_insert(v);
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        Ok(SparseMatrix { rows, cols, field, entries })
    }

    pub(crate) fn from_sorted_unchecked(
        rows: usize,
        cols: usize,
        field: FieldTag,
        entries: Vec<(usize, usize, Scalar)>,
    ) -> Self {
        debug_assert!(entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        SparseMatrix { rows, cols, field, entries }
    }

    pub fn zero(rows: usize, cols: usize, field: FieldTag) -> Self {
        SparseMatrix { rows, cols, field, entries: Vec::new() }
    }

    pub fn identity(n: usize, field: FieldTag) -> Self {
        let entries = (0..n).map(|i| (i, i, field.one())).collect();
        SparseMatrix { rows: n, cols: n, field, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Scalar)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Scalar> {
        self.entries.binary_search_by_key(&(r, c), |e| (e.0, e.1)).ok().map(|i| &self.entries[i].2)
    }

    /// All entries are rationals with denominator 1.
    pub fn has_integer_entries(&self) -> bool {
        self.field == FieldTag::Rationals && self.entries.iter().all(|e| e.2.is_integer())
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by_key(|a| (a.0, a.1));
        SparseMatrix { rows: self.cols, cols: self.rows, field: self.field, entries }
    }

    /// Entrywise sum of two matrices of equal shape and field.
    pub fn add(&self, other: &SparseMatrix) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        SparseMatrix::from_triplets(
            self.rows,
            self.cols,
            self.field,
            self.entries.iter().chain(&other.entries).cloned(),
        )
    }

    /// Dense row-major copy; zero entries filled in.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.field)?;
        for (r, c, v) in &self.entries {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the text format; entries must be strictly sorted by `(r, c)`.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))??;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let rows = parse_index(head[0])?;
        let cols = parse_index(head[1])?;
        let field: FieldTag = head[2].parse()?;
        let mut entries: Vec<(usize, usize, Scalar)> = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad entry line {line:?}")));
            }
            let (r, c) = (parse_index(parts[0])?, parse_index(parts[1])?);
            let v = field.parse_scalar(parts[2])?;
            check_entry(rows, cols, field, r, c, &v)?;
            if v.is_zero() {
                return Err(Error::Parse(format!("stored zero at ({r}, {c})")));
            }
            if let Some(last) = entries.last() {
                if (last.0, last.1) >= (r, c) {
                    return Err(Error::Parse(format!("entries not strictly sorted at ({r}, {c})")));
                }
            }
            entries.push((r, c, v));
        }
        Ok(SparseMatrix { rows, cols, field, entries })
    }

    pub fn from_text(s: &str) -> Result<Self> {
        SparseMatrix::read_from(s.as_bytes())
    }
}

fn parse_index(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad index {s:?}")))
}

fn check_entry(rows: usize, cols: usize, field: FieldTag, r: usize, c: usize, v: &Scalar) -> Result<()> {
    if r >= rows || c >= cols {
        return Err(Error::DimensionMismatch(format!("entry ({r}, {c}) outside {rows}x{cols}")));
    }
    if !field.contains(v) {
        return Err(Error::FieldMismatch(format!("{} entry in {field} matrix", v.field())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        FieldTag::Rationals.from_i64(n)
    }

    #[test]
    fn strict_constructor_rejects_bad_entries() {
        let f = FieldTag::Rationals;
        assert!(SparseMatrix::new(2, 2, f, vec![(0, 0, q(0))]).is_err());
        assert!(SparseMatrix::new(2, 2, f, vec![(2, 0, q(1))]).is_err());
        assert!(matches!(
            SparseMatrix::new(2, 2, f, vec![(0, 1, q(1)), (0, 1, q(2))]),
            Err(Error::DuplicateEntry(_))
        ));
        let fp = FieldTag::prime(5).unwrap();
        assert!(SparseMatrix::new(2, 2, f, vec![(0, 0, fp.one())]).is_err());
    }

    #[test]
    fn triplets_accumulate_and_cancel() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            FieldTag::Rationals,
            vec![(0, 0, q(1)), (1, 1, q(2)), (0, 0, q(-1)), (1, 1, q(3))],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), Some(&q(5)));
    }

    #[test]
    fn text_format() {
        let m = SparseMatrix::new(
            3,
            2,
            FieldTag::Rationals,
            vec![(2, 1, FieldTag::Rationals.parse_scalar("-3/4").unwrap()), (0, 0, q(1))],
        )
        .unwrap();
        let text = m.to_text();
        assert_eq!(text, "3 2 Q\n0 0 1\n2 1 -3/4\n");
        assert_eq!(SparseMatrix::from_text(&text).unwrap(), m);
        assert!(SparseMatrix::from_text("3 2 Q\n2 1 1\n0 0 1\n").is_err());
        assert!(SparseMatrix::from_text("3 2 Q\n0 0 0\n").is_err());
        assert!(SparseMatrix::from_text("3 2\n").is_err());
        let fp = SparseMatrix::from_text("1 1 Fp:7\n0 0 3\n").unwrap();
        assert_eq!(fp.field(), FieldTag::prime(7).unwrap());
    }

    #[test]
    fn transpose_swaps_shape() {
        let m = SparseMatrix::new(1, 3, FieldTag::Rationals, vec![(0, 2, q(4))]).unwrap();
        let t = m.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 1));
        assert_eq!(t.get(2, 0), Some(&q(4)));
        assert_eq!(t.transpose(), m);
    }
}
