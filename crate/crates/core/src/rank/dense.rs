use rayon::prelude::*;

use super::modular::ModArith;

const PARALLEL_MIN_WORK: usize = 1 << 15;

/// Row echelon reduction of a dense `rows × cols` buffer (internal
/// representation values). Pivots are the first nonzero row at or below the
/// current rank in each column.
pub(crate) fn dense_rank<A: ModArith>(arith: &A, rows: usize, cols: usize, mut buf: Vec<u64>) -> usize {
    debug_assert_eq!(buf.len(), rows * cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(found) = (rank..rows).find(|&r| buf[r * cols + col] != 0) else {
            continue;
        };
        if found != rank {
            for c in col..cols {
                buf.swap(found * cols + c, rank * cols + c);
            }
        }
        let (top, bottom) = buf.split_at_mut((rank + 1) * cols);
        let pivot_row = &top[rank * cols..];
        let inv = arith.inv(pivot_row[col]);
        let support: Vec<(usize, u64)> =
            (col + 1..cols).filter(|&c| pivot_row[c] != 0).map(|c| (c, pivot_row[c])).collect();
        let reduce = |row: &mut [u64]| {
            let x = row[col];
            if x == 0 {
                return;
            }
            let f = arith.mul(x, inv);
            row[col] = 0;
            for &(c, v) in &support {
                row[c] = arith.sub(row[c], arith.mul(f, v));
            }
        };
        if bottom.len() * support.len().max(1) / cols.max(1) >= PARALLEL_MIN_WORK {
            bottom.par_chunks_mut(cols).for_each(reduce);
        } else {
            bottom.chunks_mut(cols).for_each(reduce);
        }
        rank += 1;
    }
    rank
}
