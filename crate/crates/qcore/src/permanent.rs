use crate::linalg::{CMatrix, C64};
use crate::{QError, QResult};

pub const PERMANENT_MAX_N: usize = 20;

/// Ryser's formula, visiting column subsets in Gray-code order so each step
/// updates the row sums with one column.
pub fn permanent(a: &CMatrix) -> QResult<C64> {
    if !a.is_square() {
        return Err(QError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n > PERMANENT_MAX_N {
        return Err(QError::TooLarge {
            n,
            limit: PERMANENT_MAX_N,
        });
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    for k in 1u32..(1u32 << n) {
        let gray = k ^ (k >> 1);
        let j = k.trailing_zeros() as usize;
        if gray & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}
