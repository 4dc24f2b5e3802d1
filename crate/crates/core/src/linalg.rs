//! Numerical rank by Householder QR with column pivoting.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankInfo<T> {
    pub rank: usize,
    /// `|R_kk|` of the last retained pivot divided by the largest row norm;
    /// zero when the rank is zero.
    pub smallest_retained: T,
}

/// Rank of the matrix with the given rows. A pivot is retained while its
/// remaining column norm exceeds `rtol` times the largest row norm.
pub fn numerical_rank<T: Scalar>(rows: &[Vec<T>], rtol: T) -> RankInfo<T> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let row_norm = rows
        .iter()
        .map(|r| r.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt())
        .fold(T::zero(), T::max);
    if m == 0 || n == 0 || row_norm == T::zero() {
        return RankInfo {
            rank: 0,
            smallest_retained: T::zero(),
        };
    }
    let threshold = rtol * row_norm;

    // column-major working copy
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut rank = 0;
    let mut last = T::zero();
    for k in 0..m.min(n) {
        let (pivot, norm) = (k..n)
            .map(|j| (j, tail_norm(&cols[j], k)))
            .fold((k, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm <= threshold {
            break;
        }
        cols.swap(k, pivot);
        // reflector v = x + sign(x_k) |x| e_k on rows k..m
        let mut v: Vec<T> = cols[k][k..].to_vec();
        let alpha = if v[0] >= T::zero() { norm } else { -norm };
        v[0] += alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, x| acc + *x * *x);
        for col in cols.iter_mut().skip(k) {
            let dot = v
                .iter()
                .zip(&col[k..])
                .fold(T::zero(), |acc, (a, b)| acc + *a * *b);
            let f = T::lit(2.0) * dot / vnorm2;
            for (c, vi) in col[k..].iter_mut().zip(&v) {
                *c -= f * *vi;
            }
        }
        rank += 1;
        last = norm;
    }
    RankInfo {
        rank,
        smallest_retained: last / row_norm,
    }
}

fn tail_norm<T: Scalar>(col: &[T], k: usize) -> T {
    col[k..].iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt()
}
