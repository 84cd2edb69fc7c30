//! Hermite and Smith normal forms over the integers, with unimodular
//! transforms, and integer kernel lattices derived from them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Row-style Hermite normal form `H = U * m`.
///
/// Nonzero rows of `H` come first, each with a positive pivot strictly to the
/// right of the pivot above it; entries above a pivot lie in `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut pivot_row = 0;
    for c in 0..m.cols() {
        if pivot_row == m.rows() {
            break;
        }
        // Euclid down the column until a single nonzero entry remains at pivot_row.
        while let Some(best) = (pivot_row..m.rows())
            .filter(|&r| !h.get(r, c).is_zero())
            .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()))
        {
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..m.rows() {
                if h.get(r, c).is_zero() {
                    continue;
                }
                let q = -(h.get(r, c) / h.get(pivot_row, c));
                h.add_row_multiple(r, pivot_row, &q);
                u.add_row_multiple(r, pivot_row, &q);
                if !h.get(r, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(pivot_row, c).is_zero() {
            continue;
        }
        if h.get(pivot_row, c).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let pivot = h.get(pivot_row, c).clone();
        for r in 0..pivot_row {
            let q = -h.get(r, c).div_floor(&pivot);
            h.add_row_multiple(r, pivot_row, &q);
            u.add_row_multiple(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form `D = U * m * V` with `d_1 | d_2 | ...` on the diagonal,
/// all nonnegative.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub rank: usize,
}

impl SmithForm {
    /// Nonzero diagonal entries in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Checks `U * m * V = D`, unimodularity of both transforms and the
    /// divisibility chain. Requires both transforms to have been tracked.
    pub fn certify(&self, m: &IntMatrix) -> Result<()> {
        let (Some(u), Some(v)) = (&self.u, &self.v) else {
            return Err(Error::invariant("SNF certificate needs both transforms"));
        };
        if u.mul(m)?.mul(v)? != self.d {
            return Err(Error::invariant("SNF certificate: U*m*V != D"));
        }
        for (name, t) in [("U", u), ("V", v)] {
            if t.determinant()?.abs() != BigInt::one() {
                return Err(Error::invariant(format!("SNF certificate: {name} is not unimodular")));
            }
        }
        check_diagonal(&self.d, self.rank)
    }
}

fn check_diagonal(d: &IntMatrix, rank: usize) -> Result<()> {
    for r in 0..d.rows() {
        for c in 0..d.cols() {
            let x = d.get(r, c);
            let on_diag = r == c && r < rank;
            if on_diag && !x.is_positive() {
                return Err(Error::invariant("SNF: nonpositive invariant factor"));
            }
            if !on_diag && !x.is_zero() {
                return Err(Error::invariant("SNF: off-diagonal entry"));
            }
        }
    }
    for i in 1..rank {
        if !d.get(i, i).is_multiple_of(d.get(i - 1, i - 1)) {
            return Err(Error::invariant("SNF: divisibility chain broken"));
        }
    }
    Ok(())
}

/// Which unimodular transforms to accumulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Track {
    pub left: bool,
    pub right: bool,
}

impl Track {
    pub const BOTH: Track = Track {
        left: true,
        right: true,
    };
    pub const RIGHT: Track = Track {
        left: false,
        right: true,
    };
    pub const NONE: Track = Track {
        left: false,
        right: false,
    };
}

pub fn snf(m: &IntMatrix) -> SmithForm {
    snf_tracking(m, Track::BOTH)
}

/// Smith normal form by elementary row and column operations, always pivoting
/// on an entry of least absolute value.
pub fn snf_tracking(m: &IntMatrix, track: Track) -> SmithForm {
    let mut a = m.clone();
    let mut u = track.left.then(|| IntMatrix::identity(m.rows()));
    let mut v = track.right.then(|| IntMatrix::identity(m.cols()));
    let (rows, cols) = (m.rows(), m.cols());

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = min_entry(&a, t..rows, t..cols) else {
            break;
        };
        swap_rows(&mut a, &mut u, t, pr);
        swap_cols(&mut a, &mut v, t, pc);

        loop {
            // Clear column t below and row t to the right.
            let mut residue = false;
            for r in t + 1..rows {
                if a.get(r, t).is_zero() {
                    continue;
                }
                let q = -(a.get(r, t) / a.get(t, t));
                add_rows(&mut a, &mut u, r, t, &q);
                residue |= !a.get(r, t).is_zero();
            }
            for c in t + 1..cols {
                if a.get(t, c).is_zero() {
                    continue;
                }
                let q = -(a.get(t, c) / a.get(t, t));
                add_cols(&mut a, &mut v, c, t, &q);
                residue |= !a.get(t, c).is_zero();
            }
            if residue {
                // A smaller remainder appeared; move it to the pivot and repeat.
                let col_best = min_entry(&a, t..rows, t..t + 1);
                let row_best = min_entry(&a, t..t + 1, t..cols);
                let (pr, pc) = match (col_best, row_best) {
                    (Some(x), Some(y)) => {
                        if a.get(x.0, x.1).abs() <= a.get(y.0, y.1).abs() {
                            x
                        } else {
                            y
                        }
                    }
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => unreachable!("pivot itself is nonzero"),
                };
                swap_rows(&mut a, &mut u, t, pr);
                swap_cols(&mut a, &mut v, t, pc);
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and repeat.
            let pivot = a.get(t, t).abs();
            if pivot.is_one() {
                break;
            }
            let offender = (t + 1..rows)
                .find(|&r| (t + 1..cols).any(|c| !a.get(r, c).is_multiple_of(&pivot)));
            match offender {
                Some(r) => add_rows(&mut a, &mut u, t, r, &BigInt::one()),
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_mut() {
                u.negate_row(t);
            }
        }
        t += 1;
    }
    SmithForm {
        d: a,
        u,
        v,
        rank: t,
    }
}

fn min_entry(
    a: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for r in rows {
        for c in cols.clone() {
            let x = a.get(r, c);
            if x.is_zero() {
                continue;
            }
            let abs = x.abs();
            let better = best.as_ref().is_none_or(|(_, b)| abs < *b);
            if better {
                let unit = abs.is_one();
                best = Some(((r, c), abs));
                if unit {
                    return best.map(|(p, _)| p);
                }
            }
        }
    }
    best.map(|(p, _)| p)
}

fn swap_rows(a: &mut IntMatrix, u: &mut Option<IntMatrix>, i: usize, j: usize) {
    a.swap_rows(i, j);
    if let Some(u) = u.as_mut() {
        u.swap_rows(i, j);
    }
}

fn swap_cols(a: &mut IntMatrix, v: &mut Option<IntMatrix>, i: usize, j: usize) {
    a.swap_cols(i, j);
    if let Some(v) = v.as_mut() {
        v.swap_cols(i, j);
    }
}

fn add_rows(a: &mut IntMatrix, u: &mut Option<IntMatrix>, target: usize, source: usize, q: &BigInt) {
    a.add_row_multiple(target, source, q);
    if let Some(u) = u.as_mut() {
        u.add_row_multiple(target, source, q);
    }
}

fn add_cols(a: &mut IntMatrix, v: &mut Option<IntMatrix>, target: usize, source: usize, q: &BigInt) {
    a.add_col_multiple(target, source, q);
    if let Some(v) = v.as_mut() {
        v.add_col_multiple(target, source, q);
    }
}

pub fn rank(m: &IntMatrix) -> usize {
    snf_tracking(m, Track::NONE).rank
}

/// Basis of the integer kernel `{x : m x = 0}`.
///
/// The trailing columns of the right SNF transform span the kernel; the basis
/// is then put into Hermite normal form, which makes it unique and keeps
/// coordinates small. Every vector is primitive.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let smith = snf_tracking(m, Track::RIGHT);
    let v = smith.v.expect("right transform tracked");
    let columns: Vec<Vec<BigInt>> = (smith.rank..m.cols()).map(|c| v.column(c)).collect();
    if columns.is_empty() {
        return Vec::new();
    }
    let basis = IntMatrix::from_columns(m.cols(), &columns)
        .expect("columns have matching length")
        .transpose();
    let (h, _) = hnf(&basis);
    (0..h.rows())
        .map(|r| h.row(r).to_vec())
        .filter(|row| row.iter().any(|x| !x.is_zero()))
        .collect()
}
