//! Gaussian elimination over an exact field.

use super::Scalar;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut Vec<Vec<S>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot is nonzero");
        for c in col..ncols {
            m[row][c] = m[row][c].mul(&inv);
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..ncols {
                    if !m[row][c].is_zero() {
                        let v = m[r][c].sub(&f.mul(&m[row][c]));
                        m[r][c] = v;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// A basis of the right kernel `{v : A v = 0}`, one vector per free column.
pub fn kernel<S: Scalar>(rows: &[Vec<S>], ncols: usize, one: &S) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let zero = one.zero_like();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = m[r][free].neg();
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{FiniteSpec, FiniteTower, Tower};

    #[test]
    fn kernel_annihilates() {
        let t = FiniteTower::new(3, &FiniteSpec::from_seed(31, 1)).unwrap();
        let e = |v: i64| t.int(v);
        let a = vec![vec![e(1), e(2), e(3)], vec![e(2), e(4), e(6)], vec![e(1), e(0), e(1)]];
        assert_eq!(rank(&a, 3), 2);
        let k = kernel(&a, 3, &t.one());
        assert_eq!(k.len(), 1);
        for row in &a {
            let s = row.iter().zip(&k[0]).fold(t.zero(), |acc, (x, y)| acc.add(&x.mul(y)));
            assert!(s.is_zero());
        }
    }
}
