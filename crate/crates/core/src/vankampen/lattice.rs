//! Integer row lattice of the abelianised relators, in echelon form with the
//! unimodular transform tracked.

/// Row echelon basis `H = U R` of the integer span of the rows of `R`.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: Vec<Vec<i128>>,
    pivots: Vec<usize>,
    transform: Vec<Vec<i128>>,
    rows: usize,
}

fn axpy(dst: &mut [i128], k: i128, src: &[i128]) -> Option<()> {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = d.checked_sub(k.checked_mul(*s)?)?;
    }
    Some(())
}

impl Lattice {
    /// `None` if intermediate entries overflow.
    pub fn new(rows: &[Vec<i64>], cols: usize) -> Option<Lattice> {
        let m = rows.len();
        let mut a: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        let mut u: Vec<Vec<i128>> = (0..m)
            .map(|i| (0..m).map(|j| (i == j) as i128).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r0 = 0;
        for col in 0..cols {
            if r0 == m {
                break;
            }
            loop {
                let nz: Vec<usize> = (r0..m).filter(|&i| a[i][col] != 0).collect();
                if nz.is_empty() {
                    break;
                }
                let best = *nz.iter().min_by_key(|&&i| a[i][col].abs()).expect("nonempty");
                a.swap(r0, best);
                u.swap(r0, best);
                if nz.len() == 1 {
                    break;
                }
                let (head, tail) = a.split_at_mut(r0 + 1);
                let (uhead, utail) = u.split_at_mut(r0 + 1);
                for i in 0..tail.len() {
                    let v = tail[i][col];
                    if v != 0 {
                        let q = v.div_euclid(head[r0][col]);
                        axpy(&mut tail[i], q, &head[r0])?;
                        axpy(&mut utail[i], q, &uhead[r0])?;
                    }
                }
            }
            if a[r0][col] != 0 {
                if a[r0][col] < 0 {
                    a[r0].iter_mut().for_each(|v| *v = -*v);
                    u[r0].iter_mut().for_each(|v| *v = -*v);
                }
                pivots.push(col);
                r0 += 1;
            }
        }
        a.truncate(r0);
        u.truncate(r0);
        Some(Lattice {
            basis: a,
            pivots,
            transform: u,
            rows: m,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The generating rows are linearly independent.
    pub fn full_rank(&self) -> bool {
        self.rank() == self.rows
    }

    /// Coefficients over the echelon basis, if `v` lies in the lattice.
    fn basis_coefficients(&self, v: &[i64]) -> Option<Vec<i128>> {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let mut c = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v[p] % row[p] != 0 {
                return None;
            }
            let k = v[p] / row[p];
            axpy(&mut v, k, row)?;
            c.push(k);
        }
        v.iter().all(|&x| x == 0).then_some(c)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.basis_coefficients(v).is_some()
    }

    /// Some integer combination of the generating rows equal to `v`; unique
    /// when the rows are independent.
    pub fn row_coefficients(&self, v: &[i64]) -> Option<Vec<i64>> {
        let c = self.basis_coefficients(v)?;
        let mut k = vec![0i128; self.rows];
        for (ci, ui) in c.iter().zip(&self.transform) {
            for (kj, uij) in k.iter_mut().zip(ui) {
                *kj = kj.checked_add(ci.checked_mul(*uij)?)?;
            }
        }
        k.into_iter().map(|x| i64::try_from(x).ok()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_coefficients() {
        let rows = vec![vec![2, 0, 1], vec![0, 3, 1]];
        let l = Lattice::new(&rows, 3).unwrap();
        assert!(l.full_rank());
        assert!(l.contains(&[2, 3, 2]));
        assert!(!l.contains(&[1, 0, 0]));
        assert_eq!(l.row_coefficients(&[4, -3, 1]), Some(vec![2, -1]));
    }

    #[test]
    fn dependent_rows() {
        let rows = vec![vec![1, 1], vec![2, 2], vec![0, 1]];
        let l = Lattice::new(&rows, 2).unwrap();
        assert_eq!(l.rank(), 2);
        assert!(!l.full_rank());
        let k = l.row_coefficients(&[3, 5]).unwrap();
        let sum: Vec<i64> = (0..2)
            .map(|j| (0..3).map(|i| k[i] * rows[i][j]).sum())
            .collect();
        assert_eq!(sum, vec![3, 5]);
    }
}
