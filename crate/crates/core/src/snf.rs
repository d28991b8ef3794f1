//! Smith normal form of small integer matrices.
//!
//! Only the right transform is tracked: for a relation matrix `A` (one
//! relation per row) the quotient `Z^r / rowspace(A)` is read off as
//! `x -> x * V`, coordinate `i` reduced modulo the `i`-th diagonal entry.

/// Diagonal entries and right transform of `U * A * V = D`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diagonal: Vec<i64>,
    /// `cols x cols`, unimodular.
    pub right: Vec<Vec<i64>>,
}

pub fn smith_normal_form(a: &[Vec<i64>], cols: usize) -> Smith {
    let mut m: Vec<Vec<i64>> = a.to_vec();
    let rows = m.len();
    let mut v: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block becomes the pivot
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut done = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                if q != 0 {
                    for i in 0..rows {
                        m[i][j] -= q * m[i][t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                // divisibility: pivot must divide the whole trailing block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % m[t][t] != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the smallest remainder into the pivot slot
            let (bi, bj) = (t..rows)
                .map(|i| (i, t))
                .chain((t..cols).map(|j| (t, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].abs())
                .unwrap();
            if bi != t {
                m.swap(t, bi);
            }
            if bj != t {
                swap_cols(&mut m, t, bj);
                swap_cols(&mut v, t, bj);
            }
        }
        if m[t][t] < 0 {
            for j in t..cols {
                m[t][j] = -m[t][j];
            }
        }
        t += 1;
    }

    let diagonal = (0..cols).map(|i| if i < rows { m[i][i] } else { 0 }).collect();
    Smith { diagonal, right: v }
}

fn swap_cols(m: &mut [Vec<i64>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        a.iter()
            .map(|row| {
                (0..b[0].len())
                    .map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn diagonal_of_z4_by_z6() {
        let s = smith_normal_form(&[vec![4, 0], vec![0, 6]], 2);
        assert_eq!(s.diagonal, vec![2, 12]);
    }

    #[test]
    fn klein_mod_diagonal() {
        let s = smith_normal_form(&[vec![2, 0], vec![0, 2], vec![1, 1]], 2);
        assert_eq!(s.diagonal, vec![1, 2]);
        // the relation lattice maps into diag(1, 2) * Z^2
        let img = mat_mul(&[vec![2, 0], vec![0, 2], vec![1, 1]], &s.right);
        for row in img {
            assert_eq!(row[1] % 2, 0);
        }
    }
}
