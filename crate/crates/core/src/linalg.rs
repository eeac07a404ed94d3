//! Small exact linear algebra over ℤ and ℚ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Integer sublattice of ℤ^n kept in row echelon (Hermite) form.
#[derive(Clone, Debug)]
pub struct IntLattice {
    dim: usize,
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl IntLattice {
    pub fn from_generators(dim: usize, gens: &[Vec<i64>]) -> Self {
        let mut rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| g.iter().map(|&x| x as i128).collect())
            .filter(|g: &Vec<i128>| g.iter().any(|&x| x != 0))
            .collect();
        let mut out = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..dim {
            loop {
                let nz: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][col] != 0).collect();
                if nz.len() <= 1 {
                    break;
                }
                let best = *nz.iter().min_by_key(|&&r| rows[r][col].abs()).unwrap();
                let p = rows[best][col];
                for &r in &nz {
                    if r != best {
                        let f = rows[r][col].div_euclid(p);
                        for c in 0..dim {
                            rows[r][c] -= f * rows[best][c];
                        }
                    }
                }
                rows.retain(|row| row.iter().any(|&x| x != 0));
            }
            if let Some(r) = (0..rows.len()).find(|&r| rows[r][col] != 0) {
                let mut row = rows.remove(r);
                if row[col] < 0 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                out.push(row);
                pivots.push(col);
            }
        }
        IntLattice { dim, rows: out, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            if w[..col].iter().any(|&x| x != 0) {
                return false;
            }
            if w[col] % row[col] != 0 {
                return false;
            }
            let f = w[col] / row[col];
            for c in col..self.dim {
                w[c] -= f * row[c];
            }
        }
        w.iter().all(|&x| x == 0)
    }
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn invert(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a = m.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Basis of the fixed space {v : m v = v} of an integer matrix.
pub fn fixed_space(m: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| rat(m[i][j] - i64::from(i == j))).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let lead = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= &lead;
        }
        for i in 0..n {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![rat(0); n];
            v[free] = rat(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

/// Dimension of the fixed space of an integer matrix acting on ℚ^n.
pub fn fixed_dim(m: &[Vec<i64>]) -> usize {
    let n = m.len();
    let diff: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| rat(m[i][j] - i64::from(i == j))).collect())
        .collect();
    n - rank(&diff)
}

/// Row vector times matrix.
pub fn row_times(v: &[Rat], m: &[Vec<Rat>]) -> Vec<Rat> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| v.iter().zip(m).map(|(x, row)| x * &row[j]).sum())
        .collect()
}

pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn rat_to_i64(x: &Rat) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    i64::try_from(x.to_integer()).ok()
}

pub fn all_nonneg(v: &[Rat]) -> bool {
    v.iter().all(|x| !x.is_negative())
}
