//! Dense integer matrices: Smith and Hermite normal forms.
//!
//! All matrices here are tiny (ideal bases, boundary maps of the quotient
//! complex), so entries are plain `i64` and overflow is a bug.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = i64;
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IMat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged matrix");
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        i64::try_from(sign * a[n * n - 1]).expect("determinant overflow")
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += k * v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += k * v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and the
/// diagonal of `d` non-negative with each entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
}

impl Smith {
    /// Diagonal entries (invariant factors, including trailing zeros).
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }
}

pub fn smith(a: &IMat) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IMat::identity(m);
    let mut v = IMat::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d[(i, j)].abs();
                    if x != 0 && best.map_or(true, |(bi, bj)| x < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d[(t, t)];
            let mut dirty = false;
            for i in t + 1..m {
                let q = d[(i, t)] / p;
                if q != 0 {
                    d.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                dirty |= d[(i, t)] != 0;
            }
            for j in t + 1..n {
                let q = d[(t, j)] / p;
                if q != 0 {
                    d.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                }
                dirty |= d[(t, j)] != 0;
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| d[(i, j)] % p != 0);
            match offender {
                Some((i, _)) => {
                    d.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, d, v }
}

/// Upper-triangular Hermite basis of a full-rank lattice in `Z^g`, given by
/// (possibly redundant) generating columns. Column `j` has zeros below row
/// `j`, a positive diagonal, and entries above the diagonal reduced modulo
/// the diagonal entry of their row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hermite {
    basis: IMat,
}

impl Hermite {
    pub fn from_generators(gens: &IMat) -> Option<Hermite> {
        let g = gens.rows;
        let mut cols: Vec<Vec<i64>> = (0..gens.cols).map(|j| gens.column(j)).collect();
        let mut pivots: Vec<Vec<i64>> = vec![Vec::new(); g];
        for r in (0..g).rev() {
            // Euclid across the free columns on row r.
            loop {
                let nonzero: Vec<usize> = (0..cols.len()).filter(|&j| cols[j][r] != 0).collect();
                if nonzero.len() <= 1 {
                    break;
                }
                let &min = nonzero.iter().min_by_key(|&&j| cols[j][r].abs()).unwrap();
                for &j in &nonzero {
                    if j == min {
                        continue;
                    }
                    let q = cols[j][r] / cols[min][r];
                    for i in 0..g {
                        cols[j][i] -= q * cols[min][i];
                    }
                }
            }
            let idx = (0..cols.len()).find(|&j| cols[j][r] != 0)?;
            let mut piv = cols.swap_remove(idx);
            if piv[r] < 0 {
                piv.iter_mut().for_each(|x| *x = -*x);
            }
            pivots[r] = piv;
        }
        let mut basis = IMat::from_columns(&pivots);
        for j in 0..g {
            for i in (0..j).rev() {
                let q = basis[(i, j)].div_euclid(basis[(i, i)]);
                if q != 0 {
                    basis.add_col(j, i, -q);
                }
            }
        }
        Some(Hermite { basis })
    }

    pub fn basis(&self) -> &IMat {
        &self.basis
    }

    pub fn index(&self) -> u64 {
        (0..self.basis.rows).map(|i| self.basis[(i, i)] as u64).product()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.basis.rows).map(|i| self.basis[(i, i)]).collect()
    }

    /// Canonical representative of `x` modulo the lattice: `0 <= x_i < h_ii`.
    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        let mut x = x.to_vec();
        for j in (0..self.basis.rows).rev() {
            let q = x[j].div_euclid(self.basis[(j, j)]);
            if q != 0 {
                for i in 0..=j {
                    x[i] -= q * self.basis[(i, j)];
                }
            }
        }
        x
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.reduce(x).iter().all(|&c| c == 0)
    }

    /// Mixed-radix index of the canonical representative of `x`.
    pub fn residue_index(&self, x: &[i64]) -> usize {
        let r = self.reduce(x);
        let mut idx = 0usize;
        for i in (0..r.len()).rev() {
            idx = idx * self.basis[(i, i)] as usize + r[i] as usize;
        }
        idx
    }

    /// Inverse of [`residue_index`](Self::residue_index).
    pub fn representative(&self, mut idx: usize) -> Vec<i64> {
        let g = self.basis.rows;
        let mut x = vec![0; g];
        for (i, xi) in x.iter_mut().enumerate() {
            let h = self.basis[(i, i)] as usize;
            *xi = (idx % h) as i64;
            idx /= h;
        }
        x
    }

    pub fn representatives(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.index() as usize).map(move |i| self.representative(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_of_small_matrices() {
        let a = IMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.det().abs(), 1);
        assert_eq!(s.v.det().abs(), 1);
    }

    #[test]
    fn hermite_reps_cover_each_class_once() {
        let gens = IMat::from_columns(&[vec![4, 2], vec![6, 0], vec![2, 6]]);
        let h = Hermite::from_generators(&gens).unwrap();
        let reps: Vec<_> = h.representatives().collect();
        assert_eq!(reps.len() as u64, h.index());
        for (i, a) in reps.iter().enumerate() {
            for b in &reps[i + 1..] {
                let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                assert!(!h.contains(&diff));
            }
        }
        for j in 0..gens.cols() {
            assert!(h.contains(&gens.column(j)));
        }
    }

    proptest! {
        #[test]
        fn smith_invariants(entries in proptest::collection::vec(-20i64..20, 6)) {
            let a = IMat::from_rows(&[entries[0..3].to_vec(), entries[3..6].to_vec()]);
            let s = smith(&a);
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            let diag = s.diagonal();
            for w in diag.windows(2) {
                if w[0] != 0 {
                    prop_assert_eq!(w[1] % w[0], 0);
                } else {
                    prop_assert_eq!(w[1], 0);
                }
            }
            for i in 0..2 {
                for j in 0..3 {
                    if i != j {
                        prop_assert_eq!(s.d[(i, j)], 0);
                    }
                }
            }
        }

        #[test]
        fn hermite_index_is_abs_det(a in -30i64..30, b in -30i64..30, c in -30i64..30, d in -30i64..30) {
            let m = IMat::from_columns(&[vec![a, b], vec![c, d]]);
            let det = m.det();
            match Hermite::from_generators(&m) {
                Some(h) => {
                    prop_assert_eq!(h.index() as i64, det.abs());
                    prop_assert!(h.contains(&[a, b]) && h.contains(&[c, d]));
                }
                None => prop_assert_eq!(det, 0),
            }
        }
    }
}
