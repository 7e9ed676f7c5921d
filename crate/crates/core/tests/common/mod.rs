//! Reference implementations used only by tests. None of this code shares a
//! path with the library's table-driven arithmetic or Gaussian elimination.

#![allow(dead_code)]

use svcodes::{FieldCtx, FieldElem};

/// Schoolbook GF(p^w) arithmetic straight from the polynomial definition.
pub struct NaiveField {
    pub p: u64,
    pub w: usize,
    /// ascending, monic, length w + 1
    pub modulus: Vec<u64>,
}

impl NaiveField {
    pub fn from_ctx(ctx: &FieldCtx) -> Self {
        let spec = ctx.spec();
        let modulus = if spec.w == 1 {
            vec![0, 1]
        } else {
            spec.modulus.iter().map(|&c| c as u64).collect()
        };
        NaiveField { p: spec.p, w: spec.w as usize, modulus }
    }

    pub fn digits(&self, mut v: u64) -> Vec<u64> {
        (0..self.w)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn pack(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(a, b)| (a + b) % self.p).collect();
        self.pack(&s)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.w];
        for i in 0..self.w {
            for j in 0..self.w {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % self.p;
            }
        }
        // reduce from the top using x^w = -(lower modulus terms)
        for d in (self.w..2 * self.w).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..self.w {
                let sub = c * self.modulus[i] % self.p;
                prod[d - self.w + i] = (prod[d - self.w + i] + self.p - sub) % self.p;
            }
        }
        self.pack(&prod[..self.w])
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    /// Smallest d >= 1 with a^d = 1, by iteration.
    pub fn order(&self, a: u64) -> u64 {
        let mut x = a;
        let mut d = 1;
        while x != 1 {
            x = self.mul(x, a);
            d += 1;
        }
        d
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn laplace_det(f: &FieldCtx, m: &[Vec<FieldElem>]) -> FieldElem {
    let n = m.len();
    if n == 0 {
        return FieldElem::ONE;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = FieldElem::ZERO;
    for j in 0..n {
        let minor: Vec<Vec<FieldElem>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &v)| v).collect())
            .collect();
        let term = f.mul(m[0][j], laplace_det(f, &minor));
        acc = if j % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
    }
    acc
}

/// Determinant as a signed sum over permutations.
pub fn leibniz_det(f: &FieldCtx, m: &[Vec<FieldElem>]) -> FieldElem {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = FieldElem::ZERO;
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let term = (0..n).fold(FieldElem::ONE, |t, i| f.mul(t, m[i][p[i]]));
        acc = if inversions % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
    });
    acc
}

fn permute(p: &mut Vec<usize>, i: usize, visit: &mut dyn FnMut(&[usize])) {
    if i == p.len() {
        visit(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, visit);
        p.swap(i, j);
    }
}

/// Every square submatrix checked with the Leibniz formula; returns the
/// first singular (rows, cols), 1-indexed, in (size, rows, cols) order.
pub fn brute_force_singular(f: &FieldCtx, m: &[Vec<FieldElem>]) -> Option<(Vec<usize>, Vec<usize>)> {
    let k = m.len();
    let r = m.first().map_or(0, Vec::len);
    for size in 1..=k.min(r) {
        for rows in subsets(k, size) {
            for cols in subsets(r, size) {
                let sub: Vec<Vec<FieldElem>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| m[i - 1][j - 1]).collect()).collect();
                if leibniz_det(f, &sub).is_zero() {
                    return Some((rows, cols));
                }
            }
        }
    }
    None
}

/// All `t`-subsets of 1..=n in lexicographic order.
pub fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, t, &mut Vec::new(), &mut out);
    out
}

/// Vandermonde rows computed by repeated multiplication.
pub fn vandermonde_rows(f: &FieldCtx, k: usize, xi: &[FieldElem]) -> Vec<Vec<FieldElem>> {
    (0..k).map(|i| xi.iter().map(|&x| f.pow_u(x, i as u64)).collect()).collect()
}
