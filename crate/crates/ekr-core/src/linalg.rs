//! Small dense linear algebra over a finite field. Matrices are row-major
//! slices of canonical field values; dimensions stay tiny (n <= 4).

use crate::finfield::FiniteField;

pub fn mat_id(n: usize) -> Vec<u64> {
    let mut m = vec![0u64; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

pub fn mat_mul(f: &FiniteField, n: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for l in 0..n {
            let ail = a[i * n + l];
            if ail == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = f.add(out[i * n + j], f.mul(ail, b[l * n + j]));
            }
        }
    }
    out
}

pub fn mat_det(f: &FiniteField, n: usize, a: &[u64]) -> u64 {
    // Gaussian elimination with row swaps.
    let mut m = a.to_vec();
    let mut det = 1u64;
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r * n + col] != 0);
        let pivot = match pivot {
            Some(r) => r,
            None => return 0,
        };
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            det = f.neg(det);
        }
        let pv = m[col * n + col];
        det = f.mul(det, pv);
        let pinv = f.inv(pv).expect("pivot nonzero");
        for r in col + 1..n {
            let factor = f.mul(m[r * n + col], pinv);
            if factor == 0 {
                continue;
            }
            for j in col..n {
                let sub = f.mul(factor, m[col * n + j]);
                m[r * n + j] = f.sub(m[r * n + j], sub);
            }
        }
    }
    det
}

pub fn mat_inv(f: &FiniteField, n: usize, a: &[u64]) -> Option<Vec<u64>> {
    // Gauss-Jordan on [a | I].
    let mut m = a.to_vec();
    let mut inv = mat_id(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r * n + col] != 0)?;
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
        }
        let pinv = f.inv(m[col * n + col]).ok()?;
        for j in 0..n {
            m[col * n + j] = f.mul(m[col * n + j], pinv);
            inv[col * n + j] = f.mul(inv[col * n + j], pinv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r * n + col];
            if factor == 0 {
                continue;
            }
            for j in 0..n {
                let s1 = f.mul(factor, m[col * n + j]);
                m[r * n + j] = f.sub(m[r * n + j], s1);
                let s2 = f.mul(factor, inv[col * n + j]);
                inv[r * n + j] = f.sub(inv[r * n + j], s2);
            }
        }
    }
    Some(inv)
}

/// g is unipotent iff (g - I)^2 = 0.
pub fn mat_is_unipotent(f: &FiniteField, n: usize, a: &[u64]) -> bool {
    let mut d = a.to_vec();
    for i in 0..n {
        d[i * n + i] = f.sub(d[i * n + i], 1);
    }
    mat_mul(f, n, &d, &d).iter().all(|&v| v == 0)
}

/// Characteristic polynomial det(tI - A), coefficients low-degree first,
/// monic of degree n. Leibniz expansion; fine for n <= 4.
pub fn charpoly(f: &FiniteField, n: usize, a: &[u64]) -> Vec<u64> {
    let mut acc = vec![0u64; n + 1];
    let mut perm: Vec<usize> = (0..n).collect();
    permute(f, n, a, &mut perm, 0, true, &mut acc);
    acc
}

fn permute(f: &FiniteField, n: usize, a: &[u64], perm: &mut Vec<usize>, k: usize, even: bool, acc: &mut Vec<u64>) {
    if k == n {
        // product of entries of (tI - A) along the permutation
        let mut prod = vec![0u64; 1];
        prod[0] = 1;
        for (i, &j) in perm.iter().enumerate() {
            let entry: Vec<u64> = if i == j {
                vec![f.neg(a[i * n + j]), 1]
            } else {
                vec![f.neg(a[i * n + j])]
            };
            prod = poly_mul(f, &prod, &entry);
        }
        for (d, &c) in prod.iter().enumerate() {
            let c = if even { c } else { f.neg(c) };
            acc[d] = f.add(acc[d], c);
        }
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        let flip = if i == k { even } else { !even };
        permute(f, n, a, perm, k + 1, flip, acc);
        perm.swap(k, i);
    }
}

pub fn poly_mul(f: &FiniteField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    out
}
