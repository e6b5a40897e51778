//! Exact arithmetic in GF(p^k): polynomial representation, primitive elements,
//! Frobenius powers, squares, and the sum-of-two-squares solver.
//!
//! Elements are stored as canonical integers `sum coeffs[i] * p^i`, which also
//! fixes the canonical element ordering used everywhere downstream. The modulus
//! of a field is always derived (lexicographically smallest primitive polynomial,
//! low-degree coefficients first), never user-supplied, so two fields with the
//! same order are bit-for-bit identical.

use std::sync::Arc;

use thiserror::Error;

/// Hard cap on field size; all arithmetic fits in 64-bit integers.
pub const MAX_FIELD_ORDER: u64 = 1 << 32;
/// Fields up to this order carry exp/log tables for O(1) multiplication.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field order {p}^{k} exceeds 2^32")]
    TooLarge { p: u64, k: u32 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields (orders {0} and {1})")]
    MixedFields(u64, u64),
    #[error("element value {0} out of range for field of order {1}")]
    OutOfRange(u64, u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors by trial division.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let m = modulus as u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// A field element tagged with the order of its field. Since the modulus is
/// derived deterministically from the order, the order identifies the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    pub field_order: u64,
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
}

/// GF(p^k) with a fixed primitive modulus and designated primitive element.
#[derive(Debug)]
pub struct FiniteField {
    p: u64,
    k: u32,
    q: u64,
    /// Monic modulus of degree k over GF(p), low-degree first.
    modulus: Vec<u64>,
    /// Canonical value of the designated multiplicative generator.
    zeta: u64,
    exp: Vec<u64>,
    log: Vec<u64>,
}

impl FiniteField {
    pub fn new(p: u64, k: u32) -> Result<Arc<FiniteField>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).filter(|&v| v <= MAX_FIELD_ORDER).ok_or(FieldError::TooLarge { p, k })?;
        }
        let mut f = FiniteField {
            p,
            k,
            q,
            modulus: Vec::new(),
            zeta: 0,
            exp: Vec::new(),
            log: Vec::new(),
        };
        if k == 1 {
            let g = smallest_primitive_root(p);
            // modulus x - g, stored low-degree first
            f.modulus = vec![(p - g % p) % p, 1];
            f.zeta = g;
        } else {
            f.modulus = f.smallest_primitive_modulus();
            f.zeta = p; // the residue class of the indeterminate
        }
        if q <= TABLE_LIMIT {
            f.build_tables();
        }
        Ok(Arc::new(f))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn zeta(&self) -> u64 {
        self.zeta
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if value >= self.q {
            return Err(FieldError::OutOfRange(value, self.q));
        }
        Ok(FieldElement {
            field_order: self.q,
            value,
        })
    }

    /// Coefficient vector of a canonical value, length k, low-degree first.
    pub fn coeffs(&self, mut v: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.k as usize];
        for c in out.iter_mut() {
            *c = v % self.p;
            v /= self.p;
        }
        out
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> u64 {
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            v = v * self.p + c % self.p;
        }
        v
    }

    // ---- raw arithmetic on canonical values ----

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut base) = (a, b, 0u64, 1u64);
        for _ in 0..self.k {
            out += (a % self.p + b % self.p) % self.p * base;
            a /= self.p;
            b /= self.p;
            base *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.k == 1 {
            return (self.p - a % self.p) % self.p;
        }
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut base) = (a, 0u64, 1u64);
        for _ in 0..self.k {
            out += (self.p - a % self.p) % self.p * base;
            a /= self.p;
            base *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            let m = self.q - 1;
            return self.exp[((self.log[a as usize] + self.log[b as usize]) % m) as usize];
        }
        self.mul_poly(a, b)
    }

    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        if !self.exp.is_empty() {
            let m = self.q - 1;
            return Ok(self.exp[((m - self.log[a as usize]) % m) as usize]);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if self.q > 2 {
            e %= self.q - 1;
        }
        let mut acc = 1u64;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Checked arithmetic on tagged elements. `b` is ignored for `Inv` and `Neg`.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement, FieldError> {
        if a.field_order != self.q {
            return Err(FieldError::MixedFields(a.field_order, self.q));
        }
        let unary = matches!(op, FieldOp::Inv | FieldOp::Neg);
        if !unary && b.field_order != self.q {
            return Err(FieldError::MixedFields(a.field_order, b.field_order));
        }
        let value = match op {
            FieldOp::Add => self.add(a.value, b.value),
            FieldOp::Sub => self.sub(a.value, b.value),
            FieldOp::Mul => self.mul(a.value, b.value),
            FieldOp::Div => self.div(a.value, b.value)?,
            FieldOp::Inv => self.inv(a.value)?,
            FieldOp::Neg => self.neg(a.value),
        };
        Ok(FieldElement {
            field_order: self.q,
            value,
        })
    }

    /// Returns `a^(p^e)`.
    pub fn frobenius_power(&self, a: u64, e: u32) -> u64 {
        if a == 0 {
            return 0;
        }
        if self.q == 2 {
            return a;
        }
        let exp = pow_mod(self.p, e as u64, self.q - 1);
        // pow_mod may return 0 when p^e is a multiple of q-1; a^(q-1) = 1
        self.pow(a, if exp == 0 { self.q - 1 } else { exp })
    }

    /// True iff some b satisfies b^2 = a.
    pub fn is_square(&self, a: u64) -> bool {
        if self.p == 2 || a == 0 {
            return true;
        }
        self.pow(a, (self.q - 1) / 2) == 1
    }

    /// Deterministic solution of s1^2 + s2^2 = a: smallest s1 in canonical
    /// order with a - s1^2 a square, then the smallest matching s2.
    pub fn sum_of_two_squares(&self, a: u64) -> (u64, u64) {
        for s1 in 0..self.q {
            let rest = self.sub(a, self.mul(s1, s1));
            if self.is_square(rest) {
                for s2 in 0..self.q {
                    if self.mul(s2, s2) == rest {
                        return (s1, s2);
                    }
                }
            }
        }
        unreachable!("every element of a finite field is a sum of two squares")
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let k = self.k as usize;
        let av = self.coeffs(a);
        let bv = self.coeffs(b);
        let mut t = vec![0u64; 2 * k - 1];
        for (i, &ai) in av.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bv.iter().enumerate() {
                t[i + j] = (t[i + j] + ai * bj) % self.p;
            }
        }
        for i in (k..t.len()).rev() {
            let c = t[i];
            if c != 0 {
                t[i] = 0;
                for j in 0..k {
                    let sub = self.modulus[j] * c % self.p;
                    t[i - k + j] = (t[i - k + j] + self.p - sub) % self.p;
                }
            }
        }
        self.from_coeffs(&t[..k])
    }

    fn build_tables(&mut self) {
        let m = (self.q - 1) as usize;
        let mut exp = vec![0u64; m];
        let mut log = vec![0u64; self.q as usize];
        let mut v = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = v;
            log[v as usize] = i as u64;
            v = if self.k == 1 {
                v * self.zeta % self.p
            } else {
                self.mul_poly(v, self.zeta)
            };
        }
        debug_assert_eq!(v, 1, "zeta does not have order q-1");
        self.exp = exp;
        self.log = log;
    }

    /// Lexicographically smallest primitive monic polynomial of degree k,
    /// low-degree coefficients compared first.
    fn smallest_primitive_modulus(&self) -> Vec<u64> {
        let k = self.k as usize;
        let factors = prime_factors(self.q - 1);
        for low in 0..self.q {
            let mut m = coeff_digits(low, self.p, k);
            m.push(1);
            if !poly_irreducible(&m, self.p, k) {
                continue;
            }
            if poly_x_is_primitive(&m, self.p, self.q, &factors) {
                return m;
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }
}

fn coeff_digits(mut v: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for c in out.iter_mut() {
        *c = v % p;
        v /= p;
    }
    out
}

/// Trial division against all monic polynomials of degree <= k/2.
fn poly_irreducible(m: &[u64], p: u64, k: usize) -> bool {
    if m[0] == 0 {
        return false;
    }
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut div = coeff_digits(low, p, d);
            div.push(1);
            if poly_rem_is_zero(m, &div, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u64], den: &[u64], p: u64) -> bool {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - dd;
            for (j, &dj) in den.iter().enumerate() {
                let sub = dj * lead % p;
                r[shift + j] = (r[shift + j] + p - sub) % p;
            }
        }
        r.pop();
        while r.len() > dd && *r.last().unwrap() == 0 {
            r.pop();
        }
    }
    r.iter().all(|&c| c == 0)
}

/// Does x generate the multiplicative group of GF(p)[x]/(m)?
fn poly_x_is_primitive(m: &[u64], p: u64, q: u64, factors: &[u64]) -> bool {
    let k = m.len() - 1;
    let x = {
        let mut v = vec![0u64; k];
        if k > 1 {
            v[1] = 1;
        } else {
            v[0] = (p - m[0]) % p; // degree-1 case: x = -m[0]
        }
        v
    };
    for &f in factors {
        if poly_pow_mod(&x, (q - 1) / f, m, p) == unit_poly(k) {
            return false;
        }
    }
    true
}

fn unit_poly(k: usize) -> Vec<u64> {
    let mut v = vec![0u64; k];
    v[0] = 1;
    v
}

fn poly_pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let k = m.len() - 1;
    let mut acc = unit_poly(k);
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &base, m, p);
        }
        base = poly_mul_mod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let k = m.len() - 1;
    let mut t = vec![0u64; 2 * k - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            t[i + j] = (t[i + j] + ai * bj) % p;
        }
    }
    for i in (k..t.len()).rev() {
        let c = t[i];
        if c != 0 {
            t[i] = 0;
            for j in 0..k {
                let sub = m[j] * c % p;
                t[i - k + j] = (t[i - k + j] + p - sub) % p;
            }
        }
    }
    t.truncate(k);
    t
}

fn smallest_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p - 1);
    for g in 2..p {
        if factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1) {
            return g;
        }
    }
    unreachable!("every prime has a primitive root")
}

/// GF(q^n) as an extension of an arbitrary base field GF(q). Elements are
/// canonical integers in base-q digits over the power basis 1, x, ..., x^(n-1).
///
/// Used for the multiplication-map constructions on projective space, where
/// the base field may itself be a proper extension (e.g. GF(16) over GF(4)).
#[derive(Debug)]
pub struct ExtensionField {
    base: Arc<FiniteField>,
    degree: u32,
    /// Monic modulus over the base field, canonical base values, low-degree first.
    modulus: Vec<u64>,
    order: u64,
}

impl ExtensionField {
    pub fn new(base: Arc<FiniteField>, degree: u32) -> Result<ExtensionField, FieldError> {
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = base.order();
        let mut order: u64 = 1;
        for _ in 0..degree {
            order = order
                .checked_mul(q)
                .filter(|&v| v <= TABLE_LIMIT)
                .ok_or(FieldError::TooLarge {
                    p: base.characteristic(),
                    k: base.degree() * degree,
                })?;
        }
        let mut ext = ExtensionField {
            base,
            degree,
            modulus: Vec::new(),
            order,
        };
        ext.modulus = ext.smallest_primitive_modulus();
        Ok(ext)
    }

    pub fn base(&self) -> &Arc<FiniteField> {
        &self.base
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The residue class of the indeterminate, a generator of the
    /// multiplicative group by construction.
    pub fn zeta(&self) -> u64 {
        if self.degree == 1 {
            self.base.neg(self.modulus[0])
        } else {
            self.base.order()
        }
    }

    pub fn coeffs(&self, mut v: u64) -> Vec<u64> {
        let q = self.base.order();
        let mut out = vec![0u64; self.degree as usize];
        for c in out.iter_mut() {
            *c = v % q;
            v /= q;
        }
        out
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> u64 {
        let q = self.base.order();
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            v = v * q + c;
        }
        v
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (av, bv) = (self.coeffs(a), self.coeffs(b));
        let sum: Vec<u64> = av.iter().zip(&bv).map(|(&x, &y)| self.base.add(x, y)).collect();
        self.from_coeffs(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let av = self.coeffs(a);
        let out: Vec<u64> = av.iter().map(|&x| self.base.neg(x)).collect();
        self.from_coeffs(&out)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let n = self.degree as usize;
        let (av, bv) = (self.coeffs(a), self.coeffs(b));
        let mut t = vec![0u64; 2 * n - 1];
        for (i, &ai) in av.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bv.iter().enumerate() {
                t[i + j] = self.base.add(t[i + j], self.base.mul(ai, bj));
            }
        }
        for i in (n..t.len()).rev() {
            let c = t[i];
            if c != 0 {
                t[i] = 0;
                for j in 0..n {
                    let sub = self.base.mul(self.modulus[j], c);
                    t[i - n + j] = self.base.sub(t[i - n + j], sub);
                }
            }
        }
        self.from_coeffs(&t[..n])
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if self.order > 2 {
            e %= self.order - 1;
        }
        let mut acc = 1u64;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.order - 2))
    }

    /// Row-major matrix over the base field of the multiplication-by-x map
    /// in the power basis: column j holds the coordinates of x * zeta_ext^j.
    pub fn mult_matrix(&self, x: u64) -> Vec<u64> {
        let n = self.degree as usize;
        let q = self.base.order();
        let mut m = vec![0u64; n * n];
        let mut basis = 1u64; // zeta_ext^j as canonical value q^j
        for j in 0..n {
            let col = self.coeffs(self.mul(x, basis));
            for (i, &c) in col.iter().enumerate() {
                m[i * n + j] = c;
            }
            basis *= q;
        }
        m
    }

    fn smallest_primitive_modulus(&self) -> Vec<u64> {
        let n = self.degree as usize;
        let factors = prime_factors(self.order - 1);
        'outer: for low in 0..self.order {
            let mut m = self.coeffs_of_width(low, n);
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            // irreducibility: trial division by all monic polys of degree <= n/2
            for d in 1..=n / 2 {
                let count = self.base.order().pow(d as u32);
                for dl in 0..count {
                    let mut div = self.coeffs_of_width(dl, d);
                    div.push(1);
                    if self.poly_rem_is_zero(&m, &div) {
                        continue 'outer;
                    }
                }
            }
            // primitivity of x
            if self.x_is_primitive(&m, &factors) {
                return m;
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    fn coeffs_of_width(&self, mut v: u64, len: usize) -> Vec<u64> {
        let q = self.base.order();
        let mut out = vec![0u64; len];
        for c in out.iter_mut() {
            *c = v % q;
            v /= q;
        }
        out
    }

    fn poly_rem_is_zero(&self, num: &[u64], den: &[u64]) -> bool {
        let mut r = num.to_vec();
        let dd = den.len() - 1;
        while r.len() > dd {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let shift = r.len() - 1 - dd;
                for (j, &dj) in den.iter().enumerate() {
                    let sub = self.base.mul(dj, lead);
                    r[shift + j] = self.base.sub(r[shift + j], sub);
                }
            }
            r.pop();
            while r.len() > dd && *r.last().unwrap() == 0 {
                r.pop();
            }
        }
        r.iter().all(|&c| c == 0)
    }

    fn x_is_primitive(&self, m: &[u64], factors: &[u64]) -> bool {
        let n = m.len() - 1;
        let tmp = ExtensionField {
            base: Arc::clone(&self.base),
            degree: self.degree,
            modulus: m.to_vec(),
            order: self.order,
        };
        let x = if n > 1 { self.base.order() } else { self.base.neg(m[0]) };
        factors.iter().all(|&f| tmp.pow(x, (self.order - 1) / f) != 1)
    }
}
