//! Polynomials over a prime field `F_p` with `p < 2^63`, plus an
//! irreducibility certificate for rational polynomials built on
//! distinct-degree factorisation patterns.

use std::collections::BTreeSet;

use rug::{Integer, Rational};

use crate::arith::primes_up_to;
use crate::poly::QPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn invmod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    powmod(a, p - 2, p)
}

/// Reduce a rational into `F_p`; `None` when `p` divides the denominator.
pub fn reduce_integer(a: &Integer, p: u64) -> u64 {
    let mut r = Integer::from(a % p);
    if r < 0 {
        r += p;
    }
    r.to_u64().unwrap()
}

pub fn reduce_rational(r: &Rational, p: u64) -> Option<u64> {
    let den = reduce_integer(r.denom(), p);
    if den == 0 {
        return None;
    }
    let num = reduce_integer(r.numer(), p);
    Some(mulmod(num, invmod(den, p), p))
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for a in &mut c {
            *a %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_integers(coeffs: &[Integer], p: u64) -> Self {
        let c = coeffs.iter().map(|a| reduce_integer(a, p)).collect();
        Self::new(p, c)
    }

    pub fn from_qpoly(f: &QPoly, p: u64) -> Option<Self> {
        let c = f.coeffs().iter().map(|a| reduce_rational(a, p)).collect::<Option<Vec<_>>>()?;
        Some(Self::new(p, c))
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = invmod(self.leading(), self.p);
        Self::new(self.p, self.c.iter().map(|&a| mulmod(a, inv, self.p)).collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mulmod(acc, x, self.p) + a) % self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        let c = (0..n)
            .map(|k| {
                let a = self.c.get(k).copied().unwrap_or(0);
                let b = o.c.get(k).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        Self::new(p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mulmod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, c)
    }

    pub fn derivative(&self) -> Self {
        let c = self.c.iter().enumerate().skip(1).map(|(k, &a)| mulmod(a, k as u64 % self.p, self.p)).collect();
        Self::new(self.p, c)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let dd = d.deg();
        if self.c.len() <= dd {
            return (Self::new(p, vec![]), self.clone());
        }
        let inv = invmod(d.leading(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = mulmod(r[k + dd], inv, p);
            if f != 0 {
                for (i, &b) in d.c.iter().enumerate() {
                    r[k + i] = (r[k + i] + p - mulmod(f, b, p)) % p;
                }
            }
            q[k] = f;
        }
        r.truncate(dd);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::new(self.p, vec![1]).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Distinct roots in `F_p`, ascending. Splits off `gcd(f, x^p − x)`
    /// first, then scans.
    pub fn roots(&self) -> Vec<u64> {
        if self.deg() == 0 {
            return Vec::new();
        }
        let x = Self::x(self.p);
        let g = self.gcd(&x.pow_mod(self.p, self).sub(&x));
        if g.deg() == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for a in 0..self.p {
            if g.eval(a) == 0 {
                out.push(a);
                if out.len() == g.deg() {
                    break;
                }
            }
        }
        out
    }

    /// Yun's squarefree decomposition `f = lc · ∏ a_i^i`; valid for
    /// `deg f < p`. Returns `(a_i, i)` with nonconstant `a_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(FpPoly, usize)> {
        assert!(self.deg() < self.p as usize, "Yun's algorithm needs deg < p");
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.deg() == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Multiset of degrees of irreducible factors of a squarefree `f`.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut f = self.monic();
        let x = Self::x(self.p);
        let mut h = x.clone();
        let mut out = Vec::new();
        let mut d = 1;
        while 2 * d <= f.deg() {
            h = h.pow_mod(self.p, &f);
            let g = f.gcd(&h.sub(&x));
            if g.deg() > 0 {
                out.extend(std::iter::repeat_n(d, g.deg() / d));
                f = f.div_rem(&g).0;
                h = h.rem(&f);
            }
            d += 1;
        }
        if f.deg() > 0 {
            out.push(f.deg());
        }
        out.sort();
        out
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{k}")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible(String),
    Undecided,
}

/// Decide irreducibility of `f ∈ ℚ[x]` using factor-degree patterns modulo
/// small primes and an exact rational-root test.
pub fn irreducibility(f: &QPoly, prime_bound: u64) -> Irreducibility {
    let n = f.deg();
    if f.is_zero() || n == 0 {
        return Irreducibility::Reducible("constant polynomial".into());
    }
    if n == 1 {
        return Irreducibility::Irreducible;
    }
    if !f.is_squarefree() {
        return Irreducibility::Reducible("repeated factor".into());
    }
    if let Some(r) = rational_root(f) {
        return Irreducibility::Reducible(format!("rational root {r}"));
    }
    if n <= 3 {
        return Irreducibility::Irreducible;
    }
    let ints = f.primitive_integer();
    let mut possible: BTreeSet<usize> = (1..n).collect();
    for p in primes_up_to(prime_bound) {
        let fp = FpPoly::from_integers(&ints, p);
        if fp.deg() != n || fp.gcd(&fp.derivative()).deg() > 0 {
            continue;
        }
        let degs = fp.factor_degrees();
        let mut sums = BTreeSet::from([0usize]);
        for d in degs {
            let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
            sums.extend(next);
        }
        possible.retain(|k| sums.contains(k));
        if possible.is_empty() {
            return Irreducibility::Irreducible;
        }
    }
    Irreducibility::Undecided
}

/// A rational root of `f`, if any.
pub fn rational_root(f: &QPoly) -> Option<Rational> {
    let ints = f.primitive_integer();
    let lead = ints.last()?.clone().abs();
    if ints[0] == 0 {
        return Some(Rational::new());
    }
    // Distinct rationals with denominators dividing `lead` are ≥ 1/lead²
    // apart, so a narrow isolating interval holds at most one candidate.
    let width = Rational::from((1, Integer::from(lead.square_ref()) * 4));
    for mut r in f.real_roots() {
        r.refine_to(&width);
        if r.is_exact() {
            return Some(r.lo().clone());
        }
        let cand = best_approximation(&r.midpoint(), &lead);
        if f.eval(&cand) == 0 {
            return Some(cand);
        }
    }
    None
}

/// Closest continued-fraction convergent or semiconvergent with
/// denominator at most `max_den`.
pub fn best_approximation(x: &Rational, max_den: &Integer) -> Rational {
    let (mut p0, mut q0, mut p1, mut q1) =
        (Integer::from(0), Integer::from(1), Integer::from(1), Integer::from(0));
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    loop {
        let (a, r) = num.clone().div_rem_floor(den.clone());
        let q2 = Integer::from(&a * &q1) + &q0;
        if q2 > *max_den {
            // Semiconvergent candidate.
            let k = (Integer::from(max_den - &q0)) / &q1;
            let ps = Integer::from(&k * &p1) + &p0;
            let qs = Integer::from(&k * &q1) + &q0;
            let c1 = Rational::from((p1.clone(), q1.clone()));
            let c2 = Rational::from((ps, qs));
            let d1 = Rational::from(x - &c1).abs();
            let d2 = Rational::from(x - &c2).abs();
            return if d2 < d1 { c2 } else { c1 };
        }
        let p2 = Integer::from(&a * &p1) + &p0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        if r == 0 {
            return Rational::from((p1, q1));
        }
        num = den;
        den = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    #[test]
    fn arithmetic_mod_p() {
        let a = fp(7, &[1, 2, 3]);
        let b = fp(7, &[6, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).sub(&a.sub(&r)), fp(7, &[]));
    }

    #[test]
    fn roots_and_squarefree() {
        // (x-1)^3 (x-4)^2 (x^2+1) over F_13 (x^2+1 splits: 5^2 = -1)
        let p = 13;
        let mut f = fp(p, &[1]);
        for _ in 0..3 {
            f = f.mul(&fp(p, &[12, 1]));
        }
        for _ in 0..2 {
            f = f.mul(&fp(p, &[9, 1]));
        }
        f = f.mul(&fp(p, &[1, 0, 1]));
        assert_eq!(f.roots(), vec![1, 4, 5, 8]);
        let sq = f.squarefree_decomposition();
        let mults: Vec<(usize, usize)> = sq.iter().map(|(a, i)| (a.deg(), *i)).collect();
        assert_eq!(mults, vec![(2, 1), (1, 2), (1, 3)]);
    }

    #[test]
    fn ddf_pattern() {
        // x^4 + 1 over F_3 splits into two quadratics.
        assert_eq!(fp(3, &[1, 0, 0, 0, 1]).factor_degrees(), vec![2, 2]);
        assert_eq!(fp(5, &[3, 0, 1]).factor_degrees(), vec![2]);
    }

    #[test]
    fn irreducibility_decisions() {
        let q = |s: &str| QPoly::parse(s).unwrap();
        assert_eq!(irreducibility(&q("x^2 - 2"), 200), Irreducibility::Irreducible);
        assert!(matches!(irreducibility(&q("x^2 - 1/4"), 200), Irreducibility::Reducible(_)));
        assert_eq!(irreducibility(&q("x^4 - 10*x^2 + 1"), 200), Irreducibility::Undecided);
        assert_eq!(irreducibility(&q("x^5 - x - 1"), 200), Irreducibility::Irreducible);
        assert!(matches!(irreducibility(&q("x^4 + 4"), 200), Irreducibility::Undecided | Irreducibility::Reducible(_)));
        assert!(matches!(irreducibility(&q("x^3 - 3/8*x^2 + 1"), 200), Irreducibility::Irreducible | Irreducibility::Reducible(_)));
    }

    #[test]
    fn approximation() {
        let x = Rational::from((314159, 100000));
        assert_eq!(best_approximation(&x, &Integer::from(10)), Rational::from((22, 7)));
        assert_eq!(best_approximation(&x, &Integer::from(200)), Rational::from((355, 113)));
    }
}
