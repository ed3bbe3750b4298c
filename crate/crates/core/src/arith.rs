//! Integer helpers: valuations, primality, and a small factoring engine
//! (trial division followed by Brent's variant of Pollard rho).

use rug::integer::IsPrime;
use rug::ops::Pow;
use rug::{Integer, Rational};

/// `v_p(n)`, or `None` for `n = 0`.
pub fn valuation(n: &Integer, p: &Integer) -> Option<u32> {
    if *n == 0 {
        return None;
    }
    let mut m = n.clone();
    Some(m.remove_factor_mut(p))
}

pub fn valuation_u(n: &Integer, p: u64) -> Option<u32> {
    valuation(n, &Integer::from(p))
}

/// `v_p(r)` for a rational, `None` for zero.
pub fn rational_valuation(r: &Rational, p: &Integer) -> Option<i64> {
    let num = valuation(r.numer(), p)?;
    let den = valuation(r.denom(), p).unwrap_or(0);
    Some(num as i64 - den as i64)
}

pub fn is_prime(n: &Integer) -> bool {
    *n > 1 && n.is_probably_prime(40) != IsPrime::No
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    is_prime(&Integer::from(n))
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut k = i * i;
        while k <= n {
            composite[k] = true;
            k += i;
        }
    }
    out
}

/// Prime factorisation, possibly incomplete: `unfactored` holds composite
/// cofactors that resisted rho within the iteration budget.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    pub primes: Vec<(Integer, u32)>,
    pub unfactored: Vec<Integer>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }

    fn push(&mut self, p: Integer, e: u32) {
        if let Some(slot) = self.primes.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += e;
        } else {
            self.primes.push((p, e));
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FactorLimits {
    pub trial_bound: u64,
    pub rho_iterations: u64,
}

impl Default for FactorLimits {
    fn default() -> Self {
        FactorLimits { trial_bound: 1_000_000, rho_iterations: 1 << 21 }
    }
}

/// Factor `|n|`. Units and zero yield an empty factorisation.
pub fn factor(n: &Integer, limits: FactorLimits) -> Factorization {
    let mut out = Factorization::default();
    let mut m = n.clone().abs();
    if m <= 1 {
        return out;
    }
    for p in primes_up_to(limits.trial_bound) {
        let pz = Integer::from(p);
        if Integer::from(&pz * &pz) > m {
            break;
        }
        let e = m.remove_factor_mut(&pz);
        if e > 0 {
            out.push(pz, e);
        }
    }
    if m == 1 {
        return out;
    }
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime(&c) {
            out.push(c, 1);
            continue;
        }
        if let Some(root) = perfect_power_root(&c) {
            let mut rest = c.clone();
            let e = rest.remove_factor_mut(&root);
            for _ in 0..e {
                stack.push(root.clone());
            }
            stack.push(rest);
            continue;
        }
        match pollard_brent(&c, limits.rho_iterations) {
            Some(f) => {
                let g = Integer::from(&c / &f);
                stack.push(f);
                stack.push(g);
            }
            None => out.unfactored.push(c),
        }
    }
    // Merge repeated primes coming from the stack.
    let mut merged = Factorization { primes: Vec::new(), unfactored: out.unfactored };
    for (p, e) in out.primes {
        merged.push(p, e);
    }
    merged.primes.sort();
    merged.unfactored.sort();
    merged
}

fn perfect_power_root(n: &Integer) -> Option<Integer> {
    if !n.is_perfect_power() {
        return None;
    }
    let bits = n.significant_bits();
    for k in (2..=bits).rev() {
        let r = Integer::from(n.root_ref(k));
        if Integer::from((&r).pow(k)) == *n {
            return Some(r);
        }
    }
    None
}

/// A nontrivial factor of the odd composite `n`, or `None` when the budget
/// runs out.
pub fn pollard_brent(n: &Integer, budget: u64) -> Option<Integer> {
    if n.is_even() {
        return Some(Integer::from(2));
    }
    let mut spent = 0u64;
    for c in 1u32..=8 {
        let f = |x: &Integer| -> Integer { (Integer::from(x.square_ref()) + c) % n };
        let mut y = Integer::from(2 + c);
        let mut r = 1u64;
        let mut q = Integer::from(1);
        let mut g = Integer::from(1);
        let mut x = y.clone();
        let mut ys = y.clone();
        const BATCH: u64 = 128;
        while g == 1 {
            x.clone_from(&y);
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys.clone_from(&y);
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    q = (q * Integer::from(&x - &y).abs()) % n;
                }
                g = q.clone().gcd(n);
                k += steps;
                spent += steps;
            }
            r *= 2;
            if spent > budget {
                break;
            }
        }
        if g == *n {
            // Batch overshot; step back one at a time.
            loop {
                ys = f(&ys);
                g = Integer::from(&x - &ys).abs().gcd(n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != 1 && g != *n {
            return Some(g);
        }
        if spent > budget {
            return None;
        }
    }
    None
}

/// Integer square root test.
pub fn is_square(n: &Integer) -> bool {
    *n >= 0 && n.is_perfect_square()
}

pub fn lcm_all<'a>(it: impl IntoIterator<Item = &'a Integer>) -> Integer {
    let mut acc = Integer::from(1);
    for x in it {
        acc.lcm_mut(x);
    }
    acc
}
