//! Imaginary quadratic orders and the symbol calculus around them:
//! reduced forms, Eichler symbols at 2 and 3, embedding counts, the
//! Atkin–Lehner quotient h′, square tests modulo m, and the unit-log
//! statistic for primes split in ℚ(√2) and ℚ(√6).

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{factor, FactorLimits};
use crate::error::{Error, Result};

pub fn kronecker(a: &Integer, n: &Integer) -> i32 {
    a.kronecker(n)
}

pub fn kronecker_i(a: i64, n: i64) -> i32 {
    Integer::from(a).kronecker(&Integer::from(n))
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: &Integer, n: &Integer) -> i32 {
    assert!(n.is_odd() && *n > 0, "Jacobi symbol needs an odd positive modulus");
    a.jacobi(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Primitive reduced positive-definite forms of discriminant `d < 0`:
/// `|b| ≤ a ≤ c`, with `b ≥ 0` whenever `|b| = a` or `a = c`.
pub fn reduced_forms(d: i64) -> Vec<ReducedForm> {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "discriminant must be negative and ≡ 0, 1 mod 4");
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if gcd3(a, b, c) == 1 {
                out.push(ReducedForm { a, b, c });
            }
        }
        a += 1;
    }
    out
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    let g = |mut x: i64, mut y: i64| {
        x = x.abs();
        y = y.abs();
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    };
    g(g(a, b), c)
}

pub fn class_number(d: i64) -> (usize, Vec<ReducedForm>) {
    let f = reduced_forms(d);
    (f.len(), f)
}

/// `(D₀, f)` with `D = D₀ f²` and `D₀` fundamental.
pub fn fundamental_part(d: i64) -> (i64, i64) {
    assert!(d != 0 && d.rem_euclid(4) <= 1);
    let fac = factor(&Integer::from(d), FactorLimits::default());
    let mut f = 1i64;
    for (p, e) in &fac.primes {
        let p = p.to_i64().unwrap();
        f *= p.pow(e / 2);
    }
    let mut d0 = d / (f * f);
    if d0.rem_euclid(4) != 1 {
        // d0 must be ≡ 1 mod 4 or 4·(squarefree ≡ 2, 3 mod 4).
        if d0.rem_euclid(4) != 0 || !matches!((d0 / 4).rem_euclid(4), 2 | 3) {
            f /= 2;
            d0 *= 4;
        }
    }
    (d0, f)
}

pub fn is_fundamental(d: i64) -> bool {
    d != 0 && d.rem_euclid(4) <= 1 && d != 1 && fundamental_part(d).1 == 1
}

/// Eichler symbol `(O_D / p)`: 1 when `p` divides the conductor, otherwise
/// the Kronecker symbol of the fundamental discriminant.
pub fn eichler_symbol(d: i64, p: i64) -> i32 {
    let (d0, f) = fundamental_part(d);
    if f % p == 0 {
        1
    } else {
        kronecker_i(d0, p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadOrderData {
    pub d: i64,
    pub d0: i64,
    pub conductor: i64,
    pub h: usize,
    pub eichler_2: i32,
    pub eichler_3: i32,
    pub s: i64,
    pub w2_size: u32,
    #[serde(serialize_with = "ser_rational")]
    pub h_prime: Rational,
    pub h_prime_integral: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl QuadOrderData {
    pub fn h_prime_usize(&self) -> Option<usize> {
        self.h_prime_integral.then(|| self.h_prime.numer().to_usize().unwrap())
    }

    pub fn has_cm_points(&self) -> bool {
        self.s != 0
    }
}

pub fn quad_order_data(d: i64) -> Result<QuadOrderData> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(Error::InvalidInput(format!("{d} is not a negative discriminant")));
    }
    let (d0, conductor) = fundamental_part(d);
    let (h, _) = class_number(d);
    let e2 = eichler_symbol(d, 2);
    let e3 = eichler_symbol(d, 3);
    let s = h as i64 * (1 - e2 as i64) * (1 - e3 as i64);
    let ramified = [2i64, 3].iter().filter(|&&p| d0 % p == 0 && conductor % p != 0).count();
    let w2_size = 1u32 << ramified;
    let h_prime = Rational::from((h as u64, w2_size));
    let h_prime_integral = *h_prime.denom() == 1;
    Ok(QuadOrderData {
        d,
        d0,
        conductor,
        h,
        eichler_2: e2,
        eichler_3: e3,
        s,
        w2_size,
        h_prime,
        h_prime_integral,
    })
}

/// The three discriminant families used by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `D = −4l`, `l ≡ 13 mod 24`
    FourL13,
    /// `D = −l`, `l ≡ 19 mod 24`
    L19,
    /// `D = −3l`, `l ≡ 1 mod 24`
    ThreeL1,
}

impl Family {
    pub fn residue(self) -> u64 {
        match self {
            Family::FourL13 => 13,
            Family::L19 => 19,
            Family::ThreeL1 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::FourL13 => "D = −4l, l ≡ 13 mod 24",
            Family::L19 => "D = −l, l ≡ 19 mod 24",
            Family::ThreeL1 => "D = −3l, l ≡ 1 mod 24",
        }
    }

    pub fn disc(self, l: u64) -> i64 {
        let l = l as i64;
        match self {
            Family::FourL13 => -4 * l,
            Family::L19 => -l,
            Family::ThreeL1 => -3 * l,
        }
    }

    /// Tabulated `(h mod 4 if stated, parity of h′)`.
    pub fn expected(self) -> (Option<usize>, usize) {
        match self {
            Family::FourL13 => (Some(2), 1),
            Family::L19 => (None, 1),
            Family::ThreeL1 => (Some(0), 0),
        }
    }

    pub fn from_disc(d: i64) -> Option<(Family, u64)> {
        let n = (-d) as u64;
        let prime = crate::arith::is_prime_u64;
        if d % 4 == 0 && prime(n / 4) && (n / 4) % 24 == 13 {
            Some((Family::FourL13, n / 4))
        } else if prime(n) && n % 24 == 19 {
            Some((Family::L19, n))
        } else if n % 3 == 0 && prime(n / 3) && (n / 3) % 24 == 1 {
            Some((Family::ThreeL1, n / 3))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Consistent,
    Violation(String),
}

pub fn parity_check(family: Family, l: u64) -> Result<Parity> {
    if !crate::arith::is_prime_u64(l) || l % 24 != family.residue() {
        return Err(Error::InvalidInput(format!(
            "l = {l} is not a prime ≡ {} mod 24",
            family.residue()
        )));
    }
    let data = quad_order_data(family.disc(l))?;
    let (h_mod4, hp_parity) = family.expected();
    let mut problems = Vec::new();
    if let Some(m) = h_mod4 {
        if data.h % 4 != m {
            problems.push(format!("h = {} is not ≡ {m} mod 4", data.h));
        }
    }
    match data.h_prime_usize() {
        Some(hp) if hp % 2 == hp_parity => {}
        Some(hp) => problems.push(format!("h′ = {hp} has the wrong parity")),
        None => problems.push(format!("h′ = {} is not an integer", data.h_prime)),
    }
    Ok(if problems.is_empty() { Parity::Consistent } else { Parity::Violation(problems.join("; ")) })
}

/// Whether `x² ≡ a (mod m)` is solvable, prime power by prime power.
pub fn is_square_mod(a: &Integer, m: &Integer) -> bool {
    assert!(*m >= 1);
    let fac = factor(m, FactorLimits::default());
    assert!(fac.is_complete(), "modulus could not be factored");
    fac.primes.iter().all(|(p, k)| is_square_mod_prime_power(a, p, *k))
}

fn is_square_mod_prime_power(a: &Integer, p: &Integer, k: u32) -> bool {
    let pk = Integer::from(p.pow_ref_u(k));
    let mut r = Integer::from(a % &pk);
    if r < 0 {
        r += &pk;
    }
    if r == 0 {
        return true;
    }
    let v = r.remove_factor_mut(p);
    if v % 2 == 1 {
        return false;
    }
    let rest = k - v;
    if *p == 2 {
        let u = r.mod_u(8);
        match rest {
            1 => true,
            2 => u % 4 == 1,
            _ => u == 1,
        }
    } else {
        r.legendre(p) == 1
    }
}

trait PowRefU {
    fn pow_ref_u(&self, k: u32) -> Integer;
}

impl PowRefU for Integer {
    fn pow_ref_u(&self, k: u32) -> Integer {
        use rug::ops::Pow;
        Integer::from(self.pow(k))
    }
}

/// `a + b√m`, the least unit `> 1` of `ℤ[√m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RealUnit {
    pub m: u64,
    pub a: u64,
    pub b: u64,
}

impl RealUnit {
    pub fn norm(&self) -> i64 {
        (self.a * self.a) as i64 - (self.m * self.b * self.b) as i64
    }

    pub fn ln(&self, prec: u32) -> Float {
        let v = Float::with_val(prec, self.m).sqrt() * self.b + self.a;
        v.ln()
    }
}

pub fn fundamental_unit(m: u64) -> RealUnit {
    assert!(m > 1 && !Integer::from(m).is_perfect_square());
    let mut b = 1u64;
    loop {
        let mb2 = m * b * b;
        for t in [mb2 - 1, mb2 + 1] {
            let a = t.isqrt();
            if a * a == t {
                return RealUnit { m, a, b };
            }
        }
        b += 1;
    }
}

/// Solve `|a² − m b²| = l` with `a, b > 0`, smallest `b` first.
pub fn split_generator(m: u64, l: u64) -> Option<(u64, u64)> {
    let unit = fundamental_unit(m);
    // A generator exists with b ≤ √(l·ε/m) for a suitable associate.
    let eps = unit.a as f64 + unit.b as f64 * (m as f64).sqrt();
    let bmax = ((l as f64) * eps / m as f64).sqrt() as u64 + 2;
    for b in 1..=bmax {
        let mb2 = m * b * b;
        for t in [mb2.checked_sub(l), Some(mb2 + l)].into_iter().flatten() {
            let a = t.isqrt();
            if a * a == t && a > 0 {
                return Some((a, b));
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitLogPair {
    pub l: u64,
    /// ½ln|π₁/π₁′| mod ln ε₁ in ℚ(√2)
    pub u1: f64,
    /// ½ln|π₃/π₃′| mod ln ε₃ in ℚ(√6)
    pub u3: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Equidistribution {
    pub bound: u64,
    pub pairs: Vec<UnitLogPair>,
    pub discrepancy: f64,
}

fn unit_log(m: u64, a: u64, b: u64, ln_eps: &Float, prec: u32) -> f64 {
    let s = Float::with_val(prec, m).sqrt() * b;
    let num = Float::with_val(prec, &s + a);
    let den = Float::with_val(prec, &s - a).abs();
    let u = (num / den).ln() / 2u32;
    let r = Float::with_val(prec, &u / ln_eps).floor();
    (u - r * ln_eps).to_f64()
}

/// Star discrepancy of points in `[0,1)²`, evaluated at the corners of a
/// 64×64 grid.
pub fn star_discrepancy(points: &[(f64, f64)]) -> f64 {
    const G: usize = 64;
    if points.is_empty() {
        return 1.0;
    }
    let mut counts = vec![[0u32; G + 1]; G + 1];
    for &(x, y) in points {
        // A point lies in [0, i/G) once its cell index is < i.
        let cx = ((x * G as f64).floor() as usize).min(G - 1) + 1;
        let cy = ((y * G as f64).floor() as usize).min(G - 1) + 1;
        counts[cx][cy] += 1;
    }
    for i in 0..=G {
        for j in 1..=G {
            counts[i][j] += counts[i][j - 1];
        }
    }
    for i in 1..=G {
        for j in 0..=G {
            counts[i][j] += counts[i - 1][j];
        }
    }
    let n = points.len() as f64;
    let mut worst = 0f64;
    for i in 1..=G {
        for j in 1..=G {
            let frac = counts[i][j] as f64 / n;
            let area = (i * j) as f64 / (G * G) as f64;
            worst = worst.max((frac - area).abs());
        }
    }
    worst
}

/// Unit-log pairs for primes `l < bound` split in both ℚ(√2) and ℚ(√6),
/// and the star discrepancy of the normalised points. Each prime
/// contributes its four sign variants (choices of π vs π′ in each field),
/// matching the primes of the compositum above `l`.
pub fn equidist_diagnostic(bound: u64) -> Result<Equidistribution> {
    use rayon::prelude::*;
    if bound < 10 {
        return Err(Error::InvalidInput("bound must be at least 10".into()));
    }
    let prec = 128;
    let (e1, e3) = (fundamental_unit(2), fundamental_unit(6));
    let (l1, l3) = (e1.ln(prec), e3.ln(prec));
    let primes: Vec<u64> = crate::arith::primes_up_to(bound - 1)
        .into_iter()
        .filter(|&l| l > 3 && kronecker_i(8, l as i64) == 1 && kronecker_i(24, l as i64) == 1)
        .collect();
    let mut pairs: Vec<UnitLogPair> = primes
        .par_iter()
        .map(|&l| {
            let (a1, b1) = split_generator(2, l).expect("split prime has a generator");
            let (a3, b3) = split_generator(6, l).expect("split prime has a generator");
            UnitLogPair {
                l,
                u1: unit_log(2, a1, b1, &l1, prec),
                u3: unit_log(6, a3, b3, &l3, prec),
            }
        })
        .collect();
    pairs.sort_by_key(|p| p.l);
    let (w1, w3) = (l1.to_f64(), l3.to_f64());
    let wrap = |x: f64| x - x.floor();
    let mut pts = Vec::with_capacity(4 * pairs.len());
    for p in &pairs {
        for s1 in [1.0, -1.0] {
            for s3 in [1.0, -1.0] {
                pts.push((wrap(s1 * p.u1 / w1), wrap(s3 * p.u3 / w3)));
            }
        }
    }
    Ok(Equidistribution { bound, discrepancy: star_discrepancy(&pts), pairs })
}
