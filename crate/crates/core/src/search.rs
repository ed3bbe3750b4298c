//! Search for a prime of superspecial reduction of a moduli point `j₀`.
//!
//! The three cases use `D = −4l`, `−l`, `−3l` for primes `l ≡ 13, 19, 1
//! mod 24`. For a suitable `l` the sign of `Nm(P_D(j₀))` is pinned by the
//! position of the real roots of `P_D` relative to the real conjugates of
//! `j₀`, which forces `(D/N) = −1` for the cleared norm `N`; some prime
//! `p | N` then has `(D/p) = −1`. Everything here is exact.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime, is_prime_u64, primes_up_to, rational_valuation, FactorLimits};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::poly::{count_between, sign, Bound, Endpoint, QPoly, RealRoot};
use crate::polymod::{irreducibility, Irreducibility};
use crate::quadratic::{kronecker, Family};
use crate::quaternion::Order;
use crate::reduction::{check_heegner, minus_16_27};
use crate::serde_util;
use crate::table::{HeegnerTable, TableEntry};

const IRREDUCIBILITY_PRIMES: u64 = 400;

/// A moduli point given by its minimal polynomial over `ℚ`, and the degree
/// `e = [L : ℚ(j₀)]` of the field of moduli over it.
#[derive(Clone, Debug)]
pub struct ModuliInput {
    pub minpoly: QPoly,
    pub degree_mult: u32,
    /// Real conjugates, ascending, as isolating intervals.
    pub real_roots: Vec<RealRoot>,
    /// `Nm_{L/ℚ}(j₀) = n/d` in lowest terms, `d > 0`.
    pub n: Integer,
    pub d: Integer,
}

impl ModuliInput {
    pub fn g(&self) -> usize {
        self.minpoly.deg()
    }

    /// `[L : ℚ]`.
    pub fn degree(&self) -> u64 {
        self.g() as u64 * self.degree_mult as u64
    }

    pub fn norm(&self) -> Rational {
        Rational::from((self.n.clone(), self.d.clone()))
    }

    /// Coefficients as decimal rationals, lowest degree first.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.minpoly.coeffs().iter().map(|c| c.to_string()).collect()
    }

    fn real_in(&self, a: &Rational, b: &Rational) -> usize {
        self.count(Endpoint::rational(a.clone()), Endpoint::rational(b.clone()))
    }

    fn count(&self, a: Endpoint, b: Endpoint) -> usize {
        count_between(&self.minpoly, &a, &b).expect("j₀ is neither 0 nor −16/27")
    }
}

pub fn parse_moduli(minpoly: &QPoly, degree_mult: u32) -> Result<ModuliInput> {
    if minpoly.is_zero() || minpoly.deg() == 0 {
        return Err(Error::InvalidInput("minimal polynomial must be non-constant".into()));
    }
    if degree_mult == 0 {
        return Err(Error::InvalidInput("degree multiplier must be positive".into()));
    }
    let f = minpoly.monic();
    match irreducibility(&f, IRREDUCIBILITY_PRIMES) {
        Irreducibility::Irreducible => {}
        Irreducibility::Reducible(why) => {
            return Err(Error::InvalidInput(format!("{f} is reducible: {why}")));
        }
        Irreducibility::Undecided => {
            return Err(Error::InvalidInput(format!("could not certify that {f} is irreducible")));
        }
    }
    if f.eval(&Rational::new()) == 0 {
        return Err(Error::Degenerate("j₀ = 0 is the order-4 elliptic point".into()));
    }
    if f.eval(&minus_16_27()) == 0 {
        return Err(Error::Degenerate("j₀ = −16/27 is the order-2 elliptic point".into()));
    }
    let g = f.deg() as u32;
    let mut norm = f.coeff(0);
    if g % 2 == 1 {
        norm = -norm;
    }
    let norm = norm.pow(degree_mult);
    let (n, d) = norm.into_numer_denom();
    let common = Integer::from(n.gcd_ref(&d)).gcd(&Integer::from(6));
    if common != 1 {
        return Err(Error::Hypothesis(format!("gcd(n, d, 6) = {common}")));
    }
    let real_roots = f.real_roots();
    Ok(ModuliInput { minpoly: f, degree_mult, real_roots, n, d })
}

pub fn parse_moduli_str(minpoly: &str, degree_mult: u32) -> Result<ModuliInput> {
    parse_moduli(&QPoly::parse(minpoly)?, degree_mult)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationSigns {
    AllZero,
    AllNonpositive,
    AllNonnegative,
    Mixed,
}

impl ValuationSigns {
    pub fn nonpositive(self) -> bool {
        matches!(self, ValuationSigns::AllZero | ValuationSigns::AllNonpositive)
    }

    pub fn nonnegative(self) -> bool {
        matches!(self, ValuationSigns::AllZero | ValuationSigns::AllNonnegative)
    }
}

/// `q`-adic valuations of the roots with multiplicities, from the Newton
/// polygon.
pub fn root_valuations(f: &QPoly, q: &Integer) -> Vec<(Rational, usize)> {
    f.newton_polygon(q)
        .into_iter()
        .map(|(v, k)| (v.expect("j₀ ≠ 0"), k))
        .collect()
}

pub fn local_valuation_signs(input: &ModuliInput, q: u64) -> ValuationSigns {
    let vals = root_valuations(&input.minpoly, &Integer::from(q));
    let neg = vals.iter().any(|(v, _)| *v < 0);
    let pos = vals.iter().any(|(v, _)| *v > 0);
    match (neg, pos) {
        (false, false) => ValuationSigns::AllZero,
        (true, false) => ValuationSigns::AllNonpositive,
        (false, true) => ValuationSigns::AllNonnegative,
        (true, true) => ValuationSigns::Mixed,
    }
}

/// The monic polynomial of `27j₀ + 16`.
pub fn shifted_minpoly(f: &QPoly) -> QPoly {
    let t = f.compose_affine(&Rational::from((1, 27)), &Rational::from((-16, 27)));
    t.scale(&Rational::from(Integer::from(27).pow(f.deg() as u32)))
}

/// `Nm(S)`: 2, 3 and every prime at which `j₀` or `27j₀ + 16` has a
/// conjugate of nonzero valuation.
pub fn prime_set(input: &ModuliInput) -> Result<Vec<Integer>> {
    let mut out: BTreeSet<Integer> = [Integer::from(2), Integer::from(3)].into_iter().collect();
    for f in [input.minpoly.clone(), shifted_minpoly(&input.minpoly)] {
        let mut cands = Vec::new();
        for c in f.coeffs() {
            cands.push(c.denom().clone());
        }
        cands.push(f.coeff(0).numer().clone().abs());
        for m in cands {
            if m <= 1 {
                continue;
            }
            let fac = factor(&m, FactorLimits::default());
            if !fac.is_complete() {
                return Err(Error::Hypothesis(format!("could not factor {m} while collecting bad primes")));
            }
            for (q, _) in fac.primes {
                if root_valuations(&f, &q).iter().any(|(v, _)| *v != 0) {
                    out.insert(q);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `Nm_{L/ℚ}(27j₀ + 16) = ((−27)^g f(−16/27))^e`.
pub fn shifted_norm(input: &ModuliInput) -> Rational {
    let g = input.g() as u32;
    let mut v = input.minpoly.eval(&minus_16_27()) * Integer::from(-27).pow(g);
    v = v.pow(input.degree_mult);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseTrace {
    pub degree: u64,
    pub v2: ValuationSigns,
    pub v3: ValuationSigns,
    /// `v₃(d·Nm(27j₀ + 16))` with `d` from the lowest-terms norm.
    pub v3_dq: i64,
    pub real_conjugates: usize,
    /// Real conjugates in `I₁`, `I₂`, `I₃`.
    pub real_in: [usize; 3],
    pub conditions: [bool; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseSelection {
    pub case: Option<u8>,
    pub trace: CaseTrace,
}

/// Evaluate the three sets of hypotheses. When several hold, the one
/// tried is the highest-numbered.
pub fn case_select(input: &ModuliInput) -> CaseSelection {
    let degree = input.degree();
    let v2 = local_valuation_signs(input, 2);
    let v3 = local_valuation_signs(input, 3);
    let q = shifted_norm(input);
    let dq = Rational::from(&q * &input.d);
    let v3_dq = rational_valuation(&dq, &Integer::from(3)).expect("Q ≠ 0");
    let e = minus_16_27();
    let zero = Rational::new();
    let r = input.real_roots.len();
    let real_in = [
        input.count(Endpoint::Bound(Bound::NegInf), Endpoint::rational(e.clone())),
        input.real_in(&e, &zero),
        input.count(Endpoint::rational(zero.clone()), Endpoint::Bound(Bound::PosInf)),
    ];
    let odd = (degree as i64 + v3_dq).rem_euclid(2) == 1;
    let c1 = r > 0 && v2.nonpositive() && v3.nonpositive() && (odd || real_in[1] > 0);
    let c2 = v2.nonnegative() && v3.nonpositive() && real_in[2] > 0;
    let c3 = degree % 2 == 0 && v2.nonnegative() && v3.nonnegative() && real_in[0] + real_in[2] > 0;
    let conditions = [c1, c2, c3];
    let case = [3u8, 2, 1].into_iter().find(|&k| conditions[k as usize - 1]);
    CaseSelection {
        case,
        trace: CaseTrace { degree, v2, v3, v3_dq, real_conjugates: r, real_in, conditions },
    }
}

/// The integer `d` clearing every partial product of conjugates, built from
/// primes allowed in `case`.
pub fn choose_clearing_d(input: &ModuliInput, case: u8, primes: &[Integer]) -> Result<Integer> {
    let mut out = Integer::from(1);
    for q in primes {
        let neg: Rational = root_valuations(&input.minpoly, q)
            .iter()
            .filter(|(v, _)| *v < 0)
            .map(|(v, k)| Rational::from(v * Integer::from(*k)) * -1)
            .sum();
        let e = neg * input.degree_mult;
        if e == 0 {
            continue;
        }
        if *e.denom() != 1 {
            return Err(Error::Internal(format!("fractional clearing exponent at {q}")));
        }
        let allowed = match case {
            1 => true,
            2 => *q != 2,
            _ => *q != 2 && *q != 3,
        };
        if !allowed {
            return Err(Error::Hypothesis(format!("case {case} cannot clear denominators at {q}")));
        }
        out *= Integer::from(q.pow(e.numer().to_u32().expect("small exponent")));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormProfile {
    #[serde(serialize_with = "serde_util::display")]
    pub norm_p: Rational,
    #[serde(serialize_with = "serde_util::display")]
    pub norm_q: Rational,
    pub s: i32,
    pub s_prime: i32,
    #[serde(serialize_with = "serde_util::display")]
    pub big_n: Integer,
    #[serde(serialize_with = "serde_util::display")]
    pub dchain: Integer,
    #[serde(serialize_with = "serde_util::display")]
    pub dq: Rational,
    pub v3_dq: i64,
    pub v2_q: i64,
    pub hprime: usize,
}

/// Norms of `P_D(j₀)` (for the integral `P_D`) and of `27j₀ + 16`.
pub fn norm_profile(input: &ModuliInput, coeffs: &[Integer], dchain: &Integer) -> Result<NormProfile> {
    let p = QPoly::from_ints(coeffs);
    let res = input.minpoly.resultant(&p);
    if res == 0 {
        return Err(Error::Degenerate("j₀ is itself a root of P_D".into()));
    }
    let norm_p = res.pow(input.degree_mult);
    let norm_q = shifted_norm(input);
    let hprime = p.deg();
    let big = norm_p.clone().abs() * Integer::from(dchain.pow(hprime as u32));
    if *big.denom() != 1 {
        return Err(Error::Internal(format!("d = {dchain} does not clear Nm(P_D(j₀)) = {norm_p}")));
    }
    let dq = norm_q.clone().abs() * dchain;
    let v3_dq = rational_valuation(&dq, &Integer::from(3)).expect("Q ≠ 0");
    let v2_q = rational_valuation(&norm_q, &Integer::from(2)).expect("Q ≠ 0");
    Ok(NormProfile {
        s: sign(&norm_p),
        s_prime: sign(&norm_q),
        norm_p,
        norm_q,
        big_n: big.into_numer_denom().0,
        dchain: dchain.clone(),
        dq,
        v3_dq,
        v2_q,
        hprime,
    })
}

pub fn family_for_case(case: u8) -> Family {
    match case {
        1 => Family::FourL13,
        2 => Family::L19,
        _ => Family::ThreeL1,
    }
}

/// The symbol conditions on `l` relative to the bad primes.
pub fn l_conditions_hold(case: u8, l: u64, primes: &[Integer]) -> bool {
    let li = Integer::from(l);
    if primes.contains(&li) {
        return false;
    }
    primes.iter().filter(|q| **q > 3).all(|q| match case {
        1 => kronecker(&Integer::from(-&li), q) == 1,
        2 => kronecker(q, &li) == 1 && kronecker(&Integer::from(-&li), q) == 1,
        _ => kronecker(&Integer::from(-3 * &li), q) == 1,
    })
}

pub fn sieve_l(case: u8, primes: &[Integer], l_max: u64) -> Vec<u64> {
    let r = family_for_case(case).residue();
    primes_up_to(l_max)
        .into_iter()
        .filter(|&l| l >= 5 && l % 24 == r && l_conditions_hold(case, l, primes))
        .collect()
}

/// The parity exponent the case's closed-form chain ends with.
pub fn chain_parity(case: u8, degree: u64, prof: &NormProfile) -> i64 {
    match case {
        1 => degree as i64 + prof.v3_dq,
        2 => degree as i64 + prof.v3_dq + prof.v2_q,
        _ => 0,
    }
    .rem_euclid(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct Placement {
    pub ok: bool,
    pub rule: String,
    pub detail: String,
}

fn root_between(p: &QPoly, lo: &Rational, hi: Option<&Rational>) -> Result<RealRoot> {
    let roots: Vec<RealRoot> = p
        .squarefree_part()
        .real_roots()
        .into_iter()
        .filter(|r| {
            let mut r = r.clone();
            r.cmp_rational(lo).is_gt() && hi.is_none_or(|h| r.cmp_rational(h).is_lt())
        })
        .collect();
    match roots.as_slice() {
        [r] => Ok(r.clone()),
        _ => Err(Error::Hypothesis(format!("expected one real root of P_D there, found {}", roots.len()))),
    }
}

fn root_below(p: &QPoly, hi: &Rational) -> Result<RealRoot> {
    let roots: Vec<RealRoot> = p
        .squarefree_part()
        .real_roots()
        .into_iter()
        .filter(|r| r.clone().cmp_rational(hi).is_lt())
        .collect();
    match roots.as_slice() {
        [r] => Ok(r.clone()),
        _ => Err(Error::Hypothesis(format!("expected one real root of P_D below {hi}, found {}", roots.len()))),
    }
}

/// Whether the real roots of `P_D` sit where the argument for `case`
/// needs them, given the chain parity.
pub fn root_placement_ok(case: u8, coeffs: &[Integer], input: &ModuliInput, parity: i64) -> Result<Placement> {
    let p = QPoly::from_ints(coeffs);
    let f = &input.minpoly;
    let e = minus_16_27();
    let zero = Rational::new();
    let between = |a: Endpoint, b: Endpoint| count_between(f, &a, &b);
    match case {
        1 => {
            let r = root_between(&p, &e, Some(&zero))?;
            if parity == 1 {
                // No conjugate within |r + 16/27| of −16/27 (closed).
                let mirror = p.compose_affine(&Rational::from(-1), &Rational::from((-32, 27)));
                let a = root_between(&mirror, &Rational::from((-32, 27)), Some(&e))?;
                if f.gcd(&mirror).deg() > 0 {
                    return Err(Error::EndpointRoot("conjugate of j₀ at the mirrored root".into()));
                }
                let k = between(Endpoint::Root(a), Endpoint::Root(r.clone()))?;
                Ok(Placement {
                    ok: k == 0,
                    rule: "root of P_D closer to −16/27 than every real conjugate".into(),
                    detail: format!("{k} conjugates within distance, root ≈ {:.6}", r.to_f64()),
                })
            } else {
                let k = between(Endpoint::rational(e), Endpoint::Root(r.clone()))?;
                Ok(Placement {
                    ok: k == 1,
                    rule: "root of P_D just above the least conjugate in (−16/27, 0)".into(),
                    detail: format!("{k} conjugates in (−16/27, root), root ≈ {:.6}", r.to_f64()),
                })
            }
        }
        2 => {
            let r = root_between(&p, &zero, None)?;
            let n = between(Endpoint::rational(e), Endpoint::rational(zero.clone()))?;
            let k = between(Endpoint::rational(zero), Endpoint::Root(r.clone()))?;
            let want = if parity == (n as i64) % 2 { 1 } else { 0 };
            Ok(Placement {
                ok: k == want,
                rule: if want == 1 {
                    "root of P_D just above the least positive conjugate".into()
                } else {
                    "root of P_D below the least positive conjugate".into()
                },
                detail: format!("n = {n} conjugates in (−16/27, 0), {k} in (0, root), root ≈ {:.6}", r.to_f64()),
            })
        }
        _ => {
            let r1 = root_below(&p, &e)?;
            let r3 = root_between(&p, &zero, None)?;
            let k = between(Endpoint::Root(r1.clone()), Endpoint::Root(r3.clone()))?;
            Ok(Placement {
                ok: k % 2 == 1,
                rule: "odd number of conjugates between the two real roots of P_D".into(),
                detail: format!("{k} conjugates in ({:.6}, {:.6})", r1.to_f64(), r3.to_f64()),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub symbol: String,
    pub top: String,
    pub bottom: String,
    pub value: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    pub entries: Vec<ChainEntry>,
    /// Value of each displayed line.
    pub lines: Vec<i32>,
    pub direct: i32,
    pub value: i32,
}

/// Jacobi symbol `(a/n)`, `n` odd positive, by repeated reciprocity; the
/// transcript lists the intermediate `(a/n)` pairs.
pub fn jacobi_stepwise(a: &Integer, n: &Integer) -> (i32, Vec<(Integer, Integer)>) {
    assert!(n.is_odd() && *n > 0, "Jacobi symbol needs an odd positive modulus");
    let mut a = Integer::from(a.modulo_ref(n));
    let mut n = n.clone();
    let mut t = 1;
    let mut steps = vec![(a.clone(), n.clone())];
    while a != 0 {
        let z = a.find_one(0).unwrap();
        if z > 0 {
            a >>= z;
            let r8 = n.mod_u(8);
            if z % 2 == 1 && (r8 == 3 || r8 == 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_u(4) == 3 && n.mod_u(4) == 3 {
            t = -t;
        }
        a = Integer::from(a.modulo_ref(&n));
        steps.push((a.clone(), n.clone()));
    }
    (if n == 1 { t } else { 0 }, steps)
}

struct ChainBuilder {
    entries: Vec<ChainEntry>,
    lines: Vec<i32>,
}

impl ChainBuilder {
    fn line(&mut self, factors: &[(&str, Integer, Integer)]) -> Result<()> {
        let k = self.lines.len() + 1;
        let mut v = 1;
        for (label, top, bottom) in factors {
            let (x, _) = jacobi_stepwise(top, bottom);
            if x != kronecker(top, bottom) {
                return Err(Error::Internal(format!("stepwise ({top}/{bottom}) disagrees with direct")));
            }
            v *= x;
            self.entries.push(ChainEntry {
                symbol: format!("L{k} ({label})"),
                top: top.to_string(),
                bottom: bottom.to_string(),
                value: x,
            });
        }
        self.lines.push(v);
        Ok(())
    }

    fn closed(&mut self, label: &str, top: String, bottom: String, v: i32) {
        let k = self.lines.len() + 1;
        self.entries.push(ChainEntry { symbol: format!("L{k} {label}"), top, bottom, value: v });
        self.lines.push(v);
    }
}

fn int_of(q: &Rational, what: &str) -> Result<Integer> {
    if *q.denom() != 1 {
        return Err(Error::Hypothesis(format!("{what} = {q} is not an integer")));
    }
    Ok(q.numer().clone())
}

/// Evaluate `(D/N)` along the reciprocity chain of `case`, each line
/// checked against the direct symbol.
pub fn jacobi_chain(case: u8, l: u64, prof: &NormProfile, degree: u64) -> Result<Chain> {
    let n = prof.big_n.clone();
    let li = Integer::from(l);
    if n <= 0 || Integer::from(n.gcd_ref(&Integer::from(6))) != 1 {
        return Err(Error::Hypothesis(format!("N = {n} is not a positive integer prime to 6")));
    }
    if n.is_divisible(&li) {
        return Err(Error::Hypothesis(format!("l = {l} divides N")));
    }
    let d = family_for_case(case).disc(l);
    let di = Integer::from(d);
    let direct = kronecker(&di, &n);
    let m1 = Integer::from(-1);
    let ss = prof.s * prof.s_prime;
    let mut b = ChainBuilder { entries: Vec::new(), lines: Vec::new() };
    match case {
        1 => {
            let dq = int_of(&prof.dq, "dQ")?;
            let v3 = prof.v3_dq as u32;
            b.line(&[("D/N", di.clone(), n.clone())])?;
            b.line(&[("-1/N", m1.clone(), n.clone()), ("l/N", li.clone(), n.clone())])?;
            b.line(&[("-1/N", m1.clone(), n.clone()), ("N/l", n.clone(), li.clone())])?;
            b.line(&[("-1/N", m1.clone(), n.clone()), ("dQ/l", dq.clone(), li.clone())])?;
            b.line(&[("-1/N", m1.clone(), n.clone()), ("l/dQ", li.clone(), dq.clone())])?;
            b.line(&[
                ("-1/N", m1.clone(), n.clone()),
                ("-1/dQ", m1.clone(), dq.clone()),
                ("-l/dQ", Integer::from(-&li), dq.clone()),
            ])?;
            b.line(&[
                ("-1/N", m1.clone(), n.clone()),
                ("-1/dQ", m1.clone(), dq.clone()),
                ("-l/3^v3(dQ)", Integer::from(-&li), Integer::from(3).pow(v3)),
            ])?;
            let e = degree as i64 + prof.v3_dq;
            let v = ss * if e % 2 == 0 { 1 } else { -1 };
            b.closed("ss'(-1)^([L:Q]+v3(dQ))", format!("ss'={ss}"), format!("exponent={e}"), v);
        }
        2 => {
            let dq = int_of(&prof.dq, "dQ")?;
            b.line(&[("D/N", di.clone(), n.clone())])?;
            b.line(&[("N/l", n.clone(), li.clone())])?;
            let top = Integer::from(3).pow(degree as u32) * dq * ss;
            b.line(&[("ss'3^[L:Q]dQ/l", top, li.clone())])?;
            let e = degree as i64 + prof.v3_dq + prof.v2_q;
            let v = ss * if e % 2 == 0 { 1 } else { -1 };
            b.closed("ss'(-1)^([L:Q]+v3(dQ)+v2(Q))", format!("ss'={ss}"), format!("exponent={e}"), v);
        }
        _ => {
            let l3 = Integer::from(3 * &li);
            b.line(&[("D/N", di.clone(), n.clone())])?;
            b.line(&[("N/3l", n.clone(), l3.clone())])?;
            b.line(&[("-1/3l", m1.clone(), l3.clone()), ("-N/3l", Integer::from(-&n), l3.clone())])?;
            b.line(&[("-1/3l", m1, l3)])?;
        }
    }
    if let Some(k) = b.lines.iter().position(|&v| v != direct) {
        return Err(Error::Internal(format!(
            "case {case}, l = {l}: chain line {} gives {} but (D/N) = {direct}",
            k + 1,
            b.lines[k]
        )));
    }
    Ok(Chain { entries: b.entries, lines: b.lines, direct, value: direct })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateChecks {
    pub p_not_in_s: bool,
    pub p_coprime_to_6: bool,
    pub d_over_p_not_one: bool,
    pub root_interval: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub case: u8,
    #[serde(rename = "D")]
    pub d: i64,
    pub l: u64,
    pub p: String,
    /// Coefficients of the minimal polynomial of `j₀`, lowest degree first.
    pub minpoly: Vec<String>,
    pub degree_mult: u32,
    pub dchain: String,
    #[serde(rename = "N")]
    pub n: String,
    pub chain: Vec<ChainEntry>,
    pub checks: CertificateChecks,
    pub precision: u32,
    pub table_hash: String,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn minpoly_poly(&self) -> Result<QPoly> {
        let coeffs = self
            .minpoly
            .iter()
            .map(|c| c.parse::<Rational>().map_err(|_| Error::InvalidInput(format!("bad coefficient `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(QPoly::new(coeffs))
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub case: u8,
    pub candidates: usize,
    pub tried: usize,
    pub rejected: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub certificate: Certificate,
    pub selection: CaseSelection,
    pub stats: SearchStats,
    /// Bookkeeping remarks that do not affect validity.
    pub notes: Vec<String>,
}

enum Candidate {
    Accept(Box<Certificate>),
    Reject(String),
}

/// Shared per-run data.
struct Context<'a> {
    input: &'a ModuliInput,
    case: u8,
    primes: Vec<Integer>,
    dchain: Integer,
    order: &'a Order,
    table: &'a HeegnerTable,
    config: &'a Config,
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::HeightCapReached { .. }
            | Error::Reconstruction { .. }
            | Error::NoConvergence { .. }
            | Error::EndpointRoot(_)
            | Error::Hypothesis(_)
    )
}

/// Smallest prime `p | N` with `(D/p) = −1`, if it can be named.
fn pick_prime(d: i64, n: &Integer, exclude: &[Integer]) -> Option<Integer> {
    let fac = factor(n, FactorLimits::default());
    let di = Integer::from(d);
    fac.primes
        .iter()
        .map(|(p, _)| p.clone())
        .filter(|p| kronecker(&di, p) == -1 && !exclude.contains(p))
        .min()
}

fn evaluate(ctx: &Context<'_>, l: u64) -> Result<Candidate> {
    let d = family_for_case(ctx.case).disc(l);
    let entry = ctx.table.fetch_or_compute(ctx.order, d, ctx.config.heegner_options())?;
    let report = check_heegner(d, &entry.coeffs)?;
    if !report.all_pass() {
        return Ok(Candidate::Reject(format!("structural checks failed: {}", report.failures().join("; "))));
    }
    let prof = norm_profile(ctx.input, &entry.coeffs, &ctx.dchain)?;
    let parity = chain_parity(ctx.case, ctx.input.degree(), &prof);
    let placement = root_placement_ok(ctx.case, &entry.coeffs, ctx.input, parity)?;
    if !placement.ok {
        return Ok(Candidate::Reject("root placement".into()));
    }
    let forced_sign = match ctx.case {
        3 => prof.s == -1,
        _ => prof.s * prof.s_prime * if parity == 0 { 1 } else { -1 } == -1,
    };
    if !forced_sign {
        return Err(Error::Internal(format!("D = {d}: root placement holds but the norm has the wrong sign")));
    }
    if Integer::from(prof.big_n.gcd_ref(&Integer::from(6))) != 1 {
        return Ok(Candidate::Reject("N not prime to 6".into()));
    }
    let li = Integer::from(l);
    let (p, chain) = if prof.big_n.is_divisible(&li) {
        if ctx.config.exclude.contains(&li) {
            return Ok(Candidate::Reject("p excluded".into()));
        }
        let entry = ChainEntry { symbol: "L1 (D/l)".into(), top: d.to_string(), bottom: l.to_string(), value: 0 };
        (li, vec![entry])
    } else {
        let chain = jacobi_chain(ctx.case, l, &prof, ctx.input.degree())?;
        if chain.value != -1 {
            return Ok(Candidate::Reject("(D/N) = 1".into()));
        }
        match pick_prime(d, &prof.big_n, &ctx.config.exclude) {
            Some(p) => (p, chain.entries),
            None => return Ok(Candidate::Reject("no admissible prime factor of N found".into())),
        }
    };
    let checks = certificate_checks(d, l, &p, &ctx.primes, placement.ok);
    Ok(Candidate::Accept(Box::new(Certificate {
        case: ctx.case,
        d,
        l,
        p: p.to_string(),
        minpoly: ctx.input.coeff_strings(),
        degree_mult: ctx.input.degree_mult,
        dchain: ctx.dchain.to_string(),
        n: prof.big_n.to_string(),
        chain,
        checks,
        precision: entry.prec,
        table_hash: entry.hash(),
    })))
}

fn certificate_checks(d: i64, l: u64, p: &Integer, primes: &[Integer], root_interval: bool) -> CertificateChecks {
    CertificateChecks {
        p_not_in_s: !primes.contains(p),
        p_coprime_to_6: Integer::from(p.gcd_ref(&Integer::from(6))) == 1,
        d_over_p_not_one: kronecker(&Integer::from(d), p) == -1 || *p == l,
        root_interval,
    }
}

/// Run the search; the certificate for the least admissible `l` wins.
pub fn find_superspecial(
    input: &ModuliInput,
    config: &Config,
    table: &HeegnerTable,
    order: &Order,
) -> Result<SearchOutcome> {
    config.validate()?;
    let selection = case_select(input);
    let case = match config.force_case {
        Some(c) if selection.trace.conditions[c as usize - 1] => c,
        Some(c) => return Err(Error::Hypothesis(format!("the hypotheses of case {c} do not hold"))),
        None => selection.case.ok_or_else(|| Error::Hypothesis("no case of the theorem applies".into()))?,
    };
    let primes = prime_set(input)?;
    let dchain = choose_clearing_d(input, case, &primes)?;
    let mut notes = Vec::new();
    let three = Integer::from(3);
    let v3 = |x: &Integer| x.clone().remove_factor_mut(&three) % 2;
    if v3(&input.d) != v3(&dchain) {
        notes.push(format!("v₃(d) and v₃(dchain) differ in parity (d = {}, dchain = {dchain})", input.d));
    }
    let ctx = Context { input, case, primes, dchain, order, table, config };
    let cands = sieve_l(case, &ctx.primes, config.l_max);
    let mut stats = SearchStats { case, candidates: cands.len(), ..Default::default() };
    let batch = rayon::current_num_threads().max(2);
    for chunk in cands.chunks(batch) {
        let results: Vec<Result<Candidate>> = chunk.par_iter().map(|&l| evaluate(&ctx, l)).collect();
        for (l, r) in chunk.iter().zip(results) {
            stats.tried += 1;
            let reason = match r {
                Ok(Candidate::Accept(cert)) => {
                    return Ok(SearchOutcome { certificate: *cert, selection, stats, notes });
                }
                Ok(Candidate::Reject(why)) => why,
                Err(e) if recoverable(&e) => format!("P_D unavailable: {}", error_kind(&e)),
                Err(e) => return Err(Error::Internal(format!("l = {l}: {e}"))),
            };
            *stats.rejected.entry(reason).or_default() += 1;
        }
    }
    Err(Error::Exhausted { l_max: config.l_max, tried: stats.tried })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::HeightCapReached { .. } => "height cap",
        Error::Reconstruction { .. } => "reconstruction",
        Error::NoConvergence { .. } => "no convergence",
        Error::EndpointRoot(_) => "endpoint root",
        _ => "hypothesis",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// Recompute everything a certificate claims. The transcript is checked by
/// regeneration, never trusted.
pub fn verify_certificate(
    cert: &Certificate,
    input: Option<&ModuliInput>,
    table: &HeegnerTable,
    order: &Order,
    config: &Config,
) -> Verification {
    let mut reasons = Vec::new();
    match verify_inner(cert, input, table, order, config, &mut reasons) {
        Ok(()) => {}
        Err(e) => reasons.push(e.to_string()),
    }
    Verification { pass: reasons.is_empty(), reasons }
}

fn verify_inner(
    cert: &Certificate,
    input: Option<&ModuliInput>,
    table: &HeegnerTable,
    order: &Order,
    config: &Config,
    reasons: &mut Vec<String>,
) -> Result<()> {
    let fail = |reasons: &mut Vec<String>, m: String| reasons.push(m);
    let parsed = parse_moduli(&cert.minpoly_poly()?, cert.degree_mult)?;
    if let Some(inp) = input {
        if inp.minpoly != parsed.minpoly || inp.degree_mult != parsed.degree_mult {
            fail(reasons, "certificate is for a different moduli point".into());
        }
    }
    if !(1..=3).contains(&cert.case) {
        fail(reasons, format!("unknown case {}", cert.case));
        return Ok(());
    }
    let sel = case_select(&parsed);
    if !sel.trace.conditions[cert.case as usize - 1] {
        fail(reasons, format!("case {} hypotheses do not hold for j₀", cert.case));
    }
    let family = family_for_case(cert.case);
    if !is_prime_u64(cert.l) || cert.l % 24 != family.residue() {
        fail(reasons, format!("l = {} is not a prime ≡ {} mod 24", cert.l, family.residue()));
        return Ok(());
    }
    if cert.d != family.disc(cert.l) {
        fail(reasons, format!("D = {} does not match case {} and l = {}", cert.d, cert.case, cert.l));
        return Ok(());
    }
    let primes = prime_set(&parsed)?;
    if !l_conditions_hold(cert.case, cert.l, &primes) {
        fail(reasons, format!("l = {} fails the symbol conditions", cert.l));
    }
    let dchain = choose_clearing_d(&parsed, cert.case, &primes)?;
    if dchain.to_string() != cert.dchain {
        fail(reasons, format!("dchain mismatch: recomputed {dchain}"));
    }
    let entry: TableEntry = match table.get_valid(cert.d)? {
        Some(e) => e,
        None => {
            let mut opts = config.heegner_options();
            opts.digits = cert.precision.max(crate::config::MIN_PRECISION);
            table.fetch_or_compute(order, cert.d, opts)?
        }
    };
    if entry.hash() != cert.table_hash {
        fail(reasons, "table hash mismatch".into());
    }
    if entry.prec != cert.precision {
        fail(reasons, format!("precision {} differs from the table entry ({})", cert.precision, entry.prec));
    }
    let report = check_heegner(cert.d, &entry.coeffs)?;
    if !report.all_pass() {
        fail(reasons, format!("P_D fails structural checks: {}", report.failures().join("; ")));
    }
    let prof = norm_profile(&parsed, &entry.coeffs, &dchain)?;
    if prof.big_n.to_string() != cert.n {
        fail(reasons, format!("N mismatch: recomputed {}", prof.big_n));
    }
    let Ok(p) = Integer::from_str_radix(&cert.p, 10) else {
        fail(reasons, format!("p = `{}` is not an integer", cert.p));
        return Ok(());
    };
    if p < 2 || !is_prime(&p) {
        fail(reasons, format!("p = {p} is not prime"));
        return Ok(());
    }
    let checks = certificate_checks(
        cert.d,
        cert.l,
        &p,
        &primes,
        root_placement_ok(cert.case, &entry.coeffs, &parsed, chain_parity(cert.case, parsed.degree(), &prof))?.ok,
    );
    if !checks.p_coprime_to_6 {
        fail(reasons, format!("p = {p} divides 6"));
    }
    if !checks.p_not_in_s {
        fail(reasons, format!("excluded prime: p = {p} lies in Nm(S)"));
    }
    if !prof.big_n.is_divisible(&p) {
        fail(reasons, "v_p(N) = 0".into());
    }
    if !checks.d_over_p_not_one {
        fail(reasons, "(D/p) ≠ −1".into());
    }
    if checks != cert.checks {
        fail(reasons, "recorded checks differ from recomputed ones".into());
    }
    let li = Integer::from(cert.l);
    let chain = if prof.big_n.is_divisible(&li) {
        vec![ChainEntry { symbol: "L1 (D/l)".into(), top: cert.d.to_string(), bottom: cert.l.to_string(), value: 0 }]
    } else {
        match jacobi_chain(cert.case, cert.l, &prof, parsed.degree()) {
            Ok(c) => {
                if c.value != -1 {
                    fail(reasons, "(D/N) = 1".into());
                }
                c.entries
            }
            Err(e) => {
                fail(reasons, format!("chain cannot be evaluated: {e}"));
                Vec::new()
            }
        }
    };
    if chain != cert.chain {
        fail(reasons, "chain transcript mismatch".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(s: &str) -> ModuliInput {
        parse_moduli_str(s, 1).unwrap()
    }

    fn ints(v: &[Integer]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parse_examples() {
        let a = input("x + 1/2");
        assert_eq!((a.n.to_i32(), a.d.to_i32()), (Some(-1), Some(2)));
        assert_eq!(a.real_roots.len(), 1);
        let b = input("x^2 - 2");
        assert_eq!((b.n.to_i32(), b.d.to_i32()), (Some(-2), Some(1)));
        assert_eq!(b.real_roots.len(), 2);
        assert!(input("x^2 + 1").real_roots.is_empty());
        assert!(parse_moduli_str("x^2 - 1", 1).is_err());
        assert!(parse_moduli_str("x", 1).is_err());
        assert!(parse_moduli_str("27*x + 16", 1).is_err());
    }

    #[test]
    fn valuation_signs() {
        assert_eq!(local_valuation_signs(&input("x + 1/2"), 2), ValuationSigns::AllNonpositive);
        assert_eq!(local_valuation_signs(&input("x^2 - 2"), 2), ValuationSigns::AllNonnegative);
        assert_eq!(local_valuation_signs(&input("x - 3"), 3), ValuationSigns::AllNonnegative);
        assert_eq!(local_valuation_signs(&input("x - 1"), 3), ValuationSigns::AllZero);
    }

    #[test]
    fn prime_sets() {
        let show = |s: &str| ints(&prime_set(&input(s)).unwrap());
        assert_eq!(show("x + 1/2"), ["2", "3", "5"]);
        assert_eq!(show("x - 1"), ["2", "3", "43"]);
        assert_eq!(show("x^2 - 2"), ["2", "3", "601"]);
    }

    #[test]
    fn cases_and_clearing() {
        for (s, case, d) in [("x + 1/2", 1, 2), ("x - 1", 2, 1), ("x^2 - 2", 3, 1)] {
            let inp = input(s);
            assert_eq!(case_select(&inp).case, Some(case), "{s}");
            let primes = prime_set(&inp).unwrap();
            assert_eq!(choose_clearing_d(&inp, case, &primes).unwrap(), d);
        }
        assert_eq!(case_select(&input("x^2 + 1")).case, None);
    }

    #[test]
    fn resultant_is_norm() {
        let inp = input("x - 1");
        let prof = norm_profile(&inp, &[Integer::from(-81), Integer::from(64)], &Integer::from(1)).unwrap();
        assert_eq!(prof.norm_p, -17);
        assert_eq!(prof.big_n, 17);
        assert_eq!(prof.norm_q, 43);
        let inp = input("x + 1/2");
        assert!(matches!(
            norm_profile(&inp, &[Integer::from(1), Integer::from(2)], &Integer::from(2)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn sieve_conditions() {
        let s5 = [Integer::from(2), Integer::from(3), Integer::from(5)];
        for l in sieve_l(1, &s5, 500) {
            assert_eq!(l % 24, 13);
            assert_eq!(kronecker(&Integer::from(-(l as i64)), &Integer::from(5)), 1);
        }
        let s43 = [Integer::from(2), Integer::from(3), Integer::from(43)];
        for l in sieve_l(2, &s43, 2000) {
            assert_eq!(l % 24, 19);
            assert_eq!(crate::quadratic::kronecker_i(43, l as i64), 1);
        }
    }

    #[test]
    fn stepwise_small() {
        for n in (1..200i64).step_by(2) {
            for a in -60..60i64 {
                let (v, _) = jacobi_stepwise(&Integer::from(a), &Integer::from(n));
                assert_eq!(v, crate::quadratic::kronecker_i(a, n), "({a}/{n})");
            }
        }
    }
}
