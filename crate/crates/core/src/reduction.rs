//! Structural constraints on Heegner polynomials: shapes modulo 2 and 3,
//! unpaired roots modulo `l`, avoidance of the elliptic divisors at 2 and
//! 3, local intersection numbers on `ℙ¹`, and real-root placement.

use std::fmt;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::{is_prime_u64, rational_valuation};
use crate::error::{Error, Result};
use crate::poly::{count_between, Bound, Endpoint, QPoly};
use crate::polymod::{invmod, reduce_integer, FpPoly};
use crate::quadratic::{is_square_mod, Family};

/// `P mod p` classified against the shapes that occur for Heegner
/// polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ModShape {
    /// `c·x^h′` with `c ∈ {±1}`.
    TopMonomial { sign: i8 },
    /// A nonzero constant `±1`.
    Constant { sign: i8 },
    /// Anything else, with the residue polynomial for diagnosis.
    Other(String),
}

impl ModShape {
    pub fn tag(&self, p: u64) -> String {
        let pm = if p == 3 { "±" } else { "" };
        match self {
            ModShape::TopMonomial { .. } => format!("{pm}x^h′"),
            ModShape::Constant { .. } => format!("{pm}1"),
            ModShape::Other(s) => format!("other ({s})"),
        }
    }

    /// Same shape class, ignoring the sign.
    pub fn same_class(&self, other: &ModShape) -> bool {
        matches!(
            (self, other),
            (ModShape::TopMonomial { .. }, ModShape::TopMonomial { .. })
                | (ModShape::Constant { .. }, ModShape::Constant { .. })
        )
    }
}

pub fn mod_shape(coeffs: &[Integer], p: u64) -> Result<ModShape> {
    if p != 2 && p != 3 {
        return Err(Error::InvalidInput(format!("shape classification is for p = 2, 3, not {p}")));
    }
    let red: Vec<u64> = coeffs.iter().map(|c| reduce_integer(c, p)).collect();
    let nonzero: Vec<usize> = (0..red.len()).filter(|&k| red[k] != 0).collect();
    let top = coeffs.len() - 1;
    let sign = |v: u64| if v == 1 { 1 } else { -1 };
    Ok(match nonzero.as_slice() {
        [k] if *k == top && top > 0 => ModShape::TopMonomial { sign: sign(red[*k]) },
        [0] => ModShape::Constant { sign: sign(red[0]) },
        _ => ModShape::Other(FpPoly::new(p, red).to_string()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Residue {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residue::Finite(a) => write!(f, "{a}"),
            Residue::Infinity => write!(f, "∞"),
        }
    }
}

/// Roots of odd multiplicity of `P mod l` (on `ℙ¹(𝔽_l)`).
#[derive(Clone, Debug, Serialize)]
pub struct UnpairedDivisor {
    pub l: u64,
    pub residues: Vec<Residue>,
    /// Total degree of odd-multiplicity factors without roots in `𝔽_l`.
    pub nonrational_degree: usize,
}

/// `−16/27 mod l`, the residue of the order-2 elliptic point.
pub fn elliptic2_residue(l: u64) -> u64 {
    let inv27 = invmod(27 % l, l);
    (l - 16 % l) * inv27 % l
}

pub fn unpaired_divisor(coeffs: &[Integer], l: u64) -> Result<UnpairedDivisor> {
    if l < 5 || !is_prime_u64(l) {
        return Err(Error::InvalidInput(format!("unpaired roots are defined for primes l ≥ 5, not {l}")));
    }
    let f = FpPoly::from_integers(coeffs, l);
    if f.is_zero() {
        return Err(Error::Degenerate(format!("polynomial vanishes identically mod {l}")));
    }
    if f.deg() >= l as usize {
        return Err(Error::InvalidInput(format!("degree {} too large for l = {l}", f.deg())));
    }
    let mut residues = Vec::new();
    let drop = coeffs.len() - 1 - f.deg();
    if drop % 2 == 1 {
        residues.push(Residue::Infinity);
    }
    let mut nonrational_degree = 0;
    for (a, mult) in f.squarefree_decomposition() {
        if mult % 2 == 0 {
            continue;
        }
        let roots = a.roots();
        nonrational_degree += a.deg() - roots.len();
        residues.extend(roots.into_iter().map(Residue::Finite));
    }
    residues.sort();
    Ok(UnpairedDivisor { l, residues, nonrational_degree })
}

/// Whether the Heegner divisor of discriminant `d` provably misses the
/// elliptic divisor `anchor ∈ {−3, −4}` at `p`: true when `anchor·d` is
/// not a square modulo `24p`.
pub fn avoid_intersection(d: i64, p: u64, anchor: i64) -> Result<bool> {
    match anchor {
        -3 if d % 3 == 0 => Err(Error::InvalidInput(format!("anchor −3 needs 3 ∤ D, got D = {d}"))),
        -4 if d % 2 == 0 => Err(Error::InvalidInput(format!("anchor −4 needs 2 ∤ D, got D = {d}"))),
        -3 | -4 => {
            let a = Integer::from(anchor) * d;
            Ok(!is_square_mod(&a, &Integer::from(24 * p)))
        }
        _ => Err(Error::InvalidInput(format!("anchor must be −3 or −4, got {anchor}"))),
    }
}

/// A point of `ℙ¹(ℚ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjPoint {
    Finite(Rational),
    Infinity,
}

impl ProjPoint {
    fn valuation(&self, p: &Integer) -> Option<i64> {
        match self {
            ProjPoint::Finite(x) => rational_valuation(x, p),
            ProjPoint::Infinity => None,
        }
    }

    fn inverse(&self) -> Rational {
        match self {
            ProjPoint::Finite(x) => Rational::from(x.recip_ref()),
            ProjPoint::Infinity => Rational::new(),
        }
    }
}

/// Local intersection number at `p` of the sections through `x ≠ y` of
/// `ℙ¹` over `ℤ_(p)`.
pub fn local_intersection(x: &ProjPoint, y: &ProjPoint, p: u64) -> Result<u32> {
    if x == y {
        return Err(Error::InvalidInput("local intersection needs distinct points".into()));
    }
    let pz = Integer::from(p);
    // A missing valuation is +∞ for 0 and "negative" for the point ∞.
    let integral = |pt: &ProjPoint| match pt {
        ProjPoint::Infinity => false,
        ProjPoint::Finite(_) => pt.valuation(&pz).is_none_or(|v| v >= 0),
    };
    let v = match (integral(x), integral(y)) {
        (true, true) => {
            let (ProjPoint::Finite(a), ProjPoint::Finite(b)) = (x, y) else { unreachable!() };
            rational_valuation(&Rational::from(a - b), &pz)
        }
        (false, false) => rational_valuation(&(x.inverse() - y.inverse()), &pz),
        _ => Some(0),
    };
    Ok(v.expect("distinct points have finite valuation") as u32)
}

/// Real roots in `I₁ = (−∞, −16/27)`, `I₂ = (−16/27, 0)`, `I₃ = (0, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalProfile {
    pub counts: [usize; 3],
    pub total_real: usize,
}

pub fn minus_16_27() -> Rational {
    Rational::from((-16, 27))
}

pub fn interval_profile(p: &QPoly) -> Result<IntervalProfile> {
    let e = minus_16_27();
    let sf = p.squarefree_part();
    for x in [&e, &Rational::new()] {
        if sf.eval(x) == 0 {
            return Err(Error::EndpointRoot(format!("root exactly at {x}")));
        }
    }
    let ends = [
        Endpoint::Bound(Bound::NegInf),
        Endpoint::rational(e),
        Endpoint::rational(Rational::new()),
        Endpoint::Bound(Bound::PosInf),
    ];
    let mut counts = [0; 3];
    for k in 0..3 {
        counts[k] = count_between(&sf, &ends[k], &ends[k + 1])?;
    }
    Ok(IntervalProfile { counts, total_real: sf.count_real_roots() })
}

/// Roots in the open interval `(a, b)` between rational endpoints.
pub fn roots_in(p: &QPoly, a: &Rational, b: &Rational) -> Result<usize> {
    count_between(p, &Endpoint::rational(a.clone()), &Endpoint::rational(b.clone()))
}

/// What the tables predict for a family.
#[derive(Clone, Debug, Serialize)]
pub struct Expectation {
    pub mod2: ModShape,
    pub mod3: ModShape,
    pub unpaired_elliptic: bool,
    pub intervals: [usize; 3],
    /// `(p, anchor)` pairs whose avoidance the mod-2/3 shapes rest on.
    pub avoidance: Vec<(u64, i64)>,
}

pub fn expectation(family: Family) -> Expectation {
    let top = ModShape::TopMonomial { sign: 1 };
    let one = ModShape::Constant { sign: 1 };
    match family {
        Family::FourL13 => Expectation {
            mod2: top.clone(),
            mod3: top,
            unpaired_elliptic: true,
            intervals: [0, 1, 0],
            avoidance: vec![(3, -3)],
        },
        Family::L19 => Expectation {
            mod2: one,
            mod3: top,
            unpaired_elliptic: true,
            intervals: [0, 0, 1],
            avoidance: vec![(3, -3), (2, -4)],
        },
        Family::ThreeL1 => Expectation {
            mod2: one.clone(),
            mod3: one,
            unpaired_elliptic: false,
            intervals: [1, 0, 1],
            avoidance: vec![(3, -4), (2, -4)],
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub check: String,
    /// Table row the check validates.
    pub source: String,
    pub observed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChecksReport {
    pub d: i64,
    pub family: Family,
    pub l: u64,
    pub rows: Vec<CheckRow>,
}

impl ChecksReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{}: observed {}, expected {}", r.check, r.observed, r.expected))
            .collect()
    }
}

/// Run every structural check on an integral `P_D` of discriminant `d`.
pub fn check_heegner(d: i64, coeffs: &[Integer]) -> Result<ChecksReport> {
    let (family, l) = Family::from_disc(d)
        .ok_or_else(|| Error::InvalidInput(format!("D = {d} is not in a tabulated family")))?;
    let exp = expectation(family);
    let row_label = family.label();
    let hprime = coeffs.len() - 1;
    let mut rows = Vec::new();
    for (p, want) in [(2, &exp.mod2), (3, &exp.mod3)] {
        let got = mod_shape(coeffs, p)?;
        rows.push(CheckRow {
            check: format!("P_D mod {p}"),
            source: format!("mod-{p} shape, row {row_label}"),
            observed: got.tag(p).replace("h′", &hprime.to_string()),
            expected: want.tag(p).replace("h′", &hprime.to_string()),
            pass: got.same_class(want),
        });
    }
    let div = unpaired_divisor(coeffs, l)?;
    let e2 = Residue::Finite(elliptic2_residue(l));
    let want: Vec<Residue> = if exp.unpaired_elliptic { vec![e2] } else { vec![] };
    let show = |v: &[Residue]| {
        if v.is_empty() {
            "∅".to_string()
        } else {
            format!("({})", v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "))
        }
    };
    rows.push(CheckRow {
        check: format!("unpaired roots mod {l}"),
        source: format!("root pairing, row {row_label}"),
        observed: show(&div.residues),
        expected: if exp.unpaired_elliptic { format!("(−16/27) = {}", show(&want)) } else { "∅".into() },
        pass: div.residues == want && div.nonrational_degree == 0,
    });
    let mut avoid_obs = Vec::new();
    let mut avoid_ok = true;
    for &(p, anchor) in &exp.avoidance {
        let ok = avoid_intersection(d, p, anchor)?;
        avoid_ok &= ok;
        avoid_obs.push(format!("{}·D mod {}: {}", anchor, 24 * p, if ok { "non-square" } else { "square" }));
    }
    rows.push(CheckRow {
        check: "avoids elliptic divisors at 2, 3".into(),
        source: format!("avoidance predicate, row {row_label}"),
        observed: avoid_obs.join("; "),
        expected: "all non-square".into(),
        pass: avoid_ok,
    });
    let prof = interval_profile(&QPoly::from_ints(coeffs))?;
    rows.push(CheckRow {
        check: "real roots in (I₁, I₂, I₃)".into(),
        source: format!("root location, row {row_label}"),
        observed: format!("{:?}", prof.counts),
        expected: format!("{:?}", exp.intervals),
        pass: prof.counts == exp.intervals,
    });
    Ok(ChecksReport { d, family, l, rows })
}
