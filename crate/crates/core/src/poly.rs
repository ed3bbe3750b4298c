//! Dense univariate polynomials over ℚ: exact arithmetic, resultants,
//! Sturm sequences, real-root isolation, Newton polygons and a small parser.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::arith::rational_valuation;
use crate::error::{Error, Result};

/// Coefficients are stored lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

/// Endpoint for Sturm counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    At(Rational),
    PosInf,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints<T: Into<Integer> + Clone>(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|c| Rational::from(c.clone().into())).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `a·x + b`
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![b, a])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == 1)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        self.scale(&Rational::from(lc.recip_ref()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * k as u32))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::from(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        let lc_inv = Rational::from(d.leading().recip_ref());
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = Rational::from(&r[k + dd] * &lc_inv);
            if c != 0 {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    r[k + i] -= Rational::from(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> Self {
        if self.deg() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// `f(a·x + b)`
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Self {
        let lin = Self::linear(a.clone(), b.clone());
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Integer multiple with coprime coefficients and positive leading term.
    pub fn primitive_integer(&self) -> Vec<Integer> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let mut ints: Vec<Integer> =
            self.coeffs.iter().map(|c| Integer::from(c.numer() * &den) / c.denom()).collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        for c in &mut ints {
            *c /= &g;
        }
        ints
    }

    /// Integer coefficients if every coefficient is integral.
    pub fn to_integers(&self) -> Option<Vec<Integer>> {
        self.coeffs.iter().map(|c| (*c.denom() == 1).then(|| c.numer().clone())).collect()
    }

    /// `Res(self, other)` via the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Self) -> Rational {
        if self.is_zero() || other.is_zero() {
            return Rational::new();
        }
        let (mut f, mut g) = (self.clone(), other.clone());
        let mut acc = Rational::from(1);
        loop {
            let (df, dg) = (f.deg(), g.deg());
            if dg == 0 {
                let mut c = g.leading();
                c = c.pow(df as u32);
                return acc * c;
            }
            if df == 0 {
                let mut c = f.leading();
                c = c.pow(dg as u32);
                return acc * c;
            }
            let r = f.rem(&g);
            if r.is_zero() {
                return Rational::new();
            }
            let dr = r.deg();
            if (df * dg) % 2 == 1 {
                acc = -acc;
            }
            let mut lc = g.leading();
            lc = lc.pow((df - dr) as u32);
            acc *= lc;
            f = g;
            g = r;
        }
    }

    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Sign at a finite point or at ±∞.
    pub fn sign_at(&self, b: &Bound) -> i32 {
        match b {
            Bound::At(x) => sign(&self.eval(x)),
            Bound::PosInf => sign(&self.leading()),
            Bound::NegInf => {
                let s = sign(&self.leading());
                if self.deg() % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots_half_open(&self, a: &Bound, b: &Bound) -> usize {
        if self.deg() == 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        let va = sign_changes(&seq, a);
        let vb = sign_changes(&seq, b);
        va.saturating_sub(vb)
    }

    /// Distinct real roots in the open interval `(a, b)`.
    pub fn count_roots_open(&self, a: &Bound, b: &Bound) -> usize {
        let n = self.count_roots_half_open(a, b);
        match b {
            Bound::At(x) if self.eval(x) == 0 => n - 1,
            _ => n,
        }
    }

    pub fn count_real_roots(&self) -> usize {
        self.count_roots_half_open(&Bound::NegInf, &Bound::PosInf)
    }

    /// Rational `B` with every complex root of modulus `< B`.
    pub fn root_bound(&self) -> Rational {
        let lc = self.leading().abs();
        let mut m = Rational::new();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let q = Rational::from(c.abs_ref()) / &lc;
            if q > m {
                m = q;
            }
        }
        m + 1
    }

    /// Isolating intervals of the distinct real roots, in increasing order.
    pub fn real_roots(&self) -> Vec<RealRoot> {
        if self.deg() == 0 {
            return Vec::new();
        }
        let sf = self.squarefree_part();
        let seq = sf.sturm_sequence();
        let bnd = sf.root_bound();
        let mut out = Vec::new();
        let mut stack: Vec<(Rational, Rational)> = vec![(-bnd.clone(), bnd)];
        while let Some((lo, hi)) = stack.pop() {
            let n = sign_changes(&seq, &Bound::At(lo.clone()))
                - sign_changes(&seq, &Bound::At(hi.clone()));
            match n {
                0 => {}
                1 => out.push(RealRoot::new(sf.clone(), lo, hi)),
                _ => {
                    let mid: Rational = Rational::from(&lo + &hi) / 2;
                    // Right half first so the stack pops the left half first.
                    stack.push((mid.clone(), hi));
                    stack.push((lo, mid));
                }
            }
        }
        out
    }

    /// Multiset of `v_p` of the roots (in a splitting field) from the lower
    /// Newton polygon; entries are `(valuation, count)`. A root at zero shows
    /// up as `None`.
    pub fn newton_polygon(&self, p: &Integer) -> Vec<(Option<Rational>, usize)> {
        let mut out = Vec::new();
        let pts: Vec<(usize, i64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter_map(|(k, c)| rational_valuation(c, p).map(|v| (k, v)))
            .collect();
        if pts.is_empty() {
            return out;
        }
        if pts[0].0 > 0 {
            out.push((None, pts[0].0));
        }
        let mut i = 0;
        while i + 1 < pts.len() {
            let (k0, v0) = pts[i];
            // Steepest-descending (minimal slope) segment from pts[i]; ties
            // resolved toward the farthest point.
            let mut best = i + 1;
            for j in i + 1..pts.len() {
                let (kb, vb) = pts[best];
                let (kj, vj) = pts[j];
                let lhs = (vj - v0) as i128 * (kb - k0) as i128;
                let rhs = (vb - v0) as i128 * (kj - k0) as i128;
                if lhs <= rhs {
                    best = j;
                }
            }
            let (k1, v1) = pts[best];
            let slope = Rational::from((v1 - v0, (k1 - k0) as i64));
            out.push((Some(-slope), k1 - k0));
            i = best;
        }
        out
    }

    /// Parse an ASCII expression such as `x^2 - 3/4*x + 1`.
    pub fn parse(s: &str) -> Result<Self> {
        Parser { src: s.as_bytes(), pos: 0 }.parse()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }
}

pub fn sign(r: &Rational) -> i32 {
    match r.cmp0() {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn sign_changes(seq: &[QPoly], at: &Bound) -> usize {
    let mut last = 0;
    let mut n = 0;
    for p in seq {
        let s = p.sign_at(at);
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// A real root of a squarefree polynomial, known to be the unique root in
/// the half-open interval `(lo, hi]`, or exactly `lo == hi` once hit.
#[derive(Clone, Debug)]
pub struct RealRoot {
    poly: QPoly,
    lo: Rational,
    hi: Rational,
    exact: bool,
}

impl RealRoot {
    fn new(poly: QPoly, lo: Rational, hi: Rational) -> Self {
        let mut r = RealRoot { poly, lo, hi, exact: false };
        r.check_exact_hi();
        r
    }

    fn check_exact_hi(&mut self) {
        if !self.exact && self.poly.eval(&self.hi) == 0 {
            self.lo = self.hi.clone();
            self.exact = true;
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    fn sign_right_of_lo(&self) -> i32 {
        let s = sign(&self.poly.eval(&self.lo));
        if s != 0 {
            s
        } else {
            sign(&self.poly.derivative().eval(&self.lo))
        }
    }

    /// Halve the isolating interval.
    pub fn bisect(&mut self) {
        if self.exact {
            return;
        }
        let mid: Rational = Rational::from(&self.lo + &self.hi) / 2;
        let sm = sign(&self.poly.eval(&mid));
        if sm == 0 {
            self.lo = mid.clone();
            self.hi = mid;
            self.exact = true;
        } else if sm != self.sign_right_of_lo() {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    pub fn refine_to(&mut self, width: &Rational) {
        while !self.exact && self.width() > *width {
            self.bisect();
        }
    }

    pub fn midpoint(&self) -> Rational {
        Rational::from(&self.lo + &self.hi) / 2
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// Compare with a rational; exact (refines until decided).
    pub fn cmp_rational(&mut self, x: &Rational) -> Ordering {
        loop {
            if self.exact {
                return self.lo.cmp(x);
            }
            if *x <= self.lo {
                return Ordering::Greater;
            }
            if *x >= self.hi {
                return Ordering::Less;
            }
            if self.poly.eval(x) == 0 {
                return Ordering::Equal;
            }
            self.bisect();
        }
    }

    /// Refine until `other` has no root in `(lo, hi]`. Requires that this
    /// root is not a root of `other`; gives up after `max_steps` bisections.
    pub fn separate_from(&mut self, other: &QPoly, max_steps: usize) -> Result<()> {
        for _ in 0..=max_steps {
            if self.exact {
                return if other.eval(&self.lo) == 0 {
                    Err(Error::EndpointRoot(format!("common root {}", self.lo)))
                } else {
                    Ok(())
                };
            }
            let n = other.count_roots_half_open(
                &Bound::At(self.lo.clone()),
                &Bound::At(self.hi.clone()),
            );
            if n == 0 {
                return Ok(());
            }
            self.bisect();
        }
        Err(Error::EndpointRoot("roots could not be separated".into()))
    }
}

/// Number of distinct roots of `f` strictly between two algebraic endpoints.
/// Endpoints are `Bound`s or isolated roots of other polynomials.
#[derive(Clone, Debug)]
pub enum Endpoint {
    Bound(Bound),
    Root(RealRoot),
}

impl Endpoint {
    pub fn rational(x: Rational) -> Self {
        Endpoint::Bound(Bound::At(x))
    }
}

/// `#{roots of f in (a, b)}`, exact. Roots of `f` equal to an endpoint are
/// an error.
pub fn count_between(f: &QPoly, a: &Endpoint, b: &Endpoint) -> Result<usize> {
    let sf = f.squarefree_part();
    let left = match a {
        Endpoint::Bound(Bound::At(x)) => {
            if sf.eval(x) == 0 {
                return Err(Error::EndpointRoot(format!("root at {x}")));
            }
            Bound::At(x.clone())
        }
        Endpoint::Bound(bd) => bd.clone(),
        Endpoint::Root(r) => {
            let mut r = r.clone();
            r.separate_from(&sf, 4096)?;
            Bound::At(r.hi.clone())
        }
    };
    let right = match b {
        Endpoint::Bound(Bound::At(x)) => {
            if sf.eval(x) == 0 {
                return Err(Error::EndpointRoot(format!("root at {x}")));
            }
            Bound::At(x.clone())
        }
        Endpoint::Bound(bd) => bd.clone(),
        Endpoint::Root(r) => {
            let mut r = r.clone();
            r.separate_from(&sf, 4096)?;
            // No root of f in (lo, hi]; roots below the endpoint lie in (·, lo].
            Bound::At(r.lo.clone())
        }
    };
    if let (Bound::At(x), Bound::At(y)) = (&left, &right) {
        if x >= y {
            return Ok(0);
        }
    }
    Ok(sf.count_roots_half_open(&left, &right))
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = c.cmp0() == Ordering::Less;
            let abs = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = abs != 1 || k == 0;
            if show_coeff {
                write!(f, "{abs}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse::<Integer>().expect("digits"))
    }

    fn parse(mut self) -> Result<QPoly> {
        let mut terms: Vec<Rational> = Vec::new();
        let mut first = true;
        loop {
            let mut neg = false;
            match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => self.pos += 1,
                Some(b'-') => {
                    neg = true;
                    self.pos += 1
                }
                Some(_) if first => {}
                Some(_) => return self.err("expected '+' or '-'"),
            }
            first = false;
            let (c, k) = self.term()?;
            if terms.len() <= k {
                terms.resize(k + 1, Rational::new());
            }
            if neg {
                terms[k] -= c;
            } else {
                terms[k] += c;
            }
        }
        Ok(QPoly::new(terms))
    }

    fn term(&mut self) -> Result<(Rational, usize)> {
        let mut coeff = Rational::from(1);
        let mut have_coeff = false;
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let num = self.integer()?;
            let mut den = Integer::from(1);
            if self.peek() == Some(b'/') {
                self.pos += 1;
                den = self.integer()?;
                if den == 0 {
                    return self.err("zero denominator");
                }
            }
            coeff = Rational::from((num, den));
            have_coeff = true;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if self.peek() != Some(b'x') {
                    return self.err("expected 'x' after '*'");
                }
            }
        }
        if self.peek() == Some(b'x') {
            self.pos += 1;
            let mut k = 1usize;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let e = self.integer()?;
                k = match e.to_usize() {
                    Some(k) if k <= 4096 => k,
                    _ => return self.err("exponent too large"),
                };
            }
            return Ok((coeff, k));
        }
        if !have_coeff {
            return self.err("expected a coefficient or 'x'");
        }
        Ok((coeff, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn p(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["x^2 - 2", "x + 1/2", "3/4*x^3 - x + 1", "-x", "x^5 - 7*x^2 - 1/3", "5"] {
            let f = p(s);
            assert_eq!(f.to_string(), s);
            assert_eq!(p(&f.to_string()), f);
        }
        assert_eq!(p("2x^2 + 0*x + 0"), QPoly::from_ints(&[0, 0, 2]));
        assert_eq!(p("x - x"), QPoly::zero());
    }

    #[test]
    fn parse_errors() {
        for s in ["", "x^", "x +", "1/0", "3 3", "y", "2*"] {
            assert!(QPoly::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn division_identity() {
        let a = p("x^5 - 3*x^2 + 1/2*x - 7");
        let b = p("2*x^2 + x - 1");
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq.mul(&b).add(&r), a);
        assert!(r.deg() < b.deg());
    }

    #[test]
    fn resultant_matches_norm() {
        // Res(x^2 - 2, x - c) = c^2 - 2 up to sign convention ∏ g(roots f).
        let f = p("x^2 - 2");
        let g = p("x - 3");
        assert_eq!(f.resultant(&g), q(7, 1));
        assert_eq!(p("x - 1").resultant(&p("x^2 + 1")), q(2, 1));
        assert_eq!(f.resultant(&p("x^2 - 2*x")), Rational::from(-8 + 4)); // (2-2√2)(2+2√2)=4-8
        assert_eq!(p("x^2-1").resultant(&p("x-1")), Rational::new());
    }

    #[test]
    fn sturm_counts() {
        let f = p("x^3 - x");
        assert_eq!(f.count_real_roots(), 3);
        let a = Bound::At(q(-1, 1));
        let b = Bound::At(q(1, 1));
        assert_eq!(f.count_roots_half_open(&a, &b), 2);
        assert_eq!(f.count_roots_open(&a, &b), 1);
        assert_eq!(p("x^2 + 1").count_real_roots(), 0);
    }

    #[test]
    fn isolate_and_compare() {
        let f = p("x^2 - 2");
        let mut roots = f.real_roots();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].cmp_rational(&q(-7, 5)), Ordering::Less);
        assert_eq!(roots[1].cmp_rational(&q(141, 100)), Ordering::Greater);
        assert_eq!(roots[1].cmp_rational(&q(142, 100)), Ordering::Less);
        let g = p("x").mul(&p("x - 1/3"));
        let mut rr = g.real_roots();
        assert_eq!(rr.len(), 2);
        assert_eq!(rr[0].cmp_rational(&q(0, 1)), Ordering::Equal);
        assert_eq!(rr[1].cmp_rational(&q(1, 3)), Ordering::Equal);
    }

    #[test]
    fn count_between_roots() {
        // Roots of x^2-2 between the roots of x^2-3: both.
        let f = p("x^2 - 2");
        let g = p("x^2 - 3").real_roots();
        let n = count_between(&f, &Endpoint::Root(g[0].clone()), &Endpoint::Root(g[1].clone()))
            .unwrap();
        assert_eq!(n, 2);
        let n = count_between(&f, &Endpoint::rational(q(0, 1)), &Endpoint::Root(g[1].clone()))
            .unwrap();
        assert_eq!(n, 1);
        assert!(count_between(&f, &Endpoint::rational(q(0, 1)), &Endpoint::Root(f.real_roots()[1].clone())).is_err());
    }

    #[test]
    fn newton_polygon_simple() {
        let two = Integer::from(2);
        assert_eq!(p("x^2 - 2").newton_polygon(&two), vec![(Some(q(1, 2)), 2)]);
        assert_eq!(p("x + 1/2").newton_polygon(&two), vec![(Some(q(-1, 1)), 1)]);
        // (x - 4)(x - 1/2) = x^2 - 9/2 x + 2
        assert_eq!(
            p("x^2 - 9/2*x + 2").newton_polygon(&two),
            vec![(Some(q(2, 1)), 1), (Some(q(-1, 1)), 1)]
        );
        assert_eq!(p("x^3 - x^2").newton_polygon(&two)[0], (None, 2));
    }

    #[test]
    fn primitive_integer_form() {
        let f = p("x^2 - 3/4*x + 1/2");
        assert_eq!(f.primitive_integer(), vec![Integer::from(2), Integer::from(-3), Integer::from(4)]);
        assert_eq!(p("-2*x + 4").primitive_integer(), vec![Integer::from(-2), Integer::from(1)]);
    }

    #[test]
    fn compose_affine_shift() {
        let f = p("x^2 - 2");
        let g = f.compose_affine(&q(1, 27), &q(-16, 27));
        // g(27 a + 16) = f(a)
        assert_eq!(g.eval(&q(27 * 3 + 16, 1)), f.eval(&q(3, 1)));
    }
}
