//! CM points on the Shimura curve of discriminant 6 and Heegner
//! polynomials.
//!
//! The hauptmodul `t` of the (2,4,6) triangle group is obtained by
//! inverting the Schwarz map `s = y₂/y₁` of the hypergeometric equation
//! with `(a, b, c) = (5/24, 1/24, 1/2)`, whose exponent differences are
//! 1/2, 1/4 and 1/6 at `t = 0, 1, ∞`. The map sends the upper half
//! `t`-plane onto the hyperbolic triangle `T` with vertices `0` (order 2),
//! `s(1) > 0` (order 4) and `s(∞) ∈ iℝ₊` (order 6) inside the disc of
//! radius `R` centred at 0.
//!
//! A point `τ` of the upper half plane is carried into that disc by a
//! Möbius map sending the order-2 point `τ₂` to 0 and an adjacent order-4
//! point to `s(1)`, folded into `T` by reflections in its sides, and then
//! `t` is recovered by Newton iteration on a chart of local solutions
//! around 0, 1, ∞ or one of five ordinary points on the unit circle.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergeom::{Hyp2F1, OrdinaryChart};
use crate::polymod::best_approximation;
use crate::poly::QPoly;
use crate::quadratic::{is_fundamental, quad_order_data};
use crate::quaternion::{iota_inf, Order, Quaternion, RealMatrix2};

const GUARD_BITS: u32 = 64;
const MAX_NEWTON: usize = 200;

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

fn cx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

fn pow2(prec: u32, e: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, e))
}

/// `|z|^p · e^{i p θ}` with `θ` the argument of `z` taken in `[lo, lo + 2π)`.
fn branch_pow(z: &Complex, p: &Float, lo_negative_pi: bool) -> Complex {
    let prec = z.prec().0;
    let mut arg = Float::with_val(prec, z.arg_ref());
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    if lo_negative_pi {
        // arg ∈ [−π, 0] for the closed lower half plane.
        if arg > 0 {
            arg -= &two_pi;
        }
    } else if arg < 0 {
        // arg ∈ [0, π] for the closed upper half plane.
        arg += &two_pi;
    }
    let modulus = cabs(z);
    if modulus == 0 {
        return Complex::with_val(prec, 0);
    }
    let m = Float::with_val(prec, modulus.ln() * p).exp();
    let th = Float::with_val(prec, &arg * p);
    let (sn, cs) = th.sin_cos(Float::new(prec));
    Complex::with_val(prec, (Float::with_val(prec, &m * &cs), m * sn))
}

/// Clamp into the closed upper half plane (also normalises `−0`).
fn clamp_uhp(mut t: Complex) -> Complex {
    if t.imag().is_sign_negative() {
        t.mut_imag().assign_zero_pos();
    }
    t
}

trait AssignZero {
    fn assign_zero_pos(&mut self);
}

impl AssignZero for Float {
    fn assign_zero_pos(&mut self) {
        *self = Float::with_val(self.prec(), 0);
    }
}

/// A value of the hauptmodul or of `j`: finite, or the tagged point at
/// infinity.
#[derive(Clone, Debug)]
pub enum TValue {
    Finite(Complex),
    Infinity,
}

impl TValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, TValue::Infinity)
    }

    pub fn finite(&self) -> Option<&Complex> {
        match self {
            TValue::Finite(z) => Some(z),
            TValue::Infinity => None,
        }
    }

    pub fn conj(&self) -> TValue {
        match self {
            TValue::Finite(z) => TValue::Finite(z.clone().conj()),
            TValue::Infinity => TValue::Infinity,
        }
    }

    pub fn to_f64(&self) -> Option<(f64, f64)> {
        self.finite().map(|z| (z.real().to_f64(), z.imag().to_f64()))
    }
}

impl fmt::Display for TValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TValue::Infinity => write!(f, "∞"),
            TValue::Finite(z) => {
                let (re, im) = (z.real().to_f64(), z.imag().to_f64());
                if im == 0.0 {
                    write!(f, "{re:.15e}")
                } else {
                    write!(f, "{re:.15e} {} {:.15e}i", if im < 0.0 { '-' } else { '+' }, im.abs())
                }
            }
        }
    }
}

/// `j = 16(t − 1)/27`.
pub fn j_from_t(t: &TValue) -> TValue {
    match t {
        TValue::Infinity => TValue::Infinity,
        TValue::Finite(t) => {
            let prec = t.prec().0;
            let v = Complex::with_val(prec, t - 1u32) * 16u32 / 27u32;
            TValue::Finite(v)
        }
    }
}

/// Upper-half-plane fixed point of the Möbius action of a real matrix:
/// the root of `c τ² + (d − a) τ − b = 0` with positive imaginary part.
pub fn fixed_point_matrix(m: &RealMatrix2) -> Result<Complex> {
    let prec = m.prec();
    let tr = m.trace();
    let disc = Float::with_val(prec, tr.square_ref()) - m.det() * 4u32;
    if disc >= 0 || m.c == 0 {
        return Err(Error::InvalidInput("element is not elliptic".into()));
    }
    let two_c = Float::with_val(prec, &m.c * 2u32);
    let re = Float::with_val(prec, &m.a - &m.d) / &two_c;
    let im = (-disc).sqrt() / two_c.abs();
    Ok(Complex::with_val(prec, (re, im)))
}

pub fn fixed_point(beta: &Quaternion, prec: u32) -> Result<Complex> {
    if beta.disc() >= 0 {
        return Err(Error::InvalidInput(format!("{beta} has non-negative discriminant")));
    }
    fixed_point_matrix(&iota_inf(beta, prec))
}

/// Möbius action of a real matrix on the upper half plane.
pub fn mobius(m: &RealMatrix2, tau: &Complex) -> Complex {
    let prec = tau.prec().0;
    let num = Complex::with_val(prec, tau * &m.a) + &m.b;
    let den = Complex::with_val(prec, tau * &m.c) + &m.d;
    num / den
}

/// `cosh` of the hyperbolic distance in the upper half plane.
pub fn cosh_distance(z: &Complex, w: &Complex) -> Float {
    let prec = z.prec().0;
    let diff = Complex::with_val(prec, z - w);
    let num = Float::with_val(prec, diff.abs_ref()).square();
    let den = Float::with_val(prec, z.imag() * w.imag()) * 2u32;
    num / den + 1u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    Zero,
    One,
    Inf,
    Ord(usize),
}

const ORDINARY_ANGLES_DEG: [u32; 5] = [60, 90, 120, 150, 180];

/// The Schwarz map of the (2,4,6) triangle at a fixed precision.
pub struct SchwarzMap {
    prec: u32,
    a: Rational,
    b: Rational,
    f0a: Hyp2F1,
    f0b: Hyp2F1,
    f1a: Hyp2F1,
    f1b: Hyp2F1,
    fia: Hyp2F1,
    fib: Hyp2F1,
    ord: Vec<OrdinaryChart>,
    mob_one: [Complex; 4],
    mob_inf: [Complex; 4],
    mob_ord: Vec<[Complex; 4]>,
}

type Pair = [(Complex, Complex); 2];

impl SchwarzMap {
    pub fn new(prec: u32) -> Self {
        let r = |n: i64, d: i64| Rational::from((n, d));
        let (a, b, c) = (r(5, 24), r(1, 24), r(1, 2));
        let half = r(1, 2);
        let one = r(1, 1);
        let f0a = Hyp2F1::new(a.clone(), b.clone(), c.clone());
        let f0b = Hyp2F1::new(Rational::from(&a + &half), Rational::from(&b + &half), r(3, 2));
        let f1a = Hyp2F1::new(a.clone(), b.clone(), Rational::from(&a + &b) - &c + 1u32);
        let f1b = Hyp2F1::new(Rational::from(&c - &a), Rational::from(&c - &b), Rational::from(&c - &a) - &b + 1u32);
        let fia = Hyp2F1::new(a.clone(), Rational::from(&a - &c) + &one, Rational::from(&a - &b) + &one);
        let fib = Hyp2F1::new(b.clone(), Rational::from(&b - &c) + &one, Rational::from(&b - &a) + &one);
        let pi = Float::with_val(prec, Constant::Pi);
        let ord: Vec<OrdinaryChart> = ORDINARY_ANGLES_DEG
            .iter()
            .map(|&deg| {
                let th = Float::with_val(prec, &pi * deg) / 180u32;
                let (sn, cs) = th.sin_cos(Float::new(prec));
                let t0 = if deg == 180 {
                    cx(prec, -1.0, 0.0)
                } else {
                    Complex::with_val(prec, (cs, sn))
                };
                OrdinaryChart::new(&a, &b, &c, t0)
            })
            .collect();
        let identity = [cx(prec, 1.0, 0.0), cx(prec, 0.0, 0.0), cx(prec, 0.0, 0.0), cx(prec, 1.0, 0.0)];
        let mut map = SchwarzMap {
            prec,
            a,
            b,
            f0a,
            f0b,
            f1a,
            f1b,
            fia,
            fib,
            ord,
            mob_one: identity.clone(),
            mob_inf: identity.clone(),
            mob_ord: Vec::new(),
        };
        // Connection matrices: express the 0-basis in each chart's basis.
        let tm = cx(prec, 0.5, 0.0);
        map.mob_one = connect(&map.basis_t(Chart::Zero, &tm), &map.basis_t(Chart::One, &tm));
        for k in 0..map.ord.len() {
            let tm = Complex::with_val(prec, &map.ord[k].t0 / 2u32);
            let m = connect(&map.basis_t(Chart::Zero, &tm), &map.basis_t(Chart::Ord(k), &tm));
            map.mob_ord.push(m);
        }
        let k90 = ORDINARY_ANGLES_DEG.iter().position(|&d| d == 90).unwrap();
        let tm = cx(prec, 0.0, 1.6);
        let g = map.basis_t(Chart::Ord(k90), &tm);
        let y = apply(&map.mob_ord[k90], &g);
        map.mob_inf = connect(&y, &map.basis_t(Chart::Inf, &tm));
        map
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `s(1)`, the order-4 vertex.
    pub fn s_one(&self) -> Complex {
        Complex::with_val(self.prec, &self.mob_one[2] / &self.mob_one[0])
    }

    /// `s(∞)`, the order-6 vertex.
    pub fn s_inf(&self) -> Complex {
        Complex::with_val(self.prec, &self.mob_inf[2] / &self.mob_inf[0])
    }

    /// Chart basis `[(f₁, f₁′), (f₂, f₂′)]` at `t`, derivatives in `t`.
    fn basis_t(&self, chart: Chart, t: &Complex) -> Pair {
        let p = self.prec;
        match chart {
            Chart::Zero => {
                let u = branch_pow(t, &Float::with_val(p, 0.5), false);
                let (f, df) = self.f0a.eval(t, p);
                let (g, dg) = self.f0b.eval(t, p);
                let y2 = Complex::with_val(p, &u * &g);
                let dy2 = Complex::with_val(p, &g / &u) / 2u32 + Complex::with_val(p, &u * &dg);
                [(f, df), (y2, dy2)]
            }
            Chart::One => {
                let z = Complex::with_val(p, 1) - t;
                let q = branch_pow(&z, &(Float::with_val(p, 1) / 4u32), true);
                let (f, df) = self.f1a.eval(&z, p);
                let (g, dg) = self.f1b.eval(&z, p);
                let f2 = Complex::with_val(p, &q * &g);
                let df2 = -(Complex::with_val(p, &f2 / &z) / 4u32 + Complex::with_val(p, &q * &dg));
                [(f, -df), (f2, df2)]
            }
            Chart::Inf => {
                let z = Complex::with_val(p, t.recip_ref());
                let ta = branch_pow(t, &-Float::with_val(p, &self.a), false);
                let tb = branch_pow(t, &-Float::with_val(p, &self.b), false);
                let (fa, dfa) = self.fia.eval(&z, p);
                let (fb, dfb) = self.fib.eval(&z, p);
                let z2 = Complex::with_val(p, z.square_ref());
                let mk = |tx: &Complex, e: &Rational, f: &Complex, df: &Complex| {
                    let v = Complex::with_val(p, tx * f);
                    let d = -Complex::with_val(p, &v * &z) * Float::with_val(p, e)
                        - Complex::with_val(p, tx * df) * &z2;
                    (v, d)
                };
                [mk(&tb, &self.b, &fb, &dfb), mk(&ta, &self.a, &fa, &dfa)]
            }
            Chart::Ord(k) => {
                let h = Complex::with_val(p, t - &self.ord[k].t0);
                self.ord[k].eval(&h, p)
            }
        }
    }

    fn chart_ratio(&self, chart: Chart, t: &(f64, f64)) -> f64 {
        let (re, im) = *t;
        let abs = re.hypot(im);
        match chart {
            Chart::Zero => abs,
            Chart::One => (1.0 - re).hypot(im),
            Chart::Inf => 1.0 / abs,
            Chart::Ord(k) => {
                let c = &self.ord[k].t0;
                (re - c.real().to_f64()).hypot(im - c.imag().to_f64()) / self.ord[k].radius()
            }
        }
    }

    fn best_chart(&self, t: &TValue) -> (Chart, f64) {
        let Some(t) = t.to_f64() else { return (Chart::Inf, 0.0) };
        let mut best = (Chart::Zero, self.chart_ratio(Chart::Zero, &t));
        let mut cands = vec![Chart::One, Chart::Inf];
        cands.extend((0..self.ord.len()).map(Chart::Ord));
        for c in cands {
            let r = self.chart_ratio(c, &t);
            if r < best.1 {
                best = (c, r);
            }
        }
        best
    }

    fn local_of_t(&self, chart: Chart, t: &TValue) -> Complex {
        let p = self.prec;
        match (chart, t) {
            (Chart::Inf, TValue::Infinity) => cx(p, 0.0, 0.0),
            (_, TValue::Infinity) => unreachable!("only the chart at ∞ contains ∞"),
            (Chart::Zero, TValue::Finite(t)) => branch_pow(t, &Float::with_val(p, 0.5), false),
            (Chart::One, TValue::Finite(t)) => {
                branch_pow(&(Complex::with_val(p, 1) - t), &(Float::with_val(p, 1) / 4u32), true)
            }
            (Chart::Inf, TValue::Finite(t)) => branch_pow(t, &(-Float::with_val(p, 1) / 6u32), false),
            (Chart::Ord(k), TValue::Finite(t)) => Complex::with_val(p, t - &self.ord[k].t0),
        }
    }

    fn t_of_local(&self, chart: Chart, x: &Complex) -> TValue {
        let p = self.prec;
        let t = match chart {
            Chart::Zero => Complex::with_val(p, x.square_ref()),
            Chart::One => {
                let x2 = Complex::with_val(p, x.square_ref());
                Complex::with_val(p, 1) - Complex::with_val(p, x2.square_ref())
            }
            Chart::Inf => {
                if cabs(x) == 0 {
                    return TValue::Infinity;
                }
                let x2 = Complex::with_val(p, x.square_ref());
                let x6 = Complex::with_val(p, &x2 * &x2) * &x2;
                x6.recip()
            }
            Chart::Ord(k) => Complex::with_val(p, &self.ord[k].t0 + x),
        };
        TValue::Finite(clamp_uhp(t))
    }

    /// `(s, ds/dx)` in the chart's local variable `x`.
    fn s_local(&self, chart: Chart, x: &Complex) -> (Complex, Complex) {
        let p = self.prec;
        let pow = |n: u32| {
            let mut acc = Complex::with_val(p, 1);
            for _ in 0..n {
                acc *= x;
            }
            acc
        };
        let (f1, df1, f2, df2) = match chart {
            Chart::Zero => {
                let z = pow(2);
                let (f, df) = self.f0a.eval(&z, p);
                let (g, dg) = self.f0b.eval(&z, p);
                let d1 = Complex::with_val(p, x * &df) * 2u32;
                let y2 = Complex::with_val(p, x * &g);
                let d2 = Complex::with_val(p, &z * &dg) * 2u32 + &g;
                (f, d1, y2, d2)
            }
            Chart::One => {
                let z = pow(4);
                let (f, df) = self.f1a.eval(&z, p);
                let (g, dg) = self.f1b.eval(&z, p);
                let d1 = Complex::with_val(p, &pow(3) * &df) * 4u32;
                let y2 = Complex::with_val(p, x * &g);
                let d2 = Complex::with_val(p, &z * &dg) * 4u32 + &g;
                (f, d1, y2, d2)
            }
            Chart::Inf => {
                let z = pow(6);
                let (fa, dfa) = self.fia.eval(&z, p);
                let (fb, dfb) = self.fib.eval(&z, p);
                let d1 = Complex::with_val(p, &pow(5) * &dfb) * 6u32;
                let y2 = Complex::with_val(p, x * &fa);
                let d2 = Complex::with_val(p, &z * &dfa) * 6u32 + &fa;
                (fb, d1, y2, d2)
            }
            Chart::Ord(k) => {
                let [(g1, dg1), (g2, dg2)] = self.ord[k].eval(x, p);
                (g1, dg1, g2, dg2)
            }
        };
        let rho = Complex::with_val(p, &f2 / &f1);
        let drho = (Complex::with_val(p, &df2 * &f1) - Complex::with_val(p, &f2 * &df1))
            / Complex::with_val(p, f1.square_ref());
        let m = match chart {
            Chart::Zero => return (rho, drho),
            Chart::One => &self.mob_one,
            Chart::Inf => &self.mob_inf,
            Chart::Ord(k) => &self.mob_ord[k],
        };
        let den = Complex::with_val(p, &m[1] * &rho) + &m[0];
        let num = Complex::with_val(p, &m[3] * &rho) + &m[2];
        let det = Complex::with_val(p, &m[3] * &m[0]) - Complex::with_val(p, &m[1] * &m[2]);
        let s = Complex::with_val(p, &num / &den);
        let ds = det * drho / Complex::with_val(p, den.square_ref());
        (s, ds)
    }

    /// `s(t)` for `t` in the closed upper half plane.
    pub fn s_at(&self, t: &TValue) -> Complex {
        let (chart, _) = self.best_chart(t);
        let x = self.local_of_t(chart, t);
        self.s_local(chart, &x).0
    }

    /// Solve `s(t) = target` for `t` in the closed upper half plane,
    /// starting from `seed`.
    pub fn invert(&self, target: &Complex, seed: TValue) -> Result<TValue> {
        let p = self.prec;
        let scale = cabs(target).max(&Float::with_val(p, 1));
        let tol = Float::with_val(p, &scale * pow2(p, -(p as i32) + 24));
        let mut t = seed;
        let mut last = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let (chart, _) = self.best_chart(&t);
            let x = self.local_of_t(chart, &t);
            let (s, ds) = self.s_local(chart, &x);
            let err = Complex::with_val(p, &s - target);
            let e = cabs(&err);
            last = e.to_f64();
            if e <= tol {
                return Ok(self.finish(chart, &x, t));
            }
            let mut dx = Complex::with_val(p, &err / &ds);
            // Damp steps that would leave the chart.
            let mut next = self.t_of_local(chart, &Complex::with_val(p, &x - &dx));
            for _ in 0..30 {
                if self.best_chart(&next).1 < 0.9 {
                    break;
                }
                dx /= 2u32;
                next = self.t_of_local(chart, &Complex::with_val(p, &x - &dx));
            }
            let moved = match (&next, &t) {
                (TValue::Finite(a), TValue::Finite(b)) => {
                    let d = cabs(&Complex::with_val(p, a - b));
                    let size = cabs(b).max(&Float::with_val(p, 1));
                    d > size * pow2(p, -(p as i32) + 8)
                }
                (TValue::Infinity, TValue::Infinity) => false,
                _ => true,
            };
            t = next;
            if !moved {
                let (chart, _) = self.best_chart(&t);
                let x = self.local_of_t(chart, &t);
                return Ok(self.finish(chart, &x, t));
            }
        }
        Err(Error::NoConvergence { what: "Schwarz map inversion".into(), residual: last })
    }

    /// Report points very close to the order-6 vertex as `∞`.
    fn finish(&self, chart: Chart, x: &Complex, t: TValue) -> TValue {
        if chart == Chart::Inf {
            let p = self.prec;
            let ax = cabs(x);
            if ax == 0 || Float::with_val(p, ax.pow_ref(6u32)) < pow2(p, -(p as i32) / 2) {
                return TValue::Infinity;
            }
        }
        t
    }
}

use rug::ops::Pow;

trait PowRef {
    fn pow_ref(&self, n: u32) -> Float;
}

impl PowRef for Float {
    fn pow_ref(&self, n: u32) -> Float {
        Float::with_val(self.prec(), self.pow(n))
    }
}

/// `M` with `Y_i = M_i1 f₁ + M_i2 f₂`, matched in value and derivative.
fn connect(y: &Pair, f: &Pair) -> [Complex; 4] {
    let p = y[0].0.prec().0;
    let ((f1, df1), (f2, df2)) = (&f[0], &f[1]);
    let det = Complex::with_val(p, f1 * df2) - Complex::with_val(p, df1 * f2);
    let row = |(yv, dy): &(Complex, Complex)| {
        let m1 = (Complex::with_val(p, yv * df2) - Complex::with_val(p, dy * f2)) / &det;
        let m2 = (Complex::with_val(p, dy * f1) - Complex::with_val(p, yv * df1)) / &det;
        (m1, m2)
    };
    let (m11, m12) = row(&y[0]);
    let (m21, m22) = row(&y[1]);
    [m11, m12, m21, m22]
}

fn apply(m: &[Complex; 4], f: &Pair) -> Pair {
    let p = m[0].prec().0;
    let comb = |a: &Complex, b: &Complex, u: &Complex, v: &Complex| {
        Complex::with_val(p, a * u) + Complex::with_val(p, b * v)
    };
    [
        (comb(&m[0], &m[1], &f[0].0, &f[1].0), comb(&m[0], &m[1], &f[0].1, &f[1].1)),
        (comb(&m[2], &m[3], &f[0].0, &f[1].0), comb(&m[2], &m[3], &f[0].1, &f[1].1)),
    ]
}

#[derive(Clone, Copy, Debug)]
struct Seed {
    t: Option<(f64, f64)>,
    s: (f64, f64),
}

/// Coarse table of `(t, s(t))` over the closed upper half plane.
fn seeds() -> &'static [Seed] {
    static SEEDS: OnceLock<Vec<Seed>> = OnceLock::new();
    SEEDS.get_or_init(|| {
        let map = SchwarzMap::new(128);
        let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 0.0)];
        for i in 0..65 {
            let r = 10f64.powf(-4.0 + 8.0 * i as f64 / 64.0);
            for jj in 0..34 {
                let phi = std::f64::consts::PI * jj as f64 / 33.0;
                pts.push((r * phi.cos(), r * phi.sin().max(0.0)));
            }
        }
        let mut out: Vec<Seed> = pts
            .par_iter()
            .map(|&(re, im)| {
                let s = map.s_at(&TValue::Finite(cx(128, re, im)));
                Seed { t: Some((re, im)), s: (s.real().to_f64(), s.imag().to_f64()) }
            })
            .collect();
        let si = map.s_inf();
        out.push(Seed { t: None, s: (si.real().to_f64(), si.imag().to_f64()) });
        out
    })
}

/// Everything needed to evaluate the hauptmodul at a fixed precision.
pub struct Uniformizer {
    pub digits: u32,
    prec: u32,
    map: SchwarzMap,
    order: Order,
    tau2: Complex,
    tau4: Complex,
    k: Complex,
    radius: Float,
    s1: Complex,
    s_inf: Complex,
    circle_centre: Complex,
    circle_r2: Float,
}

/// Outcome of folding a disc point into the fundamental triangle.
#[derive(Clone, Debug)]
pub struct Folded {
    pub s: Complex,
    pub odd: bool,
    pub on_edge: bool,
}

impl Uniformizer {
    pub fn new(order: &Order, digits: u32) -> Result<Self> {
        let prec = digits_to_bits(digits) + GUARD_BITS;
        let map = SchwarzMap::new(prec);
        let tau2 = fixed_point(&order.mu, prec)?;
        let target = Float::with_val(prec, 1.5).sqrt();
        let mut tau4 = None;
        'search: for h in [2, 4, 8] {
            for (_, beta) in order.embedding_classes(-4, h) {
                let tau = fixed_point(&beta, prec)?;
                let c = cosh_distance(&tau, &tau2);
                if Float::with_val(prec, &c - &target).abs() < 1e-20 {
                    tau4 = Some(tau);
                    break 'search;
                }
            }
        }
        let tau4 = tau4.ok_or_else(|| Error::Internal("no order-4 point adjacent to τ₂".into()))?;
        let s1 = map.s_one();
        let s_inf = map.s_inf();
        // R = s1 / tanh(d₂₄/2), tanh²(d/2) = (cosh d − 1)/(cosh d + 1)
        let radius = {
            let num = Float::with_val(prec, &target + 1u32);
            let den = Float::with_val(prec, &target - 1u32);
            Float::with_val(prec, s1.real() * (num / den).sqrt())
        };
        let num = Complex::with_val(prec, &tau4 - tau2.clone().conj());
        let den = Complex::with_val(prec, &tau4 - &tau2);
        let k = Complex::with_val(prec, &s1 * num) / den;
        let sloppy = pow2(prec, -(prec as i32) / 2);
        if Float::with_val(prec, cabs(&k) - &radius).abs() > sloppy {
            return Err(Error::Internal("disc radius inconsistent with the order-4 vertex".into()));
        }
        let r6 = cabs(&s_inf);
        let check = {
            let c = Float::with_val(prec, 2).sqrt();
            let t = (Float::with_val(prec, &c - 1u32) / Float::with_val(prec, &c + 1u32)).sqrt();
            Float::with_val(prec, &radius * t)
        };
        if Float::with_val(prec, &r6 - &check).abs() > sloppy || s_inf.real().clone().abs() > sloppy {
            return Err(Error::Internal("order-6 vertex inconsistent with triangle geometry".into()));
        }
        let r2 = Float::with_val(prec, radius.square_ref());
        let s1r = s1.real().clone();
        let cxv = (Float::with_val(prec, s1r.square_ref()) + &r2) / Float::with_val(prec, &s1r * 2u32);
        let cyv = (Float::with_val(prec, r6.square_ref()) + &r2) / Float::with_val(prec, &r6 * 2u32);
        let circle_r2 = Float::with_val(prec, cxv.square_ref()) + Float::with_val(prec, cyv.square_ref()) - &r2;
        Ok(Uniformizer {
            digits,
            prec,
            map,
            order: order.clone(),
            tau2,
            tau4,
            k,
            radius,
            s1,
            s_inf,
            circle_centre: Complex::with_val(prec, (cxv, cyv)),
            circle_r2,
        })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn tau2(&self) -> &Complex {
        &self.tau2
    }

    pub fn tau4(&self) -> &Complex {
        &self.tau4
    }

    pub fn disc_radius(&self) -> &Float {
        &self.radius
    }

    pub fn vertices(&self) -> (&Complex, &Complex) {
        (&self.s1, &self.s_inf)
    }

    pub fn schwarz(&self) -> &SchwarzMap {
        &self.map
    }

    /// Möbius map from the upper half plane to the disc of radius `R`.
    pub fn to_disc(&self, tau: &Complex) -> Complex {
        let p = self.prec;
        let num = Complex::with_val(p, tau - &self.tau2);
        let den = Complex::with_val(p, tau - self.tau2.clone().conj());
        Complex::with_val(p, &self.k * num) / den
    }

    /// Fold a disc point into the fundamental triangle by reflections.
    pub fn fold(&self, s: &Complex) -> Result<Folded> {
        let p = self.prec;
        let mut s = s.clone();
        let mut odd = false;
        for _ in 0..100_000 {
            if s.imag().is_sign_negative() && *s.imag() != 0 {
                s = s.conj();
            } else if s.real().is_sign_negative() && *s.real() != 0 {
                s = -s.conj();
            } else {
                let d = Complex::with_val(p, &s - &self.circle_centre);
                let n = Float::with_val(p, d.abs_ref()).square();
                if n < self.circle_r2 {
                    let inv = Complex::with_val(p, d.conj().recip_ref()) * &self.circle_r2;
                    s = Complex::with_val(p, &self.circle_centre + inv);
                } else {
                    let tol = pow2(p, -(p as i32) / 2);
                    let near = |x: &Float| Float::with_val(p, x.abs_ref()) < tol;
                    let arc = Float::with_val(p, &n - &self.circle_r2);
                    let on_edge = near(s.imag()) || near(s.real()) || near(&arc);
                    return Ok(Folded { s, odd: odd && !on_edge, on_edge });
                }
            }
            odd = !odd;
        }
        Err(Error::NoConvergence { what: "triangle folding".into(), residual: f64::NAN })
    }

    /// Hauptmodul value at a point of the fundamental triangle.
    pub fn t_in_triangle(&self, s: &Complex) -> Result<TValue> {
        let p = self.prec;
        let target = (s.real().to_f64(), s.imag().to_f64());
        let seed = seeds()
            .iter()
            .min_by(|a, b| {
                let da = (a.s.0 - target.0).hypot(a.s.1 - target.1);
                let db = (b.s.0 - target.0).hypot(b.s.1 - target.1);
                da.total_cmp(&db)
            })
            .unwrap();
        let seed_t = match seed.t {
            None => TValue::Infinity,
            Some((re, im)) => TValue::Finite(cx(p, re, im)),
        };
        self.map.invert(s, seed_t)
    }

    /// The hauptmodul `t(τ)`.
    pub fn uniformizer_t(&self, tau: &Complex) -> Result<TValue> {
        if *tau.imag() <= 0 {
            return Err(Error::InvalidInput("τ must lie in the upper half plane".into()));
        }
        let folded = self.fold(&self.to_disc(tau))?;
        let t = self.t_in_triangle(&folded.s)?;
        Ok(if folded.odd { t.conj() } else { t })
    }

    /// Distinct CM points of discriminant `d`, found by increasing height
    /// until `expected` are present or `height_cap` is exceeded.
    pub fn cm_points(&self, d: i64, expected: usize, height_cap: i64) -> Result<Vec<CMPoint>> {
        let p = self.prec;
        let dedupe_tol = Float::with_val(p, 10).pow(-(self.digits as i32) / 3);
        let mut seen: HashSet<[i128; 4]> = HashSet::new();
        let mut found: Vec<(Quaternion, Complex, Folded)> = Vec::new();
        let mut h = 8i64.min(height_cap);
        loop {
            let fresh: Vec<([i128; 4], Quaternion)> = self
                .order
                .embedding_classes(d, h)
                .into_iter()
                .filter(|(c, _)| !seen.contains(c))
                .collect();
            let mut evaluated: Vec<([i128; 4], Quaternion, Complex, Folded)> = fresh
                .par_iter()
                .map(|(c, beta)| {
                    let tau = fixed_point(beta, p)?;
                    let folded = self.fold(&self.to_disc(&tau))?;
                    Ok((*c, beta.clone(), tau, folded))
                })
                .collect::<Result<_>>()?;
            evaluated.sort_by_key(|(c, ..)| (c.iter().map(|v| v.abs()).max().unwrap(), *c));
            for (c, beta, tau, folded) in evaluated {
                seen.insert(c);
                let dup = found.iter().any(|(_, _, g)| {
                    let close = cabs(&Complex::with_val(p, &g.s - &folded.s)) < dedupe_tol;
                    close && (g.on_edge || folded.on_edge || g.odd == folded.odd)
                });
                if !dup {
                    found.push((beta, tau, folded));
                }
            }
            if found.len() > expected {
                return Err(Error::Internal(format!(
                    "D = {d}: {} distinct points exceed the expected {expected}",
                    found.len()
                )));
            }
            if found.len() == expected {
                break;
            }
            if h >= height_cap {
                return Err(Error::HeightCapReached { d, found: found.len(), expected, height: h });
            }
            h = (h * 2).min(height_cap);
        }
        found
            .into_par_iter()
            .map(|(beta, tau, folded)| {
                let t0 = self.t_in_triangle(&folded.s)?;
                let t = if folded.odd { t0.conj() } else { t0 };
                let j = j_from_t(&t);
                Ok(CMPoint { beta, tau, s: folded.s, t, j })
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct CMPoint {
    pub beta: Quaternion,
    pub tau: Complex,
    /// Folded disc coordinate.
    pub s: Complex,
    pub t: TValue,
    pub j: TValue,
}

/// `P_D(x) = b ∏ (x − j(a_i))` with integer coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct HeegnerPolynomial {
    pub d: i64,
    pub hprime: usize,
    #[serde(serialize_with = "ser_int")]
    pub b: Integer,
    /// Lowest degree first.
    #[serde(serialize_with = "ser_ints")]
    pub coeffs: Vec<Integer>,
    /// Digits at which the coefficients were confirmed.
    pub digits: u32,
    pub height: i64,
    /// Approximate roots `j(a_i)` as `(re, im)`.
    pub roots: Vec<(f64, f64)>,
}

fn ser_int<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_ints<S: serde::Serializer>(v: &[Integer], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl HeegnerPolynomial {
    pub fn poly(&self) -> QPoly {
        QPoly::from_ints(&self.coeffs)
    }

    pub fn monic(&self) -> QPoly {
        self.poly().monic()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Multiply out `∏ (x − r_i)`; coefficients lowest degree first.
fn expand_roots(roots: &[Complex], prec: u32) -> Vec<Complex> {
    let mut c = vec![cx(prec, 1.0, 0.0)];
    for r in roots {
        let mut next = vec![cx(prec, 0.0, 0.0); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= Complex::with_val(prec, ck * r);
        }
        c = next;
    }
    c
}

/// Rational coefficients of `∏ (x − j_i)` from approximations at `digits`.
fn reconstruct(d: i64, roots: &[Complex], digits: u32) -> Result<Vec<Rational>> {
    let prec = roots.first().map_or(64, |r| r.prec().0);
    let coeffs = expand_roots(roots, prec);
    let max_den = Integer::from(Integer::u_pow_u(10, digits / 3));
    let im_tol = Float::with_val(prec, 10).pow(-(digits as i32) / 2);
    let fit_tol = Float::with_val(prec, 10).pow(-(2 * digits as i32) / 3);
    let fail = || Error::Reconstruction { d, digits };
    let mut out = Vec::new();
    for c in &coeffs {
        let size = cabs(c).max(&Float::with_val(prec, 1));
        if Float::with_val(prec, c.imag().abs_ref()) > Float::with_val(prec, &im_tol * &size) {
            return Err(fail());
        }
        let re = c.real().to_rational().ok_or_else(fail)?;
        let q = best_approximation(&re, &max_den);
        let err = Float::with_val(prec, Rational::from(&re - &q)).abs();
        if err > Float::with_val(prec, &fit_tol * &size) {
            return Err(fail());
        }
        out.push(q);
    }
    Ok(out)
}

fn heegner_at(u: &Uniformizer, d: i64, hprime: usize, height_cap: i64) -> Result<HeegnerPolynomial> {
    let pts = u.cm_points(d, hprime, height_cap)?;
    let roots: Vec<Complex> = pts
        .iter()
        .map(|p| p.j.finite().cloned().ok_or_else(|| Error::Degenerate(format!("D = {d} has a point at j = ∞"))))
        .collect::<Result<_>>()?;
    let monic = reconstruct(d, &roots, u.digits)?;
    let mut b = Integer::from(1);
    for c in &monic {
        b.lcm_mut(c.denom());
    }
    let coeffs: Vec<Integer> = monic.iter().map(|c| Integer::from(c.numer() * &b) / c.denom()).collect();
    let height = pts
        .iter()
        .map(|p| {
            let c = u.order.coordinates(&p.beta);
            c.iter().map(|x| x.numer().clone().abs()).max().unwrap().to_i64().unwrap_or(i64::MAX)
        })
        .max()
        .unwrap_or(0);
    let mut roots_f: Vec<(f64, f64)> =
        roots.iter().map(|r| (r.real().to_f64(), r.imag().to_f64())).collect();
    roots_f.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(HeegnerPolynomial { d, hprime, b, coeffs, digits: u.digits, height, roots: roots_f })
}

/// Options for Heegner polynomial computation.
#[derive(Clone, Copy, Debug)]
pub struct HeegnerOptions {
    pub digits: u32,
    pub height_cap: i64,
    /// Times the precision may be doubled after a failed reconstruction.
    pub escalations: u32,
}

impl Default for HeegnerOptions {
    fn default() -> Self {
        HeegnerOptions { digits: 50, height_cap: 1024, escalations: 2 }
    }
}

/// `P_D` for a negative fundamental discriminant with `s(O_D) > 0`. The
/// coefficients are accepted only if a second evaluation at twice the
/// precision reproduces them; otherwise precision is doubled.
pub fn heegner_poly(order: &Order, d: i64, opts: HeegnerOptions) -> Result<HeegnerPolynomial> {
    let data = quad_order_data(d)?;
    if !is_fundamental(d) {
        return Err(Error::InvalidInput(format!("{d} is not a fundamental discriminant")));
    }
    if !data.has_cm_points() {
        return Err(Error::NoCmPoints(d));
    }
    if d >= -4 || d == -24 {
        return Err(Error::InvalidInput(format!("D = {d} is an elliptic point, not a Heegner family")));
    }
    let hprime = data
        .h_prime_usize()
        .ok_or_else(|| Error::InvalidInput(format!("h′ = {} is not an integer", data.h_prime)))?;
    let mut digits = opts.digits;
    let mut last_err = None;
    for _ in 0..=opts.escalations {
        let lo = Uniformizer::new(order, digits).and_then(|u| heegner_at(&u, d, hprime, opts.height_cap));
        let hi = Uniformizer::new(order, 2 * digits).and_then(|u| heegner_at(&u, d, hprime, opts.height_cap));
        match (lo, hi) {
            (Ok(a), Ok(b)) if a.coeffs == b.coeffs => return Ok(a),
            (Err(e @ (Error::HeightCapReached { .. } | Error::NoCmPoints(_))), _) => return Err(e),
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
            _ => last_err = Some(Error::Reconstruction { d, digits }),
        }
        digits *= 2;
    }
    match last_err {
        Some(Error::Reconstruction { .. }) | None => Err(Error::Reconstruction { d, digits: digits / 2 }),
        Some(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::build_maximal_order;

    fn uni(digits: u32) -> Uniformizer {
        Uniformizer::new(&build_maximal_order().unwrap(), digits).unwrap()
    }

    #[test]
    fn gauss_value_at_one() {
        let u = uni(40);
        let p = u.prec();
        let g = |r: Rational| Float::with_val(p, &r).gamma();
        let r = |n: i64, d: i64| Rational::from((n, d));
        // y1(1) and y2(1) from Gauss's summation theorem
        let y1 = g(r(1, 2)) * g(r(1, 4)) / (g(r(7, 24)) * g(r(11, 24)));
        let y2 = g(r(3, 2)) * g(r(1, 4)) / (g(r(19, 24)) * g(r(23, 24)));
        let expect = y2 / y1;
        let (s1, _) = u.vertices();
        assert!(Float::with_val(p, s1.real() - &expect).abs() < 1e-45);
        assert!((s1.real().to_f64() - 2.472571219641097).abs() < 1e-14);
    }

    #[test]
    fn newton_round_trip() {
        let u = uni(40);
        let p = u.prec();
        for (re, im) in [(0.3, 0.2), (-2.0, 0.5), (1.2, 0.7), (5.0, 40.0), (0.9, 0.0), (-7.0, 0.0), (3.0, 0.0)] {
            let t = TValue::Finite(cx(p, re, im));
            let s = u.schwarz().s_at(&t);
            let back = u.t_in_triangle(&s).unwrap();
            let b = back.finite().unwrap();
            let err = cabs(&Complex::with_val(p, b - t.finite().unwrap())).to_f64();
            assert!(err < 1e-35, "t = ({re}, {im}): {err:e}");
        }
    }

    #[test]
    fn charts_agree_on_overlaps() {
        let u = uni(40);
        let m = u.schwarz();
        let p = m.prec();
        let t = TValue::Finite(cx(p, 0.55, 0.45));
        let mut vals = Vec::new();
        for ch in [Chart::Zero, Chart::One, Chart::Ord(0)] {
            let x = m.local_of_t(ch, &t);
            vals.push(m.s_local(ch, &x).0);
        }
        for v in &vals[1..] {
            assert!(cabs(&Complex::with_val(p, v - &vals[0])).to_f64() < 1e-40);
        }
    }

    #[test]
    fn anchors() {
        let u = uni(50);
        let order = u.order().clone();
        let p = u.prec();
        let t2 = u.uniformizer_t(&fixed_point(&order.mu, p).unwrap()).unwrap();
        assert!(cabs(t2.finite().unwrap()).to_f64() < 1e-30);
        let t4 = u.uniformizer_t(u.tau4()).unwrap();
        let one = Complex::with_val(p, t4.finite().unwrap() - 1u32);
        assert!(cabs(&one).to_f64() < 1e-30);
        let (_, b3) = &order.embedding_classes(-3, 4)[0];
        assert!(u.uniformizer_t(&fixed_point(b3, p).unwrap()).unwrap().is_infinite());
    }

    #[test]
    fn small_heegner_polynomials() {
        let order = build_maximal_order().unwrap();
        let opts = HeegnerOptions { digits: 40, ..Default::default() };
        let ints = |v: &[i64]| v.iter().map(|&c| Integer::from(c)).collect::<Vec<_>>();
        for (d, want) in [
            (-19i64, ints(&[-81, 64])),
            (-43, ints(&[-194481, 1000000])),
            (-52, ints(&[5184, 15625])),
            (-148, ints(&[182233364544, 377149515625])),
        ] {
            let p = heegner_poly(&order, d, opts).unwrap();
            assert_eq!(p.coeffs, want, "D = {d}");
            assert_eq!(p.b, want[1]);
        }
        for (d, hp) in [(-219i64, 2usize), (-244, 3)] {
            let p = heegner_poly(&order, d, opts).unwrap();
            assert_eq!(p.degree(), hp);
            assert_eq!(p.coeffs.last(), Some(&p.b));
            let g = p.coeffs.iter().fold(Integer::new(), |g, c| g.gcd(c));
            assert_eq!(g, 1, "D = {d}: coefficients should be primitive");
        }
    }
}
