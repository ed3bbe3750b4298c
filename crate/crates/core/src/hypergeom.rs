//! Gauss hypergeometric series and local Taylor solutions of the
//! hypergeometric equation, in arbitrary precision.

use rug::{Complex, Float, Rational};

/// Bits of slack used when deciding that a series tail is negligible.
const TAIL_GUARD: u32 = 8;

/// `₂F₁(a, b; c; z)` with rational parameters.
#[derive(Clone, Debug)]
pub struct Hyp2F1 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Hyp2F1 {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Self {
        Hyp2F1 { a, b, c }
    }

    /// `(F(z), F′(z))` for `|z| < 1`.
    pub fn eval(&self, z: &Complex, prec: u32) -> (Complex, Complex) {
        let zabs = Float::with_val(prec, z.abs_ref()).to_f64();
        assert!(zabs < 0.98, "series evaluated too close to its circle of convergence: |z| = {zabs}");
        let mut f = Complex::with_val(prec, 1);
        let mut df = Complex::with_val(prec, 0);
        // term = A_n z^n; dterm = n A_n z^{n-1}
        let mut coef = Float::with_val(prec, 1);
        let mut zpow_prev = Complex::with_val(prec, 1); // z^{n-1}
        let eps = Float::with_val(prec, Float::i_exp(1, -((prec + TAIL_GUARD) as i32)));
        let slack = 1.0 - zabs;
        let mut n: u32 = 0;
        loop {
            let ratio = Rational::from(&self.a + n) * Rational::from(&self.b + n)
                / (Rational::from(&self.c + n) * (n + 1));
            coef *= Float::with_val(prec, &ratio);
            n += 1;
            let dterm = Complex::with_val(prec, &zpow_prev * &coef) * n;
            zpow_prev *= z;
            let term = Complex::with_val(prec, &zpow_prev * &coef);
            f += &term;
            df += &dterm;
            if n > 4 {
                let size = Float::with_val(prec, f.abs_ref()).max(&Float::with_val(prec, df.abs_ref()));
                let t = Float::with_val(prec, dterm.abs_ref()) + Float::with_val(prec, term.abs_ref());
                // Terms decay roughly geometrically with ratio |z|.
                if t * (1.0 / slack.max(1e-3)) * (n as f64 + 1.0) <= Float::with_val(prec, &eps * &size) {
                    break;
                }
            }
            if n > 200_000 {
                panic!("hypergeometric series failed to converge");
            }
        }
        (f, df)
    }
}

/// Taylor basis of `t(1−t)y″ + (c − (a+b+1)t)y′ − ab·y = 0` around an
/// ordinary point `t0`, normalised by `y(t0) = 1, y′(t0) = 0` and
/// `y(t0) = 0, y′(t0) = 1`.
#[derive(Clone, Debug)]
pub struct OrdinaryChart {
    pub t0: Complex,
    p0_inv: Complex,
    p1: Complex,
    q0: Complex,
    q1: Float,
    ab: Float,
    radius: f64,
}

impl OrdinaryChart {
    pub fn new(a: &Rational, b: &Rational, c: &Rational, t0: Complex) -> Self {
        let prec = t0.prec().0;
        let one = Complex::with_val(prec, 1);
        let p0 = Complex::with_val(prec, &t0 * Complex::with_val(prec, &one - &t0));
        let p1 = Complex::with_val(prec, &one - Complex::with_val(prec, &t0 * 2u32));
        let s = Rational::from(a + b) + 1u32;
        let q0 = Complex::with_val(prec, Float::with_val(prec, c)) - Complex::with_val(prec, &t0 * Float::with_val(prec, &s));
        let q1 = -Float::with_val(prec, &s);
        let ab = Float::with_val(prec, &Rational::from(a * b));
        let d0 = Float::with_val(prec, t0.abs_ref()).to_f64();
        let d1 = Float::with_val(prec, Complex::with_val(prec, &t0 - 1u32).abs_ref()).to_f64();
        OrdinaryChart { p0_inv: p0.recip(), p1, q0, q1, ab, radius: d0.min(d1), t0 }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Values and derivatives of the two basis solutions at `t0 + h`:
    /// `[(g1, g1′), (g2, g2′)]`.
    pub fn eval(&self, h: &Complex, prec: u32) -> [(Complex, Complex); 2] {
        let habs = Float::with_val(prec, h.abs_ref()).to_f64();
        let ratio = habs / self.radius;
        assert!(ratio < 0.95, "ordinary chart evaluated too far from its centre");
        let eps = Float::with_val(prec, Float::i_exp(1, -((prec + TAIL_GUARD) as i32)));
        let mut out: [(Complex, Complex); 2] =
            std::array::from_fn(|_| (Complex::with_val(prec, 0), Complex::with_val(prec, 0)));
        for (k, slot) in out.iter_mut().enumerate() {
            let (mut u0, mut u1) = if k == 0 {
                (Complex::with_val(prec, 1), Complex::with_val(prec, 0))
            } else {
                (Complex::with_val(prec, 0), Complex::with_val(prec, 1))
            };
            // y = Σ u_n h^n
            let mut y = Complex::with_val(prec, &u0);
            let mut dy = Complex::with_val(prec, &u1);
            let mut hp = Complex::with_val(prec, h); // h^n for the u_{n+1} term
            y += Complex::with_val(prec, &u1 * h);
            let mut hprev = Complex::with_val(prec, 1); // h^{n}
            let mut n: u32 = 0;
            let mut small = 0;
            loop {
                // u_{n+2} from u_n, u_{n+1}
                let nn = Float::with_val(prec, n);
                let lin = Complex::with_val(prec, &self.p1 * &nn) + &self.q0;
                let t1 = Complex::with_val(prec, &lin * &u1) * (n + 1);
                let c2 = Float::with_val(prec, -(n as f64) * (n as f64 - 1.0)) + Float::with_val(prec, &self.q1 * &nn)
                    - &self.ab;
                let t2 = Complex::with_val(prec, &u0 * &c2);
                let mut u2 = Complex::with_val(prec, &t1 + &t2);
                u2 = -u2 * &self.p0_inv;
                u2 /= ((n + 1) * (n + 2)) as f64;
                hprev *= h; // h^{n+1}
                hp *= h; // h^{n+2}
                let term = Complex::with_val(prec, &u2 * &hp);
                let dterm = Complex::with_val(prec, &u2 * &hprev) * (n + 2);
                y += &term;
                dy += &dterm;
                let size = Float::with_val(prec, y.abs_ref()).max(&Float::with_val(prec, dy.abs_ref()));
                let tsize = Float::with_val(prec, term.abs_ref()) + Float::with_val(prec, dterm.abs_ref());
                if tsize * (1.0 / (1.0 - ratio)) * (n as f64 + 3.0) <= Float::with_val(prec, &eps * &size) {
                    small += 1;
                    if small >= 2 {
                        break;
                    }
                } else {
                    small = 0;
                }
                u0 = u1;
                u1 = u2;
                n += 1;
                if n > 200_000 {
                    panic!("Taylor series failed to converge");
                }
            }
            *slot = (y, dy);
        }
        out
    }
}
