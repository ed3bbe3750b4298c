//! The quaternion algebra B = (−1, 3 / ℚ) of discriminant 6 and its maximal
//! order.
//!
//! Elements are `w + x·i + y·j + z·k` with `i² = −1`, `j² = 3`, `k = ij`,
//! so `k² = 3` and `nrd = w² + x² − 3y² − 3z²`.
//!
//! The real splitting is frozen as
//!
//! ```text
//! i ↦ [[0, −1], [1, 0]]      j ↦ [[√3, 0], [0, −√3]]      k ↦ [[0, √3], [√3, 0]]
//! ```

use std::ops::{Add, Mul, Neg, Sub};

use rug::{Float, Integer, Rational};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const A: i32 = -1;
const B: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Quaternion {
    pub w: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Quaternion {
    pub fn new(w: Rational, x: Rational, y: Rational, z: Rational) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_ints(w: i64, x: i64, y: i64, z: i64) -> Self {
        Self::new(w.into(), x.into(), y.into(), z.into())
    }

    pub fn from_coords(c: [Rational; 4]) -> Self {
        let [w, x, y, z] = c;
        Self::new(w, x, y, z)
    }

    pub fn scalar(r: Rational) -> Self {
        Self::new(r, Rational::new(), Rational::new(), Rational::new())
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0, 0, 0)
    }
    pub fn i() -> Self {
        Self::from_ints(0, 1, 0, 0)
    }
    pub fn j() -> Self {
        Self::from_ints(0, 0, 1, 0)
    }
    pub fn k() -> Self {
        Self::from_ints(0, 0, 0, 1)
    }

    pub fn coords(&self) -> [Rational; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn is_zero(&self) -> bool {
        self.w == 0 && self.x == 0 && self.y == 0 && self.z == 0
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn trd(&self) -> Rational {
        Rational::from(&self.w * 2u32)
    }

    pub fn nrd(&self) -> Rational {
        let sq = |r: &Rational| Rational::from(r.square_ref());
        sq(&self.w) + sq(&self.x) - (sq(&self.y) + sq(&self.z)) * 3u32
    }

    /// `trd² − 4·nrd`, the discriminant of the order `ℤ[α]` when α is integral.
    pub fn disc(&self) -> Rational {
        let t = self.trd();
        Rational::from(t.square_ref()) - self.nrd() * 4u32
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(
            Rational::from(&self.w * c),
            Rational::from(&self.x * c),
            Rational::from(&self.y * c),
            Rational::from(&self.z * c),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.nrd();
        (n != 0).then(|| self.conj().scale(&Rational::from(n.recip_ref())))
    }

    pub fn is_integral(&self) -> bool {
        *self.trd().denom() == 1 && *self.nrd().denom() == 1
    }

    /// Largest absolute numerator or denominator among the coordinates.
    pub fn naive_height(&self) -> Integer {
        self.coords()
            .iter()
            .flat_map(|c| [c.numer().clone().abs(), c.denom().clone()])
            .max()
            .unwrap()
    }
}

impl Mul for &Quaternion {
    type Output = Quaternion;
    fn mul(self, o: &Quaternion) -> Quaternion {
        let (a, b) = (self, o);
        let m = |p: &Rational, q: &Rational| Rational::from(p * q);
        let w = m(&a.w, &b.w) + m(&a.x, &b.x) * A + m(&a.y, &b.y) * B - m(&a.z, &b.z) * (A * B);
        let x = m(&a.w, &b.x) + m(&a.x, &b.w) - m(&a.y, &b.z) * B + m(&a.z, &b.y) * B;
        let y = m(&a.w, &b.y) + m(&a.y, &b.w) + m(&a.x, &b.z) * A - m(&a.z, &b.x) * A;
        let z = m(&a.w, &b.z) + m(&a.z, &b.w) + m(&a.x, &b.y) - m(&a.y, &b.x);
        Quaternion::new(w, x, y, z)
    }
}

impl Add for &Quaternion {
    type Output = Quaternion;
    fn add(self, o: &Quaternion) -> Quaternion {
        Quaternion::new(
            Rational::from(&self.w + &o.w),
            Rational::from(&self.x + &o.x),
            Rational::from(&self.y + &o.y),
            Rational::from(&self.z + &o.z),
        )
    }
}

impl Sub for &Quaternion {
    type Output = Quaternion;
    fn sub(self, o: &Quaternion) -> Quaternion {
        Quaternion::new(
            Rational::from(&self.w - &o.w),
            Rational::from(&self.x - &o.x),
            Rational::from(&self.y - &o.y),
            Rational::from(&self.z - &o.z),
        )
    }
}

impl Neg for &Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(&Rational::from(-1))
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        &self * &o
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut out = String::new();
        for (c, unit) in [(&self.w, ""), (&self.x, "i"), (&self.y, "j"), (&self.z, "k")] {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            let body = if abs == 1 && !unit.is_empty() { unit.to_string() } else { format!("{abs}{unit}") };
            match (out.is_empty(), neg) {
                (true, true) => out.push_str(&format!("-{body}")),
                (true, false) => out.push_str(&body),
                (false, true) => out.push_str(&format!(" - {body}")),
                (false, false) => out.push_str(&format!(" + {body}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// A real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug)]
pub struct RealMatrix2 {
    pub a: Float,
    pub b: Float,
    pub c: Float,
    pub d: Float,
}

impl RealMatrix2 {
    pub fn prec(&self) -> u32 {
        self.a.prec()
    }

    pub fn det(&self) -> Float {
        Float::with_val(self.prec(), &self.a * &self.d) - Float::with_val(self.prec(), &self.b * &self.c)
    }

    pub fn trace(&self) -> Float {
        Float::with_val(self.prec(), &self.a + &self.d)
    }

    pub fn mul(&self, o: &RealMatrix2) -> RealMatrix2 {
        let p = self.prec();
        let dot = |x: &Float, y: &Float, u: &Float, v: &Float| {
            Float::with_val(p, x * y) + Float::with_val(p, u * v)
        };
        RealMatrix2 {
            a: dot(&self.a, &o.a, &self.b, &o.c),
            b: dot(&self.a, &o.b, &self.b, &o.d),
            c: dot(&self.c, &o.a, &self.d, &o.c),
            d: dot(&self.c, &o.b, &self.d, &o.d),
        }
    }

    /// Largest absolute entrywise difference.
    pub fn max_diff(&self, o: &RealMatrix2) -> Float {
        let p = self.prec();
        [(&self.a, &o.a), (&self.b, &o.b), (&self.c, &o.c), (&self.d, &o.d)]
            .into_iter()
            .map(|(x, y)| Float::with_val(p, x - y).abs())
            .fold(Float::with_val(p, 0), |m, v| if v > m { v } else { m })
    }

    /// Inverse of the splitting: the quaternion (with real coordinates)
    /// mapping to this matrix, as `[w, x, y, z]`.
    pub fn to_real_quaternion(&self) -> [Float; 4] {
        let p = self.prec();
        let sqrt3 = Float::with_val(p, 3).sqrt();
        let w = Float::with_val(p, &self.a + &self.d) / 2u32;
        let y = Float::with_val(p, &self.a - &self.d) / Float::with_val(p, &sqrt3 * 2u32);
        let x = Float::with_val(p, &self.c - &self.b) / 2u32;
        let z = Float::with_val(p, &self.c + &self.b) / Float::with_val(p, &sqrt3 * 2u32);
        [w, x, y, z]
    }
}

/// The frozen real splitting `B ⊗ ℝ ≅ M₂(ℝ)` at `prec` bits.
pub fn iota_inf(q: &Quaternion, prec: u32) -> RealMatrix2 {
    let sqrt3 = Float::with_val(prec, 3).sqrt();
    let f = |r: &Rational| Float::with_val(prec, r);
    let y3 = f(&q.y) * &sqrt3;
    let z3 = f(&q.z) * &sqrt3;
    RealMatrix2 {
        a: f(&q.w) + &y3,
        b: z3.clone() - f(&q.x),
        c: f(&q.x) + &z3,
        d: f(&q.w) - &y3,
    }
}

/// Hash of the splitting images of `i` and `j` evaluated at 256 bits,
/// recorded with tabulated data so results stay tied to one splitting.
pub fn iota_fingerprint() -> String {
    let mut h = Sha256::new();
    for q in [Quaternion::i(), Quaternion::j()] {
        let m = iota_inf(&q, 256);
        for e in [&m.a, &m.b, &m.c, &m.d] {
            h.update(e.to_string_radix(16, Some(60)).as_bytes());
            h.update(b";");
        }
    }
    let out = h.finalize();
    out.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Hilbert symbol `(a, b)_p` for nonzero integers; `p = 0` means ∞.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i32 {
    assert!(a != 0 && b != 0);
    if p == 0 {
        return if a < 0 && b < 0 { -1 } else { 1 };
    }
    let split = |mut n: i64| {
        let mut v = 0u32;
        while n % p as i64 == 0 {
            n /= p as i64;
            v += 1;
        }
        (v, n)
    };
    let (al, u) = split(a);
    let (be, v) = split(b);
    if p == 2 {
        let eps = |t: i64| (t.rem_euclid(4) - 1) / 2;
        let omega = |t: i64| {
            let r = t.rem_euclid(8);
            if r == 3 || r == 5 { 1 } else { 0 }
        };
        let e = eps(u) * eps(v) + al as i64 * omega(v) + be as i64 * omega(u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let leg = |t: i64| Integer::from(t).legendre(&Integer::from(p));
    let mut s = if (al as u64 * be as u64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
    if be % 2 == 1 {
        s *= leg(u);
    }
    if al % 2 == 1 {
        s *= leg(v);
    }
    s
}

/// A ℤ-order of `B` together with its distinguished elements.
///
/// The basis always starts with 1; the remaining three vectors have
/// `w`-coordinates in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct Order {
    basis: [Quaternion; 4],
    inv: [[Rational; 4]; 4],
    pub mu: Quaternion,
    pub chi: Vec<(u32, Quaternion)>,
}

impl Order {
    pub fn basis(&self) -> &[Quaternion; 4] {
        &self.basis
    }

    /// Coordinates of `q` in the basis.
    pub fn coordinates(&self, q: &Quaternion) -> [Rational; 4] {
        let v = q.coords();
        std::array::from_fn(|col| {
            (0..4).fold(Rational::new(), |acc, r| acc + Rational::from(&v[r] * &self.inv[r][col]))
        })
    }

    pub fn contains(&self, q: &Quaternion) -> bool {
        self.coordinates(q).iter().all(|c| *c.denom() == 1)
    }

    pub fn element(&self, c: &[i128; 4]) -> Quaternion {
        let mut acc = Quaternion::default();
        for (ci, e) in c.iter().zip(&self.basis) {
            acc = &acc + &e.scale(&Rational::from(Integer::from(*ci)));
        }
        acc
    }

    /// Reduced discriminant, `√|det(trd(e_a e_b))|`.
    pub fn reduced_discriminant(&self) -> Integer {
        reduced_disc(&self.basis)
    }

    pub fn is_ring(&self) -> bool {
        is_ring(&self.basis, &self.inv)
    }

    /// `μ⁻¹ ᾱ μ`.
    pub fn involution_prime(&self, a: &Quaternion) -> Quaternion {
        let mi = self.mu.inverse().expect("μ is invertible");
        &(&mi * &a.conj()) * &self.mu
    }

    /// `(1/6)·trd(μ a b̄)`.
    pub fn riemann_form(&self, a: &Quaternion, b: &Quaternion) -> Rational {
        (&(&self.mu * a) * &b.conj()).trd() / 6u32
    }

    pub fn riemann_gram(&self) -> [[Rational; 4]; 4] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.riemann_form(&self.basis[r], &self.basis[c])))
    }

    pub fn chi(&self, d: u32) -> Option<&Quaternion> {
        self.chi.iter().find(|(e, _)| *e == d).map(|(_, q)| q)
    }

    /// Whether `q Λ q⁻¹ = Λ`.
    pub fn normalizes(&self, q: &Quaternion) -> bool {
        let Some(qi) = q.inverse() else { return false };
        self.basis.iter().all(|e| self.contains(&(&(q * e) * &qi)))
    }

    /// The discriminant, as a quadratic form in the last three coordinates
    /// (it does not depend on the coefficient of 1): returns the symmetric
    /// integer matrix `G` with `disc(Σ c_a e_a) = cᵀ G c` for `c ∈ ℤ³`.
    pub fn disc_form(&self) -> [[i128; 3]; 3] {
        let d = |q: &Quaternion| q.disc();
        let f = &self.basis[1..];
        std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                let v = if r == c {
                    d(&f[r])
                } else {
                    (d(&(&f[r] + &f[c])) - d(&f[r]) - d(&f[c])) / 2u32
                };
                assert_eq!(*v.denom(), 1, "disc form must be integral on an order");
                v.numer().to_i128().expect("small disc form")
            })
        })
    }

    /// Trace of each basis vector, as integers.
    pub fn basis_traces(&self) -> [i128; 4] {
        std::array::from_fn(|a| self.basis[a].trd().numer().to_i128().unwrap())
    }

    /// All `β ∈ Λ` with coordinates of absolute value `≤ height` and
    /// `trd(β)² − 4 nrd(β) = d`.
    pub fn embeddings_with_disc(&self, d: i64, height: i64) -> Vec<Quaternion> {
        let mut out = Vec::new();
        for c in self.disc_solutions(d, height) {
            for c0 in -(height as i128)..=height as i128 {
                out.push(self.element(&[c0, c[0], c[1], c[2]]));
            }
        }
        out
    }

    /// One representative per class `β + ℤ` among solutions of the
    /// discriminant equation of height `≤ height`, normalised so that
    /// `trd(β) ∈ {0, 1}`. Coordinates are returned alongside.
    pub fn embedding_classes(&self, d: i64, height: i64) -> Vec<([i128; 4], Quaternion)> {
        let t = self.basis_traces();
        self.disc_solutions(d, height)
            .into_iter()
            .map(|c| {
                let tr = t[1] * c[0] + t[2] * c[1] + t[3] * c[2];
                // trd(1) = 2, so shifting c0 by one changes the trace by 2.
                let c0 = -tr.div_euclid(2);
                let coords = [c0, c[0], c[1], c[2]];
                (coords, self.element(&coords))
            })
            .collect()
    }

    /// Integer vectors `(c1, c2, c3)` with `|c_i| ≤ height` solving
    /// `cᵀ G c = d`, ordered by height then lexicographically.
    pub fn disc_solutions(&self, d: i64, height: i64) -> Vec<[i128; 3]> {
        let g = self.disc_form();
        let h = height as i128;
        let d = d as i128;
        let mut out = Vec::new();
        for c1 in -h..=h {
            for c2 in -h..=h {
                // g22 c3² + 2(g02 c1 + g12 c2) c3 + (rest − d) = 0
                let qa = g[2][2];
                let qb = 2 * (g[0][2] * c1 + g[1][2] * c2);
                let qc = g[0][0] * c1 * c1 + 2 * g[0][1] * c1 * c2 + g[1][1] * c2 * c2 - d;
                for c3 in solve_quadratic_int(qa, qb, qc) {
                    if c3.abs() <= h {
                        out.push([c1, c2, c3]);
                    }
                }
            }
        }
        out.sort_by_key(|c| (c.iter().map(|v| v.abs()).max().unwrap(), *c));
        out.dedup();
        out
    }
}

/// Integer roots of `a x² + b x + c`, excluding the degenerate all-zero case.
fn solve_quadratic_int(a: i128, b: i128, c: i128) -> Vec<i128> {
    if a == 0 {
        if b != 0 && c % b == 0 {
            return vec![-c / b];
        }
        return vec![];
    }
    let disc = b * b - 4 * a * c;
    if disc < 0 {
        return vec![];
    }
    let s = isqrt(disc);
    if s * s != disc {
        return vec![];
    }
    let mut out = Vec::new();
    for num in [-b + s, -b - s] {
        if num % (2 * a) == 0 {
            out.push(num / (2 * a));
        }
    }
    out.dedup();
    out
}

fn isqrt(n: i128) -> i128 {
    Integer::from(n).sqrt().to_i128().unwrap()
}

fn gram_trd(basis: &[Quaternion; 4]) -> [[Rational; 4]; 4] {
    std::array::from_fn(|r| std::array::from_fn(|c| (&basis[r] * &basis[c]).trd()))
}

pub fn det4(m: &[[Rational; 4]; 4]) -> Rational {
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut det = Rational::from(1);
    for col in 0..4 {
        let Some(piv) = (col..4).find(|&r| a[r][col] != 0) else {
            return Rational::new();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..4 {
            let f = Rational::from(&a[r][col] / &p);
            if f != 0 {
                for c in col..4 {
                    let t = Rational::from(&f * &a[col][c]);
                    a[r][c] -= t;
                }
            }
        }
    }
    det
}

fn inverse4(m: &[[Rational; 4]; 4]) -> Option<[[Rational; 4]; 4]> {
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.to_vec();
            row.extend((0..4).map(|j| Rational::from(u32::from(i == j))));
            row
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4).find(|&r| a[r][col] != 0)?;
        a.swap(piv, col);
        let p = Rational::from(a[col][col].recip_ref());
        for c in 0..8 {
            a[col][c] *= &p;
        }
        for r in 0..4 {
            if r != col && a[r][col] != 0 {
                let f = a[r][col].clone();
                for c in 0..8 {
                    let t = Rational::from(&f * &a[col][c]);
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(std::array::from_fn(|r| std::array::from_fn(|c| a[r][c + 4].clone())))
}

fn basis_matrix(basis: &[Quaternion; 4]) -> [[Rational; 4]; 4] {
    std::array::from_fn(|r| basis[r].coords())
}

fn reduced_disc(basis: &[Quaternion; 4]) -> Integer {
    let d = det4(&gram_trd(basis));
    let n = d.numer().clone().abs();
    assert_eq!(*d.denom(), 1, "order Gram determinant is integral");
    n.sqrt()
}

fn coords_in(inv: &[[Rational; 4]; 4], q: &Quaternion) -> [Rational; 4] {
    let v = q.coords();
    std::array::from_fn(|col| (0..4).fold(Rational::new(), |acc, r| acc + Rational::from(&v[r] * &inv[r][col])))
}

fn is_ring(basis: &[Quaternion; 4], inv: &[[Rational; 4]; 4]) -> bool {
    basis.iter().all(|a| {
        basis.iter().all(|b| coords_in(inv, &(a * b)).iter().all(|c| *c.denom() == 1))
    })
}

fn floor_div(a: &Integer, b: &Integer) -> Integer {
    a.clone().div_rem_floor(b.clone()).0
}

/// Row Hermite normal form over ℤ; zero rows are dropped.
fn hnf_rows(mut rows: Vec<Vec<Integer>>) -> Vec<Vec<Integer>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut out_row = 0;
    for col in 0..ncols {
        // Euclid on column `col` among rows out_row..
        loop {
            let nonzero: Vec<usize> = (out_row..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&r| rows[r][col].clone().abs()).unwrap();
            rows.swap(out_row, piv);
            let mut done = true;
            for r in out_row + 1..rows.len() {
                if rows[r][col] != 0 {
                    let q = floor_div(&rows[r][col], &rows[out_row][col]);
                    for c in col..ncols {
                        let t = Integer::from(&q * &rows[out_row][c]);
                        rows[r][c] -= t;
                    }
                    if rows[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if out_row < rows.len() && rows[out_row][col] != 0 {
            if rows[out_row][col] < 0 {
                for c in col..ncols {
                    rows[out_row][c] = -rows[out_row][c].clone();
                }
            }
            for r in 0..out_row {
                let q = floor_div(&rows[r][col], &rows[out_row][col]);
                if q != 0 {
                    for c in col..ncols {
                        let t = Integer::from(&q * &rows[out_row][c]);
                        rows[r][c] -= t;
                    }
                }
            }
            out_row += 1;
        }
    }
    rows.truncate(out_row);
    rows
}

/// ℤ-span of the given quaternions as a basis `1, f1, f2, f3` (assuming the
/// span is a rank-4 lattice in which 1 is primitive).
fn lattice_basis_with_one(gens: &[Quaternion]) -> Result<[Quaternion; 4]> {
    let mut den = Integer::from(1);
    for g in gens {
        for c in g.coords() {
            den.lcm_mut(c.denom());
        }
    }
    // Columns: (x, y, z, w) — pivoting on the pure part first leaves the
    // kernel of the projection, ℤ·1, as the last row.
    let rows: Vec<Vec<Integer>> = gens
        .iter()
        .map(|g| {
            [&g.x, &g.y, &g.z, &g.w]
                .iter()
                .map(|c| Integer::from(c.numer() * &den) / c.denom())
                .collect()
        })
        .collect();
    let h = hnf_rows(rows);
    if h.len() != 4 {
        return Err(Error::Internal(format!("lattice rank {} instead of 4", h.len())));
    }
    let to_q = |r: &Vec<Integer>| {
        let f = |i: usize| Rational::from((r[i].clone(), den.clone()));
        Quaternion::new(f(3), f(0), f(1), f(2))
    };
    let one = to_q(&h[3]);
    if one != Quaternion::one() {
        return Err(Error::Internal(format!("1 is not primitive in the lattice: {one}")));
    }
    let mut basis = [Quaternion::one(), to_q(&h[0]), to_q(&h[1]), to_q(&h[2])];
    for b in basis.iter_mut().skip(1) {
        let fl = b.w.clone().floor();
        b.w -= fl;
    }
    Ok(basis)
}

const SATURATION_STEPS: usize = 16;

/// Build the maximal order by saturating `ℤ⟨1, i, j, k⟩` at 2 and 3, then
/// locate μ (trace 0, norm 6, sign fixed by positivity of the Riemann
/// form) and the Atkin–Lehner elements χ₂, χ₃, χ₆.
pub fn build_maximal_order() -> Result<Order> {
    let mut basis = [Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()];
    let target = Integer::from(6);
    let mut steps = 0;
    while reduced_disc(&basis) != target {
        steps += 1;
        if steps > SATURATION_STEPS {
            return Err(Error::Saturation(SATURATION_STEPS));
        }
        let rd = reduced_disc(&basis);
        let mut next = None;
        'primes: for p in [2u32, 3] {
            if !rd.is_divisible_u(p * p) && !(rd.is_divisible_u(p) && !target.is_divisible_u(p)) {
                continue;
            }
            for mask in 1..p.pow(4) {
                let digits: Vec<u32> = (0..4).map(|k| (mask / p.pow(k)) % p).collect();
                let mut cand = Quaternion::default();
                for (dgt, e) in digits.iter().zip(&basis) {
                    cand = &cand + &e.scale(&Rational::from((*dgt, p)));
                }
                if !cand.is_integral() {
                    continue;
                }
                let mut gens = basis.to_vec();
                gens.push(cand);
                let Ok(nb) = lattice_basis_with_one(&gens) else { continue };
                let Some(inv) = inverse4(&basis_matrix(&nb)) else { continue };
                if is_ring(&nb, &inv) {
                    next = Some(nb);
                    break 'primes;
                }
            }
        }
        basis = next.ok_or(Error::Saturation(steps))?;
    }
    let inv = inverse4(&basis_matrix(&basis)).ok_or_else(|| Error::Internal("singular basis".into()))?;
    let mut order = Order { basis, inv, mu: Quaternion::default(), chi: Vec::new() };
    if !order.is_ring() {
        return Err(Error::Internal("saturated lattice is not a ring".into()));
    }

    // Norm-n normaliser of smallest |trace|; trace 0 is impossible for
    // n = 2 because ℚ(√−2) does not embed (3 splits in it).
    let first_pure = |nrd: i64| -> Option<Quaternion> {
        for t in 0..=2i64 {
            for h in [2, 4, 8, 16] {
                for (_, q) in order.embedding_classes(t * t - 4 * nrd, h) {
                    let shift = Rational::from(t) - q.trd();
                    let cand = &q + &Quaternion::scalar(shift / 2u32);
                    if cand.nrd() == nrd && order.contains(&cand) && order.normalizes(&cand) {
                        return Some(cand);
                    }
                }
            }
        }
        None
    };
    let mut mu = first_pure(6).ok_or_else(|| Error::Internal("no μ found".into()))?;
    if !riemann_positive(&mu) {
        mu = -&mu;
    }
    let mut chi = Vec::new();
    for d in [2u32, 3] {
        let c = first_pure(d as i64).ok_or_else(|| Error::Internal(format!("no χ_{d} found")))?;
        chi.push((d, c));
    }
    chi.push((6, mu.clone()));
    order.mu = mu;
    order.chi = chi;
    Ok(order)
}

/// Positivity test for the polarisation attached to `μ`: with `J` the
/// complex structure (`J v_τ = i v_τ`, `v_τ = (τ, 1)ᵀ`) at the fixed point
/// of `μ`, require `trd(μ J) > 0`.
pub fn riemann_positive(mu: &Quaternion) -> bool {
    let prec = 128;
    let m = iota_inf(mu, prec);
    // Fixed point of [[a, b], [c, d]]: c τ² + (d − a) τ − b = 0.
    let c = m.c.to_f64();
    let dma = (m.d.clone() - &m.a).to_f64();
    let b = m.b.to_f64();
    let disc = dma * dma + 4.0 * b * c;
    assert!(disc < 0.0, "μ must be elliptic");
    let re = -dma / (2.0 * c);
    let im = (-disc).sqrt() / (2.0 * c).abs();
    let abs2 = re * re + im * im;
    // J_τ = (1/Im τ)·[[Re τ, −|τ|²], [1, −Re τ]]
    let j = RealMatrix2 {
        a: Float::with_val(prec, re / im),
        b: Float::with_val(prec, -abs2 / im),
        c: Float::with_val(prec, 1.0 / im),
        d: Float::with_val(prec, -re / im),
    };
    let prod = m.mul(&j);
    prod.trace() > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: i64, x: i64, y: i64, z: i64) -> Quaternion {
        Quaternion::from_ints(w, x, y, z)
    }

    #[test]
    fn basis_relations() {
        assert_eq!(&Quaternion::i() * &Quaternion::j(), Quaternion::k());
        assert_eq!(&Quaternion::j() * &Quaternion::i(), -&Quaternion::k());
        assert_eq!(&Quaternion::i() * &Quaternion::i(), q(-1, 0, 0, 0));
        assert_eq!(&Quaternion::j() * &Quaternion::j(), q(3, 0, 0, 0));
        assert_eq!(&Quaternion::k() * &Quaternion::k(), q(3, 0, 0, 0));
        let mu = q(0, 3, 1, 0);
        assert_eq!(&mu * &mu, q(-6, 0, 0, 0));
    }

    #[test]
    fn conj_gives_norm() {
        let a = q(2, -1, 3, 5);
        assert_eq!(&a * &a.conj(), Quaternion::scalar(a.nrd()));
        assert_eq!(a.nrd(), Rational::from(4 + 1 - 27 - 75));
    }

    #[test]
    fn ramified_exactly_at_2_and_3() {
        for p in [0u64, 2, 3, 5, 7, 11, 13, 37, 101] {
            let expect = if p == 2 || p == 3 { -1 } else { 1 };
            assert_eq!(hilbert_symbol(-1, 3, p), expect, "p = {p}");
        }
    }

    #[test]
    fn hilbert_symbol_product_formula() {
        for (a, b) in [(2, 5), (-3, 7), (6, -10), (-1, -1), (15, 22)] {
            let mut prod = hilbert_symbol(a, b, 0);
            for p in crate::arith::primes_up_to(50) {
                prod *= hilbert_symbol(a, b, p);
            }
            assert_eq!(prod, 1, "({a},{b})");
        }
    }

    #[test]
    fn hnf_drops_dependent_rows() {
        let r = |v: &[i64]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
        let h = hnf_rows(vec![r(&[2, 4]), r(&[3, 6]), r(&[0, 5])]);
        assert_eq!(h, vec![r(&[1, 2]), r(&[0, 5])]);
    }

    #[test]
    fn maximal_order() {
        let o = build_maximal_order().unwrap();
        assert_eq!(o.reduced_discriminant(), 6);
        assert!(o.is_ring());
        for e in [Quaternion::i(), Quaternion::j(), Quaternion::k()] {
            assert!(o.contains(&e));
        }
        assert_eq!(&o.mu * &o.mu, q(-6, 0, 0, 0));
        assert!(o.contains(&o.mu));
        for d in [2u32, 3, 6] {
            let c = o.chi(d).unwrap();
            assert_eq!(c.trd(), if d == 2 { 2 } else { 0 });
            assert_eq!(c.nrd(), d);
            assert!(o.normalizes(c));
        }
    }

    #[test]
    fn riemann_form_basics() {
        let o = build_maximal_order().unwrap();
        assert_eq!(o.riemann_form(&Quaternion::one(), &o.mu), 2);
        let g = o.riemann_gram();
        assert!(g.iter().flatten().all(|e| *e.denom() == 1));
        assert_eq!(det4(&g), 1);
        for e in o.basis() {
            assert_eq!(o.riemann_form(e, e), 0);
        }
    }

    #[test]
    fn involution_on_mu() {
        let o = build_maximal_order().unwrap();
        assert_eq!(o.involution_prime(&Quaternion::one()), Quaternion::one());
        assert_eq!(o.involution_prime(&o.mu), -&o.mu);
    }

    #[test]
    fn splitting() {
        let m = iota_inf(&q(0, 3, 1, 0), 200);
        assert!((m.det() - 6u32).abs() < 1e-55);
        let one = iota_inf(&Quaternion::one(), 64);
        assert_eq!((one.a.to_f64(), one.b.to_f64(), one.c.to_f64(), one.d.to_f64()), (1.0, 0.0, 0.0, 1.0));
        let back = iota_inf(&q(1, 2, -3, 5), 200).to_real_quaternion();
        let expect = [1.0, 2.0, -3.0, 5.0];
        for (b, e) in back.iter().zip(expect) {
            assert!((b.to_f64() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn embeddings_small() {
        let o = build_maximal_order().unwrap();
        let e24 = o.embeddings_with_disc(-24, 10);
        assert!(e24.contains(&q(0, 3, 1, 0)));
        let e4 = o.embeddings_with_disc(-4, 5);
        assert!(e4.contains(&Quaternion::i()));
        assert!(o.embeddings_with_disc(-11, 12).is_empty());
        for b in o.embeddings_with_disc(-43, 6) {
            assert_eq!(b.disc(), -43);
            assert!(o.contains(&b));
        }
    }
}
