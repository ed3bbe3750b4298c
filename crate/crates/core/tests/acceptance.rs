//! Acceptance criteria 1–10. Runs as a plain binary so every criterion
//! reports one line even when others fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use superspecial::arith::primes_up_to;
use superspecial::cm::{digits_to_bits, fixed_point, heegner_poly, HeegnerOptions, HeegnerPolynomial, Uniformizer};
use superspecial::config::Config;
use superspecial::poly::QPoly;
use superspecial::quadratic::{
    class_number, equidist_diagnostic, fundamental_unit, is_square_mod, kronecker, quad_order_data, Family,
};
use superspecial::quaternion::{build_maximal_order, det4, iota_inf, riemann_positive, Order};
use superspecial::reduction::{elliptic2_residue, interval_profile, local_intersection, ProjPoint};
use superspecial::search::{find_superspecial, jacobi_stepwise, parse_moduli_str, verify_certificate, Certificate};
use superspecial::table::HeegnerTable;

const PARITY_L_BOUND: u64 = 500;
const PARITY_BUDGET: Duration = Duration::from_secs(60);
const EICHLER_D_BOUND: i64 = 300;
const EICHLER_HEIGHT: i64 = 64;
const ROSATI_SAMPLES: usize = 1000;
const IOTA_DIGITS: u32 = 50;
const IOTA_TOL: f64 = 1e-40;
const ANCHOR_DIGITS: u32 = 50;
const ANCHOR_TOL: f64 = 1e-30;
const ANCHOR_HEIGHT: i64 = 8;
const HEEGNER_DS: [i64; 5] = [-52, -148, -19, -43, -219];
const HEEGNER_DIGITS: (u32, u32) = (60, 120);
const HEEGNER_BUDGET: Duration = Duration::from_secs(600);
const L_MAX: u64 = 5000;
const FIND_BUDGET: Duration = Duration::from_secs(300);
const CHAIN_PAIRS: usize = 10_000;
const CLASS_D_BOUND: i64 = 10_000;
const ORACLE_CASES: usize = 100;
const EQUIDIST_BOUNDS: (u64, u64) = (1_000, 100_000);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn order() -> Order {
    build_maximal_order().expect("maximal order")
}

// ---- independent oracles -------------------------------------------------

/// Kronecker symbol `(a/n)` for `n ≥ 1` by binary Jacobi with the
/// `(a/2)` rule.
fn kron(a: i64, mut n: i64) -> i32 {
    assert!(n >= 1);
    let mut t = 1;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => t = -t,
            _ => return 0,
        }
    }
    let (mut a, mut n) = (a.rem_euclid(n), n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn squarefree(mut m: i64) -> bool {
    m = m.abs();
    let mut p = 2;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn fundamental(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => matches!((d / 4).rem_euclid(4), 2 | 3) && squarefree(d / 4),
        _ => false,
    }
}

/// `(D₀, f)` with `D = D₀ f²`.
fn split_conductor(d: i64) -> (i64, i64) {
    let mut f = ((d.abs() as f64).sqrt() as i64) + 1;
    while f >= 1 {
        if d % (f * f) == 0 && fundamental(d / (f * f)) {
            return (d / (f * f), f);
        }
        f -= 1;
    }
    unreachable!("every discriminant has a fundamental part")
}

/// Class number from Dirichlet's formula and the conductor formula.
fn class_number_oracle(d: i64) -> i64 {
    let (d0, f) = split_conductor(d);
    let w = match d0 {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let m = -d0;
    let s: i64 = (1..m).map(|n| kron(d0, n) as i64 * n).sum();
    let h0 = w * s.abs() / (2 * m);
    if f == 1 {
        return h0;
    }
    let mut h = h0;
    let mut r = f;
    let mut p = 2;
    while r > 1 {
        if r % p == 0 {
            let mut pk = 1;
            while r % p == 0 {
                r /= p;
                pk *= p;
            }
            h *= pk / p * (p - kron(d0, p) as i64);
        }
        p += 1;
    }
    h / (w / 2)
}

fn cabs(z: &Complex) -> f64 {
    Float::with_val(z.prec().0, z.abs_ref()).to_f64()
}

// ---- criteria -----------------------------------------------------------------

/// Parity table: (h mod 4 where stated, h′ mod 2, #W″) per family.
fn c1_parity_table() -> Outcome {
    let start = Instant::now();
    let rows = [(Family::FourL13, Some(2), 1, 2u32), (Family::L19, None, 1, 1), (Family::ThreeL1, Some(0), 0, 2)];
    let mut n = 0;
    for (fam, h4, hp2, w) in rows {
        for l in primes_up_to(PARITY_L_BOUND - 1).into_iter().filter(|l| l % 24 == fam.residue()) {
            let d = fam.disc(l);
            let q = quad_order_data(d).map_err(|e| e.to_string())?;
            ensure(q.h as i64 == class_number_oracle(d), format!("D = {d}: h = {} disagrees with oracle", q.h))?;
            ensure(q.w2_size == w, format!("D = {d}: #W″ = {}", q.w2_size))?;
            let hp = q.h_prime_usize().ok_or(format!("D = {d}: h′ not integral"))?;
            ensure(h4.is_none_or(|m| q.h % 4 == m), format!("D = {d}: h = {} mod 4", q.h))?;
            ensure(hp % 2 == hp2, format!("D = {d}: h′ = {hp} wrong parity"))?;
            n += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < PARITY_BUDGET, format!("took {t:.1?}"))?;
    Ok(format!("{n} primes, {t:.1?}"))
}

fn c2_eichler() -> Outcome {
    let o = order();
    let mut n = 0;
    for d in (-EICHLER_D_BOUND..=-3).filter(|&d| fundamental(d)) {
        let s = quad_order_data(d).map_err(|e| e.to_string())?.s;
        let found = !o.embeddings_with_disc(d, EICHLER_HEIGHT).is_empty();
        ensure((s != 0) == found, format!("D = {d}: s = {s} but embeddings found = {found}"))?;
        n += 1;
    }
    Ok(format!("{n} fundamental discriminants agree"))
}

fn c3_quaternion_core() -> Outcome {
    let o = order();
    let g = o.riemann_gram();
    ensure(g.iter().flatten().all(|x| *x.denom() == 1), "Gram matrix not integral")?;
    let det = det4(&g);
    ensure(det == 1, format!("Gram determinant {det}"))?;
    ensure(riemann_positive(&o.mu), "polarisation not positive")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rand_elt = |r: i128| {
        let c: [i128; 4] = std::array::from_fn(|_| rng.gen_range(-r..=r));
        o.element(&c)
    };
    let prec = digits_to_bits(IOTA_DIGITS);
    let tol = Float::with_val(prec, IOTA_TOL);
    let mut worst = 0f64;
    for _ in 0..ROSATI_SAMPLES {
        let (a, x, y) = (rand_elt(20), rand_elt(20), rand_elt(20));
        ensure(o.riemann_form(&(&a * &x), &y) == o.riemann_form(&x, &(&o.involution_prime(&a) * &y)), "Rosati")?;
        if !a.is_zero() {
            ensure((&a * &o.involution_prime(&a)).trd() > 0, format!("trd(a a′) ≤ 0 for {a}"))?;
        }
        let lhs = iota_inf(&(&a * &x), prec);
        let rhs = iota_inf(&a, prec).mul(&iota_inf(&x, prec));
        let r = lhs.max_diff(&rhs);
        ensure(r < tol, format!("ι∞ residual {r}"))?;
        worst = worst.max(r.to_f64());
    }
    Ok(format!("det 1, {ROSATI_SAMPLES} samples, max ι∞ residual {worst:.1e}"))
}

fn c4_anchors() -> Outcome {
    let o = order();
    let u = Uniformizer::new(&o, ANCHOR_DIGITS).map_err(|e| e.to_string())?;
    let p = u.prec();
    let mut worst = 0f64;
    for (d, target) in [(-24i64, Some(0u32)), (-4, Some(1)), (-3, None)] {
        let classes = o.embedding_classes(d, ANCHOR_HEIGHT);
        ensure(!classes.is_empty(), format!("no embeddings of discriminant {d}"))?;
        for (_, beta) in &classes {
            let tau = fixed_point(beta, p).map_err(|e| e.to_string())?;
            let t = u.uniformizer_t(&tau).map_err(|e| e.to_string())?;
            match target {
                Some(v) => {
                    let z = t.finite().ok_or(format!("D = {d}: t = ∞"))?;
                    let r = cabs(&Complex::with_val(p, z - v));
                    ensure(r < ANCHOR_TOL, format!("D = {d}: |t − {v}| = {r:e}"))?;
                    worst = worst.max(r);
                }
                None => ensure(t.is_infinite(), format!("D = {d}: t = {t} is finite"))?,
            }
        }
    }
    Ok(format!("t = 0, 1, ∞; max residual {worst:.1e}"))
}

/// `P mod l` evaluated at every residue, with multiplicity by synthetic
/// division; the point at infinity gets the degree drop.
fn odd_roots_mod(coeffs: &[Integer], l: u64) -> Vec<Option<u64>> {
    let red: Vec<u64> = coeffs.iter().map(|c| c.mod_u(l as u32) as u64).collect();
    let mut out = Vec::new();
    let top = red.iter().rposition(|&c| c != 0).unwrap();
    if (red.len() - 1 - top) % 2 == 1 {
        out.push(None);
    }
    for r in 0..l {
        let mut f = red[..=top].to_vec();
        let mut m = 0;
        loop {
            // Divide by (x − r) if f(r) = 0.
            let mut q = vec![0u64; f.len() - 1];
            let mut acc = 0u64;
            for k in (0..f.len()).rev() {
                acc = (acc * r + f[k]) % l;
                if k > 0 {
                    q[k - 1] = acc;
                }
            }
            if acc != 0 || f.len() == 1 {
                break;
            }
            m += 1;
            f = q;
        }
        if m % 2 == 1 {
            out.push(Some(r));
        }
    }
    out
}

fn c5_heegner() -> Outcome {
    let start = Instant::now();
    let o = order();
    let mut summary = Vec::new();
    for d in HEEGNER_DS {
        let (fam, l) = Family::from_disc(d).ok_or(format!("D = {d} not in a family"))?;
        let run = |digits| heegner_poly(&o, d, HeegnerOptions { digits, ..Default::default() });
        let lo: HeegnerPolynomial = run(HEEGNER_DIGITS.0).map_err(|e| format!("D = {d}: {e}"))?;
        let hi = run(HEEGNER_DIGITS.1).map_err(|e| format!("D = {d}: {e}"))?;
        ensure(lo.coeffs == hi.coeffs, format!("D = {d}: coefficients differ between precisions"))?;
        let hp = quad_order_data(d).unwrap().h_prime_usize().unwrap();
        ensure(lo.degree() == hp, format!("D = {d}: degree {} ≠ h′ = {hp}", lo.degree()))?;
        let c = &lo.coeffs;
        let nonzero_mod = |p: u32| -> Vec<usize> { (0..c.len()).filter(|&k| c[k].mod_u(p) != 0).collect() };
        // Table rows: x^h′ / 1 mod 2, ±x^h′ / ±1 mod 3, (−16/27) / ∅ mod l.
        let (m2, m3, unpaired, intervals) = match fam {
            Family::FourL13 => (vec![hp], vec![hp], true, [0, 1, 0]),
            Family::L19 => (vec![0], vec![hp], true, [0, 0, 1]),
            Family::ThreeL1 => (vec![0], vec![0], false, [1, 0, 1]),
        };
        ensure(nonzero_mod(2) == m2, format!("D = {d}: wrong shape mod 2"))?;
        ensure(nonzero_mod(3) == m3, format!("D = {d}: wrong shape mod 3"))?;
        let want: Vec<Option<u64>> = if unpaired { vec![Some(elliptic2_residue(l))] } else { vec![] };
        let got = odd_roots_mod(c, l);
        ensure(got == want, format!("D = {d}: unpaired roots mod {l} are {got:?}"))?;
        // Exact (Sturm) and numerical (uniformizer) root locations agree.
        let prof = interval_profile(&QPoly::from_ints(c)).map_err(|e| e.to_string())?;
        ensure(prof.counts == intervals, format!("D = {d}: interval profile {:?}", prof.counts))?;
        let e = -16.0 / 27.0;
        let mut num = [0; 3];
        for &(re, im) in &lo.roots {
            if im.abs() < 1e-20 {
                num[if re < e { 0 } else if re < 0.0 { 1 } else { 2 }] += 1;
            }
        }
        ensure(num == intervals, format!("D = {d}: numerical roots give {num:?}"))?;
        summary.push(format!("{d}:h′={hp}"));
    }
    let t = start.elapsed();
    ensure(t < HEEGNER_BUDGET, format!("took {t:.1?}"))?;
    Ok(format!("{} in {t:.1?}", summary.join(" ")))
}

fn c6_predicates() -> Outcome {
    for (a, m) in [(156, 72), (76, 48), (57, 72)] {
        let got = is_square_mod(&Integer::from(a), &Integer::from(m));
        let brute = (0..m).any(|x| (x * x - a) % m == 0);
        ensure(!got && !brute, format!("is_square_mod({a}, {m}) = {got}, brute force {brute}"))?;
    }
    Ok("156 mod 72, 76 mod 48, 57 mod 72 are non-squares".into())
}

fn tamper(cert: &Certificate) -> Vec<(&'static str, Certificate)> {
    let mut out = Vec::new();
    let mut push = |name, f: &dyn Fn(&mut Certificate)| {
        let mut c = cert.clone();
        f(&mut c);
        out.push((name, c));
    };
    push("case", &|c| c.case = c.case % 3 + 1);
    push("D", &|c| c.d -= 24);
    push("l", &|c| c.l += 24);
    push("p", &|c| c.p = (c.p.parse::<Integer>().unwrap().next_prime()).to_string());
    push("minpoly", &|c| c.minpoly[0] = (c.minpoly[0].parse::<Rational>().unwrap() + 1u32).to_string());
    push("degree_mult", &|c| c.degree_mult += 1);
    push("dchain", &|c| c.dchain = (c.dchain.parse::<Integer>().unwrap() * 5u32).to_string());
    push("N", &|c| c.n = (c.n.parse::<Integer>().unwrap() + 2u32).to_string());
    push("chain", &|c| c.chain[0].value = -c.chain[0].value);
    push("checks", &|c| c.checks.root_interval = !c.checks.root_interval);
    push("precision", &|c| c.precision += 10);
    push("table_hash", &|c| c.table_hash = "0".repeat(64));
    out
}

fn c7_certificates() -> Outcome {
    let o = order();
    let bundled = HeegnerTable::bundled();
    let cfg = Config { l_max: L_MAX, ..Config::default() };
    let mut summary = Vec::new();
    for (poly, case) in [("x + 1/2", 1u8), ("x - 1", 2), ("x^2 - 2", 3)] {
        let start = Instant::now();
        // A fresh table: every P_D is computed from the uniformizer.
        let table = HeegnerTable::parse("").map_err(|e| e.to_string())?;
        let input = parse_moduli_str(poly, 1).map_err(|e| e.to_string())?;
        let res = find_superspecial(&input, &cfg, &table, &o).map_err(|e| format!("{poly}: {e}"))?;
        let t = start.elapsed();
        let cert = res.certificate;
        ensure(cert.case == case, format!("{poly}: case {} instead of {case}", cert.case))?;
        ensure(t < FIND_BUDGET, format!("{poly}: search took {t:.1?}"))?;
        let round = Certificate::from_json(&cert.to_json()).map_err(|e| e.to_string())?;
        ensure(round == cert, "certificate JSON does not round-trip")?;
        for tb in [&table, &bundled] {
            let v = verify_certificate(&cert, Some(&input), tb, &o, &cfg);
            ensure(v.pass, format!("{poly}: verification failed: {:?}", v.reasons))?;
        }
        for (field, bad) in tamper(&cert) {
            let v = verify_certificate(&bad, None, &table, &o, &cfg);
            ensure(!v.pass, format!("{poly}: tampered {field} still verifies"))?;
            ensure(!v.reasons.is_empty() && v.reasons.iter().all(|r| !r.is_empty()), "empty reason")?;
            println!("    tampered {field:<12} → {}", v.reasons[0]);
        }
        summary.push(format!("{poly}: D = {}, l = {}, p = {} ({t:.1?})", cert.d, cert.l, short(&cert.p)));
    }
    Ok(summary.join("; "))
}

fn short(s: &str) -> String {
    if s.len() > 16 {
        format!("{}…({} digits)", &s[..8], s.len())
    } else {
        s.to_string()
    }
}

fn c8_chain_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mism = 0;
    let mut n = 0;
    while n < CHAIN_PAIRS {
        let d: i64 = rng.gen_range(-1_000_000_000_000..1_000_000_000_000);
        let m: i64 = rng.gen_range(1..1_000_000_000_000_000);
        if m % 2 == 0 || m % 3 == 0 {
            continue;
        }
        n += 1;
        let (s, _) = jacobi_stepwise(&Integer::from(d), &Integer::from(m));
        if s != kronecker(&Integer::from(d), &Integer::from(m)) || s != kron(d, m) {
            mism += 1;
        }
    }
    ensure(mism == 0, format!("{mism} mismatches"))?;
    Ok(format!("{n} pairs, 0 mismatches"))
}

fn c9_oracles() -> Outcome {
    let mut nd = 0;
    for d in (-CLASS_D_BOUND..=-3).filter(|d| d.rem_euclid(4) <= 1) {
        let (h, _) = class_number(d);
        ensure(h as i64 == class_number_oracle(d), format!("h({d}) = {h}, oracle {}", class_number_oracle(d)))?;
        nd += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let primes = [2u64, 3, 5, 7, 11];
    for _ in 0..ORACLE_CASES {
        let p = primes[rng.gen_range(0..primes.len())];
        let k = rng.gen_range(1..=4);
        let mut f = QPoly::constant(Rational::from(1));
        let mut vals = Vec::new();
        for _ in 0..k {
            let v: i64 = rng.gen_range(-3..=3);
            let unit = loop {
                let a: i64 = rng.gen_range(1..50);
                let b: i64 = rng.gen_range(1..50);
                if a % p as i64 != 0 && b % p as i64 != 0 {
                    break Rational::from((if rng.gen() { a } else { -a }, b));
                }
            };
            let pv = Rational::from(p).pow(v as i32);
            f = f.mul(&QPoly::linear(Rational::from(1), -(unit * pv)));
            vals.push(Rational::from(v));
        }
        let mut got: Vec<Rational> = f
            .newton_polygon(&Integer::from(p))
            .into_iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s.expect("no zero roots"), m))
            .collect();
        got.sort();
        vals.sort();
        ensure(got == vals, format!("Newton polygon of {f} at {p}: {got:?} vs {vals:?}"))?;
    }
    for _ in 0..ORACLE_CASES {
        let p = primes[rng.gen_range(0..primes.len())];
        let pt = |rng: &mut ChaCha8Rng| -> (ProjPoint, [Integer; 2]) {
            if rng.gen_ratio(1, 10) {
                return (ProjPoint::Infinity, [Integer::from(1), Integer::from(0)]);
            }
            let e: i32 = rng.gen_range(-3..=3);
            let a: i64 = rng.gen_range(-40..=40);
            let b: i64 = rng.gen_range(1..40);
            let x = Rational::from((a, b)) * Rational::from(p).pow(e);
            let (n, d) = x.clone().into_numer_denom();
            (ProjPoint::Finite(x), [n, d])
        };
        let (x, hx) = pt(&mut rng);
        let (y, hy) = pt(&mut rng);
        if x == y {
            continue;
        }
        // Primitive homogeneous coordinates: v_p(x₀y₁ − x₁y₀).
        let det = Integer::from(&hx[0] * &hy[1]) - Integer::from(&hx[1] * &hy[0]);
        let mut det = det;
        let direct = det.remove_factor_mut(&Integer::from(p));
        let got = local_intersection(&x, &y, p).map_err(|e| e.to_string())?;
        ensure(got == direct, format!("({x:?}, {y:?}) at {p}: {got} vs {direct}"))?;
    }
    Ok(format!("{nd} class numbers; {ORACLE_CASES} Newton polygons; {ORACLE_CASES} intersection pairs"))
}

/// Least `a + b√m > 1` of norm ±1, by increasing `b`.
fn pell(m: u64) -> (u64, u64) {
    for b in 1u64.. {
        for t in [m * b * b - 1, m * b * b + 1] {
            let a = (t as f64).sqrt().round() as u64;
            if a * a == t {
                return (a, b);
            }
        }
    }
    unreachable!()
}

fn c10_equidistribution() -> (Outcome, Outcome) {
    let units = (|| {
        for (m, want) in [(2u64, (1u64, 1u64)), (3, (2, 1)), (6, (5, 2))] {
            let u = fundamental_unit(m);
            ensure((u.a, u.b) == want && pell(m) == want, format!("unit of ℤ[√{m}] is {} + {}√{m}", u.a, u.b))?;
        }
        Ok("1+√2, 2+√3, 5+2√6".to_string())
    })();
    let disc = (|| {
        let small = equidist_diagnostic(EQUIDIST_BOUNDS.0).map_err(|e| e.to_string())?;
        let large = equidist_diagnostic(EQUIDIST_BOUNDS.1).map_err(|e| e.to_string())?;
        let msg = format!(
            "D*({}) = {:.4} over {} primes, D*({}) = {:.4} over {} primes",
            EQUIDIST_BOUNDS.0,
            small.discrepancy,
            small.pairs.len(),
            EQUIDIST_BOUNDS.1,
            large.discrepancy,
            large.pairs.len()
        );
        ensure(large.discrepancy < small.discrepancy, msg.clone())?;
        Ok(msg)
    })();
    (units, disc)
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    })
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |k: u32| filter.is_empty() || filter.iter().any(|f| f == &k.to_string());
    type Criterion = (u32, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (1, "parity table", c1_parity_table),
        (2, "Eichler consistency", c2_eichler),
        (3, "quaternion core", c3_quaternion_core),
        (4, "uniformizer anchors", c4_anchors),
        (5, "Heegner polynomials", c5_heegner),
        (6, "predicate spot checks", c6_predicates),
        (7, "end-to-end certificates", c7_certificates),
        (8, "chain soundness", c8_chain_soundness),
        (9, "oracle equivalences", c9_oracles),
    ];
    let mut failed = 0;
    let report = |k: u32, name: &str, r: &Outcome, fatal: bool| {
        let tag = match (r.is_ok(), fatal) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-fatal)",
        };
        let detail = match r {
            Ok(m) | Err(m) => m,
        };
        println!("criterion {k:>2} {name:<24} {tag}  {detail}");
    };
    for (k, name, f) in criteria {
        if !wanted(k) {
            continue;
        }
        let start = Instant::now();
        let r = guarded(f);
        report(k, name, &r, true);
        if r.is_err() {
            failed += 1;
        }
        eprintln!("    ({:.1?})", start.elapsed());
    }
    if wanted(10) {
        let (units, disc) = c10_equidistribution();
        report(10, "fundamental units", &units, true);
        report(10, "equidistribution", &disc, false);
        if units.is_err() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
