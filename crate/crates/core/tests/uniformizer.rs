use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};
use superspecial::cm::{mobius, TValue, Uniformizer};
use superspecial::quaternion::{build_maximal_order, iota_inf, Quaternion};

const DIGITS: u32 = 40;
const TOL: f64 = 1e-25;

fn close(a: &TValue, b: &TValue, prec: u32) -> bool {
    match (a, b) {
        (TValue::Infinity, TValue::Infinity) => true,
        (TValue::Finite(x), TValue::Finite(y)) => {
            let d = Float::with_val(prec, Complex::with_val(prec, x - y).abs_ref()).to_f64();
            let scale = Float::with_val(prec, x.abs_ref()).to_f64().max(1.0);
            d < TOL * scale
        }
        _ => false,
    }
}

/// Generators of the normaliser group: small elements of the order with
/// positive norm dividing 6 that normalise it.
fn generators() -> Vec<Quaternion> {
    let o = build_maximal_order().unwrap();
    let mut out = Vec::new();
    let r = 2i128;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    let q = o.element(&[a, b, c, d]);
                    let n = q.nrd();
                    if [1, 2, 3, 6].iter().any(|&k| n == k) && (n == 1 || o.normalizes(&q)) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn hauptmodul_is_invariant_under_the_normaliser() {
    let o = build_maximal_order().unwrap();
    let u = Uniformizer::new(&o, DIGITS).unwrap();
    let p = u.prec();
    let gens = generators();
    assert!(gens.len() > 4);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base: Vec<Complex> = (0..4)
        .map(|_| Complex::with_val(p, (rng.gen_range(-0.8..0.8), rng.gen_range(0.6..2.5))))
        .collect();
    // Each generator alone, then 20 random words.
    let mut words: Vec<Vec<usize>> = (0..gens.len()).map(|k| vec![k]).collect();
    for _ in 0..20 {
        let len = rng.gen_range(2..=4);
        words.push((0..len).map(|_| rng.gen_range(0..gens.len())).collect());
    }
    for tau in &base {
        let t0 = u.uniformizer_t(tau).unwrap();
        for w in &words {
            let g = w.iter().fold(Quaternion::one(), |acc, &k| &acc * &gens[k]);
            let tau2 = mobius(&iota_inf(&g, p), tau);
            let t1 = u.uniformizer_t(&tau2).unwrap();
            assert!(close(&t0, &t1, p), "word {w:?}: t = {t0} vs {t1}");
        }
    }
}
