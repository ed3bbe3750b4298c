use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rug::Integer;
use serde_json::json;

use superspecial::cm::heegner_poly;
use superspecial::config::Config;
use superspecial::quadratic::{equidist_diagnostic, fundamental_unit, parity_check, quad_order_data, Family, Parity};
use superspecial::quaternion::{build_maximal_order, iota_fingerprint, iota_inf, Order, Quaternion};
use superspecial::reduction::check_heegner;
use superspecial::search::{find_superspecial, parse_moduli_str, verify_certificate, Certificate};
use superspecial::table::{regenerate_table, HeegnerTable, TABLE_ENV};
use superspecial::Error;

#[derive(Parser)]
#[command(name = "superspecial", version, about = "CM points on the Shimura curve of discriminant 6 and superspecial primes")]
struct Cli {
    /// Machine-readable output, one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 50)]
    prec: u32,
    /// Heegner table file (overrides $SUPERSPECIAL_TABLE).
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1024)]
    height_cap: i64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class number, s(O_D), W″ and h′ of a discriminant.
    Classdata {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Compute the Heegner polynomial P_D.
    Cmpoly {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Structural checks of P_D against the reduction tables.
    Checks {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Search for a prime of superspecial reduction.
    Find {
        /// Minimal polynomial of j₀ in x, e.g. "x + 1/2".
        #[arg(long)]
        minpoly: String,
        /// [L : ℚ(j₀)].
        #[arg(long, default_value_t = 1)]
        degree_mult: u32,
        #[arg(long, default_value_t = 5000)]
        l_max: u64,
        /// Use this case instead of the automatic choice.
        #[arg(long)]
        case: Option<u8>,
        /// Primes the certificate must not name (repeatable).
        #[arg(long)]
        exclude: Vec<String>,
        /// Write the certificate here instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a certificate from scratch.
    Verify {
        path: PathBuf,
        /// Also require the certificate to be about this j₀.
        #[arg(long)]
        minpoly: Option<String>,
    },
    /// Unit-log statistics of primes split in ℚ(√2) and ℚ(√6).
    Equidist {
        #[arg(default_value_t = 1000)]
        bound: u64,
    },
    /// Recompute the Heegner table.
    RegenTable {
        /// Output file; defaults to standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Discriminants to include (repeatable); defaults to those already tabulated.
        #[arg(long = "disc", allow_hyphen_values = true)]
        discs: Vec<i64>,
    },
}

/// Outcome of a command: checks passed or not.
type Outcome = superspecial::Result<bool>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(match e {
                Error::InvalidInput(_) | Error::Parse { .. } => 2,
                _ => 1,
            })
        }
    }
}

fn config(cli: &Cli) -> superspecial::Result<Config> {
    let cfg = Config {
        precision: cli.prec,
        height_cap: cli.height_cap,
        table_path: cli.table.clone(),
        emit_json: cli.json,
        ..Config::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Outcome {
    let mut cfg = config(cli)?;
    match &cli.cmd {
        Cmd::Classdata { d } => classdata(*d, cli.json),
        Cmd::Cmpoly { d } => cmpoly(*d, &cfg),
        Cmd::Checks { d } => checks(*d, &cfg),
        Cmd::Find { minpoly, degree_mult, l_max, case, exclude, out } => {
            cfg.l_max = *l_max;
            cfg.force_case = *case;
            cfg.exclude = exclude
                .iter()
                .map(|p| p.parse::<Integer>().map_err(|_| Error::InvalidInput(format!("bad prime `{p}`"))))
                .collect::<superspecial::Result<_>>()?;
            cfg.validate()?;
            find(minpoly, *degree_mult, &cfg, out.as_ref())
        }
        Cmd::Verify { path, minpoly } => verify(path, minpoly.as_deref(), &cfg),
        Cmd::Equidist { bound } => equidist(*bound, cli.json),
        Cmd::RegenTable { out, discs } => regen(&cfg, out.as_ref(), discs),
    }
}

fn table_of(cfg: &Config) -> superspecial::Result<HeegnerTable> {
    HeegnerTable::resolve(cfg.table_path.as_deref())
}

fn anchor(d: i64) -> Option<&'static str> {
    match d {
        -3 => Some("order-6 elliptic point, j = ∞ (t = ∞)"),
        -4 => Some("order-4 elliptic point, j = 0 (t = 1)"),
        -24 => Some("order-2 elliptic point, j = −16/27 (t = 0)"),
        _ => None,
    }
}

fn classdata(d: i64, as_json: bool) -> Outcome {
    let q = quad_order_data(d)?;
    let family = Family::from_disc(d);
    let parity = match family {
        Some((f, l)) => Some((f, parity_check(f, l)?)),
        None => None,
    };
    let consistent = !matches!(parity, Some((_, Parity::Violation(_))));
    let notice = if let Some(a) = anchor(d) {
        format!("anchor point: {a}; not used as a P_D input")
    } else if !q.has_cm_points() {
        "no CM points on E₆".to_string()
    } else {
        String::new()
    };
    if as_json {
        let row = json!({
            "D": d,
            "data": q,
            "parity_row": family.map(|(f, _)| f.label()),
            "parity": parity.as_ref().map(|(_, p)| match p {
                Parity::Consistent => "consistent".to_string(),
                Parity::Violation(v) => v.clone(),
            }),
            "notice": notice,
        });
        println!("{row}");
    } else {
        println!("D = {d}  (fundamental {}, conductor {})", q.d0, q.conductor);
        println!("  h      = {}", q.h);
        println!("  (O/2)  = {:>2}   (O/3) = {:>2}", q.eichler_2, q.eichler_3);
        println!("  s      = {}", q.s);
        println!("  #W″    = {}", q.w2_size);
        println!("  h′     = {}", q.h_prime);
        if !q.h_prime_integral {
            println!("  h′ is not an integer");
        } else if let Some(hp) = q.h_prime_usize() {
            println!("  parity = {}", if hp % 2 == 1 { "odd" } else { "even" });
        }
        match &parity {
            Some((f, Parity::Consistent)) => println!("  parity table row {}: table-consistent", f.label()),
            Some((f, Parity::Violation(v))) => println!("  parity table row {}: VIOLATION ({v})", f.label()),
            None => println!("  not in a tabulated family"),
        }
        if !notice.is_empty() {
            println!("  {notice}");
        }
    }
    Ok(consistent)
}

fn cmpoly(d: i64, cfg: &Config) -> Outcome {
    if let Some(a) = anchor(d) {
        return Err(Error::InvalidInput(format!("D = {d} is an anchor point ({a})")));
    }
    let order = build_maximal_order()?;
    let p = heegner_poly(&order, d, cfg.heegner_options())?;
    if cfg.emit_json {
        println!("{}", serde_json::to_string(&p)?);
        return Ok(true);
    }
    println!("P_{d}(x) = {}", p.poly());
    println!("  h′ = {}, b = {}", p.hprime, p.b);
    println!("  coefficients (constant first): {}", join(&p.coeffs));
    println!("  confirmed at {} digits, embeddings searched to height {}", p.digits, p.height);
    for (k, (re, im)) in p.roots.iter().enumerate() {
        println!("  j_{k} ≈ {re:.12} {} {:.12}i", if *im < 0.0 { "-" } else { "+" }, im.abs());
    }
    print_iota(&order, cfg.precision);
    Ok(true)
}

fn print_iota(order: &Order, digits: u32) {
    let prec = superspecial::cm::digits_to_bits(digits);
    println!("  splitting ι∞ (fingerprint {}):", iota_fingerprint());
    let named = [("i", Quaternion::i()), ("j", Quaternion::j()), ("μ", order.mu.clone())];
    for (name, q) in named {
        let m = iota_inf(&q, prec);
        let e = |x: &rug::Float| format!("{:>16.12}", x.to_f64());
        println!("    ι∞({name}) = [[{} {}] [{} {}]]", e(&m.a), e(&m.b), e(&m.c), e(&m.d));
    }
}

fn join(v: &[Integer]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn checks(d: i64, cfg: &Config) -> Outcome {
    let order = build_maximal_order()?;
    let table = table_of(cfg)?;
    let entry = table.fetch_or_compute(&order, d, cfg.heegner_options())?;
    let report = check_heegner(d, &entry.coeffs)?;
    let mut out = std::io::stdout().lock();
    if cfg.emit_json {
        for row in &report.rows {
            writeln!(out, "{}", json!({ "D": d, "table_hash": entry.hash(), "row": row }))?;
        }
    } else {
        writeln!(out, "P_{d}: {} (table {}, {} digits)", entry.poly(), &entry.hash()[..16], entry.prec)?;
        let w = report.rows.iter().map(|r| r.check.chars().count()).max().unwrap_or(0);
        for r in &report.rows {
            let pad = " ".repeat(w - r.check.chars().count());
            writeln!(
                out,
                "  {}{pad}  {}  observed {}  expected {}  [{}]",
                r.check,
                if r.pass { "PASS" } else { "FAIL" },
                r.observed,
                r.expected,
                r.source
            )?;
        }
    }
    Ok(report.all_pass())
}

fn find(minpoly: &str, e: u32, cfg: &Config, out: Option<&PathBuf>) -> Outcome {
    let order = build_maximal_order()?;
    let table = table_of(cfg)?;
    let input = parse_moduli_str(minpoly, e)?;
    let res = find_superspecial(&input, cfg, &table, &order)?;
    let text = res.certificate.to_json();
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None if cfg.emit_json => println!("{}", serde_json::to_string(&res.certificate)?),
        None => println!("{text}"),
    }
    let c = &res.certificate;
    let summary = format!(
        "case {} (hypotheses {:?}), D = {}, l = {}, p = {}; {} of {} candidates tried",
        c.case, res.selection.trace.conditions, c.d, c.l, c.p, res.stats.tried, res.stats.candidates
    );
    if cfg.emit_json {
        if out.is_some() {
            println!("{}", json!({ "case": c.case, "D": c.d, "l": c.l, "p": c.p, "stats": res.stats, "notes": res.notes }));
        }
    } else {
        eprintln!("{summary}");
        for (why, n) in &res.stats.rejected {
            eprintln!("  rejected {n}: {why}");
        }
        for note in &res.notes {
            eprintln!("  note: {note}");
        }
    }
    Ok(true)
}

fn verify(path: &PathBuf, minpoly: Option<&str>, cfg: &Config) -> Outcome {
    let text = std::fs::read_to_string(path)?;
    let cert = Certificate::from_json(&text).map_err(|e| Error::InvalidInput(format!("not a certificate: {e}")))?;
    let input = minpoly.map(|m| parse_moduli_str(m, cert.degree_mult)).transpose()?;
    let order = build_maximal_order()?;
    let table = table_of(cfg)?;
    let v = verify_certificate(&cert, input.as_ref(), &table, &order, cfg);
    if cfg.emit_json {
        println!("{}", serde_json::to_string(&v)?);
    } else if v.pass {
        println!("certificate OK: p = {} is a prime of superspecial reduction (case {}, D = {})", cert.p, cert.case, cert.d);
    } else {
        println!("certificate REJECTED");
        for r in &v.reasons {
            println!("  {r}");
        }
    }
    Ok(v.pass)
}

fn equidist(bound: u64, as_json: bool) -> Outcome {
    let units: Vec<_> = [2, 3, 6].into_iter().map(fundamental_unit).collect();
    let eq = equidist_diagnostic(bound)?;
    if as_json {
        for u in &units {
            println!("{}", json!({ "unit": u }));
        }
        for p in &eq.pairs {
            println!("{}", serde_json::to_string(p)?);
        }
        println!("{}", json!({ "bound": eq.bound, "primes": eq.pairs.len(), "discrepancy": eq.discrepancy }));
    } else {
        for u in &units {
            println!("ε(√{}) = {} + {}√{}   (norm {})", u.m, u.a, u.b, u.m, u.norm());
        }
        println!("{:>8}  {:>12}  {:>12}", "l", "u₁", "u₃");
        for p in &eq.pairs {
            println!("{:>8}  {:>12.8}  {:>12.8}", p.l, p.u1, p.u3);
        }
        println!("{} primes below {}; star discrepancy {:.6}", eq.pairs.len(), eq.bound, eq.discrepancy);
    }
    Ok(true)
}

fn regen(cfg: &Config, out: Option<&PathBuf>, discs: &[i64]) -> Outcome {
    let order = build_maximal_order()?;
    let ds = if discs.is_empty() { table_of(cfg)?.discriminants() } else { discs.to_vec() };
    let table = regenerate_table(&order, &ds, cfg.heegner_options(), out.map(|p| p.as_path()))?;
    if out.is_none() {
        print!("{}", table.render());
    }
    let failed: Vec<i64> = ds.iter().copied().filter(|d| table.get(*d).is_none_or(|e| !e.is_ok())).collect();
    if !failed.is_empty() {
        eprintln!("{} entries failed: {failed:?} (set {TABLE_ENV} to use a different table)", failed.len());
    }
    Ok(failed.is_empty())
}
