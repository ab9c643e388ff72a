//! Command-line front end.
//!
//! Session flags (`--p`, `--q`, `--precision`, `--level`) validate into a
//! [`Config`] before any command runs. Payload inputs come from file paths
//! or `-` for standard input. Outputs are deterministic: stdout carries the
//! payload only, and the version header goes to stderr so that JSON and CSV
//! remain machine-readable.
//!
//! Exit codes: 0 success, 1 a verification or witness check failed,
//! 2 malformed input or configuration.

use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num::bigint::BigInt;
use num::rational::BigRational;

use pqfourier::base::{parse_zp_point, Config, ZpPoint};
use pqfourier::cyclo::{parse_ratio, CycloNum};
use pqfourier::dual::enumerate_ball;
use pqfourier::error::Error;
use pqfourier::fourier::{
    conv_dual, conv_zp, fourier_fwd, fourier_inv, haar_integral, lcfn_eq, parseval,
    pointwise_mul, LCFn,
};
use pqfourier::measures::{
    aq_partial_closed, mu_tilde, rational_qval, MeasureHat,
};
use pqfourier::qadic::FieldCtx;
use pqfourier::value::{Backend, ExactBackend};
use pqfourier::wire::{
    combo_from_wire, dualfn_from_wire, dualfn_to_wire, lcfn_from_wire, lcfn_to_wire,
    measure_from_wire, witness_to_wire, wtt_report_to_wire, ComboEntryWire, DualFnWire, LCFnWire,
    MeasureWire,
};
use pqfourier::wtt::{
    lemma_estimates_check, nondensity_witness, value_attainment_scan, wtt_continuous_check,
};

#[derive(Parser)]
#[command(name = "pqfourier", version, about = "Exact (p,q)-adic Fourier analysis")]
struct Cli {
    /// Base prime p (the group side).
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    /// Value prime q (the coefficient side), distinct from p.
    #[arg(long, global = true, default_value_t = 5)]
    q: u32,
    /// Absolute q-adic precision (digits of q).
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// Largest conductor exponent used by this session.
    #[arg(long, global = true, default_value_t = 8)]
    level: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Zp,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the pinned embedding data for the session conductor.
    FieldInfo,
    /// Forward transform of a locally constant function (JSON in/out).
    Transform {
        /// Input path or `-` for stdin.
        #[arg(default_value = "-")]
        input: String,
    },
    /// Inverse transform of a finitely supported dual function.
    Inverse {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Convolve two functions in the chosen domain.
    Convolve {
        #[arg(long, value_enum)]
        domain: Domain,
        a: String,
        b: String,
    },
    /// Run a named identity suite; exits 1 with a counterexample on failure.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Partial-sum table of the product-formula measure at a point.
    Aq {
        /// Evaluation point (integer, or pre:period digits; -1 is `:1`).
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Number of rows (levels 0..N-1).
        #[arg(long = "N")]
        n: u32,
        #[arg(long, value_enum, default_value = "csv")]
        emit: Emit,
    },
    /// Finite-level continuous-theorem report for a function (JSON in/out).
    WttCheck {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Non-density certificate for a measure at a point.
    Witness {
        /// Measure JSON (path or `-`).
        measure: String,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        /// Combo JSON: `[{"coeff":"2","shift":"1/4"}, ...]`.
        #[arg(long)]
        combo: String,
    },
    /// Value-attainment scan over candidate points.
    Scan {
        /// Measure JSON (path or `-`).
        measure: String,
        /// The value c to scan for.
        #[arg(long, allow_hyphen_values = true)]
        value: String,
        /// Comma-separated candidate points.
        #[arg(long, allow_hyphen_values = true)]
        candidates: String,
        #[arg(long = "N", default_value_t = 12)]
        n_max: u32,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure { code: 2, msg: msg.into() }
    }
    fn check(msg: impl Into<String>) -> Failure {
        Failure { code: 1, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_) | Error::InvalidConfig(_) | Error::ConductorTooLarge { .. } => {
                Failure::input(e.to_string())
            }
            other => Failure::check(other.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("reading {path}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(raw: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(raw).map_err(|e| {
        Failure::input(format!("malformed {what} JSON at line {}, column {}: {e}", e.line(), e.column()))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("pqfourier {}", env!("CARGO_PKG_VERSION"));
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = Config::new(cli.p, cli.q, cli.precision, cli.level).map_err(Failure::from)?;
    let xb = ExactBackend::new(cfg.p);
    match cli.cmd {
        Cmd::FieldInfo => {
            let ctx = FieldCtx::setup(&cfg, cfg.max_level)?;
            ctx.verify()?;
            let g: Vec<String> = ctx.minpoly().iter().map(|c| c.to_string()).collect();
            let out = serde_json::json!({
                "p": cfg.p,
                "q": cfg.q,
                "conductor_exp": ctx.conductor_exp(),
                "precision": ctx.precision(),
                "degree": ctx.degree(),
                "minpoly": g,
                "certificates": "verified",
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::Transform { input } => {
            let w: LCFnWire = parse_json(&read_input(&input)?, "function")?;
            let f = lcfn_from_wire(&xb, &w)?;
            if f.level() > cfg.max_level {
                return Err(Failure::input(format!(
                    "function level {} exceeds session --level {}",
                    f.level(),
                    cfg.max_level
                )));
            }
            let out = dualfn_to_wire(&fourier_fwd(&xb, &f));
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::Inverse { input } => {
            let w: DualFnWire = parse_json(&read_input(&input)?, "dual function")?;
            let f = dualfn_from_wire(&xb, &w)?;
            if f.max_denom_exp() > cfg.max_level {
                return Err(Failure::input("support exceeds session --level"));
            }
            let out = lcfn_to_wire(&fourier_inv(&xb, &f));
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Cmd::Convolve { domain, a, b } => match domain {
            Domain::Zp => {
                let fa = lcfn_from_wire(&xb, &parse_json(&read_input(&a)?, "function")?)?;
                let fb = lcfn_from_wire(&xb, &parse_json(&read_input(&b)?, "function")?)?;
                let out = lcfn_to_wire(&conv_zp(&xb, &fa, &fb));
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            }
            Domain::Dual => {
                let fa = dualfn_from_wire(&xb, &parse_json(&read_input(&a)?, "dual function")?)?;
                let fb = dualfn_from_wire(&xb, &parse_json(&read_input(&b)?, "dual function")?)?;
                let out = dualfn_to_wire(&conv_dual(&xb, &fa, &fb));
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            }
        },
        Cmd::Verify { suite } => run_suite(&cfg, &suite)?,
        Cmd::Aq { z, n, emit } => {
            if cfg.p != 2 {
                return Err(Failure::input("the aq table requires --p 2"));
            }
            if n > 60 {
                return Err(Failure::input("--N over 60 exceeds exact digit range"));
            }
            let z = parse_zp_point(&z, cfg.p)?;
            let rows: Vec<(u32, BigRational, Option<i64>)> = (0..n)
                .map(|k| {
                    let s = aq_partial_closed(cfg.q, &z, k);
                    let inc = aq_partial_closed(cfg.q, &z, k + 1) - &s;
                    (k, s, rational_qval(cfg.q, &inc))
                })
                .collect();
            match emit {
                Emit::Csv => {
                    println!("z,N,value_num,value_den,increment_valuation");
                    for (k, s, v) in rows {
                        let vs = v.map_or("inf".to_string(), |x| x.to_string());
                        println!("{z},{k},{},{},{vs}", s.numer(), s.denom());
                    }
                }
                Emit::Json => {
                    let arr: Vec<_> = rows
                        .iter()
                        .map(|(k, s, v)| {
                            serde_json::json!({
                                "z": z.to_string(),
                                "N": k,
                                "value_num": s.numer().to_string(),
                                "value_den": s.denom().to_string(),
                                "increment_valuation": v,
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&arr).unwrap());
                }
            }
        }
        Cmd::WttCheck { input } => {
            let w: LCFnWire = parse_json(&read_input(&input)?, "function")?;
            let f = lcfn_from_wire(&xb, &w)?;
            let rep = wtt_continuous_check(&xb, &f)?;
            println!("{}", serde_json::to_string_pretty(&wtt_report_to_wire(&rep)).unwrap());
        }
        Cmd::Witness { measure, z0, combo } => {
            let mw: MeasureWire = parse_json(&read_input(&measure)?, "measure")?;
            let cw: Vec<ComboEntryWire> = parse_json(&read_input(&combo)?, "combo")?;
            let ctx = Arc::new(FieldCtx::setup(&cfg, cfg.max_level)?);
            let eb = ExactBackend::with_embedding(ctx);
            let mu = measure_from_wire(&eb, &mw)?;
            let combo = combo_from_wire(&eb, &cw)?;
            let z0 = parse_zp_point(&z0, cfg.p)?;
            let w = nondensity_witness(&eb, cfg.q, &mu, &z0, &combo)?;
            let verdict = w.verdict;
            println!("{}", serde_json::to_string_pretty(&witness_to_wire(&w)).unwrap());
            if !verdict {
                return Err(Failure::check("witness verdict false"));
            }
        }
        Cmd::Scan { measure, value, candidates, n_max, emit } => {
            let mw: MeasureWire = parse_json(&read_input(&measure)?, "measure")?;
            let ctx = Arc::new(FieldCtx::setup(&cfg, cfg.max_level)?);
            let eb = ExactBackend::with_embedding(ctx);
            let mu = measure_from_wire(&eb, &mw)?;
            let c = CycloNum::from_ratio(cfg.p, parse_ratio(&value)?);
            let pts = candidates
                .split(',')
                .map(|s| parse_zp_point(s.trim(), cfg.p))
                .collect::<Result<Vec<_>, _>>()?;
            let rep = value_attainment_scan(&eb, cfg.q, &mu, &c, &pts, n_max)?;
            match emit {
                Emit::Json => {
                    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
                }
                Emit::Csv => {
                    println!("z,attained,cauchy");
                    for row in &rep.rows {
                        let att = row
                            .attained
                            .map_or("no-qadic-limit".to_string(), |b| b.to_string());
                        println!("{},{att},{}", row.z, row.cauchy);
                    }
                }
            }
        }
    }
    Ok(())
}

/// A deterministic pseudo-random rational stream (plain LCG; test inputs
/// only need variety, not statistical quality).
struct Lcg(u64);

impl Lcg {
    fn next_u32(&mut self) -> u32 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 33) as u32
    }
    fn ratio(&mut self, q: u32) -> BigRational {
        let mut num = i64::from(self.next_u32() % 19) - 9;
        if num % i64::from(q) == 0 {
            num += 1;
        }
        let mut den = i64::from(self.next_u32() % 9) + 1;
        while den % i64::from(q) == 0 {
            den += 1;
        }
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

fn run_suite(cfg: &Config, suite: &str) -> Result<(), Failure> {
    let xb = ExactBackend::new(cfg.p);
    match suite {
        "fourier" => {
            let level = cfg.max_level.min(3);
            let mut rng = Lcg(0xf0u64 + u64::from(cfg.p) * 131 + u64::from(cfg.q));
            let len = (cfg.p as usize).pow(level);
            for i in 0..12 {
                let mk = |rng: &mut Lcg| {
                    LCFn::new(&xb, level, (0..len).map(|_| xb.from_ratio(&rng.ratio(cfg.q))).collect())
                };
                let f = mk(&mut rng);
                let g = mk(&mut rng);
                let fh = fourier_fwd(&xb, &f);
                if !lcfn_eq(&xb, &fourier_inv(&xb, &fh), &f) {
                    println!("counterexample: {}", serde_json::to_string(&lcfn_to_wire(&f)).unwrap());
                    return Err(Failure::check(format!("round-trip failed at instance {i}")));
                }
                let lhs = fourier_fwd(&xb, &pointwise_mul(&xb, &f, &g));
                let rhs = conv_dual(&xb, &fh, &fourier_fwd(&xb, &g));
                if lhs != rhs {
                    println!("counterexample: {}", serde_json::to_string(&lcfn_to_wire(&f)).unwrap());
                    return Err(Failure::check(format!("homomorphism failed at instance {i}")));
                }
                if parseval(&xb, &f, &g) != haar_integral(&xb, &pointwise_mul(&xb, &f, &g)) {
                    println!("counterexample: {}", serde_json::to_string(&lcfn_to_wire(&f)).unwrap());
                    return Err(Failure::check(format!("parseval failed at instance {i}")));
                }
            }
            println!("round-trip OK, homomorphism OK, parseval OK");
        }
        "qadic" => {
            let ctx = FieldCtx::setup(cfg, cfg.max_level.min(4))?;
            ctx.verify()?;
            let mut rng = Lcg(0xad);
            for _ in 0..20 {
                let a = CycloNum::root(cfg.p, 2.min(ctx.conductor_exp()), i64::from(rng.next_u32() % 8))
                    .mul_ratio(&rng.ratio(cfg.q));
                let b = CycloNum::from_ratio(cfg.p, rng.ratio(cfg.q));
                let sum = ctx.from_exact(&a.add(&b))?;
                let lhs = ctx.add(&ctx.from_exact(&a)?, &ctx.from_exact(&b)?);
                if !ctx.eq_to_prec(&lhs, &sum) {
                    return Err(Failure::check("embedding is not additive"));
                }
                let prod = ctx.from_exact(&a.mul(&b))?;
                let lhs = ctx.mul(&ctx.from_exact(&a)?, &ctx.from_exact(&b)?);
                if !ctx.eq_to_prec(&lhs, &prod) {
                    return Err(Failure::check("embedding is not multiplicative"));
                }
            }
            println!("certificates OK, homomorphism OK");
        }
        "aq" => {
            if cfg.p != 2 {
                return Err(Failure::input("suite aq requires --p 2"));
            }
            let mu = MeasureHat::aq_product(&xb);
            let n_top = cfg.max_level.min(5);
            for n in 0..=n_top {
                for zres in 0..(1u64 << n) {
                    let z = ZpPoint::nat(zres);
                    let lit = mu_tilde(&xb, cfg.q, &mu, &z, n);
                    match lit.as_rational() {
                        Some(r) if r == aq_partial_closed(cfg.q, &z, n) => {}
                        _ => {
                            println!("counterexample: z={zres} N={n}");
                            return Err(Failure::check("partial-sum identity failed"));
                        }
                    }
                }
            }
            println!("partial-sum identity OK");
        }
        "wtt" => {
            // four-way agreement on an exhaustive sweep at level <= 2
            for level in 1..=cfg.max_level.min(2) {
                let dim = (cfg.p as u64).pow(level);
                let mut rng = Lcg(0x77);
                for pattern in 0..(1u64 << dim) {
                    let values: Vec<CycloNum> = (0..dim)
                        .map(|i| {
                            if pattern & (1 << i) != 0 {
                                xb.zero()
                            } else {
                                xb.from_ratio(&rng.ratio(cfg.q))
                            }
                        })
                        .collect();
                    let chi = LCFn::new(&xb, level, values);
                    let rep = wtt_continuous_check(&xb, &chi)?;
                    let zero_free = rep.zero_set.is_empty();
                    if zero_free != rep.circulant_rank_full
                        || zero_free != rep.inverse_transform.is_some()
                    {
                        println!("counterexample: {}", serde_json::to_string(&lcfn_to_wire(&chi)).unwrap());
                        return Err(Failure::check("four-way agreement failed"));
                    }
                }
            }
            // lemma estimates on deterministic pseudo-random instances
            let ctx = Arc::new(FieldCtx::setup(cfg, cfg.max_level.min(4))?);
            let eb = ExactBackend::with_embedding(ctx);
            let mut rng = Lcg(0x3c);
            for i in 0..40 {
                let n = rng.next_u32() % 3;
                let m = rng.next_u32() % 3;
                let mk = |exp: u32, rng: &mut Lcg| {
                    let ball = enumerate_ball(cfg.p, exp);
                    let mut f = pqfourier::fourier::DualFn::new();
                    for _ in 0..=(rng.next_u32() % 3) {
                        let t = ball[rng.next_u32() as usize % ball.len()];
                        let r = rng.ratio(cfg.q);
                        f.insert(&eb, t, eb.from_ratio(&r));
                    }
                    f
                };
                let phi = mk(n, &mut rng);
                let f = mk(3, &mut rng);
                let g = mk(m, &mut rng);
                let (one, two) = lemma_estimates_check(&eb, &phi, &f, &g, m, n)?;
                if !(one && two) {
                    return Err(Failure::check(format!("lemma estimate failed at instance {i}")));
                }
            }
            println!("four-way agreement OK, lemma estimates OK");
        }
        other => {
            return Err(Failure::input(format!(
                "unknown suite '{other}' (expected fourier, qadic, aq, or wtt)"
            )))
        }
    }
    Ok(())
}
