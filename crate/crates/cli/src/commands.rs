//! Subcommands and their JSON output. Every command prints one JSON object
//! with sorted keys and a `schema_version` field.

use crate::cache::{Cache, JobSpec, SCHEMA_VERSION};
use crate::corpus::{bundled_curves, read_curves, scan, CORPUS_DISCS, CORPUS_PRIMES};
use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use mulab_core::brandt::{matrix_to_i64, xi_exponent, BrandtModule};
use mulab_core::invariants::{
    check_cr, split_level, tamagawa_exponent, EllipticCurve, QuadraticField, DEFAULT_SAMPLING_BOUND,
};
use mulab_core::modsym::{build_space, EigenformPacket};
use mulab_core::theta::{mu_lambda, norm_relation_check, to_t_poly, ThetaTower};
use mulab_core::verify::{
    admissible_primes, definite_data, packet_for_curve, triple_tower, verify_level_lowering,
    verify_level_lowering_all_orders, verify_mu_main_conjecture, GatedTower, HypothesisCheck, ReportVerdict, Resources,
};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "mulab", version, about = "Exact invariants of weight-2 newforms and checks of their identities")]
pub struct Cli {
    /// Bypass the disk cache entirely.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// N = N⁺N⁻ according to the splitting of primes in K.
    SplitLevel {
        #[arg(long = "N")]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// ord_p η_f(N₁, N₂) with N₁ = N/N₂.
    Eta {
        #[arg(long = "N")]
        n: u64,
        #[arg(long = "N2", default_value_t = 1)]
        n2: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
    },
    /// ξ_f(N⁺,N⁻) = ⟨g_f, g_f⟩ and its p-adic valuation.
    Xi {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        p: u64,
    },
    /// Class set, weights and Brandt matrices of the Eichler order of level N⁺.
    Brandt {
        #[arg(long = "Nplus", default_value_t = 1)]
        n_plus: u64,
        #[arg(long = "Nminus")]
        n_minus: u64,
        /// Brandt matrices to print.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        ell: Vec<u64>,
    },
    /// t_f(ℓ) = ord_p(ord_ℓ Δ_min).
    Tamagawa {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        p: u64,
    },
    /// Hypothesis CR relative to N⁻ (given directly or induced by --disc).
    CheckCr {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<i64>,
        #[arg(long = "Nminus")]
        n_minus: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLING_BOUND)]
        bound: u64,
    },
    /// Theta elements θ_0..θ_n with μ, λ and norm relations.
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// μ and λ of a polynomial in T (or of a group-ring element with --group).
    MuLambda {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<String>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long)]
        group: bool,
    },
    /// Admissible primes ℓ ≤ bound for layer n.
    Admissible {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 100)]
        bound: u64,
    },
    /// ord_p η_f(N) − ord_p ξ_f(N⁺,N⁻) = Σ_{q|N⁻} t_f(q).
    VerifyMu {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        p: u64,
    },
    /// Level-lowering identity along a chain of primes moved into N₂.
    VerifyLevellower {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long, value_delimiter = ',')]
        chain: Vec<u64>,
        #[arg(long)]
        p: u64,
        /// Check every ordering of the chain.
        #[arg(long)]
        all_orders: bool,
    },
    /// CR-certified triples (E, K, p) in a curve file.
    CorpusScan {
        /// Defaults to the bundled corpus.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        discs: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long, default_value_t = 200)]
        max_conductor: u64,
    },
}

/// Exit status and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Resources backed by the disk cache.
pub struct CachedResources<'a> {
    pub cache: &'a Cache,
}

impl Resources for CachedResources<'_> {
    fn packet(&self, e: &EllipticCurve) -> mulab_core::Result<EigenformPacket> {
        let spec = JobSpec::new("packet", json!({"conductor": e.conductor, "curve": e.input}));
        lift(self.cache.get_or_compute(&spec, || Ok(packet_for_curve(e)?)))
    }

    fn brandt(&self, n_plus: u64, n_minus: u64) -> mulab_core::Result<BrandtModule> {
        let spec = JobSpec::new("brandt", json!({"Nplus": n_plus, "Nminus": n_minus}));
        lift(self.cache.get_or_compute(&spec, || Ok(mulab_core::brandt::ideal_class_module(n_plus, n_minus)?)))
    }

    fn eta(&self, f: &EigenformPacket, n1: u64, n2: u64, p: u64) -> mulab_core::Result<u32> {
        let spec = JobSpec::new("eta", json!({"packet": f.label, "level": f.level, "N1": n1, "N2": n2, "p": p}));
        lift(self.cache.get_or_compute(&spec, || Ok(mulab_core::hecke::congruence_exponent(f, n1, n2, p)?.exponent)))
    }
}

/// Back to the library error type, keeping library errors intact.
fn lift<T>(r: Result<T>) -> mulab_core::Result<T> {
    r.map_err(|e| match e.downcast::<mulab_core::Error>() {
        Ok(core) => core,
        Err(other) => mulab_core::Error::InvalidInput(other.to_string()),
    })
}

fn parse_curve(s: &str) -> Result<EllipticCurve> {
    Ok(EllipticCurve::parse(s)?)
}

fn big_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn bigs_json(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big_json).collect())
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn finish(v: Value) -> Value {
    let mut obj = match v {
        Value::Object(m) => m,
        other => {
            let mut m = serde_json::Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    Value::Object(obj)
}

fn cached_tower(
    cache: &Cache,
    res: &CachedResources,
    e: &EllipticCurve,
    k: &QuadraticField,
    p: u64,
    n: u32,
) -> Result<GatedTower> {
    let spec = JobSpec::new("theta", json!({"curve": e.input, "conductor": e.conductor, "disc": k.disc, "p": p, "n": n}));
    cache.get_or_compute(&spec, || Ok(triple_tower(e, k, p, n, false, res)?))
}

fn theta_json(tower: &ThetaTower, hyps: &[HypothesisCheck]) -> Result<Value> {
    let p = tower.p;
    let supersingular = tower.ap % p as i64 == 0;
    let mut layers = Vec::new();
    for n in 0..tower.layers.len() as u32 {
        let th = tower.element(n);
        let inv = th.invariants();
        let mut entry = json!({
            "layer": n,
            "coefficients": bigs_json(&th.coefficients),
            "mu": inv.mu,
            "lambda": inv.lambda,
        });
        if supersingular {
            entry["signed"] = to_value(&th.signed_invariants());
        }
        if n >= 1 {
            entry["exact_relation"] = json!(tower.exact_relation(n));
            if !supersingular || n >= 2 {
                entry["norm_relation"] = to_value(&norm_relation_check(tower, n, 2)?);
            }
        }
        layers.push(entry);
    }
    Ok(json!({
        "packet": tower.packet,
        "disc": tower.disc_k,
        "p": p,
        "ap": tower.ap,
        "base": big_json(&tower.base),
        "fiber": tower.fiber,
        "layers": layers,
        "hypotheses": hyps,
    }))
}

fn execute(cmd: Command, cache: &Cache) -> Result<Value> {
    let res = CachedResources { cache };
    Ok(match cmd {
        Command::SplitLevel { n, disc } => {
            let s = split_level(n, &QuadraticField::new(disc)?)?;
            json!({"Nplus": s.n_plus, "Nminus": s.n_minus, "parity": s.parity()})
        }
        Command::Eta { n, n2, p, curve } => {
            let e = parse_curve(&curve)?;
            if e.conductor != n {
                bail!(mulab_core::Error::InvalidInput(format!("curve has conductor {}, not {n}", e.conductor)));
            }
            if n % n2 != 0 {
                bail!(mulab_core::Error::InvalidInput(format!("N2={n2} does not divide N={n}")));
            }
            let f = res.packet(&e)?;
            let exponent = res.eta(&f, n / n2, n2, p)?;
            json!({"exponent": exponent, "N1": n / n2, "N2": n2, "p": p, "packet": f.label})
        }
        Command::Xi { curve, disc, p } => {
            let e = parse_curve(&curve)?;
            let k = QuadraticField::new(disc)?;
            let split = split_level(e.conductor, &k)?;
            split.require_definite()?;
            let d = definite_data(&e, &split, &res)?;
            json!({
                "Nplus": split.n_plus,
                "Nminus": split.n_minus,
                "xi": big_json(&d.g.self_pairing()),
                "exponent": xi_exponent(&d.g, p),
                "g": bigs_json(&d.g.vector),
                "weights": d.g.weights,
                "class_number": d.module.class_number(),
            })
        }
        Command::Brandt { n_plus, n_minus, ell } => {
            let m = res.brandt(n_plus, n_minus)?;
            let matrices: serde_json::Map<String, Value> =
                ell.iter().map(|&l| (l.to_string(), json!(matrix_to_i64(&m.brandt_matrix(l))))).collect();
            json!({
                "Nplus": n_plus,
                "Nminus": n_minus,
                "class_number": m.class_number(),
                "weights": m.weights,
                "mass": m.mass().to_string(),
                "matrices": matrices,
            })
        }
        Command::Tamagawa { curve, ell, p } => to_value(&tamagawa_exponent(&parse_curve(&curve)?, ell, p)?),
        Command::CheckCr { curve, p, disc, n_minus, bound } => {
            let e = parse_curve(&curve)?;
            let nm = match (disc, n_minus) {
                (_, Some(m)) => m,
                (Some(d), None) => split_level(e.conductor, &QuadraticField::new(d)?)?.n_minus,
                (None, None) => bail!(mulab_core::Error::InvalidInput("give --Nminus or --disc".into())),
            };
            to_value(&check_cr(&e, nm, p, bound)?)
        }
        Command::Theta { curve, disc, p, n } => {
            let e = parse_curve(&curve)?;
            let k = QuadraticField::new(disc)?;
            match cached_tower(cache, &res, &e, &k, p, n)? {
                Ok((tower, hyps)) => theta_json(&tower, &hyps)?,
                Err(hyps) => json!({"verdict": ReportVerdict::Skipped, "hypotheses": hyps}),
            }
        }
        Command::MuLambda { coeffs, p, precision, group } => {
            let c: Vec<BigInt> = coeffs
                .iter()
                .map(|s| s.trim().parse::<BigInt>().map_err(|_| anyhow!(mulab_core::Error::InvalidInput(format!("bad coefficient {s:?}")))))
                .collect::<Result<_>>()?;
            let poly = if group { to_t_poly(&c) } else { c };
            to_value(&mu_lambda(&poly, p, precision))
        }
        Command::Admissible { curve, disc, p, n, bound } => {
            let e = parse_curve(&curve)?;
            let k = QuadraticField::new(disc)?;
            let mut f = res.packet(&e)?;
            f.extend(&build_space(e.conductor)?, bound);
            json!({"primes": admissible_primes(&f, &k, p, n, bound)?, "bound": bound, "layer": n})
        }
        Command::VerifyMu { curve, disc, p } => {
            let e = parse_curve(&curve)?;
            to_value(&verify_mu_main_conjecture(&e, &QuadraticField::new(disc)?, p, &res)?)
        }
        Command::VerifyLevellower { curve, chain, p, all_orders } => {
            let e = parse_curve(&curve)?;
            if all_orders {
                json!({"reports": verify_level_lowering_all_orders(&e, &chain, p, &res)?})
            } else {
                to_value(&verify_level_lowering(&e, &chain, p, &res)?)
            }
        }
        Command::CorpusScan { file, discs, primes, max_conductor } => {
            let curves = match file {
                Some(path) => read_curves(&path)?,
                None => bundled_curves(),
            };
            let discs = discs.unwrap_or(CORPUS_DISCS.to_vec());
            let primes = primes.unwrap_or(CORPUS_PRIMES.to_vec());
            let triples = scan(&curves, &discs, &primes, max_conductor);
            json!({"count": triples.len(), "triples": triples})
        }
    })
}

fn error_json(err: &anyhow::Error) -> Value {
    let kind = match err.downcast_ref::<mulab_core::Error>() {
        Some(mulab_core::Error::InvalidInput(_)) => "invalid_input",
        Some(mulab_core::Error::PacketNotInSpace) => "packet_not_in_space",
        Some(mulab_core::Error::JlTransferFailed) => "jl_transfer_failed",
        Some(mulab_core::Error::ClassSetIncomplete(_)) => "class_set_incomplete",
        Some(mulab_core::Error::NotOrdinary) => "not_ordinary",
        Some(mulab_core::Error::BudgetExceeded(_)) => "budget_exceeded",
        Some(mulab_core::Error::Hypothesis(_)) => "hypothesis",
        None => "internal",
    };
    json!({"error": {"kind": kind, "message": format!("{err:#}")}})
}

/// Parse and run one invocation (`argv[0]` is the program name).
pub fn run_with_cache(argv: &[String], cache: &Cache) -> Outcome {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let disabled = Cache::disabled();
    let cache = if cli.no_cache { &disabled } else { cache };
    let (code, value) = match execute(cli.command, cache) {
        Ok(v) => (0, finish(v)),
        Err(err) => (1, finish(error_json(&err))),
    };
    let mut stdout = serde_json::to_string_pretty(&value).expect("JSON value serializes");
    stdout.push('\n');
    Outcome { code, stdout, stderr: String::new() }
}

/// Run with the cache named by MULAB_CACHE.
pub fn run(argv: &[String]) -> Outcome {
    run_with_cache(argv, &Cache::from_env())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("mulab".to_string()).chain(shell_split(s)).collect()
    }

    /// Whitespace split honouring double quotes.
    fn shell_split(s: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = String::new();
        let mut quoted = false;
        for ch in s.chars() {
            match ch {
                '"' => quoted = !quoted,
                c if c.is_whitespace() && !quoted => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }

    fn json_of(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn split_level_output() {
        let o = run_with_cache(&args("split-level --N 14 --disc -3"), &Cache::disabled());
        assert_eq!(o.code, 0);
        assert_eq!(json_of(&o), json!({"Nplus": 7, "Nminus": 2, "parity": "odd", "schema_version": 1}));
    }

    #[test]
    fn eta_level_11() {
        let o = run_with_cache(&args("eta --N 11 --N2 1 --p 7 --curve \"11:0 -1 1 -10 -20\""), &Cache::disabled());
        assert_eq!(o.code, 0, "{}", o.stdout);
        assert_eq!(json_of(&o)["exponent"], json!(0));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_with_cache(&args("frobnicate"), &Cache::disabled()).code, 2);
        assert_eq!(run_with_cache(&args("split-level --N 14"), &Cache::disabled()).code, 2);
    }

    #[test]
    fn library_errors_exit_1() {
        let o = run_with_cache(&args("split-level --N 21 --disc -7"), &Cache::disabled());
        assert_eq!(o.code, 1);
        assert_eq!(json_of(&o)["error"]["kind"], json!("hypothesis"));
    }

    #[test]
    fn skipped_reports_exit_0() {
        let o = run_with_cache(&args("verify-mu --curve \"11:0 -1 1 -10 -20\" --disc -3 --p 5"), &Cache::disabled());
        assert_eq!(o.code, 0);
        assert_eq!(json_of(&o)["verdict"], json!("skipped"));
    }

    #[test]
    fn mu_lambda_example() {
        let o = run_with_cache(&args("mu-lambda --coeffs 5,5,0,1 --p 5 --precision 4"), &Cache::disabled());
        let v = json_of(&o);
        assert_eq!(v["mu"], json!({"exact": 0}));
        assert_eq!(v["lambda"], json!(3));
    }
}
