use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qgrass::cone::{cone_size_bound, small_generators, ConeEngine, ConeVariant, OrderedBasis};
use qgrass::expansion::{
    averaged_contraction_check, enumerate_minimal_connected, expansion_constant, restriction_inequality,
    small_set_bound_check,
};
use qgrass::homology::{cohomology_dims, homology_dims, homology_structure};
use qgrass::independence::{check_simplicial_cones, local_sparsity, ordered_face_count, IndependenceComplex};
use qgrass::random::{parse_grid, threshold_sweep};
use qgrass::special::{eta_explicit, eta_recursive, is_cycle, pairing_check, psi};
use qgrass::{Ambient, Chain, Field, ModRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_INCONSISTENT: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "qgrass", version, about = "Chains, cones and expansion on complete q-complexes")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homology (or cohomology) of Gr(F_q^n) over Z/m.
    Homology(HomologyArgs),
    /// Cone identity on random chains and cone sizes against f(k).
    ConeCheck(ConeArgs),
    /// The family {W - c_{b,∂W}} and its three certificates.
    SmallGenerators(Params),
    /// The cycle η_n in Gr(F_q^{2n}).
    Eta(EtaArgs),
    /// The signed sum ψ_n of maximal totally singular spaces.
    Psi(PsiArgs),
    /// Expansion constants and inequalities.
    Expansion(ExpansionArgs),
    /// Table of minimal connected cochains g_n(m, θ).
    Gtable(GtableArgs),
    /// Independence complex counts, simplicial cones and local sparsity.
    Indcomplex(IndArgs),
    /// Monte Carlo sweep of the random q-complex model.
    LmSweep(SweepArgs),
    /// Runs the acceptance suite.
    Repro(ReproArgs),
}

#[derive(Args)]
struct Params {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: u32,
    #[arg(long = "mod")]
    m: u32,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u32,
    #[arg(long = "mod")]
    m: u32,
    /// Compute cohomology from the transposed matrices.
    #[arg(long)]
    cohomology: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisChoice {
    Standard,
    Random,
}

#[derive(Args)]
struct ConeArgs {
    #[command(flatten)]
    p: Params,
    #[arg(long, default_value = "modular")]
    variant: ConeVariant,
    #[arg(long, value_enum, default_value = "random")]
    basis: BasisChoice,
    #[arg(long, default_value_t = 200)]
    chains: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also dump the cone of the chain in this JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct EtaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u32,
    #[arg(long = "mod")]
    m: u32,
    /// Comma-separated subset of explicit,recursive,boundary.
    #[arg(long, value_delimiter = ',', default_value = "explicit,recursive,boundary")]
    check: Vec<EtaCheck>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EtaCheck {
    Explicit,
    Recursive,
    Boundary,
}

#[derive(Args)]
struct PsiArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u32,
    #[arg(long = "mod")]
    m: u32,
    /// Also pair ψ_n with η_n.
    #[arg(long)]
    pairing: bool,
}

#[derive(Args)]
struct ExpansionArgs {
    #[command(flatten)]
    p: Params,
    /// Exact h_k by exhausting C^k.
    #[arg(long)]
    exact: bool,
    /// Visit one cochain per unit-scaling orbit in the exact scan.
    #[arg(long)]
    orbit: bool,
    /// Check the small-set inequality on this many random cochains.
    #[arg(long)]
    small_set: Option<usize>,
    /// Best constant of the line-level restriction inequality.
    #[arg(long)]
    restriction: bool,
    /// Averaged contraction inequality on this many random cochains.
    #[arg(long)]
    contraction: Option<usize>,
    /// Sample size when the restriction scan exceeds the budget.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GtableArgs {
    #[command(flatten)]
    p: Params,
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct IndArgs {
    #[arg(long)]
    n: usize,
    /// Face size for counts and local sparsity.
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: u32,
    /// Prime coefficient field for the connectivity test.
    #[arg(long)]
    coef: u32,
    /// start:stop:step, inclusive.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 500)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct ReproArgs {
    /// Run only these criteria (1-12).
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

/// Artifact text plus a pass/fail verdict.
struct Outcome {
    body: String,
    passed: bool,
}

fn json_outcome(v: Value, passed: bool) -> Result<Outcome> {
    Ok(Outcome {
        body: serde_json::to_string_pretty(&v)? + "\n",
        passed,
    })
}

fn verdict(name: &str, passed: bool) -> String {
    format!("{name}: {}", if passed { "PASS" } else { "FAIL" })
}

fn homology(a: &HomologyArgs) -> Result<Outcome> {
    let prime = qgrass::field::is_prime(a.m);
    let rep = match (a.cohomology, prime) {
        (false, true) => homology_dims(a.n, a.q, a.m)?,
        (true, true) => cohomology_dims(a.n, a.q, a.m)?,
        (false, false) => homology_structure(a.n, a.q, a.m)?,
        (true, false) => anyhow::bail!(qgrass::Error::NotPrime(a.m)),
    };
    eprintln!("{}", rep.verdict);
    let passed = rep.vanishing_pattern;
    json_outcome(serde_json::to_value(&rep)?, passed)
}

fn cone_check(a: &ConeArgs) -> Result<Outcome> {
    let Params { n, k, q, m } = a.p;
    let field = Field::new(q)?;
    let ring = ModRing::new(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let basis = match a.basis {
        BasisChoice::Standard => OrderedBasis::standard(n),
        BasisChoice::Random => OrderedBasis::random(&field, n, &mut rng),
    };
    let engine = ConeEngine::new(field, basis.clone(), ring, a.variant)?;
    let amb = Ambient::with_q(q, n)?;
    let level = amb.level(k)?;
    let mut failures = 0;
    for _ in 0..a.chains {
        let mut x = Chain::zero(n, k, ring);
        for _ in 0..rng.gen_range(1..=level.len().min(8)) {
            x.add_term(level[rng.gen_range(0..level.len())].clone(), rng.gen_range(1..m));
        }
        if !engine.cone_identity_defect(&x)?.is_empty() {
            failures += 1;
        }
    }
    let mut max_size = 0;
    for w in level {
        max_size = max_size.max(engine.cone_of(w)?.len());
    }
    let bound = cone_size_bound(k, q);
    let size_ok = num_bigint::BigUint::from(max_size) <= bound;
    let dump = match &a.input {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let input = Chain::from_json(&text)?;
            let output = engine.cone(&input)?;
            Some(serde_json::to_value(qgrass::cone::ConeDump {
                basis: basis.vectors().to_vec(),
                input,
                variant: a.variant,
                output,
            })?)
        }
        None => None,
    };
    let passed = failures == 0 && size_ok;
    let v = verdict("cone-identity", passed);
    eprintln!("{v}");
    json_outcome(
        json!({
            "n": n, "k": k, "q": q, "m": m,
            "variant": a.variant,
            "basis": basis.vectors(),
            "chains": a.chains,
            "identity_failures": failures,
            "max_cone_size": max_size,
            "cone_size_bound": bound.to_string(),
            "dump": dump,
            "verdict": v,
        }),
        passed,
    )
}

fn small_gens(p: &Params) -> Result<Outcome> {
    let rep = small_generators(p.n, p.k, p.q, p.m)?;
    let passed = rep.passed();
    let v = verdict("small-generators", passed);
    eprintln!("{v}");
    let mut value = serde_json::to_value(&rep)?;
    value["verdict"] = json!(v);
    json_outcome(value, passed)
}

fn eta(a: &EtaArgs) -> Result<Outcome> {
    let field = Field::new(a.q)?;
    let rec = eta_recursive(a.n, a.q, a.m)?;
    let mut out = json!({ "n": a.n, "q": a.q, "m": a.m, "support": rec.len(), "recursive": rec });
    let mut passed = true;
    if a.check.contains(&EtaCheck::Explicit) {
        let ex = eta_explicit(a.n, a.q, a.m)?;
        let same = ex.chain == rec;
        passed &= same && ex.all_distinct();
        out["explicit"] = serde_json::to_value(&ex.chain)?;
        out["explicit_terms_distinct"] = json!(ex.all_distinct());
        out["explicit_matches_recursive"] = json!(same);
    }
    if a.check.contains(&EtaCheck::Boundary) {
        let cyc = is_cycle(&field, &rec);
        passed &= cyc;
        out["boundary_zero"] = json!(cyc);
    }
    let v = verdict("eta", passed);
    eprintln!("{v}");
    out["verdict"] = json!(v);
    json_outcome(out, passed)
}

fn psi_cmd(a: &PsiArgs) -> Result<Outcome> {
    let field = Field::new(a.q)?;
    let chain = psi(a.n, a.q, a.m)?;
    let expected: u64 = (0..a.n as u32).map(|i| 1 + (a.q as u64).pow(i)).product();
    let cyc = is_cycle(&field, &chain);
    let mut passed = cyc && chain.len() as u64 == expected;
    let mut out = json!({
        "n": a.n, "q": a.q, "m": a.m,
        "support": chain.len(),
        "expected_support": expected,
        "boundary_zero": cyc,
        "psi": chain,
    });
    if a.pairing {
        let pr = pairing_check(a.n, a.q, a.m)?;
        passed &= pr.passed();
        out["pairing"] = serde_json::to_value(&pr)?;
    }
    let v = verdict("psi", passed);
    eprintln!("{v}");
    out["verdict"] = json!(v);
    json_outcome(out, passed)
}

fn expansion(a: &ExpansionArgs) -> Result<Outcome> {
    let Params { n, k, q, m } = a.p;
    let exact = a.exact || (a.small_set.is_none() && !a.restriction && a.contraction.is_none());
    let mut out = json!({ "n": n, "k": k, "q": q, "m": m });
    let mut passed = true;
    if exact {
        let rep = expansion_constant(n, k, q, m, a.orbit)?;
        passed &= rep.bound_holds && rep.consistent;
        out["exact"] = serde_json::to_value(&rep)?;
    }
    if let Some(trials) = a.small_set {
        let rep = small_set_bound_check(n, k, q, m, trials, a.seed)?;
        passed &= rep.passed();
        out["small_set"] = serde_json::to_value(&rep)?;
    }
    if a.restriction {
        let rep = restriction_inequality(n, q, m, a.samples, a.seed)?;
        passed &= rep.positive;
        out["restriction"] = serde_json::to_value(&rep)?;
    }
    if let Some(count) = a.contraction {
        let amb = Ambient::with_q(q, n)?;
        let ring = ModRing::new(m)?;
        let level = amb.level(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let alphas: Vec<Chain> = (0..count)
            .map(|_| {
                let mut x = Chain::zero(n, k, ring);
                for _ in 0..rng.gen_range(1..=level.len()) {
                    x.add_term(level[rng.gen_range(0..level.len())].clone(), rng.gen_range(1..m));
                }
                x
            })
            .collect();
        let rep = averaged_contraction_check(n, k, q, m, &alphas)?;
        passed &= rep.passed();
        out["contraction"] = serde_json::to_value(&rep)?;
    }
    let v = verdict("expansion", passed);
    eprintln!("{v}");
    out["verdict"] = json!(v);
    json_outcome(out, passed)
}

fn gtable(a: &GtableArgs) -> Result<Outcome> {
    let Params { n, k, q, m } = a.p;
    let t = enumerate_minimal_connected(n, k, q, m, a.max_size)?;
    eprintln!("{}", t.verdict);
    eprintln!(
        "theta_display={} theta_expansion={}",
        t.theta_display,
        t.theta_expansion.map_or("n/a".into(), |x| x.to_string())
    );
    let body = match a.format {
        Format::Json => serde_json::to_string_pretty(&t)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["m", "theta", "count"])?;
            for b in &t.buckets {
                w.write_record([b.m.to_string(), b.theta.to_string(), b.count.to_string()])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    Ok(Outcome {
        body,
        passed: t.display_vanishing,
    })
}

fn indcomplex(a: &IndArgs) -> Result<Outcome> {
    let c = IndependenceComplex::new(a.n, a.k, a.q)?;
    let counts: Vec<Value> = (0..=c.k_max())
        .map(|s| {
            let ordered = c.ordered_count(s);
            let formula = ordered_face_count(a.n, s, a.q);
            json!({
                "size": s,
                "faces": c.face_count(s),
                "ordered": ordered.to_string(),
                "formula": formula.to_string(),
                "matches": ordered == formula,
            })
        })
        .collect();
    let mut passed = counts.iter().all(|c| c["matches"] == json!(true));
    let field = Field::new(a.q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let cones = check_simplicial_cones(a.n, a.q, &OrderedBasis::random(&field, a.n, &mut rng))?;
    passed &= cones.passed();
    let sparsity = if a.k >= 1 {
        let s = local_sparsity(a.n, a.k, a.q)?;
        passed &= s.bound_holds;
        Some(s)
    } else {
        None
    };
    let v = verdict("indcomplex", passed);
    eprintln!("{v}");
    json_outcome(
        json!({
            "n": a.n, "k": a.k, "q": a.q,
            "counts": counts,
            "simplicial_cones": cones,
            "sparsity": sparsity,
            "verdict": v,
        }),
        passed,
    )
}

fn lm_sweep(a: &SweepArgs) -> Result<Outcome> {
    let grid = parse_grid(&a.grid)?;
    let s = threshold_sweep(a.n, a.k, a.q, &grid, a.trials, a.seed, a.coef)?;
    let passed = s.uncovered_exceptions == 0 && s.monotonicity_violations == 0;
    eprintln!(
        "{} (uncovered exceptions {}, monotonicity violations {})",
        verdict("lm-sweep", passed),
        s.uncovered_exceptions,
        s.monotonicity_violations
    );
    Ok(Outcome {
        body: s.to_csv(),
        passed,
    })
}

fn repro(a: &ReproArgs) -> Result<Outcome> {
    let ids: Vec<usize> = if a.only.is_empty() {
        (1..=qgrass::repro::CRITERIA.len()).collect()
    } else {
        a.only.clone()
    };
    let mut results = Vec::new();
    for id in ids {
        let r = qgrass::repro::run_criterion(id)?;
        eprintln!("{r}");
        results.push(r);
    }
    let passed = results.iter().all(|r| r.passed);
    let rows: Vec<Value> = results
        .iter()
        .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "limit_secs": r.limit_secs }))
        .collect();
    json_outcome(json!({ "criteria": rows, "all_passed": passed }), passed)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let outcome = match &cli.command {
        Command::Homology(a) => homology(a)?,
        Command::ConeCheck(a) => cone_check(a)?,
        Command::SmallGenerators(p) => small_gens(p)?,
        Command::Eta(a) => eta(a)?,
        Command::Psi(a) => psi_cmd(a)?,
        Command::Expansion(a) => expansion(a)?,
        Command::Gtable(a) => gtable(a)?,
        Command::Indcomplex(a) => indcomplex(a)?,
        Command::LmSweep(a) => lm_sweep(a)?,
        Command::Repro(a) => repro(a)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome.passed)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<qgrass::Error>() {
        Some(q) if q.is_budget() => EXIT_BUDGET,
        Some(q) if q.is_inconsistency() => EXIT_INCONSISTENT,
        Some(_) => EXIT_REJECTED,
        None if e.downcast_ref::<std::io::Error>().is_some() => EXIT_IO,
        None => EXIT_REJECTED,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
