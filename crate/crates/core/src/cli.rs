//! Command line front end. `run` returns the process exit code:
//! 0 when every check passed, 1 when a check failed, 2 on bad input.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{catalog, check_catalog, decide, lookup, Decision};
use crate::descriptor::{parse_descriptor, DescriptorError};
use crate::finite_group_lab::{
    commutator_identity_check, coset_rep_check, mackey_check, random_two_dim_module, seeded_rng, FinModule, FiniteGroup,
    GroupError, SUBGROUP_NAMES,
};
use crate::skew_engine::{
    filtration_identity_check, not_fg_demonstration, obstruction_context, obstruction_witness, st_monomial,
    one_var_free_decomposition, verify_relations, SeriesContext, SkewContext1, SkewError, SkewParams,
    SkewPoly1, TruncSeries,
};

pub const REPORT_SCHEMA: &str = "coherence-lab-report/1";

/// The filtration check runs on a smaller truncation than the relation check.
const FILTRATION_TRUNCATION_CAP: u64 = 8;

#[derive(Parser, Debug)]
#[command(name = "coherence-lab", version, about = "Coherence of p-adic group algebras: decide, verify, explore")]
struct Cli {
    /// Print the full report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print nothing; only the exit code matters.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide coherence for a catalog name, a root system label (e.g. B2) or a descriptor file.
    Decide { target: String },
    /// Check the relation module of the two-variable skew ring, plus the one-variable identities.
    VerifySkew(SkewArgs),
    /// Show that s*t avoids every shifted monomial ideal, so s*t*z_n never lies in the span of the earlier generators.
    Obstruction(ObstructionArgs),
    /// Mackey decomposition and commutator identities over a unitriangular group mod p^a.
    Mackey(MackeyArgs),
    /// List the catalog, or print one entry's descriptor.
    Catalog {
        name: Option<String>,
        /// Decide each entry and compare with its recorded verdict.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args, Debug)]
struct SkewArgs {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    nu: u32,
    #[arg(long, default_value_t = 1)]
    nv: u32,
    #[arg(long, default_value_t = 8)]
    trunc: u64,
    #[arg(long, default_value_t = 0)]
    precision: u32,
    #[arg(long, default_value_t = 4)]
    window: i64,
    #[arg(long, default_value_t = 3)]
    mmax: u32,
    /// Replace the first relation by a wrong one (the check should then fail).
    #[arg(long)]
    corrupt_s1: bool,
}

#[derive(Args, Debug)]
struct ObstructionArgs {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    nu: u32,
    #[arg(long, default_value_t = 1)]
    nv: u32,
    #[arg(long, default_value_t = 6)]
    nmax: u32,
    #[arg(long, default_value_t = 8)]
    window: i64,
    /// Run with n_u = 0, where s*t must be obstructed.
    #[arg(long)]
    control: bool,
}

#[derive(Args, Debug)]
struct MackeyArgs {
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    a: u32,
    /// Subgroup to restrict to.
    #[arg(long = "H", default_value = "x")]
    h: String,
    /// Subgroup the module is induced from.
    #[arg(long = "G1", default_value = "y")]
    g1: String,
    /// 1: trivial module, 2: seeded random two-dimensional module.
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

#[derive(Debug)]
enum Failure {
    /// Bad input, validation failure or exceeded budget.
    Input(String),
    /// A verification step found an inconsistency.
    Check(String),
}

impl From<DescriptorError> for Failure {
    fn from(e: DescriptorError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SkewError> for Failure {
    fn from(e: SkewError) -> Self {
        match e {
            SkewError::VerificationFailed(m) => Failure::Check(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Outcome {
    inputs: Value,
    result: Value,
    ok: bool,
    text: Vec<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    command: &'a str,
    version: &'static str,
    inputs: &'a Value,
    ok: bool,
    result: &'a Value,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// `run` with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let name = match &cli.command {
        Command::Decide { .. } => "decide",
        Command::VerifySkew(_) => "verify-skew",
        Command::Obstruction(_) => "obstruction",
        Command::Mackey(_) => "mackey",
        Command::Catalog { .. } => "catalog",
    };
    let outcome = match &cli.command {
        Command::Decide { target } => cmd_decide(target),
        Command::VerifySkew(a) => cmd_verify_skew(a),
        Command::Obstruction(a) => cmd_obstruction(a),
        Command::Mackey(a) => cmd_mackey(a, cli.seed),
        Command::Catalog { name, check } => cmd_catalog(name.as_deref(), *check),
    };
    match outcome {
        Ok(o) => {
            if !cli.quiet {
                if cli.json {
                    let report = Report {
                        schema: REPORT_SCHEMA,
                        command: name,
                        version: env!("CARGO_PKG_VERSION"),
                        inputs: &o.inputs,
                        ok: o.ok,
                        result: &o.result,
                    };
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                } else {
                    for line in &o.text {
                        let _ = writeln!(out, "{line}");
                    }
                }
            }
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Input(m)) => {
            if !cli.quiet {
                let _ = writeln!(err, "error: {m}");
            }
            2
        }
        Err(Failure::Check(m)) => {
            if !cli.quiet {
                let _ = writeln!(err, "check failed: {m}");
            }
            1
        }
    }
}

fn describe(d: &Decision) -> String {
    match d {
        Decision::Semisimple { verdict } => {
            format!("{} ({})", if verdict.coherent { "coherent" } else { "not coherent" }, verdict.reason)
        }
        Decision::Solvable { verdict, certificate_verified } => {
            let cert = if *certificate_verified { "certificate verified" } else { "CERTIFICATE REJECTED" };
            match verdict {
                crate::coherence_engine::Verdict::Coherent { generator, trivial_image, .. } => {
                    if *trivial_image {
                        format!("coherent: the torus acts with trivial valuations ({cert})")
                    } else {
                        format!("coherent: image lattice generated by {generator} ({cert})")
                    }
                }
                crate::coherence_engine::Verdict::NotCoherent { mixed_witness, torus_element, embedded, .. } => format!(
                    "not coherent: torus element {torus_element} has valuations {mixed_witness} of both signs; \
                     embedded {:?} on weights {} and {} ({cert})",
                    embedded.kind, embedded.alpha, embedded.beta
                ),
            }
        }
    }
}

fn cmd_decide(target: &str) -> Result<Outcome, Failure> {
    let (source, desc, expected) = if let Some(e) = lookup(target) {
        let expected = (e.name != "label").then_some(e.expected);
        (if e.name == "label" { "root system label" } else { "catalog" }, e.descriptor, expected)
    } else if Path::new(target).is_file() {
        let text = std::fs::read_to_string(target).map_err(|e| Failure::Input(format!("{target}: {e}")))?;
        ("file", parse_descriptor(&text)?, None)
    } else {
        return Err(Failure::Input(format!("{target:?} is not a catalog name, a root system label or a readable file")));
    };
    let decision = decide(&desc)?;
    let ok = !matches!(decision, Decision::Solvable { certificate_verified: false, .. });
    Ok(Outcome {
        inputs: json!({ "target": target, "source": source }),
        result: json!({ "descriptor": desc, "decision": decision, "catalog_expectation": expected }),
        ok,
        text: vec![format!("{target}: {}", describe(&decision))],
    })
}

fn check_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> Result<(), Failure> {
    if v < lo || v > hi {
        return Err(Failure::Input(format!("--{name} must lie in [{lo}, {hi}], got {v}")));
    }
    Ok(())
}

fn cmd_verify_skew(a: &SkewArgs) -> Result<Outcome, Failure> {
    if ![2, 3, 5].contains(&a.p) {
        return Err(Failure::Input(format!("--p must be 2, 3 or 5, got {}", a.p)));
    }
    check_range("nu", a.nu, 1, 3)?;
    check_range("nv", a.nv, 1, 3)?;
    check_range("trunc", a.trunc, 1, 16)?;
    check_range("precision", a.precision, 0, 2)?;
    check_range("window", a.window, 1, 6)?;
    check_range("mmax", a.mmax, 1, 6)?;
    let params = SkewParams {
        p: a.p,
        n_u: a.nu,
        n_v: a.nv,
        truncation: a.trunc,
        precision: a.precision,
        window: a.window,
        m_max: a.mmax,
        corrupt_s1: a.corrupt_s1,
        ..SkewParams::default()
    };
    let relations = verify_relations(&params)?;
    let free = one_var_free_decomposition(a.p, a.precision, a.trunc)?;

    let k_max = a.window.min(4) as u32;
    let ftrunc = a.trunc.min(FILTRATION_TRUNCATION_CAP);
    let ctx = SkewContext1::new(SeriesContext::new(a.p, 1, 0, ftrunc)?, 8)?;
    let one = SkewPoly1::one(ctx);
    let t = SkewPoly1::constant(TruncSeries::var(ctx.series, 0, 1), ctx);
    let f = ctx.f();
    let examples = [("R(t, F) in R^2", vec![vec![t, f]]), ("R in R^1", vec![vec![one]])];
    let mut filtrations = Vec::new();
    for (label, gens) in &examples {
        filtrations.push((label, filtration_identity_check(gens, k_max)?));
    }

    let ok = relations.pass && free.pass && filtrations.iter().all(|(_, r)| r.pass);
    let mut text = vec![
        format!(
            "relations: sound {} complete {} ({} unknowns, kernel dimension {}, {} exceptions)",
            relations.soundness_pass,
            relations.completeness_pass,
            relations.unknowns,
            relations.kernel_dim,
            relations.exceptions.len()
        ),
        format!("free decomposition over the Frobenius image: {} ({} monomials)", free.pass, free.monomials),
    ];
    for (label, r) in &filtrations {
        text.push(format!("filtration identity for {label}, k <= {}: {}", r.k_max, r.pass));
    }
    text.push(if ok { "PASS".into() } else { "FAIL".into() });
    Ok(Outcome {
        inputs: json!({
            "p": a.p, "nu": a.nu, "nv": a.nv, "trunc": a.trunc, "precision": a.precision,
            "window": a.window, "mmax": a.mmax, "corrupt_s1": a.corrupt_s1,
            "filtration_truncation": ftrunc,
        }),
        result: json!({
            "relations": relations,
            "free_decomposition": free,
            "filtration": filtrations.iter().map(|(l, r)| json!({ "module": l, "report": r })).collect::<Vec<_>>(),
        }),
        ok,
        text,
    })
}

fn cmd_obstruction(a: &ObstructionArgs) -> Result<Outcome, Failure> {
    if ![2, 3, 5].contains(&a.p) {
        return Err(Failure::Input(format!("--p must be 2, 3 or 5, got {}", a.p)));
    }
    let nu = if a.control { 0 } else { a.nu };
    check_range("nu", nu, if a.control { 0 } else { 1 }, 3)?;
    check_range("nv", a.nv, 1, 3)?;
    check_range("window", a.window, 1, 8)?;
    check_range("nmax", a.nmax, 1, 2 * a.window as u32 - 1)?;
    let ctx = obstruction_context(a.p, nu, a.nv, a.window)?;
    let witness = obstruction_witness(&st_monomial(&ctx), &ctx, nu, a.nv, a.window)?;
    let chain = not_fg_demonstration(a.p, nu, a.nv, a.nmax, a.window)?;
    // With n_u = 0 the ideal (s)(t) already contains s*t, so the chain must stall.
    let ok = if a.control { witness.is_some() && !chain.all_strict } else { witness.is_none() && chain.all_strict };
    let text = vec![
        format!("s*t in some (s^(p^(a nu)))(t^(p^(b nv))), |a|, |b| <= {}: {}", a.window, match witness {
            Some((x, y)) => format!("yes, shift ({x}, {y})"),
            None => "no".into(),
        }),
        format!(
            "{} of {} steps strict: s*t*z_(n+1) is outside the span of s*t*z_m, m <= n",
            chain.strict_steps,
            chain.steps.len()
        ),
        if ok { "PASS".into() } else { "FAIL".into() },
    ];
    Ok(Outcome {
        inputs: json!({ "p": a.p, "nu": nu, "nv": a.nv, "nmax": a.nmax, "window": a.window, "control": a.control }),
        result: json!({ "st_obstructed": witness.is_some(), "shift": witness, "chain": chain }),
        ok,
        text,
    })
}

fn cmd_mackey(a: &MackeyArgs, seed: u64) -> Result<Outcome, Failure> {
    for name in [&a.h, &a.g1] {
        if !SUBGROUP_NAMES.contains(&name.as_str()) {
            return Err(Failure::Input(format!("unknown subgroup {name:?}; known: {}", SUBGROUP_NAMES.join(", "))));
        }
    }
    check_range("a", a.a, 1, 4)?;
    let g = FiniteGroup::unitriangular(a.p, a.a)?;
    let h = g.named_subgroup(&a.h)?;
    let g1 = g.named_subgroup(&a.g1)?;
    let module = match a.dim {
        1 => FinModule::trivial(&g, &g1, a.p, 1)?,
        2 => random_two_dim_module(&g, &g1, a.p, &mut seeded_rng(seed))?,
        d => return Err(Failure::Input(format!("--dim must be 1 or 2, got {d}"))),
    };
    let mackey = mackey_check(&g, &h, &module)?;
    let cosets = coset_rep_check(&g, &h, &g1)?;
    let comm = commutator_identity_check(a.p, a.a)?;
    let ok = mackey.pass && cosets.pass && comm.group_commutator && comm.t_first_form && comm.w_central;
    let text = vec![
        format!(
            "group of order {}: {} double cosets, dimensions {} = {}, map equivariant {} bijective {}",
            mackey.group_order,
            mackey.terms.len(),
            mackey.left_dim,
            mackey.right_dim,
            mackey.psi_equivariant,
            mackey.psi_bijective
        ),
        format!("coset representatives: {}", cosets.pass),
        format!(
            "commutator: group identity {}, (1+t)(1+s)w form {}, (1+s)(1+t)w form {}, w central {}",
            comm.group_commutator, comm.t_first_form, comm.s_first_form, comm.w_central
        ),
        if ok { "PASS".into() } else { "FAIL".into() },
    ];
    Ok(Outcome {
        inputs: json!({ "p": a.p, "a": a.a, "H": a.h, "G1": a.g1, "dim": a.dim, "seed": seed }),
        result: json!({
            "mackey": mackey,
            "coset_representatives": cosets,
            "commutator": comm,
            "module_generators": module.generator_matrices().iter().map(|m| m.to_rows()).collect::<Vec<_>>(),
        }),
        ok,
        text,
    })
}

fn cmd_catalog(name: Option<&str>, check: bool) -> Result<Outcome, Failure> {
    let entries: Vec<_> = match name {
        Some(n) => vec![catalog()
            .into_iter()
            .find(|e| e.name == n)
            .ok_or_else(|| Failure::Input(format!("no catalog entry named {n:?}")))?],
        None => catalog(),
    };
    let checks: Vec<_> = if check {
        let names: Vec<_> = entries.iter().map(|e| e.name).collect();
        check_catalog().into_iter().filter(|c| names.contains(&c.name)).collect()
    } else {
        Vec::new()
    };
    let ok = checks.iter().all(|c| c.matches);
    let mut text = Vec::new();
    if let (Some(_), false) = (name, check) {
        text.push(entries[0].descriptor.to_json());
    } else {
        for e in &entries {
            let verdict = if e.expected.coherent { "coherent" } else { "not coherent" };
            let status = match checks.iter().find(|c| c.name == e.name) {
                Some(c) if c.matches => "  [ok]",
                Some(_) => "  [MISMATCH]",
                None => "",
            };
            text.push(format!("{:<18} {:<13} {}{status}", e.name, verdict, e.summary));
        }
    }
    Ok(Outcome {
        inputs: json!({ "name": name, "check": check }),
        result: json!({ "entries": to_value(&entries), "checks": to_value(&checks) }),
        ok,
        text,
    })
}

#[cfg(test)]
#[path = "cli_tests.rs"]
mod tests;
