//! Command-line frontend for the bordered-algebra library: validate
//! structure files, enumerate morphism complexes between DD bimodules,
//! compile framed knot complements, and present direct limits of
//! framing-increase systems.
//!
//! Exit codes: 0 success, 1 validation or load failure, 2 parse failure,
//! 3 resource/depth cap exceeded.

use anyhow::{anyhow, bail, Context, Result};
use bhf_core::algebra::DDCoeff;
use bhf_core::colimit::{stable_part, truncated_colimit};
use bhf_core::error::Error as CoreError;
use bhf_core::knot::{builtin_knot, cfd_from_cfk, validate_cfk, CfkMinus};
use bhf_core::morphism::{mor_dd_basis, mor_dd_diff, mor_dd_homology, DDMor};
use bhf_core::structures::{
    builtin, validate_type_aa, validate_type_d, validate_type_da, validate_type_dd, AnyStructure,
    TypeD, TypeDD,
};
use bhf_core::textio::{parse_file, parse_knot, write_d, ParsedFile};
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bhf",
    version,
    about = "Bordered structure computations over the torus algebra"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a module or knot file (or name a builtin) and run its validator.
    Validate {
        /// File path, or a builtin name such as CFDD_I, CFDA_T, horizontal:2,
        /// unstable:3:1.
        target: String,
        /// Input-arity bound for DA and AA structure equations.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Enumerate the morphism complex between two DD bimodules.
    Mor {
        /// Source DD bimodule: builtin name or file path.
        #[arg(long)]
        from: String,
        /// Target DD bimodule: builtin name or file path.
        #[arg(long)]
        to: String,
        /// Also print the homology dimension and representatives.
        #[arg(long)]
        homology: bool,
    },
    /// Compile a knot complement to a framed type-D module.
    Cfd {
        /// Knot name (unknot, trefoil_rh, figure_eight) or a knot file path.
        #[arg(long)]
        knot: String,
        /// Boundary framing.
        #[arg(long, allow_hyphen_values = true)]
        framing: i64,
        /// Write the module file here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Present the direct limit of the framing-increase system over a base.
    Limit {
        /// Base: horizontal:<l>, vertical:<l>, unstable:<n>:<tau>,
        /// knot:<name>:<framing>, or a type-D module file path.
        #[arg(long)]
        base: String,
        /// Number of system steps to compute.
        #[arg(long)]
        depth: usize,
        /// Print the stable image of the base instead (knot bases only).
        #[arg(long = "stable-part")]
        stable: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe downstream (e.g. `bhf mor ... | head`) is a
            // normal way for a reader to stop listening, not a failure.
            match out.write_all(report.as_bytes()).and_then(|()| out.flush()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(match e.downcast_ref::<CoreError>() {
                Some(CoreError::Parse { .. }) => 2,
                Some(CoreError::DepthCap { .. } | CoreError::DepthTooShallow { .. }) => 3,
                _ => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.cmd {
        Cmd::Validate { target, bound } => cmd_validate(&target, bound),
        Cmd::Mor { from, to, homology } => cmd_mor(&from, &to, homology),
        Cmd::Cfd { knot, framing, out } => cmd_cfd(&knot, framing, out.as_deref()),
        Cmd::Limit {
            base,
            depth,
            stable,
        } => cmd_limit(&base, depth, stable),
    }
}

/// Load a file when `arg` names one, otherwise fall back to a builtin.
fn load_any(arg: &str) -> Result<ParsedFile> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
        Ok(parse_file(&text)?)
    } else {
        Ok(ParsedFile::Module(builtin(arg)?))
    }
}

fn load_dd(arg: &str) -> Result<TypeDD> {
    match load_any(arg)? {
        ParsedFile::Module(AnyStructure::DD(d)) => Ok(d),
        _ => bail!("`{arg}` is not a DD bimodule"),
    }
}

fn load_knot(arg: &str) -> Result<CfkMinus> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
        Ok(parse_knot(&text)?)
    } else {
        Ok(builtin_knot(arg)?)
    }
}

fn cmd_validate(target: &str, bound: usize) -> Result<String> {
    let (name, kind, gens) = match load_any(target)? {
        ParsedFile::Module(AnyStructure::D(d)) => {
            validate_type_d(&d)?;
            (d.name.clone(), "type D", d.gens().len())
        }
        ParsedFile::Module(AnyStructure::DD(d)) => {
            validate_type_dd(&d)?;
            (d.name.clone(), "type DD", d.gens().len())
        }
        ParsedFile::Module(AnyStructure::DA(d)) => {
            validate_type_da(&d, bound)?;
            (d.name.clone(), "type DA", d.gens().len())
        }
        ParsedFile::Module(AnyStructure::AA(d)) => {
            validate_type_aa(&d, bound)?;
            (d.name.clone(), "type AA", d.gens().len())
        }
        ParsedFile::Knot(k) => {
            validate_cfk(&k)?;
            (k.name.clone(), "knot", k.gens().len())
        }
    };
    Ok(format!("ok: {name} ({kind}, {gens} generators)\n"))
}

fn dd_component(m: &TypeDD, n: &TypeDD, s: usize, c: DDCoeff, t: usize) -> String {
    format!(
        "({} {} {} {})",
        m.gen_name(s),
        c.rho.rho_name(),
        c.sigma.sigma_name(),
        n.gen_name(t)
    )
}

fn dd_mor_string(m: &TypeDD, n: &TypeDD, f: &DDMor) -> String {
    let parts: Vec<String> = f
        .components()
        .iter()
        .map(|&(s, c, t)| dd_component(m, n, s, c, t))
        .collect();
    parts.join(" + ")
}

fn cmd_mor(from: &str, to: &str, homology: bool) -> Result<String> {
    let m = load_dd(from)?;
    let n = load_dd(to)?;
    let basis = mor_dd_basis(&m, &n);
    let mut report = format!("dim Mor = {}\n", basis.len());
    for &(x, y, rho, sigma) in &basis {
        let mut f = DDMor::zero();
        f.toggle(x, DDCoeff::new(rho, sigma), y);
        let df = mor_dd_diff(&m, &n, &f);
        if !df.is_zero() {
            writeln!(
                report,
                "d {} = {}",
                dd_component(&m, &n, x, DDCoeff::new(rho, sigma), y),
                dd_mor_string(&m, &n, &df)
            )?;
        }
    }
    if homology {
        let (dim, reps) = mor_dd_homology(&m, &n)?;
        writeln!(report, "dim H = {dim}")?;
        for (i, rep) in reps.iter().enumerate() {
            writeln!(report, "h{} = {}", i + 1, dd_mor_string(&m, &n, rep))?;
        }
    }
    Ok(report)
}

fn cmd_cfd(knot: &str, framing: i64, out: Option<&Path>) -> Result<String> {
    let k = load_knot(knot)?;
    validate_cfk(&k)?;
    let d = cfd_from_cfk(&k, framing)?;
    let text = write_d(&d);
    let mut report = String::new();
    match out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => report.push_str(&text),
    }
    writeln!(
        report,
        "generators {}, arrows {}",
        d.gens().len(),
        d.arrows().len()
    )?;
    Ok(report)
}

fn load_base(arg: &str) -> Result<TypeD> {
    if let Some(rest) = arg.strip_prefix("knot:") {
        let (name, framing) = rest
            .rsplit_once(':')
            .ok_or_else(|| anyhow!("knot base must be knot:<name>:<framing>"))?;
        let framing: i64 = framing
            .parse()
            .map_err(|_| anyhow!("bad framing `{framing}` in `{arg}`"))?;
        return Ok(cfd_from_cfk(&load_knot(name)?, framing)?);
    }
    match load_any(arg)? {
        ParsedFile::Module(AnyStructure::D(d)) => Ok(d),
        _ => bail!("`{arg}` is not a type-D module"),
    }
}

fn cmd_limit(base: &str, depth: usize, stable: bool) -> Result<String> {
    if stable {
        let rest = base
            .strip_prefix("knot:")
            .ok_or_else(|| anyhow!("--stable-part needs a knot:<name>:<framing> base"))?;
        let (name, framing) = rest
            .rsplit_once(':')
            .ok_or_else(|| anyhow!("knot base must be knot:<name>:<framing>"))?;
        let framing: i64 = framing
            .parse()
            .map_err(|_| anyhow!("bad framing `{framing}` in `{base}`"))?;
        let sp = stable_part(&load_knot(name)?, framing, depth)?;
        let mut report = write_d(&sp.complex);
        writeln!(
            report,
            "stable part: {} generators, {} arrows",
            sp.complex.gens().len(),
            sp.complex.arrows().len()
        )?;
        return Ok(report);
    }
    let b = load_base(base)?;
    let p = truncated_colimit(&b, depth)?;
    match p.tail {
        None => {
            let nu = p
                .periodicity
                .map_or_else(|| "not detected".to_string(), |v| v.to_string());
            Ok(format!("colimit ≅ base (ν = {nu})\n"))
        }
        Some(tail) => {
            let mut report = write_d(&p.presentation);
            writeln!(
                report,
                "tail: {} generators closing at {}",
                tail.nus.len(),
                tail.eta_bar
            )?;
            Ok(report)
        }
    }
}
