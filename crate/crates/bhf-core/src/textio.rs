//! Line-based text formats for structures and knot data.
//!
//! Two file kinds exist, distinguished by their first meaningful line.
//!
//! A **module file** describes a type D, DD, or DA structure:
//!
//! ```text
//! module twist
//! generator p idem (0,0)
//! generator q idem (1,1)
//! d p -> rho1 sigma3 q
//! ```
//!
//! One-sided generators are declared `generator x idem 0`; two-sided ones
//! carry an idempotent pair `idem (0,1)`. Differential lines use one
//! coefficient token for type D (`d x -> rho12 y`) and a ρ/σ pair for type
//! DD. Type DA operations are written `op <src> in <tok>… out <rho> <dst>`,
//! with the `in` section omitted for no inputs. Coefficient tokens accept
//! both boundary name families (`rho2`/`i0` and `sigma2`/`j0`); writers emit
//! the ρ family for outputs and σ names for the second DD coordinate. A
//! two-sided module is type DA exactly when it contains an `op` line.
//!
//! A **knot file** describes bifiltered chain data:
//!
//! ```text
//! knot trefoil_rh
//! tau 1
//! gens a b c
//! vert b -> c len 1
//! horiz b -> a len 1
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Errors carry
//! 1-based line numbers.

use crate::algebra::{AlgBasisElt, DDCoeff, Idem};
use crate::error::{Error, Result};
use crate::knot::CfkMinus;
use crate::structures::{AnyStructure, TypeD, TypeDA, TypeDD};

/// Either kind of file.
#[derive(Debug, Clone)]
pub enum ParsedFile {
    Module(AnyStructure),
    Knot(CfkMinus),
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => perr(line, other.to_string()),
    }
}

fn parse_idem_bit(line: usize, tok: &str) -> Result<Idem> {
    match tok {
        "0" => Ok(Idem::I0),
        "1" => Ok(Idem::I1),
        _ => Err(perr(
            line,
            format!("expected idempotent 0 or 1, got `{tok}`"),
        )),
    }
}

fn parse_idem_pair(line: usize, tok: &str) -> Result<(Idem, Idem)> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| perr(line, format!("expected idempotent pair (a,b), got `{tok}`")))?;
    let (l, r) = inner
        .split_once(',')
        .ok_or_else(|| perr(line, format!("expected idempotent pair (a,b), got `{tok}`")))?;
    Ok((parse_idem_bit(line, l)?, parse_idem_bit(line, r)?))
}

fn parse_coeff(line: usize, tok: &str) -> Result<AlgBasisElt> {
    AlgBasisElt::from_name(tok)
        .ok_or_else(|| perr(line, format!("unknown algebra coefficient `{tok}`")))
}

/// One meaningful line of a file, in parsed form.
enum Statement {
    Module(String),
    GenOne(String, Idem),
    GenTwo(String, Idem, Idem),
    ArrowD(String, AlgBasisElt, String),
    ArrowDd(String, DDCoeff, String),
    Op(String, Vec<AlgBasisElt>, AlgBasisElt, String),
    Knot(String),
    Tau(i64),
    Gens(Vec<String>),
    Chain(bool, String, String, usize),
}

fn parse_statement(line: usize, toks: &[&str]) -> Result<Statement> {
    match toks {
        ["module", name] => Ok(Statement::Module(name.to_string())),
        ["module", ..] => Err(perr(line, "module line takes exactly one name")),
        ["generator", name, "idem", tok] => {
            if tok.starts_with('(') {
                let (l, r) = parse_idem_pair(line, tok)?;
                Ok(Statement::GenTwo(name.to_string(), l, r))
            } else {
                Ok(Statement::GenOne(
                    name.to_string(),
                    parse_idem_bit(line, tok)?,
                ))
            }
        }
        ["generator", ..] => Err(perr(line, "expected `generator <name> idem <idem>`")),
        ["d", src, "->", coeff, dst] => Ok(Statement::ArrowD(
            src.to_string(),
            parse_coeff(line, coeff)?,
            dst.to_string(),
        )),
        ["d", src, "->", rho, sigma, dst] => Ok(Statement::ArrowDd(
            src.to_string(),
            DDCoeff::new(parse_coeff(line, rho)?, parse_coeff(line, sigma)?),
            dst.to_string(),
        )),
        ["d", ..] => Err(perr(
            line,
            "expected `d <src> -> <coeff> <dst>` or `d <src> -> <rho> <sigma> <dst>`",
        )),
        ["op", src, rest @ ..] => {
            let (inputs, tail) = match rest {
                ["in", r @ ..] => {
                    let cut = r
                        .iter()
                        .position(|&t| t == "out")
                        .ok_or_else(|| perr(line, "op line is missing `out`"))?;
                    (&r[..cut], &r[cut + 1..])
                }
                ["out", r @ ..] => (&rest[..0], r),
                _ => {
                    return Err(perr(
                        line,
                        "expected `op <src> [in <tok>…] out <rho> <dst>`",
                    ))
                }
            };
            let [out, dst] = tail else {
                return Err(perr(line, "expected `out <rho> <dst>` to end the op line"));
            };
            let inputs = inputs
                .iter()
                .map(|t| parse_coeff(line, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(Statement::Op(
                src.to_string(),
                inputs,
                parse_coeff(line, out)?,
                dst.to_string(),
            ))
        }
        ["knot", name] => Ok(Statement::Knot(name.to_string())),
        ["tau", t] => Ok(Statement::Tau(t.parse().map_err(|_| {
            perr(
                line,
                format!("expected an integer framing parameter, got `{t}`"),
            )
        })?)),
        ["gens", names @ ..] if !names.is_empty() => Ok(Statement::Gens(
            names.iter().map(|s| s.to_string()).collect(),
        )),
        [kind @ ("vert" | "horiz"), src, "->", dst, "len", l] => Ok(Statement::Chain(
            *kind == "vert",
            src.to_string(),
            dst.to_string(),
            l.parse()
                .map_err(|_| perr(line, format!("expected a positive length, got `{l}`")))?,
        )),
        [head, ..] => Err(perr(line, format!("unrecognized directive `{head}`"))),
        [] => unreachable!("blank lines are filtered out"),
    }
}

fn statements(text: &str) -> Result<Vec<(usize, Statement)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        out.push((line, parse_statement(line, &toks)?));
    }
    Ok(out)
}

fn assemble_module(stmts: &[(usize, Statement)]) -> Result<AnyStructure> {
    let name = match stmts.first() {
        Some(&(_, Statement::Module(ref n))) => n.clone(),
        Some(&(l, _)) => return Err(perr(l, "module files must start with a module line")),
        None => return Err(perr(1, "empty input")),
    };
    let mut one_sided = None;
    let mut has_ops = false;
    for &(line, ref stmt) in &stmts[1..] {
        let sided = match stmt {
            Statement::GenOne(..) | Statement::ArrowD(..) => Some(true),
            Statement::GenTwo(..) | Statement::ArrowDd(..) => Some(false),
            Statement::Op(..) => {
                has_ops = true;
                Some(false)
            }
            Statement::Module(_) => return Err(perr(line, "duplicate module line")),
            _ => {
                return Err(perr(
                    line,
                    "knot directives are not allowed in a module file",
                ))
            }
        };
        if let (Some(a), Some(b)) = (one_sided, sided) {
            if a != b {
                return Err(perr(line, "mixes one-sided and two-sided directives"));
            }
        }
        one_sided = one_sided.or(sided);
    }
    if one_sided.unwrap_or(true) {
        let mut d = TypeD::new(&name);
        for &(line, ref stmt) in &stmts[1..] {
            match stmt {
                Statement::GenOne(n, i) => {
                    d.add_gen(n, *i).map_err(at(line))?;
                }
                Statement::ArrowD(s, c, t) => d.toggle_arrow(s, *c, t).map_err(at(line))?,
                _ => unreachable!("sidedness already checked"),
            }
        }
        Ok(AnyStructure::D(d))
    } else if has_ops {
        let mut d = TypeDA::new(&name);
        for &(line, ref stmt) in &stmts[1..] {
            match stmt {
                Statement::GenTwo(n, l, r) => {
                    d.add_gen(n, *l, *r).map_err(at(line))?;
                }
                Statement::Op(s, ins, out, t) => {
                    d.toggle_op(s, ins.clone(), *out, t).map_err(at(line))?
                }
                Statement::ArrowDd(..) => {
                    return Err(perr(line, "type DA modules use op lines, not d lines"))
                }
                _ => unreachable!("sidedness already checked"),
            }
        }
        Ok(AnyStructure::DA(d))
    } else {
        let mut d = TypeDD::new(&name);
        for &(line, ref stmt) in &stmts[1..] {
            match stmt {
                Statement::GenTwo(n, l, r) => {
                    d.add_gen(n, *l, *r).map_err(at(line))?;
                }
                Statement::ArrowDd(s, c, t) => d.toggle_arrow(s, *c, t).map_err(at(line))?,
                _ => unreachable!("sidedness already checked"),
            }
        }
        Ok(AnyStructure::DD(d))
    }
}

fn assemble_knot(stmts: &[(usize, Statement)]) -> Result<CfkMinus> {
    let name = match stmts.first() {
        Some(&(_, Statement::Knot(ref n))) => n.clone(),
        Some(&(l, _)) => return Err(perr(l, "knot files must start with a knot line")),
        None => return Err(perr(1, "empty input")),
    };
    let mut tau = None;
    let mut gens: Vec<String> = Vec::new();
    let mut chains = Vec::new();
    for &(line, ref stmt) in &stmts[1..] {
        match stmt {
            Statement::Tau(t) => {
                if tau.replace(*t).is_some() {
                    return Err(perr(line, "duplicate tau line"));
                }
            }
            Statement::Gens(names) => gens.extend(names.iter().cloned()),
            Statement::Chain(vert, s, t, l) => chains.push((line, *vert, s.clone(), t.clone(), *l)),
            Statement::Knot(_) => return Err(perr(line, "duplicate knot line")),
            _ => {
                return Err(perr(
                    line,
                    "module directives are not allowed in a knot file",
                ))
            }
        }
    }
    let tau = tau.ok_or_else(|| perr(1, format!("knot {name} is missing a tau line")))?;
    let mut c = CfkMinus::new(&name, tau);
    for g in &gens {
        c.add_gen(g).map_err(at(1))?;
    }
    for (line, vert, s, t, l) in chains {
        if vert {
            c.add_vert(&s, &t, l).map_err(at(line))?;
        } else {
            c.add_horiz(&s, &t, l).map_err(at(line))?;
        }
    }
    Ok(c)
}

/// Parse a module file into the structure kind its lines describe.
pub fn parse_module(text: &str) -> Result<AnyStructure> {
    assemble_module(&statements(text)?)
}

/// Parse a knot file.
pub fn parse_knot(text: &str) -> Result<CfkMinus> {
    assemble_knot(&statements(text)?)
}

/// Parse either file kind, deciding by the first meaningful line.
pub fn parse_file(text: &str) -> Result<ParsedFile> {
    let stmts = statements(text)?;
    match stmts.first() {
        Some((_, Statement::Module(_))) => Ok(ParsedFile::Module(assemble_module(&stmts)?)),
        Some((_, Statement::Knot(_))) => Ok(ParsedFile::Knot(assemble_knot(&stmts)?)),
        Some(&(l, _)) => Err(perr(l, "files must start with a module or knot line")),
        None => Err(perr(1, "empty input")),
    }
}

/// Render a type D structure in the module format.
pub fn write_d(d: &TypeD) -> String {
    let mut out = format!("module {}\n", d.name);
    for g in d.gens() {
        out.push_str(&format!("generator {} idem {}\n", g.name, g.idem.bit()));
    }
    for &(s, c, t) in d.arrows() {
        out.push_str(&format!(
            "d {} -> {} {}\n",
            d.gen_name(s),
            c.rho_name(),
            d.gen_name(t)
        ));
    }
    out
}

/// Render a type DD structure in the module format.
pub fn write_dd(d: &TypeDD) -> String {
    let mut out = format!("module {}\n", d.name);
    for g in d.gens() {
        out.push_str(&format!(
            "generator {} idem ({},{})\n",
            g.name,
            g.left.bit(),
            g.right.bit()
        ));
    }
    for &(s, c, t) in d.arrows() {
        out.push_str(&format!(
            "d {} -> {} {} {}\n",
            d.gen_name(s),
            c.rho.rho_name(),
            c.sigma.sigma_name(),
            d.gen_name(t)
        ));
    }
    out
}

/// Render a type DA structure in the module format.
pub fn write_da(d: &TypeDA) -> String {
    let mut out = format!("module {}\n", d.name);
    for g in d.gens() {
        out.push_str(&format!(
            "generator {} idem ({},{})\n",
            g.name,
            g.left.bit(),
            g.right.bit()
        ));
    }
    for (s, ins, c, t) in d.ops() {
        out.push_str(&format!("op {}", d.gen_name(*s)));
        if !ins.is_empty() {
            out.push_str(" in");
            for i in ins {
                out.push(' ');
                out.push_str(i.rho_name());
            }
        }
        out.push_str(&format!(" out {} {}\n", c.rho_name(), d.gen_name(*t)));
    }
    out
}

/// Render any writable structure; the AA shape has no file format.
pub fn write_structure(s: &AnyStructure) -> Result<String> {
    match s {
        AnyStructure::D(d) => Ok(write_d(d)),
        AnyStructure::DD(d) => Ok(write_dd(d)),
        AnyStructure::DA(d) => Ok(write_da(d)),
        AnyStructure::AA(_) => Err(Error::Invalid(
            "type AA structures have no file format".to_string(),
        )),
    }
}

/// Render knot data in the knot format.
pub fn write_knot(c: &CfkMinus) -> String {
    let mut out = format!("knot {}\ntau {}\n", c.name, c.tau);
    if !c.gens().is_empty() {
        out.push_str(&format!("gens {}\n", c.gens().join(" ")));
    }
    for &(s, t, l) in c.vert() {
        out.push_str(&format!(
            "vert {} -> {} len {}\n",
            c.gens()[s],
            c.gens()[t],
            l
        ));
    }
    for &(s, t, l) in c.horiz() {
        out.push_str(&format!(
            "horiz {} -> {} len {}\n",
            c.gens()[s],
            c.gens()[t],
            l
        ));
    }
    out
}
