use std::io::{self, Write};

use super::{Direction, LinExpr, Model, Sense, VarKind};

fn sanitize(name: &str, index: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' })
        .collect();
    format!("{cleaned}#{index}")
}

fn write_expr<W: Write>(out: &mut W, model: &Model, expr: &LinExpr) -> io::Result<()> {
    if expr.terms.is_empty() {
        return write!(out, " 0");
    }
    for (i, &(v, c)) in expr.terms.iter().enumerate() {
        let sign = if c < 0.0 { "-" } else if i == 0 { "" } else { "+" };
        write!(out, " {sign} {} {}", c.abs(), sanitize(&model.var(v).name, v.index()))?;
    }
    Ok(())
}

pub(super) fn write<W: Write>(model: &Model, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "{}",
        match model.direction() {
            Direction::Minimize => "Minimize",
            Direction::Maximize => "Maximize",
        }
    )?;
    write!(out, " obj:")?;
    write_expr(out, model, model.objective())?;
    if model.objective().constant != 0.0 {
        // LP format has no objective constant; keep it visible for debugging
        write!(out, "\n\\ constant {}", model.objective().constant)?;
    }
    writeln!(out, "\nSubject To")?;
    for (i, c) in model.constraints().iter().enumerate() {
        write!(out, " {}:", sanitize(&c.name, i))?;
        write_expr(out, model, &c.expr)?;
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {sense} {}", c.rhs)?;
    }
    writeln!(out, "Bounds")?;
    for (i, v) in model.vars().iter().enumerate() {
        let name = sanitize(&v.name, i);
        let lo = if v.lower.is_infinite() { "-inf".to_string() } else { v.lower.to_string() };
        let hi = if v.upper.is_infinite() { "+inf".to_string() } else { v.upper.to_string() };
        writeln!(out, " {lo} <= {name} <= {hi}")?;
    }
    let binaries: Vec<String> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, v)| sanitize(&v.name, i))
        .collect();
    if !binaries.is_empty() {
        writeln!(out, "Binaries")?;
        for b in binaries {
            writeln!(out, " {b}")?;
        }
    }
    writeln!(out, "End")
}
