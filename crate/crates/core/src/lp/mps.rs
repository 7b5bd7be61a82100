use std::io::Write;

use crate::error::Result;

use super::{LinearProgram, Sense};

/// Writes a model in fixed-column MPS format for cross-checking against
/// external solvers. Rows and columns get generated 8-character names
/// (`R0000001`, `C0000001`); the objective row is `COST`. A comment block
/// maps generated names back to the model's own names.
pub fn write_mps(lp: &LinearProgram, out: &mut dyn Write) -> Result<()> {
    let rname = |i: usize| format!("R{:07}", i + 1);
    let cname = |j: usize| format!("C{:07}", j + 1);

    writeln!(out, "* {}", lp.name)?;
    if lp.objective_constant != 0.0 {
        writeln!(
            out,
            "* objective constant {:.12e} not representable; add it to the reported optimum",
            lp.objective_constant
        )?;
    }
    for (j, var) in lp.vars().iter().enumerate() {
        writeln!(out, "* {} = {}", cname(j), var.name)?;
    }
    for (i, row) in lp.rows().iter().enumerate() {
        writeln!(out, "* {} = {}", rname(i), row.name)?;
    }

    writeln!(out, "NAME          {:<8}", sanitize(&lp.name))?;
    writeln!(out, "ROWS")?;
    writeln!(out, " N  COST")?;
    for (i, row) in lp.rows().iter().enumerate() {
        let sense = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        writeln!(out, " {}  {:<8}", sense, rname(i))?;
    }

    // Column-major pass over the rows.
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.n_vars()];
    for (i, row) in lp.rows().iter().enumerate() {
        for &(j, c) in &row.terms {
            columns[j].push((i, c));
        }
    }

    writeln!(out, "COLUMNS")?;
    for (j, var) in lp.vars().iter().enumerate() {
        let mut entries: Vec<(String, f64)> = Vec::new();
        if var.obj != 0.0 {
            entries.push(("COST".to_string(), var.obj));
        }
        entries.extend(columns[j].iter().map(|&(i, c)| (rname(i), c)));
        for pair in entries.chunks(2) {
            let mut line = format!(
                "    {:<8}  {:<8}  {:<12.6e}",
                cname(j),
                pair[0].0,
                pair[0].1
            );
            if let Some(second) = pair.get(1) {
                line.push_str(&format!("   {:<8}  {:<12.6e}", second.0, second.1));
            }
            writeln!(out, "{line}")?;
        }
    }

    writeln!(out, "RHS")?;
    for (i, row) in lp.rows().iter().enumerate() {
        if row.rhs != 0.0 {
            writeln!(out, "    RHS       {:<8}  {:<12.6e}", rname(i), row.rhs)?;
        }
    }

    writeln!(out, "BOUNDS")?;
    for (j, var) in lp.vars().iter().enumerate() {
        let name = cname(j);
        match (var.lb, var.ub) {
            (lb, ub) if lb == ub => {
                writeln!(out, " FX BND       {:<8}  {:<12.6e}", name, lb)?;
            }
            (lb, ub) => {
                if lb.is_infinite() {
                    writeln!(out, " MI BND       {:<8}", name)?;
                } else if lb != 0.0 {
                    writeln!(out, " LO BND       {:<8}  {:<12.6e}", name, lb)?;
                }
                if ub.is_finite() {
                    writeln!(out, " UP BND       {:<8}  {:<12.6e}", name, ub)?;
                }
            }
        }
    }
    writeln!(out, "ENDATA")?;
    Ok(())
}

fn sanitize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .take(8)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LinearProgram;

    #[test]
    fn sections_are_emitted() {
        let mut lp = LinearProgram::new("toy");
        let x = lp.add_var("x", 0.0, 2.0, 1.5);
        lp.add_row("cap", Sense::Le, 1.0, vec![(x, 1.0)]);
        let mut buf = Vec::new();
        write_mps(&lp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for section in ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"] {
            assert!(text.contains(section), "missing {section}");
        }
        assert!(text.contains(" L  R0000001"));
        assert!(text.contains(" UP BND"));
    }
}
