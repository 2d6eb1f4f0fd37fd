use std::fs;

use anyhow::Context;
use durrmeyer_core::analysis::{bound_check, convergence_study, voronovskaya_scan};
use durrmeyer_core::moments::errata::{run_errata, ErrataConfig};
use durrmeyer_core::{uniform_grid, MomentTable, OperatorDescriptor};
use serde::Serialize;

use crate::args::{self, Cli, Command, Format, OutputArgs};
use crate::output::{num, strings, write_csv, write_json};
use crate::plot;

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Eval {
            op,
            function,
            x,
            numeric,
            out,
        } => {
            let spec = op.spec()?;
            let f = args::function(&function)?;
            let xs = match x {
                Some(x) => vec![x],
                None => uniform_grid(numeric.grid),
            };
            let values = spec.prepare(&f, numeric.nodes).eval_grid(&xs)?;
            eval_output(&out, spec.descriptor(), &function, &xs, &values)
        }
        Command::Moments {
            op,
            max_power,
            central,
            out,
        } => {
            let spec = op.spec()?;
            let table = MomentTable::build(&spec, max_power)?;
            let source = if central {
                &table.central_entries
            } else {
                &table.entries
            };
            let rows: Vec<(usize, Vec<String>)> = source
                .iter()
                .map(|(j, p)| (*j, p.coeff_strings()))
                .collect();
            moments_output(&out, spec.descriptor(), central, rows)
        }
        Command::Converge {
            op,
            function,
            list,
            numeric,
            out,
        } => {
            let spec = op.spec()?;
            let f = args::function(&function)?;
            let report = convergence_study(&spec, &f, &list.n_list, numeric.grid, numeric.nodes)?;
            eprintln!(
                "slope {:.6} (intercept {:.6})",
                report.slope, report.intercept
            );
            match out.format {
                Format::Json => write_json(&out, &report),
                Format::Csv => write_csv(
                    &out,
                    &strings(&["n", "sup_error", "argmax_x"]),
                    report
                        .rows
                        .iter()
                        .map(|r| vec![r.n.to_string(), num(r.sup_error), num(r.argmax_x)]),
                ),
            }
        }
        Command::Voronovskaya {
            function,
            x,
            list,
            nodes,
            out,
        } => {
            let f = args::function(&function)?;
            let report = voronovskaya_scan(&f, x, &list.n_list, nodes)?;
            if let Some(ext) = report.extended_target {
                eprintln!(
                    "target {:.6}, with third and fourth moments {:.6}",
                    report.target, ext
                );
            }
            match out.format {
                Format::Json => write_json(&out, &report),
                Format::Csv => write_csv(
                    &out,
                    &strings(&["n", "scaled_error", "target"]),
                    report
                        .rows
                        .iter()
                        .map(|r| vec![r.n.to_string(), num(r.scaled_error), num(report.target)]),
                ),
            }
        }
        Command::Bounds {
            theorem,
            op,
            function,
            numeric,
            out,
        } => {
            let theorem = args::theorem(&theorem)?;
            let spec = op.spec()?;
            let f = args::function(&function)?;
            let report = bound_check(theorem, &spec, &f, numeric.grid, numeric.nodes)?;
            eprintln!(
                "{} {}: {} (min margin {:e}, constant {})",
                report.theorem, spec, report.verdict, report.min_margin, report.constant
            );
            if let Some(c) = report.best_constant {
                eprintln!("best constant {c:.6}");
            }
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            match out.format {
                Format::Json => write_json(&out, &report),
                Format::Csv => write_csv(
                    &out,
                    &strings(&["x", "lhs", "rhs", "margin"]),
                    report
                        .rows
                        .iter()
                        .map(|r| vec![num(r.x), num(r.lhs), num(r.rhs), num(r.margin)]),
                ),
            }
        }
        Command::Errata { output } => {
            let ledger = run_errata(&ErrataConfig::default())?;
            fs::write(&output, ledger.to_json() + "\n")
                .with_context(|| format!("cannot write {}", output.display()))?;
            println!("{:<44} {:>9} {:>8}", "identity", "confirmed", "refuted");
            for (name, (ok, bad)) in ledger.summary() {
                println!("{name:<44} {ok:>9} {bad:>8}");
            }
            eprintln!("wrote {}", output.display());
            Ok(())
        }
        Command::Plot {
            input,
            output,
            x_column,
            y_columns,
            log_log,
            title,
        } => {
            let table = plot::Table::load(&input)?;
            let title = title.unwrap_or_else(|| {
                input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let svg = plot::render(&table, x_column.as_deref(), &y_columns, log_log, &title)?;
            fs::write(&output, svg)
                .with_context(|| format!("cannot write {}", output.display()))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EvalRow {
    x: f64,
    value: f64,
}

#[derive(Serialize)]
struct EvalReport<'a> {
    operator: OperatorDescriptor,
    function: &'a str,
    rows: Vec<EvalRow>,
}

fn eval_output(
    out: &OutputArgs,
    operator: OperatorDescriptor,
    function: &str,
    xs: &[f64],
    values: &[f64],
) -> anyhow::Result<()> {
    match out.format {
        Format::Json => write_json(
            out,
            &EvalReport {
                operator,
                function,
                rows: xs
                    .iter()
                    .zip(values)
                    .map(|(&x, &value)| EvalRow { x, value })
                    .collect(),
            },
        ),
        Format::Csv => write_csv(
            out,
            &strings(&["x", "value"]),
            xs.iter().zip(values).map(|(&x, &v)| vec![num(x), num(v)]),
        ),
    }
}

#[derive(Serialize)]
struct MomentRow {
    power: usize,
    coefficients: Vec<String>,
}

#[derive(Serialize)]
struct MomentReport {
    operator: OperatorDescriptor,
    central: bool,
    rows: Vec<MomentRow>,
}

fn moments_output(
    out: &OutputArgs,
    operator: OperatorDescriptor,
    central: bool,
    rows: Vec<(usize, Vec<String>)>,
) -> anyhow::Result<()> {
    match out.format {
        Format::Json => write_json(
            out,
            &MomentReport {
                operator,
                central,
                rows: rows
                    .into_iter()
                    .map(|(power, coefficients)| MomentRow {
                        power,
                        coefficients,
                    })
                    .collect(),
            },
        ),
        Format::Csv => {
            let width = rows.iter().map(|(_, c)| c.len()).max().unwrap_or(0).max(1);
            let mut header = vec!["power".to_string()];
            header.extend((0..width).map(|i| format!("c{i}")));
            write_csv(
                out,
                &header,
                rows.into_iter().map(|(power, mut coeffs)| {
                    coeffs.resize(width, "0/1".to_string());
                    std::iter::once(power.to_string()).chain(coeffs).collect()
                }),
            )
        }
    }
}
