use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use liesym::adjoint::{adjoint_matrix, adjoint_matrix_symbolic};
use liesym::fixture::Fixture;
use liesym::jet::Pde;
use liesym::liealg::{structure_constants, structure_report, LieAlgebra};
use liesym::report::{self, compare_adjoint, optimal_redundancies, vet_optimal, Status};
use liesym::solutions::{reduce, residual, CandidateForm, Grid, ParamValues, SolutionCandidate};
use liesym::symmetry::{determining_system, solve_ansatz, span_equal, verify_symmetry};

#[derive(Parser)]
#[command(name = "liesym", version, about = "Lie point symmetries of second-order PDEs in (x, t, u)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 1 when a computed result disagrees with the reference data.
    #[arg(long, global = true)]
    strict: bool,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numeric tolerance for residual checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    /// Basis of the symmetry algebra.
    Basis,
    /// Reduced determining equations.
    Determining,
    /// Both.
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the determining equations with a polynomial ansatz.
    Symmetries {
        /// `born-infeld` or a path to a JSON file with `lhs` and optional `principal`.
        #[arg(long, default_value = "born-infeld")]
        pde: String,
        /// Total degree of the polynomial ansatz for xi1, xi2 and eta.
        #[arg(long, default_value_t = 2)]
        ansatz_degree: u32,
        #[arg(long, value_enum, default_value_t = Emit::Basis)]
        emit: Emit,
    },
    /// Commutator table of the seven Born-Infeld generators.
    BracketTable,
    /// Radical, Levi complement, Killing form, quotient and centralizers.
    AlgebraStructure,
    /// Matrix of Ad(exp(eps v_i)); row j is the image of v_j.
    Adjoint {
        /// Generator index, 1 to 7.
        #[arg(long)]
        generator: usize,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: f64,
    },
    /// Representatives of the one-dimensional optimal system.
    OptimalSystem {
        /// Track orbit invariants and search for conjugate representatives.
        #[arg(long)]
        vet: bool,
    },
    /// Evaluate the PDE residual of a candidate solution on a grid.
    VerifySolution {
        #[arg(long, default_value = "born-infeld")]
        pde: String,
        /// `expr` for u = expr, or `implicit:expr` for expr = 0.
        #[arg(long, allow_hyphen_values = true)]
        solution: String,
        /// Sampling grid, `x=lo:hi:n,t=lo:hi:n`.
        #[arg(long, allow_hyphen_values = true, default_value = "x=-0.5:0.5:41,t=1.2:2:41")]
        grid: String,
        /// Parameter value `name=value`, repeatable.
        #[arg(long = "param", allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Reduce the PDE to an ODE with the invariants of one generator.
    Reduce {
        /// Generator label, `v1` to `v7`.
        #[arg(long)]
        generator: String,
    },
    /// Check every published claim and write the JSON report.
    ReproducePaper {
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Strict(String),
}

struct Output {
    json: Value,
    table: String,
    /// Reason for a strict-mode failure.
    disagreement: Option<String>,
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_pde(spec: &str) -> Result<Pde, Failure> {
    if spec == "born-infeld" {
        return Ok(Pde::born_infeld());
    }
    let text = std::fs::read_to_string(spec).map_err(|e| usage(format!("{spec}: {e}")))?;
    Pde::from_json(&text).map_err(|e| usage(format!("{spec}: {e}")))
}

fn algebra(fx: &Fixture) -> Result<LieAlgebra, Failure> {
    let gens = fx.generators().map_err(usage)?;
    structure_constants(&gens, &fx.labels()).map_err(usage)
}

fn grid_text(rows: &[Vec<String>], header: Option<&[String]>) -> String {
    let mut all: Vec<Vec<String>> = Vec::new();
    if let Some(h) = header {
        let mut r = vec![String::new()];
        r.extend(h.iter().cloned());
        all.push(r);
        for (label, row) in h.iter().zip(rows) {
            let mut r = vec![label.clone()];
            r.extend(row.iter().cloned());
            all.push(r);
        }
    } else {
        all.extend(rows.iter().cloned());
    }
    let cols = all.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| all.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &all {
        let cells: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:>w$}", w = widths[c])).collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    out
}

fn symmetries(pde_spec: &str, degree: u32, emit: Emit) -> Result<Output, Failure> {
    let pde = load_pde(pde_spec)?;
    let ds = determining_system(&pde).map_err(usage)?;
    let r = solve_ansatz(&ds, degree);
    let mut json = json!({ "pde": pde.lhs.to_string(), "ansatz_degree": degree, "dimension": r.dimension });
    let mut table = format!("pde: {} = 0\nansatz degree: {degree}\ndimension: {}\n", pde.lhs, r.dimension);
    let mut disagreement = None;
    if emit != Emit::Determining {
        let mut failing = Vec::new();
        let gens: Vec<Value> = r
            .basis
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let exact = verify_symmetry(v, &pde).map(|c| c.exact_zero).unwrap_or(false);
                if !exact {
                    failing.push(i + 1);
                }
                writeln!(table, "  {:>2}. {v}", i + 1).unwrap();
                json!({ "xi1": v.xi1.to_string(), "xi2": v.xi2.to_string(), "eta": v.eta.to_string(), "field": v.to_string(), "verified": exact })
            })
            .collect();
        json["generators"] = Value::Array(gens);
        if !failing.is_empty() {
            disagreement = Some(format!("generators {failing:?} fail the symmetry condition"));
        } else if pde_spec == "born-infeld" {
            let fx = Fixture::born_infeld();
            let reference = fx.generators().map_err(usage)?;
            let same = span_equal(&r.basis, &reference);
            json["matches_reference"] = json!(same);
            if !same {
                disagreement = Some("span differs from the seven reference generators".into());
            }
        }
    }
    if emit != Emit::Basis {
        let eqs: Vec<String> = ds.equations().iter().map(|e| e.to_string()).collect();
        table.push_str("determining equations:\n");
        for e in &eqs {
            writeln!(table, "  {e} = 0").unwrap();
        }
        json["determining_equations"] = json!(eqs);
    }
    Ok(Output { json, table, disagreement })
}

fn bracket_table() -> Result<Output, Failure> {
    let fx = Fixture::born_infeld();
    let g = algebra(&fx)?;
    let t = g.bracket_table();
    let deviations: Vec<Value> = t
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            let fx = &fx;
            row.iter().enumerate().filter_map(move |(j, c)| {
                let p = &fx.commutators.printed[i][j];
                (p != c).then(|| json!({ "row": g_label(i), "col": g_label(j), "printed": p, "computed": c }))
            })
        })
        .collect();
    let corrected_ok = t == fx.commutators.corrected;
    let mut table = grid_text(&t, Some(&g.labels));
    for d in &deviations {
        writeln!(table, "printed [{}, {}] = {}, computed {}", str_of(&d["row"]), str_of(&d["col"]), str_of(&d["printed"]), str_of(&d["computed"])).unwrap();
    }
    Ok(Output {
        json: json!({ "labels": g.labels, "brackets": t, "printed_deviations": deviations, "matches_corrected": corrected_ok }),
        table,
        disagreement: (!corrected_ok).then(|| "computed table differs from the corrected reference".to_string()),
    })
}

fn g_label(i: usize) -> String {
    format!("v{}", i + 1)
}

fn str_of(v: &Value) -> String {
    v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())
}

fn algebra_structure() -> Result<Output, Failure> {
    let fx = Fixture::born_infeld();
    let g = algebra(&fx)?;
    let s = structure_report(&g).map_err(usage)?;
    let levi = g.radical().and_then(|r| g.levi_complement(&r)).map_err(usage)?;
    let k = g.restrict(&levi).map_err(usage)?.killing_form();
    let levi_killing: Vec<Vec<String>> = (0..k.nrows()).map(|i| (0..k.ncols()).map(|j| k[(i, j)].to_string()).collect()).collect();
    let n = g.dim();
    let c: Vec<Vec<Vec<String>>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| g.structure_constant(i, j, k).to_string()).collect()).collect())
        .collect();
    let json = json!({
        "labels": s.labels,
        "c": c,
        "solvable": s.solvable,
        "nilpotent": s.nilpotent,
        "semisimple": s.semisimple,
        "derived_series": s.derived_series,
        "derived_algebra_with_generators": s.derived_algebra_with_generators,
        "radical_basis": s.radical_basis,
        "levi_basis": s.levi_basis,
        "levi_killing": levi_killing,
        "killing": s.killing,
        "quotient_brackets": s.quotient_brackets,
        "centralizers": s.centralizers.iter().map(|(k, v)| json!({ "of": k, "basis": v })).collect::<Vec<_>>(),
    });
    let mut table = String::new();
    writeln!(table, "solvable: {}\nnilpotent: {}\nsemisimple: {}", s.solvable, s.nilpotent, s.semisimple).unwrap();
    writeln!(table, "radical: {{{}}}", s.radical_basis.join(", ")).unwrap();
    writeln!(table, "levi: {{{}}}", s.levi_basis.join(", ")).unwrap();
    writeln!(table, "killing form on levi:\n{}", grid_text(&levi_killing, None).trim_end()).unwrap();
    let w: Vec<String> = (1..=s.quotient_brackets.len()).map(|i| format!("w{i}")).collect();
    writeln!(table, "quotient by the radical:\n{}", grid_text(&s.quotient_brackets, Some(&w)).trim_end()).unwrap();
    for (of, basis) in &s.centralizers {
        writeln!(table, "centralizer of {of}: {{{}}}", basis.join(", ")).unwrap();
    }
    let st = &fx.structure;
    let agrees = s.radical_basis == st.radical && s.levi_basis == st.levi && s.quotient_brackets == st.quotient;
    Ok(Output {
        json,
        table,
        disagreement: (!agrees).then(|| "radical, Levi complement or quotient differ from the reference".to_string()),
    })
}

fn adjoint(generator: usize, eps: f64) -> Result<Output, Failure> {
    let fx = Fixture::born_infeld();
    let g = algebra(&fx)?;
    if !(1..=g.dim()).contains(&generator) {
        return Err(usage(format!("generator must be between 1 and {}", g.dim())));
    }
    let m = adjoint_matrix(&g, generator - 1, eps);
    let symbolic = adjoint_matrix_symbolic(&g, generator - 1)
        .map(|rows| rows.iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
    let entry = fx.adjoint.iter().find(|a| a.generator == generator);
    let comparison = entry.map(|e| compare_adjoint(&g, e, &[eps]));
    let disagreement = comparison
        .as_ref()
        .filter(|c| c.verdict().0 == Status::Mismatch)
        .map(|_| "computed matrix differs from the reference on unflagged entries".to_string());
    let cells: Vec<Vec<String>> = m.rows.iter().map(|r| r.iter().map(|v| fmt_num(*v)).collect()).collect();
    let mut table = format!("Ad(exp({eps} v{generator})), row j = image of v_j\n");
    table.push_str(&grid_text(&cells, Some(&g.labels)));
    if let Some(c) = &comparison {
        for d in &c.deviations {
            writeln!(table, "reference [{}, {}] = {} gives {}, computed {}", d.row, d.col, d.printed, fmt_num(d.printed_at), fmt_num(d.computed_at)).unwrap();
        }
    }
    Ok(Output {
        json: json!({
            "generator": generator,
            "epsilon": eps,
            "mode": m.mode,
            "rows": m.rows,
            "symbolic": symbolic,
            "reference_comparison": comparison,
        }),
        table,
        disagreement,
    })
}

fn fmt_num(v: f64) -> String {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn optimal_system(vet: bool, seed: u64) -> Result<Output, Failure> {
    let fx = Fixture::born_infeld();
    let g = algebra(&fx)?;
    let labels = &g.labels;
    let pretty = |coords: &[String]| -> String {
        let terms: Vec<String> = coords
            .iter()
            .zip(labels)
            .filter(|(c, _)| c.as_str() != "0")
            .map(|(c, l)| if c == "1" { l.clone() } else { format!("({c}) {l}") })
            .collect();
        terms.join(" + ")
    };
    let reps: Vec<Value> = fx.optimal.rep.iter().map(|r| json!({ "name": r.name, "element": pretty(&r.coords), "coords": r.coords })).collect();
    let mut table = String::new();
    for r in &fx.optimal.rep {
        writeln!(table, "{}: {}", r.name, pretty(&r.coords)).unwrap();
    }
    let mut json = json!({ "representatives": reps });
    let mut disagreement = None;
    if vet {
        let vets = vet_optimal(&fx, &g, seed).map_err(usage)?;
        let redundant = optimal_redundancies(&fx, &g).map_err(usage)?;
        table.push_str("\nvetting:\n");
        for v in &vets {
            writeln!(table, "{}: killing = {}, ad ranks {:?}, max drift {:e}", v.name, v.killing, v.ad_ranks, v.max_drift).unwrap();
        }
        for r in &redundant {
            writeln!(table, "redundant: {r}").unwrap();
        }
        if vets.iter().any(|v| v.max_drift > report::DRIFT_TOL) {
            disagreement = Some("orbit invariants drift along adjoint chains".into());
        } else if !redundant.is_empty() {
            disagreement = Some(format!("{} redundancies among the representatives", redundant.len()));
        }
        json["vetting"] = json!(vets);
        json["redundancies"] = json!(redundant);
    }
    Ok(Output { json, table, disagreement })
}

fn verify_solution(pde_spec: &str, solution: &str, grid: &str, params: &[String], tol: f64, seed: u64) -> Result<Output, Failure> {
    let pde = load_pde(pde_spec)?;
    let form = CandidateForm::parse(solution).map_err(usage)?;
    let grid: Grid = grid.parse().map_err(usage)?;
    let mut values = ParamValues::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("--param {p}: expected name=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| usage(format!("--param {p}: bad number")))?;
        values.insert(k.trim().to_string(), v);
    }
    let mut cand = SolutionCandidate::new(form).with_domain(grid);
    // unbound parameters are drawn from [-1, 1]
    let mut free = Vec::new();
    for s in cand.form.expr().free_symbols() {
        let name = s.name().to_string();
        if !["x", "t", "u"].contains(&name.as_str()) && !values.contains_key(&name) {
            free.push(name);
        }
    }
    for name in &free {
        cand = cand.with_param(name, -1.0, 1.0);
    }
    let samples: Vec<ParamValues> = if free.is_empty() {
        vec![values.clone()]
    } else {
        cand.param_samples(seed, 4)
            .into_iter()
            .map(|mut s| {
                s.extend(values.clone());
                s
            })
            .collect()
    };
    let mut worst = 0.0f64;
    let mut points = 0;
    let mut rejected = 0;
    let mut failures = 0;
    for s in &samples {
        let r = residual(&pde, &cand, &grid, s);
        worst = worst.max(r.max_abs);
        points += r.points;
        rejected += r.rejected;
        failures += r.failures.len();
    }
    let passed = points > 0 && worst <= tol;
    let table = format!(
        "solution: {}\nmax |residual|: {worst:e}\npoints: {points}, rejected: {rejected}, newton failures: {failures}\ntolerance: {tol:e}\nverdict: {}\n",
        cand.form,
        if passed { "pass" } else { "fail" }
    );
    Ok(Output {
        json: json!({
            "solution": cand.form.to_string(),
            "grid": grid,
            "parameter_samples": samples,
            "max_abs": worst,
            "points": points,
            "rejected": rejected,
            "newton_failures": failures,
            "tolerance": tol,
            "passed": passed,
        }),
        table,
        disagreement: (!passed).then(|| format!("residual {worst:e} exceeds {tol:e}")),
    })
}

fn reduce_cmd(label: &str) -> Result<Output, Failure> {
    let fx = Fixture::born_infeld();
    let idx = fx
        .labels()
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| usage(format!("unknown generator {label}")))?;
    let gens = fx.generators().map_err(usage)?;
    let row = fx
        .invariant_row
        .iter()
        .find(|r| r.generator == idx + 1)
        .ok_or_else(|| usage(format!("no reduction data for {label}")))?;
    let Some(ansatz) = row.ansatz(&gens[idx]).map_err(usage)? else {
        return Err(usage(format!(
            "{label} admits no reduction: {}",
            row.out_of_scope.as_deref().unwrap_or("no ansatz")
        )));
    };
    let r = reduce(&Pde::born_infeld(), &ansatz).map_err(usage)?;
    let spec = row.reduction.as_ref().expect("ansatz implies reduction data");
    let table = format!(
        "generator: {label} = {}\ninvariants: {}\nansatz: y = {}, u = {}\nchart: {} = {} ({})\nreduced equation: {} = 0\nprefactor: {}\n",
        gens[idx],
        row.invariants.join(", "),
        spec.y,
        spec.g,
        spec.chart_var,
        spec.chart,
        r.chart,
        r.ode,
        r.prefactor
    );
    Ok(Output {
        json: json!({
            "generator": label,
            "invariants": row.invariants,
            "y": spec.y,
            "u": spec.g,
            "chart": format!("{} = {}", spec.chart_var, spec.chart),
            "chart_domain": r.chart,
            "ode": r.ode.to_string(),
            "prefactor": r.prefactor.to_string(),
        }),
        table,
        disagreement: None,
    })
}

fn reproduce_paper(out: Option<&PathBuf>, g: &Global) -> Result<Output, Failure> {
    let claims = report::reproduce_paper_with(&report::ReportConfig {
        seed: g.seed,
        tol: g.tol,
        ..report::ReportConfig::default()
    });
    let counts = report::status_counts(&claims);
    let summary: Vec<String> = counts.iter().map(|(s, n)| format!("{}: {n}", status_name(*s))).collect();
    eprintln!("{} claims ({})", claims.len(), summary.join(", "));
    let mismatches: Vec<&str> = claims.iter().filter(|c| c.status == Status::Mismatch).map(|c| c.claim_id.as_str()).collect();
    let disagreement = (!mismatches.is_empty()).then(|| format!("mismatched claims: {}", mismatches.join(", ")));
    let json_text = report::to_json(&claims);
    let mut table = String::new();
    let w = claims.iter().map(|c| c.claim_id.len()).max().unwrap_or(0);
    for c in &claims {
        writeln!(table, "{:<w$}  {}", c.claim_id, status_name(c.status)).unwrap();
    }
    if let Some(path) = out {
        std::fs::write(path, format!("{json_text}\n")).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        eprintln!("report written to {}", path.display());
        return Ok(Output {
            json: Value::Null,
            table: String::new(),
            disagreement,
        });
    }
    Ok(Output {
        json: serde_json::from_str(&json_text).expect("round trip"),
        table,
        disagreement,
    })
}

fn status_name(s: Status) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Symmetries { pde, ansatz_degree, emit } => symmetries(pde, *ansatz_degree, *emit),
        Command::BracketTable => bracket_table(),
        Command::AlgebraStructure => algebra_structure(),
        Command::Adjoint { generator, epsilon } => adjoint(*generator, *epsilon),
        Command::OptimalSystem { vet } => optimal_system(*vet, g.seed),
        Command::VerifySolution { pde, solution, grid, params } => verify_solution(pde, solution, grid, params, g.tol, g.seed),
        Command::Reduce { generator } => reduce_cmd(generator),
        Command::ReproducePaper { out } => reproduce_paper(out.as_ref(), g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| {
        let printable = !(o.json.is_null() && o.table.is_empty());
        if printable {
            match cli.global.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&o.json).expect("json")),
                Format::Table => print!("{}", o.table),
            }
        }
        match o.disagreement {
            Some(why) if cli.global.strict => Err(Failure::Strict(why)),
            Some(why) => {
                eprintln!("note: {why}");
                Ok(())
            }
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Strict(why)) => {
            eprintln!("strict: {why}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(why)) => {
            eprintln!("error: {why}");
            ExitCode::from(2)
        }
    }
}
