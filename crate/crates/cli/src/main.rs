//! `gqft`: Gaussian data, gluing checks, path sums, Feynman expansions, quadrature and the
//! acceptance suite from the command line.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gqft::feynman::{enumerate_feynman_graphs, z_pert_closed, GraphMode, Potential};
use gqft::gaussian::continuum::{convergence_slopes, sweep, BoundaryCondition, Shape, SweepConfig};
use gqft::gaussian::{gaussian_data, relative_data};
use gqft::gluing::gluing_check;
use gqft::graph::{BoundaryMarking, GluingSpec, Graph};
use gqft::io::{parse, GraphFile};
use gqft::linalg::{Mat, Vector};
use gqft::nonpert::{z_nonpert, z_rel_nonpert, MonteCarlo, QuadratureScheme, DEFAULT_NODES};
use gqft::pathsum::{enumerate_paths, PathKind, PathMode, Weights};
use gqft::verify;
use serde_json::{json, Value};

use output::{csv, envelope, json, Cell};

#[derive(Debug, Parser)]
#[command(name = "gqft", version, about)]
struct Cli {
    /// Indented JSON and aligned tables instead of compact JSON and CSV.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Propagator and determinant, or relative data when a boundary is given.
    Compute {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        m2: f64,
        /// Comma-separated boundary vertex ids; overrides the file's boundary marking.
        #[arg(long, value_delimiter = ',')]
        boundary: Option<Vec<String>>,
    },
    /// Glues two graphs along identified boundaries and checks the gluing formulas.
    GlueCheck {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Pairs `left=right` of identified boundary vertices, comma-separated.
        #[arg(long, value_delimiter = ',')]
        identify: Vec<String>,
        #[arg(long)]
        m2: f64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Scaled lattice quantities against their continuum limits.
    SweepContinuum {
        #[arg(long)]
        shape: String,
        /// DD, NN or DN for lines; closed (the default) for circles.
        #[arg(long)]
        bc: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        epsilons: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Paths between two vertices by length, with their weights and partial sums.
    Pathsum {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        m2: f64,
        #[arg(long)]
        max_len: usize,
        /// Start vertex id; defaults to the first vertex.
        #[arg(long)]
        from: Option<String>,
        /// End vertex id; defaults to the second vertex.
        #[arg(long)]
        to: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Feynman graphs up to an order, and the perturbative expansion on a graph if given.
    Feynman {
        #[arg(long)]
        order: u32,
        /// For example `p3=1,p4=0.5`.
        #[arg(long)]
        potential: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        m2: f64,
        #[arg(long, default_value_t = 0.1)]
        hbar: f64,
    },
    /// Partition function by quadrature, relative to the file's boundary when `--phi` is given.
    Nonpert {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        m2: f64,
        #[arg(long, default_value = "")]
        potential: String,
        #[arg(long)]
        hbar: f64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        quad_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo samples beyond the tensor limits; 0 disables the fallback.
        #[arg(long, default_value_t = 1 << 16)]
        mc_samples: usize,
        /// Boundary field, in the order of the boundary vertex ids.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi: Option<Vec<f64>>,
    },
    /// The acceptance suite.
    VerifyAll {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<usize>>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<gqft::Error> for Failure {
    fn from(e: gqft::Error) -> Failure {
        let (code, kind) = if e.is_numerical() {
            (3, "numerical")
        } else {
            (2, "input")
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        code: 2,
        kind: "input",
        message,
    }
}

/// A verb's result before rendering.
enum Output {
    Json {
        config: Value,
        result: Value,
        verified: bool,
    },
    Table {
        config: Value,
        header: &'static [&'static str],
        rows: Vec<Vec<Cell>>,
    },
    Suite {
        config: Value,
        results: Vec<verify::CriterionResult>,
    },
}

fn data(config: Value, result: Value) -> Output {
    Output::Json {
        config,
        result,
        verified: true,
    }
}

/// `(stdout, stderr, verified)`; tabular output puts its config block on stderr.
fn render(out: Output, pretty: bool) -> (String, Option<String>, bool) {
    let config_block = |config: &Value| Some(json(&json!({ "config": config }), false));
    match out {
        Output::Json {
            config,
            result,
            verified,
        } => (json(&envelope(config, result), pretty), None, verified),
        Output::Table {
            config,
            header,
            rows,
        } => (csv(header, &rows, pretty), config_block(&config), true),
        Output::Suite { config, results } => {
            let verified = results.iter().all(|r| r.passed);
            if pretty {
                let lines: Vec<String> = results.iter().map(|r| r.line()).collect();
                (lines.join("\n"), config_block(&config), verified)
            } else {
                let result = json!({ "passed": verified, "criteria": results });
                (json(&envelope(config, result), false), None, verified)
            }
        }
    }
}

fn load(path: &Path) -> Result<GraphFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        kind: "io",
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(parse(&text)?)
}

fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn ids(g: &Graph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| g.id(v).to_string()).collect()
}

fn check_finite(name: &str, x: f64) -> Result<(), Failure> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(input_error(format!("--{name} must be finite, got {x}")))
    }
}

fn compute(graph: &Path, m2: f64, boundary: Option<Vec<String>>) -> Result<Output, Failure> {
    check_finite("m2", m2)?;
    let file = load(graph)?;
    let g = &file.graph;
    let marking = match boundary {
        Some(list) => Some(BoundaryMarking::induced(g, &list)?),
        None => file.boundary.clone(),
    };
    let config = json!({
        "verb": "compute",
        "graph": graph.display().to_string(),
        "m2": m2,
        "boundary": marking.as_ref().map(|y| y.ids(g)),
    });
    let result = match marking {
        None => {
            let gd = gaussian_data(g, m2)?;
            json!({
                "vertices": g.vertex_ids(),
                "det": gd.det,
                "log_det": gd.log_det,
                "propagator": rows(&gd.propagator),
            })
        }
        Some(y) => {
            let rd = relative_data(g, &y, m2)?;
            json!({
                "bulk": ids(g, &rd.bulk),
                "boundary": ids(g, &rd.boundary),
                "det": rd.det,
                "log_det": rd.log_det,
                "propagator": rows(&rd.propagator),
                "dn": rows(&rd.dn),
                "ext": rows(&rd.ext),
            })
        }
    };
    Ok(data(config, result))
}

fn pairs(list: &[String]) -> Result<Vec<(String, String)>, Failure> {
    list.iter()
        .map(|p| {
            p.split_once('=')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| {
                    input_error(format!(
                        "identification `{p}` is not of the form left=right"
                    ))
                })
        })
        .collect()
}

fn side_marking(file: &GraphFile, identified: Vec<&String>) -> Result<BoundaryMarking, Failure> {
    Ok(match &file.boundary {
        Some(y) => y.clone(),
        None => BoundaryMarking::vertices_only(&file.graph, identified)?,
    })
}

fn glue_check(
    left: &Path,
    right: &Path,
    identify: &[String],
    m2: f64,
    tolerance: f64,
) -> Result<Output, Failure> {
    check_finite("m2", m2)?;
    let identification = pairs(identify)?;
    let (lf, rf) = (load(left)?, load(right)?);
    let spec = GluingSpec {
        left_boundary: side_marking(&lf, identification.iter().map(|p| &p.0).collect())?,
        right_boundary: side_marking(&rf, identification.iter().map(|p| &p.1).collect())?,
        left: lf.graph,
        right: rf.graph,
        identification,
    };
    let report = gluing_check(&spec, m2)?;
    let verified =
        report.propagator.residual < tolerance && report.determinant.residual < tolerance;
    let config = json!({
        "verb": "glue-check",
        "left": left.display().to_string(),
        "right": right.display().to_string(),
        "identification": spec.identification,
        "m2": m2,
        "tolerance": tolerance,
    });
    Ok(Output::Json {
        config,
        result: json!({ "report": report, "passed": verified }),
        verified,
    })
}

fn sweep_continuum(
    shape: &str,
    bc: Option<&str>,
    length: f64,
    mass: f64,
    epsilons: &[f64],
    format: Format,
) -> Result<Output, Failure> {
    let shape: Shape = shape.parse()?;
    let bc: BoundaryCondition = match (shape, bc) {
        (_, Some(bc)) => bc.parse()?,
        (Shape::Line, None) => BoundaryCondition::DirichletDirichlet,
        (Shape::Circle, None) => BoundaryCondition::Closed,
    };
    for (name, x) in [("length", length), ("mass", mass)] {
        check_finite(name, x)?;
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(input_error("epsilons must be positive".into()));
    }
    let cfg = SweepConfig::new(shape, bc, length, mass);
    let rows = sweep(&cfg, epsilons)?;
    let config = json!({
        "verb": "sweep-continuum",
        "shape": shape,
        "bc": bc,
        "length": length,
        "mass": mass,
        "x": cfg.x,
        "y": cfg.y,
        "epsilons": epsilons,
    });
    Ok(match format {
        Format::Json => {
            let slopes: Vec<Value> = convergence_slopes(&rows)
                .into_iter()
                .map(|(q, s)| json!({ "quantity": q, "slope": s }))
                .collect();
            data(config, json!({ "rows": rows, "slopes": slopes }))
        }
        Format::Csv => {
            let table: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Float(r.epsilon),
                        Cell::Int(r.vertices as i128),
                        Cell::Text(r.quantity.clone()),
                        Cell::Float(r.value),
                        Cell::Float(r.target),
                        Cell::Float(r.relative_error),
                        Cell::Text(r.degenerate.to_string()),
                    ]
                })
                .collect();
            Output::Table {
                config,
                header: &[
                    "epsilon",
                    "vertices",
                    "quantity",
                    "value",
                    "target",
                    "relative_error",
                    "degenerate",
                ],
                rows: table,
            }
        }
    })
}

fn pathsum(
    graph: &Path,
    m2: f64,
    max_len: usize,
    from: Option<String>,
    to: Option<String>,
    format: Format,
) -> Result<Output, Failure> {
    check_finite("m2", m2)?;
    let file = load(graph)?;
    let g = &file.graph;
    let pick = |id: Option<String>, default: usize| -> Result<usize, Failure> {
        match id {
            Some(id) => Ok(g.index_of(&id)?),
            None => Ok(default.min(g.n().saturating_sub(1))),
        }
    };
    let (u, v) = (pick(from, 0)?, pick(to, 1)?);
    let weights = Weights::new(g, m2);
    let none = BoundaryMarking::empty(g);
    let paths = enumerate_paths(g, &none, u, v, max_len, PathMode::All, PathKind::Plain);
    let mut partial = 0.0;
    let table: Vec<(usize, usize, f64, f64)> = (0..=max_len)
        .map(|k| {
            let of_len: Vec<_> = paths.iter().filter(|p| p.len() == k).collect();
            let coefficient = of_len.iter().fold(0.0, |acc, p| acc + weights.path(p));
            partial += coefficient;
            (k, of_len.len(), coefficient, partial)
        })
        .collect();
    let config = json!({
        "verb": "pathsum",
        "graph": graph.display().to_string(),
        "m2": m2,
        "max_len": max_len,
        "from": g.id(u),
        "to": g.id(v),
    });
    Ok(match format {
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|&(k, c, w, p)| json!({ "order": k, "count": c, "coefficient": w, "partial": p }))
                .collect();
            data(config, json!({ "rows": rows }))
        }
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = table
                .iter()
                .map(|&(k, c, w, p)| {
                    vec![
                        Cell::Int(k as i128),
                        Cell::Int(c as i128),
                        Cell::Float(w),
                        Cell::Float(p),
                    ]
                })
                .collect();
            Output::Table {
                config,
                header: &["order", "count", "coefficient", "partial"],
                rows,
            }
        }
    })
}

fn feynman(
    order: u32,
    potential: &str,
    graph: Option<&Path>,
    m2: f64,
    hbar: f64,
) -> Result<Output, Failure> {
    let pot: Potential = potential.parse()?;
    let graphs = enumerate_feynman_graphs(&pot, order, GraphMode::Closed)?;
    let listed: Vec<Value> = graphs
        .iter()
        .map(|gamma| {
            json!({
                "canonical": gamma.canonical(),
                "order": gamma.twice_order() / 2,
                "vertices": gamma.num_vertices(),
                "edges": gamma.edges(),
                "aut": gamma.aut(),
                "aut_by_darts": gamma.count_automorphisms_by_darts(),
                "connected": gamma.is_connected(),
            })
        })
        .collect();
    let mut config = json!({ "verb": "feynman", "order": order, "potential": pot.to_string() });
    let mut result = json!({ "graphs": listed });
    if let Some(path) = graph {
        check_finite("m2", m2)?;
        check_finite("hbar", hbar)?;
        let file = load(path)?;
        let e = z_pert_closed(&file.graph, m2, &pot, hbar, order)?;
        config["graph"] = json!(path.display().to_string());
        config["m2"] = json!(m2);
        config["hbar"] = json!(hbar);
        result["expansion"] = serde_json::to_value(&e).expect("expansion serializes");
    }
    Ok(data(config, result))
}

#[allow(clippy::too_many_arguments)]
fn nonpert(
    graph: &Path,
    m2: f64,
    potential: &str,
    hbar: f64,
    quad_nodes: usize,
    seed: u64,
    mc_samples: usize,
    phi: Option<Vec<f64>>,
) -> Result<Output, Failure> {
    check_finite("m2", m2)?;
    let pot: Potential = potential.parse()?;
    let file = load(graph)?;
    let scheme = QuadratureScheme {
        nodes: quad_nodes,
        monte_carlo: (mc_samples > 0).then_some(MonteCarlo {
            samples: mc_samples,
            seed,
        }),
    };
    let mut config = json!({
        "verb": "nonpert",
        "graph": graph.display().to_string(),
        "m2": m2,
        "potential": pot.to_string(),
        "hbar": hbar,
        "scheme": scheme,
    });
    let integral = match phi {
        None => z_nonpert(&file.graph, m2, &pot, hbar, &scheme)?,
        Some(phi) => {
            let y = file.boundary.as_ref().ok_or_else(|| {
                input_error("--phi needs a boundary marking in the graph file".into())
            })?;
            config["boundary"] = json!(y.ids(&file.graph));
            config["phi"] = json!(phi);
            z_rel_nonpert(
                &file.graph,
                y,
                m2,
                &pot,
                hbar,
                &Vector::from_vec(phi),
                &scheme,
            )?
        }
    };
    Ok(data(
        config,
        serde_json::to_value(integral).expect("integral serializes"),
    ))
}

fn verify_all(seed: u64, criteria: Option<Vec<usize>>) -> Result<Output, Failure> {
    let ids = criteria.unwrap_or_else(|| (1..=verify::CRITERIA).collect());
    if let Some(bad) = ids
        .iter()
        .find(|&&id| !(1..=verify::CRITERIA).contains(&id))
    {
        return Err(input_error(format!(
            "no criterion {bad}; criteria run from 1 to {}",
            verify::CRITERIA
        )));
    }
    let results = ids.iter().map(|&id| verify::run(id, seed)).collect();
    Ok(Output::Suite {
        config: json!({ "verb": "verify-all", "seed": seed, "criteria": ids }),
        results,
    })
}

fn dispatch(verb: Verb) -> Result<Output, Failure> {
    match verb {
        Verb::Compute {
            graph,
            m2,
            boundary,
        } => compute(&graph, m2, boundary),
        Verb::GlueCheck {
            left,
            right,
            identify,
            m2,
            tolerance,
        } => glue_check(&left, &right, &identify, m2, tolerance),
        Verb::SweepContinuum {
            shape,
            bc,
            length,
            mass,
            epsilons,
            format,
        } => sweep_continuum(&shape, bc.as_deref(), length, mass, &epsilons, format),
        Verb::Pathsum {
            graph,
            m2,
            max_len,
            from,
            to,
            format,
        } => pathsum(&graph, m2, max_len, from, to, format),
        Verb::Feynman {
            order,
            potential,
            graph,
            m2,
            hbar,
        } => feynman(order, &potential, graph.as_deref(), m2, hbar),
        Verb::Nonpert {
            graph,
            m2,
            potential,
            hbar,
            quad_nodes,
            seed,
            mc_samples,
            phi,
        } => nonpert(
            &graph, m2, &potential, hbar, quad_nodes, seed, mc_samples, phi,
        ),
        Verb::VerifyAll { seed, criteria } => verify_all(seed, criteria),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!(
        "{}",
        json(
            &json!({ "error": { "kind": f.kind, "message": f.message } }),
            false
        )
    );
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(Failure {
                code: 2,
                kind: "usage",
                message: e.to_string().trim().to_string(),
            })
        }
    };
    match dispatch(cli.verb) {
        Ok(out) => {
            let (stdout, stderr, verified) = render(out, cli.pretty);
            if let Some(s) = stderr {
                eprintln!("{s}");
            }
            print!("{stdout}");
            if !stdout.ends_with('\n') {
                println!();
            }
            if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => fail(f),
    }
}
