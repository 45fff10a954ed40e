//! `polarcalc`: Newton polygons, Puiseux roots, polar quotients and
//! gradient exponents of plane curve germs from the command line.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polar_core::newton::NewtonDiagram;
use polar_core::rat::{fmt_rat, parse_rat};
use polar_core::{
    default_depth, ell_of_arc, expand_roots, format_arc, format_poly, format_univariate,
    gradient_exponent_complex, gradient_exponent_real, intersection_multiplicity, mini_regularize,
    numeric_exponent_estimate, parse_arc, parse_poly, polar_quotients, relative_diagram, Error,
    GenericSampler, InvariantReport, NumericContext, Rat, Route, Settings,
};
use serde_json::{json, Value};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "polarcalc",
    version,
    about = "Polar invariants of plane curve germs at the origin"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Ground field for gradient exponents.
    #[arg(long, value_enum, default_value_t = FieldArg::Complex, global = true)]
    field: FieldArg,

    /// Expansion depth as p/q; deepened automatically when a certificate needs it.
    #[arg(long, global = true)]
    depth: Option<String>,

    /// Working precision of approximate coefficients.
    #[arg(long, default_value_t = 256, global = true)]
    precision_bits: usize,

    /// Relative zero-test tolerance, written 10^-k.
    #[arg(long, global = true)]
    tolerance: Option<String>,

    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton-Puiseux roots with multiplicities and contact orders.
    Roots {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Newton polygon of f relative to an arc.
    Polygon {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        arc: String,
        /// Write a plain-text dot/edge dump for plotting to this path.
        #[arg(long)]
        emit_diagram: Option<String>,
    },
    /// Polar quotients.
    Quotients {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
    },
    /// Lojasiewicz gradient exponent.
    Lojasiewicz {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Degree bounds on the gradient and classical exponents.
    Bounds {
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Intersection multiplicity i(f, g).
    Imult {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Log-log estimate of the arc exponent next to its exact value.
    Estimate {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        arc: String,
        #[arg(long, default_value_t = 1e-6)]
        t_min: f64,
        #[arg(long, default_value_t = 1e-3)]
        t_max: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RouteArg {
    Polar,
    Approximations,
    Both,
}

impl RouteArg {
    fn route(self) -> Route {
        match self {
            RouteArg::Polar => Route::PolarBranches,
            RouteArg::Approximations => Route::Approximations,
            RouteArg::Both => Route::Both,
        }
    }
}

enum Failure {
    Input(String),
    Certification(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else if e.is_certification_failure() {
            Failure::Certification(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn parse_tolerance(s: &str) -> Result<u32, Failure> {
    let k = s
        .strip_prefix("10^-")
        .or_else(|| s.strip_prefix("1e-"))
        .and_then(|k| k.trim_matches(|c| c == '(' || c == ')').parse::<u32>().ok())
        .filter(|k| *k > 0);
    k.ok_or_else(|| Failure::Input(format!("tolerance must look like 10^-k, got {s:?}")))
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut ctx = NumericContext::with_precision(cli.precision_bits);
    if let Some(t) = &cli.tolerance {
        ctx = ctx.tolerance_decimal(parse_tolerance(t)?);
    }
    let depth = match &cli.depth {
        Some(d) => {
            let r = parse_rat(d).filter(|r| r > &Rat::from_integer(0.into()));
            Some(r.ok_or_else(|| {
                Failure::Input(format!("depth must be a positive p/q, got {d:?}"))
            })?)
        }
        None => None,
    };
    Ok(Settings {
        ctx,
        seed: cli.seed,
        depth,
    })
}

fn header(cli: &Cli, command: &str, input: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "input": input,
        "field": match cli.field { FieldArg::Real => "real", FieldArg::Complex => "complex" },
        "seed": cli.seed,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        for (k, v) in e {
            b.insert(k, v);
        }
    }
    base
}

fn report(cli: &Cli, f: &polar_core::BivarPoly, s: &Settings) -> Result<InvariantReport, Failure> {
    Ok(match cli.field {
        FieldArg::Complex => gradient_exponent_complex(f, s)?,
        FieldArg::Real => gradient_exponent_real(f, s)?,
    })
}

fn report_text(r: &InvariantReport, out: &mut String) {
    let _ = writeln!(out, "field: {}", r.field.name());
    let _ = writeln!(out, "shear: {}", r.shear.value);
    let _ = writeln!(out, "m = {}, d = {}", r.m, r.d);
    let q: Vec<String> = r.quotients.values.iter().map(fmt_rat).collect();
    let _ = writeln!(out, "polar quotients: {{{}}}", q.join(", "));
    if let Some(lp) = &r.l_plus {
        let _ = writeln!(out, "L_plus = {}", fmt_rat(lp));
    }
    if let Some(lm) = &r.l_minus {
        let _ = writeln!(out, "L_minus = {}", fmt_rat(lm));
    }
    let _ = writeln!(out, "L = {}", fmt_rat(&r.l));
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness: {}", format_arc(&w.series));
    }
}

fn bounds_text(r: &InvariantReport, out: &mut String) {
    let b = &r.bounds;
    let _ = writeln!(out, "gradient bound: {}", fmt_rat(&b.gradient));
    let _ = writeln!(out, "classical bound: {}", fmt_rat(&b.classical));
    let _ = writeln!(
        out,
        "classical bound via L: {}",
        fmt_rat(&b.classical_via_l)
    );
    let _ = writeln!(out, "satisfied: {}", b.satisfied);
}

fn diagram_text(d: &NewtonDiagram, out: &mut String) {
    let dots: Vec<String> = d
        .dots
        .iter()
        .map(|p| format!("({},{})", p.i, fmt_rat(&p.h)))
        .collect();
    let _ = writeln!(out, "dots: {}", dots.join(" "));
    for e in &d.edges {
        let _ = writeln!(
            out,
            "edge ({},{}) -- ({},{}): tan_theta = {}, E(z) = {}",
            e.left.0,
            fmt_rat(&e.left.1),
            e.right.0,
            fmt_rat(&e.right.1),
            fmt_rat(&e.tan_theta),
            format_univariate(&e.poly, "z")
        );
    }
    if let Some(h) = d.highest_edge() {
        let _ = writeln!(
            out,
            "highest edge: E_H(z) = {}",
            format_univariate(&h.poly, "z")
        );
    }
    let _ = writeln!(out, "h0 = {}, h1 = {}", d.h0, d.h1);
}

fn run(cli: &Cli) -> Result<(String, Option<Value>), Failure> {
    let s = settings(cli)?;
    let mut out = String::new();
    let poly = |t: &str| parse_poly(t).map_err(Failure::from);
    let json = match &cli.command {
        Command::Roots { f } => {
            let fp = poly(f)?;
            let mut sampler = GenericSampler::new(cli.seed);
            let (fs, shear, m) = mini_regularize(&fp, &mut sampler)?;
            let depth = match &s.depth {
                Some(d) => d.clone().max(default_depth(&fp)),
                None => default_depth(&fp),
            };
            let mut set = expand_roots(&fs, &depth, s.ctx)?;
            set.shear = Some(shear.clone());
            let _ = writeln!(out, "shear: {}, m = {}", shear.value, m);
            for (k, b) in set.branches.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "[{k}] {}  (multiplicity {})",
                    format_arc(&b.series),
                    b.multiplicity
                );
            }
            for i in 0..set.len() {
                for j in i + 1..set.len() {
                    let _ = writeln!(out, "contact [{i}] [{j}] = {}", set.contact[i][j]);
                }
            }
            merge(
                header(cli, "roots", json!({"f": format_poly(&fp)})),
                json!({"m": m, "d": fp.degree(), "shear": shear.value.to_string(), "roots": set.to_json()}),
            )
        }
        Command::Polygon {
            f,
            arc,
            emit_diagram,
        } => {
            let fp = poly(f)?;
            let phi = parse_arc(arc)?;
            let d = relative_diagram(&fp, &phi)?;
            if let Some(path) = emit_diagram {
                std::fs::write(path, d.plot_dump())
                    .map_err(|e| Failure::Input(format!("cannot write {path}: {e}")))?;
            }
            diagram_text(&d, &mut out);
            merge(
                header(
                    cli,
                    "polygon",
                    json!({"f": format_poly(&fp), "arc": format_arc(&phi)}),
                ),
                json!({"diagram": d.to_json(), "tolerance_decisions": d.tolerance_decisions}),
            )
        }
        Command::Quotients { f, route } => {
            let fp = poly(f)?;
            let q = polar_quotients(&fp, route.route(), &s)?;
            let vals: Vec<String> = q.values.iter().map(fmt_rat).collect();
            let _ = writeln!(out, "polar quotients: {{{}}}", vals.join(", "));
            let route = match q.route {
                Route::PolarBranches => "polar",
                Route::Approximations => "approximations",
                Route::Both => "both",
            };
            merge(
                header(cli, "quotients", json!({"f": format_poly(&fp)})),
                json!({"route": route, "quotients": q.to_json()}),
            )
        }
        Command::Lojasiewicz { f } => {
            let fp = poly(f)?;
            let r = report(cli, &fp, &s)?;
            report_text(&r, &mut out);
            merge(
                header(cli, "lojasiewicz", json!({"f": format_poly(&fp)})),
                r.to_json(),
            )
        }
        Command::Bounds { f } => {
            let fp = poly(f)?;
            let r = report(cli, &fp, &s)?;
            let _ = writeln!(out, "L = {}, d = {}", fmt_rat(&r.l), r.d);
            bounds_text(&r, &mut out);
            merge(
                header(cli, "bounds", json!({"f": format_poly(&fp)})),
                r.to_json(),
            )
        }
        Command::Imult { f, g } => {
            let (fp, gp) = (poly(f)?, poly(g)?);
            let i = intersection_multiplicity(&fp, &gp, &s)?;
            let _ = writeln!(out, "i(f, g) = {i}");
            merge(
                header(
                    cli,
                    "imult",
                    json!({"f": format_poly(&fp), "g": format_poly(&gp)}),
                ),
                json!({"imult": i.to_text()}),
            )
        }
        Command::Estimate {
            f,
            arc,
            t_min,
            t_max,
            samples,
        } => {
            let fp = poly(f)?;
            let phi = parse_arc(arc)?;
            let exact = ell_of_arc(&fp, &phi)?;
            let est = numeric_exponent_estimate(&fp, &phi, *t_min, *t_max, *samples)?;
            let _ = writeln!(out, "exact ell = {}", fmt_rat(&exact));
            let _ = writeln!(out, "estimate = {est:.6}");
            merge(
                header(
                    cli,
                    "estimate",
                    json!({"f": format_poly(&fp), "arc": format_arc(&phi)}),
                ),
                json!({
                    "ell": fmt_rat(&exact),
                    "estimate": format!("{est:.6}"),
                    "t_min": t_min,
                    "t_max": t_max,
                    "samples": samples,
                }),
            )
        }
    };
    Ok((out, Some(json)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, json)) => {
            match (cli.format, json) {
                (Format::Json, Some(v)) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&v).expect("serializable")
                    );
                }
                _ => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Certification(m)) => {
            eprintln!("certification failed: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(4)
        }
    }
}
