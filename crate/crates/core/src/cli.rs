//! Command-line front end. [`run`] parses arguments, dispatches, and
//! returns the process exit code: 0 on success, 2 for invalid input,
//! 3 when two pipelines disagree.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::cluster::{self, ClusterError, ExchangeMatrix, Seed};
use crate::fixtures;
use crate::poly::LaurentPolynomial;
use crate::render::{self, Format};
use crate::repalg::{self, Quiver, RepError, SymmetricContext};
use crate::snake::{self, SnakeError, SnakeGraph};
use crate::surface::{ArcPath, ArcSpec, Orbit, OrbitSpec, SurfaceError, Triangulation};
use crate::verify::{self, VerifyError};

#[derive(Parser, Debug)]
#[command(name = "snakefold", version, about = "Cluster expansions of arcs and orbits on surfaces with a basepoint")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct TriArg {
    /// Triangulation JSON file, or one of the built-in names
    /// running, annulus, quadrilateral, pentagon.
    #[arg(long)]
    pub triangulation: String,
}

#[derive(Args, Debug, Clone)]
pub struct ArcArg {
    /// Arc JSON file, or inline crossing labels such as "4,5".
    #[arg(long)]
    pub arc: Option<String>,
    /// Inline arcs end at the basepoint.
    #[arg(long)]
    pub to_basepoint: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mutate the principal seed of a matrix along a sequence (1-based).
    Mutate {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "")]
        sequence: String,
    },
    /// Enumerate all cluster variables reachable from the principal seed.
    Enumerate {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 32)]
        depth: usize,
    },
    /// Snake graph of an arc: tiles, matchings, F and g.
    Snake {
        #[command(flatten)]
        tri: TriArg,
        #[command(flatten)]
        arc: ArcArg,
    },
    /// Expansion of an orbit, cross-checked against the module side.
    Orbit {
        #[command(flatten)]
        tri: TriArg,
        #[arg(long)]
        orbit: String,
    },
    /// Quiver with relations and involution of the reflected double.
    Quiver {
        #[command(flatten)]
        tri: TriArg,
    },
    /// String module of an arc, or the symmetric module of an orbit.
    Module {
        #[command(flatten)]
        tri: TriArg,
        #[command(flatten)]
        arc: ArcArg,
        #[arg(long)]
        orbit: Option<String>,
    },
    /// Built-in consistency checks: golden, b2, b3, sweep or all.
    Verify {
        #[arg(long, default_value = "all")]
        case: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Draw a snake graph, an orbit graph or a triangulation.
    Render {
        #[command(flatten)]
        tri: TriArg,
        #[command(flatten)]
        arc: ArcArg,
        #[arg(long)]
        orbit: Option<String>,
        #[arg(long, default_value = "svg")]
        format: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::CrossCheck(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Validation(_) => "ValidationError",
            CliError::CrossCheck(_) => "CrossCheckFailed",
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SnakeError> for CliError {
    fn from(e: SnakeError) -> Self {
        match e {
            SnakeError::CrossCheckFailed(_) => CliError::CrossCheck(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::CrossCheckFailed { .. } => CliError::CrossCheck(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        if e.is_cross_check() {
            CliError::CrossCheck(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Errors go to `err` as a one-line JSON record.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{}", text);
            } else {
                let _ = write!(err, "{}", text);
            }
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            let _ = write!(out, "{}", text);
            0
        }
        Err(e) => {
            let record = json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(err, "{}", record);
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let v = match &cli.command {
        Command::Mutate { matrix, sequence } => cmd_mutate(matrix, sequence)?,
        Command::Enumerate { matrix, depth } => cmd_enumerate(matrix, *depth)?,
        Command::Snake { tri, arc } => cmd_snake(tri, arc)?,
        Command::Orbit { tri, orbit } => cmd_orbit(tri, orbit)?,
        Command::Quiver { tri } => cmd_quiver(tri)?,
        Command::Module { tri, arc, orbit } => cmd_module(tri, arc, orbit.as_deref())?,
        Command::Verify { case, seed } => cmd_verify(case, *seed)?,
        Command::Render { tri, arc, orbit, format } => {
            let f: Format = format.parse().map_err(CliError::Validation)?;
            return cmd_render(tri, arc, orbit.as_deref(), f);
        }
    };
    Ok(if cli.json { format!("{}\n", serde_json::to_string_pretty(&v.json).expect("json")) } else { v.text })
}

struct Output {
    text: String,
    json: Value,
}

fn read_json<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    let body = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Parse(format!("{}: {}", arg, e)))?
    };
    serde_json::from_str(&body).map_err(|e| CliError::Parse(format!("{}: {}", arg, e)))
}

fn load_triangulation(arg: &TriArg) -> Result<Triangulation, CliError> {
    let name = arg.triangulation.as_str();
    if !Path::new(name).exists() {
        match name {
            "running" => return Ok(fixtures::running()),
            "annulus" => return Ok(fixtures::annulus()),
            "quadrilateral" | "pentagon" => {
                let (_, t) = fixtures::sweep_surfaces().into_iter().find(|(n, _)| *n == name).expect("fixture");
                return Ok(t);
            }
            _ => {}
        }
    }
    let spec = read_json(name)?;
    Ok(Triangulation::from_spec(&spec)?)
}

fn load_arc(t: &Triangulation, arg: &ArcArg) -> Result<ArcPath, CliError> {
    let a = arg.arc.as_deref().ok_or_else(|| CliError::Validation("--arc is required".into()))?;
    let spec = if Path::new(a).exists() || a.trim_start().starts_with('{') {
        read_json::<ArcSpec>(a)?
    } else {
        let cross: Vec<String> = a.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        ArcSpec { cross, hints: None, to_basepoint: arg.to_basepoint }
    };
    Ok(t.validate_arc(&spec)?)
}

fn load_orbit(t: &Triangulation, arg: &str) -> Result<Orbit, CliError> {
    let spec: OrbitSpec = read_json(arg)?;
    Ok(t.orbit_from_spec(&spec)?)
}

fn parse_matrix(arg: &str) -> Result<ExchangeMatrix, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum M {
        Plain(Vec<Vec<i64>>),
        Wrapped { b: Vec<Vec<i64>> },
    }
    let b = match read_json::<M>(arg)? {
        M::Plain(b) | M::Wrapped { b } => b,
    };
    Ok(ExchangeMatrix::new(b)?)
}

fn vec_str(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn poly_json(p: &LaurentPolynomial) -> Value {
    json!({ "text": p.to_string(), "terms": p.len() })
}

fn cmd_mutate(matrix: &str, sequence: &str) -> Result<Output, CliError> {
    let b = parse_matrix(matrix)?;
    let mut ks = Vec::new();
    for s in sequence.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let k: usize = s.parse().map_err(|_| CliError::Parse(format!("bad mutation index {:?}", s)))?;
        if k == 0 || k > b.rank() {
            return Err(CliError::Validation(format!("mutation index {} out of range 1..={}", k, b.rank())));
        }
        ks.push(k - 1);
    }
    let seed = Seed::principal(&b).mutate_sequence(&ks)?;
    let mut text = format!("sequence: {}\nB:\n", ks.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(","));
    let bm = seed.exchange_matrix();
    for row in &bm {
        text.push_str(&format!("  {}\n", vec_str(row)));
    }
    let mut vars = Vec::new();
    for i in 0..seed.n {
        let g = seed.g_vector(i)?;
        let f = seed.f_polynomial(i);
        text.push_str(&format!("x{}' = {}\n  F = {}\n  g = {}\n", i + 1, seed.cluster[i], f, vec_str(&g)));
        vars.push(json!({ "value": seed.cluster[i].to_string(), "f": poly_json(&f), "g": g }));
    }
    Ok(Output { text, json: json!({ "sequence": ks.iter().map(|k| k + 1).collect::<Vec<_>>(), "b": bm, "cluster": vars }) })
}

fn cmd_enumerate(matrix: &str, depth: usize) -> Result<Output, CliError> {
    let b = parse_matrix(matrix)?;
    let en = cluster::enumerate(&b, depth)?;
    let mut text = format!("variables: {}\nseeds: {}\n", en.variables.len(), en.seeds);
    let mut vars = Vec::new();
    for v in &en.variables {
        text.push_str(&format!("g = {}  F = {}\n", vec_str(&v.g), v.f));
        vars.push(json!({ "g": v.g, "f": poly_json(&v.f) }));
    }
    Ok(Output { text, json: json!({ "variables": en.variables.len(), "seeds": en.seeds, "list": vars }) })
}

fn tile_lines(t: &Triangulation, g: &SnakeGraph) -> (String, Vec<Value>) {
    let mut text = String::new();
    let mut tiles = Vec::new();
    for (i, tile) in g.tiles.iter().enumerate() {
        let labels: Vec<String> = tile.edge_ids().iter().map(|&e| g.edges[e].label.render(t)).collect();
        let shape = if tile.hexagon.is_some() { "hexagon" } else { "quad" };
        text.push_str(&format!(
            "tile {}: diagonal {}, edges {}, rel {:+}, {}\n",
            i + 1,
            t.arcs[tile.diagonal],
            labels.join(" "),
            tile.rel,
            shape
        ));
        tiles.push(json!({ "diagonal": t.arcs[tile.diagonal], "edges": labels, "rel": tile.rel, "shape": shape }));
    }
    (text, tiles)
}

fn cmd_snake(tri: &TriArg, arc: &ArcArg) -> Result<Output, CliError> {
    let t = load_triangulation(tri)?;
    let a = load_arc(&t, arc)?;
    let g = snake::build_snake(&t, &a)?;
    let (mut text, tiles) = tile_lines(&t, &g);
    let (f, gv) = snake::arc_expansion(&t, &a)?;
    let m = g.perfect_matchings().len();
    text.push_str(&format!("matchings: {}\nF = {}\ng = {}\n", m, f, vec_str(&gv)));
    Ok(Output { text, json: json!({ "tiles": tiles, "matchings": m, "f": poly_json(&f), "g": gv }) })
}

fn cmd_orbit(tri: &TriArg, orbit: &str) -> Result<Output, CliError> {
    let t = load_triangulation(tri)?;
    let o = load_orbit(&t, orbit)?;
    let ctx = SymmetricContext::new(&t)?;
    let e = verify::check_orbit(&t, &ctx, &o)?;
    let (mut text, tiles) = tile_lines(&t, &e.graph);
    text.push_str(&format!("matchings: {}\nF = {}\ng = {}\n", e.matchings, e.f, vec_str(&e.g)));
    if let Some((d, q)) = &e.division {
        text.push_str(&format!("F1*F2 - F = {} * ({})\n", d, q));
    }
    text.push_str("crosscheck: OK\n");
    Ok(Output {
        text,
        json: json!({
            "tiles": tiles,
            "matchings": e.matchings,
            "f": poly_json(&e.f),
            "g": e.g,
            "division": e.division.as_ref().map(|(d, q)| json!({ "monomial": d.to_string(), "quotient": q.to_string() })),
            "crosscheck": "OK",
        }),
    })
}

fn cmd_quiver(tri: &TriArg) -> Result<Output, CliError> {
    let t = load_triangulation(tri)?;
    let ctx = SymmetricContext::new(&t)?;
    let spec = ctx.qbar.to_spec(Some(&ctx.rho));
    let mut text = format!("vertices: {}\narrows:\n", spec.vertices.join(" "));
    for a in &spec.arrows {
        text.push_str(&format!("  {}: {} -> {}\n", a.label, a.src, a.tgt));
    }
    text.push_str("relations:\n");
    for [a, b] in &spec.relations {
        text.push_str(&format!("  {}{}\n", a, b));
    }
    text.push_str(&format!("gentle: {}\n", ctx.qbar.is_gentle()));
    let json = serde_json::to_value(&spec).expect("quiver spec serializes");
    Ok(Output { text, json })
}

fn cmd_module(tri: &TriArg, arc: &ArcArg, orbit: Option<&str>) -> Result<Output, CliError> {
    let t = load_triangulation(tri)?;
    if let Some(o) = orbit {
        let o = load_orbit(&t, o)?;
        let ctx = SymmetricContext::new(&t)?;
        let m = ctx.module_of_orbit(&o)?;
        let r = repalg::orbit_module_expansion(&ctx, &m)?;
        let text = format!(
            "module: {}\ntype: {}\nF(Res) = {}\nF = {}\ng = {}\n",
            m.render(&ctx.qbar),
            r.kind,
            r.f_restricted,
            r.f,
            vec_str(&r.g)
        );
        let json = json!({
            "module": m.render(&ctx.qbar),
            "type": r.kind.to_string(),
            "f_restricted": poly_json(&r.f_restricted),
            "f": poly_json(&r.f),
            "g": r.g,
        });
        return Ok(Output { text, json });
    }
    let a = load_arc(&t, arc)?;
    let q = Quiver::of_triangulation(&t)?;
    if a.is_empty() {
        return Err(CliError::Validation("the arc has no crossings".into()));
    }
    let w = repalg::string_of_path(&q, &a)?;
    let (f, g) = verify::string_expansion(&t, &q, &a)?;
    let dim = w.dim_vector(&q);
    let text = format!("string: {}\ndim: {:?}\nF = {}\ng = {}\n", w.render(&q), dim, f, vec_str(&g));
    Ok(Output { text, json: json!({ "string": w.render(&q), "dim": dim, "f": poly_json(&f), "g": g }) })
}

fn golden() -> Result<String, CliError> {
    let t = fixtures::running();
    let spec = OrbitSpec {
        kind: "Two".into(),
        gamma1: ArcSpec { cross: vec!["4".into(), "5".into()], hints: None, to_basepoint: true },
        gamma2: Some(ArcSpec { cross: ["1", "3", "4", "5"].map(String::from).to_vec(), hints: None, to_basepoint: true }),
    };
    let o = t.orbit_from_spec(&spec)?;
    let ctx = SymmetricContext::new(&t)?;
    let e = verify::check_orbit(&t, &ctx, &o)?;
    if e.f.len() != 16 || e.matchings != 23 || e.g != vec![-1, 1, 2, -2, 2] {
        return Err(CliError::CrossCheck(format!("running orbit gives {} terms, {} matchings, g = {:?}", e.f.len(), e.matchings, e.g)));
    }
    Ok(format!("golden: running orbit F has 16 terms, 23 matchings, g = {}; OK\n", vec_str(&e.g)))
}

fn cmd_verify(case: &str, seed: u64) -> Result<Output, CliError> {
    let cases: Vec<&str> = match case {
        "all" => vec!["golden", "b2", "b3", "sweep"],
        c => c.split(',').map(str::trim).collect(),
    };
    let mut text = String::new();
    let mut records = Vec::new();
    for c in cases {
        match c {
            "golden" => {
                text.push_str(&golden()?);
                records.push(json!({ "case": "golden", "ok": true }));
            }
            "b2" | "b3" => {
                let n = if c == "b2" { 2 } else { 3 };
                let r = verify::type_b(n)?;
                text.push_str(&format!(
                    "{}: {} variables, {} seeds, {} non-initial matched by snake and module; all three pipelines agree\n",
                    c, r.variables, r.seeds, r.matched
                ));
                records.push(json!({ "case": c, "variables": r.variables, "seeds": r.seeds, "matched": r.matched }));
            }
            "sweep" => {
                for (name, t) in fixtures::sweep_surfaces() {
                    let a = verify::arc_sweep(&t, seed, 20, 6)?;
                    let o = verify::orbit_sweep(&t, seed, 10, 4)?;
                    text.push_str(&format!(
                        "sweep {}: {} arcs ({} distinct), {} orbits ({} smoothed); OK\n",
                        name, a.arcs, a.distinct, o.orbits, o.smoothed
                    ));
                    records.push(json!({ "case": "sweep", "surface": name, "arcs": a.arcs, "orbits": o.orbits }));
                }
            }
            other => return Err(CliError::Validation(format!("unknown case {:?} (golden, b2, b3, sweep, all)", other))),
        }
    }
    Ok(Output { text, json: json!({ "seed": seed, "results": records }) })
}

fn cmd_render(tri: &TriArg, arc: &ArcArg, orbit: Option<&str>, format: Format) -> Result<String, CliError> {
    let t = load_triangulation(tri)?;
    let g = if let Some(o) = orbit {
        snake::build_orbit_graph(&t, &load_orbit(&t, o)?)?
    } else if arc.arc.is_some() {
        snake::build_snake(&t, &load_arc(&t, arc)?)?
    } else {
        return Ok(render::render_triangulation(&t, format));
    };
    Ok(render::render_graph(&g, &|e| g.edges[e].label.render(&t), format))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["snakefold"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn snake_inline_arc() {
        let (code, out, _) = call(&["snake", "--triangulation", "running", "--arc", "4,5", "--to-basepoint"]);
        assert_eq!(code, 0);
        assert!(out.contains("matchings: 3"), "{}", out);
    }

    #[test]
    fn bad_label_is_a_validation_error() {
        let (code, _, err) = call(&["snake", "--triangulation", "running", "--arc", "4,9"]);
        assert_eq!(code, 2);
        assert!(err.contains("ValidationError"));
    }

    #[test]
    fn mutate_twice_is_identity() {
        let (code, out, _) = call(&["mutate", "--matrix", "[[0,1],[-2,0]]", "--sequence", "1,1"]);
        assert_eq!(code, 0);
        assert!(out.contains("x1' = x1\n") && out.contains("x2' = x2\n"), "{}", out);
    }

    #[test]
    fn unknown_verify_case() {
        assert_eq!(call(&["verify", "--case", "b9"]).0, 2);
    }
}
