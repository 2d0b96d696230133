mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use plslab::count::{
    count_associative_triples, count_cycles, count_octahedra, count_octahedra_naive,
    cycle_count_spectral, CountReport, Method,
};
use plslab::cycle::{completion_defect, enumerate_cycles, CycleKind};
use plslab::decomposition::{
    count_dispersed_ring_decompositions, count_point_decompositions, count_ring_decompositions,
};
use plslab::disc::{trivial_max, AbstractDisc};
use plslab::entropy::{
    entropy_report, net, popular_elements, rough_approx_check, ruzsa_cover, separated_set,
    space_of, CyclicGroup, CyclicMetric, FiniteMetricSpace, MetricGroup, Mode, NetKind,
};
use plslab::extraction::{qc_extract_with, ExtractParams};
use plslab::pls::{to_binary_op, validate, GenSpec, PartialLatinSquare, PlsFile};
use plslab::quadrangle::{brandt_reconstruct, check_quadrangle, QcKind};
use plslab::so3::{build_net, checks_csv, fuzzy_op, verify_products, verify_density, RotationNet};
use plslab::vankampen::{build_presentation, emit_embedding, slit_scan_class, vk_distance_with, SearchLimits};
use plslab::{corpus, Error, Result, VERSION};

#[derive(Parser, Debug)]
#[command(name = "plslab", version, about = "Partial Latin square laboratory")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PLSLAB_THREADS")]
    threads: Option<usize>,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the stage trace here (extract only).
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Instance {
    /// Instance file: JSON, or CSV lines `x,y,z`.
    #[arg(long = "in", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator spec such as `cyclic:5`, `fig1`, `restrict:0.5:1:cyclic:8`.
    #[arg(long)]
    gen: Option<String>,
}

impl Instance {
    fn describe(&self) -> Option<String> {
        match (&self.input, &self.gen) {
            (Some(p), _) => Some(p.display().to_string()),
            (_, Some(g)) => Some(format!("gen:{g}")),
            _ => None,
        }
    }

    fn load(&self) -> Result<PartialLatinSquare> {
        match (&self.input, &self.gen) {
            (Some(p), _) => load_pls(p),
            (_, Some(g)) => g.parse::<GenSpec>()?.generate(),
            _ => Err(Error::input("one of --in or --gen is required")),
        }
    }
}

fn load_pls(p: &Path) -> Result<PartialLatinSquare> {
    let s = std::fs::read_to_string(p)?;
    if s.trim_start().starts_with('{') {
        PartialLatinSquare::from_json(&s)
    } else {
        PartialLatinSquare::from_csv(&s, None)
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact substructure counts.
    Count {
        what: CountWhat,
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value = "label")]
        kind: CycleKind,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// `naive` pairs rectangles directly; `spectral` sums singular values.
        #[arg(long, value_enum, default_value_t = CountMethod::Fast)]
        method: CountMethod,
        /// Emit `metric,value,method,elapsed_ms` CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Quadrangle checks and group reconstruction.
    Qc {
        action: QcAction,
        #[command(flatten)]
        inst: Instance,
        /// `column`, `row`, `label`; all three when omitted.
        #[arg(long)]
        kind: Option<QcKind>,
        #[arg(long, default_value_t = 0)]
        row: u32,
        #[arg(long, default_value_t = 0)]
        col: u32,
    },
    /// Decomposition counts for one cycle, or the trivial maximum of a disc.
    Decomp {
        what: DecompWhat,
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value = "label")]
        kind: CycleKind,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Index into the enumerated cycles.
        #[arg(long, default_value_t = 0)]
        cycle: usize,
        /// Popularity parameter; 0 counts everything.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = plslab::decomposition::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = DiscShape::Polygon)]
        disc: DiscShape,
        /// Ambient size for `trivmax`; defaults to the instance's.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Extract a subset satisfying all three quadrangle conditions.
    Extract {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Area budget of the independent-set stage.
        #[arg(long, default_value_t = 9)]
        b: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long, default_value_t = 20_000)]
        states: u64,
        #[arg(long)]
        no_extend: bool,
    },
    /// Word search in the triangular presentation.
    Vk {
        #[command(subcommand)]
        sub: VkCmd,
    },
    /// Packing and covering numbers and related checks.
    Entropy {
        what: EntropyWhat,
        /// Distance matrix JSON `{"distances": [[..]]}` (null = infinite).
        #[arg(long, conflicts_with = "group")]
        matrix: Option<PathBuf>,
        /// `cyclic:N` or `discrete:N`.
        #[arg(long)]
        group: Option<String>,
        /// Comma-separated points (indices or elements); all when omitted.
        #[arg(long)]
        points: Option<String>,
        /// Second set for `cover`.
        #[arg(long)]
        with: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        exact: bool,
        /// Nets with `d <= eps` instead of `d < eps`.
        #[arg(long)]
        non_strict: bool,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        symmetric: bool,
    },
    /// Rotation nets in SO(3).
    So3 {
        what: So3What,
        #[arg(long, default_value_t = 0.45)]
        delta: f64,
        #[arg(long, default_value_t = 0.9)]
        theta: f64,
        /// Consecutive rejections before the net is frozen.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Load a frozen net instead of building one.
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// JSON instead of CSV for `verify`.
        #[arg(long)]
        json: bool,
    },
    /// Write a generated or corpus instance.
    Gen {
        spec: Option<String>,
        /// Corpus entry name; `--corpus list` prints the names.
        #[arg(long)]
        corpus: Option<String>,
        #[arg(long)]
        csv: bool,
    },
    /// Check an instance file for repeated coordinates.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum VkCmd {
    /// Bounded search for a diagram between two words.
    Dist {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 2_000_000)]
        states: u64,
    },
    /// Slit octahedra between generators of one class.
    Scan {
        #[command(flatten)]
        inst: Instance,
        /// 0 columns, 1 rows, 2 labels; all when omitted.
        #[arg(long)]
        class: Option<usize>,
    },
    /// Generator embedding report with certificates.
    Embed {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 12)]
        budget: usize,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = 200_000)]
        states: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CountWhat {
    Octahedra,
    Cycles,
    Assoc,
    Defect,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum CountMethod {
    Fast,
    Naive,
    Spectral,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum QcAction {
    Check,
    Reconstruct,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DecompWhat {
    Point,
    Ring,
    Dispersed,
    Trivmax,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DiscShape {
    Polygon,
    DispersedRing,
    SlitOctahedron,
    Face,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EntropyWhat {
    Sigma,
    Nu,
    Report,
    Cover,
    Rag,
    Popular,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum So3What {
    Net,
    Op,
    Verify,
}

/// Everything needed to repeat a run.
#[derive(Serialize)]
struct RunConfig {
    command: String,
    argv: Vec<String>,
    instance: Option<String>,
    seed: u64,
    threads: Option<usize>,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
}

struct Ctx {
    global: Global,
    config: RunConfig,
}

impl Ctx {
    fn envelope(&self, result: Value) -> Value {
        json!({
            "tool": "plslab",
            "version": VERSION,
            "config": self.config,
            "result": result,
        })
    }

    fn write(&self, path: Option<&Path>, text: &str) -> Result<()> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(Error::from),
            None => print_stdout(text),
        }
    }

    fn emit(&self, result: impl Serialize) -> Result<()> {
        let v = self.envelope(serde_json::to_value(result)?);
        let text = if self.global.pretty {
            render::human(&v)
        } else {
            serde_json::to_string(&v)?
        };
        self.write(self.global.out.as_deref(), &text)
    }

    fn emit_csv(&self, body: &str) -> Result<()> {
        let header = format!("# plslab {} {}\n", VERSION, serde_json::to_string(&self.config)?);
        self.write(self.global.out.as_deref(), &(header + body))
    }
}

fn command_name(cmd: &Cmd) -> String {
    let s = format!("{cmd:?}");
    let head = s.split([' ', '{', '(']).next().unwrap_or("").to_lowercase();
    match cmd {
        Cmd::Vk { sub } => format!("vk {}", format!("{sub:?}").split([' ', '{']).next().unwrap_or("").to_lowercase()),
        _ => head,
    }
}

fn instance_of(cmd: &Cmd) -> Option<String> {
    match cmd {
        Cmd::Count { inst, .. }
        | Cmd::Qc { inst, .. }
        | Cmd::Decomp { inst, .. }
        | Cmd::Extract { inst, .. } => inst.describe(),
        Cmd::Vk { sub } => match sub {
            VkCmd::Dist { inst, .. } | VkCmd::Scan { inst, .. } | VkCmd::Embed { inst, .. } => inst.describe(),
        },
        Cmd::Entropy { matrix, group, .. } => matrix
            .as_ref()
            .map(|p| p.display().to_string())
            .or_else(|| group.clone()),
        Cmd::So3 { net, .. } => net.as_ref().map(|p| p.display().to_string()),
        Cmd::Gen { spec, corpus, .. } => spec.clone().or_else(|| corpus.clone()),
        Cmd::Validate { input } => Some(input.display().to_string()),
    }
}

/// Exit status 0 or 2 for a completed run.
type Status = u8;

fn run(cli: Cli) -> Result<Status> {
    #[cfg(feature = "parallel")]
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Error::input(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx {
        config: RunConfig {
            command: command_name(&cli.cmd),
            argv: std::env::args().collect(),
            instance: instance_of(&cli.cmd),
            seed: cli.global.seed,
            threads: cli.global.threads,
            out: cli.global.out.clone(),
            trace: cli.global.trace.clone(),
        },
        global: cli.global,
    };
    let seed = ctx.global.seed;
    match cli.cmd {
        Cmd::Count { what, inst, kind, r, method, csv } => {
            let p = inst.load()?;
            let report = match (what, method) {
                (CountWhat::Octahedra, CountMethod::Naive) => {
                    CountReport::timed("octahedra", Method::Naive, || count_octahedra_naive(&p, 1 << 22))?
                }
                (CountWhat::Octahedra, _) => {
                    CountReport::timed("octahedra", Method::HashGrouped, || Ok(count_octahedra(&p)))?
                }
                (CountWhat::Cycles, CountMethod::Spectral) => {
                    let v = cycle_count_spectral(&p, kind, r)?;
                    return ctx
                        .emit(json!({"metric": "cycles", "kind": kind, "r": r, "value": v, "method": "spectral-bound"}))
                        .map(|_| 0);
                }
                (CountWhat::Cycles, _) => {
                    CountReport::timed("cycles", Method::MatrixPower, || count_cycles(&p, kind, r))?
                }
                (CountWhat::Assoc, _) => CountReport::timed("associative_triples", Method::TableScan, || {
                    let [a, b, c] = p.dims();
                    if a != b || b != c {
                        return Err(Error::input("associativity needs a square instance"));
                    }
                    Ok(count_associative_triples(&to_binary_op(&p)?))
                })?,
                (CountWhat::Defect, _) => CountReport::timed("completion_defect", Method::TableScan, || {
                    completion_defect(&p, kind, r).map(|c| plslab::Count::from(c as u64))
                })?,
            };
            if csv {
                ctx.emit_csv(&format!("{}\n{}\n", CountReport::csv_header(), report.csv_row()))?;
            } else {
                ctx.emit(&report)?;
            }
            Ok(0)
        }
        Cmd::Qc { action, inst, kind, row, col } => {
            let p = inst.load()?;
            match action {
                QcAction::Check => {
                    let kinds = kind.map(|k| vec![k]).unwrap_or(QcKind::ALL.to_vec());
                    let mut all = Vec::new();
                    for k in kinds {
                        all.extend(check_quadrangle(&p, k).into_iter().map(|v| (k, v)));
                    }
                    let violations: Vec<Value> = all
                        .iter()
                        .map(|(k, v)| json!({"kind": k, "violation": v, "text": v.to_string()}))
                        .collect();
                    let ok = violations.is_empty();
                    ctx.emit(json!({"ok": ok, "violations": violations}))?;
                    Ok(if ok { 0 } else { 2 })
                }
                QcAction::Reconstruct => {
                    let g = brandt_reconstruct(&p, row, col)?;
                    ctx.emit(&g)?;
                    Ok(0)
                }
            }
        }
        Cmd::Decomp { what, inst, kind, r, cycle, theta, budget, disc, n } => {
            if let DecompWhat::Trivmax = what {
                let d = match disc {
                    DiscShape::Polygon => AbstractDisc::polygon(r),
                    DiscShape::DispersedRing => AbstractDisc::dispersed_ring(r),
                    DiscShape::SlitOctahedron => AbstractDisc::slit_octahedron(),
                    DiscShape::Face => AbstractDisc::single_face(),
                };
                let n = match n {
                    Some(n) => n,
                    None => inst.load()?.ambient(),
                };
                let (count, vi) = trivial_max(&d, n)?;
                ctx.emit(json!({"disc": disc, "n": n, "internal_vertices": vi, "trivial_max": count}))?;
                return Ok(0);
            }
            let p = inst.load()?;
            let cycles = enumerate_cycles(&p, kind, r, cycle + 1).or_else(|e| match e {
                Error::Resource(_) => enumerate_cycles(&p, kind, r, usize::MAX),
                e => Err(e),
            })?;
            let c = cycles
                .get(cycle)
                .ok_or_else(|| Error::input(format!("only {} cycles of this kind", cycles.len())))?;
            let value = match what {
                DecompWhat::Point => plslab::Count::from(count_point_decompositions(&p, c, theta)?),
                DecompWhat::Ring => count_ring_decompositions(&p, c, theta)?,
                DecompWhat::Dispersed => count_dispersed_ring_decompositions(&p, c, budget)?,
                DecompWhat::Trivmax => unreachable!(),
            };
            ctx.emit(json!({
                "kind": kind,
                "r": r,
                "cycle": c.original_cells(),
                "signature": c.signature(),
                "theta": theta,
                "count": value,
            }))?;
            Ok(0)
        }
        Cmd::Extract { inst, delta, k, b, budget, states, no_extend } => {
            let p = inst.load()?;
            let params = ExtractParams {
                delta,
                k,
                b,
                prune_budget: budget,
                word_search_states: states,
                extend: !no_extend,
            };
            let (out, trace) = qc_extract_with(&p, seed, &params)?;
            if let Some(path) = &ctx.global.trace {
                let v = ctx.envelope(serde_json::to_value(&trace)?);
                std::fs::write(path, serde_json::to_string_pretty(&v)?)?;
            }
            ctx.emit(json!({
                "instance": out.to_file(),
                "input_cells": trace.input_cells,
                "output_cells": trace.output_cells,
                "empty_output": trace.empty_output,
                "stages": trace.stages.iter().map(|s| &s.stage).collect::<Vec<_>>(),
            }))?;
            Ok(0)
        }
        Cmd::Vk { sub } => vk(&ctx, sub),
        Cmd::Entropy { what, matrix, group, points, with, eps, exact, non_strict, k, delta, m, symmetric } => {
            let mode = if exact { Mode::Exact } else { Mode::Greedy };
            let kind = if non_strict { NetKind::NonStrict } else { NetKind::Strict };
            if let Some(path) = matrix {
                let space = FiniteMetricSpace::from_json(&std::fs::read_to_string(path)?)?;
                let pts = match &points {
                    Some(s) => parse_list::<usize>(s)?,
                    None => (0..space.len()).collect(),
                };
                if let Some(&bad) = pts.iter().find(|&&i| i >= space.len()) {
                    return Err(Error::input(format!("point {bad} out of range")));
                }
                let v = match what {
                    EntropyWhat::Sigma => json!({"eps": eps, "mode": mode, "set": separated_set(&space, &pts, eps, mode)?}),
                    EntropyWhat::Nu => json!({"eps": eps, "mode": mode, "net_kind": kind, "set": net(&space, &pts, eps, mode, kind)?}),
                    EntropyWhat::Report => serde_json::to_value(entropy_report(&space, &pts, eps)?)?,
                    _ => return Err(Error::input("group operations need --group")),
                };
                ctx.emit(v)?;
                return Ok(0);
            }
            let spec = group.ok_or_else(|| Error::input("one of --matrix or --group is required"))?;
            let g = parse_group(&spec)?;
            let set = match &points {
                Some(s) => parse_list::<u64>(s)?.into_iter().map(|v| v % g.n).collect(),
                None => g.elements(),
            };
            let v = match what {
                EntropyWhat::Sigma | EntropyWhat::Nu | EntropyWhat::Report => {
                    let space = space_of(&g, &set)?;
                    let idx: Vec<usize> = (0..set.len()).collect();
                    let pick = |ix: Vec<usize>| ix.into_iter().map(|i| set[i]).collect::<Vec<u64>>();
                    match what {
                        EntropyWhat::Sigma => json!({"eps": eps, "mode": mode, "set": pick(separated_set(&space, &idx, eps, mode)?)}),
                        EntropyWhat::Nu => json!({"eps": eps, "mode": mode, "net_kind": kind, "set": pick(net(&space, &idx, eps, mode, kind)?)}),
                        _ => serde_json::to_value(entropy_report(&space, &idx, eps)?)?,
                    }
                }
                EntropyWhat::Cover => {
                    let b = match &with {
                        Some(s) => parse_list::<u64>(s)?.into_iter().map(|v| v % g.n).collect(),
                        None => vec![g.identity()],
                    };
                    serde_json::to_value(ruzsa_cover(&g, &set, &b, eps)?)?
                }
                EntropyWhat::Rag => serde_json::to_value(rough_approx_check(&g, &set, k, delta, &[])?)?,
                EntropyWhat::Popular => serde_json::to_value(popular_elements(&g, &set, eps, delta, m, symmetric))?,
            };
            ctx.emit(v)?;
            Ok(0)
        }
        Cmd::So3 { what, delta, theta, budget, net, eps, json } => {
            let net = match net {
                Some(p) => RotationNet::from_json(&unwrap_envelope(&std::fs::read_to_string(p)?)?)?,
                None => build_net(delta, seed, budget)?,
            };
            match what {
                So3What::Net => ctx.emit(&net)?,
                So3What::Op => {
                    let op = fuzzy_op(&net, theta)?;
                    let report = op.validate();
                    ctx.emit(json!({
                        "theta": theta,
                        "net_size": net.len(),
                        "defined": op.defined_count(),
                        "injective": report.ok,
                        "triples": op.triples(),
                    }))?;
                    if !report.ok {
                        return Ok(2);
                    }
                }
                So3What::Verify => {
                    let d = verify_density(&net, theta);
                    let c = verify_products(&net, theta, eps, seed)?;
                    let mut rows = vec![d.check.clone()];
                    rows.extend(c.checks.iter().cloned());
                    let pass = rows.iter().all(|r| r.pass);
                    if json {
                        ctx.emit(json!({"density": d, "products": c}))?;
                    } else {
                        ctx.emit_csv(&checks_csv(&rows))?;
                    }
                    if !pass {
                        return Ok(2);
                    }
                }
            }
            Ok(0)
        }
        Cmd::Gen { spec, corpus: entry, csv } => {
            if entry.as_deref() == Some("list") {
                let names: Vec<String> = corpus::entries().into_iter().map(|e| format!("{} {}", e.name, e.spec)).collect();
                print_stdout(&names.join("\n"))?;
                return Ok(0);
            }
            let p = match (spec, entry) {
                (_, Some(name)) => corpus::find(&name)
                    .ok_or_else(|| Error::input(format!("no corpus entry '{name}'")))?
                    .generate()?,
                (Some(s), None) => s.parse::<GenSpec>()?.generate()?,
                (None, None) => return Err(Error::input("give a spec or --corpus")),
            };
            if csv {
                ctx.write(ctx.global.out.as_deref(), &p.to_csv())?;
            } else {
                ctx.write(ctx.global.out.as_deref(), &p.to_json())?;
            }
            Ok(0)
        }
        Cmd::Validate { input } => {
            let s = std::fs::read_to_string(&input)?;
            let f: PlsFile = if s.trim_start().starts_with('{') {
                serde_json::from_str(&s)?
            } else {
                let mut triples = Vec::new();
                for line in s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                    let v = parse_list::<u32>(line)?;
                    if v.len() != 3 {
                        return Err(Error::input(format!("expected x,y,z: '{line}'")));
                    }
                    triples.push([v[0], v[1], v[2]]);
                }
                let mut dims = [0usize; 3];
                for t in &triples {
                    for c in 0..3 {
                        dims[c] = dims[c].max(t[c] as usize + 1);
                    }
                }
                PlsFile { dims, triples, names: None }
            };
            let report = validate(&f.triples, f.dims)?;
            let ok = report.ok;
            ctx.emit(&report)?;
            Ok(if ok { 0 } else { 2 })
        }
    }
}

fn vk(ctx: &Ctx, sub: VkCmd) -> Result<Status> {
    match sub {
        VkCmd::Dist { inst, w1, w2, budget, cap, states } => {
            let p = inst.load()?;
            let pres = build_presentation(&p);
            let (a, b) = (pres.parse_word(&w1)?, pres.parse_word(&w2)?);
            let r = vk_distance_with(&pres, &a, &b, SearchLimits { area_budget: budget, length_cap: cap, max_states: states })?;
            if let Some(c) = &r.certificate {
                plslab::vankampen::replay(&pres, &a, &b, c)?;
            }
            ctx.emit(json!({
                "w1": pres.format_word(&a),
                "w2": pres.format_word(&b),
                "distance": r,
            }))?;
            Ok(0)
        }
        VkCmd::Scan { inst, class } => {
            let p = inst.load()?;
            let classes = class.map(|c| vec![c]).unwrap_or(vec![0, 1, 2]);
            if classes.iter().any(|&c| c > 2) {
                return Err(Error::input("class must be 0, 1 or 2"));
            }
            let w: Vec<_> = classes.into_iter().flat_map(|c| slit_scan_class(&p, c)).collect();
            let named: Vec<Value> = w
                .iter()
                .map(|s| {
                    json!({
                        "class": s.class,
                        "pair": [p.name_of(s.class, s.pair.0), p.name_of(s.class, s.pair.1)],
                        "cells": s.cells,
                    })
                })
                .collect();
            ctx.emit(json!({"witnesses": named}))?;
            Ok(0)
        }
        VkCmd::Embed { inst, budget, cap, states } => {
            let p = inst.load()?;
            let r = emit_embedding(&p, budget, cap, states)?;
            ctx.emit(&r)?;
            Ok(0)
        }
    }
}

/// Files written by this tool carry the payload under `result`.
fn unwrap_envelope(s: &str) -> Result<String> {
    let v: Value = serde_json::from_str(s)?;
    match v.get("result") {
        Some(r) if v.get("tool").is_some() => Ok(r.to_string()),
        _ => Ok(s.to_string()),
    }
}

/// A closed pipe downstream is not an error.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", text.trim_end()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::input(format!("bad list entry '{t}'"))))
        .collect()
}

fn parse_group(spec: &str) -> Result<CyclicGroup> {
    let bad = || Error::input(format!("unknown group '{spec}'"));
    let (kind, n) = spec.split_once(':').ok_or_else(bad)?;
    let n: u64 = n.parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    let metric = match kind {
        "cyclic" => CyclicMetric::Cyclic,
        "discrete" => CyclicMetric::Discrete,
        _ => return Err(bad()),
    };
    Ok(CyclicGroup { n, metric })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
