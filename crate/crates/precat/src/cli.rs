//! Argument parsing and command execution.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use precat_core::categorify::{Engine, EngineConfig, Precat, StageOrder};
use precat_core::category::ExplicitCategory;
use precat_core::fincat::Census;
use precat_core::model::{
    factor_cm51_bounded, factor_cm52, is_bounded_fibration, lift_search, properness_counterexample,
    properness_summary, LiftingProblem,
};
use precat_core::presentation::{PrecatMap, Presentation, Tabulation};
use precat_core::standard::{self, SigmaShape};
use precat_core::structure::{is_easy_bounded, segal_map, weak_equiv_bounded, weak_equiv_tables, SegalKind, Verdict};
use precat_core::svk::{cohomology_classes, endo_census, groupoid_equiv_bounded, pi1, svk_pushout, ComboComplex};
use precat_core::table::Table;
use precat_core::theta::{parse_object, Site};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::corpus;
use crate::dot;
use crate::formats::{self, census_json, verdict_json, Artifact, ElementJson, MapJson, PresentationJson, TableJson};

pub const DEFAULT_MAX_SEARCH: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "precat", version, about = "Presheaves on Theta^n: evaluation, categorification and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Exit with status 1 when a verdict comes back unknown.
    #[arg(long, global = true)]
    pub require_decided: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    /// Degree bound: the largest sum of components of a stored level.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub degree: u32,
    /// Largest number of saturation stages.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub stages: u64,
    /// Largest spine length `m` among the generating cofibrations.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..))]
    pub m_max: u8,
    #[arg(long, value_enum, default_value_t = Order::Sorted)]
    pub order: Order,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Sorted,
    Reversed,
}

impl EngineArgs {
    fn config(&self, limit: u64) -> EngineConfig {
        let mut cfg = EngineConfig::new(self.degree, self.stages as usize, self.m_max);
        cfg.order = match self.order {
            Order::Sorted => StageOrder::Sorted,
            Order::Reversed => StageOrder::Reversed,
        };
        cfg.limit = limit;
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MakeKind {
    Sigma,
    Phi,
    Upsilon,
    Representable,
    Interval,
    Ibar,
    Jbar,
    SigmaNu,
    Indiscrete,
    Corpus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FactorMode {
    Cm51,
    Cm52,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a standard object.
    Make {
        #[arg(value_enum)]
        kind: MakeKind,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        /// Prefix object, e.g. "" or "1" or "2,1".
        #[arg(long = "M", default_value = "")]
        prefix: String,
        #[arg(long, default_value_t = 2)]
        m: u8,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        k: i32,
        /// Object count for `indiscrete`, index for `corpus`.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = corpus::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a presentation levelwise.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        /// A single level such as "2" or "1,1"; all levels when absent.
        #[arg(long)]
        level: Option<String>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
    /// Categorify with markings.
    Cat {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Categorify without markings.
    Bigcat {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segal maps over a prefix.
    Segal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long, default_value_t = 2)]
        m: u8,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
    /// Does every Σ-map extend along φ?
    EasyCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Is a map a weak equivalence?
    Equiv {
        #[arg(long)]
        f: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Search a lift in a square.
    Lift {
        #[arg(long)]
        i: PathBuf,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        square: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
    /// Factor a map.
    Factor {
        #[arg(long, value_enum)]
        mode: FactorMode,
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pushout of fundamental groupoids over the shared part of a cover.
    Svk {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Functors from the fundamental groupoid up to natural isomorphism.
    Cohomology {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        coeff: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// The properness counterexample.
    PropernessDemo,
    /// Graphviz output for a presentation, table or complex.
    ExportDot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    /// Raw output replacing the rendered report.
    pub raw: Option<String>,
    pub undecided: bool,
}

impl Outcome {
    fn report(report: Value) -> Self {
        Outcome { report, raw: None, undecided: false }
    }

    fn verdict(mut report: Value, v: &Verdict) -> Self {
        if let (Value::Object(m), Value::Object(vj)) = (&mut report, verdict_json(v)) {
            m.extend(vj);
        }
        Outcome { report, raw: None, undecided: matches!(v, Verdict::Unknown(_)) }
    }
}

/// Reads `PRECAT_MAX_SEARCH`.
pub fn max_search() -> Result<u64> {
    match std::env::var("PRECAT_MAX_SEARCH") {
        Ok(s) => s.trim().parse().with_context(|| format!("PRECAT_MAX_SEARCH is not a count: {s:?}")),
        Err(_) => Ok(DEFAULT_MAX_SEARCH),
    }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn presentation_of(a: Artifact) -> Result<Presentation> {
    match a {
        Artifact::Presentation(p) => Ok(p),
        _ => bail!("expected a presentation"),
    }
}

fn map_of(a: Artifact) -> Result<PrecatMap> {
    match a {
        Artifact::Map(f) => Ok(f),
        _ => bail!("expected a map"),
    }
}

fn complex_of(path: &Path) -> Result<ComboComplex> {
    match formats::read_artifact(path)? {
        Artifact::Complex(c) => Ok(c),
        _ => bail!("{} is not a complex", path.display()),
    }
}

/// A table at the given degree from a presentation or a stored table.
fn table_of(a: Artifact, degree: u32) -> Result<Table> {
    match a {
        Artifact::Presentation(p) => Ok(p.tabulate(degree)?.table),
        Artifact::Table(t) => Ok(t),
        Artifact::Category(c) => Ok(c.nerve(Arc::new(Site::new(1, degree)))),
        _ => bail!("expected a presentation or a table"),
    }
}

fn precat_of(a: Artifact, engine: &Engine) -> Result<Precat> {
    match a {
        Artifact::Presentation(p) => Ok(engine.precat(&p)?),
        Artifact::Table(t) => {
            if **t.site() != *engine.site {
                bail!("the table was stored at a different level or degree bound");
            }
            Ok(Precat::from_table(&t)?)
        }
        _ => bail!("expected a presentation or a table"),
    }
}

fn census_value(c: &Census) -> (Value, &'static str) {
    match c {
        Census::Exact(v) => (json!(v), "exact"),
        Census::Stable(v) => (json!(v), "stable"),
        Census::Unknown => (Value::Null, "unknown"),
    }
}

#[derive(Deserialize)]
struct SquareJson {
    top: Vec<ElementJson>,
    bottom: Vec<ElementJson>,
}

fn element_index(p: &Presentation, tab: &Tabulation, e: &ElementJson) -> Result<usize> {
    let x = precat_core::presentation::Element::new(e.gen, precat_core::theta::ThetaMorphism::parse(p.n(), &e.map)?);
    tab.index_of(&p.canonical(&x)?).ok_or_else(|| anyhow!("element {}@{} is outside the degree bound", e.gen, e.map))
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let limit = max_search()?;
    match &cli.command {
        Command::Make { kind, n, prefix, m, k, index, seed, degree, out } => {
            let prefix = parse_object(*n, prefix)?;
            let text = match kind {
                MakeKind::Sigma => formats::to_pretty(&PresentationJson::from_presentation(&standard::sigma(&SigmaShape::new(prefix, *m, *k)?)?)),
                MakeKind::Phi => formats::to_pretty(&MapJson::from_map(&standard::phi(&SigmaShape::new(prefix, *m, *k)?)?)),
                MakeKind::Upsilon => formats::to_pretty(&PresentationJson::from_presentation(&standard::upsilon(&prefix, *m, (*k).max(0) as usize)?)),
                MakeKind::Representable => formats::to_pretty(&PresentationJson::from_presentation(&Presentation::representable(&prefix))),
                MakeKind::Interval => formats::to_pretty(&PresentationJson::from_presentation(&standard::interval_m(*n, *m)?)),
                MakeKind::Jbar if *n != 1 => bail!("jbar is only constructed at n = 1"),
                MakeKind::Jbar => formats::to_pretty(&PresentationJson::from_presentation(&standard::jbar_n1())),
                MakeKind::SigmaNu => formats::to_pretty(&MapJson::from_map(&standard::sigma_nu(*n, *m, (*k).max(0) as usize)?)),
                MakeKind::Ibar => formats::to_pretty(&TableJson::from_table(&standard::ibar(Arc::new(Site::new(*n, *degree))))),
                MakeKind::Indiscrete => {
                    formats::to_pretty(&TableJson::from_table(&standard::indiscrete(*index, Arc::new(Site::new(*n, *degree)))))
                }
                MakeKind::Corpus => {
                    let all = corpus::precats(*seed, index + 1);
                    formats::to_pretty(&PresentationJson::from_presentation(&all[*index]))
                }
            };
            if let Some(path) = out {
                write_out(path, &text)?;
                Ok(Outcome::report(json!({ "wrote": path.display().to_string() })))
            } else {
                Ok(Outcome { report: Value::Null, raw: Some(text), undecided: false })
            }
        }
        Command::Eval { input, level, degree } => {
            let art = formats::read_artifact(input)?;
            match level {
                Some(l) => {
                    let p = presentation_of(art)?;
                    let obj = parse_object(p.n(), l)?;
                    let lv = p.eval(&obj)?;
                    let elems: Vec<String> = lv.elements().iter().map(|e| format!("{}@{}", e.gen, e.map)).collect();
                    Ok(Outcome::report(json!({ "level": obj.to_string(), "size": lv.len(), "elements": elems })))
                }
                None => {
                    let t = table_of(art, *degree)?;
                    Ok(Outcome::report(json!({ "n": t.n(), "degree": t.bound(), "census": census_json(&t) })))
                }
            }
        }
        Command::Cat { input, engine, out } | Command::Bigcat { input, engine, out } => {
            let marked = matches!(cli.command, Command::Cat { .. });
            let art = formats::read_artifact(input)?;
            let n = match &art {
                Artifact::Presentation(p) => p.n(),
                Artifact::Table(t) => t.n(),
                _ => bail!("expected a presentation or a table"),
            };
            let e = Engine::new(n, engine.config(limit))?;
            let a = precat_of(art, &e)?;
            let sat = if marked { e.cat_bounded(&a)? } else { e.bigcat_bounded(&a)? };
            if let Some(path) = out {
                write_out(path, &formats::to_pretty(&TableJson::from_table(&sat.result.table)))?;
            }
            let report = json!({
                "census": census_json(&sat.result.table),
                "stabilized": sat.stabilized,
                "stages": sat.stages,
                "marked": sat.marking.len(),
            });
            Ok(Outcome { report, raw: None, undecided: !sat.stabilized })
        }
        Command::Segal { input, prefix, m, degree } => {
            let t = table_of(formats::read_artifact(input)?, *degree)?;
            let pre = parse_object(t.n(), prefix)?;
            let r = segal_map(&t, &pre, *m)?;
            let kind = match r.kind {
                SegalKind::Bijective => "bijective",
                SegalKind::InjectiveOnly => "injective",
                SegalKind::Neither => "neither",
            };
            let levels: Vec<Value> = r
                .levels
                .iter()
                .map(|l| json!({ "level": l.level.to_string(), "source": l.source, "fiber_product": l.fiber_product, "image": l.image }))
                .collect();
            Ok(Outcome::report(json!({ "kind": kind, "levels": levels })))
        }
        Command::EasyCheck { input, engine } => {
            let art = formats::read_artifact(input)?;
            let t = table_of(art, engine.degree)?;
            let e = Engine::new(t.n(), engine.config(limit))?;
            let v = is_easy_bounded(&e, &t)?;
            Ok(Outcome::verdict(json!({}), &v))
        }
        Command::Equiv { f, engine } => {
            let f = map_of(formats::read_artifact(f)?)?;
            let v = weak_equiv_bounded(&f, &engine.config(limit))?;
            Ok(Outcome::verdict(json!({}), &v))
        }
        Command::Lift { i, p, square, degree } => {
            let i = map_of(formats::read_artifact(i)?)?;
            let p = map_of(formats::read_artifact(p)?)?;
            let sq: SquareJson = serde_json::from_str(&std::fs::read_to_string(square)?).context("parsing the square")?;
            let ta = p.source.tabulate(*degree)?;
            let tb = p.target.tabulate(*degree)?;
            let pm = p.tabulate(&ta, &tb)?;
            let top = sq.top.iter().map(|e| element_index(&p.source, &ta, e)).collect::<Result<Vec<_>>>()?;
            let bottom = sq.bottom.iter().map(|e| element_index(&p.target, &tb, e)).collect::<Result<Vec<_>>>()?;
            let prob = LiftingProblem { i, a: ta.table.clone(), b: tb.table.clone(), p: pm, top, bottom };
            let lift = lift_search(&prob, limit)?;
            let site = ta.table.site();
            let shown = lift.as_ref().map(|l| {
                l.iter()
                    .zip(prob.i.target.generators())
                    .map(|(&x, g)| {
                        let e = &ta.reps[site.object_id(g).expect("on site")][x];
                        format!("{}@{}", e.gen, e.map)
                    })
                    .collect::<Vec<_>>()
            });
            let v = if lift.is_some() { Verdict::Yes } else { Verdict::No("no lift in the search space".into()) };
            Ok(Outcome::verdict(json!({ "lift": shown }), &v))
        }
        Command::Factor { mode, input, engine, out } => {
            let f = map_of(formats::read_artifact(input)?)?;
            let cfg = engine.config(limit);
            let tx = f.source.tabulate(engine.degree)?;
            let ty = f.target.tabulate(engine.degree)?;
            let fm = f.tabulate(&tx, &ty)?;
            let (fac, right_check) = match mode {
                FactorMode::Cm51 => {
                    let e = Engine::new(f.source.n(), cfg.clone())?;
                    let fac = factor_cm51_bounded(&e, &tx.table, &ty.table, &fm)?;
                    let v = is_bounded_fibration(&e, &fac.middle, &ty.table, &fac.right)?;
                    (fac, ("right_is_bounded_fibration", v))
                }
                FactorMode::Cm52 => {
                    let fac = factor_cm52(&tx.table, &ty.table, &fm)?;
                    let v = weak_equiv_tables(&fac.middle, &ty.table, &fac.right, &cfg)?;
                    (fac, ("right_is_weak_equivalence", v))
                }
            };
            if let Some(path) = out {
                write_out(path, &formats::to_pretty(&TableJson::from_table(&fac.middle)))?;
            }
            let report = json!({
                "middle": census_json(&fac.middle),
                "left_is_cofibration": fac.left.is_cofibration(&tx.table),
                "composite_matches": fac.left.then(&fac.right) == fm,
                "stabilized": fac.stabilized,
                "stages": fac.stages,
                right_check.0: verdict_json(&right_check.1),
            });
            Ok(Outcome { report, raw: None, undecided: matches!(right_check.1, Verdict::Unknown(_)) || !fac.stabilized })
        }
        Command::Svk { x, u, v, bound, dot: dot_path } => {
            let (x, u, v) = (complex_of(x)?, complex_of(u)?, complex_of(v)?);
            u.embedding(&x).context("U is not a subcomplex of X")?;
            v.embedding(&x).context("V is not a subcomplex of X")?;
            let w = u.intersection(&v)?;
            let po = svk_pushout(&u, &v, &w)?;
            let direct = pi1(&x)?;
            let base_name = x.vertices.first().ok_or_else(|| anyhow!("X has no vertices"))?;
            let base = *po.vertices.get(base_name).ok_or_else(|| anyhow!("U and V do not cover {base_name}"))?;
            let (census, status) = census_value(&endo_census(&po.groupoid, base, *bound));
            let (pi1_census, pi1_status) = census_value(&endo_census(&direct, 0, *bound));
            let verdict = groupoid_equiv_bounded(&po.groupoid, &direct, *bound);
            if let Some(path) = dot_path {
                let mut labels = vec![String::new(); po.groupoid.objects];
                for (name, &o) in &po.vertices {
                    labels[o] = name.clone();
                }
                write_out(path, &dot::groupoid_dot(&po.groupoid, &labels, "pushout"))?;
            }
            let report = json!({
                "basepoint": base_name,
                "objects": po.groupoid.objects,
                "components": po.groupoid.components().1,
                "endo_census": census,
                "census_status": status,
                "pi1_census": pi1_census,
                "pi1_census_status": pi1_status,
                "equivalent_to_pi1": verdict_json(&verdict),
            });
            Ok(Outcome::verdict(report, &verdict))
        }
        Command::Cohomology { x, coeff, bound } => {
            let x = complex_of(x)?;
            let a: ExplicitCategory = match formats::read_artifact(coeff)? {
                Artifact::Category(c) => c,
                _ => bail!("coefficients must be a strict-model/v1 file"),
            };
            let classes = cohomology_classes(&x, &a, limit)?;
            let (census, status) = census_value(&endo_census(&pi1(&x)?, 0, *bound));
            let reps: Vec<Value> = classes.iter().map(|f| json!({ "objects": f.objects, "arrows": f.arrows })).collect();
            Ok(Outcome::report(json!({
                "classes": classes.len(),
                "representatives": reps,
                "pi1_census": census,
                "pi1_census_status": status,
                "caveat": "coefficients are used as given; strict models are not replaced fibrantly",
            })))
        }
        Command::PropernessDemo => {
            let b = properness_counterexample()?;
            let report = json!({
                "a": census_json(&b.a),
                "b": census_json(&b.b),
                "c": census_json(&b.c),
                "d_objects": b.d.object_count(),
                "d_arrows": b.d.arrow_count(),
                "c_x0_x2": b.c_x0_x2,
                "d_x0_x2": b.d_x0_x2,
                "lands_on_composite": b.lands_on_composite,
                "fully_faithful": b.fully_faithful,
                "b_to_a_weak_equivalence": verdict_json(&b.b_to_a),
                "c_to_a_bounded_fibration": verdict_json(&b.c_to_a_fibration),
                "d_to_c_equivalence": verdict_json(&b.d_to_c),
                "report": properness_summary(&b),
            });
            Ok(Outcome::report(report))
        }
        Command::ExportDot { input, degree, out } => {
            let text = match formats::read_artifact(input)? {
                Artifact::Complex(cx) => dot::groupoid_dot(&pi1(&cx)?, &cx.vertices, "pi1"),
                other => dot::table_dot(&table_of(other, *degree)?, "table"),
            };
            match out {
                Some(path) => {
                    write_out(path, &text)?;
                    Ok(Outcome::report(json!({ "wrote": path.display().to_string() })))
                }
                None => Ok(Outcome { report: Value::Null, raw: Some(text), undecided: false }),
            }
        }
    }
}

/// Renders a report; text mode prints one `key: value` line per field.
pub fn render(report: &Value, format: ReportFormat) -> String {
    match (format, report) {
        (ReportFormat::Text, Value::Object(m)) => {
            let mut s = String::new();
            for (k, v) in m {
                match v {
                    Value::String(t) => s.push_str(&format!("{k}: {t}\n")),
                    other => s.push_str(&format!("{k}: {other}\n")),
                }
            }
            s
        }
        _ => formats::to_pretty(report),
    }
}

/// Runs the command line and returns the exit status: 0 success, 1 domain error or an
/// undecided verdict under `--require-decided`, 2 usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn std::io::Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    if let Err(e) = max_search() {
        let _ = writeln!(stderr, "{e:#}");
        return 2;
    }
    match execute(&cli) {
        Ok(out) => {
            let text = match &out.raw {
                Some(raw) => raw.clone(),
                None => render(&out.report, cli.format),
            };
            let _ = stdout.write_all(text.as_bytes());
            if cli.require_decided && out.undecided {
                let _ = writeln!(stderr, "undecided result");
                return 1;
            }
            0
        }
        Err(e) => {
            let mut m = Map::new();
            m.insert("error".into(), Value::String(format!("{e:#}")));
            let _ = stderr.write_all(formats::to_pretty(&Value::Object(m)).as_bytes());
            1
        }
    }
}
