use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jrcat::bridge::{cocompletion_unit, f_tilde, jrp_to_sheaf, roundtrip_report, sheaf_to_jrp, RoundtripInput};
use jrcat::bundle::{Bundle, NamedPresheaf};
use jrcat::cat::validate_category;
use jrcat::classifier::sigma_classifier;
use jrcat::fixtures::{build_finset_mcat, build_finset_p, build_nojoin_fixture, MonicClass};
use jrcat::functor::Functor;
use jrcat::join::{check_join_axioms, FamilyBound};
use jrcat::mcat::{check_m_system, is_geometric, MCategory};
use jrcat::par::{karoubi_r, par, Par};
use jrcat::presheaf::{nat_transformations, Presheaf};
use jrcat::restriction::{check_hom_order, check_restriction_axioms};
use jrcat::rpsh::{check_jrp_axioms, check_rp_axioms, hom_restriction, yoneda_jr, JoinRestrictionPresheaf, RestrictionPresheaf};
use jrcat::sheafify::sheafify;
use jrcat::site::{check_topology, generate_topology, is_sheaf, sheaf_report};
use jrcat::{Error, LawReport, Obj};

#[derive(Parser)]
#[command(name = "jrcat", about = "Law checks and constructions for finite restriction categories and sheaves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest compatible family examined by join checks.
    #[arg(long, global = true)]
    max_family: Option<usize>,
    /// Seed for sampled transformation checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Where to write the machine-readable summary (default: $JRCAT_OUT_DIR/<command>.json).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Category, restriction, join, M-system and presheaf law suites.
    CheckLaws { bundle: String },
    /// Par(C, M) with its restriction and join laws.
    BuildPar { bundle: String },
    /// K_r(X), splitting and embedding checks.
    Karoubi { bundle: String },
    /// Geometric criterion for an M-category.
    Geometric { bundle: String },
    /// Topology generated by joins of M-subobjects.
    Topology { bundle: String },
    /// Sheaf condition for a presheaf.
    SheafCheck { bundle: String, presheaf: String },
    /// Associated sheaf of a presheaf.
    Sheafify { bundle: String, presheaf: String },
    /// Move between sheaves on C and join restriction presheaves on Par(C, M).
    Transfer {
        bundle: String,
        presheaf: String,
        #[arg(long, value_enum)]
        direction: Dir,
    },
    /// Transfer, transfer back, and find a natural isomorphism.
    Roundtrip {
        bundle: String,
        presheaf: String,
        #[arg(long, value_enum, default_value_t = Dir::ToJrp)]
        direction: Dir,
    },
    /// Compare the composite unit route with the Yoneda embedding.
    Unit { bundle: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dir {
    ToJrp,
    ToSheaf,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckLaws { .. } => "check-laws",
            Command::BuildPar { .. } => "build-par",
            Command::Karoubi { .. } => "karoubi",
            Command::Geometric { .. } => "geometric",
            Command::Topology { .. } => "topology",
            Command::SheafCheck { .. } => "sheaf-check",
            Command::Sheafify { .. } => "sheafify",
            Command::Transfer { .. } => "transfer",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Unit { .. } => "unit",
        }
    }
}

/// Collected report lines and structured data for one command.
#[derive(Default)]
struct Outcome {
    lines: Vec<String>,
    info: Vec<String>,
    data: serde_json::Map<String, Value>,
}

impl Outcome {
    fn add(&mut self, section: &str, report: &LawReport) {
        self.lines.extend(report.lines().into_iter().map(|l| format!("{section}: {l}")));
    }

    fn fail(&mut self, section: &str, line: impl Into<String>) {
        self.lines.push(format!("{section}: {}", line.into()));
    }

    fn info(&mut self, line: impl Into<String>) {
        self.info.push(line.into());
    }

    fn data(&mut self, key: &str, value: Value) {
        self.data.insert(key.to_string(), value);
    }
}

fn builtin(spec: &str) -> Option<Bundle> {
    if spec == "nojoin" {
        return Some(Bundle::from_restriction(&build_nojoin_fixture().pf.rc));
    }
    let (kind, n) = spec.rsplit_once('_')?;
    let n: usize = n.parse().ok()?;
    match kind {
        "finset_p" => Some(Bundle::from_restriction(&build_finset_p(n).rc)),
        "finset_inj" => Some(Bundle::from_m_category(&build_finset_mcat(n, MonicClass::Inj).mc)),
        "finset_iso" => Some(Bundle::from_m_category(&build_finset_mcat(n, MonicClass::Iso).mc)),
        _ => None,
    }
}

fn resolve_bundle(spec: &str) -> jrcat::Result<Bundle> {
    if let Some(b) = builtin(spec) {
        return Ok(b);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::Bundle(format!("\"{spec}\" is neither a built-in bundle nor a file")));
    }
    Bundle::load(path)
}

fn representable_object(c: &jrcat::FinCategory, name: &str) -> Option<Obj> {
    let rest = name.strip_prefix('y')?;
    if rest == "D" {
        return c.objects().last();
    }
    c.object_by_name(rest)
}

/// A presheaf on the bundle's category, from the bundle or by built-in name.
fn resolve_presheaf(b: &Bundle, mc: Option<&MCategory>, name: &str) -> jrcat::Result<Presheaf> {
    if let Some(np) = b.presheaves.get(name) {
        return Ok(np.presheaf.clone());
    }
    let c = &b.cat;
    match name {
        "terminal" => Ok(Presheaf::terminal(c)),
        "const2" => Ok(Presheaf::constant(c, 2)),
        "sigma" => {
            let mc = mc.ok_or_else(|| Error::Bundle("sigma needs a monics section".into()))?;
            Ok(sigma_classifier(mc)?.presheaf)
        }
        _ => representable_object(c, name)
            .map(|d| Presheaf::representable(c, d))
            .ok_or_else(|| Error::Bundle(format!("unknown presheaf \"{name}\""))),
    }
}

/// A join restriction presheaf on `Par(C, M)`.
fn resolve_jrp(b: &Bundle, mc: &MCategory, p: &Par, name: &str) -> jrcat::Result<JoinRestrictionPresheaf> {
    if b.par_presheaves.contains_key(name) {
        let np = b.par_presheaf(name, p.cat())?;
        let bar = np
            .element_bar
            .ok_or_else(|| Error::Bundle(format!("presheaves.{name}: element_bar is required over par")))?;
        return Ok(JoinRestrictionPresheaf::by_search(RestrictionPresheaf::new(&p.rc, np.presheaf, bar)?));
    }
    if let Some(d) = representable_object(p.cat(), name) {
        return Ok(yoneda_jr(&p.rc, d));
    }
    let q = resolve_presheaf(b, Some(mc), name)?;
    Ok(JoinRestrictionPresheaf::by_search(f_tilde(mc, p, &q)?.rp))
}

const SAMPLE: usize = 32;

fn check_laws(b: &Bundle, bound: FamilyBound, seed: u64, out: &mut Outcome) -> jrcat::Result<()> {
    let c = &b.cat;
    out.add("category", &validate_category(c));
    out.info(format!("{} objects, {} morphisms", c.num_objects(), c.num_morphisms()));
    if let Some(mc) = b.monics.as_ref().map(|_| b.m_category()).transpose()? {
        out.add("m-system", &check_m_system(&mc));
    }
    let Some(_) = b.restriction else { return Ok(()) };
    let x = b.restriction_category()?;
    out.add("restriction", &check_restriction_axioms(&x));
    out.add("order", &check_hom_order(&x));
    out.add("join", &check_join_axioms(&x, bound));
    let mut rps = Vec::new();
    for (name, np) in &b.presheaves {
        let Some(bar) = &np.element_bar else { continue };
        let rp = RestrictionPresheaf::new(&x, np.presheaf.clone(), bar.clone())?;
        let report = check_rp_axioms(&x, &rp);
        out.add(&format!("presheaf {name}"), &report);
        if report.is_empty() {
            let jp = JoinRestrictionPresheaf::by_search(rp.clone());
            out.add(&format!("presheaf {name}"), &check_jrp_axioms(&x, &jp, bound));
            rps.push((name.clone(), rp));
        }
    }
    // α ∘ ᾱ = α and ᾱ idempotent on sampled transformations
    for (pn, p) in &rps {
        for (qn, q) in &rps {
            for alpha in nat_transformations(c, &p.presheaf, &q.presheaf, Some(SAMPLE), Some(seed)) {
                let r = hom_restriction(&x, p, q, &alpha)?;
                if r.then(&alpha) != alpha || hom_restriction(&x, p, p, &r)? != r {
                    out.fail("transformations", format!("PSH-R1 -- {pn} => {qn} {:?}", alpha.components));
                }
            }
        }
    }
    Ok(())
}

fn bundle_json(b: &Bundle) -> jrcat::Result<Value> {
    Ok(serde_json::to_value(b.to_file()?)?)
}

fn run(cli: &Cli, out: &mut Outcome) -> jrcat::Result<()> {
    let bound = FamilyBound { max_size: cli.max_family, ..Default::default() };
    match &cli.command {
        Command::CheckLaws { bundle } => {
            let b = resolve_bundle(bundle)?;
            check_laws(&b, bound, cli.seed, out)?;
        }
        Command::BuildPar { bundle } => {
            let mc = resolve_bundle(bundle)?.m_category()?;
            let report = check_m_system(&mc);
            out.add("m-system", &report);
            if !report.is_empty() {
                return Ok(());
            }
            let p = par(&mc)?;
            out.info(format!("par: {} objects, {} morphisms", p.cat().num_objects(), p.cat().num_morphisms()));
            out.add("restriction", &check_restriction_axioms(&p.rc));
            out.add("join", &check_join_axioms(&p.rc, bound));
            out.data("bundle", bundle_json(&Bundle::from_restriction(&p.rc))?);
        }
        Command::Karoubi { bundle } => {
            let x = resolve_bundle(bundle)?.restriction_category()?;
            let k = karoubi_r(&x)?;
            out.info(format!("K_r: {} objects, {} morphisms", k.rc.cat().num_objects(), k.rc.cat().num_morphisms()));
            for e in k.rc.unsplit_idempotents() {
                out.fail("karoubi", format!("KR-SPLIT {}", e.0));
            }
            if !is_full_and_faithful(&k.embedding, &x, &k.rc) {
                out.fail("karoubi", "KR-EMBED -- embedding is not full and faithful");
            }
            out.add("restriction", &check_restriction_axioms(&k.rc));
            out.add("join", &check_join_axioms(&k.rc, bound));
            out.data("bundle", bundle_json(&Bundle::from_restriction(&k.rc))?);
        }
        Command::Geometric { bundle } => {
            let mc = resolve_bundle(bundle)?.m_category()?;
            out.add("m-system", &check_m_system(&mc));
            out.add("geometric", &is_geometric(&mc, cli.max_family)?);
        }
        Command::Topology { bundle } => {
            let mc = resolve_bundle(bundle)?.m_category()?;
            let j = generate_topology(&mc)?;
            out.add("topology", &check_topology(mc.cat(), &j));
            for a in mc.cat().objects() {
                out.info(format!("{}: {} covering sieves", mc.cat().object_name(a), j.covers(a).count()));
            }
            out.data("covers", serde_json::to_value(j.dump())?);
        }
        Command::SheafCheck { bundle, presheaf } => {
            let b = resolve_bundle(bundle)?;
            let mc = b.m_category()?;
            let p = resolve_presheaf(&b, Some(&mc), presheaf)?;
            let j = generate_topology(&mc)?;
            out.add("sheaf", &sheaf_report(mc.cat(), &p, &j, false));
        }
        Command::Sheafify { bundle, presheaf } => {
            let b = resolve_bundle(bundle)?;
            let mc = b.m_category()?;
            let p = resolve_presheaf(&b, Some(&mc), presheaf)?;
            let j = generate_topology(&mc)?;
            let a = sheafify(mc.cat(), &p, &j)?;
            if !is_sheaf(mc.cat(), &a.sheaf, &j) {
                out.fail("sheafify", "SHEAFIFY -- result is not a sheaf");
            }
            out.info(format!("section counts {:?} -> {:?}", p.sizes(), a.sheaf.sizes()));
            let name = format!("a({presheaf})");
            let ob = Bundle::from_m_category(&mc).with_presheaf(&name, a.sheaf, None);
            out.data("bundle", bundle_json(&ob)?);
        }
        Command::Transfer { bundle, presheaf, direction } => {
            let b = resolve_bundle(bundle)?;
            let mc = b.m_category()?;
            let p = par(&mc)?;
            let j = generate_topology(&mc)?;
            match direction {
                Dir::ToJrp => {
                    let q = resolve_presheaf(&b, Some(&mc), presheaf)?;
                    let t = sheaf_to_jrp(&mc, &p, &j, &q)?;
                    out.add("jrp", &check_rp_axioms(&p.rc, &t.jrp.rp));
                    out.add("jrp", &check_jrp_axioms(&p.rc, &t.jrp, bound));
                    out.info(format!("section counts over par {:?}", t.jrp.rp.presheaf.sizes()));
                    let np = NamedPresheaf {
                        presheaf: t.jrp.rp.presheaf.clone(),
                        element_bar: Some(t.jrp.rp.bar_table().to_vec()),
                    };
                    let ob = Bundle::from_m_category(&mc).with_par_presheaf(&format!("{presheaf}~"), p.cat(), &np);
                    out.data("bundle", bundle_json(&ob)?);
                }
                Dir::ToSheaf => {
                    let jp = resolve_jrp(&b, &mc, &p, presheaf)?;
                    out.add("jrp", &check_jrp_axioms(&p.rc, &jp, bound));
                    let cert = jrp_to_sheaf(&mc, &p, &j, &jp)?;
                    out.add("sheaf", &cert.report);
                    out.info(format!(
                        "{} matching families amalgamated, section counts {:?}",
                        cert.families_checked,
                        cert.dot.presheaf.sizes()
                    ));
                    let ob = Bundle::from_m_category(&mc).with_presheaf(&format!("{presheaf}."), cert.dot.presheaf, None);
                    out.data("bundle", bundle_json(&ob)?);
                }
            }
        }
        Command::Roundtrip { bundle, presheaf, direction } => {
            let b = resolve_bundle(bundle)?;
            let mc = b.m_category()?;
            let p = par(&mc)?;
            let j = generate_topology(&mc)?;
            let report = match direction {
                Dir::ToJrp => {
                    let q = resolve_presheaf(&b, Some(&mc), presheaf)?;
                    roundtrip_report(&mc, &p, &j, presheaf, RoundtripInput::Sheaf(&q))?
                }
                Dir::ToSheaf => {
                    let jp = resolve_jrp(&b, &mc, &p, presheaf)?;
                    roundtrip_report(&mc, &p, &j, presheaf, RoundtripInput::Jrp(&jp))?
                }
            };
            for check in report.failures() {
                let detail = check.detail.as_deref().map(|d| format!(" -- {d}")).unwrap_or_default();
                out.fail("roundtrip", format!("{}{detail}", check.name));
            }
            out.info(format!(
                "{} checks, iso witness {}",
                report.checks.len(),
                if report.witness.is_some() { "found" } else { "not found" }
            ));
            out.data("report", serde_json::to_value(&report)?);
        }
        Command::Unit { bundle } => {
            let x = resolve_bundle(bundle)?.restriction_category()?;
            let u = cocompletion_unit(&x)?;
            out.add("unit", &u.report);
            let entries: Vec<Value> = u
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "object": x.cat().object_name(e.object),
                        "sections": e.route.rp.presheaf.sizes(),
                        "explicit": e.explicit.components,
                        "searched": e.searched.is_some(),
                    })
                })
                .collect();
            out.info(format!("{} objects compared", entries.len()));
            out.data("objects", Value::Array(entries));
        }
    }
    Ok(())
}

fn is_full_and_faithful(f: &Functor, x: &jrcat::RestrictionCategory, y: &jrcat::RestrictionCategory) -> bool {
    f.is_full_and_faithful(x.cat(), y.cat())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Bundle(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

fn write_summary(path: &Path, summary: &Value) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    std::fs::write(path, text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    let mut out = Outcome::default();
    let result = run(&cli, &mut out);
    out.lines.sort();
    for line in &out.info {
        println!("{line}");
    }
    for line in &out.lines {
        println!("{line}");
    }
    let (code, error) = match &result {
        Ok(()) if out.lines.is_empty() => (0, None),
        Ok(()) => (1, None),
        Err(e) => (exit_code(e), Some(e.to_string())),
    };
    match (&error, code) {
        (Some(e), 3) => eprintln!("internal error: {e}"),
        (Some(e), _) => eprintln!("error: {e}"),
        (None, 0) => println!("PASS"),
        (None, _) => println!("FAIL ({} violations)", out.lines.len()),
    }
    let out_path = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("JRCAT_OUT_DIR").map(|d| PathBuf::from(d).join(format!("{command}.json"))));
    if let Some(path) = out_path {
        let mut summary = json!({
            "command": command,
            "passed": code == 0,
            "exit_code": code,
            "violations": out.lines,
            "info": out.info,
        });
        if let Some(e) = &error {
            summary["error"] = Value::String(e.clone());
        }
        for (k, v) in std::mem::take(&mut out.data) {
            summary[k.as_str()] = v;
        }
        if let Err(e) = write_summary(&path, &summary) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
