//! `centext`: command-line front end for the group engine.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget
//! exhausted. Reports are printed on 0 and 1 only.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use centext::abelian::{
    build_cocycle_cover, canonical_cover_of, load_cover, recognize_abelian, schur_multiplier,
    Cover, CoverSpec,
};
use centext::engine::structure::nilpotency_class;
use centext::engine::{derived_subgroup, load_group, structure_report, Group, GroupSpec};
use centext::lab::{
    claim, entry, k_group, k_order, ktilde, natural_cover, run_suite, SuiteOptions, Verdict,
    ENTRIES,
};
use centext::{Error, Limits};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "centext",
    version,
    about = "Kernel groups K(G,n), their central extensions, and Schur covers"
)]
struct Cli {
    /// Maximum number of elements in any enumerated group.
    #[arg(long, global = true, env = "CENTEXT_BUDGET")]
    budget: Option<usize>,
    /// Largest order decided by exact isomorphism search.
    #[arg(long, global = true)]
    iso_bound: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Verb {
    /// Enumerate K(G,n).
    K {
        /// Group spec file or catalogue name.
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
    },
    /// Compute the central extension K~(G,n) from a cover.
    Ktilde {
        #[arg(long)]
        group: String,
        /// Cover file or bundled cover name; required for non-abelian groups.
        #[arg(long)]
        cover: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
    },
    /// Build the natural cover of an abelian group of odd order.
    NaturalCover {
        #[arg(long)]
        group: String,
    },
    /// Schur multiplier of an abelian group, or the one asserted by a cover.
    Schur {
        #[arg(long)]
        group: String,
        #[arg(long)]
        cover: Option<String>,
    },
    /// Validate a cover file, or build a cocycle cover of an abelian group.
    Cover {
        #[arg(long)]
        group: String,
        #[arg(long, conflicts_with = "twist")]
        cover: Option<String>,
        /// Twist coefficients for the cocycle cover, one per elementary divisor.
        #[arg(long, value_delimiter = ',')]
        twist: Option<Vec<u64>>,
    },
    /// Run the claim registry over the bundled catalogue.
    Verify {
        /// `all` or a comma-separated list of claim ids.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        max_order: Option<usize>,
        /// Values of n, replacing each claim's defaults.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Catalogue names to restrict to.
        #[arg(long, value_delimiter = ',')]
        subjects: Option<Vec<String>>,
        /// Total random samples for sampling claims.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Structure report of a group.
    Report {
        #[arg(long)]
        group: String,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Report {
    command: Value,
    inputs: BTreeMap<String, Value>,
    result: Value,
    assumptions: Vec<String>,
    /// Text rendering; the JSON result is flattened when absent.
    text: Option<String>,
    failed: bool,
}

impl Report {
    fn new(command: Value) -> Self {
        Report {
            command,
            inputs: BTreeMap::new(),
            result: Value::Null,
            assumptions: Vec::new(),
            text: None,
            failed: false,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "assumptions": self.assumptions,
            "tool": "centext",
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    fn render(&self, format: Format) -> String {
        match format {
            // serde_json maps keep keys sorted, so this is canonical
            Format::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("serializable report") + "\n"
            }
            Format::Text => {
                let mut out = self.text.clone().unwrap_or_else(|| {
                    let mut lines = Vec::new();
                    flatten("", &self.result, &mut lines);
                    lines.join("\n") + "\n"
                });
                for a in &self.assumptions {
                    out.push_str(&format!("assumption: {a}\n"));
                }
                out
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        _ => out.push(format!("{prefix}: {v}")),
    }
}

/// A spec read from a file or from the bundled catalogue.
struct Source {
    text: String,
    origin: Value,
    path: Option<String>,
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn read_source(arg: &str, bundled: impl Fn(&str) -> Option<&'static str>) -> Outcome<Source> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| Failure::Input(format!("cannot read {arg}: {e}")))?;
        let origin = json!({ "path": arg, "sha256": digest(&text) });
        return Ok(Source {
            text,
            origin,
            path: Some(arg.to_string()),
        });
    }
    match bundled(arg) {
        Some(text) => Ok(Source {
            text: text.to_string(),
            origin: json!({ "catalogue": arg, "sha256": digest(text) }),
            path: None,
        }),
        None => Err(Failure::Input(format!(
            "`{arg}` is neither a file nor a bundled name"
        ))),
    }
}

fn read_group_spec(arg: &str, report: &mut Report) -> Outcome<GroupSpec> {
    let src = read_source(arg, |k| entry(k).map(|e| e.spec))?;
    report.inputs.insert("group".into(), src.origin);
    Ok(match &src.path {
        Some(p) => GroupSpec::from_path(p)?,
        None => GroupSpec::parse_str(&src.text)?,
    })
}

fn bundled_cover(name: &str) -> Option<&'static str> {
    ENTRIES
        .iter()
        .flat_map(|e| e.covers.iter())
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
}

fn read_cover_spec(arg: &str, report: &mut Report) -> Outcome<CoverSpec> {
    let src = read_source(arg, bundled_cover)?;
    report.inputs.insert("cover".into(), src.origin);
    Ok(match &src.path {
        Some(p) => CoverSpec::from_path(p)?,
        None => CoverSpec::parse_str(&src.text)?,
    })
}

/// Loads the group, and the cover when given; the cover's base must be the
/// same spec as the group.
fn load_inputs(
    group: &str,
    cover: Option<&str>,
    report: &mut Report,
    limits: &Limits,
) -> Outcome<(Group, Option<Cover>)> {
    let gspec = read_group_spec(group, report)?;
    let cspec = cover.map(|c| read_cover_spec(c, report)).transpose()?;
    if let Some(c) = &cspec {
        if c.base != gspec {
            return Err(Failure::Input(
                "the cover's base is not the group given by --group".into(),
            ));
        }
    }
    match cspec {
        Some(c) => {
            let cover = load_cover(&c, limits)?;
            note_cover(&cover, report);
            Ok((cover.base().clone(), Some(cover)))
        }
        None => Ok((load_group(&gspec, limits)?, None)),
    }
}

fn note_cover(cover: &Cover, report: &mut Report) {
    if cover.multiplier_is_assumed() {
        report.assumptions.push(format!(
            "Schur multiplier {} asserted by the cover file, not computed",
            cover.multiplier()
        ));
    }
}

fn cover_summary(c: &Cover) -> Value {
    json!({
        "provenance": c.provenance(),
        "total_order": c.total().order(),
        "kernel_order": c.kernel().order(),
        "multiplier": c.multiplier(),
        "multiplier_assumed": c.multiplier_is_assumed(),
        "centre_image_order": c.centre_image().order(),
        "total_nilpotency_class": nilpotency_class(c.total()),
    })
}

fn structure(g: &Group, limits: &Limits) -> Value {
    let mut v =
        serde_json::to_value(structure_report(g, limits)).expect("serializable structure report");
    if g.is_abelian() {
        if let (Value::Object(m), Ok(t)) = (&mut v, recognize_abelian(g)) {
            m.insert("abelian_type".into(), json!(t));
        }
    }
    v
}

fn run(cli: &Cli) -> Outcome<Report> {
    let mut limits = Limits::default();
    if let Some(b) = cli.budget {
        limits = limits.with_elements(b);
    }
    if let Some(b) = cli.iso_bound {
        limits = limits.with_iso_bound(b);
    }
    let l = &limits;
    match &cli.verb {
        Verb::K { group, n } => {
            let mut r = Report::new(json!({ "verb": "k", "group": group, "n": n }));
            let (g, _) = load_inputs(group, None, &mut r, l)?;
            let k = k_group(&g, *n as usize, l)?;
            r.result = json!({
                "n": n,
                "base_order": g.order(),
                "base_derived_order": derived_subgroup(&g).order(),
                "order": k.order(),
                "predicted_order": k_order(g.order(), k.base_derived().order(), *n as usize).to_string(),
                "structure": structure(k.group(), l),
            });
            Ok(r)
        }
        Verb::Ktilde { group, cover, n } => {
            let mut r =
                Report::new(json!({ "verb": "ktilde", "group": group, "cover": cover, "n": n }));
            let (g, c) = load_inputs(group, cover.as_deref(), &mut r, l)?;
            if c.is_none() && !g.is_abelian() {
                return Err(Failure::Input("a non-abelian group needs --cover".into()));
            }
            let kt = ktilde(&g, *n as usize, c.as_ref(), l)?;
            if c.is_none() {
                r.assumptions
                    .push("cover: canonical cocycle cover of the abelian group".into());
            }
            r.result = json!({
                "n": n,
                "order": kt.order(),
                "h2_order": kt.h2_image().order(),
                "k_order": kt.k().order(),
                "h2_central": kt.h2_image().is_central(),
                "h2_in_derived": kt.h2_image().is_subset_of(&derived_subgroup(kt.group())),
                "cover": cover_summary(kt.cover()),
                "structure": structure(kt.group(), l),
            });
            Ok(r)
        }
        Verb::NaturalCover { group } => {
            let mut r = Report::new(json!({ "verb": "natural-cover", "group": group }));
            let (g, _) = load_inputs(group, None, &mut r, l)?;
            let t = recognize_abelian(&g)?;
            let c = natural_cover(&t, l)?;
            r.result = json!({
                "base_type": t,
                "cover": cover_summary(&c),
                "structure": structure(c.total(), l),
            });
            Ok(r)
        }
        Verb::Schur { group, cover } => {
            let mut r = Report::new(json!({ "verb": "schur", "group": group, "cover": cover }));
            let (g, c) = load_inputs(group, cover.as_deref(), &mut r, l)?;
            let (m, method) = match (&c, g.is_abelian()) {
                (_, true) => (schur_multiplier(&recognize_abelian(&g)?), "gcd-formula"),
                (Some(c), false) => (c.multiplier().clone(), "cover-file"),
                (None, false) => {
                    return Err(Failure::Input(
                        "the multiplier of a non-abelian group must come from --cover".into(),
                    ))
                }
            };
            r.text = Some(format!("{m}\n"));
            r.result = json!({ "multiplier": m, "order": m.order(), "method": method });
            Ok(r)
        }
        Verb::Cover {
            group,
            cover,
            twist,
        } => {
            let mut r = Report::new(
                json!({ "verb": "cover", "group": group, "cover": cover, "twist": twist }),
            );
            let gspec = read_group_spec(group, &mut r)?;
            let Some(path) = cover else {
                let g = load_group(&gspec, l)?;
                let t = recognize_abelian(&g)?;
                let c = match twist {
                    Some(tw) => build_cocycle_cover(&t, Some(tw), l)?,
                    None => canonical_cover_of(&g, l)?,
                };
                r.result = json!({ "valid": true, "base_type": t, "cover": cover_summary(&c) });
                return Ok(r);
            };
            let cspec = read_cover_spec(path, &mut r)?;
            if cspec.base != gspec {
                return Err(Failure::Input(
                    "the cover's base is not the group given by --group".into(),
                ));
            }
            match load_cover(&cspec, l) {
                Ok(c) => {
                    note_cover(&c, &mut r);
                    r.result = json!({ "valid": true, "cover": cover_summary(&c) });
                }
                Err(e @ (Error::InvalidCover(_) | Error::NotHomomorphism(_))) => {
                    r.result = json!({ "valid": false, "reason": e.to_string() });
                    r.failed = true;
                }
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        Verb::Verify {
            suite,
            max_order,
            n,
            subjects,
            samples,
            seed,
        } => {
            let ids: Vec<String> = if suite == "all" {
                Vec::new()
            } else {
                suite.split(',').map(|s| s.trim().to_string()).collect()
            };
            for id in &ids {
                claim(id)?;
            }
            if let Some(keys) = subjects {
                if let Some(k) = keys.iter().find(|k| entry(k).is_none()) {
                    return Err(Failure::Input(format!("unknown catalogue group `{k}`")));
                }
            }
            let mut r = Report::new(json!({
                "verb": "verify", "suite": suite, "max_order": max_order, "n": n,
                "subjects": subjects, "samples": samples, "seed": seed,
            }));
            let opts = SuiteOptions {
                limits,
                max_order: *max_order,
                samples: *samples,
                ns: n.clone(),
                subjects: subjects.clone(),
                seed: *seed,
            };
            let outcomes = run_suite(&ids, &opts)?;
            r.failed = outcomes.iter().any(|o| o.verdict == Verdict::Fail);
            let mut text = String::new();
            for o in &outcomes {
                let counts: Vec<String> = o
                    .counts
                    .iter()
                    .map(|(v, c)| {
                        format!("{} {c}", serde_json::to_value(v).unwrap().as_str().unwrap())
                    })
                    .collect();
                let verdict = serde_json::to_value(o.verdict).unwrap();
                text.push_str(&format!(
                    "{:<24} {:<8} {}\n",
                    o.claim,
                    verdict.as_str().unwrap(),
                    counts.join(", ")
                ));
                for c in o.cases.iter().filter(|c| c.verdict == Verdict::Fail) {
                    text.push_str(&format!(
                        "    {} n={:?}: {}\n",
                        c.subject,
                        c.n,
                        c.failures.join("; ")
                    ));
                }
            }
            r.text = Some(text);
            r.result = json!({ "outcomes": outcomes, "passed": !r.failed });
            Ok(r)
        }
        Verb::Report { group } => {
            let mut r = Report::new(json!({ "verb": "report", "group": group }));
            let (g, _) = load_inputs(group, None, &mut r, l)?;
            r.result = json!({ "model": g.model_name(), "structure": structure(&g, l) });
            Ok(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(report.failed as u8)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
