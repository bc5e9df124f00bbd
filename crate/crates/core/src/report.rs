//! Whole-pipeline analysis of one substitution, as a JSON report.

use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::algebra::{perron_data, PerronData};
use crate::cohomology::{crc_with_rank, h1_lower_bound, CrcVerdict};
use crate::error::{Error, Result};
use rayon::prelude::*;

use crate::corpus::CorpusItem;
use crate::factors::{build_stacks, maximal_pure_discrete_factor, merge_equal_images};
use crate::geometry::Geometry;
use crate::pair_dynamics::{coincidence_rank, fixed_tiling_asymptotic_cycles, Caps, CoincidenceRank, FiberSet};
use crate::properize::{properize, ProperRewrite};
use crate::subst::Substitution;

pub const SCHEMA: &str = "1";

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    pub caps: Caps,
    /// Record stage errors in the report instead of failing.
    pub keep_going: bool,
    /// Include wall-clock timings (breaks byte-identical output).
    pub timings: bool,
}

/// One row of the corpus summary table.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub d: Option<usize>,
    pub norm: Option<String>,
    pub cr: Option<usize>,
    pub bound: Option<i64>,
    pub verdict: String,
}

impl SummaryRow {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "d": self.d,
            "norm": self.norm,
            "cr": self.cr,
            "bound": self.bound,
            "verdict": self.verdict,
        })
    }

    pub fn error(name: &str, e: &Error) -> SummaryRow {
        SummaryRow {
            name: name.to_string(),
            d: None,
            norm: None,
            cr: None,
            bound: None,
            verdict: format!("error ({}): {e}", e.kind()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub json: Value,
    pub summary: SummaryRow,
}

enum Outcome<T> {
    Done(T),
    Skipped(String),
}

impl<T> Outcome<T> {
    fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Done(t) => Some(t),
            Outcome::Skipped(_) => None,
        }
    }

    fn json(&self, f: impl FnOnce(&T) -> Value) -> Value {
        match self {
            Outcome::Done(t) => f(t),
            Outcome::Skipped(why) => not_applicable(why),
        }
    }
}

fn not_applicable(why: &str) -> Value {
    Value::String(format!("not applicable: {why}"))
}

fn error_json(stage: &str, e: &Error) -> Value {
    json!({"stage": stage, "kind": e.kind(), "exit_code": e.exit_code(), "message": e.to_string()})
}

struct Runner<'a> {
    opts: &'a AnalysisOptions,
    errors: Vec<Value>,
    timings: Map<String, Value>,
}

impl Runner<'_> {
    /// Precondition failures become skip reasons; other errors abort unless
    /// `keep_going` is set.
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<Outcome<T>> {
        let t = Instant::now();
        let r = f();
        if self.opts.timings {
            self.timings.insert(name.into(), json!(t.elapsed().as_secs_f64() * 1e3));
        }
        match r {
            Ok(v) => Ok(Outcome::Done(v)),
            Err(Error::Precondition(p)) => Ok(Outcome::Skipped(p.to_string())),
            Err(e) if self.opts.keep_going => {
                self.errors.push(error_json(name, &e));
                Ok(Outcome::Skipped(format!("{name} failed: {e}")))
            }
            Err(e) => Err(e.in_stage(name)),
        }
    }
}

fn gate<T>(o: &Outcome<T>, what: &str) -> std::result::Result<(), String> {
    match o {
        Outcome::Done(_) => Ok(()),
        Outcome::Skipped(why) => Err(format!("{what}: {why}")),
    }
}

fn rank_json(r: &CoincidenceRank) -> Value {
    let g = perron_data(&r.analysed.abelianization())
        .ok()
        .and_then(|p| Geometry::new(&r.analysed, &p).ok());
    r.to_json(g.as_ref())
}

fn cycles_json(s: &Substitution, caps: &Caps) -> Result<Value> {
    let seeds = s.asymptotic_cycles()?;
    let geo = match fixed_tiling_asymptotic_cycles(s, caps) {
        Ok(a) => a.to_json(s),
        Err(Error::Precondition(p)) => not_applicable(&p.to_string()),
        Err(e) => return Err(e),
    };
    Ok(json!({
        "seed_cycles": seeds
            .iter()
            .map(|c| c.iter().map(|seed| s.seed_string(seed)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "fixed_tilings": geo,
    }))
}

fn classification(s: &Substitution, perron: &Outcome<PerronData>, aperiodic: &Outcome<bool>) -> Value {
    let primitive = s.is_primitive();
    let mut m = Map::new();
    m.insert("alphabet_size".into(), json!(s.size()));
    m.insert("primitive".into(), json!(primitive));
    m.insert("aperiodic".into(), aperiodic.json(|a| json!(a)));
    m.insert("proper".into(), json!(s.is_proper()));
    for key in ["pisot", "irreducible", "unimodular", "degree", "norm"] {
        let v = perron.json(|p| match key {
            "pisot" => json!(p.pisot),
            "irreducible" => json!(p.irreducible_charpoly),
            "unimodular" => json!(p.unimodular),
            "degree" => json!(p.degree),
            _ => json!(p.signed_norm.to_string()),
        });
        m.insert(key.into(), v);
    }
    Value::Object(m)
}

pub fn analyze(s: &Substitution, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let mut run = Runner {
        opts,
        errors: Vec::new(),
        timings: Map::new(),
    };
    let caps = &opts.caps;
    let primitive = s.is_primitive();

    let aperiodic: Outcome<bool> = if primitive {
        run.stage("aperiodicity", || s.require_aperiodic().map(|_| true))?
    } else {
        Outcome::Skipped("substitution is not primitive".into())
    };
    let perron: Outcome<PerronData> = if primitive {
        run.stage("perron", || perron_data(&s.abelianization()))?
    } else {
        Outcome::Skipped("substitution is not primitive".into())
    };
    let analysable = gate(&aperiodic, "aperiodicity");

    let proper: Outcome<ProperRewrite> = match &analysable {
        Ok(()) => run.stage("properize", || properize(s))?,
        Err(why) => Outcome::Skipped(why.clone()),
    };
    let pisot = match perron.ok() {
        Some(p) if p.pisot => Ok(()),
        Some(_) => Err("dilation is not a Pisot number".to_string()),
        None => gate(&perron, "perron"),
    };
    let rank: Outcome<CoincidenceRank> = match (&analysable, &pisot) {
        (Ok(()), Ok(())) => run.stage("coincidence_rank", || coincidence_rank(s, caps))?,
        (Err(why), _) | (_, Err(why)) => Outcome::Skipped(why.clone()),
    };
    let verdict: Outcome<CrcVerdict> = match &rank {
        Outcome::Done(r) => run.stage("crc_pipeline", || crc_with_rank(s, r.clone(), caps))?,
        Outcome::Skipped(why) => Outcome::Skipped(format!("coincidence rank: {why}")),
    };
    let h1_input = match &analysable {
        Ok(()) => run.stage("h1_input", || h1_lower_bound(s))?,
        Err(why) => Outcome::Skipped(why.clone()),
    };
    let h1_proper = match &proper {
        Outcome::Done(p) => run.stage("h1_proper", || h1_lower_bound(&p.proper))?,
        Outcome::Skipped(why) => Outcome::Skipped(format!("properization: {why}")),
    };
    let cycles_input = match &analysable {
        Ok(()) => run.stage("asymptotic_cycles", || cycles_json(s, caps))?,
        Err(why) => Outcome::Skipped(why.clone()),
    };
    let cycles_proper = match &proper {
        Outcome::Done(p) => run.stage("asymptotic_cycles_proper", || cycles_json(&p.proper, caps))?,
        Outcome::Skipped(why) => Outcome::Skipped(format!("properization: {why}")),
    };

    let factor_skip = match (&verdict, &rank) {
        (Outcome::Done(v), _) if v.factors.is_some() => None,
        (Outcome::Done(v), _) => Some(match v.cr {
            1 => "pure discrete: the quotient is the maximal equicontinuous factor".to_string(),
            cr => format!("coincidence rank is {cr}, the pair construction needs 2"),
        }),
        (Outcome::Skipped(why), _) => Some(why.clone()),
    };
    let factors = match (&verdict, &factor_skip) {
        (Outcome::Done(v), None) => {
            let (ss, rp) = v.factors.as_ref().expect("checked above");
            let reduced = merge_equal_images(&rp.psi_p)?;
            json!({
                "phi_s": {"substitution": ss.phi_s.to_json(), "sidecar": ss.sidecar_json()},
                "psi_op": {"substitution": rp.psi_op.to_json(), "sidecar": rp.sidecar_json()},
                "psi_p": {
                    "substitution": rp.psi_p.to_json(),
                    "reduced": reduced.0.to_json(),
                    "reduction": reduced.1.iter().map(|c| reduced.0.name_of(*c)).collect::<Vec<_>>(),
                },
            })
        }
        (_, Some(why)) => not_applicable(why),
        _ => unreachable!(),
    };

    let summary = SummaryRow {
        name: s.name().to_string(),
        d: perron.ok().map(|p| p.degree),
        norm: perron.ok().map(|p| p.signed_norm.to_string()),
        cr: rank.ok().map(|r| r.cr),
        bound: verdict.ok().and_then(|v| v.bound_from_op.as_ref().map(|b| b.lower_bound)),
        verdict: match &verdict {
            Outcome::Done(v) if v.theorem_applies => format!(
                "theorem applies, bound {} {}",
                v.bound_claimed.unwrap_or_default(),
                if v.consistent == Some(true) { "consistent" } else { "INCONSISTENT" }
            ),
            Outcome::Done(v) if v.cr == 2 => "cr 2, even norm: bound not asserted".to_string(),
            Outcome::Done(_) => "pure discrete".to_string(),
            Outcome::Skipped(why) => format!("not applicable: {why}"),
        },
    };

    let mut meta = Map::new();
    meta.insert(
        "caps".into(),
        json!({"states": caps.states, "depth": caps.depth, "tuple": caps.tuple}),
    );
    meta.insert(
        "fiber_states".into(),
        rank.json(|r| json!(r.fiber_states)),
    );
    if opts.timings {
        meta.insert("timings_ms".into(), Value::Object(run.timings.clone()));
    }

    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("input".into(), s.to_json());
    m.insert("classification".into(), classification(s, &perron, &aperiodic));
    m.insert("perron".into(), perron.json(PerronData::to_json));
    m.insert("properization".into(), proper.json(|p| p.to_json(s)));
    m.insert("coincidence_rank".into(), rank.json(rank_json));
    m.insert("factors".into(), factors);
    m.insert(
        "cohomology".into(),
        json!({
            "input": h1_input.json(|b| b.to_json()),
            "proper": h1_proper.json(|b| b.to_json()),
        }),
    );
    m.insert("crc_verdict".into(), verdict.json(|v| {
        let mut j = v.to_json();
        if let Some((_, rp)) = &v.factors {
            j["op_matrix"] = json!(rp.psi_op.abelianization().to_i64_rows());
        }
        j
    }));
    m.insert(
        "asymptotic_cycles".into(),
        json!({"input": cycles_input.json(Value::clone), "proper": cycles_proper.json(Value::clone)}),
    );
    m.insert("metadata".into(), Value::Object(meta));
    m.insert("errors".into(), Value::Array(run.errors));
    Ok(AnalysisReport {
        json: Value::Object(m),
        summary,
    })
}

/// Reports for several corpus items, in input order. Items run in parallel; an
/// item that fails becomes an error row instead of aborting the run.
pub fn run_corpus(items: &[&CorpusItem], opts: &AnalysisOptions) -> (Vec<Value>, Vec<SummaryRow>) {
    let results: Vec<Result<AnalysisReport>> = items.par_iter().map(|c| analyze(&c.substitution(), opts)).collect();
    results
        .into_iter()
        .zip(items)
        .map(|(r, c)| match r {
            Ok(r) => (r.json, r.summary),
            Err(e) => (
                json!({"schema": SCHEMA, "input": c.substitution().to_json(), "errors": [error_json("analyze", &e)]}),
                SummaryRow::error(c.name, &e),
            ),
        })
        .unzip()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    /// Stack substitution.
    S,
    /// Ordered pair substitution.
    Op,
    /// Unordered pair substitution.
    P,
}

fn proper_form(s: &Substitution) -> Result<Substitution> {
    if s.is_proper() {
        Ok(s.clone())
    } else {
        Ok(properize(s)?.proper)
    }
}

/// One factor substitution and its sidecar, as emitted by `factor`.
pub fn factor_json(s: &Substitution, which: Which, caps: &Caps) -> Result<Value> {
    let out = match which {
        Which::S => {
            let ss = build_stacks(&proper_form(s)?, caps)?;
            json!({"factor": "s", "substitution": ss.phi_s.to_json(), "sidecar": ss.sidecar_json()})
        }
        Which::Op => {
            let (_, rp) = maximal_pure_discrete_factor(s, caps)?;
            json!({"factor": "op", "substitution": rp.psi_op.to_json(), "sidecar": rp.sidecar_json()})
        }
        Which::P => {
            let (_, rp) = maximal_pure_discrete_factor(s, caps)?;
            let (reduced, classes) = merge_equal_images(&rp.psi_p)?;
            json!({
                "factor": "p",
                "substitution": rp.psi_p.to_json(),
                "sidecar": rp.sidecar_json(),
                "reduced": reduced.to_json(),
                "reduction": classes.iter().map(|c| reduced.name_of(*c)).collect::<Vec<_>>(),
            })
        }
    };
    Ok(out)
}

/// DOT dump of the fiber overlap graph of the proper form of `s`.
pub fn fiber_dot(s: &Substitution, caps: &Caps) -> Result<String> {
    if !s.is_primitive() {
        return Err(crate::Precondition::NotPrimitive(s.name().into()).into());
    }
    let p = proper_form(s)?;
    let perron = perron_data(&p.abelianization())?;
    let g = Geometry::new(&p, &perron)?;
    let fiber = FiberSet::compute(&p, &g, caps)?;
    Ok(format!("// fiber of {}\n{}", p.name(), fiber.graph.to_dot(&p, &g)))
}

/// Plain-text summary table.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let header = ["name", "d", "norm", "cr", "bound", "verdict"];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
            [
                r.name.clone(),
                opt(r.d.map(|x| x.to_string())),
                opt(r.norm.clone()),
                opt(r.cr.map(|x| x.to_string())),
                opt(r.bound.map(|x| x.to_string())),
                r.verdict.clone(),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: &[String]| {
        let parts: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&header.map(String::from));
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
