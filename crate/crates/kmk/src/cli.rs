//! Command-line front end: one verb per invocation, text or structured
//! output, deterministic results.
//!
//! Exit codes: 0 = computed (whatever the verdict), 1 = usage error,
//! 2 = resource ceiling (precision or factorization bound), 3 = internal
//! consistency error (including a cross-check CONFLICT).

use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::completion::Completion;
use crate::decide::{decide_zero, is_norm, CohClass, DecideOpts};
use crate::error::{Error, Result};
use crate::factor::factor_bounded;
use crate::forms::pfister_expr;
use crate::local::normal_form_at;
use crate::oracle::{cross_check, schedule_with_degrees, window_denominator, Agreement};
use crate::parse::{parse_form, parse_poly};
use crate::place::Place;
use crate::report;
use crate::residue::{residue, residue_infinity_mod};
use crate::tower::Tower;

#[derive(Parser)]
#[command(
    name = "kmk",
    version,
    about = "Exact Kato-Milne cohomology over GF(2) rational function fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Text,
    Structured,
}

#[derive(Args)]
pub struct Common {
    /// Field tower: base variables, then the distinguished last variable,
    /// e.g. "t1,t2;x"
    #[arg(long)]
    pub tower: String,
    /// Precision ceiling for local series expansions
    #[arg(long, default_value_t = 8)]
    pub precision: usize,
    /// Trial-degree bound for polynomial factoring
    #[arg(long = "factor-bound", default_value_t = 12)]
    pub factor_bound: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    pub format: OutFormat,
}

#[derive(Subcommand)]
pub enum Verb {
    /// Full local normal form phi1 + psi + phi2 ^ dlog(pi) at a place
    Normalform {
        #[command(flatten)]
        common: Common,
        /// Differential form expression
        #[arg(long)]
        expr: String,
        /// Finite place polynomial, or "infinity"
        #[arg(long)]
        place: String,
    },
    /// Second residue (psi and phi2 blocks) at a place
    Residue {
        #[command(flatten)]
        common: Common,
        /// Differential form expression
        #[arg(long)]
        expr: String,
        /// Finite place polynomial, or "infinity"
        #[arg(long)]
        place: String,
    },
    /// Decide whether a class is zero over the whole tower
    Iszero {
        #[command(flatten)]
        common: Common,
        /// Differential form expression
        #[arg(long)]
        expr: String,
    },
    /// Norm test: decide whether p is a norm for the symbol w
    Isnorm {
        #[command(flatten)]
        common: Common,
        /// Symbol over the base of the tower (no top variable)
        #[arg(long)]
        w: String,
        /// Irreducible polynomial in the top variable
        #[arg(long)]
        p: String,
    },
    /// Pfister-symbol presentation of a form
    Kato {
        #[command(flatten)]
        common: Common,
        /// Differential form expression
        #[arg(long)]
        expr: String,
    },
    /// Cross-check the decision procedure against the witness-search oracle
    Crosscheck {
        #[command(flatten)]
        common: Common,
        /// Differential form expression
        #[arg(long)]
        expr: String,
        /// Window schedule: comma-separated degrees (doubling as
        /// denominator exponents)
        #[arg(long, default_value = "2,4,8")]
        windows: String,
    },
    /// Factor a polynomial over GF(2)
    Factor {
        #[command(flatten)]
        common: Common,
        /// Polynomial to factor
        #[arg(long)]
        p: String,
    },
}

impl Verb {
    fn common(&self) -> &Common {
        match self {
            Verb::Normalform { common, .. }
            | Verb::Residue { common, .. }
            | Verb::Iszero { common, .. }
            | Verb::Isnorm { common, .. }
            | Verb::Kato { common, .. }
            | Verb::Crosscheck { common, .. }
            | Verb::Factor { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Verb::Normalform { .. } => "normalform",
            Verb::Residue { .. } => "residue",
            Verb::Iszero { .. } => "iszero",
            Verb::Isnorm { .. } => "isnorm",
            Verb::Kato { .. } => "kato",
            Verb::Crosscheck { .. } => "crosscheck",
            Verb::Factor { .. } => "factor",
        }
    }

    fn inputs_json(&self) -> Value {
        let c = self.common();
        let mut m = Map::new();
        m.insert("tower".into(), c.tower.clone().into());
        m.insert("precision".into(), (c.precision as u64).into());
        m.insert("factor_bound".into(), (c.factor_bound as u64).into());
        match self {
            Verb::Normalform { expr, place, .. } | Verb::Residue { expr, place, .. } => {
                m.insert("expr".into(), expr.clone().into());
                m.insert("place".into(), place.clone().into());
            }
            Verb::Iszero { expr, .. } | Verb::Kato { expr, .. } => {
                m.insert("expr".into(), expr.clone().into());
            }
            Verb::Isnorm { w, p, .. } => {
                m.insert("w".into(), w.clone().into());
                m.insert("p".into(), p.clone().into());
            }
            Verb::Crosscheck { expr, windows, .. } => {
                m.insert("expr".into(), expr.clone().into());
                m.insert("windows".into(), windows.clone().into());
            }
            Verb::Factor { p, .. } => {
                m.insert("p".into(), p.clone().into());
            }
        }
        Value::Object(m)
    }
}

struct Outcome {
    text: String,
    fields: Map<String, Value>,
    exit: i32,
}

fn parse_place(text: &str, tower: &Tower, factor_bound: usize) -> Result<Place> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("infinity") || t.eq_ignore_ascii_case("inf") {
        return Ok(Place::Infinity);
    }
    let p = parse_poly(t, tower)?;
    Place::finite(p, tower, factor_bound)
}

fn parse_windows(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let d: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad window degree '{}'", part.trim())))?;
        if d == 0 || d > 64 {
            return Err(Error::Domain("window degrees must be in 1..=64".into()));
        }
        out.push(d);
    }
    if out.is_empty() {
        return Err(Error::Domain("empty window schedule".into()));
    }
    Ok(out)
}

fn verdict_text(label_true: &str, label_false: &str, yes: bool, detail: &str) -> String {
    format!("verdict: {}\n{detail}", if yes { label_true } else { label_false })
}

fn execute(verb: Verb) -> Result<Outcome> {
    let c = verb.common();
    let tower = Tower::parse(&c.tower)?;
    let opts = DecideOpts::with_limits(c.precision, c.factor_bound);
    match &verb {
        Verb::Normalform { expr, place, .. } => {
            let w = parse_form(expr, &tower)?;
            let place = parse_place(place, &tower, opts.factor_bound)?;
            let ctx = Completion::new(&tower, &place, opts.factor_bound)?;
            let dec = normal_form_at(&w, &ctx, opts.precision, opts.ceiling)?;
            let mut fields = Map::new();
            fields.insert("normal_form".into(), report::decomposition_json(&dec, &ctx));
            Ok(Outcome { text: dec.render(&ctx), fields, exit: 0 })
        }
        Verb::Residue { expr, place, .. } => {
            let w = parse_form(expr, &tower)?;
            let place = parse_place(place, &tower, opts.factor_bound)?;
            let ctx = Completion::new(&tower, &place, opts.factor_bound)?;
            let nf = match place {
                Place::Infinity => residue_infinity_mod(&w, &ctx, opts.precision, opts.ceiling)?,
                Place::Finite(_) => residue(&w, &ctx, opts.precision, opts.ceiling)?,
            };
            let mut fields = Map::new();
            fields.insert("residue".into(), report::residue_json(&nf, &ctx));
            Ok(Outcome { text: nf.render(&ctx), fields, exit: 0 })
        }
        Verb::Iszero { expr, .. } => {
            let w = parse_form(expr, &tower)?;
            let (zero, cert) = decide_zero(&w, &tower, &opts)?;
            let mut fields = Map::new();
            fields.insert("verdict".into(), zero.into());
            fields.insert("certificate".into(), report::certificate_json(&cert));
            Ok(Outcome {
                text: verdict_text("zero", "nonzero", zero, &cert.describe()),
                fields,
                exit: 0,
            })
        }
        Verb::Isnorm { w, p, .. } => {
            let wf = parse_form(w, &tower)?;
            let pp = parse_poly(p, &tower)?;
            let (yes, cert) = is_norm(&wf, &pp, &tower, &opts)?;
            let mut fields = Map::new();
            fields.insert("verdict".into(), yes.into());
            fields.insert("certificate".into(), report::certificate_json(&cert));
            Ok(Outcome {
                text: verdict_text("norm", "not-a-norm", yes, &cert.describe()),
                fields,
                exit: 0,
            })
        }
        Verb::Kato { expr, .. } => {
            let w = parse_form(expr, &tower)?;
            let symbols: Vec<String> =
                pfister_expr(&w).iter().map(|s| s.render(&tower)).collect();
            let text =
                if symbols.is_empty() { "0".to_string() } else { symbols.join(" + ") };
            let mut fields = Map::new();
            fields.insert("symbols".into(), symbols.into());
            Ok(Outcome { text, fields, exit: 0 })
        }
        Verb::Crosscheck { expr, windows, .. } => {
            let w = parse_form(expr, &tower)?;
            let degrees = parse_windows(windows)?;
            let u = window_denominator(&w, &tower, opts.factor_bound)?;
            let schedule = schedule_with_degrees(&u, &degrees, tower.len());
            let class = CohClass::new(w, tower.clone())?;
            let rep = cross_check(&class, &schedule, &opts)?;
            let mut text = rep.agreement.label().to_string();
            match rep.witness_window {
                Some(i) => text.push_str(&format!(
                    "\nwitness found at window degree {}",
                    degrees[i]
                )),
                None => text.push_str("\nno witness within the window schedule"),
            }
            text.push_str(&format!("\ndecision: {}", rep.certificate.describe()));
            let mut fields = Map::new();
            fields.insert(
                "crosscheck".into(),
                json!({
                    "agreement": rep.agreement.label(),
                    "decided_zero": rep.decided_zero,
                    "witness_window": rep.witness_window,
                    "windows": degrees,
                }),
            );
            fields.insert("certificate".into(), report::certificate_json(&rep.certificate));
            let exit = if rep.agreement == Agreement::Conflict { 3 } else { 0 };
            Ok(Outcome { text, fields, exit })
        }
        Verb::Factor { p, .. } => {
            let pp = parse_poly(p, &tower)?;
            let factors = factor_bounded(&pp, opts.factor_bound)?;
            let names = tower.names();
            let text = factors
                .iter()
                .map(|(f, e)| {
                    if *e == 1 {
                        f.render(names)
                    } else {
                        format!("({})^{}", f.render(names), e)
                    }
                })
                .collect::<Vec<_>>()
                .join(" * ");
            let text = if text.is_empty() { "1".to_string() } else { text };
            let mut fields = Map::new();
            fields.insert(
                "factors".into(),
                factors
                    .iter()
                    .map(|(f, e)| json!({"poly": f.render(names), "multiplicity": e}))
                    .collect::<Vec<_>>()
                    .into(),
            );
            Ok(Outcome { text, fields, exit: 0 })
        }
    }
}

/// Parse argv, run one command, and return the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let format = cli.verb.common().format;
    let name = cli.verb.name();
    let inputs = cli.verb.inputs_json();
    match execute(cli.verb) {
        Ok(out) => {
            match format {
                OutFormat::Text => println!("{}", out.text),
                OutFormat::Structured => {
                    let ms = started.elapsed().as_millis() as u64;
                    let doc = report::document(name, inputs, out.fields, ms);
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            out.exit
        }
        Err(e) => {
            match format {
                OutFormat::Text => eprintln!("error: {e}"),
                OutFormat::Structured => {
                    let ms = started.elapsed().as_millis() as u64;
                    let doc = report::error_document(name, inputs, &e, ms);
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            e.exit_code()
        }
    }
}
