//! Structured rendering of results.  Field names and nesting are frozen by
//! docs/schema.json; bump `SCHEMA_VERSION` on any breaking change.

use serde_json::{json, Map, Value};

use crate::basis::MultiIndex;
use crate::completion::Completion;
use crate::decide::Certificate;
use crate::error::Error;
use crate::local::LocalDecomposition;
use crate::residue::W1NormalForm;
use crate::unipoly::UniPoly;

pub const SCHEMA_VERSION: u64 = 1;

fn mask_str(mask: MultiIndex, names: &[String]) -> String {
    if mask.is_empty() {
        "1".to_string()
    } else {
        mask.iter()
            .map(|p| names.get(p).cloned().unwrap_or_else(|| format!("?{p}")))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn blocks_json(
    phi1: Option<&std::collections::BTreeMap<MultiIndex, UniPoly>>,
    dec_psi: &crate::local::PsiMap,
    phi2: &std::collections::BTreeMap<MultiIndex, UniPoly>,
    ctx: &Completion,
) -> Map<String, Value> {
    let labels = ctx.label_names();
    let res_names = ctx.tower.names().to_vec();
    let main = ctx.tower.var_name(ctx.main);
    let poly = |u: &UniPoly| u.render(&res_names, main);
    let block = |m: &std::collections::BTreeMap<MultiIndex, UniPoly>| -> Value {
        m.iter()
            .map(|(mask, c)| json!({"mask": mask_str(*mask, &labels), "value": poly(c)}))
            .collect::<Vec<_>>()
            .into()
    };
    let mut out = Map::new();
    if let Some(phi1) = phi1 {
        out.insert("phi1".into(), block(phi1));
    }
    let psi: Vec<Value> = dec_psi
        .iter()
        .map(|((i, j), inner)| {
            json!({
                "i": mask_str(*i, &labels),
                "j": mask_str(*j, &labels),
                "terms": inner
                    .iter()
                    .map(|(l, u)| json!({"pole": l, "value": poly(u)}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    out.insert("psi".into(), psi.into());
    out.insert("phi2".into(), block(phi2));
    out
}

pub fn decomposition_json(dec: &LocalDecomposition, ctx: &Completion) -> Value {
    let mut out = Map::new();
    out.insert("place".into(), ctx.place.render(&ctx.tower).into());
    out.insert("degree".into(), (dec.degree as u64).into());
    out.extend(blocks_json(Some(&dec.phi1), &dec.psi, &dec.phi2, ctx));
    Value::Object(out)
}

pub fn residue_json(nf: &W1NormalForm, ctx: &Completion) -> Value {
    let mut out = Map::new();
    out.insert("place".into(), nf.place.render(&ctx.tower).into());
    out.insert("degree".into(), (nf.degree as u64).into());
    out.extend(blocks_json(None, &nf.psi, &nf.phi2, ctx));
    Value::Object(out)
}

pub fn certificate_json(cert: &Certificate) -> Value {
    match cert {
        Certificate::NonzeroResidue { place, rendered, inner, .. } => json!({
            "kind": cert.kind(),
            "place": place,
            "data": rendered,
            "inner": inner.as_deref().map(certificate_json),
        }),
        Certificate::NonzeroConstant => json!({"kind": cert.kind()}),
        Certificate::ResiduesVanish { levels } => {
            json!({"kind": cert.kind(), "levels": levels})
        }
    }
}

pub fn document(verb: &str, inputs: Value, fields: Map<String, Value>, total_ms: u64) -> Value {
    let mut out = Map::new();
    out.insert("schema_version".into(), SCHEMA_VERSION.into());
    out.insert("verb".into(), verb.into());
    out.insert("inputs".into(), inputs);
    out.extend(fields);
    out.insert("timings".into(), json!({"total_ms": total_ms}));
    Value::Object(out)
}

pub fn error_document(verb: &str, inputs: Value, e: &Error, total_ms: u64) -> Value {
    let mut fields = Map::new();
    fields.insert(
        "error".into(),
        json!({"kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}),
    );
    document(verb, inputs, fields, total_ms)
}
