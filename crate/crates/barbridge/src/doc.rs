//! Canonical JSON result documents. Key order is insertion order and
//! floats are written with 17 significant digits, so emitting the same
//! document twice is byte identical and survives a parse round trip.

use serde_json::{json, Map, Value};

use barbridge_core::extension::{BarExtensionOutput, ExtensionResult};
use barbridge_core::persistence::{BarRepresentation, Chain, PersistenceResult};

pub const SCHEMA: &str = "barbridge/1";

/// A float as a JSON number with fixed 17-significant-digit formatting.
pub fn num(x: f64) -> Value {
    Value::Number(format!("{x:.16e}").parse().expect("numeric literal"))
}

pub fn chain_json(z: &Chain) -> Value {
    Value::Array(
        z.iter()
            .map(|(s, c)| json!([c, s.vertices()]))
            .collect(),
    )
}

pub fn representation_json(rep: &BarRepresentation) -> Value {
    json!({
        "at": rep.at,
        "terms": rep.terms.iter().map(|&(c, id)| json!([c, id])).collect::<Vec<_>>(),
    })
}

/// Bars of the requested degree ranked by (length descending, birth
/// ascending, id); this is the addressing used by --bar.
pub fn ranked_bars(res: &PersistenceResult, k: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = res.bars_of_dim(k).map(|b| b.id).collect();
    ids.sort_by(|&a, &b| {
        let len = |id: usize| {
            let bar = res.bar(id);
            let bv = res.scale().value(bar.birth).unwrap();
            res.scale().value(bar.death).unwrap_or(f64::INFINITY) - bv
        };
        len(b)
            .total_cmp(&len(a))
            .then_with(|| res.bar(a).birth.cmp(&res.bar(b).birth))
            .then(a.cmp(&b))
    });
    ids
}

pub fn barcode_json(res: &PersistenceResult, k: usize) -> Value {
    let ranked = ranked_bars(res, k);
    let rank_of = |id: usize| ranked.iter().position(|&x| x == id);
    let bars: Vec<Value> = res
        .bars()
        .iter()
        .map(|bar| {
            let mut m = Map::new();
            m.insert("id".into(), bar.id.into());
            m.insert(
                "rank".into(),
                rank_of(bar.id).map_or(Value::Null, Into::into),
            );
            m.insert("dim".into(), bar.dim.into());
            m.insert("birth_grade".into(), bar.birth.into());
            m.insert(
                "death_grade".into(),
                if bar.death > res.scale().len() {
                    Value::Null
                } else {
                    bar.death.into()
                },
            );
            m.insert(
                "birth".into(),
                num(res.scale().value(bar.birth).unwrap()),
            );
            m.insert(
                "death".into(),
                res.scale().value(bar.death).map_or(Value::Null, num),
            );
            m.insert("representative".into(), chain_json(res.representative(bar.id)));
            Value::Object(m)
        })
        .collect();
    json!({
        "field": res.field().characteristic(),
        "degree": res.degree(),
        "scale": res.scale().values().iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "bars": bars,
    })
}

fn cycle_set_json(at: usize, baseline: &Chain, offsets: &[Chain]) -> Value {
    json!({
        "at": at,
        "baseline": chain_json(baseline),
        "offsets": offsets.iter().map(chain_json).collect::<Vec<_>>(),
    })
}

pub fn extension_json(res: &ExtensionResult) -> Value {
    let grades: Vec<Value> = res
        .grades
        .iter()
        .map(|g| {
            let mut m = Map::new();
            m.insert("at".into(), g.extension.at.into());
            m.insert(
                "restriction".into(),
                cycle_set_json(g.restriction.at, &g.restriction.baseline, &g.restriction.offsets),
            );
            m.insert(
                "extension".into(),
                cycle_set_json(g.extension.at, &g.extension.baseline, &g.extension.offsets),
            );
            if let Some(bars) = &g.bars {
                m.insert("baseline_bars".into(), representation_json(&bars.baseline));
                m.insert(
                    "offset_bars".into(),
                    Value::Array(bars.offsets.iter().map(representation_json).collect()),
                );
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "psi": res.psi,
        "ell0": res.ell0,
        "p_y": res.p_y,
        "class": chain_json(&res.class),
        "grades": grades,
    })
}

pub fn bar_extension_json(out: &BarExtensionOutput) -> Value {
    json!({
        "psi": out.psi,
        "truncated": out.truncated,
        "classes": out.per_class.iter().map(extension_json).collect::<Vec<_>>(),
    })
}

/// Serializes with 2-space indentation; trailing newline included.
pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}
