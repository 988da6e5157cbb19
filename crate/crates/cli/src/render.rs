use serde_json::{json, Value};

use nlum::consistency::{GainWitness, ReachabilityBound};
use nlum::{Event, Partition, Rational, Verdict, Witness};

pub fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rationals(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rational).collect())
}

pub fn event(p: &Partition, e: Event) -> Value {
    json!(p.event_labels(e))
}

/// Column order of the printed tables: non-trivial events by size, then `∅` and `Ω`.
pub fn table_order(n: usize) -> Vec<Event> {
    let mut events: Vec<Event> = nlum::algebra::all_events(n).filter(|e| !e.is_empty() && !e.is_full()).collect();
    events.sort_by_key(|e| (e.len(), e.atom_indices().collect::<Vec<_>>()));
    events.push(Event::empty(n));
    events.push(Event::full(n));
    events
}

pub fn verdict(p: &Partition, v: &Verdict) -> Value {
    let mut out = json!({ "holds": v.holds });
    if let Some(w) = &v.witness {
        out["witness"] = witness(p, w);
    }
    out
}

pub fn witness(p: &Partition, w: &Witness) -> Value {
    match w {
        Witness::Events { events } => json!({
            "kind": "events",
            "events": events.iter().map(|e| event(p, *e)).collect::<Vec<_>>(),
        }),
        Witness::Dominating { probability } => json!({
            "kind": "dominating",
            "probability": rationals(probability),
        }),
        Witness::Envelope { points } => json!({
            "kind": "envelope",
            "points": points.iter().map(|pt| json!({
                "event": event(p, pt.event),
                "probability": rationals(&pt.probability),
            })).collect::<Vec<_>>(),
        }),
        Witness::ShiftedEnvelope { points } => json!({
            "kind": "shifted_envelope",
            "points": points.iter().map(|pt| json!({
                "event": event(p, pt.event),
                "probability": rationals(&pt.probability),
                "shift": rational(&pt.shift),
            })).collect::<Vec<_>>(),
        }),
        Witness::Stakes(g) => stakes(p, g),
        Witness::Reachability { atom, bound } => {
            let label = p.label(*atom);
            let inequality = match bound {
                ReachabilityBound::Upper => format!("u({label}) + sum of the other lower bounds <= 1"),
                ReachabilityBound::Lower => format!("l({label}) + sum of the other upper bounds >= 1"),
            };
            json!({ "kind": "reachability", "atom": label, "violated": inequality })
        }
    }
}

fn stakes(p: &Partition, g: &GainWitness) -> Value {
    let mut out = json!({
        "kind": "stakes",
        "notion": g.notion.to_string(),
        "stakes": g.stakes.iter().map(|s| json!({
            "event": event(p, s.event),
            "value": rational(&s.value),
            "stake": rational(&s.stake),
        })).collect::<Vec<_>>(),
        "gains": rationals(&g.gains),
        "max_gain": rational(&g.max_gain()),
    });
    if let Some(t) = g.target {
        out["target"] = event(p, t);
    }
    out
}
