//! JSON document format for timed automata.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{ClockConstraint, CmpOp, Edge, Guard, TimedAutomaton};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpDoc {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    /// Shorthand for the two closed atoms `<=` and `>=`.
    #[serde(rename = "==")]
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub clock: String,
    pub op: OpDoc,
    #[serde(rename = "const")]
    pub bound: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub action: String,
    #[serde(default)]
    pub guard: Vec<ConstraintDoc>,
    #[serde(default)]
    pub resets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaDocument {
    #[serde(default)]
    pub clocks: Vec<String>,
    pub locations: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub accepting: Vec<String>,
    #[serde(default)]
    pub invariants: BTreeMap<String, Vec<ConstraintDoc>>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

fn index(names: &[String], kind: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(Error::model(format!("empty {kind} name")));
        }
        if map.insert(n.clone(), i).is_some() {
            return Err(Error::model(format!("duplicate {kind} '{n}'")));
        }
    }
    Ok(map)
}

fn lookup(map: &HashMap<String, usize>, name: &str, kind: &str) -> Result<usize> {
    map.get(name).copied().ok_or_else(|| Error::model(format!("undeclared {kind} '{name}'")))
}

impl TaDocument {
    pub fn into_automaton(self) -> Result<TimedAutomaton> {
        let locs = index(&self.locations, "location")?;
        let clocks = index(&self.clocks, "clock")?;

        let guard = |docs: &[ConstraintDoc]| -> Result<Guard> {
            let mut out = Vec::with_capacity(docs.len());
            for d in docs {
                let clock = lookup(&clocks, &d.clock, "clock")?;
                let mut push = |op| out.push(ClockConstraint { clock, op, bound: d.bound });
                match d.op {
                    OpDoc::Lt => push(CmpOp::Lt),
                    OpDoc::Le => push(CmpOp::Le),
                    OpDoc::Ge => push(CmpOp::Ge),
                    OpDoc::Gt => push(CmpOp::Gt),
                    OpDoc::Eq => {
                        push(CmpOp::Le);
                        push(CmpOp::Ge);
                    }
                }
            }
            Ok(out)
        };

        let initial = lookup(&locs, &self.initial, "location")?;
        let mut accepting = vec![false; self.locations.len()];
        for name in &self.accepting {
            accepting[lookup(&locs, name, "location")?] = true;
        }
        let mut invariants = vec![Vec::new(); self.locations.len()];
        for (name, docs) in &self.invariants {
            invariants[lookup(&locs, name, "location")?] = guard(docs)?;
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let mut resets = Vec::with_capacity(e.resets.len());
            for r in &e.resets {
                let c = lookup(&clocks, r, "clock")?;
                if !resets.contains(&c) {
                    resets.push(c);
                }
            }
            edges.push(Edge {
                source: lookup(&locs, &e.from, "location")?,
                target: lookup(&locs, &e.to, "location")?,
                action: e.action.clone(),
                guard: guard(&e.guard)?,
                resets,
            });
        }
        TimedAutomaton::from_parts(self.clocks, self.locations, initial, accepting, invariants, edges)
    }

    /// Writes every atom individually; `==` is never emitted.
    pub fn from_automaton(a: &TimedAutomaton) -> TaDocument {
        let constraint = |cc: &ClockConstraint| ConstraintDoc {
            clock: a.clocks[cc.clock].clone(),
            op: match cc.op {
                CmpOp::Lt => OpDoc::Lt,
                CmpOp::Le => OpDoc::Le,
                CmpOp::Ge => OpDoc::Ge,
                CmpOp::Gt => OpDoc::Gt,
            },
            bound: cc.bound,
        };
        TaDocument {
            clocks: a.clocks.clone(),
            locations: a.locations.clone(),
            initial: a.locations[a.initial].clone(),
            accepting: (0..a.locations.len()).filter(|&l| a.accepting[l]).map(|l| a.locations[l].clone()).collect(),
            invariants: a
                .invariants
                .iter()
                .enumerate()
                .filter(|(_, inv)| !inv.is_empty())
                .map(|(l, inv)| (a.locations[l].clone(), inv.iter().map(constraint).collect()))
                .collect(),
            edges: a
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    from: a.locations[e.source].clone(),
                    to: a.locations[e.target].clone(),
                    action: e.action.clone(),
                    guard: e.guard.iter().map(constraint).collect(),
                    resets: e.resets.iter().map(|&c| a.clocks[c].clone()).collect(),
                })
                .collect(),
        }
    }
}
