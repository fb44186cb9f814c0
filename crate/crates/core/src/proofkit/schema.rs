use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::syntax::{AgentId, Formula};

/// Largest number of propositional variables the tautology check accepts.
pub const PC_VARIABLE_LIMIT: usize = 24;

/// One axiom schema, already specialised to an agent where it mentions one.
/// Atoms of the pattern are metavariables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub id: &'static str,
    pub agent: Option<AgentId>,
    pub pattern: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaMatch {
    pub id: String,
    pub agent: Option<AgentId>,
    pub substitution: BTreeMap<String, Formula>,
}

impl SchemaMatch {
    /// Re-applies the substitution to the schema it came from. Tautologies
    /// have no schema and give `None`.
    pub fn instantiate(&self, agents: usize) -> Option<Formula> {
        schemas(agents)
            .into_iter()
            .find(|s| s.id == self.id && s.agent == self.agent)
            .map(|s| substitute(&s.pattern, &self.substitution))
    }
}

/// Schema identifiers accepted in scripts, in matching order. `PC` is last.
pub const SCHEMA_IDS: &[&str] = &[
    "Kbox", "Tbox", "4box", "5box", "Kstit", "Tstit", "4stit", "5stit", "Kagt", "Tagt", "4agt", "5agt",
    "KO", "KX", "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "XFunc", "UFix", "PC",
];

fn v(name: &str) -> Formula {
    Formula::atom(name)
}

fn imp(a: Formula, b: Formula) -> Formula {
    Formula::implies(a, b)
}

/// K, T, 4 and 5 for a box-like operator.
fn s5(ids: [&'static str; 4], agent: Option<AgentId>, op: &dyn Fn(Formula) -> Formula) -> Vec<Schema> {
    let (a, b) = (v("a"), v("b"));
    let k = imp(op(imp(a.clone(), b.clone())), imp(op(a.clone()), op(b)));
    let t = imp(op(a.clone()), a.clone());
    let four = imp(op(a.clone()), op(op(a.clone())));
    let five = imp(Formula::not(op(a.clone())), op(Formula::not(op(a))));
    ids.into_iter()
        .zip([k, t, four, five])
        .map(|(id, pattern)| Schema { id, agent, pattern })
        .collect()
}

fn k_only(id: &'static str, agent: Option<AgentId>, op: &dyn Fn(Formula) -> Formula) -> Schema {
    let (a, b) = (v("a"), v("b"));
    Schema {
        id,
        agent,
        pattern: imp(op(imp(a.clone(), b.clone())), imp(op(a), op(b))),
    }
}

/// All schemas for `agents` agents, in matching order.
pub fn schemas(agents: usize) -> Vec<Schema> {
    let all: Vec<AgentId> = AgentId::all(agents).collect();
    let a = v("a");
    let mut out = s5(["Kbox", "Tbox", "4box", "5box"], None, &Formula::nec);
    for &i in &all {
        out.extend(s5(["Kstit", "Tstit", "4stit", "5stit"], Some(i), &|f| Formula::stit(i, f)));
    }
    out.extend(s5(["Kagt", "Tagt", "4agt", "5agt"], None, &Formula::group_stit));
    for &i in &all {
        out.push(k_only("KO", Some(i), &|f| Formula::ought(i, f)));
    }
    out.push(k_only("KX", None, &Formula::next));
    for &i in &all {
        out.push(Schema {
            id: "A1",
            agent: Some(i),
            pattern: imp(Formula::nec(a.clone()), Formula::stit(i, a.clone())),
        });
    }
    if !all.is_empty() {
        let each = |i: AgentId| v(&format!("a{}", i.index()));
        let lhs = Formula::conjunction(all.iter().map(|&i| Formula::poss(Formula::stit(i, each(i))))).expect("agents");
        let rhs = Formula::poss(Formula::conjunction(all.iter().map(|&i| Formula::stit(i, each(i)))).expect("agents"));
        out.push(Schema {
            id: "A2",
            agent: None,
            pattern: imp(lhs, rhs),
        });
        let lhs = Formula::conjunction(all.iter().map(|&i| Formula::stit(i, each(i)))).expect("agents");
        let rhs = Formula::group_stit(Formula::conjunction(all.iter().map(|&i| each(i))).expect("agents"));
        out.push(Schema {
            id: "A3",
            agent: None,
            pattern: imp(lhs, rhs),
        });
    }
    out.push(Schema {
        id: "A4",
        agent: None,
        pattern: imp(
            Formula::group_stit(Formula::next(a.clone())),
            Formula::next(Formula::nec(a.clone())),
        ),
    });
    for &i in &all {
        let o = |f: Formula| Formula::ought(i, f);
        out.push(Schema {
            id: "A5",
            agent: Some(i),
            pattern: imp(Formula::nec(a.clone()), o(a.clone())),
        });
        out.push(Schema {
            id: "A6",
            agent: Some(i),
            pattern: imp(o(a.clone()), Formula::not(o(Formula::not(a.clone())))),
        });
        out.push(Schema {
            id: "A7",
            agent: Some(i),
            pattern: imp(o(a.clone()), o(Formula::stit(i, a.clone()))),
        });
        out.push(Schema {
            id: "A8",
            agent: Some(i),
            pattern: imp(o(a.clone()), Formula::nec(o(a.clone()))),
        });
    }
    out.push(Schema {
        id: "XFunc",
        agent: None,
        pattern: Formula::iff(
            Formula::next(a.clone()),
            Formula::not(Formula::next(Formula::not(a.clone()))),
        ),
    });
    let u = Formula::until(a.clone(), v("b"));
    out.push(Schema {
        id: "UFix",
        agent: None,
        pattern: Formula::iff(
            u.clone(),
            Formula::or(a, Formula::and(v("b"), Formula::next(u))),
        ),
    });
    out
}

/// Binds the pattern's atoms so that it equals `f`.
pub fn bind(pattern: &Formula, f: &Formula, subst: &mut BTreeMap<String, Formula>) -> bool {
    match (pattern, f) {
        (Formula::Atom(m), _) => match subst.get(m) {
            Some(bound) => bound == f,
            None => {
                subst.insert(m.clone(), f.clone());
                true
            }
        },
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Not(p), Formula::Not(g))
        | (Formula::Nec(p), Formula::Nec(g))
        | (Formula::GroupStit(p), Formula::GroupStit(g))
        | (Formula::Next(p), Formula::Next(g)) => bind(p, g, subst),
        (Formula::Stit(i, p), Formula::Stit(j, g)) | (Formula::Ought(i, p), Formula::Ought(j, g)) => {
            i == j && bind(p, g, subst)
        }
        (Formula::And(p1, p2), Formula::And(g1, g2)) | (Formula::Until(p1, p2), Formula::Until(g1, g2)) => {
            bind(p1, g1, subst) && bind(p2, g2, subst)
        }
        _ => false,
    }
}

pub fn substitute(pattern: &Formula, subst: &BTreeMap<String, Formula>) -> Formula {
    match pattern {
        Formula::Atom(m) => subst.get(m).cloned().unwrap_or_else(|| pattern.clone()),
        Formula::Top | Formula::Bottom => pattern.clone(),
        Formula::Not(p) => Formula::not(substitute(p, subst)),
        Formula::And(a, b) => Formula::and(substitute(a, subst), substitute(b, subst)),
        Formula::Nec(p) => Formula::nec(substitute(p, subst)),
        Formula::Stit(i, p) => Formula::stit(*i, substitute(p, subst)),
        Formula::GroupStit(p) => Formula::group_stit(substitute(p, subst)),
        Formula::Ought(i, p) => Formula::ought(*i, substitute(p, subst)),
        Formula::Next(p) => Formula::next(substitute(p, subst)),
        Formula::Until(a, b) => Formula::until(substitute(a, subst), substitute(b, subst)),
    }
}

/// Matches `f` against the schemas named `id` only.
pub fn match_schema(f: &Formula, id: &str, agents: usize) -> Option<SchemaMatch> {
    if id == "PC" {
        return (is_tautology(f) == Some(true)).then(pc_match);
    }
    schemas(agents).into_iter().filter(|s| s.id == id).find_map(|s| {
        let mut subst = BTreeMap::new();
        bind(&s.pattern, f, &mut subst).then(|| SchemaMatch {
            id: s.id.to_string(),
            agent: s.agent,
            substitution: subst,
        })
    })
}

fn pc_match() -> SchemaMatch {
    SchemaMatch {
        id: "PC".to_string(),
        agent: None,
        substitution: BTreeMap::new(),
    }
}

/// The first schema `f` instantiates, with tautologies last.
pub fn match_axiom(f: &Formula, agents: usize) -> Option<SchemaMatch> {
    for s in schemas(agents) {
        let mut subst = BTreeMap::new();
        if bind(&s.pattern, f, &mut subst) {
            return Some(SchemaMatch {
                id: s.id.to_string(),
                agent: s.agent,
                substitution: subst,
            });
        }
    }
    (is_tautology(f) == Some(true)).then(pc_match)
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn variables<'a>(f: &'a Formula, out: &mut HashMap<&'a Formula, usize>) {
    match f {
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) => variables(g, out),
        Formula::And(a, b) => {
            variables(a, out);
            variables(b, out);
        }
        other => {
            let next = out.len();
            out.entry(other).or_insert(next);
        }
    }
}

fn eval_chunk(f: &Formula, vars: &HashMap<&Formula, usize>, chunk: u64) -> u64 {
    match f {
        Formula::Top => !0,
        Formula::Bottom => 0,
        Formula::Not(g) => !eval_chunk(g, vars, chunk),
        Formula::And(a, b) => eval_chunk(a, vars, chunk) & eval_chunk(b, vars, chunk),
        other => {
            let j = vars[other];
            if j < 6 {
                PATTERNS[j]
            } else if chunk >> (j - 6) & 1 == 1 {
                !0
            } else {
                0
            }
        }
    }
}

/// Truth-table check with every modal subformula and atom treated as a
/// propositional variable. `None` when there are more than
/// [`PC_VARIABLE_LIMIT`] variables.
pub fn is_tautology(f: &Formula) -> Option<bool> {
    let mut vars = HashMap::new();
    variables(f, &mut vars);
    let k = vars.len();
    if k > PC_VARIABLE_LIMIT {
        return None;
    }
    let mask = if k >= 6 { !0u64 } else { (1u64 << (1 << k)) - 1 };
    let chunks = 1u64 << k.saturating_sub(6);
    Some((0..chunks).all(|c| eval_chunk(f, &vars, c) & mask == mask))
}
