//! Bundled formulas: the Hohfeldian legal positions, a general test corpus,
//! and premise instances for the derived until rule.

use crate::proofkit::{first_premise, second_premise, Modality, ProofScript};
use crate::syntax::{parse, Formula};

/// Agents assumed by every corpus formula.
pub const CORPUS_AGENTS: usize = 2;

#[derive(Debug, Clone, Copy)]
pub struct Position {
    pub name: &'static str,
    pub formula: &'static str,
    pub reading: &'static str,
}

/// Legal positions between agent 1 and agent 2.
pub const HOHFELD: &[Position] = &[
    Position {
        name: "claim",
        formula: "O2 [2] p",
        reading: "1 has a claim against 2 that p; equivalently 2 has a duty towards 1",
    },
    Position {
        name: "duty",
        formula: "O2 [2] p",
        reading: "2 has a duty towards 1 that p; the correlative of claim",
    },
    Position {
        name: "no-claim",
        formula: "~O2 [2] p",
        reading: "1 has no claim against 2 that p",
    },
    Position {
        name: "privilege",
        formula: "~O1 [1] ~p",
        reading: "1 is not obliged to see to it that not p",
    },
    Position {
        name: "may",
        formula: "M1 [1] p",
        reading: "1 may see to it that p",
    },
    Position {
        name: "power",
        formula: "dia [1] X (O1 [1] p & O2 [2] q)",
        reading: "1 can act so that next both parties are bound, as in accepting an offer",
    },
    Position {
        name: "no-power",
        formula: "~dia [1] X (O1 [1] p & O2 [2] q)",
        reading: "nothing 1 does now binds both parties next",
    },
    Position {
        name: "liability",
        formula: "dia [1] X O2 [2] q",
        reading: "1 can act so that 2 is bound next",
    },
    Position {
        name: "immunity",
        formula: "~dia [1] X ~O2 [2] q",
        reading: "nothing 1 does now releases 2 next",
    },
    Position {
        name: "persistent-duty",
        formula: "U(q, O1 [1] p)",
        reading: "1 ought to see to p at every moment until q",
    },
    Position {
        name: "promise",
        formula: "F O1 [1] p",
        reading: "at some point 1 will be obliged to see to p",
    },
    Position {
        name: "conditional-power",
        formula: "box G ([1] r -> X O2 [2] s)",
        reading: "whenever 1 does r, 2 is bound to s at the next moment",
    },
    Position {
        name: "static-duty",
        formula: "O2 p -> ~dia [1] ~O2 p",
        reading: "what 2 ought to do now is settled whatever 1 does",
    },
    Position {
        name: "deadline",
        formula: "X X O1 [1] p",
        reading: "in two steps 1 ought to see to p",
    },
];

/// A general corpus covering every connective, over two agents.
pub const FORMULAS: &[&str] = &[
    "p",
    "~p",
    "p & q",
    "p | q",
    "p -> q",
    "p <-> q",
    "true",
    "false",
    "p & ~p",
    "box p",
    "dia p",
    "box p -> p",
    "box p -> box box p",
    "dia p -> box dia p",
    "[1] p",
    "<1> p",
    "[2] (p | q)",
    "[*] p",
    "<*> p",
    "[1] p -> [*] p",
    "box p -> [1] p",
    "dia [1] p & dia [2] q -> dia ([1] p & [2] q)",
    "[1] p & [2] q -> [*] (p & q)",
    "[*] X p -> X box p",
    "O1 p",
    "M2 q",
    "O1 p -> ~O1 ~p",
    "O1 p -> O1 [1] p",
    "O1 p -> box O1 p",
    "box p -> O2 p",
    "O1 p & O1 ~p",
    "O1 (p -> q) -> O1 p -> O1 q",
    "X p",
    "X ~p <-> ~X p",
    "X X p",
    "U(p, q)",
    "U(p, q) <-> p | q & X U(p, q)",
    "U(p, q) -> p | q",
    "F p",
    "G p",
    "G p -> F p",
    "G (p -> X p) -> p -> G p",
    "F G p | G F ~p",
    "U(q, O1 [1] p)",
    "F O1 [1] p",
    "box G ([1] r -> X O2 [2] s)",
    "dia [1] X (O1 [1] p & O2 [2] q)",
    "dia [1] X X p",
    "~dia [1] ~O2 p",
    "O2 [2] p",
    "~O1 [1] ~p",
    "~O1 ~[1] p",
    "X ~O2 p",
    "[1] X p & ~X box p",
    "U(p & [1] q, dia r)",
    "O1 U(p, [1] q) -> M1 F p",
    "G (O1 [1] p -> X [1] p)",
    "[*] (p | [1] q) & <2> ~q",
];

pub fn hohfeld() -> Vec<(Position, Formula)> {
    HOHFELD
        .iter()
        .map(|p| (*p, parse(p.formula, CORPUS_AGENTS).expect("corpus formulas parse")))
        .collect()
}

/// Every corpus formula, Hohfeld positions included.
pub fn formulas() -> Vec<Formula> {
    HOHFELD
        .iter()
        .map(|p| p.formula)
        .chain(FORMULAS.iter().copied())
        .map(|s| parse(s, CORPUS_AGENTS).expect("corpus formulas parse"))
        .collect()
}

/// Premises for the derived until rule, with proofs.
#[derive(Debug, Clone)]
pub struct ExtraRuleInstance {
    pub phi: Formula,
    pub alpha: Formula,
    pub beta: Formula,
    pub proof1: ProofScript,
    pub proof2: ProofScript,
}

/// Proves `goal` from an optional axiom instance by one tautology.
fn by_pc(fact: Option<(&Formula, &str)>, goal: &Formula) -> ProofScript {
    let mut s = ProofScript::new();
    match fact {
        Some((f, id)) => {
            let a = s.axiom(f.clone(), id);
            let l = s.pc(Formula::implies(f.clone(), goal.clone()));
            s.mp(a, l).expect("shapes match");
        }
        None => {
            s.pc(goal.clone());
        }
    }
    s
}

/// Proves `phi -> X target` from a proof of `target`.
fn under_next(mut s: ProofScript, phi: &Formula) -> ProofScript {
    let l = s.nec(Modality::Next, s.len()).expect("line exists");
    let xt = s.lines()[l - 1].formula.clone();
    let k = s.pc(Formula::implies(xt.clone(), Formula::implies(phi.clone(), xt)));
    s.mp(l, k).expect("shapes match");
    s
}

fn instance(phi: &str, alpha: &str, beta: &str, fact: Option<(&str, &str)>) -> ExtraRuleInstance {
    let f = |s: &str| parse(s, CORPUS_AGENTS).expect("instance formulas parse");
    let (phi, alpha, beta) = (f(phi), f(alpha), f(beta));
    let fact = fact.map(|(text, id)| (f(text), id));
    let fact = fact.as_ref().map(|(g, id)| (g, *id));
    let target = Formula::or(
        phi.clone(),
        Formula::and(Formula::not(alpha.clone()), Formula::not(beta.clone())),
    );
    ExtraRuleInstance {
        proof1: by_pc(fact, &first_premise(&phi, &alpha)),
        proof2: under_next(by_pc(fact, &target), &phi),
        phi,
        alpha,
        beta,
    }
}

/// Five instances whose premises have short proofs. In each, `~alpha` is
/// a theorem, so the premises hold for any `phi` that keeps itself or
/// falsifies `beta`.
pub fn extra_rule_instances() -> Vec<ExtraRuleInstance> {
    let out = vec![
        instance("q | r", "p & ~p", "q", None),
        instance("r", "box p & ~p", "r & s", Some(("box p -> p", "Tbox"))),
        instance("t", "O1 p & O1 ~p", "t", Some(("O1 p -> ~O1 ~p", "A6"))),
        instance("q", "[1] p & ~p", "false", Some(("[1] p -> p", "Tstit"))),
        instance("X q | ~X q", "p & ~p", "p", None),
    ];
    debug_assert!(out
        .iter()
        .all(|i| i.proof2.conclusion() == Some(&second_premise(&i.phi, &i.alpha, &i.beta))));
    out
}
