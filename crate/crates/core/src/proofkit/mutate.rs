use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{AgentId, Formula};

use super::schema::SCHEMA_IDS;
use super::script::{Justification, Modality, ProofLine, ProofScript};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    Negate,
    WrapNext,
    FreshAtom,
    ChangeReference,
    ChangeJustification,
}

#[derive(Debug, Clone)]
pub struct Mutation {
    pub script: ProofScript,
    /// 1-based line that was changed.
    pub line: usize,
    pub kind: MutationKind,
}

impl Mutation {
    /// True when the mutant still derives only formulas the original
    /// derives: the changed line keeps its formula, or its new formula is
    /// already derived elsewhere in the original.
    pub fn is_benign(&self, original: &ProofScript) -> bool {
        let new = &self.script.lines()[self.line - 1].formula;
        let old = &original.lines()[self.line - 1].formula;
        new == old || original.lines().iter().any(|l| &l.formula == new)
    }
}

fn rename_atom(f: &Formula, from: &str, to: &str) -> Formula {
    match f {
        Formula::Atom(p) if p == from => Formula::atom(to),
        Formula::Atom(_) | Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(g) => Formula::not(rename_atom(g, from, to)),
        Formula::And(a, b) => Formula::and(rename_atom(a, from, to), rename_atom(b, from, to)),
        Formula::Nec(g) => Formula::nec(rename_atom(g, from, to)),
        Formula::Stit(i, g) => Formula::stit(*i, rename_atom(g, from, to)),
        Formula::GroupStit(g) => Formula::group_stit(rename_atom(g, from, to)),
        Formula::Ought(i, g) => Formula::ought(*i, rename_atom(g, from, to)),
        Formula::Next(g) => Formula::next(rename_atom(g, from, to)),
        Formula::Until(a, b) => Formula::until(rename_atom(a, from, to), rename_atom(b, from, to)),
    }
}

fn other_line<R: Rng + ?Sized>(rng: &mut R, below: usize, not: usize) -> Option<usize> {
    let choices: Vec<usize> = (1..below).filter(|&r| r != not).collect();
    choices.choose(rng).copied()
}

fn other_justification<R: Rng + ?Sized>(rng: &mut R, just: &Justification, n: usize) -> Justification {
    match just {
        Justification::Axiom(id) => {
            let ids: Vec<&&str> = SCHEMA_IDS.iter().filter(|s| **s != id).collect();
            Justification::Axiom(ids.choose(rng).expect("several schemas").to_string())
        }
        Justification::Mp(i, j) => {
            if rng.gen_bool(0.5) {
                Justification::Mp(*j, *i)
            } else {
                Justification::Nec(Modality::Next, *i)
            }
        }
        Justification::Nec(m, i) => {
            let options = [
                Modality::Box,
                Modality::Group,
                Modality::Next,
                Modality::Stit(AgentId::from_slot(0)),
                Modality::Ought(AgentId::from_slot(0)),
            ];
            let others: Vec<&Modality> = options.iter().filter(|o| *o != m).collect();
            if n > 2 && rng.gen_bool(0.25) {
                Justification::Mp(*i, n - 1)
            } else {
                Justification::Nec(**others.choose(rng).expect("several modalities"), *i)
            }
        }
        Justification::UInd(i, psi) => Justification::UInd(*i, Formula::next(psi.clone())),
    }
}

/// Changes one line of a non-empty script at random.
pub fn mutate<R: Rng + ?Sized>(script: &ProofScript, rng: &mut R) -> Mutation {
    assert!(!script.is_empty());
    let n = rng.gen_range(1..=script.len());
    let old = &script.lines()[n - 1];
    let mut kind = *[
        MutationKind::Negate,
        MutationKind::WrapNext,
        MutationKind::FreshAtom,
        MutationKind::ChangeReference,
        MutationKind::ChangeJustification,
    ]
    .choose(rng)
    .expect("kinds");
    let atoms: Vec<String> = old.formula.atoms().into_iter().collect();
    if kind == MutationKind::FreshAtom && atoms.is_empty() {
        kind = MutationKind::Negate;
    }
    if kind == MutationKind::ChangeReference && old.justification.references().is_empty() {
        kind = MutationKind::ChangeJustification;
    }
    let mut line = old.clone();
    match kind {
        MutationKind::Negate => line.formula = Formula::not(line.formula),
        MutationKind::WrapNext => line.formula = Formula::next(line.formula),
        MutationKind::FreshAtom => {
            let from = atoms.choose(rng).expect("atoms");
            line.formula = rename_atom(&line.formula, from, "fresh");
        }
        MutationKind::ChangeReference => {
            let refs = line.justification.references();
            let which = rng.gen_range(0..refs.len());
            match other_line(rng, n, refs[which]) {
                Some(r) => {
                    line.justification = match (&line.justification, which) {
                        (Justification::Mp(_, j), 0) => Justification::Mp(r, *j),
                        (Justification::Mp(i, _), _) => Justification::Mp(*i, r),
                        (Justification::Nec(m, _), _) => Justification::Nec(*m, r),
                        (Justification::UInd(_, psi), _) => Justification::UInd(r, psi.clone()),
                        (Justification::Axiom(_), _) => unreachable!("axioms have no references"),
                    }
                }
                None => {
                    kind = MutationKind::Negate;
                    line.formula = Formula::not(line.formula);
                }
            }
        }
        MutationKind::ChangeJustification => {
            line.justification = other_justification(rng, &line.justification, n);
        }
    }
    let mut out = ProofScript::new();
    for (k, l) in script.lines().iter().enumerate() {
        let ProofLine { formula, justification } = if k + 1 == n { line.clone() } else { l.clone() };
        out.push(formula, justification);
    }
    Mutation { script: out, line: n, kind }
}
