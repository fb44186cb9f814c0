use crate::syntax::Formula;

use super::script::{Justification, Modality, ProofScript};
use super::ProofError;

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

/// Right-nested implication `p1 -> (p2 -> ... -> goal)`.
fn chain(premises: &[&Formula], goal: Formula) -> Formula {
    premises
        .iter()
        .rev()
        .fold(goal, |acc, p| Formula::implies((*p).clone(), acc))
}

/// The premise `phi -> ~alpha`.
pub fn first_premise(phi: &Formula, alpha: &Formula) -> Formula {
    imp(phi, &Formula::not(alpha.clone()))
}

/// The premise `phi -> X (phi | (~alpha & ~beta))`.
pub fn second_premise(phi: &Formula, alpha: &Formula, beta: &Formula) -> Formula {
    imp(phi, &Formula::next(step_target(phi, alpha, beta)))
}

fn step_target(phi: &Formula, alpha: &Formula, beta: &Formula) -> Formula {
    Formula::or(
        phi.clone(),
        Formula::and(Formula::not(alpha.clone()), Formula::not(beta.clone())),
    )
}

fn premise(which: usize, proof: &ProofScript, want: &Formula, agents: usize) -> Result<(), ProofError> {
    match proof.conclusion() {
        Some(f) if f == want => {}
        found => {
            return Err(ProofError::PremiseShape {
                which,
                expected: want.clone(),
                found: found.cloned(),
            })
        }
    }
    proof
        .check(agents)
        .map_err(|failure| ProofError::PremiseInvalid { which, failure })
}

/// From proofs of `phi -> ~alpha` and `phi -> X (phi | (~alpha & ~beta))`,
/// builds a checked proof of `phi -> ~U(alpha, beta)`. Both premise proofs
/// are included first; the derivation unfolds the until once with (UFix),
/// pushes the facts under X with (Nec) and (KX), and closes with (UInd)
/// applied to `phi & U(alpha, beta)`.
pub fn derive_extra_rule(
    phi: &Formula,
    alpha: &Formula,
    beta: &Formula,
    proof1: &ProofScript,
    proof2: &ProofScript,
    agents: usize,
) -> Result<ProofScript, ProofError> {
    let p1 = first_premise(phi, alpha);
    let p2 = second_premise(phi, alpha, beta);
    premise(1, proof1, &p1, agents)?;
    premise(2, proof2, &p2, agents)?;

    let mut s = ProofScript::new();
    let l_p1 = s.embed(proof1);
    let l_p2 = s.embed(proof2);

    let x = Formula::next;
    let u = Formula::until(alpha.clone(), beta.clone());
    let not_alpha = Formula::not(alpha.clone());
    let a_or_b = Formula::or(alpha.clone(), beta.clone());
    let target = step_target(phi, alpha, beta);
    let phi_u = Formula::and(phi.clone(), u.clone());

    // U -> (alpha | beta) and its X image.
    let ufix = Formula::iff(
        u.clone(),
        Formula::or(alpha.clone(), Formula::and(beta.clone(), x(u.clone()))),
    );
    let l_fix = s.axiom(ufix.clone(), "UFix");
    let u_ab = imp(&u, &a_or_b);
    let l = s.pc(imp(&ufix, &u_ab));
    let l = s.mp(l_fix, l)?;
    let l = s.nec(Modality::Next, l)?;
    let k = s.axiom(imp(&x(u_ab), &imp(&x(u.clone()), &x(a_or_b.clone()))), "KX");
    let l_xu = s.mp(l, k)?;

    // X (alpha | beta) -> X (target -> phi).
    let collapse = imp(&target, phi);
    let taut = imp(&a_or_b, &collapse);
    let l = s.pc(taut.clone());
    let l = s.nec(Modality::Next, l)?;
    let k = s.axiom(imp(&x(taut), &imp(&x(a_or_b.clone()), &x(collapse.clone()))), "KX");
    let l_coll = s.mp(l, k)?;
    let k_step = imp(&x(collapse), &imp(&x(target.clone()), &x(phi.clone())));
    let l_kstep = s.axiom(k_step.clone(), "KX");

    // (phi & U) -> (~alpha & X phi).
    let stay = imp(&phi_u, &Formula::and(not_alpha.clone(), x(phi.clone())));
    let xu_fact = s.lines()[l_xu - 1].formula.clone();
    let coll_fact = s.lines()[l_coll - 1].formula.clone();
    let mut l = s.pc(chain(&[&p1, &p2, &ufix, &xu_fact, &coll_fact, &k_step], stay.clone()));
    for fact in [l_p1, l_p2, l_fix, l_xu, l_coll, l_kstep] {
        l = s.mp(fact, l)?;
    }
    let l_stay = l;

    // X phi -> X (U -> (phi & U)) and X (U -> (phi & U)) -> (X U -> X (phi & U)).
    let pair = imp(&u, &phi_u);
    let l = s.pc(imp(phi, &pair));
    let l = s.nec(Modality::Next, l)?;
    let k = s.axiom(imp(&x(imp(phi, &pair)), &imp(&x(phi.clone()), &x(pair.clone()))), "KX");
    let l_lift = s.mp(l, k)?;
    let k_pair = imp(&x(pair.clone()), &imp(&x(u.clone()), &x(phi_u.clone())));
    let l_kpair = s.axiom(k_pair.clone(), "KX");

    // (phi & U) -> (~alpha & X (phi & U)).
    let invariant = imp(&phi_u, &Formula::and(not_alpha, x(phi_u.clone())));
    let lift = s.lines()[l_lift - 1].formula.clone();
    let mut l = s.pc(chain(&[&ufix, &stay, &lift, &k_pair], invariant));
    for fact in [l_fix, l_stay, l_lift, l_kpair] {
        l = s.mp(fact, l)?;
    }

    let not_u = Formula::not(u.clone());
    let l_ind = s.push(imp(&phi_u, &not_u), Justification::UInd(l, beta.clone()));
    let l = s.pc(imp(&imp(&phi_u, &not_u), &imp(phi, &not_u)));
    s.mp(l_ind, l)?;
    debug_assert!(s.check(agents).is_ok());
    Ok(s)
}
