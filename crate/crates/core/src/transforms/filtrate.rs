use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;

use crate::premodel::{Premodel, PremodelParts};
use crate::relation::{Partition, Relation, StateSet};
use crate::syntax::{ClosureSet, Dag};

use super::TransformError;

#[derive(Debug, Clone)]
pub struct Filtration {
    pub model: Premodel,
    /// The merging equivalence on the input states; its blocks are the new
    /// states, in the same order.
    pub classes: Partition,
}

/// `profiles[s]` is the set of closure members true at `s`, in closure order.
pub fn profiles(m: &Premodel, sigma: &ClosureSet) -> Result<Vec<FixedBitSet>, TransformError> {
    let dag = Dag::of(sigma.iter());
    let ext = m.extensions(&dag)?;
    let members: Vec<&StateSet> = sigma
        .iter()
        .map(|f| &ext[dag.id(f).expect("interned")])
        .collect();
    Ok((0..m.len())
        .map(|s| {
            let mut p = FixedBitSet::with_capacity(members.len());
            for (k, e) in members.iter().enumerate() {
                if e.contains(s) {
                    p.insert(k);
                }
            }
            p
        })
        .collect())
}

/// States agree on the closure and on the closure profiles seen across
/// their box block.
pub fn merging_equivalence(m: &Premodel, sigma: &ClosureSet) -> Result<Partition, TransformError> {
    let prof = profiles(m, sigma)?;
    let neighbourhood: Vec<BTreeSet<Vec<usize>>> = (0..m.len())
        .map(|s| {
            m.box_partition()
                .class(s)
                .iter()
                .map(|&x| prof[x].ones().collect())
                .collect()
        })
        .collect();
    let labels: Vec<(Vec<usize>, &BTreeSet<Vec<usize>>)> = (0..m.len())
        .map(|s| (prof[s].ones().collect(), &neighbourhood[s]))
        .collect();
    Ok(Partition::from_labels(&labels))
}

/// Whether `~ ; R_box = R_box ; ~`.
pub fn commutes(m: &Premodel, classes: &Partition) -> bool {
    let sim = classes.to_relation();
    let boxr = m.box_partition().to_relation();
    sim.then(&boxr) == boxr.then(&sim)
}

/// Relates classes with related members.
fn lift(r: &Relation, classes: &Partition) -> Relation {
    let mut out = Relation::empty(classes.len());
    for (a, b) in r.pairs() {
        out.insert(classes.block_of(a), classes.block_of(b));
    }
    out
}

fn equivalence(what: &str, r: Relation) -> Result<Partition, TransformError> {
    r.to_partition()
        .ok_or_else(|| TransformError::Filtration(format!("the lifted {what} relation is not an equivalence")))
}

/// Filtrates a premodel through a filtration-ready closure set. Box and
/// next are lifted existentially, the choice relations are transitive
/// closures of their lifts, and each ought is its lift followed by the
/// agent's filtrated choice relation. Atoms of the closure keep their
/// extension; other atoms become false.
pub fn filtrate(m: &Premodel, sigma: &ClosureSet) -> Result<Filtration, TransformError> {
    if !sigma.is_filtration_ready() {
        return Err(TransformError::Filtration("the closure set is not filtration-ready".into()));
    }
    let classes = merging_equivalence(m, sigma)?;
    let n = classes.len();
    let boxp = equivalence("box", lift(&m.box_partition().to_relation(), &classes))?;
    let stit = (0..m.agents())
        .map(|i| {
            let r = lift(&m.stit(crate::syntax::AgentId::from_slot(i)).to_relation(), &classes);
            equivalence("choice", r.transitive_closure())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let agt = equivalence("group choice", lift(&m.agt().to_relation(), &classes).transitive_closure())?;
    let ought = (0..m.agents())
        .map(|i| {
            let agent = crate::syntax::AgentId::from_slot(i);
            lift(m.ought(agent), &classes).then(&stit[i].to_relation())
        })
        .collect();
    let next = lift(m.next(), &classes);
    let atoms: BTreeSet<String> = sigma.iter().flat_map(|f| f.atoms()).collect();
    let mut valuation = BTreeMap::new();
    for p in atoms {
        let ext = m.atom_states(&p);
        let mut set = StateSet::with_capacity(n);
        for s in ext.ones() {
            set.insert(classes.block_of(s));
        }
        valuation.insert(p, set);
    }
    let names = classes
        .blocks()
        .iter()
        .map(|b| format!("[{}]", m.name(b[0])))
        .collect();
    let model = Premodel::new(PremodelParts {
        names,
        agents: m.agents(),
        boxp,
        stit,
        agt,
        ought,
        next,
        valuation,
    })?;
    Ok(Filtration { model, classes })
}
