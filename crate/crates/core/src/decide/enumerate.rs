use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::premodel::check::{advance, independence_failures};
use crate::premodel::{Premodel, PremodelParts};
use crate::relation::{Partition, Relation, StateSet};
use crate::syntax::Formula;

/// Which parts of a premodel a formula can observe. Unobserved parts are
/// fixed to the choice that makes the structural conditions easiest, which
/// loses no satisfiable cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    pub agents: usize,
    pub atoms: Vec<String>,
    pub stit: Vec<bool>,
    pub ought: Vec<bool>,
    pub agt: bool,
    pub temporal: bool,
}

impl Footprint {
    pub fn of(f: &Formula, agents: usize) -> Footprint {
        let mut fp = Footprint {
            agents,
            atoms: f.atoms().into_iter().collect(),
            stit: vec![false; agents],
            ought: vec![false; agents],
            agt: false,
            temporal: false,
        };
        f.walk(&mut |g| match g {
            Formula::Stit(i, _) => fp.stit[i.slot()] = true,
            Formula::Ought(i, _) => {
                fp.ought[i.slot()] = true;
                fp.stit[i.slot()] = true;
            }
            Formula::GroupStit(_) => fp.agt = true,
            Formula::Next(_) | Formula::Until(..) => fp.temporal = true,
            _ => {}
        });
        if fp.agt {
            fp.stit.iter_mut().for_each(|s| *s = true);
        }
        fp
    }
}

/// Restricted growth strings: every partition of `0..n` as block labels.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(labels: &mut Vec<usize>, n: usize, used: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=used {
            labels.push(l);
            go(labels, n, used.max(l + 1), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, 0, &mut out);
    out
}

/// Nonincreasing block sizes summing to `n`, coarsest first.
fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            go(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every refinement of `coarse`, each given by choosing a partition of
/// every block.
fn refinements(coarse: &Partition) -> Vec<Partition> {
    let per_block: Vec<Vec<Vec<usize>>> = coarse.blocks().iter().map(|b| set_partitions(b.len())).collect();
    let bounds: Vec<usize> = per_block.iter().map(Vec::len).collect();
    let mut pick = vec![0usize; bounds.len()];
    let mut out = Vec::new();
    loop {
        let mut labels = vec![(0usize, 0usize); coarse.states()];
        for (b, block) in coarse.blocks().iter().enumerate() {
            for (k, &s) in block.iter().enumerate() {
                labels[s] = (b, per_block[b][pick[b]][k]);
            }
        }
        out.push(Partition::from_labels(&labels));
        if !advance(&mut pick, &bounds) {
            return out;
        }
    }
}

/// Ought relations allowing a nonempty set of choice cells in every block.
fn oughts(boxp: &Partition, stit: &Partition) -> Vec<Relation> {
    let n = boxp.states();
    let cells: Vec<Vec<usize>> = boxp
        .blocks()
        .iter()
        .map(|b| {
            let mut ids: Vec<usize> = b.iter().map(|&s| stit.block_of(s)).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        })
        .collect();
    let bounds: Vec<usize> = cells.iter().map(|c| (1usize << c.len()) - 1).collect();
    let mut pick = vec![0usize; bounds.len()];
    let mut out = Vec::new();
    loop {
        let mut r = Relation::empty(n);
        for (b, block) in boxp.blocks().iter().enumerate() {
            let mask = pick[b] + 1;
            for &x in block {
                for &y in block {
                    let k = cells[b].iter().position(|&c| c == stit.block_of(y)).expect("cell of block");
                    if mask >> k & 1 == 1 {
                        r.insert(x, y);
                    }
                }
            }
        }
        out.push(r);
        if !advance(&mut pick, &bounds) {
            return out;
        }
    }
}

fn satisfies_d4_star(next: &Relation, boxp: &Partition, agt: &Partition) -> bool {
    let n = next.states();
    (0..n).all(|x| {
        let mut reach = StateSet::with_capacity(n);
        for &w in agt.class(x) {
            reach.union_with(next.successors(w));
        }
        next.successors(x)
            .ones()
            .all(|z| boxp.class(z).iter().all(|&y| reach.contains(y)))
    })
}

fn serial_relations(n: usize) -> Vec<Relation> {
    let bounds = vec![(1usize << n) - 1; n];
    let mut pick = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let mut r = Relation::empty(n);
        for (x, &p) in pick.iter().enumerate() {
            let mask = p + 1;
            for y in 0..n {
                if mask >> y & 1 == 1 {
                    r.insert(x, y);
                }
            }
        }
        out.push(r);
        if !advance(&mut pick, &bounds) {
            return out;
        }
    }
}

/// Visits every valid premodel with `n` states whose observable parts differ,
/// up to the contiguous layout of box blocks, with every valuation of the
/// footprint's atoms.
pub fn for_each_premodel(
    n: usize,
    fp: &Footprint,
    visit: &mut dyn FnMut(&Premodel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let nexts = if fp.temporal { serial_relations(n) } else { Vec::new() };
    for sizes in integer_partitions(n) {
        let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &k)| std::iter::repeat_n(b, k)).collect();
        let boxp = Partition::from_labels(&labels);
        let stit_options: Vec<Vec<Partition>> = (0..fp.agents)
            .map(|i| if fp.stit[i] { refinements(&boxp) } else { vec![boxp.clone()] })
            .collect();
        let bounds: Vec<usize> = stit_options.iter().map(Vec::len).collect();
        let mut pick = vec![0usize; fp.agents];
        loop {
            let stit: Vec<Partition> = pick.iter().enumerate().map(|(i, &k)| stit_options[i][k].clone()).collect();
            if independence_failures(&boxp, &stit).is_empty() {
                visit_choice(n, fp, &boxp, &stit, &nexts, visit)?;
            }
            if !advance(&mut pick, &bounds) {
                break;
            }
        }
    }
    ControlFlow::Continue(())
}

fn visit_choice(
    n: usize,
    fp: &Footprint,
    boxp: &Partition,
    stit: &[Partition],
    nexts: &[Relation],
    visit: &mut dyn FnMut(&Premodel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let meet = stit.iter().skip(1).fold(stit[0].clone(), |acc, p| acc.meet(p));
    let agts = if fp.agt { refinements(&meet) } else { vec![meet] };
    let ought_options: Vec<Vec<Relation>> = (0..fp.agents)
        .map(|i| if fp.ought[i] { oughts(boxp, &stit[i]) } else { vec![boxp.to_relation()] })
        .collect();
    let obounds: Vec<usize> = ought_options.iter().map(Vec::len).collect();
    let complete = Partition::trivial(n).to_relation();
    for agt in &agts {
        let valid_nexts: Vec<&Relation> = if fp.temporal {
            nexts.iter().filter(|r| satisfies_d4_star(r, boxp, agt)).collect()
        } else {
            vec![&complete]
        };
        let mut opick = vec![0usize; fp.agents];
        loop {
            let ought: Vec<Relation> = opick.iter().enumerate().map(|(i, &k)| ought_options[i][k].clone()).collect();
            for next in &valid_nexts {
                let mut model = Premodel::new(PremodelParts {
                    names: (0..n).map(|s| format!("s{s}")).collect(),
                    agents: fp.agents,
                    boxp: boxp.clone(),
                    stit: stit.to_vec(),
                    agt: agt.clone(),
                    ought: ought.clone(),
                    next: (*next).clone(),
                    valuation: BTreeMap::new(),
                })
                .expect("enumerated parts are well-shaped");
                debug_assert!(model.audit().is_clean());
                let bits = n * fp.atoms.len();
                for code in 0..1u64 << bits {
                    for (k, p) in fp.atoms.iter().enumerate() {
                        let mut set = StateSet::with_capacity(n);
                        for s in 0..n {
                            if code >> (k * n + s) & 1 == 1 {
                                set.insert(s);
                            }
                        }
                        model.set_atom(p, set);
                    }
                    visit(&model)?;
                }
            }
            if !advance(&mut opick, &obounds) {
                break;
            }
        }
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn bell_numbers() {
        let sizes: Vec<usize> = (1..=5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(sizes, vec![1, 2, 5, 15, 52]);
        assert_eq!(integer_partitions(4).len(), 5);
        assert_eq!(integer_partitions(3)[0], vec![3]);
    }

    #[test]
    fn enumerated_premodels_are_valid() {
        let fp = Footprint::of(&parse("O1 [2] X p & [*] p", 2).unwrap(), 2);
        let mut count = 0;
        let _ = for_each_premodel(2, &fp, &mut |m| {
            assert!(m.audit().is_clean());
            count += 1;
            ControlFlow::Continue(())
        });
        assert!(count > 0);
    }

    #[test]
    fn d4_star_filter_matches_the_audit() {
        let fp = Footprint::of(&parse("X p & [*] p", 1).unwrap(), 1);
        let boxp = Partition::trivial(2);
        let agt = Partition::discrete(2);
        for r in serial_relations(2) {
            let m = Premodel::new(PremodelParts {
                names: vec!["a".into(), "b".into()],
                agents: 1,
                boxp: boxp.clone(),
                stit: vec![agt.clone()],
                agt: agt.clone(),
                ought: vec![boxp.to_relation()],
                next: r.clone(),
                valuation: BTreeMap::new(),
            })
            .unwrap();
            assert_eq!(satisfies_d4_star(&r, &boxp, &agt), m.audit().is_clean());
        }
        assert!(fp.temporal && fp.agt);
    }
}
