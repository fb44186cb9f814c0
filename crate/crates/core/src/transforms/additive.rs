use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::premodel::check::advance;
use crate::relation::{Partition, Relation};
use crate::system::{Slice, WindowSystem};

use super::choice::{build_choice, ChoiceFunction};
use super::TransformError;

pub const DEFAULT_REFINEMENT_BUDGET: usize = 4096;

/// One agent's refined action at a moment: a choice cell of that agent and
/// a group-choice cell of the moment, both as block indices of the input
/// partitions at that time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RefinedAction {
    pub action: usize,
    pub cell: usize,
}

#[derive(Debug, Clone)]
pub struct AdditiveConversion {
    pub system: WindowSystem,
    /// The source history of every new history.
    pub projection: Vec<usize>,
    /// `refinements[h][t][i]` is the refined action of agent `i`.
    pub refinements: Vec<Vec<Vec<RefinedAction>>>,
}

/// Refined joint actions of one moment, grouped by the group-choice cell
/// they are sent to.
struct Moment {
    preimages: HashMap<usize, Vec<Vec<RefinedAction>>>,
}

/// Converts a super-additive window system into an additive one whose
/// projection onto the input is a surjective p-morphism.
///
/// New histories pair an input history with a refinement: a refined joint
/// action per time that the moment's choice map sends to the history's
/// group-choice cell. With a single agent a group cell strictly inside the
/// agent's choice cell cannot be matched, since one coordinate alone has
/// no choice function onto two or more cells; such inputs are rejected.
pub fn to_additive(w: &WindowSystem, budget: usize) -> Result<AdditiveConversion, TransformError> {
    let report = w.audit(false);
    if !report.is_clean() {
        return Err(TransformError::NotSuperAdditive(report));
    }
    let agents = w.agents();
    let mut moments: Vec<HashMap<usize, Moment>> = Vec::new();
    for (t, s) in w.slices().iter().enumerate() {
        let mut per_time = HashMap::new();
        for (b, block) in s.boxp.blocks().iter().enumerate() {
            per_time.insert(b, moment(s, block, agents, t, budget)?);
        }
        moments.push(per_time);
    }

    let mut projection = Vec::new();
    let mut refinements = Vec::new();
    let mut names = Vec::new();
    for h in 0..w.len() {
        let options: Vec<&Vec<Vec<RefinedAction>>> = w
            .slices()
            .iter()
            .enumerate()
            .map(|(t, s)| &moments[t][&s.boxp.block_of(h)].preimages[&s.agt.block_of(h)])
            .collect();
        let bounds: Vec<usize> = options.iter().map(|o| o.len()).collect();
        let count = bounds.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        match count {
            Some(c) if projection.len() + c <= budget => {}
            _ => {
                return Err(TransformError::Budget {
                    what: "refined histories",
                    needed: count.unwrap_or(usize::MAX),
                    budget,
                })
            }
        }
        let mut pick = vec![0usize; bounds.len()];
        let mut k = 0;
        loop {
            refinements.push(
                pick.iter()
                    .enumerate()
                    .map(|(t, &p)| options[t][p].clone())
                    .collect::<Vec<_>>(),
            );
            projection.push(h);
            names.push(format!("{}#{k}", w.names()[h]));
            k += 1;
            if !advance(&mut pick, &bounds) {
                break;
            }
        }
    }

    let m = projection.len();
    let slices = w
        .slices()
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let box_label = |x: usize| (s.boxp.block_of(projection[x]), refinements[x][..t].to_vec());
            let boxp = Partition::from_labels(&(0..m).map(box_label).collect::<Vec<_>>());
            let stit = (0..agents)
                .map(|i| {
                    let labels: Vec<_> = (0..m).map(|x| (box_label(x), refinements[x][t][i])).collect();
                    Partition::from_labels(&labels)
                })
                .collect();
            let agt_labels: Vec<_> = (0..m).map(|x| (box_label(x), refinements[x][t].clone())).collect();
            let ought = (0..agents)
                .map(|i| {
                    let mut r = Relation::empty(m);
                    for x in 0..m {
                        for y in 0..m {
                            if boxp.same(x, y) && s.ought[i].contains(projection[x], projection[y]) {
                                r.insert(x, y);
                            }
                        }
                    }
                    r
                })
                .collect();
            let valuation: BTreeMap<String, FixedBitSet> = s
                .valuation
                .iter()
                .map(|(p, set)| {
                    let mut lifted = FixedBitSet::with_capacity(m);
                    for (x, &src) in projection.iter().enumerate() {
                        if set.contains(src) {
                            lifted.insert(x);
                        }
                    }
                    (p.clone(), lifted)
                })
                .collect();
            Slice {
                stit,
                agt: Partition::from_labels(&agt_labels),
                ought,
                valuation,
                boxp,
            }
        })
        .collect();
    Ok(AdditiveConversion {
        system: WindowSystem::new(agents, names, slices)?,
        projection,
        refinements,
    })
}

fn moment(s: &Slice, block: &[usize], agents: usize, t: usize, budget: usize) -> Result<Moment, TransformError> {
    let distinct = |p: &Partition| {
        let mut ids: Vec<usize> = block.iter().map(|&h| p.block_of(h)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    };
    let actions: Vec<Vec<usize>> = s.stit.iter().map(distinct).collect();
    let cells = distinct(&s.agt);
    let choice: Option<ChoiceFunction> = if agents == 1 {
        if cells.len() != actions[0].len() {
            let pair = block
                .iter()
                .flat_map(|&a| block.iter().map(move |&b| (a, b)))
                .find(|&(a, b)| s.stit[0].same(a, b) && !s.agt.same(a, b))
                .expect("more cells than actions");
            return Err(TransformError::SingleAgentSuperAdditive {
                time: t,
                witness: vec![pair.0, pair.1],
            });
        }
        None
    } else {
        Some(build_choice(cells.len(), agents)?)
    };

    let bounds: Vec<usize> = actions.iter().map(|a| a.len() * cells.len()).collect();
    let size = bounds.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    match size {
        Some(n) if n <= budget.saturating_mul(16) => {}
        _ => {
            return Err(TransformError::Budget {
                what: "refined joint actions",
                needed: size.unwrap_or(usize::MAX),
                budget: budget.saturating_mul(16),
            })
        }
    }

    let n = s.boxp.states();
    let members = |p: &Partition, b: usize| {
        let mut set = FixedBitSet::with_capacity(n);
        for &h in p.block(b) {
            set.insert(h);
        }
        set
    };
    let cell_sets: Vec<FixedBitSet> = cells.iter().map(|&c| members(&s.agt, c)).collect();
    let mut preimages: HashMap<usize, Vec<Vec<RefinedAction>>> = HashMap::new();
    let mut pick = vec![0usize; agents];
    loop {
        let mut joint = members(&s.boxp, s.boxp.block_of(block[0]));
        let mut refined = Vec::with_capacity(agents);
        let mut f2 = Vec::with_capacity(agents);
        for (i, &code) in pick.iter().enumerate() {
            let action = actions[i][code / cells.len()];
            let cell = code % cells.len();
            joint.intersect_with(&members(&s.stit[i], action));
            refined.push(RefinedAction {
                action,
                cell: cells[cell],
            });
            f2.push(cell);
        }
        let lowest = joint.minimum().ok_or_else(|| {
            TransformError::Shape(format!("time {t}: a joint action has no history"))
        })?;
        let proposed = match &choice {
            Some(f) => f.apply(&f2),
            None => f2[0],
        };
        let target = if cell_sets[proposed].is_subset(&joint) {
            cells[proposed]
        } else {
            s.agt.block_of(lowest)
        };
        preimages.entry(target).or_default().push(refined);
        if !advance(&mut pick, &bounds) {
            break;
        }
    }
    Ok(Moment { preimages })
}
