use crate::premodel::Premodel;
use crate::syntax::{ClosureSet, Formula};
use crate::system::{LassoHistory, LassoSystem, RelTag, DEFAULT_PERIOD_BUDGET};

use super::acceptable::{extend, Obligations};
use super::TransformError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnravelOptions {
    /// Last time at which evaluation is promised to agree with the premodel.
    pub horizon: usize,
    /// Extra times made moment-complete past the horizon; `None` uses the
    /// closure's relational lookahead.
    pub margin: Option<usize>,
    pub history_budget: usize,
}

impl Default for UnravelOptions {
    fn default() -> UnravelOptions {
        UnravelOptions {
            horizon: 3,
            margin: None,
            history_budget: 2048,
        }
    }
}

impl UnravelOptions {
    pub fn with_horizon(horizon: usize) -> UnravelOptions {
        UnravelOptions {
            horizon,
            ..UnravelOptions::default()
        }
    }
}

/// Number of temporal steps from a point to the latest relational operator
/// its truth depends on, if any. Until counts as one step, which is exact
/// only when its arguments are free of relational operators.
pub fn relational_lookahead(f: &Formula) -> Option<usize> {
    match f {
        Formula::Atom(_) | Formula::Top | Formula::Bottom => None,
        Formula::Not(a) => relational_lookahead(a),
        Formula::And(a, b) => relational_lookahead(a).max(relational_lookahead(b)),
        Formula::Nec(a) | Formula::Stit(_, a) | Formula::GroupStit(a) | Formula::Ought(_, a) => {
            Some(relational_lookahead(a).unwrap_or(0))
        }
        Formula::Next(a) => relational_lookahead(a).map(|d| d + 1),
        Formula::Until(a, b) => relational_lookahead(a)
            .max(relational_lookahead(b))
            .map(|d| d + 1),
    }
}

/// Unravels a premodel into a system of acceptable lassos.
///
/// Starting from one acceptable lasso per seed, each moment at times
/// `0..=horizon + margin` is completed so that it passes through every state
/// of its box block. A missing state is reached by rewriting the past of a
/// history in the moment backwards with (D4*), and the rewritten prefix is
/// then extended to an acceptable lasso.
///
/// Evaluation agrees with the premodel at times up to `horizon` for closure
/// members whose untils have relational-free arguments. An until over a
/// relational argument may be witnessed past the completed times, where the
/// system has too few histories.
pub fn unravel(
    m: &Premodel,
    sigma: &ClosureSet,
    seeds: &[usize],
    opts: UnravelOptions,
) -> Result<LassoSystem, TransformError> {
    if seeds.is_empty() {
        return Err(TransformError::Shape("unraveling needs at least one seed".into()));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= m.len()) {
        return Err(TransformError::Shape(format!("seed {bad} is out of range")));
    }
    let margin = opts
        .margin
        .unwrap_or_else(|| sigma.iter().filter_map(relational_lookahead).max().unwrap_or(0));
    let ob = Obligations::new(m, sigma)?;
    let budget_error = |needed| TransformError::Budget {
        what: "unraveled histories",
        needed,
        budget: opts.history_budget,
    };
    if seeds.len() > opts.history_budget {
        return Err(budget_error(seeds.len()));
    }
    let mut histories: Vec<LassoHistory> = Vec::new();
    for &s in seeds {
        histories.push(extend(m, &ob, &[s])?);
    }
    let boxp = m.box_partition();
    for t in 0..=opts.horizon + margin {
        let system = build(m, &histories, opts.horizon)?;
        let classes = system.classes(RelTag::Box, t);
        for class in classes.blocks() {
            let rep = class[0];
            let present: Vec<usize> = class.iter().map(|&h| histories[h].state_at(t)).collect();
            let block = boxp.class(histories[rep].state_at(t));
            for &s in block {
                if present.contains(&s) {
                    continue;
                }
                let prefix = rewrite_past(m, &histories[rep].prefix(t + 1), s)?;
                histories.push(extend(m, &ob, &prefix)?);
                if histories.len() > opts.history_budget {
                    return Err(budget_error(histories.len()));
                }
            }
        }
    }
    build(m, &histories, opts.horizon)
}

fn build(m: &Premodel, histories: &[LassoHistory], horizon: usize) -> Result<LassoSystem, TransformError> {
    Ok(LassoSystem::with_budget(
        m.clone(),
        histories.to_vec(),
        horizon,
        DEFAULT_PERIOD_BUDGET,
    )?)
}

/// A path ending in `target` whose earlier states are group-related to
/// those of `path`, which ends in a state box-related to `target`.
fn rewrite_past(m: &Premodel, path: &[usize], target: usize) -> Result<Vec<usize>, TransformError> {
    let mut out = vec![target];
    for k in (0..path.len() - 1).rev() {
        let later = *out.last().expect("nonempty");
        let w = m
            .agt()
            .class(path[k])
            .iter()
            .copied()
            .find(|&w| m.next().contains(w, later))
            .ok_or_else(|| {
                TransformError::Shape(format!(
                    "no group-related predecessor of {} at {}; the premodel breaks (D4*)",
                    m.name(later),
                    m.name(path[k])
                ))
            })?;
        out.push(w);
    }
    out.reverse();
    Ok(out)
}
