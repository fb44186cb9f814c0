use std::fmt;

use serde::Serialize;

use crate::syntax::{Dag, Formula};
use crate::system::{RelTag, WindowSystem};

use super::TransformError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `g R h` in the source but `map(g) R' map(h)` fails.
    Forward,
    /// `map(g) R' h'` in the target with no source `h` over `h'` related to `g`.
    Backward,
}

/// The first failing tuple for one relation. For forward failures `other`
/// is a source history, for backward ones a target history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PMorphismFailure {
    pub tag: RelTag,
    pub time: usize,
    pub direction: Direction,
    pub source: usize,
    pub other: usize,
}

impl fmt::Display for PMorphismFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:?} at t={}: source h{} / {} h{}",
            self.tag,
            self.direction,
            self.time,
            self.source,
            if self.direction == Direction::Forward { "source" } else { "target" },
            self.other
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PMorphismWitness {
    pub mapping: Vec<usize>,
    pub checked_ops: Vec<RelTag>,
    pub horizon: usize,
    pub surjective: bool,
}

/// A window point where a formula evaluates differently across the map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferMismatch {
    pub formula: Formula,
    pub history: usize,
    pub time: usize,
    pub source: Option<bool>,
    pub target: Option<bool>,
}

fn check_shape(src: &WindowSystem, dst: &WindowSystem, map: &[usize]) -> Result<(), TransformError> {
    if src.agents() != dst.agents() || src.horizon() != dst.horizon() {
        return Err(TransformError::Shape(
            "both systems need the same agents and horizon".into(),
        ));
    }
    if map.len() != src.len() {
        return Err(TransformError::Shape(format!(
            "the map covers {} histories, the source has {}",
            map.len(),
            src.len()
        )));
    }
    if let Some(&bad) = map.iter().find(|&&h| h >= dst.len()) {
        return Err(TransformError::Shape(format!("target history {bad} does not exist")));
    }
    Ok(())
}

/// Checks the forward and backward conditions of every relation at every
/// time of the window, reporting the first failing tuple per relation.
pub fn check_pmorphism(
    src: &WindowSystem,
    dst: &WindowSystem,
    map: &[usize],
) -> Result<PMorphismWitness, TransformError> {
    check_shape(src, dst, map)?;
    let tags = RelTag::all(src.agents());
    let mut failures = Vec::new();
    for &tag in &tags {
        if let Some(f) = first_failure(src, dst, map, tag) {
            failures.push(f);
        }
    }
    if !failures.is_empty() {
        return Err(TransformError::PMorphism(failures));
    }
    let mut hit = vec![false; dst.len()];
    for &h in map {
        hit[h] = true;
    }
    Ok(PMorphismWitness {
        mapping: map.to_vec(),
        checked_ops: tags,
        horizon: src.horizon(),
        surjective: hit.iter().all(|&b| b),
    })
}

fn first_failure(src: &WindowSystem, dst: &WindowSystem, map: &[usize], tag: RelTag) -> Option<PMorphismFailure> {
    for t in 0..=src.horizon() {
        for g in 0..src.len() {
            let mut images = vec![false; dst.len()];
            for h in 0..src.len() {
                if src.related(tag, g, h, t) {
                    if !dst.related(tag, map[g], map[h], t) {
                        return Some(PMorphismFailure {
                            tag,
                            time: t,
                            direction: Direction::Forward,
                            source: g,
                            other: h,
                        });
                    }
                    images[map[h]] = true;
                }
            }
            if let Some(h2) = (0..dst.len()).find(|&h2| dst.related(tag, map[g], h2, t) && !images[h2]) {
                return Some(PMorphismFailure {
                    tag,
                    time: t,
                    direction: Direction::Backward,
                    source: g,
                    other: h2,
                });
            }
        }
    }
    None
}

/// Compares three-valued window evaluation of each formula at `(h, t)` in
/// the source and at `(map(h), t)` in the target.
pub fn check_transfer(
    src: &WindowSystem,
    dst: &WindowSystem,
    map: &[usize],
    formulas: &[Formula],
) -> Result<Vec<TransferMismatch>, TransformError> {
    check_shape(src, dst, map)?;
    let dag = Dag::of(formulas);
    let a = src.tables(&dag)?;
    let b = dst.tables(&dag)?;
    let mut out = Vec::new();
    for f in formulas {
        let id = dag.id(f).expect("interned");
        for t in 0..=src.horizon() {
            for (h, &img) in map.iter().enumerate() {
                let (x, y) = (a[id][t][h], b[id][t][img]);
                if x != y {
                    out.push(TransferMismatch {
                        formula: f.clone(),
                        history: h,
                        time: t,
                        source: x,
                        target: y,
                    });
                }
            }
        }
    }
    Ok(out)
}
