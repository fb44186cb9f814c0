use crate::audit::{AuditReport, Condition, Violation};
use crate::relation::{Partition, Relation, StateSet};
use crate::syntax::AgentId;

use super::Premodel;

impl Premodel {
    /// Checks (D1), (D2), (D3*), (D4*), (D5) to (D8) and seriality of `next`,
    /// reporting every failing instance.
    pub fn audit(&self) -> AuditReport {
        let mut report = AuditReport::default();
        let n = self.len();
        let boxr = self.boxp.to_relation();

        for agent in AgentId::all(self.agents) {
            let stit = &self.stit[agent.slot()];
            for (a, b) in refinement_failures(stit, &self.boxp) {
                report.push(Violation::new(Condition::D1, vec![a, b]).for_agent(agent));
            }
        }

        for w in independence_failures(&self.boxp, &self.stit) {
            report.push(Violation::new(Condition::D2, w));
        }

        for agent in AgentId::all(self.agents) {
            for (a, b) in refinement_failures(&self.agt, &self.stit[agent.slot()]) {
                report.push(Violation::new(Condition::D3Star, vec![a, b]).for_agent(agent));
            }
        }

        let agt_next = self.agt.to_relation().then(&self.next);
        for x in 0..n {
            for y in 0..n {
                if agt_next.contains(x, y) {
                    continue;
                }
                if let Some(z) = self.next.successors(x).ones().find(|&z| boxr.contains(z, y)) {
                    report.push(Violation::new(Condition::D4Star, vec![x, z, y]));
                }
            }
        }

        for agent in AgentId::all(self.agents) {
            let ought = &self.ought[agent.slot()];
            let stitr = self.stit[agent.slot()].to_relation();
            for (a, b) in ought.pairs() {
                if !boxr.contains(a, b) {
                    report.push(Violation::new(Condition::D5, vec![a, b]).for_agent(agent));
                }
            }
            for x in 0..n {
                if ought.successors(x).is_clear() {
                    report.push(Violation::new(Condition::D6, vec![x]).for_agent(agent));
                }
            }
            for w in composition_failures(ought, &stitr, ought) {
                report.push(Violation::new(Condition::D7, w).for_agent(agent));
            }
            for w in composition_failures(&boxr, ought, ought) {
                report.push(Violation::new(Condition::D8, w).for_agent(agent));
            }
        }

        for x in 0..n {
            if self.next.successors(x).is_clear() {
                report.push(Violation::new(Condition::NextSerial, vec![x]));
            }
        }
        report
    }
}

/// Pairs `a < b` related by `fine` but not by `coarse`.
pub(crate) fn refinement_failures(fine: &Partition, coarse: &Partition) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for block in fine.blocks() {
        for (k, &a) in block.iter().enumerate() {
            for &b in &block[k + 1..] {
                if !coarse.same(a, b) {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

/// For each `x r1 y r2 z` with `(x, z)` outside `target`, the triple with the
/// smallest `y`.
pub(crate) fn composition_failures(r1: &Relation, r2: &Relation, target: &Relation) -> Vec<Vec<usize>> {
    let n = r1.states();
    let mut out = Vec::new();
    for x in 0..n {
        let mut reported = StateSet::with_capacity(n);
        for y in r1.successors(x).ones() {
            for z in r2.successors(y).ones() {
                if !target.contains(x, z) && !reported.contains(z) {
                    reported.insert(z);
                    out.push((x, y, z));
                }
            }
        }
    }
    out.sort_by_key(|&(x, _, z)| (x, z));
    out.into_iter().map(|(x, y, z)| vec![x, y, z]).collect()
}

/// Selections of one choice block per agent inside a common box block with
/// empty intersection. Each witness lists the smallest state of every
/// selected block, in agent order.
pub(crate) fn independence_failures(boxp: &Partition, stit: &[Partition]) -> Vec<Vec<usize>> {
    let n = boxp.states();
    let mut out = Vec::new();
    for block in boxp.blocks() {
        let mut inside = StateSet::with_capacity(n);
        for &s in block {
            inside.insert(s);
        }
        // Choice cells restricted to this box block.
        let cells: Vec<Vec<StateSet>> = stit
            .iter()
            .map(|p| {
                let mut ids: Vec<usize> = block.iter().map(|&s| p.block_of(s)).collect();
                ids.sort_unstable();
                ids.dedup();
                ids.iter()
                    .map(|&b| {
                        let mut c = StateSet::with_capacity(n);
                        for &s in p.block(b) {
                            c.insert(s);
                        }
                        c.intersect_with(&inside);
                        c
                    })
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; cells.len()];
        loop {
            let mut meet = inside.clone();
            for (i, &c) in pick.iter().enumerate() {
                meet.intersect_with(&cells[i][c]);
            }
            if meet.is_clear() {
                out.push(
                    pick.iter()
                        .enumerate()
                        .map(|(i, &c)| cells[i][c].minimum().expect("cells are nonempty"))
                        .collect(),
                );
            }
            if !advance(&mut pick, &cells.iter().map(Vec::len).collect::<Vec<_>>()) {
                break;
            }
        }
    }
    out
}

/// Odometer increment; false once every combination has been visited.
pub(crate) fn advance(pick: &mut [usize], bounds: &[usize]) -> bool {
    for k in (0..pick.len()).rev() {
        pick[k] += 1;
        if pick[k] < bounds[k] {
            return true;
        }
        pick[k] = 0;
    }
    false
}
