use std::collections::BTreeSet;

use super::Formula;

/// A finite filtration-ready formula set: closed under subformulas and
/// dot-negation, containing `X U(a,b)` for each `U(a,b)` and `[i]f` for each
/// `O_i f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureSet {
    members: BTreeSet<Formula>,
    agent_count: usize,
}

/// Smallest filtration-ready set containing `f`.
pub fn closure(f: &Formula) -> ClosureSet {
    ClosureSet::of([f])
}

impl ClosureSet {
    /// Smallest filtration-ready set containing every formula in `roots`.
    pub fn of<'a>(roots: impl IntoIterator<Item = &'a Formula>) -> ClosureSet {
        let mut subs = BTreeSet::new();
        for root in roots {
            subs.extend(root.subformulas());
        }
        // The added companions have all their proper subformulas in `subs` already.
        let mut companions = Vec::new();
        for f in &subs {
            match f {
                Formula::Until(..) => companions.push(Formula::next(f.clone())),
                Formula::Ought(i, g) => companions.push(Formula::stit(*i, (**g).clone())),
                _ => {}
            }
        }
        subs.extend(companions);
        let negations: Vec<Formula> = subs.iter().map(Formula::dot_neg).collect();
        subs.extend(negations);
        let agent_count = subs.iter().map(Formula::max_agent).max().unwrap_or(0);
        ClosureSet {
            members: subs,
            agent_count,
        }
    }

    pub fn members(&self) -> &BTreeSet<Formula> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.members.iter()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.members.contains(f)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest agent index mentioned by a member.
    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn untils(&self) -> impl Iterator<Item = (&Formula, &Formula, &Formula)> {
        self.members.iter().filter_map(|f| match f {
            Formula::Until(a, b) => Some((f, &**a, &**b)),
            _ => None,
        })
    }

    pub fn nexts(&self) -> impl Iterator<Item = (&Formula, &Formula)> {
        self.members.iter().filter_map(|f| match f {
            Formula::Next(g) => Some((f, &**g)),
            _ => None,
        })
    }

    /// Checks the four closure conditions directly.
    pub fn is_filtration_ready(&self) -> bool {
        self.members.iter().all(|f| {
            f.children().all(|c| self.contains(c))
                && self.contains(&f.dot_neg())
                && match f {
                    Formula::Until(..) => self.contains(&Formula::next(f.clone())),
                    Formula::Ought(i, g) => self.contains(&Formula::stit(*i, (**g).clone())),
                    _ => true,
                }
        })
    }
}

impl<'a> IntoIterator for &'a ClosureSet {
    type Item = &'a Formula;
    type IntoIter = std::collections::btree_set::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn f(s: &str) -> Formula {
        parse(s, 3).unwrap()
    }

    #[test]
    fn atom_closure() {
        let c = closure(&f("p"));
        let want: BTreeSet<_> = [f("p"), f("~p")].into_iter().collect();
        assert_eq!(c.members(), &want);
    }

    #[test]
    fn until_gets_next_companion() {
        let c = closure(&f("U(p, q)"));
        for m in ["U(p, q)", "X U(p, q)", "p", "q", "~U(p, q)", "~X U(p, q)", "~p", "~q"] {
            assert!(c.contains(&f(m)), "missing {m}");
        }
        assert_eq!(c.len(), 8);
        assert!(c.is_filtration_ready());
    }

    #[test]
    fn ought_gets_stit_companion() {
        let c = closure(&f("O1 p"));
        assert!(c.contains(&f("[1] p")));
        assert!(c.contains(&f("~[1] p")));
        assert!(c.is_filtration_ready());
        assert_eq!(c.agent_count(), 1);
    }

    #[test]
    fn negated_roots_do_not_stack() {
        let c = closure(&f("~~p"));
        assert!(c.contains(&f("~~p")));
        assert!(c.contains(&f("~p")));
        assert!(!c.contains(&f("~~~p")));
        assert!(c.is_filtration_ready());
    }
}
