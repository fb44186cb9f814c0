use std::collections::HashMap;

use super::{AgentId, Formula};

/// A formula node whose children are indices into the owning [`Dag`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Atom(String),
    Top,
    Bottom,
    Not(usize),
    And(usize, usize),
    Nec(usize),
    Stit(AgentId, usize),
    GroupStit(usize),
    Ought(AgentId, usize),
    Next(usize),
    Until(usize, usize),
}

/// Hash-consed formulas in dependency order: every node's children have
/// smaller indices, so a forward pass evaluates bottom-up.
#[derive(Debug, Clone, Default)]
pub struct Dag {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
}

impl Dag {
    pub fn new() -> Dag {
        Dag::default()
    }

    pub fn of<'a>(roots: impl IntoIterator<Item = &'a Formula>) -> Dag {
        let mut dag = Dag::new();
        for f in roots {
            dag.intern(f);
        }
        dag
    }

    pub fn intern(&mut self, f: &Formula) -> usize {
        if let Some(&id) = self.index.get(f) {
            return id;
        }
        let node = match f {
            Formula::Atom(p) => Node::Atom(p.clone()),
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bottom,
            Formula::Not(g) => Node::Not(self.intern(g)),
            Formula::And(a, b) => {
                let a = self.intern(a);
                Node::And(a, self.intern(b))
            }
            Formula::Nec(g) => Node::Nec(self.intern(g)),
            Formula::Stit(i, g) => Node::Stit(*i, self.intern(g)),
            Formula::GroupStit(g) => Node::GroupStit(self.intern(g)),
            Formula::Ought(i, g) => Node::Ought(*i, self.intern(g)),
            Formula::Next(g) => Node::Next(self.intern(g)),
            Formula::Until(a, b) => {
                let a = self.intern(a);
                Node::Until(a, self.intern(b))
            }
        };
        let id = self.nodes.len();
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), id);
        id
    }

    pub fn id(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn formula(&self, id: usize) -> &Formula {
        &self.formulas[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_agent(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Stit(i, _) | Node::Ought(i, _) => Some(i.index() as usize),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn shared_subterms_are_interned_once() {
        let f = parse("(p & q) | X (p & q)", 1).unwrap();
        let mut dag = Dag::new();
        let root = dag.intern(&f);
        let pq = dag.id(&parse("p & q", 1).unwrap()).unwrap();
        assert!(pq < root);
        let distinct = f.subformulas().len();
        assert_eq!(dag.len(), distinct);
        for (id, node) in dag.nodes().iter().enumerate() {
            if let Node::And(a, b) | Node::Until(a, b) = node {
                assert!(*a < id && *b < id);
            }
        }
    }
}
