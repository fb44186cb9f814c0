use std::fmt;

use serde::Serialize;

use crate::syntax::{parse, render, AgentId, Formula};

use super::schema::{is_tautology, match_schema, SCHEMA_IDS};
use super::ProofError;

/// The operators (Nec) applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Box,
    Group,
    Next,
    Stit(AgentId),
    Ought(AgentId),
}

impl Modality {
    pub fn apply(self, f: Formula) -> Formula {
        match self {
            Modality::Box => Formula::nec(f),
            Modality::Group => Formula::group_stit(f),
            Modality::Next => Formula::next(f),
            Modality::Stit(i) => Formula::stit(i, f),
            Modality::Ought(i) => Formula::ought(i, f),
        }
    }

    fn agent(self) -> Option<AgentId> {
        match self {
            Modality::Stit(i) | Modality::Ought(i) => Some(i),
            _ => None,
        }
    }

    fn parse(word: &str) -> Option<Modality> {
        let agent = |s: &str| s.parse::<u32>().ok().and_then(AgentId::new);
        match word {
            "box" => Some(Modality::Box),
            "[*]" => Some(Modality::Group),
            "X" => Some(Modality::Next),
            _ => {
                if let Some(n) = word.strip_prefix('[').and_then(|w| w.strip_suffix(']')) {
                    agent(n).map(Modality::Stit)
                } else {
                    word.strip_prefix('O').and_then(agent).map(Modality::Ought)
                }
            }
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modality::Box => f.write_str("box"),
            Modality::Group => f.write_str("[*]"),
            Modality::Next => f.write_str("X"),
            Modality::Stit(i) => write!(f, "[{i}]"),
            Modality::Ought(i) => write!(f, "O{i}"),
        }
    }
}

/// How a line is justified. Line references are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(String),
    /// `Mp(i, j)`: line `j` is line `i` implying the current line.
    Mp(usize, usize),
    Nec(Modality, usize),
    /// The premise line and the right argument of the concluded until.
    UInd(usize, Formula),
}

impl Justification {
    pub fn references(&self) -> Vec<usize> {
        match self {
            Justification::Axiom(_) => Vec::new(),
            Justification::Mp(i, j) => vec![*i, *j],
            Justification::Nec(_, i) | Justification::UInd(i, _) => vec![*i],
        }
    }

    fn parse(text: &str, agents: usize) -> Result<Justification, String> {
        let text = text.trim();
        let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let line = |s: &str| s.parse::<usize>().map_err(|_| format!("`{s}` is not a line number"));
        match head {
            "MP" => {
                let mut it = rest.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some(i), Some(j), None) => Ok(Justification::Mp(line(i)?, line(j)?)),
                    _ => Err("MP takes two line numbers".into()),
                }
            }
            "Nec" => {
                let mut it = rest.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some(m), Some(i), None) => {
                        let m = Modality::parse(m).ok_or_else(|| format!("`{m}` is not a modality"))?;
                        Ok(Justification::Nec(m, line(i)?))
                    }
                    _ => Err("Nec takes a modality and a line number".into()),
                }
            }
            "UInd" => {
                let (i, psi) = rest
                    .split_once(char::is_whitespace)
                    .ok_or("UInd takes a line number and a formula")?;
                let psi = parse(psi, agents).map_err(|e| e.to_string())?;
                Ok(Justification::UInd(line(i)?, psi))
            }
            "Axiom" => Ok(Justification::Axiom(rest.to_string())),
            id if rest.is_empty() => Ok(Justification::Axiom(id.to_string())),
            _ => Err(format!("unknown justification `{text}`")),
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(id) => f.write_str(id),
            Justification::Mp(i, j) => write!(f, "MP {i} {j}"),
            Justification::Nec(m, i) => write!(f, "Nec {m} {i}"),
            Justification::UInd(i, psi) => write!(f, "UInd {i} {}", render(psi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

/// Why a line is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// A Hilbert-style derivation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofScript {
    lines: Vec<ProofLine>,
}

/// Matches `~(a & ~b)`.
pub(crate) fn as_implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::And(a, nb) = &**inner {
            if let Formula::Not(b) = &**nb {
                return Some((a, b));
            }
        }
    }
    None
}

impl ProofScript {
    pub fn new() -> ProofScript {
        ProofScript::default()
    }

    pub fn lines(&self) -> &[ProofLine] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// The formula on the last line.
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Appends a line and returns its number.
    pub fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        self.lines.push(ProofLine { formula, justification });
        self.lines.len()
    }

    pub fn axiom(&mut self, formula: Formula, id: &str) -> usize {
        self.push(formula, Justification::Axiom(id.to_string()))
    }

    pub fn pc(&mut self, formula: Formula) -> usize {
        self.axiom(formula, "PC")
    }

    /// Adds the conclusion of line `i` and line `j = i -> conclusion`.
    pub fn mp(&mut self, i: usize, j: usize) -> Result<usize, ProofError> {
        let (a, b) = as_implication(&self.line(j)?.formula)
            .ok_or_else(|| ProofError::Shape(format!("line {j} is not an implication")))?;
        if *a != self.line(i)?.formula {
            return Err(ProofError::Shape(format!("line {j} does not start with line {i}")));
        }
        let b = b.clone();
        Ok(self.push(b, Justification::Mp(i, j)))
    }

    pub fn nec(&mut self, m: Modality, i: usize) -> Result<usize, ProofError> {
        let f = m.apply(self.line(i)?.formula.clone());
        Ok(self.push(f, Justification::Nec(m, i)))
    }

    fn line(&self, i: usize) -> Result<&ProofLine, ProofError> {
        i.checked_sub(1)
            .and_then(|k| self.lines.get(k))
            .ok_or_else(|| ProofError::Shape(format!("no line {i}")))
    }

    /// Copies another script in, renumbering its references, and returns the
    /// number its conclusion has here.
    pub fn embed(&mut self, other: &ProofScript) -> usize {
        let offset = self.lines.len();
        for l in &other.lines {
            let justification = match &l.justification {
                Justification::Axiom(id) => Justification::Axiom(id.clone()),
                Justification::Mp(i, j) => Justification::Mp(i + offset, j + offset),
                Justification::Nec(m, i) => Justification::Nec(*m, i + offset),
                Justification::UInd(i, psi) => Justification::UInd(i + offset, psi.clone()),
            };
            self.lines.push(ProofLine {
                formula: l.formula.clone(),
                justification,
            });
        }
        self.lines.len()
    }

    /// Reads the `N. formula ; justification` format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str, agents: usize) -> Result<ProofScript, ProofError> {
        let mut script = ProofScript::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ProofError::Syntax { line: k + 1, message };
            let (num, rest) = line
                .split_once('.')
                .ok_or_else(|| err("expected `N. formula ; justification`".into()))?;
            let num: usize = num
                .trim()
                .parse()
                .map_err(|_| err(format!("`{}` is not a line number", num.trim())))?;
            if num != script.len() + 1 {
                return Err(err(format!("expected line {}, found {num}", script.len() + 1)));
            }
            let (formula, just) = rest
                .split_once(';')
                .ok_or_else(|| err("missing `;` before the justification".into()))?;
            let formula = parse(formula, agents).map_err(|e| err(e.to_string()))?;
            let justification = Justification::parse(just, agents).map_err(err)?;
            script.push(formula, justification);
        }
        Ok(script)
    }

    /// Checks every line in order and reports the first failure.
    pub fn check(&self, agents: usize) -> Result<(), CheckFailure> {
        for (k, l) in self.lines.iter().enumerate() {
            let n = k + 1;
            check_line(self, n, l, agents).map_err(|reason| CheckFailure { line: n, reason })?;
        }
        Ok(())
    }
}

fn check_line(script: &ProofScript, n: usize, l: &ProofLine, agents: usize) -> Result<(), String> {
    if l.formula.max_agent() > agents {
        return Err(format!("mentions agent {} of {agents}", l.formula.max_agent()));
    }
    for r in l.justification.references() {
        if r == 0 || r >= n {
            return Err(format!("reference to line {r} does not point to an earlier line"));
        }
    }
    let earlier = |i: usize| &script.lines[i - 1].formula;
    match &l.justification {
        Justification::Axiom(id) => {
            if !SCHEMA_IDS.contains(&id.as_str()) {
                return Err(format!("unknown schema `{id}`"));
            }
            if id == "PC" && is_tautology(&l.formula).is_none() {
                return Err("too many propositional variables for the tautology check".into());
            }
            match match_schema(&l.formula, id, agents) {
                Some(_) => Ok(()),
                None => Err(format!("not an instance of {id}")),
            }
        }
        Justification::Mp(i, j) => {
            if *earlier(*j) == Formula::implies(earlier(*i).clone(), l.formula.clone()) {
                Ok(())
            } else {
                Err(format!("line {j} is not line {i} implying this line"))
            }
        }
        Justification::Nec(m, i) => {
            if m.agent().is_some_and(|a| a.index() as usize > agents) {
                return Err(format!("modality {m} names an undeclared agent"));
            }
            if m.apply(earlier(*i).clone()) == l.formula {
                Ok(())
            } else {
                Err(format!("this line is not {m} applied to line {i}"))
            }
        }
        Justification::UInd(i, psi) => {
            let shape = || format!("line {i} is not of the form c -> (~a & X c)");
            let (chi, body) = as_implication(earlier(*i)).ok_or_else(shape)?;
            let Formula::And(not_phi, next_chi) = body else {
                return Err(shape());
            };
            let Formula::Not(phi) = &**not_phi else {
                return Err(shape());
            };
            if **next_chi != Formula::next(chi.clone()) {
                return Err(shape());
            }
            let want = Formula::implies(
                chi.clone(),
                Formula::not(Formula::until((**phi).clone(), psi.clone())),
            );
            if l.formula == want {
                Ok(())
            } else {
                Err(format!("this line is not {}", render(&want)))
            }
        }
    }
}

impl fmt::Display for ProofScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.lines.iter().enumerate() {
            writeln!(f, "{}. {} ; {}", k + 1, render(&l.formula), l.justification)?;
        }
        Ok(())
    }
}
