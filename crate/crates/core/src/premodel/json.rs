use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::relation::{Partition, Relation, StateSet};

use super::{ModelError, Premodel, PremodelParts};

/// The on-disk premodel format. Per-agent relations live under the keys
/// `stit_1 .. stit_n` and `ought_1 .. ought_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PremodelFile {
    pub agents: usize,
    pub states: Vec<String>,
    #[serde(rename = "box")]
    pub boxp: Vec<Vec<String>>,
    pub agt: Vec<Vec<String>>,
    pub next: Vec<(String, String)>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(flatten)]
    pub per_agent: BTreeMap<String, Value>,
}

impl PremodelFile {
    pub fn into_premodel(self) -> Result<Premodel, ModelError> {
        let n = self.states.len();
        let index = |name: &str| -> Result<usize, ModelError> {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| ModelError::UnknownState(name.to_string()))
        };
        let blocks = |relation: &str, raw: &[Vec<String>]| -> Result<Partition, ModelError> {
            let ids = raw
                .iter()
                .map(|b| b.iter().map(|s| index(s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Partition::from_blocks(n, &ids).map_err(|source| ModelError::Malformed {
                relation: relation.to_string(),
                source,
            })
        };
        let pairs = |relation: &str, raw: &[(String, String)]| -> Result<Relation, ModelError> {
            let ids = raw
                .iter()
                .map(|(a, b)| Ok((index(a)?, index(b)?)))
                .collect::<Result<Vec<_>, ModelError>>()?;
            Relation::from_pairs(n, &ids).map_err(|source| ModelError::Malformed {
                relation: relation.to_string(),
                source,
            })
        };

        let mut stit = vec![None; self.agents];
        let mut ought = vec![None; self.agents];
        for (key, value) in &self.per_agent {
            let (kind, agent) = key
                .split_once('_')
                .and_then(|(k, a)| Some((k, a.parse::<usize>().ok()?)))
                .filter(|(k, a)| (*k == "stit" || *k == "ought") && (1..=self.agents).contains(a))
                .ok_or_else(|| ModelError::UnknownField(key.clone()))?;
            if kind == "stit" {
                let raw: Vec<Vec<String>> = serde_json::from_value(value.clone())?;
                stit[agent - 1] = Some(blocks(key, &raw)?);
            } else {
                let raw: Vec<(String, String)> = serde_json::from_value(value.clone())?;
                ought[agent - 1] = Some(pairs(key, &raw)?);
            }
        }
        let missing = |what: &'static str, found: usize| ModelError::AgentMismatch {
            what,
            expected: self.agents,
            found,
        };
        let stit_found = stit.iter().flatten().count();
        let stit = stit
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| missing("stit", stit_found))?;
        let ought_found = ought.iter().flatten().count();
        let ought = ought
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| missing("ought", ought_found))?;

        let mut valuation = BTreeMap::new();
        for (atom, states) in &self.valuation {
            let mut set = StateSet::with_capacity(n);
            for s in states {
                set.insert(index(s)?);
            }
            valuation.insert(atom.clone(), set);
        }

        Premodel::new(PremodelParts {
            names: self.states.clone(),
            agents: self.agents,
            boxp: blocks("box", &self.boxp)?,
            stit,
            agt: blocks("agt", &self.agt)?,
            ought,
            next: pairs("next", &self.next)?,
            valuation,
        })
    }
}

impl Premodel {
    pub fn to_file(&self) -> PremodelFile {
        let names = |ids: &[usize]| ids.iter().map(|&s| self.names[s].clone()).collect::<Vec<_>>();
        let blocks = |p: &Partition| p.blocks().iter().map(|b| names(b)).collect::<Vec<_>>();
        let pairs = |r: &Relation| {
            r.pairs()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect::<Vec<_>>()
        };
        let mut per_agent = BTreeMap::new();
        for i in 0..self.agents {
            per_agent.insert(
                format!("stit_{}", i + 1),
                serde_json::to_value(blocks(&self.stit[i])).expect("plain data"),
            );
            per_agent.insert(
                format!("ought_{}", i + 1),
                serde_json::to_value(pairs(&self.ought[i])).expect("plain data"),
            );
        }
        PremodelFile {
            agents: self.agents,
            states: self.names.clone(),
            boxp: blocks(&self.boxp),
            agt: blocks(&self.agt),
            next: pairs(&self.next),
            valuation: self
                .valuation
                .iter()
                .map(|(p, set)| (p.clone(), names(&set.ones().collect::<Vec<_>>())))
                .collect(),
            per_agent,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data")
    }

    /// Parses a premodel and audits it; violations are an error unless
    /// `allow_invalid` is set.
    pub fn from_json(text: &str, allow_invalid: bool) -> Result<Premodel, ModelError> {
        let file: PremodelFile = serde_json::from_str(text)?;
        let model = file.into_premodel()?;
        if !allow_invalid {
            let report = model.audit();
            if !report.is_clean() {
                return Err(ModelError::Invalid(report));
            }
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::Condition;

    const TWO: &str = r#"{
        "agents": 1,
        "states": ["a", "b"],
        "box": [["a"], ["b"]],
        "stit_1": [["a"], ["b"]],
        "agt": [["a"], ["b"]],
        "ought_1": [["a", "a"], ["b", "b"]],
        "next": [["a", "b"], ["b", "b"]],
        "valuation": {"p": ["b"]}
    }"#;

    #[test]
    fn roundtrip() {
        let m = Premodel::from_json(TWO, false).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.eval(0, &"X p".parse().unwrap()).unwrap());
        let again = Premodel::from_json(&m.to_json(), false).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn violations_are_rejected_unless_allowed() {
        let bad = TWO.replace(r#"[["a", "a"], ["b", "b"]]"#, r#"[["a", "b"], ["b", "b"]]"#);
        match Premodel::from_json(&bad, false) {
            Err(ModelError::Invalid(report)) => assert!(report.has(Condition::D5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Premodel::from_json(&bad, true).is_ok());
    }

    #[test]
    fn shape_errors() {
        let overlap = TWO.replace(r#""box": [["a"], ["b"]]"#, r#""box": [["a", "b"], ["b"]]"#);
        assert!(matches!(
            Premodel::from_json(&overlap, true),
            Err(ModelError::Malformed { .. })
        ));
        let unknown = TWO.replace(r#""p": ["b"]"#, r#""p": ["c"]"#);
        assert!(matches!(
            Premodel::from_json(&unknown, true),
            Err(ModelError::UnknownState(_))
        ));
        let extra = TWO.replace(r#""agents": 1,"#, r#""agents": 1, "stit_2": [],"#);
        assert!(matches!(
            Premodel::from_json(&extra, true),
            Err(ModelError::UnknownField(_))
        ));
        let missing = TWO.replace(r#""ought_1": [["a", "a"], ["b", "b"]],"#, "");
        assert!(matches!(
            Premodel::from_json(&missing, true),
            Err(ModelError::AgentMismatch { what: "ought", .. })
        ));
    }
}
