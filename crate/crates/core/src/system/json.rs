use std::collections::BTreeMap;
use std::path::Path;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::premodel::{ModelError, Premodel, PremodelFile};
use crate::relation::{Partition, Relation};

use super::{LassoHistory, LassoSystem, Slice, SystemError, WindowSystem};

/// A history by state names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryFile {
    pub stem: Vec<String>,
    #[serde(rename = "loop")]
    pub cycle: Vec<String>,
}

/// The base premodel, either a path relative to the lasso file or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseRef {
    Path(String),
    Inline(Box<PremodelFile>),
}

/// The on-disk lasso system format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFile {
    pub base: BaseRef,
    pub histories: Vec<HistoryFile>,
    pub horizon: usize,
}

impl LassoSystem {
    pub fn to_file(&self) -> LassoFile {
        let names = |seq: &[usize]| seq.iter().map(|&s| self.base.name(s).to_string()).collect();
        LassoFile {
            base: BaseRef::Inline(Box::new(self.base.to_file())),
            histories: self
                .histories
                .iter()
                .map(|h| HistoryFile {
                    stem: names(h.stem()),
                    cycle: names(h.cycle()),
                })
                .collect(),
            horizon: self.horizon,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data")
    }

    /// Parses a lasso file. A base given as a path is resolved against
    /// `dir`; the base premodel is audited unless `allow_invalid` is set.
    pub fn from_json(text: &str, dir: Option<&Path>, allow_invalid: bool) -> Result<LassoSystem, SystemError> {
        let file: LassoFile = serde_json::from_str(text)?;
        let base = match file.base {
            BaseRef::Inline(pf) => {
                let model = pf.into_premodel()?;
                if !allow_invalid {
                    let report = model.audit();
                    if !report.is_clean() {
                        return Err(ModelError::Invalid(report).into());
                    }
                }
                model
            }
            BaseRef::Path(p) => {
                let path = match dir {
                    Some(d) => d.join(&p),
                    None => p.clone().into(),
                };
                let text = std::fs::read_to_string(&path).map_err(|source| SystemError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                Premodel::from_json(&text, allow_invalid)?
            }
        };
        let ids = |seq: &[String]| -> Result<Vec<usize>, SystemError> {
            seq.iter()
                .map(|s| base.state(s).ok_or_else(|| ModelError::UnknownState(s.clone()).into()))
                .collect()
        };
        let histories = file
            .histories
            .iter()
            .map(|h| LassoHistory::new(ids(&h.stem)?, ids(&h.cycle)?))
            .collect::<Result<Vec<_>, _>>()?;
        LassoSystem::new(base, histories, file.horizon)
    }
}

/// One time of a window file. Per-agent relations use the keys `stit_k`
/// and `ought_k`, as in premodel files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceFile {
    #[serde(rename = "box")]
    pub boxp: Vec<Vec<String>>,
    pub agt: Vec<Vec<String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(flatten)]
    pub per_agent: BTreeMap<String, Value>,
}

/// The on-disk format of an explicit window system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFile {
    pub agents: usize,
    pub histories: Vec<String>,
    pub slices: Vec<SliceFile>,
}

impl WindowSystem {
    pub fn to_file(&self) -> WindowFile {
        let names = |ids: &[usize]| ids.iter().map(|&h| self.names[h].clone()).collect::<Vec<_>>();
        let blocks = |p: &Partition| p.blocks().iter().map(|b| names(b)).collect::<Vec<_>>();
        let slices = self
            .slices
            .iter()
            .map(|s| {
                let mut per_agent = BTreeMap::new();
                for i in 0..self.agents {
                    per_agent.insert(
                        format!("stit_{}", i + 1),
                        serde_json::to_value(blocks(&s.stit[i])).expect("plain data"),
                    );
                    let pairs: Vec<(String, String)> = s.ought[i]
                        .pairs()
                        .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                        .collect();
                    per_agent.insert(
                        format!("ought_{}", i + 1),
                        serde_json::to_value(pairs).expect("plain data"),
                    );
                }
                SliceFile {
                    boxp: blocks(&s.boxp),
                    agt: blocks(&s.agt),
                    valuation: s
                        .valuation
                        .iter()
                        .map(|(p, set)| (p.clone(), names(&set.ones().collect::<Vec<_>>())))
                        .collect(),
                    per_agent,
                }
            })
            .collect();
        WindowFile {
            agents: self.agents,
            histories: self.names.clone(),
            slices,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<WindowSystem, SystemError> {
        let file: WindowFile = serde_json::from_str(text)?;
        file.into_window()
    }
}

impl WindowFile {
    pub fn into_window(self) -> Result<WindowSystem, SystemError> {
        let m = self.histories.len();
        let index = |name: &str| -> Result<usize, SystemError> {
            self.histories
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SystemError::Shape(format!("unknown history `{name}`")))
        };
        let blocks = |what: &str, raw: &[Vec<String>]| -> Result<Partition, SystemError> {
            let ids = raw
                .iter()
                .map(|b| b.iter().map(|s| index(s)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Partition::from_blocks(m, &ids).map_err(|source| {
                ModelError::Malformed {
                    relation: what.to_string(),
                    source,
                }
                .into()
            })
        };
        let mut slices = Vec::with_capacity(self.slices.len());
        for (t, sf) in self.slices.iter().enumerate() {
            let mut stit = vec![None; self.agents];
            let mut ought = vec![None; self.agents];
            for (key, value) in &sf.per_agent {
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
                    let mut r = Relation::empty(m);
                    for (a, b) in &raw {
                        r.insert(index(a)?, index(b)?);
                    }
                    ought[agent - 1] = Some(r);
                }
            }
            let missing = || SystemError::Shape(format!("time {t}: expected stit_k and ought_k for every agent"));
            let mut valuation = BTreeMap::new();
            for (atom, hs) in &sf.valuation {
                let mut set = FixedBitSet::with_capacity(m);
                for h in hs {
                    set.insert(index(h)?);
                }
                valuation.insert(atom.clone(), set);
            }
            slices.push(Slice {
                boxp: blocks("box", &sf.boxp)?,
                stit: stit.into_iter().collect::<Option<Vec<_>>>().ok_or_else(missing)?,
                agt: blocks("agt", &sf.agt)?,
                ought: ought.into_iter().collect::<Option<Vec<_>>>().ok_or_else(missing)?,
                valuation,
            });
        }
        WindowSystem::new(self.agents, self.histories, slices)
    }
}
