pub mod audit;
pub mod corpus;
pub mod decide;
pub mod premodel;
pub mod proofkit;
pub mod relation;
pub mod syntax;
pub mod system;
pub mod transforms;

pub use audit::{AuditReport, Condition, Violation};
pub use premodel::{ModelError, Premodel};
pub use syntax::{parse, render, AgentId, ClosureSet, Formula};
pub use system::{LassoHistory, LassoSystem, RelTag, SystemError, WindowSystem};
