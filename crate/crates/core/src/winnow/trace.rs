use std::fmt;

use serde::{Deserialize, Serialize};

use crate::concept::Input;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceAction {
    Split,
    Replace,
    Add,
}

impl fmt::Display for TraceAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceAction::Split => "split",
            TraceAction::Replace => "replace",
            TraceAction::Add => "add",
        })
    }
}

/// One line of a winnowing log. Fields that do not apply to a procedure
/// are `None` and print as `-`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub action: TraceAction,
    pub input: Input,
    pub cover_survivors: Option<usize>,
    pub progress: Option<f64>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} action={} input={:x} |S◇|=",
            self.step, self.action, self.input
        )?;
        match self.cover_survivors {
            Some(c) => write!(f, "{c}")?,
            None => f.write_str("-")?,
        }
        f.write_str(" M=")?;
        match self.progress {
            Some(m) => write!(f, "{m}"),
            None => f.write_str("-"),
        }
    }
}
