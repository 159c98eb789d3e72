use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    ZS,
    FS_CoT,
    FS_PlanAndSolve,
    FS_L_DCoT,
    FS_BL_DCoT,
    FS_ToT_CoT,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::ZS,
        Strategy::FS_CoT,
        Strategy::FS_PlanAndSolve,
        Strategy::FS_L_DCoT,
        Strategy::FS_BL_DCoT,
        Strategy::FS_ToT_CoT,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::ZS => "ZS",
            Strategy::FS_CoT => "FS_CoT",
            Strategy::FS_PlanAndSolve => "FS_PlanAndSolve",
            Strategy::FS_L_DCoT => "FS_L_DCoT",
            Strategy::FS_BL_DCoT => "FS_BL_DCoT",
            Strategy::FS_ToT_CoT => "FS_ToT_CoT",
        }
    }

    pub fn is_few_shot(self) -> bool {
        self != Strategy::ZS
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// Case-insensitive; `-` and `_` are interchangeable.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = |t: &str| t.to_ascii_lowercase().replace('-', "_");
        let wanted = norm(s.trim());
        Strategy::ALL
            .into_iter()
            .find(|k| norm(k.as_str()) == wanted)
            .ok_or_else(|| {
                let names: Vec<&str> = Strategy::ALL.iter().map(|k| k.as_str()).collect();
                format!("unknown strategy `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Prove,
    Hint,
    Grade,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Prove, Task::Hint, Task::Grade];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Prove => "prove",
            Task::Hint => "hint",
            Task::Grade => "grade",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown task `{s}` (expected prove, hint or grade)"))
    }
}
