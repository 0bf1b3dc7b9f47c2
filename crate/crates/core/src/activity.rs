//! Activity and cohort labels shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One of the eight walking/running activities of a session.
///
/// The five speed-calibration levels train the per-subject step-length
/// model; the remaining three are held out for evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    ScL1,
    ScL2,
    ScL3,
    ScL4,
    ScL5,
    SixMwt,
    HundredMrw,
    FreeWalk,
}

impl Activity {
    pub const ALL: [Activity; 8] = [
        Activity::ScL1,
        Activity::ScL2,
        Activity::ScL3,
        Activity::ScL4,
        Activity::ScL5,
        Activity::SixMwt,
        Activity::HundredMrw,
        Activity::FreeWalk,
    ];

    pub const CALIBRATION: [Activity; 5] = [
        Activity::ScL1,
        Activity::ScL2,
        Activity::ScL3,
        Activity::ScL4,
        Activity::ScL5,
    ];

    pub const EVALUATION: [Activity; 3] =
        [Activity::SixMwt, Activity::HundredMrw, Activity::FreeWalk];

    pub fn label(self) -> &'static str {
        match self {
            Activity::ScL1 => "SC-L1",
            Activity::ScL2 => "SC-L2",
            Activity::ScL3 => "SC-L3",
            Activity::ScL4 => "SC-L4",
            Activity::ScL5 => "SC-L5",
            Activity::SixMwt => "6MWT",
            Activity::HundredMrw => "100MRW",
            Activity::FreeWalk => "FW",
        }
    }

    pub fn is_calibration(self) -> bool {
        matches!(
            self,
            Activity::ScL1 | Activity::ScL2 | Activity::ScL3 | Activity::ScL4 | Activity::ScL5
        )
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Activity::ALL
            .into_iter()
            .find(|a| a.label() == s.trim())
            .ok_or_else(|| Error::UnknownActivity(s.to_string()))
    }
}

impl Serialize for Activity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Activity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Participant group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cohort {
    #[serde(rename = "TD")]
    Td,
    #[serde(rename = "DMD")]
    Dmd,
}

impl Cohort {
    pub fn label(self) -> &'static str {
        match self {
            Cohort::Td => "TD",
            Cohort::Dmd => "DMD",
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Cohort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "TD" => Ok(Cohort::Td),
            "DMD" => Ok(Cohort::Dmd),
            other => Err(Error::Config(format!("unknown cohort `{other}`"))),
        }
    }
}
