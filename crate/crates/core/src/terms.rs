//! The 23 canonical license terms and the attitude a license takes toward each.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of canonical license terms.
pub const TERM_COUNT: usize = 23;

/// Whether a term grants something to the user or asks something of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Right,
    Obligation,
}

/// Index of a license term, always in `0..23`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct TermId(u8);

const TERM_NAMES: [&str; TERM_COUNT] = [
    "Distribute",
    "Modify",
    "Commercial Use",
    "Relicense",
    "Hold Liable",
    "Use Patent Claims",
    "Sublicense",
    "Statically Link",
    "Private Use",
    "Use Trademark",
    "Place Warranty",
    "Include Copyright",
    "Include License",
    "Include Notice",
    "Disclose Source",
    "State Changes",
    "Include Original",
    "Give Credit",
    "Rename",
    "Contact Author",
    "Include Install Instructions",
    "Compensate for Damages",
    "Pay Above Use Threshold",
];

const TERM_DESCRIPTIONS: [&str; TERM_COUNT] = [
    "Distribute original or modified derivative works",
    "Modify the software and create derivatives",
    "Use the software for commercial purposes",
    "Add other licenses with the software",
    "Hold the author responsible for subsequent impacts",
    "Practice patent claims of contributors to the code",
    "Incorporate the work into something that has a more restrictive license",
    "The library can be compiled into the program linked at compile time rather than runtime",
    "Use or modify software freely without distributing it",
    "Use contributors' names, trademarks or logos",
    "Place warranty on the software licensed",
    "Retain the copyright notice in all copies or substantial uses of the work",
    "Include the full text of license in modified software",
    "Include that NOTICE when you distribute if the library has a NOTICE file with attribution notes",
    "Disclose your source code when you distribute the software and make the source for the library available",
    "State significant changes made to software",
    "Distribute copies of the original software or instructions to obtain copies with the software",
    "Give explicit credit or acknowledgement to the author with the software",
    "Change software name as to not misrepresent them as the original software",
    "Get permission from author or contact the author about the module you are using",
    "Include the installation information necessary to modify and reinstall the software",
    "Compensate the author for any damages cased by your work",
    "Pay the licensor after a certain amount of use",
];

/// Ids below this value are rights, the rest obligations.
const FIRST_OBLIGATION: u8 = 11;

impl TermId {
    pub fn new(id: u8) -> Option<Self> {
        ((id as usize) < TERM_COUNT).then_some(TermId(id))
    }

    pub fn all() -> impl Iterator<Item = TermId> + Clone {
        (0..TERM_COUNT as u8).map(TermId)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        TERM_NAMES[self.index()]
    }

    pub fn description(self) -> &'static str {
        TERM_DESCRIPTIONS[self.index()]
    }

    pub fn category(self) -> Category {
        if self.0 < FIRST_OBLIGATION {
            Category::Right
        } else {
            Category::Obligation
        }
    }

    /// Looks a term up by numeric id or by name (case and spacing insensitive).
    pub fn parse_loose(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(n) = s.parse::<u8>() {
            return Self::new(n);
        }
        let key = squash(s);
        TermId::all().find(|t| squash(t.name()) == key)
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

impl From<TermId> for u8 {
    fn from(t: TermId) -> u8 {
        t.0
    }
}

impl TryFrom<u8> for TermId {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        TermId::new(v).ok_or_else(|| format!("term id {v} out of range 0..{TERM_COUNT}"))
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name(), self.0)
    }
}

/// A license's stance toward one term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Attitude {
    Can,
    Cannot,
    Must,
    Unknown,
}

impl Attitude {
    pub const CONCRETE: [Attitude; 3] = [Attitude::Can, Attitude::Cannot, Attitude::Must];

    pub fn as_str(self) -> &'static str {
        match self {
            Attitude::Can => "CAN",
            Attitude::Cannot => "CANNOT",
            Attitude::Must => "MUST",
            Attitude::Unknown => "UNKNOWN",
        }
    }

    /// Restrictiveness rank used when one license states several attitudes
    /// toward the same term: CANNOT > MUST > CAN > UNKNOWN.
    pub fn restrictiveness(self) -> u8 {
        match self {
            Attitude::Unknown => 0,
            Attitude::Can => 1,
            Attitude::Must => 2,
            Attitude::Cannot => 3,
        }
    }

    pub fn is_concrete(self) -> bool {
        self != Attitude::Unknown
    }
}

impl fmt::Display for Attitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attitude {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CAN" => Ok(Attitude::Can),
            "CANNOT" => Ok(Attitude::Cannot),
            "MUST" => Ok(Attitude::Must),
            "UNKNOWN" => Ok(Attitude::Unknown),
            other => Err(format!("unknown attitude {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_mapping() {
        assert_eq!(TermId::all().count(), 23);
        let rights: Vec<_> = TermId::all()
            .filter(|t| t.category() == Category::Right)
            .map(|t| t.index())
            .collect();
        assert_eq!(rights, (0..=10).collect::<Vec<_>>());
        assert_eq!(TermId::new(0).unwrap().name(), "Distribute");
        assert_eq!(TermId::new(15).unwrap().name(), "State Changes");
        assert_eq!(TermId::new(17).unwrap().name(), "Give Credit");
        assert_eq!(TermId::new(22).unwrap().name(), "Pay Above Use Threshold");
        assert!(TermId::new(23).is_none());
    }

    #[test]
    fn loose_parsing() {
        assert_eq!(TermId::parse_loose("give credit"), TermId::new(17));
        assert_eq!(TermId::parse_loose("GiveCredit"), TermId::new(17));
        assert_eq!(TermId::parse_loose("4"), TermId::new(4));
        assert_eq!(TermId::parse_loose("nope"), None);
    }

    #[test]
    fn attitude_serde_uses_upper_case() {
        let s = serde_json::to_string(&Attitude::Cannot).unwrap();
        assert_eq!(s, "\"CANNOT\"");
        assert_eq!("must".parse::<Attitude>().unwrap(), Attitude::Must);
    }
}
