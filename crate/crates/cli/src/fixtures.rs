//! Bundled example corpus. Every fixture ships inside the binary so all
//! verbs and the full test suite run from a fresh checkout with no extra
//! files.

use cmrep_core::graph::FeynmanGraph;
use cmrep_core::mellin::CmRep;
use cmrep_core::poly::RibbonData;
use cmrep_core::rat::Rat;

use crate::formats::{FormatError, GraphFile, RibbonFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    Graph,
    Ribbon,
}

pub struct Fixture {
    pub name: &'static str,
    pub kind: FixtureKind,
    pub text: &'static str,
}

pub const ALL: &[Fixture] = &[
    Fixture {
        name: "tree",
        kind: FixtureKind::Graph,
        text: include_str!("../fixtures/tree.toml"),
    },
    Fixture {
        name: "bubble",
        kind: FixtureKind::Graph,
        text: include_str!("../fixtures/bubble.toml"),
    },
    Fixture {
        name: "triangle",
        kind: FixtureKind::Graph,
        text: include_str!("../fixtures/triangle.toml"),
    },
    Fixture {
        name: "gw_tadpole",
        kind: FixtureKind::Ribbon,
        text: include_str!("../fixtures/gw_tadpole.toml"),
    },
    Fixture {
        name: "gw_planar",
        kind: FixtureKind::Ribbon,
        text: include_str!("../fixtures/gw_planar.toml"),
    },
    Fixture {
        name: "gw_nonplanar",
        kind: FixtureKind::Ribbon,
        text: include_str!("../fixtures/gw_nonplanar.toml"),
    },
    Fixture {
        name: "lsz_line",
        kind: FixtureKind::Ribbon,
        text: include_str!("../fixtures/lsz_line.toml"),
    },
];

pub fn bundled(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

pub fn names() -> Vec<&'static str> {
    ALL.iter().map(|f| f.name).collect()
}

/// Truncation at which the contour and parametric values of the bundled
/// commutative graphs agree to the documented tolerance at D = 1 with unit
/// mass and invariant.
pub fn recorded_truncation(name: &str) -> Option<f64> {
    match name {
        "tree" | "bubble" => Some(12.0),
        _ => None,
    }
}

/// Truncation grid for the smeared step-identity convergence check.
pub const LEMMA_TRUNCATION_GRID: [f64; 4] = [4.0, 8.0, 12.0, 16.0];

impl Fixture {
    pub fn graph(&self) -> Result<FeynmanGraph, FormatError> {
        GraphFile::parse(self.text, self.name)?.to_graph()
    }

    pub fn ribbon(&self) -> Result<(RibbonData, Vec<Rat>), FormatError> {
        RibbonFile::parse(self.text, self.name)?.to_ribbon()
    }

    /// Mellin representation of the fixture, whichever side it lives on.
    pub fn rep(&self) -> Result<CmRep, FormatError> {
        match self.kind {
            FixtureKind::Graph => Ok(CmRep::commutative(&self.graph()?)?),
            FixtureKind::Ribbon => {
                let (data, externals) = self.ribbon()?;
                Ok(CmRep::noncommutative(&data, &externals)?)
            }
        }
    }
}
