//! Bundled groups and covers, embedded at compile time.

use crate::abelian::{
    build_cocycle_cover, canonical_cover_of, load_cover, recognize_abelian, AbelianType, Cover,
    CoverSpec,
};
use crate::engine::group::Group;
use crate::engine::spec::{load_group, GroupSpec};
use crate::{Limits, Result};

pub struct Entry {
    pub key: &'static str,
    pub spec: &'static str,
    /// Cover files; the first is the default cover of a non-abelian group.
    pub covers: &'static [(&'static str, &'static str)],
}

macro_rules! grp {
    ($key:literal) => {
        include_str!(concat!("../../catalogue/", $key, ".grp"))
    };
}

macro_rules! cov {
    ($key:literal) => {
        (
            $key,
            include_str!(concat!("../../catalogue/", $key, ".cov")),
        )
    };
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        key: "z2",
        spec: grp!("z2"),
        covers: &[],
    },
    Entry {
        key: "z3",
        spec: grp!("z3"),
        covers: &[],
    },
    Entry {
        key: "z4",
        spec: grp!("z4"),
        covers: &[],
    },
    Entry {
        key: "z5",
        spec: grp!("z5"),
        covers: &[],
    },
    Entry {
        key: "z6",
        spec: grp!("z6"),
        covers: &[],
    },
    Entry {
        key: "z7",
        spec: grp!("z7"),
        covers: &[],
    },
    Entry {
        key: "z8",
        spec: grp!("z8"),
        covers: &[],
    },
    Entry {
        key: "z9",
        spec: grp!("z9"),
        covers: &[],
    },
    Entry {
        key: "z10",
        spec: grp!("z10"),
        covers: &[],
    },
    Entry {
        key: "z11",
        spec: grp!("z11"),
        covers: &[],
    },
    Entry {
        key: "z12",
        spec: grp!("z12"),
        covers: &[],
    },
    Entry {
        key: "z13",
        spec: grp!("z13"),
        covers: &[],
    },
    Entry {
        key: "z14",
        spec: grp!("z14"),
        covers: &[],
    },
    Entry {
        key: "z15",
        spec: grp!("z15"),
        covers: &[],
    },
    Entry {
        key: "z16",
        spec: grp!("z16"),
        covers: &[],
    },
    Entry {
        key: "z2sq",
        spec: grp!("z2sq"),
        covers: &[cov!("z2sq-d4"), cov!("z2sq-q8")],
    },
    Entry {
        key: "z2cube",
        spec: grp!("z2cube"),
        covers: &[],
    },
    Entry {
        key: "z3sq",
        spec: grp!("z3sq"),
        covers: &[],
    },
    Entry {
        key: "z5sq",
        spec: grp!("z5sq"),
        covers: &[],
    },
    Entry {
        key: "z2z4",
        spec: grp!("z2z4"),
        covers: &[],
    },
    Entry {
        key: "z3z9",
        spec: grp!("z3z9"),
        covers: &[],
    },
    Entry {
        key: "z6sq",
        spec: grp!("z6sq"),
        covers: &[],
    },
    Entry {
        key: "s3",
        spec: grp!("s3"),
        covers: &[cov!("s3-self")],
    },
    Entry {
        key: "d4",
        spec: grp!("d4"),
        covers: &[cov!("d4-d16")],
    },
    Entry {
        key: "q8",
        spec: grp!("q8"),
        covers: &[cov!("q8-self")],
    },
    Entry {
        key: "a5",
        spec: grp!("a5"),
        covers: &[cov!("a5-sl25")],
    },
];

pub fn entry(key: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.key == key)
}

/// A catalogue group with every cover available for it.
#[derive(Clone, Debug)]
pub struct Subject {
    pub key: String,
    pub group: Group,
    /// `Some` for abelian groups.
    pub abelian_type: Option<AbelianType>,
    /// Labelled covers; the first is the default.
    pub covers: Vec<(String, Cover)>,
}

impl Subject {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn default_cover(&self) -> &Cover {
        &self.covers[0].1
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian_type.is_some()
    }
}

impl Entry {
    pub fn group_spec(&self) -> Result<GroupSpec> {
        GroupSpec::parse_str(self.spec)
    }

    /// Loads the group and its covers. Abelian groups get the canonical
    /// cocycle cover first, then the all-ones twisted cover when it is
    /// defined, then any bundled cover files.
    pub fn load(&self, limits: &Limits) -> Result<Subject> {
        let group = load_group(&self.group_spec()?, limits)?;
        let abelian_type = if group.is_abelian() {
            Some(recognize_abelian(&group)?)
        } else {
            None
        };
        let mut covers = Vec::new();
        if let Some(moduli) = group.abelian_moduli() {
            covers.push(("canonical".to_string(), canonical_cover_of(&group, limits)?));
            let divisors: Vec<u64> = moduli.iter().map(|&m| m as u64).collect();
            let t = AbelianType::from_divisors(&divisors)?;
            if t.divisors() == divisors.as_slice() {
                if let Ok(c) = build_cocycle_cover(&t, Some(&vec![1; divisors.len()]), limits) {
                    covers.push(("twisted".to_string(), c));
                }
            }
        }
        for (name, text) in self.covers {
            let cover = load_cover(&CoverSpec::parse_str(text)?, limits)?;
            if !cover.base().same_model(&group) {
                return Err(crate::Error::MalformedCover(format!(
                    "bundled cover {name} does not sit over {}",
                    self.key
                )));
            }
            covers.push((name.to_string(), cover));
        }
        Ok(Subject {
            key: self.key.to_string(),
            group,
            abelian_type,
            covers,
        })
    }
}

/// Every catalogue subject of order at most `max_order`.
pub fn load_all(max_order: Option<usize>, limits: &Limits) -> Result<Vec<Subject>> {
    let mut out = Vec::new();
    for e in ENTRIES {
        let s = e.load(limits)?;
        if max_order.is_none_or(|m| s.order() <= m) {
            out.push(s);
        }
    }
    Ok(out)
}
