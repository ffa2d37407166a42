//! Isomorphism testing by fingerprints and generator-image backtracking.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::group::Group;
use super::hom::{extend_on_generators, Homomorphism};
use super::structure::{abelianization, conjugacy_classes, frattini, order_histogram};
use super::subgroup::{centre, derived_subgroup, ClosureBuilder, Subgroup};
use crate::abelian::{recognize_abelian, AbelianType};
use crate::{Error, Limits, Result};

/// Isomorphism invariants compared before any search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub order: usize,
    pub element_order_histogram: BTreeMap<u32, usize>,
    pub centre_order: usize,
    pub derived_order: usize,
    pub frattini_order: Option<usize>,
    pub abelianization: AbelianType,
    /// class size -> number of classes of that size
    pub class_sizes: BTreeMap<usize, usize>,
}

pub fn fingerprint(g: &Group, limits: &Limits) -> Fingerprint {
    let (_, sizes) = conjugacy_classes(g);
    let mut class_sizes = BTreeMap::new();
    for s in sizes {
        *class_sizes.entry(s).or_insert(0) += 1;
    }
    Fingerprint {
        order: g.order(),
        element_order_histogram: order_histogram(g),
        centre_order: centre(g).order(),
        derived_order: derived_subgroup(g).order(),
        frattini_order: frattini(g, limits).ok().map(|f| f.order()),
        abelianization: abelianization(g),
        class_sizes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    /// Above the exact-search bound; all fingerprints agree.
    FingerprintEqual,
}

impl IsoVerdict {
    /// True unless the groups are known to differ.
    pub fn compatible(self) -> bool {
        self != IsoVerdict::NotIsomorphic
    }
}

/// Decides isomorphism exactly up to `limits.iso_bound`, by fingerprint
/// above it. Abelian pairs are always decided exactly by their invariant
/// factors.
pub fn is_isomorphic(a: &Group, b: &Group, limits: &Limits) -> IsoVerdict {
    if a.order() != b.order() {
        return IsoVerdict::NotIsomorphic;
    }
    match (a.is_abelian(), b.is_abelian()) {
        (true, true) => {
            let same = recognize_abelian(a).ok() == recognize_abelian(b).ok();
            return if same {
                IsoVerdict::Isomorphic
            } else {
                IsoVerdict::NotIsomorphic
            };
        }
        (false, false) => {}
        _ => return IsoVerdict::NotIsomorphic,
    }
    if fingerprint(a, limits) != fingerprint(b, limits) {
        return IsoVerdict::NotIsomorphic;
    }
    if a.order() > limits.iso_bound {
        return IsoVerdict::FingerprintEqual;
    }
    match search(a, b) {
        Some(_) => IsoVerdict::Isomorphic,
        None => IsoVerdict::NotIsomorphic,
    }
}

/// Exact decision; errors above the isomorphism bound.
pub fn is_isomorphic_exact(a: &Group, b: &Group, limits: &Limits) -> Result<bool> {
    if a.order() != b.order() {
        return Ok(false);
    }
    if a.order() > limits.iso_bound && !(a.is_abelian() && b.is_abelian()) {
        return Err(Error::IsoBoundExceeded {
            order: a.order(),
            bound: limits.iso_bound,
        });
    }
    Ok(is_isomorphic(a, b, limits) == IsoVerdict::Isomorphic)
}

/// An explicit isomorphism `a → b`, if one exists.
pub fn find_isomorphism(a: &Group, b: &Group, limits: &Limits) -> Result<Option<Homomorphism>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    if a.order() > limits.iso_bound {
        return Err(Error::IsoBoundExceeded {
            order: a.order(),
            bound: limits.iso_bound,
        });
    }
    if a.is_abelian() != b.is_abelian() || fingerprint(a, limits) != fingerprint(b, limits) {
        return Ok(None);
    }
    Ok(search(a, b).map(|map| Homomorphism::new_unchecked(a.clone(), b.clone(), map)))
}

/// Per-element invariant preserved by isomorphisms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct ElementClass {
    order: u32,
    class_size: u32,
    central: bool,
    in_derived: bool,
}

fn element_classes(g: &Group) -> Vec<ElementClass> {
    let (class, sizes) = conjugacy_classes(g);
    let z = centre(g);
    let d = derived_subgroup(g);
    (0..g.order())
        .map(|x| ElementClass {
            order: g.element_order(x),
            class_size: sizes[class[x] as usize] as u32,
            central: z.contains(x),
            in_derived: d.contains(x),
        })
        .collect()
}

/// Greedy short generating sequence: repeatedly adds the element that
/// enlarges the generated subgroup most, preferring elements whose
/// invariant is rare in `b` (fewer branches later).
fn generating_sequence(a: &Group, rarity: &dyn Fn(usize) -> usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = Subgroup::trivial(a);
    while current.order() < a.order() {
        let mut best: Option<(usize, usize, usize)> = None; // (size, rarity, x)
        for x in 1..a.order() {
            if current.contains(x) {
                continue;
            }
            let mut b = ClosureBuilder::new(a);
            b.add_all(chosen.iter().copied());
            b.add(x);
            let key = (b.len(), rarity(x), x);
            let better = match best {
                None => true,
                Some((s, r, _)) => key.0 > s || (key.0 == s && key.1 < r),
            };
            if better {
                best = Some(key);
            }
        }
        let (_, _, x) = best.expect("proper subgroup has an element outside");
        chosen.push(x);
        let mut b = ClosureBuilder::new(a);
        b.add_all(chosen.iter().copied());
        current = b.finish(Some(false));
    }
    chosen
}

fn search(a: &Group, b: &Group) -> Option<Vec<u32>> {
    let ca = element_classes(a);
    let cb = element_classes(b);
    let mut by_class: HashMap<ElementClass, Vec<usize>> = HashMap::new();
    for (y, c) in cb.iter().enumerate() {
        by_class.entry(*c).or_default().push(y);
    }
    let rarity = |x: usize| by_class.get(&ca[x]).map_or(0, Vec::len);
    let gens = generating_sequence(a, &rarity);
    let candidates: Vec<&[usize]> = gens
        .iter()
        .map(|&x| by_class.get(&ca[x]).map_or(&[][..], |v| v.as_slice()))
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    backtrack(a, b, &gens, &candidates, &mut images)
}

fn backtrack(
    a: &Group,
    b: &Group,
    gens: &[usize],
    candidates: &[&[usize]],
    images: &mut Vec<usize>,
) -> Option<Vec<u32>> {
    let level = images.len();
    for &y in candidates[level] {
        images.push(y);
        if let Some(map) = partial_map(a, b, &gens[..=level], images) {
            if level + 1 == gens.len() {
                return Some(map);
            }
            if let Some(done) = backtrack(a, b, gens, candidates, images) {
                return Some(done);
            }
        }
        images.pop();
    }
    None
}

/// Extends the partial assignment to `<gens>` and checks it is a
/// well-defined injective homomorphism there.
fn partial_map(a: &Group, b: &Group, gens: &[usize], images: &[usize]) -> Option<Vec<u32>> {
    let map = extend_on_generators(a, b, gens, images)?;
    let mut used = vec![false; b.order()];
    for &y in map.iter().filter(|&&y| y != u32::MAX) {
        if std::mem::replace(&mut used[y as usize], true) {
            return None;
        }
    }
    Some(map)
}
