use std::fmt;

use super::group::Group;
use super::subgroup::{ClosureBuilder, Subgroup};
use crate::{Error, Result};

/// A homomorphism between enumerated groups, stored as a full index map.
#[derive(Clone)]
pub struct Homomorphism {
    source: Group,
    target: Group,
    map: Vec<u32>,
}

impl Homomorphism {
    /// Validates `map` as a homomorphism.
    ///
    /// Checking `φ(x·g) = φ(x)·φ(g)` for every `x` and every generator `g`
    /// (plus `φ(1) = 1`) is a complete check by induction on word length.
    pub fn new(source: Group, target: Group, map: Vec<u32>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::NotHomomorphism(format!(
                "map has {} entries for a source of order {}",
                map.len(),
                source.order()
            )));
        }
        if map.iter().any(|&y| y as usize >= target.order()) {
            return Err(Error::NotHomomorphism("image index out of range".into()));
        }
        let h = Homomorphism {
            source,
            target,
            map,
        };
        h.verify()?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(source: Group, target: Group, map: Vec<u32>) -> Self {
        debug_assert_eq!(map.len(), source.order());
        Homomorphism {
            source,
            target,
            map,
        }
    }

    /// Extends an assignment of images to the source generators.
    pub fn from_generator_images(source: &Group, target: &Group, images: &[usize]) -> Result<Self> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return Err(Error::NotHomomorphism(format!(
                "{} generator images given for {} generators",
                images.len(),
                gens.len()
            )));
        }
        let map = extend_on_generators(source, target, gens, images).ok_or_else(|| {
            Error::NotHomomorphism("generator images do not define a homomorphism".into())
        })?;
        Ok(Homomorphism::new_unchecked(
            source.clone(),
            target.clone(),
            map,
        ))
    }

    pub fn identity(g: &Group) -> Self {
        Homomorphism::new_unchecked(g.clone(), g.clone(), (0..g.order() as u32).collect())
    }

    pub fn verify(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if self.map[0] != 0 {
            return Err(Error::NotHomomorphism(
                "identity not mapped to identity".into(),
            ));
        }
        for x in 0..s.order() {
            for &g in s.generators() {
                let lhs = self.map[s.mul(x, g)] as usize;
                let rhs = t.mul(self.map[x] as usize, self.map[g] as usize);
                if lhs != rhs {
                    return Err(Error::NotHomomorphism(format!(
                        "image of {x}·{g} is {lhs}, expected {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.map
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        if !self.target.ptr_eq(&next.source) && !self.target.same_model(&next.source) {
            return Err(Error::Precondition(
                "composition of mismatched groups".into(),
            ));
        }
        let map = self.map.iter().map(|&y| next.map[y as usize]).collect();
        Ok(Homomorphism::new_unchecked(
            self.source.clone(),
            next.target.clone(),
            map,
        ))
    }

    pub fn kernel(&self) -> Subgroup {
        let mut b = ClosureBuilder::new(&self.source);
        for (x, &y) in self.map.iter().enumerate() {
            if y == 0 {
                b.add(x);
            }
        }
        b.finish(Some(true))
    }

    pub fn image(&self) -> Subgroup {
        let mut b = ClosureBuilder::new(&self.target);
        for &g in self.source.generators() {
            b.add(self.map[g] as usize);
        }
        b.finish(None)
    }

    /// Preimage of a subgroup of the target.
    pub fn preimage(&self, h: &Subgroup) -> Subgroup {
        let mut b = ClosureBuilder::new(&self.source);
        for (x, &y) in self.map.iter().enumerate() {
            if h.contains(y as usize) {
                b.add(x);
            }
        }
        b.finish(if h.is_normal() { Some(true) } else { None })
    }

    /// Image of a subgroup of the source.
    pub fn image_of(&self, h: &Subgroup) -> Subgroup {
        let mut b = ClosureBuilder::new(&self.target);
        for &g in h.generators() {
            b.add(self.map[g] as usize);
        }
        b.finish(None)
    }

    pub fn is_injective(&self) -> bool {
        self.map.iter().filter(|&&y| y == 0).count() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Homomorphism")
            .field("source_order", &self.source.order())
            .field("target_order", &self.target.order())
            .finish()
    }
}

/// Defines `φ` on all of `<gens>` by `φ(x·g_i) = φ(x)·h_i` along a
/// breadth-first spanning tree, checking every edge. Returns `None` on a
/// conflict. Elements outside `<gens>` map to `u32::MAX`.
pub(crate) fn extend_on_generators(
    source: &Group,
    target: &Group,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<u32>> {
    const UNSET: u32 = u32::MAX;
    let mut map = vec![UNSET; source.order()];
    map[0] = 0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let fx = map[x] as usize;
        for (&g, &h) in gens.iter().zip(images) {
            let y = source.mul(x, g);
            let fy = target.mul(fx, h) as u32;
            if map[y] == UNSET {
                map[y] = fy;
                queue.push(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    Some(map)
}
