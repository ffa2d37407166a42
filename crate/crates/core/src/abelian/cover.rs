//! Covers (representation groups): validated central extensions
//! `1 → M → G* → G → 1` with `M` central, `M ≤ [G*, G*]` and `M` the Schur
//! multiplier of `G`.

use std::path::Path;

use serde::Serialize;

use super::types::{recognize_abelian, schur_multiplier, AbelianType};
use crate::engine::group::{gcd, Arena, CocycleLaw, Group, Law};
use crate::engine::hom::Homomorphism;
use crate::engine::iso::find_isomorphism;
use crate::engine::spec::{abelian_group, load_group, odometer, GroupSpec};
use crate::engine::subgroup::{derived_subgroup, Subgroup};
use crate::{Error, Limits, Result};

/// Where a cover came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// The bilinear cocycle `Σ_{i<j} x_j·y_i`.
    CanonicalCocycle,
    /// The canonical cocycle plus diagonal terms `c_i·x_i·y_i`.
    Twisted { twist: Vec<u64> },
    /// Loaded from a cover file.
    UserSupplied { name: String },
    /// The warped Baer sum subquotient of `G* × G*`.
    Natural,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::CanonicalCocycle => "canonical-cocycle",
            Provenance::Twisted { .. } => "twisted",
            Provenance::UserSupplied { .. } => "user-supplied",
            Provenance::Natural => "natural",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cover {
    projection: Homomorphism,
    kernel: Subgroup,
    multiplier: AbelianType,
    provenance: Provenance,
    assumed_multiplier: bool,
}

impl Cover {
    /// Validates every cover axiom. For abelian bases the kernel must be the
    /// Schur multiplier; otherwise `assumed` is required and the kernel is
    /// checked against it.
    pub fn new(
        projection: Homomorphism,
        provenance: Provenance,
        assumed: Option<AbelianType>,
    ) -> Result<Self> {
        projection
            .verify()
            .map_err(|e| Error::InvalidCover(format!("projection: {e}")))?;
        if !projection.is_surjective() {
            return Err(Error::InvalidCover("projection is not surjective".into()));
        }
        let kernel = projection.kernel();
        if !kernel.is_central() {
            return Err(Error::InvalidCover("kernel is not central".into()));
        }
        let derived = derived_subgroup(projection.source());
        if !kernel.is_subset_of(&derived) {
            return Err(Error::InvalidCover(
                "kernel is not contained in the commutator subgroup".into(),
            ));
        }
        let kernel_type = recognize_abelian(&kernel.as_group())?;
        let base = projection.target();
        let (expected, assumed_multiplier) = if base.is_abelian() {
            let m = schur_multiplier(&recognize_abelian(base)?);
            if let Some(a) = &assumed {
                if *a != m {
                    return Err(Error::InvalidCover(format!(
                        "assumed multiplier {a} differs from the Schur multiplier {m} of the abelian base"
                    )));
                }
            }
            (m, false)
        } else {
            let a = assumed.ok_or_else(|| {
                Error::MalformedCover("non-abelian base requires `assumed_multiplier:`".into())
            })?;
            (a, true)
        };
        if kernel_type != expected {
            return Err(Error::InvalidCover(format!(
                "kernel has type {kernel_type}, expected multiplier {expected}"
            )));
        }
        Ok(Cover {
            projection,
            kernel,
            multiplier: kernel_type,
            provenance,
            assumed_multiplier,
        })
    }

    /// `G*`.
    pub fn total(&self) -> &Group {
        self.projection.source()
    }

    /// `G`.
    pub fn base(&self) -> &Group {
        self.projection.target()
    }

    pub fn projection(&self) -> &Homomorphism {
        &self.projection
    }

    /// `M`, as a subgroup of the total group.
    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn multiplier(&self) -> &AbelianType {
        &self.multiplier
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// True when the multiplier order came from user input rather than the
    /// abelian formula.
    pub fn multiplier_is_assumed(&self) -> bool {
        self.assumed_multiplier
    }

    /// Image of `Z(G*)` in `G`.
    pub fn centre_image(&self) -> Subgroup {
        self.projection
            .image_of(&crate::engine::subgroup::centre(self.total()))
    }

    /// The same cover with its projection composed with an isomorphism of
    /// the base.
    pub fn retarget(&self, iso: &Homomorphism) -> Result<Cover> {
        if !iso.is_isomorphism() {
            return Err(Error::Precondition(
                "retargeting needs an isomorphism".into(),
            ));
        }
        let projection = self.projection.then(iso)?;
        let kernel = projection.kernel();
        Ok(Cover {
            projection,
            kernel,
            multiplier: self.multiplier.clone(),
            provenance: self.provenance.clone(),
            assumed_multiplier: self.assumed_multiplier,
        })
    }
}

/// The cocycle cover of `a` (canonical when `twist` is `None`).
pub fn build_cocycle_cover(
    a: &AbelianType,
    twist: Option<&[u64]>,
    limits: &Limits,
) -> Result<Cover> {
    let moduli = a.divisors_u32()?;
    let base = abelian_group(&moduli, limits)?;
    cocycle_cover_over(&base, &moduli, twist, limits)
}

/// A cocycle cover whose base is `g` itself. Digit-vector models are used
/// directly; other abelian models go through an explicit isomorphism.
pub fn canonical_cover_of(g: &Group, limits: &Limits) -> Result<Cover> {
    if let Some(moduli) = g.abelian_moduli() {
        let moduli = moduli.to_vec();
        return cocycle_cover_over(g, &moduli, None, limits);
    }
    let t = recognize_abelian(g)?;
    let cover = build_cocycle_cover(&t, None, limits)?;
    let iso = find_isomorphism(cover.base(), g, limits)?.ok_or_else(|| {
        Error::Precondition("abelian model is not isomorphic to its invariant type".into())
    })?;
    cover.retarget(&iso)
}

fn cocycle_cover_over(
    base: &Group,
    moduli: &[u32],
    twist: Option<&[u64]>,
    limits: &Limits,
) -> Result<Cover> {
    let k = moduli.len();
    let mut slots = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let m = gcd(moduli[i] as u64, moduli[j] as u64) as u32;
            if m > 1 {
                slots.push((i, j, m));
            }
        }
    }
    let mut twist_terms = Vec::new();
    if let Some(c) = twist {
        if c.len() != k {
            return Err(Error::InvalidTwist(format!(
                "{} coefficients for {k} divisors",
                c.len()
            )));
        }
        for (i, &ci) in c.iter().enumerate() {
            if ci >= moduli[i] as u64 {
                return Err(Error::InvalidTwist(format!(
                    "coefficient {ci} is not below {}",
                    moduli[i]
                )));
            }
            if ci == 0 {
                continue;
            }
            // first multiplier slot pairing i with the smallest other index
            let slot = slots
                .iter()
                .position(|&(a, b, _)| a == i || b == i)
                .ok_or_else(|| {
                    Error::InvalidTwist(format!("no multiplier slot for coordinate {i}"))
                })?;
            twist_terms.push((i, ci as u32, slot));
        }
    }
    let law = CocycleLaw {
        moduli: if k == 0 { vec![1] } else { moduli.to_vec() },
        slots,
        twist: twist_terms,
    };
    let radices: Vec<u32> = law.code_radices().iter().map(|&r| r as u32).collect();
    let order: u128 = radices.iter().map(|&r| r as u128).product();
    limits.check(order)?;
    let width = radices.len();
    let kx = law.moduli.len();
    let mut arena = Arena::with_capacity(Law::Cocycle(law), width, order as usize);
    let mut digits = vec![0u32; width];
    for _ in 0..order {
        arena.push_unchecked(&digits);
        odometer(&mut digits, &radices);
    }
    let gens: Vec<usize> = (0..kx)
        .filter(|&i| radices[i] > 1)
        .map(|i| {
            let mut e = vec![0u32; width];
            e[i] = 1;
            arena.push(&e).0
        })
        .collect();
    let total = Group::from_arena(arena, gens);
    let map = (0..total.order())
        .map(|x| {
            base.index_of(&total.code(x)[..kx])
                .map(|y| y as u32)
                .ok_or_else(|| {
                    Error::Precondition("base is not the digit-vector model of these moduli".into())
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let projection = Homomorphism::new(total, base.clone(), map)?;
    let provenance = match twist {
        Some(c) if c.iter().any(|&x| x != 0) => Provenance::Twisted { twist: c.to_vec() },
        _ => Provenance::CanonicalCocycle,
    };
    Cover::new(projection, provenance, None).map_err(|e| match (e, twist.is_some()) {
        (Error::InvalidCover(msg), true) => Error::InvalidTwist(msg),
        (e, _) => e,
    })
}

/// A cover file: total and base group specs plus generator images.
///
/// ```text
/// name: binary icosahedral
/// assumed_multiplier: 2
/// pi: 0 -> 0
/// pi: 1 -> 1
/// [total]
/// kind: permutation
/// ...
/// [base]
/// kind: permutation
/// ...
/// ```
///
/// `pi: i -> j` sends generator `i` of the total group to generator `j` of
/// the base; `-` as the right-hand side sends it to the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSpec {
    pub name: Option<String>,
    pub total: GroupSpec,
    pub base: GroupSpec,
    pub images: Vec<(usize, Option<usize>)>,
    pub assumed_multiplier: Option<AbelianType>,
}

impl CoverSpec {
    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse(text, &mut |p| {
            Err(Error::MalformedCover(format!(
                "cannot resolve `{p}` without a base path"
            )))
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &mut |rel| GroupSpec::from_path(dir.join(rel)))
    }

    pub fn parse(text: &str, resolve: &mut dyn FnMut(&str) -> Result<GroupSpec>) -> Result<Self> {
        let mut section: Option<&str> = None;
        let mut total = String::new();
        let mut base = String::new();
        let mut name = None;
        let mut images = Vec::new();
        let mut assumed = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = match &line[1..line.len() - 1] {
                    "total" => Some("total"),
                    "base" => Some("base"),
                    other => {
                        return Err(Error::MalformedCover(format!("unknown section [{other}]")))
                    }
                };
                continue;
            }
            match section {
                Some("total") => {
                    total.push_str(line);
                    total.push('\n');
                }
                Some(_) => {
                    base.push_str(line);
                    base.push('\n');
                }
                None => {
                    let (k, v) = line.split_once(':').ok_or_else(|| {
                        Error::MalformedCover(format!("unexpected line `{line}`"))
                    })?;
                    let v = v.trim();
                    match k.trim() {
                        "name" => name = Some(v.to_string()),
                        "pi" => images.push(parse_image(v)?),
                        "assumed_multiplier" => {
                            let ds = v
                                .split(',')
                                .map(str::trim)
                                .filter(|s| !s.is_empty())
                                .map(|d| {
                                    d.parse::<u64>().map_err(|_| {
                                        Error::MalformedCover(format!("bad divisor `{d}`"))
                                    })
                                })
                                .collect::<Result<Vec<_>>>()?;
                            assumed = Some(AbelianType::from_divisors(&ds)?);
                        }
                        other => {
                            return Err(Error::MalformedCover(format!("unknown field `{other}`")))
                        }
                    }
                }
            }
        }
        if total.is_empty() || base.is_empty() {
            return Err(Error::MalformedCover(
                "both [total] and [base] sections are required".into(),
            ));
        }
        let total = GroupSpec::parse(&total, resolve)
            .map_err(|e| Error::MalformedCover(format!("[total]: {e}")))?;
        let base = GroupSpec::parse(&base, resolve)
            .map_err(|e| Error::MalformedCover(format!("[base]: {e}")))?;
        Ok(CoverSpec {
            name,
            total,
            base,
            images,
            assumed_multiplier: assumed,
        })
    }
}

fn parse_image(v: &str) -> Result<(usize, Option<usize>)> {
    let bad = || Error::MalformedCover(format!("bad generator image `{v}`"));
    let (a, b) = v.split_once("->").ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim();
    let b = if b == "-" {
        None
    } else {
        Some(b.parse().map_err(|_| bad())?)
    };
    Ok((a, b))
}

/// Loads and validates a user-supplied cover.
pub fn load_cover(spec: &CoverSpec, limits: &Limits) -> Result<Cover> {
    let total = load_group(&spec.total, limits)?;
    let base = load_group(&spec.base, limits)?;
    let tg = total.generators();
    let bg = base.generators();
    let mut images = vec![None; tg.len()];
    for &(i, j) in &spec.images {
        if i >= tg.len() {
            return Err(Error::MalformedCover(format!(
                "total group has no generator {i}"
            )));
        }
        let y = match j {
            None => 0,
            Some(j) => *bg
                .get(j)
                .ok_or_else(|| Error::MalformedCover(format!("base group has no generator {j}")))?,
        };
        if images[i].replace(y).is_some() {
            return Err(Error::MalformedCover(format!("generator {i} mapped twice")));
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, y)| y.ok_or_else(|| Error::MalformedCover(format!("no image for generator {i}"))))
        .collect::<Result<Vec<_>>>()?;
    let projection = Homomorphism::from_generator_images(&total, &base, &images)
        .map_err(|e| Error::InvalidCover(e.to_string()))?;
    let name = spec.name.clone().unwrap_or_else(|| "unnamed".into());
    Cover::new(
        projection,
        Provenance::UserSupplied { name },
        spec.assumed_multiplier.clone(),
    )
}
