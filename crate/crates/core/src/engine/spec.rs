//! Group specifications and their line-oriented text format.
//!
//! ```text
//! kind: abelian
//! divisors: 3,3
//!
//! kind: permutation
//! degree: 5
//! gen: (1 2 3 4 5)
//! gen: (3 4 5)
//!
//! kind: cayley
//! order: 2
//! 0 1
//! 1 0
//! ```
//!
//! Composite kinds refer to other spec files: `kind: product` with one
//! `factor: <path>` per line, `kind: tuple-subgroup` with `component: <path>`
//! lines and `gen: i,j,...` index tuples, and `kind: quotient` with
//! `parent: <path>` and `normal: i` lines. Blank lines and `#` comments are
//! ignored.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::group::{Arena, Group, Law};
use super::hom::Homomorphism;
use super::subgroup::{normal_closure, quotient};
use crate::{Error, Limits, Result};

/// Cayley tables up to this order get a complete associativity check.
pub const FULL_ASSOCIATIVITY_LIMIT: usize = 4096;
/// Random triples checked above [`FULL_ASSOCIATIVITY_LIMIT`].
pub const SAMPLED_TRIPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    /// `⊕ Z/d_i`; an empty list is the trivial group.
    Abelian {
        divisors: Vec<u32>,
    },
    /// Generators as 0-based image arrays on `0..degree`.
    Permutation {
        degree: usize,
        generators: Vec<Vec<u32>>,
    },
    /// Full multiplication table on `0..n`.
    Cayley {
        table: Vec<Vec<u32>>,
    },
    Product(Vec<GroupSpec>),
    /// Subgroup of a direct product generated by explicit index tuples.
    TupleSubgroup {
        components: Vec<GroupSpec>,
        generators: Vec<Vec<u32>>,
    },
    /// Quotient by the normal closure of the listed parent indices.
    Quotient {
        parent: Box<GroupSpec>,
        normal_generators: Vec<usize>,
    },
}

impl GroupSpec {
    pub fn abelian(divisors: &[u32]) -> Self {
        GroupSpec::Abelian {
            divisors: divisors.to_vec(),
        }
    }

    /// Permutation spec from cycle strings such as `"(1 2 3)(4 5)"`.
    pub fn permutation(degree: usize, cycles: &[&str]) -> Result<Self> {
        let generators = cycles
            .iter()
            .map(|c| parse_cycles(c, degree))
            .collect::<Result<_>>()?;
        let spec = GroupSpec::Permutation { degree, generators };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the spec's own invariants (not group axioms of Cayley tables,
    /// which are checked on load).
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Abelian { divisors } => {
                if let Some(d) = divisors.iter().find(|&&d| d < 2) {
                    return Err(Error::spec(format!("abelian divisor {d} is less than 2")));
                }
            }
            GroupSpec::Permutation { degree, generators } => {
                if *degree == 0 {
                    return Err(Error::spec("permutation degree must be positive"));
                }
                for g in generators {
                    if g.len() != *degree {
                        return Err(Error::spec("generator length differs from degree"));
                    }
                    let mut seen = vec![false; *degree];
                    for &v in g {
                        let v = v as usize;
                        if v >= *degree || seen[v] {
                            return Err(Error::spec("generator is not a bijection"));
                        }
                        seen[v] = true;
                    }
                }
            }
            GroupSpec::Cayley { table } => {
                let n = table.len();
                if n == 0 {
                    return Err(Error::spec("empty Cayley table"));
                }
                for row in table {
                    if row.len() != n {
                        return Err(Error::spec("Cayley table is not square"));
                    }
                    if row.iter().any(|&v| v as usize >= n) {
                        return Err(Error::spec("Cayley table entry out of range"));
                    }
                }
            }
            GroupSpec::Product(factors) => {
                if factors.is_empty() {
                    return Err(Error::spec("product needs at least one factor"));
                }
                factors.iter().try_for_each(GroupSpec::validate)?;
            }
            GroupSpec::TupleSubgroup {
                components,
                generators,
            } => {
                if components.is_empty() {
                    return Err(Error::spec("tuple subgroup needs components"));
                }
                components.iter().try_for_each(GroupSpec::validate)?;
                if generators.iter().any(|g| g.len() != components.len()) {
                    return Err(Error::spec("generator tuple has the wrong length"));
                }
            }
            GroupSpec::Quotient { parent, .. } => parent.validate()?,
        }
        Ok(())
    }

    /// Parses a self-contained spec (no file references).
    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse(text, &mut |p| {
            Err(Error::spec(format!(
                "cannot resolve reference `{p}` without a base path"
            )))
        })
    }

    /// Parses a spec file, resolving references relative to its directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &mut |rel| Self::from_path(dir.join(rel)))
    }

    /// Parses `text`, calling `resolve` for every referenced spec path.
    pub fn parse(text: &str, resolve: &mut dyn FnMut(&str) -> Result<GroupSpec>) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        let mut kind = None;
        let mut fields: Vec<(&str, &str)> = Vec::new();
        let mut rows: Vec<&str> = Vec::new();
        for line in &lines {
            match line.split_once(':') {
                Some((k, v)) => {
                    let (k, v) = (k.trim(), v.trim());
                    if k == "kind" {
                        kind = Some(v);
                    } else {
                        fields.push((k, v));
                    }
                }
                None => rows.push(line),
            }
        }
        let kind = kind.ok_or_else(|| Error::spec("missing `kind:` line"))?;
        let field = |name: &str| fields.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let all = |name: &str| {
            fields
                .iter()
                .filter(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .collect::<Vec<_>>()
        };
        let known: &[&str] = match kind {
            "abelian" => &["divisors", "name"],
            "permutation" => &["degree", "gen", "name"],
            "cayley" => &["order", "name"],
            "product" => &["factor", "name"],
            "tuple-subgroup" => &["component", "gen", "name"],
            "quotient" => &["parent", "normal", "name"],
            other => return Err(Error::spec(format!("unknown kind `{other}`"))),
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !known.contains(k)) {
            return Err(Error::spec(format!(
                "unexpected field `{k}` for kind {kind}"
            )));
        }
        if kind != "cayley" && !rows.is_empty() {
            return Err(Error::spec(format!("unexpected line `{}`", rows[0])));
        }
        let spec = match kind {
            "abelian" => {
                let divisors = field("divisors")
                    .map(parse_list)
                    .transpose()?
                    .unwrap_or_default();
                GroupSpec::Abelian { divisors }
            }
            "permutation" => {
                let degree: usize = field("degree")
                    .ok_or_else(|| Error::spec("missing `degree:`"))?
                    .parse()
                    .map_err(|_| Error::spec("degree is not an integer"))?;
                let generators = all("gen")
                    .into_iter()
                    .map(|c| parse_cycles(c, degree))
                    .collect::<Result<_>>()?;
                GroupSpec::Permutation { degree, generators }
            }
            "cayley" => {
                let n: usize = field("order")
                    .ok_or_else(|| Error::spec("missing `order:`"))?
                    .parse()
                    .map_err(|_| Error::spec("order is not an integer"))?;
                if rows.len() != n {
                    return Err(Error::spec(format!(
                        "expected {n} table rows, found {}",
                        rows.len()
                    )));
                }
                let table = rows
                    .iter()
                    .map(|r| {
                        r.split_whitespace()
                            .map(|v| {
                                v.parse::<u32>()
                                    .map_err(|_| Error::spec(format!("bad table entry `{v}`")))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                GroupSpec::Cayley { table }
            }
            "product" => GroupSpec::Product(
                all("factor")
                    .into_iter()
                    .map(&mut *resolve)
                    .collect::<Result<_>>()?,
            ),
            "tuple-subgroup" => {
                let components = all("component")
                    .into_iter()
                    .map(&mut *resolve)
                    .collect::<Result<_>>()?;
                let generators = all("gen")
                    .into_iter()
                    .map(parse_list)
                    .collect::<Result<_>>()?;
                GroupSpec::TupleSubgroup {
                    components,
                    generators,
                }
            }
            "quotient" => {
                let parent =
                    resolve(field("parent").ok_or_else(|| Error::spec("missing `parent:`"))?)?;
                let normal_generators = all("normal")
                    .into_iter()
                    .map(|v| {
                        v.parse::<usize>()
                            .map_err(|_| Error::spec(format!("bad index `{v}`")))
                    })
                    .collect::<Result<_>>()?;
                GroupSpec::Quotient {
                    parent: Box::new(parent),
                    normal_generators,
                }
            }
            _ => unreachable!(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::spec(format!("bad integer `{t}`")))
        })
        .collect()
}

/// Parses cycle notation on `1..=degree` into a 0-based image array.
fn parse_cycles(s: &str, degree: usize) -> Result<Vec<u32>> {
    let mut image: Vec<u32> = (0..degree as u32).collect();
    let mut seen = vec![false; degree];
    let s = s.trim();
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::spec(format!("expected `(` in `{s}`")))?;
        let close = open
            .find(')')
            .ok_or_else(|| Error::spec(format!("unclosed cycle in `{s}`")))?;
        let points = open[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t.parse::<usize>() {
                Ok(p) if (1..=degree).contains(&p) => Ok(p - 1),
                _ => Err(Error::spec(format!("bad point `{t}` for degree {degree}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        for &p in &points {
            if seen[p] {
                return Err(Error::spec(format!("point {} repeated in `{s}`", p + 1)));
            }
            seen[p] = true;
        }
        for (i, &p) in points.iter().enumerate() {
            image[p] = points[(i + 1) % points.len()] as u32;
        }
        rest = open[close + 1..].trim_start();
    }
    Ok(image)
}

/// Enumerates the group described by `spec`.
///
/// Abelian specs list elements in lexicographic digit order; permutation and
/// Cayley specs are closed breadth-first from their generators in input order.
pub fn load_group(spec: &GroupSpec, limits: &Limits) -> Result<Group> {
    spec.validate()?;
    match spec {
        GroupSpec::Abelian { divisors } => abelian_group(divisors, limits),
        GroupSpec::Permutation { degree, generators } => {
            Group::closure(Law::Permutation, *degree, generators, limits)
        }
        GroupSpec::Cayley { table } => cayley_group(table, limits),
        GroupSpec::Product(factors) => {
            let groups = factors
                .iter()
                .map(|f| load_group(f, limits))
                .collect::<Result<Vec<_>>>()?;
            direct_product_all(&groups, limits)
        }
        GroupSpec::TupleSubgroup {
            components,
            generators,
        } => {
            let groups = components
                .iter()
                .map(|f| load_group(f, limits))
                .collect::<Result<Vec<_>>>()?;
            for g in generators {
                if g.iter().zip(&groups).any(|(&i, c)| i as usize >= c.order()) {
                    return Err(Error::spec("tuple generator index out of range"));
                }
            }
            let width = groups.len();
            Group::closure(Law::Tuple { components: groups }, width, generators, limits)
        }
        GroupSpec::Quotient {
            parent,
            normal_generators,
        } => {
            let g = load_group(parent, limits)?;
            if normal_generators.iter().any(|&i| i >= g.order()) {
                return Err(Error::spec("normal generator index out of range"));
            }
            let n = normal_closure(&g, normal_generators);
            Ok(quotient(&g, &n)?.0)
        }
    }
}

/// `⊕ Z/d_i` in lexicographic order, generated by the unit vectors.
pub(crate) fn abelian_group(divisors: &[u32], limits: &Limits) -> Result<Group> {
    let moduli: Vec<u32> = if divisors.is_empty() {
        vec![1]
    } else {
        divisors.to_vec()
    };
    let order: u128 = moduli.iter().map(|&m| m as u128).product();
    limits.check(order)?;
    let width = moduli.len();
    let mut arena = Arena::with_capacity(
        Law::Abelian {
            moduli: moduli.clone(),
        },
        width,
        order as usize,
    );
    let mut digits = vec![0u32; width];
    for _ in 0..order {
        arena.push_unchecked(&digits);
        odometer(&mut digits, &moduli);
    }
    let gens = (0..width)
        .filter(|&i| moduli[i] > 1)
        .map(|i| {
            let mut e = vec![0u32; width];
            e[i] = 1;
            arena.push(&e).0
        })
        .collect();
    Ok(arena.finish(gens))
}

/// Increments a little-endian-last mixed-radix counter (last digit fastest).
pub(crate) fn odometer(digits: &mut [u32], radices: &[u32]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return;
        }
        digits[i] = 0;
    }
}

fn cayley_group(table: &[Vec<u32>], limits: &Limits) -> Result<Group> {
    let n = table.len();
    limits.check(n as u128)?;
    for row in table {
        let mut seen = vec![false; n];
        for &v in row {
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::spec("Cayley table is not a Latin square (row)"));
            }
        }
    }
    for c in 0..n {
        let mut seen = vec![false; n];
        for row in table {
            if std::mem::replace(&mut seen[row[c] as usize], true) {
                return Err(Error::spec("Cayley table is not a Latin square (column)"));
            }
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
        .ok_or_else(|| Error::spec("Cayley table has no identity row/column"))?;
    let op = |a: usize, b: usize| table[a][b] as usize;

    // Greedy generators in index order.
    let mut inside = vec![false; n];
    inside[identity] = true;
    let mut members = vec![identity];
    let mut gens = Vec::new();
    for x in 0..n {
        if inside[x] {
            continue;
        }
        gens.push(x);
        let mut head = 0;
        members.clear();
        members.extend((0..n).filter(|&y| inside[y]));
        while head < members.len() {
            let m = members[head];
            for &g in &gens {
                let y = op(m, g);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
            head += 1;
        }
    }

    if n <= FULL_ASSOCIATIVITY_LIMIT {
        // Light's test: the elements `a` with (x·a)·y = x·(a·y) for all x, y
        // form a submagma, so checking a generating set is complete.
        for &a in &gens {
            for x in 0..n {
                let xa = op(x, a);
                for y in 0..n {
                    if op(xa, y) != op(x, op(a, y)) {
                        return Err(Error::spec(format!(
                            "Cayley table is not associative at ({x},{a},{y})"
                        )));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..SAMPLED_TRIPLES {
            let (x, y, z) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            if op(op(x, y), z) != op(x, op(y, z)) {
                return Err(Error::spec(format!(
                    "Cayley table is not associative at ({x},{y},{z})"
                )));
            }
        }
    }

    let flat: Vec<u32> = table.iter().flatten().copied().collect();
    let law = Law::Table {
        order: n,
        identity: identity as u32,
        table: flat,
    };
    let gen_codes: Vec<Vec<u32>> = gens.iter().map(|&g| vec![g as u32]).collect();
    Group::closure(law, 1, &gen_codes, limits)
}

/// `a × b` with lexicographic element order (index of `a` major).
pub fn direct_product(a: &Group, b: &Group, limits: &Limits) -> Result<Group> {
    direct_product_all(&[a.clone(), b.clone()], limits)
}

/// Direct product of several groups.
pub fn direct_product_all(factors: &[Group], limits: &Limits) -> Result<Group> {
    if factors.is_empty() {
        return abelian_group(&[], limits);
    }
    let order: u128 = factors.iter().map(|g| g.order() as u128).product();
    limits.check(order)?;
    let width = factors.len();
    let radices: Vec<u32> = factors.iter().map(|g| g.order() as u32).collect();
    let mut arena = Arena::with_capacity(
        Law::Tuple {
            components: factors.to_vec(),
        },
        width,
        order as usize,
    );
    let mut digits = vec![0u32; width];
    for _ in 0..order {
        arena.push_unchecked(&digits);
        odometer(&mut digits, &radices);
    }
    let mut gens = Vec::new();
    for (k, f) in factors.iter().enumerate() {
        for &g in f.generators() {
            let mut t = vec![0u32; width];
            t[k] = g as u32;
            gens.push(arena.push(&t).0);
        }
    }
    Ok(arena.finish(gens))
}

/// `g^k` as a direct product.
pub fn direct_power(g: &Group, k: usize, limits: &Limits) -> Result<Group> {
    direct_product_all(&vec![g.clone(); k], limits)
}

/// Projection of a tuple-model group onto coordinate `k`.
pub fn projection(product: &Group, k: usize) -> Result<Homomorphism> {
    let comps = product
        .components()
        .ok_or_else(|| Error::Precondition("not a tuple-model group".into()))?;
    let target = comps
        .get(k)
        .ok_or_else(|| Error::Precondition("coordinate out of range".into()))?
        .clone();
    let map = (0..product.order()).map(|x| product.code(x)[k]).collect();
    Homomorphism::new(product.clone(), target, map)
}

/// Injection of factor `k` into a full direct product.
pub fn injection(product: &Group, k: usize) -> Result<Homomorphism> {
    let comps = product
        .components()
        .ok_or_else(|| Error::Precondition("not a tuple-model group".into()))?;
    let source = comps
        .get(k)
        .ok_or_else(|| Error::Precondition("coordinate out of range".into()))?
        .clone();
    let mut tuple = vec![0u32; comps.len()];
    let map = (0..source.order())
        .map(|x| {
            tuple[k] = x as u32;
            product.index_of(&tuple).map(|i| i as u32).ok_or_else(|| {
                Error::Precondition("factor does not embed in this tuple group".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Homomorphism::new(source, product.clone(), map)
}
