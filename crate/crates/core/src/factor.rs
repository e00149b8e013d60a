//! Factor action providers: the capability bundle each group contributes to
//! a graph product.
//!
//! A [`FactorKind`] bundles element arithmetic, a symmetric generating list,
//! an orbit catalogue, the action on points of those orbits, a moved-point
//! oracle for nontrivial elements, and (when the group has one) a
//! controlled-diameter oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, Graph};
use crate::grigorchuk::{self, GrigorchukElement};
use crate::houghton::{self, HoughtonElement, StarVertex};
use crate::lamplighter::{self, CosetPoint, LamplighterElement, WreathParams};

/// The groups this workbench can place in a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorKind {
    Grigorchuk,
    /// The infinite cyclic group, acting on the line and on finite cycles.
    Integers,
    /// `Z/mZ` acting on its cycle.
    Cyclic { m: u64 },
    /// The Houghton group on `rays` rays acting on the star.
    Houghton { rays: u8 },
    /// `(Z/pZ) ≀ Z^d` acting on the coset spaces `X_m`.
    Lamplighter { p: u64, d: u8 },
}

/// An element of one of the factor groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorElement {
    Grig(GrigorchukElement),
    Int(i64),
    Mod(u64),
    Hough(HoughtonElement),
    Lamp(LamplighterElement),
}

/// Handle to one orbit of a factor's defining catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitHandle {
    /// Level `n` of the binary tree.
    Level(u32),
    /// The integer line.
    Line,
    /// A cycle of length `m`.
    Cycle(u64),
    /// The `r`-ray star.
    Star(u8),
    /// The lamplighter coset space `X_m`.
    Coset(u64),
}

/// A point of some orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointValue {
    Tree { bits: u32, len: u32 },
    Int(i64),
    Mod(u64),
    Star(StarVertex),
    Coset(CosetPoint),
}

impl PointValue {
    pub fn key(&self) -> String {
        match self {
            PointValue::Tree { bits, len } => grigorchuk::format_point(*bits, *len),
            PointValue::Int(z) => z.to_string(),
            PointValue::Mod(v) => v.to_string(),
            PointValue::Star(v) => v.key(),
            PointValue::Coset(c) => c.key(),
        }
    }
}

/// Output of the controlled-diameter oracle: a finite orbit, a point moved
/// by a definite fraction of the orbit diameter, and the constant.
#[derive(Debug, Clone)]
pub struct CdCertificate {
    pub orbit: OrbitHandle,
    pub point: PointValue,
    /// `diam(Γ(G, O)) <= constant · d(x, gx)`.
    pub constant: u32,
}

impl FactorKind {
    pub fn name(&self) -> String {
        match self {
            FactorKind::Grigorchuk => "grigorchuk".into(),
            FactorKind::Integers => "Z".into(),
            FactorKind::Cyclic { m } => format!("Z/{m}"),
            FactorKind::Houghton { rays } => format!("houghton{rays}"),
            FactorKind::Lamplighter { p, d } => format!("lamplighter-{p}-{d}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FactorKind::Cyclic { m } if *m < 2 => {
                Err(Error::InvalidArgument("cyclic factor needs m >= 2".into()))
            }
            FactorKind::Houghton { rays } if *rays < 2 => {
                Err(Error::InvalidArgument("Houghton factor needs r >= 2".into()))
            }
            FactorKind::Lamplighter { p, d } => WreathParams::new(*p, *d).map(|_| ()),
            _ => Ok(()),
        }
    }

    fn wreath(&self) -> WreathParams {
        match self {
            FactorKind::Lamplighter { p, d } => WreathParams { p: *p, d: *d },
            _ => panic!("not a lamplighter factor"),
        }
    }

    pub fn identity(&self) -> FactorElement {
        match self {
            FactorKind::Grigorchuk => FactorElement::Grig(GrigorchukElement::identity()),
            FactorKind::Integers => FactorElement::Int(0),
            FactorKind::Cyclic { .. } => FactorElement::Mod(0),
            FactorKind::Houghton { rays } => {
                FactorElement::Hough(HoughtonElement::identity(*rays))
            }
            FactorKind::Lamplighter { .. } => {
                FactorElement::Lamp(LamplighterElement::identity(self.wreath()))
            }
        }
    }

    pub fn is_identity(&self, g: &FactorElement) -> bool {
        match (self, g) {
            (FactorKind::Grigorchuk, FactorElement::Grig(w)) => w.is_trivial(),
            (FactorKind::Integers, FactorElement::Int(k)) => *k == 0,
            (FactorKind::Cyclic { m }, FactorElement::Mod(v)) => v % m == 0,
            (FactorKind::Houghton { .. }, FactorElement::Hough(h)) => h.is_identity(),
            (FactorKind::Lamplighter { .. }, FactorElement::Lamp(l)) => l.is_identity(),
            _ => panic!("element does not belong to factor {}", self.name()),
        }
    }

    /// `a` composed after `b`.
    pub fn compose(&self, a: &FactorElement, b: &FactorElement) -> FactorElement {
        match (self, a, b) {
            (FactorKind::Grigorchuk, FactorElement::Grig(a), FactorElement::Grig(b)) => {
                FactorElement::Grig(a.compose(b))
            }
            (FactorKind::Integers, FactorElement::Int(a), FactorElement::Int(b)) => {
                FactorElement::Int(a + b)
            }
            (FactorKind::Cyclic { m }, FactorElement::Mod(a), FactorElement::Mod(b)) => {
                FactorElement::Mod((a + b) % m)
            }
            (FactorKind::Houghton { .. }, FactorElement::Hough(a), FactorElement::Hough(b)) => {
                FactorElement::Hough(a.compose(b).expect("matching ray count"))
            }
            (FactorKind::Lamplighter { .. }, FactorElement::Lamp(a), FactorElement::Lamp(b)) => {
                FactorElement::Lamp(a.compose(b, self.wreath()))
            }
            _ => panic!("elements do not belong to factor {}", self.name()),
        }
    }

    pub fn invert(&self, g: &FactorElement) -> FactorElement {
        match (self, g) {
            (FactorKind::Grigorchuk, FactorElement::Grig(w)) => FactorElement::Grig(w.inverse()),
            (FactorKind::Integers, FactorElement::Int(k)) => FactorElement::Int(-k),
            (FactorKind::Cyclic { m }, FactorElement::Mod(v)) => {
                FactorElement::Mod((m - v % m) % m)
            }
            (FactorKind::Houghton { .. }, FactorElement::Hough(h)) => {
                FactorElement::Hough(h.inverse())
            }
            (FactorKind::Lamplighter { .. }, FactorElement::Lamp(l)) => {
                FactorElement::Lamp(l.inverse(self.wreath()))
            }
            _ => panic!("element does not belong to factor {}", self.name()),
        }
    }

    /// Canonical equality inside the factor.
    pub fn elements_equal(&self, a: &FactorElement, b: &FactorElement) -> bool {
        match (self, a, b) {
            (FactorKind::Grigorchuk, FactorElement::Grig(a), FactorElement::Grig(b)) => a.equal(b),
            _ => self.is_identity(&self.compose(a, &self.invert(b))),
        }
    }

    /// Symmetric generating list.
    pub fn generators(&self) -> Vec<FactorElement> {
        match self {
            FactorKind::Grigorchuk => ["a", "b", "c", "d"]
                .iter()
                .map(|w| FactorElement::Grig(GrigorchukElement::new(w).unwrap()))
                .collect(),
            FactorKind::Integers => vec![FactorElement::Int(1), FactorElement::Int(-1)],
            FactorKind::Cyclic { m } => {
                if *m == 2 {
                    vec![FactorElement::Mod(1)]
                } else {
                    vec![FactorElement::Mod(1), FactorElement::Mod(m - 1)]
                }
            }
            FactorKind::Houghton { rays } => houghton::standard_generators(*rays)
                .expect("validated ray count")
                .into_iter()
                .map(FactorElement::Hough)
                .collect(),
            FactorKind::Lamplighter { .. } => lamplighter::standard_generators(self.wreath())
                .into_iter()
                .map(FactorElement::Lamp)
                .collect(),
        }
    }

    /// Index of each generator's inverse within [`Self::generators`].
    pub fn generator_inverses(&self) -> Vec<usize> {
        let gens = self.generators();
        gens.iter()
            .map(|g| {
                let inv = self.invert(g);
                gens.iter()
                    .position(|h| self.elements_equal(h, &inv))
                    .expect("generating list is symmetric")
            })
            .collect()
    }

    /// Does the orbit handle belong to this factor's catalogue?
    pub fn orbit_valid(&self, orbit: &OrbitHandle) -> bool {
        matches!(
            (self, orbit),
            (FactorKind::Grigorchuk, OrbitHandle::Level(_))
                | (FactorKind::Integers, OrbitHandle::Line)
                | (FactorKind::Integers, OrbitHandle::Cycle(_))
                | (FactorKind::Houghton { .. }, OrbitHandle::Star(_))
                | (FactorKind::Lamplighter { .. }, OrbitHandle::Coset(_))
        ) || matches!((self, orbit), (FactorKind::Cyclic { m }, OrbitHandle::Cycle(c)) if c == m)
    }

    pub fn orbit_size(&self, orbit: &OrbitHandle) -> Option<usize> {
        match orbit {
            OrbitHandle::Level(n) => Some(1usize << n),
            OrbitHandle::Line | OrbitHandle::Star(_) => None,
            OrbitHandle::Cycle(m) => Some(*m as usize),
            OrbitHandle::Coset(m) => {
                let w = self.wreath();
                Some((w.p as u128 * (*m as u128).pow(w.d as u32)) as usize)
            }
        }
    }

    pub fn orbit_vertices(&self, orbit: &OrbitHandle) -> Option<Vec<PointValue>> {
        match orbit {
            OrbitHandle::Level(n) => {
                Some((0..1u32 << n).map(|bits| PointValue::Tree { bits, len: *n }).collect())
            }
            OrbitHandle::Line | OrbitHandle::Star(_) => None,
            OrbitHandle::Cycle(m) => Some((0..*m).map(PointValue::Mod).collect()),
            OrbitHandle::Coset(m) => {
                let g = lamplighter::build_coset_graph(self.wreath(), *m, usize::MAX)
                    .expect("valid modulus");
                Some(g.vertices().unwrap().into_iter().map(PointValue::Coset).collect())
            }
        }
    }

    pub fn point_in_orbit(&self, orbit: &OrbitHandle, point: &PointValue) -> bool {
        match (orbit, point) {
            (OrbitHandle::Level(n), PointValue::Tree { len, bits }) => {
                len == n && (*bits >> n) == 0
            }
            (OrbitHandle::Line, PointValue::Int(_)) => true,
            (OrbitHandle::Cycle(m), PointValue::Mod(v)) => v < m,
            (OrbitHandle::Star(r), PointValue::Star(v)) => match v {
                StarVertex::Origin => true,
                StarVertex::Ray { ray, pos } => *ray >= 1 && ray <= r && *pos >= 1,
            },
            (OrbitHandle::Coset(m), PointValue::Coset(c)) => {
                let w = self.wreath();
                c.modulus == *m
                    && c.lamp < w.p
                    && c.torus.len() == w.d as usize
                    && c.torus.iter().all(|t| t < m)
            }
            _ => false,
        }
    }

    /// Action of an element on a point of one of this factor's orbits.
    pub fn act(
        &self,
        orbit: &OrbitHandle,
        g: &FactorElement,
        point: &PointValue,
    ) -> Result<PointValue> {
        if !self.point_in_orbit(orbit, point) {
            return Err(Error::PointOutsideDomain {
                point: point.key(),
                context: format!("orbit {orbit:?} of {}", self.name()),
            });
        }
        match (self, g, orbit, point) {
            (FactorKind::Grigorchuk, FactorElement::Grig(w), OrbitHandle::Level(n), PointValue::Tree { bits, .. }) => {
                Ok(PointValue::Tree { bits: grigorchuk::act_bits(w.word(), *bits, *n), len: *n })
            }
            (FactorKind::Integers, FactorElement::Int(k), OrbitHandle::Line, PointValue::Int(z)) => {
                Ok(PointValue::Int(z + k))
            }
            (FactorKind::Integers, FactorElement::Int(k), OrbitHandle::Cycle(m), PointValue::Mod(v)) => {
                Ok(PointValue::Mod((*v as i64 + k).rem_euclid(*m as i64) as u64))
            }
            (FactorKind::Cyclic { m }, FactorElement::Mod(r), OrbitHandle::Cycle(_), PointValue::Mod(v)) => {
                Ok(PointValue::Mod((v + r) % m))
            }
            (FactorKind::Houghton { .. }, FactorElement::Hough(h), OrbitHandle::Star(_), PointValue::Star(v)) => {
                Ok(PointValue::Star(h.act(*v)))
            }
            (FactorKind::Lamplighter { .. }, FactorElement::Lamp(l), OrbitHandle::Coset(_), PointValue::Coset(c)) => {
                Ok(PointValue::Coset(lamplighter::coset_act(l, c, self.wreath())?))
            }
            _ => Err(Error::InvalidArgument(format!(
                "element/orbit mismatch for factor {}",
                self.name()
            ))),
        }
    }

    /// A point moved by a nontrivial element, together with the orbit it
    /// lives in. Deterministic: the first moved point in canonical order of
    /// the first orbit that works.
    pub fn moved_point(&self, g: &FactorElement) -> Result<(OrbitHandle, PointValue)> {
        if self.is_identity(g) {
            return Err(Error::TrivialElement);
        }
        match (self, g) {
            (FactorKind::Grigorchuk, FactorElement::Grig(w)) => {
                for n in 1..=grigorchuk::LEVEL_CAP {
                    // Lexicographic order of binary words.
                    let mut vertices: Vec<u32> = (0..1u32 << n).collect();
                    vertices.sort_by_key(|v| grigorchuk::format_point(*v, n));
                    for v in vertices {
                        if grigorchuk::act_bits(w.word(), v, n) != v {
                            return Ok((OrbitHandle::Level(n), PointValue::Tree { bits: v, len: n }));
                        }
                    }
                }
                Err(Error::CapExceeded {
                    cap: grigorchuk::LEVEL_CAP as usize,
                    context: "moved-point search over tree levels".into(),
                })
            }
            (FactorKind::Integers, FactorElement::Int(_)) => {
                Ok((OrbitHandle::Line, PointValue::Int(0)))
            }
            (FactorKind::Cyclic { m }, FactorElement::Mod(_)) => {
                Ok((OrbitHandle::Cycle(*m), PointValue::Mod(0)))
            }
            (FactorKind::Houghton { rays }, FactorElement::Hough(h)) => Ok((
                OrbitHandle::Star(*rays),
                PointValue::Star(h.moved_vertex().expect("nontrivial element")),
            )),
            (FactorKind::Lamplighter { .. }, FactorElement::Lamp(l)) => {
                let w = self.wreath();
                let m = if l.shift_norm() > 0 {
                    2 * l.shift_norm() as u64
                } else {
                    let far: i64 = l
                        .lamps()
                        .keys()
                        .map(|pos| pos.iter().map(|c| c.abs()).sum())
                        .max()
                        .unwrap_or(0);
                    (2 * far as u64 + 1).max(2)
                };
                let vertices = self.orbit_vertices(&OrbitHandle::Coset(m)).unwrap();
                for v in vertices {
                    let moved = self.act(&OrbitHandle::Coset(m), g, &v)?;
                    if moved != v {
                        return Ok((OrbitHandle::Coset(m), v));
                    }
                }
                let _ = w;
                Err(Error::InvalidArgument(
                    "nontrivial lamplighter element fixed all of X_m".into(),
                ))
            }
            _ => Err(Error::InvalidArgument(format!(
                "element does not belong to factor {}",
                self.name()
            ))),
        }
    }

    /// Controlled-diameter oracle, for the factors that have one.
    pub fn cd_oracle(&self, g: &FactorElement) -> Result<Option<CdCertificate>> {
        if self.is_identity(g) {
            return Err(Error::TrivialElement);
        }
        match (self, g) {
            (FactorKind::Grigorchuk, FactorElement::Grig(w)) => {
                let witness = grigorchuk::displacement_witness(w.word(), 12)?;
                let (bits, len) = grigorchuk::parse_point(&witness.vertex)?;
                Ok(Some(CdCertificate {
                    orbit: OrbitHandle::Level(witness.level),
                    point: PointValue::Tree { bits, len },
                    constant: 8,
                }))
            }
            (FactorKind::Integers, FactorElement::Int(k)) => Ok(Some(CdCertificate {
                orbit: OrbitHandle::Cycle(2 * k.unsigned_abs()),
                point: PointValue::Mod(0),
                constant: 1,
            })),
            (FactorKind::Cyclic { m }, FactorElement::Mod(_)) => Ok(Some(CdCertificate {
                orbit: OrbitHandle::Cycle(*m),
                point: PointValue::Mod(0),
                constant: (*m as u32 / 2).max(1),
            })),
            (FactorKind::Houghton { .. }, _) => Ok(None),
            (FactorKind::Lamplighter { .. }, FactorElement::Lamp(l)) => {
                let w = self.wreath();
                let witness = lamplighter::cd_witness(l, w)?;
                let (num, den) = lamplighter::frozen_ratio(w).ok_or_else(|| {
                    Error::MissingCapability {
                        factor: crate::word::FactorId(0),
                        capability: format!("frozen CD ratio for {}", self.name()),
                    }
                })?;
                Ok(Some(CdCertificate {
                    orbit: OrbitHandle::Coset(witness.m),
                    point: PointValue::Coset(witness.point),
                    constant: den.div_ceil(num),
                }))
            }
            _ => Err(Error::InvalidArgument(format!(
                "element does not belong to factor {}",
                self.name()
            ))),
        }
    }

    /// Finite orbits below `size_cap`, used when enumerating gluing pieces.
    pub fn finite_orbit_menu(&self, size_cap: usize) -> Vec<OrbitHandle> {
        match self {
            FactorKind::Grigorchuk => (1..=8u32)
                .filter(|n| (1usize << n) <= size_cap)
                .map(OrbitHandle::Level)
                .collect(),
            FactorKind::Integers => [2u64, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233]
                .into_iter()
                .filter(|m| *m as usize <= size_cap)
                .map(OrbitHandle::Cycle)
                .collect(),
            FactorKind::Cyclic { m } => {
                if *m as usize <= size_cap {
                    vec![OrbitHandle::Cycle(*m)]
                } else {
                    vec![]
                }
            }
            FactorKind::Houghton { .. } => vec![],
            FactorKind::Lamplighter { .. } => {
                let w = self.wreath();
                (2u64..)
                    .map(OrbitHandle::Coset)
                    .take_while(|h| {
                        if let OrbitHandle::Coset(m) = h {
                            (w.p as u128 * (*m as u128).pow(w.d as u32)) as usize <= size_cap
                        } else {
                            false
                        }
                    })
                    .collect()
            }
        }
    }

    /// The single defining faithful orbit when the factor has an infinite
    /// one.
    pub fn infinite_orbit(&self) -> Option<OrbitHandle> {
        match self {
            FactorKind::Integers => Some(OrbitHandle::Line),
            FactorKind::Houghton { rays } => Some(OrbitHandle::Star(*rays)),
            _ => None,
        }
    }
}

/// Schreier graph of one factor orbit.
#[derive(Debug, Clone)]
pub struct OrbitGraph {
    pub kind: FactorKind,
    pub orbit: OrbitHandle,
    pub factor_label: u32,
    generators: Vec<FactorElement>,
}

impl OrbitGraph {
    pub fn new(kind: FactorKind, orbit: OrbitHandle) -> Result<Self> {
        if !kind.orbit_valid(&orbit) {
            return Err(Error::InvalidArgument(format!(
                "orbit {orbit:?} not in the catalogue of {}",
                kind.name()
            )));
        }
        Ok(OrbitGraph { kind, orbit, factor_label: 0, generators: kind.generators() })
    }
}

impl Graph for OrbitGraph {
    type Point = PointValue;

    fn neighbors(&self, p: &PointValue) -> Vec<(EdgeLabel, PointValue)> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                (
                    EdgeLabel { factor: self.factor_label, generator: i as u32 },
                    self.kind.act(&self.orbit, g, p).expect("point stays in orbit"),
                )
            })
            .collect()
    }

    fn key(&self, p: &PointValue) -> String {
        p.key()
    }

    fn vertices(&self) -> Option<Vec<PointValue>> {
        self.kind.orbit_vertices(&self.orbit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    #[test]
    fn generator_lists_are_symmetric() {
        for kind in [
            FactorKind::Grigorchuk,
            FactorKind::Integers,
            FactorKind::Cyclic { m: 5 },
            FactorKind::Cyclic { m: 2 },
            FactorKind::Houghton { rays: 2 },
            FactorKind::Lamplighter { p: 2, d: 1 },
            FactorKind::Lamplighter { p: 3, d: 1 },
        ] {
            let gens = kind.generators();
            let inverses = kind.generator_inverses();
            assert_eq!(gens.len(), inverses.len());
            for (i, &j) in inverses.iter().enumerate() {
                assert_eq!(inverses[j], i);
                let prod = kind.compose(&gens[i], &gens[j]);
                assert!(kind.is_identity(&prod));
            }
        }
    }

    #[test]
    fn neighbor_maps_are_bijections_per_generator() {
        for (kind, orbit) in [
            (FactorKind::Grigorchuk, OrbitHandle::Level(4)),
            (FactorKind::Integers, OrbitHandle::Cycle(7)),
            (FactorKind::Cyclic { m: 6 }, OrbitHandle::Cycle(6)),
            (FactorKind::Lamplighter { p: 2, d: 1 }, OrbitHandle::Coset(4)),
        ] {
            let gens = kind.generators();
            let inverses = kind.generator_inverses();
            for v in kind.orbit_vertices(&orbit).unwrap() {
                for (i, g) in gens.iter().enumerate() {
                    let w = kind.act(&orbit, g, &v).unwrap();
                    let back = kind.act(&orbit, &gens[inverses[i]], &w).unwrap();
                    assert_eq!(back, v);
                }
            }
        }
    }

    #[test]
    fn moved_point_oracle_moves_its_point() {
        let cases: Vec<(FactorKind, FactorElement)> = vec![
            (
                FactorKind::Grigorchuk,
                FactorElement::Grig(GrigorchukElement::new("ab").unwrap()),
            ),
            (FactorKind::Integers, FactorElement::Int(-3)),
            (FactorKind::Cyclic { m: 5 }, FactorElement::Mod(2)),
            (
                FactorKind::Houghton { rays: 2 },
                FactorElement::Hough(HoughtonElement::seam_transposition(2).unwrap()),
            ),
            (
                FactorKind::Lamplighter { p: 2, d: 1 },
                FactorElement::Lamp(LamplighterElement::lamp_generator(WreathParams { p: 2, d: 1 })),
            ),
        ];
        for (kind, g) in cases {
            let (orbit, x) = kind.moved_point(&g).unwrap();
            let gx = kind.act(&orbit, &g, &x).unwrap();
            assert_ne!(gx, x, "oracle for {} returned a fixed point", kind.name());
        }
        assert!(matches!(
            FactorKind::Integers.moved_point(&FactorElement::Int(0)),
            Err(Error::TrivialElement)
        ));
    }

    #[test]
    fn cd_oracle_certificates_hold_exactly() {
        let cases: Vec<(FactorKind, FactorElement)> = vec![
            (
                FactorKind::Grigorchuk,
                FactorElement::Grig(GrigorchukElement::new("dacab").unwrap()),
            ),
            (FactorKind::Integers, FactorElement::Int(4)),
            (FactorKind::Cyclic { m: 7 }, FactorElement::Mod(3)),
            (
                FactorKind::Lamplighter { p: 2, d: 1 },
                FactorElement::Lamp(
                    LamplighterElement::new(WreathParams { p: 2, d: 1 }, &[(vec![2], 1)], vec![0])
                        .unwrap(),
                ),
            ),
        ];
        for (kind, g) in cases {
            let cert = kind.cd_oracle(&g).unwrap().unwrap();
            let orbit_graph = OrbitGraph::new(kind, cert.orbit).unwrap();
            let gx = kind.act(&cert.orbit, &g, &cert.point).unwrap();
            assert_ne!(gx, cert.point);
            let size = kind.orbit_size(&cert.orbit).unwrap();
            let diam = graph::component_diameter(&orbit_graph, &cert.point, size).unwrap();
            let d = graph::distance(&orbit_graph, &cert.point, &gx, size)
                .unwrap()
                .unwrap();
            assert!(
                diam <= cert.constant * d,
                "{}: diam {diam} > {} * {d}",
                kind.name(),
                cert.constant
            );
        }
        assert!(FactorKind::Houghton { rays: 2 }
            .cd_oracle(&FactorElement::Hough(
                HoughtonElement::seam_transposition(2).unwrap()
            ))
            .unwrap()
            .is_none());
    }

    #[test]
    fn orbit_menus_respect_caps() {
        for kind in [
            FactorKind::Grigorchuk,
            FactorKind::Integers,
            FactorKind::Lamplighter { p: 2, d: 1 },
        ] {
            for orbit in kind.finite_orbit_menu(64) {
                assert!(kind.orbit_size(&orbit).unwrap() <= 64);
                assert!(kind.orbit_valid(&orbit));
            }
        }
        assert!(FactorKind::Houghton { rays: 2 }.finite_orbit_menu(100).is_empty());
    }
}
