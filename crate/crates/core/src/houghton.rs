//! Houghton groups `H_r`: permutations of the `r`-ray star that are
//! translations outside a finite set.
//!
//! Vertices of the star `Ξ_r` are the origin plus `(ray, pos)` with
//! `pos >= 1`. An element stores its per-ray eventual shifts, a threshold
//! `N`, and the full bijection table on the window of radius `N` around the
//! origin; the canonical form uses the minimal valid `N`, so structural
//! equality is element equality.
//!
//! For `r = 2` the star is identified with `Z`: the origin is `0`, ray 1 is
//! the negative integers and ray 2 the positive ones. The shift `t` is
//! `z ↦ z+1` under this identification and `σ` swaps `0` and `1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, Graph};

/// A vertex of the star: the shared origin or a positive position on a ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(u8, u32)", try_from = "(u8, u32)")]
pub enum StarVertex {
    Origin,
    Ray { ray: u8, pos: u32 },
}

impl From<StarVertex> for (u8, u32) {
    fn from(v: StarVertex) -> (u8, u32) {
        match v {
            StarVertex::Origin => (0, 0),
            StarVertex::Ray { ray, pos } => (ray, pos),
        }
    }
}

impl TryFrom<(u8, u32)> for StarVertex {
    type Error = String;
    fn try_from((ray, pos): (u8, u32)) -> std::result::Result<Self, String> {
        match (ray, pos) {
            (0, 0) => Ok(StarVertex::Origin),
            (0, _) | (_, 0) => Err("ray vertices need ray >= 1 and pos >= 1".into()),
            (ray, pos) => Ok(StarVertex::Ray { ray, pos }),
        }
    }
}

impl StarVertex {
    pub fn key(&self) -> String {
        match self {
            StarVertex::Origin => "o".to_string(),
            StarVertex::Ray { ray, pos } => format!("{ray}:{pos}"),
        }
    }
}

/// Graph distance in the star itself.
pub fn star_distance(u: StarVertex, v: StarVertex) -> u32 {
    match (u, v) {
        (StarVertex::Origin, StarVertex::Origin) => 0,
        (StarVertex::Origin, StarVertex::Ray { pos, .. })
        | (StarVertex::Ray { pos, .. }, StarVertex::Origin) => pos,
        (StarVertex::Ray { ray: r1, pos: p1 }, StarVertex::Ray { ray: r2, pos: p2 }) => {
            if r1 == r2 {
                p1.abs_diff(p2)
            } else {
                p1 + p2
            }
        }
    }
}

/// `Ξ_2 ≅ Z`: origin 0, ray 1 negative, ray 2 positive.
pub fn star_to_z(v: StarVertex) -> i64 {
    match v {
        StarVertex::Origin => 0,
        StarVertex::Ray { ray: 1, pos } => -(pos as i64),
        StarVertex::Ray { ray: 2, pos } => pos as i64,
        StarVertex::Ray { ray, .. } => panic!("ray {ray} outside Ξ_2"),
    }
}

pub fn z_to_star(z: i64) -> StarVertex {
    match z {
        0 => StarVertex::Origin,
        z if z < 0 => StarVertex::Ray { ray: 1, pos: (-z) as u32 },
        z => StarVertex::Ray { ray: 2, pos: z as u32 },
    }
}

/// An element of `H_r` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoughtonElement {
    rays: u8,
    shifts: Vec<i64>,
    threshold: u32,
    table: BTreeMap<StarVertex, StarVertex>,
}

fn window(rays: u8, n: u32) -> Vec<StarVertex> {
    let mut out = vec![StarVertex::Origin];
    for ray in 1..=rays {
        for pos in 1..=n {
            out.push(StarVertex::Ray { ray, pos });
        }
    }
    out
}

impl HoughtonElement {
    pub fn rays(&self) -> u8 {
        self.rays
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn table(&self) -> &BTreeMap<StarVertex, StarVertex> {
        &self.table
    }

    pub fn identity(rays: u8) -> Self {
        HoughtonElement {
            rays,
            shifts: vec![0; rays as usize],
            threshold: 0,
            table: BTreeMap::from([(StarVertex::Origin, StarVertex::Origin)]),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.shifts.iter().all(|&s| s == 0)
            && self.table.iter().all(|(k, v)| k == v)
    }

    /// Builds a canonical element from eventual shifts and the action on a
    /// window large enough to contain all exceptions.
    ///
    /// `f` must agree with the shift rule beyond the window. The shifts must
    /// sum to zero and the window action must be a bijection onto the
    /// complement of the shifted tails; both are checked.
    pub fn from_fn(
        rays: u8,
        shifts: &[i64],
        window_bound: u32,
        f: impl Fn(StarVertex) -> StarVertex,
    ) -> Result<Self> {
        if rays < 2 {
            return Err(Error::InvalidArgument(format!(
                "Houghton groups need r >= 2, got {rays}"
            )));
        }
        if shifts.len() != rays as usize {
            return Err(Error::InvalidArgument("one eventual shift per ray".into()));
        }
        if shifts.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidArgument(
                "eventual shifts must sum to zero".into(),
            ));
        }
        let floor = shifts
            .iter()
            .map(|&m| (-m).max(0) as u32)
            .max()
            .unwrap_or(0);
        if window_bound < floor {
            return Err(Error::InvalidArgument(format!(
                "window bound {window_bound} below the shift floor {floor}"
            )));
        }
        let mut table = BTreeMap::new();
        let mut image = BTreeSet::new();
        for v in window(rays, window_bound) {
            let w = f(v);
            if let StarVertex::Ray { ray, .. } = w {
                if ray == 0 || ray > rays {
                    return Err(Error::InvalidArgument(format!(
                        "image vertex {} outside the star",
                        w.key()
                    )));
                }
            }
            if !image.insert(w) {
                return Err(Error::InvalidArgument(format!(
                    "window action is not injective at {}",
                    w.key()
                )));
            }
            table.insert(v, w);
        }
        // Expected image of the window under a valid element.
        let mut expected = BTreeSet::from([StarVertex::Origin]);
        for ray in 1..=rays {
            let max = window_bound as i64 + shifts[ray as usize - 1];
            for pos in 1..=max.max(0) {
                expected.insert(StarVertex::Ray { ray, pos: pos as u32 });
            }
        }
        if image != expected {
            return Err(Error::InvalidArgument(
                "window image does not match the shifted tails' complement".into(),
            ));
        }
        // Canonical threshold: smallest N (>= floor) beyond which the table
        // is pure shift.
        let mut threshold = window_bound;
        'outer: while threshold > floor {
            for ray in 1..=rays {
                let v = StarVertex::Ray { ray, pos: threshold };
                let expected = StarVertex::Ray {
                    ray,
                    pos: (threshold as i64 + shifts[ray as usize - 1]) as u32,
                };
                if table[&v] != expected {
                    break 'outer;
                }
            }
            for ray in 1..=rays {
                table.remove(&StarVertex::Ray { ray, pos: threshold });
            }
            threshold -= 1;
        }
        Ok(HoughtonElement {
            rays,
            shifts: shifts.to_vec(),
            threshold,
            table,
        })
    }

    /// Builds an element of `H_2` from a map on `Z`.
    pub fn from_z_fn(window_bound: u32, shift_left: i64, shift_right: i64, f: impl Fn(i64) -> i64) -> Result<Self> {
        HoughtonElement::from_fn(2, &[shift_left, shift_right], window_bound, |v| {
            z_to_star(f(star_to_z(v)))
        })
    }

    /// The `H_2` shift `t: z ↦ z+1` along the juxtaposed line.
    pub fn shift_t(rays: u8) -> Result<Self> {
        let mut shifts = vec![0i64; rays as usize];
        shifts[0] = -1;
        shifts[1] = 1;
        HoughtonElement::from_fn(rays, &shifts, 2, |v| match v {
            StarVertex::Origin => StarVertex::Ray { ray: 2, pos: 1 },
            StarVertex::Ray { ray: 1, pos: 1 } => StarVertex::Origin,
            StarVertex::Ray { ray: 1, pos } => StarVertex::Ray { ray: 1, pos: pos - 1 },
            StarVertex::Ray { ray: 2, pos } => StarVertex::Ray { ray: 2, pos: pos + 1 },
            other => other,
        })
    }

    /// Ray-to-ray shift `t_{1j}` moving ray 1 into ray `j` across the origin.
    pub fn ray_shift(rays: u8, j: u8) -> Result<Self> {
        if j < 2 || j > rays {
            return Err(Error::InvalidArgument(format!("ray {j} outside 2..={rays}")));
        }
        let mut shifts = vec![0i64; rays as usize];
        shifts[0] = -1;
        shifts[j as usize - 1] = 1;
        HoughtonElement::from_fn(rays, &shifts, 2, move |v| match v {
            StarVertex::Origin => StarVertex::Ray { ray: j, pos: 1 },
            StarVertex::Ray { ray: 1, pos: 1 } => StarVertex::Origin,
            StarVertex::Ray { ray: 1, pos } => StarVertex::Ray { ray: 1, pos: pos - 1 },
            StarVertex::Ray { ray, pos } if ray == j => StarVertex::Ray { ray, pos: pos + 1 },
            other => other,
        })
    }

    /// The seam transposition swapping the origin and the first vertex of
    /// ray 2.
    pub fn seam_transposition(rays: u8) -> Result<Self> {
        HoughtonElement::from_fn(rays, &vec![0; rays as usize], 1, |v| match v {
            StarVertex::Origin => StarVertex::Ray { ray: 2, pos: 1 },
            StarVertex::Ray { ray: 2, pos: 1 } => StarVertex::Origin,
            other => other,
        })
    }

    /// Transposition of positions 1 and 2 on ray `i`.
    pub fn ray_transposition(rays: u8, i: u8) -> Result<Self> {
        if i == 0 || i > rays {
            return Err(Error::InvalidArgument(format!("ray {i} outside 1..={rays}")));
        }
        HoughtonElement::from_fn(rays, &vec![0; rays as usize], 2, move |v| match v {
            StarVertex::Ray { ray, pos: 1 } if ray == i => StarVertex::Ray { ray, pos: 2 },
            StarVertex::Ray { ray, pos: 2 } if ray == i => StarVertex::Ray { ray, pos: 1 },
            other => other,
        })
    }

    /// Shift of ray `i` into itself by one: `t_2 = t`, `t_1 = t⁻¹` for
    /// `H_2`, and `t_{1i}` for higher rays.
    pub fn ray_inward_shift(rays: u8, i: u8) -> Result<Self> {
        if i == 1 {
            Ok(HoughtonElement::ray_shift(rays, 2)?.inverse())
        } else {
            HoughtonElement::ray_shift(rays, i)
        }
    }

    /// Applies the element to a vertex.
    pub fn act(&self, v: StarVertex) -> StarVertex {
        match v {
            StarVertex::Ray { ray, pos } if pos > self.threshold => {
                debug_assert!(ray >= 1 && ray <= self.rays);
                let shifted = pos as i64 + self.shifts[ray as usize - 1];
                StarVertex::Ray { ray, pos: shifted as u32 }
            }
            v => self.table[&v],
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.rays != other.rays {
            return Err(Error::InvalidArgument("ray count mismatch".into()));
        }
        let shifts: Vec<i64> = self
            .shifts
            .iter()
            .zip(&other.shifts)
            .map(|(a, b)| a + b)
            .collect();
        let slack: i64 = self.shifts.iter().map(|s| s.abs()).max().unwrap_or(0)
            + other.shifts.iter().map(|s| s.abs()).max().unwrap_or(0);
        let bound = (self.threshold as i64 + other.threshold as i64 + slack + 2) as u32;
        HoughtonElement::from_fn(self.rays, &shifts, bound, |v| self.act(other.act(v)))
    }

    pub fn inverse(&self) -> Self {
        let shifts: Vec<i64> = self.shifts.iter().map(|s| -s).collect();
        let slack = self.shifts.iter().map(|s| s.abs()).max().unwrap_or(0);
        let bound = self.threshold as i64 + slack + 2;
        // Forward images of a slightly larger window cover the inverse's
        // window.
        let mut backward = BTreeMap::new();
        for v in window(self.rays, (bound + slack) as u32) {
            backward.insert(self.act(v), v);
        }
        HoughtonElement::from_fn(self.rays, &shifts, bound as u32, |v| backward[&v])
            .expect("inverse of a valid element is valid")
    }

    pub fn power(&self, n: u32) -> Result<Self> {
        let mut acc = HoughtonElement::identity(self.rays);
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Support of a finitely supported element (all shifts zero).
    pub fn finite_support(&self) -> Option<Vec<StarVertex>> {
        if self.shifts.iter().any(|&s| s != 0) {
            return None;
        }
        Some(
            self.table
                .iter()
                .filter(|(k, v)| k != v)
                .map(|(k, _)| *k)
                .collect(),
        )
    }

    /// First moved vertex in canonical order, if any.
    pub fn moved_vertex(&self) -> Option<StarVertex> {
        for (k, v) in &self.table {
            if k != v {
                return Some(*k);
            }
        }
        for (ray, &m) in self.shifts.iter().enumerate() {
            if m != 0 {
                return Some(StarVertex::Ray {
                    ray: ray as u8 + 1,
                    pos: self.threshold + 1,
                });
            }
        }
        None
    }

    /// JSON form `{shifts: [...], table: [[from, to], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let table: Vec<serde_json::Value> = self
            .table
            .iter()
            .map(|(k, v)| serde_json::json!([*k, *v]))
            .collect();
        serde_json::json!({ "shifts": self.shifts, "table": table })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wire {
            shifts: Vec<i64>,
            table: Vec<(StarVertex, StarVertex)>,
        }
        let wire: Wire = serde_json::from_value(value.clone())?;
        let rays = wire.shifts.len() as u8;
        let map: BTreeMap<StarVertex, StarVertex> = wire.table.into_iter().collect();
        let bound = map
            .keys()
            .map(|v| match v {
                StarVertex::Origin => 0,
                StarVertex::Ray { pos, .. } => *pos,
            })
            .max()
            .unwrap_or(0)
            .max(wire.shifts.iter().map(|&m| (-m).max(0) as u32).max().unwrap_or(0));
        HoughtonElement::from_fn(rays, &wire.shifts, bound, |v| match map.get(&v) {
            Some(w) => *w,
            None => match v {
                StarVertex::Ray { ray, pos } => StarVertex::Ray {
                    ray,
                    pos: (pos as i64 + wire.shifts[ray as usize - 1]) as u32,
                },
                StarVertex::Origin => StarVertex::Origin,
            },
        })
    }
}

/// The gadget `γ_{i,n} = t_i^n σ_i (t_i^{-1} σ_i)^n`: a finitely supported
/// cycle on the first `n+2` positions of ray `i`, sending position 1 to
/// position `n+2`.
pub fn ray_cycle(rays: u8, i: u8, n: u32) -> Result<HoughtonElement> {
    if n < 1 {
        return Err(Error::InvalidArgument("ray cycles need n >= 1".into()));
    }
    let t_i = HoughtonElement::ray_inward_shift(rays, i)?;
    let sigma_i = HoughtonElement::ray_transposition(rays, i)?;
    let block = t_i.inverse().compose(&sigma_i)?;
    let mut acc = sigma_i;
    for _ in 0..n {
        acc = acc.compose(&block)?;
    }
    // acc = σ_i (t_i^{-1} σ_i)^n; multiply by t_i^n on the left.
    let mut out = acc;
    for _ in 0..n {
        out = t_i.compose(&out)?;
    }
    Ok(out)
}

/// Word length budget of `γ_{i,n}` in the standard generators of `H_2`:
/// `2n` copies of `t_i` plus `n+1` copies of `σ_i`, with `σ_2 = tσt⁻¹` and
/// `σ_1 = t⁻²σt²` spelled in `{t, t⁻¹, σ}`.
pub fn ray_cycle_word_length(i: u8, n: u32) -> u32 {
    let t_len = 1;
    let sigma_len = if i == 2 { 3 } else { 5 };
    2 * n * t_len + (n + 1) * sigma_len
}

/// Standard generating list: `{t, t⁻¹, σ}` for `H_2`; the ray-to-ray shifts
/// and the seam transposition for `r >= 3`.
pub fn standard_generators(rays: u8) -> Result<Vec<HoughtonElement>> {
    if rays < 2 {
        return Err(Error::InvalidArgument(format!(
            "Houghton groups need r >= 2, got {rays}"
        )));
    }
    let mut out = Vec::new();
    if rays == 2 {
        let t = HoughtonElement::shift_t(2)?;
        out.push(t.clone());
        out.push(t.inverse());
    } else {
        for j in 2..=rays {
            let t = HoughtonElement::ray_shift(rays, j)?;
            out.push(t.clone());
            out.push(t.inverse());
        }
    }
    out.push(HoughtonElement::seam_transposition(rays)?);
    Ok(out)
}

/// The Schreier graph of the natural `H_r` action on the star.
#[derive(Debug, Clone)]
pub struct StarGraph {
    rays: u8,
    generators: Vec<HoughtonElement>,
}

impl StarGraph {
    pub fn new(rays: u8) -> Result<Self> {
        Ok(StarGraph { rays, generators: standard_generators(rays)? })
    }

    pub fn rays(&self) -> u8 {
        self.rays
    }
}

impl Graph for StarGraph {
    type Point = StarVertex;

    fn neighbors(&self, p: &StarVertex) -> Vec<(EdgeLabel, StarVertex)> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| (EdgeLabel { factor: 0, generator: i as u32 }, g.act(*p)))
            .collect()
    }

    fn key(&self, p: &StarVertex) -> String {
        p.key()
    }
}

/// Distinct images of the pair `(x_1, x_2)` under the products
/// `γ_{1,m_1} γ_{2,m_2}` with `0 <= m_i <= n`, where `x_i` is position 1 of
/// ray `i` and `γ_{i,0}` is `σ_i`. Also reports the largest generator word
/// length among the products, which certifies the radius of the pair ball
/// the images live in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBallBound {
    pub n: u32,
    pub count: usize,
    pub max_word_length: u32,
}

pub fn pair_ball_lower_bound(n: u32) -> Result<PairBallBound> {
    Ok(pair_ball_counts(n)?.pop().expect("at least n = 0"))
}

/// [`pair_ball_lower_bound`] for every `n' <= n`, sharing the γ elements
/// across radii.
pub fn pair_ball_counts(n: u32) -> Result<Vec<PairBallBound>> {
    let x1 = StarVertex::Ray { ray: 1, pos: 1 };
    let x2 = StarVertex::Ray { ray: 2, pos: 1 };
    let mut gamma1 = vec![HoughtonElement::ray_transposition(2, 1)?];
    let mut gamma2 = vec![HoughtonElement::ray_transposition(2, 2)?];
    for m in 1..=n {
        gamma1.push(ray_cycle(2, 1, m)?);
        gamma2.push(ray_cycle(2, 2, m)?);
    }
    let mut images = BTreeSet::new();
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut max_word_length = 0;
    for bound in 0..=n as usize {
        // New products with max(m1, m2) == bound.
        for m1 in 0..=bound {
            for m2 in 0..=bound {
                if m1.max(m2) != bound {
                    continue;
                }
                let product = gamma1[m1].compose(&gamma2[m2])?;
                images.insert((product.act(x1), product.act(x2)));
                let words =
                    ray_cycle_word_length(1, m1 as u32) + ray_cycle_word_length(2, m2 as u32);
                max_word_length = max_word_length.max(words);
            }
        }
        out.push(PairBallBound { n: bound as u32, count: images.len(), max_word_length });
    }
    Ok(out)
}
