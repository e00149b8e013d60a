//! Gluing marked orbit graphs into chains carrying graph-product actions.
//!
//! A gluing takes pieces `(X_k, e_k, s_k)` — an orbit graph with two distinct
//! marked points — and identifies the exit `s_k` with the entry `e_{k+1}`.
//! Admissibility requires consecutive pieces to come from distinct,
//! non-commuting factors; each factor acts on its own pieces and fixes the
//! rest, which defines an action of the graph product on the chain.
//!
//! Points are addressed as `(piece index, local point)`; a point shared by
//! two pieces is owned by the lower index.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::factor::{OrbitHandle, PointValue};
use crate::graph::{self, EdgeLabel, Graph};
use crate::word::{FactorId, ProductSpec, Syllable, SyllableWord};

/// One piece of a gluing: an orbit with entry and exit markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPiece {
    pub factor: FactorId,
    pub orbit: OrbitHandle,
    pub entry: PointValue,
    pub exit: PointValue,
}

/// A chain of marked pieces with `s_k ~ e_{k+1}` identifications.
#[derive(Debug, Clone)]
pub struct GluingSpace {
    pieces: Vec<MarkedPiece>,
}

/// A point of a gluing in canonical address form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GluedPoint {
    pub piece: u32,
    pub local: PointValue,
}

impl GluedPoint {
    pub fn key(&self) -> String {
        format!("{}|{}", self.piece, self.local.key())
    }
}

/// Builds a gluing, validating marked points and `c`-admissibility.
pub fn make_gluing(pieces: Vec<MarkedPiece>, product: &ProductSpec) -> Result<GluingSpace> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("a gluing needs at least one piece".into()));
    }
    for (idx, piece) in pieces.iter().enumerate() {
        let kind = product.kind(piece.factor)?;
        if !kind.orbit_valid(&piece.orbit) {
            return Err(Error::InvalidArgument(format!(
                "piece {idx}: orbit {:?} not in the catalogue of {}",
                piece.orbit,
                kind.name()
            )));
        }
        for (name, point) in [("entry", &piece.entry), ("exit", &piece.exit)] {
            if !kind.point_in_orbit(&piece.orbit, point) {
                return Err(Error::PointOutsideDomain {
                    point: point.key(),
                    context: format!("{name} of piece {idx}"),
                });
            }
        }
        if piece.entry == piece.exit {
            return Err(Error::MarkedPointsEqual { piece: idx });
        }
    }
    for k in 0..pieces.len().saturating_sub(1) {
        let (i, j) = (pieces[k].factor, pieces[k + 1].factor);
        if i == j {
            return Err(Error::Inadmissible {
                left: k,
                right: k + 1,
                reason: format!("both pieces belong to factor {i}"),
            });
        }
        if product.commutes(i, j) {
            return Err(Error::Inadmissible {
                left: k,
                right: k + 1,
                reason: format!("factors {i} and {j} commute"),
            });
        }
    }
    Ok(GluingSpace { pieces })
}

impl GluingSpace {
    pub fn pieces(&self) -> &[MarkedPiece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Canonical address: shared points are owned by the lower piece index.
    pub fn canonical(&self, piece: u32, local: PointValue) -> GluedPoint {
        if piece > 0 && local == self.pieces[piece as usize].entry {
            GluedPoint {
                piece: piece - 1,
                local: self.pieces[piece as usize - 1].exit.clone(),
            }
        } else {
            GluedPoint { piece, local }
        }
    }

    /// Canonical address of `e_1`.
    pub fn first_entry(&self) -> GluedPoint {
        GluedPoint { piece: 0, local: self.pieces[0].entry.clone() }
    }

    /// Canonical address of `s_q`.
    pub fn last_exit(&self) -> GluedPoint {
        GluedPoint {
            piece: self.pieces.len() as u32 - 1,
            local: self.pieces.last().unwrap().exit.clone(),
        }
    }

    /// Pieces containing a canonical point: its own, plus the next piece
    /// when the point is the shared exit/entry.
    pub fn owning_pieces(&self, point: &GluedPoint) -> Vec<u32> {
        let mut out = vec![point.piece];
        let idx = point.piece as usize;
        if idx + 1 < self.pieces.len() && point.local == self.pieces[idx].exit {
            out.push(point.piece + 1);
        }
        out
    }

    /// Vertex count `Σ|X_k| - (q-1)` when all pieces are finite.
    pub fn size(&self, product: &ProductSpec) -> Result<Option<usize>> {
        let mut total = 0usize;
        for piece in &self.pieces {
            match product.kind(piece.factor)?.orbit_size(&piece.orbit) {
                Some(n) => total += n,
                None => return Ok(None),
            }
        }
        Ok(Some(total - (self.pieces.len() - 1)))
    }
}

/// Applies one syllable to a point of the gluing. The syllable acts through
/// the unique owning piece with a matching factor, and fixes the point when
/// there is none.
pub fn syllable_act(
    syllable: &Syllable,
    space: &GluingSpace,
    product: &ProductSpec,
    point: &GluedPoint,
) -> Result<GluedPoint> {
    let kind = product.kind(syllable.factor)?;
    for piece_idx in space.owning_pieces(point) {
        let piece = &space.pieces[piece_idx as usize];
        if piece.factor != syllable.factor {
            continue;
        }
        let local = if piece_idx == point.piece {
            point.local.clone()
        } else {
            piece.entry.clone()
        };
        let moved = kind.act(&piece.orbit, &syllable.element, &local)?;
        return Ok(space.canonical(piece_idx, moved));
    }
    Ok(point.clone())
}

/// Action of a whole word, syllables applied in order.
pub fn glued_act(
    word: &SyllableWord,
    space: &GluingSpace,
    product: &ProductSpec,
    point: &GluedPoint,
) -> Result<GluedPoint> {
    let mut current = point.clone();
    for syllable in &word.syllables {
        current = syllable_act(syllable, space, product, &current)?;
    }
    Ok(current)
}

/// The Schreier graph of a gluing, optionally restricted to the generators
/// of a single factor (which yields the `d_{G,X}` metric).
#[derive(Clone)]
pub struct GluedGraph<'a> {
    pub space: &'a GluingSpace,
    pub product: &'a ProductSpec,
    pub restrict_to: Option<FactorId>,
}

impl<'a> GluedGraph<'a> {
    pub fn new(space: &'a GluingSpace, product: &'a ProductSpec) -> Self {
        GluedGraph { space, product, restrict_to: None }
    }

    pub fn restricted(space: &'a GluingSpace, product: &'a ProductSpec, factor: FactorId) -> Self {
        GluedGraph { space, product, restrict_to: Some(factor) }
    }
}

impl Graph for GluedGraph<'_> {
    type Point = GluedPoint;

    fn neighbors(&self, p: &GluedPoint) -> Vec<(EdgeLabel, GluedPoint)> {
        let mut out = Vec::new();
        for piece_idx in self.space.owning_pieces(p) {
            let piece = &self.space.pieces[piece_idx as usize];
            if let Some(only) = self.restrict_to {
                if piece.factor != only {
                    continue;
                }
            }
            let kind = self.product.kind(piece.factor).expect("validated piece");
            let local = if piece_idx == p.piece {
                p.local.clone()
            } else {
                piece.entry.clone()
            };
            for (gen_idx, g) in kind.generators().iter().enumerate() {
                let moved = kind
                    .act(&piece.orbit, g, &local)
                    .expect("generator action stays in orbit");
                out.push((
                    EdgeLabel { factor: piece.factor.0, generator: gen_idx as u32 },
                    self.space.canonical(piece_idx, moved),
                ));
            }
        }
        out
    }

    fn key(&self, p: &GluedPoint) -> String {
        p.key()
    }

    fn vertices(&self) -> Option<Vec<GluedPoint>> {
        let mut out = Vec::new();
        for (idx, piece) in self.space.pieces.iter().enumerate() {
            let kind = self.product.kind(piece.factor).ok()?;
            for local in kind.orbit_vertices(&piece.orbit)? {
                if idx > 0 && local == piece.entry {
                    continue; // owned by the previous piece
                }
                out.push(GluedPoint { piece: idx as u32, local });
            }
        }
        Some(out)
    }
}

/// A faithfulness certificate: the chain on which the word moves `e_1`.
#[derive(Debug)]
pub struct FaithfulnessWitness {
    pub space: GluingSpace,
    pub start: GluedPoint,
    pub end: GluedPoint,
    /// Per piece, the controlled-diameter constant when CD oracles were
    /// requested.
    pub cd_constants: Option<Vec<u32>>,
}

/// Which oracle marks the pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    MovedPoint,
    ControlledDiameter,
}

/// Builds the witness gluing of the faithfulness argument: reduce the word,
/// split it into blocks at non-commuting boundaries, take one marked orbit
/// per block from the factor oracles, and machine-check that the word sends
/// `e_1` to `s_q ≠ e_1`.
pub fn faithfulness_witness(
    word: &SyllableWord,
    product: &ProductSpec,
    mode: OracleMode,
) -> Result<FaithfulnessWitness> {
    let normal = crate::word::reduce_to_normal_form(word, product)?;
    if normal.is_empty() {
        return Err(Error::TrivialElement);
    }
    let syllables = &normal.syllables;
    // Block starts: r_1 = 1 and r_{k+1} = first s > r_k whose factor does
    // not commute with the factor at r_k.
    let mut starts = vec![0usize];
    loop {
        let last = *starts.last().unwrap();
        let anchor = syllables[last].factor;
        let next = (last + 1..syllables.len()).find(|&s| {
            let f = syllables[s].factor;
            f == anchor || !product.commutes(f, anchor)
        });
        match next {
            Some(s) => {
                if syllables[s].factor == anchor {
                    return Err(Error::InvalidArgument(
                        "normal form left a mergeable same-factor pair".into(),
                    ));
                }
                starts.push(s);
            }
            None => break,
        }
    }
    let mut pieces = Vec::with_capacity(starts.len());
    let mut cd_constants = Vec::new();
    for &s in &starts {
        let syllable = &syllables[s];
        let kind = product.kind(syllable.factor)?;
        let (orbit, entry, constant) = match mode {
            OracleMode::MovedPoint => {
                let (orbit, x) = kind.moved_point(&syllable.element)?;
                (orbit, x, 0)
            }
            OracleMode::ControlledDiameter => {
                let cert = kind.cd_oracle(&syllable.element)?.ok_or(Error::MissingCapability {
                    factor: syllable.factor,
                    capability: "controlled-diameter oracle".into(),
                })?;
                (cert.orbit, cert.point, cert.constant)
            }
        };
        let exit = kind.act(&orbit, &syllable.element, &entry)?;
        debug_assert_ne!(entry, exit);
        pieces.push(MarkedPiece { factor: syllable.factor, orbit, entry, exit });
        cd_constants.push(constant);
    }
    let space = make_gluing(pieces, product)?;
    let start = space.first_entry();
    let end = glued_act(&normal, &space, product, &start)?;
    let expected = space.last_exit();
    if end != expected || end == start {
        return Err(Error::InvalidArgument(format!(
            "witness check failed: word sent {} to {}, expected {}",
            start.key(),
            end.key(),
            expected.key()
        )));
    }
    Ok(FaithfulnessWitness {
        space,
        start,
        end,
        cd_constants: match mode {
            OracleMode::MovedPoint => None,
            OracleMode::ControlledDiameter => Some(cd_constants),
        },
    })
}

/// Budget for enumerating a family of gluings.
#[derive(Debug, Clone, Copy)]
pub struct FamilyBudget {
    pub q_max: usize,
    pub piece_size_cap: usize,
    pub count: usize,
}

/// All `c`-admissible factor-id sequences of the given length.
pub fn admissible_sequences(product: &ProductSpec, length: usize) -> Vec<Vec<FactorId>> {
    let ids = product.ids();
    let mut out: Vec<Vec<FactorId>> = vec![vec![]];
    for _ in 0..length {
        let mut next = Vec::new();
        for seq in &out {
            for &id in &ids {
                let ok = match seq.last() {
                    None => true,
                    Some(&prev) => prev != id && !product.commutes(prev, id),
                };
                if ok {
                    let mut extended = seq.clone();
                    extended.push(id);
                    next.push(extended);
                }
            }
        }
        out = next;
    }
    out
}

/// Seeded enumeration of admissible gluings of finite pieces within budget.
pub fn action_family(
    product: &ProductSpec,
    budget: &FamilyBudget,
    rng: &mut impl Rng,
) -> Result<Vec<GluingSpace>> {
    let ids = product.ids();
    let mut menus = Vec::new();
    for &id in &ids {
        let kind = product.kind(id)?;
        menus.push((id, kind.finite_orbit_menu(budget.piece_size_cap)));
    }
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < budget.count && attempts < budget.count * 20 {
        attempts += 1;
        let q = rng.gen_range(1..=budget.q_max);
        let mut pieces: Vec<MarkedPiece> = Vec::with_capacity(q);
        let mut ok = true;
        for k in 0..q {
            let candidates: Vec<&(FactorId, Vec<OrbitHandle>)> = menus
                .iter()
                .filter(|(id, menu)| {
                    !menu.is_empty()
                        && match k.checked_sub(1).map(|i| pieces[i].factor) {
                            None => true,
                            Some(prev) => prev != *id && !product.commutes(prev, *id),
                        }
                })
                .collect();
            let Some((id, menu)) = candidates.choose(rng).copied() else {
                ok = false;
                break;
            };
            let orbit = menu[rng.gen_range(0..menu.len())];
            let kind = product.kind(*id)?;
            let vertices = kind.orbit_vertices(&orbit).expect("finite orbit");
            let entry_idx = rng.gen_range(0..vertices.len());
            let mut exit_idx = rng.gen_range(0..vertices.len() - 1);
            if exit_idx >= entry_idx {
                exit_idx += 1;
            }
            pieces.push(MarkedPiece {
                factor: *id,
                orbit,
                entry: vertices[entry_idx].clone(),
                exit: vertices[exit_idx].clone(),
            });
        }
        if ok {
            out.push(make_gluing(pieces, product)?);
        }
    }
    Ok(out)
}

/// Like [`action_family`] but marking every piece at a diametrically maximal
/// pair, as the controlled-diameter family requires.
pub fn cd_family(
    product: &ProductSpec,
    budget: &FamilyBudget,
    rng: &mut impl Rng,
) -> Result<Vec<GluingSpace>> {
    let ids = product.ids();
    // Precompute a diametral pair per available orbit.
    let mut menus: Vec<(FactorId, Vec<(OrbitHandle, PointValue, PointValue)>)> = Vec::new();
    for &id in &ids {
        let kind = product.kind(id)?;
        let mut marked = Vec::new();
        for orbit in kind.finite_orbit_menu(budget.piece_size_cap) {
            let orbit_graph = crate::factor::OrbitGraph::new(*kind, orbit)?;
            let vertices = kind.orbit_vertices(&orbit).expect("finite orbit");
            if vertices.len() < 2 {
                continue;
            }
            let mut best: Option<(u32, PointValue, PointValue)> = None;
            for v in &vertices {
                let dist = graph::ball(&orbit_graph, v, u32::MAX);
                for (w, d) in dist {
                    let better = match &best {
                        None => true,
                        Some((bd, _, _)) => d > *bd,
                    };
                    if better && w != *v {
                        best = Some((d, v.clone(), w));
                    }
                }
            }
            if let Some((_, e, s)) = best {
                marked.push((orbit, e, s));
            }
        }
        menus.push((id, marked));
    }
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < budget.count && attempts < budget.count * 20 {
        attempts += 1;
        let q = rng.gen_range(1..=budget.q_max);
        let mut pieces: Vec<MarkedPiece> = Vec::with_capacity(q);
        let mut ok = true;
        for k in 0..q {
            let candidates: Vec<_> = menus
                .iter()
                .filter(|(id, menu)| {
                    !menu.is_empty()
                        && match k.checked_sub(1).map(|i: usize| pieces[i].factor) {
                            None => true,
                            Some(prev) => prev != *id && !product.commutes(prev, *id),
                        }
                })
                .collect();
            let Some((id, menu)) = candidates.choose(rng) else {
                ok = false;
                break;
            };
            let (orbit, entry, exit) = menu[rng.gen_range(0..menu.len())].clone();
            pieces.push(MarkedPiece { factor: *id, orbit, entry, exit });
        }
        if ok {
            out.push(make_gluing(pieces, product)?);
        }
    }
    Ok(out)
}

/// A growth function: a symbolic power law or a sampled table indexed by n.
#[derive(Debug, Clone)]
pub enum GrowthFn {
    PowerLaw(f64),
    Table(Vec<u64>),
}

impl GrowthFn {
    fn eval(&self, n: u64) -> Result<f64> {
        match self {
            GrowthFn::PowerLaw(alpha) => Ok((n as f64).powf(*alpha)),
            GrowthFn::Table(t) => t
                .get(n as usize)
                .map(|v| *v as f64)
                .ok_or_else(|| Error::InvalidArgument(format!("table has no entry at {n}"))),
        }
    }

    fn check_monotone(&self) -> Result<()> {
        if let GrowthFn::Table(t) = self {
            if t.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidArgument("growth table is not nondecreasing".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of the partition-condition check: either a constant that works on
/// every sampled tuple, or a failing tuple per candidate.
#[derive(Debug, Clone)]
pub enum PartitionOutcome {
    Holds { constant: u64 },
    Fails { witnesses: Vec<(u64, Vec<(u64, u64)>)> },
}

impl PartitionOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, PartitionOutcome::Holds { .. })
    }
}

/// Checks `Σ f(ρ_i) <= C₁ · f(C₁ · Σ ρ_i)` over the sampled tuples for each
/// candidate `C₁`. Tuples are run-length encoded as `(value, multiplicity)`.
///
/// For a power law `n^α` with `α < 1`, constant tuples `(1,...,1)` long
/// enough to defeat every candidate are appended, so a failing answer always
/// carries a concrete witness.
pub fn check_partition_condition(
    f: &GrowthFn,
    candidates: &[u64],
    tuples: &[Vec<(u64, u64)>],
) -> Result<PartitionOutcome> {
    f.check_monotone()?;
    let mut samples: Vec<Vec<(u64, u64)>> = tuples.to_vec();
    if let GrowthFn::PowerLaw(alpha) = f {
        if *alpha < 1.0 {
            let max_c = candidates.iter().copied().max().unwrap_or(1);
            samples.push(vec![(1, max_c.pow(3) + 1)]);
        }
    }
    let violates = |c1: u64, tuple: &[(u64, u64)]| -> Result<bool> {
        let lhs: f64 = tuple
            .iter()
            .map(|(value, mult)| f.eval(*value).map(|v| v * *mult as f64))
            .sum::<Result<f64>>()?;
        let total: u64 = tuple.iter().map(|(value, mult)| value * mult).sum();
        let rhs = c1 as f64 * f.eval(c1 * total)?;
        Ok(lhs > rhs)
    };
    let mut witnesses = Vec::new();
    for &c1 in candidates {
        let mut failing = None;
        for tuple in &samples {
            if violates(c1, tuple)? {
                failing = Some(tuple.clone());
                break;
            }
        }
        match failing {
            None => return Ok(PartitionOutcome::Holds { constant: c1 }),
            Some(t) => witnesses.push((c1, t)),
        }
    }
    Ok(PartitionOutcome::Fails { witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{FactorElement, FactorKind};
    use rand::SeedableRng;

    fn z_star_z() -> ProductSpec {
        ProductSpec::free(vec![
            (FactorId(1), FactorKind::Cyclic { m: 3 }),
            (FactorId(2), FactorKind::Cyclic { m: 3 }),
        ])
        .unwrap()
    }

    fn cycle_piece(factor: u32, m: u64, entry: u64, exit: u64) -> MarkedPiece {
        MarkedPiece {
            factor: FactorId(factor),
            orbit: OrbitHandle::Cycle(m),
            entry: PointValue::Mod(entry),
            exit: PointValue::Mod(exit),
        }
    }

    #[test]
    fn vertex_count_of_two_piece_gluing() {
        let product = ProductSpec::free(vec![
            (FactorId(1), FactorKind::Cyclic { m: 8 }),
            (FactorId(2), FactorKind::Cyclic { m: 6 }),
        ])
        .unwrap();
        let space = make_gluing(
            vec![cycle_piece(1, 8, 0, 1), cycle_piece(2, 6, 0, 1)],
            &product,
        )
        .unwrap();
        assert_eq!(space.size(&product).unwrap(), Some(13));
        let g = GluedGraph::new(&space, &product);
        assert_eq!(g.vertices().unwrap().len(), 13);
    }

    #[test]
    fn marked_point_and_admissibility_errors() {
        let product = z_star_z();
        let err = make_gluing(vec![cycle_piece(1, 3, 2, 2)], &product);
        assert!(matches!(err, Err(Error::MarkedPointsEqual { piece: 0 })));

        let err = make_gluing(
            vec![cycle_piece(1, 3, 0, 1), cycle_piece(1, 3, 0, 1)],
            &product,
        );
        assert!(matches!(err, Err(Error::Inadmissible { .. })));

        let commuting = ProductSpec::new(
            vec![
                (FactorId(1), FactorKind::Cyclic { m: 3 }),
                (FactorId(2), FactorKind::Cyclic { m: 3 }),
            ],
            vec![(FactorId(1), FactorId(2))],
        )
        .unwrap();
        let err = make_gluing(
            vec![cycle_piece(1, 3, 0, 1), cycle_piece(2, 3, 0, 1)],
            &commuting,
        );
        assert!(matches!(err, Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn commutator_moves_entry_on_two_piece_gluing() {
        // [x, y] in Z/3 * Z/3 on two cycles glued at a point.
        let product = z_star_z();
        let space = make_gluing(
            vec![cycle_piece(1, 3, 0, 1), cycle_piece(2, 3, 0, 1)],
            &product,
        )
        .unwrap();
        let x = Syllable { factor: FactorId(1), element: FactorElement::Mod(1) };
        let y = Syllable { factor: FactorId(2), element: FactorElement::Mod(1) };
        let x_inv = Syllable { factor: FactorId(1), element: FactorElement::Mod(2) };
        let y_inv = Syllable { factor: FactorId(2), element: FactorElement::Mod(2) };
        // [x,y] = x⁻¹ y⁻¹ x y, applied y first.
        let commutator = SyllableWord::new(vec![y, x, y_inv, x_inv]);
        let start = space.first_entry();
        let end = glued_act(&commutator, &space, &product, &start).unwrap();
        assert_ne!(end, start);
        assert_eq!(end, GluedPoint { piece: 1, local: PointValue::Mod(2) });
    }

    #[test]
    fn syllable_fixes_points_of_other_factors() {
        let product = z_star_z();
        let space = make_gluing(
            vec![cycle_piece(1, 3, 0, 1), cycle_piece(2, 3, 0, 1)],
            &product,
        )
        .unwrap();
        let y = Syllable { factor: FactorId(2), element: FactorElement::Mod(1) };
        // Interior point of piece 0 (factor 1), not an identified endpoint.
        let interior = GluedPoint { piece: 0, local: PointValue::Mod(2) };
        assert_eq!(
            syllable_act(&y, &space, &product, &interior).unwrap(),
            interior
        );
        // Interior point of its own piece moves by the provider action.
        let x = Syllable { factor: FactorId(1), element: FactorElement::Mod(1) };
        assert_eq!(
            syllable_act(&x, &space, &product, &interior).unwrap(),
            GluedPoint { piece: 0, local: PointValue::Mod(0) }
        );
    }

    #[test]
    fn commuting_factors_act_with_disjoint_supports() {
        // c(1,2)=1 with a third non-commuting factor between them.
        let product = ProductSpec::new(
            vec![
                (FactorId(1), FactorKind::Cyclic { m: 3 }),
                (FactorId(2), FactorKind::Cyclic { m: 4 }),
                (FactorId(3), FactorKind::Cyclic { m: 5 }),
            ],
            vec![(FactorId(1), FactorId(2))],
        )
        .unwrap();
        let space = make_gluing(
            vec![
                cycle_piece(1, 3, 0, 1),
                cycle_piece(3, 5, 0, 2),
                cycle_piece(2, 4, 0, 3),
            ],
            &product,
        )
        .unwrap();
        let g1 = Syllable { factor: FactorId(1), element: FactorElement::Mod(1) };
        let g2 = Syllable { factor: FactorId(2), element: FactorElement::Mod(1) };
        let graph = GluedGraph::new(&space, &product);
        let mut support1 = vec![];
        let mut support2 = vec![];
        for v in graph.vertices().unwrap() {
            if syllable_act(&g1, &space, &product, &v).unwrap() != v {
                support1.push(v.clone());
            }
            if syllable_act(&g2, &space, &product, &v).unwrap() != v {
                support2.push(v.clone());
            }
        }
        assert!(!support1.is_empty() && !support2.is_empty());
        for v in &support1 {
            assert!(!support2.contains(v));
        }
        // And the two syllables commute pointwise on the whole gluing.
        for v in graph.vertices().unwrap() {
            let a = syllable_act(&g2, &space, &product, &syllable_act(&g1, &space, &product, &v).unwrap()).unwrap();
            let b = syllable_act(&g1, &space, &product, &syllable_act(&g2, &space, &product, &v).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_syllable_witness() {
        let product = z_star_z();
        let word = SyllableWord::new(vec![Syllable {
            factor: FactorId(1),
            element: FactorElement::Mod(2),
        }]);
        let witness = faithfulness_witness(&word, &product, OracleMode::MovedPoint).unwrap();
        assert_eq!(witness.space.len(), 1);
        assert_ne!(witness.start, witness.end);
    }

    #[test]
    fn witness_rejects_trivial_words() {
        let product = z_star_z();
        let word = SyllableWord::new(vec![
            Syllable { factor: FactorId(1), element: FactorElement::Mod(1) },
            Syllable { factor: FactorId(1), element: FactorElement::Mod(2) },
        ]);
        assert!(matches!(
            faithfulness_witness(&word, &product, OracleMode::MovedPoint),
            Err(Error::TrivialElement)
        ));
    }

    #[test]
    fn witness_cd_mode_requires_capability() {
        let product = ProductSpec::free(vec![
            (FactorId(1), FactorKind::Houghton { rays: 2 }),
            (FactorId(2), FactorKind::Integers),
        ])
        .unwrap();
        let word = SyllableWord::new(vec![Syllable {
            factor: FactorId(1),
            element: FactorElement::Hough(
                crate::houghton::HoughtonElement::seam_transposition(2).unwrap(),
            ),
        }]);
        assert!(matches!(
            faithfulness_witness(&word, &product, OracleMode::ControlledDiameter),
            Err(Error::MissingCapability { .. })
        ));
    }

    #[test]
    fn admissible_sequence_count_free_product_of_two() {
        let product = z_star_z();
        assert_eq!(admissible_sequences(&product, 3).len(), 2);
        assert_eq!(admissible_sequences(&product, 1).len(), 2);
    }

    #[test]
    fn action_family_is_budgeted_and_deterministic() {
        let product = ProductSpec::free(vec![
            (FactorId(1), FactorKind::Grigorchuk),
            (FactorId(2), FactorKind::Integers),
        ])
        .unwrap();
        let budget = FamilyBudget { q_max: 4, piece_size_cap: 32, count: 10 };
        let mut rng1 = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let fam1 = action_family(&product, &budget, &mut rng1).unwrap();
        let fam2 = action_family(&product, &budget, &mut rng2).unwrap();
        assert_eq!(fam1.len(), 10);
        for (a, b) in fam1.iter().zip(&fam2) {
            assert_eq!(a.pieces(), b.pieces());
        }
        for space in &fam1 {
            assert!(space.len() <= 4);
            for piece in space.pieces() {
                let kind = product.kind(piece.factor).unwrap();
                assert!(kind.orbit_size(&piece.orbit).unwrap() <= 32);
            }
        }
    }

    #[test]
    fn one_piece_family_when_q_max_is_one() {
        let product = z_star_z();
        let budget = FamilyBudget { q_max: 1, piece_size_cap: 16, count: 5 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let fam = action_family(&product, &budget, &mut rng).unwrap();
        assert!(fam.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn partition_condition_examples() {
        let candidates = [1u64, 2, 4, 8, 16, 32, 64];
        let tuples: Vec<Vec<(u64, u64)>> = vec![
            vec![(1, 5)],
            vec![(2, 3), (7, 1)],
            vec![(10, 10)],
            vec![(1, 1000)],
        ];
        let quad = check_partition_condition(&GrowthFn::PowerLaw(2.0), &candidates, &tuples)
            .unwrap();
        assert!(matches!(quad, PartitionOutcome::Holds { constant: 1 }));
        let linear = check_partition_condition(&GrowthFn::PowerLaw(1.0), &candidates, &tuples)
            .unwrap();
        assert!(linear.holds());
        let sqrt = check_partition_condition(&GrowthFn::PowerLaw(0.5), &candidates, &tuples)
            .unwrap();
        match sqrt {
            PartitionOutcome::Fails { witnesses } => {
                assert_eq!(witnesses.len(), candidates.len());
                for (c1, tuple) in &witnesses {
                    let lhs: f64 = tuple
                        .iter()
                        .map(|(v, mult)| (*v as f64).sqrt() * *mult as f64)
                        .sum();
                    let total: u64 = tuple.iter().map(|(v, m)| v * m).sum();
                    let rhs = *c1 as f64 * ((c1 * total) as f64).sqrt();
                    assert!(lhs > rhs);
                }
            }
            _ => panic!("sqrt should fail the partition condition"),
        }
    }

    #[test]
    fn partition_condition_rejects_non_monotone_tables() {
        let f = GrowthFn::Table(vec![1, 3, 2]);
        assert!(check_partition_condition(&f, &[1], &[vec![(1, 1)]]).is_err());
    }
}
