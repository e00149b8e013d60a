//! Cross-module invariants that do not correspond to a single acceptance
//! criterion.

use schreier_growth::factor::{FactorElement, FactorKind, OrbitGraph, OrbitHandle, PointValue};
use schreier_growth::gluing::{
    faithfulness_witness, make_gluing, GluedGraph, GluedPoint, MarkedPiece, OracleMode,
};
use schreier_growth::graph::{self, Graph};
use schreier_growth::grigorchuk::GrigorchukElement;
use schreier_growth::word::{FactorId, ProductSpec, Syllable, SyllableWord};

fn chain_product() -> ProductSpec {
    ProductSpec::free(vec![
        (FactorId(1), FactorKind::Cyclic { m: 12 }),
        (FactorId(2), FactorKind::Cyclic { m: 9 }),
    ])
    .unwrap()
}

fn chain_space(product: &ProductSpec) -> schreier_growth::gluing::GluingSpace {
    let pieces = vec![
        MarkedPiece {
            factor: FactorId(1),
            orbit: OrbitHandle::Cycle(12),
            entry: PointValue::Mod(0),
            exit: PointValue::Mod(6),
        },
        MarkedPiece {
            factor: FactorId(2),
            orbit: OrbitHandle::Cycle(9),
            entry: PointValue::Mod(0),
            exit: PointValue::Mod(4),
        },
        MarkedPiece {
            factor: FactorId(1),
            orbit: OrbitHandle::Cycle(12),
            entry: PointValue::Mod(3),
            exit: PointValue::Mod(9),
        },
    ];
    make_gluing(pieces, product).unwrap()
}

/// Distances measured inside the gluing never beat the in-piece distance,
/// and match it on end pieces.
#[test]
fn piece_embedding_preserves_distances() {
    let product = chain_product();
    let space = chain_space(&product);
    let glued = GluedGraph::new(&space, &product);
    let cap = 1000;
    for piece_idx in 0..space.len() as u32 {
        let piece = &space.pieces()[piece_idx as usize];
        let kind = product.kind(piece.factor).unwrap();
        let orbit_graph = OrbitGraph::new(*kind, piece.orbit).unwrap();
        let vertices = kind.orbit_vertices(&piece.orbit).unwrap();
        for (i, a) in vertices.iter().enumerate() {
            for b in vertices.iter().skip(i + 1) {
                let inside = graph::distance(&orbit_graph, a, b, cap).unwrap().unwrap();
                let ga = space.canonical(piece_idx, a.clone());
                let gb = space.canonical(piece_idx, b.clone());
                let through = graph::distance(&glued, &ga, &gb, cap).unwrap().unwrap();
                assert!(through <= inside, "gluing stretched an in-piece pair");
                if piece_idx == 0 || piece_idx as usize == space.len() - 1 {
                    assert_eq!(through, inside, "end piece must embed isometrically");
                }
            }
        }
    }
}

/// A ball can never exceed the trivial exponential cap
/// `1 + Σ_{k<=n} |S|·(|S|-1)^(k-1)`.
#[test]
fn balls_respect_the_exponential_cap() {
    let product = chain_product();
    let space = chain_space(&product);
    let glued = GluedGraph::new(&space, &product);
    let degree: u64 = product
        .alphabet()
        .factors
        .iter()
        .map(|f| f.generators.len() as u64)
        .sum();
    let start = space.first_entry();
    let sizes = graph::ball_sizes(&glued, &start, 8);
    let mut cap = 1u64;
    let mut layer = degree;
    for (n, size) in sizes.iter().enumerate() {
        if n > 0 {
            cap += layer;
            layer *= degree.saturating_sub(1).max(1);
        }
        assert!(*size as u64 <= cap, "ball of radius {n} broke the cap");
    }
    // And balls are nested.
    for w in sizes.windows(2) {
        assert!(w[0] <= w[1]);
    }
}

/// Controlled-diameter witnesses satisfy the whole-chain inequality
/// `diam(X) <= C·d(e_1, s_q)` from the closure argument, checked exactly.
#[test]
fn cd_witness_chain_diameter_bound() {
    let product = ProductSpec::free(vec![
        (FactorId(1), FactorKind::Grigorchuk),
        (FactorId(2), FactorKind::Integers),
        (FactorId(3), FactorKind::Cyclic { m: 5 }),
    ])
    .unwrap();
    let words: Vec<SyllableWord> = vec![
        SyllableWord::new(vec![
            Syllable { factor: FactorId(2), element: FactorElement::Int(2) },
            Syllable {
                factor: FactorId(1),
                element: FactorElement::Grig(GrigorchukElement::new("ab").unwrap()),
            },
            Syllable { factor: FactorId(3), element: FactorElement::Mod(2) },
        ]),
        SyllableWord::new(vec![
            Syllable { factor: FactorId(3), element: FactorElement::Mod(1) },
            Syllable { factor: FactorId(2), element: FactorElement::Int(-3) },
        ]),
        SyllableWord::new(vec![Syllable {
            factor: FactorId(1),
            element: FactorElement::Grig(GrigorchukElement::new("dac").unwrap()),
        }]),
    ];
    for word in words {
        let witness = faithfulness_witness(&word, &product, OracleMode::ControlledDiameter).unwrap();
        let constants = witness.cd_constants.as_ref().unwrap();
        let space = &witness.space;
        let glued = GluedGraph::new(space, &product);
        // Per piece: diam(X_k) <= C·d(e_k, s_k), measured exactly.
        for (k, piece) in space.pieces().iter().enumerate() {
            let kind = product.kind(piece.factor).unwrap();
            let orbit_graph = OrbitGraph::new(*kind, piece.orbit).unwrap();
            let size = kind.orbit_size(&piece.orbit).unwrap();
            let diam = graph::component_diameter(&orbit_graph, &piece.entry, size).unwrap();
            let moved = graph::distance(&orbit_graph, &piece.entry, &piece.exit, size)
                .unwrap()
                .unwrap();
            assert!(
                diam <= constants[k] * moved,
                "piece {k}: diam {diam} > {} · {moved}",
                constants[k]
            );
        }
        // Whole chain: diam(X) <= max(C)·d(e_1, s_q).
        let c = *constants.iter().max().unwrap();
        let total = space.size(&product).unwrap().unwrap();
        let diam = graph::component_diameter(&glued, &witness.start, total).unwrap();
        let span = graph::distance(&glued, &witness.start, &witness.end, total)
            .unwrap()
            .unwrap();
        assert!(diam <= c * span, "chain: diam {diam} > {c} · {span}");
    }
}

/// The Schreier graph of a gluing has symmetric adjacency: `y` is a
/// neighbor of `x` under `s` iff `x` is one of `y` under `s⁻¹`.
#[test]
fn glued_adjacency_is_symmetric() {
    let product = chain_product();
    let space = chain_space(&product);
    let glued = GluedGraph::new(&space, &product);
    let vertices = glued.vertices().unwrap();
    let mut edges: std::collections::BTreeSet<(GluedPoint, GluedPoint)> =
        std::collections::BTreeSet::new();
    for v in &vertices {
        for (_, w) in glued.neighbors(v) {
            if w != *v {
                edges.insert((v.clone(), w));
            }
        }
    }
    for (v, w) in &edges {
        assert!(edges.contains(&(w.clone(), v.clone())));
    }
}
