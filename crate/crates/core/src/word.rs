//! Graph-product words and their normal form.
//!
//! A [`ProductSpec`] fixes the factor groups and the commutation map `c` on
//! unordered pairs of factor ids. A [`SyllableWord`] is a list of syllables
//! in application order: index 0 acts first.
//!
//! `reduce_to_normal_form` computes the shuffle normal form by a left-greedy
//! pile: each syllable is inserted as far left as commutation allows, merging
//! with (or cancelling against) a same-factor syllable when it can reach one.
//! The result is the minimal-length decomposition, with commuting adjacent
//! syllables sorted by factor id so the representative is canonical.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{FactorElement, FactorKind};

/// Identifier of a factor within a product.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct FactorId(pub u32);

impl std::fmt::Display for FactorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One syllable: a factor id and an element of that factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub factor: FactorId,
    pub element: FactorElement,
}

/// A word in the graph product, syllables in application order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SyllableWord {
    pub syllables: Vec<Syllable>,
    normal: bool,
}

impl SyllableWord {
    pub fn new(syllables: Vec<Syllable>) -> Self {
        SyllableWord { syllables, normal: false }
    }

    pub fn empty() -> Self {
        SyllableWord::default()
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Formal inverse: inverted syllables in reverse order.
    pub fn inverse(&self, product: &ProductSpec) -> Result<SyllableWord> {
        let mut syllables = Vec::with_capacity(self.len());
        for s in self.syllables.iter().rev() {
            let kind = product.kind(s.factor)?;
            syllables.push(Syllable { factor: s.factor, element: kind.invert(&s.element) });
        }
        Ok(SyllableWord::new(syllables))
    }

    /// Concatenation acting as `other` first, then `self`.
    pub fn after(&self, other: &SyllableWord) -> SyllableWord {
        let mut syllables = other.syllables.clone();
        syllables.extend(self.syllables.iter().cloned());
        SyllableWord::new(syllables)
    }
}

/// The factors of a product and the commutation map on unordered pairs.
#[derive(Debug, Clone)]
pub struct ProductSpec {
    factors: BTreeMap<FactorId, FactorKind>,
    commuting: BTreeSet<(FactorId, FactorId)>,
}

impl ProductSpec {
    /// Free product of the given factors: `c ≡ 0`.
    pub fn free(factors: Vec<(FactorId, FactorKind)>) -> Result<Self> {
        ProductSpec::new(factors, vec![])
    }

    pub fn new(
        factors: Vec<(FactorId, FactorKind)>,
        commuting_pairs: Vec<(FactorId, FactorId)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, kind) in factors {
            kind.validate()?;
            if map.insert(id, kind).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate factor id {id}")));
            }
        }
        let mut commuting = BTreeSet::new();
        for (i, j) in commuting_pairs {
            if i == j {
                return Err(Error::InvalidArgument(format!(
                    "commutation map has no diagonal entries, got ({i},{j})"
                )));
            }
            if !map.contains_key(&i) {
                return Err(Error::UnknownFactor(i));
            }
            if !map.contains_key(&j) {
                return Err(Error::UnknownFactor(j));
            }
            commuting.insert((i.min(j), i.max(j)));
        }
        Ok(ProductSpec { factors: map, commuting })
    }

    pub fn ids(&self) -> Vec<FactorId> {
        self.factors.keys().copied().collect()
    }

    pub fn kind(&self, id: FactorId) -> Result<&FactorKind> {
        self.factors.get(&id).ok_or(Error::UnknownFactor(id))
    }

    /// `c(i, j) = 1`?
    pub fn commutes(&self, i: FactorId, j: FactorId) -> bool {
        i != j && self.commuting.contains(&(i.min(j), i.max(j)))
    }

    pub fn commuting_pairs(&self) -> Vec<(FactorId, FactorId)> {
        self.commuting.iter().copied().collect()
    }

    pub fn alphabet(&self) -> GeneratorAlphabet {
        GeneratorAlphabet {
            factors: self
                .factors
                .iter()
                .map(|(id, kind)| FactorGenerators {
                    factor: *id,
                    generators: kind.generators(),
                    inverse: kind.generator_inverses(),
                })
                .collect(),
        }
    }
}

/// Per-factor symmetric generating lists with inverse pairing.
#[derive(Debug, Clone)]
pub struct GeneratorAlphabet {
    pub factors: Vec<FactorGenerators>,
}

#[derive(Debug, Clone)]
pub struct FactorGenerators {
    pub factor: FactorId,
    pub generators: Vec<FactorElement>,
    /// `inverse[i]` is the index of the inverse of generator `i`.
    pub inverse: Vec<usize>,
}

impl GeneratorAlphabet {
    pub fn total_generators(&self) -> usize {
        self.factors.iter().map(|f| f.generators.len()).sum()
    }
}

/// Left-greedy pile reduction to the canonical normal form.
///
/// The output represents the same element, has minimal syllable length, is
/// empty iff the element is trivial, and is invariant under legal shuffles
/// of the input.
pub fn reduce_to_normal_form(word: &SyllableWord, product: &ProductSpec) -> Result<SyllableWord> {
    for s in &word.syllables {
        product.kind(s.factor)?;
    }
    let mut items: Vec<Syllable> = word.syllables.clone();
    loop {
        let mut out: Vec<Syllable> = Vec::with_capacity(items.len());
        let mut merged = false;
        'next: for syll in items.into_iter() {
            let kind = product.kind(syll.factor)?;
            if kind.is_identity(&syll.element) {
                merged = true;
                continue;
            }
            // Walk left over the pile while commutation allows.
            let mut reach = out.len();
            while reach > 0 {
                let prev = &out[reach - 1];
                if prev.factor == syll.factor {
                    // `syll` acts after `prev`: merge or cancel.
                    let combined = kind.compose(&syll.element, &prev.element);
                    merged = true;
                    if kind.is_identity(&combined) {
                        out.remove(reach - 1);
                    } else {
                        out[reach - 1].element = combined;
                    }
                    continue 'next;
                }
                if product.commutes(prev.factor, syll.factor) {
                    reach -= 1;
                } else {
                    break;
                }
            }
            // Canonical position: lexicographically least choice within the
            // commuting window, i.e. just before the first larger factor id.
            let at = (reach..out.len())
                .find(|&idx| out[idx].factor > syll.factor)
                .unwrap_or(out.len());
            out.insert(at, syll);
        }
        items = out;
        if !merged {
            return Ok(SyllableWord { syllables: items, normal: true });
        }
    }
}

/// Element-wise equality of two words syllable by syllable.
pub fn words_equal(a: &SyllableWord, b: &SyllableWord, product: &ProductSpec) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    for (x, y) in a.syllables.iter().zip(&b.syllables) {
        if x.factor != y.factor {
            return Ok(false);
        }
        let kind = product.kind(x.factor)?;
        if !kind.elements_equal(&x.element, &y.element) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn two_cyclic_product(commute: bool) -> ProductSpec {
        let factors = vec![
            (FactorId(1), FactorKind::Cyclic { m: 6 }),
            (FactorId(2), FactorKind::Cyclic { m: 5 }),
        ];
        let pairs = if commute { vec![(FactorId(1), FactorId(2))] } else { vec![] };
        ProductSpec::new(factors, pairs).unwrap()
    }

    fn syll(factor: u32, element: FactorElement) -> Syllable {
        Syllable { factor: FactorId(factor), element }
    }

    #[test]
    fn commuting_syllables_cancel_across() {
        let product = two_cyclic_product(true);
        let word = SyllableWord::new(vec![
            syll(1, FactorElement::Mod(2)),
            syll(2, FactorElement::Mod(3)),
            syll(1, FactorElement::Mod(4)),
        ]);
        let nf = reduce_to_normal_form(&word, &product).unwrap();
        assert_eq!(nf.len(), 1);
        assert_eq!(nf.syllables[0].factor, FactorId(2));
        assert_eq!(nf.syllables[0].element, FactorElement::Mod(3));
    }

    #[test]
    fn empty_word_stays_empty() {
        let product = two_cyclic_product(false);
        let nf = reduce_to_normal_form(&SyllableWord::empty(), &product).unwrap();
        assert!(nf.is_empty() && nf.is_normal());
    }

    #[test]
    fn non_commuting_word_already_reduced() {
        let product = two_cyclic_product(false);
        let word = SyllableWord::new(vec![
            syll(1, FactorElement::Mod(2)),
            syll(2, FactorElement::Mod(3)),
        ]);
        let nf = reduce_to_normal_form(&word, &product).unwrap();
        assert_eq!(nf.len(), 2);
        assert_eq!(nf.syllables[0].factor, FactorId(1));
        assert_eq!(nf.syllables[1].factor, FactorId(2));
    }

    #[test]
    fn unknown_factor_is_a_configuration_error() {
        let product = two_cyclic_product(false);
        let word = SyllableWord::new(vec![syll(9, FactorElement::Mod(1))]);
        assert!(matches!(
            reduce_to_normal_form(&word, &product),
            Err(Error::UnknownFactor(FactorId(9)))
        ));
    }

    fn random_product(rng: &mut impl Rng) -> ProductSpec {
        let factors = vec![
            (FactorId(1), FactorKind::Cyclic { m: 6 }),
            (FactorId(2), FactorKind::Cyclic { m: 5 }),
            (FactorId(3), FactorKind::Integers),
            (FactorId(4), FactorKind::Cyclic { m: 2 }),
        ];
        let mut pairs = vec![];
        for i in 1..=4u32 {
            for j in (i + 1)..=4 {
                if rng.gen_bool(0.4) {
                    pairs.push((FactorId(i), FactorId(j)));
                }
            }
        }
        ProductSpec::new(factors, pairs).unwrap()
    }

    fn random_word(rng: &mut impl Rng, product: &ProductSpec, len: usize) -> SyllableWord {
        let ids = product.ids();
        let syllables = (0..len)
            .map(|_| {
                let id = ids[rng.gen_range(0..ids.len())];
                let element = match product.kind(id).unwrap() {
                    FactorKind::Cyclic { m } => FactorElement::Mod(rng.gen_range(0..*m)),
                    FactorKind::Integers => FactorElement::Int(rng.gen_range(-3..=3)),
                    _ => unreachable!(),
                };
                Syllable { factor: id, element }
            })
            .collect();
        SyllableWord::new(syllables)
    }

    #[test]
    fn word_times_inverse_reduces_to_empty() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let product = random_product(&mut rng);
            let len = rng.gen_range(0..8);
            let w = random_word(&mut rng, &product, len);
            let winv = w.inverse(&product).unwrap();
            let nf = reduce_to_normal_form(&winv.after(&w), &product).unwrap();
            assert!(nf.is_empty(), "w·w⁻¹ must be trivial");
        }
    }

    /// Applies a random sequence of legal adjacent swaps of commuting
    /// syllables.
    fn legal_shuffle(
        rng: &mut impl Rng,
        product: &ProductSpec,
        word: &SyllableWord,
    ) -> SyllableWord {
        let mut syllables = word.syllables.clone();
        for _ in 0..3 * syllables.len() {
            if syllables.len() < 2 {
                break;
            }
            let i = rng.gen_range(0..syllables.len() - 1);
            if product.commutes(syllables[i].factor, syllables[i + 1].factor) {
                syllables.swap(i, i + 1);
            }
        }
        SyllableWord::new(syllables)
    }

    #[test]
    fn normal_form_is_shuffle_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..500 {
            let product = random_product(&mut rng);
            let len = rng.gen_range(0..10);
            let w = random_word(&mut rng, &product, len);
            let shuffled = legal_shuffle(&mut rng, &product, &w);
            let nf1 = reduce_to_normal_form(&w, &product).unwrap();
            let nf2 = reduce_to_normal_form(&shuffled, &product).unwrap();
            assert!(words_equal(&nf1, &nf2, &product).unwrap());
            // For these factor kinds elements are structurally canonical,
            // so the representatives agree on the nose.
            assert_eq!(nf1.syllables, nf2.syllables);
        }
    }

    #[test]
    fn normal_form_is_idempotent_and_minimal_on_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..300 {
            let product = random_product(&mut rng);
            let len = rng.gen_range(0..10);
            let w = random_word(&mut rng, &product, len);
            let nf = reduce_to_normal_form(&w, &product).unwrap();
            let again = reduce_to_normal_form(&nf, &product).unwrap();
            assert_eq!(nf.syllables, again.syllables);
            // No identity syllables, and no same-factor pair separated only
            // by commuting syllables (the minimality criterion).
            for s in &nf.syllables {
                assert!(!product.kind(s.factor).unwrap().is_identity(&s.element));
            }
            for i in 0..nf.syllables.len() {
                for j in (i + 1)..nf.syllables.len() {
                    if nf.syllables[i].factor == nf.syllables[j].factor {
                        let all_commute = (i + 1..j).all(|k| {
                            product.commutes(nf.syllables[k].factor, nf.syllables[i].factor)
                        });
                        assert!(!all_commute, "mergeable pair survived at ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn alphabet_is_closed_under_inversion() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        let product = random_product(&mut rng);
        let alphabet = product.alphabet();
        assert_eq!(alphabet.factors.len(), 4);
        for f in &alphabet.factors {
            let kind = product.kind(f.factor).unwrap();
            for (i, &j) in f.inverse.iter().enumerate() {
                assert_eq!(f.inverse[j], i);
                assert!(kind.is_identity(&kind.compose(&f.generators[i], &f.generators[j])));
            }
        }
        let _ = alphabet.total_generators();
    }

    #[test]
    fn spec_validation_errors() {
        let dup = ProductSpec::new(
            vec![
                (FactorId(1), FactorKind::Integers),
                (FactorId(1), FactorKind::Integers),
            ],
            vec![],
        );
        assert!(dup.is_err());
        let diag = ProductSpec::new(
            vec![(FactorId(1), FactorKind::Integers)],
            vec![(FactorId(1), FactorId(1))],
        );
        assert!(diag.is_err());
        let missing = ProductSpec::new(
            vec![(FactorId(1), FactorKind::Integers)],
            vec![(FactorId(1), FactorId(2))],
        );
        assert!(matches!(missing, Err(Error::UnknownFactor(FactorId(2)))));
    }

    #[test]
    fn shuffle_helper_uses_slice_random_for_order_independence() {
        // Permutation invariance of ProductSpec construction inputs.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        let mut factors = vec![
            (FactorId(1), FactorKind::Cyclic { m: 6 }),
            (FactorId(2), FactorKind::Cyclic { m: 5 }),
            (FactorId(3), FactorKind::Integers),
        ];
        factors.shuffle(&mut rng);
        let product = ProductSpec::new(factors, vec![(FactorId(3), FactorId(1))]).unwrap();
        assert_eq!(product.ids(), vec![FactorId(1), FactorId(2), FactorId(3)]);
        assert!(product.commutes(FactorId(1), FactorId(3)));
        assert!(!product.commutes(FactorId(2), FactorId(3)));
    }
}
