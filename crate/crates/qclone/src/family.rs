//! The two recursive function families and the constrained instance sampler.
//!
//! A family at level n consists of five sets of n-bit functions:
//! three candidates for f0 (`s_f0`), two orthogonal blocks of candidates
//! for f1 and f2 (`s1`, `s2`, with `s_f12` their union), and the answer
//! space `s_f` partitioned into 2^n pairs {h, complement(h)} (`h_sets`).
//! A game instance is a triple (f0, f1, f2) with f0 XOR f1 and f0 XOR f2
//! both in `s_f`; that constraint forces f1, f2 into `s1` when f0 is the
//! first representative and into `s2` otherwise.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitfunc::{BoolFunc, MAX_N};
use crate::error::{Error, Result};

/// Base tables for variant A (3-bit blocks, so the family starts at n=3).
const BASE_A_F0: [&str; 3] = ["01000000", "01010101", "11000011"];
const BASE_A_S1: [&str; 8] = [
    "01000000", "10110000", "10001100", "00100110", "00010101", "10000011", "00101001",
    "00011010",
];
const BASE_A_S2: [&str; 8] = [
    "00000000", "00001111", "01010101", "00110011", "10011001", "11000011", "01101001",
    "10100101",
];

/// Base tables for variant B (2-bit blocks, family starts at n=2).
const BASE_B_F0: [&str; 3] = ["0100", "0011", "1001"];
const BASE_B_S1: [&str; 4] = ["0001", "0010", "0100", "1000"];
const BASE_B_S2: [&str; 4] = ["0000", "0011", "0101", "1001"];

/// The two family constructions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
}

impl Variant {
    /// Smallest level the recursion is defined at.
    pub fn base_n(self) -> usize {
        match self {
            Variant::A => 3,
            Variant::B => 2,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
        })
    }
}

/// An unordered pair {h, complement(h)}; the two members produce the same
/// physical state up to a global sign, so guesses are scored at this
/// granularity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct HSet {
    members: [BoolFunc; 2],
}

impl HSet {
    fn pair(h: BoolFunc) -> Self {
        let c = h.complement();
        let members = if c < h { [c, h] } else { [h, c] };
        Self { members }
    }

    /// The lexicographically smaller member, used as the pair's name.
    pub fn canonical(&self) -> &BoolFunc {
        &self.members[0]
    }

    /// Both members, canonical first.
    pub fn members(&self) -> &[BoolFunc; 2] {
        &self.members
    }

    /// Whether `g` is one of the two members.
    pub fn contains(&self, g: &BoolFunc) -> bool {
        self.members[0] == *g || self.members[1] == *g
    }
}

/// A sampled game instance, stored as indices: `f0_idx` into `s_f0`,
/// `f1_idx` and `f2_idx` into `s_f12`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Instance {
    pub f0_idx: usize,
    pub f1_idx: usize,
    pub f2_idx: usize,
}

/// All five function sets of a family at one level, plus lookup caches.
#[derive(Clone, Debug)]
pub struct FamilyBundle {
    variant: Variant,
    n: usize,
    s_f0: Vec<BoolFunc>,
    s1: Vec<BoolFunc>,
    s2: Vec<BoolFunc>,
    /// s1 followed by s2; instance indices point into this list.
    s_f12: Vec<BoolFunc>,
    /// h_sets[i] is the pair containing s2[i].
    h_sets: Vec<HSet>,
    /// Both members of every pair, mapped to the pair index.
    index: HashMap<BoolFunc, usize>,
    /// Per f0 candidate, the s_f12 indices allowed by the XOR constraint.
    allowed_f12: [Vec<usize>; 3],
}

impl FamilyBundle {
    /// Builds the family at level `n` by repeated duplication from the
    /// base tables.
    pub fn build(variant: Variant, n: usize) -> Result<Self> {
        let base = variant.base_n();
        if n < base || n > MAX_N {
            return Err(Error::InvalidN { n, min: base, max: MAX_N });
        }
        let (f0, s1, s2) = base_tables(variant);
        let mut s_f0: Vec<BoolFunc> = parse_all(&f0);
        let mut s1: Vec<BoolFunc> = parse_all(&s1);
        let mut s2: Vec<BoolFunc> = parse_all(&s2);
        for _ in base..n {
            s_f0 = s_f0.iter().map(|h| h.duplicated()).collect::<Result<_>>()?;
            s1 = grow(&s1)?;
            s2 = grow(&s2)?;
        }
        Self::assemble(variant, n, s_f0, s1, s2)
    }

    fn assemble(
        variant: Variant,
        n: usize,
        s_f0: Vec<BoolFunc>,
        s1: Vec<BoolFunc>,
        s2: Vec<BoolFunc>,
    ) -> Result<Self> {
        let h_sets: Vec<HSet> = s2.iter().map(|h| HSet::pair(h.clone())).collect();
        let mut index = HashMap::with_capacity(2 * h_sets.len());
        for (i, pair) in h_sets.iter().enumerate() {
            for member in pair.members() {
                let old = index.insert(member.clone(), i);
                debug_assert!(old.is_none(), "pairs must be disjoint");
            }
        }
        let s_f12: Vec<BoolFunc> = s1.iter().chain(&s2).cloned().collect();
        let allowed = |f0: &BoolFunc| -> Result<Vec<usize>> {
            let mut out = Vec::new();
            for (j, g) in s_f12.iter().enumerate() {
                if index.contains_key(&f0.xor(g)?) {
                    out.push(j);
                }
            }
            Ok(out)
        };
        let allowed_f12 = [allowed(&s_f0[0])?, allowed(&s_f0[1])?, allowed(&s_f0[2])?];
        Ok(Self { variant, n, s_f0, s1, s2, s_f12, h_sets, index, allowed_f12 })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The three f0 candidates; index 0 is the s1-type representative.
    pub fn s_f0(&self) -> &[BoolFunc] {
        &self.s_f0
    }

    pub fn s1(&self) -> &[BoolFunc] {
        &self.s1
    }

    pub fn s2(&self) -> &[BoolFunc] {
        &self.s2
    }

    /// s1 followed by s2.
    pub fn s_f12(&self) -> &[BoolFunc] {
        &self.s_f12
    }

    /// The answer pairs; `h_sets()[i]` contains `s2()[i]`.
    pub fn h_sets(&self) -> &[HSet] {
        &self.h_sets
    }

    pub fn f0(&self, idx: usize) -> &BoolFunc {
        &self.s_f0[idx]
    }

    pub fn f12(&self, idx: usize) -> &BoolFunc {
        &self.s_f12[idx]
    }

    /// Whether an `s_f12` index refers to an element of s1.
    pub fn is_s1_index(&self, idx: usize) -> bool {
        idx < self.s1.len()
    }

    /// The `s_f12` indices the XOR constraint allows as f1/f2 when f0 is
    /// `s_f0[f0_idx]`.
    pub fn allowed_f12(&self, f0_idx: usize) -> &[usize] {
        &self.allowed_f12[f0_idx]
    }

    /// The pair index of `g`, or None if `g` is outside the answer space.
    pub fn h_set_of(&self, g: &BoolFunc) -> Result<Option<usize>> {
        if g.n() != self.n {
            return Err(Error::NMismatch { left: g.n(), right: self.n });
        }
        Ok(self.index.get(g).copied())
    }

    /// Draws (f0, f1, f2): f0 uniform over `s_f0`, then f1 and f2 uniform
    /// over the indices the XOR constraint allows for that f0. With
    /// `distinct_f12` the second draw rejects until it differs. Draw order
    /// is fixed (f0, f1, f2) so a seeded stream replays exactly.
    pub fn sample_instance<R: Rng + ?Sized>(&self, rng: &mut R, distinct_f12: bool) -> Instance {
        let f0_idx = rng.random_range(0..self.s_f0.len());
        let allowed = &self.allowed_f12[f0_idx];
        let f1_idx = allowed[rng.random_range(0..allowed.len())];
        let f2_idx = loop {
            let candidate = allowed[rng.random_range(0..allowed.len())];
            if !distinct_f12 || candidate != f1_idx {
                break candidate;
            }
        };
        Instance { f0_idx, f1_idx, f2_idx }
    }
}

fn base_tables(variant: Variant) -> (Vec<&'static str>, Vec<&'static str>, Vec<&'static str>) {
    match variant {
        Variant::A => (BASE_A_F0.to_vec(), BASE_A_S1.to_vec(), BASE_A_S2.to_vec()),
        Variant::B => (BASE_B_F0.to_vec(), BASE_B_S1.to_vec(), BASE_B_S2.to_vec()),
    }
}

fn parse_all(tables: &[&str]) -> Vec<BoolFunc> {
    tables.iter().map(|s| s.parse().expect("base tables are valid")).collect()
}

/// One recursion step for s1/s2: each table contributes its duplication
/// and its complement-prefix duplication.
fn grow(set: &[BoolFunc]) -> Result<Vec<BoolFunc>> {
    let mut out = Vec::with_capacity(2 * set.len());
    for h in set {
        out.push(h.duplicated()?);
        out.push(h.duplicated_complement()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(s: &str) -> BoolFunc {
        s.parse().unwrap()
    }

    #[test]
    fn base_a_matches_listing() {
        let fam = FamilyBundle::build(Variant::A, 3).unwrap();
        assert_eq!(fam.s_f0(), &[f("01000000"), f("01010101"), f("11000011")]);
        assert_eq!(fam.s2()[0], f("00000000"));
        assert_eq!(fam.s2()[5], f("11000011"));
        assert_eq!(fam.s1().len(), 8);
        assert_eq!(fam.s2().len(), 8);
        assert_eq!(fam.h_sets().len(), 8);
        assert_eq!(fam.s_f12().len(), 16);
    }

    #[test]
    fn base_b_matches_listing() {
        let fam = FamilyBundle::build(Variant::B, 2).unwrap();
        assert_eq!(fam.s_f0(), &[f("0100"), f("0011"), f("1001")]);
        assert_eq!(fam.s1(), &[f("0001"), f("0010"), f("0100"), f("1000")]);
        assert_eq!(fam.s2(), &[f("0000"), f("0011"), f("0101"), f("1001")]);
    }

    #[test]
    fn h_sets_pair_complements() {
        let fam = FamilyBundle::build(Variant::A, 3).unwrap();
        let pair = &fam.h_sets()[1];
        assert!(pair.contains(&f("00001111")));
        assert!(pair.contains(&f("11110000")));
        assert_eq!(pair.canonical(), &f("00001111"));
    }

    #[test]
    fn h_set_lookup() {
        let fam = FamilyBundle::build(Variant::A, 3).unwrap();
        let i = fam.h_set_of(&f("11110000")).unwrap().unwrap();
        assert!(fam.h_sets()[i].contains(&f("00001111")));
        assert_eq!(fam.h_set_of(&f("00000000")).unwrap(), Some(0));
        assert_eq!(fam.h_set_of(&f("00010101")).unwrap(), None);
        assert!(fam.h_set_of(&f("0100")).is_err());
    }

    #[test]
    fn xor_lands_in_answer_space() {
        let fam = FamilyBundle::build(Variant::A, 3).unwrap();
        let g = f("01000000").xor(&f("10110000")).unwrap();
        assert_eq!(g, f("11110000"));
        assert!(fam.h_set_of(&g).unwrap().is_some());
    }

    #[test]
    fn growth_counts() {
        let fam = FamilyBundle::build(Variant::A, 4).unwrap();
        assert_eq!(fam.s1().len(), 16);
        assert_eq!(fam.s2().len(), 16);
        assert_eq!(fam.h_sets().len(), 16);
        assert_eq!(fam.s_f12().len(), 32);
        assert!(FamilyBundle::build(Variant::A, 2).is_err());
        assert!(FamilyBundle::build(Variant::B, 15).is_err());
    }

    #[test]
    fn f0_recursion_repeats_blocks() {
        let fam = FamilyBundle::build(Variant::A, 5).unwrap();
        let repeated: String = "01010101".repeat(4);
        assert_eq!(fam.f0(1), &f(&repeated));
    }

    #[test]
    fn allowed_sets_split_by_f0_type() {
        for (variant, n) in [(Variant::A, 3), (Variant::A, 5), (Variant::B, 2), (Variant::B, 4)] {
            let fam = FamilyBundle::build(variant, n).unwrap();
            let m = fam.s1().len();
            let s1_indices: Vec<usize> = (0..m).collect();
            let s2_indices: Vec<usize> = (m..2 * m).collect();
            assert_eq!(fam.allowed_f12[0], s1_indices);
            assert_eq!(fam.allowed_f12[1], s2_indices);
            assert_eq!(fam.allowed_f12[2], s2_indices);
        }
    }

    #[test]
    fn sampler_respects_constraint_and_distinct_flag() {
        let fam = FamilyBundle::build(Variant::B, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut saw_s1 = false;
        let mut saw_s2 = false;
        for _ in 0..2000 {
            let inst = fam.sample_instance(&mut rng, false);
            for idx in [inst.f1_idx, inst.f2_idx] {
                let g = fam.f0(inst.f0_idx).xor(fam.f12(idx)).unwrap();
                assert!(fam.h_set_of(&g).unwrap().is_some());
            }
            if inst.f0_idx == 0 {
                saw_s1 = true;
                assert!(fam.is_s1_index(inst.f1_idx));
            } else {
                saw_s2 = true;
                assert!(!fam.is_s1_index(inst.f1_idx));
            }
        }
        assert!(saw_s1 && saw_s2);
        for _ in 0..2000 {
            let inst = fam.sample_instance(&mut rng, true);
            assert_ne!(inst.f1_idx, inst.f2_idx);
        }
    }
}
