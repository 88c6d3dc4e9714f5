//! The Farey group `Γ = ⟨a, b, c | a² = b² = c² = e⟩ ⊂ PSL(2, ℤ)`.
//!
//! Elements are sign-normalized integer matrices. Every element has a unique
//! reduced word (no two equal adjacent letters) and the word metric is its
//! length. The generators are half-turns about the edges of the ideal
//! triangle `Δₑ = T(0, 1, ∞)`: `gs` is the tile across the edge `g·E(s)`,
//! where `E(a) = {1, ∞}`, `E(b) = {0, ∞}`, `E(c) = {0, 1}`. Right
//! multiplication by a letter therefore walks between neighbouring tiles of
//! the Farey tessellation, and the reduced words of length `n` are the tiles
//! at tree distance `n` from `Δₑ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::arith::{ExtRational, IntMatrix2};
use crate::error::{check_cap, Error, Result};

pub const DEFAULT_SPHERE_CAP: u32 = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::C];

    pub fn matrix(self) -> IntMatrix2 {
        let m = match self {
            Letter::A => IntMatrix2::new(1, -2, 1, -1),
            Letter::B => IntMatrix2::new(0, -1, 1, 0),
            Letter::C => IntMatrix2::new(1, -1, 2, -1),
        };
        m.expect("generators have determinant 1")
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
        }
    }

    fn from_char(ch: char) -> Option<Self> {
        match ch {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            _ => None,
        }
    }
}

/// A reduced word. The identity prints as `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Freely reduces a letter sequence using `s² = e`.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for s in letters {
            if out.last() == Some(&s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        Self(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses any string over `{a, b, c}` (or `e` / empty for the identity)
    /// and reduces it.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "e" || t == "ε" {
            return Ok(Self::identity());
        }
        t.chars()
            .map(|ch| {
                Letter::from_char(ch).ok_or_else(|| Error::Parse {
                    input: s.to_string(),
                    reason: "words are spelled with the letters a, b, c",
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::reduce)
    }
}

/// An ideal triangle of the Farey tessellation, stored by its vertices in
/// increasing order with `∞` last when present.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tile {
    vertices: [ExtRational; 3],
}

impl Tile {
    /// `g · T(0, 1, ∞)`.
    pub fn of(g: &IntMatrix2) -> Self {
        let mut vertices = images_of_base(g);
        vertices.sort();
        Self { vertices }
    }

    pub fn base() -> Self {
        Self::of(&IntMatrix2::identity())
    }

    pub fn vertices(&self) -> &[ExtRational; 3] {
        &self.vertices
    }

    pub fn is_finite(&self) -> bool {
        !self.vertices[2].is_infinite()
    }

    /// `[p, q]` spanned by a tile with finite vertices.
    pub fn span(&self) -> Option<(&ExtRational, &ExtRational)> {
        self.is_finite()
            .then_some((&self.vertices[0], &self.vertices[2]))
    }

    pub fn shared_vertices(&self, other: &Tile) -> usize {
        self.vertices
            .iter()
            .filter(|v| other.vertices.contains(v))
            .count()
    }

    /// The vertex opposite the edge shared with the parent tile (the neighbour
    /// one step closer to `Δₑ`). `None` for `Δₑ` itself.
    fn apex(&self) -> Option<&ExtRational> {
        let [p, r, q] = &self.vertices;
        if !q.is_infinite() {
            return Some(r);
        }
        // T(m, m+1, ∞): the parent lies towards m = 0
        let zero = ExtRational::zero();
        if *p > zero {
            Some(r)
        } else if *r <= zero {
            Some(p)
        } else {
            None
        }
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, r, q] = &self.vertices;
        write!(f, "T({p}, {r}, {q})")
    }
}

/// `[g·0, g·1, g·∞]`, in that order.
fn images_of_base(g: &IntMatrix2) -> [ExtRational; 3] {
    [
        g.apply(&ExtRational::zero()),
        g.apply(&ExtRational::one()),
        g.apply(&ExtRational::infinity()),
    ]
}

/// An element of `Γ`: its normalized matrix and, when known, its reduced
/// word. Equality and hashing use the matrix alone.
#[derive(Clone, Debug)]
pub struct GroupElement {
    matrix: IntMatrix2,
    word: Option<Word>,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for GroupElement {}

impl std::hash::Hash for GroupElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.matrix.hash(state)
    }
}

impl GroupElement {
    pub fn identity() -> Self {
        Self {
            matrix: IntMatrix2::identity(),
            word: Some(Word::identity()),
        }
    }

    pub fn generator(s: Letter) -> Self {
        Self {
            matrix: s.matrix(),
            word: Some(Word(vec![s])),
        }
    }

    pub fn from_word(word: &Word) -> Self {
        let matrix = word
            .letters()
            .iter()
            .fold(IntMatrix2::identity(), |m, s| m.mul(&s.matrix()));
        Self {
            matrix,
            word: Some(word.clone()),
        }
    }

    /// Wraps a matrix without checking membership; `word_of` reports
    /// matrices outside `Γ`.
    pub fn from_matrix(matrix: IntMatrix2) -> Self {
        Self { matrix, word: None }
    }

    pub fn matrix(&self) -> &IntMatrix2 {
        &self.matrix
    }

    pub fn cached_word(&self) -> Option<&Word> {
        self.word.as_ref()
    }

    pub fn multiply(&self, rhs: &Self) -> Self {
        let word = match (&self.word, &rhs.word) {
            (Some(u), Some(v)) => Some(Word::reduce(
                u.letters().iter().chain(v.letters()).copied(),
            )),
            _ => None,
        };
        Self {
            matrix: self.matrix.mul(&rhs.matrix),
            word,
        }
    }

    pub fn times_letter(&self, s: Letter) -> Self {
        self.multiply(&Self::generator(s))
    }

    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        self.matrix.apply(x)
    }

    pub fn tile(&self) -> Tile {
        Tile::of(&self.matrix)
    }

    /// The reduced word, from the cache or by `word_of`.
    pub fn word(&self) -> Result<Word> {
        match &self.word {
            Some(w) => Ok(w.clone()),
            None => word_of(&self.matrix),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.word {
            Some(w) => write!(f, "{w} = {}", self.matrix),
            None => write!(f, "{}", self.matrix),
        }
    }
}

pub fn generator(s: Letter) -> GroupElement {
    GroupElement::generator(s)
}

/// Upper bound on the descent length for `g`. Word length can grow linearly
/// in the entries (`(ab)ᵏ` translates by `k`), so the budget is linear in
/// their magnitude.
fn descent_budget(g: &IntMatrix2) -> u64 {
    let total: BigInt = g.entries().iter().map(|x| x.abs()).sum();
    total
        .to_u64()
        .and_then(|t| t.checked_mul(2))
        .map_or(u64::MAX, |t| t + 8)
}

/// The reduced word of `g`, recovered geometrically.
///
/// The tile of `g` has a unique parent edge facing `Δₑ`; the letter `s` whose
/// edge `g·E(s)` is that parent edge is the last letter of the word, since
/// `gs` is one step closer. Strip it and repeat. A matrix of `PSL(2, ℤ)`
/// outside `Γ` still descends (the tessellation is `PSL(2, ℤ)`-invariant) but
/// arrives at `Δₑ` as a non-identity rotation, which is reported.
pub fn word_of(g: &IntMatrix2) -> Result<Word> {
    let budget = descent_budget(g);
    let mut current = g.clone();
    let mut reversed = Vec::new();
    let mut steps = 0u64;
    loop {
        let tile = Tile::of(&current);
        let Some(apex) = tile.apex() else {
            if current.is_identity() {
                break;
            }
            return Err(Error::NotInGroup);
        };
        let [g0, g1, _] = images_of_base(&current);
        let s = if *apex == g0 {
            Letter::A
        } else if *apex == g1 {
            Letter::B
        } else {
            Letter::C
        };
        current = current.mul(&s.matrix());
        reversed.push(s);
        steps += 1;
        if steps > budget {
            return Err(Error::NotInGroup);
        }
    }
    reversed.reverse();
    Ok(Word(reversed))
}

/// The elements of word length exactly `n`, enumerated depth-first over
/// reduced words in lexicographic order (`a < b < c`). Each element carries
/// its word.
pub struct Sphere {
    radius: usize,
    stack: Vec<(IntMatrix2, Vec<Letter>)>,
}

impl Sphere {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_cap(n, DEFAULT_SPHERE_CAP)
    }

    pub fn with_cap(n: u32, cap: u32) -> Result<Self> {
        Self::with_prefix(&Word::identity(), n, cap)
    }

    /// The part of the sphere whose words start with `prefix`. Spheres split
    /// this way partition cleanly for parallel consumption.
    pub fn with_prefix(prefix: &Word, n: u32, cap: u32) -> Result<Self> {
        check_cap("sphere radius", n.into(), cap.into())?;
        let start = GroupElement::from_word(prefix);
        let stack = if prefix.len() <= n as usize {
            vec![(start.matrix, prefix.letters().to_vec())]
        } else {
            Vec::new()
        };
        Ok(Self {
            radius: n as usize,
            stack,
        })
    }
}

impl Iterator for Sphere {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        while let Some((m, letters)) = self.stack.pop() {
            if letters.len() == self.radius {
                return Some(GroupElement {
                    matrix: m,
                    word: Some(Word(letters)),
                });
            }
            let last = letters.last().copied();
            for s in Letter::ALL.into_iter().rev() {
                if Some(s) == last {
                    continue;
                }
                let mut w = letters.clone();
                w.push(s);
                self.stack.push((m.mul(&s.matrix()), w));
            }
        }
        None
    }
}

/// `|Γₙ| = 3·2ⁿ⁻¹` for `n ≥ 1`, `|Γ₀| = 1`.
pub fn sphere_size(n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        3u64 << (n - 1)
    }
}

/// All prefixes of length `depth` (or the whole sphere's words when
/// `depth ≥ n`), used to split a sphere into independent pieces.
pub fn prefixes(depth: u32) -> Vec<Word> {
    Sphere::with_cap(depth, u32::MAX)
        .expect("uncapped")
        .map(|g| g.word.expect("sphere elements carry words"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use std::collections::HashSet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d).unwrap()
    }

    #[test]
    fn generator_matrices() {
        assert_eq!(generator(Letter::A).matrix(), &m(1, -2, 1, -1));
        assert_eq!(generator(Letter::B).matrix(), &m(0, -1, 1, 0));
        assert_eq!(generator(Letter::C).matrix(), &m(1, -1, 2, -1));
    }

    #[test]
    fn generators_are_involutions() {
        for s in Letter::ALL {
            let g = generator(s);
            let sq = g.multiply(&g);
            assert!(sq.matrix().is_identity());
            assert_eq!(sq.cached_word(), Some(&Word::identity()));
        }
    }

    #[test]
    fn multiply_examples() {
        let ab = generator(Letter::A).multiply(&generator(Letter::B));
        assert_eq!(ab.matrix(), &m(-2, -1, -1, -1));
        assert_eq!(ab.cached_word().unwrap().to_string(), "ab");
        let g = GroupElement::from_word(&w("cab"));
        assert_eq!(g.multiply(&GroupElement::identity()), g);
        assert_eq!(g.multiply(&GroupElement::from_word(&w("bac"))).word().unwrap(), w("e"));
    }

    #[test]
    fn word_parsing_reduces() {
        assert_eq!(w("abba").to_string(), "e");
        assert_eq!(w("abccb").to_string(), "a");
        assert_eq!(w("abcca").to_string(), "aba");
        assert!("abd".parse::<Word>().is_err());
    }

    #[test]
    fn tile_examples() {
        let inf = ExtRational::infinity();
        assert_eq!(Tile::base().vertices(), &[q(0, 1), q(1, 1), inf.clone()]);
        assert_eq!(
            generator(Letter::A).tile().vertices(),
            &[q(1, 1), q(2, 1), inf.clone()]
        );
        assert_eq!(
            generator(Letter::B).tile().vertices(),
            &[q(-1, 1), q(0, 1), inf]
        );
        assert_eq!(
            generator(Letter::C).tile().vertices(),
            &[q(0, 1), q(1, 2), q(1, 1)]
        );
        assert_eq!(generator(Letter::C).tile().to_string(), "T(0, 1/2, 1)");
    }

    #[test]
    fn word_of_examples() {
        assert_eq!(word_of(&IntMatrix2::identity()).unwrap(), Word::identity());
        let ab = generator(Letter::A).multiply(&generator(Letter::B));
        assert_eq!(word_of(ab.matrix()).unwrap(), w("ab"));
    }

    #[test]
    fn word_of_rejects_elements_outside_the_group() {
        // x ↦ x + 1 lies in PSL(2, ℤ) but not in the index-2 subgroup Γ
        assert_eq!(word_of(&m(1, 1, 0, 1)), Err(Error::NotInGroup));
        // order-3 rotation permuting 0, 1, ∞
        assert_eq!(word_of(&m(0, -1, 1, -1)), Err(Error::NotInGroup));
    }

    #[test]
    fn long_translations_descend() {
        let word: Word = "ab".repeat(300).parse().unwrap();
        let g = GroupElement::from_word(&word);
        assert_eq!(word_of(g.matrix()).unwrap(), word);
    }

    #[test]
    fn small_spheres() {
        assert_eq!(Sphere::new(0).unwrap().count(), 1);
        let s1: Vec<String> = Sphere::new(1)
            .unwrap()
            .map(|g| g.word().unwrap().to_string())
            .collect();
        assert_eq!(s1, ["a", "b", "c"]);
        assert_eq!(Sphere::new(5).unwrap().count(), 48);
        assert!(matches!(
            Sphere::new(23),
            Err(Error::CapExceeded { cap: 22, .. })
        ));
    }

    #[test]
    fn sphere_sizes_and_distinct_matrices() {
        for n in 1..=12 {
            let set: HashSet<IntMatrix2> =
                Sphere::new(n).unwrap().map(|g| g.matrix).collect();
            assert_eq!(set.len() as u64, sphere_size(n), "n = {n}");
        }
    }

    #[test]
    fn spheres_are_disjoint() {
        let mut seen = HashSet::new();
        for n in 0..=10 {
            for g in Sphere::new(n).unwrap() {
                assert!(seen.insert(g.matrix), "repeated element at n = {n}");
            }
        }
    }

    #[test]
    fn prefix_split_partitions_the_sphere() {
        let whole: Vec<_> = Sphere::new(7).unwrap().collect();
        let parts: Vec<_> = prefixes(3)
            .iter()
            .flat_map(|p| Sphere::with_prefix(p, 7, 22).unwrap())
            .collect();
        assert_eq!(whole, parts);
    }

    #[test]
    fn word_of_roundtrips_sphere_8() {
        let mut count = 0;
        for g in Sphere::new(8).unwrap() {
            let expected = g.cached_word().unwrap().clone();
            assert_eq!(word_of(g.matrix()).unwrap(), expected);
            count += 1;
        }
        assert_eq!(count, 384);
    }

    #[test]
    fn word_of_roundtrips_all_short_words() {
        for n in 0..=10 {
            for g in Sphere::new(n).unwrap() {
                let bare = GroupElement::from_matrix(g.matrix().clone());
                assert_eq!(&bare.word().unwrap(), g.cached_word().unwrap());
            }
        }
    }

    #[test]
    fn neighbours_share_an_edge() {
        for n in 0..=8 {
            for g in Sphere::new(n).unwrap() {
                let t = g.tile();
                for s in Letter::ALL {
                    let u = g.times_letter(s).tile();
                    assert_eq!(t.shared_vertices(&u), 2, "{g} · {}", s.as_char());
                }
            }
        }
    }
}
