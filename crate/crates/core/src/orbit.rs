//! Orbit statistics of `Γ` acting on `ℝ ∪ {∞}`.
//!
//! `Sₙ(𝟙_A, x) = #{γ ∈ Γₙ : γx ∈ A}` counts sphere orbit points in an arc.
//! Normalized by `|Γₙ|` it converges to the `?̄` measure of the arc. The
//! same measure is the limit of `μ^{*n} * δₓ` for the uniform walk on
//! `{a, b, c}`: under that walk the word length is a birth–death chain and
//! the mass of each element depends only on its length, so the
//! `n`-step law is a mixture of uniform sphere measures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{Arc, ExtRational, IntMatrix2};
use crate::error::{check_cap, Result};
use crate::group::{prefixes, sphere_size, GroupElement, Letter, Sphere, Tile, Word, DEFAULT_SPHERE_CAP};
use crate::minkowski::measure_arc;

/// Spheres are split into `3·2^(d−1)` prefix blocks of depth `d` for
/// parallel enumeration.
const SPLIT_DEPTH: u32 = 6;

fn split(n: u32) -> Vec<Word> {
    prefixes(n.min(SPLIT_DEPTH))
}

/// The multiset `Γₙ · x` together with the words producing each point, in
/// lexicographic word order.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    base: ExtRational,
    level: u32,
    points: Vec<(Word, ExtRational)>,
}

impl OrbitTable {
    pub fn new(base: ExtRational, level: u32) -> Result<Self> {
        Self::with_cap(base, level, DEFAULT_SPHERE_CAP)
    }

    pub fn with_cap(base: ExtRational, level: u32, cap: u32) -> Result<Self> {
        check_cap("sphere radius", level.into(), cap.into())?;
        let points = split(level)
            .par_iter()
            .map(|p| {
                Sphere::with_prefix(p, level, cap)
                    .expect("cap checked")
                    .map(|g| {
                        let x = g.apply(&base);
                        (g.cached_word().cloned().expect("sphere words"), x)
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect();
        Ok(Self {
            base,
            level,
            points,
        })
    }

    pub fn base(&self) -> &ExtRational {
        &self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn points(&self) -> &[(Word, ExtRational)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count_in(&self, arc: &Arc) -> u64 {
        self.points.iter().filter(|(_, x)| arc.contains(x)).count() as u64
    }

    /// Number of orbit points `≤ t` in the order that cuts the circle at `∞`.
    pub fn count_at_most(&self, t: &ExtRational) -> u64 {
        self.points.iter().filter(|(_, x)| x <= t).count() as u64
    }
}

/// `Sₙ(𝟙_A, base)`: how many `γ ∈ Γₙ` send `base` into the closed arc `A`.
pub fn sphere_count_in_arc(n: u32, arc: &Arc, base: &ExtRational) -> Result<u64> {
    sphere_count_in_arc_capped(n, arc, base, DEFAULT_SPHERE_CAP)
}

pub fn sphere_count_in_arc_capped(n: u32, arc: &Arc, base: &ExtRational, cap: u32) -> Result<u64> {
    check_cap("sphere radius", n.into(), cap.into())?;
    Ok(split(n)
        .par_iter()
        .map(|p| {
            Sphere::with_prefix(p, n, cap)
                .expect("cap checked")
                .filter(|g| arc.contains(&g.apply(base)))
                .count() as u64
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitRow {
    pub n: u32,
    pub count: u64,
    /// `count / |Γₙ|`, reduced.
    pub ratio: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitTable {
    pub arc: Arc,
    pub base: ExtRational,
    pub rows: Vec<LimitRow>,
    /// The `?̄` measure of the arc, the limit of the ratios.
    pub target: BigRational,
}

/// `Sₙ(𝟙_A, base) / |Γₙ|` for `n = 1..=n_max`, with the limiting value.
pub fn word_limit_table(arc: &Arc, base: &ExtRational, n_max: u32) -> Result<LimitTable> {
    word_limit_table_capped(arc, base, n_max, DEFAULT_SPHERE_CAP)
}

pub fn word_limit_table_capped(
    arc: &Arc,
    base: &ExtRational,
    n_max: u32,
    cap: u32,
) -> Result<LimitTable> {
    check_cap("sphere radius", n_max.into(), cap.into())?;
    let rows = (1..=n_max)
        .map(|n| {
            let count = sphere_count_in_arc_capped(n, arc, base, cap)?;
            let ratio = BigRational::new(count.into(), sphere_size(n).into());
            Ok(LimitRow { n, count, ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitTable {
        arc: arc.clone(),
        base: base.clone(),
        rows,
        target: measure_arc(arc)?,
    })
}

/// The law `Pₙ(m)` of the word length after `n` steps of the uniform walk on
/// `{a, b, c}` started at `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceDistribution {
    step: u32,
    mass: Vec<BigRational>,
}

impl DistanceDistribution {
    pub fn step(&self) -> u32 {
        self.step
    }

    /// `Pₙ(m)`; zero outside `0..=n`.
    pub fn mass(&self, m: u32) -> BigRational {
        self.mass
            .get(m as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `μ^{*n}(γ)` for any single `γ` of length `m`: `Pₙ(m) / |Γₘ|`.
    pub fn per_element(&self, m: u32) -> BigRational {
        self.mass(m) / BigInt::from(sphere_size(m))
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.mass
    }

    pub fn total(&self) -> BigRational {
        self.mass.iter().sum()
    }
}

/// `P₀ = δ₀` and `Pₖ₊₁(m) = Pₖ(0)·[m = 1] + ⅔·Pₖ(m−1)·[m ≥ 2] + ⅓·Pₖ(m+1)`:
/// from the identity every letter moves away; otherwise one of the three
/// letters cancels the last one.
pub fn distance_distribution(n: u32) -> DistanceDistribution {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let two_thirds = &third + &third;
    let mut mass = vec![BigRational::one()];
    for k in 0..n {
        let mut next = vec![BigRational::zero(); k as usize + 2];
        for (m, p) in mass.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if m == 0 {
                next[1] += p;
            } else {
                next[m + 1] += &two_thirds * p;
                next[m - 1] += &third * p;
            }
        }
        mass = next;
    }
    DistanceDistribution { step: n, mass }
}

/// True for the vertices of `Δₑ`, whose orbits sit on tile vertices and can be
/// counted without enumeration.
fn is_tile_vertex(x: &ExtRational) -> bool {
    *x == ExtRational::zero() || *x == ExtRational::one() || x.is_infinite()
}

/// `#{γ ∈ Γₘ : γ·base ≤ t}` for `base ∈ {0, 1, ∞}`, pruning whole subtrees.
///
/// Below a tile with finite vertices `p < r < q` every descendant tile lies
/// in `[p, q]` and every orbit point is one of its vertices, so a subtree at
/// depth `d` contributes `2^{m−d}` when `q ≤ t` and nothing when `p > t`.
/// Only the `O(m)` nodes whose span straddles `t` are expanded.
fn count_at_most_pruned(m: u32, base: &ExtRational, t: &ExtRational) -> BigInt {
    fn visit(
        g: &IntMatrix2,
        last: Option<Letter>,
        depth: u32,
        m: u32,
        base: &ExtRational,
        t: &ExtRational,
    ) -> BigInt {
        if depth == m {
            return if g.apply(base) <= *t {
                BigInt::one()
            } else {
                BigInt::zero()
            };
        }
        if let Some((p, q)) = Tile::of(g).span() {
            if q <= t {
                return BigInt::one() << (m - depth);
            }
            if p > t {
                return BigInt::zero();
            }
        }
        Letter::ALL
            .into_iter()
            .filter(|&s| Some(s) != last)
            .map(|s| visit(&g.mul(&s.matrix()), Some(s), depth + 1, m, base, t))
            .sum()
    }
    debug_assert!(is_tile_vertex(base));
    visit(&IntMatrix2::identity(), None, 0, m, base, t)
}

/// Distribution function of `μ^{*n} * δ_{x₀}` at each query point, where
/// `μ` is uniform on `{a, b, c}`:
///
/// ```text
/// F(t) = Σₘ Pₙ(m) · #{γ ∈ Γₘ : γ·x₀ ≤ t} / |Γₘ|
/// ```
///
/// The circle is cut at `∞`: orbit points at `∞` count only at `t = ∞`.
pub fn convolution_cdf(
    n: u32,
    x0: &ExtRational,
    points: &[ExtRational],
) -> Result<Vec<BigRational>> {
    convolution_cdf_capped(n, x0, points, DEFAULT_SPHERE_CAP)
}

pub fn convolution_cdf_capped(
    n: u32,
    x0: &ExtRational,
    points: &[ExtRational],
    cap: u32,
) -> Result<Vec<BigRational>> {
    check_cap("walk length", n.into(), cap.into())?;
    let dist = distance_distribution(n);
    let levels: Vec<u32> = (0..=n).filter(|&m| !dist.mass(m).is_zero()).collect();
    // fractions[i][j] = #{γ ∈ Γ_{levels[i]} : γ·x0 ≤ points[j]} / |Γ_m|
    let fractions: Vec<Vec<BigRational>> = if is_tile_vertex(x0) {
        levels
            .par_iter()
            .map(|&m| {
                points
                    .iter()
                    .map(|t| {
                        BigRational::new(count_at_most_pruned(m, x0, t), sphere_size(m).into())
                    })
                    .collect()
            })
            .collect()
    } else {
        levels
            .iter()
            .map(|&m| {
                let table = OrbitTable::with_cap(x0.clone(), m, cap)?;
                Ok(points
                    .iter()
                    .map(|t| {
                        BigRational::new(table.count_at_most(t).into(), sphere_size(m).into())
                    })
                    .collect())
            })
            .collect::<Result<_>>()?
    };
    Ok((0..points.len())
        .map(|j| {
            levels
                .iter()
                .zip(&fractions)
                .map(|(&m, row)| dist.mass(m) * &row[j])
                .sum()
        })
        .collect())
}

/// The two sides of the stationarity identity for `?̄`:
/// `lhs = ⅓(μ(aA) + μ(bA) + μ(cA))`, `rhs = μ(A)`. The generators are
/// involutions, so `s⁻¹A = sA`.
pub fn stationarity_check(arc: &Arc) -> Result<(BigRational, BigRational)> {
    let images = Letter::ALL
        .into_iter()
        .map(|s| measure_arc(&arc.image(&s.matrix())))
        .collect::<Result<Vec<_>>>()?;
    let lhs = images.into_iter().sum::<BigRational>() / BigInt::from(3);
    Ok((lhs, measure_arc(arc)?))
}

/// The element of `Γ` whose tile is `T(p, p ⊕ q, q)` for a Farey pair
/// `p < q` lying in some `[m, m+1]`, found by descending from `Δₑ`.
pub fn tile_element(p: &ExtRational, q: &ExtRational) -> Option<GroupElement> {
    let target = {
        let mut v = [p.clone(), p.mediant(q), q.clone()];
        v.sort();
        v
    };
    let mut g = GroupElement::identity();
    let mut last: Option<Letter> = None;
    loop {
        let tile = g.tile();
        if tile.vertices() == &target {
            return Some(g);
        }
        let next = Letter::ALL
            .into_iter()
            .filter(|&s| Some(s) != last)
            .map(|s| (s, g.times_letter(s)))
            .find(|(_, h)| {
                let t = h.tile();
                match t.span() {
                    Some((lo, hi)) => lo <= p && q <= hi,
                    // tiles T(k, k+1, ∞) lead towards [k, k+1]
                    None => {
                        let [lo, hi, _] = t.vertices();
                        (lo <= p && q <= hi)
                            || (lo > &ExtRational::zero() && lo <= p)
                            || (hi <= &ExtRational::zero() && q <= hi)
                    }
                }
            })?;
        last = Some(next.0);
        g = next.1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use num_traits::Signed;

    fn arc(s: &str) -> Arc {
        s.parse().unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn count_examples() {
        assert_eq!(sphere_count_in_arc(1, &arc("0..1"), &q(0, 1)).unwrap(), 1);
        assert_eq!(sphere_count_in_arc(0, &arc("0..1"), &q(0, 1)).unwrap(), 1);
        assert!(sphere_count_in_arc(23, &arc("0..1"), &q(0, 1)).is_err());
    }

    #[test]
    fn orbit_table_matches_direct_count() {
        let base = q(1, 3);
        for n in 0..=7 {
            let table = OrbitTable::new(base.clone(), n).unwrap();
            assert_eq!(table.len() as u64, sphere_size(n));
            for a in ["0..1", "1..0", "-2..1/2", "1/3..1/2"] {
                let a = arc(a);
                assert_eq!(
                    table.count_in(&a),
                    sphere_count_in_arc(n, &a, &base).unwrap()
                );
            }
        }
    }

    #[test]
    fn limit_table_examples() {
        let t = word_limit_table(&arc("0..1"), &q(0, 1), 10).unwrap();
        assert_eq!(t.target, r(1, 3));
        assert_eq!(t.rows.len(), 10);
        let last = &t.rows[9];
        assert!((&last.ratio - &t.target).abs() <= r(2, 3 * 512));
        let t = word_limit_table(&arc("1/3..1/2"), &q(0, 1), 10).unwrap();
        assert_eq!(t.target, r(1, 12));
    }

    #[test]
    fn distribution_examples() {
        let d1 = distance_distribution(1);
        assert_eq!(d1.masses(), &[r(0, 1), r(1, 1)]);
        let d2 = distance_distribution(2);
        assert_eq!(d2.mass(0), r(1, 3));
        assert_eq!(d2.mass(1), r(0, 1));
        assert_eq!(d2.mass(2), r(2, 3));
        let d3 = distance_distribution(3);
        assert_eq!(d3.mass(1), r(5, 9));
        assert_eq!(d3.mass(3), r(4, 9));
        assert_eq!(d3.total(), r(1, 1));
    }

    // Oracle: push the uniform walk through all 3ⁿ letter sequences.
    #[test]
    fn distribution_matches_brute_force_walks() {
        for n in 0..=9u32 {
            let mut counts = vec![0u64; n as usize + 1];
            for code in 0..3u64.pow(n) {
                let mut c = code;
                let letters = (0..n).map(|_| {
                    let s = Letter::ALL[(c % 3) as usize];
                    c /= 3;
                    s
                });
                counts[Word::reduce(letters).len()] += 1;
            }
            let dist = distance_distribution(n);
            for (m, &k) in counts.iter().enumerate() {
                assert_eq!(dist.mass(m as u32), r(k as i64, 3i64.pow(n)), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn distribution_invariants() {
        for n in 0..=30 {
            let d = distance_distribution(n);
            assert_eq!(d.total(), r(1, 1));
            let weighted: BigRational = (0..=n)
                .map(|m| d.per_element(m) * BigInt::from(sphere_size(m)))
                .sum();
            assert_eq!(weighted, r(1, 1));
            for m in 0..=n {
                let p = d.mass(m);
                assert!(p >= r(0, 1));
                if (n - m) % 2 == 1 {
                    assert!(p.is_zero());
                }
            }
        }
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(convolution_cdf(0, &q(0, 1), &[q(1, 1)]).unwrap(), [r(1, 1)]);
        // Γ₂·0 = {ab, ac, ba, bc, ca, cb}·0
        let orbit2: Vec<_> = Sphere::new(2).unwrap().map(|g| g.apply(&q(0, 1))).collect();
        let below = orbit2.iter().filter(|x| **x <= q(0, 1)).count() as i64;
        let expected = r(1, 3) + r(2, 3) * r(below, 6);
        assert_eq!(convolution_cdf(2, &q(0, 1), &[q(0, 1)]).unwrap(), [expected]);
    }

    #[test]
    fn pruned_count_matches_enumeration() {
        let ts: Vec<ExtRational> = ["-3", "-1/2", "0", "1/3", "2/5", "1", "7/4", "12", "1/0"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        for base in [q(0, 1), q(1, 1), ExtRational::infinity()] {
            for m in 0..=9 {
                let table = OrbitTable::new(base.clone(), m).unwrap();
                for t in &ts {
                    assert_eq!(
                        count_at_most_pruned(m, &base, t),
                        BigInt::from(table.count_at_most(t)),
                        "base {base} m {m} t {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn convolution_cdf_is_monotone_and_reaches_one() {
        let ts: Vec<ExtRational> = ["-5", "-1", "-1/3", "0", "1/4", "1/2", "1", "3", "1/0"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        for x0 in [q(0, 1), q(2, 7)] {
            let f = convolution_cdf(8, &x0, &ts).unwrap();
            assert!(f.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(f.last().unwrap(), &r(1, 1));
        }
    }

    #[test]
    fn stationarity_examples() {
        let (lhs, rhs) = stationarity_check(&arc("0..1")).unwrap();
        assert_eq!(lhs, r(1, 3));
        assert_eq!(rhs, r(1, 3));
        let measures: Vec<_> = Letter::ALL
            .into_iter()
            .map(|s| measure_arc(&arc("0..1").image(&s.matrix())).unwrap())
            .collect();
        assert_eq!(measures, [r(1, 6), r(1, 6), r(2, 3)]);
        let a = arc("-2/3..5/2");
        let (l1, _) = stationarity_check(&a).unwrap();
        let (l2, _) = stationarity_check(&a.complement()).unwrap();
        assert_eq!(l1 + l2, r(1, 1));
    }

    #[test]
    fn tile_elements_of_farey_pairs() {
        let g = tile_element(&q(1, 3), &q(1, 2)).unwrap();
        assert_eq!(g.cached_word().unwrap().len(), 3);
        assert_eq!(g.tile().vertices(), &[q(1, 3), q(2, 5), q(1, 2)]);
        assert_eq!(tile_element(&q(0, 1), &q(1, 1)).unwrap().cached_word().unwrap().to_string(), "c");
        let g = tile_element(&q(-2, 1), &q(-1, 1)).unwrap();
        assert_eq!(g.tile().vertices(), &[q(-2, 1), q(-3, 2), q(-1, 1)]);
        assert_eq!(g.cached_word().unwrap().len(), 3);
    }
}
