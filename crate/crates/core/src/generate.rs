//! Seeded theory generators.
//!
//! Everything here is deterministic given the seed (ChaCha8). Random
//! weights are positive rationals with denominator at most `max_den`.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::jointly_discriminable;
use crate::arith::{rat, RMatrix, RVector, Rational};
use crate::composition::{Block, CompositionRule};
use crate::error::{Error, Result};
use crate::principles::maximal_discriminable_set;
use crate::system::{EffectModel, SystemSpace};
use crate::theory::Theory;

pub const DEFAULT_MAX_DEN: u32 = 16;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `A`, `B`, ..., `Z`, then `S26`, `S27`, ...
pub fn system_name(index: usize) -> String {
    match u8::try_from(index) {
        Ok(i) if i < 26 => char::from(b'A' + i).to_string(),
        _ => format!("S{index}"),
    }
}

/// `n` positive rationals with denominators at most `max_den`, summing to 1.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, max_den: u32) -> Result<Vec<Rational>> {
    let max_den = max_den as usize;
    if n == 0 || n > max_den {
        return Err(Error::InvalidParameter(format!(
            "cannot split 1 into {n} positive parts with denominator at most {max_den}"
        )));
    }
    let den = rng.gen_range(n..=max_den);
    // n - 1 distinct cuts in 1..den give a composition of den into n parts.
    let mut cuts: Vec<usize> = index::sample(rng, den - 1, n - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.push(den);
    let mut prev = 0;
    Ok(cuts
        .into_iter()
        .map(|c| {
            let w = rat((c - prev) as i64, den as i64);
            prev = c;
            w
        })
        .collect())
}

/// A probability vector with denominators at most `max_den`; zeros allowed.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize, max_den: u32) -> Vec<Rational> {
    let den = rng.gen_range(1..=max_den as i64);
    let mut cuts: Vec<i64> = (0..n.saturating_sub(1)).map(|_| rng.gen_range(0..=den)).collect();
    cuts.sort_unstable();
    cuts.push(den);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let w = rat(c - prev, den);
            prev = c;
            w
        })
        .collect()
}

/// A point of the `[0, 1]` box with denominators at most `max_den`.
pub fn random_box_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_den: u32) -> RVector {
    (0..dim)
        .map(|_| {
            let den = rng.gen_range(1..=max_den as i64);
            rat(rng.gen_range(0..=den), den)
        })
        .collect()
}

/// A composition rule with `delta` extra vertices spread over random blocks
/// and a random vertex labelling.
pub fn random_rule<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    left: &SystemSpace,
    right: &SystemSpace,
    delta: usize,
    max_den: u32,
) -> Result<CompositionRule> {
    let pairs = left.dim() * right.dim();
    let mut sizes = vec![1usize; pairs];
    for _ in 0..delta {
        let open: Vec<usize> = (0..pairs).filter(|&b| sizes[b] < max_den as usize).collect();
        let &b = open
            .choose(rng)
            .ok_or_else(|| Error::InvalidParameter(format!("excess {delta} does not fit with max_den {max_den}")))?;
        sizes[b] += 1;
    }
    let dim = pairs + delta;
    let mut labels: Vec<usize> = (1..=dim).collect();
    labels.shuffle(rng);
    let mut next = labels.into_iter();
    let blocks = sizes
        .iter()
        .enumerate()
        .map(|(b, &size)| {
            let vertices = next.by_ref().take(size).collect();
            Ok(Block::new(b / right.dim() + 1, b % right.dim() + 1, vertices, random_weights(rng, size, max_den)?))
        })
        .collect::<Result<Vec<_>>>()?;
    CompositionRule::new(name, left.clone(), right.clone(), dim, blocks)
}

/// A restricted cone containing the deterministic effect: generators come
/// in complementary pairs `g`, `e - g`, padded until they span.
pub fn random_restricted_system<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    dim: usize,
    max_den: u32,
) -> Result<SystemSpace> {
    let ones = RVector::ones(dim);
    let mut generators = Vec::new();
    let pairs = rng.gen_range(1..=dim);
    for _ in 0..pairs {
        let g = random_box_vector(rng, dim, max_den);
        generators.push(ones.sub(&g));
        generators.push(g);
    }
    for j in 0..dim {
        if RMatrix::from_rows(generators.clone())?.rank() == dim {
            break;
        }
        // Dual-basis effects complete the span; `e - f_j` keeps the pair structure.
        let f = RVector::unit(dim, j);
        generators.push(ones.sub(&f));
        generators.push(f);
    }
    generators.retain(|g| !g.is_zero());
    SystemSpace::restricted(name, generators)
}

/// An observation `{a_i}` discriminating the first `d` vertices, with free
/// columns drawn at random.
fn random_observation<R: Rng + ?Sized>(rng: &mut R, d: usize, free: usize, max_den: u32) -> Vec<RVector> {
    let columns: Vec<Vec<Rational>> = (0..free).map(|_| random_distribution(rng, d, max_den)).collect();
    (0..d)
        .map(|i| {
            let mut a = RVector::unit(d + free, i).into_inner();
            for (k, q) in columns.iter().enumerate() {
                a[d + k] = q[i].clone();
            }
            RVector::new(a)
        })
        .collect()
}

/// A non-classical restricted system whose maximal discriminable set
/// `{1, ..., d}` (d >= 2) leaves a nonempty complement, and whose effect cone
/// is generated by three random observations discriminating that set.
/// Retries until the cone spans, `{1, ..., d}` is maximal, and the
/// observations disagree on every free vertex.
pub fn random_nonclassical_system<R: Rng + ?Sized>(rng: &mut R, name: &str, max_den: u32) -> Result<SystemSpace> {
    loop {
        let d = rng.gen_range(2..=3);
        let free = rng.gen_range(1..=2);
        let observations: Vec<Vec<RVector>> = (0..3).map(|_| random_observation(rng, d, free, max_den)).collect();
        let disagree = (d..d + free).all(|k| {
            let column = |obs: &Vec<RVector>| obs.iter().map(|a| a[k].clone()).collect::<Vec<_>>();
            observations.iter().any(|o| column(o) != column(&observations[0]))
        });
        let generators: Vec<RVector> =
            observations.into_iter().flatten().filter(|g| !g.is_zero()).collect();
        if !disagree || RMatrix::from_rows(generators.clone())?.rank() != d + free {
            continue;
        }
        let s = SystemSpace::new(name, d + free, EffectModel::RestrictedCone { generators })?;
        let base: Vec<usize> = (1..=d).collect();
        if maximal_discriminable_set(&s)? == base && jointly_discriminable(&s, &base)?.is_discriminable() {
            return Ok(s);
        }
    }
}

/// Classical theory: full-dual systems named `A`, `B`, ... and product
/// composites for every pair `i < j`, named by concatenation.
pub fn generate_ct(dims: &[usize]) -> Result<Theory> {
    if dims.is_empty() {
        return Err(Error::InvalidParameter("at least one dimension is required".into()));
    }
    let mut theory = Theory::new();
    for (n, &d) in dims.iter().enumerate() {
        theory.add_system(SystemSpace::full_dual(system_name(n), d)?)?;
    }
    for a in 0..dims.len() {
        for b in a + 1..dims.len() {
            let (l, r) = (system_name(a), system_name(b));
            let rule = CompositionRule::product(
                format!("{l}{r}"),
                theory.system(&l)?.clone(),
                theory.system(&r)?.clone(),
            )?;
            theory.insert_rule(rule, None)?;
        }
    }
    Ok(theory)
}

/// Two full-dual systems `A`, `B` and a composite `AB` with excess `delta`.
pub fn generate_toy(d_a: usize, d_b: usize, delta: usize, seed: u64, max_den: u32) -> Result<Theory> {
    if delta == 0 {
        return Err(Error::InvalidParameter("toy theories need delta >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let a = SystemSpace::full_dual("A", d_a)?;
    let b = SystemSpace::full_dual("B", d_b)?;
    let rule = random_rule(&mut rng, "AB", &a, &b, delta, max_den)?;
    let mut theory = Theory::new();
    theory.add_system(a)?;
    theory.add_system(b)?;
    theory.insert_rule(rule, None)?;
    Ok(theory)
}

/// Two or three systems of dimension 1 to 3, each full-dual or restricted,
/// and a composite with excess 0 to 2 for every pair.
pub fn generate_random(seed: u64, max_den: u32) -> Result<Theory> {
    let mut rng = rng_from_seed(seed);
    let mut theory = Theory::new();
    let count = rng.gen_range(2..=3);
    for n in 0..count {
        let dim = rng.gen_range(1..=3);
        let space = if dim >= 2 && rng.gen_bool(0.5) {
            random_restricted_system(&mut rng, &system_name(n), dim, max_den)?
        } else {
            SystemSpace::full_dual(system_name(n), dim)?
        };
        theory.add_system(space)?;
    }
    for a in 0..count {
        for b in a + 1..count {
            let (l, r) = (system_name(a), system_name(b));
            let delta = rng.gen_range(0..=2);
            let rule = random_rule(
                &mut rng,
                &format!("{l}{r}"),
                theory.system(&l)?,
                theory.system(&r)?,
                delta,
                max_den,
            )?;
            theory.insert_rule(rule, None)?;
        }
    }
    Ok(theory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_classicality, entanglement_present};
    use num_traits::{One, Signed};

    #[test]
    fn weights_are_positive_and_normalized() {
        let mut rng = rng_from_seed(7);
        for n in 1..=16 {
            let w = random_weights(&mut rng, n, 16).unwrap();
            assert_eq!(w.len(), n);
            assert!(w.iter().all(|x| x.is_positive() && *x.denom() <= 16.into()));
            assert!(w.iter().fold(Rational::from_integer(0.into()), |a, x| a + x).is_one());
        }
        assert!(random_weights(&mut rng, 17, 16).is_err());
    }

    #[test]
    fn ct_examples() {
        let t = generate_ct(&[2, 2]).unwrap();
        assert!(!entanglement_present(t.composite("AB").unwrap().rule()).unwrap().present);
        let trit = generate_ct(&[3]).unwrap();
        assert!(trit.composites().is_empty());
        assert!(check_classicality(trit.system("A").unwrap()).unwrap().is_discriminable());
        assert_eq!(generate_ct(&[2, 3]).unwrap().composite("AB").unwrap().rule().composite_dim(), 6);
        assert_eq!(generate_ct(&[1, 2, 2]).unwrap().composites().len(), 3);
        assert!(generate_ct(&[]).is_err());
    }

    #[test]
    fn toy_examples() {
        let t = generate_toy(2, 2, 1, 0, DEFAULT_MAX_DEN).unwrap();
        let rule = t.composite("AB").unwrap().rule();
        assert_eq!(rule.composite_dim(), 5);
        assert!(entanglement_present(rule).unwrap().present);
        assert_eq!(t, generate_toy(2, 2, 1, 0, DEFAULT_MAX_DEN).unwrap());
        assert!(matches!(generate_toy(2, 2, 0, 0, DEFAULT_MAX_DEN), Err(Error::InvalidParameter(_))));
        assert!(generate_toy(1, 1, 3, 0, 2).is_err());
    }

    #[test]
    fn random_theories_load() {
        for seed in 0..20 {
            let t = generate_random(seed, DEFAULT_MAX_DEN).unwrap();
            assert!(t.systems().len() >= 2);
        }
    }

    #[test]
    fn nonclassical_systems() {
        let mut rng = rng_from_seed(3);
        for _ in 0..5 {
            let s = random_nonclassical_system(&mut rng, "A", 8).unwrap();
            let set = maximal_discriminable_set(&s).unwrap();
            assert!(set.len() >= 2 && set.len() < s.dim());
        }
    }
}
