//! Seeded instance generators shared by `gen` and the self-test suites.

use kwitness_core::complexes::{
    delta_embed, direct_sum, elementary_binary_line, random_acyclic_binary, SingleComplex, CHOICES,
};
use kwitness_core::nilcat::commutant_nilpotent_sample;
use kwitness_core::sample::{random_invertible, random_nilpotent};
use kwitness_core::{BinaryMulticomplex, Matrix, NilMulticomplex, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Entry bound of change-of-basis matrices in generated complexes.
pub const ENTRY_BOUND: i64 = 2;
const COMMUTANT_TRIALS: usize = 8;

/// Independent random stream number `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Instance `index` of the corpus `seed`: a random acyclic binary complex with
/// a nilpotent endomorphism drawn from its commutant (nonzero when one was found).
pub fn generate(ring: Ring, seed: u64, index: u64, dim: usize, rank_bound: usize) -> NilMulticomplex {
    let mut rng = stream(seed, index);
    let base = random_acyclic_binary(ring, rng.gen(), dim, rank_bound, ENTRY_BOUND);
    let family = commutant_nilpotent_sample(&base, rng.gen(), COMMUTANT_TRIALS);
    pick_nonzero(&mut rng, family)
}

fn pick_nonzero(rng: &mut ChaCha8Rng, mut family: Vec<NilMulticomplex>) -> NilMulticomplex {
    if family.len() > 1 {
        let k = rng.gen_range(1..family.len());
        family.swap_remove(k)
    } else {
        family.swap_remove(0)
    }
}

/// Nilpotent endomorphism of a free module of rank at most `max_rank`.
pub fn nil0_sample(ring: Ring, seed: u64, index: u64, max_rank: usize, entry_bound: i64) -> NilMulticomplex {
    let mut rng = stream(seed, index);
    let r = rng.gen_range(1..=max_rank);
    NilMulticomplex::module(ring, random_nilpotent(&mut rng, &ring, r, entry_bound)).expect("square")
}

fn elementary_single(rng: &mut ChaCha8Rng, ring: Ring) -> SingleComplex {
    let mid = rng.gen_range(1..=2);
    let a = rng.gen_range(0..=mid);
    let line = elementary_binary_line(rng, ring, a, mid - a, ENTRY_BOUND, true);
    let (d2, d1) = (line.pairs()[0].d[2].clone(), line.pairs()[0].d[1].clone());
    SingleComplex::line(ring, d2, d1).expect("shapes agree")
}

/// Two-directional complexes built from the diagonal functor and direct sums,
/// each paired with up to two nilpotent endomorphisms from its commutant.
///
/// Returns at least `min_count` instances, labelled by construction.
pub fn curated_nets(seed: u64, min_count: usize) -> Vec<(String, NilMulticomplex)> {
    let batch = rayon::current_num_threads().max(1) as u64;
    let mut out = Vec::new();
    let mut k = 0u64;
    while out.len() < min_count {
        let built: Vec<Vec<(String, NilMulticomplex)>> =
            (k..k + batch).into_par_iter().map(|k| curated_net(seed, k)).collect();
        for net in built {
            if out.len() >= min_count {
                break;
            }
            out.extend(net);
        }
        k += batch;
    }
    out
}

fn curated_net(seed: u64, k: u64) -> Vec<(String, NilMulticomplex)> {
    let mut rng = stream(seed, k);
    let ring = if k % 4 == 3 { Ring::Localized(3) } else { Ring::Integers };
    let (label, base) = match k % 3 {
        0 => {
            let c = random_acyclic_binary(ring, rng.gen(), 1, 2, ENTRY_BOUND);
            let line = elementary_single(&mut rng, ring);
            let single = SingleComplex::product(&c, &line).expect("one-directional line");
            ("delta(product)", delta_embed(&single).expect("tensor of exact lines"))
        }
        1 => {
            let c = random_acyclic_binary(ring, rng.gen(), 2, 2, ENTRY_BOUND);
            let dir = rng.gen_range(0..2);
            let choice = CHOICES[rng.gen_range(0..2)];
            let single = SingleComplex::from_binary(&c, dir, choice);
            ("delta(restrict)", delta_embed(&single).expect("restriction stays acyclic"))
        }
        _ => {
            let c = random_acyclic_binary(ring, rng.gen(), 1, 2, ENTRY_BOUND);
            let line = elementary_single(&mut rng, ring);
            let t = delta_embed(&SingleComplex::product(&c, &line).expect("line")).expect("exact");
            let other = random_acyclic_binary(ring, rng.gen(), 2, 2, ENTRY_BOUND);
            ("delta(product)+random", direct_sum(&t, &other).expect("same dimension"))
        }
    };
    let base = conjugate_randomly(&mut rng, &base);
    let family = commutant_nilpotent_sample(&base, rng.gen(), COMMUTANT_TRIALS);
    let picked: Vec<NilMulticomplex> = if family.len() > 1 {
        family.into_iter().skip(1).take(2).collect()
    } else {
        family
    };
    picked.into_iter().map(|n| (format!("{label} #{k} over {ring}"), n)).collect()
}

fn conjugate_randomly(rng: &mut ChaCha8Rng, c: &BinaryMulticomplex) -> BinaryMulticomplex {
    let ring = c.ring();
    let (g, g_inv): (Vec<Matrix>, Vec<Matrix>) = kwitness_core::complexes::positions(c.dim())
        .map(|p| random_invertible(rng, &ring, c.rank(&p), 1))
        .unzip();
    c.conjugate(&g, &g_inv)
}

/// A random three-term line `(ring, left, right)`; roughly half are exact.
///
/// Kinds: conjugated elementary lines (possibly with one entry bumped),
/// rationally exact lines with a scaled map, and unstructured small matrices.
pub fn random_line(seed: u64, index: u64) -> (Ring, Matrix, Matrix) {
    let mut rng = stream(seed, index);
    let ring = [Ring::Integers, Ring::Integers, Ring::Localized(2), Ring::Localized(3), Ring::Localized(5)]
        [rng.gen_range(0..5)];
    let small = |rng: &mut ChaCha8Rng, r: usize, c: usize, b: i64| {
        Matrix::from_fn(r, c, |_, _| kwitness_core::ring::int(rng.gen_range(-b..=b)))
    };
    match rng.gen_range(0..10) {
        0..=4 => {
            let mid = rng.gen_range(1..=4);
            let a = rng.gen_range(0..=mid);
            let line = elementary_binary_line(&mut rng, ring, a, mid - a, ENTRY_BOUND, true);
            let (_, ga_inv) = random_invertible(&mut rng, &ring, a, ENTRY_BOUND);
            let (gb, gb_inv) = random_invertible(&mut rng, &ring, mid, ENTRY_BOUND);
            let (gc, _) = random_invertible(&mut rng, &ring, mid - a, ENTRY_BOUND);
            let mut left = &(&gb * &line.pairs()[0].d[2]) * &ga_inv;
            let mut right = &(&gc * &line.pairs()[0].d[1]) * &gb_inv;
            if rng.gen_bool(0.4) {
                let target = if rng.gen_bool(0.5) { &mut left } else { &mut right };
                if target.rows() > 0 && target.cols() > 0 {
                    let (i, j) = (rng.gen_range(0..target.rows()), rng.gen_range(0..target.cols()));
                    target[(i, j)] += kwitness_core::ring::int(1);
                }
            }
            (ring, left, right)
        }
        5..=6 => {
            let mid = rng.gen_range(1..=4);
            let a = rng.gen_range(0..=mid);
            let line = elementary_binary_line(&mut rng, ring, a, mid - a, ENTRY_BOUND, true);
            let scale = kwitness_core::ring::int(rng.gen_range(1..=3));
            let (mut left, mut right) = (line.pairs()[0].d[2].clone(), line.pairs()[0].d[1].clone());
            if rng.gen_bool(0.5) {
                left = left.scale(&scale);
            } else {
                right = right.scale(&scale);
            }
            (ring, left, right)
        }
        _ => {
            let (a, b, c) = (rng.gen_range(0..=2), rng.gen_range(0..=3), rng.gen_range(0..=2));
            (ring, small(&mut rng, b, a, 2), small(&mut rng, c, b, 2))
        }
    }
}
