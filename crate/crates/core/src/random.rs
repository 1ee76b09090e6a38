//! Deterministic pseudo-random fixtures: Gaussian samplers, random states
//! and random K-local ensembles. Everything is a pure function of its seed,
//! so ensemble tests are reproducible bit for bit.

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{ManyBodySpace, SiteSpace};
use crate::combin::{binomial_exact, combinations};
use crate::error::Error;
use crate::hamiltonian::{assemble, InteractionTerm, LocalHamiltonian};
use crate::scalar::Real;
use crate::{Cplx, Result, State};

/// Seeded sampler with uniform and Gaussian output.
pub struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Standard normal via Box-Muller, caching the second draw.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform().max(f64::MIN_POSITIVE);
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<X>(&mut self, items: &mut [X]) {
        for i in (1..items.len()).rev() {
            items.swap(i, self.below(i + 1));
        }
    }
}

/// A Haar-ish random unit vector (complex Gaussian entries, normalised).
pub fn random_state<T: Real>(dim: usize, seed: u64) -> State<T> {
    let mut s = Sampler::new(seed);
    let mut v = State::from_fn(dim, |_, _| {
        Cplx::new(T::of(s.normal()), T::of(s.normal()))
    });
    let n = v.norm();
    v /= Cplx::new(n, T::zero());
    v
}

/// GUE-style Hermitian matrix: (G + G†)/2 with standard complex Gaussian
/// entries, scaled so its spectral norm is O(1) independent of size.
pub fn random_hermitian<T: Real>(size: usize, sampler: &mut Sampler) -> DMatrix<Cplx<T>> {
    let scale = T::one() / T::of_usize(size).sqrt();
    let mut m = DMatrix::<Cplx<T>>::zeros(size, size);
    for r in 0..size {
        m[(r, r)] = Cplx::new(T::of(sampler.normal()) * scale, T::zero());
        for c in 0..r {
            let z = Cplx::new(
                T::of(sampler.normal()) * scale * T::of(std::f64::consts::FRAC_1_SQRT_2),
                T::of(sampler.normal()) * scale * T::of(std::f64::consts::FRAC_1_SQRT_2),
            );
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}

/// A random K-local Hamiltonian: `n_terms` distinct supports drawn uniformly
/// from the C(n_sites, k) available, each carrying an independent GUE block.
pub fn random_klocal<T: Real>(
    n_sites: usize,
    d: usize,
    k: usize,
    n_terms: usize,
    seed: u64,
) -> Result<LocalHamiltonian<T>> {
    if k == 0 || k > n_sites {
        return Err(Error::InvalidParameter(format!(
            "support size {k} must lie in 1..={n_sites}"
        )));
    }
    let available = binomial_exact(n_sites as u64, k as u64);
    if n_terms as u128 > available {
        return Err(Error::TooManyTerms { count: n_terms, max: available, order: k });
    }
    let space = ManyBodySpace::new(n_sites, SiteSpace::new(d)?)?;
    let mut sampler = Sampler::new(seed);
    let mut supports = combinations(n_sites, k);
    sampler.shuffle(&mut supports);
    supports.truncate(n_terms);
    supports.sort(); // canonical order, independent of the draw order
    let dk = d.pow(k as u32);
    let terms: Result<Vec<_>> = supports
        .into_iter()
        .map(|support| InteractionTerm::new(support, random_hermitian::<T>(dk, &mut sampler)))
        .collect();
    assemble(space, terms?)
}
