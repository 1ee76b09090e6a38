//! K-local Hamiltonians: sums of dense Hermitian blocks, each acting on an
//! ordered tuple of sites. The operator is never materialised globally;
//! `apply` streams every term over the state using precomputed strides.
//!
//! Local index convention (matches [`crate::basis`]): within a term whose
//! support is (i₁ < i₂ < … < i_K), the block row/column index is the
//! little-endian digit string of the support sites, so site i₁ is the least
//! significant digit. A two-site block for P on i₁ and Q on i₂ is therefore
//! `Q ⊗ P` in the usual big-endian Kronecker convention.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::ManyBodySpace;
use crate::combin::binomial_exact;
use crate::error::Error;
use crate::scalar::Real;
use crate::{Cplx, Result, State};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// One interaction: a Hermitian block on an ordered support.
#[derive(Clone, Debug)]
pub struct InteractionTerm<T> {
    support: Vec<usize>,
    block: DMatrix<Cplx<T>>,
}

impl<T: Real> InteractionTerm<T> {
    /// Validates that the support is strictly increasing and the block is
    /// square and Hermitian within the scalar's tolerance.
    pub fn new(support: Vec<usize>, block: DMatrix<Cplx<T>>) -> Result<Self> {
        if support.is_empty() || support.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSupport(support));
        }
        if block.nrows() != block.ncols() {
            return Err(Error::InvalidParameter(format!(
                "block on support {:?} must be square, got {}×{}",
                support,
                block.nrows(),
                block.ncols()
            )));
        }
        let mut defect = T::zero();
        for r in 0..block.nrows() {
            for c in 0..=r {
                let diff = block[(r, c)] - block[(c, r)].conj();
                defect = defect.max(diff.norm_sqr().sqrt());
            }
        }
        if defect > T::hermiticity_tol() {
            return Err(Error::NonHermitianBlock { support, defect: defect.as_f64() });
        }
        Ok(InteractionTerm { support, block })
    }

    /// Real-valued convenience constructor.
    pub fn new_real(support: Vec<usize>, block: DMatrix<T>) -> Result<Self> {
        let complex = block.map(|x| Cplx::new(x, T::zero()));
        Self::new(support, complex)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn block(&self) -> &DMatrix<Cplx<T>> {
        &self.block
    }
}

/// Spectral norms of the blocks, used by every bound in [`crate::bounds`].
#[derive(Clone, Debug)]
pub struct NormReport<T> {
    pub term_norms: Vec<T>,
    pub max_norm: T,
    pub sum_norms: T,
}

// ---------------------------------------------------------------------------
// The assembled operator
// ---------------------------------------------------------------------------

enum BlockData<T> {
    /// All imaginary parts exactly zero — the whole solve can stay real.
    Real(DMatrix<T>),
    Complex(DMatrix<Cplx<T>>),
}

struct AssembledTerm<T> {
    support: Vec<usize>,
    /// Offset of each local block index inside the global basis index.
    offsets: Vec<usize>,
    /// Strides of the complement sites, ascending.
    rest_strides: Vec<usize>,
    data: BlockData<T>,
    norm: T,
}

/// A K-local Hamiltonian on a many-body space. K (the `order`) is the
/// largest support size among the terms; supports are distinct, so the
/// term count obeys the combinatorial cap C(N, k) at every order k.
pub struct LocalHamiltonian<T> {
    space: ManyBodySpace,
    terms: Vec<AssembledTerm<T>>,
    order: usize,
    all_real: bool,
}

/// Validate `terms` against `space` and precompute the apply machinery.
pub fn assemble<T: Real>(
    space: ManyBodySpace,
    terms: Vec<InteractionTerm<T>>,
) -> Result<LocalHamiltonian<T>> {
    if terms.is_empty() {
        return Err(Error::NoTerms);
    }
    let d = space.d();
    let n = space.n_sites();
    let mut seen = std::collections::HashSet::new();
    let mut assembled = Vec::with_capacity(terms.len());
    let mut order = 0usize;
    let mut all_real = true;

    for term in terms {
        let k = term.support.len();
        if let Some(&site) = term.support.iter().find(|&&s| s >= n) {
            return Err(Error::SiteOutOfRange { site, n_sites: n });
        }
        let dk = d.checked_pow(k as u32).filter(|&v| v <= space.dim()).ok_or(
            Error::InvalidSupport(term.support.clone()),
        )?;
        if term.block.nrows() != dk {
            return Err(Error::BlockSizeMismatch {
                support: term.support,
                rows: term.block.nrows(),
                cols: term.block.ncols(),
                expected: dk,
            });
        }
        if !seen.insert(term.support.clone()) {
            return Err(Error::DuplicateSupport(term.support));
        }
        order = order.max(k);

        // Local index → global offset, little-endian over the support.
        let mut offsets = Vec::with_capacity(dk);
        for mut local in 0..dk {
            let mut offset = 0usize;
            for &site in &term.support {
                offset += (local % d) * space.stride(site);
                local /= d;
            }
            offsets.push(offset);
        }
        let rest_strides: Vec<usize> = (0..n)
            .filter(|site| !term.support.contains(site))
            .map(|site| space.stride(site))
            .collect();

        let norm = term
            .block
            .symmetric_eigenvalues()
            .iter()
            .fold(T::zero(), |acc, &e| acc.max(e.abs()));

        let is_real = term.block.iter().all(|z| z.im == T::zero());
        all_real &= is_real;
        let data = if is_real {
            BlockData::Real(term.block.map(|z| z.re))
        } else {
            BlockData::Complex(term.block)
        };
        assembled.push(AssembledTerm { support: term.support, offsets, rest_strides, data, norm });
    }

    // The combinatorial cap — at most C(n, k) terms of each support size k —
    // is automatic here: supports are strictly increasing site lists (so each
    // names a distinct subset) and duplicates were rejected above. A mixed
    // list of orders stays legal; only `random_klocal` needs the cap as a
    // genuine precondition, because it promises `count` distinct supports of
    // one fixed size up front.
    debug_assert!({
        let mut by_size = std::collections::HashMap::new();
        for t in &assembled {
            *by_size.entry(t.support.len()).or_insert(0u128) += 1;
        }
        by_size.iter().all(|(&k, &c)| c <= binomial_exact(n as u64, k as u64))
    });

    Ok(LocalHamiltonian { space, terms: assembled, order, all_real })
}

/// Stream one term over a vector: for every assignment of the complement
/// digits, gather the local block-sized slice, multiply, scatter-add.
/// Generic over the scalar so the same kernel serves the real fast path and
/// the complex general path.
fn apply_term<S>(
    block: &DMatrix<S>,
    offsets: &[usize],
    rest_strides: &[usize],
    d: usize,
    x: &DVector<S>,
    y: &mut DVector<S>,
    scratch: &mut Vec<S>,
) where
    S: nalgebra::Scalar + std::ops::Mul<Output = S> + std::ops::AddAssign + Copy + num_traits::Zero,
{
    let dk = offsets.len();
    let n_rest = x.len() / dk;
    scratch.clear();
    scratch.resize(dk, S::zero());
    let mut rest_digits = vec![0usize; rest_strides.len()];
    let mut base = 0usize;
    for step in 0..n_rest {
        if step > 0 {
            // Odometer over the complement sites, keeping `base` in sync.
            let mut i = 0;
            loop {
                rest_digits[i] += 1;
                base += rest_strides[i];
                if rest_digits[i] < d {
                    break;
                }
                rest_digits[i] = 0;
                base -= d * rest_strides[i];
                i += 1;
            }
        }
        for (l, u) in scratch.iter_mut().enumerate() {
            *u = x[base + offsets[l]];
        }
        for (row, &offset) in offsets.iter().enumerate() {
            let mut acc = S::zero();
            for (col, &u) in scratch.iter().enumerate() {
                acc += block[(row, col)] * u;
            }
            y[base + offset] += acc;
        }
    }
}

impl<T: Real> LocalHamiltonian<T> {
    pub fn space(&self) -> &ManyBodySpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Largest support size K among the terms.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn interaction_set_size(&self) -> usize {
        self.terms.len()
    }

    pub fn supports(&self) -> impl Iterator<Item = &[usize]> {
        self.terms.iter().map(|t| t.support.as_slice())
    }

    /// True if every block is real in the computational basis, so the
    /// spectral problem can be solved in real arithmetic.
    pub fn is_real(&self) -> bool {
        self.all_real
    }

    pub fn term_norms(&self) -> NormReport<T> {
        let term_norms: Vec<T> = self.terms.iter().map(|t| t.norm).collect();
        let max_norm = term_norms.iter().fold(T::zero(), |a, &b| a.max(b));
        let sum_norms = term_norms.iter().fold(T::zero(), |a, &b| a + b);
        NormReport { term_norms, max_norm, sum_norms }
    }

    /// y = H x.
    pub fn apply(&self, x: &State<T>) -> Result<State<T>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let mut y = State::zeros(self.dim());
        let mut scratch = Vec::new();
        let mut real_scratch = Vec::new();
        for term in &self.terms {
            match &term.data {
                BlockData::Complex(b) => apply_term::<Cplx<T>>(
                    b,
                    &term.offsets,
                    &term.rest_strides,
                    self.space.d(),
                    x,
                    &mut y,
                    &mut scratch,
                ),
                BlockData::Real(b) => {
                    // Apply to real and imaginary parts separately so the
                    // inner loop stays in real arithmetic.
                    let dk = term.offsets.len();
                    let n_rest = self.dim() / dk;
                    real_scratch.clear();
                    real_scratch.resize(2 * dk, T::zero());
                    let mut rest_digits = vec![0usize; term.rest_strides.len()];
                    let mut base = 0usize;
                    for step in 0..n_rest {
                        if step > 0 {
                            let mut i = 0;
                            loop {
                                rest_digits[i] += 1;
                                base += term.rest_strides[i];
                                if rest_digits[i] < self.space.d() {
                                    break;
                                }
                                rest_digits[i] = 0;
                                base -= self.space.d() * term.rest_strides[i];
                                i += 1;
                            }
                        }
                        for l in 0..dk {
                            let z = x[base + term.offsets[l]];
                            real_scratch[l] = z.re;
                            real_scratch[dk + l] = z.im;
                        }
                        for (row, &offset) in term.offsets.iter().enumerate() {
                            let mut re = T::zero();
                            let mut im = T::zero();
                            for col in 0..dk {
                                let w = b[(row, col)];
                                re += w * real_scratch[col];
                                im += w * real_scratch[dk + col];
                            }
                            let out = &mut y[base + offset];
                            out.re += re;
                            out.im += im;
                        }
                    }
                }
            }
        }
        Ok(y)
    }

    /// y = H x for real vectors. Only valid when [`Self::is_real`].
    pub fn apply_real(&self, x: &DVector<T>) -> Result<DVector<T>> {
        if !self.all_real {
            return Err(Error::InvalidParameter(
                "Hamiltonian has complex blocks; use apply() on a complex state".into(),
            ));
        }
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let mut y = DVector::zeros(self.dim());
        let mut scratch = Vec::new();
        for term in &self.terms {
            if let BlockData::Real(b) = &term.data {
                apply_term::<T>(
                    b,
                    &term.offsets,
                    &term.rest_strides,
                    self.space.d(),
                    x,
                    &mut y,
                    &mut scratch,
                );
            }
        }
        Ok(y)
    }

    /// ⟨bra|H|ket⟩.
    pub fn matrix_element(&self, bra: &State<T>, ket: &State<T>) -> Result<Cplx<T>> {
        let hket = self.apply(ket)?;
        if bra.len() != hket.len() {
            return Err(Error::DimensionMismatch { expected: hket.len(), got: bra.len() });
        }
        Ok(bra.dotc(&hket))
    }

    /// ⟨ψ|H|ψ⟩, guaranteed real for Hermitian terms.
    pub fn expectation(&self, state: &State<T>) -> Result<T> {
        Ok(self.matrix_element(state, state)?.re)
    }

    /// Materialise the full matrix in real arithmetic. Only valid when
    /// [`Self::is_real`]; half the memory of [`Self::to_dense`].
    pub fn to_dense_real(&self) -> Result<DMatrix<T>> {
        if !self.all_real {
            return Err(Error::InvalidParameter(
                "Hamiltonian has complex blocks; use to_dense()".into(),
            ));
        }
        let dim = self.dim();
        let d = self.space.d();
        let mut m = DMatrix::<T>::zeros(dim, dim);
        for term in &self.terms {
            let BlockData::Real(b) = &term.data else { unreachable!("checked all_real") };
            let dk = term.offsets.len();
            let n_rest = dim / dk;
            let mut rest_digits = vec![0usize; term.rest_strides.len()];
            let mut base = 0usize;
            for step in 0..n_rest {
                if step > 0 {
                    let mut i = 0;
                    loop {
                        rest_digits[i] += 1;
                        base += term.rest_strides[i];
                        if rest_digits[i] < d {
                            break;
                        }
                        rest_digits[i] = 0;
                        base -= d * term.rest_strides[i];
                        i += 1;
                    }
                }
                for (row, &ro) in term.offsets.iter().enumerate() {
                    for (col, &co) in term.offsets.iter().enumerate() {
                        m[(base + ro, base + co)] += b[(row, col)];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Materialise the full matrix. Intended for dimensions up to the dense
    /// eigensolver cutoff; memory is dim² complex entries.
    pub fn to_dense(&self) -> DMatrix<Cplx<T>> {
        let dim = self.dim();
        let d = self.space.d();
        let mut m = DMatrix::<Cplx<T>>::zeros(dim, dim);
        for term in &self.terms {
            let dk = term.offsets.len();
            let n_rest = dim / dk;
            let entry = |r: usize, c: usize| -> Cplx<T> {
                match &term.data {
                    BlockData::Real(b) => Cplx::new(b[(r, c)], T::zero()),
                    BlockData::Complex(b) => b[(r, c)],
                }
            };
            let mut rest_digits = vec![0usize; term.rest_strides.len()];
            let mut base = 0usize;
            for step in 0..n_rest {
                if step > 0 {
                    let mut i = 0;
                    loop {
                        rest_digits[i] += 1;
                        base += term.rest_strides[i];
                        if rest_digits[i] < d {
                            break;
                        }
                        rest_digits[i] = 0;
                        base -= d * term.rest_strides[i];
                        i += 1;
                    }
                }
                for (row, &ro) in term.offsets.iter().enumerate() {
                    for (col, &co) in term.offsets.iter().enumerate() {
                        m[(base + ro, base + co)] += entry(row, col);
                    }
                }
            }
        }
        m
    }
}

// ---------------------------------------------------------------------------
// Spin-1/2 site matrices
// ---------------------------------------------------------------------------

/// Pauli matrices in the crate's basis convention: local state 0 is the
/// lower eigenvalue of z, so z = diag(-1, +1).
pub mod spin {
    use super::*;

    pub fn pauli_x<T: Real>() -> DMatrix<Cplx<T>> {
        let o = Cplx::new(T::one(), T::zero());
        let z = Cplx::new(T::zero(), T::zero());
        DMatrix::from_row_slice(2, 2, &[z, o, o, z])
    }

    pub fn pauli_y<T: Real>() -> DMatrix<Cplx<T>> {
        let z = Cplx::new(T::zero(), T::zero());
        let pi = Cplx::new(T::zero(), T::one());
        let mi = Cplx::new(T::zero(), -T::one());
        // With basis state 0 the *lower* z eigenstate, x·y = i·z fixes
        // y|0⟩ = -i|1⟩, i.e. rows [[0, i], [-i, 0]].
        DMatrix::from_row_slice(2, 2, &[z, pi, mi, z])
    }

    pub fn pauli_z<T: Real>() -> DMatrix<Cplx<T>> {
        let z = Cplx::new(T::zero(), T::zero());
        let p = Cplx::new(T::one(), T::zero());
        DMatrix::from_row_slice(2, 2, &[-p, z, z, p])
    }

    /// Spin operators are half the Paulis.
    pub fn sz<T: Real>() -> DMatrix<Cplx<T>> {
        pauli_z::<T>() * Cplx::new(T::of(0.5), T::zero())
    }

    pub fn sx<T: Real>() -> DMatrix<Cplx<T>> {
        pauli_x::<T>() * Cplx::new(T::of(0.5), T::zero())
    }

    pub fn sy<T: Real>() -> DMatrix<Cplx<T>> {
        pauli_y::<T>() * Cplx::new(T::of(0.5), T::zero())
    }
}

/// Block for a two-site term with `p` on the lower support site and `q` on
/// the higher one, in this crate's little-endian local index convention.
pub fn two_site_block<T: Real>(
    p: &DMatrix<Cplx<T>>,
    q: &DMatrix<Cplx<T>>,
) -> DMatrix<Cplx<T>> {
    q.kronecker(p)
}

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------

/// Transverse-field Ising chain, H = -J Σ z_i z_{i+1} - g Σ x_i, with the
/// single-site field folded into the bond blocks so the term count stays at
/// one per bond (open chains weight edge sites fully, interior sites half).
pub fn tfim_chain<T: Real>(
    n: usize,
    coupling: T,
    g: T,
    periodic: bool,
) -> Result<LocalHamiltonian<T>> {
    let space = ManyBodySpace::qubits(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter("a chain needs at least 2 sites".into()));
    }
    if periodic && n < 3 {
        return Err(Error::InvalidParameter(
            "periodic chains need at least 3 sites to keep bonds distinct".into(),
        ));
    }
    let x = spin::pauli_x::<T>();
    let z = spin::pauli_z::<T>();
    let id = DMatrix::identity(2, 2);
    let bond_count = |site: usize| -> T {
        if periodic || (site > 0 && site + 1 < n) {
            T::of(2.0)
        } else {
            T::one()
        }
    };
    let n_bonds = if periodic { n } else { n - 1 };
    let mut terms = Vec::with_capacity(n_bonds);
    for b in 0..n_bonds {
        let (lo, hi) = if b + 1 < n { (b, b + 1) } else { (0, n - 1) };
        let c = Cplx::new(coupling, T::zero());
        let w_lo = Cplx::new(g / bond_count(lo), T::zero());
        let w_hi = Cplx::new(g / bond_count(hi), T::zero());
        let block = two_site_block(&z, &z) * -c
            - two_site_block(&x, &id) * w_lo
            - two_site_block(&id, &x) * w_hi;
        terms.push(InteractionTerm::new(vec![lo, hi], block)?);
    }
    assemble(space, terms)
}

/// Uniform all-to-all spin model,
/// H = -(λ/N) Σ_{i<j} (x_i x_j + γ y_i y_j) - h Σ z_i,
/// with the field shared across the N-1 pairs touching each site.
pub fn lmg<T: Real>(n: usize, coupling: T, field: T, gamma: T) -> Result<LocalHamiltonian<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 sites".into()));
    }
    let space = ManyBodySpace::qubits(n)?;
    let x = spin::pauli_x::<T>();
    let y = spin::pauli_y::<T>();
    let z = spin::pauli_z::<T>();
    let id = DMatrix::identity(2, 2);
    let lam = Cplx::new(coupling / T::of_usize(n), T::zero());
    let gam = Cplx::new(gamma, T::zero());
    let h_share = Cplx::new(field / T::of_usize(n - 1), T::zero());
    let mut terms = Vec::new();
    for i in 0..n {
        for jj in (i + 1)..n {
            let block = (two_site_block(&x, &x) + two_site_block(&y, &y) * gam) * -lam
                - (two_site_block(&z, &id) + two_site_block(&id, &z)) * h_share;
            terms.push(InteractionTerm::new(vec![i, jj], block)?);
        }
    }
    assemble(space, terms)
}

/// Collective one-local operator Σᵢ mᵢ with the same matrix on every site.
pub fn collective<T: Real>(n: usize, site_matrix: DMatrix<Cplx<T>>) -> Result<LocalHamiltonian<T>> {
    let d = site_matrix.nrows();
    let space = ManyBodySpace::new(n, crate::basis::SiteSpace::new(d)?)?;
    let terms: Result<Vec<_>> = (0..n)
        .map(|i| InteractionTerm::new(vec![i], site_matrix.clone()))
        .collect();
    assemble(space, terms?)
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

/// Serialisable description: supports plus row-major `[re, im]` block
/// entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianConfig {
    pub n_sites: usize,
    pub d: usize,
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermConfig {
    pub support: Vec<usize>,
    pub block: Vec<[f64; 2]>,
}

impl<T: Real> LocalHamiltonian<T> {
    pub fn from_config(cfg: &HamiltonianConfig) -> Result<Self> {
        let space = ManyBodySpace::new(cfg.n_sites, crate::basis::SiteSpace::new(cfg.d)?)?;
        let mut terms = Vec::with_capacity(cfg.terms.len());
        for tc in &cfg.terms {
            let dk = cfg
                .d
                .checked_pow(tc.support.len() as u32)
                .ok_or_else(|| Error::BadConfig("support too large".into()))?;
            if tc.block.len() != dk * dk {
                return Err(Error::BadConfig(format!(
                    "support {:?} needs {} block entries, got {}",
                    tc.support,
                    dk * dk,
                    tc.block.len()
                )));
            }
            let block = DMatrix::from_row_iterator(
                dk,
                dk,
                tc.block.iter().map(|&[re, im]| Cplx::new(T::of(re), T::of(im))),
            );
            terms.push(InteractionTerm::new(tc.support.clone(), block)?);
        }
        assemble(space, terms)
    }

    pub fn to_config(&self) -> HamiltonianConfig {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let dk = t.offsets.len();
                let mut block = Vec::with_capacity(dk * dk);
                for r in 0..dk {
                    for c in 0..dk {
                        let z = match &t.data {
                            BlockData::Real(b) => Cplx::new(b[(r, c)], T::zero()),
                            BlockData::Complex(b) => b[(r, c)],
                        };
                        block.push([z.re.as_f64(), z.im.as_f64()]);
                    }
                }
                TermConfig { support: t.support.clone(), block }
            })
            .collect();
        HamiltonianConfig { n_sites: self.space.n_sites(), d: self.space.d(), terms }
    }
}
