//! Algebraic-Hilbert spaces `V_A(α)`: the clock/shift model of a rational Weyl
//! algebra, its canonical bases, the Galois symmetries permuting them, and the
//! decomposition of a module restricted to a subalgebra.
//!
//! `U` (the matrix of `U^a`) is diagonal in the stored basis and `V` (the matrix of
//! `V^b`) is a cyclic shift, both up to the central-character twist. They are
//! kept as monomial operators so that spaces with large `N` stay `O(N)`.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{ensure_dense, max_abs, unitarity_defect, CMatrix, OperatorMatrix, Role, C64};
use crate::rational::{cis_turns, is_integer};
use crate::weyl::{is_subalgebra, make_algebra, AlgebraDescriptor};

/// A fraction of a full turn, exact when it comes from root-of-unity data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Turns {
    Exact(Rational64),
    Real(f64),
}

impl Turns {
    pub fn zero() -> Self {
        Turns::Exact(Rational64::zero())
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Turns::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Turns::Real(x) => x,
        }
    }

    fn in_unit_interval(self) -> bool {
        let x = self.to_f64();
        (0.0..1.0).contains(&x)
    }

    /// `e^{2πi·θ/n}`, the principal `n`-th root of `e^{2πiθ}`.
    pub fn root_phase(self, n: usize) -> C64 {
        match self {
            Turns::Exact(r) => cis_turns(*r.numer() as i128, *r.denom() as i128 * n as i128),
            Turns::Real(x) => Complex64::from_polar(1.0, std::f64::consts::TAU * x / n as f64),
        }
    }

    /// Reads the angle of a unit complex number, snapping to a multiple of `1/grid`
    /// when within `1e-8` turns.
    pub fn from_phase(z: C64, grid: usize) -> Self {
        let mut theta = z.arg() / std::f64::consts::TAU;
        if theta < 0.0 {
            theta += 1.0;
        }
        let scaled = theta * grid as f64;
        let nearest = scaled.round();
        if (scaled - nearest).abs() < 1e-8 * grid as f64 {
            let k = (nearest as i64).rem_euclid(grid as i64);
            return Turns::Exact(Rational64::new(k, grid as i64));
        }
        if theta >= 1.0 {
            theta -= 1.0;
        }
        Turns::Real(theta)
    }

    /// Distance on the circle `R/Z`.
    pub fn circle_distance(self, other: Turns) -> f64 {
        let d = (self.to_f64() - other.to_f64()).rem_euclid(1.0);
        d.min(1.0 - d)
    }
}

impl Serialize for Turns {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Turns::Exact(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            Turns::Real(x) => s.serialize_f64(*x),
        }
    }
}

/// A point of `Spec Z(A)` on the real torus: the central elements `U^{aN}`, `V^{bN}`
/// act as `e^{2πiθ_u}`, `e^{2πiθ_v}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralCharacter {
    pub theta_u: Turns,
    pub theta_v: Turns,
}

impl CentralCharacter {
    pub fn principal() -> Self {
        CentralCharacter {
            theta_u: Turns::zero(),
            theta_v: Turns::zero(),
        }
    }

    pub fn new(theta_u: Turns, theta_v: Turns) -> Result<Self> {
        let ch = CentralCharacter { theta_u, theta_v };
        if !theta_u.in_unit_interval() || !theta_v.in_unit_interval() {
            return Err(Error::InvalidParameter(format!(
                "character angles must lie in [0,1), got ({}, {})",
                theta_u.to_f64(),
                theta_v.to_f64()
            )));
        }
        Ok(ch)
    }

    pub fn exact(u: Rational64, v: Rational64) -> Result<Self> {
        Self::new(Turns::Exact(u), Turns::Exact(v))
    }

    pub fn is_principal(&self) -> bool {
        self.theta_u.to_f64() == 0.0 && self.theta_v.to_f64() == 0.0
    }

    /// Lexicographic order on the float angles, for sorting multisets.
    pub fn cmp_approx(&self, other: &Self) -> Ordering {
        self.theta_u
            .to_f64()
            .total_cmp(&other.theta_u.to_f64())
            .then(self.theta_v.to_f64().total_cmp(&other.theta_v.to_f64()))
    }
}

/// `A e_k = phases[k] · e_{perm[k]}`: a permutation matrix with unit-modulus weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialOp {
    perm: Vec<usize>,
    phases: Vec<C64>,
}

impl MonomialOp {
    pub fn new(perm: Vec<usize>, phases: Vec<C64>) -> Result<Self> {
        let n = perm.len();
        if phases.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phases.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("monomial operator needs a permutation".into()));
            }
        }
        Ok(MonomialOp { perm, phases })
    }

    pub fn identity(n: usize) -> Self {
        MonomialOp {
            perm: (0..n).collect(),
            phases: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn diagonal(phases: Vec<C64>) -> Self {
        MonomialOp {
            perm: (0..phases.len()).collect(),
            phases,
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[C64] {
        &self.phases
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(k, &p)| k == p)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &MonomialOp) -> MonomialOp {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut phases = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mid = other.perm[k];
            perm[k] = self.perm[mid];
            phases[k] = self.phases[mid] * other.phases[k];
        }
        MonomialOp { perm, phases }
    }

    pub fn inverse(&self) -> MonomialOp {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut phases = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let target = self.perm[k];
            perm[target] = k;
            phases[target] = self.phases[k].conj();
        }
        MonomialOp { perm, phases }
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow(&self, exponent: i64) -> MonomialOp {
        let mut base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut e = exponent.unsigned_abs();
        let mut acc = MonomialOp::identity(self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        for (k, &amp) in x.iter().enumerate() {
            out[self.perm[k]] += self.phases[k] * amp;
        }
        out
    }

    /// Applies to a real vector with real phases assumed; used by the real sector code.
    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (k, &amp) in x.iter().enumerate() {
            out[self.perm[k]] += self.phases[k].re * amp;
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            m[(self.perm[k], k)] = self.phases[k];
        }
        m
    }

    /// `max |self − λ·I|` when `self` is diagonal, `None` otherwise.
    pub fn scalar_defect(&self, lambda: C64) -> Option<f64> {
        self.is_diagonal()
            .then(|| self.phases.iter().fold(0.0f64, |acc, z| acc.max((z - lambda).norm())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasisTag {
    #[serde(rename = "U-canonical")]
    UCanonical,
    #[serde(rename = "V-canonical")]
    VCanonical,
}

/// The `N`-dimensional module `V_A(α)` with its canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicHilbertSpace {
    descriptor: AlgebraDescriptor,
    character: CentralCharacter,
    n: usize,
    u: MonomialOp,
    v: MonomialOp,
    basis_tag: BasisTag,
    index_offset: usize,
}

impl AlgebraicHilbertSpace {
    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn character(&self) -> CentralCharacter {
        self.character
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The matrix of `U^a`.
    pub fn u(&self) -> &MonomialOp {
        &self.u
    }

    /// The matrix of `V^b`.
    pub fn v(&self) -> &MonomialOp {
        &self.v
    }

    pub fn basis_tag(&self) -> BasisTag {
        self.basis_tag
    }

    /// `⌊N/2⌋`: storage index `k` carries the symmetric label `((k + offset) mod N) − offset`.
    pub fn index_offset(&self) -> usize {
        self.index_offset
    }

    /// `q = e^{2πi M/N}`
    pub fn q(&self) -> C64 {
        cis_turns(self.m_mod_n() as i128, self.n as i128)
    }

    pub(crate) fn m_mod_n(&self) -> usize {
        self.descriptor.m_mod_n().unwrap_or(0)
    }

    /// Symmetric label of storage index `k`, in `−⌊N/2⌋ ..= N−1−⌊N/2⌋`.
    pub fn symmetric_index(&self, k: usize) -> i64 {
        ((k + self.index_offset) % self.n) as i64 - self.index_offset as i64
    }

    /// Storage index of a symmetric label.
    pub fn storage_index(&self, j: i64) -> usize {
        j.rem_euclid(self.n as i64) as usize
    }

    /// Checks `UV = qVU`, unitarity and the central action; returns the worst defect.
    pub fn structural_defect(&self) -> Result<f64> {
        ensure_dense(self.n)?;
        let u = self.u.to_dense();
        let v = self.v.to_dense();
        let q = self.q();
        let comm = max_abs(&(&u * &v - (&v * &u) * q));
        let unit = unitarity_defect(&u).max(unitarity_defect(&v));
        let n = self.n as i64;
        let zu = self.u.pow(n);
        let zv = self.v.pow(n);
        let cu = Complex64::from_polar(1.0, std::f64::consts::TAU * self.character.theta_u.to_f64());
        let cv = Complex64::from_polar(1.0, std::f64::consts::TAU * self.character.theta_v.to_f64());
        let central = max_abs(&(zu.to_dense() - CMatrix::identity(self.n, self.n) * cu))
            .max(max_abs(&(zv.to_dense() - CMatrix::identity(self.n, self.n) * cv)));
        Ok(comm.max(unit).max(central))
    }
}

impl Serialize for AlgebraicHilbertSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AlgebraicHilbertSpace", 4)?;
        st.serialize_field("descriptor", &self.descriptor)?;
        st.serialize_field("character", &self.character)?;
        st.serialize_field("N", &self.n)?;
        st.serialize_field("basis", &self.basis_tag)?;
        st.end()
    }
}

/// `V_A(1)`: clock `U = diag(q^k)` and shift `V: e_k ↦ e_{k+1}`.
pub fn principal_module(descriptor: &AlgebraDescriptor) -> Result<AlgebraicHilbertSpace> {
    module(descriptor, CentralCharacter::principal())
}

/// `V_A(α)`: the clock/shift model twisted by the `N`-th roots of the central values.
pub fn module(descriptor: &AlgebraDescriptor, character: CentralCharacter) -> Result<AlgebraicHilbertSpace> {
    let character = CentralCharacter::new(character.theta_u, character.theta_v)?;
    let n = descriptor.dim()?;
    let m = descriptor.m_mod_n()?;
    let twist_u = character.theta_u.root_phase(n);
    let twist_v = character.theta_v.root_phase(n);
    let u_phases = (0..n)
        .map(|k| twist_u * cis_turns((m as i128) * (k as i128), n as i128))
        .collect();
    let u = MonomialOp::diagonal(u_phases);
    let v = MonomialOp {
        perm: (0..n).map(|k| (k + 1) % n).collect(),
        phases: vec![twist_v; n],
    };
    Ok(AlgebraicHilbertSpace {
        descriptor: descriptor.clone(),
        character,
        n,
        u,
        v,
        basis_tag: BasisTag::UCanonical,
        index_offset: n / 2,
    })
}

fn is_standard_shift(v: &MonomialOp) -> bool {
    let n = v.dim();
    v.perm.iter().enumerate().all(|(k, &p)| p == (k + 1) % n)
}

/// `F_{jk} = q^{jk}/√N`, the unitary change from the U-canonical to the V-canonical basis.
pub fn u_to_v_transition(space: &AlgebraicHilbertSpace) -> Result<OperatorMatrix> {
    if space.basis_tag != BasisTag::UCanonical || !is_standard_shift(&space.v) {
        return Err(Error::InvalidParameter(
            "transition needs the U-canonical basis in standard clock/shift layout".into(),
        ));
    }
    let n = space.n;
    ensure_dense(n)?;
    let m = space.m_mod_n() as i128;
    let scale = 1.0 / (n as f64).sqrt();
    let f = CMatrix::from_fn(n, n, |j, k| {
        cis_turns(m * ((j * k) % n) as i128, n as i128) * scale
    });
    Ok(OperatorMatrix::new(Role::Transition, f))
}

/// A space re-presented in the Galois-conjugate canonical basis.
#[derive(Debug, Clone)]
pub struct GaloisImage {
    pub space: AlgebraicHilbertSpace,
    /// `permutation[k] = t·k mod N`: the old basis vector `k` becomes new index `t·k`.
    pub permutation: Vec<usize>,
}

impl GaloisImage {
    /// The permutation matrix `P` with `P e_k = e_{t k}`.
    pub fn transition(&self) -> Result<OperatorMatrix> {
        let n = self.permutation.len();
        ensure_dense(n)?;
        let p = MonomialOp {
            perm: self.permutation.clone(),
            phases: vec![C64::new(1.0, 0.0); n],
        };
        Ok(OperatorMatrix::new(Role::Transition, p.to_dense()))
    }

    /// Cycle decomposition of the index permutation, each cycle starting at its smallest index.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.permutation)
    }
}

pub(crate) fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            cycle.push(k);
            k = perm[k];
        }
        out.push(cycle);
    }
    out
}

/// Relabels the canonical basis by `k ↦ t·k (mod N)`, the action of `Γ_A ≅ (Z/N)^×`.
pub fn galois_action(space: &AlgebraicHilbertSpace, t: i64) -> Result<GaloisImage> {
    let n = space.n;
    let t_mod = t.rem_euclid(n as i64) as usize;
    if n > 1 && t_mod.gcd(&n) != 1 {
        return Err(Error::NotAUnit { t, n });
    }
    let permutation: Vec<usize> = (0..n).map(|k| (t_mod * k) % n).collect();
    let p = MonomialOp {
        perm: permutation.clone(),
        phases: vec![C64::new(1.0, 0.0); n],
    };
    let p_inv = p.inverse();
    let relabel = |op: &MonomialOp| p.compose(op).compose(&p_inv);
    let image = AlgebraicHilbertSpace {
        u: relabel(&space.u),
        v: relabel(&space.v),
        ..space.clone()
    };
    Ok(GaloisImage {
        space: image,
        permutation,
    })
}

/// One isotypic component of a restricted module.
#[derive(Debug, Clone)]
pub struct RestrictionBlock {
    pub character: CentralCharacter,
    pub multiplicity: usize,
    /// One `N_A × N_B` isometry per copy.
    pub isometries: Vec<CMatrix>,
}

/// `V_A(α)` viewed as a `B`-module, split into irreducible `V_B(β)` copies.
#[derive(Debug, Clone)]
pub struct RestrictionDecomposition {
    pub parent: AlgebraicHilbertSpace,
    pub sub_descriptor: AlgebraDescriptor,
    pub blocks: Vec<RestrictionBlock>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub character: CentralCharacter,
    pub multiplicity: usize,
    pub dimension: usize,
}

impl RestrictionDecomposition {
    pub fn sub_dim(&self) -> usize {
        self.sub_descriptor.dim().unwrap_or(0)
    }

    /// `Σ multiplicity · N_B`
    pub fn total_dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity).sum::<usize>() * self.sub_dim()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }

    /// Every irreducible copy's character, repeated by multiplicity, sorted.
    pub fn character_multiset(&self) -> Vec<CentralCharacter> {
        let mut out: Vec<_> = self
            .blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.character, b.multiplicity))
            .collect();
        out.sort_by(|a, b| a.cmp_approx(b));
        out
    }

    pub fn summary(&self) -> Vec<BlockSummary> {
        self.blocks
            .iter()
            .map(|b| BlockSummary {
                character: b.character,
                multiplicity: b.multiplicity,
                dimension: self.sub_dim(),
            })
            .collect()
    }

    /// Worst defect over `I†I = 1`, `I† U_B I = U_β`, `I† V_B I = V_β`, and mutual
    /// orthogonality of the copies.
    pub fn verify(&self) -> Result<f64> {
        let (ub, vb) = sub_generators(&self.parent, &self.sub_descriptor)?;
        let ub = ub.to_dense();
        let vb = vb.to_dense();
        let nb = self.sub_dim();
        let eye = CMatrix::identity(nb, nb);
        let mut worst = 0.0f64;
        let all: Vec<&CMatrix> = self.blocks.iter().flat_map(|b| b.isometries.iter()).collect();
        for block in &self.blocks {
            let target = module(&self.sub_descriptor, block.character)?;
            let tu = target.u.to_dense();
            let tv = target.v.to_dense();
            for iso in &block.isometries {
                worst = worst.max(max_abs(&(iso.adjoint() * iso - &eye)));
                worst = worst.max(max_abs(&(iso.adjoint() * &ub * iso - &tu)));
                worst = worst.max(max_abs(&(iso.adjoint() * &vb * iso - &tv)));
            }
        }
        for (i, x) in all.iter().enumerate() {
            for y in &all[i + 1..] {
                worst = worst.max(max_abs(&(x.adjoint() * *y)));
            }
        }
        Ok(worst)
    }
}

/// Matrices of `U^{a_B} = (U^{a_A})^{a_B/a_A}` and `V^{b_B}` on the parent space.
fn sub_generators(parent: &AlgebraicHilbertSpace, sub: &AlgebraDescriptor) -> Result<(MonomialOp, MonomialOp)> {
    if !is_subalgebra(sub, &parent.descriptor)? {
        return Err(Error::NotSubalgebra {
            sub: sub.to_string(),
            parent: parent.descriptor.to_string(),
        });
    }
    let pa = &parent.descriptor;
    let ra = sub.a() / pa.a();
    let rb = sub.b() / pa.b();
    debug_assert!(is_integer(&ra) && is_integer(&rb));
    let ma = ra
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::InvalidParameter("subalgebra index too large".into()))?;
    let mb = rb
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::InvalidParameter("subalgebra index too large".into()))?;
    Ok((parent.u.pow(ma), parent.v.pow(mb)))
}

/// Decomposes `parent` restricted to the subalgebra `sub` into irreducible blocks.
///
/// Joint eigenvectors of `U_B` and the central `V_B^{N_B}` are found orbit by orbit
/// of the monomial action; each one whose `U_B`-eigenvalue is the principal root of
/// its central value seeds a block `w, V_B w/φ, V_B² w/φ², …`.
pub fn restrict_module(parent: &AlgebraicHilbertSpace, sub: &AlgebraDescriptor) -> Result<RestrictionDecomposition> {
    let (ub, vb) = sub_generators(parent, sub)?;
    let na = parent.n;
    let nb = sub.dim()?;
    ensure_dense(na)?;
    if !na.is_multiple_of(nb) {
        return Err(Error::Internal(format!("N_B = {nb} does not divide N_A = {na}")));
    }
    debug_assert!(ub.is_diagonal());
    let z2 = vb.pow(nb as i64);

    let mut seeds: Vec<(CentralCharacter, Vec<C64>)> = Vec::new();
    for orbit in cycles_of(&z2.perm) {
        let len = orbit.len();
        // Cumulative weights along the orbit: Z2 e_{o_i} = φ_i e_{o_{i+1}}.
        let total: C64 = orbit.iter().map(|&k| z2.phases[k]).product();
        let base = Complex64::from_polar(1.0, total.arg() / len as f64);
        for r in 0..len {
            let zeta = base * cis_turns(r as i128, len as i128);
            let mut coeffs = vec![C64::new(0.0, 0.0); na];
            let mut c = C64::new(1.0 / (len as f64).sqrt(), 0.0);
            for &k in &orbit {
                coeffs[k] = c;
                c = c * z2.phases[k] / zeta;
            }
            let lambda = ub.phases[orbit[0]];
            let zeta1 = lambda.powu(nb as u32);
            let theta_u = Turns::from_phase(zeta1, na);
            let theta_v = Turns::from_phase(zeta, na);
            if (lambda - theta_u.root_phase(nb)).norm() < 1e-8 {
                seeds.push((CentralCharacter { theta_u, theta_v }, coeffs));
            }
        }
    }
    if seeds.len() * nb != na {
        return Err(Error::Numeric(format!(
            "found {} seeds for {} blocks; phases lost precision",
            seeds.len(),
            na / nb
        )));
    }

    let mut blocks: Vec<RestrictionBlock> = Vec::new();
    for (character, seed) in seeds {
        let phase_v = character.theta_v.root_phase(nb);
        let mut iso = CMatrix::zeros(na, nb);
        let mut col = seed;
        for c in 0..nb {
            for (r, z) in col.iter().enumerate() {
                iso[(r, c)] = *z;
            }
            col = vb.apply(&col).into_iter().map(|z| z / phase_v).collect();
        }
        match blocks.iter_mut().find(|b| {
            b.character.theta_u.circle_distance(character.theta_u) < 1e-8
                && b.character.theta_v.circle_distance(character.theta_v) < 1e-8
        }) {
            Some(b) => {
                b.multiplicity += 1;
                b.isometries.push(iso);
            }
            None => blocks.push(RestrictionBlock {
                character,
                multiplicity: 1,
                isometries: vec![iso],
            }),
        }
    }
    blocks.sort_by(|a, b| a.character.cmp_approx(&b.character));
    Ok(RestrictionDecomposition {
        parent: parent.clone(),
        sub_descriptor: sub.clone(),
        blocks,
    })
}

/// Characters of `parent` restricted to `sub` through `middle`: each `middle` block is
/// rebuilt as a module and restricted again, with multiplicities carried along.
pub fn restrict_through(parent: &AlgebraicHilbertSpace, middle: &AlgebraDescriptor, sub: &AlgebraDescriptor) -> Result<Vec<CentralCharacter>> {
    let first = restrict_module(parent, middle)?;
    let mut out = Vec::new();
    for block in &first.blocks {
        let second = restrict_module(&module(middle, block.character)?, sub)?;
        for _ in 0..block.multiplicity {
            out.extend(second.character_multiset());
        }
    }
    out.sort_by(|a, b| a.cmp_approx(b));
    Ok(out)
}

/// Largest circle distance between two sorted character lists, or `None` if their lengths differ.
pub fn character_distance(x: &[CentralCharacter], y: &[CentralCharacter]) -> Option<f64> {
    (x.len() == y.len()).then(|| {
        x.iter()
            .zip(y)
            .map(|(a, b)| a.theta_u.circle_distance(b.theta_u).max(a.theta_v.circle_distance(b.theta_v)))
            .fold(0.0, f64::max)
    })
}

/// `A(a·k_a, b·k_b)` at the same `ħ`, i.e. a subalgebra of `A(a, b)` for positive `k`.
pub fn coarsen(descriptor: &AlgebraDescriptor, k_a: i64, k_b: i64) -> Result<AlgebraDescriptor> {
    use crate::rational::Rational;
    make_algebra(
        &(descriptor.a() * Rational::from_integer(k_a.into())),
        &(descriptor.b() * Rational::from_integer(k_b.into())),
        descriptor.hbar_over_2pi(),
    )
}
