//! Reducibility structure of Verma modules: Gram matrices, the Kac
//! determinant, singular vectors, Feigin-Fuchs block classification, and
//! the projection split `W = W1 ∐ W2` attached to a singular vector.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{Matrix, RowSpan};
use crate::scalar::{QuadScalar, Scalar};
use crate::verma::{apply_mode, apply_word, basis, index, ModuleParams, PBWMonomial, VermaVector};

/// Errors from structure-level computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    /// A kernel vector of the positive modes had zero coefficient on
    /// `L(-1)^N`; this contradicts the normalization theory and indicates
    /// a bug upstream.
    KernelWithoutLeadingTail { level: u32 },
    /// More than one singular vector in one homogeneous piece.
    MultipleSingularVectors { level: u32 },
    /// No singular vector found up to the search cap.
    NoSingularVector { cap: u32 },
    /// The module sits in block D (two singular generators); the split
    /// construction is not available there.
    BlockDUnsupported,
    /// A claimed submodule failed closure under the mode action.
    NotSubmodule,
    /// The submodule passed to a split operation does not contain /
    /// is not contained in `W2` as required.
    IncompatibleSubmodule,
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::KernelWithoutLeadingTail { level } => {
                write!(f, "singular kernel vector at level {level} has zero L(-1)^N coefficient")
            }
            StructureError::MultipleSingularVectors { level } => {
                write!(f, "more than one singular vector at level {level}")
            }
            StructureError::NoSingularVector { cap } => {
                write!(f, "no singular vector up to level {cap}")
            }
            StructureError::BlockDUnsupported => write!(f, "block-D module: split unsupported"),
            StructureError::NotSubmodule => write!(f, "generators do not span a submodule"),
            StructureError::IncompatibleSubmodule => {
                write!(f, "submodule is not nested with W2 as required")
            }
        }
    }
}

/// Adjoint of the lowering word `L(-n_1)...L(-n_s)`: the raising word
/// `L(n_s)...L(n_1)` in application order.
fn adjoint_word(mono: &PBWMonomial) -> Vec<i64> {
    mono.modes().iter().rev().map(|&n| n as i64).collect()
}

/// Contravariant (Shapovalov) pairing of two vectors through the Gram form,
/// with `w_dual` read as a dual vector.
pub fn gram_pair(w_dual: &VermaVector, u: &VermaVector) -> Scalar {
    let mut acc = Scalar::zero();
    for (mono, coeff) in w_dual.terms() {
        let lowered = apply_word(&adjoint_word(mono), u);
        let unit = lowered.coeff(&PBWMonomial::unit());
        if !unit.is_zero() {
            acc += coeff * &unit;
        }
    }
    acc
}

/// The Gram matrix of the contravariant form on one graded piece,
/// indexed by `basis(level)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GramMatrix {
    pub level: u32,
    pub matrix: Matrix,
}

pub fn gram_matrix(params: &ModuleParams, level: u32) -> GramMatrix {
    let b = basis(level);
    let n = b.len();
    let mut m = Matrix::zero(n, n);
    for (j, mu) in b.iter().enumerate() {
        let col_vec = VermaVector::monomial(params.clone(), mu.clone());
        for (i, la) in b.iter().enumerate() {
            if i > j {
                continue; // symmetric: fill upper triangle, mirror below
            }
            let v = apply_word(&adjoint_word(la), &col_vec);
            let entry = v.coeff(&PBWMonomial::unit());
            *m.at_mut(i, j) = entry.clone();
            *m.at_mut(j, i) = entry;
        }
    }
    GramMatrix { level, matrix: m }
}

/// Kac determinant: determinant of the level-`level` Gram matrix, exact.
pub fn kac_determinant(params: &ModuleParams, level: u32) -> Scalar {
    gram_matrix(params, level).matrix.determinant()
}

/// A singular vector: annihilated by all positive modes, normalized so the
/// coefficient of `L(-1)^N` is one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SingularVector {
    pub level: u32,
    pub vector: VermaVector,
}

/// Matrix of `L(m)` from level `level` to level `level - m` in PBW bases.
pub fn mode_matrix(params: &ModuleParams, m: i64, level: u32) -> Matrix {
    let src = basis(level);
    let tgt_level = level as i64 - m;
    assert!(tgt_level >= 0);
    let tgt = basis(tgt_level as u32);
    let tgt_pos: BTreeMap<&PBWMonomial, usize> =
        tgt.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
    let mut mat = Matrix::zero(tgt.len(), src.len());
    for (j, mono) in src.iter().enumerate() {
        let v = apply_mode(m, &VermaVector::monomial(params.clone(), mono.clone()));
        for (mo, c) in v.terms() {
            *mat.at_mut(tgt_pos[mo], j) = c.clone();
        }
    }
    mat
}

/// All singular vectors in the level-`level` piece (at most one exists).
///
/// Uses the joint kernel of `L(1)` and `L(2)`, which generate the positive
/// part of the algebra.
pub fn find_singular(
    params: &ModuleParams,
    level: u32,
) -> Result<Vec<SingularVector>, StructureError> {
    if level == 0 {
        return Ok(Vec::new());
    }
    let b = basis(level);
    let m1 = mode_matrix(params, 1, level);
    let rows1 = m1.rows;
    let m2 = if level >= 2 {
        Some(mode_matrix(params, 2, level))
    } else {
        None
    };
    let rows2 = m2.as_ref().map_or(0, |m| m.rows);
    let mut stacked = Matrix::zero(rows1 + rows2, b.len());
    for i in 0..rows1 {
        for j in 0..b.len() {
            *stacked.at_mut(i, j) = m1.at(i, j).clone();
        }
    }
    if let Some(m2) = &m2 {
        for i in 0..rows2 {
            for j in 0..b.len() {
                *stacked.at_mut(rows1 + i, j) = m2.at(i, j).clone();
            }
        }
    }
    let kernel = stacked.kernel();
    if kernel.len() > 1 {
        return Err(StructureError::MultipleSingularVectors { level });
    }
    let mut out = Vec::new();
    for kv in kernel {
        let mut v = VermaVector::zero(params.clone());
        for (j, c) in kv.into_iter().enumerate() {
            v.add_term(b[j].clone(), c);
        }
        let lead = v.coeff(&PBWMonomial::new(vec![1; level as usize]));
        if lead.is_zero() {
            return Err(StructureError::KernelWithoutLeadingTail { level });
        }
        out.push(SingularVector {
            level,
            vector: v.scale(&lead.recip()),
        });
    }
    Ok(out)
}

/// Data of the Feigin-Fuchs line `r + nu*s + beta = 0`.
#[derive(Clone, PartialEq, Debug)]
pub struct FFLineData {
    pub nu: QuadScalar,
    pub beta: BetaValue,
}

/// `beta = sqrt(-4 nu h + (nu+1)^2)`, when it lives in a quadratic
/// extension; the marker records roots that need a degree-4 tower.
#[derive(Clone, PartialEq, Debug)]
pub enum BetaValue {
    InTower(QuadScalar),
    OutsideTower,
}

fn canonical_sign(q: QuadScalar) -> QuadScalar {
    let neg = if q.rational_part().is_zero() {
        q.irrational_part().is_negative()
    } else {
        q.rational_part().is_negative()
    };
    if neg {
        q.neg()
    } else {
        q
    }
}

/// Exact `nu` and `beta` for the line `r + nu s + beta = 0`.
pub fn ff_line(params: &ModuleParams) -> FFLineData {
    let one = Scalar::one();
    let d = &(&params.c - &one) * &(&params.c - &Scalar::from_int(25));
    let twelve = Scalar::from_int(12);
    let nu = match d.sqrt_exact() {
        Some(r) => {
            QuadScalar::from_rational(&(&(&params.c - &Scalar::from_int(13)) + &r) / &twelve)
        }
        None => QuadScalar::new(
            &(&params.c - &Scalar::from_int(13)) / &twelve,
            twelve.recip(),
            d.clone(),
        ),
    };
    // E = -4 nu h + (nu + 1)^2
    let nu_plus_1 = nu.add(&QuadScalar::from_rational(one));
    let e = nu
        .scale(&(&Scalar::from_int(-4) * &params.h))
        .add(&nu_plus_1.mul(&nu_plus_1));
    let ctx = nu.radicand().clone();
    let beta = if let Some(er) = e.as_rational() {
        match QuadScalar::sqrt_rational_in_context(er, &ctx) {
            Some(q) => BetaValue::InTower(canonical_sign(q)),
            // a fresh quadratic radicand; never meets Q(sqrt(d)) off Q
            None => BetaValue::InTower(QuadScalar::sqrt_of(er.clone())),
        }
    } else {
        match e.sqrt_in_tower() {
            Some(q) => BetaValue::InTower(canonical_sign(q)),
            None => BetaValue::OutsideTower,
        }
    };
    FFLineData { nu, beta }
}

/// Feigin-Fuchs block of a Verma module.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockCase {
    /// Irreducible: no integer point, or one with `rs = 0`.
    A,
    /// One integer point with `rs != 0`.
    B,
    /// Infinitely many integer points, axis crossed at an integer point.
    C,
    /// Infinitely many integer points, no integer axis crossing.
    D,
    /// The quadratic tower could not certify the case.
    Undetermined,
}

/// Classification report for one `(c, h)`.
#[derive(Clone, PartialEq, Debug)]
pub struct BlockReport {
    pub case: BlockCase,
    pub level_cap: u32,
    pub line: FFLineData,
    /// Integer points on the line with `|rs| <= level_cap`, sorted by `rs`.
    pub integer_points: Vec<(i64, i64)>,
    /// Weights `h + r_i s_i` of the block members seen within the cap.
    pub members: Vec<Scalar>,
    /// For case D: the `h_i` and `h_i'` member lists from the auxiliary line.
    pub d_members: Option<(Vec<Scalar>, Vec<Scalar>)>,
}

fn scalar_is_int(s: &Scalar) -> Option<i64> {
    use num_traits::ToPrimitive;
    s.to_integer().and_then(|b| b.to_i64())
}

/// Integer points with `|rs| <= cap` on `r + nu s + beta = 0` for rational
/// `nu != 0`, `beta`, sorted by product `rs`.
fn rational_line_points(nu: &Scalar, beta: &Scalar, cap: u32) -> Vec<(i64, i64)> {
    use num_traits::ToPrimitive;
    // |s| (|nu||s| - |beta|) > cap guarantees |rs| > cap
    let bound = {
        let b1 = &(&beta.abs() + &Scalar::one()) / &nu.abs();
        let b2 = Scalar::from_int(cap as i64);
        let m = if b1 > b2 { b1 } else { b2 };
        m.floor_int().to_i64().unwrap_or(i64::MAX / 4) + 2
    };
    let mut pts = Vec::new();
    for s in -bound..=bound {
        let r = -&(&(nu * &Scalar::from_int(s)) + beta);
        if let Some(ri) = scalar_is_int(&r) {
            if ri
                .checked_mul(s)
                .is_some_and(|p| p.unsigned_abs() <= cap as u64)
            {
                pts.push((ri, s));
            }
        }
    }
    pts.sort_by_key(|&(r, s)| (r * s, s));
    pts
}

/// Whether `r + nu s + beta = 0` has any integer solution (rational case).
fn rational_line_nonempty(nu: &Scalar, beta: &Scalar) -> bool {
    // r = -(nu s + beta) integer for some integer s; nu = p/q, beta = u/w reduced.
    // Need q*w | p*w*s + u*q, a linear congruence in s mod q*w.
    use num_bigint::BigInt;
    use num_integer::Integer;
    let p = nu.numer().clone();
    let q = nu.denom().clone();
    let u = beta.numer().clone();
    let w = beta.denom().clone();
    let modulus = &q * &w;
    let a = &p * &w;
    let c = -(&u * &q);
    let g = a.gcd(&modulus);
    (&c % &g) == BigInt::from(0)
}

/// Classify the block of `M(c,h)` exactly.
///
/// `level_cap` bounds only the reported point/member lists, never the case
/// decision, so the case is stable under increasing caps. With parameters
/// in the rational/quadratic tower the case is always certified;
/// `Undetermined` is reserved for inputs outside that domain.
pub fn classify_block(params: &ModuleParams, level_cap: u32) -> BlockReport {
    let line = ff_line(params);
    let mut report = BlockReport {
        case: BlockCase::A,
        level_cap,
        line: line.clone(),
        integer_points: Vec::new(),
        members: vec![params.h.clone()],
        d_members: None,
    };
    let beta = match &line.beta {
        BetaValue::OutsideTower => return report, // no integer points
        BetaValue::InTower(b) => b,
    };
    if let Some(nu) = line.nu.as_rational() {
        // nu is rational and never zero: (c-1)(c-25) = (13-c)^2 is impossible.
        debug_assert!(!nu.is_zero());
        let Some(beta_rat) = beta.as_rational() else {
            return report; // irrational beta over rational nu: no points
        };
        if !rational_line_nonempty(nu, beta_rat) {
            return report;
        }
        // infinitely many points: case C or D by integer axis crossing
        let crosses_r_axis = beta_rat.is_integer(); // point (-beta, 0)
        let crosses_s_axis = (beta_rat / nu).is_integer(); // point (0, -beta/nu)
        report.integer_points = rational_line_points(nu, beta_rat, level_cap);
        let products: Vec<i64> = {
            let mut p: Vec<i64> = report.integer_points.iter().map(|&(r, s)| r * s).collect();
            p.dedup();
            p
        };
        if crosses_r_axis || crosses_s_axis {
            report.case = BlockCase::C;
            report.members = products
                .iter()
                .map(|&p| &params.h + &Scalar::from_int(p))
                .collect();
        } else {
            report.case = BlockCase::D;
            report.members = products
                .iter()
                .map(|&p| &params.h + &Scalar::from_int(p))
                .collect();
            report.d_members = case_d_members(params, nu, &report.integer_points, level_cap);
        }
        report
    } else {
        // nu = a + b sqrt(d) with b != 0: split rational and irrational parts.
        // r + a s + e + (b s + f) sqrt(d) = 0 forces s = -f/b.
        let (a, b) = (line.nu.rational_part(), line.nu.irrational_part());
        let (e, f) = if beta.is_rational() || beta.radicand() == line.nu.radicand() {
            (beta.rational_part(), beta.irrational_part())
        } else {
            return report; // beta in a different quadratic field: no points
        };
        let s = &(-f) / b;
        if let Some(si) = scalar_is_int(&s) {
            let r = -&(&(a * &s) + e);
            if let Some(ri) = scalar_is_int(&r) {
                let prod = ri.checked_mul(si);
                if prod.is_some_and(|p| p.unsigned_abs() <= level_cap as u64) {
                    report.integer_points.push((ri, si));
                }
                if ri != 0 && si != 0 {
                    report.case = BlockCase::B;
                    report.members = vec![
                        params.h.clone(),
                        &params.h + &Scalar::from_int(ri.saturating_mul(si)),
                    ];
                    report.members.sort();
                }
            }
        }
        report
    }
}

/// Member formulas for case D, from the auxiliary line through `(-r_1, s_1)`.
fn case_d_members(
    params: &ModuleParams,
    nu: &Scalar,
    points: &[(i64, i64)],
    cap: u32,
) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
    // label points by product: ... r_0 s_0 < 0 < r_1 s_1 < ...
    let pos: Vec<&(i64, i64)> = points.iter().filter(|&&(r, s)| r * s > 0).collect();
    let (r1, s1) = **pos.first()?;
    let r1s1 = Scalar::from_int(r1 * s1);
    // auxiliary line through (-r1, s1) with the same slope: beta~ = r1 - nu s1
    let beta_aux = &Scalar::from_int(r1) - &(nu * &Scalar::from_int(s1));
    let aux_points = rational_line_points(nu, &beta_aux, cap);
    let aux_products: Vec<i64> = {
        let mut p: Vec<i64> = aux_points.iter().map(|&(r, s)| r * s).collect();
        p.retain(|&x| x != 0);
        p.dedup();
        p
    };
    let products: Vec<i64> = {
        let mut p: Vec<i64> = points.iter().map(|&(r, s)| r * s).collect();
        p.retain(|&x| x != 0);
        p.dedup();
        p
    };
    // index the positive/negative products as i = 1, 2, ... and i = 0, -1, ...
    let prod_at = |list: &[i64], i: i64| -> Option<i64> {
        let pos: Vec<i64> = list.iter().copied().filter(|&x| x > 0).collect();
        let neg: Vec<i64> = list.iter().copied().filter(|&x| x < 0).collect();
        if i >= 1 {
            pos.get((i - 1) as usize).copied()
        } else {
            // i = 0 -> largest negative product, i = -1 -> next, ...
            neg.iter().rev().nth((-i) as usize).copied()
        }
    };
    let mut h_list = Vec::new();
    let mut hp_list = Vec::new();
    for i in -2i64..=3 {
        let h_i = if i.rem_euclid(2) == 1 {
            prod_at(&products, i).map(|p| &params.h + &Scalar::from_int(p))
        } else {
            prod_at(&aux_products, i).map(|p| &(&params.h + &r1s1) + &Scalar::from_int(p))
        };
        let hp_i = if i.rem_euclid(2) == 1 {
            prod_at(&products, i + 1).map(|p| &params.h + &Scalar::from_int(p))
        } else {
            prod_at(&aux_products, i + 1).map(|p| &(&params.h + &r1s1) + &Scalar::from_int(p))
        };
        if let Some(v) = h_i {
            h_list.push(v);
        }
        if let Some(v) = hp_i {
            hp_list.push(v);
        }
    }
    Some((h_list, hp_list))
}

/// Per-level data of the split `W = W1 ∐ W2`.
#[derive(Clone, Debug)]
pub struct LevelSplit {
    pub level: u32,
    /// `(lambda, expansion)` for each PBW monomial `lambda` with trailing
    /// `L(-1)` power `q >= N`; `expansion` is the W2 basis vector
    /// `prefix . L(-1)^{q-N} . s` written in the PBW basis. Sorted by `q`
    /// descending, the change of basis is unitriangular.
    pub w2_members: Vec<(PBWMonomial, VermaVector)>,
    /// PBW monomials with `q < N`; they are the W1 basis as they stand.
    pub w1_members: Vec<PBWMonomial>,
}

/// The projection split of `M(c,h)` attached to its lowest singular vector.
#[derive(Clone, Debug)]
pub struct ProjectionSplit {
    params: ModuleParams,
    n_level: u32,
    singular: VermaVector,
    cache: BTreeMap<u32, LevelSplit>,
}

impl ProjectionSplit {
    /// Build the split, locating the singular vector by search up to
    /// `search_cap`. Rejects block-D modules.
    pub fn new(params: &ModuleParams, search_cap: u32) -> Result<Self, StructureError> {
        let block = classify_block(params, search_cap.max(4));
        if block.case == BlockCase::D {
            return Err(StructureError::BlockDUnsupported);
        }
        for level in 1..=search_cap {
            let found = find_singular(params, level)?;
            if let Some(sv) = found.into_iter().next() {
                return Ok(ProjectionSplit {
                    params: params.clone(),
                    n_level: level,
                    singular: sv.vector,
                    cache: BTreeMap::new(),
                });
            }
        }
        Err(StructureError::NoSingularVector { cap: search_cap })
    }

    /// Build directly from a known singular vector.
    pub fn from_singular(params: &ModuleParams, sv: &SingularVector) -> Self {
        ProjectionSplit {
            params: params.clone(),
            n_level: sv.level,
            singular: sv.vector.clone(),
            cache: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> &ModuleParams {
        &self.params
    }

    /// Level `N` of the singular vector; `W2` starts at this level.
    pub fn n_level(&self) -> u32 {
        self.n_level
    }

    pub fn singular(&self) -> &VermaVector {
        &self.singular
    }

    /// Parameters of `W2` as an abstract Verma module `M(c, h+N)`.
    pub fn w2_params(&self) -> ModuleParams {
        ModuleParams::new(
            self.params.c.clone(),
            &self.params.h + &Scalar::from_int(self.n_level as i64),
        )
    }

    fn compute_level(&self, level: u32) -> LevelSplit {
        let mut w2_members = Vec::new();
        let mut w1_members = Vec::new();
        for lambda in basis(level) {
            let q = lambda.trailing_ones();
            if q >= self.n_level {
                let (prefix, _) = lambda.prefix_split();
                let mut word: Vec<i64> = prefix.iter().map(|&n| -(n as i64)).collect();
                word.extend(core::iter::repeat(-1).take((q - self.n_level) as usize));
                let expansion = apply_word(&word, &self.singular);
                w2_members.push((lambda, expansion));
            } else {
                w1_members.push(lambda);
            }
        }
        // highest trailing power first: unitriangular back-substitution order
        w2_members.sort_by(|a, b| b.0.trailing_ones().cmp(&a.0.trailing_ones()));
        LevelSplit {
            level,
            w2_members,
            w1_members,
        }
    }

    /// Precompute split data for all levels up to `cap`.
    pub fn ensure_levels(&mut self, cap: u32) {
        for level in 0..=cap {
            if !self.cache.contains_key(&level) {
                let ls = self.compute_level(level);
                self.cache.insert(level, ls);
            }
        }
    }

    fn with_level<R>(&self, level: u32, f: impl FnOnce(&LevelSplit) -> R) -> R {
        if let Some(ls) = self.cache.get(&level) {
            f(ls)
        } else {
            f(&self.compute_level(level))
        }
    }

    pub fn w1_dim(&self, level: u32) -> usize {
        self.with_level(level, |ls| ls.w1_members.len())
    }

    pub fn w2_dim(&self, level: u32) -> usize {
        self.with_level(level, |ls| ls.w2_members.len())
    }

    /// W1 basis monomials at one level.
    pub fn w1_basis(&self, level: u32) -> Vec<PBWMonomial> {
        self.with_level(level, |ls| ls.w1_members.clone())
    }

    /// `pi_{W2}(v)` together with the W2 coordinates of the image, the
    /// latter as a vector of the abstract module `M(c, h+N)`.
    pub fn project_with_coords(&self, v: &VermaVector) -> (VermaVector, VermaVector) {
        let mut image = VermaVector::zero(self.params.clone());
        let mut coords = VermaVector::zero(self.w2_params());
        for level in v.levels() {
            if level < self.n_level {
                continue;
            }
            let mut work = v.component(level);
            self.with_level(level, |ls| {
                for (lambda, expansion) in &ls.w2_members {
                    let c = work.coeff(lambda);
                    if c.is_zero() {
                        continue;
                    }
                    for (m, x) in expansion.terms() {
                        work.add_term(m.clone(), -&(&c * x));
                    }
                    image.add_assign(&expansion.scale(&c));
                    // mu = lambda with N trailing ones removed
                    let modes = lambda.modes();
                    let mu =
                        PBWMonomial::new(modes[..modes.len() - self.n_level as usize].to_vec());
                    coords.add_term(mu, c);
                }
                debug_assert!(work.terms().all(|(m, _)| m.trailing_ones() < self.n_level));
            });
        }
        (image, coords)
    }

    /// The projection `pi_{W2}` onto the submodule along `W1`.
    pub fn apply_projection(&self, v: &VermaVector) -> VermaVector {
        self.project_with_coords(v).0
    }

    /// Complement part `v - pi(v)`.
    pub fn w1_component(&self, v: &VermaVector) -> VermaVector {
        v.sub(&self.apply_projection(v))
    }

    /// Send abstract `M(c, h+N)` coordinates back into `W2 ⊆ M(c,h)`.
    pub fn w2_vector_from_coords(&self, coords: &VermaVector) -> VermaVector {
        debug_assert_eq!(coords.params(), &self.w2_params());
        let mut out = VermaVector::zero(self.params.clone());
        for (mu, c) in coords.terms() {
            let word: Vec<i64> = mu.modes().iter().map(|&n| -(n as i64)).collect();
            out.add_assign(&apply_word(&word, &self.singular).scale(c));
        }
        out
    }
}

/// A submodule of `M(c,h)` described by generators, with graded spans
/// computed on demand.
#[derive(Clone, Debug)]
pub struct Submodule {
    params: ModuleParams,
    gens: Vec<VermaVector>,
}

impl Submodule {
    pub fn new(params: &ModuleParams, gens: Vec<VermaVector>) -> Self {
        Submodule {
            params: params.clone(),
            gens,
        }
    }

    pub fn zero(params: &ModuleParams) -> Self {
        Submodule::new(params, Vec::new())
    }

    pub fn generators(&self) -> &[VermaVector] {
        &self.gens
    }

    /// Coordinates of the level-`level` span over `basis(level)`.
    pub fn span_at(&self, level: u32) -> RowSpan {
        let b = basis(level);
        let pos: BTreeMap<&PBWMonomial, usize> =
            b.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut span = RowSpan::new(b.len());
        for g in &self.gens {
            let Some(glevel) = g.level() else { continue };
            if glevel > level {
                continue;
            }
            for word_mono in basis(level - glevel) {
                let word: Vec<i64> = word_mono.modes().iter().map(|&n| -(n as i64)).collect();
                let img = apply_word(&word, g);
                let mut row = vec![Scalar::zero(); b.len()];
                for (m, c) in img.terms() {
                    row[pos[m]] = c.clone();
                }
                span.insert(row);
            }
        }
        span
    }

    pub fn dim_at(&self, level: u32) -> usize {
        self.span_at(level).dim()
    }

    pub fn contains(&self, v: &VermaVector) -> bool {
        v.levels().into_iter().all(|level| {
            let b = basis(level);
            let pos: BTreeMap<&PBWMonomial, usize> =
                b.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let comp = v.component(level);
            let mut row = vec![Scalar::zero(); b.len()];
            for (m, c) in comp.terms() {
                row[pos[m]] = c.clone();
            }
            self.span_at(level).contains(&row)
        })
    }

    /// Closure check: `L(1)` and `L(2)` must map each graded span into the
    /// lower ones (lowering closure holds by construction).
    pub fn check_submodule(&self, level_cap: u32) -> Result<(), StructureError> {
        for level in 1..=level_cap {
            let b = basis(level);
            let span = self.span_at(level);
            for row in span.rows() {
                let mut v = VermaVector::zero(self.params.clone());
                for (j, c) in row.iter().enumerate() {
                    v.add_term(b[j].clone(), c.clone());
                }
                for m in [1i64, 2] {
                    if level as i64 - m < 0 {
                        continue;
                    }
                    let img = apply_mode(m, &v);
                    if !img.is_zero() && !self.contains(&img) {
                        return Err(StructureError::NotSubmodule);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Split data induced on a submodule `T ⊇ W2`: `T = (W1 ∩ T) ∐ W2`.
#[derive(Clone, Debug)]
pub struct RestrictedSplit {
    pub split: ProjectionSplit,
    pub submodule: Submodule,
}

/// Split data induced on a quotient `W/T` for `T ⊆ W2`:
/// `W/T = (W1+T)/T ∐ W2/T`, with the projection acting on representatives.
#[derive(Clone, Debug)]
pub struct QuotientSplit {
    pub split: ProjectionSplit,
    pub submodule: Submodule,
}

/// Induced split on a submodule `T` with `W2 ⊆ T` (proof line `T1 = W1 ∩ T`).
pub fn restrict_split(
    split: &ProjectionSplit,
    t: &Submodule,
    level_cap: u32,
) -> Result<RestrictedSplit, StructureError> {
    t.check_submodule(level_cap)?;
    if !t.contains(split.singular()) {
        return Err(StructureError::IncompatibleSubmodule);
    }
    Ok(RestrictedSplit {
        split: split.clone(),
        submodule: t.clone(),
    })
}

impl RestrictedSplit {
    /// dim of `T1 = W1 ∩ T` at a level.
    pub fn part1_dim(&self, level: u32) -> usize {
        self.submodule.dim_at(level) - self.part2_dim(level)
    }

    /// dim of `T2 = W2` at a level.
    pub fn part2_dim(&self, level: u32) -> usize {
        self.split.w2_dim(level)
    }

    pub fn total_dim(&self, level: u32) -> usize {
        self.submodule.dim_at(level)
    }

    /// The projection, restricted to `T`.
    pub fn project(&self, v: &VermaVector) -> VermaVector {
        debug_assert!(self.submodule.contains(v));
        self.split.apply_projection(v)
    }
}

/// Induced split on the quotient `W/T` for `T ⊆ W2`.
pub fn quotient_split(
    split: &ProjectionSplit,
    t: &Submodule,
    level_cap: u32,
) -> Result<QuotientSplit, StructureError> {
    t.check_submodule(level_cap)?;
    for g in t.generators() {
        if split.apply_projection(g) != *g {
            return Err(StructureError::IncompatibleSubmodule);
        }
    }
    Ok(QuotientSplit {
        split: split.clone(),
        submodule: t.clone(),
    })
}

impl QuotientSplit {
    /// Canonical representative of `v + T`.
    pub fn reduce(&self, v: &VermaVector) -> VermaVector {
        let params = self.split.params().clone();
        let mut out = VermaVector::zero(params.clone());
        for level in v.levels() {
            let b = basis(level);
            let pos: BTreeMap<&PBWMonomial, usize> =
                b.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let comp = v.component(level);
            let mut row = vec![Scalar::zero(); b.len()];
            for (m, c) in comp.terms() {
                row[pos[m]] = c.clone();
            }
            let red = self.submodule.span_at(level).reduce(row);
            for (j, c) in red.into_iter().enumerate() {
                out.add_term(b[j].clone(), c);
            }
        }
        out
    }

    /// The induced projection on representatives: `pi(v) mod T`.
    pub fn project(&self, v: &VermaVector) -> VermaVector {
        self.reduce(&self.split.apply_projection(v))
    }

    /// dim of `(W1 + T)/T` at a level (equals dim W1 since `T ⊆ W2`).
    pub fn part1_dim(&self, level: u32) -> usize {
        self.split.w1_dim(level)
    }

    /// dim of `W2/T` at a level.
    pub fn part2_dim(&self, level: u32) -> usize {
        self.split.w2_dim(level) - self.submodule.dim_at(level)
    }

    pub fn total_dim(&self, level: u32) -> usize {
        basis(level).len() - self.submodule.dim_at(level)
    }
}

/// `Ind(w) < N` forces `pi(w) = 0`; exposed for tests and suites.
pub fn index_below_n(split: &ProjectionSplit, v: &VermaVector) -> bool {
    index(v) < split.n_level() as i64
}
