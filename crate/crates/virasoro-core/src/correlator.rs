//! Closed-form projected correlators and their brute-force oracles.
//!
//! The engine writes each stress-tensor insertion `Y(omega, x)` as the sum
//! of its mode halves
//!
//! ```text
//!   Pos(x) = sum_{m >= -1} L(m) x^{-m-2}     Reg(x) = sum_{m <= -2} L(m) x^{-m-2}
//! ```
//!
//! and normalizes operator words by commuting `Pos` halves to the right.
//! `Reg` halves and fixed single modes commute with the projection
//! `pi_{W2}`, `Pos` suffixes acting on a fixed vector enumerate finitely,
//! and every commutator closes into geometric-series rational prefactors.
//! The result is an exact rational function with poles confined to
//! `x_i = 0` and `x_i = x_j`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::laurent::{MultiLaurent, PoleStructure, RationalCorrelator};
use crate::scalar::Scalar;
use crate::structure::{gram_pair, ProjectionSplit};
use crate::verma::{
    apply_mode_in, index, y_mode_in, ModuleKind, ModuleParams, VermaVector,
};

/// Errors from correlator computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorrelatorError {
    /// More insertions than the configured cap.
    CapExceeded { got: usize, cap: usize },
    /// An insertion vector outside `span{ L(-1)^q omega }` (plus the
    /// vacuum); the closed-form engine only handles that family.
    UnsupportedInsertion,
    /// The insertion vector is not a vacuum-module representative.
    NotVacuumRepresentative,
}

impl fmt::Display for CorrelatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelatorError::CapExceeded { got, cap } => {
                write!(f, "insertion count {got} exceeds cap {cap}")
            }
            CorrelatorError::UnsupportedInsertion => {
                write!(f, "insertion outside span{{L(-1)^q omega}}")
            }
            CorrelatorError::NotVacuumRepresentative => {
                write!(f, "insertion vector has an L(-1) tail")
            }
        }
    }
}

/// Cap on insertions in unprojected closed-form coefficients.
pub const INSERTION_CAP: usize = 4;

/// Cap on `k + l` when a projection marker splits the insertion list.
pub const PI_INSERTION_CAP: usize = 2;

/// A polynomial weight `P(m)` attached to a mode sum, little-endian
/// coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct ModePoly(Vec<Scalar>);

impl ModePoly {
    pub fn constant(c: Scalar) -> Self {
        ModePoly(vec![c]).normalized()
    }

    pub fn one() -> Self {
        ModePoly::constant(Scalar::one())
    }

    /// The monomial `m`.
    pub fn m() -> Self {
        ModePoly(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn from_coeffs(c: Vec<Scalar>) -> Self {
        ModePoly(c).normalized()
    }

    fn normalized(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn eval(&self, m: i64) -> Scalar {
        let mut acc = Scalar::zero();
        let x = Scalar::from_int(m);
        for c in self.0.iter().rev() {
            acc = &(&acc * &x) + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c.clone();
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c.clone();
        }
        ModePoly(out).normalized()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ModePoly(Vec::new());
        }
        let mut out = vec![Scalar::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ModePoly(out).normalized()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        ModePoly(self.0.iter().map(|c| c * s).collect()).normalized()
    }

    /// `P(m + a)`.
    pub fn shift_arg(&self, a: i64) -> Self {
        // P(m+a) = sum_k c_k (m+a)^k, expand binomially
        let mut out = ModePoly(Vec::new());
        let mut power = ModePoly::one(); // (m+a)^k
        let shift = ModePoly::from_coeffs(vec![Scalar::from_int(a), Scalar::one()]);
        for c in &self.0 {
            out = out.add(&power.scale(c));
            power = power.mul(&shift);
        }
        out
    }
}

/// One operator slot in a word of stress-tensor mode halves.
#[derive(Clone, PartialEq, Debug)]
pub enum ChainOp {
    /// `sum_{m >= -1} P(m) L(m) x_var^{-m-2}`
    Pos { var: usize, weight: ModePoly },
    /// `sum_{m <= -2} P(m) L(m) x_var^{-m-2}`
    Reg { var: usize, weight: ModePoly },
    /// A literal `L(mode)` with no attached variable.
    Fixed { mode: i64 },
}

impl ChainOp {
    fn is_reg_or_fixed(&self) -> bool {
        !matches!(self, ChainOp::Pos { .. })
    }
}

/// One term of the normalization calculus: an operator word with an
/// optional projection marker and a rational prefactor.
#[derive(Clone, Debug)]
struct OpTerm {
    ops: Vec<ChainOp>,
    /// The projection sits between `ops[..pi]` and `ops[pi..]`.
    pi: Option<usize>,
    coeff: RationalCorrelator,
}

/// Symbolic sums `sum_j L^j x_a^{-L-1} x_b^L G_j(x_a, x_b)`, used while
/// closing geometric sums with a generic lower bound `L`.
struct GenericGeo {
    nvars: usize,
    var_a: usize,
    var_b: usize,
    /// index = power of L
    parts: Vec<RationalCorrelator>,
}

impl GenericGeo {
    /// `sum_{m >= L} x_a^{-m-2} x_b^m = x_a^{-L-1} x_b^L / (x_a - x_b)`.
    fn base(nvars: usize, var_a: usize, var_b: usize) -> Self {
        let mut poles = PoleStructure::none(nvars);
        poles.set_pair_order(var_a, var_b, 1);
        let sign = if var_a > var_b {
            // stored factor is (x_b - x_a); flip the sign
            -Scalar::one()
        } else {
            Scalar::one()
        };
        let num = MultiLaurent::term(nvars, vec![0; nvars], sign);
        GenericGeo {
            nvars,
            var_a,
            var_b,
            parts: vec![RationalCorrelator::new(num, poles)],
        }
    }

    /// Apply `theta_b = x_b d/dx_b` to the whole sum, acting on the hidden
    /// `x_b^L` as well: theta_b (L^j x^{-L-1}_a x_b^L G) =
    /// L^{j+1} (...) G + L^j (...) theta_b G.
    fn theta_b(&self) -> Self {
        let mut parts = vec![RationalCorrelator::zero(self.nvars); self.parts.len() + 1];
        for (j, g) in self.parts.iter().enumerate() {
            // L^{j+1} part
            parts[j + 1] = parts[j + 1].add(g);
            // theta_b G part
            let tg = g.derivative(self.var_b).mul_monomial(self.var_b, 1, &Scalar::one());
            parts[j] = parts[j].add(&tg);
        }
        GenericGeo {
            nvars: self.nvars,
            var_a: self.var_a,
            var_b: self.var_b,
            parts,
        }
    }

    fn scale(&self, s: &Scalar) -> Self {
        GenericGeo {
            nvars: self.nvars,
            var_a: self.var_a,
            var_b: self.var_b,
            parts: self.parts.iter().map(|g| g.scale(s)).collect(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        let n = self.parts.len().max(other.parts.len());
        let mut parts = vec![RationalCorrelator::zero(self.nvars); n];
        for (j, g) in self.parts.iter().enumerate() {
            parts[j] = parts[j].add(g);
        }
        for (j, g) in other.parts.iter().enumerate() {
            parts[j] = parts[j].add(g);
        }
        GenericGeo {
            nvars: self.nvars,
            var_a: self.var_a,
            var_b: self.var_b,
            parts,
        }
    }

    /// Evaluate at a concrete lower bound `L`, producing the closed form of
    /// `sum_{m >= L} (applied weights) x_a^{-m-2} x_b^m`.
    fn at(&self, l: i64) -> RationalCorrelator {
        let mut acc = RationalCorrelator::zero(self.nvars);
        let mut lp = Scalar::one();
        for g in &self.parts {
            acc = acc.add(&g.scale(&lp));
            lp = &lp * &Scalar::from_int(l);
        }
        // multiply by x_a^{-L-1} x_b^L
        acc.mul_monomial(self.var_a, -l - 1, &Scalar::one())
            .mul_monomial(self.var_b, l, &Scalar::one())
    }

    /// Apply a weight polynomial `P(theta_b)`.
    fn weighted(nvars: usize, var_a: usize, var_b: usize, weight: &ModePoly) -> Self {
        let base = GenericGeo::base(nvars, var_a, var_b);
        let mut acc = GenericGeo {
            nvars,
            var_a,
            var_b,
            parts: vec![RationalCorrelator::zero(nvars)],
        };
        let mut power = base;
        for (k, c) in weight.coeffs().iter().enumerate() {
            if k > 0 {
                power = power.theta_b();
            }
            if !c.is_zero() {
                acc = acc.add(&power.scale(c));
            }
        }
        acc
    }

    /// Keep only the symbolic `L`-polynomial structure: return, per power
    /// of `L`, the rational part (used for generic-L closures).
    fn parts(&self) -> &[RationalCorrelator] {
        &self.parts
    }
}

/// Closed form of `sum_{m >= lo} P(m) x_a^{-m-2} x_b^m`, exact.
pub fn geometric_closed(
    nvars: usize,
    var_a: usize,
    var_b: usize,
    weight: &ModePoly,
    lo: i64,
) -> RationalCorrelator {
    GenericGeo::weighted(nvars, var_a, var_b, weight).at(lo)
}

/// Which lower bound variant of the shifted geometric sum to close.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeoLower {
    /// `n >= m' + 2`
    MPrimePlusTwo,
    /// `n >= 0`
    Zero,
    /// `n >= -1`
    MinusOne,
}

/// Closed form of `sum_n (2n - m') y1^{-n-2} y2^n` over the chosen range,
/// as a rational function in two variables `(y1, y2) = (var 0, var 1)`.
pub fn shifted_geometric_sum(m_prime: i64, lower: GeoLower) -> RationalCorrelator {
    let weight = ModePoly::from_coeffs(vec![Scalar::from_int(-m_prime), Scalar::from_int(2)]);
    let lo = match lower {
        GeoLower::MPrimePlusTwo => m_prime + 2,
        GeoLower::Zero => 0,
        GeoLower::MinusOne => -1,
    };
    geometric_closed(2, 0, 1, &weight, lo)
}

/// Closed form of `sum_{m >= -1} ((m^3 - m)/12) c x1^{-m-2} x2^{m-2}`.
///
/// The summand vanishes at `m = -1, 0, 1`, and exact summation closes to
/// `(c/2) / (x1 - x2)^4`. The printed factor in the source derivation of
/// this identity is `3c/2`; the series oracle in the test suite pins the
/// constant to `c/2`, and that is what this returns.
pub fn central_sum(c: &Scalar) -> RationalCorrelator {
    let w = ModePoly::from_coeffs(vec![
        Scalar::zero(),
        &-Scalar::one() * &(c / &Scalar::from_int(12)),
        Scalar::zero(),
        c / &Scalar::from_int(12),
    ]);
    geometric_closed(2, 0, 1, &w, -1).mul_monomial(1, -2, &Scalar::one())
}

/// The module a correlator state lives in.
#[derive(Clone, Debug)]
pub struct ModuleHandle {
    pub params: ModuleParams,
    pub kind: ModuleKind,
}

impl ModuleHandle {
    pub fn verma(params: ModuleParams) -> Self {
        ModuleHandle {
            params,
            kind: ModuleKind::Verma,
        }
    }

    pub fn vacuum(c: Scalar) -> Self {
        ModuleHandle {
            params: ModuleParams::new(c, Scalar::zero()),
            kind: ModuleKind::Vacuum,
        }
    }
}

/// Decompose a vacuum vector into the `L(-1)`-derivative family of omega:
/// `v = sum_q a_q L(-1)^q omega`, returning `(q, a_q)` pairs (the vacuum
/// `1` contributes with `q = None`).
///
/// In the vacuum module `L(-1)^q omega = q! L(-q-2) 1`, so exactly the
/// single-part monomials qualify.
fn omega_family(v: &VermaVector) -> Result<Vec<(Option<u32>, Scalar)>, CorrelatorError> {
    if !v.is_vacuum_representative() {
        return Err(CorrelatorError::NotVacuumRepresentative);
    }
    let mut out = Vec::new();
    for (mono, coeff) in v.terms() {
        if mono.is_unit() {
            out.push((None, coeff.clone()));
            continue;
        }
        if mono.modes().len() != 1 {
            return Err(CorrelatorError::UnsupportedInsertion);
        }
        let n = mono.modes()[0];
        debug_assert!(n >= 2);
        let q = n - 2;
        // L(-n)1 = (1/q!) L(-1)^q omega
        let mut fact = Scalar::one();
        for t in 1..=q as i64 {
            fact *= Scalar::from_int(t);
        }
        out.push((Some(q), &coeff.clone() / &fact));
    }
    Ok(out)
}

/// Falling product `(-m-2)(-m-3)...(-m-1-q)` as a polynomial in `m`:
/// the mode weight of `d^q/dx^q Y(omega, x)` (with the `x^{-q}` shift kept
/// separately).
fn derivative_weight(q: u32) -> ModePoly {
    let mut p = ModePoly::one();
    for j in 0..q as i64 {
        p = p.mul(&ModePoly::from_coeffs(vec![
            Scalar::from_int(-2 - j),
            -Scalar::one(),
        ]));
    }
    p
}

/// Context for closed-form and oracle correlators.
pub struct CorrelatorContext {
    pub module: ModuleHandle,
    /// Needed when a projection marker is present.
    pub split: Option<ProjectionSplit>,
}

/// How the dual vector in a matrix coefficient pairs with the output.
///
/// With a projection marker the output lies in the submodule `W2`, which
/// is exactly the radical of the contravariant form on `W`; module-Gram
/// functionals therefore see it as zero. Duals of `W2` itself (represented
/// in the abstract `M(c, h+N)` coordinates of the split) reach it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DualPairing {
    /// `w_dual` is a vector of the ambient module, paired by its Gram form.
    ModuleGram,
    /// `w_dual` is a vector of `M(c, h+N)`, read as a dual of `W2` through
    /// the split's coordinate isomorphism. Requires a projection marker.
    W2Gram,
}

impl CorrelatorContext {
    fn apply_mode(&self, m: i64, v: &VermaVector) -> VermaVector {
        apply_mode_in(self.module.kind, m, v)
    }

    fn project(&self, v: &VermaVector) -> VermaVector {
        self.split
            .as_ref()
            .expect("projection marker without split")
            .apply_projection(v)
    }

    fn pair(&self, pairing: DualPairing, w_dual: &VermaVector, v: &VermaVector) -> Scalar {
        match pairing {
            DualPairing::ModuleGram => gram_pair(w_dual, v),
            DualPairing::W2Gram => {
                let split = self.split.as_ref().expect("W2 pairing needs the split");
                debug_assert_eq!(w_dual.params(), &split.w2_params());
                let (_, coords) = split.project_with_coords(v);
                gram_pair(w_dual, &coords)
            }
        }
    }

    /// Ambient level the dual vector pairs against.
    fn dual_target_level(&self, pairing: DualPairing, w_dual: &VermaVector) -> i64 {
        match pairing {
            DualPairing::ModuleGram => w_dual.max_level() as i64,
            DualPairing::W2Gram => {
                let split = self.split.as_ref().expect("W2 pairing needs the split");
                w_dual.max_level() as i64 + split.n_level() as i64
            }
        }
    }
}

// ---------------------------------------------------------------------
// word normalization
// ---------------------------------------------------------------------

/// Swap `Pos` at `t` past the `Reg`/`Fixed` at `t+1`; returns replacement
/// terms. Also reports the largest pole order any new prefactor carries on
/// the affected pair (the structural audit of the closure constants).
fn swap_at(term: &OpTerm, t: usize, audit: &mut u32, c_charge: &Scalar) -> Vec<OpTerm> {
    let nvars = term.coeff.nvars();
    let ChainOp::Pos { var: a, weight: p } = term.ops[t].clone() else {
        unreachable!()
    };
    let mut out = Vec::new();
    // swapped word
    {
        let mut ops = term.ops.clone();
        ops.swap(t, t + 1);
        out.push(OpTerm {
            ops,
            pi: term.pi,
            coeff: term.coeff.clone(),
        });
    }
    match term.ops[t + 1].clone() {
        ChainOp::Reg { var: b, weight: q } => {
            // R(m; M) = P(m) Q(M - m) (2m - M) as a polynomial in m whose
            // coefficients are polynomials in the merged mode M.
            let bi = bi_mul(
                &bi_from_m_poly(&p),
                &bi_mul(&bi_from_shifted(&q), &bi_commutator()),
            );
            // (alpha) merged mode M >= -1: generic-L closure at L = M + 2
            for (tdeg, rho) in bi.iter().enumerate() {
                if rho.is_zero() {
                    continue;
                }
                let gg = GenericGeo::weighted(nvars, a, b, &mono_times(tdeg));
                // value = sum_j (M)^j-free...: at L = M+2 the hidden
                // monomial is x_a^{-M-3} x_b^{M+2}; absorb x_b^{-M-2} from
                // the Reg slot to get x_a^{-1} times a Pos-type op in x_a.
                for (j, g) in gg.parts().iter().enumerate() {
                    if g.is_zero() {
                        continue;
                    }
                    // L^j = (M+2)^j
                    let lpoly = ModePoly::from_coeffs(vec![Scalar::from_int(2), Scalar::one()]);
                    let mut ljp = ModePoly::one();
                    for _ in 0..j {
                        ljp = ljp.mul(&lpoly);
                    }
                    let weight = rho.mul(&ljp);
                    if weight.is_zero() {
                        continue;
                    }
                    // prefactor: g * x_a^{-1} * x_b^{+2}*x_b^{-2}: the
                    // x_b-exponent cancels; only x_a^{-1} remains
                    let pre = g.mul_monomial(a, -1, &Scalar::one());
                    track_audit(audit, &pre, a, b);
                    let mut ops = Vec::with_capacity(term.ops.len() - 1);
                    ops.extend_from_slice(&term.ops[..t]);
                    ops.push(ChainOp::Pos { var: a, weight });
                    ops.extend_from_slice(&term.ops[t + 2..]);
                    out.push(OpTerm {
                        ops,
                        pi: shrink_pi(term.pi, t, 1),
                        coeff: term.coeff.mul(&pre),
                    });
                }
            }
            // (beta) merged mode M <= -2: fixed lower bound L = -1; the
            // spurious (m, m') = (-1, -1) term carries weight zero.
            for (tdeg, rho) in bi.iter().enumerate() {
                if rho.is_zero() {
                    continue;
                }
                let closed = geometric_closed(nvars, a, b, &mono_times(tdeg), -1);
                if closed.is_zero() {
                    continue;
                }
                track_audit(audit, &closed, a, b);
                let mut ops = Vec::with_capacity(term.ops.len() - 1);
                ops.extend_from_slice(&term.ops[..t]);
                ops.push(ChainOp::Reg {
                    var: b,
                    weight: rho.clone(),
                });
                ops.extend_from_slice(&term.ops[t + 2..]);
                out.push(OpTerm {
                    ops,
                    pi: shrink_pi(term.pi, t, 1),
                    coeff: term.coeff.mul(&closed),
                });
            }
            // central term: m >= 2, m' = -m
            let central_weight = {
                // P(m) Q(-m) (m^3 - m)/12 * c
                let qm = compose_neg(&q);
                let cube = ModePoly::from_coeffs(vec![
                    Scalar::zero(),
                    &-Scalar::one() * &(c_charge / &Scalar::from_int(12)),
                    Scalar::zero(),
                    c_charge / &Scalar::from_int(12),
                ]);
                p.mul(&qm).mul(&cube)
            };
            if !central_weight.is_zero() {
                let closed =
                    geometric_closed(nvars, a, b, &central_weight, 2).mul_monomial(b, -2, &Scalar::one());
                if !closed.is_zero() {
                    track_audit(audit, &closed, a, b);
                    let mut ops = Vec::with_capacity(term.ops.len() - 2);
                    ops.extend_from_slice(&term.ops[..t]);
                    ops.extend_from_slice(&term.ops[t + 2..]);
                    out.push(OpTerm {
                        ops,
                        pi: shrink_pi(term.pi, t, 2),
                        coeff: term.coeff.mul(&closed),
                    });
                }
            }
        }
        ChainOp::Fixed { mode: mp } => {
            // merged: sum_{m >= -1} P(m)(m - mp) L(m + mp) x_a^{-m-2}
            // with M = m + mp: weight P(M - mp)(M - 2 mp), monomial x_a^{mp}
            let weight = p
                .shift_arg(-mp)
                .mul(&ModePoly::from_coeffs(vec![
                    Scalar::from_int(-2 * mp),
                    Scalar::one(),
                ]));
            // M >= -1 part: a Pos op with prefactor x_a^{mp}
            if !weight.is_zero() {
                let pre = RationalCorrelator::constant(nvars, Scalar::one())
                    .mul_monomial(a, mp, &Scalar::one());
                let mut ops = Vec::with_capacity(term.ops.len() - 1);
                ops.extend_from_slice(&term.ops[..t]);
                ops.push(ChainOp::Pos {
                    var: a,
                    weight: weight.clone(),
                });
                ops.extend_from_slice(&term.ops[t + 2..]);
                out.push(OpTerm {
                    ops,
                    pi: shrink_pi(term.pi, t, 1),
                    coeff: term.coeff.mul(&pre),
                });
            }
            // finite range M in [mp - 1, -2]: fixed modes with monomials
            for big_m in (mp - 1)..=-2 {
                let wv = weight.eval(big_m);
                if wv.is_zero() {
                    continue;
                }
                let m = big_m - mp;
                let pre = RationalCorrelator::constant(nvars, wv).mul_monomial(
                    a,
                    -m - 2,
                    &Scalar::one(),
                );
                let mut ops = Vec::with_capacity(term.ops.len() - 1);
                ops.extend_from_slice(&term.ops[..t]);
                ops.push(ChainOp::Fixed { mode: big_m });
                ops.extend_from_slice(&term.ops[t + 2..]);
                out.push(OpTerm {
                    ops,
                    pi: shrink_pi(term.pi, t, 1),
                    coeff: term.coeff.mul(&pre),
                });
            }
            // central: m = -mp (valid since mp <= 1 always here)
            if -mp >= -1 {
                let m = -mp;
                let cval = &(&p.eval(m) * &Scalar::ratio(m * m * m - m, 12)) * c_charge;
                if !cval.is_zero() {
                    let pre = RationalCorrelator::constant(nvars, cval).mul_monomial(
                        a,
                        -m - 2,
                        &Scalar::one(),
                    );
                    let mut ops = Vec::with_capacity(term.ops.len() - 2);
                    ops.extend_from_slice(&term.ops[..t]);
                    ops.extend_from_slice(&term.ops[t + 2..]);
                    out.push(OpTerm {
                        ops,
                        pi: shrink_pi(term.pi, t, 2),
                        coeff: term.coeff.mul(&pre),
                    });
                }
            }
        }
        ChainOp::Pos { .. } => unreachable!(),
    }
    out
}

fn shrink_pi(pi: Option<usize>, t: usize, removed: usize) -> Option<usize> {
    pi.map(|p| if p > t + 1 { p - removed } else { p })
}

fn track_audit(audit: &mut u32, pre: &RationalCorrelator, a: usize, b: usize) {
    let ord = pre.poles().pair_order(a, b);
    if ord > *audit {
        *audit = ord;
    }
}

fn mono_times(t: usize) -> ModePoly {
    let mut c = vec![Scalar::zero(); t + 1];
    c[t] = Scalar::one();
    ModePoly::from_coeffs(c)
}

// Bivariate polynomials in (m, M), stored as m-power -> polynomial in M.
type BiPoly = Vec<ModePoly>;

fn bi_zero() -> BiPoly {
    Vec::new()
}

fn bi_from_m_poly(p: &ModePoly) -> BiPoly {
    // P(m): m-power k has constant coefficient
    p.coeffs()
        .iter()
        .map(|c| ModePoly::constant(c.clone()))
        .collect()
}

fn bi_from_shifted(q: &ModePoly) -> BiPoly {
    // Q(M - m) = sum_k q_k (M - m)^k
    let mut out = bi_zero();
    // (M - m)^k expanded iteratively
    let mut power: BiPoly = vec![ModePoly::one()]; // (M-m)^0
    for (k, qk) in q.coeffs().iter().enumerate() {
        if k > 0 {
            // multiply power by (M - m)
            let mut next: BiPoly = vec![ModePoly::constant(Scalar::zero()); power.len() + 1];
            for (i, coe) in power.iter().enumerate() {
                // * M
                next[i] = next[i].add(&coe.mul(&ModePoly::m()));
                // * (-m)
                next[i + 1] = next[i + 1].add(&coe.scale(&-Scalar::one()));
            }
            power = next;
        }
        if !qk.is_zero() {
            while out.len() < power.len() {
                out.push(ModePoly::constant(Scalar::zero()));
            }
            for (i, coe) in power.iter().enumerate() {
                out[i] = out[i].add(&coe.scale(qk));
            }
        }
    }
    out
}

fn bi_commutator() -> BiPoly {
    // (2m - M): m-power 0: -M, m-power 1: 2
    vec![
        ModePoly::from_coeffs(vec![Scalar::zero(), -Scalar::one()]),
        ModePoly::constant(Scalar::from_int(2)),
    ]
}

fn bi_mul(a: &BiPoly, b: &BiPoly) -> BiPoly {
    if a.is_empty() || b.is_empty() {
        return bi_zero();
    }
    let mut out: BiPoly = vec![ModePoly::constant(Scalar::zero()); a.len() + b.len() - 1];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&pa.mul(pb));
        }
    }
    out
}

fn compose_neg(q: &ModePoly) -> ModePoly {
    // Q(-m)
    let mut out = Vec::new();
    for (k, c) in q.coeffs().iter().enumerate() {
        let v = if k % 2 == 0 { c.clone() } else { -c };
        out.push(v);
    }
    ModePoly::from_coeffs(out)
}

/// Normalize an operator word into terms of the shape
/// `[Reg|Fixed]* [Pos]* pi [Pos]*`, recording the largest pair-pole order
/// any single commutation closure introduced.
fn normalize(start: OpTerm, c_charge: &Scalar, audit: &mut u32) -> Vec<OpTerm> {
    let mut work = vec![start];
    let mut done = Vec::new();
    while let Some(mut term) = work.pop() {
        // slide pi right across Reg/Fixed ops (they commute with it)
        loop {
            match term.pi {
                Some(p) if p < term.ops.len() && term.ops[p].is_reg_or_fixed() => {
                    term.pi = Some(p + 1);
                }
                _ => break,
            }
        }
        // leftmost violation: Pos immediately left of Reg/Fixed
        let mut violation = None;
        for t in 0..term.ops.len().saturating_sub(1) {
            if matches!(term.ops[t], ChainOp::Pos { .. })
                && term.ops[t + 1].is_reg_or_fixed()
                && term.pi != Some(t + 1)
            {
                violation = Some(t);
                break;
            }
        }
        match violation {
            Some(t) => work.extend(swap_at(&term, t, audit, c_charge)),
            None => done.push(term),
        }
    }
    done
}

// ---------------------------------------------------------------------
// evaluation of normalized words
// ---------------------------------------------------------------------

/// Apply a `Pos` op to a vector-valued Laurent state.
fn apply_pos_state(
    ctx: &CorrelatorContext,
    var: usize,
    weight: &ModePoly,
    state: &MultiLaurent<VermaVector>,
) -> MultiLaurent<VermaVector> {
    let mut out = MultiLaurent::zero(state.nvars());
    for (exps, vec) in state.terms() {
        let max_m = vec.max_level() as i64;
        for m in -1..=max_m {
            let wv = weight.eval(m);
            if wv.is_zero() {
                continue;
            }
            let image = ctx.apply_mode(m, vec).scale(&wv);
            if image.is_zero() {
                continue;
            }
            let mut e = exps.clone();
            e[var] += -m - 2;
            out.add_term(e, image);
        }
    }
    out
}

/// Pair the `Reg`/`Fixed` prefix against the dual vector, enumerating the
/// finitely many raising chains that land on `w_dual`'s level.
fn eval_prefix(
    ctx: &CorrelatorContext,
    ops: &[ChainOp],
    pairing: DualPairing,
    w_dual: &VermaVector,
    state: &MultiLaurent<VermaVector>,
) -> MultiLaurent<Scalar> {
    let target = ctx.dual_target_level(pairing, w_dual);
    let mut out = MultiLaurent::zero(state.nvars());
    // minimal level raise each remaining op performs
    fn min_raise(ops: &[ChainOp]) -> i64 {
        ops.iter()
            .map(|op| match op {
                ChainOp::Reg { .. } => 2,
                ChainOp::Fixed { mode } => -mode,
                ChainOp::Pos { .. } => unreachable!("Pos in prefix"),
            })
            .sum()
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        ctx: &CorrelatorContext,
        ops: &[ChainOp],
        pairing: DualPairing,
        w_dual: &VermaVector,
        target: i64,
        vec: &VermaVector,
        exps: &[i64],
        out: &mut MultiLaurent<Scalar>,
    ) {
        if vec.is_zero() {
            return;
        }
        let Some((last, rest)) = ops.split_last() else {
            let val = ctx.pair(pairing, w_dual, vec);
            if !val.is_zero() {
                out.add_term(exps.to_vec(), val);
            }
            return;
        };
        match last {
            ChainOp::Fixed { mode } => {
                let image = ctx.apply_mode(*mode, vec);
                rec(ctx, rest, pairing, w_dual, target, &image, exps, out);
            }
            ChainOp::Reg { var, weight } => {
                let cur = vec.max_level() as i64;
                // this op raises by -m >= 2; the rest must still reach target
                let max_raise = target - cur - min_raise(rest);
                for m in (-(max_raise.max(0))..=-2).rev() {
                    let wv = weight.eval(m);
                    if wv.is_zero() {
                        continue;
                    }
                    let image = ctx.apply_mode(m, vec).scale(&wv);
                    if image.is_zero() {
                        continue;
                    }
                    let mut e = exps.to_vec();
                    e[*var] += -m - 2;
                    rec(ctx, rest, pairing, w_dual, target, &image, &e, out);
                }
            }
            ChainOp::Pos { .. } => unreachable!("Pos in prefix"),
        }
    }
    for (exps, vec) in state.terms() {
        rec(ctx, ops, pairing, w_dual, target, vec, exps, &mut out);
    }
    out
}

/// Exact matrix coefficient of a word of insertions with an optional
/// projection marker:
/// `< w_dual, Y(v_1, x_1) ... pi ... Y(v_n, x_n) w >`.
///
/// Insertions must lie in `span{1, L(-1)^q omega}`. `pi_position` counts
/// the insertions to the left of the projection; `None` means no
/// projection. The result is exact, with poles only at `x_i = 0` and
/// `x_i = x_j`.
pub fn matrix_coefficient(
    ctx: &CorrelatorContext,
    w_dual: &VermaVector,
    pairing: DualPairing,
    insertions: &[VermaVector],
    pi_position: Option<usize>,
    w: &VermaVector,
) -> Result<RationalCorrelator, CorrelatorError> {
    let cap = if pi_position.is_some() {
        PI_INSERTION_CAP
    } else {
        INSERTION_CAP
    };
    if insertions.len() > cap {
        return Err(CorrelatorError::CapExceeded {
            got: insertions.len(),
            cap,
        });
    }
    let nvars = insertions.len();
    let families: Vec<Vec<(Option<u32>, Scalar)>> = insertions
        .iter()
        .map(omega_family)
        .collect::<Result<_, _>>()?;
    // distribute: per insertion choose (identity | Pos | Reg) x family part
    #[derive(Clone)]
    enum Half {
        Identity(Scalar),
        Op(ChainOp, RationalCorrelator),
    }
    let mut choices: Vec<Vec<Half>> = Vec::new();
    for (slot, fam) in families.iter().enumerate() {
        let mut opts = Vec::new();
        for (q, coeff) in fam {
            match q {
                None => {
                    // identity insertion contributes x^{-0}... Y(1,x) = Id
                    opts.push(Half::Identity(coeff.clone()));
                }
                Some(q) => {
                    let weight = derivative_weight(*q).scale(
                        &(&coeff.clone()
                            / &(1..=*q as i64)
                                .map(Scalar::from_int)
                                .fold(Scalar::one(), |a, b| &a * &b)),
                    );
                    let pre = RationalCorrelator::constant(nvars, Scalar::one())
                        .mul_monomial(slot, -(*q as i64), &Scalar::one());
                    opts.push(Half::Op(
                        ChainOp::Pos {
                            var: slot,
                            weight: weight.clone(),
                        },
                        pre.clone(),
                    ));
                    opts.push(Half::Op(
                        ChainOp::Reg {
                            var: slot,
                            weight,
                        },
                        pre,
                    ));
                }
            }
        }
        choices.push(opts);
    }
    let mut terms: Vec<OpTerm> = vec![OpTerm {
        ops: Vec::new(),
        pi: pi_position.map(|_| 0),
        coeff: RationalCorrelator::constant(nvars, Scalar::one()),
    }];
    for (slot, opts) in choices.iter().enumerate() {
        let mut next = Vec::new();
        for term in &terms {
            for opt in opts {
                let mut t = term.clone();
                match opt {
                    Half::Identity(c) => {
                        // Y(1, x) = Id adds no operator
                        t.coeff = t.coeff.scale(c);
                    }
                    Half::Op(op, pre) => {
                        t.ops.push(op.clone());
                        t.coeff = t.coeff.mul(pre);
                        if let (Some(p), Some(pp)) = (pi_position, t.pi.as_mut()) {
                            if slot < p {
                                *pp += 1;
                            }
                        }
                    }
                }
                next.push(t);
            }
        }
        terms = next;
    }
    let mut audit = 0u32;
    let mut result = RationalCorrelator::zero(nvars);
    for term in terms {
        for normal in normalize(term, &ctx.module.params.c, &mut audit) {
            result = result.add(&eval_normal(ctx, &normal, pairing, w_dual, w));
        }
    }
    Ok(result)
}

fn eval_normal(
    ctx: &CorrelatorContext,
    term: &OpTerm,
    pairing: DualPairing,
    w_dual: &VermaVector,
    w: &VermaVector,
) -> RationalCorrelator {
    let nvars = term.coeff.nvars();
    if term.coeff.is_zero() {
        return RationalCorrelator::zero(nvars);
    }
    let prefix_len = term
        .ops
        .iter()
        .position(|op| !op.is_reg_or_fixed())
        .unwrap_or(term.ops.len());
    let pi = term.pi.unwrap_or(term.ops.len());
    debug_assert!(pi >= prefix_len || term.pi.is_none());
    let mut state = MultiLaurent::term(nvars, vec![0; nvars], w.clone());
    // suffix Pos ops (right of pi), rightmost first
    for op in term.ops[pi.max(prefix_len)..].iter().rev() {
        let ChainOp::Pos { var, weight } = op else {
            unreachable!("non-Pos right of pi in normal form")
        };
        state = apply_pos_state(ctx, *var, weight, &state);
    }
    if term.pi.is_some() {
        state = state.map(|v| ctx.project(v));
    }
    // mid Pos ops (between prefix and pi)
    for op in term.ops[prefix_len..pi.max(prefix_len)].iter().rev() {
        let ChainOp::Pos { var, weight } = op else {
            unreachable!("non-Pos in mid segment")
        };
        state = apply_pos_state(ctx, *var, weight, &state);
    }
    let paired = eval_prefix(ctx, &term.ops[..prefix_len], pairing, w_dual, &state);
    if paired.is_zero() {
        return RationalCorrelator::zero(nvars);
    }
    term.coeff
        .mul(&RationalCorrelator::new(paired, PoleStructure::none(nvars)))
}

// ---------------------------------------------------------------------
// projected products and their structure
// ---------------------------------------------------------------------

/// One term of a structured projected product: a chain of regular /
/// fixed-mode operators applied to a `W2`-valued Laurent polynomial, all
/// multiplied by a rational prefactor carrying the pair poles.
pub struct ProjectedTerm {
    pub chain: Vec<ChainOp>,
    pub laurent: MultiLaurent<VermaVector>,
    pub prefactor: RationalCorrelator,
}

/// Closed form of `pi Y(omega, x_1) ... Y(omega, x_l) w_1`.
pub struct ProjectedProduct {
    pub nvars: usize,
    pub terms: Vec<ProjectedTerm>,
    /// Largest pair-pole order a single commutation closure introduced.
    pub commutation_audit: u32,
}

impl ProjectedProduct {
    /// Truncated series expansion of the whole product (region: variable
    /// `i` dominates variable `j` for `i < j`).
    pub fn expand(
        &self,
        ctx: &CorrelatorContext,
        lo: &[i64],
        hi: &[i64],
    ) -> MultiLaurent<VermaVector> {
        let n = self.nvars;
        let order: Vec<usize> = (0..n).collect();
        let mut out = MultiLaurent::zero(n);
        for term in &self.terms {
            // chain applied as truncated series
            let mut state = term.laurent.clone();
            for op in term.chain.iter().rev() {
                match op {
                    ChainOp::Fixed { mode } => {
                        state = state.map(|v| ctx.apply_mode(*mode, v));
                    }
                    ChainOp::Reg { var, weight } => {
                        let mut next = MultiLaurent::zero(n);
                        for (exps, vec) in state.terms() {
                            // exponent -m-2 within [lo, hi] for this var
                            let m_lo = -hi[*var] - 2;
                            let m_hi = (-lo[*var] - 2).min(-2);
                            for m in m_lo..=m_hi {
                                let wv = weight.eval(m);
                                if wv.is_zero() {
                                    continue;
                                }
                                let image = ctx.apply_mode(m, vec).scale(&wv);
                                if image.is_zero() {
                                    continue;
                                }
                                let mut e = exps.clone();
                                e[*var] += -m - 2;
                                next.add_term(e, image);
                            }
                        }
                        state = next;
                    }
                    ChainOp::Pos { var, weight } => {
                        state = apply_pos_state(ctx, *var, weight, &state);
                    }
                }
            }
            // widen the prefactor window by the state exponent range
            let mut wlo = lo.to_vec();
            let mut whi = hi.to_vec();
            for v in 0..n {
                if let (Some(mn), Some(mx)) = (state.min_exp(v), state.max_exp(v)) {
                    wlo[v] -= mx;
                    whi[v] -= mn;
                }
            }
            let pre = term.prefactor.expand(&order, &wlo, &whi);
            out = out.add(&state.mul_scalar_laurent(&pre).window(lo, hi));
        }
        out
    }
}

/// `pi Y(omega, x) w_1` as a finite Laurent polynomial in one variable:
/// only the modes `m >= -1` survive the projection on `W_1` vectors.
pub fn projected_omega_action(
    split: &ProjectionSplit,
    w1: &VermaVector,
) -> MultiLaurent<VermaVector> {
    let mut out = MultiLaurent::zero(1);
    debug_assert!(
        index(w1) < split.n_level() as i64,
        "projected_omega_action takes W1 vectors"
    );
    let max_m = w1.max_level() as i64;
    for m in -1..=max_m {
        let image = split.apply_projection(&crate::verma::apply_mode(m, w1));
        if !image.is_zero() {
            out.add_term(vec![-m - 2], image);
        }
    }
    out
}

/// Cap on the number of omega insertions in [`projected_omega_product`].
pub const OMEGA_PRODUCT_CAP: usize = 3;

/// The structured closed form of `pi Y(omega, x_1)...Y(omega, x_l) w_1`.
pub fn projected_omega_product(
    split: &ProjectionSplit,
    l: usize,
    w1: &VermaVector,
) -> Result<ProjectedProduct, CorrelatorError> {
    if l > OMEGA_PRODUCT_CAP {
        return Err(CorrelatorError::CapExceeded {
            got: l,
            cap: OMEGA_PRODUCT_CAP,
        });
    }
    let ctx = CorrelatorContext {
        module: ModuleHandle::verma(split.params().clone()),
        split: Some(split.clone()),
    };
    let nvars = l;
    // distribute each Y(omega, x_i) into Pos + Reg
    let mut terms: Vec<OpTerm> = vec![OpTerm {
        ops: Vec::new(),
        pi: Some(0),
        coeff: RationalCorrelator::constant(nvars, Scalar::one()),
    }];
    for slot in 0..l {
        let mut next = Vec::new();
        for term in &terms {
            for op in [
                ChainOp::Pos {
                    var: slot,
                    weight: ModePoly::one(),
                },
                ChainOp::Reg {
                    var: slot,
                    weight: ModePoly::one(),
                },
            ] {
                let mut t = term.clone();
                t.ops.push(op);
                next.push(t);
            }
        }
        terms = next;
    }
    let mut audit = 0u32;
    let mut out_terms = Vec::new();
    for term in terms {
        for normal in normalize(term, &split.params().c, &mut audit) {
            // normal shape: [Reg|Fixed]* pi [Pos]*
            let pi = normal.pi.expect("projected product keeps its marker");
            let prefix_len = normal
                .ops
                .iter()
                .position(|op| !op.is_reg_or_fixed())
                .unwrap_or(normal.ops.len());
            debug_assert_eq!(
                prefix_len, pi,
                "no mid Pos ops can appear without left insertions"
            );
            let mut state = MultiLaurent::term(nvars, vec![0; nvars], w1.clone());
            for op in normal.ops[pi..].iter().rev() {
                let ChainOp::Pos { var, weight } = op else {
                    unreachable!()
                };
                state = apply_pos_state(&ctx, *var, weight, &state);
            }
            let projected = state.map(|v| ctx.project(v));
            if projected.is_zero() {
                continue;
            }
            out_terms.push(ProjectedTerm {
                chain: normal.ops[..prefix_len].to_vec(),
                laurent: projected,
                prefactor: normal.coeff,
            });
        }
    }
    Ok(ProjectedProduct {
        nvars,
        terms: out_terms,
        commutation_audit: audit,
    })
}

/// Brute-force truncated mode sums: the standing oracle for
/// [`matrix_coefficient`]. Computes the coefficient of every exponent
/// tuple in the window, exactly.
pub fn truncated_series(
    ctx: &CorrelatorContext,
    w_dual: &VermaVector,
    pairing: DualPairing,
    insertions: &[VermaVector],
    pi_position: Option<usize>,
    w: &VermaVector,
    lo: &[i64],
    hi: &[i64],
) -> Result<MultiLaurent<Scalar>, CorrelatorError> {
    let n = insertions.len();
    for v in insertions {
        if !v.is_vacuum_representative() {
            return Err(CorrelatorError::NotVacuumRepresentative);
        }
    }
    let mut out = MultiLaurent::zero(n);
    // state: rightmost insertion applies first
    let mut states: Vec<(Vec<i64>, VermaVector)> = vec![(vec![0; n], w.clone())];
    if pi_position == Some(n) {
        states = states
            .into_iter()
            .map(|(e, v)| (e, ctx.project(&v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
    }
    for slot in (0..n).rev() {
        let mut next = Vec::new();
        for (exps, vec) in &states {
            // exponent of x_slot is -k-1 in [lo, hi]
            let k_lo = -hi[slot] - 1;
            let k_hi = -lo[slot] - 1;
            for k in k_lo..=k_hi {
                let image = y_mode_in(ctx.module.kind, &insertions[slot], k, vec)
                    .map_err(|_| CorrelatorError::NotVacuumRepresentative)?;
                if image.is_zero() {
                    continue;
                }
                let mut e = exps.clone();
                e[slot] = -k - 1;
                next.push((e, image));
            }
        }
        if pi_position == Some(slot) {
            next = next
                .into_iter()
                .map(|(e, v)| (e, ctx.project(&v)))
                .filter(|(_, v)| !v.is_zero())
                .collect();
        }
        states = next;
    }
    for (exps, vec) in states {
        let val = ctx.pair(pairing, w_dual, &vec);
        if !val.is_zero() {
            out.add_term(exps, val);
        }
    }
    Ok(out)
}

/// Region data: a strict modulus ordering of the variables and an optional
/// recentering variable for difference expansions.
#[derive(Clone, Debug)]
pub struct RegionSpec {
    /// Variables sorted by decreasing modulus.
    pub order: Vec<usize>,
    pub recenter: Option<usize>,
}

/// Expansion of a rational correlator in a region, truncated to a window.
pub fn expand_rational(
    r: &RationalCorrelator,
    region: &RegionSpec,
    lo: &[i64],
    hi: &[i64],
) -> MultiLaurent<Scalar> {
    r.expand(&region.order, lo, hi)
}

/// Report of the N-weight-degree check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NWeightReport {
    pub passes: bool,
    /// Minimal total degree in the recentered differences, `None` for the
    /// zero function (vacuously passing).
    pub min_degree: Option<i64>,
    pub bound: i64,
}

/// The N-weight-degree condition: recenter every variable but the last at
/// the last one and require each monomial's total degree in the
/// differences to reach `N - sum(insertion weights) - phi_weight`.
pub fn check_n_weight_degree(
    r: &RationalCorrelator,
    n_level: i64,
    insertion_weights: &[i64],
    phi_weight: i64,
) -> NWeightReport {
    let bound = n_level - insertion_weights.iter().sum::<i64>() - phi_weight;
    if r.is_zero() {
        return NWeightReport {
            passes: true,
            min_degree: None,
            bound,
        };
    }
    let n = r.nvars();
    let last = n - 1;
    // substitute z_i = z_last + u_i (i != last) into the numerator and take
    // the minimal total u-degree; pair poles contribute exactly -order each,
    // and origin poles contribute u-degree zero with nonzero lead.
    // u-variables reuse the slots of the original ones; z_last keeps slot `last`.
    let mut substituted: MultiLaurent<Scalar> = MultiLaurent::zero(n);
    for (exps, coeff) in r.numerator().terms() {
        // expand prod_{i != last} (z_last + u_i)^{e_i}
        let mut partial: Vec<(Vec<i64>, Scalar)> = vec![{
            let mut e = vec![0i64; n];
            e[last] = exps[last];
            (e, coeff.clone())
        }];
        for v in 0..n {
            if v == last || exps[v] == 0 {
                continue;
            }
            let e_v = exps[v];
            debug_assert!(e_v >= 0, "canonical numerator is a polynomial");
            let mut next = Vec::new();
            for (e, c) in &partial {
                for k in 0..=e_v {
                    let b = crate::verma::binom_int(e_v, k as u64);
                    let mut e2 = e.clone();
                    e2[v] += k;
                    e2[last] += e_v - k;
                    next.push((e2, c * &b));
                }
            }
            partial = next;
        }
        for (e, c) in partial {
            substituted.add_term(e, c);
        }
    }
    let uvars: Vec<usize> = (0..n).filter(|&v| v != last).collect();
    let num_min = substituted
        .min_total_degree_over(&uvars)
        .expect("nonzero function");
    let pair_total: i64 = r.poles().pair_orders.values().map(|&p| p as i64).sum();
    let min_degree = num_min - pair_total;
    NWeightReport {
        passes: min_degree >= bound,
        min_degree: Some(min_degree),
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verma::{apply_mode, basis, PBWMonomial};

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn params(c: &str, h: &str) -> ModuleParams {
        ModuleParams::new(s(c), s(h))
    }

    fn mono(p: &ModuleParams, modes: &[u32]) -> VermaVector {
        VermaVector::monomial(p.clone(), PBWMonomial::new(modes.to_vec()))
    }

    fn quarter_split() -> ProjectionSplit {
        let p = params("1", "1/4");
        let mut split = ProjectionSplit::new(&p, 6).unwrap();
        split.ensure_levels(12);
        split
    }

    /// Direct summation oracle for sum_{n in range} P(n) y0^{-n-2} y1^n.
    fn direct_weighted_sum(
        weight: &ModePoly,
        range: impl Iterator<Item = i64>,
    ) -> MultiLaurent<Scalar> {
        let mut out = MultiLaurent::zero(2);
        for n in range {
            out.add_term(vec![-n - 2, n], weight.eval(n));
        }
        out
    }

    #[test]
    fn shifted_geometric_matches_direct_summation() {
        // all three range variants, termwise to degree 12
        for m_prime in [-4i64, -2, -1, 0, 1, 3] {
            for (lower, lo_n) in [
                (GeoLower::MPrimePlusTwo, m_prime + 2),
                (GeoLower::Zero, 0),
                (GeoLower::MinusOne, -1),
            ] {
                let closed = shifted_geometric_sum(m_prime, lower);
                let weight =
                    ModePoly::from_coeffs(vec![Scalar::from_int(-m_prime), Scalar::from_int(2)]);
                let lo = [-16, lo_n.min(0) - 1];
                let hi = [2, 12];
                let expanded = closed.expand(&[0, 1], &lo, &hi);
                let direct = direct_weighted_sum(&weight, lo_n..=12).window(&lo, &hi);
                assert_eq!(expanded, direct, "m'={m_prime} {lower:?}");
            }
        }
    }

    #[test]
    fn shifted_geometric_closed_forms_are_small() {
        // the closed form lives over (y0 - y1)^2 at most
        for m_prime in [-3i64, 0, 2] {
            let closed = shifted_geometric_sum(m_prime, GeoLower::MPrimePlusTwo);
            assert!(closed.poles().pair_order(0, 1) <= 2);
        }
    }

    #[test]
    fn central_sum_constant_is_c_over_two() {
        // termwise comparison against direct summation fixes the constant
        let c = s("1");
        let closed = central_sum(&c);
        let lo = [-20, -3];
        let hi = [0, 15];
        let direct = {
            let mut out = MultiLaurent::zero(2);
            for m in -1..=17i64 {
                let coeff = &Scalar::ratio(m * m * m - m, 12) * &c;
                out.add_term(vec![-m - 2, m - 2], coeff);
            }
            out.window(&lo, &hi)
        };
        assert_eq!(closed.expand(&[0, 1], &lo, &hi), direct);
        // and the closed form is exactly (c/2)/(x0-x1)^4
        let mut poles = PoleStructure::none(2);
        poles.set_pair_order(0, 1, 4);
        let expect = RationalCorrelator::new(
            MultiLaurent::constant(2, &c / &s("2")),
            poles,
        );
        assert_eq!(closed, expect);
        assert_eq!(closed.poles().pair_order(0, 1), 4);
        // c = 0 kills it
        assert!(central_sum(&s("0")).is_zero());
    }

    #[test]
    fn weighted_geometric_against_direct() {
        // generic polynomial weight m^2 - 3, generic lower bound
        let w = ModePoly::from_coeffs(vec![s("-3"), s("0"), s("1")]);
        for lo_n in [-1i64, 0, 3] {
            let closed = geometric_closed(2, 0, 1, &w, lo_n);
            let lo = [-18, lo_n.min(0) - 1];
            let hi = [2, 12];
            assert_eq!(
                closed.expand(&[0, 1], &lo, &hi),
                direct_weighted_sum(&w, lo_n..=12).window(&lo, &hi),
                "lo={lo_n}"
            );
        }
    }

    #[test]
    fn projected_action_examples() {
        let split = quarter_split();
        let p = split.params().clone();
        // w1 = L(-1) 1 -> s x^{-1}
        let act = projected_omega_action(&split, &mono(&p, &[1]));
        assert_eq!(act.len(), 1);
        assert_eq!(act.coeff(&[-1]), Some(split.singular()));
        // w1 = 1 -> 0, w1 = L(-2) 1 -> 0 (index 0 != 1)
        assert!(projected_omega_action(&split, &VermaVector::one(p.clone())).is_zero());
        assert!(projected_omega_action(&split, &mono(&p, &[2])).is_zero());
        // nonzero exactly when index = N - 1, up to level 6
        for level in 0..=6u32 {
            for b in split.w1_basis(level) {
                let idx = b.trailing_ones() as i64;
                let v = VermaVector::monomial(p.clone(), b);
                let out = projected_omega_action(&split, &v);
                assert_eq!(!out.is_zero(), idx == 1, "level {level}");
            }
        }
    }

    #[test]
    fn projected_product_l1_matches_action() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        for w1 in [mono(&p, &[1]), mono(&p, &[2, 1]), mono(&p, &[3])] {
            let prod = projected_omega_product(&split, 1, &w1).unwrap();
            let lo = [-10];
            let hi = [10];
            let via_product = prod.expand(&ctx, &lo, &hi);
            let direct = projected_omega_action(&split, &w1).window(&lo, &hi);
            assert_eq!(via_product, direct);
        }
    }

    /// Direct mode-sum oracle for pi Y(omega, x_1)...Y(omega, x_l) w1.
    fn direct_projected_mode_sum(
        split: &ProjectionSplit,
        l: usize,
        w1: &VermaVector,
        lo: &[i64],
        hi: &[i64],
    ) -> MultiLaurent<VermaVector> {
        let mut states: Vec<(Vec<i64>, VermaVector)> = vec![(vec![0; l], w1.clone())];
        for slot in (0..l).rev() {
            let mut next = Vec::new();
            for (exps, vec) in &states {
                let m_lo = -hi[slot] - 2;
                let m_hi = -lo[slot] - 2;
                for m in m_lo..=m_hi {
                    let image = apply_mode(m, vec);
                    if image.is_zero() {
                        continue;
                    }
                    let mut e = exps.clone();
                    e[slot] = -m - 2;
                    next.push((e, image));
                }
            }
            states = next;
        }
        let mut out = MultiLaurent::zero(l);
        for (e, v) in states {
            out.add_term(e, split.apply_projection(&v));
        }
        out
    }

    #[test]
    fn projected_product_l2_matches_mode_sum() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        let lo = [-8, -8];
        let hi = [6, 6];
        for w1 in [mono(&p, &[1]), VermaVector::one(p.clone()), mono(&p, &[2])] {
            let prod = projected_omega_product(&split, 2, &w1).unwrap();
            let via_product = prod.expand(&ctx, &lo, &hi);
            let direct = direct_projected_mode_sum(&split, 2, &w1, &lo, &hi);
            assert_eq!(via_product, direct, "w1 = {w1}");
        }
    }

    #[test]
    fn product_cap_enforced() {
        let split = quarter_split();
        let p = split.params().clone();
        let err = projected_omega_product(&split, 4, &mono(&p, &[1]));
        assert!(matches!(err, Err(CorrelatorError::CapExceeded { .. })));
    }

    #[test]
    fn vacuum_two_point_function() {
        // <1', Y(omega,z1) Y(omega,z2) 1> = (c/2)(z1-z2)^{-4} on V(c,0)
        for c in ["1", "-13/2", "26"] {
            let ctx = CorrelatorContext {
                module: ModuleHandle::vacuum(s(c)),
                split: None,
            };
            let vac = params(c, "0");
            let one = VermaVector::one(vac.clone());
            let omega = mono(&vac, &[2]);
            let got = matrix_coefficient(
                &ctx,
                &one,
                DualPairing::ModuleGram,
                &[omega.clone(), omega],
                None,
                &one,
            )
            .unwrap();
            let mut poles = PoleStructure::none(2);
            poles.set_pair_order(0, 1, 4);
            let expect = RationalCorrelator::new(
                MultiLaurent::constant(2, &s(c) / &s("2")),
                poles,
            );
            assert_eq!(got, expect, "c={c}");
        }
    }

    #[test]
    fn matrix_coefficient_single_insertion_vs_oracle() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        let vac = params("1", "0");
        let omega = mono(&vac, &[2]);
        let l3 = mono(&vac, &[3]);
        let lo = [-12];
        let hi = [12];
        for v in [omega, l3] {
            for w_dual in [mono(&p, &[1, 1]), mono(&p, &[2, 1]), VermaVector::one(p.clone())] {
                for w in [VermaVector::one(p.clone()), mono(&p, &[1]), mono(&p, &[2])] {
                    for pi_pos in [None, Some(0), Some(1)] {
                        let closed = matrix_coefficient(
                            &ctx,
                            &w_dual,
                            DualPairing::ModuleGram,
                            &[v.clone()],
                            pi_pos,
                            &w,
                        )
                        .unwrap();
                        let expanded = closed.expand(&[0], &lo, &hi);
                        let oracle = truncated_series(
                            &ctx,
                            &w_dual,
                            DualPairing::ModuleGram,
                            &[v.clone()],
                            pi_pos,
                            &w,
                            &lo,
                            &hi,
                        )
                        .unwrap();
                        assert_eq!(expanded, oracle, "v={v} w'={w_dual} w={w} pi={pi_pos:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_coefficient_projected_two_point_vs_oracle() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        let vac = params("1", "0");
        let omega = mono(&vac, &[2]);
        // s' as a dual of W2: the lowest-weight dual vector of M(1, 9/4)
        let s_dual = VermaVector::one(split.w2_params());
        let w = mono(&p, &[1]);
        let closed = matrix_coefficient(
            &ctx,
            &s_dual,
            DualPairing::W2Gram,
            &[omega.clone(), omega.clone()],
            Some(1),
            &w,
        )
        .unwrap();
        let lo = [-10, -10];
        let hi = [10, 10];
        let expanded = closed.expand(&[0, 1], &lo, &hi);
        let oracle = truncated_series(
            &ctx,
            &s_dual,
            DualPairing::W2Gram,
            &[omega.clone(), omega.clone()],
            Some(1),
            &w,
            &lo,
            &hi,
        )
        .unwrap();
        assert_eq!(expanded, oracle);
        assert!(!closed.is_zero());
        // against a module-Gram dual the projected image is invisible:
        // W2 is the radical of the contravariant form
        let gram_dual = split.singular().clone();
        let zero = matrix_coefficient(
            &ctx,
            &gram_dual,
            DualPairing::ModuleGram,
            &[omega.clone(), omega],
            Some(1),
            &w,
        )
        .unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn pi_before_w2_argument_is_removable() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        let vac = params("1", "0");
        let omega = mono(&vac, &[2]);
        // w in W2: pi acts as the identity on the whole chain
        let w = split.singular().clone();
        let w_dual = mono(&p, &[2, 2]);
        let with_pi = matrix_coefficient(
            &ctx,
            &w_dual,
            DualPairing::ModuleGram,
            &[omega.clone()],
            Some(0),
            &w,
        )
        .unwrap();
        let without = matrix_coefficient(
            &ctx,
            &w_dual,
            DualPairing::ModuleGram,
            &[omega.clone()],
            None,
            &w,
        )
        .unwrap();
        assert_eq!(with_pi, without);
    }

    #[test]
    fn truncated_series_empty_insertions() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        // <w', pi w> with w = L(-1)^2 1: pi w = s, pairs with s' through the Gram form
        let w = mono(&p, &[1, 1]);
        let w_dual = mono(&p, &[2]);
        let got = truncated_series(
            &ctx,
            &w_dual,
            DualPairing::ModuleGram,
            &[],
            Some(0),
            &w,
            &[],
            &[],
        )
        .unwrap();
        let expect = gram_pair(&w_dual, split.singular());
        assert_eq!(got.coeff(&[]).cloned().unwrap_or_else(Scalar::zero), expect);
        // the W2 dual sees pi(L(-1)^2 1) = s as the lowest-weight vector
        let one_dual = VermaVector::one(split.w2_params());
        let got = truncated_series(
            &ctx,
            &one_dual,
            DualPairing::W2Gram,
            &[],
            Some(0),
            &w,
            &[],
            &[],
        )
        .unwrap();
        assert_eq!(got.coeff(&[]), Some(&Scalar::one()));
    }

    #[test]
    fn insertion_family_is_enforced() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        let vac = params("1", "0");
        let bad = mono(&vac, &[2, 2]); // two parts: not in the omega family
        let err = matrix_coefficient(
            &ctx,
            &VermaVector::one(p.clone()),
            DualPairing::ModuleGram,
            &[bad],
            None,
            &VermaVector::one(p.clone()),
        );
        assert_eq!(err, Err(CorrelatorError::UnsupportedInsertion));
        let tail = mono(&vac, &[2, 1]); // L(-1) tail: not a vacuum representative
        let err = matrix_coefficient(
            &ctx,
            &VermaVector::one(p.clone()),
            DualPairing::ModuleGram,
            &[tail],
            None,
            &VermaVector::one(p),
        );
        assert_eq!(err, Err(CorrelatorError::NotVacuumRepresentative));
    }

    #[test]
    fn n_weight_degree_examples() {
        let split = quarter_split();
        let p = split.params().clone();
        let ctx = CorrelatorContext {
            module: ModuleHandle::verma(p.clone()),
            split: Some(split.clone()),
        };
        let vac = params("1", "0");
        let omega = mono(&vac, &[2]);
        let s_dual = VermaVector::one(split.w2_params());
        let w = mono(&p, &[1]);
        let r = matrix_coefficient(
            &ctx,
            &s_dual,
            DualPairing::W2Gram,
            &[omega.clone(), omega],
            Some(1),
            &w,
        )
        .unwrap();
        let rep = check_n_weight_degree(&r, 2, &[2, 2], 0);
        assert!(rep.passes, "min {:?} bound {}", rep.min_degree, rep.bound);
        // scaling by enough extra (z1 - z2)^{-1} factors crosses the bound
        let margin = rep.min_degree.unwrap() - rep.bound;
        let mut poles = PoleStructure::none(2);
        poles.set_pair_order(0, 1, (margin + 1) as u32);
        let worse = r.mul(&RationalCorrelator::new(MultiLaurent::one(2), poles));
        let rep_bad = check_n_weight_degree(&worse, 2, &[2, 2], 0);
        assert!(!rep_bad.passes);
        assert_eq!(rep_bad.min_degree, Some(rep.bound - 1));
        // the zero function passes vacuously
        let zero = RationalCorrelator::zero(2);
        assert!(check_n_weight_degree(&zero, 2, &[2, 2], 0).passes);
    }

    #[test]
    fn pole_structure_stays_in_bounds() {
        // Poles only at x_i = 0 and x_i = x_j is structural. For plain
        // omega weights a single closure is bounded by the central-term
        // order 4; nested closures concentrate polynomial weights, so the
        // bound grows with the weight degree (observed: 5 at l = 3).
        let split = quarter_split();
        let p = split.params().clone();
        let w1 = mono(&p, &[1]);
        for l in 1..=2 {
            let prod = projected_omega_product(&split, l, &w1).unwrap();
            assert!(
                prod.commutation_audit <= 4,
                "l={l} audit={}",
                prod.commutation_audit
            );
        }
        let prod = projected_omega_product(&split, 3, &w1).unwrap();
        assert!(prod.commutation_audit <= 5, "audit={}", prod.commutation_audit);
        // per-term final pair orders stay small for l <= 3
        for term in &prod.terms {
            for (_, &ord) in &term.prefactor.poles().pair_orders {
                assert!(ord <= 6, "term pair order {ord}");
            }
        }
    }
}
