//! PBW-basis vectors of Verma modules and the Virasoro mode action.
//!
//! A Verma module `M(c,h)` is spanned by `L(-n_1)...L(-n_s).1` with
//! `n_1 >= ... >= n_s >= 1`; every vector here is kept eagerly
//! normal-ordered in that basis, so equality is a term-map comparison.
//! The vacuum quotient `V(c,0) = M(c,0)/<L(-1).1>` is a view on the same
//! storage: its representatives are the monomials with all parts `>= 2`,
//! and its mode action simply drops monomials containing a part `1`.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::scalar::Scalar;

/// Central charge and lowest weight of a Verma module.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct ModuleParams {
    pub c: Scalar,
    pub h: Scalar,
}

impl ModuleParams {
    pub fn new(c: Scalar, h: Scalar) -> Self {
        ModuleParams { c, h }
    }
}

/// A normal-ordered word `L(-n_1)...L(-n_s)` acting on the lowest-weight
/// vector, stored as the weakly decreasing sequence `n_1 >= ... >= n_s >= 1`.
/// The empty word is the lowest-weight vector itself.
///
/// The ordering sorts by level first, then by the enumeration order of
/// [`basis`]: within one level, `(3) < (2,1) < (1,1,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PBWMonomial(Vec<u32>);

impl PBWMonomial {
    pub fn new(modes: Vec<u32>) -> Self {
        assert!(
            modes.windows(2).all(|w| w[0] >= w[1]) && modes.iter().all(|&n| n >= 1),
            "PBW word must be weakly decreasing with parts >= 1"
        );
        PBWMonomial(modes)
    }

    pub fn unit() -> Self {
        PBWMonomial(Vec::new())
    }

    pub fn modes(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of trailing `L(-1)` factors.
    pub fn trailing_ones(&self) -> u32 {
        self.0.iter().rev().take_while(|&&n| n == 1).count() as u32
    }

    /// Split into the prefix of parts `>= 2` and the trailing `L(-1)` power.
    pub fn prefix_split(&self) -> (&[u32], u32) {
        let q = self.trailing_ones() as usize;
        (&self.0[..self.0.len() - q], q as u32)
    }
}

impl Ord for PBWMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level()
            .cmp(&other.level())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for PBWMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "L(-{n})")?;
        }
        Ok(())
    }
}

/// All PBW monomials of the given level, i.e. the partitions of `level`,
/// in the deterministic order `(level) , ... , (1,...,1)`.
pub fn basis(level: u32) -> Vec<PBWMonomial> {
    fn rec(remaining: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<PBWMonomial>) {
        if remaining == 0 {
            out.push(PBWMonomial(cur.clone()));
            return;
        }
        let mut part = remaining.min(max_part);
        while part >= 1 {
            cur.push(part);
            rec(remaining - part, part, cur, out);
            cur.pop();
            part -= 1;
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(level, level.max(1), &mut cur, &mut out);
    out
}

/// Number of partitions of `n`, as `basis(n).len()` would report it.
pub fn partition_count(n: u32) -> u64 {
    // pentagonal-number recurrence
    let n = n as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for i in 1..=n {
        let mut total: i128 = 0;
        let mut k: i64 = 1;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > i {
                break;
            }
            let sign: i128 = if k % 2 == 1 { 1 } else { -1 };
            total += sign * p[i - g1] as i128;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= i {
                total += sign * p[i - g2] as i128;
            }
            k += 1;
        }
        p[i] = total as u64;
    }
    p[n]
}

/// A sparse exact vector in `M(c,h)`, normal-ordered at all times.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VermaVector {
    params: ModuleParams,
    terms: BTreeMap<PBWMonomial, Scalar>,
}

impl VermaVector {
    pub fn zero(params: ModuleParams) -> Self {
        VermaVector {
            params,
            terms: BTreeMap::new(),
        }
    }

    /// The lowest-weight vector `1_{c,h}`.
    pub fn one(params: ModuleParams) -> Self {
        VermaVector::monomial(params, PBWMonomial::unit())
    }

    pub fn monomial(params: ModuleParams, mono: PBWMonomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(mono, Scalar::one());
        VermaVector { params, terms }
    }

    pub fn params(&self) -> &ModuleParams {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PBWMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mono: &PBWMonomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_else(Scalar::zero)
    }

    /// The common level when the vector is homogeneous, `None` otherwise
    /// (and `None` for the zero vector).
    pub fn level(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let first = it.next()?.level();
        it.all(|m| m.level() == first).then_some(first)
    }

    pub fn max_level(&self) -> u32 {
        self.terms.keys().map(|m| m.level()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: PBWMonomial, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &VermaVector) {
        debug_assert_eq!(self.params, other.params);
        for (m, s) in &other.terms {
            self.add_term(m.clone(), s.clone());
        }
    }

    pub fn add(&self, other: &VermaVector) -> VermaVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &VermaVector) -> VermaVector {
        let mut out = self.clone();
        for (m, s) in &other.terms {
            out.add_term(m.clone(), -s);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> VermaVector {
        if s.is_zero() {
            return VermaVector::zero(self.params.clone());
        }
        VermaVector {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> VermaVector {
        self.scale(&-Scalar::one())
    }

    /// Restriction to one level (the homogeneous component).
    pub fn component(&self, level: u32) -> VermaVector {
        VermaVector {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.level() == level)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn levels(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.terms.keys().map(|m| m.level()).collect();
        ls.dedup();
        ls
    }

    /// True when every monomial has all parts `>= 2`, i.e. the vector
    /// represents an element of the vacuum quotient `V(c,0)`.
    pub fn is_vacuum_representative(&self) -> bool {
        self.terms.keys().all(|m| m.trailing_ones() == 0)
    }

    /// Quotient map to `V(c,0)`: drops every monomial containing `L(-1)`.
    pub fn project_vacuum(&self) -> VermaVector {
        VermaVector {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.trailing_ones() == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

/// Which module a state vector lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModuleKind {
    /// The full Verma module `M(c,h)`.
    Verma,
    /// The vacuum quotient `V(c,0)`; requires `h = 0`.
    Vacuum,
}

/// Structure constants of `[L_m, L_n] = (m-n) L_{m+n} + delta_{m+n,0} (m^3-m)/12 k`.
///
/// Returns the coefficient `(m-n)` on `L(m+n)` and the central scalar.
pub fn bracket(m: i64, n: i64, c: &Scalar) -> (Scalar, Scalar) {
    let coeff = Scalar::from_int(m - n);
    let central = if m + n == 0 {
        &Scalar::ratio(m * m * m - m, 12) * c
    } else {
        Scalar::zero()
    };
    (coeff, central)
}

fn central_term(m: i64, c: &Scalar) -> Scalar {
    &Scalar::ratio(m * m * m - m, 12) * c
}

fn apply_mode_mono(m: i64, mono: &[u32], params: &ModuleParams, out: &mut VermaVector, scale: &Scalar) {
    if m < 0 {
        let k = (-m) as u32;
        if mono.first().is_none_or(|&h| k >= h) {
            let mut v = Vec::with_capacity(mono.len() + 1);
            v.push(k);
            v.extend_from_slice(mono);
            out.add_term(PBWMonomial(v), scale.clone());
            return;
        }
    } else if mono.is_empty() {
        if m == 0 {
            out.add_term(PBWMonomial::unit(), scale * &params.h);
        }
        return;
    }
    // commute L(m) past the head L(-n1)
    let n1 = mono[0] as i64;
    let tail = &mono[1..];
    // L(-n1) L(m) tail
    let mut inner = VermaVector::zero(params.clone());
    apply_mode_mono(m, tail, params, &mut inner, scale);
    for (mo, co) in &inner.terms {
        apply_mode_mono(-n1, mo.modes(), params, out, co);
    }
    // (m + n1) L(m - n1) tail
    let f = Scalar::from_int(m + n1);
    if !f.is_zero() {
        apply_mode_mono(m - n1, tail, params, out, &(scale * &f));
    }
    // central term at m = n1
    if m == n1 {
        let z = central_term(m, &params.c);
        if !z.is_zero() {
            out.add_term(PBWMonomial(tail.to_owned()), scale * &z);
        }
    }
}

/// The action of `L(m)` on a Verma vector, normal-ordered on the fly.
pub fn apply_mode(m: i64, v: &VermaVector) -> VermaVector {
    let mut out = VermaVector::zero(v.params.clone());
    for (mono, coeff) in &v.terms {
        apply_mode_mono(m, mono.modes(), &v.params, &mut out, coeff);
    }
    out
}

/// Mode action in the given module view.
pub fn apply_mode_in(kind: ModuleKind, m: i64, v: &VermaVector) -> VermaVector {
    match kind {
        ModuleKind::Verma => apply_mode(m, v),
        ModuleKind::Vacuum => {
            debug_assert!(v.params.h.is_zero(), "vacuum quotient requires h = 0");
            apply_mode(m, v).project_vacuum()
        }
    }
}

/// A finite product `L(m_1)...L(m_l)` of modes, any integers, applied
/// right-to-left.
pub type ModeWord = Vec<i64>;

/// `L(m_1)...L(m_l) v` where `word = (m_1, ..., m_l)`.
pub fn apply_word(word: &[i64], v: &VermaVector) -> VermaVector {
    let mut cur = v.clone();
    for &m in word.iter().rev() {
        cur = apply_mode(m, &cur);
    }
    cur
}

pub fn apply_word_in(kind: ModuleKind, word: &[i64], v: &VermaVector) -> VermaVector {
    let mut cur = v.clone();
    for &m in word.iter().rev() {
        cur = apply_mode_in(kind, m, &cur);
    }
    cur
}

/// One summand of a standard expression: `coeff * prefix * L(-1)^q` with
/// all prefix parts `>= 2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StandardEntry {
    pub prefix: Vec<u32>,
    pub q: u32,
    pub coeff: Scalar,
}

/// The standard expression of a vector: each monomial split into its
/// prefix of parts `>= 2` and the trailing `L(-1)` power.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct StandardForm {
    pub entries: Vec<StandardEntry>,
}

impl StandardForm {
    /// Rebuild the vector; exact inverse of [`standard_form`].
    pub fn reassemble(&self, params: &ModuleParams) -> VermaVector {
        let mut out = VermaVector::zero(params.clone());
        for e in &self.entries {
            let mut modes = e.prefix.clone();
            modes.extend(core::iter::repeat(1).take(e.q as usize));
            out.add_term(PBWMonomial::new(modes), e.coeff.clone());
        }
        out
    }
}

pub fn standard_form(v: &VermaVector) -> StandardForm {
    let entries = v
        .terms
        .iter()
        .map(|(m, c)| {
            let (prefix, q) = m.prefix_split();
            StandardEntry {
                prefix: prefix.to_owned(),
                q,
                coeff: c.clone(),
            }
        })
        .collect();
    StandardForm { entries }
}

/// `Ind(w)`: the largest trailing `L(-1)` power in the standard expression,
/// `-1` for the zero vector.
pub fn index(v: &VermaVector) -> i64 {
    v.terms
        .keys()
        .map(|m| m.trailing_ones() as i64)
        .max()
        .unwrap_or(-1)
}

/// Errors from operations on module vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VermaError {
    /// `y_mode` requires a vacuum-module representative: standard form
    /// with no `L(-1)` tail.
    NotVacuumRepresentative,
}

impl fmt::Display for VermaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VermaError::NotVacuumRepresentative => {
                write!(f, "vector has an L(-1) tail and does not represent a vacuum-module element")
            }
        }
    }
}

/// Binomial coefficient with arbitrary integer upper argument.
pub(crate) fn binom_int(m: i64, i: u64) -> Scalar {
    let mut num = Scalar::one();
    for t in 0..i as i64 {
        num *= Scalar::from_int(m - t);
    }
    let mut den = Scalar::one();
    for t in 1..=i as i64 {
        den *= Scalar::from_int(t);
    }
    num / den
}

fn y_mode_inner(kind: ModuleKind, v: &VermaVector, k: i64, w: &VermaVector) -> VermaVector {
    let mut out = VermaVector::zero(w.params().clone());
    for (mono, coeff) in &v.terms {
        let part = y_mode_mono(kind, mono.modes(), k, w);
        out.add_assign(&part.scale(coeff));
    }
    out
}

// The k-th mode (Y(v,x) = sum_k v_k x^{-k-1}) of a vacuum monomial acting on w,
// via the iterate formula for v = L(-n) v' = omega_{-n+1} v':
//   (a_m b)_k = sum_{i>=0} (-1)^i C(m,i) [ a_{m-i} b_{k+i} - (-1)^m b_{m+k-i} a_i ]
// with a = omega, a_j = L(j-1).
fn y_mode_mono(kind: ModuleKind, mono: &[u32], k: i64, w: &VermaVector) -> VermaVector {
    if mono.is_empty() {
        return if k == -1 {
            w.clone()
        } else {
            VermaVector::zero(w.params().clone())
        };
    }
    let n = mono[0] as i64;
    let tail = PBWMonomial(mono[1..].to_owned());
    let tail_wt = tail.level() as i64;
    let m = -n + 1;
    let w_level = w.max_level() as i64;
    let mut out = VermaVector::zero(w.params().clone());
    if w.is_zero() {
        return out;
    }
    // i-range: b_{k+i} w = 0 once k+i > tail_wt + w_level - 1;
    // omega_i w = L(i-1) w = 0 once i - 1 > w_level.
    let i_max = (tail_wt + w_level - 1 - k).max(w_level + 1).max(0);
    for i in 0..=i_max {
        let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        let b = binom_int(m, i as u64);
        if b.is_zero() {
            continue;
        }
        let c1 = &sign * &b;
        // a_{m-i} b_{k+i} w
        let inner = y_mode_mono(kind, tail.modes(), k + i, w);
        if !inner.is_zero() {
            let t = apply_mode_in(kind, m - i - 1, &inner);
            out.add_assign(&t.scale(&c1));
        }
        // -(-1)^m b_{m+k-i} a_i w
        let aiw = apply_mode_in(kind, i - 1, w);
        if !aiw.is_zero() {
            let t = y_mode_mono(kind, tail.modes(), m + k - i, &aiw);
            let msign = if m % 2 == 0 { Scalar::one() } else { -Scalar::one() };
            out.add_assign(&t.scale(&(&(-&c1) * &msign)));
        }
    }
    out
}

/// The `k`-th mode of `Y_W(v, x)` applied to `w`, under the convention
/// `Y(v,x) = sum_k v_k x^{-k-1}` (so the modes of `omega` are
/// `omega_k = L(k-1)`, and `Y(1,x) = Id` means `1_{-1} = Id`).
///
/// `v` must represent a vacuum-module element: a vector of `M(c,0)` whose
/// standard form has no `L(-1)` tail.
pub fn y_mode(v: &VermaVector, k: i64, w: &VermaVector) -> Result<VermaVector, VermaError> {
    y_mode_in(ModuleKind::Verma, v, k, w)
}

/// [`y_mode`] with the target module view made explicit.
pub fn y_mode_in(
    kind: ModuleKind,
    v: &VermaVector,
    k: i64,
    w: &VermaVector,
) -> Result<VermaVector, VermaError> {
    if !v.is_vacuum_representative() {
        return Err(VermaError::NotVacuumRepresentative);
    }
    Ok(y_mode_inner(kind, v, k, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn params(c: &str, h: &str) -> ModuleParams {
        ModuleParams::new(s(c), s(h))
    }

    fn mono(params: &ModuleParams, modes: &[u32]) -> VermaVector {
        VermaVector::monomial(params.clone(), PBWMonomial::new(modes.to_vec()))
    }

    #[test]
    fn bracket_examples() {
        let c = s("1");
        assert_eq!(bracket(2, -2, &c), (s("4"), s("1/2")));
        assert_eq!(bracket(0, 0, &c), (s("0"), s("0")));
        assert_eq!(bracket(3, -1, &c), (s("4"), s("0")));
        let c = s("-7/3");
        assert_eq!(bracket(3, -3, &c), (s("6"), &s("2") * &c));
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(basis(0), vec![PBWMonomial::unit()]);
        let b3: Vec<_> = basis(3).iter().map(|m| m.modes().to_vec()).collect();
        assert_eq!(b3, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(basis(8).len(), 22);
        for n in 0..=12 {
            assert_eq!(basis(n).len() as u64, partition_count(n));
        }
    }

    #[test]
    fn monomial_order_matches_basis_order() {
        for n in 0..=8 {
            let b = basis(n);
            for w in b.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn grading() {
        let p = params("1", "1/4");
        let v = mono(&p, &[2, 1]);
        let lhs = apply_mode(0, &v);
        assert_eq!(lhs, v.scale(&(&s("1/4") + &s("3"))));
    }

    #[test]
    fn level_two_singular_vector_is_killed() {
        // s = L(-1)^2 - L(-2) at (c,h) = (1, 1/4)
        let p = params("1", "1/4");
        let sv = mono(&p, &[1, 1]).sub(&mono(&p, &[2]));
        assert!(apply_mode(1, &sv).is_zero());
        assert!(apply_mode(2, &sv).is_zero());
    }

    #[test]
    fn l2_on_l_minus_2() {
        // L(2) L(-2) 1 = (4h + c/2) 1
        let p = params("3/5", "7/2");
        let got = apply_mode(2, &mono(&p, &[2]));
        let expect = VermaVector::one(p.clone()).scale(&(&(&s("4") * &p.h) + &(&p.c / &s("2"))));
        assert_eq!(got, expect);
    }

    #[test]
    fn apply_word_examples() {
        let p = params("2", "5/3");
        let v = mono(&p, &[2, 1]);
        assert_eq!(apply_word(&[], &v), v);
        // L(1) L(1) L(-1)^2 1 = (8h^2 + 4h) 1
        let got = apply_word(&[1, 1], &mono(&p, &[1, 1]));
        let h = &p.h;
        let expect =
            VermaVector::one(p.clone()).scale(&(&(&s("8") * &(h * h)) + &(&s("4") * h)));
        assert_eq!(got, expect);
        // L(2) L(-2) 1 via a word
        let got = apply_word(&[2, -2], &VermaVector::one(p.clone()));
        let expect = VermaVector::one(p.clone()).scale(&(&(&s("4") * h) + &(&p.c / &s("2"))));
        assert_eq!(got, expect);
    }

    #[test]
    fn commutator_identity_small() {
        // [L(m), L(n)] v = (m-n) L(m+n) v + delta (m^3-m)/12 c v
        let p = params("-2/7", "3/4");
        for level in 0..=4u32 {
            for b in basis(level) {
                let v = VermaVector::monomial(p.clone(), b);
                for m in -3i64..=3 {
                    for n in -3i64..=3 {
                        let lhs = apply_mode(m, &apply_mode(n, &v))
                            .sub(&apply_mode(n, &apply_mode(m, &v)));
                        let mut rhs = apply_mode(m + n, &v).scale(&Scalar::from_int(m - n));
                        if m + n == 0 {
                            rhs.add_assign(&v.scale(&central_term(m, &p.c)));
                        }
                        assert_eq!(lhs, rhs, "m={m} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn standard_form_examples() {
        let p = params("1", "0");
        let v = mono(&p, &[2, 1, 1, 1]);
        let sf = standard_form(&v);
        assert_eq!(
            sf.entries,
            vec![StandardEntry {
                prefix: vec![2],
                q: 3,
                coeff: s("1")
            }]
        );
        assert_eq!(standard_form(&VermaVector::zero(p.clone())).entries, vec![]);
        let v = mono(&p, &[3, 2]).sub(&mono(&p, &[1]).scale(&s("2")));
        let sf = standard_form(&v);
        assert_eq!(sf.entries.len(), 2);
        assert!(sf.entries.contains(&StandardEntry {
            prefix: vec![3, 2],
            q: 0,
            coeff: s("1")
        }));
        assert!(sf.entries.contains(&StandardEntry {
            prefix: vec![],
            q: 1,
            coeff: s("-2")
        }));
        assert_eq!(sf.reassemble(&p), v);
    }

    #[test]
    fn index_examples() {
        let p = params("1", "1/4");
        assert_eq!(index(&mono(&p, &[3, 2, 1, 1, 1, 1])), 4);
        assert_eq!(index(&VermaVector::zero(p.clone())), -1);
        // Ind(L(-m) w) = Ind(w) for m >= 2
        let w = mono(&p, &[2, 1, 1]).add(&mono(&p, &[3]).scale(&s("5/2")));
        for m in 2i64..=6 {
            assert_eq!(index(&apply_mode(-m, &w)), index(&w));
        }
        // Ind(L(m) prefix L(-1)^n 1) <= n+1 for m >= -1, exhaustively to level 8
        for level in 0..=8u32 {
            for b in basis(level) {
                let n = b.trailing_ones() as i64;
                let v = VermaVector::monomial(p.clone(), b);
                for m in -1i64..=9 {
                    assert!(index(&apply_mode(m, &v)) <= n + 1);
                }
            }
        }
    }

    #[test]
    fn vacuum_quotient_view() {
        let p = params("1", "0");
        // L(1) L(-1)^2 1 = (4h+2) L(-1) 1 -> 0 in the quotient
        let v = mono(&p, &[1, 1]);
        assert!(apply_mode_in(ModuleKind::Vacuum, 1, &v).is_zero());
        // L(-2) stays
        let v = VermaVector::one(p.clone());
        assert_eq!(
            apply_mode_in(ModuleKind::Vacuum, -2, &v),
            mono(&p, &[2])
        );
        assert!(apply_mode_in(ModuleKind::Vacuum, -1, &v).is_zero());
    }

    #[test]
    fn y_mode_identity_and_omega() {
        let p = params("1", "1/4");
        let vac = params("1", "0");
        let one = VermaVector::one(vac.clone());
        let omega = mono(&vac, &[2]);
        let w = mono(&p, &[2, 1]);
        // Y(1,x) = Id: the only nonzero mode is 1_{-1}
        for k in -4i64..=4 {
            let got = y_mode(&one, k, &w).unwrap();
            if k == -1 {
                assert_eq!(got, w);
            } else {
                assert!(got.is_zero());
            }
        }
        // omega_k = L(k-1)
        for k in -5i64..=5 {
            assert_eq!(y_mode(&omega, k, &w).unwrap(), apply_mode(k - 1, &w));
        }
    }

    #[test]
    fn y_mode_l_minus_3_matches_derivative_oracle() {
        // Y(L(-3)1, x) = d/dx Y(omega, x), so (L(-3)1)_k = -k L(k-2).
        let p = params("1", "1/4");
        let vac = params("1", "0");
        let v = mono(&vac, &[3]);
        for level in 0..=4u32 {
            for b in basis(level) {
                let w = VermaVector::monomial(p.clone(), b);
                for k in -6i64..=6 {
                    let got = y_mode(&v, k, &w).unwrap();
                    let expect = apply_mode(k - 2, &w).scale(&Scalar::from_int(-k));
                    assert_eq!(got, expect, "k={k}");
                }
            }
        }
    }

    #[test]
    fn y_mode_rejects_l_minus_1_tails() {
        let vac = params("1", "0");
        let p = params("1", "1/4");
        let v = mono(&vac, &[2, 1]);
        assert_eq!(
            y_mode(&v, 0, &VermaVector::one(p)),
            Err(VermaError::NotVacuumRepresentative)
        );
    }

    #[test]
    fn y_mode_weight_bookkeeping() {
        // wt(v_k w) = wt(w) + wt(v) - k - 1 termwise
        let p = params("1", "1/4");
        let vac = params("1", "0");
        let v = mono(&vac, &[2, 2]);
        let w = mono(&p, &[3, 1]);
        for k in -6i64..=8 {
            let got = y_mode(&v, k, &w).unwrap();
            if let Some(l) = got.level() {
                assert_eq!(l as i64, 4 - k - 1 + 4);
            }
        }
    }

    proptest! {
        #[test]
        fn standard_form_bijection(seed in proptest::collection::vec((0u32..=6, -9i64..=9, 1i64..=9), 1..6)) {
            let p = params("1", "1/4");
            let mut v = VermaVector::zero(p.clone());
            for (lvl, num, den) in seed {
                let b = basis(lvl);
                let m = b[(num.unsigned_abs() as usize) % b.len()].clone();
                v.add_term(m, Scalar::ratio(num, den));
            }
            let sf = standard_form(&v);
            prop_assert_eq!(sf.reassemble(&p), v);
        }

        #[test]
        fn mode_action_is_linear(m in -4i64..=4, a in -6i64..=6, b in -6i64..=6) {
            let p = params("2", "-1/3");
            let v1 = mono(&p, &[3, 1]);
            let v2 = mono(&p, &[2, 2]);
            let combo = v1.scale(&Scalar::from_int(a)).add(&v2.scale(&Scalar::from_int(b)));
            let lhs = apply_mode(m, &combo);
            let rhs = apply_mode(m, &v1).scale(&Scalar::from_int(a))
                .add(&apply_mode(m, &v2).scale(&Scalar::from_int(b)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn grading_on_homogeneous(lvl in 0u32..=7, idx in 0usize..200) {
            let p = params("11/2", "3/7");
            let b = basis(lvl);
            let m = b[idx % b.len()].clone();
            let v = VermaVector::monomial(p.clone(), m);
            let expect = v.scale(&(&p.h + &Scalar::from_int(lvl as i64)));
            prop_assert_eq!(apply_mode(0, &v), expect);
        }
    }
}
