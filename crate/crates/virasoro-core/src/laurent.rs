//! Multivariate Laurent polynomials and rational functions whose poles sit
//! only at `x_i = 0` and `x_i = x_j`.
//!
//! Variables are positional indices; callers attach display names at the
//! boundary. Coefficients are exact scalars or module vectors.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scalar::Scalar;
use crate::verma::{binom_int, VermaVector};

/// Coefficient rings usable in a sparse Laurent table.
pub trait Coefficient: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
}

impl Coefficient for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl Coefficient for VermaVector {
    fn is_zero(&self) -> bool {
        VermaVector::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        VermaVector::add(self, other)
    }
    fn scale(&self, s: &Scalar) -> Self {
        VermaVector::scale(self, s)
    }
}

/// Sparse Laurent table: exponent tuple -> coefficient, no stored zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiLaurent<C: Coefficient> {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, C>,
}

impl<C: Coefficient> MultiLaurent<C> {
    pub fn zero(nvars: usize) -> Self {
        MultiLaurent {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(nvars: usize, exps: Vec<i64>, coeff: C) -> Self {
        let mut t = MultiLaurent::zero(nvars);
        t.add_term(exps, coeff);
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i64]) -> Option<&C> {
        self.terms.get(exps)
    }

    pub fn add_term(&mut self, exps: Vec<i64>, coeff: C) {
        assert_eq!(exps.len(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let merged = e.get().add(&coeff);
                if merged.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = merged;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_all(&-Scalar::one()))
    }

    pub fn scale_all(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return MultiLaurent::zero(self.nvars);
        }
        MultiLaurent {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.scale(s)))
                .collect(),
        }
    }

    /// Multiply by a scalar-coefficient Laurent table.
    pub fn mul_scalar_laurent(&self, other: &MultiLaurent<Scalar>) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MultiLaurent::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.scale(c2));
            }
        }
        out
    }

    /// Shift one variable's exponent everywhere.
    pub fn shift(&self, var: usize, by: i64) -> Self {
        MultiLaurent {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[var] += by;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Formal partial derivative in one variable.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = MultiLaurent::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c.scale(&Scalar::from_int(e[var])));
        }
        out
    }

    pub fn min_exp(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[var]).min()
    }

    pub fn max_exp(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Keep only terms inside the per-variable exponent window.
    pub fn window(&self, lo: &[i64], hi: &[i64]) -> Self {
        MultiLaurent {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| {
                    e.iter()
                        .enumerate()
                        .all(|(v, &x)| x >= lo[v] && x <= hi[v])
                })
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Minimal total degree over a subset of variables.
    pub fn min_total_degree_over(&self, vars: &[usize]) -> Option<i64> {
        self.terms
            .keys()
            .map(|e| vars.iter().map(|&v| e[v]).sum())
            .min()
    }

    /// Map coefficients (dropping zeros).
    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> MultiLaurent<D> {
        let mut out = MultiLaurent::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

impl MultiLaurent<Scalar> {
    pub fn constant(nvars: usize, c: Scalar) -> Self {
        MultiLaurent::term(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        MultiLaurent::constant(nvars, Scalar::one())
    }

    /// The linear polynomial `x_i - x_j`.
    pub fn pair_factor(nvars: usize, i: usize, j: usize) -> Self {
        let mut t = MultiLaurent::zero(nvars);
        let mut ei = vec![0; nvars];
        ei[i] = 1;
        t.add_term(ei, Scalar::one());
        let mut ej = vec![0; nvars];
        ej[j] = 1;
        t.add_term(ej, -Scalar::one());
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_scalar_laurent(other)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = MultiLaurent::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Substitute `x_var = x_other` (exact, for divisibility tests).
    pub fn substitute_equal(&self, var: usize, other: usize) -> Self {
        let mut out = MultiLaurent::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[other] += e2[var];
            e2[var] = 0;
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Exact division by `(x_i - x_j)`; `None` when not divisible.
    /// Requires non-negative exponents in `x_i`.
    pub fn div_pair_factor(&self, i: usize, j: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if !self.substitute_equal(i, j).is_zero() {
            return None;
        }
        // synthetic division in x_i by (x_i - x_j)
        let deg = self.max_exp(i).unwrap();
        let low = self.min_exp(i).unwrap();
        assert!(low >= 0, "div_pair_factor requires polynomial exponents");
        // c_d = coefficient Laurent (in the other vars) of x_i^d
        let mut c: Vec<MultiLaurent<Scalar>> =
            vec![MultiLaurent::zero(self.nvars); (deg + 1) as usize];
        for (e, co) in &self.terms {
            let d = e[i] as usize;
            let mut e2 = e.clone();
            e2[i] = 0;
            c[d].add_term(e2, co.clone());
        }
        // q_{d-1} = c_d + x_j q_d, from the top down
        let mut q: Vec<MultiLaurent<Scalar>> = vec![MultiLaurent::zero(self.nvars); deg as usize];
        let mut carry = MultiLaurent::zero(self.nvars);
        for d in (1..=deg).rev() {
            let qd = c[d as usize].add(&carry);
            carry = qd.shift(j, 1);
            q[(d - 1) as usize] = qd;
        }
        // the remainder c_0 + x_j q_0 vanishes by the substitution test
        let mut out = MultiLaurent::zero(self.nvars);
        for (d, qd) in q.iter().enumerate() {
            for (e, co) in qd.terms() {
                let mut e2 = e.clone();
                e2[i] += d as i64;
                out.add_term(e2, co.clone());
            }
        }
        Some(out)
    }
}

impl fmt::Display for MultiLaurent<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (v, &x) in e.iter().enumerate() {
                if x != 0 {
                    write!(f, "*x{v}^{x}")?;
                }
            }
        }
        Ok(())
    }
}

/// Pole orders at `x_i = 0` (per variable) and `x_i = x_j` (per pair).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoleStructure {
    pub origin_orders: Vec<u32>,
    pub pair_orders: BTreeMap<(usize, usize), u32>,
}

impl PoleStructure {
    pub fn none(nvars: usize) -> Self {
        PoleStructure {
            origin_orders: vec![0; nvars],
            pair_orders: BTreeMap::new(),
        }
    }

    pub fn pair_order(&self, i: usize, j: usize) -> u32 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pair_orders.get(&key).copied().unwrap_or(0)
    }

    pub fn set_pair_order(&mut self, i: usize, j: usize, p: u32) {
        let key = if i < j { (i, j) } else { (j, i) };
        if p == 0 {
            self.pair_orders.remove(&key);
        } else {
            self.pair_orders.insert(key, p);
        }
    }

    pub fn total_order(&self) -> u32 {
        self.origin_orders.iter().sum::<u32>() + self.pair_orders.values().sum::<u32>()
    }
}

/// An exact rational function `num / (prod x_i^{p_i} prod (x_i-x_j)^{p_ij})`
/// in canonical form: polynomial numerator, no removable pair factors, and
/// for each variable either the origin order is zero or the numerator has
/// a term free of that variable.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalCorrelator {
    numerator: MultiLaurent<Scalar>,
    poles: PoleStructure,
}

impl RationalCorrelator {
    pub fn zero(nvars: usize) -> Self {
        RationalCorrelator {
            numerator: MultiLaurent::zero(nvars),
            poles: PoleStructure::none(nvars),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        RationalCorrelator {
            numerator: MultiLaurent::constant(nvars, c),
            poles: PoleStructure::none(nvars),
        }
    }

    /// Build from a Laurent numerator and pole orders, then canonicalize.
    pub fn new(numerator: MultiLaurent<Scalar>, poles: PoleStructure) -> Self {
        let mut r = RationalCorrelator { numerator, poles };
        r.canonicalize();
        r
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn numerator(&self) -> &MultiLaurent<Scalar> {
        &self.numerator
    }

    pub fn poles(&self) -> &PoleStructure {
        &self.poles
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn canonicalize(&mut self) {
        let n = self.nvars();
        if self.numerator.is_zero() {
            self.poles = PoleStructure::none(n);
            return;
        }
        // fold negative exponents into origin orders, cancel positive ones
        for v in 0..n {
            let m = self.numerator.min_exp(v).unwrap_or(0);
            let p = self.poles.origin_orders[v] as i64;
            let new_p = p - m;
            if new_p != 0 || m != 0 {
                self.numerator = self.numerator.shift(v, -m);
                if new_p <= 0 {
                    self.numerator = self.numerator.shift(v, -new_p);
                    self.poles.origin_orders[v] = 0;
                } else {
                    self.poles.origin_orders[v] = new_p as u32;
                }
            }
        }
        // divide out removable pair factors
        let pairs: Vec<(usize, usize)> = self.poles.pair_orders.keys().copied().collect();
        for (i, j) in pairs {
            while self.poles.pair_order(i, j) > 0 {
                match self.numerator.div_pair_factor(i, j) {
                    Some(q) => {
                        self.numerator = q;
                        let p = self.poles.pair_order(i, j);
                        self.poles.set_pair_order(i, j, p - 1);
                    }
                    None => break,
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars());
        let n = self.nvars();
        let mut poles = PoleStructure::none(n);
        for v in 0..n {
            poles.origin_orders[v] =
                self.poles.origin_orders[v].max(other.poles.origin_orders[v]);
        }
        let mut keys: Vec<(usize, usize)> = self
            .poles
            .pair_orders
            .keys()
            .chain(other.poles.pair_orders.keys())
            .copied()
            .collect();
        keys.sort();
        keys.dedup();
        for (i, j) in keys {
            poles.set_pair_order(
                i,
                j,
                self.poles.pair_order(i, j).max(other.poles.pair_order(i, j)),
            );
        }
        let lift = |r: &RationalCorrelator| -> MultiLaurent<Scalar> {
            let mut num = r.numerator.clone();
            for v in 0..n {
                let d = poles.origin_orders[v] - r.poles.origin_orders[v];
                num = num.shift(v, d as i64);
            }
            for (&(i, j), &p) in &poles.pair_orders {
                let d = p - r.poles.pair_order(i, j);
                if d > 0 {
                    num = num.mul(&MultiLaurent::pair_factor(n, i, j).pow(d));
                }
            }
            num
        };
        RationalCorrelator::new(lift(self).add(&lift(other)), poles)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        RationalCorrelator::new(self.numerator.scale_all(s), self.poles.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars());
        let n = self.nvars();
        let mut poles = PoleStructure::none(n);
        for v in 0..n {
            poles.origin_orders[v] =
                self.poles.origin_orders[v] + other.poles.origin_orders[v];
        }
        let mut keys: Vec<(usize, usize)> = self
            .poles
            .pair_orders
            .keys()
            .chain(other.poles.pair_orders.keys())
            .copied()
            .collect();
        keys.sort();
        keys.dedup();
        for (i, j) in keys {
            poles.set_pair_order(
                i,
                j,
                self.poles.pair_order(i, j) + other.poles.pair_order(i, j),
            );
        }
        RationalCorrelator::new(self.numerator.mul(&other.numerator), poles)
    }

    /// Multiply by `coeff * x_var^k`.
    pub fn mul_monomial(&self, var: usize, k: i64, coeff: &Scalar) -> Self {
        RationalCorrelator::new(
            self.numerator.shift(var, k).scale_all(coeff),
            self.poles.clone(),
        )
    }

    /// Exact partial derivative.
    pub fn derivative(&self, var: usize) -> Self {
        let n = self.nvars();
        // d/dx [N / D] with D = x_v^p prod (x_i - x_j)^{q_ij}; assemble the
        // numerator over the denominator with every var-involving order + 1.
        let mut poles = self.poles.clone();
        let p = self.poles.origin_orders[var];
        poles.origin_orders[var] = p + 1;
        let mut touching: Vec<(usize, usize, u32)> = Vec::new();
        for (&(i, j), &q) in &self.poles.pair_orders {
            if i == var || j == var {
                touching.push((i, j, q));
                poles.set_pair_order(i, j, q + 1);
            }
        }
        // N' * x_v * prod(touching factors)
        let n_prime = self.numerator.derivative(var);
        let mut acc = n_prime.shift(var, 1);
        for &(i, j, _) in &touching {
            acc = acc.mul(&MultiLaurent::pair_factor(n, i, j));
        }
        // - p * N * prod(touching)
        if p > 0 {
            let mut t = self.numerator.scale_all(&-Scalar::from_int(p as i64));
            for &(i, j, _) in &touching {
                t = t.mul(&MultiLaurent::pair_factor(n, i, j));
            }
            acc = acc.add(&t);
        }
        // each factor (x_i - x_j): -q * (d factor/d x_v) * N * x_v * prod(others)
        for (k, &(i, _j, q)) in touching.iter().enumerate() {
            let sign = if i == var { 1i64 } else { -1 };
            let mut t = self
                .numerator
                .scale_all(&Scalar::from_int(-(q as i64) * sign))
                .shift(var, 1);
            for (k2, &(i2, j2, _)) in touching.iter().enumerate() {
                if k2 != k {
                    t = t.mul(&MultiLaurent::pair_factor(n, i2, j2));
                }
            }
            acc = acc.add(&t);
        }
        RationalCorrelator::new(acc, poles)
    }

    /// Region expansion: expand every pair pole keeping the variable that
    /// comes earlier in `order` as the large one, truncated to a
    /// per-variable exponent window `[lo, hi]` (indexed by variable).
    pub fn expand(&self, order: &[usize], lo: &[i64], hi: &[i64]) -> MultiLaurent<Scalar> {
        let n = self.nvars();
        assert_eq!(order.len(), n);
        let mut pos = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut factors: Vec<(usize, usize, u32)> = Vec::new(); // (large, small, order)
        for (&(i, j), &p) in &self.poles.pair_orders {
            let (big, small) = if pos[i] < pos[j] { (i, j) } else { (j, i) };
            factors.push((big, small, p));
        }
        // process factors whose small variable is latest first; then each
        // factor's expansion budget only depends on already-capped ones
        factors.sort_by_key(|&(_, small, _)| core::cmp::Reverse(pos[small]));
        let mut caps: Vec<i64> = vec![0; factors.len()];
        for k in 0..factors.len() {
            let (_, small, _) = factors[k];
            // effective minimal exponent of the small variable contributed
            // by the numerator and its origin pole
            let base_min = self.numerator.min_exp(small).unwrap_or(0)
                - self.poles.origin_orders[small] as i64;
            let mut budget = hi[small] - base_min.min(0);
            for (k2, &(big2, _, p2)) in factors.iter().enumerate() {
                if big2 == small && k2 < k {
                    budget += p2 as i64 + caps[k2];
                }
            }
            caps[k] = budget.max(0);
        }
        let mut acc = self.numerator.clone();
        for v in 0..n {
            acc = acc.shift(v, -(self.poles.origin_orders[v] as i64));
        }
        for (k, &(big, small, p)) in factors.iter().enumerate() {
            // (x_big - x_small)^{-p} = sum_{t>=0} C(p+t-1,t) big^{-p-t} small^t,
            // with a sign when the stored key orientation is (small, big)
            let key_swapped = big > small;
            let sign = if key_swapped && p % 2 == 1 {
                -Scalar::one()
            } else {
                Scalar::one()
            };
            let mut series = MultiLaurent::zero(n);
            for t in 0..=caps[k] {
                let c = binom_int((p as i64) + t - 1, t as u64);
                let mut e = vec![0i64; n];
                e[big] = -(p as i64) - t;
                e[small] = t;
                series.add_term(e, &c * &sign);
            }
            acc = acc.mul(&series);
        }
        acc.window(lo, hi)
    }
}

impl fmt::Display for RationalCorrelator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.numerator)?;
        for (v, &p) in self.poles.origin_orders.iter().enumerate() {
            if p > 0 {
                write!(f, " / x{v}^{p}")?;
            }
        }
        for (&(i, j), &p) in &self.poles.pair_orders {
            write!(f, " / (x{i}-x{j})^{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn geom(nvars: usize, i: usize, j: usize, p: u32) -> RationalCorrelator {
        let mut poles = PoleStructure::none(nvars);
        poles.set_pair_order(i, j, p);
        RationalCorrelator::new(MultiLaurent::one(nvars), poles)
    }

    #[test]
    fn expand_single_geometric() {
        // 1/(x0 - x1) in |x0| > |x1|: sum x0^{-1-k} x1^k
        let r = geom(2, 0, 1, 1);
        let e = r.expand(&[0, 1], &[-6, 0], &[0, 6]);
        for k in 0..=5i64 {
            assert_eq!(e.coeff(&[-1 - k, k]), Some(&s("1")));
        }
        // reversed region |x1| > |x0|: -(x1 - x0)^{-1} expansion
        let e = r.expand(&[1, 0], &[0, -6], &[6, 0]);
        for k in 0..=5i64 {
            assert_eq!(e.coeff(&[k, -1 - k]), Some(&s("-1")));
        }
    }

    #[test]
    fn expand_fourth_order_pole() {
        // (c/2)/(x0-x1)^4 expansion: (c/2) C(k+3,3) x0^{-4-k} x1^k
        let c = s("1");
        let r = geom(2, 0, 1, 4).scale(&(&c / &s("2")));
        let e = r.expand(&[0, 1], &[-20, 0], &[0, 12]);
        for k in 0..=10i64 {
            let expect = &binom_int(k + 3, 3) * &(&c / &s("2"));
            assert_eq!(e.coeff(&[-4 - k, k]), Some(&expect), "k={k}");
        }
    }

    #[test]
    fn canonicalization_divides_pair_factors() {
        // (x0 - x1)^2 / (x0 - x1)^3 = 1/(x0 - x1)
        let num = MultiLaurent::pair_factor(2, 0, 1).pow(2);
        let mut poles = PoleStructure::none(2);
        poles.set_pair_order(0, 1, 3);
        let r = RationalCorrelator::new(num, poles);
        assert_eq!(r.poles().pair_order(0, 1), 1);
        assert_eq!(r.numerator(), &MultiLaurent::one(2));
        // origin folding: x0^{-2} in the numerator
        let num = MultiLaurent::term(1, vec![-2], s("3"));
        let r = RationalCorrelator::new(num, PoleStructure::none(1));
        assert_eq!(r.poles().origin_orders[0], 2);
        assert_eq!(r.numerator(), &MultiLaurent::constant(1, s("3")));
    }

    #[test]
    fn add_and_mul_consistency_via_expansion() {
        let a = geom(2, 0, 1, 1);
        let b = geom(2, 0, 1, 2);
        let sum = a.add(&b);
        let lo = [-8, 0];
        let hi = [0, 5];
        let ea = a.expand(&[0, 1], &lo, &hi);
        let eb = b.expand(&[0, 1], &lo, &hi);
        let es = sum.expand(&[0, 1], &lo, &hi);
        assert_eq!(es, ea.add(&eb));
        let prod = a.mul(&a);
        let ep = prod.expand(&[0, 1], &lo, &hi);
        assert_eq!(ep, b.expand(&[0, 1], &lo, &hi));
    }

    #[test]
    fn derivative_matches_expansion_derivative() {
        let r = geom(2, 0, 1, 1);
        let dr = r.derivative(1); // d/dx1 1/(x0-x1) = 1/(x0-x1)^2
        assert_eq!(dr.poles().pair_order(0, 1), 2);
        let lo = [-8, -1];
        let hi = [0, 6];
        let e = r.expand(&[0, 1], &[-8, 0], &[0, 7]);
        let de = e.derivative(1).window(&lo, &hi);
        let ed = dr.expand(&[0, 1], &lo, &hi);
        assert_eq!(de, ed);
        // derivative with origin pole: d/dx0 (1/x0) = -1/x0^2
        let r = RationalCorrelator::new(
            MultiLaurent::term(1, vec![-1], s("1")),
            PoleStructure::none(1),
        );
        let dr = r.derivative(0);
        assert_eq!(dr.poles().origin_orders[0], 2);
        assert_eq!(dr.numerator(), &MultiLaurent::constant(1, s("-1")));
    }

    #[test]
    fn div_pair_factor_examples() {
        // (x0^2 - x1^2) / (x0 - x1) = x0 + x1
        let num = MultiLaurent::term(2, vec![2, 0], s("1"))
            .add(&MultiLaurent::term(2, vec![0, 2], s("-1")));
        let q = num.div_pair_factor(0, 1).unwrap();
        let expect = MultiLaurent::term(2, vec![1, 0], s("1"))
            .add(&MultiLaurent::term(2, vec![0, 1], s("1")));
        assert_eq!(q, expect);
        // x0 alone is not divisible
        assert!(MultiLaurent::term(2, vec![1, 0], s("1"))
            .div_pair_factor(0, 1)
            .is_none());
    }

    #[test]
    fn three_variable_chain_expansion() {
        // 1/((x0-x1)(x1-x2)) in |x0|>|x1|>|x2|
        let mut poles = PoleStructure::none(3);
        poles.set_pair_order(0, 1, 1);
        poles.set_pair_order(1, 2, 1);
        let r = RationalCorrelator::new(MultiLaurent::one(3), poles);
        let lo = [-6, -6, 0];
        let hi = [0, 4, 4];
        let e = r.expand(&[0, 1, 2], &lo, &hi);
        assert_eq!(e.coeff(&[-1, -1, 0]), Some(&s("1")));
        // independent double series:
        // sum_{a,b>=0} x0^{-1-a} x1^{a} * x1^{-1-b} x2^b
        let mut direct = MultiLaurent::zero(3);
        for a in 0..=12i64 {
            for b in 0..=12i64 {
                direct.add_term(vec![-1 - a, a - 1 - b, b], s("1"));
            }
        }
        assert_eq!(e, direct.window(&lo, &hi));
    }
}
