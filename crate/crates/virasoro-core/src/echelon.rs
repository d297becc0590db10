//! Submodules of finite direct sums of Verma modules: singular generators
//! in row-echelon form and the conjugated projection `rho . pi_N . rho^{-1}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::RowSpan;
use crate::scalar::Scalar;
use crate::structure::{ProjectionSplit, SingularVector, StructureError};
use crate::verma::{apply_mode, apply_word, basis, ModuleParams, PBWMonomial, VermaVector};

/// A finite direct sum of Verma modules with one central charge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirectSum {
    components: Vec<ModuleParams>,
}

impl DirectSum {
    pub fn new(components: Vec<ModuleParams>) -> Self {
        assert!(!components.is_empty());
        let c = components[0].c.clone();
        assert!(
            components.iter().all(|p| p.c == c),
            "direct sum needs one central charge"
        );
        DirectSum { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, i: usize) -> &ModuleParams {
        &self.components[i]
    }

    pub fn components(&self) -> &[ModuleParams] {
        &self.components
    }

    pub fn zero_vector(&self) -> SumVector {
        SumVector {
            components: self
                .components
                .iter()
                .map(|p| VermaVector::zero(p.clone()))
                .collect(),
        }
    }

    /// Basis slots of the weight-`mu` piece with each component level `<= cap`.
    pub fn basis_at(&self, mu: &Scalar, cap: u32) -> Vec<(usize, PBWMonomial)> {
        let mut out = Vec::new();
        for (i, p) in self.components.iter().enumerate() {
            let t = mu - &p.h;
            if let Some(t) = t.to_integer() {
                use num_traits::ToPrimitive;
                if let Some(t) = t.to_i64() {
                    if (0..=cap as i64).contains(&t) {
                        out.extend(basis(t as u32).into_iter().map(|m| (i, m)));
                    }
                }
            }
        }
        out
    }

    /// All weights `h_i + t`, `t <= cap`, sorted.
    pub fn weights(&self, cap: u32) -> Vec<Scalar> {
        let mut set = BTreeSet::new();
        for p in &self.components {
            for t in 0..=cap {
                set.insert(&p.h + &Scalar::from_int(t as i64));
            }
        }
        set.into_iter().collect()
    }
}

/// A vector of a direct sum, componentwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SumVector {
    pub components: Vec<VermaVector>,
}

impl SumVector {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &SumVector) -> SumVector {
        SumVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &SumVector) -> SumVector {
        SumVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> SumVector {
        SumVector {
            components: self.components.iter().map(|v| v.scale(s)).collect(),
        }
    }

    /// Diagonal mode action.
    pub fn apply_mode(&self, m: i64) -> SumVector {
        SumVector {
            components: self.components.iter().map(|v| apply_mode(m, v)).collect(),
        }
    }

    pub fn apply_word(&self, word: &[i64]) -> SumVector {
        SumVector {
            components: self
                .components
                .iter()
                .map(|v| apply_word(word, v))
                .collect(),
        }
    }

    /// Weight of a homogeneous vector, `None` if mixed or zero.
    pub fn weight(&self, sum: &DirectSum) -> Option<Scalar> {
        let mut wt: Option<Scalar> = None;
        for (i, v) in self.components.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let l = v.level()?;
            let w = &sum.component(i).h + &Scalar::from_int(l as i64);
            match &wt {
                None => wt = Some(w),
                Some(prev) if *prev == w => {}
                _ => return None,
            }
        }
        wt
    }

    pub fn leading_component(&self) -> Option<usize> {
        self.components.iter().position(|v| !v.is_zero())
    }

    /// Annihilated by `L(1)` and `L(2)` (hence by all positive modes).
    pub fn is_singular(&self) -> bool {
        self.apply_mode(1).is_zero() && self.apply_mode(2).is_zero()
    }
}

impl fmt::Display for SumVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Errors from the direct-sum classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EchelonError {
    /// The singular generators found within the cap did not exhaust the
    /// submodule; the cap is too small.
    CapTooSmall { weight: Scalar },
    /// A pivot generator violated the split normalization (outside blocks
    /// (a)-(c)).
    Structure(StructureError),
}

impl fmt::Display for EchelonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EchelonError::CapTooSmall { weight } => write!(
                f,
                "singular generators do not exhaust the submodule at weight {weight}; raise the cap"
            ),
            EchelonError::Structure(e) => write!(f, "{e}"),
        }
    }
}

impl From<StructureError> for EchelonError {
    fn from(e: StructureError) -> Self {
        EchelonError::Structure(e)
    }
}

/// Graded spans of a submodule of a direct sum, saturated under the action.
pub struct SumSubmodule {
    sum: DirectSum,
    spans: BTreeMap<Scalar, RowSpan>,
    slots: BTreeMap<Scalar, Vec<(usize, PBWMonomial)>>,
}

impl SumSubmodule {
    /// Span of the submodule generated by `gens`, with all component levels
    /// capped at `cap`.
    pub fn generate(sum: &DirectSum, gens: &[SumVector], cap: u32) -> Self {
        let weights = sum.weights(cap);
        let mut slots = BTreeMap::new();
        let mut spans = BTreeMap::new();
        for mu in &weights {
            let sl = sum.basis_at(mu, cap);
            spans.insert(mu.clone(), RowSpan::new(sl.len()));
            slots.insert(mu.clone(), sl);
        }
        let mut this = SumSubmodule {
            sum: sum.clone(),
            spans,
            slots,
        };
        let mut seeds: Vec<SumVector> = Vec::new();
        for g in gens {
            seeds.extend(this.weight_pieces(g));
        }
        loop {
            for g in &seeds {
                let Some(gw) = g.weight(&this.sum) else {
                    continue;
                };
                for mu in &weights {
                    let t = mu - &gw;
                    let Some(t) = t.to_integer() else { continue };
                    use num_traits::ToPrimitive;
                    let Some(t) = t.to_i64() else { continue };
                    if !(0..=cap as i64).contains(&t) {
                        continue;
                    }
                    for word_mono in basis(t as u32) {
                        let word: Vec<i64> =
                            word_mono.modes().iter().map(|&n| -(n as i64)).collect();
                        let img = g.apply_word(&word);
                        this.insert(&img);
                    }
                }
            }
            // saturate under raising modes
            let mut raised = Vec::new();
            for mu in weights.iter().rev() {
                for v in this.vectors_at(mu) {
                    for m in [1i64, 2] {
                        let img = v.apply_mode(m);
                        if !img.is_zero() && !this.contains(&img) {
                            raised.push(img);
                        }
                    }
                }
            }
            if raised.is_empty() {
                break;
            }
            for v in &raised {
                this.insert(v);
            }
            seeds = raised;
        }
        this
    }

    pub fn sum(&self) -> &DirectSum {
        &self.sum
    }

    fn weight_pieces(&self, v: &SumVector) -> Vec<SumVector> {
        let mut by_weight: BTreeMap<Scalar, SumVector> = BTreeMap::new();
        for (i, comp) in v.components.iter().enumerate() {
            for level in comp.levels() {
                let mu = &self.sum.component(i).h + &Scalar::from_int(level as i64);
                let entry = by_weight
                    .entry(mu)
                    .or_insert_with(|| self.sum.zero_vector());
                entry.components[i] = entry.components[i].add(&comp.component(level));
            }
        }
        by_weight.into_values().collect()
    }

    fn coords(&self, v: &SumVector, mu: &Scalar) -> Option<Vec<Scalar>> {
        let slots = self.slots.get(mu)?;
        let pos: BTreeMap<(usize, &PBWMonomial), usize> = slots
            .iter()
            .enumerate()
            .map(|(k, (i, m))| ((*i, m), k))
            .collect();
        let mut row = vec![Scalar::zero(); slots.len()];
        for (i, comp) in v.components.iter().enumerate() {
            for (m, c) in comp.terms() {
                let k = pos.get(&(i, m))?;
                row[*k] = c.clone();
            }
        }
        Some(row)
    }

    fn from_coords(&self, row: &[Scalar], mu: &Scalar) -> SumVector {
        let slots = &self.slots[mu];
        let mut out = self.sum.zero_vector();
        for (k, c) in row.iter().enumerate() {
            if !c.is_zero() {
                let (i, m) = &slots[k];
                out.components[*i].add_term(m.clone(), c.clone());
            }
        }
        out
    }

    fn insert(&mut self, v: &SumVector) -> bool {
        let pieces = self.weight_pieces(v);
        let mut grew = false;
        for piece in pieces {
            let Some(mu) = piece.weight(&self.sum) else {
                continue;
            };
            let Some(row) = self.coords(&piece, &mu) else {
                continue;
            };
            if let Some(sp) = self.spans.get_mut(&mu) {
                grew |= sp.insert(row);
            }
        }
        grew
    }

    pub fn contains(&self, v: &SumVector) -> bool {
        self.weight_pieces(v).iter().all(|piece| {
            let Some(mu) = piece.weight(&self.sum) else {
                return piece.is_zero();
            };
            match self.coords(piece, &mu) {
                Some(row) => self.spans[&mu].contains(&row),
                None => false,
            }
        })
    }

    pub fn dim_at(&self, mu: &Scalar) -> usize {
        self.spans.get(mu).map_or(0, |sp| sp.dim())
    }

    pub fn weights(&self) -> Vec<Scalar> {
        self.spans.keys().cloned().collect()
    }

    pub fn vectors_at(&self, mu: &Scalar) -> Vec<SumVector> {
        let Some(span) = self.spans.get(mu) else {
            return Vec::new();
        };
        span.rows()
            .iter()
            .map(|row| self.from_coords(row, mu))
            .collect()
    }

    fn slot_count(&self, mu: &Scalar) -> usize {
        self.slots.get(mu).map_or(0, |s| s.len())
    }
}

/// Singular combinations within a list of weight-`mu` vectors.
fn singular_combinations(sum: &DirectSum, cands: &[SumVector], mu: &Scalar, cap: u32) -> Vec<SumVector> {
    if cands.is_empty() {
        return Vec::new();
    }
    let mut constraints: Vec<Vec<Scalar>> = Vec::new();
    for m in [1i64, 2] {
        let target = mu - &Scalar::from_int(m);
        let slots = sum.basis_at(&target, cap + 2);
        let pos: BTreeMap<(usize, &PBWMonomial), usize> = slots
            .iter()
            .enumerate()
            .map(|(k, (i, mo))| ((*i, mo), k))
            .collect();
        let images: Vec<SumVector> = cands.iter().map(|v| v.apply_mode(m)).collect();
        for k in 0..slots.len().max(1) {
            let mut crow = vec![Scalar::zero(); cands.len()];
            let mut nonzero = false;
            for (j, img) in images.iter().enumerate() {
                for (i, comp) in img.components.iter().enumerate() {
                    for (mo, c) in comp.terms() {
                        if pos.get(&(i, mo)) == Some(&k) {
                            crow[j] += c.clone();
                            nonzero = true;
                        }
                    }
                }
            }
            if nonzero {
                constraints.push(crow);
            }
        }
    }
    if constraints.is_empty() {
        return cands.to_vec();
    }
    let mat = crate::linalg::Matrix::from_rows(constraints);
    mat.kernel()
        .into_iter()
        .map(|kv| {
            let mut acc = sum.zero_vector();
            for (j, c) in kv.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&cands[j].scale(c));
                }
            }
            acc
        })
        .filter(|v| !v.is_zero())
        .collect()
}

/// Echelonized singular generators of a direct-sum submodule.
#[derive(Clone, Debug)]
pub struct EchelonGenerators {
    /// `reorder[new] = original` component index map.
    pub reorder: Vec<usize>,
    /// Generators in new component order; generator `k` leads at new
    /// component `pivots[k]`, strictly increasing.
    pub generators: Vec<SumVector>,
    pub pivots: Vec<usize>,
    /// Per new component: level of the pivot singular vector inside its
    /// component (`None` when `N_i = 0`).
    pub pivot_levels: Vec<Option<u32>>,
    /// The reordered direct sum.
    pub sum: DirectSum,
}

/// Classify a submodule of `⊕ M(c, h_i)` by singular vectors in row
/// echelon form: components the submodule misses come first, then pivots
/// chosen by minimal lowest weight of the remaining projection.
pub fn classify_direct_sum_submodule(
    sum: &DirectSum,
    generators: &[SumVector],
    level_cap: u32,
) -> Result<EchelonGenerators, EchelonError> {
    let w = SumSubmodule::generate(sum, generators, level_cap);
    let n = sum.len();
    let mut processed: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut gens_out: Vec<SumVector> = Vec::new();
    let mut pivot_orig: Vec<usize> = Vec::new();
    let mut pivot_levels_by_orig: BTreeMap<usize, u32> = BTreeMap::new();

    // vectors of W' = W ∩ {v : v_i = 0 for processed i} at one weight
    let restricted_vectors = |processed: &[usize], mu: &Scalar| -> Vec<SumVector> {
        let vecs = w.vectors_at(mu);
        if vecs.is_empty() {
            return vecs;
        }
        let slots = &w.slots[mu];
        let proc_cols: Vec<usize> = slots
            .iter()
            .enumerate()
            .filter(|(_, (i, _))| processed.contains(i))
            .map(|(k, _)| k)
            .collect();
        if proc_cols.is_empty() {
            return vecs;
        }
        let mut rows = Vec::new();
        for k in &proc_cols {
            let mut crow = vec![Scalar::zero(); vecs.len()];
            for (j, v) in vecs.iter().enumerate() {
                let coo = w.coords(v, mu).unwrap();
                crow[j] = coo[*k].clone();
            }
            rows.push(crow);
        }
        let mat = crate::linalg::Matrix::from_rows(rows);
        mat.kernel()
            .into_iter()
            .map(|kv| {
                let mut acc = w.sum.zero_vector();
                for (j, c) in kv.iter().enumerate() {
                    if !c.is_zero() {
                        acc = acc.add(&vecs[j].scale(c));
                    }
                }
                acc
            })
            .filter(|v| !v.is_zero())
            .collect()
    };

    while !remaining.is_empty() {
        // components on which W' vanishes entirely come next in the order
        let mut zero_cols = Vec::new();
        for &j in &remaining {
            let mut all_zero = true;
            'outer: for mu in w.weights() {
                for v in restricted_vectors(&processed, &mu) {
                    if !v.components[j].is_zero() {
                        all_zero = false;
                        break 'outer;
                    }
                }
            }
            if all_zero {
                zero_cols.push(j);
            }
        }
        if !zero_cols.is_empty() {
            processed.extend(zero_cols.iter().copied());
            remaining.retain(|j| !zero_cols.contains(j));
            continue;
        }
        // pivot: remaining component with minimal lowest weight of pi_j W'
        let mut best: Option<(Scalar, usize)> = None;
        for &j in &remaining {
            let lowest = w.weights().into_iter().find(|mu| {
                restricted_vectors(&processed, mu)
                    .iter()
                    .any(|v| !v.components[j].is_zero())
            });
            if let Some(lw) = lowest {
                let better = match &best {
                    None => true,
                    Some((bw, bj)) => lw < *bw || (lw == *bw && j < *bj),
                };
                if better {
                    best = Some((lw, j));
                }
            }
        }
        let (weight, pivot) = best.expect("non-zero column without weight");
        // singular vector of W' at that weight with nonzero pivot component
        let cands = restricted_vectors(&processed, &weight);
        let sing = singular_combinations(&w.sum, &cands, &weight, level_cap);
        let Some(gen) = sing
            .into_iter()
            .find(|v| !v.components[pivot].is_zero())
        else {
            return Err(EchelonError::CapTooSmall { weight });
        };
        let lvl = gen.components[pivot].level().unwrap();
        // normalize so the pivot component has unit L(-1)^N coefficient;
        // rho must send s_i to w_i exactly
        let lead = gen.components[pivot].coeff(&PBWMonomial::new(vec![1; lvl as usize]));
        if lead.is_zero() {
            return Err(EchelonError::Structure(
                StructureError::KernelWithoutLeadingTail { level: lvl },
            ));
        }
        let gen = gen.scale(&lead.recip());
        pivot_levels_by_orig.insert(pivot, lvl);
        gens_out.push(gen);
        pivot_orig.push(pivot);
        processed.push(pivot);
        remaining.retain(|&j| j != pivot);
    }

    // completeness: the chosen generators must regenerate W within the cap
    let regen = SumSubmodule::generate(sum, &gens_out, level_cap);
    for mu in w.weights() {
        if regen.dim_at(&mu) != w.dim_at(&mu) {
            return Err(EchelonError::CapTooSmall { weight: mu });
        }
        debug_assert!(w.dim_at(&mu) <= w.slot_count(&mu));
    }

    let reorder = processed;
    let reordered_sum =
        DirectSum::new(reorder.iter().map(|&i| sum.component(i).clone()).collect());
    let reorder_vec = |v: &SumVector| SumVector {
        components: reorder.iter().map(|&i| v.components[i].clone()).collect(),
    };
    let mut generators: Vec<SumVector> = gens_out.iter().map(&reorder_vec).collect();
    let mut pivots: Vec<usize> = pivot_orig
        .iter()
        .map(|oi| reorder.iter().position(|x| x == oi).unwrap())
        .collect();
    let mut order: Vec<usize> = (0..generators.len()).collect();
    order.sort_by_key(|&k| pivots[k]);
    generators = order.iter().map(|&k| generators[k].clone()).collect();
    pivots = order.iter().map(|&k| pivots[k]).collect();
    let pivot_levels = (0..sum.len())
        .map(|new_i| pivot_levels_by_orig.get(&reorder[new_i]).copied())
        .collect();
    Ok(EchelonGenerators {
        reorder,
        generators,
        pivots,
        pivot_levels,
        sum: reordered_sum,
    })
}

/// The projection `pi_W = rho . pi_N . rho^{-1}` onto the submodule
/// described by echelonized generators. All vectors use the reordered
/// component layout of `echelon.sum`.
pub struct PiW {
    echelon: EchelonGenerators,
    splits: Vec<Option<ProjectionSplit>>,
}

/// Build the conjugated projection, constructing per-component splits from
/// the pivot singular vectors.
pub fn build_pi_w(echelon: &EchelonGenerators) -> Result<PiW, EchelonError> {
    let mut splits = Vec::new();
    for (new_i, lvl) in echelon.pivot_levels.iter().enumerate() {
        match lvl {
            None => splits.push(None),
            Some(level) => {
                let gen = echelon
                    .generators
                    .iter()
                    .zip(&echelon.pivots)
                    .find(|(_, &p)| p == new_i)
                    .map(|(g, _)| g)
                    .expect("pivot without generator");
                let comp = &gen.components[new_i];
                let lead = comp.coeff(&PBWMonomial::new(vec![1; *level as usize]));
                if lead.is_zero() {
                    return Err(EchelonError::Structure(
                        StructureError::KernelWithoutLeadingTail { level: *level },
                    ));
                }
                let sv = SingularVector {
                    level: *level,
                    vector: comp.scale(&lead.recip()),
                };
                splits.push(Some(ProjectionSplit::from_singular(
                    echelon.sum.component(new_i),
                    &sv,
                )));
            }
        }
    }
    Ok(PiW {
        echelon: echelon.clone(),
        splits,
    })
}

impl PiW {
    pub fn sum(&self) -> &DirectSum {
        &self.echelon.sum
    }

    pub fn echelon(&self) -> &EchelonGenerators {
        &self.echelon
    }

    /// Componentwise `pi_N = sum_i pi_{N_i}`.
    pub fn pi_n(&self, v: &SumVector) -> SumVector {
        SumVector {
            components: v
                .components
                .iter()
                .zip(&self.splits)
                .map(|(comp, sp)| match sp {
                    Some(split) => split.apply_projection(comp),
                    None => VermaVector::zero(comp.params().clone()),
                })
                .collect(),
        }
    }

    fn generator_at(&self, new_i: usize) -> &SumVector {
        self.echelon
            .generators
            .iter()
            .zip(&self.echelon.pivots)
            .find(|(_, &p)| p == new_i)
            .map(|(g, _)| g)
            .expect("pivot without generator")
    }

    /// `rho`: identity on the complement parts; on `N_i` it maps
    /// `X . s_i` at slot `i` to `X . w_i` with `w_i` the echelon generator.
    pub fn rho(&self, v: &SumVector) -> SumVector {
        let mut out = self.echelon.sum.zero_vector();
        for (i, comp) in v.components.iter().enumerate() {
            match &self.splits[i] {
                None => out.components[i] = out.components[i].add(comp),
                Some(split) => {
                    let (n_part, coords) = split.project_with_coords(comp);
                    let p_part = comp.sub(&n_part);
                    out.components[i] = out.components[i].add(&p_part);
                    let gen = self.generator_at(i);
                    for (mu, c) in coords.terms() {
                        let word: Vec<i64> = mu.modes().iter().map(|&n| -(n as i64)).collect();
                        let moved = gen.apply_word(&word).scale(c);
                        out = out.add(&moved);
                    }
                }
            }
        }
        out
    }

    /// `rho^{-1}` via the nilpotent inverse of `rho = I + Phi`.
    pub fn rho_inv(&self, v: &SumVector) -> SumVector {
        let phi = |x: &SumVector| self.rho(x).sub(x);
        let mut acc = v.clone();
        let mut term = v.clone();
        for _ in 0..self.echelon.sum.len() {
            term = phi(&term).scale(&-Scalar::one());
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// The projection onto the submodule along the echelon complement.
    pub fn project(&self, v: &SumVector) -> SumVector {
        self.rho(&self.pi_n(&self.rho_inv(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn params(c: &str, h: &str) -> ModuleParams {
        ModuleParams::new(s(c), s(h))
    }

    fn setup() -> (DirectSum, VermaVector) {
        let p1 = params("1", "1/4");
        let p2 = params("1", "9/4");
        let sum = DirectSum::new(vec![p1.clone(), p2]);
        let sv = VermaVector::monomial(p1.clone(), PBWMonomial::new(vec![1, 1]))
            .sub(&VermaVector::monomial(p1, PBWMonomial::new(vec![2])));
        (sum, sv)
    }

    fn embed(sum: &DirectSum, i: usize, v: &VermaVector) -> SumVector {
        let mut out = sum.zero_vector();
        out.components[i] = v.clone();
        out
    }

    #[test]
    fn first_component_submodule() {
        let (sum, _) = setup();
        let one = VermaVector::one(sum.component(0).clone());
        let gen = embed(&sum, 0, &one);
        let ech = classify_direct_sum_submodule(&sum, &[gen], 6).unwrap();
        // second component is a zero column of W, so it comes first
        assert_eq!(ech.reorder, vec![1, 0]);
        assert_eq!(ech.generators.len(), 1);
        assert_eq!(ech.pivots, vec![1]);
        assert!(ech.generators[0].is_singular());
        assert_eq!(ech.pivot_levels, vec![None, Some(0)]);
    }

    #[test]
    fn diagonal_submodule() {
        let (sum, sv) = setup();
        let one2 = VermaVector::one(sum.component(1).clone());
        let mut gen = sum.zero_vector();
        gen.components[0] = sv.clone();
        gen.components[1] = one2;
        assert!(gen.is_singular());
        let ech = classify_direct_sum_submodule(&sum, &[gen.clone()], 6).unwrap();
        assert_eq!(ech.generators.len(), 1);
        assert_eq!(ech.reorder, vec![0, 1]);
        assert_eq!(ech.pivots, vec![0]);
        assert!(!ech.generators[0].components[0].is_zero());
        // graded dims of the regenerated span match the input submodule
        let w_in = SumSubmodule::generate(&sum, &[gen], 6);
        let w_out = SumSubmodule::generate(&ech.sum, &ech.generators, 6);
        for mu in w_in.weights() {
            assert_eq!(w_in.dim_at(&mu), w_out.dim_at(&mu));
        }
    }

    #[test]
    fn pi_w_laws_for_diagonal() {
        let (sum, sv) = setup();
        let one2 = VermaVector::one(sum.component(1).clone());
        let mut gen = sum.zero_vector();
        gen.components[0] = sv;
        gen.components[1] = one2;
        let ech = classify_direct_sum_submodule(&sum, &[gen.clone()], 6).unwrap();
        let pw = build_pi_w(&ech).unwrap();
        let w = SumSubmodule::generate(&ech.sum, &ech.generators, 6);
        for mu in w.weights() {
            let all = ech.sum.basis_at(&mu, 6);
            for (i, m) in all.iter().take(6) {
                let v = embed(
                    &ech.sum,
                    *i,
                    &VermaVector::monomial(ech.sum.component(*i).clone(), m.clone()),
                );
                let pv = pw.project(&v);
                assert_eq!(pw.project(&pv), pv, "idempotent at weight {mu}");
                assert!(w.contains(&pv), "image inside W at weight {mu}");
            }
        }
        // rho . rho_inv = id and commutation with L(-m)
        let probe = embed(
            &ech.sum,
            0,
            &VermaVector::monomial(ech.sum.component(0).clone(), PBWMonomial::new(vec![2, 1])),
        );
        assert_eq!(pw.rho(&pw.rho_inv(&probe)), probe);
        for m in 2i64..=4 {
            let lhs = pw.project(&probe.apply_mode(-m));
            let rhs = pw.project(&probe).apply_mode(-m);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn block_diagonal_pi_is_projection() {
        // W = <s> + M(1,9/4): two echelon generators
        let (sum, sv) = setup();
        let g1 = embed(&sum, 0, &sv);
        let g2 = embed(&sum, 1, &VermaVector::one(sum.component(1).clone()));
        let ech = classify_direct_sum_submodule(&sum, &[g1, g2], 6).unwrap();
        assert_eq!(ech.generators.len(), 2);
        let pw = build_pi_w(&ech).unwrap();
        let new_pos = ech.reorder.iter().position(|&x| x == 0).unwrap();
        let v = embed(
            &ech.sum,
            new_pos,
            &VermaVector::monomial(params("1", "1/4"), PBWMonomial::new(vec![1, 1, 1])),
        );
        let pv = pw.project(&v);
        assert_eq!(pw.project(&pv), pv);
    }
}
