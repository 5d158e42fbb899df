//! Twisted Chevalley–Eilenberg complex M ⊗ Λᵏg_κ with M = U(g_κ) carrying the
//! action X(m) = σ(X)m − mX, truncated to PBW degree ≤ d; its top-degree
//! kernel; and the antisymmetrization map into the twisted Hochschild complex.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, GaussRat};
use crate::pbw::{multiply, sigma_mu, twisted_adjoint, Monomial, PbwElement, PbwParams};

/// Subset of {x₁,…,x_n} as a bitmask (bit k ↔ x_{k+1}). Numeric order of
/// the mask is colex order of the subset.
pub type Wedge = u32;

pub fn wedge_of(indices: &[usize]) -> Wedge {
    indices.iter().fold(0, |acc, &k| acc | 1 << (k - 1))
}

pub fn wedge_indices(w: Wedge) -> Vec<usize> {
    (0..32).filter(|k| w >> k & 1 == 1).map(|k| k + 1).collect()
}

pub fn full_wedge(n: usize) -> Wedge {
    (1u32 << n) - 1
}

/// All k-subsets of {1..n} in colex order.
pub fn wedges_of_size(n: usize, k: usize) -> Vec<Wedge> {
    (0..1u32 << n).filter(|w| w.count_ones() as usize == k).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainVector {
    n: usize,
    k: usize,
    degree_bound: u32,
    entries: BTreeMap<(Monomial, Wedge), GaussRat>,
}

impl ChainVector {
    pub fn zero(n: usize, k: usize, degree_bound: u32) -> Self {
        assert!(k <= n, "wedge degree above n");
        Self {
            n,
            k,
            degree_bound,
            entries: BTreeMap::new(),
        }
    }

    /// m ⊗ x_S for a PBW element m.
    pub fn from_element(m: &PbwElement, wedge: Wedge, degree_bound: u32) -> Result<Self> {
        let mut out = Self::zero(m.n(), wedge.count_ones() as usize, degree_bound);
        for (mono, c) in m.terms() {
            out.add_term(mono.clone(), wedge, c.clone())?;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Monomial, Wedge), &GaussRat)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coeff(&self, m: &Monomial, w: Wedge) -> GaussRat {
        self.entries.get(&(m.clone(), w)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, wedge: Wedge, c: GaussRat) -> Result<()> {
        if m.n() != self.n || wedge >> self.n != 0 || wedge.count_ones() as usize != self.k {
            return Err(Error::InvalidParameter(format!(
                "term {m} ⊗ {:?} does not belong to degree {} of the n = {} complex",
                wedge_indices(wedge),
                self.k,
                self.n
            )));
        }
        if m.degree() > self.degree_bound {
            return Err(Error::DegreeBound {
                bound: self.degree_bound as usize,
                degree: m.degree() as usize,
            });
        }
        if c.is_zero() {
            return Ok(());
        }
        let key = (m, wedge);
        let slot = self.entries.entry(key.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for ((m, w), c) in &other.entries {
            out.add_term(m.clone(), *w, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let mut out = Self::zero(self.n, self.k, self.degree_bound);
        for (key, v) in &self.entries {
            let p = v * c;
            if !p.is_zero() {
                out.entries.insert(key.clone(), p);
            }
        }
        out
    }

    /// The PBW coefficient of a fixed wedge.
    pub fn component(&self, wedge: Wedge) -> PbwElement {
        let mut out = PbwElement::zero(self.n);
        for ((m, w), c) in &self.entries {
            if *w == wedge {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }
}

/// A vector Σ_j v_j x_j of g_κ.
type LieVector = BTreeMap<usize, GaussRat>;

/// [x_i, x_j] from [x₁, x_j] = T x_j, everything else commuting.
fn bracket_generators(i: usize, j: usize, t: &GaussRat) -> LieVector {
    let mut out = LieVector::new();
    if i == j {
        return out;
    }
    if i == 1 {
        out.insert(j, t.clone());
    } else if j == 1 {
        out.insert(i, -t);
    }
    out
}

fn bracket(a: &LieVector, b: &LieVector, t: &GaussRat) -> LieVector {
    let mut out = LieVector::new();
    for (&i, ci) in a {
        for (&j, cj) in b {
            for (k, c) in bracket_generators(i, j, t) {
                let slot = out.entry(k).or_default();
                *slot += &(&(ci * cj) * &c);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Sign of moving generator g to its sorted place from the left end of S.
fn insert_left(g: usize, s: Wedge) -> Option<(Wedge, bool)> {
    let bit = 1u32 << (g - 1);
    if s & bit != 0 {
        return None;
    }
    let below = (s & (bit - 1)).count_ones();
    Some((s | bit, below % 2 == 1))
}

/// Same, from the right end.
fn insert_right(g: usize, s: Wedge) -> Option<(Wedge, bool)> {
    let bit = 1u32 << (g - 1);
    if s & bit != 0 {
        return None;
    }
    let above = (s & !(bit | (bit - 1))).count_ones();
    Some((s | bit, above % 2 == 1))
}

type WedgeSum = BTreeMap<Wedge, GaussRat>;

/// Expand X₁ ∧ ⋯ ∧ X_r in the basis x_S.
fn wedge_of_vectors(vectors: &[&LieVector]) -> WedgeSum {
    let mut acc = WedgeSum::new();
    acc.insert(0, GaussRat::one());
    for v in vectors {
        let mut next = WedgeSum::new();
        for (s, c) in &acc {
            for (&g, cg) in v.iter() {
                if let Some((s2, neg)) = insert_right(g, *s) {
                    let mut term = c * cg;
                    if neg {
                        term = -term;
                    }
                    *next.entry(s2).or_default() += &term;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc
}

fn prepend(v: &LieVector, rest: &WedgeSum) -> WedgeSum {
    let mut out = WedgeSum::new();
    for (s, c) in rest {
        for (&g, cg) in v {
            if let Some((s2, neg)) = insert_left(g, *s) {
                let mut term = c * cg;
                if neg {
                    term = -term;
                }
                *out.entry(s2).or_default() += &term;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// X(m) for a general vector X = Σ v_j x_j.
fn act_vector(v: &LieVector, m: &PbwElement, params: &PbwParams) -> PbwElement {
    let mut out = PbwElement::zero(m.n());
    for (&j, c) in v {
        out = out.add(&twisted_adjoint(j, m, params).scale(c));
    }
    out
}

fn sign(k: usize) -> GaussRat {
    GaussRat::from_int(if k % 2 == 0 { 1 } else { -1 })
}

/// δ(m ⊗ X₁∧⋯∧X_k) for arbitrary vectors, straight from the defining formula:
/// Σ_{i<j} (−1)^{i+j} m⊗[X_i,X_j]∧X₁⋯X̂_i⋯X̂_j⋯ + Σ_i (−1)^i X_i(m)⊗X₁⋯X̂_i⋯.
fn differential_general(
    m: &PbwElement,
    xs: &[LieVector],
    params: &PbwParams,
    degree_bound: u32,
) -> Result<ChainVector> {
    let n = params.n();
    let k = xs.len();
    let t = params.t();
    let mut out = ChainVector::zero(n, k.saturating_sub(1), degree_bound);
    if k == 0 {
        return Ok(out);
    }
    for i in 0..k {
        for j in i + 1..k {
            let br = bracket(&xs[i], &xs[j], &t);
            if br.is_empty() {
                continue;
            }
            let rest: Vec<&LieVector> = (0..k).filter(|&l| l != i && l != j).map(|l| &xs[l]).collect();
            let wedge = prepend(&br, &wedge_of_vectors(&rest));
            let s = sign(i + j + 2);
            for (w, c) in wedge {
                for (mono, cm) in m.terms() {
                    out.add_term(mono.clone(), w, &(&s * &c) * cm)?;
                }
            }
        }
    }
    for i in 0..k {
        let acted = act_vector(&xs[i], m, params);
        if acted.is_zero() {
            continue;
        }
        let rest: Vec<&LieVector> = (0..k).filter(|&l| l != i).map(|l| &xs[l]).collect();
        let s = sign(i + 1);
        for (w, c) in wedge_of_vectors(&rest) {
            for (mono, cm) in acted.terms() {
                out.add_term(mono.clone(), w, &(&s * &c) * cm)?;
            }
        }
    }
    Ok(out)
}

fn basis_vector(g: usize) -> LieVector {
    let mut v = LieVector::new();
    v.insert(g, GaussRat::one());
    v
}

/// The Chevalley–Eilenberg differential. Fails with `DegreeBound` if a term
/// would leave the truncation (which would be a defect: δ preserves degree).
pub fn ce_differential(c: &ChainVector, params: &PbwParams) -> Result<ChainVector> {
    let mut out = ChainVector::zero(c.n, c.k.saturating_sub(1), c.degree_bound);
    if c.k == 0 {
        return Ok(out);
    }
    // group by wedge so each basis wedge is expanded once
    let mut by_wedge: BTreeMap<Wedge, PbwElement> = BTreeMap::new();
    for ((m, w), coeff) in &c.entries {
        by_wedge
            .entry(*w)
            .or_insert_with(|| PbwElement::zero(c.n))
            .add_term(m.clone(), coeff.clone());
    }
    for (w, m) in by_wedge {
        let xs: Vec<LieVector> = wedge_indices(w).into_iter().map(basis_vector).collect();
        out = out.add(&differential_general(&m, &xs, params, c.degree_bound)?)?;
    }
    Ok(out)
}

fn det(c: &[Vec<GaussRat>]) -> GaussRat {
    let n = c.len();
    let mut a = c.to_vec();
    let mut d = GaussRat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return GaussRat::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        d = &d * &a[col][col];
        let inv = a[col][col].inv().expect("nonzero pivot");
        for r in col + 1..n {
            let f = &a[r][col] * &inv;
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let v = &f * &a[col][j];
                a[r][j] -= &v;
            }
        }
    }
    d
}

/// δ(m ⊗ X₁∧⋯∧X_n) with X_i = Σ_j C_i^j x_j, computed directly, minus the
/// reduced form det C · [−(n−1)T m⊗x̂₁ + Σ_j (−1)^j x_j(m)⊗x̂_j], where x̂_j
/// is x₁∧⋯∧x_n with x_j omitted. The residual is identically zero.
pub fn delta_split_check(m: &PbwElement, c: &[Vec<BigRational>], params: &PbwParams) -> Result<ChainVector> {
    let n = params.n();
    if c.len() != n || c.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter(format!("coefficient matrix must be {n}×{n}")));
    }
    let cg: Vec<Vec<GaussRat>> = c
        .iter()
        .map(|row| row.iter().map(|x| GaussRat::real(x.clone())).collect())
        .collect();
    let xs: Vec<LieVector> = cg
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j + 1, x.clone()))
                .collect()
        })
        .collect();
    let bound = m.degree();
    let direct = differential_general(m, &xs, params, bound)?;

    let full = full_wedge(n);
    let dc = det(&cg);
    let mut reduced = ChainVector::zero(n, n - 1, bound);
    let lead = &(&GaussRat::from_int(-(n as i64 - 1)) * &params.t()) * &dc;
    for (mono, cm) in m.terms() {
        reduced.add_term(mono.clone(), full & !1, &lead * cm)?;
    }
    for j in 1..=n {
        let acted = twisted_adjoint(j, m, params).scale(&(&sign(j) * &dc));
        for (mono, cm) in acted.terms() {
            reduced.add_term(mono.clone(), full & !(1 << (j - 1)), cm.clone())?;
        }
    }
    direct.add(&reduced.scale(&GaussRat::from_int(-1)))
}

/// Matrix of δ: M_{≤d}⊗Λᵏ → M_{≤d}⊗Λᵏ⁻¹ in the canonical bases, one row per
/// target basis element.
pub fn differential_matrix(n: usize, k: usize, d: u32, params: &PbwParams) -> Result<Vec<Vec<GaussRat>>> {
    let monos = Monomial::all_up_to(n, d);
    let sources: Vec<(Monomial, Wedge)> = wedges_of_size(n, k)
        .into_iter()
        .flat_map(|w| monos.iter().map(move |m| (m.clone(), w)))
        .collect();
    let targets: Vec<(Monomial, Wedge)> = if k == 0 {
        Vec::new()
    } else {
        wedges_of_size(n, k - 1)
            .into_iter()
            .flat_map(|w| monos.iter().map(move |m| (m.clone(), w)))
            .collect()
    };
    let index: BTreeMap<&(Monomial, Wedge), usize> = targets.iter().enumerate().map(|(i, key)| (key, i)).collect();
    let columns: Vec<Result<ChainVector>> = sources
        .par_iter()
        .map(|(m, w)| {
            let mut c = ChainVector::zero(n, k, d);
            c.add_term(m.clone(), *w, GaussRat::one())?;
            ce_differential(&c, params)
        })
        .collect();
    let mut rows = vec![vec![GaussRat::zero(); sources.len()]; targets.len()];
    for (j, col) in columns.into_iter().enumerate() {
        for (key, v) in col?.entries() {
            let i = index[key];
            rows[i][j] = v.clone();
        }
    }
    Ok(rows)
}

/// Kernel of δ on M_{≤d}⊗Λⁿ, as chain vectors in canonical order.
pub fn top_kernel(n: usize, d: u32, params: &PbwParams) -> Result<Vec<ChainVector>> {
    if params.n() != n {
        return Err(Error::InvalidParameter(format!("params are for n = {}, not {n}", params.n())));
    }
    let matrix = differential_matrix(n, n, d, params)?;
    let monos = Monomial::all_up_to(n, d);
    let basis = exact::kernel(&matrix, monos.len());
    let rank = exact::rank(&matrix);
    if rank + basis.len() != monos.len() {
        return Err(Error::NonConvergence {
            what: "exact elimination cross-check",
            estimate: (rank + basis.len()) as f64,
            tol: monos.len() as f64,
        });
    }
    let full = full_wedge(n);
    basis
        .into_iter()
        .map(|v| {
            let mut c = ChainVector::zero(n, n, d);
            for (m, x) in monos.iter().zip(v) {
                c.add_term(m.clone(), full, x)?;
            }
            Ok(c)
        })
        .collect()
}

/// Top kernel dimension for each μ, λ fixed by `params`.
pub fn kernel_mu_scan(n: usize, d: u32, params: &PbwParams, mus: &[BigRational]) -> Result<Vec<(BigRational, usize)>> {
    mus.iter()
        .map(|mu| Ok((mu.clone(), top_kernel(n, d, &params.with_mu(mu.clone()))?.len())))
        .collect()
}

/// Predicted top kernel dimension: the number of monomials in x₂…x_n of degree
/// k when μ = −λ(n−1+k) with 0 ≤ k ≤ d, and zero otherwise.
pub fn expected_top_kernel_dim(n: usize, d: u32, params: &PbwParams) -> usize {
    use num_traits::{ToPrimitive, Zero};
    if params.lambda().is_zero() {
        return 0;
    }
    let ratio = -(params.mu() / params.lambda()) - BigRational::from_integer((n as i64 - 1).into());
    if !ratio.is_integer() {
        return 0;
    }
    match ratio.to_integer().to_i64() {
        Some(k) if k >= 0 && k <= i64::from(d) => Monomial::count_of_degree(n - 1, k as u32),
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildChain {
    n: usize,
    k: usize,
    entries: BTreeMap<(Monomial, Vec<Monomial>), GaussRat>,
}

impl HochschildChain {
    pub fn zero(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Monomial, Vec<Monomial>), &GaussRat)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, tensors: Vec<Monomial>, c: GaussRat) {
        assert_eq!(tensors.len(), self.k, "tensor length");
        if c.is_zero() {
            return;
        }
        let key = (m, tensors);
        let slot = self.entries.entry(key.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// Add c · m ⊗ a₁ ⊗ ⋯ with each slot an arbitrary PBW element.
    pub fn add_tensor(&mut self, m: &PbwElement, slots: &[PbwElement], c: &GaussRat) {
        let mut partial: Vec<(Vec<Monomial>, GaussRat)> = vec![(Vec::new(), c.clone())];
        for slot in slots {
            let mut next = Vec::new();
            for (prefix, pc) in &partial {
                for (mono, sc) in slot.terms() {
                    let mut p = prefix.clone();
                    p.push(mono.clone());
                    next.push((p, pc * sc));
                }
            }
            partial = next;
        }
        for (mono, cm) in m.terms() {
            for (tensors, pc) in &partial {
                self.add_term(mono.clone(), tensors.clone(), cm * pc);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, a), c) in &other.entries {
            out.add_term(m.clone(), a.clone(), c.clone());
        }
        out
    }
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(k - 1) {
        // insert k−1 at position i: passes over k−1−i larger-index slots
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push((q, odd ^ ((k - 1 - i) % 2 == 1)));
        }
    }
    out
}

/// ε(m ⊗ X₁∧⋯∧X_k) = Σ_s sgn(s) m ⊗ X_{s(1)} ⊗ ⋯ ⊗ X_{s(k)}.
pub fn epsilon_map(c: &ChainVector) -> HochschildChain {
    let mut out = HochschildChain::zero(c.n, c.k);
    let perms = permutations(c.k);
    for ((m, w), coeff) in &c.entries {
        let gens = wedge_indices(*w);
        for (perm, odd) in &perms {
            let tensors = perm.iter().map(|&p| Monomial::generator(c.n, gens[p])).collect();
            let v = if *odd { -coeff } else { coeff.clone() };
            out.add_term(m.clone(), tensors, v);
        }
    }
    out
}

/// b(m⊗a₁⊗⋯⊗a_k) = m·a₁⊗⋯ + Σ_{i<k} (−1)^i m⊗⋯⊗a_i a_{i+1}⊗⋯ + (−1)^k σ(a_k)·m⊗a₁⊗⋯⊗a_{k−1}.
pub fn hochschild_boundary(hc: &HochschildChain, params: &PbwParams) -> HochschildChain {
    let n = hc.n;
    let k = hc.k;
    let mut out = HochschildChain::zero(n, k.saturating_sub(1));
    if k == 0 {
        return out;
    }
    let u = params.u();
    let el = |m: &Monomial| PbwElement::term(m.clone(), GaussRat::one());
    for ((m, a), c) in &hc.entries {
        let me = el(m);
        let slots: Vec<PbwElement> = a.iter().map(el).collect();
        out.add_tensor(&multiply(&me, &slots[0], params), &slots[1..], c);
        for i in 0..k - 1 {
            let mut merged = slots[..i].to_vec();
            merged.push(multiply(&slots[i], &slots[i + 1], params));
            merged.extend_from_slice(&slots[i + 2..]);
            out.add_tensor(&me, &merged, &(&sign(i + 1) * c));
        }
        let twisted = multiply(&sigma_mu(&slots[k - 1], &u), &me, params);
        out.add_tensor(&twisted, &slots[..k - 1], &(&sign(k) * c));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub k: usize,
    pub dim_chain: usize,
    /// rank of δ into degree k (from degree k + 1)
    pub rank_delta_in: usize,
    /// rank of δ out of degree k
    pub rank_delta_out: usize,
    pub kernel_dim: usize,
    /// kernel_dim − rank_delta_in, for the truncated complex only
    pub truncated_homology_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub n: usize,
    pub d: u32,
    #[serde(rename = "T")]
    pub t: String,
    #[serde(rename = "U")]
    pub u: String,
    pub per_degree: Vec<DegreeReport>,
    pub top_kernel_basis: Vec<String>,
}

/// Ranks of every differential of the truncated complex plus the top kernel.
pub fn homology_report(n: usize, d: u32, params: &PbwParams) -> Result<HomologyReport> {
    let monos = Monomial::all_up_to(n, d).len();
    let mut ranks = vec![0usize; n + 2];
    for k in 1..=n {
        ranks[k] = exact::rank(&differential_matrix(n, k, d, params)?);
    }
    let per_degree = (0..=n)
        .map(|k| {
            let dim_chain = monos * wedges_of_size(n, k).len();
            let rank_out = ranks[k];
            let rank_in = ranks[k + 1];
            let kernel_dim = dim_chain - rank_out;
            DegreeReport {
                k,
                dim_chain,
                rank_delta_in: rank_in,
                rank_delta_out: rank_out,
                kernel_dim,
                truncated_homology_dim: kernel_dim - rank_in,
            }
        })
        .collect();
    let full = full_wedge(n);
    let top_kernel_basis = top_kernel(n, d, params)?
        .iter()
        .map(|c| c.component(full).to_string())
        .collect();
    Ok(HomologyReport {
        n,
        d,
        t: params.t().to_string(),
        u: params.u().to_string(),
        per_degree,
        top_kernel_basis,
    })
}
