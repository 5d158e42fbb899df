//! U(g_κ) in the PBW basis x₁^{a₁}x₂^{a₂}⋯x_n^{a_n}, with [x₁, x_j] = T x_j for
//! j ≥ 2 (T = iλ) and all other generators commuting. Coefficients are exact
//! Gaussian rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::GaussRat;

/// Exponent vector (a₁, …, a_n). Ordered graded-lexicographically with
/// x₁ > x₂ > ⋯ > x_n: lower total degree first, then larger a₁ first, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// x_k, 1-based.
    pub fn generator(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k - 1] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Generator indices of the normal-ordered word.
    pub fn word(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &a)| std::iter::repeat(k + 1).take(a as usize))
            .collect()
    }

    /// All monomials in n variables of total degree ≤ d, in basis order.
    pub fn all_up_to(n: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=d {
            let mut e = vec![0u32; n];
            compositions(deg, 0, &mut e, &mut out);
        }
        out
    }

    /// Monomials in the n − 1 variables x₂…x_n of total degree exactly k.
    pub fn count_of_degree(vars: usize, k: u32) -> usize {
        if vars == 0 {
            return usize::from(k == 0);
        }
        // C(k + vars − 1, vars − 1)
        let mut c: u128 = 1;
        for j in 1..vars as u128 {
            c = c * (k as u128 + j) / j;
        }
        c as usize
    }
}

fn compositions(rest: u32, pos: usize, e: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if pos + 1 == e.len() {
        e[pos] = rest;
        out.push(Monomial(e.clone()));
        return;
    }
    for a in (0..=rest).rev() {
        e[pos] = a;
        compositions(rest - a, pos + 1, e, out);
    }
    e[pos] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}^{}", k + 1, a)?;
        }
        Ok(())
    }
}

/// Deformation parameters, substituted as exact rationals: T = iλ, U = iμ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwParams {
    n: usize,
    lambda: BigRational,
    mu: BigRational,
}

impl PbwParams {
    pub fn new(n: usize, lambda: BigRational, mu: BigRational) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        Ok(Self { n, lambda, mu })
    }

    /// λ = 1, μ given as an integer multiple of λ.
    pub fn unit(n: usize, mu: i64) -> Result<Self> {
        Self::new(n, BigRational::one(), BigRational::from_integer(mu.into()))
    }

    pub fn with_mu(&self, mu: BigRational) -> Self {
        Self { mu, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }
    pub fn mu(&self) -> &BigRational {
        &self.mu
    }
    /// T = iλ
    pub fn t(&self) -> GaussRat {
        GaussRat::imag(self.lambda.clone())
    }
    /// U = iμ
    pub fn u(&self) -> GaussRat {
        GaussRat::imag(self.mu.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwElement {
    n: usize,
    terms: BTreeMap<Monomial, GaussRat>,
}

impl PbwElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, GaussRat::one())
    }

    pub fn scalar(n: usize, c: GaussRat) -> Self {
        Self::term(Monomial::one(n), c)
    }

    /// x_k, 1-based.
    pub fn generator(n: usize, k: usize) -> Self {
        Self::term(Monomial::generator(n, k), GaussRat::one())
    }

    pub fn term(m: Monomial, c: GaussRat) -> Self {
        let mut out = Self::zero(m.n());
        out.add_term(m, c);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest total degree, 0 for the zero element.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussRat) {
        assert_eq!(m.n(), self.n, "monomial arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&GaussRat::from_int(-1)))
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Parse the text form; `n` fixes the number of generators.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        parse_element(text, n)
    }
}

impl fmt::Display for PbwElement {
    /// Canonical text: `coeff * i^k * x1^a1 ... xn^an` terms joined by ` + `,
    /// basis order, real part (k = 0) before imaginary part (k = 1); `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            for (k, part) in [(0, &c.re), (1, &c.im)] {
                if part.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                write!(f, "{part} * i^{k} * {m}")?;
            }
        }
        Ok(())
    }
}

fn parse_element(text: &str, n: usize) -> Result<PbwElement> {
    if n == 0 {
        return Err(Error::Parse("element needs at least one generator".into()));
    }
    let text = text.trim();
    let mut out = PbwElement::zero(n);
    if text == "0" {
        return Ok(out);
    }
    if text.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in '{text}'")));
        }
        let mut coeff = BigRational::one();
        let mut ipow = 0i64;
        let mut exps = vec![0u32; n];
        let (mut seen_coeff, mut seen_i, mut seen_mono) = (false, false, false);
        for part in term.split('*').map(str::trim) {
            if part.is_empty() {
                return Err(Error::Parse(format!("empty factor in '{term}'")));
            }
            if part == "i" || part.starts_with("i^") {
                if seen_i {
                    return Err(Error::Parse(format!("repeated power of i in '{term}'")));
                }
                seen_i = true;
                ipow = match part.strip_prefix("i^") {
                    None => 1,
                    Some(k) => k
                        .trim()
                        .parse::<i64>()
                        .ok()
                        .filter(|k| (0..4).contains(k))
                        .ok_or_else(|| Error::Parse(format!("power of i must be 0..3 in '{part}'")))?,
                };
            } else if part.starts_with('x') {
                if seen_mono {
                    return Err(Error::Parse(format!("repeated monomial in '{term}'")));
                }
                seen_mono = true;
                parse_monomial(part, &mut exps)?;
            } else {
                if seen_coeff {
                    return Err(Error::Parse(format!("repeated coefficient in '{term}'")));
                }
                seen_coeff = true;
                coeff = BigRational::from_str(part)
                    .map_err(|_| Error::Parse(format!("bad coefficient '{part}'")))?;
            }
        }
        out.add_term(Monomial(exps), &GaussRat::real(coeff) * &GaussRat::i_pow(ipow));
    }
    Ok(out)
}

fn parse_monomial(text: &str, exps: &mut [u32]) -> Result<()> {
    let mut seen = vec![false; exps.len()];
    for token in text.split_whitespace() {
        let body = token
            .strip_prefix('x')
            .ok_or_else(|| Error::Parse(format!("bad generator '{token}'")))?;
        let (idx, exp) = match body.split_once('^') {
            Some((i, e)) => (i, e),
            None => (body, "1"),
        };
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::Parse(format!("bad generator index in '{token}'")))?;
        if idx == 0 || idx > exps.len() {
            return Err(Error::Parse(format!("generator x{idx} outside x1..x{}", exps.len())));
        }
        if seen[idx - 1] {
            return Err(Error::Parse(format!("generator x{idx} repeated")));
        }
        seen[idx - 1] = true;
        exps[idx - 1] = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in '{token}'")))?;
    }
    Ok(())
}

fn binomial_row(c: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=c {
        let prev = row[k as usize - 1].clone();
        row.push(prev * BigInt::from(c - k + 1) / BigInt::from(k));
    }
    row
}

fn powers(base: &GaussRat, up_to: u32) -> Vec<GaussRat> {
    let mut out = vec![GaussRat::one()];
    for k in 1..=up_to as usize {
        let next = &out[k - 1] * base;
        out.push(next);
    }
    out
}

/// Product in normal order. Moving x₁^c to the left through x₂^{b₂}⋯x_n^{b_n}
/// turns it into (x₁ − BT)^c with B = b₂ + ⋯ + b_n.
pub fn multiply(p: &PbwElement, q: &PbwElement, params: &PbwParams) -> PbwElement {
    assert_eq!(p.n, q.n, "operands from different algebras");
    let t = params.t();
    let mut out = PbwElement::zero(p.n);
    for (m1, c1) in &p.terms {
        let b: u32 = m1.0[1..].iter().sum();
        let shift = &GaussRat::from_int(-i64::from(b)) * &t;
        for (m2, c2) in &q.terms {
            let c = m2.0[0];
            let binom = binomial_row(c);
            let pw = powers(&shift, c);
            let c12 = c1 * c2;
            for k in 0..=c {
                let coeff = &(&GaussRat::real(BigRational::from_integer(binom[k as usize].clone())) * &pw[(c - k) as usize])
                    * &c12;
                let mut e = m1.0.clone();
                e[0] += k;
                for j in 1..p.n {
                    e[j] += m2.0[j];
                }
                out.add_term(Monomial(e), coeff);
            }
        }
    }
    out
}

/// Normal form of `scale · x_{w₁} x_{w₂} ⋯` by repeated rewriting
/// x_j x₁ → x₁ x_j − T x_j (j ≥ 2) and free reordering of x₂…x_n.
pub fn normal_form(word: &[usize], scale: &GaussRat, params: &PbwParams) -> PbwElement {
    let n = params.n;
    assert!(word.iter().all(|&k| (1..=n).contains(&k)), "generator index out of range");
    let t = params.t();
    let minus_t = -&t;
    let mut out = PbwElement::zero(n);
    let mut work: Vec<(Vec<usize>, GaussRat)> = vec![(word.to_vec(), scale.clone())];
    while let Some((mut w, c)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        // first x_j x₁ inversion, if any
        match w.windows(2).position(|p| p[0] != 1 && p[1] == 1) {
            Some(i) => {
                let j = w[i];
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                work.push((swapped, c.clone()));
                let mut shorter = w.clone();
                shorter.remove(i + 1);
                shorter[i] = j;
                work.push((shorter, &c * &minus_t));
            }
            None => {
                w.sort_unstable();
                let mut e = vec![0u32; n];
                for k in w {
                    e[k - 1] += 1;
                }
                out.add_term(Monomial(e), c);
            }
        }
    }
    out
}

/// The automorphism x₁ ↦ x₁ + s, x_j ↦ x_j.
pub fn shift_x1(p: &PbwElement, s: &GaussRat) -> PbwElement {
    let mut out = PbwElement::zero(p.n);
    for (m, c) in &p.terms {
        let a = m.0[0];
        let binom = binomial_row(a);
        let pw = powers(s, a);
        for k in 0..=a {
            let mut e = m.0.clone();
            e[0] = k;
            let coeff = &(&GaussRat::real(BigRational::from_integer(binom[k as usize].clone())) * &pw[(a - k) as usize]) * c;
            out.add_term(Monomial(e), coeff);
        }
    }
    out
}

/// σ(x₁) = x₁ + U, σ(x_j) = x_j.
pub fn sigma_mu(p: &PbwElement, u: &GaussRat) -> PbwElement {
    shift_x1(p, u)
}

/// X(m) = σ(X)·m − m·X for the generator X = x_k of the twisted module.
pub fn twisted_adjoint(k: usize, m: &PbwElement, params: &PbwParams) -> PbwElement {
    let x = PbwElement::generator(params.n, k);
    let sx = sigma_mu(&x, &params.u());
    multiply(&sx, m, params).sub(&multiply(m, &x, params))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionElement {
    P0,
    /// P_j for a spatial direction j ∈ 2..=n (generator x_j)
    P(usize),
    E,
    EInv,
}

fn minus_i() -> GaussRat {
    GaussRat::i_pow(3)
}

/// h ▷ p for the translation sector: P₀ is the derivation with P₀▷x₁ = −i,
/// P_j the twisted derivation with coproduct P_j⊗1 + E⊗P_j and P_j▷x_k = −iδ_jk,
/// E the automorphism x₁ ↦ x₁ + T.
pub fn act_generator(h: ActionElement, p: &PbwElement, params: &PbwParams) -> PbwElement {
    let n = params.n;
    match h {
        ActionElement::E => shift_x1(p, &params.t()),
        ActionElement::EInv => shift_x1(p, &-&params.t()),
        ActionElement::P0 => {
            let mut out = PbwElement::zero(n);
            for (m, c) in &p.terms {
                let a = m.0[0];
                if a == 0 {
                    continue;
                }
                let mut e = m.0.clone();
                e[0] -= 1;
                out.add_term(Monomial(e), &(c * &minus_i()) * &GaussRat::from_int(i64::from(a)));
            }
            out
        }
        ActionElement::P(j) => {
            assert!((2..=n).contains(&j), "P_j needs 2 <= j <= n");
            let mut out = PbwElement::zero(n);
            for (m, c) in &p.terms {
                let word = m.word();
                for (pos, &g) in word.iter().enumerate() {
                    if g != j {
                        continue;
                    }
                    // E▷(prefix) · (P_j▷x_j) · suffix
                    let prefix = word_element(&word[..pos], n);
                    let suffix = word_element(&word[pos + 1..], n);
                    let shifted = shift_x1(&prefix, &params.t());
                    let piece = multiply(&shifted, &suffix, params).scale(&(c * &minus_i()));
                    out = out.add(&piece);
                }
            }
            out
        }
    }
}

/// A normal-ordered word as an element.
fn word_element(word: &[usize], n: usize) -> PbwElement {
    let mut e = vec![0u32; n];
    for &k in word {
        e[k - 1] += 1;
    }
    debug_assert!(word.windows(2).all(|p| p[0] <= p[1]));
    PbwElement::term(Monomial(e), GaussRat::one())
}

/// h▷(pq) − Σ (h₍₁₎▷p)(h₍₂₎▷q).
pub fn module_algebra_residual(h: ActionElement, p: &PbwElement, q: &PbwElement, params: &PbwParams) -> PbwElement {
    let lhs = act_generator(h, &multiply(p, q, params), params);
    let rhs = match h {
        ActionElement::E | ActionElement::EInv => {
            multiply(&act_generator(h, p, params), &act_generator(h, q, params), params)
        }
        ActionElement::P0 => multiply(&act_generator(h, p, params), q, params)
            .add(&multiply(p, &act_generator(h, q, params), params)),
        ActionElement::P(_) => multiply(&act_generator(h, p, params), q, params).add(&multiply(
            &act_generator(ActionElement::E, p, params),
            &act_generator(h, q, params),
            params,
        )),
    };
    lhs.sub(&rhs)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn rat(num: i64, den: i64) -> GaussRat {
        GaussRat::from_ratio(num, den)
    }

    fn params(n: usize) -> PbwParams {
        PbwParams::new(n, BigRational::new(3.into(), 2.into()), BigRational::new((-5).into(), 3.into())).unwrap()
    }

    fn x(n: usize, k: usize) -> PbwElement {
        PbwElement::generator(n, k)
    }

    pub fn arb_element(n: usize, max_deg: u32) -> impl Strategy<Value = PbwElement> {
        proptest::collection::vec(
            (
                proptest::collection::vec(0..=max_deg, n),
                -4i64..5,
                -3i64..4,
                1i64..4,
            ),
            0..4,
        )
        .prop_map(move |terms| {
            let mut out = PbwElement::zero(n);
            for (mut e, re, im, den) in terms {
                // clip to the total degree bound
                while e.iter().sum::<u32>() > max_deg {
                    let k = e.iter().position(|&a| a > 0).unwrap();
                    e[k] -= 1;
                }
                out.add_term(
                    Monomial(e),
                    GaussRat::new(BigRational::new(re.into(), den.into()), BigRational::new(im.into(), den.into())),
                );
            }
            out
        })
    }

    #[test]
    fn commutation_relation() {
        let p = params(2);
        let t = p.t();
        let want = PbwElement::term(Monomial(vec![1, 1]), GaussRat::one())
            .add(&PbwElement::term(Monomial(vec![0, 1]), -&t));
        assert_eq!(multiply(&x(2, 2), &x(2, 1), &p), want);
        assert_eq!(normal_form(&[2, 1], &GaussRat::one(), &p), want);
    }

    #[test]
    fn normal_form_examples() {
        let p = params(2);
        let t = p.t();
        let mut want = PbwElement::zero(2);
        want.add_term(Monomial(vec![2, 1]), GaussRat::one());
        want.add_term(Monomial(vec![1, 1]), &GaussRat::from_int(-2) * &t);
        want.add_term(Monomial(vec![0, 1]), &t * &t);
        assert_eq!(normal_form(&[2, 1, 1], &GaussRat::one(), &p), want);
        let p3 = params(3);
        assert_eq!(
            normal_form(&[3, 2], &GaussRat::one(), &p3),
            PbwElement::term(Monomial(vec![0, 1, 1]), GaussRat::one())
        );
    }

    #[test]
    fn unit_and_scalars() {
        let p = params(3);
        let q = normal_form(&[3, 1, 2, 1], &rat(7, 3), &p);
        assert_eq!(multiply(&PbwElement::one(3), &q, &p), q);
        assert_eq!(multiply(&q, &PbwElement::one(3), &p), q);
    }

    #[test]
    fn sigma_examples() {
        let p = params(2);
        let u = p.u();
        let x1sq = normal_form(&[1, 1], &GaussRat::one(), &p);
        let mut want = PbwElement::zero(2);
        want.add_term(Monomial(vec![2, 0]), GaussRat::one());
        want.add_term(Monomial(vec![1, 0]), &GaussRat::from_int(2) * &u);
        want.add_term(Monomial(vec![0, 0]), &u * &u);
        assert_eq!(sigma_mu(&x1sq, &u), want);
        assert_eq!(sigma_mu(&x1sq, &GaussRat::zero()), x1sq);
    }

    #[test]
    fn twisted_adjoint_examples() {
        let p = params(2);
        let one = PbwElement::one(2);
        assert!(twisted_adjoint(2, &one, &p).is_zero());
        assert_eq!(twisted_adjoint(1, &one, &p), PbwElement::scalar(2, p.u()));
        for b in 0..5u32 {
            let m = PbwElement::term(Monomial(vec![0, b]), GaussRat::one());
            let coeff = &p.u() + &(&GaussRat::from_int(i64::from(b)) * &p.t());
            assert_eq!(twisted_adjoint(1, &m, &p), m.scale(&coeff));
        }
    }

    #[test]
    fn action_examples() {
        let p = params(2);
        let x1 = x(2, 1);
        assert_eq!(act_generator(ActionElement::E, &x1, &p), x1.add(&PbwElement::scalar(2, p.t())));
        let x1x2 = multiply(&x1, &x(2, 2), &p);
        let want = x1.add(&PbwElement::scalar(2, p.t())).scale(&GaussRat::i_pow(3));
        assert_eq!(act_generator(ActionElement::P(2), &x1x2, &p), want);
        let x2cubed = normal_form(&[2, 2, 2], &GaussRat::one(), &p);
        assert!(act_generator(ActionElement::P0, &x2cubed, &p).is_zero());
        assert_eq!(act_generator(ActionElement::P0, &x1, &p), PbwElement::scalar(2, GaussRat::i_pow(3)));
    }

    #[test]
    fn text_round_trip() {
        let p = params(3);
        let e = normal_form(&[3, 1, 2, 1], &rat(-7, 3), &p).add(&PbwElement::scalar(3, GaussRat::i()));
        let text = e.to_string();
        assert_eq!(PbwElement::parse(&text, 3).unwrap(), e);
        assert_eq!(PbwElement::zero(3).to_string(), "0");
        assert_eq!(PbwElement::parse("0", 3).unwrap(), PbwElement::zero(3));
        assert_eq!(
            PbwElement::parse(" 2 * i^3 *x1^1  x3^2 ", 3).unwrap(),
            PbwElement::term(Monomial(vec![1, 0, 2]), GaussRat::from_int(-2) * GaussRat::i())
        );
        assert_eq!(x(2, 1).to_string(), "1 * i^0 * x1^1 x2^0");
    }

    #[test]
    fn text_errors() {
        for bad in ["", "1 * i^4", "x4^1", "x0^1", "1 * * x1", "x1^1 x1^2", "a/b", "1 +", "x1^-1"] {
            assert!(PbwElement::parse(bad, 3).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn basis_enumeration() {
        let all = Monomial::all_up_to(3, 2);
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[1], Monomial(vec![1, 0, 0]));
        assert_eq!(Monomial::count_of_degree(3, 2), 6);
        assert_eq!(Monomial::count_of_degree(1, 7), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn associativity(a in arb_element(3, 3), b in arb_element(3, 3), c in arb_element(3, 3)) {
            let p = params(3);
            let left = multiply(&multiply(&a, &b, &p), &c, &p);
            let right = multiply(&a, &multiply(&b, &c, &p), &p);
            prop_assert_eq!(left, right);
        }

        #[test]
        fn multiply_agrees_with_rewriting(w1 in proptest::collection::vec(1usize..=3, 0..4),
                                          w2 in proptest::collection::vec(1usize..=3, 0..4)) {
            let p = params(3);
            let one = GaussRat::one();
            let joined: Vec<usize> = w1.iter().chain(&w2).copied().collect();
            let product = multiply(&normal_form(&w1, &one, &p), &normal_form(&w2, &one, &p), &p);
            prop_assert_eq!(product, normal_form(&joined, &one, &p));
        }

        #[test]
        fn normal_form_idempotent(w in proptest::collection::vec(1usize..=3, 0..6)) {
            let p = params(3);
            let nf = normal_form(&w, &GaussRat::one(), &p);
            let mut again = PbwElement::zero(3);
            for (m, c) in nf.terms() {
                again = again.add(&normal_form(&m.word(), c, &p));
            }
            prop_assert_eq!(again, nf);
        }

        #[test]
        fn sigma_is_a_homomorphism(a in arb_element(2, 3), b in arb_element(2, 3)) {
            let p = params(2);
            let u = p.u();
            prop_assert_eq!(
                sigma_mu(&multiply(&a, &b, &p), &u),
                multiply(&sigma_mu(&a, &u), &sigma_mu(&b, &u), &p)
            );
        }

        #[test]
        fn twisted_adjoint_is_a_lie_action(m in arb_element(3, 3), j in 2usize..=3) {
            let p = params(3);
            // [x₁, x_j](m) = T · x_j(m)
            let lhs = twisted_adjoint(1, &twisted_adjoint(j, &m, &p), &p)
                .sub(&twisted_adjoint(j, &twisted_adjoint(1, &m, &p), &p));
            prop_assert_eq!(lhs, twisted_adjoint(j, &m, &p).scale(&p.t()));
            let lhs = twisted_adjoint(2, &twisted_adjoint(3, &m, &p), &p)
                .sub(&twisted_adjoint(3, &twisted_adjoint(2, &m, &p), &p));
            prop_assert!(lhs.is_zero());
        }

        #[test]
        fn module_algebra_property(a in arb_element(3, 4), b in arb_element(3, 4)) {
            let p = params(3);
            for h in [ActionElement::E, ActionElement::EInv, ActionElement::P0, ActionElement::P(2), ActionElement::P(3)] {
                prop_assert!(module_algebra_residual(h, &a, &b, &p).is_zero(), "{:?}", h);
            }
        }

        #[test]
        fn e_and_inverse_cancel(a in arb_element(3, 4)) {
            let p = params(3);
            let back = act_generator(ActionElement::EInv, &act_generator(ActionElement::E, &a, &p), &p);
            prop_assert_eq!(back, a);
        }

        #[test]
        fn text_round_trips(a in arb_element(3, 4)) {
            prop_assert_eq!(PbwElement::parse(&a.to_string(), 3).unwrap(), a);
        }
    }

    #[test]
    fn inverse_modular_substitution() {
        let n = 4;
        let p = params(n);
        let u = &GaussRat::from_int(-(n as i64 - 1)) * &p.t();
        // σ with U = −(n−1)T is x₁ ↦ x₁ − iλ(n−1), i.e. E^{−(n−1)}
        let a = normal_form(&[1, 2, 1, 3, 1], &rat(2, 5), &p);
        let mut via_e = a.clone();
        for _ in 0..n - 1 {
            via_e = act_generator(ActionElement::EInv, &via_e, &p);
        }
        assert_eq!(sigma_mu(&a, &u), via_e);
    }
}
