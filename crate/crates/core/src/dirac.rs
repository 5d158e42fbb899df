//! Euclidean gamma matrices, the twisted Dirac symbol D = Γ^μ D_μ with
//! D₀ = λ⁻¹(1 − e^{−λp₀}), D_j = p_j, and the twisted commutators it induces.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::GaussRat;
use crate::field::{modular_shift, star_product, GridFunction};
use crate::lie_group::GroupConfig;
use crate::pbw::{act_generator, ActionElement, PbwElement, PbwParams};

pub type ExactMatrix = Vec<Vec<GaussRat>>;

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSet {
    n: usize,
    matrices: Vec<DMatrix<Complex64>>,
}

fn pauli() -> [DMatrix<Complex64>; 4] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let o = c(0.0, 0.0);
    [
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), o, o, c(1.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[o, c(1.0, 0.0), c(1.0, 0.0), o]),
        DMatrix::from_row_slice(2, 2, &[o, c(0.0, -1.0), c(0.0, 1.0), o]),
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), o, o, c(-1.0, 0.0)]),
    ]
}

fn kron_all(factors: &[&DMatrix<Complex64>]) -> DMatrix<Complex64> {
    factors
        .iter()
        .fold(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), |acc, f| acc.kronecker(f))
}

/// Jordan–Wigner construction on ⌊n/2⌋ qubits: Γ^{2k} = Z⊗⋯⊗Z⊗X⊗1⊗⋯,
/// Γ^{2k+1} = Z⊗⋯⊗Z⊗Y⊗1⊗⋯, and Z⊗⋯⊗Z last when n is odd.
pub fn clifford(n: usize) -> Result<CliffordSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("clifford needs n >= 1".into()));
    }
    let qubits = n / 2;
    let [id, x, y, z] = pauli();
    let mut matrices = Vec::with_capacity(n);
    for k in 0..qubits {
        for middle in [&x, &y] {
            let factors: Vec<&DMatrix<Complex64>> = (0..qubits)
                .map(|q| match q.cmp(&k) {
                    std::cmp::Ordering::Less => &z,
                    std::cmp::Ordering::Equal => middle,
                    std::cmp::Ordering::Greater => &id,
                })
                .collect();
            matrices.push(kron_all(&factors));
        }
    }
    if n % 2 == 1 {
        let factors = vec![&z; qubits];
        matrices.push(kron_all(&factors));
    }
    Ok(CliffordSet { n, matrices })
}

impl CliffordSet {
    pub fn n(&self) -> usize {
        self.n
    }

    /// 2^{⌊n/2⌋}
    pub fn spinor_dim(&self) -> usize {
        1 << (self.n / 2)
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.matrices
    }

    /// Entries are in {0, ±1, ±i}, so the conversion is exact.
    pub fn exact(&self, mu: usize) -> ExactMatrix {
        let m = &self.matrices[mu];
        (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .map(|c| {
                        let z = m[(r, c)];
                        GaussRat::new(
                            BigRational::from_integer((z.re as i64).into()),
                            BigRational::from_integer((z.im as i64).into()),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest entry of |Γ^μΓ^ν + Γ^νΓ^μ − 2δ^{μν}|, plus a Hermiticity defect.
    pub fn anticommutator_defect(&self) -> f64 {
        let d = self.spinor_dim();
        let mut worst = 0.0f64;
        for (a, ga) in self.matrices.iter().enumerate() {
            worst = worst.max(max_abs(&(ga - ga.adjoint())));
            for (b, gb) in self.matrices.iter().enumerate() {
                let mut anti = ga * gb + gb * ga;
                if a == b {
                    anti -= DMatrix::<Complex64>::identity(d, d) * Complex64::new(2.0, 0.0);
                }
                worst = worst.max(max_abs(&anti));
            }
        }
        worst
    }

    /// Σ_μ c_μ Γ^μ.
    pub fn contract(&self, coeffs: &[Complex64]) -> DMatrix<Complex64> {
        let d = self.spinor_dim();
        let mut out = DMatrix::zeros(d, d);
        for (g, c) in self.matrices.iter().zip(coeffs) {
            out += g * *c;
        }
        out
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// λ⁻¹(1 − e^{−λp₀}), equal to p₀ at λ = 0.
pub fn d0_symbol(p0: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        p0
    } else {
        -(-lambda * p0).exp_m1() / lambda
    }
}

fn check_momentum(p: &[f64], cfg: &GroupConfig) -> Result<()> {
    if p.len() != cfg.n() {
        return Err(Error::InvalidParameter(format!(
            "momentum has {} components, n = {}",
            p.len(),
            cfg.n()
        )));
    }
    Ok(())
}

/// Γ⁰D₀(p) + Σ_j Γ^j p_j.
pub fn dirac_matrix(p: &[f64], cfg: &GroupConfig) -> Result<DMatrix<Complex64>> {
    check_momentum(p, cfg)?;
    let gammas = clifford(cfg.n())?;
    let mut coeffs: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    coeffs[0] = Complex64::new(d0_symbol(p[0], cfg.lambda()), 0.0);
    Ok(gammas.contract(&coeffs))
}

/// (4/λ²) sinh²(λp₀/2) + e^{λp₀} |p⃗|².
pub fn casimir_value(p: &[f64], cfg: &GroupConfig) -> Result<f64> {
    check_momentum(p, cfg)?;
    let lambda = cfg.lambda();
    let spatial: f64 = p[1..].iter().map(|x| x * x).sum();
    if lambda == 0.0 {
        return Ok(p[0] * p[0] + spatial);
    }
    let s = (0.5 * lambda * p[0]).sinh();
    Ok(4.0 * s * s / (lambda * lambda) + (lambda * p[0]).exp() * spatial)
}

/// e^{λp₀}(D₀(p)² + |p⃗|²), the same scalar assembled from the Dirac symbol.
pub fn casimir_from_dirac(p: &[f64], cfg: &GroupConfig) -> Result<f64> {
    check_momentum(p, cfg)?;
    let d0 = d0_symbol(p[0], cfg.lambda());
    let spatial: f64 = p[1..].iter().map(|x| x * x).sum();
    Ok((cfg.lambda() * p[0]).exp() * (d0 * d0 + spatial))
}

/// The multiplication operator [D, f]_σ = Γ^μ (D_μ▷f).
#[derive(Debug, Clone)]
pub struct TwistedCommutator {
    pub gammas: CliffordSet,
    /// D_μ▷f for μ = 0, …, n−1
    pub components: Vec<GridFunction>,
    /// max over grid points of the spectral norm of Γ^μ (D_μ▷f)(x)
    pub sup_norm: f64,
}

/// D_μ▷f: the axis-0 multiplier D₀(p₀) for μ = 0, −i∂_μ on spatial axes.
pub fn act_d(mu: usize, f: &GridFunction) -> Result<GridFunction> {
    let lambda = f.config().lambda();
    if mu == 0 {
        f.apply_multiplier(|p| Complex64::new(d0_symbol(p, lambda), 0.0))
    } else {
        f.apply_spatial_multiplier(mu - 1, |q| Complex64::new(q, 0.0))
    }
}

pub fn twisted_commutator_multiplier(f: &GridFunction) -> Result<TwistedCommutator> {
    let n = f.config().n();
    let gammas = clifford(n)?;
    let components = (0..n).map(|mu| act_d(mu, f)).collect::<Result<Vec<_>>>()?;
    let (rows, cols) = f.samples().dim();
    let mut sup = 0.0f64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..rows {
        for c in 0..cols {
            for (slot, comp) in coeffs.iter_mut().zip(&components) {
                *slot = comp.samples()[[r, c]];
            }
            if coeffs.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let m = gammas.contract(&coeffs);
            let s = m.singular_values().max();
            sup = sup.max(s);
        }
    }
    Ok(TwistedCommutator {
        gammas,
        components,
        sup_norm: sup,
    })
}

/// max_μ sup |D_μ▷(f⋆g) − (D_μ▷f)⋆g − σ(f)⋆(D_μ▷g)| with σ = e^{−λP₀}.
pub fn twisted_leibniz_residual(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let fg = star_product(f, g)?;
    let sf = modular_shift(f, 1.0)?;
    let mut worst = 0.0f64;
    for mu in 0..f.config().n() {
        let lhs = act_d(mu, &fg)?;
        let a = star_product(&act_d(mu, f)?, g)?;
        let b = star_product(&sf, &act_d(mu, g)?)?;
        let one = Complex64::new(1.0, 0.0);
        let rhs = a.linear_combination(one, &b, one)?;
        // compare on raw samples: the two sides carry different band limits
        let dist = lhs
            .samples()
            .iter()
            .zip(rhs.samples().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dist);
    }
    Ok(worst)
}

/// D_μ▷x^ν on the polynomial model, with x^0 ↔ x₁ and x^j ↔ x_{j+1}.
/// D₀ = λ⁻¹(1 − E), falling back to P₀ at λ = 0.
pub fn act_d_exact(mu: usize, p: &PbwElement, params: &PbwParams) -> PbwElement {
    if mu == 0 {
        if params.lambda().is_zero() {
            return act_generator(ActionElement::P0, p, params);
        }
        let shifted = act_generator(ActionElement::E, p, params);
        let inv = GaussRat::real(params.lambda().recip());
        p.sub(&shifted).scale(&inv)
    } else {
        act_generator(ActionElement::P(mu + 1), p, params)
    }
}

fn scalar_part(p: &PbwElement) -> Result<GaussRat> {
    let n = p.n();
    let one = crate::pbw::Monomial::one(n);
    if p.terms().any(|(m, _)| *m != one) {
        return Err(Error::InvalidParameter(format!("expected a scalar, got {p}")));
    }
    Ok(p.coeff(&one))
}

/// [D, x^ν]_σ = Σ_μ Γ^μ (D_μ▷x^ν) as an exact matrix; equals −iΓ^ν.
pub fn coordinate_commutator(nu: usize, params: &PbwParams) -> Result<ExactMatrix> {
    let n = params.n();
    if nu >= n {
        return Err(Error::InvalidParameter(format!("axis {nu} out of range for n = {n}")));
    }
    let gammas = clifford(n)?;
    let d = gammas.spinor_dim();
    let x = PbwElement::generator(n, nu + 1);
    let mut out = vec![vec![GaussRat::zero(); d]; d];
    for mu in 0..n {
        let c = scalar_part(&act_d_exact(mu, &x, params))?;
        if c.is_zero() {
            continue;
        }
        let g = gammas.exact(mu);
        for (row, grow) in out.iter_mut().zip(&g) {
            for (slot, entry) in row.iter_mut().zip(grow) {
                *slot += &(entry * &c);
            }
        }
    }
    Ok(out)
}

/// Coefficient in x^μ dx^ν − dx^ν x^μ = c dx^ν, computed as σ(x^μ) − x^μ.
/// It does not depend on ν: iλ for μ = 0 and 0 otherwise.
pub fn bimodule_relation(mu: usize, nu: usize, params: &PbwParams) -> Result<GaussRat> {
    let n = params.n();
    if mu >= n || nu >= n {
        return Err(Error::InvalidParameter(format!("axes ({mu}, {nu}) out of range for n = {n}")));
    }
    let x = PbwElement::generator(n, mu + 1);
    let shifted = act_generator(ActionElement::E, &x, params);
    scalar_part(&shifted.sub(&x))
}
