//! Sampled elements of the test-function algebra: functions on a uniform grid
//! whose Fourier content along x₀ is confined to [−B, B]. The star product,
//! involution, weight ω and modular shifts act on these samples.
//!
//! Along x₀ everything goes through the DFT. The spatial rescaling x⃗ ↦ e^{−λp₀}x⃗
//! in the product formula evaluates the trigonometric interpolant of the
//! samples (or a local Lagrange stencil) at the rescaled points.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{linalg::general_mat_mul, s, Array2, ArrayView2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_group::GroupConfig;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_DIMENSION: usize = 8;

/// Uniform periodic grid start, start + step, …, start + (count − 1)·step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1d {
    pub count: usize,
    pub start: f64,
    pub step: f64,
}

impl Grid1d {
    /// `count` points covering [−half_width, half_width).
    pub fn centered(count: usize, half_width: f64) -> Self {
        Self {
            count,
            start: -half_width,
            step: 2.0 * half_width / count as f64,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// Length of the periodic cell.
    pub fn period(&self) -> f64 {
        self.count as f64 * self.step
    }

    /// Angular frequencies in DFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.count as i64;
        let dp = 2.0 * PI / self.period();
        (0..n)
            .map(|k| {
                let signed = if k <= n / 2 { k } else { k - n };
                signed as f64 * dp
            })
            .collect()
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.step
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.count < 4 || self.count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "{what} grid needs an even number of points >= 4, got {}",
                self.count
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite() && self.start.is_finite()) {
            return Err(Error::InvalidParameter(format!("{what} grid has a bad step or origin")));
        }
        Ok(())
    }
}

/// The x₀ grid and the grid shared by every spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: Grid1d,
    pub spatial: Grid1d,
}

impl GridSpec {
    /// N₀ = 256 on [−20, 20), N_s = 128 on [−20, 20).
    pub fn standard() -> Self {
        Self {
            x0: Grid1d::centered(256, 20.0),
            spatial: Grid1d::centered(128, 20.0),
        }
    }

    pub fn spatial_len(&self, n: usize) -> usize {
        self.spatial.count.pow((n - 1) as u32)
    }

    /// Spatial coordinates of flattened spatial index j (first spatial axis slowest).
    pub fn spatial_coords(&self, n: usize, mut j: usize) -> Vec<f64> {
        let ns = self.spatial.count;
        let mut out = vec![0.0; n - 1];
        for slot in out.iter_mut().rev() {
            *slot = self.spatial.point(j % ns);
            j /= ns;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "order")]
pub enum Interpolation {
    /// Trigonometric interpolation on the periodic spatial cell.
    Spectral,
    /// Local Lagrange interpolation through `order` neighbouring nodes.
    Lagrange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldOptions {
    /// Allowed out-of-band ℓ² norm ratio of the x₀ spectrum.
    pub band_tolerance: f64,
    /// Largest admissible e^{|s|λB} for modular shifts.
    pub overflow_budget: f64,
    /// Largest relative |g| on the spatial boundary when rescaled points leave the grid.
    pub support_tolerance: f64,
    pub interpolation: Interpolation,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            band_tolerance: 1e-10,
            overflow_budget: 1e6,
            support_tolerance: 1e-10,
            interpolation: Interpolation::Spectral,
        }
    }
}

/// Complex samples on the product grid, shape (N₀, N_s^{n−1}).
#[derive(Debug, Clone)]
pub struct GridFunction {
    cfg: GroupConfig,
    grid: GridSpec,
    opts: FieldOptions,
    band_limit: f64,
    samples: Array2<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightValue {
    pub value: Complex64,
    pub quadrature_error: f64,
}

fn fft_plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Unnormalized DFT along axis 0 of a (N₀, S) array.
fn fft_axis0(data: &Array2<Complex64>, inverse: bool) -> Array2<Complex64> {
    let (n0, cols) = data.dim();
    let plan = fft_plan(n0, inverse);
    let mut t = data.t().as_standard_layout().into_owned();
    let buf = t.as_slice_mut().expect("standard layout");
    for chunk in buf.chunks_mut(n0) {
        plan.process(chunk);
    }
    debug_assert_eq!(t.dim(), (cols, n0));
    t.t().as_standard_layout().into_owned()
}

/// DFT along one spatial axis, viewing samples as (outer, N_s, inner).
fn fft_spatial(data: &Array2<Complex64>, axis: usize, n: usize, ns: usize, inverse: bool) -> Array2<Complex64> {
    let inner = ns.pow((n - 2 - axis) as u32);
    let (n0, cols) = data.dim();
    let outer = n0 * cols / (ns * inner);
    let plan = fft_plan(ns, inverse);
    let flat = data.as_standard_layout().into_owned().into_raw_vec_and_offset().0;
    let mut out = flat.clone();
    let mut line = vec![ZERO; ns];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * ns * inner + i;
            for (q, slot) in line.iter_mut().enumerate() {
                *slot = flat[base + q * inner];
            }
            plan.process(&mut line);
            for (q, v) in line.iter().enumerate() {
                out[base + q * inner] = *v;
            }
        }
    }
    Array2::from_shape_vec((n0, cols), out).expect("shape preserved")
}

/// out-of-band ℓ² norm ratio of a raw spectrum along axis 0
fn band_fraction(spec: &Array2<Complex64>, freqs: &[f64], band: f64) -> f64 {
    let mut inside = 0.0;
    let mut outside = 0.0;
    for (row, &p) in spec.outer_iter().zip(freqs) {
        let m: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        if p.abs() > band {
            outside += m;
        } else {
            inside += m;
        }
    }
    let total = inside + outside;
    if total == 0.0 {
        0.0
    } else {
        (outside / total).sqrt()
    }
}

/// Smallest grid frequency B' ≤ cap whose tail fraction stays below `tol`.
fn tight_band(spec: &Array2<Complex64>, freqs: &[f64], cap: f64, tol: f64) -> f64 {
    let mut mass: Vec<(f64, f64)> = spec
        .outer_iter()
        .zip(freqs)
        .map(|(row, &p)| (p.abs(), row.iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    let total: f64 = mass.iter().map(|m| m.1).sum();
    if total == 0.0 {
        return 0.0;
    }
    mass.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tail = 0.0;
    let mut band = cap;
    for (i, &(p, m)) in mass.iter().enumerate() {
        if p > cap {
            tail += m;
            continue;
        }
        // everything strictly above the next smaller frequency is tail
        let next_p = mass.get(i + 1).map_or(0.0, |x| x.0);
        if next_p == p {
            tail += m;
            continue;
        }
        if ((tail + m) / total).sqrt() > tol {
            band = p;
            break;
        }
        tail += m;
        band = next_p;
    }
    band.min(cap)
}

/// Periodic trigonometric interpolation kernel (1/N) sin(Nu/2) cot(u/2),
/// Nyquist mode split symmetrically.
fn dirichlet(u: f64, n: usize) -> f64 {
    let half = 0.5 * u;
    let s = half.sin();
    if s.abs() < 1e-13 {
        (n as f64 * half).cos()
    } else {
        (n as f64 * half).sin() * half.cos() / (s * n as f64)
    }
}

/// Matrix taking samples on `grid` to values at scale·y_i. Rows whose target
/// leaves the cell are zero; the boolean reports whether any were.
fn resample_matrix(grid: &Grid1d, scale: f64, interp: Interpolation) -> (Array2<Complex64>, bool) {
    let n = grid.count;
    let lo = grid.start;
    let hi = grid.start + grid.period();
    let mut m = Array2::<Complex64>::zeros((n, n));
    let mut clipped = false;
    for i in 0..n {
        let target = scale * grid.point(i);
        if target < lo - 1e-12 * grid.step || target > hi + 1e-12 * grid.step {
            clipped = true;
            continue;
        }
        match interp {
            Interpolation::Spectral => {
                for j in 0..n {
                    let u = 2.0 * PI * (target - grid.point(j)) / grid.period();
                    m[[i, j]] = Complex64::new(dirichlet(u, n), 0.0);
                }
            }
            Interpolation::Lagrange(order) => {
                let pos = (target - lo) / grid.step;
                let first = (pos - 0.5 * (order as f64 - 1.0)).floor() as i64;
                let nodes: Vec<i64> = (first..first + order as i64).collect();
                for &a in &nodes {
                    let mut w = 1.0;
                    for &b in &nodes {
                        if a != b {
                            w *= (pos - b as f64) / (a - b) as f64;
                        }
                    }
                    let j = a.rem_euclid(n as i64) as usize;
                    m[[i, j]] += Complex64::new(w, 0.0);
                }
            }
        }
    }
    (m, clipped)
}

impl GridFunction {
    /// Wrap samples, check the band limit and project onto it.
    pub fn new(
        cfg: GroupConfig,
        grid: GridSpec,
        opts: FieldOptions,
        samples: Array2<Complex64>,
        band_limit: f64,
    ) -> Result<Self> {
        let n = cfg.n();
        if n > MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!("grid functions support n <= {MAX_DIMENSION}")));
        }
        grid.x0.validate("x0")?;
        grid.spatial.validate("spatial")?;
        if let Interpolation::Lagrange(order) = opts.interpolation {
            if order < 2 || order > grid.spatial.count {
                return Err(Error::InvalidParameter(format!("Lagrange order {order} out of range")));
            }
        }
        let cols = grid
            .spatial
            .count
            .checked_pow((n - 1) as u32)
            .ok_or_else(|| Error::InvalidParameter("spatial grid too large".into()))?;
        if samples.dim() != (grid.x0.count, cols) {
            return Err(Error::InvalidParameter(format!(
                "samples have shape {:?}, grid wants ({}, {cols})",
                samples.dim(),
                grid.x0.count
            )));
        }
        if !(band_limit >= 0.0 && band_limit.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad band limit {band_limit}")));
        }
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        let required = 2.0 * band_limit;
        if grid.x0.nyquist() < required {
            return Err(Error::UnderResolved {
                nyquist: grid.x0.nyquist(),
                required,
                band: band_limit,
            });
        }
        let mut f = Self {
            cfg,
            grid,
            opts,
            band_limit,
            samples,
        };
        let spec = fft_axis0(&f.samples, false);
        let frac = band_fraction(&spec, &grid.x0.frequencies(), band_limit);
        if frac > opts.band_tolerance {
            return Err(Error::BandViolation {
                fraction: frac,
                tol: opts.band_tolerance,
                band: band_limit,
            });
        }
        f.samples = f.project(spec, band_limit);
        Ok(f)
    }

    /// Sample a closure f(x₀, x⃗).
    pub fn from_fn<F>(cfg: GroupConfig, grid: GridSpec, opts: FieldOptions, band_limit: f64, f: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64,
    {
        let n = cfg.n();
        let cols = grid.spatial_len(n);
        let mut samples = Array2::zeros((grid.x0.count, cols));
        for j in 0..cols {
            let xs = grid.spatial_coords(n, j);
            for m in 0..grid.x0.count {
                samples[[m, j]] = f(grid.x0.point(m), &xs);
            }
        }
        Self::new(cfg, grid, opts, samples, band_limit)
    }

    /// Zero the modes with |p₀| > band and transform back.
    fn project(&self, mut spec: Array2<Complex64>, band: f64) -> Array2<Complex64> {
        let freqs = self.grid.x0.frequencies();
        for (mut row, &p) in spec.outer_iter_mut().zip(&freqs) {
            if p.abs() > band {
                row.fill(ZERO);
            }
        }
        let scale = 1.0 / self.grid.x0.count as f64;
        fft_axis0(&spec, true).mapv(|z| z * scale)
    }

    fn with_samples(&self, samples: Array2<Complex64>, band: f64) -> Self {
        Self {
            samples,
            band_limit: band,
            ..self.clone()
        }
    }

    /// Re-check and project an operation's output.
    fn finish(&self, samples: Array2<Complex64>, band: f64) -> Result<Self> {
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonConvergence {
                what: "grid operation",
                estimate: f64::INFINITY,
                tol: 0.0,
            });
        }
        let spec = fft_axis0(&samples, false);
        let freqs = self.grid.x0.frequencies();
        let frac = band_fraction(&spec, &freqs, band);
        if frac > self.opts.band_tolerance {
            return Err(Error::BandViolation {
                fraction: frac,
                tol: self.opts.band_tolerance,
                band,
            });
        }
        let tight = tight_band(&spec, &freqs, band, self.opts.band_tolerance * 1e-2);
        let out = self.with_samples(self.project(spec, tight), tight);
        Ok(out)
    }

    pub fn config(&self) -> &GroupConfig {
        &self.cfg
    }
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn options(&self) -> &FieldOptions {
        &self.opts
    }
    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }
    pub fn samples(&self) -> &Array2<Complex64> {
        &self.samples
    }

    /// Copy with different options (e.g. another interpolation order).
    pub fn with_options(&self, opts: FieldOptions) -> Self {
        Self { opts, ..self.clone() }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.cfg != other.cfg || self.grid != other.grid || self.opts != other.opts {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// αf + βg.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let samples = &self.samples * alpha + &other.samples * beta;
        let band = self.band_limit.max(other.band_limit);
        Ok(self.with_samples(samples, band))
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.with_samples(&self.samples * alpha, self.band_limit)
    }

    /// Pointwise product (the commutative reference, not an algebra operation
    /// unless λ = 0).
    pub fn pointwise(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let band = self.band_limit + other.band_limit;
        self.finish(&self.samples * &other.samples, band)
    }

    /// Largest |g| on the outermost spatial samples, relative to sup|g|.
    fn boundary_fraction(&self) -> f64 {
        let n = self.cfg.n();
        let ns = self.grid.spatial.count;
        let sup = self.sup_norm();
        if sup == 0.0 {
            return 0.0;
        }
        let mut edge = 0.0f64;
        for j in 0..self.samples.ncols() {
            let mut rest = j;
            let mut on_edge = false;
            for _ in 0..n - 1 {
                let i = rest % ns;
                rest /= ns;
                if i < 2 || i + 2 >= ns {
                    on_edge = true;
                }
            }
            if on_edge {
                edge = edge.max(self.samples.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        edge / sup
    }

    /// Apply a spatial resampling matrix along every spatial axis.
    fn resample_spatial(&self, data: &Array2<Complex64>, m: &Array2<Complex64>) -> Array2<Complex64> {
        let n = self.cfg.n();
        let ns = self.grid.spatial.count;
        let mut cur = data.clone();
        for axis in 0..n - 1 {
            cur = apply_along(&cur, m, axis, n, ns);
        }
        cur
    }

    /// Multiply the x₀ spectrum by `mult(p₀)`. No band change.
    pub fn apply_multiplier<M: Fn(f64) -> Complex64>(&self, mult: M) -> Result<Self> {
        let mut spec = fft_axis0(&self.samples, false);
        for (mut row, p) in spec.outer_iter_mut().zip(self.grid.x0.frequencies()) {
            let factor = if p.abs() > self.band_limit { ZERO } else { mult(p) };
            row.mapv_inplace(|z| z * factor);
        }
        let scale = 1.0 / self.grid.x0.count as f64;
        self.finish(fft_axis0(&spec, true).mapv(|z| z * scale), self.band_limit)
    }

    /// Multiply the spectrum along spatial axis `axis` (0-based) by `mult(q)`.
    pub fn apply_spatial_multiplier<M: Fn(f64) -> Complex64>(&self, axis: usize, mult: M) -> Result<Self> {
        let n = self.cfg.n();
        if axis + 1 >= n {
            return Err(Error::InvalidParameter(format!("spatial axis {axis} out of range for n = {n}")));
        }
        let ns = self.grid.spatial.count;
        let inner = ns.pow((n - 2 - axis) as u32);
        let freqs = self.grid.spatial.frequencies();
        let mut spec = fft_spatial(&self.samples, axis, n, ns, false);
        let factors: Vec<Complex64> = freqs
            .iter()
            .enumerate()
            .map(|(q, &k)| if q == ns / 2 { ZERO } else { mult(k) })
            .collect();
        for (idx, z) in spec.as_slice_mut().expect("standard layout").iter_mut().enumerate() {
            let q = (idx / inner) % ns;
            *z *= factors[q];
        }
        let back = fft_spatial(&spec, axis, n, ns, true).mapv(|z| z / ns as f64);
        self.finish(back, self.band_limit)
    }
}

/// View data as (outer, N_s, inner) and apply m on the middle index.
fn apply_along(data: &Array2<Complex64>, m: &Array2<Complex64>, axis: usize, n: usize, ns: usize) -> Array2<Complex64> {
    let inner = ns.pow((n - 2 - axis) as u32);
    let (n0, cols) = data.dim();
    let total = n0 * cols;
    let outer = total / (ns * inner);
    let flat = data.as_standard_layout();
    let flat = flat.as_slice().expect("standard layout");
    let one = Complex64::new(1.0, 0.0);
    if inner == 1 {
        let view = ArrayView2::from_shape((outer, ns), flat).expect("shape");
        let mut out = Array2::zeros((outer, ns));
        general_mat_mul(one, &view, &m.t(), ZERO, &mut out);
        return out.into_shape_with_order((n0, cols)).expect("shape");
    }
    let mut out = vec![ZERO; total];
    for (o, chunk) in out.chunks_mut(ns * inner).enumerate() {
        let src = ArrayView2::from_shape((ns, inner), &flat[o * ns * inner..(o + 1) * ns * inner]).expect("shape");
        let mut dst = ndarray::ArrayViewMut2::from_shape((ns, inner), chunk).expect("shape");
        general_mat_mul(one, m, &src, ZERO, &mut dst);
    }
    Array2::from_shape_vec((n0, cols), out).expect("shape")
}

/// (f⋆g)(x) = ∫ e^{ip₀x₀} (ℱ₀f)(p₀, x⃗) g(x₀, e^{−λp₀}x⃗) dp₀/2π.
pub fn star_product(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.check_compatible(g)?;
    let band = f.band_limit + g.band_limit;
    if f.cfg.is_abelian() {
        return f.finish(&f.samples * &g.samples, band);
    }
    let lambda = f.cfg.lambda();
    let n0 = f.grid.x0.count;
    let freqs = f.grid.x0.frequencies();
    let fhat = fft_axis0(&f.samples, false);
    let active: Vec<usize> = (0..n0)
        .filter(|&k| freqs[k].abs() <= f.band_limit && fhat.row(k).iter().any(|z| *z != ZERO))
        .collect();
    let needs_support = active
        .iter()
        .any(|&k| (-lambda * freqs[k]).exp() > 1.0 + 1e-15);
    if needs_support {
        let frac = g.boundary_fraction();
        if frac > f.opts.support_tolerance {
            return Err(Error::SupportOverflow {
                magnitude: frac,
                tol: f.opts.support_tolerance,
            });
        }
    }
    let cols = f.samples.ncols();
    let inv_n = 1.0 / n0 as f64;
    let out = active
        .par_iter()
        .fold(
            || Array2::<Complex64>::zeros((n0, cols)),
            |mut acc, &k| {
                let (mat, _) = resample_matrix(&f.grid.spatial, (-lambda * freqs[k]).exp(), f.opts.interpolation);
                let gk = f.resample_spatial(&g.samples, &mat);
                let row = fhat.row(k);
                for m in 0..n0 {
                    let phase = Complex64::from_polar(inv_n, 2.0 * PI * ((k * m) % n0) as f64 / n0 as f64);
                    let mut out_row = acc.row_mut(m);
                    let g_row = gk.row(m);
                    for j in 0..cols {
                        out_row[j] += phase * row[j] * g_row[j];
                    }
                }
                acc
            },
        )
        .reduce(|| Array2::zeros((n0, cols)), |a, b| a + b);
    f.finish(out, band)
}

/// f*(x) = ∫ e^{ip₀x₀} (ℱ₀f̄)(p₀, e^{−λp₀}x⃗) dp₀/2π.
pub fn involution(f: &GridFunction) -> Result<GridFunction> {
    let conj = f.samples.mapv(|z| z.conj());
    if f.cfg.is_abelian() {
        return f.finish(conj, f.band_limit);
    }
    let lambda = f.cfg.lambda();
    let n0 = f.grid.x0.count;
    let freqs = f.grid.x0.frequencies();
    let mut spec = fft_axis0(&conj, false);
    for k in 0..n0 {
        if freqs[k].abs() > f.band_limit {
            spec.row_mut(k).fill(ZERO);
            continue;
        }
        let (mat, clipped) = resample_matrix(&f.grid.spatial, (-lambda * freqs[k]).exp(), f.opts.interpolation);
        if clipped && spec.row(k).iter().any(|z| *z != ZERO) {
            let frac = f.boundary_fraction();
            if frac > f.opts.support_tolerance {
                return Err(Error::SupportOverflow {
                    magnitude: frac,
                    tol: f.opts.support_tolerance,
                });
            }
        }
        let row = spec.row(k).to_owned().insert_axis(Axis(0));
        let moved = f.resample_spatial(&row, &mat);
        spec.row_mut(k).assign(&moved.row(0));
    }
    let scale = 1.0 / n0 as f64;
    f.finish(fft_axis0(&spec, true).mapv(|z| z * scale), f.band_limit)
}

/// ω(f) = ∫ f dⁿx by the trapezoidal rule on the full grid. The error
/// estimate compares with the rule on every other x₀ sample and adds the
/// boundary mass.
pub fn weight_omega(f: &GridFunction) -> WeightValue {
    let n = f.cfg.n();
    let cell = f.grid.x0.step * f.grid.spatial.step.powi((n - 1) as i32);
    let total: Complex64 = f.samples.iter().sum();
    let value = total * cell;
    let half: Complex64 = f.samples.slice(s![..;2, ..]).iter().sum::<Complex64>() * (2.0 * cell);
    let sup = f.sup_norm();
    let boundary = f.boundary_fraction() * sup * f.grid.x0.period() * f.grid.spatial.period().powi((n - 1) as i32);
    WeightValue {
        value,
        quadrature_error: (value - half).norm() + boundary + 4.0 * f64::EPSILON * cell * f.samples.iter().map(|z| z.norm()).sum::<f64>(),
    }
}

/// Fourier multiplier e^{−sλp₀}: the imaginary shift x₀ ↦ x₀ + isλ.
pub fn modular_shift(f: &GridFunction, s: f64) -> Result<GridFunction> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    let lambda = f.cfg.lambda();
    let bound = (s.abs() * lambda * f.band_limit).exp();
    if bound > f.opts.overflow_budget {
        return Err(Error::ModularOverflow {
            bound,
            budget: f.opts.overflow_budget,
        });
    }
    f.apply_multiplier(|p| Complex64::new((-s * lambda * p).exp(), 0.0))
}

/// |ω(f⋆g) − ω(σ^s(g)⋆f)| for an arbitrary twist exponent s.
pub fn twisted_trace_residual_with(f: &GridFunction, g: &GridFunction, s: f64) -> Result<f64> {
    let lhs = weight_omega(&star_product(f, g)?).value;
    let rhs = weight_omega(&star_product(&modular_shift(g, s)?, f)?).value;
    Ok((lhs - rhs).norm())
}

/// |ω(f⋆g) − ω(σ^{n−1}(g)⋆f)|.
pub fn twisted_trace_residual(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    twisted_trace_residual_with(f, g, (f.cfg.n() - 1) as f64)
}

/// |ω(f⋆g) − ω(g⋆f)|: nonzero because ω is not a trace.
pub fn untwisted_residual(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    let lhs = weight_omega(&star_product(f, g)?).value;
    let rhs = weight_omega(&star_product(g, f)?).value;
    Ok((lhs - rhs).norm())
}

/// Twisted-trace residual for each twist exponent in `exponents`.
pub fn kms_scan(f: &GridFunction, g: &GridFunction, exponents: &[f64]) -> Result<Vec<(f64, f64)>> {
    exponents
        .iter()
        .map(|&s| Ok((s, twisted_trace_residual_with(f, g, s)?)))
        .collect()
}

/// The modular flow σ_t^ω as a descriptor along x₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmsDescriptor {
    pub t: f64,
    /// σ_t f(x₀, x⃗) = f(x₀ + translation, x⃗), translation = −t(n−1)λ
    pub translation: f64,
    /// Δ_ω is the multiplier e^{modular_exponent · p₀}, modular_exponent = −(n−1)λ
    pub modular_exponent: f64,
}

impl KmsDescriptor {
    /// Multiplier e^{i p₀ · translation} realizing the translation.
    pub fn multiplier(&self, p0: f64) -> Complex64 {
        Complex64::from_polar(1.0, p0 * self.translation)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            t: self.t + other.t,
            translation: self.translation + other.translation,
            modular_exponent: self.modular_exponent,
        }
    }
}

pub fn kms_multiplier(t: f64, cfg: &GroupConfig) -> KmsDescriptor {
    let spread = (cfg.n() - 1) as f64 * cfg.lambda();
    KmsDescriptor {
        t,
        translation: -t * spread,
        modular_exponent: -spread,
    }
}

/// Apply the modular flow σ_t^ω to f.
pub fn modular_flow(f: &GridFunction, t: f64) -> Result<GridFunction> {
    let d = kms_multiplier(t, &f.cfg);
    f.apply_multiplier(|p| d.multiplier(p))
}

/// A separable Gaussian packet
/// A·exp(−(x₀−c₀)²/(2a²) + ik x₀)·Π_j exp(−(x_j−c_j)²/(2b²) + iq_j x_j),
/// with closed forms for its values and its x₀ Fourier transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub amplitude: Complex64,
    pub a: f64,
    pub c0: f64,
    pub k: f64,
    pub b: f64,
    pub centers: Vec<f64>,
    pub momenta: Vec<f64>,
}

impl GaussianPacket {
    pub fn spatial_factor(&self, xs: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((x, c), q) in xs.iter().zip(&self.centers).zip(&self.momenta) {
            acc += Complex64::new(-(x - c) * (x - c) / (2.0 * self.b * self.b), q * x);
        }
        acc.exp()
    }

    pub fn value(&self, x0: f64, xs: &[f64]) -> Complex64 {
        let t = Complex64::new(-(x0 - self.c0).powi(2) / (2.0 * self.a * self.a), self.k * x0);
        self.amplitude * t.exp() * self.spatial_factor(xs)
    }

    /// ∫ e^{−ipx₀} f(x₀, x⃗) dx₀.
    pub fn fourier0(&self, p: f64, xs: &[f64]) -> Complex64 {
        let d = p - self.k;
        let t = Complex64::new(-self.a * self.a * d * d / 2.0, -p * self.c0 + self.k * self.c0);
        self.amplitude * self.a * (2.0 * PI).sqrt() * t.exp() * self.spatial_factor(xs)
    }

    /// Band B = |k| + δ with the Gaussian tail beyond δ far below `tol`.
    pub fn band(&self, tol: f64) -> f64 {
        let x = (-2.0 * (tol * 1e-2).ln()).sqrt();
        self.k.abs() + x / self.a
    }

    pub fn sample(&self, cfg: GroupConfig, grid: GridSpec, opts: FieldOptions) -> Result<GridFunction> {
        if self.centers.len() != cfg.n() - 1 || self.momenta.len() != cfg.n() - 1 {
            return Err(Error::InvalidParameter("packet dimension does not match n".into()));
        }
        let band = self.band(opts.band_tolerance);
        GridFunction::from_fn(cfg, grid, opts, band, |x0, xs| self.value(x0, xs))
    }

    /// ∫ f dⁿx.
    pub fn integral(&self) -> Complex64 {
        let mut acc = self.amplitude * self.a * (2.0 * PI).sqrt()
            * Complex64::new(-self.a * self.a * self.k * self.k / 2.0, self.k * self.c0).exp();
        for (c, q) in self.centers.iter().zip(&self.momenta) {
            acc *= self.b * (2.0 * PI).sqrt() * Complex64::new(-self.b * self.b * q * q / 2.0, q * c).exp();
        }
        acc
    }
}

const MAGIC: &[u8; 4] = b"KGF1";

#[derive(Debug, Serialize, Deserialize)]
struct ContainerHeader {
    n: usize,
    lambda: f64,
    band_limit: f64,
    x0: Grid1d,
    spatial: Grid1d,
    layout: String,
}

const LAYOUT: &str = "row-major, axis 0 slowest, complex as (f64 re, f64 im) little-endian";

/// Serialize as `KGF1`, u32 LE header length, JSON header, then the samples.
pub fn encode(f: &GridFunction) -> Vec<u8> {
    let header = ContainerHeader {
        n: f.cfg.n(),
        lambda: f.cfg.lambda(),
        band_limit: f.band_limit,
        x0: f.grid.x0,
        spatial: f.grid.spatial,
        layout: LAYOUT.to_string(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(8 + json.len() + 16 * f.samples.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for z in f.samples.iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

/// Inverse of [`encode`]; validates everything and re-checks the band limit.
pub fn decode(bytes: &[u8], opts: FieldOptions) -> Result<GridFunction> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing KGF1 magic".into()));
    }
    let hlen = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let body = &bytes[8..];
    if hlen > body.len() {
        return Err(Error::Format("header length exceeds input".into()));
    }
    let header: ContainerHeader =
        serde_json::from_slice(&body[..hlen]).map_err(|e| Error::Format(format!("header: {e}")))?;
    if header.layout != LAYOUT {
        return Err(Error::Format(format!("unknown layout '{}'", header.layout)));
    }
    if header.n < 2 || header.n > MAX_DIMENSION {
        return Err(Error::Format(format!("dimension {} unsupported", header.n)));
    }
    let cfg = if header.lambda == 0.0 {
        GroupConfig::abelian(header.n)?
    } else {
        GroupConfig::new(header.n, header.lambda)?
    };
    let grid = GridSpec {
        x0: header.x0,
        spatial: header.spatial,
    };
    let cols = header
        .spatial
        .count
        .checked_pow((header.n - 1) as u32)
        .ok_or_else(|| Error::Format("spatial grid too large".into()))?;
    let count = header
        .x0
        .count
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("grid too large".into()))?;
    let data = &body[hlen..];
    if Some(data.len()) != count.checked_mul(16) {
        return Err(Error::Format(format!(
            "expected {count} complex samples, found {} bytes",
            data.len()
        )));
    }
    let samples: Vec<Complex64> = data
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    let samples = Array2::from_shape_vec((header.x0.count, cols), samples).map_err(|e| Error::Format(e.to_string()))?;
    GridFunction::new(cfg, grid, opts, samples, header.band_limit)
}
