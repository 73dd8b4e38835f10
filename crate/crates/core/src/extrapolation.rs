//! Weighted least-squares extrapolation on an equally spaced 1D stencil.
//!
//! A degree-`r` least-squares fit through all `R + 1` nodes gives a high-order
//! value at the target point. A global weight built from the smoothness
//! indicators of the degree-`r0` substencil interpolants blends that value
//! with the nearest nodal value:
//!
//! ```text
//! u* = w p(x*) + (1 - w) u[j0],   w = n^2 / ((sum I_k) (sum 1 / I_k))
//! ```
//!
//! `w` tends to one on smooth data and to zero when a discontinuity crosses
//! the stencil.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtrapParams {
    /// `R`: the stencil has `R + 1` nodes.
    pub stencil_degree: usize,
    /// `r`: degree of the least-squares polynomial.
    pub fit_degree: usize,
    /// `r0`: degree of the substencil interpolants used by the indicators.
    pub substencil_degree: usize,
    /// Coefficient of the indicator floor `epsilon * (1 + max u^2)`.
    pub epsilon: f64,
}

impl Default for ExtrapParams {
    fn default() -> Self {
        Self {
            stencil_degree: 8,
            fit_degree: 4,
            substencil_degree: 2,
            epsilon: 1e-14,
        }
    }
}

impl ExtrapParams {
    pub fn new(stencil_degree: usize, fit_degree: usize, substencil_degree: usize) -> Result<Self> {
        let p = Self {
            stencil_degree,
            fit_degree,
            substencil_degree,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.substencil_degree == 0 {
            return Err(Error::Config("r0 > 0 violated".into()));
        }
        if self.substencil_degree > self.fit_degree {
            return Err(Error::Config(format!(
                "r0 ≤ r violated (r0 = {}, r = {})",
                self.substencil_degree, self.fit_degree
            )));
        }
        if self.fit_degree > self.stencil_degree {
            return Err(Error::Config(format!(
                "r ≤ R violated (r = {}, R = {})",
                self.fit_degree, self.stencil_degree
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon > 0 violated ({})",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Number of substencils, `R - r0 + 1`.
    pub fn substencil_count(&self) -> usize {
        self.stencil_degree - self.substencil_degree + 1
    }

    /// Parameters for a shorter stencil of `nodes` points, with the fit and
    /// substencil degrees reduced as needed. `None` below three nodes.
    pub fn shrunk(&self, nodes: usize) -> Option<Self> {
        if nodes < 3 {
            return None;
        }
        let stencil_degree = nodes - 1;
        if stencil_degree >= self.stencil_degree {
            return Some(*self);
        }
        let fit_degree = self.fit_degree.min(stencil_degree);
        let substencil_degree = self.substencil_degree.min(fit_degree);
        Some(Self {
            stencil_degree,
            fit_degree,
            substencil_degree,
            epsilon: self.epsilon,
        })
    }
}

/// Nodal data `u_j` at `x_j = x0 + j h` and the evaluation point `x_star`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapStencil {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub x_star: f64,
}

impl ExtrapStencil {
    pub fn new(x0: f64, h: f64, values: Vec<f64>, x_star: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!(
                "stencil spacing must be positive, got {h}"
            )));
        }
        if values.is_empty() {
            return Err(Error::Domain("empty extrapolation stencil".into()));
        }
        if values.iter().any(|v| !v.is_finite()) || !x0.is_finite() || !x_star.is_finite() {
            return Err(Error::Domain("non-finite extrapolation input".into()));
        }
        Ok(Self {
            x0,
            h,
            values,
            x_star,
        })
    }

    pub fn node(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h
    }

    fn check(&self, params: &ExtrapParams) -> Result<()> {
        params.validate()?;
        if self.values.len() != params.stencil_degree + 1 {
            return Err(Error::Domain(format!(
                "stencil has {} values, R = {} needs {}",
                self.values.len(),
                params.stencil_degree,
                params.stencil_degree + 1
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapolationResult {
    pub u_star: f64,
    pub omega: f64,
    pub indicators: Vec<f64>,
    pub j0: usize,
}

/// Polynomial `sum c_m ((x - origin) / scale)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub origin: f64,
    pub scale: f64,
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, (x - self.origin) / self.scale)
    }

    /// Derivative with respect to `x`.
    pub fn derivative(&self) -> Polynomial {
        let coeffs = if self.coeffs.len() <= 1 {
            vec![0.0]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, c)| m as f64 * c / self.scale)
                .collect()
        };
        Polynomial { coeffs, ..*self }
    }

    /// Coefficients in powers of the absolute coordinate `x`.
    pub fn monomial_coefficients(&self) -> Vec<f64> {
        // expand c_m (x/s - o/s)^m binomially
        let n = self.coeffs.len();
        let a = 1.0 / self.scale;
        let b = -self.origin / self.scale;
        let mut out = vec![0.0; n];
        for (m, c) in self.coeffs.iter().enumerate() {
            let mut binom = 1.0;
            for (q, o) in out.iter_mut().enumerate().take(m + 1) {
                *o += c * binom * a.powi(q as i32) * b.powi((m - q) as i32);
                binom = binom * (m - q) as f64 / (q + 1) as f64;
            }
        }
        out
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Index of the stencil node closest to `x_star`; ties go to the smaller index.
pub fn nearest_index(stencil: &ExtrapStencil) -> usize {
    nearest_index_at(
        (stencil.x_star - stencil.x0) / stencil.h,
        stencil.values.len(),
    )
}

fn nearest_index_at(t: f64, len: usize) -> usize {
    let j = (t - 0.5).ceil();
    j.clamp(0.0, (len - 1) as f64) as usize
}

/// Degree-`r0` interpolant of nodes `k ..= k + r0`, in the local coordinate
/// `(x - x_k) / h`.
pub fn substencil_interpolant(stencil: &ExtrapStencil, k: usize, r0: usize) -> Result<Polynomial> {
    if k + r0 >= stencil.values.len() {
        return Err(Error::Domain(format!(
            "substencil {k}..={} exceeds the {} stencil nodes",
            k + r0,
            stencil.values.len()
        )));
    }
    let n = r0 + 1;
    let vander = DMatrix::from_fn(n, n, |i, m| (i as f64).powi(m as i32));
    let rhs = DVector::from_column_slice(&stencil.values[k..k + n]);
    let coeffs = vander
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Domain("singular substencil Vandermonde system".into()))?;
    Ok(Polynomial {
        origin: stencil.node(k),
        scale: stencil.h,
        coeffs: coeffs.iter().copied().collect(),
    })
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_integral(c: &[f64], lo: f64, hi: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(m, c)| {
            let e = (m + 1) as i32;
            c * (hi.powi(e) - lo.powi(e)) / e as f64
        })
        .sum()
}

fn poly_derivative_local(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| m as f64 * c)
        .collect()
}

/// `(1/r) sum_l int h^(2l-1) (p^(l))^2 dx` over `[x_0, x_r]`, evaluated
/// exactly in the local coordinate of the interpolant. The powers of `h`
/// cancel the chain-rule factors.
fn raw_indicator(local_coeffs: &[f64], k: usize, params: &ExtrapParams) -> f64 {
    let lo = -(k as f64);
    let hi = params.fit_degree as f64 - k as f64;
    let mut d = local_coeffs.to_vec();
    let mut sum = 0.0;
    for _ in 1..=params.substencil_degree {
        d = poly_derivative_local(&d);
        sum += poly_integral(&poly_mul(&d, &d), lo, hi);
    }
    sum / params.fit_degree as f64
}

fn indicator_floor(values: &[f64], params: &ExtrapParams) -> f64 {
    let max_sq = values.iter().fold(0.0f64, |m, v| m.max(v * v));
    params.epsilon * (1.0 + max_sq)
}

/// Smoothness indicators `I_k`, `0 <= k <= R - r0`, after flooring.
pub fn smoothness_indicators(stencil: &ExtrapStencil, params: &ExtrapParams) -> Result<Vec<f64>> {
    stencil.check(params)?;
    let floor = indicator_floor(&stencil.values, params);
    (0..params.substencil_count())
        .map(|k| {
            // the indicator only sees derivatives, so drop the constant first
            let base = stencil.values[k];
            let local = ExtrapStencil {
                values: stencil.values.iter().map(|u| u - base).collect(),
                ..stencil.clone()
            };
            let p = substencil_interpolant(&local, k, params.substencil_degree)?;
            Ok(raw_indicator(&p.coeffs, k, params).max(floor))
        })
        .collect()
}

/// `n^2 / ((sum I_k) (sum 1/I_k))`, in `(0, 1]` for positive indicators.
pub fn global_weight(indicators: &[f64]) -> f64 {
    // With d_k = I_k / mean(I) - 1 the weight is 1 / (1 + q) where
    // q = mean(d^2 / (1 + d)) - mean(d) mean(d / (1 + d)) >= 0. Every term of
    // q is second order in the spread of the indicators, so indicators that
    // agree up to rounding give exactly one.
    let n = indicators.len() as f64;
    let mean = indicators.iter().sum::<f64>() / n;
    let mut mean_d = 0.0;
    let mut mean_ratio = 0.0;
    let mut mean_sq = 0.0;
    for i in indicators {
        let d = (i - mean) / mean;
        let a = i / mean;
        mean_d += d;
        mean_ratio += d / a;
        mean_sq += d * d / a;
    }
    let q = (mean_sq - mean_d * mean_ratio / n) / n;
    1.0 / (1.0 + q.max(0.0))
}

/// Least-squares polynomial of degree `r` in `(x - x_star) / h`.
pub fn least_squares_fit(stencil: &ExtrapStencil, r: usize) -> Result<Polynomial> {
    let n = stencil.values.len();
    if r >= n {
        return Err(Error::Domain(format!(
            "fit degree {r} needs more than {n} nodes"
        )));
    }
    let vander = local_vandermonde(n, (stencil.x_star - stencil.x0) / stencil.h, r);
    let qr = vander.qr();
    let rhs = qr.q().transpose() * DVector::from_column_slice(&stencil.values);
    let coeffs = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Domain("rank-deficient least-squares system".into()))?;
    Ok(Polynomial {
        origin: stencil.x_star,
        scale: stencil.h,
        coeffs: coeffs.iter().copied().collect(),
    })
}

/// Rows `(xi_i^0, ..., xi_i^r)` with `xi_i = i - t_star`.
fn local_vandermonde(n: usize, t_star: f64, r: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, r + 1, |i, m| (i as f64 - t_star).powi(m as i32))
}

pub fn extrapolate(stencil: &ExtrapStencil, params: &ExtrapParams) -> Result<ExtrapolationResult> {
    stencil.check(params)?;
    let indicators = smoothness_indicators(stencil, params)?;
    let omega = global_weight(&indicators);
    let j0 = nearest_index(stencil);
    let anchor = stencil.values[j0];
    // Fit the deviations from the nearest value: least squares reproduces
    // constants, so this is the same polynomial shifted by `anchor`, and
    // constant data comes back bit-exact.
    let deviations = ExtrapStencil {
        values: stencil.values.iter().map(|u| u - anchor).collect(),
        ..stencil.clone()
    };
    let fit = least_squares_fit(&deviations, params.fit_degree)?;
    let u_star = anchor + omega * fit.eval(stencil.x_star);
    Ok(ExtrapolationResult {
        u_star,
        omega,
        indicators,
        j0,
    })
}

/// Extrapolation with the geometry-dependent parts precomputed.
///
/// For a fixed relative target position the fitted value is a fixed linear
/// functional of the data and every indicator a fixed quadratic form of its
/// substencil values, so repeated application costs a few dot products.
#[derive(Clone, Debug)]
pub struct ExtrapPlan {
    params: ExtrapParams,
    fit_weights: Vec<f64>,
    /// Quadratic form of each substencil indicator, row-major `(r0+1)^2`.
    forms: Vec<Vec<f64>>,
    j0: usize,
}

impl ExtrapPlan {
    /// Plan for a stencil whose target lies at `t_star` node spacings from
    /// the first node.
    pub fn new(t_star: f64, params: ExtrapParams) -> Result<Self> {
        params.validate()?;
        if params.substencil_count() > 32 {
            return Err(Error::Config("at most 32 substencils are supported".into()));
        }
        let n = params.stencil_degree + 1;
        let r = params.fit_degree;
        let qr = local_vandermonde(n, t_star, r).qr();
        // p(x*) = e0' R^-1 Q' u  =>  weights = Q R^-T e0
        let mut e0 = DVector::zeros(r + 1);
        e0[0] = 1.0;
        let z = qr
            .r()
            .transpose()
            .solve_lower_triangular(&e0)
            .ok_or_else(|| Error::Domain("rank-deficient least-squares system".into()))?;
        let fit_weights: Vec<f64> = (qr.q() * z).iter().copied().collect();

        let m = params.substencil_degree + 1;
        let vander = DMatrix::from_fn(m, m, |i, q| (i as f64).powi(q as i32));
        let inv = vander
            .try_inverse()
            .ok_or_else(|| Error::Domain("singular substencil Vandermonde system".into()))?;
        // column a of `inv` holds the coefficients of the a-th Lagrange basis polynomial
        let basis: Vec<Vec<f64>> = (0..m)
            .map(|a| inv.column(a).iter().copied().collect())
            .collect();
        let forms = (0..params.substencil_count())
            .map(|k| {
                let mut form = vec![0.0; m * m];
                for a in 0..m {
                    for b in a..m {
                        let v = bilinear_indicator(&basis[a], &basis[b], k, &params);
                        form[a * m + b] = v;
                        form[b * m + a] = v;
                    }
                }
                form
            })
            .collect();
        Ok(Self {
            params,
            fit_weights,
            forms,
            j0: nearest_index_at(t_star, n),
        })
    }

    pub fn params(&self) -> &ExtrapParams {
        &self.params
    }

    pub fn nearest(&self) -> usize {
        self.j0
    }

    /// Fitted value `p(x*)` alone.
    pub fn fit_value(&self, values: &[f64]) -> f64 {
        self.fit_weights
            .iter()
            .zip(values)
            .map(|(w, u)| w * u)
            .sum()
    }

    /// Returns `(u_star, omega)`.
    pub fn apply(&self, values: &[f64]) -> (f64, f64) {
        debug_assert_eq!(values.len(), self.fit_weights.len());
        let m = self.params.substencil_degree + 1;
        let floor = indicator_floor(values, &self.params);
        let mut indicators = [0.0; 32];
        let count = self.forms.len();
        for (k, form) in self.forms.iter().enumerate() {
            // constants lie in the kernel of every form; work with differences
            let u = &values[k..k + m];
            let base = u[0];
            let mut ik = 0.0;
            for a in 1..m {
                let row = &form[a * m..(a + 1) * m];
                let inner: f64 = (1..m).map(|b| row[b] * (u[b] - base)).sum();
                ik += (u[a] - base) * inner;
            }
            indicators[k] = ik.max(floor);
        }
        let omega = global_weight(&indicators[..count]);
        let anchor = values[self.j0];
        let deviation: f64 = self
            .fit_weights
            .iter()
            .zip(values)
            .map(|(w, u)| w * (u - anchor))
            .sum();
        (anchor + omega * deviation, omega)
    }
}

fn bilinear_indicator(a: &[f64], b: &[f64], k: usize, params: &ExtrapParams) -> f64 {
    let lo = -(k as f64);
    let hi = params.fit_degree as f64 - k as f64;
    let mut da = a.to_vec();
    let mut db = b.to_vec();
    let mut sum = 0.0;
    for _ in 1..=params.substencil_degree {
        da = poly_derivative_local(&da);
        db = poly_derivative_local(&db);
        sum += poly_integral(&poly_mul(&da, &db), lo, hi);
    }
    sum / params.fit_degree as f64
}
