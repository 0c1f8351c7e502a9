//! Integral kernels of a profile, their envelopes, and the Lipschitz constants
//! behind the contraction functions.
//!
//! For a profile `f` on `[0, lambda]`:
//!
//! ```text
//! U(z) = exp(2 int_0^z mu*(f)/L*(f))      I(z) = exp(2 int_0^z s N*(f)/L*(f) ds)
//! E(z) = U(z) / I(z)                      Phi(z) = int_0^z E / L*(f)
//! ```
//!
//! All integrals are cumulative composite trapezoid sums on the profile grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use libm::erf;

use crate::coefficients::{DimensionlessProblem, ProblemConstants};
use crate::error::{positive, Error, Result};
use crate::quadrature::cumulative_trapezoid;

/// Exponents above this abort kernel evaluation instead of overflowing.
pub const EXPONENT_GUARD: f64 = 700.0;

pub const DEFAULT_GRID: usize = 512;

/// Profile values on `n + 1` uniform nodes of `[0, lambda]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub lambda: f64,
    pub f: Vec<f64>,
}

impl ProfileGrid {
    pub fn new(lambda: f64, f: Vec<f64>) -> Result<Self> {
        positive("lambda", lambda)?;
        if f.len() < 3 {
            return Err(Error::InvalidInput(format!("profile grid needs at least 3 nodes, got {}", f.len())));
        }
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { quantity: "profile", node: i, xi: lambda * i as f64 / (f.len() - 1) as f64 });
        }
        Ok(Self { lambda, f })
    }

    /// Samples `g(xi)` on `n` intervals.
    pub fn from_fn(lambda: f64, n: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let h = lambda / n as f64;
        Self::new(lambda, (0..=n).map(|i| g(h * i as f64)).collect())
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.f.len() - 1
    }

    pub fn step(&self) -> f64 {
        self.lambda / self.n() as f64
    }

    pub fn xi(&self, i: usize) -> f64 {
        if i == self.n() {
            self.lambda
        } else {
            self.step() * i as f64
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.f.len()).map(|i| self.xi(i))
    }

    /// The same values on a grid over a different front position.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.f.clone())
    }

    pub fn max_distance(&self, other: &ProfileGrid) -> f64 {
        self.f.iter().zip(&other.f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Slope at the front from the three-point one-sided difference.
    pub fn front_slope(&self) -> f64 {
        let n = self.n();
        (3.0 * self.f[n] - 4.0 * self.f[n - 1] + self.f[n - 2]) / (2.0 * self.step())
    }
}

/// Node-wise kernel values aligned with a [`ProfileGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub u: Vec<f64>,
    pub i: Vec<f64>,
    pub e: Vec<f64>,
    pub phi: Vec<f64>,
    /// `L*(f)` at each node; kept because the operators and `V` need it.
    pub l: Vec<f64>,
}

impl KernelEval {
    pub fn phi_front(&self) -> f64 {
        self.phi[self.phi.len() - 1]
    }
    pub fn e_front(&self) -> f64 {
        self.e[self.e.len() - 1]
    }
    pub fn l_front(&self) -> f64 {
        self.l[self.l.len() - 1]
    }
}

pub fn eval_kernels(profile: &ProfileGrid, prob: &DimensionlessProblem) -> Result<KernelEval> {
    let len = profile.f.len();
    let h = profile.step();
    let mut l = Vec::with_capacity(len);
    let mut a = Vec::with_capacity(len);
    let mut b = Vec::with_capacity(len);
    for (i, &fi) in profile.f.iter().enumerate() {
        let xi = profile.xi(i);
        let (li, ni, mi) = (prob.l(fi), prob.n(fi), prob.mu(fi));
        for (quantity, v) in [("L*", li), ("N*", ni)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonFinite { quantity, node: i, xi });
            }
        }
        if !mi.is_finite() {
            return Err(Error::NonFinite { quantity: "mu*", node: i, xi });
        }
        l.push(li);
        a.push(2.0 * mi / li);
        b.push(2.0 * xi * ni / li);
    }
    let mut log_u = vec![0.0; len];
    let mut log_i = vec![0.0; len];
    cumulative_trapezoid(&a, h, &mut log_u);
    cumulative_trapezoid(&b, h, &mut log_i);
    for (kernel, logs) in [("U", &log_u), ("I", &log_i)] {
        if let Some(node) = logs.iter().position(|x| x.abs() > EXPONENT_GUARD) {
            return Err(Error::KernelOverflow { kernel, node, xi: profile.xi(node), exponent: logs[node] });
        }
    }
    let u: Vec<f64> = log_u.iter().map(|x| x.exp()).collect();
    let i: Vec<f64> = log_i.iter().map(|x| x.exp()).collect();
    let e: Vec<f64> = log_u.iter().zip(&log_i).map(|(p, q)| (p - q).exp()).collect();
    let integrand: Vec<f64> = e.iter().zip(&l).map(|(e, l)| e / l).collect();
    let mut phi = vec![0.0; len];
    cumulative_trapezoid(&integrand, h, &mut phi);
    Ok(KernelEval { u, i, e, phi, l })
}

/// Node-wise envelopes of the four kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBounds {
    pub xi: Vec<f64>,
    pub u_lower: Vec<f64>,
    pub u_upper: Vec<f64>,
    pub i_lower: Vec<f64>,
    pub i_upper: Vec<f64>,
    pub e_lower: Vec<f64>,
    pub e_upper: Vec<f64>,
    pub phi_lower: Vec<f64>,
    pub phi_upper: Vec<f64>,
    /// The exponential `Phi` upper bound needs `mu_M > 0`; otherwise the
    /// direct bound `z / L_m` is used and this is set.
    pub phi_upper_substituted: bool,
}

/// Scalar envelopes at a single `z >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub u: (f64, f64),
    pub i: (f64, f64),
    pub e: (f64, f64),
    pub phi: (f64, f64),
}

/// Envelopes at `z`. The `I` lower bound is taken as 1 and the `U` lower
/// bound uses `mu_m / L_M`.
pub fn envelope_at(z: f64, c: &ProblemConstants) -> Envelope {
    let drift_hi = 2.0 * c.mu_max * z / c.l_min;
    let drift_lo = 2.0 * c.mu_min * z / c.l_max;
    let spread_hi = c.n_max * z * z / c.l_min;
    let spread_lo = c.n_min * z * z / c.l_max;
    let a = (c.n_max / c.l_min).sqrt();
    let phi_lower = 0.5 * PI.sqrt() * c.l_min.sqrt() / (c.l_max * c.n_max.sqrt()) * erf(a * z);
    let phi_upper = if c.mu_max > 0.0 { drift_hi.exp() / (2.0 * c.mu_max) } else { z / c.l_min };
    Envelope {
        u: (drift_lo.exp(), drift_hi.exp()),
        i: (1.0, spread_hi.exp()),
        e: ((drift_lo - spread_hi).exp(), (drift_hi - spread_lo).exp()),
        phi: (phi_lower, phi_upper),
    }
}

pub fn kernel_bounds(lambda: f64, n: usize, prob: &DimensionlessProblem) -> Result<KernelBounds> {
    positive("lambda", lambda)?;
    let c = prob.constants();
    let h = lambda / n as f64;
    let mut out = KernelBounds {
        xi: Vec::with_capacity(n + 1),
        u_lower: Vec::with_capacity(n + 1),
        u_upper: Vec::with_capacity(n + 1),
        i_lower: Vec::with_capacity(n + 1),
        i_upper: Vec::with_capacity(n + 1),
        e_lower: Vec::with_capacity(n + 1),
        e_upper: Vec::with_capacity(n + 1),
        phi_lower: Vec::with_capacity(n + 1),
        phi_upper: Vec::with_capacity(n + 1),
        phi_upper_substituted: c.mu_max <= 0.0,
    };
    for j in 0..=n {
        let z = if j == n { lambda } else { h * j as f64 };
        let env = envelope_at(z, c);
        out.xi.push(z);
        out.u_lower.push(env.u.0);
        out.u_upper.push(env.u.1);
        out.i_lower.push(env.i.0);
        out.i_upper.push(env.i.1);
        out.e_lower.push(env.e.0);
        out.e_upper.push(env.e.1);
        out.phi_lower.push(env.phi.0);
        out.phi_upper.push(env.phi.1);
    }
    Ok(out)
}

/// Lipschitz constants of `U`, `I`, `E`, `Phi` with respect to the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConstants {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    /// Radiative flux term only.
    pub d5: Option<f64>,
}

pub fn lipschitz_constants(z: f64, prob: &DimensionlessProblem) -> Result<LipschitzConstants> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidParameter { name: "z", value: z, reason: "must be finite and non-negative" });
    }
    let mut d = lipschitz_from_constants(z, prob.constants());
    d.d5 = prob.strategy().d5();
    Ok(d)
}

/// `D1..D4` from the problem constants.
///
/// `D1` carries `exp(2 mu_M max(1, z) / L_m)`: the drift growth of `U` on
/// `[0, z]` is `exp(2 mu_M z / L_m)`, and the constant form `exp(2 mu_M / L_m)`
/// only dominates it for `z <= 1`.
pub fn lipschitz_from_constants(z: f64, c: &ProblemConstants) -> LipschitzConstants {
    let l2 = c.l_min * c.l_min;
    let spread = (c.n_max * z * z / c.l_min).exp();
    let drift = (2.0 * c.mu_max * z / c.l_min).exp();
    let d1 = 2.0 * (2.0 * c.mu_max * z.max(1.0) / c.l_min).exp() / l2 * z * (c.mu_max * c.l_lip + c.l_min * c.mu_lip);
    let d2 = spread / l2 * z * z * (c.n_max * c.l_lip + c.l_min * c.n_lip);
    let d3 = spread * d1 + drift * d2;
    let d4 = (c.l_lip * drift + c.l_min * d3) / l2;
    LipschitzConstants { d1, d2, d3, d4, d5: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Dirichlet;
    use std::sync::Arc;

    fn dirichlet() -> Arc<Dirichlet> {
        Arc::new(Dirichlet::new(1.0).unwrap())
    }

    /// Independent kernel oracle: direct trapezoid with `m` sub-intervals per
    /// grid cell, profile linearly interpolated, written without the shared
    /// quadrature helper.
    fn refined_oracle(prob: &DimensionlessProblem, lambda: f64, f: impl Fn(f64) -> f64, n: usize, m: usize) -> Vec<[f64; 4]> {
        let fine = n * m;
        let h = lambda / fine as f64;
        let (mut au, mut ai, mut phi) = (0.0f64, 0.0f64, 0.0f64);
        let point = |x: f64| {
            let v = f(x);
            let l = prob.l(v);
            (2.0 * prob.mu(v) / l, 2.0 * x * prob.n(v) / l, l)
        };
        let mut prev = point(0.0);
        let mut prev_e = 1.0 / prev.2;
        let mut out = vec![[1.0, 1.0, 1.0, 0.0]];
        for k in 1..=fine {
            let cur = point(h * k as f64);
            au += 0.5 * h * (prev.0 + cur.0);
            ai += 0.5 * h * (prev.1 + cur.1);
            let e = (au - ai).exp();
            let cur_e = e / cur.2;
            phi += 0.5 * h * (prev_e + cur_e);
            if k % m == 0 {
                out.push([au.exp(), ai.exp(), e, phi]);
            }
            prev = cur;
            prev_e = cur_e;
        }
        out
    }

    #[test]
    fn node_zero_is_trivial() {
        let prob = DimensionlessProblem::linear(0.3, 0.2, 0.7, dirichlet()).unwrap();
        let grid = ProfileGrid::from_fn(0.9, 64, |x| (x / 0.9).powi(2)).unwrap();
        let k = eval_kernels(&grid, &prob).unwrap();
        assert_eq!((k.u[0], k.i[0], k.e[0], k.phi[0]), (1.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn constant_pe_zero_matches_error_function() {
        let prob = DimensionlessProblem::constant(0.0, dirichlet()).unwrap();
        let grid = ProfileGrid::from_fn(1.0, 4096, |x| x).unwrap();
        let k = eval_kernels(&grid, &prob).unwrap();
        for (j, xi) in grid.nodes().enumerate() {
            assert!((k.e[j] - (-xi * xi).exp()).abs() < 1e-13);
            assert!((k.phi[j] - 0.5 * PI.sqrt() * erf(xi)).abs() < 1e-8, "node {j}");
        }
    }

    #[test]
    fn linear_family_matches_refined_oracle() {
        let prob = DimensionlessProblem::linear(0.1, 0.1, 0.5, dirichlet()).unwrap();
        let lambda = 0.5;
        let n = 4096;
        let grid = ProfileGrid::from_fn(lambda, n, |x| x / lambda).unwrap();
        let k = eval_kernels(&grid, &prob).unwrap();
        let oracle = refined_oracle(&prob, lambda, |x| x / lambda, n, 10);
        for (j, o) in oracle.iter().enumerate() {
            assert!((k.u[j] - o[0]).abs() < 1e-8);
            assert!((k.i[j] - o[1]).abs() < 1e-8);
            assert!((k.e[j] - o[2]).abs() < 1e-8);
            assert!((k.phi[j] - o[3]).abs() < 1e-8, "node {j}: {} vs {}", k.phi[j], o[3]);
        }
    }

    #[test]
    fn phi_refinement_is_second_order() {
        let prob = DimensionlessProblem::linear(0.2, 0.3, 0.4, dirichlet()).unwrap();
        let lambda = 0.8;
        let end = |n: usize| {
            let g = ProfileGrid::from_fn(lambda, n, |x| (x / lambda) * (2.0 - x / lambda)).unwrap();
            eval_kernels(&g, &prob).unwrap().phi_front()
        };
        let (a, b, c) = (end(64), end(128), end(256));
        let ratio = (a - b) / (b - c);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn overflow_is_reported_with_node() {
        let prob = DimensionlessProblem::constant(0.0, dirichlet()).unwrap();
        let grid = ProfileGrid::from_fn(30.0, 300, |x| x / 30.0).unwrap();
        match eval_kernels(&grid, &prob) {
            Err(Error::KernelOverflow { kernel: "I", node, exponent, .. }) => {
                assert!(exponent > EXPONENT_GUARD);
                assert!(grid.xi(node) > 26.0);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn constant_pe_one_envelopes_collapse() {
        let prob = DimensionlessProblem::constant(1.0, dirichlet()).unwrap();
        let b = kernel_bounds(1.5, 30, &prob).unwrap();
        let grid = ProfileGrid::from_fn(1.5, 30, |x| x / 1.5).unwrap();
        let k = eval_kernels(&grid, &prob).unwrap();
        for (j, &z) in b.xi.iter().enumerate() {
            let exact = (2.0 * z - z * z).exp();
            assert!((b.e_lower[j] - exact).abs() < 1e-12 && (b.e_upper[j] - exact).abs() < 1e-12);
            assert!(b.e_lower[j] - 1e-12 <= k.e[j] && k.e[j] <= b.e_upper[j] + 1e-12);
        }
    }

    #[test]
    fn envelopes_at_origin() {
        let prob = DimensionlessProblem::linear(0.1, 0.2, 0.3, dirichlet()).unwrap();
        let env = envelope_at(0.0, prob.constants());
        assert_eq!(env.u, (1.0, 1.0));
        assert_eq!(env.i, (1.0, 1.0));
        assert_eq!(env.e, (1.0, 1.0));
        assert_eq!(env.phi.0, 0.0);
    }

    #[test]
    fn linear_family_envelopes_are_ordered() {
        let prob = DimensionlessProblem::linear(0.1, 0.1, 0.5, dirichlet()).unwrap();
        let b = kernel_bounds(0.8, 128, &prob).unwrap();
        for j in 0..b.xi.len() {
            assert!(b.u_upper[j] >= b.u_lower[j]);
            assert!(b.i_upper[j] >= b.i_lower[j]);
            assert!(b.e_upper[j] >= b.e_lower[j]);
            assert!(b.phi_upper[j] >= b.phi_lower[j]);
        }
        assert!(!b.phi_upper_substituted);
    }

    #[test]
    fn zero_drift_substitutes_direct_phi_bound() {
        let prob = DimensionlessProblem::linear(0.0, 0.2, 0.0, dirichlet()).unwrap();
        let b = kernel_bounds(0.6, 12, &prob).unwrap();
        assert!(b.phi_upper_substituted);
        assert!((b.phi_upper[12] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn constant_coefficients_have_zero_lipschitz_constants() {
        let prob = DimensionlessProblem::constant(0.8, dirichlet()).unwrap();
        let d = lipschitz_constants(1.3, &prob).unwrap();
        assert_eq!((d.d1, d.d2, d.d3, d.d4), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(d.d5, None);
    }

    #[test]
    fn linear_family_d1_matches_direct_formula() {
        let prob = DimensionlessProblem::linear(0.1, 0.1, 0.5, dirichlet()).unwrap();
        let z: f64 = 0.5;
        let (mu_m, mu_lip, beta) = (0.55f64, 0.05, 0.1);
        let expected = 2.0 * (2.0 * mu_m).exp() * z * (mu_m * beta + mu_lip);
        let d = lipschitz_constants(z, &prob).unwrap();
        assert!((d.d1 - expected).abs() < 1e-14);
        let d2 = (1.1 * z * z).exp() * z * z * (1.1 * 0.1 + 0.1);
        assert!((d.d2 - d2).abs() < 1e-14);
        let d3 = (1.1 * z * z).exp() * expected + (1.1 * z).exp() * d2;
        assert!((d.d3 - d3).abs() < 1e-13);
        assert!((d.d4 - (0.1 * (1.1 * z).exp() + d3)).abs() < 1e-13);
    }

    proptest::proptest! {
        #[test]
        fn d4_is_monotone(a in 0.0f64..3.0, b in 0.0f64..3.0, alpha in 0.0f64..0.5, beta in 0.0f64..0.5, pe in 0.0f64..1.0) {
            let prob = DimensionlessProblem::linear(alpha, beta, pe, dirichlet()).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let d_lo = lipschitz_constants(lo, &prob).unwrap();
            let d_hi = lipschitz_constants(hi, &prob).unwrap();
            proptest::prop_assert!(d_lo.d4 <= d_hi.d4 * (1.0 + 1e-14));
            proptest::prop_assert!(d_lo.d1 <= d_hi.d1 * (1.0 + 1e-14));
        }
    }
}
