//! Independent oracles shared by the integration tests.
//!
//! Nothing here goes through the library's superoperator, propagator,
//! quadrature or optimizer: the master equation is written in operator form,
//! integrated with an adaptive Dormand–Prince scheme, and the classical
//! correlation is brute-forced with explicit projectors.

#![allow(dead_code)]

use std::f64::consts::PI;

use cascade_discord::linalg::{C64, Op4};
use cascade_discord::DotParams;
use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const HBAR: f64 = 0.6582119569;
pub const KB: f64 = 86.17333;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn op(i: usize, j: usize) -> Op4 {
    let mut m = Op4::zeros();
    m[(i, j)] = c(1.0);
    m
}

pub fn to_dyn(m: &Op4) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

pub fn from_dyn(m: &DMatrix<C64>) -> Op4 {
    Op4::from_fn(|i, j| m[(i, j)])
}

/// Hamiltonian and jump operators of the cascade, rebuilt from scratch.
pub struct Model {
    pub h: Op4,
    pub jumps: Vec<Op4>,
    decay: Op4,
}

impl Model {
    pub fn new(p: &DotParams) -> Self {
        let n_b = if p.temperature == 0.0 {
            0.0
        } else {
            1.0 / ((p.splitting / (KB * p.temperature)).exp() - 1.0)
        };
        let kappa = p.kappa_ref * (p.splitting / p.splitting_ref).powi(3);
        let h = op(2, 2) * c(p.splitting);
        let jumps = vec![
            op(2, 3) * c(p.gamma_xx_h.sqrt()),
            op(1, 3) * c(p.gamma_xx_v.sqrt()),
            op(0, 2) * c(p.gamma_x_h.sqrt()),
            op(0, 1) * c(p.gamma_x_v.sqrt()),
            op(2, 1) * c((kappa * n_b).sqrt()),
            op(1, 2) * c((kappa * (n_b + 1.0)).sqrt()),
        ];
        let decay = jumps.iter().map(|a| a.adjoint() * a).sum::<Op4>() * c(0.5);
        Model { h, jumps, decay }
    }

    /// `dX/dt = −(i/ħ)[H, X] + Σ (A X A† − ½{A†A, X})`.
    pub fn rhs(&self, x: &Op4) -> Op4 {
        let mut out = (self.h * x - x * self.h) * C64::new(0.0, -1.0 / HBAR) - self.decay * x - x * self.decay;
        for a in &self.jumps {
            out += a * x * a.adjoint();
        }
        out
    }
}

fn max_abs(m: &Op4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Adaptive Dormand–Prince 5(4) integration of `dX/dt = f(X)` from 0 to `t`.
pub fn dopri<F>(f: F, x0: &Op4, t: f64, rtol: f64, atol: f64) -> Op4
where
    F: Fn(&Op4) -> Op4,
{
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut x = *x0;
    if t == 0.0 {
        return x;
    }
    let mut now = 0.0;
    let mut h = (t / 100.0).min(0.01);
    let mut k1 = f(&x);
    while now < t {
        h = h.min(t - now);
        let mut k = [k1; 7];
        for (i, row) in A.iter().enumerate() {
            let mut y = x;
            for (j, a) in row.iter().enumerate().take(i + 1) {
                if *a != 0.0 {
                    y += k[j] * c(h * a);
                }
            }
            k[i + 1] = f(&y);
        }
        // k[6] is f at the fifth-order solution (FSAL)
        let mut y5 = x;
        for (j, a) in A[5].iter().enumerate() {
            y5 += k[j] * c(h * a);
        }
        let mut err = Op4::zeros();
        for (j, e) in E.iter().enumerate() {
            err += k[j] * c(h * e);
        }
        let scale = atol + rtol * max_abs(&x).max(max_abs(&y5));
        let ratio = max_abs(&err) / scale;
        if ratio <= 1.0 {
            now += h;
            x = y5;
            k1 = k[6];
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    x
}

pub fn random_params(rng: &mut ChaCha8Rng) -> DotParams {
    DotParams {
        splitting: rng.random_range(0.1..10.0),
        temperature: if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.5..100.0) },
        gamma_x_h: rng.random_range(0.2..2.0),
        gamma_x_v: rng.random_range(0.2..2.0),
        gamma_xx_h: rng.random_range(0.5..3.0),
        gamma_xx_v: rng.random_range(0.5..3.0),
        kappa_ref: rng.random_range(1e-4..0.05),
        splitting_ref: 2.5,
        ..DotParams::default()
    }
}

pub fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Hilbert–Schmidt distributed two-qubit state.
pub fn random_state(rng: &mut ChaCha8Rng) -> Op4 {
    let g = ginibre(rng, 4);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    Op4::from_fn(|i, j| rho[(i, j)] / tr)
}

/// Keeps only the X-pattern entries; a pinching, so positivity survives.
pub fn x_project(m: &Op4) -> Op4 {
    Op4::from_fn(|i, j| if i == j || i + j == 3 { m[(i, j)] } else { c(0.0) })
}

/// Haar-random 2×2 unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary(rng: &mut ChaCha8Rng) -> [[C64; 2]; 2] {
    let g = ginibre(rng, 2);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = [[c(0.0); 2]; 2];
    for j in 0..2 {
        let phase = r[(j, j)] / r[(j, j)].norm();
        for i in 0..2 {
            u[i][j] = q[(i, j)] * phase;
        }
    }
    u
}

fn entropy_bits_2x2(m: &Matrix2<C64>) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean + rad, mean - rad]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Entropy reduction of the first photon after measuring the second along
/// `(θ, φ)`, via explicit projectors and a partial trace.
pub fn classical_at(rho: &Op4, theta: f64, phi: f64) -> f64 {
    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let sigma_n = Matrix2::new(
        c(n[2]),
        C64::new(n[0], -n[1]),
        C64::new(n[0], n[1]),
        c(-n[2]),
    );
    let id2 = Matrix2::<C64>::identity();
    let reduced_a = Matrix2::from_fn(|a, a2| rho[(2 * a, 2 * a2)] + rho[(2 * a + 1, 2 * a2 + 1)]);
    let mut conditional = 0.0;
    for sign in [1.0, -1.0] {
        let pi_b = (id2 + sigma_n * c(sign)) * c(0.5);
        let full = Op4::from_fn(|i, j| if i / 2 == j / 2 { pi_b[(i % 2, j % 2)] } else { c(0.0) });
        let post = full * rho * full;
        let rho_a = Matrix2::from_fn(|a, a2| post[(2 * a, 2 * a2)] + post[(2 * a + 1, 2 * a2 + 1)]);
        let q = rho_a.trace().re;
        if q > 1e-300 {
            conditional += q * entropy_bits_2x2(&(rho_a / c(q)));
        }
    }
    entropy_bits_2x2(&reduced_a) - conditional
}

/// Maximum of [`classical_at`] over a `n_theta × n_phi` grid on `[0, π]²`.
pub fn grid_classical(rho: &Op4, n_theta: usize, n_phi: usize) -> (f64, f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n_theta {
        let theta = PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = PI * j as f64 / (n_phi - 1) as f64;
            let v = classical_at(rho, theta, phi);
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    best
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Golub–Welsch).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let k = i.max(j) as f64;
        if i.abs_diff(j) == 1 {
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes
}

/// Basis levels of the exciton reached by each polarization (H, V).
pub const EXCITON: [usize; 2] = [2, 1];

/// `∫₀^∞ dt₁ Tr[σ_ν'†σ_ν e^{Lτ}(σ_μ ρ(t₁) σ_μ'†)]` by composite
/// Gauss–Legendre quadrature in `t₁`, with both time evolutions integrated
/// as ODEs.
pub fn double_integral(p: &DotParams, tau: f64) -> DMatrix<C64> {
    let model = Model::new(p);
    let rhs = |x: &Op4| model.rhs(x);
    let gamma_xx = p.gamma_xx_h + p.gamma_xx_v;
    let panel = 4.0 / gamma_xx;
    let rule = gauss_legendre(10);

    let mut rho = op(3, 3);
    let mut now = 0.0;
    let mut out = DMatrix::zeros(4, 4);
    for k in 0..8 {
        let mid = (k as f64 + 0.5) * panel;
        for &(x, w) in &rule {
            let t1 = mid + 0.5 * panel * x;
            rho = dopri(rhs, &rho, t1 - now, 1e-12, 1e-16);
            now = t1;
            let weight = 0.5 * panel * w;
            for mu in 0..2 {
                for mu2 in 0..2 {
                    let m = op(EXCITON[mu], 3) * rho * op(EXCITON[mu2], 3).adjoint();
                    let evolved = dopri(rhs, &m, tau, 1e-11, 1e-16);
                    for nu in 0..2 {
                        for nu2 in 0..2 {
                            let detect = op(0, EXCITON[nu2]).adjoint() * op(0, EXCITON[nu]);
                            out[(2 * mu + nu, 2 * mu2 + nu2)] += (detect * evolved).trace() * c(weight);
                        }
                    }
                }
            }
        }
    }
    out
}
