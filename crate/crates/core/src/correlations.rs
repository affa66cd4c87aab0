//! Entropies, mutual information, classical correlation, discord and
//! concurrence of a two-photon polarization state.
//!
//! The classical correlation is one-sided: projective measurements act on the
//! exciton photon (second factor) and the entropy reduction is that of the
//! biexciton photon. All quantities are in bits.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen};
use serde::Serialize;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian2_eigenvalues, shannon_bits, Op4, C64, I, ZERO};
use crate::optimize::nelder_mead;
use crate::pairstate::TwoPhotonState;

/// Eigenvalues below this are treated as a non-physical input rather than
/// round-off.
const NEGATIVE_EIGEN_TOL: f64 = -1e-6;

const GRID_THETA: usize = 37;
const GRID_PHI: usize = 19;
const REFINE_STARTS: usize = 3;
const REFINE_F_TOL: f64 = 1e-10;
const REFINE_X_TOL: f64 = 1e-9;
const REFINE_MAX_EVALS: usize = 400;

/// Axis `n̂(θ, φ)` of the projective measurement `Π± = (I ± n̂·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementDirection {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementDirection {
    /// Canonical angles for the axis through `(θ, φ)`: `θ ∈ [0, π/2]`,
    /// `φ ∈ [0, 2π)`. `n̂` and `−n̂` define the same measurement.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        if n[2] < 0.0 {
            n = n.map(|x| -x);
        }
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let phi = if n[0] == 0.0 && n[1] == 0.0 {
            0.0
        } else {
            n[1].atan2(n[0]).rem_euclid(2.0 * PI)
        };
        MeasurementDirection { theta, phi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }

    /// `Π₊` and `Π₋` as 2×2 matrices.
    pub fn projectors(&self) -> [[[C64; 2]; 2]; 2] {
        let [x, y, z] = self.unit_vector();
        let off = C64::new(x, -y);
        let plus = [
            [C64::new(0.5 * (1.0 + z), 0.0), off * 0.5],
            [off.conj() * 0.5, C64::new(0.5 * (1.0 - z), 0.0)],
        ];
        let minus = [
            [C64::new(0.5 * (1.0 - z), 0.0), -off * 0.5],
            [-off.conj() * 0.5, C64::new(0.5 * (1.0 + z), 0.0)],
        ];
        [plus, minus]
    }

    /// True when the axis lies closer to the equator than to the poles.
    pub fn is_equatorial(&self) -> bool {
        self.theta.cos().abs() < std::f64::consts::FRAC_1_SQRT_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub concurrence: f64,
    pub optimal_direction: MeasurementDirection,
    /// Objective evaluations spent, grid included.
    pub optimizer_evals: usize,
    /// False when no simplex run improved on the grid maximum.
    pub refined: bool,
    /// Every simplex run met its tolerance within the evaluation budget.
    pub converged: bool,
}

/// `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let ev = rho.eigenvalues();
    if ev[0] < NEGATIVE_EIGEN_TOL {
        return Err(Error::NonPhysical(ev[0]));
    }
    Ok(shannon_bits(&ev).max(0.0))
}

fn entropy2(m: &[[C64; 2]; 2]) -> Result<f64> {
    let ev = hermitian2_eigenvalues(m[0][0].re, m[1][1].re, m[0][1]);
    if ev[0] < NEGATIVE_EIGEN_TOL {
        return Err(Error::NonPhysical(ev[0]));
    }
    Ok(shannon_bits(&ev))
}

fn entropy4(m: &Op4) -> Result<f64> {
    let h: Matrix4<C64> = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let ev = SymmetricEigen::new(h).eigenvalues;
    let lowest = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest < NEGATIVE_EIGEN_TOL {
        return Err(Error::NonPhysical(lowest));
    }
    Ok(shannon_bits(ev.as_slice()))
}

/// `I = S(ρ_XX) + S(ρ_X) − S(ρ)`.
pub fn mutual_information(rho: &TwoPhotonState) -> Result<f64> {
    let sa = entropy2(&rho.reduced_biexciton())?;
    let sb = entropy2(&rho.reduced_exciton())?;
    let sab = entropy4(rho.elements())?;
    Ok((sa + sb - sab).max(0.0))
}

/// `S(ρ_XX) − Σ_± q_± S(ρ_XX^±)` as a function of the measurement axis on
/// the exciton photon.
///
/// The unnormalized conditional states are `½(ρ_XX ± N(n̂))` with
/// `N = Σ_{bb'} (n̂·σ)_{bb'} ρ_{(·,b'),(·,b)}`, so only three 2×2 blocks of
/// `ρ` are needed per evaluation.
pub(crate) struct ConditionalEntropy {
    reduced: [[C64; 2]; 2],
    z_block: [[C64; 2]; 2],
    // blocks ρ_{(a,1),(a',0)} and ρ_{(a,0),(a',1)}
    lower: [[C64; 2]; 2],
    upper: [[C64; 2]; 2],
    entropy_reduced: f64,
}

impl ConditionalEntropy {
    pub(crate) fn new(rho: &TwoPhotonState) -> Result<Self> {
        let m = rho.elements();
        let block = |b1: usize, b2: usize| {
            let mut r = [[ZERO; 2]; 2];
            for (a, row) in r.iter_mut().enumerate() {
                for (a2, e) in row.iter_mut().enumerate() {
                    *e = m[(2 * a + b1, 2 * a2 + b2)];
                }
            }
            r
        };
        let (r00, r11) = (block(0, 0), block(1, 1));
        let mut reduced = [[ZERO; 2]; 2];
        let mut z_block = [[ZERO; 2]; 2];
        for a in 0..2 {
            for a2 in 0..2 {
                reduced[a][a2] = r00[a][a2] + r11[a][a2];
                z_block[a][a2] = r00[a][a2] - r11[a][a2];
            }
        }
        let entropy_reduced = entropy2(&reduced)?;
        Ok(ConditionalEntropy {
            reduced,
            z_block,
            lower: block(1, 0),
            upper: block(0, 1),
            entropy_reduced,
        })
    }

    pub(crate) fn classical(&self, theta: f64, phi: f64) -> f64 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let (nx, ny, nz) = (st * cp, st * sp, ct);
        // (n̂·σ)_{01} = nx − i ny multiplies ρ_{(·,1),(·,0)}
        let c01 = C64::new(nx, -ny);
        let c10 = C64::new(nx, ny);
        let mut conditional = 0.0;
        for sign in [1.0, -1.0] {
            let mut m = [[ZERO; 2]; 2];
            for a in 0..2 {
                for a2 in 0..2 {
                    let n = self.z_block[a][a2] * nz + self.lower[a][a2] * c01 + self.upper[a][a2] * c10;
                    m[a][a2] = (self.reduced[a][a2] + n * sign) * 0.5;
                }
            }
            let q = m[0][0].re + m[1][1].re;
            if q > 0.0 {
                let ev = hermitian2_eigenvalues(m[0][0].re / q, m[1][1].re / q, m[0][1] / q);
                conditional += q * shannon_bits(&ev);
            }
        }
        self.entropy_reduced - conditional
    }
}

/// Classical correlation maximized over rank-1 projective measurements on the
/// exciton photon.
///
/// A 37×19 grid over `θ ∈ [0, π]`, `φ ∈ [0, π]` locates candidate optima;
/// a simplex refinement runs from the three best grid points. The result is
/// never worse than the grid maximum.
pub fn classical_correlation(rho: &TwoPhotonState) -> Result<(f64, MeasurementDirection)> {
    let (value, direction, _, _, _) = maximize_classical(rho)?;
    Ok((value, direction))
}

fn maximize_classical(rho: &TwoPhotonState) -> Result<(f64, MeasurementDirection, usize, bool, bool)> {
    let objective = ConditionalEntropy::new(rho)?;
    let d_theta = PI / (GRID_THETA - 1) as f64;
    let d_phi = PI / (GRID_PHI - 1) as f64;

    let mut grid = Vec::with_capacity(GRID_THETA * GRID_PHI);
    for i in 0..GRID_THETA {
        for j in 0..GRID_PHI {
            let (theta, phi) = (i as f64 * d_theta, j as f64 * d_phi);
            grid.push((objective.classical(theta, phi), theta, phi));
        }
    }
    let mut evals = grid.len();
    // stable sort keeps the scan order among ties, so the result is deterministic
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (mut best, mut best_theta, mut best_phi) = grid[0];
    let mut refined = false;
    let mut converged = true;
    for &(_, theta, phi) in grid.iter().take(REFINE_STARTS) {
        let run = nelder_mead(
            |[t, p]| -objective.classical(t, p),
            [theta, phi],
            0.5 * d_theta,
            REFINE_F_TOL,
            REFINE_X_TOL,
            REFINE_MAX_EVALS,
        );
        evals += run.evals;
        converged &= run.converged;
        if -run.value > best {
            best = -run.value;
            [best_theta, best_phi] = run.point;
            refined = true;
        }
    }
    Ok((best.max(0.0), MeasurementDirection::new(best_theta, best_phi), evals, refined, converged))
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn concurrence(rho: &TwoPhotonState) -> Result<f64> {
    Ok(concurrence_witness(rho)?.max(0.0))
}

/// `λ₁ − λ₂ − λ₃ − λ₄` before clamping: `λ_i` are the decreasing square roots
/// of the eigenvalues of `√ρ ρ̃ √ρ`, with `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
/// Negative exactly when the state is separable.
pub fn concurrence_witness(rho: &TwoPhotonState) -> Result<f64> {
    let m = rho.elements();
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let lowest = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest < NEGATIVE_EIGEN_TOL {
        return Err(Error::NonPhysical(lowest));
    }
    let sqrt_diag = Op4::from_diagonal(&eig.eigenvalues.map(|e| C64::new(e.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();

    let sy = [[ZERO, -I], [I, ZERO]];
    let yy = Op4::from_fn(|i, j| sy[i / 2][j / 2] * sy[i % 2][j % 2]);
    let tilde = yy * m.map(|z| z.conj()) * yy;
    let r = sqrt_rho * tilde * sqrt_rho;
    let r = (r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = SymmetricEigen::new(r)
        .eigenvalues
        .iter()
        .map(|&e| e.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
}

/// Mutual information, classical correlation, discord `I − C` and
/// concurrence in one pass.
pub fn quantum_discord(rho: &TwoPhotonState) -> Result<CorrelationReport> {
    let mutual_info = mutual_information(rho)?;
    let (classical, optimal_direction, optimizer_evals, refined, converged) = maximize_classical(rho)?;
    // C ≤ I holds analytically; clip optimizer overshoot at the 1e-12 level
    let classical = classical.min(mutual_info);
    Ok(CorrelationReport {
        mutual_info,
        classical,
        discord: mutual_info - classical,
        concurrence: concurrence(rho)?,
        optimal_direction,
        optimizer_evals,
        refined,
        converged,
    })
}
