//! The measured two-photon polarization state.
//!
//! `ρ_pol = [η ρ₁ + (1 − η) ρ₂ + g I/4] / (1 + g)`, where `ρ₁` is the
//! gate-integrated, normalized photon–photon correlator, `ρ₂` its dephased
//! (diagonal) copy and `I/4` the background.
//!
//! Basis order is {HH, HV, VH, VV}; the first letter is the biexciton photon.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{correlator_from_propagator, pair_correlator, DensityMatrix, Propagator};
use crate::error::{Error, Result};
use crate::linalg::{self, Op4, C64, ZERO};
use crate::qdmodel::{build_liouvillian, DotParams};
use crate::quadrature;

/// Entries allowed to be nonzero in an X state.
const X_PATTERN: [[bool; 4]; 4] = [
    [true, false, false, true],
    [false, true, true, false],
    [false, true, true, false],
    [true, false, false, true],
];

/// Relative tolerance of the gate quadrature, per entry, before normalization.
const GATE_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonState {
    elements: Op4,
}

impl TwoPhotonState {
    /// Validates Hermiticity, unit trace and positivity (not the X pattern).
    pub fn new(elements: Op4) -> Result<Self> {
        DensityMatrix::new(linalg::op4_to_dyn(&elements))?;
        Ok(TwoPhotonState { elements })
    }

    pub(crate) fn new_unchecked(elements: Op4) -> Self {
        TwoPhotonState { elements }
    }

    /// `½(|HH⟩ + e^{iφ}|VV⟩)(⟨HH| + e^{−iφ}⟨VV|)`.
    pub fn bell(phase: f64) -> Self {
        let mut m = Op4::zeros();
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(3, 3)] = C64::new(0.5, 0.0);
        m[(0, 3)] = C64::from_polar(0.5, -phase);
        m[(3, 0)] = C64::from_polar(0.5, phase);
        TwoPhotonState { elements: m }
    }

    /// `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
    pub fn werner(p: f64) -> Self {
        let bell = Self::bell(0.0).elements;
        TwoPhotonState {
            elements: bell * C64::new(p, 0.0) + Op4::identity() * C64::new((1.0 - p) / 4.0, 0.0),
        }
    }

    pub fn maximally_mixed() -> Self {
        TwoPhotonState {
            elements: Op4::identity() * C64::new(0.25, 0.0),
        }
    }

    pub fn diagonal(p: [f64; 4]) -> Result<Self> {
        let mut m = Op4::zeros();
        for (i, &x) in p.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Self::new(m)
    }

    pub fn elements(&self) -> &Op4 {
        &self.elements
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix::unnormalized(linalg::op4_to_dyn(&self.elements))
            .expect("validated two-photon state")
    }

    /// Largest magnitude among entries outside the X pattern.
    pub fn x_structure_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if !X_PATTERN[i][j] {
                    worst = worst.max(self.elements[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Biexciton-photon state (exciton photon traced out).
    pub fn reduced_biexciton(&self) -> [[C64; 2]; 2] {
        let m = &self.elements;
        let mut r = [[ZERO; 2]; 2];
        for (a, row) in r.iter_mut().enumerate() {
            for (a2, entry) in row.iter_mut().enumerate() {
                *entry = m[(2 * a, 2 * a2)] + m[(2 * a + 1, 2 * a2 + 1)];
            }
        }
        r
    }

    /// Exciton-photon state (biexciton photon traced out).
    pub fn reduced_exciton(&self) -> [[C64; 2]; 2] {
        let m = &self.elements;
        let mut r = [[ZERO; 2]; 2];
        for (b, row) in r.iter_mut().enumerate() {
            for (b2, entry) in row.iter_mut().enumerate() {
                *entry = m[(b, b2)] + m[(2 + b, 2 + b2)];
            }
        }
        r
    }

    /// Conjugates by `u_a ⊗ u_b`.
    pub fn local_rotation(&self, u_a: &[[C64; 2]; 2], u_b: &[[C64; 2]; 2]) -> Self {
        let u = Op4::from_fn(|i, j| u_a[i / 2][j / 2] * u_b[i % 2][j % 2]);
        TwoPhotonState {
            elements: u * self.elements * u.adjoint(),
        }
    }

    /// Exchanges the H and V labels on both photons.
    pub fn swap_polarizations(&self) -> Self {
        let perm = [3, 2, 1, 0];
        TwoPhotonState {
            elements: Op4::from_fn(|i, j| self.elements[(perm[i], perm[j])]),
        }
    }
}

fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}j", z.re, sign, z.im.abs())
}

fn parse_complex(token: &str) -> Result<C64> {
    let bad = || Error::Format(format!("cannot parse complex literal {token:?}"));
    let body = token.strip_suffix('j').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse::<f64>().map_err(|_| bad())?;
    let im = body[split..].parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

/// Four rows of four `re+imj` literals, row-major, 17 significant digits.
impl fmt::Display for TwoPhotonState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| format_complex(self.elements[(i, j)])).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for TwoPhotonState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.lines().filter(|l| !l.trim().is_empty()).collect();
        if rows.len() != 4 {
            return Err(Error::Format(format!("expected 4 rows, found {}", rows.len())));
        }
        let mut m = Op4::zeros();
        for (i, row) in rows.iter().enumerate() {
            let tokens: Vec<&str> = row.split_whitespace().collect();
            if tokens.len() != 4 {
                return Err(Error::Format(format!(
                    "row {} has {} entries, expected 4",
                    i + 1,
                    tokens.len()
                )));
            }
            for (j, tok) in tokens.iter().enumerate() {
                m[(i, j)] = parse_complex(tok)?;
            }
        }
        TwoPhotonState::new(m)
    }
}

/// `ρ₁ ∝ ∫_{τ_g}^{τ_g + w_g} G(τ) dτ`, normalized to unit trace.
pub fn rho1_gated(params: &DotParams) -> Result<TwoPhotonState> {
    let l = build_liouvillian(params)?;
    let (a, b) = (params.gate_delay, params.gate_delay + params.gate_width);
    // G's trace is nonincreasing in τ, so G(τ_g)·w_g bounds the integral
    let scale = pair_correlator(&l, a)?.elements.trace().re * params.gate_width;
    if !(scale > 1e-300) {
        return Err(Error::DegenerateGate(scale));
    }
    let (integral, _) = quadrature::integrate(
        |tau| Ok(correlator_from_propagator(Propagator::new(&l, tau)?.matrix())),
        a,
        b,
        GATE_REL_TOL * scale,
    )?;
    let trace = integral.trace().re;
    if !(trace > 1e-300) {
        return Err(Error::DegenerateGate(trace));
    }
    let normalized = integral / C64::new(trace, 0.0);
    let hermitian = (normalized + normalized.adjoint()) * C64::new(0.5, 0.0);
    Ok(TwoPhotonState::new_unchecked(hermitian))
}

/// Same diagonal as the input, every off-diagonal entry zero.
pub fn rho2_dephased(rho1: &TwoPhotonState) -> TwoPhotonState {
    let mut m = Op4::zeros();
    for i in 0..4 {
        m[(i, i)] = C64::new(rho1.elements[(i, i)].re, 0.0);
    }
    TwoPhotonState::new_unchecked(m)
}

pub fn mix_state(
    rho1: &TwoPhotonState,
    rho2: &TwoPhotonState,
    eta: f64,
    noise: f64,
) -> Result<TwoPhotonState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("eta", eta, "must lie in [0, 1]"));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::domain("g", noise, "must be >= 0"));
    }
    let norm = 1.0 / (1.0 + noise);
    let m = rho1.elements * C64::new(eta * norm, 0.0)
        + rho2.elements * C64::new((1.0 - eta) * norm, 0.0)
        + Op4::identity() * C64::new(0.25 * noise * norm, 0.0);
    Ok(TwoPhotonState::new_unchecked(m))
}

/// The full pipeline from dot parameters to `ρ_pol`.
pub fn polarization_state(params: &DotParams) -> Result<TwoPhotonState> {
    let rho1 = rho1_gated(params)?;
    let rho2 = rho2_dephased(&rho1);
    mix_state(&rho1, &rho2, params.eta, params.noise)
}

/// Point evaluation of the normalized correlator, `G(τ) / Tr G(τ)`.
pub fn rho1_at(params: &DotParams, tau: f64) -> Result<TwoPhotonState> {
    let l = build_liouvillian(params)?;
    let g = pair_correlator(&l, tau)?.elements;
    let trace = g.trace().re;
    if !(trace > 1e-300) {
        return Err(Error::DegenerateGate(trace));
    }
    Ok(TwoPhotonState::new_unchecked(g / C64::new(trace, 0.0)))
}
