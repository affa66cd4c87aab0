//! Four-level quantum dot: parameters, phonon-assisted rates and the Lindblad
//! generator of the biexciton cascade.
//!
//! Level ordering is `|0⟩ = G`, `|1⟩ = X_V`, `|2⟩ = X_H`, `|3⟩ = XX`. The
//! exciton `X_H` sits `S` above `X_V`, so phonon *emission* drives
//! `X_H → X_V` and absorption drives `X_V → X_H`. Energies are referenced to
//! `X_V`; only the splitting enters observable phases.
//!
//! Units are µeV, ns and K throughout.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ket_bra, C64, I, ZERO};

/// Physical constants in the µeV / ns / K unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysConstants {
    /// Reduced Planck constant, µeV·ns.
    pub hbar: f64,
    /// Boltzmann constant, µeV/K.
    pub k_b: f64,
    /// Planck constant, µeV·ns.
    pub h: f64,
}

pub const CONSTANTS: PhysConstants = PhysConstants {
    hbar: 0.658_211_956_9,
    k_b: 86.173_33,
    h: 4.135_667_696,
};

pub const GROUND: usize = 0;
pub const EXCITON_V: usize = 1;
pub const EXCITON_H: usize = 2;
pub const BIEXCITON: usize = 3;

/// Every physical input of the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotParams {
    /// Fine structure splitting `S` (X_H above X_V), µeV.
    pub splitting: f64,
    /// Lattice temperature, K.
    pub temperature: f64,
    /// Radiative rate X_H → G, 1/ns.
    pub gamma_x_h: f64,
    /// Radiative rate X_V → G, 1/ns.
    pub gamma_x_v: f64,
    /// Radiative rate XX → X_H, 1/ns.
    pub gamma_xx_h: f64,
    /// Radiative rate XX → X_V, 1/ns.
    pub gamma_xx_v: f64,
    /// Phonon–dot interaction rate at `splitting_ref`, 1/ns.
    pub kappa_ref: f64,
    /// Splitting at which `kappa_ref` is quoted, µeV.
    pub splitting_ref: f64,
    /// Indistinguishable fraction of the pair state.
    pub eta: f64,
    /// Background noise counts per signal count.
    pub noise: f64,
    /// Gate opening delay after the biexciton photon, ns.
    pub gate_delay: f64,
    /// Gate width, ns.
    pub gate_width: f64,
}

impl DotParams {
    /// `kappa_ref` produced by `cascade-discord calibrate-kappa --target-tc 10`
    /// at the remaining defaults (T_c = 10 K at S = 2.5 µeV, τ_g = 0.5 ns).
    pub const CALIBRATED_KAPPA_REF: f64 = 1.211_295_9e-3;

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("S", self.splitting),
            ("T", self.temperature),
            ("gammaX_H", self.gamma_x_h),
            ("gammaX_V", self.gamma_x_v),
            ("gammaXX_H", self.gamma_xx_h),
            ("gammaXX_V", self.gamma_xx_v),
            ("kappa_ref", self.kappa_ref),
            ("S_ref", self.splitting_ref),
            ("eta", self.eta),
            ("g", self.noise),
            ("tau_g", self.gate_delay),
            ("w_g", self.gate_width),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::domain(name, value, "must be finite"));
            }
        }
        if self.splitting <= 0.0 {
            return Err(Error::domain("S", self.splitting, "must be > 0"));
        }
        if self.temperature < 0.0 {
            return Err(Error::domain("T", self.temperature, "must be >= 0"));
        }
        for (name, rate) in [
            ("gammaX_H", self.gamma_x_h),
            ("gammaX_V", self.gamma_x_v),
            ("gammaXX_H", self.gamma_xx_h),
            ("gammaXX_V", self.gamma_xx_v),
            ("kappa_ref", self.kappa_ref),
        ] {
            if rate < 0.0 {
                return Err(Error::domain(name, rate, "rates must be >= 0"));
            }
        }
        if self.gamma_x_h + self.gamma_x_v <= 0.0 {
            return Err(Error::domain(
                "gammaX_H",
                self.gamma_x_h,
                "total exciton decay rate must be > 0",
            ));
        }
        if self.gamma_xx_h + self.gamma_xx_v <= 0.0 {
            return Err(Error::domain(
                "gammaXX_H",
                self.gamma_xx_h,
                "total biexciton decay rate must be > 0",
            ));
        }
        if self.splitting_ref <= 0.0 {
            return Err(Error::domain("S_ref", self.splitting_ref, "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::domain("eta", self.eta, "must lie in [0, 1]"));
        }
        if self.noise < 0.0 {
            return Err(Error::domain("g", self.noise, "must be >= 0"));
        }
        if self.gate_delay < 0.0 {
            return Err(Error::domain("tau_g", self.gate_delay, "must be >= 0"));
        }
        if self.gate_width <= 0.0 {
            return Err(Error::domain("w_g", self.gate_width, "must be > 0"));
        }
        Ok(())
    }

    pub fn exciton_decay_total(&self) -> f64 {
        self.gamma_x_h + self.gamma_x_v
    }

    pub fn biexciton_decay_total(&self) -> f64 {
        self.gamma_xx_h + self.gamma_xx_v
    }

    /// Phonon interaction rate at the current splitting, `κ_ref (S/S_ref)³`.
    pub fn kappa(&self) -> f64 {
        self.kappa_ref * (self.splitting / self.splitting_ref).powi(3)
    }
}

impl Default for DotParams {
    fn default() -> Self {
        DotParams {
            splitting: 2.5,
            temperature: 10.0,
            // 0.8 ns exciton lifetime, 0.4 ns biexciton lifetime
            gamma_x_h: 0.625,
            gamma_x_v: 0.625,
            gamma_xx_h: 1.25,
            gamma_xx_v: 1.25,
            kappa_ref: Self::CALIBRATED_KAPPA_REF,
            splitting_ref: 2.5,
            eta: 0.8,
            noise: 0.0,
            gate_delay: 0.5,
            gate_width: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhononRates {
    /// Mean phonon occupation at energy `S`.
    pub occupation: f64,
    /// Interaction rate at the current splitting, 1/ns.
    pub kappa: f64,
    /// X_V → X_H, `κ N_B`.
    pub gamma_abs: f64,
    /// X_H → X_V, `κ (N_B + 1)`.
    pub gamma_em: f64,
}

/// Bose–Einstein occupation `1 / (exp(S / k_B T) − 1)` of a phonon of energy
/// `S` (µeV) at temperature `T` (K). Exactly zero at `T = 0`.
pub fn bose_occupation(splitting: f64, temperature: f64) -> Result<f64> {
    if !(splitting > 0.0) || !splitting.is_finite() {
        return Err(Error::domain("S", splitting, "must be > 0"));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::domain("T", temperature, "must be >= 0"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = splitting / (CONSTANTS.k_b * temperature);
    Ok(1.0 / x.exp_m1())
}

pub fn phonon_rates(params: &DotParams) -> Result<PhononRates> {
    params.validate()?;
    let occupation = bose_occupation(params.splitting, params.temperature)?;
    let kappa = params.kappa();
    Ok(PhononRates {
        occupation,
        kappa,
        gamma_abs: kappa * occupation,
        gamma_em: kappa * (occupation + 1.0),
    })
}

/// Linear generator acting on column-vectorized `dim × dim` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub dim: usize,
    pub matrix: DMatrix<C64>,
}

impl Liouvillian {
    /// `L ρ = −(i/ħ)[H, ρ] + Σ_k D[A_k] ρ` with `H` in µeV and jump operators
    /// already carrying `√rate` (rates in 1/ns).
    pub fn from_hamiltonian(hamiltonian: &DMatrix<C64>, jumps: &[DMatrix<C64>]) -> Self {
        let dim = hamiltonian.nrows();
        let id = DMatrix::<C64>::identity(dim, dim);
        let h = hamiltonian.map(|e| e / CONSTANTS.hbar);
        let mut matrix = (linalg::sandwich(&h, &id) - linalg::sandwich(&id, &h)) * (-I);
        for a in jumps {
            let ada = a.adjoint() * a;
            matrix += linalg::sandwich(a, &a.adjoint());
            matrix -= (linalg::sandwich(&ada, &id) + linalg::sandwich(&id, &ada)).scale(0.5);
        }
        Liouvillian { dim, matrix }
    }

    /// Norm of `Tr ∘ L` as a row functional; zero for a trace-preserving
    /// generator.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for col in 0..n * n {
            let mut s = ZERO;
            for k in 0..n {
                s += self.matrix[(k + n * k, col)];
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Smallest singular value; zero iff the generator has a stationary mode.
    pub fn zero_mode_residual(&self) -> f64 {
        self.matrix
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `H = S |X_H⟩⟨X_H|`.
pub fn cascade_hamiltonian(params: &DotParams) -> DMatrix<C64> {
    let mut h = DMatrix::zeros(4, 4);
    h[(EXCITON_H, EXCITON_H)] = C64::new(params.splitting, 0.0);
    h
}

/// Radiative and phonon jump operators, each scaled by `√rate`.
pub fn cascade_jumps(params: &DotParams, rates: &PhononRates) -> Vec<DMatrix<C64>> {
    [
        (params.gamma_xx_h, EXCITON_H, BIEXCITON),
        (params.gamma_xx_v, EXCITON_V, BIEXCITON),
        (params.gamma_x_h, GROUND, EXCITON_H),
        (params.gamma_x_v, GROUND, EXCITON_V),
        (rates.gamma_abs, EXCITON_H, EXCITON_V),
        (rates.gamma_em, EXCITON_V, EXCITON_H),
    ]
    .into_iter()
    .filter(|&(rate, _, _)| rate > 0.0)
    .map(|(rate, to, from)| ket_bra(4, to, from) * C64::new(rate.sqrt(), 0.0))
    .collect()
}

pub fn build_liouvillian(params: &DotParams) -> Result<Liouvillian> {
    let rates = phonon_rates(params)?;
    Ok(Liouvillian::from_hamiltonian(
        &cascade_hamiltonian(params),
        &cascade_jumps(params, &rates),
    ))
}
