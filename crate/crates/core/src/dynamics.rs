//! Propagation under a [`Liouvillian`] and the two-time photon–photon
//! correlator obtained from the quantum regression theorem.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, expm, Op4, C64};
use crate::qdmodel::{Liouvillian, EXCITON_H, EXCITON_V};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = -1e-9;

/// A density matrix. States that are not trace-normalized (regressed or
/// gate-integrated intermediates) are flagged so the trace check is skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<C64>,
    normalized: bool,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(elements: DMatrix<C64>) -> Result<Self> {
        check_square(&elements)?;
        let rho = DensityMatrix {
            elements,
            normalized: true,
        };
        rho.check()?;
        Ok(rho)
    }

    /// Hermitian and positive, but with arbitrary non-negative trace.
    pub fn unnormalized(elements: DMatrix<C64>) -> Result<Self> {
        check_square(&elements)?;
        let rho = DensityMatrix {
            elements,
            normalized: false,
        };
        rho.check()?;
        Ok(rho)
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let n = amplitudes.len();
        let m = DMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / norm);
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            elements: DMatrix::identity(dim, dim).scale(1.0 / dim as f64),
            normalized: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.elements)
    }

    fn check(&self) -> Result<()> {
        if self.elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("building a density matrix"));
        }
        let defect = linalg::hermiticity_defect(&self.elements);
        if defect > HERMITIAN_TOL {
            return Err(Error::Format(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        let tr = self.elements.trace();
        if self.normalized && ((tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL) {
            return Err(Error::Format(format!("trace is {tr}, expected 1")));
        }
        let scale = if self.normalized { 1.0 } else { tr.re.abs().max(f64::MIN_POSITIVE) };
        let lowest = self.eigenvalues()[0];
        if lowest < POSITIVITY_TOL * scale {
            return Err(Error::NonPhysical(lowest));
        }
        Ok(())
    }
}

/// Regressed operator `σ ρ σ'†`; neither Hermitian nor normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalOperator {
    pub elements: DMatrix<C64>,
}

impl ConditionalOperator {
    pub fn new(elements: DMatrix<C64>) -> Result<Self> {
        check_square(&elements)?;
        if elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("building a conditional operator"));
        }
        Ok(ConditionalOperator { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }
}

fn check_square(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

/// Operators that can be pushed through a Liouvillian.
pub trait Evolve: Sized {
    fn matrix(&self) -> &DMatrix<C64>;
    fn with_matrix(&self, m: DMatrix<C64>) -> Self;
}

impl Evolve for DensityMatrix {
    fn matrix(&self) -> &DMatrix<C64> {
        &self.elements
    }

    fn with_matrix(&self, m: DMatrix<C64>) -> Self {
        DensityMatrix {
            elements: m,
            normalized: self.normalized,
        }
    }
}

impl Evolve for ConditionalOperator {
    fn matrix(&self) -> &DMatrix<C64> {
        &self.elements
    }

    fn with_matrix(&self, m: DMatrix<C64>) -> Self {
        ConditionalOperator { elements: m }
    }
}

/// `e^{L t}` as a dense superoperator, reusable across inputs.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    matrix: DMatrix<C64>,
}

impl Propagator {
    pub fn new(l: &Liouvillian, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain("t", t, "propagation time must be >= 0"));
        }
        let matrix = if t == 0.0 {
            DMatrix::identity(l.matrix.nrows(), l.matrix.ncols())
        } else {
            expm(&l.matrix.scale(t))
        };
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("exponentiating the generator"));
        }
        Ok(Propagator { dim: l.dim, matrix })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply<T: Evolve>(&self, x: &T) -> Result<T> {
        let m = x.matrix();
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
            });
        }
        let out = linalg::unvectorize(&(&self.matrix * linalg::vectorize(m)), self.dim);
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("propagating"));
        }
        Ok(x.with_matrix(out))
    }
}

/// `e^{L t}` applied to `x`.
pub fn propagate<T: Evolve>(l: &Liouvillian, x: &T, t: f64) -> Result<T> {
    if t == 0.0 && x.matrix().nrows() == l.dim {
        return Ok(x.with_matrix(x.matrix().clone()));
    }
    Propagator::new(l, t)?.apply(x)
}

/// Photon polarization; index order matches the pair basis {HH, HV, VH, VV}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    H = 0,
    V = 1,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    /// Exciton level reached by (and emitting) a photon of this polarization.
    pub fn exciton_level(self) -> usize {
        match self {
            Polarization::H => EXCITON_H,
            Polarization::V => EXCITON_V,
        }
    }
}

/// Index in the ordered pair basis {HH, HV, VH, VV}; the first photon is the
/// biexciton photon.
pub fn pair_index(biexciton: Polarization, exciton: Polarization) -> usize {
    2 * biexciton as usize + exciton as usize
}

/// Unnormalized two-photon correlator `G(τ)` in the pair basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorrelator {
    pub tau: f64,
    pub elements: Op4,
}

/// `G_{µν,µ'ν'}(τ) = Tr[σ_{X,ν'}† σ_{X,ν} e^{Lτ}(σ_{XX,µ} |XX⟩⟨XX| σ_{XX,µ'}†)]`.
///
/// The biexciton emission time is integrated out: it only contributes the
/// scalar `∫ ρ_XX(t₁) dt₁`, common to all entries.
pub fn pair_correlator(l: &Liouvillian, tau: f64) -> Result<PairCorrelator> {
    if l.dim != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: l.dim,
        });
    }
    let prop = Propagator::new(l, tau)?;
    Ok(PairCorrelator {
        tau,
        elements: correlator_from_propagator(prop.matrix()),
    })
}

/// Reads `G(τ)` off the columns of `e^{Lτ}`.
///
/// `σ_{XX,µ}|XX⟩⟨XX|σ_{XX,µ'}† = |x_µ⟩⟨x_µ'|` and the detection trace picks the
/// `(x_ν, x_ν')` element, so each entry is a single superoperator element.
pub(crate) fn correlator_from_propagator(prop: &DMatrix<C64>) -> Op4 {
    let mut g = Op4::zeros();
    for mu in Polarization::BOTH {
        for mu_p in Polarization::BOTH {
            let col = mu.exciton_level() + 4 * mu_p.exciton_level();
            for nu in Polarization::BOTH {
                for nu_p in Polarization::BOTH {
                    let row = nu.exciton_level() + 4 * nu_p.exciton_level();
                    g[(pair_index(mu, nu), pair_index(mu_p, nu_p))] = prop[(row, col)];
                }
            }
        }
    }
    g
}
