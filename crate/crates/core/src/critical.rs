//! Parameter sweeps and critical temperatures.
//!
//! The sudden-change temperature `T_c` is located by bisection on the type of
//! the optimal measurement axis (polar vs equatorial). Classical correlation
//! switches branch there, which is what puts a kink in `Q(T)`; an independent
//! finite-difference kink detector is run at the result as a cross-check.
//! The sudden-death temperature `T_d` is the first zero of the concurrence.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{classical_correlation, concurrence_witness, quantum_discord, CorrelationReport};
use crate::error::{Error, Result};
use crate::pairstate::polarization_state;
use crate::qdmodel::DotParams;

pub const DEFAULT_T_RANGE: (f64, f64) = (0.5, 120.0);
pub const DEFAULT_RESOLUTION: f64 = 0.01;
pub const DEFAULT_KAPPA_RANGE: (f64, f64) = (1e-5, 10.0);

/// Coarse scan used to find the first classification change before bisecting.
const SCAN_POINTS: usize = 48;
/// Probe points for the concurrence zero.
const ESD_PROBE_POINTS: usize = 10;
/// Finite-difference step of the kink detector, K.
const KINK_STEP: f64 = 0.05;
const KINK_FACTOR: f64 = 5.0;
/// Log-spaced calibration scan density.
const KAPPA_SCAN_PER_DECADE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Temperature,
    Delay,
    Fss,
}

impl Axis {
    /// CSV column name with unit.
    pub fn column(self) -> &'static str {
        match self {
            Axis::Temperature => "T_K",
            Axis::Delay => "tau_g_ns",
            Axis::Fss => "S_ueV",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Axis::Temperature => "T",
            Axis::Delay => "tau_g",
            Axis::Fss => "S",
        }
    }

    pub fn apply(self, params: &DotParams, value: f64) -> DotParams {
        let mut p = *params;
        match self {
            Axis::Temperature => p.temperature = value,
            Axis::Delay => p.gate_delay = value,
            Axis::Fss => p.splitting = value,
        }
        p
    }
}

/// `n` evenly spaced values from `lo` to `hi`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn check_range(name: &'static str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::domain(name, hi - lo, "range must satisfy lo < hi"));
    }
    Ok(())
}

/// Full pipeline at one parameter point.
pub fn evaluate(params: &DotParams) -> Result<CorrelationReport> {
    quantum_discord(&polarization_state(params)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    #[serde(skip)]
    pub outcome: Result<CorrelationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn axis_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.axis_value).collect()
    }

    pub fn reports(&self) -> Result<Vec<CorrelationReport>> {
        self.rows.iter().map(|r| r.outcome.clone()).collect()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Maximal runs of consecutive axis values where discord exceeds the
    /// classical correlation.
    pub fn discord_above_classical(&self) -> Vec<(f64, f64)> {
        let mut runs = Vec::new();
        let mut start: Option<f64> = None;
        let mut last = f64::NAN;
        for row in &self.rows {
            let above = matches!(&row.outcome, Ok(r) if r.discord > r.classical);
            match (above, start) {
                (true, None) => start = Some(row.axis_value),
                (false, Some(s)) => {
                    runs.push((s, last));
                    start = None;
                }
                _ => {}
            }
            last = row.axis_value;
        }
        if let Some(s) = start {
            runs.push((s, last));
        }
        runs
    }

    /// First axis value at which the optimal measurement axis changes type,
    /// as the pair of neighbouring grid indices.
    pub fn first_basis_switch(&self) -> Option<(usize, usize)> {
        let classes: Vec<Option<bool>> = self
            .rows
            .iter()
            .map(|r| r.outcome.as_ref().ok().map(|c| c.optimal_direction.is_equatorial()))
            .collect();
        classes
            .windows(2)
            .position(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a != b))
            .map(|i| (i, i + 1))
    }
}

/// Evaluates the pipeline on `n_points` evenly spaced values of `axis`.
///
/// Points run in parallel on the current rayon pool; rows come back in axis
/// order and each point is independent, so the table does not depend on the
/// number of workers.
pub fn sweep(params: &DotParams, axis: Axis, range: (f64, f64), n_points: usize) -> Result<SweepTable> {
    params.validate()?;
    check_range(axis.key(), range)?;
    if n_points < 2 {
        return Err(Error::domain("n_points", n_points as f64, "need at least 2 points"));
    }
    let rows = linspace(range.0, range.1, n_points)
        .into_par_iter()
        .map(|v| SweepRow {
            axis_value: v,
            outcome: evaluate(&axis.apply(params, v)).map_err(|e| e.at(axis.key(), v)),
        })
        .collect();
    Ok(SweepTable { axis, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriticalKind {
    SuddenChange,
    SuddenDeath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Detector {
    BasisSwitch,
    DerivativeKink,
    ConcurrenceZero,
}

/// Finite-difference witness of a jump in `dQ/dT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinkCheck {
    /// Intersection of the quadratic fits to `Q` on either side, K.
    pub location: f64,
    pub slope_below: f64,
    pub slope_above: f64,
    pub jump: f64,
    /// Variation of the centered derivative over one step on the same side.
    pub noise_floor: f64,
    pub fired: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub value: f64,
    pub kind: CriticalKind,
    pub bracket: (f64, f64),
    pub detector: Detector,
    pub resolution: f64,
    pub kink: Option<KinkCheck>,
    /// Concurrence found nonincreasing on the probe grid.
    pub monotone_probe: Option<bool>,
}

fn equatorial_at(params: &DotParams, temperature: f64) -> Result<bool> {
    let p = Axis::Temperature.apply(params, temperature);
    let (_, direction) = classical_correlation(&polarization_state(&p)?)?;
    Ok(direction.is_equatorial())
}

fn discord_at(params: &DotParams, temperature: f64) -> Result<f64> {
    Ok(evaluate(&Axis::Temperature.apply(params, temperature))?.discord)
}

/// Bisects `[lo, hi]` (where `pred(lo) != pred(hi)`) down to `resolution`.
fn bisect<F>(mut pred: F, mut lo: f64, mut hi: f64, resolution: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<bool>,
{
    let at_lo = pred(lo)?;
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn quadratic_through(ts: [f64; 3], qs: [f64; 3]) -> [f64; 3] {
    // Newton form converted to monomial coefficients [c0, c1, c2]
    let d1 = (qs[1] - qs[0]) / (ts[1] - ts[0]);
    let d2 = (qs[2] - qs[1]) / (ts[2] - ts[1]);
    let c2 = (d2 - d1) / (ts[2] - ts[0]);
    let c1 = d1 - c2 * (ts[0] + ts[1]);
    let c0 = qs[0] - c1 * ts[0] - c2 * ts[0] * ts[0];
    [c0, c1, c2]
}

/// Centered-difference kink test around the bracket `(lo, hi)`.
pub fn derivative_kink(params: &DotParams, bracket: (f64, f64), step: f64) -> Result<KinkCheck> {
    let step = step.min(bracket.0 / 4.0).max(1e-6);
    let below: Vec<f64> = (0..4).map(|k| bracket.0 - k as f64 * step).collect();
    let above: Vec<f64> = (0..4).map(|k| bracket.1 + k as f64 * step).collect();
    let q_below = below.iter().map(|&t| discord_at(params, t)).collect::<Result<Vec<_>>>()?;
    let q_above = above.iter().map(|&t| discord_at(params, t)).collect::<Result<Vec<_>>>()?;

    let fit_below = quadratic_through([below[0], below[1], below[2]], [q_below[0], q_below[1], q_below[2]]);
    let fit_above = quadratic_through([above[0], above[1], above[2]], [q_above[0], q_above[1], q_above[2]]);
    let diff = [
        fit_below[0] - fit_above[0],
        fit_below[1] - fit_above[1],
        fit_below[2] - fit_above[2],
    ];
    let center = 0.5 * (bracket.0 + bracket.1);
    let location = if diff[2].abs() < 1e-300 {
        -diff[0] / diff[1]
    } else {
        let disc = (diff[1] * diff[1] - 4.0 * diff[2] * diff[0]).max(0.0).sqrt();
        let r1 = (-diff[1] + disc) / (2.0 * diff[2]);
        let r2 = (-diff[1] - disc) / (2.0 * diff[2]);
        if (r1 - center).abs() < (r2 - center).abs() {
            r1
        } else {
            r2
        }
    };
    let slope = |c: [f64; 3], t: f64| c[1] + 2.0 * c[2] * t;
    let slope_below = slope(fit_below, location);
    let slope_above = slope(fit_above, location);
    let jump = (slope_above - slope_below).abs();

    let centered = |q: &[f64], k: usize| (q[k - 1] - q[k + 1]) / (2.0 * step);
    let noise_floor = (centered(&q_below, 1) - centered(&q_below, 2))
        .abs()
        .max((centered(&q_above, 1) - centered(&q_above, 2)).abs());
    Ok(KinkCheck {
        location,
        slope_below,
        slope_above,
        jump,
        noise_floor,
        fired: jump > KINK_FACTOR * noise_floor,
    })
}

/// Locates the correlation sudden-change temperature in `range`.
pub fn find_sudden_change_t(params: &DotParams, range: (f64, f64), resolution: f64) -> Result<CriticalPoint> {
    params.validate()?;
    check_range("T", range)?;
    if !(resolution > 0.0) {
        return Err(Error::domain("resolution", resolution, "must be > 0"));
    }
    if range.0 < 0.0 {
        return Err(Error::domain("T", range.0, "must be >= 0"));
    }

    let grid = linspace(range.0, range.1, SCAN_POINTS);
    let first = equatorial_at(params, grid[0])?;
    let mut switch = None;
    for w in grid.windows(2) {
        if equatorial_at(params, w[1])? != first {
            switch = Some((w[0], w[1]));
            break;
        }
    }
    let (lo, hi) = switch.ok_or(Error::NoSuddenChange {
        lo: range.0,
        hi: range.1,
    })?;
    let bracket = bisect(|t| equatorial_at(params, t), lo, hi, resolution)?;
    let kink = derivative_kink(params, bracket, KINK_STEP)?;
    Ok(CriticalPoint {
        value: 0.5 * (bracket.0 + bracket.1),
        kind: CriticalKind::SuddenChange,
        bracket,
        detector: Detector::BasisSwitch,
        resolution,
        kink: Some(kink),
        monotone_probe: None,
    })
}

fn alive_at(params: &DotParams, temperature: f64) -> Result<f64> {
    concurrence_witness(&polarization_state(&Axis::Temperature.apply(params, temperature))?)
}

/// Locates the first temperature in `range` at which the concurrence vanishes.
pub fn find_esd_t(params: &DotParams, range: (f64, f64), resolution: f64) -> Result<CriticalPoint> {
    params.validate()?;
    check_range("T", range)?;
    if !(resolution > 0.0) {
        return Err(Error::domain("resolution", resolution, "must be > 0"));
    }
    let probe = linspace(range.0, range.1, ESD_PROBE_POINTS);
    let witness = probe.iter().map(|&t| alive_at(params, t)).collect::<Result<Vec<_>>>()?;
    if witness[0] <= 0.0 {
        return Err(Error::AlreadyDead { lo: range.0 });
    }
    let dead = witness.iter().position(|&w| w <= 0.0).ok_or(Error::NoDeathInRange { hi: range.1 })?;
    let monotone = witness.windows(2).all(|w| w[1].max(0.0) <= w[0].max(0.0));
    let bracket = bisect(|t| Ok(alive_at(params, t)? > 0.0), probe[dead - 1], probe[dead], resolution)?;
    Ok(CriticalPoint {
        value: 0.5 * (bracket.0 + bracket.1),
        kind: CriticalKind::SuddenDeath,
        bracket,
        detector: Detector::ConcurrenceZero,
        resolution,
        kink: None,
        monotone_probe: Some(monotone),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRow {
    pub axis_value: f64,
    pub sudden_change: Result<CriticalPoint>,
    pub sudden_death: Result<CriticalPoint>,
}

/// `T_c` and `T_d` along the delay or splitting axis. Points where a finder
/// fails keep the error in place of a value.
pub fn critical_vs(
    params: &DotParams,
    axis: Axis,
    axis_range: (f64, f64),
    n_points: usize,
    t_range: (f64, f64),
    resolution: f64,
) -> Result<Vec<CriticalRow>> {
    params.validate()?;
    if axis == Axis::Temperature {
        return Err(Error::domain("axis", 0.0, "critical temperatures need a delay or fss axis"));
    }
    check_range(axis.key(), axis_range)?;
    if n_points < 2 {
        return Err(Error::domain("n_points", n_points as f64, "need at least 2 points"));
    }
    Ok(linspace(axis_range.0, axis_range.1, n_points)
        .into_par_iter()
        .map(|v| {
            let p = axis.apply(params, v);
            CriticalRow {
                axis_value: v,
                sudden_change: find_sudden_change_t(&p, t_range, resolution).map_err(|e| e.at(axis.key(), v)),
                sudden_death: find_esd_t(&p, t_range, resolution).map_err(|e| e.at(axis.key(), v)),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub kappa_ref: f64,
    pub target_tc: f64,
    pub achieved: CriticalPoint,
    pub iterations: usize,
    pub tolerance: f64,
}

/// Signed position of `T_c(κ)` relative to `target`; ranges without a switch
/// report which side `T_c` lies on.
fn tc_offset(params: &DotParams, kappa_ref: f64, target: f64, t_range: (f64, f64), resolution: f64) -> Result<(f64, Option<CriticalPoint>)> {
    let p = DotParams { kappa_ref, ..*params };
    match find_sudden_change_t(&p, t_range, resolution) {
        Ok(cp) => Ok((cp.value - target, Some(cp))),
        Err(Error::NoSuddenChange { .. }) => {
            // already equatorial at the bottom of the range: T_c lies below it
            if equatorial_at(&p, t_range.0)? {
                Ok((-f64::INFINITY, None))
            } else {
                Ok((f64::INFINITY, None))
            }
        }
        Err(e) => Err(e),
    }
}

/// Finds `kappa_ref` such that `T_c = target_tc` to within `tolerance` (K).
///
/// `T_c` falls as the phonon rate grows until, at large rates, relaxation
/// alone removes the switch. A log-spaced scan from the low end of
/// `kappa_range` brackets the first crossing, then bisection runs in `ln κ`.
pub fn calibrate_kappa(
    params: &DotParams,
    target_tc: f64,
    kappa_range: (f64, f64),
    t_range: (f64, f64),
    resolution: f64,
    tolerance: f64,
) -> Result<Calibration> {
    let not_bracketed = Error::NotBracketed {
        target: target_tc,
        lo: kappa_range.0,
        hi: kappa_range.1,
    };
    if !(target_tc > t_range.0 && target_tc < t_range.1) || !(kappa_range.0 > 0.0 && kappa_range.0 < kappa_range.1) {
        return Err(not_bracketed);
    }
    let decades = (kappa_range.1 / kappa_range.0).log10();
    let scan = linspace(kappa_range.0.ln(), kappa_range.1.ln(), (KAPPA_SCAN_PER_DECADE * decades).ceil() as usize + 1);
    let mut iterations = 0;
    let mut bracket = None;
    let mut prev: Option<f64> = None;
    for &u in &scan {
        iterations += 1;
        let (f, point) = tc_offset(params, u.exp(), target_tc, t_range, resolution)?;
        if let Some(cp) = point {
            if f.abs() <= tolerance {
                return Ok(Calibration {
                    kappa_ref: u.exp(),
                    target_tc,
                    achieved: cp,
                    iterations,
                    tolerance,
                });
            }
        }
        if f < 0.0 {
            if let Some(lo) = prev {
                bracket = Some((lo, u));
            }
            break;
        }
        prev = Some(u);
    }
    let (mut lo, mut hi) = bracket.ok_or(not_bracketed.clone())?;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (f, point) = tc_offset(params, mid.exp(), target_tc, t_range, resolution)?;
        if let Some(cp) = point {
            if f.abs() <= tolerance {
                return Ok(Calibration {
                    kappa_ref: mid.exp(),
                    target_tc,
                    achieved: cp,
                    iterations,
                    tolerance,
                });
            }
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            return Err(not_bracketed);
        }
    }
}
