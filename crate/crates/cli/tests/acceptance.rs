//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion over all of them.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cascade_discord::critical::DEFAULT_KAPPA_RANGE;
use cascade_discord::linalg::C64;
use cascade_discord::{
    build_liouvillian, calibrate_kappa, classical_correlation, critical_vs, find_esd_t, find_sudden_change_t,
    mutual_information, pair_correlator, polarization_state, quantum_discord, sweep, Axis, DotParams,
    TwoPhotonState,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T_RANGE: (f64, f64) = (0.5, 600.0);
const RESOLUTION: f64 = 0.01;

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Verdict {
    let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    Verdict { name, pass, detail }
}

fn calibrated() -> DotParams {
    let p = DotParams::default();
    let cal = calibrate_kappa(&p, 10.0, DEFAULT_KAPPA_RANGE, T_RANGE, RESOLUTION, 0.1).unwrap();
    println!(
        "calibration: kappa_ref = {:e} 1/ns gives T_c = {:.3} K at S = {} µeV",
        cal.kappa_ref, cal.achieved.value, p.splitting
    );
    DotParams { kappa_ref: cal.kappa_ref, ..p }
}

fn discord_oracle() -> (bool, String) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let (mut worst, mut undershoot) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let rho = x_project(&random_state(&mut rng));
        let (c_opt, _) = classical_correlation(&TwoPhotonState::new(rho).unwrap()).unwrap();
        let (lower, _, _) = grid_classical(&rho, 181, 91);
        let (grid, _, _) = grid_classical(&rho, 91, 181);
        undershoot = undershoot.max(lower - c_opt);
        worst = worst.max((c_opt - grid).abs());
    }
    let elapsed = start.elapsed();
    (
        worst <= 1e-4 && undershoot <= 1e-4 && elapsed < Duration::from_secs(60),
        format!(
            "max |C_opt − C_grid| = {worst:.2e} bits, max grid excess = {undershoot:.2e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_forms() -> (bool, String) {
    let bell = quantum_discord(&TwoPhotonState::bell(0.0)).unwrap();
    let bell_ok = [(bell.mutual_info, 2.0), (bell.classical, 1.0), (bell.discord, 1.0), (bell.concurrence, 1.0)]
        .iter()
        .all(|(got, want)| (got - want).abs() < 1e-6);
    let w = TwoPhotonState::werner(0.5);
    let r = quantum_discord(&w).unwrap();
    let (c_grid, _, _) = grid_classical(w.elements(), 181, 91);
    let q_oracle = mutual_information(&w).unwrap() - c_grid;
    let werner_ok = (r.classical - 0.18872).abs() < 1e-4
        && (r.discord - 0.26249).abs() < 1e-4
        && (r.concurrence - 0.25).abs() < 1e-4
        && (c_grid - 0.18872).abs() < 1e-4
        && (q_oracle - 0.26249).abs() < 1e-4;
    (
        bell_ok && werner_ok,
        format!(
            "Bell (I,C,Q,c) = ({:.7}, {:.7}, {:.7}, {:.7}); Werner C = {:.5} (grid {:.5}), Q = {:.5}, c = {:.5}",
            bell.mutual_info, bell.classical, bell.discord, bell.concurrence, r.classical, c_grid, r.discord, r.concurrence
        ),
    )
}

fn qrt_factorization() -> (bool, String) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    let mut scale_ok = true;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let tau = rng.random_range(0.0..1.5);
        let g = pair_correlator(&build_liouvillian(&p).unwrap(), tau).unwrap();
        let oracle = double_integral(&p, tau);
        let num: C64 = (0..16).map(|k| oracle[(k / 4, k % 4)] * g.elements[(k / 4, k % 4)].conj()).sum();
        let den: f64 = g.elements.iter().map(|z| z.norm_sqr()).sum();
        let scale = num / den;
        scale_ok &= scale.re > 0.0 && scale.im.abs() < 1e-9 * scale.re;
        let peak = oracle.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((oracle[(i, j)] - g.elements[(i, j)] * scale.re).norm() / peak);
            }
        }
    }
    let elapsed = start.elapsed();
    (
        scale_ok && worst <= 1e-6 && elapsed < Duration::from_secs(120),
        format!("20 sets, max entrywise deviation {worst:.2e} of peak, {:.1} s", elapsed.as_secs_f64()),
    )
}

fn state_validity() -> (bool, String) {
    let grid = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / 9.0;
    let (mut herm, mut trace, mut neg, mut x) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut count = 0;
    for g in [0.0, 0.45] {
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    let p = DotParams {
                        temperature: grid(1.0, 100.0, i),
                        gate_delay: grid(0.0, 1.5, j),
                        splitting: grid(0.5, 10.0, k),
                        noise: g,
                        ..DotParams::default()
                    };
                    let rho = polarization_state(&p).unwrap();
                    let m = rho.elements();
                    herm = herm.max((m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max));
                    trace = trace.max((m.trace() - C64::new(1.0, 0.0)).norm());
                    let eig = to_dyn(m).symmetric_eigen().eigenvalues;
                    neg = neg.max(-eig.min());
                    x = x.max(rho.x_structure_defect());
                    count += 1;
                }
            }
        }
    }
    (
        herm <= 1e-12 && trace <= 1e-12 && neg <= 1e-12 && x <= 1e-12,
        format!("{count} states: Hermiticity {herm:.1e}, trace {trace:.1e}, most negative eigenvalue {:.1e}, X defect {x:.1e}", -neg),
    )
}

fn fig2_shape(p: &DotParams) -> (bool, String) {
    let table = sweep(p, Axis::Temperature, (1.0, 80.0), 100).unwrap();
    let q: Vec<f64> = table.reports().unwrap().iter().map(|r| r.discord).collect();
    let rise = q.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let tc = find_sudden_change_t(p, T_RANGE, RESOLUTION).unwrap();
    let kink = tc.kink.unwrap();
    let gap = (kink.location - tc.value).abs();
    (
        rise <= 0.0 && kink.fired && gap <= 0.05,
        format!(
            "largest step in Q(T) {rise:.2e}; T_c = {:.3} K, kink at {:.3} K (jump {:.2e}, floor {:.2e}, fired {}), gap {gap:.3} K",
            tc.value, kink.location, kink.jump, kink.noise_floor, kink.fired
        ),
    )
}

fn noise_invariance(p: &DotParams) -> (bool, String) {
    let noisy = DotParams { noise: 0.45, ..*p };
    let tc0 = find_sudden_change_t(p, T_RANGE, RESOLUTION).unwrap().value;
    let tc1 = find_sudden_change_t(&noisy, T_RANGE, RESOLUTION).unwrap().value;
    let td0 = find_esd_t(p, T_RANGE, RESOLUTION).unwrap().value;
    let td1 = find_esd_t(&noisy, T_RANGE, RESOLUTION).unwrap().value;
    (
        (tc1 - tc0).abs() <= 0.2 && td1 < td0,
        format!("T_c {tc0:.3} → {tc1:.3} K, T_d {td0:.2} → {td1:.2} K"),
    )
}

fn ordering(p: &DotParams) -> (bool, String) {
    let rows = critical_vs(p, Axis::Delay, (0.1, 1.0), 10, T_RANGE, RESOLUTION).unwrap();
    let mut ordered = true;
    let mut min_gap = f64::INFINITY;
    for r in &rows {
        let (tc, td) = (r.sudden_change.as_ref().unwrap().value, r.sudden_death.as_ref().unwrap().value);
        ordered &= td > tc;
        min_gap = min_gap.min(td - tc);
    }
    let short = DotParams { gate_delay: 0.05, ..*p };
    let tc = find_sudden_change_t(&short, T_RANGE, RESOLUTION).unwrap().value;
    let td = find_esd_t(&short, T_RANGE, RESOLUTION).unwrap().value;
    (
        ordered && tc > 60.0 && td > 60.0,
        format!("T_d > T_c at all 10 delays: {ordered} (min T_d − T_c {min_gap:.2} K); at τ_g = 0.05 ns T_c = {tc:.2} K, T_d = {td:.2} K"),
    )
}

fn fig3_analog(p: &DotParams) -> (bool, String) {
    let at = |g: f64| {
        let q = DotParams { temperature: 10.0, noise: g, ..*p };
        let table = sweep(&q, Axis::Delay, (0.0, 1.5), 31).unwrap();
        let (i, _) = table.first_basis_switch().unwrap();
        (i, table.rows[i].axis_value, table.rows[i + 1].axis_value)
    };
    let (clean, noisy) = (at(0.0), at(0.45));
    (
        clean.0.abs_diff(noisy.0) <= 1,
        format!(
            "switch between τ_g = {:.2} and {:.2} ns (g = 0) vs {:.2} and {:.2} ns (g = 0.45)",
            clean.1, clean.2, noisy.1, noisy.2
        ),
    )
}

fn fig5_shape(p: &DotParams) -> (bool, String) {
    let rows = critical_vs(p, Axis::Fss, (1.0, 6.0), 11, T_RANGE, RESOLUTION).unwrap();
    let tc: Vec<f64> = rows.iter().map(|r| r.sudden_change.as_ref().unwrap().value).collect();
    let td: Vec<f64> = rows.iter().map(|r| r.sudden_death.as_ref().unwrap().value).collect();
    let decreasing = td.windows(2).all(|w| w[1] < w[0]);
    let (lo, hi) = tc.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    (
        decreasing && hi < 2.0 * lo,
        format!(
            "T_d strictly decreasing: {decreasing} ({:.1} → {:.1} K); T_c spans {lo:.2}–{hi:.2} K, ratio {:.2}",
            td[0],
            td[td.len() - 1],
            hi / lo
        ),
    )
}

fn run_sweep(threads: &str, dir: &Path) -> (Duration, Vec<u8>, bool) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_cascade-discord"))
        .args(["sweep-temperature", "--points", "100", "--threads", threads, "--out"])
        .arg(dir)
        .output()
        .unwrap()
        .status;
    let elapsed = start.elapsed();
    (elapsed, std::fs::read(dir.join("sweep_temperature.csv")).unwrap(), status.success())
}

fn performance() -> (bool, String) {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let (single, reference, ok1) = run_sweep("1", dirs[0].path());
    let (_, four, ok4) = run_sweep("4", dirs[1].path());
    let (_, eight, ok8) = run_sweep("8", dirs[2].path());
    let identical = reference == four && reference == eight;
    (
        ok1 && ok4 && ok8 && single < Duration::from_secs(10) && identical,
        format!("100 points on 1 worker in {:.2} s; CSVs identical across 1/4/8 workers: {identical}", single.as_secs_f64()),
    )
}

#[test]
fn acceptance() {
    let mut verdicts = vec![
        check("discord oracle equivalence", discord_oracle),
        check("closed forms", closed_forms),
        check("QRT factorization", qrt_factorization),
        check("state validity", state_validity),
    ];
    let p = calibrated();
    verdicts.push(check("temperature sweep shape", || fig2_shape(&p)));
    verdicts.push(check("noise invariance of T_c", || noise_invariance(&p)));
    verdicts.push(check("T_d above T_c over delay", || ordering(&p)));
    verdicts.push(check("delay switch independent of noise", || fig3_analog(&p)));
    verdicts.push(check("critical temperatures vs splitting", || fig5_shape(&p)));
    verdicts.push(check("performance and determinism", performance));

    let failed: Vec<&Verdict> = verdicts.iter().filter(|v| !v.pass).collect();
    println!("{}/{} criteria passed", verdicts.len() - failed.len(), verdicts.len());
    assert!(
        failed.is_empty(),
        "failed: {}",
        failed.iter().map(|v| format!("{} ({})", v.name, v.detail)).collect::<Vec<_>>().join("; ")
    );
}
