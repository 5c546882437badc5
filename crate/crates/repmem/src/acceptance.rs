//! Cross-validation suite: oracle equivalence between the simulator and the
//! closed forms, reproduction of published numbers, and qualitative scan
//! checks. Used by `repmem verify` and by the acceptance integration test.
//!
//! Every check is deterministic: random parameter points come from a
//! fixed-seed ChaCha stream, so repeated runs print identical output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{self, ClosedFormParams};
use crate::channels::{self, NoiseParams};
use crate::circuits::{
    average_fidelity, run_protocol, CodeKind, Decomposition, ProtocolSpec,
};
use crate::densmat::{self, cr, DensityMatrix, PureState};
use crate::scan;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} - {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.name,
            self.detail
        )
    }
}

/// Runs every acceptance criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1_oracle_equivalence(),
        criterion_2_published_numbers(),
        criterion_3_gate_error_coefficients(),
        criterion_4_structural_properties(),
        criterion_5_code_size_map(),
        criterion_6_cycle_count_map(),
        criterion_7_channel_correctness(),
        criterion_8_infinite_cycle_limit(),
    ]
}

fn sample_params(rng: &mut ChaCha8Rng) -> ClosedFormParams {
    // Log-uniform over the regimes the closed forms cover; one point in ten
    // exercises the infinite-T1 (pure dephasing) sentinel.
    let t2star = (rng.gen::<f64>() * (3.0f64 / 0.5).ln() + 0.5f64.ln()).exp();
    let t1 = if rng.gen::<f64>() < 0.1 {
        f64::INFINITY
    } else {
        (rng.gen::<f64>() * (50.0f64 / 0.5).ln() + 0.5f64.ln()).exp()
    };
    let t = t2star * (rng.gen::<f64>() * (2.0f64 / 0.01).ln() + 0.01f64.ln()).exp();
    ClosedFormParams::new(t1, t2star, t).unwrap()
}

fn ideal_spec(code: CodeKind, n: usize, cycles: usize, reset: bool, p: &ClosedFormParams) -> ProtocolSpec {
    ProtocolSpec {
        code,
        n,
        decomposition: Decomposition::Ideal,
        cycles,
        reset,
        noise: NoiseParams::new(p.t1, p.t2star, 0.0, 0.0).unwrap(),
        t_tot: p.t,
    }
}

/// Criterion 1: simulated average fidelity equals the closed forms for the
/// idle qubit, one bit-flip cycle, one phase-flip cycle, n-qubit phase-flip
/// codes, N reset cycles, and the two-cycle no-reset case, |delta| < 1e-10
/// on >= 100 random parameter points each.
pub fn criterion_1_oracle_equivalence() -> CriterionResult {
    const TOL: f64 = 1e-10;
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    let mut fail = String::new();
    let mut check = |label: &str, sim: f64, formula: f64| {
        let d = (sim - formula).abs();
        worst = worst.max(d);
        count += 1;
        if d >= TOL && fail.is_empty() {
            fail = format!("{label}: |{sim} - {formula}| = {d:.3e}");
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let p = sample_params(&mut rng);
        let sim = average_fidelity(&ideal_spec(CodeKind::PhaseFlip, 1, 1, true, &p)).unwrap();
        check("idle", sim, analytic::f_idle(&p));
    }
    for _ in 0..100 {
        let p = sample_params(&mut rng);
        let sim = average_fidelity(&ideal_spec(CodeKind::BitFlip, 3, 1, true, &p)).unwrap();
        check("bit", sim, analytic::f_bit(&p));
    }
    for _ in 0..100 {
        let p = sample_params(&mut rng);
        let sim = average_fidelity(&ideal_spec(CodeKind::PhaseFlip, 3, 1, true, &p)).unwrap();
        check("phase", sim, analytic::f_phase(&p));
    }
    for n in [1usize, 3, 5, 7] {
        for _ in 0..100 {
            let p = sample_params(&mut rng);
            let sim = average_fidelity(&ideal_spec(CodeKind::PhaseFlip, n, 1, true, &p)).unwrap();
            check(&format!("phase,n={n}"), sim, analytic::f_phase_n(n, &p).unwrap());
        }
    }
    // One nine-qubit spot check (512 x 512 register).
    {
        let p = ClosedFormParams::new(100.0, 1.0, 0.15).unwrap();
        let sim = average_fidelity(&ideal_spec(CodeKind::PhaseFlip, 9, 1, true, &p)).unwrap();
        check("phase,n=9", sim, analytic::f_phase_n(9, &p).unwrap());
    }
    for n_cycles in 1..=4usize {
        for _ in 0..100 {
            let p = sample_params(&mut rng);
            let sim =
                average_fidelity(&ideal_spec(CodeKind::PhaseFlip, 3, n_cycles, true, &p)).unwrap();
            check(
                &format!("reset,N={n_cycles}"),
                sim,
                analytic::f_phase_reset(n_cycles, &p).unwrap(),
            );
        }
    }
    for _ in 0..100 {
        let p = sample_params(&mut rng);
        let sim = average_fidelity(&ideal_spec(CodeKind::PhaseFlip, 3, 2, false, &p)).unwrap();
        check("noreset,N=2", sim, analytic::f_phase_noreset_2(&p));
    }

    CriterionResult {
        index: 1,
        name: "oracle equivalence of simulator and closed forms",
        passed: fail.is_empty(),
        detail: if fail.is_empty() {
            format!("{count} simulated protocols, max |sim - formula| = {worst:.2e} (tol 1e-10)")
        } else {
            fail
        },
    }
}

fn round_sig2(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mag = 10f64.powi(x.abs().log10().floor() as i32 - 1);
    (x / mag).round() * mag
}

/// Criterion 2: semiconductor-regime numbers. Idle fidelities round to 0.97
/// and 0.79; the break-even lines reproduce (0.0067, 1.1) and (0.019, 1.3)
/// at two significant figures.
pub fn criterion_2_published_numbers() -> CriterionResult {
    let mut problems = Vec::new();
    let p01 = ClosedFormParams::new(f64::INFINITY, 1.0, 0.1).unwrap();
    let p10 = ClosedFormParams::new(f64::INFINITY, 1.0, 1.0).unwrap();
    let fi01 = analytic::f_idle(&p01);
    let fi10 = analytic::f_idle(&p10);
    if format!("{fi01:.2}") != "0.97" {
        problems.push(format!("f_idle(0.1) = {fi01} does not round to 0.97"));
    }
    if format!("{fi10:.2}") != "0.79" {
        problems.push(format!("f_idle(1) = {fi10} does not round to 0.79"));
    }
    let line01 = analytic::breakeven_inequality(Decomposition::Cscz, &p01);
    let line10 = analytic::breakeven_inequality(Decomposition::Cscz, &p10);
    for (name, got, want) in [
        ("c0(t=0.1)", line01.c0, 0.0067),
        ("c1(t=0.1)", line01.c1, 1.1),
        ("c0(t=1)", line10.c0, 0.019),
        ("c1(t=1)", line10.c1, 1.3),
    ] {
        let rounded = round_sig2(got);
        if (rounded - want).abs() > 1e-12 {
            problems.push(format!("{name} = {got:.6} rounds to {rounded}, want {want}"));
        }
    }
    CriterionResult {
        index: 2,
        name: "published break-even numbers",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "f_idle -> {fi01:.4}/{fi10:.4}; lines p2 < {} - {} p1 and p2 < {} - {} p1 (2 s.f.)",
                round_sig2(line01.c0),
                round_sig2(line01.c1),
                round_sig2(line10.c0),
                round_sig2(line10.c1)
            )
        } else {
            problems.join("; ")
        },
    }
}

/// Criterion 3: the single-faulty-gate extractor reproduces the closed-form
/// gate-error coefficients: CS-CZ gives 40/9 and 184/45 at t = 0 and matches
/// the time-dependent forms at 20 random points within 1e-10; the CNOT
/// circuit gives 184/45 for f2, and its t = 0 f1 settles which of the two
/// historically reported values (10/3 versus 20/3) the circuit realizes.
pub fn criterion_3_gate_error_coefficients() -> CriterionResult {
    const TOL: f64 = 1e-10;
    let mut problems = Vec::new();
    let zero = ClosedFormParams::new(f64::INFINITY, 1.0, 0.0).unwrap();

    let (f1_cscz0, f2_cscz0) =
        scan::extract_linear_coefficients(Decomposition::Cscz, &zero).unwrap();
    if (f1_cscz0 - 40.0 / 9.0).abs() >= TOL {
        problems.push(format!("CSCZ f1(0) = {f1_cscz0} != 40/9"));
    }
    if (f2_cscz0 - 184.0 / 45.0).abs() >= TOL {
        problems.push(format!("CSCZ f2(0) = {f2_cscz0} != 184/45"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = sample_params(&mut rng);
        let (f1_num, f2_num) =
            scan::extract_linear_coefficients(Decomposition::Cscz, &p).unwrap();
        let (f1_eq, f2_eq) = analytic::gate_error_coefficients(Decomposition::Cscz, &p);
        worst = worst.max((f1_num - f1_eq).abs()).max((f2_num - f2_eq).abs());
    }
    if worst >= TOL {
        problems.push(format!("CSCZ coefficient mismatch {worst:.3e} at t > 0"));
    }

    let (f1_cnot0, f2_cnot0) =
        scan::extract_linear_coefficients(Decomposition::Cnot, &zero).unwrap();
    if (f2_cnot0 - 184.0 / 45.0).abs() >= TOL {
        problems.push(format!("CNOT f2(0) = {f2_cnot0} != 184/45"));
    }
    let cnot_f1_resolution = if (f1_cnot0 - 20.0 / 3.0).abs() < TOL {
        "20/3 (the coefficient expression's value; the alternative 10/3 is inconsistent with the circuit)"
    } else if (f1_cnot0 - 10.0 / 3.0).abs() < TOL {
        "10/3"
    } else {
        problems.push(format!(
            "CNOT f1(0) = {f1_cnot0} matches neither 10/3 nor 20/3"
        ));
        "unresolved"
    };

    CriterionResult {
        index: 3,
        name: "gate-error coefficient extraction",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "CSCZ f1 = 40/9, f2 = 184/45 at t = 0; 20-point closed-form match within {worst:.2e}; CNOT f1(0) resolved to {cnot_f1_resolution}"
            )
        } else {
            problems.join("; ")
        },
    }
}

/// 20 x 20 x 5 grid over the coherent storage regime (idle times up to
/// 1.5 T2*). Deep in the classical regime (t beyond ~2.7 T2 with
/// e^{-t/T1} > 1/2) majority voting genuinely beats a single qubit and the
/// bit-flip bound fails by design; see the validation notes.
fn coherent_grid() -> Vec<ClosedFormParams> {
    let mut g = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            for k in 0..5 {
                let t1 = 0.5 * 1.32f64.powi(i);
                let t2star = 0.4 * 1.28f64.powi(j);
                let t = t2star * 0.02 * 2.95f64.powi(k);
                g.push(ClosedFormParams::new(t1, t2star, t).unwrap());
            }
        }
    }
    g
}

/// Criterion 4: structural inequalities. Bit-flip never beats idle on the
/// coherent grid; phase-flip beats idle only for T1 > 2 T2*; the reset
/// fidelity is monotone in N; two no-reset cycles never beat one.
pub fn criterion_4_structural_properties() -> CriterionResult {
    let mut problems = Vec::new();
    let grid = coherent_grid();

    for p in &grid {
        if analytic::f_bit(p) > analytic::f_idle(p) + 1e-12 {
            problems.push(format!(
                "bit-flip beat idle at T1={:.3}, T2*={:.3}, t={:.3}",
                p.t1, p.t2star, p.t
            ));
            break;
        }
    }

    // Phase-flip crossover straddling T1 = 2 T2*: below or at the threshold
    // one cycle never wins at any storage time; above it a winning storage
    // time exists (shrinking to zero as T1 approaches 2 T2* from above).
    let t_grid: Vec<f64> = (0..40).map(|k| 0.002 * 1.22f64.powi(k)).collect();
    for &ratio in &[0.5, 1.0, 1.5, 1.9, 2.0] {
        for &t_frac in &t_grid {
            let p = ClosedFormParams::new(ratio, 1.0, t_frac).unwrap();
            if analytic::f_phase(&p) > analytic::f_idle(&p) + 1e-12 {
                problems.push(format!(
                    "phase-flip beat idle below threshold: T1={ratio}, t={t_frac}"
                ));
            }
        }
    }
    for &ratio in &[2.1, 3.0, 10.0, 100.0] {
        let wins = t_grid.iter().any(|&t_frac| {
            let p = ClosedFormParams::new(ratio, 1.0, t_frac).unwrap();
            analytic::f_phase(&p) > analytic::f_idle(&p)
        });
        if !wins {
            problems.push(format!(
                "phase-flip failed to beat idle above threshold: T1={ratio}"
            ));
        }
    }

    for p in grid.iter().step_by(7) {
        let mut prev = analytic::f_phase_reset(1, p).unwrap();
        for n in 2..=10 {
            let f = analytic::f_phase_reset(n, p).unwrap();
            if f < prev - 1e-12 {
                problems.push(format!(
                    "reset fidelity decreased at N={n}, T1={:.3}, T2*={:.3}, t={:.3}",
                    p.t1, p.t2star, p.t
                ));
                break;
            }
            prev = f;
        }
        if analytic::f_phase_noreset_2(p) > analytic::f_phase(p) + 1e-12 {
            problems.push("two no-reset cycles beat one cycle".into());
        }
    }

    CriterionResult {
        index: 4,
        name: "structural fidelity inequalities",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "checked {} coherent-regime grid points plus crossover straddle",
                grid.len()
            )
        } else {
            problems.truncate(3);
            problems.join("; ")
        },
    }
}

/// Criterion 5: optimal-code-size map on the default grid. White region
/// (n = 1) exactly at T1 <= 2 T2*, codes win somewhere above threshold at
/// short idles, and n > 3 appears only at T1 > 5 T2*.
pub fn criterion_5_code_size_map() -> CriterionResult {
    let (t1s, ts) = scan::default_fig3_grids();
    let res = scan::scan_fig3(&t1s, &ts, 9).unwrap();
    let mut problems = Vec::new();
    let mut any_code_region = false;
    for cell in &res.cells {
        if cell.a <= 2.0 && cell.opt != 1 {
            problems.push(format!("n_opt = {} at T1 = {:.3} <= 2", cell.opt, cell.a));
        }
        if cell.opt >= 3 && cell.a > 2.0 && cell.b < 0.5 {
            any_code_region = true;
        }
        if cell.opt > 3 && cell.a <= 5.0 {
            problems.push(format!("n_opt = {} at T1 = {:.3} <= 5", cell.opt, cell.a));
        }
        if cell.f_best < cell.f_idle - 1e-12 {
            problems.push("best fidelity below idle".into());
        }
    }
    if !any_code_region {
        problems.push("no region with n_opt >= 3 found".into());
    }
    CriterionResult {
        index: 5,
        name: "optimal code-size map (fig. 3 regions)",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "{} cells: n=1 wherever T1 <= 2T2*, codes win at short idles above it, n>3 only beyond T1 = 5T2*",
                res.cells.len()
            )
        } else {
            problems.truncate(3);
            problems.join("; ")
        },
    }
}

/// Criterion 6: optimal-cycle-count map at t_tot = 0.1 T2* and t_tot = T2*
/// on a grid straddling the one-cycle threshold T1 = 2 T2*, with a p2 = 0
/// edge: N = 0 wherever T1 <= 2 T2*, N = N_max along the p2 = 0 edge, and
/// row-wise monotonicity in p2.
///
/// Near the threshold this criterion conflicts with the exact model: with
/// vanishing gate error, repeated reset cycles beat the idle qubit slightly
/// below T1 = 2 T2* (the threshold is a one-cycle statement). The check is
/// run as stated and reports those cells when they appear.
pub fn criterion_6_cycle_count_map() -> CriterionResult {
    let n_max = 8;
    let mut t1s = vec![1.0, 1.5, 1.8, 2.0];
    t1s.extend(scan::log_grid(2.4, 100.0, 8));
    let mut p2s = vec![0.0];
    p2s.extend(scan::log_grid(1e-4, 1e-1, 10));
    let mut problems = Vec::new();
    let mut cells_total = 0usize;
    for &t_tot in &[0.1, 1.0] {
        let res = scan::scan_fig4(t_tot, &t1s, &p2s, n_max, Decomposition::Cscz).unwrap();
        cells_total += res.cells.len();
        for (ia, &t1) in t1s.iter().enumerate() {
            // Row-wise monotonicity in p2.
            let mut prev = usize::MAX;
            for ib in 0..p2s.len() {
                let c = res.cell(ia, ib);
                if c.opt > prev {
                    problems.push(format!(
                        "t_tot={t_tot}: optimal N increased with p2 at T1={t1:.2}, p2={:.1e}",
                        c.b
                    ));
                }
                prev = c.opt;
            }
            // White region below the one-cycle threshold.
            if t1 <= 2.0 {
                for ib in 0..p2s.len() {
                    let c = res.cell(ia, ib);
                    if c.opt != 0 {
                        problems.push(format!(
                            "t_tot={t_tot}: N_opt={} at T1={t1:.2} <= 2T2*, p2={:.1e} (code beats idle by {:.1e})",
                            c.opt,
                            c.b,
                            c.f_best - c.f_idle
                        ));
                    }
                }
            } else {
                // Perfect-gate edge: cycling as often as possible wins.
                let c = res.cell(ia, 0);
                if c.opt != n_max {
                    problems.push(format!(
                        "t_tot={t_tot}: p2=0 edge gave N={} at T1={t1:.2}, want {n_max}",
                        c.opt
                    ));
                }
            }
        }
    }
    CriterionResult {
        index: 6,
        name: "optimal cycle-count map (fig. 4 regions)",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{cells_total} simulated cells satisfy all three region checks")
        } else {
            let n = problems.len();
            problems.truncate(4);
            format!(
                "{n} cell(s) violate the white-region statement: {}. The T1 > 2T2* \
                 condition is a one-cycle result; with near-perfect gates, repeated \
                 reset cycles beat the idle qubit in a thin strip at and slightly \
                 below the threshold (closed form and simulation agree there), so \
                 the region statement cannot hold exactly at the boundary",
                problems.join("; ")
            )
        },
    }
}

/// Criterion 7: channel correctness. Completeness within 1e-12, the damping
/// channel reproduces the single-qubit decay map entrywise, and the
/// six-state average agrees with a 10^4-sample Monte-Carlo Bloch-sphere
/// average within three standard errors for five random protocols.
pub fn criterion_7_channel_correctness() -> CriterionResult {
    let mut problems = Vec::new();

    // Completeness across parameter sweeps (constructors also enforce it).
    let mut worst_cptp: f64 = 0.0;
    let mut cptp = |ch: channels::KrausChannel| {
        let dim = 1usize << ch.arity();
        let mut acc = densmat::CMat::zeros((dim, dim));
        for op in ch.operators() {
            acc += &densmat::dagger(op).dot(op);
        }
        worst_cptp = worst_cptp.max(densmat::max_abs_diff(&acc, &densmat::identity(dim)));
    };
    for &p in &[0.0, 0.1, 0.5, 1.0] {
        cptp(channels::depolarizing_1q(p).unwrap());
        cptp(channels::depolarizing_2q(p).unwrap());
    }
    for &(t1, t2s, t) in &[
        (1.0, 1.0, 0.5),
        (10.0, 0.3, 2.0),
        (f64::INFINITY, 1.0, 1.0),
        (2.0, f64::INFINITY, 0.7),
    ] {
        cptp(channels::damping_channel(t1, t2s, t).unwrap());
    }
    if worst_cptp > 1e-12 {
        problems.push(format!("completeness deviation {worst_cptp:.3e}"));
    }

    // Damping channel reproduces the decay map entrywise on random states.
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut worst_map: f64 = 0.0;
    for _ in 0..20 {
        let (t1, t2star, t) = (
            0.5 + 5.0 * rng.gen::<f64>(),
            0.3 + 2.0 * rng.gen::<f64>(),
            2.0 * rng.gen::<f64>(),
        );
        let ch = channels::damping_channel(t1, t2star, t).unwrap();
        let psi = random_bloch_state(&mut rng);
        let lam: f64 = rng.gen();
        let rho = DensityMatrix::new(
            DensityMatrix::from_pure(&psi).mat() * cr(lam)
                + DensityMatrix::maximally_mixed(1).mat() * cr(1.0 - lam),
        )
        .unwrap();
        let out = channels::apply_channel(&rho, &ch, &[0]).unwrap();
        let inv_t2 = 1.0 / t2star + 1.0 / (2.0 * t1);
        let (e1, e2) = ((-t / t1).exp(), (-t * inv_t2).exp());
        let m = rho.mat();
        let want = ndarray::array![
            [cr(1.0) - m[(1, 1)] * cr(e1), m[(0, 1)] * cr(e2)],
            [m[(1, 0)] * cr(e2), m[(1, 1)] * cr(e1)]
        ];
        worst_map = worst_map.max(densmat::max_abs_diff(out.mat(), &want));
    }
    if worst_map > 1e-12 {
        problems.push(format!("damping map deviation {worst_map:.3e}"));
    }

    // Six-state average vs Monte-Carlo Bloch average, five random protocols.
    // Protocol parameters and sample states come from separate streams.
    let mut worst_sigma: f64 = 0.0;
    for k in 0..5 {
        let mut prng = ChaCha8Rng::seed_from_u64(1000 + k);
        let spec = ProtocolSpec {
            code: if prng.gen::<bool>() {
                CodeKind::PhaseFlip
            } else {
                CodeKind::BitFlip
            },
            n: 3,
            decomposition: [Decomposition::Ideal, Decomposition::Cnot, Decomposition::Cscz]
                [prng.gen_range(0..3)],
            cycles: prng.gen_range(1..=3),
            reset: prng.gen::<bool>(),
            noise: NoiseParams::new(
                0.5 + 10.0 * prng.gen::<f64>(),
                0.3 + 2.0 * prng.gen::<f64>(),
                0.05 * prng.gen::<f64>(),
                0.05 * prng.gen::<f64>(),
            )
            .unwrap(),
            t_tot: prng.gen::<f64>(),
        };
        let six = average_fidelity(&spec).unwrap();
        let mut srng = ChaCha8Rng::seed_from_u64(5000 + k);
        let n_samples = 10_000usize;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n_samples {
            let psi = random_bloch_state(&mut srng);
            let out = run_protocol(&spec, &psi).unwrap();
            let f = densmat::fidelity(&psi, &densmat::partial_trace(&out, &[0]).unwrap()).unwrap();
            sum += f;
            sum2 += f * f;
        }
        let mean = sum / n_samples as f64;
        let var = (sum2 / n_samples as f64 - mean * mean).max(0.0);
        let se = (var / n_samples as f64).sqrt().max(1e-12);
        let sigmas = (six - mean).abs() / se;
        worst_sigma = worst_sigma.max(sigmas);
        if sigmas > 3.0 {
            problems.push(format!(
                "protocol {k}: 2-design {six:.6} vs MC {mean:.6} differs by {sigmas:.1} SE"
            ));
        }
    }

    CriterionResult {
        index: 7,
        name: "channel correctness and 2-design average",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "completeness <= {worst_cptp:.1e}, decay map <= {worst_map:.1e}, MC agreement <= {worst_sigma:.2} SE"
            )
        } else {
            problems.join("; ")
        },
    }
}

fn random_bloch_state(rng: &mut ChaCha8Rng) -> PureState {
    let u: f64 = 2.0 * rng.gen::<f64>() - 1.0; // cos(theta), uniform
    let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let theta = u.acos();
    PureState::qubit(
        cr((theta / 2.0).cos()),
        densmat::C64::from_polar((theta / 2.0).sin(), phi),
    )
    .unwrap()
}

/// Criterion 8: the N-cycle reset formula approaches its infinite-cycle
/// limit (2 + e^{-3 t/T1})/3 within 1e-3 by N = 10^4, at ten parameter
/// points.
pub fn criterion_8_infinite_cycle_limit() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = sample_params(&mut rng);
        let f = analytic::f_phase_reset(10_000, &p).unwrap();
        let lim = analytic::f_phase_reset_limit(&p);
        worst = worst.max((f - lim).abs());
    }
    CriterionResult {
        index: 8,
        name: "infinite-cycle limit of the reset formula",
        passed: worst < 1e-3,
        detail: format!("max |F(10^4) - limit| = {worst:.2e} over 10 points (tol 1e-3)"),
    }
}
