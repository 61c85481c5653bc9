//! Acceptance checks. Prints one PASS/FAIL line per criterion and a summary.
//! The exit status is non-zero on failures only with `QQA_ACCEPTANCE_STRICT=1`,
//! so the rest of `cargo test --workspace` still runs. Set
//! `QQA_FULL_ACCEPTANCE=1` to run the weak-regime Bose-Hubbard search at full
//! depth (p=50) instead of the p=20 smoke run.

use std::time::Instant;

use qqa_cli::config::{AppendixBParams, BoseHubbardParams, FigLnParams, ThermalizeParams};
use qqa_cli::experiments::bose_hubbard::{bose_hubbard, exact_reference, BhOutcome};
use qqa_cli::experiments::tables::{appendix_b, fig_ln_rows, table1_rows};
use qqa_cli::experiments::thermalize::{thermalize_points, ThermalPoint, ThetaMode};
use qqa_cli::{run, ExperimentConfig, ExperimentKind, Overrides};
use qqa_core::bosonic::{build_cho, ChoParams};
use qqa_core::encoding::{build_encoding, site_operator, EncodingScheme, Subspace};
use qqa_core::linalg::{c, herm_eig, identity, max_abs, r, trace, ComplexVector};
use qqa_core::metrics::{fidelity, relative_entropy};
use qqa_core::mixers::{named_mixer, MixerName};
use qqa_core::qaoa::{NoiseModel, QaoaProblem};
use qqa_core::thermal::{appendix_a_mixer, gibbs_state, thermofield_double, GibbsSpec};
use qqa_core::{ComplexMatrix, QuantumState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Verdict;

fn main() {
    let checks: [(&str, Check); 10] = [
        ("1 table1 gate counts", c1_gate_counts),
        ("2 table1 log negativity", c2_log_negativity),
        ("3 binary mixer gibbs initialization", c3_appendix_a),
        ("4 coupled oscillator spectrum", c4_appendix_b),
        ("5 thermalization", c5_thermalization),
        ("6 noisy thermalization", c6_noise),
        ("7 bose-hubbard strong regime", c7_bh_strong),
        ("8 bose-hubbard weak regime", c8_bh_weak),
        ("9 property suites", c9_properties),
        ("10 w-state negativity shape", c10_w_state),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {name} ({:.1} s): {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 && std::env::var_os("QQA_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn c1_gate_counts() -> Verdict {
    let start = Instant::now();
    let rows = table1_rows().expect("table1");
    let secs = start.elapsed().as_secs_f64();
    let expected = [2, 2, 4, 4, 4, 4, 0, 12, 12, 12];
    let got: Vec<usize> = rows.iter().map(|r| r.cnot_total()).collect();
    let u2 = rows
        .iter()
        .find(|r| r.mixer == MixerName::UnaryH2)
        .expect("unary-h2 row");
    let split = (u2.cnot_nearest, u2.cnot_long_range);
    let pass = got == expected && split == (8, 4) && secs < 1.0;
    Verdict::new(
        pass,
        format!(
            "totals {got:?}, unary-h2 split {}+{}, {secs:.3} s",
            split.0, split.1
        ),
    )
}

fn c2_log_negativity() -> Verdict {
    let start = Instant::now();
    let rows = table1_rows().expect("table1");
    let secs = start.elapsed().as_secs_f64();
    let expected: [&[f64]; 10] = [
        &[0.0],
        &[0.0],
        &[1.0],
        &[0.58],
        &[1.0],
        &[0.58],
        &[0.0],
        &[0.0, 1.0],
        &[1.0, 1.0],
        &[1.0, 0.0],
    ];
    let mut worst: f64 = 0.0;
    let mut shape_ok = true;
    for (row, want) in rows.iter().zip(expected) {
        if row.ln.len() != want.len() {
            shape_ok = false;
            continue;
        }
        for ((_, got), w) in row.ln.iter().zip(want) {
            worst = worst.max((got - w).abs());
        }
    }
    let pass = shape_ok && worst <= 0.005 && secs < 1.0;
    Verdict::new(pass, format!("max |LN - table| = {worst:.5}, {secs:.3} s"))
}

fn c3_appendix_a() -> Verdict {
    let h = appendix_a_mixer();
    let eig = herm_eig(&h).expect("eig");
    let want = [
        -2.0, -1.0, -1.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0,
    ];
    let spectrum_err = eig
        .values
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut state_err: f64 = 0.0;
    for beta in [0.1f64, 0.5, 2.0] {
        let z = 2.0 * (2.0 * beta).cosh() + 8.0 * beta.cosh() + 6.0;
        let lambda_k = eig.map(|e| r((-beta * e).exp() / z));
        let tfd = thermofield_double(&h, beta).expect("tfd");
        let reduced = tfd.partial_trace(&[0, 1, 2, 3]).expect("trace");
        state_err = state_err.max(max_abs(&(reduced.data() - &lambda_k)));
    }
    let pass = spectrum_err <= 1e-10 && state_err <= 1e-10;
    Verdict::new(
        pass,
        format!("spectrum error {spectrum_err:.2e}, reduced-state error {state_err:.2e}"),
    )
}

fn c4_appendix_b() -> Verdict {
    let o = appendix_b(&AppendixBParams::default()).expect("appendix b");
    let pass =
        o.numeric_sorted.len() == 9 && o.max_level_error <= 1e-9 && o.orthonormality_error <= 1e-9;
    Verdict::new(
        pass,
        format!(
            "{} levels, max level error {:.2e}, orthonormality error {:.2e}",
            o.numeric_sorted.len(),
            o.max_level_error,
            o.orthonormality_error
        ),
    )
}

/// Default instance (ω=2, λ=1, β=0.5, p=5, 16 restarts), evaluated noiselessly
/// and at ε ∈ {0.02, 0.05} with frozen angles. Shared by criteria 5 and 6.
fn thermal_points() -> &'static (Vec<ThermalPoint>, f64) {
    static CELL: std::sync::OnceLock<(Vec<ThermalPoint>, f64)> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let params = ThermalizeParams {
            noise_eps: vec![0.0, 0.02, 0.05],
            ..ThermalizeParams::default()
        };
        let start = Instant::now();
        let pts = thermalize_points(&params).expect("thermalize");
        (pts, start.elapsed().as_secs_f64())
    })
}

fn point(mixer: MixerName) -> &'static ThermalPoint {
    thermal_points()
        .0
        .iter()
        .find(|p| p.mixer == mixer)
        .expect("sweep point")
}

fn c5_thermalization() -> Verdict {
    let (_, secs) = thermal_points();
    let (sym, bin) = (point(MixerName::SymOpt), point(MixerName::BinaryH2));
    let noiseless = |p: &ThermalPoint| {
        p.rows
            .iter()
            .find(|r| r.theta_mode == ThetaMode::Noiseless)
            .unwrap()
            .metrics
            .clone()
    };
    let (ms, mb) = (noiseless(sym), noiseless(bin));
    let refs_ok = [sym, bin].iter().all(|p| {
        p.reference_occupations
            .iter()
            .all(|&n| close(n, 0.48, 0.005))
    });
    let pass = sym.optimum.restarts.len() >= 16
        && ms.fidelity >= 0.90
        && ms.rel_entropy <= 0.18
        && mb.fidelity >= 0.86
        && mb.rel_entropy <= 0.30
        && refs_ok
        && *secs <= 600.0;
    Verdict::new(
        pass,
        format!(
            "symmetric F={:.4} S={:.4}; binary-h2 F={:.4} S={:.4}; reference <n>={:.4}",
            ms.fidelity, ms.rel_entropy, mb.fidelity, mb.rel_entropy, sym.reference_occupations[0]
        ),
    )
}

fn c6_noise() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for mixer in [MixerName::SymOpt, MixerName::BinaryH2] {
        let p = point(mixer);
        let rows: Vec<_> = p
            .rows
            .iter()
            .filter(|r| r.theta_mode != ThetaMode::Reoptimized)
            .collect();
        let f: Vec<f64> = rows.iter().map(|r| r.metrics.fidelity).collect();
        let monotone = f.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let in_band = rows
            .iter()
            .filter(|r| r.epsilon > 0.0)
            .all(|r| (0.80..=0.95).contains(&r.metrics.fidelity));
        pass &= monotone && in_band;
        let noisy: Vec<String> = rows
            .iter()
            .filter(|r| r.epsilon > 0.0)
            .map(|r| {
                format!(
                    "eps={} F={:.4} (feasible-projected F={:.4}, leak={:.3})",
                    r.epsilon,
                    r.metrics.fidelity,
                    r.metrics.fidelity_feasible,
                    r.metrics.infeasible_weight
                )
            })
            .collect();
        parts.push(format!(
            "{mixer} [{} CNOT/layer]: {}",
            p.mixer_cnots_per_layer,
            noisy.join(", ")
        ));
    }
    Verdict::new(pass, format!("band [0.80, 0.95]; {}", parts.join("; ")))
}

fn best_per_scheme(o: &BhOutcome, scheme: EncodingScheme) -> (f64, f64) {
    o.runs
        .iter()
        .filter(|r| r.mixer.scheme() == scheme)
        .map(|r| (r.fidelity_vacuum, r.fidelity_exact))
        .fold((0.0, 0.0), |(a, b), (x, y)| (a.max(x), b.max(y)))
}

fn c7_bh_strong() -> Verdict {
    let deep = bose_hubbard(&BoseHubbardParams::default()).expect("p=10");
    let shallow = bose_hubbard(&BoseHubbardParams {
        layers_p: 2,
        ..BoseHubbardParams::default()
    })
    .expect("p=2");
    let mut pass = true;
    let mut parts = Vec::new();
    for scheme in [EncodingScheme::Symmetric, EncodingScheme::Binary] {
        let (v10, e10) = best_per_scheme(&deep, scheme);
        let (v2, e2) = best_per_scheme(&shallow, scheme);
        pass &= v10 >= 0.93 && v2 >= 0.90;
        parts.push(format!(
            "{}: vacuum F p=10 {v10:.4}, p=2 {v2:.4} (exact-ground F p=10 {e10:.4}, p=2 {e2:.4})",
            scheme.name()
        ));
    }
    Verdict::new(
        pass,
        format!(
            "{}; exact ground energy {:.4} with <n>={:.3}, vacuum energy 0",
            parts.join("; "),
            deep.reference.energy,
            deep.reference.occupations[0]
        ),
    )
}

fn c8_bh_weak() -> Verdict {
    let full = std::env::var_os("QQA_FULL_ACCEPTANCE").is_some_and(|v| !v.is_empty() && v != "0");
    let layers_p = if full { 50 } else { 20 };
    let params = BoseHubbardParams {
        hop_j: 10.0,
        onsite_u: 1.0,
        chem_mu: -12.5,
        layers_p,
        write_trace: false,
        ..BoseHubbardParams::default()
    };
    let target = [0.28, 0.72, 0.72, 0.28];
    let exact = exact_reference(&params).expect("exact");
    let exact_ok = exact
        .occupations
        .iter()
        .zip(target)
        .all(|(n, t)| close(*n, t, 0.005));
    let start = Instant::now();
    let o = bose_hubbard(&params).expect("qaoa");
    let secs = start.elapsed().as_secs_f64();
    let (best, dev) = o
        .runs
        .iter()
        .map(|r| {
            let d = r
                .final_occupations()
                .iter()
                .zip(target)
                .map(|(n, t)| (n - t).abs())
                .fold(0.0, f64::max);
            (r.mixer, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("runs");
    let exact_txt = format!(
        "exact <n>=({:.4}, {:.4})",
        exact.occupations[0], exact.occupations[1]
    );
    let qaoa_txt = format!("best mixer {best} max |<n>-target| = {dev:.3}, {secs:.0} s");
    if full {
        let pass = exact_ok && dev <= 0.06 && secs <= 3600.0;
        Verdict::new(pass, format!("[p=50] {exact_txt}; {qaoa_txt}"))
    } else {
        let pass = exact_ok && secs <= 300.0;
        Verdict::new(
            pass,
            format!("[smoke p=20, occupancy tolerance applies at p=50 via QQA_FULL_ACCEPTANCE=1] {exact_txt}; {qaoa_txt}"),
        )
    }
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> QuantumState {
    let a = ComplexMatrix::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &a * a.adjoint() + identity(n).scale(1e-3);
    let tr = trace(&m).re;
    QuantumState::density(m.unscale(tr)).expect("density")
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + a.adjoint()).scale(0.5)
}

fn csv_files(dir: &std::path::Path) -> Vec<(std::path::PathBuf, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .expect("dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().map(Into::into).unwrap_or_default(),
                std::fs::read(&p).expect("read"),
            )
        })
        .collect();
    out.sort();
    out
}

fn c9_properties() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();

    let mut iso: f64 = 0.0;
    for scheme in EncodingScheme::ALL {
        for d in 2..=8 {
            let m = build_encoding(scheme, d).expect("encoding").isometry;
            iso = iso.max(max_abs(&(m.adjoint() * &m - identity(d))));
        }
    }
    if iso > 1e-12 {
        failures.push(format!("isometry {iso:.1e}"));
    }

    let names = [
        MixerName::BinaryH1,
        MixerName::BinaryH2,
        MixerName::BinaryH3,
        MixerName::SymH1,
        MixerName::SymH2,
        MixerName::SymH3,
        MixerName::SymOpt,
        MixerName::UnaryH1,
        MixerName::UnaryH2,
        MixerName::UnaryH3,
    ];
    let mut leak: f64 = 0.0;
    for draw in 0..100 {
        let name = names[draw % names.len()];
        let map = build_encoding(name.scheme(), 3).expect("encoding");
        let sub = Subspace::from_maps(&[map.clone(), map.clone()]);
        let single = named_mixer(name, 3).expect("mixer").matrix;
        let blocks = [map.num_qubits, map.num_qubits];
        let hm = site_operator(&single, 0, &blocks).expect("site")
            + site_operator(&single, 1, &blocks).expect("site");
        let hc = build_cho(
            &ChoParams {
                omega1: 2.0,
                omega2: 2.0,
                lambda: 1.0,
                cutoff_nc: 2,
            },
            &map,
        )
        .expect("cho");
        let amps = ComplexVector::from_fn(sub.dim(), |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let initial =
            QuantumState::pure_normalized(sub.lift_vector(&amps).expect("lift")).expect("state");
        let p = rng.gen_range(1..=6);
        let theta: Vec<f64> = (0..2 * p).map(|_| rng.gen_range(-3.2..3.2)).collect();
        let out = QaoaProblem::new(initial, hc, hm, None)
            .expect("problem")
            .state(&theta, &NoiseModel::NONE)
            .expect("state");
        leak = leak.max(out.leakage(&sub.projector()).expect("leakage"));
    }
    if leak > 1e-10 {
        failures.push(format!("mixer leakage {leak:.1e}"));
    }

    let (mut purif, mut gibbs_err, mut axioms, mut cost_inv): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0);
    for k in 1..=3 {
        for _ in 0..5 {
            let n = 1 << k;
            let h = random_hermitian(&mut rng, n);
            let beta = rng.gen_range(0.0..3.0);
            let g = gibbs_state(&GibbsSpec::new(h.clone(), beta)).expect("gibbs");
            let keep: Vec<usize> = (0..k).collect();
            let red = thermofield_double(&h, beta)
                .expect("tfd")
                .partial_trace(&keep)
                .expect("trace");
            purif = purif.max(max_abs(&(red.data() - g.data())));
            let min_eig = herm_eig(g.data()).expect("eig").values[0];
            gibbs_err = gibbs_err
                .max((trace(g.data()).re - 1.0).abs())
                .max((-min_eig).max(0.0));

            let (a, b) = (random_density(&mut rng, n), random_density(&mut rng, n));
            let f_ab = fidelity(&a, &b).expect("fidelity");
            let f_ba = fidelity(&b, &a).expect("fidelity");
            let s_ab = relative_entropy(&a, &b).expect("entropy");
            axioms = axioms
                .max((f_ab - f_ba).abs())
                .max((fidelity(&a, &a).expect("fidelity") - 1.0).abs())
                .max((-s_ab).max(0.0))
                .max(relative_entropy(&a, &a).expect("entropy").abs())
                .max((f_ab - 1.0).max(0.0));

            let hm = random_hermitian(&mut rng, n);
            let gamma = rng.gen_range(-3.0..3.0);
            let after = QaoaProblem::new(a.clone(), h.clone(), hm, None)
                .expect("problem")
                .state(&[gamma, 0.0], &NoiseModel::NONE)
                .expect("state");
            cost_inv = cost_inv
                .max((after.expectation(&h).expect("e") - a.expectation(&h).expect("e")).abs());
        }
    }
    for (label, v, tol) in [
        ("purification", purif, 1e-12),
        ("gibbs trace/psd", gibbs_err, 1e-12),
        ("fidelity/entropy axioms", axioms, 1e-9),
        ("cost energy invariance", cost_inv, 1e-10),
    ] {
        if v > tol {
            failures.push(format!("{label} {v:.1e}"));
        }
    }

    let mut cfg = ExperimentConfig::new(ExperimentKind::Thermalize);
    cfg.parameters = serde_json::json!({
        "layers": [2],
        "noise_eps": [0.0, 0.02],
        "optimizer": {"seed": 3, "restarts": 2, "max_evals": 300, "tol": 1e-6}
    });
    let dirs = (
        tempfile::tempdir().expect("tmp"),
        tempfile::tempdir().expect("tmp"),
    );
    run(&cfg, &Overrides::default())
        .expect("run")
        .write(dirs.0.path())
        .expect("write");
    run(&cfg, &Overrides::default())
        .expect("run")
        .write(dirs.1.path())
        .expect("write");
    let (fa, fb) = (csv_files(dirs.0.path()), csv_files(dirs.1.path()));
    if fa.is_empty() || fa != fb {
        failures.push("csv output differs between runs".into());
    }

    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < 30.0;
    let detail = if failures.is_empty() {
        format!("isometry {iso:.1e}, leakage {leak:.1e}, purification {purif:.1e}, axioms {axioms:.1e}, {} csv files identical", fa.len())
    } else {
        failures.join(", ")
    };
    Verdict::new(pass, detail)
}

/// `log₂(1 + 2√(j(K-j))/K)`: the W state has two Schmidt coefficients
/// `√(j/K)` and `√((K-j)/K)` across a `j | K-j` cut.
fn w_ln(k: usize, j: usize) -> f64 {
    (1.0 + 2.0 * ((j * (k - j)) as f64).sqrt() / k as f64).log2()
}

fn c10_w_state() -> Verdict {
    let rows = fig_ln_rows(&FigLnParams { max_qubits: 7 }).expect("ln rows");
    let mut pass = true;
    let mut oracle: f64 = 0.0;
    for k in 2..=7 {
        let ln: Vec<f64> = (1..k)
            .map(|j| {
                rows.iter()
                    .find(|r| r.num_qubits == k && r.j == j)
                    .expect("row")
                    .ln
            })
            .collect();
        let at = |j: usize| ln[j - 1];
        let symmetric = (1..k).all(|j| close(at(j), at(k - j), 1e-10));
        let peak = at(k / 2);
        let balanced_max = ln.iter().all(|&v| v <= peak + 1e-12);
        pass &= symmetric && balanced_max;
        for j in 1..k {
            oracle = oracle.max((at(j) - w_ln(k, j)).abs());
        }
    }
    pass &= oracle <= 1e-10;
    Verdict::new(
        pass,
        format!("K=2..7 symmetric and peaked at j=K/2; closed-form deviation {oracle:.1e}"),
    )
}
