//! Acceptance run: one PASS/FAIL line per criterion, each with its runtime
//! budget. Built with `harness = false` so the lines always print.

mod common;

use std::time::{Duration, Instant};

use markovscope::channel::{
    change_basis, compose, determinant, mix, unitary_channel, verify_channel, ChannelMatrix, OperatorBasis,
};
use markovscope::divisibility::td_markovian_check;
use markovscope::lindblad::{evolve, generator_from_parts, is_lindblad_generator, GeneratorMatrix};
use markovscope::linalg::{adjoint, kron, CMat};
use markovscope::markov::{
    isotropic_noise_generator, markovian_check, markovian_check_spectral, markovianity_measure, noisy_generator,
    MarkovOptions, Verdict,
};
use markovscope::spectral::{branch_log, eigendecompose, fractional_power, BranchIndex};
use markovscope::superop::involution_gamma;
use markovscope::zoo::{
    figure2a_mixture, jc_channel, random_channel, random_lindblad, random_unitary, sample_seed,
    transpose_approximation, JCParams,
};
use markovscope::{Complex64, Tolerances};
use rand::Rng;
use rayon::prelude::*;

use common::{close, gaussian, hermitian, kraus_channel, random_density, rng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn opts() -> MarkovOptions {
    MarkovOptions::default()
}

/// Random channels that have a Hermitian logarithm family, by seed order.
fn channels_with_log(d: usize, base: u64, count: usize, want: impl Fn(Verdict) -> bool) -> Vec<ChannelMatrix<f64>> {
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let t = random_channel::<f64>(d, sample_seed(base, i)).unwrap();
        i += 1;
        if let Ok(r) = markovian_check(&t, &opts()) {
            if want(r.verdict) {
                out.push(t);
            }
        }
    }
    out
}

fn has_log(v: Verdict) -> bool {
    matches!(v, Verdict::Markovian | Verdict::NotMarkovian)
}

fn criterion_1() -> Outcome {
    let t = transpose_approximation::<f64>();
    let det = determinant(&t, 1e-12).unwrap();
    let m = markovianity_measure(&t, &opts()).unwrap();
    let td = td_markovian_check(&t, 1e-9).unwrap().td_markovian;
    let pass = (det + 1.0 / 27.0).abs() <= 1e-12 && m == 0.0 && !td;
    outcome(pass, format!("det = {det:.15}, M = {m}, td_markovian = {td}"))
}

fn criterion_2() -> Outcome {
    let mut ok = 0;
    let mut failures = Vec::new();
    for k in 0..200u64 {
        let d = if k % 2 == 0 { 2 } else { 3 };
        let mut r = rng(1000 + k);
        let scale = 0.05 + 0.95 * r.random::<f64>();
        let l = random_lindblad::<f64>(d, 2000 + k, scale).unwrap();
        match markovian_check(&evolve(&l, 1.0).unwrap(), &opts()) {
            Ok(rep) if rep.is_markovian() && rep.mu_min <= 1e-6 => ok += 1,
            Ok(rep) => failures.push(format!("#{k} d={d}: {} mu_min={:e}", rep.verdict, rep.mu_min)),
            Err(e) => failures.push(format!("#{k} d={d}: {e}")),
        }
    }
    let mut detail = format!("{ok}/200 MARKOVIAN with mu_min <= 1e-6");
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join(", ")));
    }
    outcome(ok >= 199, detail)
}

/// `H` and `G = U·diag(g)·U†` with `g > 0`, or with one entry `≤ −0.05`.
fn hp_unital_generator(d: usize, seed: u64, valid: bool) -> GeneratorMatrix<f64> {
    let mut r = rng(seed);
    let n = d * d - 1;
    let h = hermitian(&mut r, d).mapv(|z| z * 0.5);
    let mut g: Vec<f64> = (0..n).map(|_| 0.05 + r.random::<f64>()).collect();
    if !valid {
        let k = r.random_range(0..n);
        g[k] = -0.05 - 0.5 * r.random::<f64>();
    }
    let u = random_unitary::<f64>(n, seed ^ 0xABCD);
    let diag = CMat::from_shape_fn((n, n), |(i, j)| if i == j { Complex64::new(g[i], 0.0) } else { Complex64::new(0.0, 0.0) });
    generator_from_parts(&h, &u.dot(&diag).dot(&adjoint(&u))).unwrap()
}

fn criterion_3() -> Outcome {
    let times = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
    let mut agree = 0;
    let mut bad = Vec::new();
    let (mut n_valid, mut n_invalid) = (0, 0);
    for k in 0..200u64 {
        let d = if k % 2 == 0 { 2 } else { 3 };
        let l = hp_unital_generator(d, 3000 + k, k % 4 < 2);
        let rep = is_lindblad_generator(&l, 1e-9);
        assert!(rep.hermitian && rep.unital_adjoint);
        let cp_all = times.iter().all(|&t| verify_channel(&evolve(&l, t).unwrap(), 1e-8).completely_positive);
        if rep.valid {
            n_valid += 1;
        } else {
            n_invalid += 1;
        }
        if rep.valid == cp_all {
            agree += 1;
        } else {
            bad.push(format!("#{k}"));
        }
    }
    outcome(
        agree == 200,
        format!("{agree}/200 agree ({n_valid} valid, {n_invalid} invalid){}", if bad.is_empty() { String::new() } else { format!("; disagree: {}", bad.join(" ")) }),
    )
}

fn criterion_4() -> Outcome {
    let ms: Vec<(f64, f64)> = (0..=100)
        .map(|k| {
            let p = k as f64 / 100.0;
            (p, markovianity_measure(&figure2a_mixture(p).unwrap(), &opts()).unwrap())
        })
        .collect();
    let (m0, m1) = (ms[0].1, ms[100].1);
    let (p_min, m_min) = ms.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let pass = m0 >= 1.0 - 1e-6 && m1 >= 1.0 - 1e-6 && m_min < 1.0 - 1e-3;
    outcome(pass, format!("M(0) = {m0}, M(1) = {m1}, min M = {m_min:.6} at p = {p_min:.2}"))
}

fn criterion_5() -> Outcome {
    let p = JCParams::<f64>::figure();
    let ts: Vec<f64> = (1..=200).map(|k| k as f64 * 0.1).collect();
    let ms: Vec<f64> = ts.iter().map(|&t| markovianity_measure(&jc_channel(t, &p).unwrap(), &opts()).unwrap()).collect();
    let low: Vec<usize> = (0..ms.len()).filter(|&i| ms[i] < 1.0 - 1e-3).collect();
    let high: Vec<usize> = (0..ms.len()).filter(|&i| ms[i] >= 1.0 - 1e-6).collect();
    let span = |v: &[usize]| v.first().map_or("none".to_string(), |&a| format!("[{:.1}, {:.1}]", ts[a], ts[*v.last().unwrap()]));
    // does M come back up after its first dip inside the window?
    let returns = low.first().is_some_and(|&a| high.iter().any(|&h| h > a));
    outcome(
        !low.is_empty() && !high.is_empty(),
        format!(
            "M >= 1-1e-6 on {} ({} pts), M < 1-1e-3 on {} ({} pts); return after the dip within (0,20]: {}",
            span(&high),
            high.len(),
            span(&low),
            low.len(),
            if returns { "yes" } else { "no (next Markovian interval after the second zero of G, t > 28.7)" }
        ),
    )
}

fn criterion_6() -> Outcome {
    let n = 100_000u64;
    let o = opts();
    let (m, td, bad, fail) = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = random_channel::<f64>(2, sample_seed(6, i)).unwrap();
            match (markovian_check(&t, &o), td_markovian_check(&t, 1e-9)) {
                (Ok(r), Ok(s)) => {
                    let (a, b) = (r.is_markovian(), s.td_markovian);
                    (a as u64, b as u64, (a && !b) as u64, 0u64)
                }
                _ => (0, 0, 0, 1),
            }
        })
        .reduce(|| (0, 0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3));
    let fm = m as f64 / n as f64;
    let ftd = td as f64 / n as f64;
    let pass = (0.005..=0.05).contains(&fm) && (0.08..=0.30).contains(&ftd) && bad == 0;
    outcome(
        pass,
        format!("Markovian {:.3}%, TD-Markovian {:.3}%, inclusion violations {bad}, numerical failures {fail}", 100.0 * fm, 100.0 * ftd),
    )
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for d in [2usize, 3] {
        for t in channels_with_log(d, 70 + d as u64, 50, has_log) {
            let spec = eigendecompose(&t, &tol).unwrap();
            let rep = markovian_check_spectral(&spec, &opts()).unwrap();
            let l = noisy_generator(&spec, &rep).unwrap();
            let lhs = determinant(&evolve(&l, 1.0).unwrap(), 1e-9).unwrap();
            let rhs = determinant(&t, 1e-9).unwrap() * rep.measure;
            worst = worst.max((lhs - rhs).abs());
            count += 1;
        }
    }
    outcome(worst <= 1e-6, format!("{count} channels (d = 2, 3), max |det(exp(L)) - det(T)M(T)| = {worst:.2e}"))
}

/// Smallest grid point `k·1e-4` at which some branch with `‖m‖∞ ≤ 2` plus
/// isotropic noise passes the generator test.
fn mu_grid_oracle(t: &ChannelMatrix<f64>) -> f64 {
    let spec = eigendecompose(t, &Tolerances::default()).unwrap();
    let c = spec.num_pairs();
    let step = 1e-4;
    let mut best = f64::INFINITY;
    let branches: Vec<Vec<i64>> = if c == 0 { vec![vec![]] } else { (-2..=2).map(|m| vec![m]).collect() };
    assert!(c <= 1);
    for m in branches {
        let l = branch_log(&spec, &BranchIndex(m)).unwrap();
        let valid = |k: u64| {
            let noise = isotropic_noise_generator::<f64>(2, k as f64 * step);
            is_lindblad_generator(&GeneratorMatrix::from_matrix_units(l.entries() + noise.entries()), 1e-9).valid
        };
        // validity is monotone in μ, so bisection on the grid index gives the scan's answer
        let mut hi = 1u64;
        while !valid(hi) {
            hi *= 2;
        }
        let mut lo = 0u64;
        if valid(0) {
            hi = 0;
        }
        while hi > lo + 1 {
            let mid = (lo + hi) / 2;
            if valid(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        best = best.min(hi as f64 * step);
    }
    best
}

fn criterion_8() -> Outcome {
    let chans = channels_with_log(2, 80, 20, |v| v == Verdict::NotMarkovian);
    let mut worst: f64 = 0.0;
    for t in &chans {
        let lib = markovian_check(t, &opts()).unwrap().mu_min;
        worst = worst.max((lib - mu_grid_oracle(t)).abs());
    }
    outcome(worst <= 2e-4, format!("20 channels, max |mu_min - grid| = {worst:.2e}"))
}

fn conjugated(t: &ChannelMatrix<f64>, u: &CMat<f64>) -> ChannelMatrix<f64> {
    // ρ ↦ U†·T(UρU†)·U
    let inner = unitary_channel(u).unwrap();
    let outer = unitary_channel(&adjoint(u)).unwrap();
    compose(&outer, &compose(t, &inner).unwrap()).unwrap()
}

fn criterion_9() -> Outcome {
    let mut chans = channels_with_log(2, 90, 7, |v| v == Verdict::NotMarkovian);
    chans.extend(channels_with_log(3, 91, 3, has_log));
    let results: Vec<(f64, f64)> = chans
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let m = markovianity_measure(t, &opts()).unwrap();
            let worst = (0..50u64)
                .map(|j| {
                    let u = random_unitary::<f64>(t.dim(), sample_seed(900 + i as u64, j));
                    (markovianity_measure(&conjugated(t, &u), &opts()).unwrap() - m).abs()
                })
                .fold(0.0, f64::max);
            (m, worst)
        })
        .collect();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let range = results.iter().map(|r| r.0).fold((f64::INFINITY, f64::NEG_INFINITY), |a, m| (a.0.min(m), a.1.max(m)));
    outcome(
        worst <= 1e-7,
        format!("10 channels x 50 unitaries, M in [{:.4}, {:.4}], max |dM| = {worst:.2e}", range.0, range.1),
    )
}

/// `⟨φ|(T⊗id)(|Φ⟩⟨Φ|)|φ⟩` for `Φ = Σ|ii⟩` and `φ = |01⟩ − |10⟩`, built by
/// applying `T` to each block `|i⟩⟨j|`.
fn antisymmetric_witness(t: &ChannelMatrix<f64>) -> f64 {
    let d = t.dim();
    let mut big = CMat::<f64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            let mut e = CMat::<f64>::zeros((d, d));
            e[[i, j]] = Complex64::new(1.0, 0.0);
            let block = t.apply(&e).unwrap();
            let mut f = CMat::<f64>::zeros((d, d));
            f[[i, j]] = Complex64::new(1.0, 0.0);
            big = big + kron(&block, &f);
        }
    }
    let mut phi = ndarray::Array1::<Complex64>::zeros(d * d);
    phi[1] = Complex64::new(1.0, 0.0);
    phi[d] = Complex64::new(-1.0, 0.0);
    phi.mapv(|z| z.conj()).dot(&big.dot(&phi)).re
}

fn criterion_10() -> Outcome {
    let mut failures: Vec<String> = Vec::new();
    let mut r = rng(10);

    // Γ involution, bit-exact
    for _ in 0..100 {
        let m = gaussian(&mut r, 9, 9);
        if involution_gamma(&involution_gamma(&m).unwrap()).unwrap() != m {
            failures.push("gamma involution".into());
            break;
        }
    }

    // Choi-PSD ⟺ CP: Kraus-built maps are CP; maps with a negative
    // entangled-witness value are not
    let transpose_map = {
        // ρ ↦ ρᵀ on qubits, from its block action
        let mut m = CMat::<f64>::zeros((4, 4));
        for i in 0..2 {
            for j in 0..2 {
                m[[i * 2 + j, j * 2 + i]] = Complex64::new(1.0, 0.0);
            }
        }
        ChannelMatrix::from_matrix_units(m).unwrap()
    };
    let mut choi_agree = 0;
    for k in 0..500 {
        let d = 2;
        let base = kraus_channel(&mut r, d, 1 + k % 4);
        let (t, label_cp) = if k % 2 == 0 {
            (base, true)
        } else {
            let q = 0.6 + 0.4 * r.random::<f64>();
            let t = mix(&transpose_map, &base, q).unwrap();
            let w = antisymmetric_witness(&t);
            if w >= 0.0 {
                failures.push(format!("witness not negative for sample {k}"));
            }
            (t, false)
        };
        if verify_channel(&t, 1e-9).completely_positive == label_cp {
            choi_agree += 1;
        }
    }
    if choi_agree != 500 {
        failures.push(format!("choi/cp agreement {choi_agree}/500"));
    }

    // compose is the matrix product and sequential application
    let mut worst_compose: f64 = 0.0;
    for _ in 0..50 {
        let d = 3;
        let a = kraus_channel(&mut r, d, 2);
        let b = kraus_channel(&mut r, d, 3);
        let rho = random_density(&mut r, d);
        let ab = compose(&a, &b).unwrap();
        worst_compose = worst_compose.max(close(ab.entries(), &a.entries().dot(b.entries())));
        worst_compose = worst_compose.max(close(&ab.apply(&rho).unwrap(), &a.apply(&b.apply(&rho).unwrap()).unwrap()));
    }
    if worst_compose > 1e-12 {
        failures.push(format!("compose {worst_compose:e}"));
    }

    // fractional-power semigroup, and agreement with evolve on generated channels
    let tol = Tolerances::default();
    let mut worst_power: f64 = 0.0;
    for k in 0..40u64 {
        let d = 2 + (k % 2) as usize;
        let l = random_lindblad::<f64>(d, 5000 + k, 0.7).unwrap();
        let t = evolve(&l, 1.0).unwrap();
        let spec = eigendecompose(&t, &tol).unwrap();
        let m = BranchIndex::zeros(spec.num_pairs());
        let (s1, s2) = (0.3 + 0.01 * k as f64, 0.45);
        let a = fractional_power(&t, s1, &m, &tol).unwrap();
        let b = fractional_power(&t, s2, &m, &tol).unwrap();
        let ab = fractional_power(&t, s1 + s2, &m, &tol).unwrap();
        worst_power = worst_power.max(close(compose(&a, &b).unwrap().entries(), ab.entries()));
        worst_power = worst_power.max(close(a.entries(), evolve(&l, s1).unwrap().entries()));
    }
    for t in channels_with_log(2, 101, 20, has_log) {
        let spec = eigendecompose(&t, &tol).unwrap();
        let m = BranchIndex(vec![1; spec.num_pairs()]);
        let a = fractional_power(&t, 0.4, &m, &tol).unwrap();
        let b = fractional_power(&t, 1.1, &m, &tol).unwrap();
        let ab = fractional_power(&t, 1.5, &m, &tol).unwrap();
        worst_power = worst_power.max(close(compose(&a, &b).unwrap().entries(), ab.entries()));
    }
    if worst_power > 1e-6 {
        failures.push(format!("fractional power {worst_power:e}"));
    }

    // TP / Hermiticity preservation of samples, compositions and mixtures
    let mut tp_bad = 0;
    for k in 0..200u64 {
        let d = 2 + (k % 3) as usize;
        let a = random_channel::<f64>(d, sample_seed(11, k)).unwrap();
        let b = kraus_channel(&mut r, d, 2);
        for t in [a.clone(), compose(&a, &b).unwrap(), mix(&a, &b, 0.3).unwrap()] {
            let rep = verify_channel(&t, 1e-9);
            if !(rep.is_channel() && rep.trace_violation < 1e-10 && rep.hermiticity_violation < 1e-10) {
                tp_bad += 1;
            }
        }
        let pauli_ok = d != 2 || {
            let p = change_basis(&a, OperatorBasis::pauli()).unwrap();
            p.entries().iter().all(|z| z.im.abs() <= 1e-10)
        };
        if !pauli_ok {
            tp_bad += 1;
        }
    }
    if tp_bad > 0 {
        failures.push(format!("{tp_bad} TP/HP violations"));
    }

    let pass = failures.is_empty();
    outcome(
        pass,
        format!(
            "gamma involution exact, choi/cp {choi_agree}/500, compose err {worst_compose:.1e}, power err {worst_power:.1e}{}",
            if pass { String::new() } else { format!("; failures: {}", failures.join(", ")) }
        ),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "transpose approximation", Duration::from_millis(10), criterion_1),
        (2, "generator round trip", Duration::from_secs(30), criterion_2),
        (3, "ccp <=> semigroup CP", Duration::from_secs(60), criterion_3),
        (4, "mixture scan dip", Duration::from_secs(10), criterion_4),
        (5, "JC scan intervals", Duration::from_secs(30), criterion_5),
        (6, "random channel fractions", Duration::from_secs(300), criterion_6),
        (7, "determinant identity", Duration::from_secs(60), criterion_7),
        (8, "mu_min grid oracle", Duration::from_secs(60), criterion_8),
        (9, "unitary invariance", Duration::from_secs(60), criterion_9),
        (10, "structural suites", Duration::from_secs(60), criterion_10),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= budget;
        failed += usize::from(!pass);
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.3} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
