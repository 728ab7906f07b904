//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qap_core::apgen::{
    ap_classify, sup_differences, translation_set, ApClassification, ApComponent, ApGenerator,
    ApVerdict, Mode, SignalSource,
};
use qap_core::dynamics::{
    distance_lyapunov, lyapunov_verify, solve_forward, stability_probe, trajectory_csv,
    trajectory_residual, CheckVerdict, Condition, DelayFn, DynamicSystem, LinearSpec,
    QuantumSystem, StatePair,
};
use qap_core::hopfield::{
    back_to_quantum, certificate, check_report, picard_solve, residual, CheckOptions,
    HopfieldSpec, PicardConfig,
};
use qap_core::logmap::{lift, lower};
use qap_core::qlattice::{gronwall_verify, q_derivative, q_integral, ts_exponential, Verdict};
use qap_core::{GridFunction, LogSignal, QLattice, Samples, Tolerance};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn load<T: serde::de::DeserializeOwned>(name: &str) -> T {
    serde_json::from_str(&fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_prod, mut worst_ftc) = (0.0_f64, 0.0_f64);
    for k in 0..1000 {
        let q = [1.5, 2.0, 3.0][k % 3];
        let lat = QLattice::new(q, -20, 20, false).map_err(err)?;
        let f: Vec<f64> = (0..41).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let g: Vec<f64> = (0..41).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let fg: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
        let mk = |v: &[f64]| GridFunction::new(lat, Samples::new(-20, 20, 1, v.to_vec()).unwrap()).unwrap();
        let (ff, gg, pp) = (mk(&f), mk(&g), mk(&fg));
        for n in -20..20 {
            let i = (n + 20) as usize;
            let d_fg = q_derivative(&pp, n.into()).map_err(err)?[0];
            let t1 = q_derivative(&ff, n.into()).map_err(err)?[0] * g[i + 1];
            let t2 = f[i] * q_derivative(&gg, n.into()).map_err(err)?[0];
            let scale = d_fg.abs().max(t1.abs()).max(t2.abs());
            worst_prod = worst_prod.max(rel_err(d_fg, t1 + t2, scale));
        }
        let deriv: Vec<f64> = (-20..20).map(|n| q_derivative(&ff, n.into()).unwrap()[0]).collect();
        let d = GridFunction::new(
            QLattice::new(q, -20, 19, false).map_err(err)?,
            Samples::new(-20, 19, 1, deriv).map_err(err)?,
        )
        .map_err(err)?;
        let a = rng.gen_range(-20..=19);
        let b = rng.gen_range(a..=19);
        let integral = q_integral(&d, a.into(), b).map_err(err)?.value[0];
        let exact = f[(b + 20) as usize] - f[(a + 20) as usize];
        let scale = f[(b + 20) as usize].abs().max(f[(a + 20) as usize].abs());
        worst_ftc = worst_ftc.max(rel_err(integral, exact, scale));
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(worst_prod <= 1e-9, || format!("product rule rel err {worst_prod:e}"))?;
    check(worst_ftc <= 1e-9, || format!("fundamental theorem rel err {worst_ftc:e}"))?;
    check(elapsed < 5.0, || format!("runtime {elapsed:.2}s"))?;
    Ok(format!(
        "1000 grid functions, product rule {worst_prod:.1e}, fundamental theorem {worst_ftc:.1e}, {elapsed:.2}s"
    ))
}

fn ulps(a: f64, b: f64) -> f64 {
    (a - b).abs() / (f64::EPSILON * a.abs().max(b.abs()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_rec, mut worst_semi) = (0.0_f64, 0.0_f64);
    for k in 0..200 {
        let q = [1.5, 2.0, 3.0][k % 3];
        let lat = QLattice::new(q, -20, 20, false).map_err(err)?;
        // 1 + μp ∈ (0.2, 3)
        let p: Vec<f64> = (-20..=20)
            .map(|n| rng.gen_range(-0.8..2.0) / lat.mu(n.into()).unwrap())
            .collect();
        let ps = Samples::new(-20, 20, 1, p.clone()).map_err(err)?;
        for _ in 0..20 {
            let t = rng.gen_range(-20..20);
            let s = rng.gen_range(-20..=20);
            let r = rng.gen_range(-20..=20);
            let next = ts_exponential(&lat, &ps, t + 1, s).map_err(err)?;
            let rec = (1.0 + lat.mu(t.into()).unwrap() * p[(t + 20) as usize])
                * ts_exponential(&lat, &ps, t, s).map_err(err)?;
            worst_rec = worst_rec.max(ulps(next, rec));
            let lhs = ts_exponential(&lat, &ps, t, s).map_err(err)?;
            let rhs = ts_exponential(&lat, &ps, t, r).map_err(err)? * ts_exponential(&lat, &ps, r, s).map_err(err)?;
            worst_semi = worst_semi.max(ulps(lhs, rhs));
        }
    }
    check(worst_rec <= 8.0, || format!("recurrence off by {worst_rec:.1} ulp"))?;
    check(worst_semi <= 8.0, || format!("semigroup off by {worst_semi:.1} ulp"))?;

    let mut passed = 0;
    for k in 0..200 {
        let q = [1.5, 2.0, 3.0][k % 3];
        let lat = QLattice::new(q, -10, 10, false).map_err(err)?;
        let p: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..0.5)).collect();
        let f: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = vec![rng.gen_range(-2.0..2.0)];
        for i in 0..20 {
            let mu = lat.mu((i as i64 - 10).into()).unwrap();
            let last: f64 = *y.last().unwrap();
            let slack: f64 = rng.gen_range(0.0..1.0);
            y.push(last + mu * (p[i] * last + f[i] - slack));
        }
        let report = gronwall_verify(
            &lat,
            &Samples::new(-10, 10, 1, y).map_err(err)?,
            &Samples::new(-10, 9, 1, p).map_err(err)?,
            &Samples::new(-10, 9, 1, f).map_err(err)?,
            -10,
            Tolerance::default(),
        )
        .map_err(err)?;
        if report.verdict == Verdict::Pass {
            passed += 1;
        }
    }
    check(passed == 200, || format!("gronwall passed {passed}/200"))?;
    Ok(format!(
        "recurrence {worst_rec:.1} ulp, semigroup {worst_semi:.1} ulp, gronwall 200/200"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    let mut round_trips = 0;
    for k in 0..100 {
        let q = [1.5, 2.0, 3.0][k % 3];
        let dim = 1 + k % 3;
        let a: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let w = rng.gen_range(0.1..3.0);
        let d = k % 4;
        let rhs = move |t: f64, x: &[f64], del: &[&[f64]]| -> Result<Vec<f64>, String> {
            Ok((0..x.len())
                .map(|i| {
                    let lin: f64 = (0..x.len()).map(|j| a[i * x.len() + j] * x[j]).sum();
                    (lin + b[i] * (w * t.ln()).sin() + 0.1 * del[0][i].tanh()) / (1.0 + t)
                })
                .collect())
        };
        let delays = || vec![Box::new(move |_| d) as DelayFn];
        let n0 = rng.gen_range(-40..-10);
        let hist: Vec<f64> = (0..(d + 1) * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = Samples::new(n0 - d as i64, n0, dim, hist).map_err(err)?;
        let lat = QLattice::new(q, n0 - d as i64, n0, false).map_err(err)?;
        let gf = GridFunction::new(lat, h.clone()).map_err(err)?;
        let quantum = QuantumSystem::new(dim, rhs.clone())
            .with_delays(delays(), 3)
            .solve_forward(&gf, n0 + 50)
            .map_err(err)?;
        let log_sys = QuantumSystem::new(dim, rhs).with_delays(delays(), 3).into_log(q).map_err(err)?;
        let log = solve_forward(&log_sys, &LogSignal::new(h), n0 + 50).map_err(err)?;
        let lifted = lift(&quantum);
        for n in n0..=n0 + 50 {
            for i in 0..dim {
                let (u, v) = (lifted.at(n)[i], log.at(n)[i]);
                worst = worst.max((u - v).abs() / u.abs().max(v.abs()).max(1.0));
            }
        }
        if lower(&lifted, q).map_err(err)? == quantum && lift(&lower(&log, q).map_err(err)?) == log {
            round_trips += 1;
        }
    }
    check(worst <= 1e-9, || format!("solve/lift disagreement {worst:e}"))?;
    check(round_trips == 100, || format!("exact round trips {round_trips}/100"))?;
    Ok(format!("100 systems x 50 steps, max disagreement {worst:.1e}, round trips exact"))
}

fn criterion_4() -> Outcome {
    let window = (-500, 500);
    let five = ApGenerator::scalar(ApComponent::constant(0.0).with_term(1.0, 2.0 * PI / 5.0, 0.0));
    for eps in [0.5, 0.1, 1e-6] {
        let r = translation_set(&five, eps, Mode::Unweighted, (-200, 200), window, 2.0).map_err(err)?;
        check(r.inclusion_length == Some(5), || format!("period 5 at eps {eps}: {:?}", r.inclusion_length))?;
        check(r.members.iter().all(|t| t % 5 == 0) && r.members.len() == 81, || {
            format!("period 5 at eps {eps}: members {:?}", r.members)
        })?;
    }
    let cos = ApGenerator::scalar(ApComponent::constant(0.0).with_term(1.0, 1.0, 0.0));
    let r = translation_set(&cos, 0.02, Mode::Unweighted, (-100, 100), window, 2.0).map_err(err)?;
    let brute = (window.0..=window.1)
        .map(|n| (((n + 44) as f64).cos() - (n as f64).cos()).abs())
        .fold(0.0, f64::max);
    check(brute < 0.02 && r.contains(44), || format!("cos: tau 44 sup {brute}"))?;
    let scanned = r.scan.iter().find(|s| s.tau == 44).unwrap().sup_diff;
    check(scanned == brute, || format!("cos: scan {scanned} vs brute force {brute}"))?;

    let ramp = Samples::scalar_fn(-800, 800, |n| n as f64).map_err(err)?;
    let r = translation_set(&ramp, 0.5, Mode::Unweighted, (-200, 200), window, 2.0).map_err(err)?;
    check(r.members == vec![0] && r.inclusion_length.is_none(), || format!("ramp: {:?}", r.members))?;
    Ok(format!("period 5 -> l=5 at 3 eps; cos: tau 44 sup {brute:.6}; ramp: E={{0}}, l=inf"))
}

fn random_generator(rng: &mut ChaCha8Rng) -> ApGenerator {
    let terms = rng.gen_range(1..4);
    let mut c = ApComponent::constant(rng.gen_range(-1.0..1.0));
    for _ in 0..terms {
        c = c.with_term(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..3.2), rng.gen_range(-3.2..3.2));
    }
    ApGenerator::scalar(c)
}

fn criterion_5() -> Outcome {
    const W: (i64, i64) = (-200, 200);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sup = |s: &Samples, tau: i64| sup_differences(s, Mode::Unweighted, (tau, tau), W, 2.0).unwrap()[0].sup_diff;
    let sample = |g: &ApGenerator, tau: i64| g.sample(W.0 - tau.abs(), W.1 + tau.abs()).unwrap();
    let mut premises = [0usize; 4];
    let mut violations = [0usize; 4];
    for _ in 0..500 {
        let f = random_generator(&mut rng);
        let g = random_generator(&mut rng);
        let tau = rng.gen_range(-100..=100);
        let eps = rng.gen_range(0.01..2.0);
        let (fs, gs) = (sample(&f, tau), sample(&g, tau));
        let (df, dg) = (sup(&fs, tau), sup(&gs, tau));

        // sums and products
        if df < eps && dg < eps {
            premises[0] += 1;
            let sum = fs.map_values(|n, v| vec![v[0] + gs.at(n)[0]]).unwrap();
            let prod = fs.map_values(|n, v| vec![v[0] * gs.at(n)[0]]).unwrap();
            if !(sup(&sum, tau) < 2.0 * eps && sup(&prod, tau) < eps * (f.sup_bound(0) + g.sup_bound(0))) {
                violations[0] += 1;
            }
        }
        // quotient, with g lifted away from zero
        let c = &g.components()[0];
        let spread: f64 = c.terms.iter().map(|t| t.amp.abs()).sum();
        let h = ApGenerator::scalar(ApComponent {
            offset: spread + rng.gen_range(0.2..2.0),
            terms: c.terms.clone(),
        });
        let m = h.inf_bound(0);
        let hs = sample(&h, tau);
        if sup(&hs, tau) < m * m * eps {
            premises[1] += 1;
            let inv = hs.map_values(|_, v| vec![1.0 / v[0]]).unwrap();
            if !(sup(&inv, tau) < eps) {
                violations[1] += 1;
            }
        }
        // Lipschitz composition
        let lip = rng.gen_range(0.1..3.0);
        if df < eps {
            premises[2] += 1;
            let comp = fs.map_values(|_, v| vec![lip * v[0].sin()]).unwrap();
            if !(sup(&comp, tau) < lip * eps) {
                violations[2] += 1;
            }
        }
        // uniform limit: f = f_n + term with amplitude below ε/3
        let amp = rng.gen_range(0.0..1.0) * eps / 3.0 * 0.999;
        let limit = ApGenerator::scalar(f.components()[0].clone().with_term(amp, rng.gen_range(0.0..3.2), 0.0));
        if df < eps / 3.0 {
            premises[3] += 1;
            if !(sup(&sample(&limit, tau), tau) < eps) {
                violations[3] += 1;
            }
        }
    }
    check(violations.iter().all(|v| *v == 0), || format!("violations {violations:?}"))?;
    check(premises.iter().all(|p| *p > 0), || format!("vacuous premises {premises:?}"))?;
    Ok(format!("500 pairs, premises held {premises:?}, violations 0"))
}

fn criterion_6() -> Outcome {
    let spec: HopfieldSpec = load("hopfield_scalar.json");
    let c = certificate(&spec, 1.0, (0, 100)).map_err(err)?;
    let iv = c.feasible_r0.ok_or("no feasible interval")?;
    let (lo, hi) = ((3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    check(close(c.eta_bar[0], 0.4), || format!("eta_bar {}", c.eta_bar[0]))?;
    check(close(c.input_bound, 0.2), || format!("L {}", c.input_bound))?;
    check(close(c.ratio, 0.8), || format!("rho {}", c.ratio))?;
    check(c.feasible, || "not feasible at r0 = 1".into())?;
    check(close(iv.lo, lo) && iv.hi.is_some_and(|h| close(h, hi)), || format!("interval {iv:?}"))?;
    Ok(format!(
        "eta_bar={}, L={}, rho={}, r0 in [{:.15}, {:.15}]",
        c.eta_bar[0], c.input_bound, c.ratio, iv.lo, iv.hi.unwrap()
    ))
}

fn scalar_root() -> f64 {
    let h = |x: f64| 0.5 * x - 0.2 * x.tanh() - 0.1 * x.tanh().powi(2) - 0.1;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_7() -> Outcome {
    let spec: HopfieldSpec = load("hopfield_scalar.json");
    let x_star = scalar_root();
    let start = Instant::now();
    let mut cfg = PicardConfig::new(1.0, (0, 100));
    let a = picard_solve(&spec, &cfg).map_err(err)?;
    cfg.start = Some(vec![1.0]);
    let b = picard_solve(&spec, &cfg).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let d = &a.log.deltas;
    for (k, dk) in d.iter().enumerate() {
        check(*dk <= 0.8f64.powi(k as i32) * d[0] + 1e-10, || format!("delta_{k} = {dk:e}"))?;
    }
    let err_star = a.solution.samples().data().iter().map(|v| (v - x_star).abs()).fold(0.0, f64::max);
    check(err_star <= 1e-8, || format!("|x - x*| = {err_star:e}"))?;
    let res = residual(&a.solution, &spec, (0, 100)).map_err(err)?;
    check(res <= 1e-8, || format!("residual {res:e}"))?;
    let gap = a.solution.samples().sup_distance(b.solution.samples()).map_err(err)?;
    check(gap <= 2.0 * cfg.tol, || format!("starts disagree by {gap:e}"))?;
    check(elapsed < 1.0, || format!("runtime {elapsed:.3}s for two solves"))?;
    Ok(format!(
        "{} iterations, x*={x_star:.12}, |x-x*|={err_star:.1e}, residual {res:.1e}, starts agree to {gap:.1e}, {elapsed:.3}s",
        d.len()
    ))
}

fn criterion_8() -> Outcome {
    let spec: HopfieldSpec = load("hopfield_two_frequency.json");
    let window = (-2000, 2000);
    let sol = picard_solve(&spec, &PicardConfig::new(2.0, window)).map_err(err)?;
    check(sol.certificate.ratio < 1.0, || format!("rho {}", sol.certificate.ratio))?;
    let res = residual(&sol.solution, &spec, window).map_err(err)?;
    check(res <= 1e-8, || format!("residual {res:e}"))?;
    let cls = ap_classify(&sol.solution, &[0.5, 0.2, 0.1], (-1500, 1500), (-500, 500), 2.0, Mode::Unweighted)
        .map_err(err)?;
    let lengths: Vec<Option<i64>> = cls.entries.iter().map(|e| e.report.inclusion_length).collect();
    check(cls.verdict == ApVerdict::ApEvidence, || format!("verdict {:?}, lengths {lengths:?}", cls.verdict))?;

    let rational: HopfieldSpec = load("hopfield_rational.json");
    let sol_r = picard_solve(&rational, &PicardConfig::new(2.0, (0, 300))).map_err(err)?;
    let s = sol_r.solution.samples();
    let mut worst = 0.0_f64;
    for n in s.n_min()..=s.n_max() - 35 {
        worst = worst.max(qap_core::samples::max_dist(s.at(n + 35), s.at(n)));
    }
    check(worst <= 1e-8, || format!("period-35 defect {worst:e}"))?;
    Ok(format!(
        "rho={:.3}, residual {res:.1e}, AP_EVIDENCE with l={lengths:?}; rational period 35 defect {worst:.1e}",
        sol.certificate.ratio
    ))
}

fn criterion_9() -> Outcome {
    let c = 0.3;
    let sys = DynamicSystem::new(1, move |_n: i64, x: &[f64], _d: &[&[f64]]| -> Result<Vec<f64>, String> {
        Ok(vec![-c * x[0]])
    });
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let samples: Vec<StatePair> = (0..200)
        .map(|k| StatePair::new(k - 100, vec![rng.gen_range(-5.0..5.0)], vec![rng.gen_range(-5.0..5.0)]))
        .collect();
    let pass = lyapunov_verify(&distance_lyapunov(c, 1.0), &sys, &samples, Tolerance::default()).map_err(err)?;
    check(pass.verdict == CheckVerdict::Pass, || format!("true c: {:?}", pass.violations.first()))?;
    let fail = lyapunov_verify(&distance_lyapunov(1.1 * c, 1.0), &sys, &samples, Tolerance::default()).map_err(err)?;
    check(
        fail.verdict == CheckVerdict::Fail && fail.violations.iter().any(|v| v.condition == Condition::Decay),
        || "overstated c not rejected at the decay condition".into(),
    )?;
    let reference = solve_forward(&sys, &LogSignal::scalar_fn(0, 0, |_| 1.0).map_err(err)?, 60).map_err(err)?;
    let probe = stability_probe(&sys, &reference, &[vec![0.1], vec![-0.5]], 10, 1e-12).map_err(err)?;
    for run in &probe.runs {
        let rate = run.rate.ok_or("no fitted rate")?;
        check((rate - (1.0 - c)).abs() <= 0.05 * (1.0 - c), || format!("rate {rate} vs {}", 1.0 - c))?;
    }
    Ok(format!(
        "PASS at c={c}, FAIL at c={:.2}, fitted rates {:?} vs {}",
        1.1 * c,
        probe.runs.iter().map(|r| r.rate.unwrap()).collect::<Vec<_>>(),
        1.0 - c
    ))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

fn run_cli(out: &Path, args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_qap"))
        .args(args)
        .args(["--seed", "0", "--out"])
        .arg(out)
        .output()
        .map_err(err)?;
    check(o.status.success(), || {
        format!("qap {args:?} failed: {}", String::from_utf8_lossy(&o.stderr))
    })
}

fn same_file(out: &Path, name: &str, expected: &str) -> Result<(), String> {
    let got = fs::read_to_string(out.join(name)).map_err(err)?;
    check(got == expected, || format!("{name} differs from the library result"))
}

fn criterion_10() -> Outcome {
    let base = tempfile::tempdir().map_err(err)?;
    let mut files = 0;
    for rep in 0..2 {
        let out = base.path().join(format!("run{rep}"));
        let p = |s: &str| data(s).to_str().unwrap().to_owned();

        // analyze
        let dir = out.join("analyze");
        run_cli(&dir, &["analyze", "--config", &p("analyze_two_frequency.config.json")])?;
        let g: ApGenerator = load("two_frequency.json");
        let lib: ApClassification =
            ap_classify(&g, &[0.5, 0.2, 0.1], (-1500, 1500), (-500, 500), 2.0, Mode::Unweighted).map_err(err)?;
        check(lib.verdict == ApVerdict::ApEvidence, || "two-frequency generator not AP_EVIDENCE".into())?;
        same_file(&dir, "analysis.json", &to_json(&lib))?;
        for (k, e) in lib.entries.iter().enumerate() {
            same_file(&dir, &format!("translation_{k}.csv"), &e.report.to_csv())?;
        }

        // transform
        let dir = out.join("transform");
        run_cli(&dir, &["transform", "--direction", "lift", "--input", &p("constant_grid.json")])?;
        let grid: GridFunction = load("constant_grid.json");
        same_file(&dir, "lifted.json", &to_json(&lift(&grid)))?;
        run_cli(&dir, &["transform", "--direction", "lower", "--q", "2", "--input", &p("power_signal.json")])?;
        let power: LogSignal = load("power_signal.json");
        same_file(&dir, "lowered.json", &to_json(&lower(&power, 2.0).map_err(err)?))?;

        // solve
        let dir = out.join("solve");
        run_cli(&dir, &["solve", "--config", &p("solve_linear.config.json")])?;
        #[derive(serde::Deserialize)]
        struct Linear {
            #[allow(dead_code)]
            kind: String,
            #[serde(flatten)]
            spec: LinearSpec,
        }
        let lin: Linear = load("linear_system.json");
        let sys = lin.spec.system().map_err(err)?;
        let hist: LogSignal = load("linear_history.json");
        let traj = solve_forward(&sys, &hist, 50).map_err(err)?;
        same_file(&dir, "trajectory.csv", &trajectory_csv(traj.samples(), None))?;
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("solve_report.json")).map_err(err)?).map_err(err)?;
        let res = trajectory_residual(&sys, &traj, 0).map_err(err)?;
        check(report["residual"].as_f64() == Some(res), || "solve residual differs".into())?;

        // hopfield check
        let dir = out.join("check");
        run_cli(&dir, &["hopfield", "check", "--config", &p("hopfield_scalar.config.json")])?;
        let spec: HopfieldSpec = load("hopfield_scalar.json");
        let lib = check_report(&spec, 1.0, (0, 40), &CheckOptions::default()).map_err(err)?;
        same_file(&dir, "certificate.json", &to_json(&lib))?;

        // hopfield solve
        let dir = out.join("hopfield");
        run_cli(&dir, &["hopfield", "solve", "--config", &p("hopfield_scalar.config.json")])?;
        let sol = picard_solve(&spec, &PicardConfig::new(1.0, (0, 40))).map_err(err)?;
        same_file(&dir, "solution_log.csv", &trajectory_csv(sol.solution.samples(), None))?;
        let quantum = back_to_quantum(&sol.solution, 2.0).map_err(err)?;
        same_file(&dir, "solution_quantum.csv", &trajectory_csv(quantum.samples(), Some(2.0)))?;
        same_file(&dir, "convergence.json", &to_json(&sol.log))?;
        let ap = ap_classify(&sol.solution, &[0.5, 0.1], (-5, 5), (5, 20), 2.0, Mode::Unweighted).map_err(err)?;
        same_file(&dir, "ap_report.json", &to_json(&ap))?;
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("solve_report.json")).map_err(err)?).map_err(err)?;
        let res = residual(&sol.solution, &spec, (0, 40)).map_err(err)?;
        check(report["residual"].as_f64() == Some(res), || "hopfield residual differs".into())?;
        files = 0;
        for entry in walk(&out) {
            files += 1;
            let other = base.path().join("run0").join(entry.strip_prefix(&out).unwrap());
            check(fs::read(&entry).map_err(err)? == fs::read(&other).map_err(err)?, || {
                format!("{} differs between runs", entry.display())
            })?;
        }
    }
    Ok(format!("analyze, transform, solve, hopfield check/solve: {files} files match the library and repeat byte-for-byte"))
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("calculus kernel", criterion_1),
        ("exponential and Gronwall", criterion_2),
        ("transform equivalence", criterion_3),
        ("translation-set oracle", criterion_4),
        ("closure inequalities", criterion_5),
        ("Hopfield certificate", criterion_6),
        ("Picard solver", criterion_7),
        ("AP solution evidence", criterion_8),
        ("Lyapunov machinery", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("[PASS] criterion {} ({name}): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {} ({name}): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
