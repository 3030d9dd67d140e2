//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thomae::algebra::root_of_unity;
use thomae::surface::{
    aj_jacobian_hyper, aj_jacobian_hyper_closed, aj_jacobian_trig, build_periods, continue_point, local_point,
    random_point, AnchorPattern, BuildConfig, CurveSpec, PeriodData, SurfacePoint,
};
use thomae::theta::{
    apply_transchar, e, reduce_characteristic, theta_eval, theta_grad, Characteristic, Parity, RiemannMatrix,
};
use thomae::thomae::{
    branch_divisors, enumerate_partitions_hyp, enumerate_partitions_trig, estimate_alpha, nonvanishing_check,
    simple_zero_check, simple_zero_divisor, verify_matrix_form_hyp, verify_matrix_form_trig, verify_quotient_hyp,
    verify_quotient_trig, verify_thomae_const_hyp, verify_thomae_deriv_hyp, verify_thomae_deriv_trig,
    verify_thomae_deriv_trig_scaled, Tolerances, TrigKind, TrigPartition, VerificationReport, TYPE2_FACTOR_QUADRATIC,
};
use thomae::Complex64;

type Verdict = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tol(t: f64) -> Tolerances {
    Tolerances { tol: t, theta_tol: 1e-13 }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_lambdas(seed: u64, count: usize) -> Vec<Complex64> {
    let mut r = rng(seed);
    let mut out: Vec<Complex64> = Vec::new();
    while out.len() < count {
        let z = c(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        if out.iter().all(|w| (w - z).norm() > 0.35) {
            out.push(z);
        }
    }
    out
}

fn build(n: u32, lambdas: Vec<Complex64>) -> PeriodData {
    build_periods(&CurveSpec::new(n, lambdas).unwrap(), &BuildConfig::default()).unwrap()
}

fn random_curve(n: u32, count: usize, seed: u64) -> PeriodData {
    build(n, random_lambdas(seed, count))
}

fn check_report(r: &VerificationReport, order: u32, t: f64) -> Result<(), String> {
    let tag = r.tag.ok_or_else(|| format!("{} {}: unclassified ({:?})", r.identity, r.partition, r.note))?;
    ensure(r.pass && tag.order == order && tag.phase_residual < t && r.modulus_residual < t, || {
        format!("{} {}: {tag:?}, modulus residual {:e}", r.identity, r.partition, r.modulus_residual)
    })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

// 1 ------------------------------------------------------------------------

fn random_riemann(r: &mut ChaCha8Rng, g: usize) -> RiemannMatrix {
    let x = DMatrix::from_fn(g, g, |_, _| r.gen_range(-0.5..0.5));
    let b = DMatrix::from_fn(g, g, |_, _| r.gen_range(-0.5..0.5));
    let y = b.transpose() * &b + DMatrix::identity(g, g) * 0.5;
    RiemannMatrix::new(DMatrix::from_fn(g, g, |i, j| c((x[(i, j)] + x[(j, i)]) / 2.0, y[(i, j)]))).unwrap()
}

fn random_char(r: &mut ChaCha8Rng, g: usize, span: i64) -> Characteristic {
    let mut entry = || {
        let d = [1i64, 2, 3, 6][r.gen_range(0..4)];
        format!("{}/{d}", r.gen_range(-span * d..=span * d))
    };
    let eps: Vec<String> = (0..g).map(|_| entry()).collect();
    let delta: Vec<String> = (0..g).map(|_| entry()).collect();
    format!("{}; {}", eps.join(" "), delta.join(" ")).parse().unwrap()
}

fn theta_core() -> Verdict {
    const T: f64 = 1e-13;
    let mut worst = [0.0f64; 4];
    let mut worst_grad: f64 = 0.0;
    for g in 1..=4 {
        let mut r = rng(1000 + g as u64);
        for _ in 0..100 {
            let tau = random_riemann(&mut r, g);
            let x = DVector::from_fn(g, |_, _| c(r.gen_range(-1.0..1.0), 0.0));
            let y = DVector::from_fn(g, |_, _| c(r.gen_range(-1.0..1.0), 0.0));
            let zeta = &x + tau.tau() * &y;
            // parity
            let bits: Vec<i64> = (0..2 * g).map(|_| r.gen_range(0..2)).collect();
            let ch = Characteristic::from_ints(&bits[..g], &bits[g..]).unwrap();
            let sign = if ch.parity().unwrap() == Parity::Even { 1.0 } else { -1.0 };
            let a = theta_eval(&ch, &zeta, &tau, T).unwrap();
            let b = theta_eval(&ch, &(-&zeta), &tau, T).unwrap();
            worst[0] = worst[0].max((b.value - sign * a.value).norm() / a.scale);
            // quasi-periodicity
            let ch = random_char(&mut r, g, 1);
            let l = DVector::from_fn(g, |_, _| r.gen_range(-2i64..=2) as f64);
            let m = DVector::from_fn(g, |_, _| r.gen_range(-1i64..=1) as f64);
            let mc = m.map(|v| c(v, 0.0));
            let shifted = &zeta + l.map(|v| c(v, 0.0)) + tau.tau() * &mc;
            let factor = e(c((ch.eps_f64().dot(&l) - ch.delta_f64().dot(&m)) / 2.0, 0.0)
                - (mc.transpose() * tau.tau() * &mc)[(0, 0)] / 2.0
                - (mc.transpose() * &zeta)[(0, 0)]);
            let base = theta_eval(&ch, &zeta, &tau, T).unwrap();
            let moved = theta_eval(&ch, &shifted, &tau, T).unwrap();
            worst[1] = worst[1].max((moved.value - factor * base.value).norm() / (factor.norm() * base.scale));
            // reduction
            let ch = random_char(&mut r, g, 4);
            let (red, phase) = reduce_characteristic(&ch);
            let orig = theta_eval(&ch, &zeta, &tau, T).unwrap();
            let folded = theta_eval(&red, &zeta, &tau, T).unwrap();
            worst[2] = worst[2].max((orig.value - phase * folded.value).norm() / folded.scale);
            // characteristic shift
            let ch = random_char(&mut r, g, 1);
            let with = theta_eval(&ch, &zeta, &tau, T).unwrap();
            let (moved, pre) = apply_transchar(&ch, &zeta, &tau);
            let plain = theta_eval(&Characteristic::zero(g), &moved, &tau, T).unwrap();
            worst[3] = worst[3].max((with.value - pre * plain.value).norm() / (pre.norm() * plain.scale));
            // gradient
            let grad = theta_grad(&ch, &zeta, &tau, T).unwrap();
            let h = 1e-5;
            for s in 0..g {
                let (mut zp, mut zm) = (zeta.clone(), zeta.clone());
                zp[s] += h;
                zm[s] -= h;
                let diff = (theta_eval(&ch, &zp, &tau, 1e-15).unwrap().value
                    - theta_eval(&ch, &zm, &tau, 1e-15).unwrap().value)
                    / (2.0 * h);
                worst_grad = worst_grad.max((grad.gradient[s] - diff).norm() / diff.norm().max(grad.value.scale));
            }
        }
    }
    let all = Characteristic::all_integral(2);
    let even = all.iter().filter(|ch| ch.parity().unwrap() == Parity::Even).count();
    ensure(worst.iter().all(|&w| w < 1e-9), || format!("identity residuals {worst:?}"))?;
    ensure(worst_grad < 1e-6, || format!("gradient residual {worst_grad:e}"))?;
    ensure((even, all.len() - even) == (10, 6), || format!("census {even}/{}", all.len() - even))?;
    Ok(format!(
        "400 cases per identity; worst parity {:.1e}, periodicity {:.1e}, reduction {:.1e}, shift {:.1e}, gradient {worst_grad:.1e}; census 10/6",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

// 2 ------------------------------------------------------------------------

fn period_sanity() -> Verdict {
    let mut worst = [0.0f64; 5];
    let mut min_eig = f64::INFINITY;
    let curves = (0..5).map(|s| (2, 5, 500 + s)).chain((0..3).map(|s| (3, 5, 600 + s)));
    for (n, count, seed) in curves {
        let inv = random_curve(n, count, seed).invariants();
        min_eig = min_eig.min(inv.min_im_eigenvalue);
        for (w, v) in worst.iter_mut().zip([inv.symmetry, inv.quad_drift, inv.abel_residual, inv.two_k_residual, inv.normalization_residual]) {
            *w = w.max(v);
        }
    }
    ensure(worst[0] < 1e-8 && min_eig > 0.0 && worst[1] < 1e-9 && worst[2] < 1e-8 && worst[3] < 1e-8 && worst[4] < 1e-8, || {
        format!("symmetry, drift, n·u, 2K, normalization = {worst:?}; min eig {min_eig:e}")
    })?;
    Ok(format!(
        "8 curves; symmetry {:.1e}, drift {:.1e}, n·u(P) {:.1e}, 2K {:.1e}, min eig Im τ {min_eig:.3}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

// 3 ------------------------------------------------------------------------

fn j_invariant(tau: Complex64) -> Complex64 {
    let mut t = tau;
    for _ in 0..100 {
        t.re -= t.re.round();
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -1.0 / t;
        } else {
            break;
        }
    }
    let q = (c(0.0, 2.0 * std::f64::consts::PI) * t).exp();
    let sigma = |n: u64, k: i32| (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(k)).sum::<f64>();
    let (mut e4, mut e6, mut qn) = (c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
    for n in 1..60u64 {
        qn *= q;
        e4 += 240.0 * sigma(n, 3) * qn;
        e6 -= 504.0 * sigma(n, 5) * qn;
    }
    1728.0 * e4 * e4 * e4 / (e4 * e4 * e4 - e6 * e6)
}

fn closed_forms() -> Verdict {
    let square = build(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
    let hex = build(3, vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let j1 = j_invariant(square.tau.tau()[(0, 0)]);
    let j0 = j_invariant(hex.tau.tau()[(0, 0)]);
    ensure((j1 - 1728.0).norm() < 1e-6 && j0.norm() < 1e-6, || format!("j = {j1}, {j0}"))?;
    Ok(format!("|j − 1728| = {:.1e}, |j| = {:.1e}", (j1 - 1728.0).norm(), j0.norm()))
}

// 4, 5 ---------------------------------------------------------------------

fn genus_two_curves() -> Vec<PeriodData> {
    let mut out = vec![build(2, (0..5).map(|i| c(i as f64, 0.0)).collect())];
    out.extend((0..3).map(|s| random_curve(2, 5, 700 + s)));
    out
}

fn thomae_const_hyp(curves: &[PeriodData]) -> Verdict {
    let mut worst: f64 = 0.0;
    for p in curves {
        for part in enumerate_partitions_hyp(2, 0) {
            let r = verify_thomae_const_hyp(p, &part, tol(1e-6));
            check_report(&r, 8, 1e-6)?;
            worst = worst.max(r.modulus_residual);
        }
    }
    Ok(format!("4 curves × 10 partitions, 8th roots, worst modulus residual {worst:.1e}"))
}

fn thomae_deriv_hyp(curves: &[PeriodData]) -> Verdict {
    let mut worst: f64 = 0.0;
    for p in curves {
        let parts = enumerate_partitions_hyp(2, 1);
        ensure(parts.len() == 6, || format!("{} partitions", parts.len()))?;
        for part in parts {
            let r = verify_thomae_deriv_hyp(p, &part, tol(1e-6));
            check_report(&r, 8, 1e-6)?;
            ensure(r.spread < 1e-6, || format!("{}: spread {:e}", r.partition, r.spread))?;
            worst = worst.max(r.spread);
        }
    }
    let g3 = random_curve(2, 7, 710);
    let mut smoke = 0;
    for m in [0, 1] {
        for part in enumerate_partitions_hyp(3, m) {
            let r = if m == 0 { verify_thomae_const_hyp(&g3, &part, tol(1e-5)) } else { verify_thomae_deriv_hyp(&g3, &part, tol(1e-5)) };
            check_report(&r, 8, 1e-5)?;
            smoke += 1;
        }
    }
    Ok(format!("4 curves × 6 partitions, worst spread {worst:.1e}; genus 3 smoke {smoke} reports at 1e-5"))
}

// 6 ------------------------------------------------------------------------

fn hyper_fd_error(p: &PeriodData, seed: u64) -> f64 {
    let g = p.genus();
    let mut r = rng(seed);
    let mut pts: Vec<SurfacePoint> = Vec::new();
    while pts.len() < g {
        let q = random_point(&p.curve, &mut r);
        let z = q.z(&p.curve).unwrap();
        if pts.iter().all(|o| (o.z(&p.curve).unwrap() - z).norm() > 0.2) {
            pts.push(q);
        }
    }
    let h = 1e-4;
    let mut dzeta = DMatrix::zeros(g, g);
    for (k, q) in pts.iter().enumerate() {
        let z = q.z(&p.curve).unwrap();
        let (_, fwd) = continue_point(p, q, z + h).unwrap();
        let (_, back) = continue_point(p, q, z - h).unwrap();
        dzeta.set_column(k, &p.normalize(&((fwd - back) / c(2.0 * h, 0.0))));
    }
    let oracle = dzeta.try_inverse().unwrap();
    let solved = aj_jacobian_hyper(p, &pts).unwrap();
    let closed = aj_jacobian_hyper_closed(p, &pts).unwrap();
    (max_abs(&(&solved - &oracle)) / max_abs(&oracle)).max(max_abs(&(&closed - &oracle)) / max_abs(&oracle))
}

/// (relative error of ∂(α,β)/∂ζ, mixed block of the difference oracle).
fn trig_fd_error(p: &PeriodData, anchors: Vec<usize>) -> (f64, f64) {
    let pattern = AnchorPattern::new(p, anchors).unwrap();
    let g = p.genus();
    let plus = pattern.anchors.len();
    let h = 2e-3;
    let mut raw = DMatrix::zeros(g, g);
    for (k, &i) in pattern.anchors.iter().enumerate() {
        let (mut first, mut second) = (DVector::zeros(g), DVector::zeros(g));
        for j in 0..3 {
            let w = root_of_unity(j, 3);
            let (_, v) = local_point(p, i, w * h).unwrap();
            first += &v * (w.conj() / (3.0 * h));
            second += &v * (w.conj() * w.conj() / (3.0 * h * h));
        }
        raw.set_column(k, &first);
        if k < pattern.doubled {
            raw.set_column(plus + k, &second);
        }
    }
    let oracle = (&p.c_inv * &raw).try_inverse().unwrap();
    let a = aj_jacobian_trig(p, &pattern).unwrap();
    let mut stacked = DMatrix::zeros(g, g);
    stacked.rows_mut(0, plus).copy_from(&a.d_alpha);
    stacked.rows_mut(plus, g - plus).copy_from(&a.d_beta);
    let rel = max_abs(&(&stacked - &oracle)) / max_abs(&oracle);
    let mixed = max_abs(&raw.view((0, plus), (plus, g - plus)).into_owned())
        .max(max_abs(&raw.view((plus, 0), (g - plus, plus)).into_owned()));
    (rel, mixed)
}

fn jacobians() -> Verdict {
    let mut hyp: f64 = 0.0;
    for s in 0..3 {
        hyp = hyp.max(hyper_fd_error(&random_curve(2, 5, 800 + s), 810 + s));
    }
    let (mut trig, mut mixed) = (0.0f64, 0.0f64);
    for s in 0..2 {
        let p = random_curve(3, 5, 820 + s);
        for anchors in [vec![0, 1, 2], vec![4, 2, 0]] {
            let (r, m) = trig_fd_error(&p, anchors);
            trig = trig.max(r);
            mixed = mixed.max(m);
        }
    }
    ensure(hyp < 1e-6 && trig < 1e-5 && mixed < 1e-8, || format!("hyp {hyp:e}, trig {trig:e}, mixed {mixed:e}"))?;
    Ok(format!("generic {hyp:.1e} (< 1e-6), anchored {trig:.1e} (< 1e-5), mixed block {mixed:.1e}"))
}

// 7, 8 ---------------------------------------------------------------------

fn trigonal_curves() -> Vec<PeriodData> {
    (0..3).map(|s| random_curve(3, 5, 900 + s)).collect()
}

fn alpha_criterion(curves: &[PeriodData]) -> Verdict {
    let est = estimate_alpha(curves, tol(1e-6)).map_err(|e| e.to_string())?;
    ensure(est.spread < 1e-6, || format!("spread {:e}", est.spread))?;
    let m = &est.curve_moduli;
    let agree = m.iter().map(|x| (x / m[0] - 1.0).abs()).fold(0.0, f64::max);
    ensure(agree < 1e-6, || format!("per-curve |α| {m:?}"))?;
    for reports in &est.reports {
        ensure(reports.len() == 30, || format!("{} constant partitions", reports.len()))?;
        for r in reports {
            check_report(r, 12, 1e-6)?;
        }
    }
    // raw θ phases without the e(εᵀδ/8) factor, as 36th roots
    let raw: Vec<f64> = est.reports.iter().flatten().map(|r| r.extra["raw_root36"]).collect();
    ensure(raw.iter().all(|k| k.is_finite()), || "raw phase not a 36th root".into())?;
    let off = raw.iter().filter(|&&k| k as i64 % 3 != 0).count();
    Ok(format!(
        "|α| = {:.12}, spread {:.1e}, curves agree to {agree:.1e}, 90 phases are 12th roots after e(εᵀδ/8) ({off} raw phases are 36th roots only)",
        est.modulus, est.spread
    ))
}

fn derivative_trig(curves: &[PeriodData]) -> Verdict {
    let p = &curves[0];
    let alpha = estimate_alpha(&curves[..1], tol(1e-6)).map_err(|e| e.to_string())?.references[0];
    let type1: Vec<_> =
        enumerate_partitions_trig(2, TrigKind::Type1).into_iter().filter(|q| q.infinity_block() == 0).collect();
    let type2 = enumerate_partitions_trig(2, TrigKind::Type2);
    let (l1, l0) = (type2.iter().filter(|q| q.infinity_block() == 1).count(), type2.iter().filter(|q| q.infinity_block() == 0).count());
    ensure(type1.len() == 20 && (l1, l0) == (10, 10), || format!("counts {} / {l1}+{l0}", type1.len()))?;
    let mut worst: f64 = 0.0;
    for part in type1.iter().chain(&type2) {
        let r = verify_thomae_deriv_trig(p, alpha, part, tol(1e-5));
        check_report(&r, 36, 1e-5)?;
        ensure(r.spread < 1e-5, || format!("{}: spread {:e}", r.partition, r.spread))?;
        worst = worst.max(r.spread).max(r.tag.unwrap().phase_residual);
    }
    let quadratic = verify_thomae_deriv_trig_scaled(p, alpha, &type2[0], TYPE2_FACTOR_QUADRATIC, tol(1e-5));
    Ok(format!(
        "20 type-1 + 10+10 type-2 pass, worst {worst:.1e}; (2α/3 prefactor would give modulus residual {:.3})",
        quadratic.modulus_residual
    ))
}

// 9 ------------------------------------------------------------------------

fn quotients(hyper: &PeriodData, trig: &PeriodData) -> Verdict {
    let mut worst: f64 = 0.0;
    for (p, order) in [(hyper, 4), (trig, 12)] {
        for k in 1..=p.curve.degree() {
            let r = if order == 4 { verify_quotient_hyp(p, k, 3, 1, tol(1e-6)) } else { verify_quotient_trig(p, k, 3, 1, tol(1e-6)) };
            check_report(&r, order, 1e-6)?;
            ensure(r.lhs.len() == 3 && r.spread < 1e-6, || format!("{}: spread {:e}", r.partition, r.spread))?;
            worst = worst.max(r.spread);
        }
    }
    Ok(format!("3 samples per k, 4th roots (n=2) and 12th roots (n=3), worst spread {worst:.1e}"))
}

// 10 -----------------------------------------------------------------------

fn simple_zeros(p: &PeriodData) -> Verdict {
    let t = tol(1e-6);
    let mut deriv = enumerate_partitions_trig(2, TrigKind::Type1);
    deriv.extend(enumerate_partitions_trig(2, TrigKind::Type2));
    for part in &deriv {
        let z = simple_zero_check(p, part, t).map_err(|e| e.to_string())?;
        ensure(z.pass, || format!("{}: θ {:e}, ∇θ {:e}", z.label, z.theta_abs / z.scale, z.gradient_norm / z.scale))?;
    }
    for part in enumerate_partitions_trig(2, TrigKind::Constant) {
        let z = nonvanishing_check(p, &part, t).map_err(|e| e.to_string())?;
        ensure(z.pass, || format!("{} vanishes", z.label))?;
    }
    let divisors = branch_divisors(2, 3);
    let mut simple = 0;
    for d in &divisors {
        let z = simple_zero_divisor(p, d, t).map_err(|e| e.to_string())?;
        let enumerated = TrigPartition::from_divisor(2, d).map(|q| deriv.contains(&q)).unwrap_or(false);
        ensure(z.pass == enumerated, || format!("{}: simple {} but enumerated {enumerated}", z.label, z.pass))?;
        simple += usize::from(z.pass);
    }
    let triples = divisors.iter().filter(|d| d.values().any(|&k| k == 3)).count();
    Ok(format!(
        "{} deriv partitions simple zeros, 30 constants non-zero; of {} branch divisors exactly the {simple} enumerated are simple ({triples} triple points are not)",
        deriv.len(),
        divisors.len()
    ))
}

// 11 -----------------------------------------------------------------------

fn matrix_forms(hyper: &PeriodData, trig: &[PeriodData]) -> Verdict {
    let mut det: f64 = 0.0;
    for part in enumerate_partitions_hyp(2, 0) {
        let r = verify_matrix_form_hyp(hyper, &part, tol(1e-6));
        ensure(r.pass && r.extra["det_sigma_residual"] < 1e-9, || format!("{}: {:?} {:?}", r.partition, r.note, r.extra))?;
        det = det.max(r.extra["det_sigma_residual"]);
    }
    let alpha = estimate_alpha(&trig[..1], tol(1e-6)).map_err(|e| e.to_string())?.references[0];
    let mut off: f64 = 0.0;
    for part in enumerate_partitions_trig(2, TrigKind::Constant) {
        let r = verify_matrix_form_trig(&trig[0], alpha, &part, tol(1e-6));
        ensure(r.pass && r.extra["sigma_off_block"] < 1e-10, || format!("{}: {:?} {:?}", r.partition, r.note, r.extra))?;
        off = off.max(r.extra["sigma_off_block"]);
    }
    Ok(format!("10 hyperelliptic forms, det Σ residual {det:.1e}; 30 degenerate forms, zero block {off:.1e}"))
}

// 12 -----------------------------------------------------------------------

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn cli_determinism() -> Verdict {
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_thomae")).args(args).output().unwrap();
    let plan = fixture("plan_hyper.json");
    let a = run(&["verify", &plan]);
    let b = run(&["verify", &plan]);
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "JSONL differs between runs".into())?;
    let codes = [
        run(&["verify", &plan]).status.code(),
        run(&["verify", &fixture("plan_tight.json")]).status.code(),
        run(&["verify", &fixture("plan_unknown.json")]).status.code(),
        run(&["periods", &fixture("duplicate.json")]).status.code(),
    ];
    ensure(codes == [Some(0), Some(1), Some(2), Some(3)], || format!("exit codes {codes:?}"))?;
    Ok(format!("{} identical bytes over two runs; exit codes pass/fail/parse/invalid = 0/1/2/3", a.stdout.len()))
}

fn main() {
    let hyper = genus_two_curves();
    let trig = trigonal_curves();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("theta core", Box::new(theta_core)),
        ("period sanity", Box::new(period_sanity)),
        ("closed-form j", Box::new(closed_forms)),
        ("hyperelliptic constants", Box::new(|| thomae_const_hyp(&hyper))),
        ("hyperelliptic derivatives", Box::new(|| thomae_deriv_hyp(&hyper))),
        ("Jacobians", Box::new(jacobians)),
        ("trigonal alpha", Box::new(|| alpha_criterion(&trig))),
        ("trigonal derivatives", Box::new(|| derivative_trig(&trig))),
        ("theta quotients", Box::new(|| quotients(&hyper[1], &trig[0]))),
        ("simple zeros", Box::new(|| simple_zeros(&trig[1]))),
        ("matrix forms", Box::new(|| matrix_forms(&hyper[1], &trig[2..]))),
        ("CLI determinism", Box::new(cli_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
