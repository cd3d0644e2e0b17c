//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use onecomp::boundary::SawtoothRegion;
use onecomp::classifier::{
    criterion_scan, default_radial_grid, default_sawtooth_levels, level_set_components,
    sawtooth_samples, sawtooth_test, ScanConfig, Verdict,
};
use onecomp::companion::{construct_companion, CompanionConfig};
use onecomp::families;
use onecomp::geometry::{mobius, rho, BoundaryArc};
use onecomp::inner::{blaschke_factor, BlaschkeProduct, InnerFunction, ZeroSequence};
use onecomp::measures::{
    herglotz_kernel, AtomicMeasure, CantorMeasure, CdfMeasure, SingularMeasure,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_disc(rng: &mut ChaCha8Rng, rmax: f64) -> Complex64 {
    Complex64::from_polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

// ------------------------------------------------------------------ 1

fn scan_families() -> Outcome {
    let cfg = ScanConfig { depth: 14, tol: 1e-3, ..ScanConfig::default() };
    let mut agree = 0;
    let mut parts = Vec::new();
    for (name, theta, expected) in families::seeded() {
        let r = criterion_scan(&theta, &cfg).expect("scan runs");
        let ok = r.scan_verdict == expected;
        agree += ok as usize;
        parts.push(format!("{name}={}{}", r.scan_verdict.as_str(), if ok { "" } else { "(!)" }));
        if !ok {
            parts.push(format!("C*={:.6}", r.c_star));
        }
    }
    outcome(agree == 6, format!("{agree}/6 agree [{}]", parts.join(" ")))
}

// ------------------------------------------------------------------ 2

fn example1_bound() -> Outcome {
    let theta = families::example1();
    let mut worst = f64::INFINITY;
    for k in 3..=20 {
        let r = 1.0 - (-(k as f64)).exp2();
        let m = theta.modulus_bounds(c(r, 0.0), 1e-9).expect("evaluates");
        worst = worst.min(m.hi + 1e-9 - (-3.0 * (1.0 - r * r)).exp());
    }
    let r20 = 1.0 - (-20f64).exp2();
    let s20 = theta.modulus_bounds(c(r20, 0.0), 1e-9).expect("evaluates");
    outcome(
        worst >= 0.0 && s20.lo > 0.999,
        format!("min(|S| - exp(-3(1-r²))) = {worst:.3e}, |S(1-2^-20)| ≥ {:.9}", s20.lo),
    )
}

// ------------------------------------------------------------------ 3

fn cantor_divergence() -> Outcome {
    let measure = CantorMeasure::middle_thirds();
    let sigma: SingularMeasure = measure.clone().into();
    let theta = families::cantor();
    let region = SawtoothRegion::new(sigma.support());
    let big_l = |n: u32| TAU * (1.0f64 / 3.0).powi(n as i32);
    let delta = |n: u32| TAU * (2.0f64 / 3.0).powi(n as i32);
    let mut checked = 0usize;
    let mut worst_ratio = f64::INFINITY;
    let mut sup14 = 0.0f64;
    for n in 5..=14u32 {
        let (lo_gap, hi_gap) = (big_l(n), big_l(n - 1));
        let bound = 1.0 / (2.0 * delta(n - 1));
        for gap in [lo_gap, (lo_gap * hi_gap).sqrt(), hi_gap] {
            let pts = sawtooth_samples(&region, 1.0 - gap).expect("samples");
            let stride = (pts.len() / 1500).max(1);
            let sample: Vec<Complex64> = pts.into_iter().step_by(stride).collect();
            let vals: Vec<(f64, f64)> = sample
                .par_iter()
                .map(|&z| {
                    let p = sigma.poisson_integral(z, 1e-3).expect("poisson").lo;
                    let s = theta.modulus_bounds(z, 1e-9).expect("modulus").hi;
                    (p, s)
                })
                .collect();
            checked += vals.len();
            for (p, s) in vals {
                worst_ratio = worst_ratio.min(p / bound);
                if n == 14 {
                    sup14 = sup14.max(s);
                }
            }
        }
    }
    let cfg = ScanConfig::default();
    let st = sawtooth_test(&theta, &default_sawtooth_levels(14), &cfg).expect("sawtooth");
    outcome(
        worst_ratio >= 1.0 && sup14 < 0.01,
        format!(
            "{checked} points, min P/bound = {worst_ratio:.3}, sup |S| at depth 14 = {sup14:.3e} (sawtooth test sup {:.3e})",
            st.sup_estimate
        ),
    )
}

// ------------------------------------------------------------------ 4

fn point_mass() -> Outcome {
    let theta = families::single_atom();
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.25, 0.5, 0.75] {
        let m = theta.modulus_bounds(c(r, 0.0), 1e-14).expect("evaluates").estimate;
        let exact = (-(1.0 + r) / (1.0 - r)).exp();
        worst = worst.max((m - exact).abs());
    }
    outcome(worst <= 1e-12, format!("max error {worst:.2e}"))
}

// ------------------------------------------------------------------ 5

fn companion_end_to_end() -> Outcome {
    let t = Instant::now();
    let cfg = CompanionConfig { horizon: 2000, depth: 14, ..CompanionConfig::default() };
    let comp = construct_companion(&families::single_atom(), &cfg).expect("construction");
    let v = &comp.verification;
    let a = v.spacing_error < 1e-6;
    let b = v.separation.delta >= 0.05 && v.separation.box_constant.is_finite();
    let cc = v.scan_b.scan_verdict == Verdict::OneComponentEvidence
        && v.scan_b_theta.scan_verdict == Verdict::OneComponentEvidence;
    let d = v.mechanism_violations.is_empty();
    outcome(
        comp.zeros.len() == 2000 && a && b && cc && d,
        format!(
            "{} zeros; (a) max|ρ-0.1| = {:.1e}; (b) δ = {:.4}, box = {:.3}; (c) B {} / BΘ {}; (d) {} violations in {} points; {:.1?}",
            comp.zeros.len(),
            v.spacing_error,
            v.separation.delta,
            v.separation.box_constant,
            v.scan_b.scan_verdict.as_str(),
            v.scan_b_theta.scan_verdict.as_str(),
            v.mechanism_violations.len(),
            v.mechanism_points,
            t.elapsed()
        ),
    )
}

// ------------------------------------------------------------------ 6

/// Components of `{|B| < ε}` on an `n×n` Cartesian grid over the disc, 4-connected.
fn brute_force_components(zeros: &[Complex64], eps: f64, n: usize) -> usize {
    let h = 2.0 / n as f64;
    let marked: Vec<bool> = (0..n * n)
        .into_par_iter()
        .map(|id| {
            let z = c(-1.0 + (id % n) as f64 * h + 0.5 * h, -1.0 + (id / n) as f64 * h + 0.5 * h);
            if z.norm() >= 1.0 {
                return false;
            }
            let m: f64 = zeros.iter().map(|&w| ((z - w) / (1.0 - w.conj() * z)).norm()).product();
            m < eps
        })
        .collect();
    let mut seen = vec![false; n * n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n * n {
        if !marked[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(id) = stack.pop() {
            let (x, y) = (id % n, id / n);
            let mut visit = |nb: usize| {
                if marked[nb] && !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            };
            if x > 0 {
                visit(id - 1);
            }
            if x + 1 < n {
                visit(id + 1);
            }
            if y > 0 {
                visit(id - n);
            }
            if y + 1 < n {
                visit(id + n);
            }
        }
    }
    count
}

fn level_set_oracle() -> Outcome {
    let cases: [Vec<Complex64>; 3] = [
        vec![c(0.5, 0.0)],
        vec![c(0.5, 0.0), c(-0.5, 0.0)],
        vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0)],
    ];
    let mut agree = 0;
    let mut parts = Vec::new();
    for zeros in &cases {
        let theta = InnerFunction::finite_blaschke(zeros.clone()).expect("zeros in disc");
        for eps in [0.1, 0.5, 0.9] {
            let ours = level_set_components(&theta, eps, 10).expect("level set").component_count;
            let oracle = brute_force_components(zeros, eps, 2048);
            agree += (ours == oracle) as usize;
            parts.push(format!("{}z/{eps}:{ours}v{oracle}", zeros.len()));
        }
    }
    outcome(agree == 9, format!("{agree}/9 agree [{}]", parts.join(" ")))
}

// ------------------------------------------------------------------ 7

fn invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();

    // metric axioms and Möbius invariance
    let mut metric_err: f64 = 0.0;
    for _ in 0..10_000 {
        let (z, w, u, a) = (
            random_disc(&mut rng, 0.95),
            random_disc(&mut rng, 0.95),
            random_disc(&mut rng, 0.95),
            random_disc(&mut rng, 0.95),
        );
        metric_err = metric_err
            .max((rho(z, w) - rho(w, z)).abs())
            .max(rho(z, z))
            .max(rho(z, w) - rho(z, u) - rho(u, w))
            .max((rho(mobius(a, z), mobius(a, w)) - rho(z, w)).abs());
    }
    if metric_err > 1e-12 {
        failures.push(format!("metric {metric_err:.1e}"));
    }

    // boundary unimodularity and Schwarz–Pick for random finite products
    let mut unimod_err: f64 = 0.0;
    let mut pick_err: f64 = 0.0;
    for trial in 0..10 {
        let zeros: Vec<Complex64> = (0..1 + trial % 5).map(|_| random_disc(&mut rng, 0.9)).collect();
        for k in 0..1024 {
            let xi = Complex64::from_polar(1.0, TAU * k as f64 / 1024.0);
            let b: Complex64 = zeros.iter().map(|&w| blaschke_factor(w, xi)).product();
            unimod_err = unimod_err.max((b.norm() - 1.0).abs());
        }
        let theta = InnerFunction::finite_blaschke(zeros).expect("zeros in disc");
        for _ in 0..1000 {
            let (z, w) = (random_disc(&mut rng, 0.99), random_disc(&mut rng, 0.99));
            let (bz, bw) = (theta.evaluate(z, 1e-12).unwrap(), theta.evaluate(w, 1e-12).unwrap());
            pick_err = pick_err.max(rho(bz, bw) - rho(z, w));
        }
    }
    if unimod_err > 1e-12 {
        failures.push(format!("unimodularity {unimod_err:.1e}"));
    }
    if pick_err > 1e-10 {
        failures.push(format!("Schwarz–Pick {pick_err:.1e}"));
    }

    // Re of the Herglotz integral equals -P[σ]; independent midpoint sums
    let tol = 1e-9;
    let atoms = AtomicMeasure::new(vec![(0.3, 0.7), (2.0, 0.2), (4.5, 1.1)], 0.0).unwrap();
    let cantor = CantorMeasure::middle_thirds();
    let gen = 16;
    let (starts, len) = (cantor.generation(gen), cantor.length(gen));
    let weight = (-(gen as f64)).exp2();
    let mut herg_err: f64 = 0.0;
    for _ in 0..50 {
        let z = random_disc(&mut rng, 0.9);
        let a: SingularMeasure = atoms.clone().into();
        let re_atoms: f64 = atoms.atoms().iter().map(|&(t, m)| m * herglotz_kernel(z, t).re).sum();
        herg_err = herg_err.max((re_atoms + a.poisson_integral(z, tol).unwrap().estimate).abs());
        let cm: SingularMeasure = cantor.clone().into();
        let re_cantor: f64 = starts.iter().map(|&s| weight * herglotz_kernel(z, s + 0.5 * len).re).sum();
        herg_err = herg_err.max((re_cantor + cm.poisson_integral(z, tol).unwrap().estimate).abs());
        let h = cm.herglotz_integral(z, tol).unwrap();
        herg_err = herg_err.max((h.re + cm.poisson_integral(z, tol).unwrap().estimate).abs());
    }
    if herg_err > 2.0 * tol {
        failures.push(format!("Herglotz {herg_err:.1e}"));
    }

    // certified tails contain the doubled-depth enclosure
    let listed: Vec<Complex64> = (0..4000).map(|_| Complex64::from_polar(1.0 - rng.gen_range(1e-4..0.2), rng.gen_range(0.0..TAU))).collect();
    let products = [
        BlaschkeProduct::new(ZeroSequence::radial_geometric(1.0)),
        BlaschkeProduct::new(ZeroSequence::radial_sparse(2.0)),
        BlaschkeProduct::new(ZeroSequence::with_tail(listed, 0.0).unwrap()),
    ];
    let mut contained = 0;
    for q in 0..1000 {
        let b = &products[q % 3];
        let z = random_disc(&mut rng, 0.99);
        let n = rng.gen_range(1..b.zeros.available() / 2);
        let e1 = b.log_modulus_prefix(z, n).unwrap().log;
        let e2 = b.log_modulus_prefix(z, 2 * n).unwrap().log;
        let slack = 1e-12 * (1.0 + e1.lo.abs());
        contained += (e2.lo >= e1.lo - slack && e2.hi <= e1.hi + slack) as usize;
    }
    if contained < 1000 {
        failures.push(format!("tail containment {contained}/1000"));
    }

    // additivity and monotonicity of arc masses
    let measures: [SingularMeasure; 3] = [
        AtomicMeasure::new((0..50).map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.0..1.0))).collect(), 0.0)
            .unwrap()
            .into(),
        cantor.clone().into(),
        CdfMeasure::new(vec![(0.0, 0.0), (1.0, 0.3), (2.0, 0.3), (4.0, 0.9), (TAU, 1.0)]).unwrap().into(),
    ];
    let mut mass_err: f64 = 0.0;
    for m in &measures {
        for _ in 0..300 {
            let a = rng.gen_range(0.0..TAU);
            let (l1, l2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let arc = |s: f64, l: f64| BoundaryArc::from_endpoints(s, s + l).unwrap();
            let whole = m.mass_of_arc(&arc(a, l1 + l2), false, 1e-13).unwrap();
            let left = m.mass_of_arc(&arc(a, l1), false, 1e-13).unwrap();
            let right = m.mass_of_arc(&arc(a + l1, l2), false, 1e-13).unwrap();
            let inner = m.mass_of_arc(&arc(a + 0.25 * l1, 0.5 * l1), false, 1e-13).unwrap();
            mass_err = mass_err.max((whole - left - right).abs()).max(inner - left);
        }
    }
    if mass_err > 1e-12 {
        failures.push(format!("measure {mass_err:.1e}"));
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "metric {metric_err:.1e}, unimodular {unimod_err:.1e}, Schwarz–Pick {pick_err:.1e}, Herglotz {herg_err:.1e}, tails 1000/1000, measures {mass_err:.1e}"
            )
        } else {
            failures.join(", ")
        },
    )
}

// ------------------------------------------------------------------ 8

fn radial_dichotomy() -> Outcome {
    let grid = default_radial_grid();
    // certified side of each comparison: upper bounds for the geometric family, lower for sparse
    let sup = |theta: &InnerFunction, upper: bool| {
        grid.iter()
            .map(|&r| {
                let m = theta.modulus_bounds(c(r, 0.0), 1e-9).expect("evaluates");
                if upper { m.hi } else { m.lo }
            })
            .fold(0.0, f64::max)
    };
    let geo = sup(&families::radial_geometric(), true);
    let sparse = sup(&families::radial_sparse(), false);
    outcome(
        geo <= 0.999 && sparse >= 0.999999,
        format!("geometric sup {geo:.6} (≤ 0.999), sparse sup {sparse:.6} (≥ 0.999999)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("scan verdicts on the six reference families", scan_families),
        ("accumulating-atom lower bound", example1_bound),
        ("Cantor Poisson divergence on the sawtooth region", cantor_divergence),
        ("point-mass closed form", point_mass),
        ("companion construction for the unit atom", companion_end_to_end),
        ("level-set counts against a Cartesian flood fill", level_set_oracle),
        ("invariant suites", invariants),
        ("radial-limit dichotomy", radial_dichotomy),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        failed += !o.pass as usize;
        println!(
            "criterion {} {} {name}: {} ({:.1?})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
    }
    println!("acceptance: {}/8 criteria pass", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
