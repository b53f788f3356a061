//! One line per acceptance criterion, with the measured residuals and wall time.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use boundcoh::certifier::{
    certify_complex_region, certify_interval, doubling_defect, five_term_defect, target_grid, GridConfig,
    ScalarFunction,
};
use boundcoh::cochain::{
    alternation_projection, coboundary, cone_homotopy, empirical_sup_defect, model_coboundary, BiCochain, Cochain,
    Domain,
};
use boundcoh::flags::{random_sl3, triple_ratio, Flag3, DEFAULT_TOL};
use boundcoh::hyperbolic_boundary::{
    cartan_invariant, lorentz, restrict_to_h3, ComplexBoundaryPoint, ComplexIsometry, HyperbolicPoint,
    RealBoundaryPoint,
};
use boundcoh::projective::{cross_ratio, Field, MoebiusMap, ProjectivePoint};
use boundcoh::reports::{compactness_probe, Model, ProbeConfig, SamplerConfig};
use boundcoh::rng::{gaussian, substream, StreamRng};
use boundcoh::sampling::{sample_generic, ComplexBoundarySampler, FlagSampler, ProjectiveSampler};
use boundcoh::volume::{lobachevsky, vol3};
use boundcoh::Error;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cgauss(rng: &mut StreamRng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

fn cross_ratio_invariance() -> Check {
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let mut rng = substream(101, i);
        let m = loop {
            if let Ok(m) = MoebiusMap::complex(cgauss(&mut rng), cgauss(&mut rng), cgauss(&mut rng), cgauss(&mut rng)) {
                break m;
            }
        };
        let x: Vec<ProjectivePoint> = (0..4).map(|_| ProjectivePoint::complex(cgauss(&mut rng))).collect();
        let y: Vec<ProjectivePoint> = x.iter().map(|p| m.apply(p)).collect();
        let a = cross_ratio(&x[0], &x[1], &x[2], &x[3]).map_err(|e| e.to_string())?.finite().unwrap();
        let b = cross_ratio(&y[0], &y[1], &y[2], &y[3]).map_err(|e| e.to_string())?.finite().unwrap();
        worst = worst.max((a - b).norm() / a.norm());
    }
    ensure(worst <= 1e-9, format!("max relative error {worst:.2e} over 10^4 pairs"))
}

fn sine_cochain(arity: usize, seed: u64) -> Cochain<RealBoundaryPoint> {
    let mut rng = substream(seed, 0);
    let w: Vec<f64> = (0..arity * arity * 2).map(|_| gaussian(&mut rng)).collect();
    Cochain::new(arity, Domain::RealBoundary(3), move |x: &[RealBoundaryPoint]| {
        let mut acc = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                let k = 2 * (i * x.len() + j);
                acc += w[k] * (w[k + 1] * x[i].direction().dot(x[j].direction()) + i as f64).sin();
            }
        }
        Ok(acc)
    })
}

fn coboundary_and_alternation() -> Check {
    let mut worst_dd = 0.0f64;
    let mut worst_alt = 0.0f64;
    for arity in 1..=3 {
        let f = sine_cochain(arity, 200 + arity as u64);
        let ddf = coboundary(&coboundary(&f));
        let p = alternation_projection(&f).map_err(|e| e.to_string())?;
        let pp = alternation_projection(&p).map_err(|e| e.to_string())?;
        for i in 0..1_000 {
            let mut rng = substream(201, i);
            let t: Vec<RealBoundaryPoint> = (0..arity + 2).map(|_| RealBoundaryPoint::random(&mut rng, 3)).collect();
            worst_dd = worst_dd.max(ddf.evaluate(&t).map_err(|e| e.to_string())?.abs());
            let s = &t[..arity];
            let r = p.evaluate(s).map_err(|e| e.to_string())? - pp.evaluate(s).map_err(|e| e.to_string())?;
            worst_alt = worst_alt.max(r.abs());
        }
    }
    ensure(
        worst_dd <= 1e-10 && worst_alt <= 1e-10,
        format!("|δδf| ≤ {worst_dd:.1e}, |Alt(Alt f) − Alt f| ≤ {worst_alt:.1e}"),
    )
}

fn model_point(rng: &mut StreamRng) -> HyperbolicPoint {
    let v: Vec<f64> = (0..3).map(|_| gaussian(rng) * 0.8).collect();
    let r2: f64 = v.iter().map(|x| x * x).sum();
    let mut lift = v;
    lift.push((1.0 + r2).sqrt());
    HyperbolicPoint::new(DVector::from_vec(lift)).unwrap()
}

fn cone_identity() -> Check {
    let mut worst = 0.0f64;
    for p in 1..=3usize {
        let k = p + 1;
        let mut rng = substream(300, p as u64);
        let w: Vec<f64> = (0..k * k + k).map(|_| gaussian(&mut rng)).collect();
        let s: Vec<f64> = (0..k * k).map(|_| rng.random_range(0.2..2.0)).collect();
        let f = BiCochain::new(k, 3, move |m: &[HyperbolicPoint], b: &[RealBoundaryPoint]| {
            let mut acc = 0.0;
            for i in 0..m.len() {
                for j in 0..m.len() {
                    acc += w[i * k + j] * (-(m[i].distance(&m[j]) / s[i * k + j]).powi(2)).exp();
                }
                acc += w[k * k + i] * b[0].direction().dot(b[1].direction()) * m[i].lift()[0].tanh();
            }
            Ok(acc)
        });
        let h_df = cone_homotopy(&model_coboundary(&f)).map_err(|e| e.to_string())?;
        let d_hf = model_coboundary(&cone_homotopy(&f).map_err(|e| e.to_string())?);
        for e in 0..100 {
            let mut rng = substream(301, (p * 1_000 + e) as u64);
            let m: Vec<HyperbolicPoint> = (0..k).map(|_| model_point(&mut rng)).collect();
            let b: Vec<RealBoundaryPoint> = (0..3).map(|_| RealBoundaryPoint::random(&mut rng, 3)).collect();
            let lhs = f.evaluate(&m, &b).map_err(|e| e.to_string())?;
            let rhs = h_df.evaluate(&m, &b).map_err(|e| e.to_string())? + d_hf.evaluate(&m, &b).map_err(|e| e.to_string())?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    ensure(worst <= 1e-12, format!("max residual {worst:.1e} over 3 × 10^2 evaluations"))
}

fn vol3_cocycle() -> Check {
    let f = Cochain::new(4, Domain::ProjectiveLine(Field::Complex), |x: &[ProjectivePoint]| {
        vol3(&x[0], &x[1], &x[2], &x[3])
    });
    let sampler = ProjectiveSampler { field: Field::Complex, tol: 1e-9 };
    let report = empirical_sup_defect(&f, &sampler, 1_000, 400).map_err(|e| e.to_string())?;
    let regular = 3.0 * lobachevsky(PI / 3.0);
    ensure(
        report.sup_abs <= 1e-7 && (regular - 1.0149416064).abs() <= 1e-9,
        format!("sup |δVol₃| = {:.1e}, 3Λ(π/3) = {regular:.12}", report.sup_abs),
    )
}

fn cartan() -> Check {
    let sampler = ComplexBoundarySampler { dim: 2, tol: 1e-9 };
    let batch = sample_generic(&sampler, 3, 100_000, 500).map_err(|e| e.to_string())?;
    let mut extreme = 0.0f64;
    let mut worst_iso = 0.0f64;
    for (i, t) in batch.tuples.iter().enumerate() {
        let a = cartan_invariant(&t[0], &t[1], &t[2]).map_err(|e| e.to_string())?;
        extreme = extreme.max(a.abs());
        if i < 2_000 {
            let g = ComplexIsometry::random(&mut substream(501, i as u64), 2);
            let b = cartan_invariant(&g.apply(&t[0]), &g.apply(&t[1]), &g.apply(&t[2])).map_err(|e| e.to_string())?;
            worst_iso = worst_iso.max((a - b).abs());
        }
    }
    let mut worst_real = 0.0f64;
    let mut worst_chain = 0.0f64;
    for i in 0..1_000 {
        let mut rng = substream(502, i);
        let real: Vec<ComplexBoundaryPoint> = (0..3)
            .map(|_| {
                let v: Vec<Complex64> = (0..2).map(|_| Complex64::new(gaussian(&mut rng), 0.0)).collect();
                ComplexBoundaryPoint::from_sphere(v).unwrap()
            })
            .collect();
        worst_real = worst_real.max(cartan_invariant(&real[0], &real[1], &real[2]).map_err(|e| e.to_string())?.abs());
        let chain: Vec<ComplexBoundaryPoint> = (0..3)
            .map(|_| {
                let t = rng.random_range(0.0..2.0 * PI);
                ComplexBoundaryPoint::from_sphere(vec![Complex64::from_polar(1.0, t), Complex64::new(0.0, 0.0)]).unwrap()
            })
            .collect();
        let c = cartan_invariant(&chain[0], &chain[1], &chain[2]).map_err(|e| e.to_string())?;
        worst_chain = worst_chain.max((c.abs() - FRAC_PI_2).abs());
    }
    ensure(
        extreme <= FRAC_PI_2 + 1e-10 && worst_real <= 1e-10 && worst_chain <= 1e-10 && worst_iso <= 1e-9,
        format!(
            "max |A| − π/2 = {:.1e} over 10^5, real {worst_real:.1e}, chain {worst_chain:.1e}, isometry {worst_iso:.1e}",
            extreme - FRAC_PI_2
        ),
    )
}

fn flags() -> Check {
    let batch = sample_generic(&FlagSampler { tol: DEFAULT_TOL }, 3, 100_000, 600).map_err(|e| e.to_string())?;
    let rate = batch.acceptance_rate();
    let mut worst_inv = 0.0f64;
    let mut worst_id = 0.0f64;
    for (i, t) in batch.tuples.iter().enumerate().take(10_000) {
        let a = triple_ratio(&t[0], &t[1], &t[2]).map_err(|e| e.to_string())?;
        let g = random_sl3(&mut substream(601, i as u64));
        let gt: Vec<Flag3> = t.iter().map(|f| f.transform(&g).unwrap()).collect();
        let b = triple_ratio(&gt[0], &gt[1], &gt[2]).map_err(|e| e.to_string())?;
        worst_inv = worst_inv.max((a - b).abs() / a.abs());
        let swapped = triple_ratio(&t[0], &t[2], &t[1]).map_err(|e| e.to_string())?;
        let cycled = triple_ratio(&t[1], &t[2], &t[0]).map_err(|e| e.to_string())?;
        worst_id = worst_id.max((a * swapped - 1.0).abs()).max((cycled - a).abs() / a.abs().max(1.0));
    }
    ensure(
        rate >= 0.999 && worst_inv <= 1e-9 && worst_id <= 1e-12,
        format!("acceptance {:.4}%, SL3 {worst_inv:.1e}, identities {worst_id:.1e}", 100.0 * rate),
    )
}

fn probes() -> Check {
    let probe = ProbeConfig::default();
    let s1 = compactness_probe(&SamplerConfig::new(Model::S1, 3, 10_000, 700), "orientation_class", &probe)
        .map_err(|e| e.to_string())?;
    let fl = compactness_probe(&SamplerConfig::new(Model::Flags3, 3, 100_000, 701), "triple_ratio", &probe)
        .map_err(|e| e.to_string())?;
    let classes = s1.summary["classes"].as_u64().unwrap_or(0);
    let above = fl.summary["observed_above_high"].as_u64().unwrap_or(0);
    let below = fl.summary["observed_below_low"].as_u64().unwrap_or(0);
    ensure(
        classes == 2 && fl.summary["verdict"] == "escape-detected" && above > 0 && below > 0,
        format!("S¹ classes {classes}, flags3 {} with {above} above 10^3, {below} below 10^-3", fl.summary["verdict"]),
    )
}

fn certifier() -> Check {
    let k = 0.75;
    let constant = ScalarFunction::real("const", move |_| k);
    let c1 = Complex64::new(0.4, 0.0);
    let c2 = Complex64::new(-2.0, 0.0);
    let exact = five_term_defect(&constant, c1, c2).map_err(|e| e.to_string())? == k;

    let slice = Cochain::new(4, Domain::ProjectiveLine(Field::Complex), |x: &[ProjectivePoint]| {
        vol3(&x[0], &x[1], &x[2], &x[3])
    })
    .declare_alternating();
    let f = ScalarFunction::from_cochain(&slice, Field::Complex).map_err(|e| e.to_string())?;
    let grid = GridConfig::default();
    let cert = certify_complex_region(&f, 0.1, &grid).map_err(|e| e.to_string())?;
    let fine = target_grid(&cert.region, &grid.with_points(grid.points * 10))
        .into_iter()
        .map(|z| f.evaluate(z).map(f64::abs))
        .collect::<Result<Vec<f64>, Error>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(0.0, f64::max);
    let sound = cert.certified_bound.is_finite() && cert.certified_bound >= fine - 1e-9;
    let i = cert.inputs;
    let reproduced = cert.certified_bound == i.m_base + 2.0 * (i.b_defect + 2.0 * i.m_near2);

    let pole = ScalarFunction::real("1/(1-x)", |x| 1.0 / (1.0 - x));
    let refused = matches!(certify_interval(&pole, 0.125, &grid), Err(Error::UnboundedDefect { .. }));

    let mut worst = 0.0f64;
    for s in 0..1_000 {
        let mut rng = substream(800, s);
        let x = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let (Ok(a), Ok(b)) = (doubling_defect(&f, x), five_term_defect(&f, x, x * x)) else {
            continue;
        };
        worst = worst.max((a - b).abs());
    }
    ensure(
        exact && sound && reproduced && refused && worst <= 1e-12,
        format!(
            "constant exact {exact}, bound {:.6} ≥ fine sup {fine:.6}, reproduced {reproduced}, pole refused {refused}, identity {worst:.1e}",
            cert.certified_bound
        ),
    )
}

fn restriction() -> Check {
    let ratio = |l: &[DVector<f64>], i: usize, j: usize, k: usize, m: usize| {
        lorentz(&l[i], &l[j]) * lorentz(&l[k], &l[m]) / (lorentz(&l[i], &l[k]) * lorentz(&l[j], &l[m]))
    };
    let mut worst = 0.0f64;
    for s in 0..1_000 {
        let mut rng = substream(900, s);
        let p: Vec<RealBoundaryPoint> = (0..4).map(|_| RealBoundaryPoint::random(&mut rng, 5)).collect();
        let r = restrict_to_h3([&p[0], &p[1], &p[2], &p[3]]).map_err(|e| e.to_string())?;
        let before: Vec<DVector<f64>> = p.iter().map(|q| q.lift()).collect();
        let after: Vec<DVector<f64>> = r.points.iter().map(|q| q.lift()).collect();
        for (i, j, k, m) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
            let a = ratio(&before, i, j, k, m);
            let b = ratio(&after, i, j, k, m);
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    ensure(worst <= 1e-9, format!("max Gram-ratio error {worst:.1e} over 10^3 tuples in ∂H⁵"))
}

const SUITE: &[&[&str]] = &[
    &["sample", "--model", "s1", "--count", "1000", "--seed", "11"],
    &["sample", "--model", "sn", "--n", "3", "--count", "1000", "--seed", "11"],
    &["sample", "--model", "complex-hyperbolic", "--n", "2", "--count", "1000", "--seed", "11"],
    &["sample", "--model", "flags3", "--count", "1000", "--seed", "11"],
    &["invariant", "--invariant", "cartan", "--model", "complex-hyperbolic", "--n", "2", "--seed", "11"],
    &["invariant", "--invariant", "triple_ratio", "--model", "flags3", "--seed", "11"],
    &["invariant", "--invariant", "cross_ratio", "--model", "sn", "--n", "3", "--seed", "11"],
    &["invariant", "--invariant", "vol3", "--model", "sn", "--n", "3", "--seed", "11"],
    &["verify-cocycle", "--cocycle", "vol3", "--seed", "11"],
    &["verify-cocycle", "--cocycle", "vol2", "--seed", "11"],
    &["certify-bound", "--function", "vol3", "--field", "complex", "--extend", "--seed", "11"],
    &["probe-config-space", "--invariant", "orientation_class", "--model", "s1", "--seed", "11"],
    &["probe-config-space", "--invariant", "triple_ratio", "--model", "flags3", "--seed", "11"],
];

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_boundcoh");
    let mut runs = 0;
    for args in SUITE {
        for format in ["json", "csv"] {
            let outputs: Vec<Vec<u8>> = (0..2)
                .map(|_| {
                    Command::new(bin)
                        .args(*args)
                        .args(["--format", format])
                        .env_remove("BOUNDCOH_SEED")
                        .output()
                        .map(|o| o.stdout)
                        .unwrap_or_default()
                })
                .collect();
            if outputs[0].is_empty() || outputs[0] != outputs[1] {
                return Err(format!("{} --format {format} differs between runs", args.join(" ")));
            }
            runs += 2;
        }
    }
    ensure(true, format!("{runs} runs, byte-identical pairs"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, u64); 10] = [
        ("cross-ratio Möbius invariance", cross_ratio_invariance, 2),
        ("δ² = 0 and alternation idempotence", coboundary_and_alternation, 2),
        ("cone homotopy identity", cone_identity, 5),
        ("Vol₃ cocycle and regular tetrahedron", vol3_cocycle, 10),
        ("Cartan invariant", cartan, 10),
        ("flag genericity and triple ratio", flags, 10),
        ("configuration probes", probes, 10),
        ("certifier soundness", certifier, 30),
        ("restriction to ∂H³", restriction, 5),
        ("CLI determinism", determinism, 30),
    ];
    let mut failed = 0;
    for (n, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {detail} [{:.2} s, limit {limit} s]",
            n + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
