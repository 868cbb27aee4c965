//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the summary prints in order; exits non-zero on any failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sl_foliation::algebra::{build_structure_table, dims, AlgebraElement, BasisIndex};
use sl_foliation::complex::torus_complex;
use sl_foliation::foliation::{
    check_equivariance, check_mc, linear_abelian, product_foliation, suspension_ga,
    LieFoliationSpec, MaurerCartan,
};
use sl_foliation::group::{
    chart_len, circle_projection, ga_embed, ga_mul, iwasawa_sl2, iwasawa_sln, iwasawa_sln_right,
    rotation, CircleAngle, GAElement, GroupError,
};
use sl_foliation::linalg::{determinant, matrix_exp, FMatrix, Rational, Tolerances};
use sl_foliation::tischler::{
    check_submersion, fiber_census, generic_values, integrate_to_circle, pipeline_sln, rationalize,
    PipelineConfig, RationalizeConfig, StageRecord, TischlerError,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn random_sl(n: usize, rng: &mut impl Rng) -> FMatrix {
    loop {
        let m = FMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let det = determinant(&m);
        if det.abs() > 0.05 {
            let s = det.abs().powf(-1.0 / n as f64);
            let sign = det.signum();
            return FMatrix::from_fn(n, |i, j| m.get(i, j) * s * if i == 0 { sign } else { 1.0 })
                .unwrap();
        }
    }
}

fn random_ga(rng: &mut impl Rng) -> GAElement {
    GAElement::new(rng.gen_range(0.1..10.0), rng.gen_range(-10.0..10.0)).unwrap()
}

fn bracket_identities() -> Check {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2..=6 {
        let table = build_structure_table(n).map_err(|e| e.to_string())?;
        let (count, bad) = table
            .offdiag_identity_violations()
            .map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || {
            format!("n = {n}: {} violations, first {:?}", bad.len(), bad[0])
        })?;
        ensure(count == (n * n - n) * (n * n - n), || {
            format!("n = {n}: {count} pairs")
        })?;
        checked += count;
    }
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!("{checked} pairs exact, {took:.2?}"))
}

fn dimension_audit() -> Check {
    for n in 2..=6 {
        let got = dims(n).map_err(|e| e.to_string())?;
        ensure(got == (n - 1, n * n - n, n * n - 1), || {
            format!("n = {n}: dims {got:?}")
        })?;
        ensure(chart_len(n) == n * (n + 1) / 2 - 1, || {
            format!("n = {n}: chart {}", chart_len(n))
        })?;
        let (g, t) = (
            random_sl(n, &mut ChaCha8Rng::seed_from_u64(n as u64)),
            Tolerances::default(),
        );
        let len = iwasawa_sln(&g, &t).map_err(|e| e.to_string())?.chart.len();
        ensure(len == chart_len(n), || {
            format!("n = {n}: decomposition chart has {len} entries")
        })?;
    }
    Ok("n = 2..6".into())
}

fn jacobi_antisymmetry() -> Check {
    let start = Instant::now();
    let mut triples = 0;
    for n in 2..=4 {
        let table = build_structure_table(n).map_err(|e| e.to_string())?;
        let anti = table.antisymmetry_violations();
        ensure(anti.is_empty(), || {
            format!("n = {n}: antisymmetry fails at {:?}", anti[0])
        })?;
        let jac = table.jacobi_violations();
        ensure(jac.is_empty(), || {
            format!("n = {n}: Jacobi fails at {:?}", jac[0])
        })?;
        triples += (n * n - 1).pow(3);
    }
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!("{triples} triples exact, {took:.2?}"))
}

fn iwasawa_roundtrips() -> Check {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        for _ in 0..1000 {
            let g = random_sl(n, &mut rng);
            for f in [iwasawa_sln(&g, &tol), iwasawa_sln_right(&g, &tol)] {
                let f = f.map_err(|e| e.to_string())?;
                let err = f.recompose().map_err(|e| e.to_string())?.max_abs_diff(&g);
                ensure(err < 1e-9, || format!("n = {n}: recompose error {err:e}"))?;
                worst = worst.max(err);
            }
        }
    }
    let mut worst_unique: f64 = 0.0;
    for _ in 0..1000 {
        let (b, theta) = (
            random_ga(&mut rng),
            CircleAngle::new(rng.gen_range(-3.0..3.0)),
        );
        let g = &ga_embed(&b) * &rotation(theta);
        let (b2, theta2) = iwasawa_sl2(&g, &tol).map_err(|e| e.to_string())?;
        let err = (b.distance(&b2) / b.a().max(b.b().abs()).max(1.0)).max(theta.distance(theta2));
        ensure(err < 1e-9, || {
            format!("GA x S^1 factors not recovered: {b:?} {theta:?} -> {b2:?} {theta2:?}")
        })?;
        worst_unique = worst_unique.max(err);
    }
    let mut worst_section: f64 = 0.0;
    for k in 0..360 {
        let theta = CircleAngle::new((k as f64).to_radians());
        let p = circle_projection(&rotation(theta), &tol).map_err(|e| e.to_string())?;
        worst_section = worst_section.max(p.distance(theta));
    }
    ensure(worst_section < 1e-12, || {
        format!("p o sigma deviates by {worst_section:e}")
    })?;
    Ok(format!(
        "recompose {worst:.1e}, GA x S^1 {worst_unique:.1e}, p o sigma {worst_section:.1e}"
    ))
}

fn ga_homomorphism() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (g, h) = (random_ga(&mut rng), random_ga(&mut rng));
        let lhs = ga_embed(&ga_mul(&g, &h));
        let rhs = &ga_embed(&g) * &ga_embed(&h);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("500 pairs, max deviation {worst:.1e}"))
}

/// A small loop through SL(2): `exp(0.4 (cos t H + sin t (E12 + E21)))`.
fn wobble(angle: CircleAngle) -> FMatrix {
    let (s, c) = angle.theta().sin_cos();
    matrix_exp(&FMatrix::from_rows(vec![vec![0.4 * c, 0.4 * s], vec![0.4 * s, -0.4 * c]]).unwrap())
}

fn sl2_torus(m: usize) -> LieFoliationSpec {
    let tol = Tolerances::default();
    let base = suspension_ga(m, GAElement::new(2.0, 1.0).unwrap(), &tol).unwrap();
    product_foliation(&base, wobble, m, &tol).unwrap()
}

fn maurer_cartan_checker() -> Check {
    let tol = Tolerances::default();
    let spec = sl2_torus(8);
    let report = check_mc(&spec, &tol).map_err(|e| e.to_string())?;
    ensure(report.flat && report.max_holonomy_residual < 1e-8, || {
        format!("clean cochain: residual {:e}", report.max_holonomy_residual)
    })?;
    let MaurerCartan::Lie(clean) = spec.mc().clone() else {
        return Err("expected a Lie-valued cochain".into());
    };
    let triangles = spec.complex().triangles().to_vec();
    let edges = spec.complex().edges().to_vec();
    let bump = AlgebraElement::basis(BasisIndex::OffDiag(1, 2), 2)
        .unwrap()
        .scale(&0.01);
    for (e, &[u, v]) in edges.iter().enumerate() {
        let mut w = clean.clone();
        w.values_mut()[e] = &w.values()[e] + &bump;
        let perturbed = spec
            .clone()
            .with_mc(MaurerCartan::Lie(w))
            .map_err(|e| e.to_string())?;
        let r = check_mc(&perturbed, &tol).map_err(|e| e.to_string())?;
        let adjacent: BTreeSet<usize> = triangles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(&u) && t.contains(&v))
            .map(|(i, _)| i)
            .collect();
        let flagged: BTreeSet<usize> = r.failing_triangles.iter().copied().collect();
        ensure(flagged == adjacent, || {
            format!("edge {u}-{v}: flagged {flagged:?}, adjacent {adjacent:?}")
        })?;
    }
    Ok(format!(
        "{} triangles, residual {:.1e}; all {} single-edge perturbations localized",
        triangles.len(),
        report.max_holonomy_residual,
        edges.len()
    ))
}

fn fedida_equivariance() -> Check {
    let tol = Tolerances::default();
    let t = Arc::new(torus_complex(2, 8).map_err(|e| e.to_string())?);
    let linear =
        linear_abelian(t, vec![vec![1.0, 2f64.sqrt()]], &tol).map_err(|e| e.to_string())?;
    let a = check_equivariance(&linear).map_err(|e| e.to_string())?;
    ensure(a.max_deviation < 1e-12, || {
        format!("linear: {:e}", a.max_deviation)
    })?;
    let base =
        suspension_ga(6, GAElement::new(2.0, 1.0).unwrap(), &tol).map_err(|e| e.to_string())?;
    let product = product_foliation(&base, rotation, 12, &tol).map_err(|e| e.to_string())?;
    let b = check_equivariance(&product).map_err(|e| e.to_string())?;
    ensure(b.max_deviation < 1e-9, || {
        format!("product: {:e}", b.max_deviation)
    })?;
    Ok(format!(
        "linear {:.1e} over {} samples, product {:.1e} over {} samples",
        a.max_deviation, a.samples_checked, b.max_deviation, b.samples_checked
    ))
}

fn tischler_torus() -> Check {
    let start = Instant::now();
    let tol = Tolerances::default();
    let t = torus_complex(2, 16).map_err(|e| e.to_string())?;
    let h = t.homology().ok_or("no homology")?;
    let dx = h.duals[0].map(|x| x.to_f64().unwrap());
    let dy = h.duals[1].map(|x| x.to_f64().unwrap());
    let w = dx.add(&dy.scale(&2f64.sqrt()));
    let r = rationalize(
        &t,
        &w,
        &RationalizeConfig::new(0.01, 1_000_000).unwrap(),
        &tol,
    )
    .map_err(|e| e.to_string())?;
    let expected = [
        Rational::from_integer(1.into()),
        Rational::new(17.into(), 12.into()),
    ];
    ensure(r.rational_periods == expected, || {
        format!("periods {:?}", r.rational_periods)
    })?;
    let sup = r
        .cochain
        .values()
        .iter()
        .zip(w.values())
        .map(|(a, b)| (a.to_f64().unwrap() - b).abs())
        .fold(0.0, f64::max);
    ensure(sup <= 0.01, || format!("sup |w - w'| = {sup:e}"))?;
    let f = integrate_to_circle(&t, &r.cochain).map_err(|e| e.to_string())?;
    ensure(f.q() == &12.into(), || format!("q = {}", f.q()))?;
    ensure(f.periods() == [12.into(), 17.into()], || {
        format!("pullback periods {:?}", f.periods())
    })?;
    let sub = check_submersion(&t, &r.cochain, 0.0).map_err(|e| e.to_string())?;
    ensure(sub.passed(), || {
        format!("{} singular simplices", sub.failing.len())
    })?;
    let values = generic_values(&f, 10);
    ensure(values.len() == 10, || {
        format!("{} generic values", values.len())
    })?;
    let counts = values
        .iter()
        .map(|v| fiber_census(&t, &f, v).map(|c| c.components))
        .collect::<Result<BTreeSet<_>, _>>()
        .map_err(|e| e.to_string())?;
    ensure(counts.len() == 1, || format!("census varies: {counts:?}"))?;
    let took = within(Duration::from_secs(5), start)?;
    Ok(format!(
        "periods (1, 17/12), q = 12, pullback (12, 17), sup {sup:.1e}, census {counts:?}, {took:.2?}"
    ))
}

fn pipeline_witness() -> Check {
    let tol = Tolerances::default();
    let cfg = PipelineConfig::default();
    let t = Arc::new(torus_complex(2, 8).map_err(|e| e.to_string())?);
    let abelian = linear_abelian(t, vec![vec![1.0, 0.0], vec![0.0, 2f64.sqrt()]], &tol)
        .map_err(|e| e.to_string())?;
    let base =
        suspension_ga(6, GAElement::new(2.0, 1.0).unwrap(), &tol).map_err(|e| e.to_string())?;
    let product = product_foliation(&base, rotation, 12, &tol).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for (name, spec) in [("abelian", &abelian), ("product", &product)] {
        let a = pipeline_sln(spec, &cfg).map_err(|e| format!("{name}: {}", e.error))?;
        let b = pipeline_sln(spec, &cfg).map_err(|e| format!("{name}: {}", e.error))?;
        ensure(a.report.completed, || format!("{name}: incomplete"))?;
        ensure(a.report.to_json() == b.report.to_json(), || {
            format!("{name}: reports differ")
        })?;
        let submersion =
            a.report.stages.iter().any(
                |s| matches!(s, StageRecord::Submersion { failing, .. } if failing.is_empty()),
            );
        ensure(submersion, || {
            format!("{name}: no passing submersion stage")
        })?;
        let closed = a
            .report
            .stages
            .iter()
            .any(|s| matches!(s, StageRecord::Closedness { .. }));
        ensure(closed, || format!("{name}: closedness not verified"))?;
        if let Some(StageRecord::Rationalize { perturbation, .. }) = a
            .report
            .stages
            .iter()
            .find(|s| matches!(s, StageRecord::Rationalize { .. }))
        {
            ensure(*perturbation <= cfg.rationalize.epsilon, || {
                format!("{name}: perturbation {perturbation:e}")
            })?;
        }
        summary.push(format!("{name} q = {}", a.map.q()));
    }
    Ok(format!("{}; reports byte-identical", summary.join(", ")))
}

fn negative_controls() -> Check {
    let tol = Tolerances::default();
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<(), String> {
        let t = torus_complex(2, 4).unwrap();
        let h = t.homology().unwrap();
        let mut w = h.duals[0].map(|x| x.to_f64().unwrap());
        w.values_mut()[3] += 0.25;
        let r = rationalize(&t, &w, &RationalizeConfig::default(), &tol);
        ensure(matches!(r, Err(TischlerError::NotClosed { .. })), || {
            format!("rationalize: {r:?}")
        })?;

        let bad = FMatrix::from_rows(vec![
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        ensure(
            matches!(iwasawa_sln(&bad, &tol), Err(GroupError::NonUnimodular(_))),
            || "iwasawa_sln".into(),
        )?;
        ensure(
            matches!(
                iwasawa_sln_right(&bad, &tol),
                Err(GroupError::NonUnimodular(_))
            ),
            || "iwasawa_sln_right".into(),
        )?;
        let bad2 = FMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 3.0]]).unwrap();
        ensure(
            matches!(iwasawa_sl2(&bad2, &tol), Err(GroupError::NonUnimodular(_))),
            || "iwasawa_sl2".into(),
        )?;

        let zero = linear_abelian(Arc::new(t), vec![vec![0.0, 0.0], vec![0.0, 0.0]], &tol).unwrap();
        let err = pipeline_sln(&zero, &PipelineConfig::default())
            .map(|_| ())
            .unwrap_err();
        let TischlerError::NoSubmersion { tried } = &err.error else {
            return Err(format!("pipeline: {}", err.error));
        };
        ensure(!tried.is_empty(), || "empty tried set".into())?;
        Ok(())
    }));
    match outcome {
        Ok(Ok(())) => Ok("NotClosed, NonUnimodular, NoSubmersion".into()),
        Ok(Err(e)) => Err(e),
        Err(_) => Err("panicked".into()),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("bracket identities", bracket_identities),
        ("dimension audit", dimension_audit),
        ("Jacobi and antisymmetry", jacobi_antisymmetry),
        ("Iwasawa roundtrips", iwasawa_roundtrips),
        ("GA embedding homomorphism", ga_homomorphism),
        ("Maurer-Cartan checker", maurer_cartan_checker),
        ("developing map equivariance", fedida_equivariance),
        ("circle fibration on T^2", tischler_torus),
        ("end-to-end pipeline", pipeline_witness),
        ("negative controls", negative_controls),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
