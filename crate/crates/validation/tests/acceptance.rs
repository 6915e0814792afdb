//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;
use std::time::{Duration, Instant};

use polarfront_core::evt::{
    conditional_excess_probability, excess_threshold_from_quantile, gpd_cdf,
    gpd_scale_for_threshold, gumbel_cdf, ks_statistic, simulate_normalized_maxima,
    weibull_norm_constants, WeibullSpec,
};
use polarfront_core::numeric::rng_from_seed;
use polarfront_core::ops::{
    add_fronts, front_from_points, hv_constant, hypervolume_exact_small, hypervolume_mc,
    hypervolume_of_front, r2_utility, scale_front, union_fronts, Transform,
};
use polarfront_core::polar::{
    check_pareto_conditions, equi_angular_grid_2d, from_polar, length_scalarisation,
    sample_directions, to_polar, Direction, DirectionGrid, GridFront, PointFront,
};
use polarfront_core::projection::{project_front, SliceSpec};
use polarfront_core::stats::{
    mean_front, quantile_front, vorobev_deviation, vorobev_mean_front, vorobev_quantile_front,
    FrontEnsemble,
};
use polarfront_core::workflows::{
    daily_max, group_by_year, pairwise_domination_map, period_front_ensemble,
    signed_yearly_changes, AffineNormalizer, EvaluationLattice, SeriesDataset,
};
use rand::Rng;

use polarfront_validation::{hypervolume_by_cells, random_points, random_valid_front};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if el > budget {
        o.ok = false;
    }
    o.detail = format!("{} [{:.2?} of {:.0?} budget]", o.detail, el, budget);
    o
}

fn scalarisation_identities() -> Outcome {
    timed(Duration::from_secs(1), || {
        let mut rng = rng_from_seed(101);
        let mut worst_radial = 0.0f64;
        let mut worst_round = 0.0f64;
        for _ in 0..10_000 {
            let m = rng.random_range(2..=6);
            let eta: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
            let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
            let lam = Direction::normalized(raw).unwrap();
            let t = rng.random_range(0.0..50.0);
            let y: Vec<f64> = eta
                .iter()
                .zip(lam.components())
                .map(|(e, d)| e + t * d)
                .collect();
            let s = length_scalarisation(&y, &eta, &lam).unwrap();
            if t > 0.0 {
                worst_radial = worst_radial.max((s - t).abs() / t);
            }
            let y: Vec<f64> = eta
                .iter()
                .map(|e| e + rng.random_range(1e-3..10.0))
                .collect();
            let (d, r) = to_polar(&y, &eta).unwrap();
            let back = from_polar(&eta, &d, r).unwrap();
            for (a, b) in back.iter().zip(&y) {
                worst_round = worst_round.max((a - b).abs() / b.abs().max(1e-300));
            }
        }
        outcome(
            worst_radial < 1e-10 && worst_round < 1e-10,
            format!(
                "max radial rel err {worst_radial:.2e}, max round-trip rel err {worst_round:.2e}"
            ),
        )
    })
}

fn two_point_fixture() -> Outcome {
    let grid = Arc::new(
        DirectionGrid::user_supplied(vec![
            Direction::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap(),
            Direction::new(vec![0.6, 0.8]).unwrap(),
        ])
        .unwrap(),
    );
    let pf = PointFront::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    let f = front_from_points(&pf, &grid).unwrap();
    let (e0, e1) = (
        (f.lengths()[0] - 2f64.sqrt()).abs(),
        (f.lengths()[1] - 5.0 / 3.0).abs(),
    );
    outcome(
        e0 <= 1e-12 && e1 <= 1e-12,
        format!("errors {e0:.1e} at diagonal, {e1:.1e} at (0.6, 0.8)"),
    )
}

fn hypervolume_consistency() -> Outcome {
    timed(Duration::from_secs(10), || {
        let unit = PointFront::new(vec![0.0, 0.0], vec![vec![1.0, 1.0]]).unwrap();
        let two = PointFront::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let mut ok = true;
        let mut parts = Vec::new();
        for (k, tol) in [(65_536, 0.01), (4_096, 0.03)] {
            let grid = equi_angular_grid_2d(k).unwrap();
            for (pf, exact) in [(&unit, 1.0), (&two, 3.0)] {
                let hv = hypervolume_mc(pf, &grid).unwrap();
                let rel = (hv - exact).abs() / exact;
                ok &= rel <= tol;
                parts.push(format!("K={k} {exact}: {hv:.5}"));
            }
        }
        let mut rng = rng_from_seed(303);
        let mut worst = 0.0f64;
        for i in 0..100 {
            let m = if i % 2 == 0 { 2 } else { 3 };
            let n = rng.random_range(1..=8);
            let pts = random_points(&mut rng, m, n, -0.5, 3.0);
            let pf = PointFront::new(vec![0.0; m], pts.clone()).unwrap();
            let a = hypervolume_exact_small(&pf).unwrap();
            let b = hypervolume_by_cells(&pts, &vec![0.0; m]);
            worst = worst.max((a - b).abs());
        }
        ok &= worst <= 1e-9;
        parts.push(format!("exact vs cell oracle max abs err {worst:.1e}"));
        outcome(ok, parts.join("; "))
    })
}

fn hv_constants() -> Outcome {
    let expected = [(1, 0.5), (2, PI / 4.0), (3, PI / 6.0)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, want) in expected {
        let got = hv_constant(m).unwrap();
        let pass = (got - want).abs() <= 1e-12;
        ok &= pass;
        parts.push(format!(
            "M={m}: got {got:.12}, expected {want:.12}{}",
            if pass { "" } else { " (mismatch)" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn closure_suite() -> Outcome {
    let mut rng = rng_from_seed(505);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for trial in 0..200 {
        let m = if trial % 2 == 0 { 2 } else { 3 };
        let k = rng.random_range(16..=256);
        let n = rng.random_range(1..=50);
        let grid = Arc::new(sample_directions(m, k, trial as u64).unwrap());
        let rows: Vec<GridFront> = (0..n)
            .map(|_| random_valid_front(&mut rng, &grid))
            .collect();
        let e = FrontEnsemble::from_fronts(&rows).unwrap();
        let mut outs: Vec<(String, GridFront)> = vec![("mean".into(), mean_front(&e))];
        for r in 1..=n {
            let alpha = (r as f64 - 0.5) / n as f64;
            outs.push((
                format!("quantile {alpha:.3}"),
                quantile_front(&e, alpha).unwrap(),
            ));
        }
        for alpha in [0.05, 0.5, 0.95] {
            outs.push((
                format!("vorobev {alpha}"),
                vorobev_quantile_front(&e, alpha).unwrap(),
            ));
        }
        let (a, b) = (&rows[0], &rows[n - 1]);
        outs.push(("union".into(), union_fronts(a, b).unwrap()));
        outs.push(("add".into(), add_fronts(a, b).unwrap()));
        outs.push((
            "scale".into(),
            scale_front(a, rng.random_range(0.1..5.0)).unwrap(),
        ));
        for (name, f) in outs {
            checked += 1;
            let c = check_pareto_conditions(&f, 1e-9);
            if !c.is_valid() {
                failures.push(format!("trial {trial} {name}: {c:?}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        match failures.first() {
            None => format!("{checked} outputs checked, 0 failures"),
            Some(f) => format!(
                "{checked} outputs checked, {} failures, first: {f:?}",
                failures.len()
            ),
        },
    )
}

fn vorobev_quantile_equivalence() -> Outcome {
    let mut rng = rng_from_seed(606);
    let mut ok = true;
    let mut worst_gap = f64::INFINITY;
    for trial in 0..50 {
        let m = 2 + trial % 2;
        let n = rng.random_range(1..=40);
        let grid = Arc::new(sample_directions(m, 64, trial as u64).unwrap());
        let rows: Vec<GridFront> = (0..n)
            .map(|_| random_valid_front(&mut rng, &grid))
            .collect();
        let e = FrontEnsemble::from_fronts(&rows).unwrap();
        for alpha in [0.01, 0.1, 0.25, 0.5, 0.6, 0.9, 0.99] {
            let v = vorobev_quantile_front(&e, alpha).unwrap();
            let q = quantile_front(&e, 1.0 - alpha).unwrap();
            ok &= v
                .lengths()
                .iter()
                .zip(q.lengths())
                .all(|(a, b)| a.to_bits() == b.to_bits());
            for (k, l) in v.lengths().iter().enumerate() {
                let covered =
                    rows.iter().filter(|r| r.lengths()[k] >= *l).count() as f64 / n as f64;
                let gap = covered - (alpha - 1.0 / n as f64);
                worst_gap = worst_gap.min(gap);
            }
        }
    }
    ok &= worst_gap >= 0.0;
    outcome(
        ok,
        format!("bitwise equal; min coverage margin over alpha - 1/N = {worst_gap:.4}"),
    )
}

fn vorobev_mean() -> Outcome {
    let grid = Arc::new(equi_angular_grid_2d(128).unwrap());
    let e = FrontEnsemble::from_rows(vec![0.0, 0.0], grid, vec![vec![1.0; 128], vec![3.0; 128]])
        .unwrap();
    let v = vorobev_mean_front(&e, 1e-3, 50).unwrap();
    // Enumeration: levels in (0, 1/2] give the length-3 row, levels above give
    // the length-1 row. Expected hypervolume is (pi/4)(1 + 9)/2.
    let target = PI / 4.0 * 5.0;
    let h_star = hypervolume_of_front(&v.front);
    let h_next = hypervolume_of_front(&vorobev_quantile_front(&e, v.bracket.1).unwrap());
    let brackets = h_star >= target * (1.0 - 1e-3) && h_next <= target * (1.0 + 1e-3);
    let d = vorobev_deviation(&e, &v.front).unwrap();
    let (d0, d1) = (
        vorobev_deviation(&e, &e.row(0)).unwrap(),
        vorobev_deviation(&e, &e.row(1)).unwrap(),
    );
    let ok = brackets && (v.target_hv - target).abs() < 1e-12 && d <= d0 + 1e-12 && d <= d1 + 1e-12;
    outcome(
        ok,
        format!(
            "alpha*={:.4}, HV(Q*)={h_star:.4} >= V={target:.4} >= HV(next)={h_next:.4}; deviation {d:.4} vs rows {d0:.4}, {d1:.4}",
            v.alpha_star
        ),
    )
}

fn gumbel_limit_and_excess() -> Outcome {
    timed(Duration::from_secs(60), || {
        let lam = Direction::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, shape) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            let spec = WeibullSpec::new(shape, vec![1.0, 1.0]).unwrap();
            let maxima =
                simulate_normalized_maxima(&spec, &lam, 256, 5000, 7000 + i as u64).unwrap();
            let ks = ks_statistic(&maxima, gumbel_cdf);
            ok &= ks < 0.05;
            parts.push(format!("alpha={shape}: KS {ks:.4}"));
        }
        // Exponential case: excesses over a threshold surface follow the GPD
        // with zero shape and scale 1/k.
        let spec = WeibullSpec::new(1.0, vec![1.0, 1.0]).unwrap();
        let mut rng = rng_from_seed(8080);
        let samples: Vec<Vec<f64>> = (0..100_000).map(|_| spec.sample(&mut rng)).collect();
        let grid = Arc::new(equi_angular_grid_2d(16).unwrap());
        let table = Arc::new(
            polarfront_core::stats::ObjectiveTable::new(
                vec!["y".into()],
                samples.iter().map(|y| vec![y.clone()]).collect(),
            )
            .unwrap(),
        );
        let e = polarfront_core::stats::ensemble_from_objective_table(
            table,
            vec![0.0, 0.0],
            grid.clone(),
        )
        .unwrap();
        let threshold = excess_threshold_from_quantile(&e, 0.9).unwrap();
        let mut worst = 0.0f64;
        for lam in grid.iter() {
            let norm = weibull_norm_constants(&spec, lam, 256).unwrap();
            let u = threshold.front().nearest(lam).length;
            let scale = gpd_scale_for_threshold(norm.a, 0.0, norm.b, u).unwrap();
            for excess in [0.1, 0.3, 0.6, 1.0, 2.0] {
                let r = u + excess;
                let z: Vec<f64> = lam.components().iter().map(|d| r * d).collect();
                let p = conditional_excess_probability(&samples, &threshold, &z).unwrap();
                let closed = 1.0 - (-norm.k * excess).exp();
                worst = worst.max((p.probability - closed).abs());
                worst = worst.max((gpd_cdf(excess, 0.0, scale).unwrap() - closed).abs());
            }
        }
        ok &= worst <= 0.02;
        parts.push(format!("excess max abs err {worst:.4}"));
        outcome(ok, parts.join("; "))
    })
}

fn slices() -> Outcome {
    let mut ok = true;
    let mut worst_sphere = 0.0f64;
    for (m, kept, v) in [
        (3, vec![0, 1], vec![0.6]),
        (3, vec![1, 2], vec![0.3]),
        (4, vec![0, 2], vec![0.2, 0.5]),
        (4, vec![3], vec![0.1, 0.4, 0.3]),
    ] {
        let grid = Arc::new(sample_directions(m, 200, m as u64).unwrap());
        let sphere = GridFront::constant(vec![0.0; m], grid, 1.0).unwrap();
        let spec = SliceSpec::new(kept, v).unwrap();
        let sub = Arc::new(if spec.kept_dim() == 1 {
            DirectionGrid::unit_1d()
        } else {
            equi_angular_grid_2d(181).unwrap()
        });
        let p = project_front(&sphere, &spec, &sub).unwrap();
        let want = spec.scale();
        for l in p.lengths() {
            worst_sphere = worst_sphere.max((l - want).abs());
        }
    }
    ok &= worst_sphere <= 1e-12;
    let mut rng = rng_from_seed(909);
    let mut invalid = 0;
    for i in 0..100 {
        let m = 3 + i % 2;
        let p = 1 + (i / 2) % 2;
        let count = rng.random_range(1..=8);
        let pts = random_points(&mut rng, m, count, 0.1, 3.0);
        let pf = PointFront::new(vec![0.0; m], pts).unwrap();
        let mut idx: Vec<usize> = (0..m).collect();
        while idx.len() > p {
            idx.remove(rng.random_range(0..idx.len()));
        }
        let raw: Vec<f64> = (0..m - p).map(|_| rng.random_range(0.05..1.0)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target = rng.random_range(0.1..0.9);
        let v: Vec<f64> = raw.iter().map(|x| x / norm * target).collect();
        let spec = SliceSpec::new(idx, v).unwrap();
        let sub = Arc::new(if p == 1 {
            DirectionGrid::unit_1d()
        } else {
            equi_angular_grid_2d(128).unwrap()
        });
        let proj = project_front(&pf, &spec, &sub).unwrap();
        if !check_pareto_conditions(&proj, 1e-9).is_valid() {
            invalid += 1;
        }
    }
    ok &= invalid == 0;
    outcome(
        ok,
        format!("sphere slice max err {worst_sphere:.1e}; {invalid}/100 projected fronts invalid"),
    )
}

fn synthetic_csv(delta: f64) -> String {
    let mut rng = rng_from_seed(1234);
    let mut out = String::from("timestamp,no2,pm10,o3\n");
    let mut year_b = Vec::new();
    for day in 0..365u32 {
        let date = chrono::NaiveDate::from_yo_opt(2021, day + 1).unwrap();
        let level: f64 = rng.random_range(0.5..2.0);
        for hour in [3, 9, 15, 21] {
            let v: Vec<f64> = (0..3).map(|_| level * rng.random_range(1.0..3.0)).collect();
            out.push_str(&format!(
                "{date}T{hour:02}:00:00Z,{:.6},{:.6},{:.6}\n",
                v[0], v[1], v[2]
            ));
            let next = chrono::NaiveDate::from_yo_opt(2022, day + 1).unwrap();
            year_b.push(format!(
                "{next}T{hour:02}:00:00Z,{:.6},{:.6},{:.6}\n",
                v[0] - delta,
                v[1] - delta,
                v[2] - delta
            ));
        }
    }
    out.extend(year_b);
    out
}

fn pollution_workflow() -> Outcome {
    timed(Duration::from_secs(30), || {
        let ds = SeriesDataset::from_csv(synthetic_csv(0.5).as_bytes()).unwrap();
        let days = daily_max(&ds).unwrap();
        let all: Vec<Vec<f64>> = days.iter().filter_map(|d| d.complete(&[0, 1, 2])).collect();
        let lower: Vec<f64> = (0..3)
            .map(|m| all.iter().map(|p| p[m]).fold(f64::INFINITY, f64::min))
            .collect();
        let upper: Vec<f64> = (0..3)
            .map(|m| all.iter().map(|p| p[m]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let norm = AffineNormalizer::new(lower, upper.clone()).unwrap();
        let eta = norm.default_reference();
        let grid = Arc::new(sample_directions(3, 64, 1).unwrap());
        let years = group_by_year(&days);
        let ensembles: Vec<_> = years
            .iter()
            .map(|(y, d)| {
                let pts = d.iter().filter_map(|d| d.complete(&[0, 1, 2])).collect();
                period_front_ensemble(&y.to_string(), pts, eta.clone(), grid.clone(), 200, 42)
                    .unwrap()
            })
            .collect();
        let lat_grid = equi_angular_grid_2d(32).unwrap();
        let reach = upper
            .iter()
            .zip(&eta)
            .map(|(u, e)| (u - e) * (u - e))
            .sum::<f64>()
            .sqrt();
        let fractions: Vec<f64> = (1..=25).map(|i| i as f64 / 25.0).collect();
        let lattice = EvaluationLattice::from_fractions(&lat_grid, reach, &fractions).unwrap();
        let mut ok = ensembles.len() == 2;
        let mut parts = Vec::new();
        for pair in [(0, 1), (0, 2), (1, 2)] {
            let a = pairwise_domination_map(&ensembles[0], pair, &lattice).unwrap();
            let b = pairwise_domination_map(&ensembles[1], pair, &lattice).unwrap();
            let monotone = [&a, &b].iter().all(|m| {
                m.values
                    .iter()
                    .all(|ray| ray.windows(2).all(|w| w[0] >= w[1]))
            });
            let s = signed_yearly_changes(&a, &b).unwrap();
            ok &= monotone && s.mean_negative < 0.0 && s.mean_positive < 0.01;
            parts.push(format!(
                "{pair:?}: neg {:.4} pos {:.5} monotone {monotone}",
                s.mean_negative, s.mean_positive
            ));
        }
        outcome(ok, parts.join("; "))
    })
}

fn strict_compliancy() -> Outcome {
    let mut rng = rng_from_seed(1111);
    let grids: Vec<DirectionGrid> = vec![
        equi_angular_grid_2d(4096).unwrap(),
        sample_directions(3, 8192, 77).unwrap(),
    ];
    let mut failures = 0;
    for i in 0..500 {
        let grid = &grids[i % 2];
        let m = grid.dim();
        let count = rng.random_range(1..=6);
        let pts = random_points(&mut rng, m, count, 0.2, 3.0);
        // Improve a point that no other point dominates.
        let nd: Vec<usize> = (0..pts.len())
            .filter(|&a| {
                !(0..pts.len()).any(|b| {
                    b != a && pts[b].iter().zip(&pts[a]).all(|(x, y)| x >= y) && pts[b] != pts[a]
                })
            })
            .collect();
        let a = nd[rng.random_range(0..nd.len())];
        let mut better = pts[a].clone();
        let comp = rng.random_range(0..m);
        better[comp] += rng.random_range(0.1..1.0);
        let base = PointFront::new(vec![0.0; m], pts).unwrap();
        let bigger = base.with_point(better).unwrap();
        for t in [Transform::Identity, Transform::Hypervolume { dim: m }] {
            let (u0, u1) = (
                r2_utility(&base, grid, &t).unwrap(),
                r2_utility(&bigger, grid, &t).unwrap(),
            );
            if u1 <= u0 {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{failures} of 1000 comparisons not strictly increasing"),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("scalarisation identities", scalarisation_identities),
        ("two-point front fixture", two_point_fixture),
        ("hypervolume consistency", hypervolume_consistency),
        ("hypervolume constants", hv_constants),
        ("front validity closure", closure_suite),
        (
            "Vorob'ev quantile equivalence",
            vorobev_quantile_equivalence,
        ),
        ("Vorob'ev mean bisection", vorobev_mean),
        (
            "Gumbel limit and excess probabilities",
            gumbel_limit_and_excess,
        ),
        ("slices of fronts", slices),
        ("synthetic pollution workflow", pollution_workflow),
        ("strict Pareto compliancy", strict_compliancy),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!(
            "{} {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.ok {
            failed += 1;
        }
    }
    println!("acceptance: {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
