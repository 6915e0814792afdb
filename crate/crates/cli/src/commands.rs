use std::fs::File;
use std::io::Write;
use std::path::Path;

use polarfront_core::evt::{
    conditional_excess_probability_at, gumbel_cdf, ks_statistic, scalarised_length_distribution,
    simulate_normalized_maxima, weibull_norm_constants, GumbelNorm, Weibull, WeibullSpec,
};
use polarfront_core::io::write_json;
use polarfront_core::numeric::{derive_seed, labelled_rng};
use polarfront_core::ops::{
    front_from_points, hypervolume_exact_small, hypervolume_of_front, ScoringSpec,
};
use polarfront_core::polar::{
    check_pareto_conditions, equi_angular_grid_2d, length_scalarisation, sample_directions,
    Direction, DirectionGrid, ParetoCheck, PointFront,
};
use polarfront_core::projection::{slice_statistics, SliceSpec, SliceStatistics};
use polarfront_core::stats::{
    bayesian_bootstrap_front, deviation_surfaces, lower_quantile, mean_front, quantile_front,
    vorobev_deviation, vorobev_mean_front, vorobev_quantile_front,
};
use polarfront_core::workflows::{
    daily_max, group_by_year, pairwise_domination_map, period_front_ensemble_partial,
    select_best_input, signed_yearly_changes, AffineNormalizer, Decision, EvaluationLattice,
    SeriesDataset, SignedChanges,
};
use polarfront_core::{Error, Result};
use polarfront_server::{router, AppState, GridDefaults, Session};
use serde::Serialize;

use crate::args::{
    Command, DecideArgs, EvtArgs, FrontArgs, PollutionArgs, Scoring, ServeArgs, SliceArgs, Stat,
    StatsArgs,
};
use crate::input::{build_grid, load_ensemble, read_points, read_table, resolve_reference};

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

/// Pretty JSON with a trailing newline, to `out` or stdout.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, value)?;
            writeln!(stdout)?;
            Ok(())
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Front(a) => front(a),
        Command::Stats(a) => stats(a),
        Command::Slices(a) => slices(a),
        Command::Evt(a) => evt(a),
        Command::Pollution(a) => pollution(a),
        Command::Decide(a) => decide(a),
        Command::Serve(a) => serve(a),
    }
}

#[derive(Serialize)]
struct FrontReport<'a> {
    reference: &'a [f64],
    grid: &'a DirectionGrid,
    lengths: &'a [f64],
    hypervolume: f64,
    /// Absent when the point set is too large for the exact method.
    hypervolume_exact: Option<f64>,
    pareto: ParetoCheck,
}

fn front(a: FrontArgs) -> Result<()> {
    let (points, stored) = read_points(&a.points)?;
    let eta = resolve_reference(
        a.common.eta.as_ref(),
        stored,
        points.iter().map(Vec::as_slice),
    )?;
    let pf = PointFront::new(eta, points)?;
    let grid = build_grid(&a.common.grid, pf.dim())?;
    let f = front_from_points(&pf, &grid)?;
    let exact = match hypervolume_exact_small(&pf) {
        Ok(v) => Some(v),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(path) = &a.polyline {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record((1..=pf.dim()).map(|i| format!("y{i}")))?;
        for p in f.points() {
            w.write_record(p.iter().map(|x| format!("{x:?}")))?;
        }
        w.flush()?;
    }
    emit(
        &FrontReport {
            reference: f.reference(),
            grid: f.grid(),
            lengths: f.lengths(),
            hypervolume: hypervolume_of_front(&f),
            hypervolume_exact: exact,
            pareto: check_pareto_conditions(&f, 1e-9),
        },
        a.common.out.as_deref(),
    )
}

#[derive(Serialize)]
struct Level {
    alpha: f64,
    lengths: Vec<f64>,
}

#[derive(Serialize)]
struct VorobevReport {
    alpha_star: f64,
    bracket: (f64, f64),
    target_hv: f64,
    front_hv: f64,
    converged: bool,
    iterations: usize,
    deviation: f64,
    lengths: Vec<f64>,
}

#[derive(Serialize)]
struct Deviation {
    beta: f64,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

#[derive(Serialize)]
struct Bootstrap {
    rounds: usize,
    seed: u64,
    fronts: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct StatsReport<'a> {
    n_samples: usize,
    reference: &'a [f64],
    grid: &'a DirectionGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantiles: Option<Vec<Level>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vorobev_quantiles: Option<Vec<Level>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vorobev_mean: Option<VorobevReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation_surfaces: Option<Deviation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<Bootstrap>,
}

fn stats(a: StatsArgs) -> Result<()> {
    let e = load_ensemble(&a.input, a.common.eta.as_ref(), &a.common.grid)?;
    let wants = |s: Stat| a.stat.contains(&s);
    let levels = |f: &dyn Fn(f64) -> Result<Vec<f64>>| -> Result<Vec<Level>> {
        a.alpha
            .iter()
            .map(|&alpha| {
                Ok(Level {
                    alpha,
                    lengths: f(alpha)?,
                })
            })
            .collect()
    };
    let mut report = StatsReport {
        n_samples: e.n_samples(),
        reference: e.reference(),
        grid: e.grid(),
        mean: None,
        quantiles: None,
        vorobev_quantiles: None,
        vorobev_mean: None,
        deviation_surfaces: None,
        bootstrap: None,
    };
    if wants(Stat::Mean) {
        report.mean = Some(mean_front(&e).lengths().to_vec());
    }
    if wants(Stat::Quantile) {
        report.quantiles = Some(levels(&|x| Ok(quantile_front(&e, x)?.lengths().to_vec()))?);
    }
    if wants(Stat::VorobevQuantile) {
        report.vorobev_quantiles = Some(levels(&|x| {
            Ok(vorobev_quantile_front(&e, x)?.lengths().to_vec())
        })?);
    }
    if wants(Stat::VorobevMean) {
        let v = vorobev_mean_front(&e, a.hv_tol, a.max_iters)?;
        report.vorobev_mean = Some(VorobevReport {
            alpha_star: v.alpha_star,
            bracket: v.bracket,
            target_hv: v.target_hv,
            front_hv: v.front_hv,
            converged: v.converged,
            iterations: v.iterations,
            deviation: vorobev_deviation(&e, &v.front)?,
            lengths: v.front.lengths().to_vec(),
        });
    }
    if wants(Stat::Deviation) {
        let (up, lo) = deviation_surfaces(&e, a.beta)?;
        report.deviation_surfaces = Some(Deviation {
            beta: a.beta,
            upper: up.lengths().to_vec(),
            lower: lo.lengths().to_vec(),
        });
    }
    if wants(Stat::Bootstrap) {
        let fronts =
            bayesian_bootstrap_front(&e, a.rounds, derive_seed(a.seed, "stats/bootstrap"))?;
        report.bootstrap = Some(Bootstrap {
            rounds: a.rounds,
            seed: a.seed,
            fronts: fronts.iter().map(|f| f.lengths().to_vec()).collect(),
        });
    }
    emit(&report, a.common.out.as_deref())
}

#[derive(Serialize)]
struct Curve {
    alpha: Option<f64>,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct SliceReport {
    spec: SliceSpec,
    scale: f64,
    directions: Vec<Vec<f64>>,
    statistics: SliceStatistics,
    /// Kept-objective coordinates of each curve.
    curves: Vec<Curve>,
}

fn slices(a: SliceArgs) -> Result<()> {
    let e = load_ensemble(&a.input, a.common.eta.as_ref(), &a.common.grid)?;
    let spec = SliceSpec::new(a.kept, a.v)?;
    let sub = match spec.kept_dim() {
        1 => DirectionGrid::unit_1d(),
        2 => equi_angular_grid_2d(a.sub_k)?,
        p => sample_directions(p, a.sub_k, a.common.grid.grid_seed)?,
    };
    let st = slice_statistics(&e, &spec, &sub, &a.alpha)?;
    let curve = |alpha: Option<f64>, lengths: &[f64]| Curve {
        alpha,
        points: lengths
            .iter()
            .zip(sub.iter())
            .map(|(l, lam)| {
                st.reference
                    .iter()
                    .zip(lam.components())
                    .map(|(r, d)| r + l * d)
                    .collect()
            })
            .collect(),
    };
    let mut curves = vec![curve(None, &st.mean.lengths)];
    curves.extend(st.quantiles.iter().map(|q| curve(q.alpha, &q.lengths)));
    emit(
        &SliceReport {
            scale: spec.scale(),
            spec,
            directions: sub.iter().map(|d| d.components().to_vec()).collect(),
            curves,
            statistics: st,
        },
        a.common.out.as_deref(),
    )
}

#[derive(Serialize)]
struct Maxima {
    block: usize,
    replications: usize,
    ks_gumbel: f64,
}

#[derive(Serialize)]
struct ExcessPoint {
    /// Model conditional probability at `radius`.
    model: f64,
    radius: f64,
    empirical: f64,
    exceedances: usize,
}

#[derive(Serialize)]
struct Excess {
    samples: usize,
    threshold_quantile: f64,
    threshold: f64,
    points: Vec<ExcessPoint>,
}

#[derive(Serialize)]
struct EvtReport {
    spec: WeibullSpec,
    direction: Vec<f64>,
    length_law: Weibull,
    norm: GumbelNorm,
    maxima: Maxima,
    excess: Excess,
}

fn evt(a: EvtArgs) -> Result<()> {
    let spec = WeibullSpec::new(a.shape, a.rates)?;
    let m = spec.dim();
    let lam = Direction::normalized(a.direction.unwrap_or_else(|| vec![1.0; m]))?;
    if lam.dim() != m {
        return invalid(format!(
            "direction has {} components, rates have {m}",
            lam.dim()
        ));
    }
    if !(a.threshold_quantile > 0.0 && a.threshold_quantile < 1.0) {
        return invalid("--threshold-quantile must lie in (0, 1)");
    }
    if a.levels.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return invalid("--levels must lie in (0, 1)");
    }
    if a.samples == 0 || a.reps == 0 {
        return invalid("--samples and --reps must be positive");
    }
    let norm = weibull_norm_constants(&spec, &lam, a.block)?;
    let maxima = simulate_normalized_maxima(
        &spec,
        &lam,
        a.block,
        a.reps,
        derive_seed(a.seed, "evt/maxima"),
    )?;
    let law = scalarised_length_distribution(&spec, &lam)?;

    let eta = vec![0.0; m];
    let mut rng = labelled_rng(a.seed, "evt/excess");
    let ys: Vec<Vec<f64>> = (0..a.samples).map(|_| spec.sample(&mut rng)).collect();
    let lengths = ys
        .iter()
        .map(|y| length_scalarisation(y, &eta, &lam))
        .collect::<Result<Vec<f64>>>()?;
    let u = lower_quantile(&lengths, a.threshold_quantile)?;
    let hu = (law.rate * u).powf(law.shape);
    let points = a
        .levels
        .iter()
        .map(|&p| {
            // Radius whose model conditional probability above `u` is `p`.
            let radius = (hu - (-p).ln_1p()).powf(1.0 / law.shape) / law.rate;
            let z: Vec<f64> = lam.components().iter().map(|d| radius * d).collect();
            let emp = conditional_excess_probability_at(&ys, &eta, u, &z)?;
            Ok(ExcessPoint {
                model: p,
                radius,
                empirical: emp.probability,
                exceedances: emp.exceedances,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(
        &EvtReport {
            direction: lam.components().to_vec(),
            spec,
            length_law: law,
            norm,
            maxima: Maxima {
                block: a.block,
                replications: a.reps,
                ks_gumbel: ks_statistic(&maxima, gumbel_cdf),
            },
            excess: Excess {
                samples: a.samples,
                threshold_quantile: a.threshold_quantile,
                threshold: u,
                points,
            },
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct Period {
    year: i32,
    days: usize,
    complete_days: usize,
}

#[derive(Serialize)]
struct PairReport {
    pair: (usize, usize),
    names: (String, String),
    lattice: EvaluationLattice,
    /// Domination probabilities, `[direction][radius]`.
    before: Vec<Vec<f64>>,
    after: Vec<Vec<f64>>,
    changes: SignedChanges,
}

#[derive(Serialize)]
struct Bounds<'a> {
    lower: &'a [f64],
    upper: &'a [f64],
}

#[derive(Serialize)]
struct PollutionReport<'a> {
    columns: Vec<String>,
    bounds: Bounds<'a>,
    eta: Vec<f64>,
    rounds: usize,
    before: Period,
    after: Period,
    pairs: Vec<PairReport>,
}

fn pollution(a: PollutionArgs) -> Result<()> {
    if a.before == a.after {
        return invalid("--before and --after must name different years");
    }
    if a.radii == 0 {
        return invalid("--radii must be positive");
    }
    let ds = SeriesDataset::from_csv(File::open(&a.csv)?)?;
    let cols: Vec<usize> = match &a.columns {
        Some(names) => names
            .iter()
            .map(|n| {
                ds.names()
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::InvalidArgument(format!("no column named {n:?}")))
            })
            .collect::<Result<_>>()?,
        None => (0..ds.names().len()).collect(),
    };
    if cols.len() < 2 {
        return invalid("need at least two pollutant columns");
    }
    let years = group_by_year(&daily_max(&ds)?);
    let period = |year: i32| -> Result<Vec<Vec<Option<f64>>>> {
        let days = years
            .get(&year)
            .ok_or_else(|| Error::Data(format!("no observations in {year}")))?;
        Ok(days
            .iter()
            .map(|d| cols.iter().map(|&c| d.values[c]).collect())
            .collect())
    };
    let (days_b, days_a) = (period(a.before)?, period(a.after)?);
    let complete = |days: &[Vec<Option<f64>>]| -> Vec<Vec<f64>> {
        days.iter()
            .filter_map(|d| d.iter().copied().collect::<Option<Vec<f64>>>())
            .collect()
    };
    let (full_b, full_a) = (complete(&days_b), complete(&days_a));
    let norm = AffineNormalizer::from_extent(full_b.iter().chain(&full_a).map(Vec::as_slice))?;
    let eta = norm.default_reference();
    let m = cols.len();
    let grid = build_grid(&a.grid, m)?;
    let pe_b = period_front_ensemble_partial(
        &a.before.to_string(),
        days_b.clone(),
        eta.clone(),
        grid.clone(),
        a.rounds,
        a.seed,
    )?;
    let pe_a = period_front_ensemble_partial(
        &a.after.to_string(),
        days_a.clone(),
        eta.clone(),
        grid,
        a.rounds,
        a.seed,
    )?;
    let lat_grid = equi_angular_grid_2d(a.lattice_k)?;
    let fractions: Vec<f64> = (1..=a.radii).map(|i| i as f64 / a.radii as f64).collect();
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let (u, l) = (norm.upper(), &eta);
            let reach = ((u[i] - l[i]).powi(2) + (u[j] - l[j]).powi(2)).sqrt();
            let lattice = EvaluationLattice::from_fractions(&lat_grid, reach, &fractions)?;
            let before = pairwise_domination_map(&pe_b, (i, j), &lattice)?;
            let after = pairwise_domination_map(&pe_a, (i, j), &lattice)?;
            let changes = signed_yearly_changes(&before, &after)?;
            pairs.push(PairReport {
                pair: (i, j),
                names: (ds.names()[cols[i]].clone(), ds.names()[cols[j]].clone()),
                lattice,
                before: before.values,
                after: after.values,
                changes,
            });
        }
    }
    emit(
        &PollutionReport {
            columns: cols.iter().map(|&c| ds.names()[c].clone()).collect(),
            bounds: Bounds {
                lower: norm.lower(),
                upper: norm.upper(),
            },
            eta,
            rounds: a.rounds,
            before: Period {
                year: a.before,
                days: days_b.len(),
                complete_days: full_b.len(),
            },
            after: Period {
                year: a.after,
                days: days_a.len(),
                complete_days: full_a.len(),
            },
            pairs,
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct DecideReport {
    eta: Vec<f64>,
    target: Vec<f64>,
    scoring: ScoringSpec,
    #[serde(flatten)]
    decision: Decision,
}

fn decide(a: DecideArgs) -> Result<()> {
    let table = read_table(&a.table)?;
    let eta = resolve_reference(
        a.eta.as_ref(),
        None,
        table.samples().iter().flatten().map(Vec::as_slice),
    )?;
    let scoring = match a.scoring {
        Scoring::Squared => ScoringSpec::Squared,
        Scoring::Pinball => ScoringSpec::pinball(a.alpha)?,
        Scoring::HvAbsolute => ScoringSpec::HvAbsolute,
    };
    let decision = select_best_input(&table, &a.target, &eta, &scoring)?;
    emit(
        &DecideReport {
            eta,
            target: a.target,
            scoring,
            decision,
        },
        a.out.as_deref(),
    )
}

fn serve(a: ServeArgs) -> Result<()> {
    let session = Session::from_path(
        &a.data,
        GridDefaults {
            k: a.grid_k,
            seed: a.grid_seed,
        },
    )?;
    let app = router(AppState::with_session(session), a.static_dir);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        polarfront_server::serve(listener, app).await
    })?;
    Ok(())
}
