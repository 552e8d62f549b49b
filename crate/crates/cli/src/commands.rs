//! The four commands, each turning a config into one [`ResultTable`].

use dce_core::alloc::gp::condense::ratio_denominator;
use dce_core::alloc::gp::{
    grid_oracle_nonreciprocal, solve_nonreciprocal, tangency_check, theta_exponents, GpState,
    NonRecProblem,
};
use dce_core::alloc::{grid_oracle_reciprocal, solve_reciprocal, AllocProblem};
use dce_core::analytic::{gamma_bounds, nmse_lower_bound, JensenVariant};
use dce_core::montecarlo::{
    adjudicate_jensen, run_nmse_experiment, run_ser_experiment, sweep_forward_length,
    sweep_power_allocation, AllocRow, SerOptions, SolveDetail,
};
use dce_core::scalar::linear_to_db;
use dce_core::{Error, NonReciprocalAllocation, PowerAllocation, Scheme, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::table::{Cell, Kind, ResultTable};

pub const NMSE_TRIALS: usize = 10_000;
pub const SER_TRIALS: usize = 5_000;
pub const SER_TRIALS_FULL: usize = 50_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(Error::InvalidParams(_)) => 2,
            CliError::Core(
                Error::InfeasibleGamma { .. } | Error::Infeasible { .. } | Error::NoFeasiblePoint,
            ) => 3,
            CliError::Core(Error::UnsupportedGeometry(_)) => 4,
            CliError::Verification(_) => 5,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Alloc,
    Nmse,
    Ser,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Alloc => "alloc",
            Command::Nmse => "nmse",
            Command::Ser => "ser",
            Command::Verify => "verify",
        }
    }
}

pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    cfg.validate().map_err(CliError::Config)?;
    let mut table = match cmd {
        Command::Alloc => cmd_alloc(cfg)?,
        Command::Nmse => cmd_nmse(cfg)?,
        Command::Ser => cmd_ser(cfg)?,
        Command::Verify => cmd_verify(cfg)?,
    };
    table.meta("command", cmd.name());
    table.meta("scheme", cfg.scheme);
    table.meta("seed", cfg.seed);
    table.meta("version", version());
    table.meta("jensen_variant", cfg.jensen_variant);
    Ok(table)
}

/// `10·log10(energy/length)`; zero power is `-inf`.
fn power_db(energy: f64, tau: usize) -> f64 {
    linear_to_db(energy / tau as f64)
}

fn sweep(cfg: &ExperimentConfig) -> CliResult<Vec<AllocRow>> {
    let p = cfg.params_at(cfg.pave_db[0]);
    Ok(sweep_power_allocation(
        &p,
        cfg.scheme,
        &cfg.gamma,
        &cfg.pave_db,
        cfg.jensen_variant,
    )?)
}

fn detail(d: &SolveDetail) -> String {
    match d {
        SolveDetail::Branch(b) => b.to_string(),
        SolveDetail::Iterations(n) => format!("condensation-{n}"),
    }
}

/// Records the sweep points whose floor lies below what full forward
/// energy alone reaches (the floor is then inactive).
fn flag_inactive_floors(cfg: &ExperimentConfig, table: &mut ResultTable) {
    let flagged: Vec<String> = cfg
        .gamma
        .iter()
        .flat_map(|&g| cfg.pave_db.iter().map(move |&d| (g, d)))
        .filter(|&(g, d)| g < gamma_bounds(&cfg.params_at(d), cfg.scheme).0)
        .map(|(g, d)| format!("{d}@{g}"))
        .collect();
    if !flagged.is_empty() {
        table.meta("below_gamma_min", flagged.join(";"));
    }
}

pub fn cmd_alloc(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let rows = sweep(cfg)?;
    let mut t = match cfg.scheme {
        Scheme::Reciprocal => ResultTable::new(&[
            ("p_ave_db", Kind::Float),
            ("gamma", Kind::Float),
            ("er_db", Kind::Float),
            ("ef_db", Kind::Float),
            ("an_db", Kind::Float),
            ("nmse_l", Kind::Float),
            ("nmse_u", Kind::Float),
        ]),
        Scheme::NonReciprocal => ResultTable::new(&[
            ("p_ave_db", Kind::Float),
            ("gamma", Kind::Float),
            ("e0_db", Kind::Float),
            ("e1_db", Kind::Float),
            ("e2_db", Kind::Float),
            ("e3_db", Kind::Float),
            ("an_db", Kind::Float),
            ("nmse_l", Kind::Float),
            ("nmse_u", Kind::Float),
        ]),
    };
    for r in &rows {
        let p = cfg.params_at(r.p_ave_db);
        let mut cells: Vec<Cell> = vec![r.p_ave_db.into(), r.gamma.into()];
        match r.alloc {
            PowerAllocation::Reciprocal(a) => {
                cells.extend(
                    [
                        power_db(a.e_r, p.tau_r),
                        power_db(a.e_f, p.tau_f),
                        linear_to_db(a.var_a),
                    ]
                    .map(Cell::from),
                );
            }
            PowerAllocation::NonReciprocal(a) => cells.extend(
                [
                    power_db(a.e_0, p.tau_0),
                    power_db(a.e_1, p.tau_0),
                    power_db(a.e_2, p.tau_2),
                    power_db(a.e_3, p.tau_3),
                    linear_to_db(a.var_a),
                ]
                .map(Cell::from),
            ),
        }
        cells.extend([r.nmse_l.into(), r.nmse_u.into()]);
        t.push(cells);
    }
    t.meta(
        "solver",
        rows.iter()
            .map(|r| detail(&r.detail))
            .collect::<Vec<_>>()
            .join(";"),
    );
    flag_inactive_floors(cfg, &mut t);
    Ok(t)
}

pub fn cmd_nmse(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let trials = cfg.trials.unwrap_or(NMSE_TRIALS);
    if cfg.tau_f.len() > 1 {
        return nmse_tau_sweep(cfg, trials);
    }
    let rows = sweep(cfg)?;
    let mut t = ResultTable::new(&[
        ("p_ave_db", Kind::Float),
        ("gamma", Kind::Float),
        ("nmse_l_analytic", Kind::Float),
        ("nmse_l_empirical", Kind::Float),
        ("nmse_l_half_width", Kind::Float),
        ("nmse_u_analytic", Kind::Float),
        ("nmse_u_empirical", Kind::Float),
        ("nmse_u_half_width", Kind::Float),
        ("lower_bound", Kind::Float),
        ("resampled", Kind::Int),
    ]);
    for r in &rows {
        let p = cfg.params_at(r.p_ave_db);
        let rep = run_nmse_experiment(&p, &r.alloc, trials, cfg.seed, cfg.jensen_variant)?;
        t.push(vec![
            r.p_ave_db.into(),
            r.gamma.into(),
            rep.analytic_lr.into(),
            rep.empirical_lr.into(),
            rep.half_width_lr.into(),
            rep.analytic_ur.into(),
            rep.empirical_ur.into(),
            rep.half_width_ur.into(),
            nmse_lower_bound(&p, cfg.scheme).into(),
            rep.resampled_trials.into(),
        ]);
    }
    t.meta("trials", trials);
    flag_inactive_floors(cfg, &mut t);
    Ok(t)
}

/// Forward-length sweep at the energy budgets of the minimum lengths.
fn nmse_tau_sweep(cfg: &ExperimentConfig, trials: usize) -> CliResult<ResultTable> {
    if cfg.scheme != Scheme::Reciprocal {
        return Err(CliError::Config(
            "the tau-f sweep is defined for the reciprocal scheme".into(),
        ));
    }
    let mut t = ResultTable::new(&[
        ("tau_f", Kind::Int),
        ("p_ave_db", Kind::Float),
        ("gamma", Kind::Float),
        ("nmse_l", Kind::Float),
        ("nmse_u", Kind::Float),
        ("nmse_l_empirical", Kind::Float),
        ("nmse_l_half_width", Kind::Float),
        ("nmse_u_empirical", Kind::Float),
        ("nmse_u_half_width", Kind::Float),
    ]);
    let base = SystemParams {
        tau_f: cfg.n_t,
        ..cfg.params_at(cfg.pave_db[0])
    };
    for &g in &cfg.gamma {
        for &db in &cfg.pave_db {
            for r in sweep_forward_length(&base, g, &cfg.tau_f, db)? {
                let p = SystemParams {
                    tau_f: r.tau_f,
                    ..base.with_p_ave_db(db)
                };
                let rep = run_nmse_experiment(&p, &r.alloc, trials, cfg.seed, cfg.jensen_variant)?;
                t.push(vec![
                    r.tau_f.into(),
                    db.into(),
                    g.into(),
                    r.nmse_l.into(),
                    r.nmse_u.into(),
                    rep.empirical_lr.into(),
                    rep.half_width_lr.into(),
                    rep.empirical_ur.into(),
                    rep.half_width_ur.into(),
                ]);
            }
        }
    }
    t.meta("trials", trials);
    Ok(t)
}

pub fn ser_trials(cfg: &ExperimentConfig) -> usize {
    cfg.trials.unwrap_or(if cfg.full_scale {
        SER_TRIALS_FULL
    } else {
        SER_TRIALS
    })
}

pub fn cmd_ser(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    if cfg.n_t != 4 {
        return Err(
            Error::UnsupportedGeometry(format!("the code needs n-t = 4, got {}", cfg.n_t)).into(),
        );
    }
    let trials = ser_trials(cfg);
    let rows = sweep(cfg)?;
    let mut t = ResultTable::new(&[
        ("p_ave_db", Kind::Float),
        ("gamma", Kind::Float),
        ("ser_lr", Kind::Float),
        ("ser_ur", Kind::Float),
        ("trials", Kind::Int),
    ]);
    let mut code = "";
    for r in &rows {
        let opts = SerOptions {
            qam_order: cfg.qam,
            trials,
            seed: cfg.seed,
            perfect_csi_lr: false,
            jensen: cfg.jensen_variant,
        };
        let rep = run_ser_experiment(&cfg.params_at(r.p_ave_db), &r.alloc, &opts)?;
        code = rep.code;
        t.push(vec![
            r.p_ave_db.into(),
            r.gamma.into(),
            rep.ser_lr.into(),
            rep.ser_ur.into(),
            rep.trials.into(),
        ]);
    }
    t.meta("qam", cfg.qam);
    t.meta("code", code);
    Ok(t)
}

/// Exponent rule under test in the tangency rows.
pub type ThetaRule = fn(&SystemParams<f64>, &GpState<f64>) -> [f64; 5];

pub fn cmd_verify(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    verify_with(cfg, theta_exponents)
}

struct Checks(ResultTable);

impl Checks {
    fn add(
        &mut self,
        suite: &str,
        case: String,
        measured: f64,
        threshold: f64,
        passed: bool,
        note: String,
    ) {
        self.0.push(vec![
            suite.into(),
            case.into(),
            passed.into(),
            measured.into(),
            threshold.into(),
            note.into(),
        ]);
    }
}

/// Oracle suites: reciprocal solver vs. lattice, condensation vs. lattice,
/// tangency and under-estimation of the monomial fit, and the sampled
/// eigenvalue expectation against both surrogate forms.
pub fn verify_with(cfg: &ExperimentConfig, theta: ThetaRule) -> CliResult<ResultTable> {
    let mut c = Checks(ResultTable::new(&[
        ("suite", Kind::Text),
        ("case", Kind::Text),
        ("passed", Kind::Bool),
        ("measured", Kind::Float),
        ("threshold", Kind::Float),
        ("note", Kind::Text),
    ]));
    for &g in &cfg.gamma {
        for &db in &cfg.pave_db {
            let p = cfg.params_at(db);
            let case = format!("p_ave_db={db} gamma={g}");

            let pr = AllocProblem::new(p, g);
            let s = solve_reciprocal(&pr)?;
            let o = grid_oracle_reciprocal(&pr, 200, 3)?;
            let gap = (s.objective - o.objective) / o.objective;
            c.add(
                "reciprocal-vs-grid",
                case.clone(),
                gap,
                1e-3,
                gap <= 1e-3,
                format!("branch={}", s.branch),
            );

            let nr = NonRecProblem::new(p, g);
            let r = solve_nonreciprocal(&nr)?;
            let (_, grid) = grid_oracle_nonreciprocal(&nr, 40, JensenVariant::SigmaSquared)?;
            let gap = (r.nmse_l - grid) / grid;
            let iters = r.trace.iterations.len();
            let monotone = r.trace.is_monotone();
            c.add(
                "condense-vs-grid",
                case.clone(),
                gap,
                0.02,
                gap <= 0.02 && monotone && iters <= 50,
                format!("iterations={iters} monotone={monotone}"),
            );

            let rep = tangency_check(&p, &r.state, &theta(&p, &r.state), 1e-6);
            let worst = rep.worst();
            c.add(
                "tangency",
                case.clone(),
                worst,
                1e-4,
                worst <= 1e-4,
                String::new(),
            );

            let den = ratio_denominator(&p);
            let fit = den.monomial_approx(&r.state.to_vec());
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let excess = (0..10_000)
                .map(|_| {
                    let x: Vec<f64> = (0..6)
                        .map(|_| 10f64.powf(rng.random_range(-3.0..3.0)))
                        .collect();
                    fit.eval(&x) / den.eval(&x) - 1.0
                })
                .fold(f64::NEG_INFINITY, f64::max);
            c.add(
                "under-estimation",
                case,
                excess,
                1e-12,
                excess <= 1e-12,
                "10000 random points".into(),
            );
        }
    }
    let p = cfg.params_at(cfg.pave_db[0]);
    let a = NonReciprocalAllocation {
        e_0: 10.0,
        e_1: 10.0,
        e_2: 10.0,
        e_3: 10.0,
        var_a: 0.5,
    };
    let j = adjudicate_jensen(&p, &a, cfg.trials.unwrap_or(NMSE_TRIALS), cfg.seed)?;
    let other = match j.closer {
        JensenVariant::Printed => JensenVariant::SigmaSquared,
        JensenVariant::SigmaSquared => JensenVariant::Printed,
    };
    c.add(
        "jensen",
        "e_2=10".into(),
        j.error_of(j.closer),
        f64::INFINITY,
        true,
        format!(
            "closer={} sampled={:.6} printed={:.6} sigma-squared={:.6} margin={:.3e}",
            j.closer,
            j.sampled,
            j.printed,
            j.sigma_squared,
            j.error_of(other) - j.error_of(j.closer)
        ),
    );
    let failed =
        c.0.column("passed")
            .iter()
            .filter(|x| ***x == Cell::Bool(false))
            .count();
    c.0.meta("failed", failed);
    Ok(c.0)
}

/// Failed rows in a verification table.
pub fn failures(t: &ResultTable) -> usize {
    t.column_index("passed").map_or(0, |_| {
        t.column("passed")
            .iter()
            .filter(|x| ***x == Cell::Bool(false))
            .count()
    })
}
