use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use dce_cli::commands::failures;
use dce_cli::config::Format;
use dce_cli::{run, CliError, Command, ExperimentConfig, ResultTable};

#[derive(Parser)]
#[command(
    name = "dce",
    version,
    about = "Two-way discriminatory channel estimation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solved training powers and AN power per (P_ave, γ).
    Alloc(Opts),
    /// Analytic and Monte-Carlo NMSE per sweep point, or a τ_F sweep.
    Nmse(Opts),
    /// Symbol error rate of the rate-3/4 OSTBC at both receivers.
    Ser(Opts),
    /// Oracle cross-checks; exits with 5 if any fails.
    Verify(Opts),
}

/// Same keys as the config file; flags win over the file.
#[derive(Args)]
struct Opts {
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n_t: Option<String>,
    #[arg(long)]
    n_l: Option<String>,
    #[arg(long)]
    n_u: Option<String>,
    #[arg(long)]
    var_h: Option<String>,
    #[arg(long)]
    var_hd: Option<String>,
    #[arg(long)]
    var_hu: Option<String>,
    #[arg(long)]
    var_g: Option<String>,
    #[arg(long)]
    var_w: Option<String>,
    #[arg(long)]
    var_wt: Option<String>,
    #[arg(long)]
    var_v: Option<String>,
    #[arg(long)]
    tau_r: Option<String>,
    #[arg(long = "tau-0")]
    tau_0: Option<String>,
    #[arg(long = "tau-2")]
    tau_2: Option<String>,
    #[arg(long = "tau-3")]
    tau_3: Option<String>,
    /// Forward lengths; several values run the fixed-budget sweep.
    #[arg(long)]
    tau_f: Option<String>,
    #[arg(long)]
    pbar_t_db: Option<String>,
    #[arg(long)]
    pbar_l_db: Option<String>,
    /// List or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// List or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pave_db: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// printed or sigma-squared.
    #[arg(long)]
    jensen_variant: Option<String>,
    #[arg(long)]
    qam: Option<String>,
    /// SER at 50000 trials instead of 5000.
    #[arg(long)]
    full_scale: bool,
}

impl Opts {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let pairs: [(&'static str, &Option<String>); 26] = [
            ("scheme", &self.scheme),
            ("n-t", &self.n_t),
            ("n-l", &self.n_l),
            ("n-u", &self.n_u),
            ("var-h", &self.var_h),
            ("var-hd", &self.var_hd),
            ("var-hu", &self.var_hu),
            ("var-g", &self.var_g),
            ("var-w", &self.var_w),
            ("var-wt", &self.var_wt),
            ("var-v", &self.var_v),
            ("tau-r", &self.tau_r),
            ("tau-0", &self.tau_0),
            ("tau-2", &self.tau_2),
            ("tau-3", &self.tau_3),
            ("tau-f", &self.tau_f),
            ("pbar-t-db", &self.pbar_t_db),
            ("pbar-l-db", &self.pbar_l_db),
            ("gamma", &self.gamma),
            ("pave-db", &self.pave_db),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
            ("jensen-variant", &self.jensen_variant),
            ("qam", &self.qam),
        ];
        let mut v: Vec<_> = pairs
            .into_iter()
            .filter_map(|(k, x)| x.as_deref().map(|s| (k, s)))
            .collect();
        if self.full_scale {
            v.push(("full-scale", "true"));
        }
        v
    }

    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, v)
                .map_err(|e| CliError::Config(format!("--{k}: {e}")))?;
        }
        Ok(cfg)
    }
}

fn emit(table: &ResultTable, cfg: &ExperimentConfig) -> io::Result<()> {
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cfg.format {
        Format::Csv => {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            table.write_csv(&mut sink, &now.to_string())?;
        }
        Format::Json => sink.write_all(table.to_json().as_bytes())?,
    }
    sink.flush()
}

fn execute(cmd: Command, opts: &Opts) -> Result<(), CliError> {
    let cfg = opts.config()?;
    let table = run(cmd, &cfg)?;
    emit(&table, &cfg)?;
    match failures(&table) {
        0 => Ok(()),
        n => Err(CliError::Verification(n)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, opts) = match &cli.command {
        Cmd::Alloc(o) => (Command::Alloc, o),
        Cmd::Nmse(o) => (Command::Nmse, o),
        Cmd::Ser(o) => (Command::Ser, o),
        Cmd::Verify(o) => (Command::Verify, o),
    };
    match execute(cmd, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dce {}: {e}", cmd.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
