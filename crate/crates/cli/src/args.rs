use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sixstate", version, about = "Six-state QKD attack curves, solvers and simulations")]
pub struct Cli {
    /// Worker threads for Monte Carlo commands. Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    /// Record the current time in the run manifest. SOURCE_DATE_EPOCH pins it.
    #[arg(long, global = true)]
    pub timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic P_E, I_E and Q_AB curves for the six-state protocol and BB84 as CSV.
    Curves(CurvesArgs),
    /// Intercept/resend strategies.
    #[command(subcommand)]
    Ir(IrCommand),
    /// Simulate protocol sessions under an attack.
    Simulate(SimulateArgs),
    /// Check the collective-attack probe constraints for one parameter value.
    Verify(VerifyArgs),
    /// Same-axis singlet correlations with and without an eavesdropper.
    E91(E91Args),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Seed for every random stream of the run.
    #[arg(long, env = "QKD_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RoundsArg {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub rounds: u64,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub d_min: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub d_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Output file. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Subcommand)]
pub enum IrCommand {
    /// The four strategies with equal success in all three bases.
    Solve,
    /// Evaluate every strategy on a grid over both angles.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 361)]
    pub alpha_steps: usize,
    #[arg(long, default_value_t = 361)]
    pub beta_steps: usize,
    /// Include every grid cell in the output.
    #[arg(long)]
    pub cells: bool,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    SixState,
    Bb84,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    None,
    InterceptResend,
    Collective,
}

impl AttackArg {
    pub fn registry_name(self) -> &'static str {
        match self {
            AttackArg::None => "none",
            AttackArg::InterceptResend => "intercept-resend",
            AttackArg::Collective => "collective",
        }
    }
}

/// Angles in radians.
#[derive(Debug, Args)]
pub struct AttackParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub disturbance: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub fidelity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::SixState)]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = AttackArg::None)]
    pub attack: AttackArg,
    #[command(flatten)]
    pub params: AttackParamArgs,
    #[command(flatten)]
    pub rounds: RoundsArg,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Print JSON instead of a text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("param").required(true).args(["theta", "disturbance", "fidelity"])))]
pub struct VerifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub disturbance: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub fidelity: Option<f64>,
    /// Largest residual that still counts as a pass.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum E91Attack {
    None,
    /// Intercept/resend on both wings.
    IrBoth,
    /// Intercept/resend on Bob's wing only.
    IrBob,
    Collective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairDist {
    DiracZ,
    ProductUniform,
    ProductAxes,
    AlignedUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BobDensity {
    Uniform,
    Axes,
    Z,
}

#[derive(Debug, Args)]
pub struct E91Args {
    #[arg(long, value_enum, default_value_t = E91Attack::None)]
    pub attack: E91Attack,
    /// Eve's direction distribution for `ir-both`.
    #[arg(long, value_enum)]
    pub dist: Option<PairDist>,
    /// Eve's direction density on Bob's wing for `ir-bob`.
    #[arg(long, value_enum)]
    pub bob_density: Option<BobDensity>,
    /// Disturbance of the `collective` attack.
    #[arg(long, allow_negative_numbers = true)]
    pub disturbance: Option<f64>,
    #[command(flatten)]
    pub rounds: RoundsArg,
    #[command(flatten)]
    pub seed: SeedArg,
}
