use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod outcome;

use outcome::{Outcome, Status};

#[derive(Parser)]
#[command(name = "softsheaf", version, about = "Soft sheaf representations of finite algebras")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Algebras in the JSON table format.
    #[command(subcommand)]
    Alg(AlgCmd),
    /// Principal congruences: commuting and the remainder solver.
    #[command(subcommand)]
    Con(ConCmd),
    /// Distributive lattices and their duals.
    #[command(subcommand)]
    Dl(DlCmd),
    /// Sheaves built from stalk assignments.
    #[command(subcommand)]
    Sheaf(SheafCmd),
    /// MV-algebras.
    #[command(subcommand)]
    Mv(MvCmd),
    /// The acceptance sweep.
    #[command(subcommand)]
    Suite(SuiteCmd),
    /// Graphviz output.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand)]
enum AlgCmd {
    /// Parse and check an algebra; lattice and MV signatures are checked
    /// against their axioms.
    Validate { file: PathBuf },
    /// List all congruences.
    Con {
        file: PathBuf,
        /// Also write the Hasse diagram of Con A.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConCmd {
    /// Check that the principal congruences of the given pairs commute.
    Commute {
        file: PathBuf,
        /// Element pairs such as "0 m".
        #[arg(long, num_args = 2.., required = true)]
        pairs: Vec<String>,
    },
    /// Find a with a θ(x_i,y_i) t_i for every pair and target.
    Crt {
        file: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        pairs: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        targets: Vec<String>,
    },
}

#[derive(Subcommand)]
enum DlCmd {
    /// The dual poset X and the down-sets â.
    Dual { file: PathBuf },
    /// Check |Con A| = 2^|X| and the subset/congruence correspondence.
    Sp { file: PathBuf },
    /// Check that a decomposition interpolates; with a lattice, also build ψ_q.
    Interp { file: PathBuf },
}

#[derive(Subcommand)]
enum SheafCmd {
    /// Validate the assignment and describe its sheaf.
    Build { file: PathBuf },
    /// Softness with a non-extending section as witness.
    Soft { file: PathBuf },
    /// Check that the sheaf is soft, represents A and gives back θ.
    Roundtrip { file: PathBuf },
    /// Direct image along a monotone map.
    DirectImage {
        file: PathBuf,
        map: PathBuf,
        /// Write the resulting assignment here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MvCmd {
    /// The Łukasiewicz chain {0, 1/n, .., 1}.
    Chain {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A product of Łukasiewicz chains.
    Product {
        #[arg(required = true)]
        ns: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prime ideals, root-system check and the map to maximal ideals.
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// The sheaf over the spectrum and its direct image.
    Sheaf { file: PathBuf },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Run every criterion, or one.
    Run {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        criterion: Option<u8>,
        /// Disable the thread pool.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Subcommand)]
enum ExportCmd {
    /// Poset, congruence lattice (from an algebra), étale space (from a
    /// stalk assignment) or decomposition, chosen by the document's keys.
    Dot {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> Outcome {
    use commands::*;
    let result = match cmd {
        Command::Alg(AlgCmd::Validate { file }) => alg_validate(&file),
        Command::Alg(AlgCmd::Con { file, dot }) => alg_con(&file, dot.as_deref()),
        Command::Con(ConCmd::Commute { file, pairs }) => con_commute(&file, &pairs),
        Command::Con(ConCmd::Crt { file, pairs, targets }) => con_crt(&file, &pairs, &targets),
        Command::Dl(DlCmd::Dual { file }) => dl_dual(&file),
        Command::Dl(DlCmd::Sp { file }) => dl_sp(&file),
        Command::Dl(DlCmd::Interp { file }) => dl_interp(&file),
        Command::Sheaf(SheafCmd::Build { file }) => sheaf_build(&file),
        Command::Sheaf(SheafCmd::Soft { file }) => sheaf_soft(&file),
        Command::Sheaf(SheafCmd::Roundtrip { file }) => sheaf_roundtrip(&file),
        Command::Sheaf(SheafCmd::DirectImage { file, map, out }) => sheaf_direct_image(&file, &map, out.as_deref()),
        Command::Mv(MvCmd::Chain { n, out }) => mv_generate(&[n], out.as_deref()),
        Command::Mv(MvCmd::Product { ns, out }) => mv_generate(&ns, out.as_deref()),
        Command::Mv(MvCmd::Spectrum { file, dot }) => mv_spectrum(&file, dot.as_deref()),
        Command::Mv(MvCmd::Sheaf { file }) => mv_sheaf(&file),
        Command::Suite(SuiteCmd::Run {
            seed,
            criterion,
            sequential,
        }) => suite_run(seed, criterion, sequential),
        Command::Export(ExportCmd::Dot { file, out }) => export_dot(&file, out.as_deref()),
    };
    result.unwrap_or_else(Outcome::from_error)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = dispatch(cli.command);
    match cli.format {
        Format::Text => print!("{}", outcome.text()),
        Format::Json => println!("{}", outcome.json()),
    }
    ExitCode::from(match outcome.status {
        Status::Ok => 0,
        Status::PropertyFailed => 1,
        Status::InvalidInput => 2,
    })
}
