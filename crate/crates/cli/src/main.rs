use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};

use av1324::encoder::MarkingMode;
use av1324::perm::{Pattern, Permutation};
use av1324::wordlang::{ConstraintSet, Word, DEFAULT_PAIR_CAP};
use av1324_cli::commands::{self, GfName, Rendered};
use av1324_cli::report::Format;
use av1324_cli::suites::{Suite, VerifyConfig, CHAIN_MAX_N, ENCODER_MAX_N};

#[derive(Parser)]
#[command(name = "av1324", version, about = "Counting, encoding and growth bounds for 1324-avoiding permutations")]
struct Cli {
    /// Output format on stdout.
    #[arg(long, global = true, default_value = "plain")]
    format: Format,

    /// Worker threads [default: $AV1324_THREADS, else all cores].
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count pattern avoiders for n = 0..N.
    Count {
        #[arg(long, default_value = "1324")]
        pattern: Permutation,
        #[arg(long)]
        n: usize,
        /// Largest n accepted.
        #[arg(long, default_value_t = 11)]
        cap: usize,
    },
    /// Colour and letter a permutation and print its word pair.
    Encode {
        perm: Permutation,
        #[arg(long, default_value = "rule4prime")]
        mode: MarkingMode,
    },
    /// Check one permutation against every encoding guarantee.
    Audit {
        perm: Permutation,
        #[arg(long, default_value = "rule4prime")]
        mode: MarkingMode,
    },
    /// Count admissible word pairs of total length N by exhaustive search.
    Pairs {
        #[arg(long)]
        n: usize,
        /// Constraint flags (`iv,v`, `vi`) or a name (`h`, `k`, `t`).
        #[arg(long, default_value = "h")]
        constraints: ConstraintSet,
        #[arg(long, default_value_t = DEFAULT_PAIR_CAP)]
        cap_pairs: usize,
    },
    /// Taylor coefficients of a generating function.
    Expand {
        #[arg(long, default_value = "h")]
        gf: GfName,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Denominator roots and the implied growth bound.
    Roots {
        #[arg(long, default_value = "h")]
        gf: GfName,
        #[arg(long, default_value_t = VerifyConfig::default().tol_alpha)]
        tol_alpha: f64,
    },
    /// Split a word into segments.
    Segments { word: Word },
    /// Test a word pair against a constraint set.
    CheckPair {
        w: Word,
        z: Word,
        #[arg(long, default_value = "h")]
        constraints: ConstraintSet,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = VerifyConfig::default().n_max)]
        n: usize,
        #[arg(long, default_value = "rule4prime")]
        mode: MarkingMode,
        #[arg(long, default_value_t = DEFAULT_PAIR_CAP)]
        cap_pairs: usize,
        #[arg(long, default_value_t = VerifyConfig::default().tol_alpha)]
        tol_alpha: f64,
    },
    /// Bound table and the inequality chain up to n = N.
    Reproduce {
        #[arg(long, default_value_t = CHAIN_MAX_N)]
        n: usize,
        #[arg(long, default_value_t = VerifyConfig::default().tol_alpha)]
        tol_alpha: f64,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn run(command: Command) -> Rendered {
    match command {
        Command::Count { pattern, n, cap } => {
            if n > cap {
                usage_error(format!("--n {n} exceeds the cap {cap}; raise --cap to allow it"));
            }
            let q = Pattern::new(pattern).unwrap_or_else(|e| usage_error(e));
            commands::count(&q, n)
        }
        Command::Encode { perm, mode } => commands::encode(&perm, mode),
        Command::Audit { perm, mode } => commands::audit_one(&perm, mode),
        Command::Pairs { n, constraints, cap_pairs } => {
            commands::pairs(n, constraints, cap_pairs).unwrap_or_else(|e| usage_error(e))
        }
        Command::Expand { gf, n } => commands::expand_gf(gf, n),
        Command::Roots { gf, tol_alpha } => {
            let cfg = VerifyConfig {
                tol_alpha,
                ..VerifyConfig::default()
            };
            commands::roots(gf, &cfg).unwrap_or_else(|e| usage_error(e))
        }
        Command::Segments { word } => commands::segments_of(&word),
        Command::CheckPair { w, z, constraints } => commands::check_pair_cmd(&w, &z, constraints),
        Command::Verify {
            suite,
            n,
            mode,
            cap_pairs,
            tol_alpha,
        } => {
            if n > ENCODER_MAX_N {
                usage_error(format!("--n {n} exceeds the cap {ENCODER_MAX_N}"));
            }
            let cfg = VerifyConfig {
                n_max: n,
                mode,
                cap_pairs,
                tol_alpha,
            };
            commands::verify(suite, &cfg)
        }
        Command::Reproduce { n, tol_alpha } => {
            if n > CHAIN_MAX_N {
                usage_error(format!("--n {n} exceeds the cap {CHAIN_MAX_N}"));
            }
            let cfg = VerifyConfig {
                tol_alpha,
                ..VerifyConfig::default()
            };
            commands::reproduce(n, &cfg)
        }
    }
}

const THREADS_ENV: &str = "AV1324_THREADS";

fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        let raw = std::env::var(THREADS_ENV).ok()?;
        Some(
            raw.trim()
                .parse()
                .unwrap_or_else(|_| usage_error(format!("{THREADS_ENV}={raw:?} is not a thread count"))),
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = thread_count(cli.threads) {
        if t == 0 {
            usage_error("thread count must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let rendered = run(cli.command);
    let mut stdout = io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{}", rendered.render(cli.format)) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(path) = cli.out {
        if let Err(e) = std::fs::write(&path, rendered.doc.to_json() + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(rendered.exit_code())
}
