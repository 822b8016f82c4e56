use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use morphplay::oracle::{format_point, OracleOp};
use morphplay::replay::{self, ReplayOptions};
use morphplay::server::{self, ServerConfig};
use morphplay::{load_scene_arg, read_input, validation_summary, CliError};
use morphplay_core::feasibility::{PivotTolerance, DEFAULT_PIVOT_TOLERANCE};
use morphplay_core::session::{Mode, SessionConfig, SessionState};

#[derive(Parser)]
#[command(
    name = "morphplay",
    version,
    about = "Geometric transformation playground engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rotation,
    Translation,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rotation => Mode::Rotation,
            ModeArg::Translation => Mode::Translation,
        }
    }
}

#[derive(clap::Args)]
struct SessionArgs {
    /// Starting mode of new sessions.
    #[arg(long, value_enum, default_value = "rotation")]
    mode: ModeArg,
    /// Largest pivot distance from the hinge that still counts as correct.
    #[arg(long, default_value_t = DEFAULT_PIVOT_TOLERANCE)]
    pivot_tolerance: f64,
    /// Leave the verdict out of preview messages.
    #[arg(long)]
    silent_verdicts: bool,
}

impl SessionArgs {
    fn config(&self) -> Result<SessionConfig, CliError> {
        let pivot_tolerance = PivotTolerance::new(self.pivot_tolerance)
            .map_err(|e| CliError::Domain(e.to_string()))?;
        Ok(SessionConfig {
            pivot_tolerance,
            silent_verdicts: self.silent_verdicts,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a scene document and print a summary.
    Validate {
        /// Scene file, or a name looked up in $MORPHPLAY_SCENE_DIR (`house` is built in).
        scene: String,
    },
    /// Run a script of client messages and print the transcript.
    Replay {
        scene: String,
        /// Newline-delimited JSON client messages, or `-` for standard input.
        script: String,
        /// Compare the transcript with this file and fail on any difference.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, default_value = replay::DEFAULT_SESSION)]
        session: String,
        #[command(flatten)]
        session_args: SessionArgs,
    },
    /// Transform one point with the reference implementation.
    #[command(allow_negative_numbers = true)]
    Oracle {
        x: f64,
        y: f64,
        z: f64,
        /// Rotation axis: x, y or z.
        #[arg(long)]
        axis: Option<String>,
        /// Rotation sense: cw or ccw (right-hand rule).
        #[arg(long)]
        sense: Option<String>,
        /// Rotation angle in degrees.
        #[arg(long, allow_hyphen_values = true)]
        angle: Option<f64>,
        /// Pivot as x,y,z (default origin).
        #[arg(long, allow_hyphen_values = true)]
        pivot: Option<String>,
        /// Translation as x,y,z.
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
    },
    /// Serve the session protocol over WebSocket.
    Serve {
        scene: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory receiving `<session>.snapshot.json` files on shutdown.
        #[arg(long, default_value = ".")]
        snapshot_dir: PathBuf,
        /// Snapshot file to resume; may be repeated.
        #[arg(long)]
        restore: Vec<PathBuf>,
        #[command(flatten)]
        session_args: SessionArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { scene } => {
            let scene = load_scene_arg(&scene)?;
            println!("{}", validation_summary(&scene));
            Ok(())
        }
        Command::Replay {
            scene,
            script,
            golden,
            session,
            session_args,
        } => {
            let scene = Arc::new(load_scene_arg(&scene)?);
            let messages = replay::parse_script(&read_input(&script)?)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let options = ReplayOptions {
                session,
                mode: session_args.mode.into(),
                config: session_args.config()?,
            };
            let text = replay::transcript_text(&replay::replay(scene, &messages, &options));
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write transcript: {e}")))?;
            if let Some(golden) = golden {
                let expected = std::fs::read_to_string(&golden)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", golden.display())))?;
                if let Some(line) = replay::first_difference(&text, &expected) {
                    return Err(CliError::Domain(format!(
                        "transcript differs from {} at line {line}",
                        golden.display()
                    )));
                }
            }
            Ok(())
        }
        Command::Oracle {
            x,
            y,
            z,
            axis,
            sense,
            angle,
            pivot,
            translate,
        } => {
            let op = OracleOp::from_flags(
                axis.as_deref(),
                sense.as_deref(),
                angle,
                pivot.as_deref(),
                translate.as_deref(),
            )
            .map_err(|e| CliError::Domain(e.to_string()))?;
            if ![x, y, z].iter().all(|v| v.is_finite()) {
                return Err(CliError::Domain("point coordinates must be finite".into()));
            }
            println!("{}", format_point(op.apply([x, y, z])));
            Ok(())
        }
        Command::Serve {
            scene,
            port,
            host,
            snapshot_dir,
            restore,
            session_args,
        } => {
            let scene = Arc::new(load_scene_arg(&scene)?);
            let session = session_args.config()?;
            let restored = restore
                .iter()
                .map(|path| {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        CliError::Io(format!("cannot read {}: {e}", path.display()))
                    })?;
                    SessionState::restore(scene.clone(), session, &text)
                        .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let config = ServerConfig {
                scene,
                mode: session_args.mode.into(),
                session,
                snapshot_dir: Some(snapshot_dir),
                restored,
            };
            serve(&host, port, config)
        }
    }
}

fn serve(host: &str, port: u16, config: ServerConfig) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| CliError::Io(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::Io(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener
            .local_addr()
            .map_err(|e| CliError::Io(e.to_string()))?;
        println!("listening on ws://{addr}/");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        let written = server::serve(listener, config, shutdown)
            .await
            .map_err(|e| CliError::Io(format!("cannot write snapshot: {e}")))?;
        for path in written {
            println!("wrote {}", path.display());
        }
        Ok(())
    })
}
