use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use hlf_core::bench::run_bench;
use hlf_core::cpc::{self, SolutionSpace, DEFAULT_RANK_CAP};
use hlf_core::oracle::verify_instance;
use hlf_core::plot::render_distribution_grid;
use hlf_core::timing::{fpga_time_model, r0_bound, runtime_ratio, TimingParams};
use hlf_core::{run_cla, BitVector, HlfError, HlfInstance};

const EXIT_VALIDATION: u8 = 2;
const EXIT_DISAGREE: u8 = 3;
const EXIT_CAP: u8 = 4;

/// Solve, enumerate and verify full-sampling hidden linear function instances.
#[derive(Parser)]
#[command(name = "hlf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArg {
    /// Instance file or `grid:N:b` shorthand.
    #[arg(value_name = "INSTANCE", required_unless_present = "instance")]
    positional: Option<String>,
    #[arg(long, conflicts_with = "positional")]
    instance: Option<String>,
}

impl InstanceArg {
    fn load(&self) -> Result<HlfInstance, Failure> {
        let spec = self
            .instance
            .as_deref()
            .or(self.positional.as_deref())
            .expect("clap enforces presence");
        Ok(HlfInstance::load(spec)?)
    }
}

#[derive(Args, Clone)]
struct CapArg {
    /// Largest binary rank to enumerate (default 34, or HLF_MAX_R).
    #[arg(long)]
    cap: Option<usize>,
}

impl CapArg {
    fn resolve(&self) -> Result<usize, Failure> {
        if let Some(c) = self.cap {
            return Ok(c);
        }
        match std::env::var("HLF_MAX_R") {
            Ok(v) => v.trim().parse().map_err(|_| {
                HlfError::Parse(format!("HLF_MAX_R must be an integer, got {v:?}")).into()
            }),
            Err(_) => Ok(DEFAULT_RANK_CAP),
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Mode {
    Text,
    Binary,
    Checksum,
    CountOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum PbmFormat {
    P1,
    P4,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance document.
    Gen {
        /// Source instance (file or grid:N:b).
        #[arg(long, conflicts_with_all = ["random", "graph"])]
        instance: Option<String>,
        /// Random diagonal on an N x N grid.
        #[arg(long, value_name = "N")]
        random: Option<usize>,
        /// Random general graph on this many vertices.
        #[arg(long, value_name = "n", conflicts_with = "random")]
        graph: Option<usize>,
        /// Edge probability for --graph.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the linear-algebra summary as JSON.
    Solve {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Stream every solution.
    Enumerate {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, value_enum, default_value = "text")]
        mode: Mode,
        /// Shorthand for --mode count-only.
        #[arg(long)]
        count_only: bool,
        #[arg(long, default_value_t = 1)]
        chunks: usize,
        #[command(flatten)]
        cap: CapArg,
        #[arg(long)]
        out: Option<String>,
    },
    /// Cross-check the enumerator against the independent oracles.
    Verify {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        cap: CapArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render the solution set as a portable bitmap.
    Plot {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, value_enum, default_value = "p1")]
        format: PbmFormat,
        #[command(flatten)]
        cap: CapArg,
        #[arg(long)]
        out: Option<String>,
    },
    /// Time checksum-mode enumeration.
    Bench {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, default_value_t = 1)]
        chunks: usize,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Evaluate the analytic runtime models.
    Ratio {
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 1.0)]
        c3: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Clock period in seconds for the pipelined time model.
        #[arg(long)]
        dt: Option<f64>,
        /// Pipeline delay in cycles.
        #[arg(long, default_value_t = 0)]
        tau: u64,
    },
}

enum Failure {
    Hlf(HlfError),
    Io(io::Error),
    Disagree(String),
}

impl From<HlfError> for Failure {
    fn from(e: HlfError) -> Self {
        Failure::Hlf(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn open_out(path: Option<&str>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn random_bits(rng: &mut impl Rng, n: usize) -> BitVector {
    BitVector::from_bools(&(0..n).map(|_| rng.gen()).collect::<Vec<_>>())
}

fn gen(
    instance: Option<String>,
    random: Option<usize>,
    graph: Option<usize>,
    density: f64,
    seed: u64,
    out: Option<String>,
) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match (instance, random, graph) {
        (Some(spec), _, _) => HlfInstance::load(&spec)?,
        (None, Some(side), _) => HlfInstance::grid(side, random_bits(&mut rng, side * side))?,
        (None, None, Some(n)) => {
            if !(0.0..=1.0).contains(&density) {
                return Err(
                    HlfError::Domain(format!("density must lie in [0, 1], got {density}")).into(),
                );
            }
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(density))
                .collect();
            let b = random_bits(&mut rng, n);
            HlfInstance::from_edges(n, &edges, b)?
        }
        (None, None, None) => {
            return Err(HlfError::Domain("gen needs --instance, --random or --graph".into()).into())
        }
    };
    let mut w = open_out(out.as_deref())?;
    writeln!(w, "{}", inst.to_json())?;
    w.flush()?;
    Ok(())
}

/// Renders `[start, start + count)` into one buffer.
fn render_block(space: &SolutionSpace, start: u64, count: u64, mode: Mode) -> Vec<u8> {
    let mut buf = Vec::new();
    space
        .for_each_in(start, count, |_, z| {
            let _ = match mode {
                Mode::Binary => cpc::write_binary(&mut buf, z),
                _ => cpc::write_text(&mut buf, z),
            };
        })
        .expect("block lies inside the space");
    buf
}

fn enumerate(
    space: &SolutionSpace,
    mode: Mode,
    chunks: usize,
    out: Option<String>,
) -> Result<(), Failure> {
    let mut w = open_out(out.as_deref())?;
    match mode {
        Mode::CountOnly => writeln!(w, "{}", space.digest_parallel(chunks).count)?,
        Mode::Checksum => {
            let d = space.digest_parallel(chunks);
            writeln!(w, "{}", json!({"count": d.count, "checksum": d.hex()}))?;
        }
        Mode::Text | Mode::Binary => {
            // waves of `chunks` blocks rendered in parallel, written in order
            const BLOCK: u64 = 1 << 14;
            let total = space.total();
            let workers = chunks.max(1) as u64;
            let mut start = 0;
            while start < total {
                let blocks: Vec<(u64, u64)> = (0..workers)
                    .map(|k| start + k * BLOCK)
                    .take_while(|&s| s < total)
                    .map(|s| (s, BLOCK.min(total - s)))
                    .collect();
                let rendered: Vec<Vec<u8>> = if blocks.len() == 1 {
                    vec![render_block(space, blocks[0].0, blocks[0].1, mode)]
                } else {
                    std::thread::scope(|scope| {
                        let handles: Vec<_> = blocks
                            .iter()
                            .map(|&(s, c)| scope.spawn(move || render_block(space, s, c, mode)))
                            .collect();
                        handles
                            .into_iter()
                            .map(|h| h.join().expect("render worker panicked"))
                            .collect()
                    })
                };
                for buf in rendered {
                    w.write_all(&buf)?;
                }
                start = blocks.last().map_or(total, |&(s, c)| s + c);
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            instance,
            random,
            graph,
            density,
            seed,
            out,
        } => gen(instance, random, graph, density, seed, out),
        Command::Solve { inst } => {
            let inst = inst.load()?;
            println!("{}", run_cla(&inst)?.to_json());
            Ok(())
        }
        Command::Enumerate {
            inst,
            mode,
            count_only,
            chunks,
            cap,
            out,
        } => {
            let inst = inst.load()?;
            let cla = run_cla(&inst)?;
            let space = SolutionSpace::with_cap(&inst, &cla, cap.resolve()?)?;
            let mode = if count_only { Mode::CountOnly } else { mode };
            enumerate(&space, mode, chunks, out)
        }
        Command::Verify {
            inst,
            tol,
            cap,
            seed,
        } => {
            let inst = inst.load()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = verify_instance(&inst, tol, cap.resolve()?, &mut rng)?;
            let text = serde_json::to_string(&report).expect("report serializes");
            println!("{text}");
            if report.agrees {
                Ok(())
            } else {
                Err(Failure::Disagree(text))
            }
        }
        Command::Plot {
            inst,
            format,
            cap,
            out,
        } => {
            let inst = inst.load()?;
            let cla = run_cla(&inst)?;
            let space = SolutionSpace::with_cap(&inst, &cla, cap.resolve()?)?;
            let sols: Vec<BitVector> = space.iter().map(|(_, z)| z).collect();
            let img = render_distribution_grid(&sols, inst.n())?;
            let mut w = open_out(out.as_deref())?;
            match format {
                PbmFormat::P1 => w.write_all(img.to_pbm_plain().as_bytes())?,
                PbmFormat::P4 => w.write_all(&img.to_pbm_raw())?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Bench {
            inst,
            chunks,
            repeat,
            cap,
        } => {
            let inst = inst.load()?;
            let report = run_bench(&inst, chunks, repeat, cap.resolve()?)?;
            println!(
                "{}",
                serde_json::to_string(&report).expect("report serializes")
            );
            Ok(())
        }
        Command::Ratio {
            c1,
            c2,
            c3,
            n,
            r,
            d,
            dt,
            tau,
        } => {
            let mut out = serde_json::Map::new();
            out.insert("n".into(), json!(n));
            if n >= 4 {
                out.insert("r0".into(), json!(r0_bound(n)?));
            }
            if let Some(r) = r {
                let p = TimingParams {
                    c1,
                    c2,
                    c3,
                    n,
                    r,
                    d,
                };
                out.insert("r".into(), json!(r));
                out.insert("ratio".into(), json!(runtime_ratio(&p)?));
                if let Some(dt) = dt {
                    out.insert("t_f".into(), json!(fpga_time_model(dt, tau, r)?));
                }
            } else if dt.is_some() {
                return Err(HlfError::Domain("--dt needs --r".into()).into());
            }
            println!("{}", serde_json::Value::Object(out));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Hlf(e)) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(if e.is_cap() {
                EXIT_CAP
            } else {
                EXIT_VALIDATION
            })
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Disagree(report)) => {
            eprintln!(
                "{}",
                json!({"error": "oracle_disagreement", "message": report})
            );
            ExitCode::from(EXIT_DISAGREE)
        }
    }
}
