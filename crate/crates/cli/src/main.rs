use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use expsum::acceptance::{run_suite, Suite};
use expsum::characters::{character_from_label, conductor_and_primitive_part, gauss_p_formula, CharacterGroup};
use expsum::complexsum::PhaseAngle;
use expsum::expsum::{
    a_expansion, a_recursive, b_r_growth, b_r_tail_check, explicit_bounds, sum_trajectory, Schedule, TupleIndex,
};
use expsum::multfun::{
    construct_example1, construct_example2, ModifiedCharacterSpec, MultiplicativeFunctionSpec, OverrideKey, PrimeSelector,
};
use expsum::oracles::naive_p;
use expsum::par::configure_threads;
use expsum::pretentious::{distance, log_correlation};
use expsum::{Error, ErrorKind};

const EXIT_USAGE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "expsum", version, about = "Exponential sums of multiplicative functions")]
struct Cli {
    /// Plain-text key=value file with defaults (limit, t, schedule, x, y, threads)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate or inspect the characters of a modulus
    Characters {
        #[arg(long)]
        modulus: u64,
        #[arg(long, conflicts_with = "inspect")]
        list: bool,
        /// Character label m.i
        #[arg(long)]
        inspect: Option<String>,
    },
    /// Partial sums S(x) = Σ f(n) e(nα) n^{it} with running sup
    Sum(SumArgs),
    /// Geometric and character bounds
    Bounds {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        alpha: PhaseAngle,
    },
    /// Gauss closed form against the brute-force polynomial
    Gauss {
        #[arg(long)]
        modulus: u64,
        #[arg(long = "char")]
        index: u64,
        #[arg(long, conflicts_with = "all")]
        a: Option<i64>,
        #[arg(long)]
        all: bool,
    },
    /// Pretentious distance between two specs
    Distance {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, required_unless_present = "twist")]
        g: Option<PathBuf>,
        /// Compare against χ(n)n^{it}, given as m.i,T
        #[arg(long, conflicts_with = "g")]
        twist: Option<String>,
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        y: Option<u64>,
    },
    /// Logarithmic correlation, direct and factored
    Correlate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        alpha: PhaseAngle,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        x: Option<u64>,
    },
    /// A-recursion and B_r diagnostics for a modified character
    Modified {
        #[arg(long = "char")]
        label: String,
        /// p=re,im (repeatable, in order)
        #[arg(long, required = true)]
        eta: Vec<String>,
        #[arg(long)]
        alpha: PhaseAngle,
        /// ℓ_1,ℓ_2,...
        #[arg(long, value_delimiter = ',')]
        ells: Vec<u32>,
        #[arg(long)]
        x: Option<f64>,
        /// Largest r for the B_r growth table
        #[arg(long = "Br")]
        br: Option<u32>,
    },
    /// Emit one of the two bounded constructions as a spec file
    Construct {
        #[arg(long)]
        example: u8,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: Option<PhaseAngle>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance criteria
    Selftest {
        #[arg(long, default_value = "acceptance")]
        suite: Suite,
    },
}

#[derive(Args)]
struct SumArgs {
    #[arg(long, conflicts_with = "label", required_unless_present = "label")]
    spec: Option<PathBuf>,
    #[arg(long = "char")]
    label: Option<String>,
    /// p=re,im override of f(p^k) for every k (repeatable)
    #[arg(long, requires = "label")]
    eta: Vec<String>,
    #[arg(long)]
    alpha: PhaseAngle,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    limit: Option<u64>,
    /// geometric[:k], linear:s or list:a,b,...
    #[arg(long)]
    schedule: Option<Schedule>,
    /// CSV path; a .json sidecar with the metadata is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Acceptance(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T = ()> = Result<T, Failure>;

/// Defaults from `--config`.
#[derive(Default)]
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Res<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            let k = k.trim();
            if !["limit", "t", "schedule", "x", "y", "threads"].contains(&k) {
                return Err(Failure::Usage(format!("{}:{}: unknown key {k:?}", path.display(), i + 1)));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Res<Option<T>> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| Failure::Usage(format!("config: bad value for {key}: {v:?}"))))
            .transpose()
    }

    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Res<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn require<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Res<T> {
        self.pick(flag, key)?
            .ok_or_else(|| Failure::Usage(format!("--{key} is required (or set {key} in --config)")))
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cnum(z: Complex64) -> String {
    format!("{} {}", num(z.re), num(z.im))
}

fn parse_eta(text: &str) -> Res<(u64, Complex64)> {
    let bad = || Failure::Usage(format!("--eta expects p=re,im, got {text:?}"));
    let (p, v) = text.split_once('=').ok_or_else(bad)?;
    let (re, im) = v.split_once(',').ok_or_else(bad)?;
    Ok((
        p.trim().parse().map_err(|_| bad())?,
        Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?),
    ))
}

fn read_spec(path: &Path) -> Res<MultiplicativeFunctionSpec> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(MultiplicativeFunctionSpec::from_json(&text)?)
}

fn write_file(path: &Path, text: &str) -> Res {
    fs::write(path, text).map_err(|e| Failure::Core(Error::Resource(format!("{}: {e}", path.display()))))
}

fn run(cli: Cli, out: &mut impl Write) -> Res {
    let config = Config::load(cli.config.as_deref())?;
    let threads = match std::env::var("EXPSUM_THREADS") {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| Failure::Usage(format!("EXPSUM_THREADS={v:?} is not a count")))?),
        Err(_) => config.get::<usize>("threads")?,
    };
    if let Some(n) = threads.filter(|&n| n > 0) {
        configure_threads(n)?;
    }
    let io = |e: io::Error| Failure::Core(Error::Resource(format!("output: {e}")));

    match cli.command {
        Command::Characters { modulus, list, inspect } => {
            if let Some(label) = inspect {
                let chi = character_from_label(&label)?;
                if chi.modulus() != modulus {
                    return Err(Failure::Usage(format!("{label} is not a character mod {modulus}")));
                }
                let (m0, psi) = conductor_and_primitive_part(&chi);
                writeln!(out, "label {}", chi.label()).map_err(io)?;
                writeln!(out, "order {}", chi.character_order()).map_err(io)?;
                writeln!(out, "conductor {m0}").map_err(io)?;
                writeln!(out, "primitive {}", psi.label()).map_err(io)?;
                writeln!(out, "n,re,im").map_err(io)?;
                for (n, v) in chi.values().iter().enumerate() {
                    writeln!(out, "{n},{},{}", num(v.re), num(v.im)).map_err(io)?;
                }
            } else {
                let _ = list;
                let group = CharacterGroup::new(modulus)?;
                writeln!(out, "label,order,conductor,primitive,real,principal").map_err(io)?;
                for chi in group.iter() {
                    let (m0, psi) = conductor_and_primitive_part(&chi);
                    writeln!(
                        out,
                        "{},{},{m0},{},{},{}",
                        chi.label(),
                        chi.character_order(),
                        psi.label(),
                        chi.is_real(),
                        chi.is_principal()
                    )
                    .map_err(io)?;
                }
            }
        }
        Command::Sum(args) => {
            let spec = match (&args.spec, &args.label) {
                (Some(path), _) => read_spec(path)?,
                (None, Some(label)) => {
                    let mut spec = MultiplicativeFunctionSpec::character(character_from_label(label)?);
                    for eta in &args.eta {
                        let (p, v) = parse_eta(eta)?;
                        spec = spec.with_override(p, OverrideKey::Whole, v)?;
                    }
                    spec
                }
                (None, None) => unreachable!("clap requires one of --spec, --char"),
            };
            let limit = config.require(args.limit, "limit")?;
            let t = config.pick(args.t, "t")?.unwrap_or(0.0);
            let schedule = config.pick(args.schedule, "schedule")?.unwrap_or_default();
            let tr = sum_trajectory(&spec, args.alpha, t, limit, &schedule)?;
            match &args.out {
                Some(path) => {
                    tr.write_files(path)?;
                    writeln!(out, "final {}", cnum(tr.final_value())).map_err(io)?;
                    writeln!(out, "runsup {}", num(tr.final_sup())).map_err(io)?;
                }
                None => tr.write_csv(&mut *out).map_err(io)?,
            }
        }
        Command::Bounds { modulus, alpha } => {
            let b = explicit_bounds(modulus, alpha)?;
            let show = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), num);
            writeln!(out, "geometric {}", show(b.geometric)).map_err(io)?;
            writeln!(out, "character {}", show(b.character)).map_err(io)?;
        }
        Command::Gauss { modulus, index, a, all } => {
            let chi = expsum::characters::character(modulus, index)?;
            let points: Vec<i64> = match (a, all) {
                (Some(a), _) => vec![a],
                (None, true) => (1..=modulus as i64).collect(),
                (None, false) => return Err(Failure::Usage("gauss needs --a or --all".into())),
            };
            writeln!(out, "a,formula_re,formula_im,naive_re,naive_im,deviation").map_err(io)?;
            let mut worst = 0.0f64;
            for a in points {
                let f = gauss_p_formula(&chi, a)?;
                let z = PhaseAngle::rational(a as i128, modulus)?.unit();
                let n = naive_p(&chi, z);
                let d = (f - n).norm();
                worst = worst.max(d);
                writeln!(out, "{a},{},{},{},{},{}", num(f.re), num(f.im), num(n.re), num(n.im), num(d)).map_err(io)?;
            }
            writeln!(out, "max_deviation {}", num(worst)).map_err(io)?;
        }
        Command::Distance { f, g, twist, x, y } => {
            let f = read_spec(&f)?;
            let g = match (g, twist) {
                (Some(path), _) => read_spec(&path)?,
                (None, Some(tw)) => {
                    let (label, t) = tw
                        .split_once(',')
                        .ok_or_else(|| Failure::Usage(format!("--twist expects m.i,T, got {tw:?}")))?;
                    let t: f64 = t.trim().parse().map_err(|_| Failure::Usage(format!("bad t in {tw:?}")))?;
                    MultiplicativeFunctionSpec::twisted_character(character_from_label(label)?, t)?
                }
                (None, None) => unreachable!("clap requires --g or --twist"),
            };
            let x = config.require(x, "x")?;
            let y = config.pick(y, "y")?.unwrap_or(1);
            writeln!(out, "distance {}", num(distance(&f, &g, y, x)?)).map_err(io)?;
        }
        Command::Correlate { spec, alpha, h, x } => {
            let spec = read_spec(&spec)?;
            let x = config.require(x, "x")?;
            let c = log_correlation(&spec, alpha, h, x)?;
            writeln!(out, "direct {}", cnum(c.direct)).map_err(io)?;
            writeln!(out, "factored {}", cnum(c.factored)).map_err(io)?;
            writeln!(out, "deviation {}", num(c.deviation)).map_err(io)?;
        }
        Command::Modified { label, eta, alpha, ells, x, br } => {
            let mods = eta.iter().map(|e| parse_eta(e)).collect::<Res<Vec<_>>>()?;
            let spec = ModifiedCharacterSpec::new(character_from_label(&label)?, mods)?;
            for i in spec.non_unimodular() {
                writeln!(out, "warning: |eta_{}| < 1", i + 1).map_err(io)?;
            }
            let tuple = TupleIndex::new(ells)?;
            if let Some(max_r) = br {
                writeln!(out, "r,re,im,abs,sup").map_err(io)?;
                for (r, v, sup) in b_r_growth(&spec, &tuple, max_r, alpha)? {
                    writeln!(out, "{r},{},{},{},{}", num(v.re), num(v.im), num(v.norm()), num(sup)).map_err(io)?;
                }
                let tail = b_r_tail_check(&spec, &tuple, 1, alpha)?;
                writeln!(out, "tail_check x={} difference {} bound {}", tail.x, num(tail.difference), num(tail.bound))
                    .map_err(io)?;
            } else {
                let x = config.require(x, "x")?;
                let r = a_recursive(&spec, &tuple, x, alpha)?;
                let e = a_expansion(&spec, &tuple, x, alpha)?;
                writeln!(out, "recursive {}", cnum(r)).map_err(io)?;
                writeln!(out, "expansion {}", cnum(e)).map_err(io)?;
                writeln!(out, "deviation {}", num((r - e).norm())).map_err(io)?;
            }
        }
        Command::Construct { example, k, alpha, out: path } => match example {
            1 => {
                let alpha = alpha.ok_or_else(|| Failure::Usage("example 1 needs --alpha".into()))?;
                let ex = construct_example1(alpha, k)?;
                write_file(&path, &ex.spec.to_json())?;
                writeln!(out, "primes {:?}", ex.primes).map_err(io)?;
                writeln!(out, "bound {}", num(ex.bound)).map_err(io)?;
            }
            2 => {
                let ex = construct_example2(k, &PrimeSelector::Sparse)?;
                write_file(&path, &ex.spec.to_json())?;
                writeln!(out, "primes {:?}", ex.primes).map_err(io)?;
            }
            _ => return Err(Failure::Usage(format!("--example must be 1 or 2, got {example}"))),
        },
        Command::Selftest { suite } => {
            let reports = run_suite(suite, |r| {
                let _ = writeln!(out, "{r}");
            });
            let failed = reports.iter().filter(|r| !r.passed).count();
            writeln!(out, "{}/{} passed", reports.len() - failed, reports.len()).map_err(io)?;
            if failed > 0 {
                return Err(Failure::Acceptance(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Acceptance(n)) => {
            eprintln!("error: {n} acceptance criteria failed");
            ExitCode::from(EXIT_ACCEPTANCE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::Resource => EXIT_RESOURCE,
            })
        }
    }
}
