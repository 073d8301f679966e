//! `ksda`: validate, run, convert, encode and simulate depth-k storage automata.
//!
//! Exit status: 0 accept or success, 1 reject, 2 step limit, 10 usage,
//! 11 unreadable or unparsable input, 12 validation failure, 13 runtime error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ksda::dcfl::{pda_to_sda2, run_pda, sda2_to_pda};
use ksda::dsl::{load, parse_dsl, render_dsl, DslError, Machine};
use ksda::encoding::{encode, EncodedInstance};
use ksda::engine::{run, run_aux, run_multihead, RunOptions, RunReport, Verdict};
use ksda::par::{self, Exec};
use ksda::scspace::{procedure_p, ProcedureOutcome, ScError};
use ksda::transforms::{bar_transform, fl_run, hat_transform, render_track, run_lda, tilde_transform};
use ksda::universal::{universal_run, UniversalOptions};

#[derive(Parser)]
#[command(name = "ksda", version, about = "Deterministic depth-k storage automata")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a machine file and report validation results.
    Validate { file: PathBuf },
    /// Run a machine on one input.
    Run {
        file: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        steps: Option<u64>,
        /// Write one trace record per step to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Convert between 2-sda's and pda's; prints the result in the DSL.
    Convert { direction: Direction, file: PathBuf },
    /// Write the instance encoding of (machine, input); the sidecar goes to OUT.meta.json.
    Encode {
        file: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the universal simulator on an encoding written by `encode --out`.
    Usim {
        encoding: PathBuf,
        /// Limit on simulated steps.
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Run the marker-based small-space simulation of a depth-immune machine.
    Scsim {
        file: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Apply one of the input transforms.
    Transform {
        kind: TransformKind,
        input: String,
        #[arg(long, default_value_t = '[')]
        left: char,
        #[arg(long, default_value_t = ']')]
        right: char,
        #[arg(long, default_value_t = '#')]
        sep: char,
    },
    /// Run `scsim` over a size ladder and write a CSV of space statistics.
    BenchSpace {
        file: PathBuf,
        /// `UNIT` or `UNIT:n1,n2,…`; each input is UNIT repeated to length n
        /// (ladder 8,16,32,64,128 by default).
        #[arg(long)]
        inputs: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Sda2pda,
    Pda2sda,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Tilde,
    Hat,
    Bar,
}

/// A failure with its exit status.
struct Fail(u8, String);

impl Fail {
    fn usage(msg: impl Into<String>) -> Self {
        Fail(10, msg.into())
    }

    fn input(msg: impl Into<String>) -> Self {
        Fail(11, msg.into())
    }

    fn runtime(msg: impl std::fmt::Display) -> Self {
        Fail(13, msg.to_string())
    }
}

impl From<DslError> for Fail {
    fn from(e: DslError) -> Self {
        match e {
            DslError::Parse { .. } => Fail(11, e.to_string()),
            DslError::Invalid(_) => Fail(12, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Accept => 0,
        Verdict::Reject => 1,
        Verdict::StepLimit => 2,
    }
}

fn sidecar_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn trace_lines(r: &RunReport, states: &dyn Fn(usize) -> String, syms: &dyn Fn(usize) -> String) -> String {
    r.trace.iter().map(|t| t.to_line(states, syms) + "\n").collect()
}

fn cmd_run(file: &Path, x: &str, steps: Option<u64>, trace: Option<&Path>) -> Result<u8, Fail> {
    let m = load(&read(file)?)?;
    let opts = RunOptions { step_limit: steps, trace: trace.is_some(), no_audit: false };
    let n = x.chars().count();
    let (verdict, taken, limit, lines) = match &m {
        Machine::Sda(s) => {
            let r = run(s, x, &opts).map_err(Fail::runtime)?;
            let lines = trace_lines(&r, &|q| s.control.name(q).into(), &|g| s.alphabet.name(g).into());
            (r.outcome.verdict, r.outcome.steps, steps.unwrap_or(s.default_step_limit(n)), lines)
        }
        Machine::Aux(s) => {
            let (r, _) = run_aux(s, x, &opts).map_err(Fail::runtime)?;
            let lines = trace_lines(&r, &|q| s.control.name(q).into(), &|g| s.alphabet.name(g).into());
            (r.outcome.verdict, r.outcome.steps, steps.unwrap_or(s.default_step_limit(n)), lines)
        }
        Machine::MultiHead(s) => {
            let r = run_multihead(s, x, &opts).map_err(Fail::runtime)?;
            let lines = trace_lines(&r, &|q| s.control.name(q).into(), &|g| s.alphabet.name(g).into());
            (r.outcome.verdict, r.outcome.steps, steps.unwrap_or(s.default_step_limit(n)), lines)
        }
        Machine::Pda(p) => {
            let r = run_pda(p, x, steps).map_err(Fail::runtime)?;
            (r.verdict, r.steps, steps.unwrap_or(p.default_step_limit(n)), String::new())
        }
        Machine::Lda(l) => {
            let (v, t) = run_lda(l, x, steps).map_err(Fail::runtime)?;
            (v, t, steps.unwrap_or(l.default_step_limit(n)), String::new())
        }
        Machine::Flt(f) => {
            let out = fl_run(f, x, steps).map_err(Fail::runtime)?;
            println!("{}", out.output);
            println!("steps={} work_cells={}", out.steps, out.work_cells);
            return Ok(0);
        }
    };
    if let Some(path) = trace {
        write(path, &lines)?;
    }
    println!("verdict={verdict} steps={taken} limit={limit}");
    Ok(verdict_code(verdict))
}

fn cmd_convert(direction: Direction, file: &Path) -> Result<u8, Fail> {
    let m = load(&read(file)?)?;
    let out = match (direction, m) {
        (Direction::Sda2pda, Machine::Sda(s)) => Machine::Pda(sda2_to_pda(&s).map_err(Fail::runtime)?),
        (Direction::Pda2sda, Machine::Pda(p)) => Machine::Sda(pda_to_sda2(&p).map_err(Fail::runtime)?),
        (_, m) => return Err(Fail::usage(format!("cannot convert a {} in that direction", m.kind()))),
    };
    print!("{}", render_dsl(&out));
    Ok(0)
}

fn sda_of(m: Machine) -> Result<ksda::model::SdaSpec, Fail> {
    let kind = m.kind();
    m.into_sda().ok_or_else(|| Fail::usage(format!("expected an sda, got a {kind}")))
}

fn cmd_encode(file: &Path, x: &str, out: Option<&Path>) -> Result<u8, Fail> {
    let m = sda_of(load(&read(file)?)?)?;
    let e = encode(&m, x).map_err(Fail::runtime)?;
    match out {
        Some(p) => {
            write(p, &e.text)?;
            write(&sidecar_path(p), &e.sidecar_json())?;
            let q = &e.params;
            println!(
                "length={} m1={} m2={} c={} theta={} alpha={} items={}",
                e.text.len(),
                q.m1,
                q.m2,
                q.c,
                q.theta,
                q.alpha,
                e.items.len()
            );
        }
        None => println!("{}", e.text),
    }
    Ok(0)
}

fn cmd_usim(path: &Path, steps: Option<u64>) -> Result<u8, Fail> {
    let text = read(path)?.trim_end().to_string();
    let side = read(&sidecar_path(path))?;
    let e = EncodedInstance::from_parts(text, &side).map_err(|err| Fail::input(err.to_string()))?;
    let opts = UniversalOptions { session_limit: steps, ..Default::default() };
    let r = universal_run(&e, &opts).map_err(|err| match err {
        ksda::universal::UniversalError::Encoding(_) => Fail::input(err.to_string()),
        _ => Fail::runtime(err),
    })?;
    println!("verdict={} sessions={} steps={} cells={} shortcuts={}", r.verdict, r.sessions, r.steps, r.storage_cells, r.shortcuts);
    Ok(verdict_code(r.verdict))
}

fn scsim(m: &ksda::model::SdaSpec, x: &str) -> Result<Option<ProcedureOutcome>, Fail> {
    match procedure_p(m, x, None) {
        Ok(o) => Ok(Some(o)),
        Err(ScError::StepLimit(_)) => Ok(None),
        Err(e) => Err(Fail::runtime(e)),
    }
}

fn cmd_scsim(file: &Path, x: &str, stats: Option<&Path>) -> Result<u8, Fail> {
    let m = sda_of(load(&read(file)?)?)?;
    let Some(o) = scsim(&m, x)? else {
        println!("verdict=step-limit");
        return Ok(2);
    };
    println!("verdict={} {}", o.verdict, o.stats.record());
    if let Some(p) = stats {
        write(p, &format!("{}\n{}\n", ProcedureOutcome::CSV_HEADER, o.csv_row()))?;
    }
    Ok(verdict_code(o.verdict))
}

fn cmd_transform(kind: TransformKind, x: &str, left: char, right: char, sep: char) -> Result<u8, Fail> {
    let out = match kind {
        TransformKind::Tilde => render_track(&tilde_transform(x, left, right).map_err(|e| Fail::usage(e.to_string()))?),
        TransformKind::Hat => hat_transform(x, left, right, sep).map_err(|e| Fail::usage(e.to_string()))?,
        TransformKind::Bar => bar_transform(x),
    };
    println!("{out}");
    Ok(0)
}

fn ladder(pattern: &str) -> Result<(String, Vec<usize>), Fail> {
    let (unit, sizes) = match pattern.split_once(':') {
        Some((u, s)) => {
            let sizes = s
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| Fail::usage(format!("bad ladder size `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            (u.to_string(), sizes)
        }
        None => (pattern.to_string(), vec![8, 16, 32, 64, 128]),
    };
    if unit.is_empty() {
        return Err(Fail::usage("empty input unit"));
    }
    Ok((unit, sizes))
}

fn cmd_bench_space(file: &Path, pattern: &str, out: &Path) -> Result<u8, Fail> {
    let m = sda_of(load(&read(file)?)?)?;
    let (unit, sizes) = ladder(pattern)?;
    let inputs: Vec<String> = sizes.iter().map(|&n| unit.chars().cycle().take(n).collect()).collect();
    let rows = par::map(Exec::default(), &inputs, |x| scsim(&m, x));
    let mut csv = format!("{}\n", ProcedureOutcome::CSV_HEADER);
    for (x, r) in inputs.iter().zip(rows) {
        match r? {
            Some(o) => csv.push_str(&(o.csv_row() + "\n")),
            None => csv.push_str(&format!("{},{},,,,,step-limit\n", x.chars().count(), m.k())),
        }
    }
    write(out, &csv)?;
    print!("{csv}");
    Ok(0)
}

fn cmd_validate(file: &Path) -> Result<u8, Fail> {
    let m = parse_dsl(&read(file)?)?;
    let r = m.validate();
    print!("{r}");
    if !r.is_ok() {
        return Err(Fail(12, format!("{} violates the model", file.display())));
    }
    println!("ok: {}", m.kind());
    Ok(0)
}

fn dispatch(cmd: Cmd) -> Result<u8, Fail> {
    match cmd {
        Cmd::Validate { file } => cmd_validate(&file),
        Cmd::Run { file, input, steps, trace } => cmd_run(&file, &input, steps, trace.as_deref()),
        Cmd::Convert { direction, file } => cmd_convert(direction, &file),
        Cmd::Encode { file, input, out } => cmd_encode(&file, &input, out.as_deref()),
        Cmd::Usim { encoding, steps } => cmd_usim(&encoding, steps),
        Cmd::Scsim { file, input, stats } => cmd_scsim(&file, &input, stats.as_deref()),
        Cmd::Transform { kind, input, left, right, sep } => cmd_transform(kind, &input, left, right, sep),
        Cmd::BenchSpace { file, inputs, out } => cmd_bench_space(&file, &inputs, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 10 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
