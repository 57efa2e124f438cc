//! Command line front end. Counts go to standard output, diagnostics and
//! timings to standard error.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::lopsp::{
    classification_comment, count_report, enumerate_ops, expand, for_each_op, is_c2, is_c3,
    predecoration_params, Dedup, LopspError, LopspOperation, OpClass, Predecoration,
};
use crate::lopsp_apply::apply;
use crate::map::codec::{
    encode_edge_code, encode_planar_code, read_lopsp_text, sniff, CodecError, EDGE_CODE_HEADER,
    PLANAR_CODE_HEADER,
};
use crate::map::{decode, Format, PlaneMap, RecordKind};
use crate::oracle_suite::{c2_oracle, c3_oracle, rooted_identity, rooted_sum, submap_c3_oracle};
use crate::plane_map_gen::{classes_swappable, generate_maps};
use crate::quad_gen::{generate, GenConfig, GenStats};
use crate::rotation_audit::closure_audit;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Codec(#[from] CodecError),
    #[error("{0}")]
    Lopsp(#[from] LopspError),
    #[error("check failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lopsp-forge",
    version,
    about = "Generate quadrangulations, plane maps and lopsp-operations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plane quadrangulations with N vertices.
    Quads(QuadsArgs),
    /// Plane maps with N edges.
    Maps(MapsArgs),
    /// Lopsp-operations with inflation factor K.
    Lopsp(LopspArgs),
    /// Apply an operation to every map of a stream.
    Apply(ApplyArgs),
    /// Consistency checks.
    #[command(subcommand)]
    Audit(AuditCommand),
}

#[derive(Debug, Args)]
struct Output {
    /// Print only `count <value>`.
    #[arg(long)]
    count: bool,
    /// Write records here instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QuadsArgs {
    #[arg(short = 'n')]
    n: usize,
    #[command(flatten)]
    out: Output,
    #[arg(long, default_value = "planar_code")]
    format: Format,
    /// Keep only part `res` of `mod` parts of the search tree.
    #[arg(long, requires = "modulus")]
    res: Option<usize>,
    #[arg(long = "mod", requires = "res")]
    modulus: Option<usize>,
    /// Prune maps with more degree-1 vertices.
    #[arg(long = "max-deg1")]
    max_deg1: Option<usize>,
    /// Count rooted maps: the sum of 4E/|Aut|.
    #[arg(long)]
    rooted: bool,
    /// Count mirror images as different maps.
    #[arg(long = "op-dedup")]
    op_dedup: bool,
}

#[derive(Debug, Args)]
struct MapsArgs {
    #[arg(short = 'e')]
    e: usize,
    #[command(flatten)]
    out: Output,
    #[arg(long, default_value = "edge_code")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DedupArg {
    Full,
    Op,
}

#[derive(Debug, Args)]
struct LopspArgs {
    #[arg(short = 'k')]
    k: usize,
    #[arg(long, conflicts_with = "c3")]
    c2: bool,
    #[arg(long)]
    c3: bool,
    #[arg(long = "lsp-only", conflicts_with = "chiral_only")]
    lsp_only: bool,
    #[arg(long = "chiral-only")]
    chiral_only: bool,
    #[command(flatten)]
    out: Output,
    #[arg(long, value_enum, default_value = "full")]
    dedup: DedupArg,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    /// lopsp_text file; the first record is used.
    #[arg(long)]
    op: PathBuf,
    /// Map stream; standard input when absent.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    #[arg(long, default_value = "edge_code")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum AuditCommand {
    /// Rotations A and C stay inside the generated list and connect it.
    Closure {
        #[arg(short = 'n')]
        n: usize,
    },
    /// Fast classifiers against the slow reference checks.
    Oracles {
        #[arg(short = 'k')]
        k: usize,
    },
    /// Rooted quadrangulations with F faces against the closed formula.
    Rooted {
        #[arg(short = 'f')]
        f: usize,
    },
}

/// Worker count from `LOPSP_FORGE_THREADS`, else the available cores.
pub fn thread_count() -> usize {
    std::env::var("LOPSP_FORGE_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Quads(a) => quads(a, out),
        Command::Maps(a) => maps(a, out),
        Command::Lopsp(a) => lopsp(a, out),
        Command::Apply(a) => apply_cmd(a, out),
        Command::Audit(a) => audit(a, out),
    }
}

struct MapSink {
    w: Box<dyn Write>,
    format: Format,
    buf: Vec<u8>,
}

impl MapSink {
    fn open(path: Option<&PathBuf>, format: Format) -> Result<Self, CliError> {
        let mut w: Box<dyn Write> = match path {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::BufWriter::new(std::io::stdout())),
        };
        w.write_all(match format {
            Format::PlanarCode => PLANAR_CODE_HEADER,
            Format::EdgeCode => EDGE_CODE_HEADER,
        })?;
        Ok(MapSink {
            w,
            format,
            buf: Vec::new(),
        })
    }

    fn push(&mut self, m: &PlaneMap) -> Result<(), CliError> {
        self.buf.clear();
        match self.format {
            Format::PlanarCode => encode_planar_code(m, &mut self.buf)?,
            Format::EdgeCode => encode_edge_code(m, &mut self.buf)?,
        }
        self.w.write_all(&self.buf)?;
        Ok(())
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.w.flush()?;
        Ok(())
    }
}

fn text_sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

/// Sums `f` over the generated maps, spreading the search tree over
/// `threads` workers when no split was requested.
fn sum_over(
    cfg: &GenConfig,
    threads: usize,
    f: impl Fn(&PlaneMap) -> u128 + Sync,
) -> (u128, GenStats) {
    if threads <= 1 || cfg.split.is_some() || cfg.target_n < 8 {
        let mut total = 0;
        let stats = generate(cfg, |q| total += f(q));
        return (total, stats);
    }
    let modulus = 8 * threads;
    let next = std::sync::atomic::AtomicUsize::new(0);
    let parts: Vec<(u128, GenStats)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut acc = Vec::new();
                    loop {
                        let res = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if res >= modulus {
                            break;
                        }
                        let mut c = cfg.clone();
                        c.split = Some((res, modulus, 3));
                        let mut total = 0;
                        let stats = generate(&c, |q| total += f(q));
                        acc.push((total, stats));
                    }
                    acc
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    });
    let mut stats = GenStats::default();
    let mut total = 0;
    for (t, s) in &parts {
        total += t;
        stats.merge(s);
    }
    (total, stats)
}

fn quads(a: QuadsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.n < 3 {
        return Err(CliError::Usage("-n: at least 3 vertices are needed".into()));
    }
    let mut cfg = GenConfig::new(a.n);
    cfg.max_degree1 = a.max_deg1;
    if let (Some(res), Some(m)) = (a.res, a.modulus) {
        if m == 0 || res >= m {
            return Err(CliError::Usage(format!(
                "--res {res} --mod {m}: need 0 <= res < mod"
            )));
        }
        cfg.split = Some((res, m, 3));
    }
    let start = Instant::now();
    let mirrors = |q: &PlaneMap| -> bool { a.op_dedup && !q.canonical_form(None).has_reflection() };
    if a.out.count || a.rooted {
        let rooted = a.rooted;
        let op_dedup = a.op_dedup;
        let (total, stats) = sum_over(&cfg, thread_count(), |q| {
            let cf = q.canonical_form(None);
            let copies = if op_dedup && !cf.has_reflection() {
                2
            } else {
                1
            };
            if !rooted {
                copies
            } else if op_dedup {
                copies * (q.dart_count() / cf.orientation_preserving_order()) as u128
            } else {
                (2 * q.dart_count() / cf.group_order()) as u128
            }
        });
        writeln!(out, "count {total}")?;
        eprint!("{}", stats.report());
    } else {
        let mut sink = MapSink::open(a.out.output.as_ref(), a.format)?;
        let mut err = None;
        let stats = generate(&cfg, |q| {
            if err.is_some() {
                return;
            }
            let mut r = sink.push(q);
            if r.is_ok() && mirrors(q) {
                r = sink.push(&q.mirror());
            }
            err = r.err();
        });
        if let Some(e) = err {
            return Err(e);
        }
        sink.finish()?;
        eprint!("{}", stats.report());
    }
    eprintln!("time {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn maps(a: MapsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.e == 0 {
        return Err(CliError::Usage("-e: at least one edge is needed".into()));
    }
    let start = Instant::now();
    if a.out.count {
        let (total, stats) = sum_over(&GenConfig::new(a.e + 2), thread_count(), |q| {
            if classes_swappable(q) {
                1
            } else {
                2
            }
        });
        writeln!(out, "count {total}")?;
        eprint!("{}", stats.report());
    } else {
        let mut sink = MapSink::open(a.out.output.as_ref(), a.format)?;
        let mut err = None;
        generate_maps(a.e, |m| {
            if err.is_none() {
                err = sink.push(m).err();
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        sink.finish()?;
    }
    eprintln!("time {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn lopsp(a: LopspArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.k == 0 {
        return Err(CliError::Usage(
            "-k: the inflation factor is at least 1".into(),
        ));
    }
    let class = match (a.c2, a.c3) {
        (_, true) => OpClass::C3,
        (true, _) => OpClass::C2,
        _ => OpClass::All,
    };
    let start = Instant::now();
    if a.out.count {
        let report = count_report(a.k, class, thread_count());
        let c = report.selected();
        let value = match (a.lsp_only, a.chiral_only, a.dedup) {
            (true, _, _) => c.lsp,
            (_, true, DedupArg::Full) => c.chir,
            (_, true, DedupArg::Op) => 2 * c.chir,
            (_, _, DedupArg::Full) => c.tot,
            (_, _, DedupArg::Op) => c.op,
        };
        writeln!(out, "count {value}")?;
        let gen = &report.diagnostics.gen;
        let (n, _) = predecoration_params(a.k);
        eprint!("{}", gen.report());
        eprintln!("{report}");
        eprintln!(
            "quads generated {}",
            gen.accepted[n] + gen.pruned_by_filter[n]
        );
    } else {
        let dedup = match a.dedup {
            DedupArg::Full => Dedup::Full,
            DedupArg::Op => Dedup::OrientationPreserving,
        };
        let mut w = text_sink(a.out.output.as_ref())?;
        let mut err: Option<CliError> = None;
        let mut buf = String::new();
        for_each_op(a.k, class, dedup, |p, flags| {
            if err.is_some() || (a.lsp_only && !flags.lsp) || (a.chiral_only && flags.lsp) {
                return;
            }
            let mut rec = match expand(p) {
                Ok(o) => o.to_record(),
                Err(e) => {
                    err = Some(e.into());
                    return;
                }
            };
            rec.comments
                .push(classification_comment(flags.c2, flags.c3, flags.lsp));
            buf.clear();
            rec.write(&mut buf);
            if let Err(e) = w.write_all(buf.as_bytes()) {
                err = Some(e.into());
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        w.flush()?;
    }
    eprintln!("time {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn read_operation(path: &PathBuf) -> Result<LopspOperation, CliError> {
    let text = std::fs::read_to_string(path)?;
    let records = read_lopsp_text(&text)?;
    let r = records
        .first()
        .ok_or_else(|| CliError::Usage(format!("--op {}: no record", path.display())))?;
    Ok(match r.kind {
        RecordKind::Lopsp { .. } => LopspOperation::from_record(r)?,
        RecordKind::Predeco { .. } => expand(&Predecoration::from_record(r)?)?,
    })
}

fn apply_cmd(a: ApplyArgs, _out: &mut dyn Write) -> Result<(), CliError> {
    let op = read_operation(&a.op)?;
    let mut bytes = Vec::new();
    match &a.map {
        Some(p) => bytes = std::fs::read(p)?,
        None => {
            std::io::stdin().read_to_end(&mut bytes)?;
        }
    }
    let maps = decode(&bytes, sniff(&bytes)?)?;
    let mut sink = MapSink::open(a.output.as_ref(), a.format)?;
    for m in &maps {
        sink.push(&apply(&op, m))?;
    }
    sink.finish()?;
    eprintln!("applied k={} to {} maps", op.inflation_factor(), maps.len());
    Ok(())
}

fn audit(a: AuditCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match a {
        AuditCommand::Closure { n } => {
            if n < 3 {
                return Err(CliError::Usage("-n: at least 3 vertices are needed".into()));
            }
            let mut all = Vec::new();
            generate(&GenConfig::new(n), |q| all.push(q.clone()));
            let r = closure_audit(n, &all);
            writeln!(out, "{r}")?;
            if !(r.closed && r.connected) {
                return Err(CliError::Failed(r.to_string()));
            }
        }
        AuditCommand::Oracles { k } => {
            if k == 0 {
                return Err(CliError::Usage(
                    "-k: the inflation factor is at least 1".into(),
                ));
            }
            let line = oracle_audit(k)?;
            writeln!(out, "{line}")?;
            if !line.ends_with("disagreements 0") {
                return Err(CliError::Failed(line));
            }
        }
        AuditCommand::Rooted { f } => {
            if f == 0 {
                return Err(CliError::Usage("-f: at least one face is needed".into()));
            }
            let mut all = Vec::new();
            generate(&GenConfig::new(f + 2), |q| all.push(q.clone()));
            let (sum, expected) = (rooted_sum(&all), rooted_identity(f as u32));
            writeln!(out, "rooted f={f}: sum {sum} expected {expected}")?;
            if sum != expected {
                return Err(CliError::Failed(format!("rooted sum {sum} != {expected}")));
            }
        }
    }
    Ok(())
}

/// Compares the fast classifiers with the cut-path and submap checks on
/// every operation with inflation factor `k`.
pub fn oracle_audit(k: usize) -> Result<String, CliError> {
    let (n, _) = predecoration_params(k);
    let (mut ops, mut c2s, mut c3s, mut bad) = (0u64, 0u64, 0u64, 0u64);
    let mut err = None;
    generate(&GenConfig::new(n), |q| {
        enumerate_ops(q, k, Dedup::Full, |p| {
            let o = match expand(p) {
                Ok(o) => o,
                Err(e) => {
                    err.get_or_insert(e);
                    return;
                }
            };
            let c2 = is_c2(p);
            let c3 = c2 && is_c3(p).unwrap_or(false);
            ops += 1;
            c2s += c2 as u64;
            c3s += c3 as u64;
            let submap_ok = p.quad.edge_count() > 20 || submap_c3_oracle(p) == c3;
            if c2_oracle(&o) != c2 || c3_oracle(&o) != c3 || !submap_ok {
                bad += 1;
            }
        });
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(format!(
        "oracles k={k}: ops {ops} c2 {c2s} c3 {c3s} disagreements {bad}"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> Result<String, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("lopsp-forge").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let mut buf = Vec::new();
        execute(cli.command, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn counts() {
        assert_eq!(
            capture(&["quads", "-n", "6", "--count"]).unwrap(),
            "count 30\n"
        );
        assert_eq!(
            capture(&["lopsp", "-k", "4", "--c3", "--count"]).unwrap(),
            "count 6\n"
        );
        assert_eq!(
            capture(&["maps", "-e", "2", "--count"]).unwrap(),
            "count 4\n"
        );
        assert_eq!(
            capture(&["lopsp", "-k", "3", "--count"]).unwrap(),
            "count 12\n"
        );
    }

    #[test]
    fn quad_variants() {
        // Rooted sum for 3 faces and the mirror-counting total.
        assert_eq!(
            capture(&["quads", "-n", "5", "--rooted"]).unwrap(),
            "count 54\n"
        );
        assert_eq!(
            capture(&["quads", "-n", "5", "--rooted", "--op-dedup"]).unwrap(),
            "count 54\n"
        );
        let all = capture(&["quads", "-n", "7", "--count"]).unwrap();
        let op = capture(&["quads", "-n", "7", "--count", "--op-dedup"]).unwrap();
        assert_eq!(all, "count 124\n");
        assert_ne!(all, op);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["lopsp-forge", "lopsp"]), 2);
        assert_eq!(run(["lopsp-forge", "quads", "-n", "2", "--count"]), 2);
        assert_eq!(run(["lopsp-forge", "lopsp", "-k", "2", "--c2", "--c3"]), 2);
        assert_eq!(run(["lopsp-forge", "quads", "-n", "5", "--res", "0"]), 2);
    }

    #[test]
    fn audits() {
        assert_eq!(
            capture(&["audit", "rooted", "-f", "4"]).unwrap(),
            "rooted f=4: sum 378 expected 378\n"
        );
        assert!(capture(&["audit", "oracles", "-k", "4"])
            .unwrap()
            .ends_with("disagreements 0\n"));
        assert!(capture(&["audit", "closure", "-n", "6"])
            .unwrap()
            .contains("closed true connected true"));
    }
}
