//! ngviz command line: fingerprint | analyze | synth | chart.
//!
//! Exit codes: 0 clean, 1 usage error, 2 input error, 3 at least one
//! segment flagged below the threshold (the scripting hook).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use ngviz::chart::{render_delta_chart, render_rank_chart};
use ngviz::pcap::{read_domain_list, read_pcap, write_pcap};
use ngviz::report::{render_report, ReportFormat, ReportRow};
use ngviz::synth::{gen_legit, gen_tunnel, Encoding, SynthConfig};
use ngviz::{
    analyze, build_table, AnalysisConfig, Direction, Error, Fingerprint, MatchParams, QueryRecord,
    Result, Scope, SortOrder, SplitMode, Timestamp,
};

#[derive(Parser)]
#[command(
    name = "ngviz",
    version,
    about = "Detect DNS tunnels by comparing n-gram frequency distributions against a fingerprint of legitimate traffic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a fingerprint file from a domain list or pcap
    Fingerprint(FingerprintArgs),
    /// Score traffic against a fingerprint and report ranked segments
    Analyze(AnalyzeArgs),
    /// Generate a deterministic synthetic corpus
    Synth(SynthArgs),
    /// Render an SVG chart for one input
    Chart(ChartArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    WholeName,
    SubdomainOnly,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Scope {
        match s {
            ScopeArg::WholeName => Scope::WholeName,
            ScopeArg::SubdomainOnly => Scope::SubdomainOnly,
        }
    }
}

/// Table-building knobs shared by several subcommands.
#[derive(Args)]
struct TableArgs {
    /// N-gram order (1 = unigram, 2 = bigram, 3 = trigram)
    #[arg(long = "n", default_value_t = 1)]
    n: u8,
    /// Count each distinct name once (recommended for tunnel detection)
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    dedup: bool,
    /// Which labels contribute n-grams
    #[arg(long, value_enum, default_value_t = ScopeArg::WholeName)]
    scope: ScopeArg,
}

#[derive(Args)]
struct FingerprintArgs {
    /// Domain list or pcap to fingerprint
    input: PathBuf,
    /// Output fingerprint file
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    None,
    Ip,
    Domain,
    IpDomain,
}

#[derive(Clone, Copy, ValueEnum)]
enum SortArg {
    Asc,
    Desc,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Jsonl,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Traffic to score: domain lists and/or pcaps
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Fingerprint file to compare against
    #[arg(long)]
    fp: PathBuf,
    #[command(flatten)]
    table: TableArgs,
    /// How to group records before windowing
    #[arg(long = "split-by", value_enum, default_value_t = SplitArg::Domain)]
    split_by: SplitArg,
    /// Unique names per scored window (0 scores each group whole)
    #[arg(long, default_value_t = 100)]
    window: u32,
    /// rank_match exponent
    #[arg(long = "a", default_value_t = 1.0)]
    a: f64,
    /// freq_match exponent
    #[arg(long = "b", default_value_t = 1.0)]
    b: f64,
    /// rank_match weight (x + y must equal 1)
    #[arg(long = "x", default_value_t = 0.5)]
    x: f64,
    /// freq_match weight
    #[arg(long = "y", default_value_t = 0.5)]
    y: f64,
    /// Segments scoring below this are flagged
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// asc lists the worst match first
    #[arg(long, value_enum, default_value_t = SortArg::Asc)]
    sort: SortArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    format: FormatArg,
    /// Write <prefix>.rank.svg and <prefix>.delta.svg for the whole input
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Tunnel,
    Legit,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Base32,
    Base64url,
    Hex,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Encoding {
        match e {
            EncodingArg::Base32 => Encoding::Base32,
            EncodingArg::Base64url => Encoding::Base64Url,
            EncodingArg::Hex => Encoding::Hex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    List,
    Pcap,
}

fn parse_label_len(text: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = match text.split_once(':') {
        Some((lo, hi)) => (lo, hi),
        None => (text, text),
    };
    let lo: usize = lo.parse().map_err(|_| format!("bad length {lo:?}"))?;
    let hi: usize = hi.parse().map_err(|_| format!("bad length {hi:?}"))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct SynthArgs {
    /// Corpus family to generate
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// PRNG seed; one seed always yields one byte-identical corpus
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Apex the tunnel operates under (tunnel kind only)
    #[arg(long, default_value = "t.example.com")]
    apex: String,
    /// Payload encoding (tunnel kind only)
    #[arg(long, value_enum, default_value_t = EncodingArg::Base32)]
    encoding: EncodingArg,
    /// Payload label length range LO:HI (tunnel kind only)
    #[arg(long = "label-len", value_parser = parse_label_len, default_value = "12:40")]
    label_len: (usize, usize),
    /// Output shape: domain list or synthetic pcap
    #[arg(long, value_enum, default_value_t = EmitArg::List)]
    emit: EmitArg,
    /// Output path (stdout for lists when omitted; required for pcap)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartKindArg {
    Rank,
    Delta,
}

#[derive(Args)]
struct ChartArgs {
    /// Traffic to chart: domain list or pcap
    input: PathBuf,
    /// Fingerprint file (required for rank charts)
    #[arg(long)]
    fp: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ChartKindArg::Rank)]
    kind: ChartKindArg,
    /// Ranks shown in the rank chart
    #[arg(long = "top-k", default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..))]
    top_k: u32,
    #[command(flatten)]
    table: TableArgs,
    /// Output SVG path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Fingerprint(args) => cmd_fingerprint(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Chart(args) => cmd_chart(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ngviz: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 1 for errors the user can fix on the command line, 2 for bad input.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::OrderMismatch { .. }
        | Error::InvalidParams(_)
        | Error::InvalidConfig(_)
        | Error::UnsupportedOrder(_) => 1,
        _ => 2,
    }
}

fn is_pcap_prefix(bytes: &[u8]) -> bool {
    if bytes.len() < 4 {
        return false;
    }
    let magic = u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    matches!(
        magic,
        0xa1b2_c3d4 | 0xd4c3_b2a1 | 0xa1b2_3c4d | 0x4d3c_b2a1 | 0x0a0d_0d0a
    )
}

/// Read one input file, sniffing pcap magic vs plain text.
fn ingest(path: &Path) -> Result<Vec<QueryRecord>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if is_pcap_prefix(&bytes) {
        let (records, stats) = read_pcap(bytes.as_slice())?;
        if stats.packets_skipped > 0 {
            let reasons: Vec<String> = stats
                .skip_reasons
                .iter()
                .map(|(reason, count)| format!("{reason}: {count}"))
                .collect();
            eprintln!(
                "ngviz: {}: {} DNS packets, {} skipped ({})",
                path.display(),
                stats.packets_dns,
                stats.packets_skipped,
                reasons.join(", ")
            );
        }
        Ok(records)
    } else {
        let (records, stats) = read_domain_list(bytes.as_slice())?;
        if stats.skipped > 0 {
            eprintln!(
                "ngviz: {}: {} names, {} unparseable lines skipped",
                path.display(),
                stats.parsed,
                stats.skipped
            );
        }
        Ok(records)
    }
}

fn ingest_all(paths: &[PathBuf]) -> Result<Vec<QueryRecord>> {
    let mut all = Vec::new();
    for path in paths {
        all.extend(ingest(path)?);
    }
    // one ingestion run: renumber so seq stays strictly increasing
    for (i, record) in all.iter_mut().enumerate() {
        record.seq = i as u64;
    }
    Ok(all)
}

fn load_fingerprint(path: &Path) -> Result<Fingerprint> {
    Fingerprint::load(
        BufReader::new(File::open(path)?),
        path.display().to_string(),
    )
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => File::create(path)?.write_all(bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn cmd_fingerprint(args: FingerprintArgs) -> Result<u8> {
    let records = ingest(&args.input)?;
    let table = build_table(&records, args.table.n, args.table.dedup, args.table.scope.into())?;
    let fp = Fingerprint::new(table, args.input.display().to_string(), args.table.dedup)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    fp.save(&mut out)?;
    out.flush()?;
    eprintln!(
        "ngviz: fingerprint k={} total={} -> {}",
        fp.table.k(),
        fp.table.total(),
        args.out.display()
    );
    Ok(0)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8> {
    let fp = load_fingerprint(&args.fp)?;
    if fp.table.order() != args.table.n {
        return Err(Error::OrderMismatch {
            input: args.table.n,
            fingerprint: fp.table.order(),
        });
    }
    let params = MatchParams::new(args.a, args.b, args.x, args.y)?;
    let records = ingest_all(&args.inputs)?;
    let cfg = AnalysisConfig {
        n: args.table.n,
        dedup: args.table.dedup,
        scope: args.table.scope.into(),
        split: match args.split_by {
            SplitArg::None => SplitMode::None,
            SplitArg::Ip => SplitMode::ByIp,
            SplitArg::Domain => SplitMode::ByDomain,
            SplitArg::IpDomain => SplitMode::ByIpAndDomain,
        },
        window: args.window as usize,
        params,
        threshold: args.threshold,
        sort: match args.sort {
            SortArg::Asc => SortOrder::Ascending,
            SortArg::Desc => SortOrder::Descending,
        },
    };
    let result = analyze(&records, &fp, &cfg)?;
    if result.windows_skipped > 0 {
        eprintln!(
            "ngviz: {} windows produced no n-grams and were skipped",
            result.windows_skipped
        );
    }
    let rows: Vec<ReportRow> = result.segments.iter().map(ReportRow::from).collect();
    let format = match args.format {
        FormatArg::Tsv => ReportFormat::Tsv,
        FormatArg::Jsonl => ReportFormat::JsonLines,
    };
    io::stdout().write_all(&render_report(&rows, format))?;

    if let Some(prefix) = &args.chart {
        let table = build_table(&records, args.table.n, args.table.dedup, args.table.scope.into())?;
        let rank_svg = render_rank_chart(&table, &fp, 40)?;
        let delta_svg = render_delta_chart(&table)?;
        let rank_path = PathBuf::from(format!("{}.rank.svg", prefix.display()));
        let delta_path = PathBuf::from(format!("{}.delta.svg", prefix.display()));
        write_output(Some(&rank_path), rank_svg.as_bytes())?;
        write_output(Some(&delta_path), delta_svg.as_bytes())?;
    }

    Ok(if result.any_flagged() { 3 } else { 0 })
}

fn cmd_synth(args: SynthArgs) -> Result<u8> {
    let names: Vec<ngviz::QueryName> = match args.kind {
        KindArg::Tunnel => {
            let cfg = SynthConfig {
                seed: args.seed,
                count: args.count,
                apex: args.apex.clone(),
                encoding: args.encoding.into(),
                label_len: args.label_len.0..=args.label_len.1,
            };
            gen_tunnel(&cfg)?.collect()
        }
        KindArg::Legit => {
            if args.count == 0 {
                return Err(Error::InvalidConfig("count must be at least 1".into()));
            }
            gen_legit(args.seed, args.count).collect()
        }
    };
    match args.emit {
        EmitArg::List => {
            let mut out = Vec::new();
            for name in &names {
                out.extend_from_slice(name.raw());
                out.push(b'\n');
            }
            write_output(args.out.as_deref(), &out)?;
        }
        EmitArg::Pcap => {
            let out_path = args.out.as_deref().ok_or_else(|| {
                Error::InvalidConfig("--emit pcap requires --out <path>".into())
            })?;
            let records: Vec<QueryRecord> = names
                .iter()
                .enumerate()
                .map(|(i, name)| QueryRecord {
                    name: name.clone(),
                    client_ip: std::net::Ipv4Addr::new(10, 0, 0, 1),
                    direction: Direction::Query,
                    timestamp: Timestamp {
                        sec: 1_600_000_000 + i as u32,
                        usec: 0,
                    },
                    seq: i as u64,
                })
                .collect();
            let mut file = BufWriter::new(File::create(out_path)?);
            write_pcap(&mut file, &records)?;
            file.flush()?;
        }
    }
    Ok(0)
}

fn cmd_chart(args: ChartArgs) -> Result<u8> {
    let records = ingest(&args.input)?;
    let table = build_table(&records, args.table.n, args.table.dedup, args.table.scope.into())?;
    let svg = match args.kind {
        ChartKindArg::Rank => {
            let fp_path = args.fp.as_deref().ok_or_else(|| {
                Error::InvalidConfig("--fp is required for rank charts".into())
            })?;
            let fp = load_fingerprint(fp_path)?;
            if fp.table.order() != args.table.n {
                return Err(Error::OrderMismatch {
                    input: args.table.n,
                    fingerprint: fp.table.order(),
                });
            }
            render_rank_chart(&table, &fp, args.top_k as usize)?
        }
        ChartKindArg::Delta => render_delta_chart(&table)?,
    };
    write_output(args.out.as_deref(), svg.as_bytes())?;
    Ok(0)
}
