//! The `oamds` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 insufficient chunks, 3 verification
//! failure, 4 over budget, 5 I/O or corruption.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::code::{CodeParams, CodeSpec, Construction};
use crate::codec::{random_data, Encoder};
use crate::error::Error;
use crate::field::FieldSpec;
use crate::repair::{
    audit_access, plan_full_repair, plan_group_repair, CodewordSource, HelperReads, Repairer,
    TracingSource,
};
use crate::storage;
use crate::verify::{check_mds, DEFAULT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INSUFFICIENT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Schema version of the JSON reports.
pub const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "oamds", version, about = "Optimal-access MDS array codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print n, k, l and the evaluation points of a parameter set.
    Params(CodeArgs),
    /// Stripe and encode a file into n chunk files.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Rebuild the original file from any k valid chunks.
    Decode {
        #[arg(long)]
        in_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild one node's chunk, reading only the repair coordinates of each helper.
    Repair {
        #[arg(long)]
        in_dir: PathBuf,
        #[arg(long)]
        node: usize,
        /// Repair from the group mates plus the k helpers given by --helpers.
        #[arg(long, requires = "helpers")]
        group: bool,
        /// Helpers outside the failed node's group, comma separated.
        #[arg(long, value_delimiter = ',', requires = "group")]
        helpers: Vec<usize>,
        /// Stripes per JSON report line.
        #[arg(long, default_value_t = 1024)]
        batch_stripes: u64,
    },
    /// Rank-test every r-subset of nodes and print a certificate.
    VerifyMds {
        #[command(flatten)]
        code: CodeArgs,
        /// Maximum C(n,r)*(rl)^3 element operations.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Encode and repair random stripes; timings go to stderr.
    Bench {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 64)]
        stripes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct CodeArgs {
    /// 1 = grouped (n = s*m), 2 = shortened (n = r*m + r').
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    construction: u8,
    /// Group size; defaults to r and must equal r for construction 2.
    #[arg(long)]
    s: Option<u16>,
    #[arg(long)]
    r: u16,
    #[arg(long)]
    m: u16,
    #[arg(long)]
    rprime: Option<u16>,
    /// gf256, gf2_16, gf<p> or prime:<p>.
    #[arg(long, default_value = "gf256")]
    field: String,
}

impl CodeArgs {
    fn build(&self) -> Result<CodeParams, Error> {
        let field: FieldSpec = self.field.parse()?;
        let spec = match Construction::from_id(self.construction)? {
            Construction::Grouped => {
                if self.rprime.is_some() {
                    return Err(Error::InvalidParams(
                        "--rprime applies to construction 2".into(),
                    ));
                }
                CodeSpec::grouped(self.s.unwrap_or(self.r), self.r, self.m, field)
            }
            Construction::Shortened => {
                if self.s.is_some_and(|s| s != self.r) {
                    return Err(Error::InvalidParams("construction 2 requires s = r".into()));
                }
                let rp = self
                    .rprime
                    .ok_or_else(|| Error::InvalidParams("construction 2 needs --rprime".into()))?;
                CodeSpec::shortened(self.r, self.m, rp, field)
            }
        };
        spec.build()
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InsufficientChunks { .. } => EXIT_INSUFFICIENT,
        Error::OverBudget { .. } => EXIT_BUDGET,
        Error::InvalidField(_)
        | Error::InvalidParams(_)
        | Error::InvalidPlan(_)
        | Error::OutOfRange(_)
        | Error::Unsupported(_) => EXIT_USAGE,
        Error::Inconsistent => EXIT_VERIFY,
        _ => EXIT_IO,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Params(code) => params(&code.build()?, out),
        Command::Encode {
            input,
            out_dir,
            code,
        } => {
            let params = code.build()?;
            storage::symbol_width(params.spec().field)?;
            let data = fs::read(&input)?;
            let paths = storage::encode_to_dir(&params, &data, &out_dir)?;
            let layout = storage::StripeLayout::new(&params, data.len() as u64)?;
            writeln!(
                out,
                "encoded {} bytes into {} stripes across {} chunks (n={} k={} l={})",
                data.len(),
                layout.stripes,
                paths.len(),
                params.n(),
                params.k(),
                params.l()
            )?;
            Ok(EXIT_OK)
        }
        Command::Decode { in_dir, out: path } => {
            let (bytes, scan) = storage::decode_dir(&in_dir)?;
            for (p, why) in &scan.rejected {
                writeln!(err, "warning: ignoring {}: {why}", p.display())?;
            }
            fs::write(&path, &bytes)?;
            let present: Vec<String> = scan.present.keys().map(usize::to_string).collect();
            writeln!(
                out,
                "decoded {} bytes from chunks {}",
                bytes.len(),
                present.join(",")
            )?;
            Ok(EXIT_OK)
        }
        Command::Repair {
            in_dir,
            node,
            group,
            helpers,
            batch_stripes,
        } => {
            let header = storage::probe_header(&in_dir, node)?;
            let params = header.spec.build()?;
            let plan = if group {
                let v = params.position(node)?.axis;
                let mates = params.group(v);
                let outside: Vec<_> = helpers.into_iter().filter(|h| !mates.contains(h)).collect();
                plan_group_repair(&params, node, &outside)?
            } else {
                plan_full_repair(&params, node)?
            };
            let outcome = storage::repair_in_dir(&in_dir, &params, &plan, batch_stripes)?;
            for (start, report) in &outcome.batches {
                let mut line = report.to_json();
                line["version"] = json!(REPORT_VERSION);
                line["stripe_start"] = json!(start);
                writeln!(out, "{line}")?;
            }
            writeln!(
                err,
                "rebuilt {} ({} payload bytes read from {} helpers)",
                outcome.path.display(),
                outcome.bytes_read,
                plan.d()
            )?;
            Ok(EXIT_OK)
        }
        Command::VerifyMds { code, budget } => {
            let params = code.build()?;
            let cert = check_mds(&params, budget)?;
            out.write_all(cert.to_text().as_bytes())?;
            Ok(if cert.pass() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Bench {
            code,
            stripes,
            seed,
        } => bench(&code.build()?, stripes, seed, out, err),
    }
}

fn params(params: &CodeParams, out: &mut dyn Write) -> Result<i32, Error> {
    let lambdas: Vec<String> = params
        .lambdas()
        .iter()
        .map(|x| x.value().to_string())
        .collect();
    let mut raw = Vec::new();
    for x in params.lambdas() {
        raw.extend_from_slice(&x.value().to_le_bytes());
    }
    raw.extend_from_slice(&params.gamma().value().to_le_bytes());
    writeln!(out, "construction={}", params.construction().id())?;
    writeln!(out, "n={}", params.n())?;
    writeln!(out, "k={}", params.k())?;
    writeln!(out, "l={}", params.l())?;
    writeln!(out, "r={}", params.r())?;
    writeln!(out, "s={}", params.s())?;
    writeln!(out, "m={}", params.m())?;
    writeln!(out, "field={}", params.spec().field)?;
    writeln!(out, "lambda={}", lambdas.join(","))?;
    writeln!(out, "gamma={}", params.gamma())?;
    writeln!(out, "lambda_fingerprint={:08x}", crc32fast::hash(&raw))?;
    writeln!(out, "params_fingerprint={}", params.spec().fingerprint())?;
    Ok(EXIT_OK)
}

fn bench(
    params: &CodeParams,
    stripes: usize,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<_> = (0..stripes)
        .map(|_| random_data(params, &mut rng))
        .collect();
    let encoder = Encoder::new(params)?;

    let started = Instant::now();
    let codewords = data
        .iter()
        .map(|d| encoder.encode(params, d))
        .collect::<Result<Vec<_>, _>>()?;
    let encode_time = started.elapsed();

    let failed = 1;
    let plan = plan_full_repair(params, failed)?;
    let repairer = Repairer::new(params, plan.clone())?;
    let mut accessed = 0;
    let mut verified = true;
    let started = Instant::now();
    for cw in &codewords {
        let mut source = TracingSource::new(CodewordSource::new(cw, failed));
        let reads = HelperReads::gather(&plan, &mut source)?;
        verified &= repairer.repair(params, &reads)? == cw.node(failed);
        accessed += audit_access(params, &plan, source.trace())?.accessed;
    }
    let repair_time = started.elapsed();

    let mut hasher = crc32fast::Hasher::new();
    for cw in &codewords {
        for col in cw.columns() {
            col.iter()
                .map(|x| x.value())
                .for_each(|v| hasher.update(&v.to_le_bytes()));
        }
    }
    let encoded = stripes * params.n() * params.l();
    writeln!(out, "params={}", params.spec().fingerprint())?;
    writeln!(out, "stripes={stripes} seed={seed}")?;
    writeln!(out, "encoded_symbols={encoded}")?;
    writeln!(out, "codeword_crc32={:08x}", hasher.finalize())?;
    writeln!(
        out,
        "repair node={failed} symbols_accessed={accessed} per_stripe={}",
        plan.d() * plan.coords().len()
    )?;
    writeln!(out, "repair_verified={verified}")?;
    let rate = |symbols: usize, secs: f64| symbols as f64 / secs.max(1e-9);
    writeln!(
        err,
        "encode: {:.3e} symbols/s, repair: {:.3e} symbols/s",
        rate(encoded, encode_time.as_secs_f64()),
        rate(stripes * params.l(), repair_time.as_secs_f64())
    )?;
    Ok(if verified { EXIT_OK } else { EXIT_VERIFY })
}
