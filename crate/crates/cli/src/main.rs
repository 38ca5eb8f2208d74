use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use dadim_core::certify::formats::{
    action_from_json, action_to_json, asdim_witness_from_json, asdim_witness_to_json, canonical_string,
    complex_from_json, complex_to_json, cover_from_json, element_from_json, groupoid_from_json,
    groupoid_witness_from_json, groupoid_witness_to_json, map_from_json, map_to_json, pou_from_json, pou_to_json,
    read_json, report_value, space_from_json, system_from_json, write_json,
};
use dadim_core::certify::{corpus_bless, corpus_check, corpus_dir, run_pipeline, verify_chain, CertifyError, PipelineParams};
use dadim_core::coarse::{bridge_to_groupoid, construct_grid_witness, verify_asdim_witness, verify_bridge};
use dadim_core::cstar::{block_decompose, decompose_via_pou, norm_report, ConvElement};
use dadim_core::nerve::{check_cover_conditions, dad_witness_from_blr, map_from_cover};
use dadim_core::pou::{pou_pipeline, verify_pou};
use dadim_core::rational::parse_q;
use dadim_core::witness::{construct_minimal_z_witness, verify_dad_witness, DadWitness};
use dadim_core::Error;

const EXIT_CODES: &str = "\
Exit codes:
  0   success (for pipeline: the chain is green)
  2   usage error
  3   i/o error
  4   malformed input file
  5   symbolic system error
  6   witness rejected
  7   group action error
  8   groupoid witness rejected
  9   coarse witness rejected
  10  nerve or cover condition violated
  11  partition of unity rejected
  12  convolution algebra error or decomposition rejected
  13  certificate chain hash mismatch or broken link
  14  corpus differs from golden files
  15  configuration error
  16  pipeline finished but the chain is not green";

#[derive(Parser)]
#[command(name = "dadim", version, about = "Finite certificates for dynamic asymptotic dimension", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-color witness for a minimal ℤ-system.
    Construct {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a witness against a system.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        blowup_bound: Option<u64>,
    },
    /// Grid witness for a finite metric space.
    AsdimConstruct {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a coarse witness.
    AsdimVerify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Pair groupoid witness from a coarse witness, verified.
    Bridge {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cover conditions and the sampled map into the nerve.
    Nerve {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        /// Generating set, as group element indices.
        #[arg(long, value_delimiter = ',')]
        e: Vec<usize>,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Groupoid witness from an equivariant map into a complex.
    BlrCheck {
        #[arg(long)]
        action: PathBuf,
        /// Output of `nerve`, or a file with vertex_action, complex and map.
        #[arg(long)]
        nerve: PathBuf,
        #[arg(long, value_delimiter = ',')]
        e: Vec<usize>,
    },
    /// Enlargement, towers and partition of unity.
    PouBuild {
        #[arg(long)]
        groupoid: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size_bound: Option<u128>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a partition of unity certificate.
    PouVerify {
        #[arg(long)]
        groupoid: PathBuf,
        #[arg(long)]
        pou: PathBuf,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
    },
    /// Reduced norm of a convolution element.
    Norm {
        #[arg(long)]
        groupoid: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Cut an element down along a partition of unity.
    Decompose {
        #[arg(long)]
        groupoid: PathBuf,
        #[arg(long)]
        pou: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Run the certificate chain on a system, or re-check a written chain.
    Pipeline {
        #[arg(long, required_unless_present = "check")]
        system: Option<PathBuf>,
        #[arg(long, required_unless_present = "check")]
        out: Option<PathBuf>,
        /// Directory of a previously written chain.
        #[arg(long, conflicts_with_all = ["system", "out"])]
        check: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 6)]
        quotient_depth: usize,
        #[arg(long, default_value_t = 16)]
        pou_depth: usize,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
    },
    /// Compare the bundled cases with the golden files.
    Corpus {
        /// Defaults to $DADIM_CORPUS, then ./corpus.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Overwrite the golden files.
        #[arg(long)]
        bless: bool,
    },
}

enum Failure {
    Core(Error),
    Chain(CertifyError),
    CorpusDiff(Value),
    NotGreen(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        Failure::Chain(e)
    }
}

macro_rules! core_err {
    ($e:expr) => {
        $e.map_err(|e| Failure::Core(e.into()))
    };
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Parse(_) => 4,
        Error::Symbolic(_) => 5,
        Error::Witness(dadim_core::witness::WitnessError::Symbolic(_)) => 5,
        Error::Witness(_) => 6,
        Error::Action(_) => 7,
        Error::Groupoid(_) => 8,
        Error::Coarse(_) => 9,
        Error::Nerve(_) => 10,
        Error::Pou(_) => 11,
        Error::Cstar(_) => 12,
        Error::Certify(c) => certify_code(c),
    }
}

fn certify_code(e: &CertifyError) -> u8 {
    match e {
        CertifyError::Stage { source, .. } => core_code(source),
        CertifyError::HashMismatch { .. } | CertifyError::BrokenLink { .. } => 13,
        CertifyError::Config(_) => 15,
        CertifyError::Io(e) => core_code(e),
    }
}

fn emit(v: &Value, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            write_json(p, v)?;
        }
        None => print!("{}", canonical_string(v)),
    }
    Ok(())
}

fn load(p: &Path) -> Result<Value, Failure> {
    Ok(read_json(p)?)
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Construct { system, n, out } => {
            let sys = system_from_json(&load(&system)?)?;
            let c = core_err!(construct_minimal_z_witness(&sys, n))?;
            let mut v = c.witness.to_json();
            v["N"] = json!(c.n);
            v["M"] = json!(c.m);
            emit(&v, out.as_deref())
        }
        Command::Verify { system, witness, blowup_bound } => {
            let sys = system_from_json(&load(&system)?)?;
            let w = core_err!(DadWitness::from_json(&sys, &load(&witness)?))?;
            let r = core_err!(verify_dad_witness(&sys, &w, blowup_bound))?;
            emit(&report_value(&r), None)?;
            core_err!(r.status())
        }
        Command::AsdimConstruct { space, r, out } => {
            let x = space_from_json(&load(&space)?)?;
            let w = core_err!(construct_grid_witness(&x, r))?;
            emit(&asdim_witness_to_json(&w), out.as_deref())
        }
        Command::AsdimVerify { space, witness } => {
            let x = space_from_json(&load(&space)?)?;
            let w = asdim_witness_from_json(&load(&witness)?)?;
            let r = core_err!(verify_asdim_witness(&x, &w))?;
            emit(&report_value(&r), None)?;
            core_err!(r.status())
        }
        Command::Bridge { space, witness, out } => {
            let x = space_from_json(&load(&space)?)?;
            let w = asdim_witness_from_json(&load(&witness)?)?;
            let (g, gw) = core_err!(bridge_to_groupoid(&x, &w))?;
            let r = core_err!(verify_bridge(&x, &w, &g, &gw))?;
            let v = json!({
                "groupoid": {"pair": x.len()},
                "witness": groupoid_witness_to_json(&gw),
                "report": report_value(&r),
            });
            emit(&v, out.as_deref())?;
            core_err!(r.status())
        }
        Command::Nerve { action, cover, e, d, n, out } => {
            let act = action_from_json(&load(&action)?)?;
            let cov = cover_from_json(&act, &load(&cover)?)?;
            let cr = core_err!(check_cover_conditions(&act, &cov, &e, d))?;
            let m = core_err!(map_from_cover(&act, &cov, &e, n))?;
            let v = json!({
                "cover": {
                    "multiplicity": cr.multiplicity,
                    "orbits": cr.orbits,
                    "stabilizer_orders": cr.stabilizer_orders,
                },
                "vertex_action": action_to_json(&m.vertex_action),
                "complex": complex_to_json(&m.complex),
                "map": map_to_json(&m.f),
                "n": m.depth,
                "d": m.d,
                "bound": m.bound.to_string(),
                "pou_defect": m.pou_defect.to_string(),
                "max_nonzero": m.max_nonzero,
                "equivariance": report_value(&m.equivariance),
            });
            emit(&v, out.as_deref())
        }
        Command::BlrCheck { action, nerve, e } => {
            let act = action_from_json(&load(&action)?)?;
            let nv = load(&nerve)?;
            let act_v = action_from_json(&nv["vertex_action"])?;
            let c = complex_from_json(&nv["complex"])?;
            let f = map_from_json(&nv["map"])?;
            let b = core_err!(dad_witness_from_blr(&act, &act_v, &c, &f, &e))?;
            let v = json!({
                "witness": groupoid_witness_to_json(&b.witness),
                "report": report_value(&b.report),
                "F": b.f_set,
                "within_F": b.within_f,
                "key_step": b.key_step,
            });
            emit(&v, None)?;
            core_err!(b.report.status())
        }
        Command::PouBuild { groupoid, witness, n, size_bound, out } => {
            let g = groupoid_from_json(&load(&groupoid)?)?;
            let w = groupoid_witness_from_json(&g, &load(&witness)?)?;
            let p = core_err!(pou_pipeline(&g, &w.k, &w.colors, n, size_bound))?;
            emit(&pou_to_json(&p), out.as_deref())
        }
        Command::PouVerify { groupoid, pou, epsilon } => {
            let g = groupoid_from_json(&load(&groupoid)?)?;
            let cert = pou_from_json(&load(&pou)?)?;
            let eps = core_err!(parse_q(&epsilon))?;
            let r = core_err!(verify_pou(&g, &cert.k, &cert.pou, &eps))?;
            emit(&report_value(&r), None)?;
            core_err!(r.status())
        }
        Command::Norm { groupoid, element } => {
            let g = groupoid_from_json(&load(&groupoid)?)?;
            let f = core_err!(ConvElement::from_pairs(&g, element_from_json(&load(&element)?)?))?;
            let mut v = report_value(&norm_report(&f));
            if g.is_free() {
                v["blocks"] = json!(core_err!(block_decompose(&g))?.structure());
            }
            emit(&v, None)
        }
        Command::Decompose { groupoid, pou, element } => {
            let g = groupoid_from_json(&load(&groupoid)?)?;
            let cert = pou_from_json(&load(&pou)?)?;
            let f = core_err!(ConvElement::from_pairs(&g, element_from_json(&load(&element)?)?))?;
            let r = core_err!(decompose_via_pou(&f, &cert.declared(&g)))?;
            emit(&report_value(&r), None)?;
            if r.accepted() {
                Ok(())
            } else {
                Err(Failure::Core(dadim_core::cstar::CstarError::BlockMismatch("decomposition bounds violated".into()).into()))
            }
        }
        Command::Pipeline { system, out, check, n, quotient_depth, pou_depth, epsilon } => {
            let chain = match (check, system, out) {
                (Some(dir), _, _) => verify_chain(&dir)?,
                (None, Some(system), Some(out)) => {
                    let params = PipelineParams { n, quotient_depth, pou_depth, epsilon: core_err!(parse_q(&epsilon))? };
                    let run = run_pipeline(&load(&system)?, &params)?;
                    run.write(&out)?;
                    run.chain
                }
                _ => return Err(CertifyError::Config("pipeline needs --system and --out, or --check".into()).into()),
            };
            let v = chain.to_json();
            if chain.green {
                emit(&v, None)
            } else {
                Err(Failure::NotGreen(v))
            }
        }
        Command::Corpus { dir, bless } => {
            let dir = dir.unwrap_or_else(corpus_dir);
            if bless {
                let written = corpus_bless(&dir)?;
                return emit(&json!({"blessed": written}), None);
            }
            let summary = corpus_check(&dir)?;
            let v = report_value(&summary);
            if summary.green() {
                emit(&v, None)
            } else {
                Err(Failure::CorpusDiff(v))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(core_code(&e))
        }
        Err(Failure::Chain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(certify_code(&e))
        }
        Err(Failure::CorpusDiff(v)) => {
            print!("{}", canonical_string(&v));
            eprintln!("error: corpus differs from golden files");
            ExitCode::from(14)
        }
        Err(Failure::NotGreen(v)) => {
            print!("{}", canonical_string(&v));
            eprintln!("error: chain is not green");
            ExitCode::from(16)
        }
    }
}
