//! File formats, the certificate chain and the regression corpus.

pub mod corpus;
pub mod formats;
pub mod pipeline;

pub use corpus::{corpus_bless, corpus_check, corpus_dir, CaseResult, CorpusSummary, CORPUS_ENV};
pub use pipeline::{run_pipeline, verify_chain, CertificateChain, PipelineParams, PipelineRun, StageRecord, STAGE_KINDS};

use thiserror::Error;

use crate::error::Error;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("stage {stage} ({kind}): {source}")]
    Stage { stage: usize, kind: &'static str, source: Box<Error> },
    #[error("stage {stage}: {file} has sha256 {found}, chain records {expected}")]
    HashMismatch { stage: usize, file: String, expected: String, found: String },
    #[error("stage {stage}: input hash does not match the previous stage")]
    BrokenLink { stage: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(Error),
}
