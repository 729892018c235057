//! `counterfact ingest`: read a FEVER-style claims file, filter, optionally
//! sample, and emit the canonical JSONL corpus.

use anyhow::Context;

use counterfact::corpus::{load_corpus, sample_refuted, write_corpus, Verdict};

use crate::config::RunConfig;
use crate::output::{write_header, Sink};
use crate::{CmdResult, Failure, IngestArgs};

pub fn run(args: &IngestArgs, config: &RunConfig, with_timestamp: bool) -> CmdResult {
    let label = args
        .label
        .as_deref()
        .map(|raw| raw.parse::<Verdict>().map_err(anyhow::Error::msg))
        .transpose()
        .context("invalid --label")?;

    let load = load_corpus(&args.fever, label)
        .with_context(|| format!("cannot load {}", args.fever.display()))?;
    for err in &load.line_errors {
        eprintln!("{}:{}: {}", args.fever.display(), err.line, err.message);
    }

    let records = match config.sampling(args.sample, args.seed)? {
        None => load.records,
        Some((n, seed)) => sample_refuted(&load.records, n, seed)
            .map_err(|e| Failure::Config(anyhow::Error::new(e).context("cannot sample")))?,
    };

    let out_path = config.resolve_out(args.out.clone(), "corpus.jsonl");
    let mut sink = Sink::open(out_path.as_deref())?;
    write_header(sink.writer(), with_timestamp)?;
    let mut buf = Vec::new();
    write_corpus(&mut buf, &records).context("serializing corpus")?;
    sink.writer().write_all(&buf).context("writing corpus")?;
    sink.finish()?;

    eprintln!(
        "ingest: read {} line(s), kept {} record(s) ({} refuted), dropped {} incomplete, {} line error(s)",
        load.stats.total_read,
        records.len(),
        load.stats.refuted,
        load.stats.dropped_incomplete,
        load.line_errors.len(),
    );

    if !load.line_errors.is_empty() && !args.keep_going {
        return Err(Failure::Records { errors: load.line_errors.len() });
    }
    Ok(())
}
