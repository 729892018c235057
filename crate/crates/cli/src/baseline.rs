//! `counterfact baseline`: extractive or abstractive summarization of each
//! record's evidence, as a comparison point for the counterfactual forms.


use anyhow::Context;
use serde::Serialize;

use counterfact::backends::Task;
use counterfact::baselines::{abstractive_explain, extractive_explain, BaselineMethod};
use counterfact::corpus::{load_corpus, sample_refuted, ClaimId, Verdict};

use crate::config::RunConfig;
use crate::explain::effective_jobs;
use crate::output::{write_header, Sink};
use crate::parallel::map_ordered;
use crate::{BaselineArgs, CmdResult, Failure};

/// One output line of `counterfact baseline`.
#[derive(Debug, Serialize)]
struct BaselineRecord {
    claim_id: ClaimId,
    claim: String,
    method: String,
    explanation: Option<String>,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn run(args: &BaselineArgs, config: &RunConfig, with_timestamp: bool) -> CmdResult {
    let method: BaselineMethod =
        args.method.parse().map_err(anyhow::Error::msg).context("invalid --method")?;
    let task = match method {
        BaselineMethod::Ext => Task::SummarizeExt,
        BaselineMethod::Abs => Task::SummarizeAbs,
    };
    let backends = config.backends(&[task])?;
    let jobs = effective_jobs(args.jobs, &backends, &[task]);

    let load = load_corpus(&args.fever, Some(Verdict::Refuted))
        .with_context(|| format!("cannot load {}", args.fever.display()))?;
    for err in &load.line_errors {
        eprintln!("{}:{}: {}", args.fever.display(), err.line, err.message);
    }

    let records = match config.sampling(args.sample, args.seed)? {
        None => load.records,
        Some((n, seed)) => sample_refuted(&load.records, n, seed)
            .map_err(|e| Failure::Config(anyhow::Error::new(e).context("cannot sample")))?,
    };

    let backend = backends.for_task(task).map_err(anyhow::Error::new)?;
    let mut outputs = map_ordered(&records, jobs, |record| {
        let result = match method {
            BaselineMethod::Ext => extractive_explain(&record.evidence_text, backend),
            BaselineMethod::Abs => abstractive_explain(&record.evidence_text, backend),
        };
        match result {
            Ok(explanation) => BaselineRecord {
                claim_id: record.claim_id.clone(),
                claim: record.claim.clone(),
                method: method.as_str().to_string(),
                explanation: Some(explanation.text),
                status: "ok".to_string(),
                error: None,
            },
            Err(e) => BaselineRecord {
                claim_id: record.claim_id.clone(),
                claim: record.claim.clone(),
                method: method.as_str().to_string(),
                explanation: None,
                status: "error".to_string(),
                error: Some(e.to_string()),
            },
        }
    });
    if jobs > 1 {
        outputs.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    }

    let failed = outputs.iter().filter(|r| r.status != "ok").count();

    let default_name = format!("baseline-{}.jsonl", method.as_str());
    let out_path = config.resolve_out(args.out.clone(), &default_name);
    let mut sink = Sink::open(out_path.as_deref())?;
    write_header(sink.writer(), with_timestamp)?;
    for record in &outputs {
        let line = serde_json::to_string(record).context("serializing baseline record")?;
        writeln!(sink.writer(), "{line}").context("writing baseline record")?;
    }
    sink.finish()?;

    eprintln!(
        "baseline ({}): {} record(s), {} ok, {} failed, {} line error(s)",
        method.as_str(),
        outputs.len(),
        outputs.len() - failed,
        failed,
        load.line_errors.len(),
    );

    let errors = failed + load.line_errors.len();
    if errors > 0 && !args.keep_going {
        return Err(Failure::Records { errors });
    }
    Ok(())
}
