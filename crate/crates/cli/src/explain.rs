//! `counterfact explain`: run the counterfactual pipeline over every refuted
//! record and emit one explanation record per line.


use anyhow::Context;

use counterfact::backends::Task;
use counterfact::corpus::{load_corpus, sample_refuted, Verdict};
use counterfact::explain::Pipeline;

use crate::config::RunConfig;
use crate::output::{write_header, Sink};
use crate::parallel::map_ordered;
use crate::{CmdResult, ExplainArgs, Failure};

const REQUIRED_TASKS: [Task; 3] = [Task::Generate, Task::Nli, Task::Annotate];

/// Clamp the worker count to 1 when any routed backend refuses concurrent
/// use.
pub fn effective_jobs(
    jobs: usize,
    backends: &counterfact::BackendSet,
    tasks: &[Task],
) -> usize {
    let all_thread_safe = tasks.iter().all(|&t| {
        backends.for_task(t).map(|b| b.capabilities().thread_safe).unwrap_or(false)
    });
    if jobs > 1 && !all_thread_safe {
        eprintln!("note: a configured backend is not thread-safe; running with --jobs 1");
        return 1;
    }
    jobs.max(1)
}

pub fn run(args: &ExplainArgs, config: &RunConfig, with_timestamp: bool) -> CmdResult {
    let forms = config.forms(&args.forms)?;
    let backends = config.backends(&REQUIRED_TASKS)?;
    let jobs = effective_jobs(args.jobs, &backends, &REQUIRED_TASKS);
    let pipeline = Pipeline::new(backends).with_keyphrase(config.keyphrase.clone());

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

    let mut explained = map_ordered(&records, jobs, |record| {
        pipeline.explain_claim(record, &forms).to_record()
    });
    if jobs > 1 {
        explained.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    }

    let failed = explained.iter().filter(|r| r.status != "ok").count();

    let out_path = config.resolve_out(args.out.clone(), "explanations.jsonl");
    let mut sink = Sink::open(out_path.as_deref())?;
    write_header(sink.writer(), with_timestamp)?;
    for record in &explained {
        let line = serde_json::to_string(record).context("serializing explanation")?;
        writeln!(sink.writer(), "{line}").context("writing explanation")?;
    }
    sink.finish()?;

    eprintln!(
        "explain: {} record(s), {} ok, {} failed, {} line error(s)",
        explained.len(),
        explained.len() - failed,
        failed,
        load.line_errors.len(),
    );

    let errors = failed + load.line_errors.len();
    if errors > 0 && !args.keep_going {
        return Err(Failure::Records { errors });
    }
    Ok(())
}
