//! `counterfact stats`: JSON report over error annotations and/or survey
//! responses.

use std::collections::BTreeMap;

use anyhow::Context;
use serde::Serialize;

use counterfact::evaluate::{
    average_rankings, chi_square_gof, load_annotations, load_survey, selection_crosstab,
    Crosstab, ErrorTally, GofResult, GroupBy,
};

use crate::config::RunConfig;
use crate::output::{timestamp_field, write_header, Sink};
use crate::{CmdResult, StatsArgs};

#[derive(Debug, Serialize)]
struct StatsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<ErrorTally>,
    #[serde(skip_serializing_if = "Option::is_none")]
    survey: Option<SurveyReport>,
}

#[derive(Debug, Serialize)]
struct SurveyReport {
    /// Responses analyzed (after dropping best==worst rows).
    responses: usize,
    /// Rows dropped because best and worst named the same option.
    excluded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    average_rankings: Option<BTreeMap<String, f64>>,
    crosstabs: Vec<CrosstabReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct CrosstabReport {
    group_by: GroupBy,
    groups: Vec<GroupReport>,
}

#[derive(Debug, Serialize)]
struct GroupReport {
    group: String,
    total: usize,
    counts: BTreeMap<String, usize>,
    proportions: BTreeMap<String, f64>,
    /// Uniformity test over the best-pick counts; absent for degenerate
    /// groups (fewer than two options).
    #[serde(skip_serializing_if = "Option::is_none")]
    goodness_of_fit: Option<GofResult>,
}

fn with_gof(crosstab: Crosstab) -> CrosstabReport {
    let groups = crosstab
        .groups
        .into_iter()
        .map(|g| {
            let observed: Vec<u64> = g.counts.values().map(|&c| c as u64).collect();
            let goodness_of_fit = chi_square_gof(&observed).ok();
            GroupReport {
                group: g.group,
                total: g.total,
                counts: g.counts,
                proportions: g.proportions,
                goodness_of_fit,
            }
        })
        .collect();
    CrosstabReport { group_by: crosstab.group_by, groups }
}

pub fn run(args: &StatsArgs, config: &RunConfig, with_timestamp: bool) -> CmdResult {
    let groupings: Vec<GroupBy> = if args.group_by.is_empty() {
        vec![GroupBy::Overall, GroupBy::Familiarity, GroupBy::Perceived]
    } else {
        args.group_by
            .iter()
            .map(|raw| raw.parse::<GroupBy>().map_err(anyhow::Error::msg))
            .collect::<Result<_, _>>()
            .context("invalid --group-by")?
    };

    let errors = args
        .annotations
        .as_deref()
        .map(|path| -> Result<ErrorTally, anyhow::Error> {
            let annotations = load_annotations(path)
                .with_context(|| format!("cannot load {}", path.display()))?;
            counterfact::evaluate::tally_errors(&annotations)
                .with_context(|| format!("cannot tally {}", path.display()))
        })
        .transpose()?;

    let survey = args
        .survey
        .as_deref()
        .map(|path| -> Result<SurveyReport, anyhow::Error> {
            let load =
                load_survey(path).with_context(|| format!("cannot load {}", path.display()))?;
            let mut warnings = Vec::new();
            let average = match average_rankings(&load.responses) {
                Ok(means) => Some(means),
                Err(e) => {
                    warnings.push(format!("average rankings unavailable: {e}"));
                    None
                }
            };
            let crosstabs = groupings
                .iter()
                .map(|&g| with_gof(selection_crosstab(&load.responses, g)))
                .collect();
            Ok(SurveyReport {
                responses: load.responses.len(),
                excluded: load.excluded,
                average_rankings: average,
                crosstabs,
                warnings,
            })
        })
        .transpose()?;

    let report = StatsReport {
        generated_at: with_timestamp.then(timestamp_field),
        errors,
        survey,
    };

    let out_path = config.resolve_out(args.out.clone(), "stats.json");
    let mut sink = Sink::open(out_path.as_deref())?;
    // The report is a single JSON document; the timestamp lives inside it,
    // so no `#` header is prepended.
    write_header(sink.writer(), false)?;
    let text = serde_json::to_string_pretty(&report).context("serializing report")?;
    writeln!(sink.writer(), "{text}").context("writing report")?;
    sink.finish()?;
    Ok(())
}
