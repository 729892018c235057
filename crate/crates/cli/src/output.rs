//! Output plumbing shared by all subcommands: stdout-or-file writers and the
//! suppressible generation header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// A line-oriented output sink.
pub enum Sink {
    Stdout(std::io::Stdout),
    File(BufWriter<File>),
}

impl Sink {
    /// Open `path`, creating parent directories, or fall back to stdout.
    pub fn open(path: Option<&Path>) -> Result<Sink> {
        match path {
            None => Ok(Sink::Stdout(std::io::stdout())),
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("cannot create {}", parent.display()))?;
                }
                let file =
                    File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
                Ok(Sink::File(BufWriter::new(file)))
            }
        }
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::Stdout(s) => s,
            Sink::File(f) => f,
        }
    }

    pub fn finish(self) -> Result<()> {
        match self {
            Sink::Stdout(mut s) => s.flush().context("flushing stdout"),
            Sink::File(mut f) => f.flush().context("flushing output file"),
        }
    }
}

/// The `#`-prefixed generation header. Corpus and record files treat `#`
/// lines as comments, so headed files re-ingest cleanly.
pub fn header_line() -> String {
    format!(
        "# generated {} by counterfact {}",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        env!("CARGO_PKG_VERSION")
    )
}

/// RFC 3339 timestamp for JSON report fields.
pub fn timestamp_field() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn write_header(out: &mut dyn Write, with_timestamp: bool) -> Result<()> {
    if with_timestamp {
        writeln!(out, "{}", header_line()).context("writing header")?;
    }
    Ok(())
}
