//! `hsd preprocess`: raw CSV in, cleaned CSV out.

use std::path::Path;

use anyhow::Result;

use hsd_core::preprocess::{clean_dataset, CleanMode, CleanSummary};

use crate::io;

pub fn cmd_preprocess(input: &Path, mode: CleanMode, output: &Path) -> Result<CleanSummary> {
    let rows = io::read_tweets(input)?;
    let (cleaned, summary) = clean_dataset(&rows, mode);
    io::write_clean_csv(output, &cleaned)?;
    println!(
        "cleaned {} rows ({} emptied) -> {}",
        summary.total,
        summary.emptied,
        output.display()
    );
    Ok(summary)
}
