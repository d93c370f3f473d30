//! `hsd fit-vocab`: fit a vocabulary on the text column of a (cleaned)
//! CSV and write it as TSV.

use std::path::Path;

use anyhow::Result;

use hsd_core::tokenize::fit_vocabulary;

use crate::io;

pub fn cmd_fit_vocab(input: &Path, max_words: usize, output: &Path) -> Result<usize> {
    let texts = io::read_texts(input)?;
    let vocab = fit_vocabulary(&texts, max_words)?;
    io::write_vocab(output, &vocab)?;
    println!(
        "vocabulary: {} words indexed (cap {max_words}) -> {}",
        vocab.len(),
        output.display()
    );
    Ok(vocab.len())
}
