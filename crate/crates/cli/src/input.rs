use std::fs;
use std::path::Path;

use qam_core::{Dataset, GivenContext};
use sha2::{Digest, Sha256};

use crate::Failure;

/// A parsed dataset file together with the digest of its raw bytes.
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub sha256: String,
}

pub fn load_dataset(path: &Path) -> Result<LoadedDataset, Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Input(format!("{} is not valid UTF-8", path.display())))?;
    let dataset = Dataset::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(LoadedDataset {
        dataset,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// `--given` tokens or `--given-file`; exactly one is enforced by clap.
pub fn load_given(tokens: Option<&str>, file: Option<&Path>) -> Result<GivenContext, Failure> {
    let text = match (tokens, file) {
        (Some(t), _) => t.to_owned(),
        (None, Some(p)) => fs::read_to_string(p)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", p.display())))?,
        (None, None) => return Err(Failure::Usage("a given context is required".into())),
    };
    GivenContext::parse(&text).map_err(|e| Failure::Input(format!("given context: {e}")))
}
