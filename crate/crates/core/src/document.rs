//! JSON game documents: an objective game with one subjective model per player.

use std::io::{Read, Write};
use std::path::Path;

use crate::bundles::ExampleBundle;
use crate::error::{Error, Result};
use crate::format::round_json;
use crate::game::ensure_valid;
use crate::subjective::PlayerModel;

/// Parse and check a document: the game must validate and every model must fit its player.
pub fn read_document<R: Read>(reader: R) -> Result<ExampleBundle> {
    let doc: ExampleBundle = serde_json::from_reader(reader)?;
    check_document(&doc)?;
    Ok(doc)
}

pub fn check_document(doc: &ExampleBundle) -> Result<()> {
    ensure_valid(&doc.game)?;
    if doc.models.len() != doc.game.n_players() {
        return Err(Error::InvalidModel(format!(
            "{} models for {} players",
            doc.models.len(),
            doc.game.n_players()
        )));
    }
    for (i, m) in doc.models.iter().enumerate() {
        PlayerModel::new(&doc.game, m, i)?;
    }
    if let Some(a) = &doc.analogy {
        a.check(&doc.game)?;
    }
    Ok(())
}

pub fn load_document(path: &Path) -> Result<ExampleBundle> {
    read_document(std::fs::File::open(path)?)
}

/// Pretty JSON with numbers at 12 significant digits.
pub fn document_json(doc: &ExampleBundle) -> Result<String> {
    Ok(serde_json::to_string_pretty(&round_json(serde_json::to_value(doc)?))? + "\n")
}

pub fn write_document<W: Write>(doc: &ExampleBundle, mut out: W) -> Result<()> {
    out.write_all(document_json(doc)?.as_bytes())?;
    Ok(())
}

pub fn save_document(doc: &ExampleBundle, path: &Path) -> Result<()> {
    std::fs::write(path, document_json(doc)?)?;
    Ok(())
}
