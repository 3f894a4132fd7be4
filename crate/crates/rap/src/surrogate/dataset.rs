use super::raster::IMG_PIXELS;
use super::{Label, SurrogateError};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// One scored assembly operation in a dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub schema_version: u32,
    pub assembly: String,
    pub subassembly_mask: u64,
    pub s1_mask: u64,
    pub direction_rad: f64,
    pub score: f64,
    pub label: Label,
    pub image_index: usize,
}

/// Records plus the flat image buffer (`image_index * IMG_PIXELS` offsets).
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub records: Vec<DatasetRecord>,
    pub images: Vec<f32>,
}

impl Dataset {
    pub fn image(&self, index: usize) -> &[f32] {
        &self.images[index * IMG_PIXELS..(index + 1) * IMG_PIXELS]
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct assembly names, sorted.
    pub fn assembly_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.records.iter().map(|r| r.assembly.clone()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Writes `manifest.jsonl` (one record per line) and `images.bin`
/// (little-endian f32, one 2x64x64 block per record).
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<(), SurrogateError> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = std::io::BufWriter::new(std::fs::File::create(dir.join("manifest.jsonl"))?);
    for r in &dataset.records {
        serde_json::to_writer(&mut manifest, r)
            .map_err(|e| SurrogateError::CorruptFile(e.to_string()))?;
        manifest.write_all(b"\n")?;
    }
    manifest.flush()?;
    let mut bin = std::io::BufWriter::new(std::fs::File::create(dir.join("images.bin"))?);
    for v in &dataset.images {
        bin.write_all(&v.to_le_bytes())?;
    }
    bin.flush()?;
    Ok(())
}

pub fn read_dataset(dir: &Path) -> Result<Dataset, SurrogateError> {
    let manifest = std::fs::File::open(dir.join("manifest.jsonl"))?;
    let mut records = Vec::new();
    for line in std::io::BufReader::new(manifest).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str::<DatasetRecord>(&line)
                .map_err(|e| SurrogateError::CorruptFile(format!("manifest: {e}")))?,
        );
    }
    let bytes = std::fs::read(dir.join("images.bin"))?;
    if bytes.len() % 4 != 0 {
        return Err(SurrogateError::CorruptFile("images.bin length".into()));
    }
    let images: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    if images.len() % IMG_PIXELS != 0 {
        return Err(SurrogateError::CorruptFile(
            "images.bin is not a whole number of image pairs".into(),
        ));
    }
    let count = images.len() / IMG_PIXELS;
    for r in &records {
        if r.image_index >= count {
            return Err(SurrogateError::CorruptFile(format!(
                "record references image {} of {count}",
                r.image_index
            )));
        }
    }
    Ok(Dataset { records, images })
}
