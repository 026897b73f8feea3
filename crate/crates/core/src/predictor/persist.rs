//! Plain-text model files.
//!
//! ```text
//! crowdsched-model v1
//! layers 4 32 16 8 4 2 1
//! prize MP
//! min <4 values>
//! max <4 values>
//! meta <epochs> <validation loss>
//! w <row-major weights of layer 0>
//! b <biases of layer 0>
//! ...
//! ```
//!
//! Floats are written with 17 significant digits so a load reproduces the
//! saved model exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::network::{Layer, Network};
use super::{FeatureScaler, PredictorModel, PrizeFeature, FEATURE_COUNT};

pub const MODEL_HEADER: &str = "crowdsched-model v1";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("unsupported model format {found:?} (expected {MODEL_HEADER:?})")]
    Version { found: String },
    #[error("malformed model file, line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn fmt_all(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(" ")
}

pub fn write_model<W: Write>(model: &PredictorModel, mut out: W) -> io::Result<()> {
    let widths = model.network.widths();
    writeln!(out, "{MODEL_HEADER}")?;
    writeln!(out, "layers {}", widths.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))?;
    writeln!(out, "prize {}", model.prize_feature.as_str())?;
    writeln!(out, "min {}", fmt_all(&model.scaler.min))?;
    writeln!(out, "max {}", fmt_all(&model.scaler.max))?;
    writeln!(out, "meta {} {:.16e}", model.epochs, model.validation_loss)?;
    for layer in &model.network.layers {
        writeln!(out, "w {}", fmt_all(&layer.weights))?;
        writeln!(out, "b {}", fmt_all(&layer.biases))?;
    }
    out.flush()
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn malformed(&self, message: impl Into<String>) -> ModelFileError {
        ModelFileError::Malformed { line: self.line, message: message.into() }
    }

    fn next_raw(&mut self) -> Result<String, ModelFileError> {
        loop {
            self.line += 1;
            match self.inner.next() {
                None => return Err(self.malformed("unexpected end of file")),
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        return Ok(line);
                    }
                }
            }
        }
    }

    /// Next line, which must start with `key`; returns the remaining fields.
    fn record(&mut self, key: &str) -> Result<Vec<String>, ModelFileError> {
        let line = self.next_raw()?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(key) {
            return Err(self.malformed(format!("expected a {key:?} record")));
        }
        Ok(fields.map(str::to_owned).collect())
    }

    fn floats(&mut self, key: &str, expected: usize) -> Result<Vec<f64>, ModelFileError> {
        let fields = self.record(key)?;
        if fields.len() != expected {
            return Err(self.malformed(format!("{key}: expected {expected} values, found {}", fields.len())));
        }
        fields
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| self.malformed(format!("{key}: bad number {f:?}"))))
            .collect()
    }
}

pub fn read_model<R: Read>(input: R) -> Result<PredictorModel, ModelFileError> {
    let mut lines = Lines { inner: BufReader::new(input).lines(), line: 0 };
    let header = lines.next_raw()?;
    if header.trim() != MODEL_HEADER {
        return Err(ModelFileError::Version { found: header.trim().to_owned() });
    }

    let widths = lines
        .record("layers")?
        .iter()
        .map(|w| w.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| lines.malformed("layers: bad width"))?;
    if widths.len() < 2 || widths[0] != FEATURE_COUNT || widths[widths.len() - 1] != 1 || widths.contains(&0) {
        return Err(lines.malformed(format!("layers: unusable widths {widths:?}")));
    }

    let prize = lines.record("prize")?;
    let prize_feature: PrizeFeature = match prize.as_slice() {
        [p] => p.parse().map_err(|e: String| lines.malformed(e))?,
        _ => return Err(lines.malformed("prize: expected one value")),
    };

    let to_arr = |v: Vec<f64>| -> [f64; FEATURE_COUNT] { v.try_into().expect("length checked") };
    let min = to_arr(lines.floats("min", FEATURE_COUNT)?);
    let max = to_arr(lines.floats("max", FEATURE_COUNT)?);

    let meta = lines.record("meta")?;
    let (epochs, validation_loss) = match meta.as_slice() {
        [e, l] => (
            e.parse::<usize>().map_err(|_| lines.malformed("meta: bad epoch count"))?,
            l.parse::<f64>().map_err(|_| lines.malformed("meta: bad loss"))?,
        ),
        _ => return Err(lines.malformed("meta: expected two values")),
    };

    let mut layers = Vec::with_capacity(widths.len() - 1);
    for w in widths.windows(2) {
        let weights = lines.floats("w", w[0] * w[1])?;
        let biases = lines.floats("b", w[1])?;
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(lines.malformed("non-finite parameter"));
        }
        layers.push(Layer { inputs: w[0], outputs: w[1], weights, biases });
    }

    Ok(PredictorModel {
        network: Network { layers },
        scaler: FeatureScaler { min, max },
        prize_feature,
        epochs,
        validation_loss,
    })
}

pub fn save_model(model: &PredictorModel, path: impl AsRef<Path>) -> io::Result<()> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<PredictorModel, ModelFileError> {
    read_model(File::open(path)?)
}
