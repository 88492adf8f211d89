use std::io::{Read, Write};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::closedform::{classify, SpectrumCase};
use crate::error::Result;
use crate::oracle::OracleSpec;

/// Header line carried by every CSV this crate writes.
pub const CSV_SCHEMA_LINE: &str = "# schema=1";

/// Values this close to zero are reported as exactly zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ClosedForm,
    Simulated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::ClosedForm => "closed-form",
            Source::Simulated => "simulated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct TableEntry {
    pub y: u64,
    pub pr: f64,
    pub case: SpectrumCase,
    pub source: Source,
}

impl Serialize for TableEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pr = RawValue::from_string(format_probability(self.pr)).map_err(serde::ser::Error::custom)?;
        let mut entry = serializer.serialize_struct("TableEntry", 4)?;
        entry.serialize_field("y", &self.y)?;
        entry.serialize_field("pr", &pr)?;
        entry.serialize_field("case", &self.case)?;
        entry.serialize_field("source", &self.source)?;
        entry.end()
    }
}

/// Per-`y` measurement probabilities with their spectrum case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    n: u64,
    entries: Vec<TableEntry>,
}

impl ProbabilityTable {
    /// Builds a table from raw probabilities, clamping near-zero values.
    pub fn from_probabilities(spec: &OracleSpec, probs: &[f64], source: Source) -> Self {
        assert_eq!(probs.len() as u64, spec.n(), "one probability per label");
        let entries = probs
            .iter()
            .enumerate()
            .map(|(y, &pr)| {
                let y = y as u64;
                TableEntry {
                    y,
                    pr: if pr < CLAMP_TOLERANCE { 0.0 } else { pr },
                    case: classify(y, spec),
                    source,
                }
            })
            .collect();
        Self { n: spec.n(), entries }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn pr(&self, y: u64) -> f64 {
        self.entries[y as usize].pr
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.pr).collect()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.pr).sum()
    }

    /// Sum of probabilities over a set of labels.
    pub fn mass_of(&self, labels: &[u64]) -> f64 {
        labels.iter().map(|&y| self.pr(y)).sum()
    }

    /// Largest pointwise absolute difference between two tables.
    pub fn max_abs_deviation(&self, other: &ProbabilityTable) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.pr - b.pr).abs())
            .fold(0.0, f64::max)
    }

    /// `# schema=1`, then columns `y,pr,case,source`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_SCHEMA_LINE}")?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["y", "pr", "case", "source"])?;
        for entry in &self.entries {
            writer.write_record([
                entry.y.to_string(),
                format_probability(entry.pr),
                entry.case.as_str().to_string(),
                entry.source.as_str().to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let entries = reader
            .deserialize()
            .collect::<std::result::Result<Vec<TableEntry>, _>>()?;
        Ok(Self {
            n: entries.len() as u64,
            entries,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Seventeen significant digits in scientific notation; parses back to the
/// identical `f64`.
pub fn format_probability(x: f64) -> String {
    format!("{x:.16e}")
}

/// Draws one `y` from the table, deterministically for a given seed.
pub fn sample(table: &ProbabilityTable, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = WeightedIndex::new(table.entries.iter().map(|e| e.pr))
        .expect("table has positive mass");
    index.sample(&mut rng) as u64
}
