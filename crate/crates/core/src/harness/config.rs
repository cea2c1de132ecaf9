use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DEFAULT_CONSECUTIVE, DEFAULT_SYNC_THRESHOLD};
use crate::embedding::EmbeddingConfig;
use crate::encoder::{EncoderConfig, MapVariant};
use crate::readout::DEFAULT_RIDGE;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Sync,
    Lle,
    Effdim,
    Transient,
    Handwriting,
    MlmSweep,
    ImportCheck,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Sync => "sync",
            ExperimentKind::Lle => "lle",
            ExperimentKind::Effdim => "effdim",
            ExperimentKind::Transient => "transient",
            ExperimentKind::Handwriting => "handwriting",
            ExperimentKind::MlmSweep => "mlm-sweep",
            ExperimentKind::ImportCheck => "import-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderSection {
    pub hidden_dim: usize,
    /// Defaults to 64-wide heads.
    pub num_heads: Option<usize>,
    /// Defaults to `4 · hidden_dim`.
    pub intermediate_dim: Option<usize>,
    pub variant: MapVariant,
    pub layernorm_epsilon: f64,
}

impl Default for EncoderSection {
    fn default() -> Self {
        Self {
            hidden_dim: 64,
            num_heads: None,
            intermediate_dim: None,
            variant: MapVariant::StandardAlbert,
            layernorm_epsilon: 1e-12,
        }
    }
}

impl EncoderSection {
    pub fn to_config(&self) -> Result<EncoderConfig> {
        let heads = self.num_heads.unwrap_or((self.hidden_dim / 64).max(1));
        let mut c = EncoderConfig::new(self.hidden_dim, heads)?.with_variant(self.variant);
        if let Some(i) = self.intermediate_dim {
            c.intermediate_dim = i;
        }
        c.layernorm_epsilon = self.layernorm_epsilon;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSection {
    /// Defaults to the hidden width.
    pub embedding_dim: Option<usize>,
    /// Defaults to `n_tokens`.
    pub max_positions: Option<usize>,
    pub use_positional: bool,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        Self {
            embedding_dim: None,
            max_positions: None,
            use_positional: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// Plain text, one sentence per line.
    pub path: Option<PathBuf>,
    /// Whitespace-separated token ids, one sentence per line.
    pub pretokenized: Option<PathBuf>,
    /// Integer class per line, aligned with the corpus lines (handwriting only).
    pub labels: Option<PathBuf>,
    pub max_vocab: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    /// Weights file; random initialisation when absent.
    pub container: Option<PathBuf>,
    /// Draw fresh random parameters for every ensemble member.
    pub per_member: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LleSection {
    pub k: f64,
    pub tau: usize,
    pub horizon: usize,
}

impl Default for LleSection {
    fn default() -> Self {
        Self {
            k: 1.0,
            tau: 10,
            horizon: 5_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyncSection {
    pub threshold: f64,
}

impl Default for SyncSection {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_SYNC_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransientSection {
    pub consecutive: usize,
    pub pca_components: usize,
}

impl Default for TransientSection {
    fn default() -> Self {
        Self {
            consecutive: DEFAULT_CONSECUTIVE,
            pca_components: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandwritingSection {
    pub t0s: Vec<usize>,
    pub delta_ts: Vec<usize>,
    pub ridge: f64,
    pub eval_fraction: f64,
    /// Polylines for class 0 and class 1; the built-in U and S when absent.
    pub letters: Option<[PathBuf; 2]>,
    /// Also score a grid fitted on permuted labels.
    pub shuffled_control: bool,
}

impl Default for HandwritingSection {
    fn default() -> Self {
        Self {
            t0s: vec![0, 10, 20, 50, 100],
            delta_ts: vec![10, 20, 40],
            ridge: DEFAULT_RIDGE,
            eval_fraction: 0.2,
            letters: None,
            shuffled_control: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlmSection {
    pub times: Vec<usize>,
    pub eval_fraction: f64,
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
}

impl Default for MlmSection {
    fn default() -> Self {
        Self {
            times: vec![0, 1, 2, 4, 8, 16, 32],
            eval_fraction: 0.2,
            l2: 1e-4,
            epochs: 200,
            step: 0.1,
        }
    }
}

/// Everything one run needs. Relative paths are resolved against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_sentences")]
    pub n_sentences: usize,
    #[serde(default = "default_n_tokens")]
    pub n_tokens: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Recording stride for trajectories and series.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Write every member's recorded trajectory as a weights-style container.
    #[serde(default)]
    pub dump_states: bool,
    #[serde(default)]
    pub encoder: EncoderSection,
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub corpus: CorpusSection,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub lle: LleSection,
    #[serde(default)]
    pub sync: SyncSection,
    #[serde(default)]
    pub transient: TransientSection,
    #[serde(default)]
    pub handwriting: HandwritingSection,
    #[serde(default)]
    pub mlm: MlmSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_n_sentences() -> usize {
    100
}
fn default_n_tokens() -> usize {
    32
}
fn default_steps() -> usize {
    5_000
}
fn default_stride() -> usize {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        toml::from_str(&format!("kind = \"{}\"", kind.as_str())).expect("defaults parse")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = Self::from_toml(&text)?;
        c.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(c)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn encoder_config(&self) -> Result<EncoderConfig> {
        self.encoder.to_config()
    }

    pub fn embedding_config(&self, vocab_size: usize) -> EmbeddingConfig {
        EmbeddingConfig {
            vocab_size,
            embedding_dim: self.embedding.embedding_dim.unwrap_or(self.encoder.hidden_dim),
            hidden_dim: self.encoder.hidden_dim,
            max_positions: self.embedding.max_positions.unwrap_or(self.n_tokens),
            use_positional: self.embedding.use_positional,
        }
    }

    fn input_files(&self) -> Vec<PathBuf> {
        let mut files: Vec<PathBuf> = [&self.corpus.path, &self.corpus.pretokenized, &self.corpus.labels, &self.params.container]
            .into_iter()
            .flatten()
            .cloned()
            .collect();
        if let Some(letters) = &self.handwriting.letters {
            files.extend(letters.iter().cloned());
        }
        files
    }

    /// Range checks and existence of every referenced input file.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.n_sentences == 0 {
            return bad("n_sentences must be at least 1");
        }
        if self.n_tokens == 0 {
            return bad("n_tokens must be at least 1");
        }
        if self.stride == 0 {
            return bad("stride must be at least 1");
        }
        if self.corpus.path.is_some() && self.corpus.pretokenized.is_some() {
            return bad("set at most one of corpus.path and corpus.pretokenized");
        }
        if !(self.sync.threshold > 0.0) {
            return bad("sync.threshold must be > 0");
        }
        if !(self.lle.k > 0.0 && self.lle.k.is_finite()) || self.lle.tau == 0 {
            return bad("lle.k must be finite and > 0 and lle.tau at least 1");
        }
        if self.transient.consecutive == 0 {
            return bad("transient.consecutive must be at least 1");
        }
        for (name, f) in [("handwriting", self.handwriting.eval_fraction), ("mlm", self.mlm.eval_fraction)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!("{name}.eval_fraction must lie in (0, 1)")));
            }
        }
        if self.handwriting.ridge < 0.0 {
            return bad("handwriting.ridge must be >= 0");
        }
        if self.kind == ExperimentKind::ImportCheck && self.params.container.is_none() {
            return bad("import-check needs params.container");
        }
        if self.params.container.is_some() && self.params.per_member {
            return bad("params.per_member applies to random initialisation only");
        }
        if self.params.container.is_none() {
            self.encoder_config()?;
        }
        for f in self.input_files() {
            let p = self.resolve(&f);
            if !p.is_file() {
                return Err(Error::io(p, std::io::Error::from(std::io::ErrorKind::NotFound)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_toml("kind = \"sync\"").unwrap();
        assert_eq!(c.n_tokens, 32);
        assert_eq!(c.sync.threshold, 1e-5);
        assert_eq!(c.encoder.hidden_dim, 64);
        assert_eq!(c.lle.tau, 10);
        c.validate().unwrap();
    }

    #[test]
    fn dotted_sections_parse() {
        let c = ExperimentConfig::from_toml(
            "kind = \"mlm-sweep\"\nencoder.hidden_dim = 32\nencoder.variant = \"paper_literal\"\n\
             [mlm]\ntimes = [0, 3]\n",
        )
        .unwrap();
        assert_eq!(c.kind, ExperimentKind::MlmSweep);
        assert_eq!(c.encoder.variant, MapVariant::PaperLiteral);
        assert_eq!(c.encoder_config().unwrap().num_heads, 1);
        assert_eq!(c.mlm.times, vec![0, 3]);
    }

    #[test]
    fn echo_reparses_identically() {
        let mut c = ExperimentConfig::new(ExperimentKind::Handwriting);
        c.seed = 9;
        c.handwriting.letters = Some([PathBuf::from("u.txt"), PathBuf::from("s.txt")]);
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(ExperimentConfig::from_toml("kind = \"nope\""), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_toml("kind = \"sync\"\nbogus = 1").is_err());
        let mut c = ExperimentConfig::new(ExperimentKind::Sync);
        c.n_sentences = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::new(ExperimentKind::Sync);
        c.corpus.path = Some(PathBuf::from("/definitely/not/here.txt"));
        assert!(matches!(c.validate(), Err(Error::Io { .. })));
        assert!(ExperimentConfig::new(ExperimentKind::ImportCheck).validate().is_err());
    }
}
