//! Experiment configuration: a flat TOML table.
//!
//! ```toml
//! ensemble = "ra"          # iid | linear | coset | ra | protograph
//! n = [768, 1536, 3072]    # one length or a list
//! rate = 0.3333            # one rate or a list
//! attack = "average"       # average | marking | xor3
//! t = 2
//! decoder = "modified_bp"  # md_erasure | syndrome | md_hamming | likelihood | modified_bp | bp_bsc
//! n_max = 2
//! trials = 100
//! seed = 1
//! ```
//!
//! Optional keys: `users` (i.i.d. codebook size, overrides `rate`), `l`
//! (parity checks of linear and coset codes), `q` (RA repetition),
//! `protograph` (builtin name or file path), `lift`, `guess_rule`
//! (`isolated` | `first_erased`), `max_iters`, `crossover`, `codebook_cap`,
//! `fixed_codebook`.

use std::path::Path;

use num_bigint::BigUint;
use serde::Deserialize;

use crate::attacks::AttackKind;
use crate::decoders::{DecoderKind, GuessRule};
use crate::ensembles::{EnsembleKind, ProtographSpec, DEFAULT_CODEBOOK_CAP};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(vs) => vs.clone(),
        }
    }
}

fn default_t() -> usize {
    2
}
fn default_n_max() -> usize {
    2
}
fn default_max_iters() -> usize {
    60
}
fn default_crossover() -> f64 {
    0.25
}
fn default_cap() -> u64 {
    DEFAULT_CODEBOOK_CAP
}
fn default_guess_rule() -> GuessRule {
    GuessRule::Isolated
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleKind,
    pub n: OneOrMany<usize>,
    #[serde(default)]
    pub rate: Option<OneOrMany<f64>>,
    #[serde(default)]
    pub users: Option<u64>,
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default)]
    pub protograph: Option<String>,
    #[serde(default)]
    pub lift: Option<usize>,
    pub attack: AttackKind,
    #[serde(default = "default_t")]
    pub t: usize,
    pub decoder: DecoderKind,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_guess_rule")]
    pub guess_rule: GuessRule,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_crossover")]
    pub crossover: f64,
    pub trials: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_cap")]
    pub codebook_cap: u64,
    #[serde(default)]
    pub fixed_codebook: bool,
}

/// Code parameters of one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub enum CodeParams {
    Iid { users: u64 },
    Linear { l: usize },
    Coset { l: usize },
    Ra { q: usize },
    Protograph { spec: ProtographSpec, lift: usize },
}

/// One fully resolved and validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPoint {
    pub code: CodeParams,
    pub n: usize,
    /// Nominal rate `log2(M)/n` (design rate for protographs).
    pub rate: f64,
    pub attack: AttackKind,
    pub t: usize,
    pub decoder: DecoderKind,
    pub n_max: usize,
    pub guess_rule: GuessRule,
    pub max_iters: usize,
    pub crossover: f64,
    pub trials: u64,
    pub seed: u64,
    pub codebook_cap: u64,
    pub fixed_codebook: bool,
}

impl ExperimentPoint {
    pub fn ensemble(&self) -> EnsembleKind {
        match self.code {
            CodeParams::Iid { .. } => EnsembleKind::Iid,
            CodeParams::Linear { .. } => EnsembleKind::Linear,
            CodeParams::Coset { .. } => EnsembleKind::Coset,
            CodeParams::Ra { .. } => EnsembleKind::Ra,
            CodeParams::Protograph { .. } => EnsembleKind::Protograph,
        }
    }

    /// Upper bound on `M` (exact unless a lifted parity-check matrix turns
    /// out rank deficient).
    pub fn nominal_users(&self) -> BigUint {
        let one = BigUint::from(1u8);
        match &self.code {
            CodeParams::Iid { users } => BigUint::from(*users),
            CodeParams::Linear { l } | CodeParams::Coset { l } => one << (self.n - l),
            CodeParams::Ra { q } => one << (self.n / q),
            CodeParams::Protograph { spec, lift } => one << ((spec.cols() - spec.rows()) * lift),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Expands the `n × rate` sweep into validated points sorted by
    /// `(n, rate)`. `seed` overrides the configured master seed.
    pub fn points(&self, seed: Option<u64>) -> Result<Vec<ExperimentPoint>> {
        let seed = seed.or(self.seed).unwrap_or(0);
        let rates: Vec<Option<f64>> = match &self.rate {
            Some(r) => r.to_vec().into_iter().map(Some).collect(),
            None => vec![None],
        };
        let mut points = Vec::new();
        for n in self.n.to_vec() {
            for &rate in &rates {
                points.push(self.resolve(n, rate, seed)?);
            }
        }
        points.sort_by(|a, b| a.n.cmp(&b.n).then(a.rate.total_cmp(&b.rate)));
        Ok(points)
    }

    fn resolve(&self, n: usize, rate: Option<f64>, seed: u64) -> Result<ExperimentPoint> {
        if n == 0 {
            return Err(config_err("n must be positive"));
        }
        if let Some(r) = rate {
            if !(r > 0.0 && r <= 1.0) {
                return Err(config_err(format!("rate must lie in (0, 1], got {r}")));
            }
        }
        let need_rate = || rate.ok_or_else(|| config_err(format!("{} needs `rate`", self.ensemble.name())));
        let (code, nominal_rate) = match self.ensemble {
            EnsembleKind::Iid => {
                let users = match self.users {
                    Some(u) => u,
                    None => {
                        let bits = (need_rate()? * n as f64).round();
                        if bits >= 63.0 {
                            return Err(config_err("i.i.d. codebooks are limited to 2^62 users"));
                        }
                        1u64 << bits as u32
                    }
                };
                if users < 2 {
                    return Err(config_err("an i.i.d. codebook needs at least two users"));
                }
                (CodeParams::Iid { users }, (users as f64).log2() / n as f64)
            }
            EnsembleKind::Linear | EnsembleKind::Coset => {
                let l = match self.l {
                    Some(l) => l,
                    None => n - ((need_rate()? * n as f64).round() as usize).min(n),
                };
                if l == 0 || l >= n {
                    return Err(config_err(format!("need 0 < l < n, got l={l}, n={n}")));
                }
                let code = if self.ensemble == EnsembleKind::Linear {
                    CodeParams::Linear { l }
                } else {
                    CodeParams::Coset { l }
                };
                (code, (n - l) as f64 / n as f64)
            }
            EnsembleKind::Ra => {
                let q = match self.q {
                    Some(q) => q,
                    None => (1.0 / need_rate()?).round() as usize,
                };
                if q == 0 || !n.is_multiple_of(q) {
                    return Err(config_err(format!("RA length {n} is not a multiple of q={q}")));
                }
                (CodeParams::Ra { q }, 1.0 / q as f64)
            }
            EnsembleKind::Protograph => {
                let name = self
                    .protograph
                    .as_deref()
                    .ok_or_else(|| config_err("protograph ensemble needs `protograph`"))?;
                let spec = match ProtographSpec::builtin(name) {
                    Some(spec) => spec,
                    None => std::fs::read_to_string(name)
                        .map_err(|e| config_err(format!("cannot read protograph {name}: {e}")))?
                        .parse()?,
                };
                let cols = spec.transmitted_cols();
                let lift = match self.lift {
                    Some(l) => l,
                    None if n.is_multiple_of(cols) => n / cols,
                    None => {
                        return Err(config_err(format!(
                            "n={n} is not a multiple of the {cols} transmitted protograph columns"
                        )))
                    }
                };
                if lift * cols != n {
                    return Err(config_err(format!("lift {lift} gives n={}, not {n}", lift * cols)));
                }
                let r = spec.design_rate();
                (CodeParams::Protograph { spec, lift }, r)
            }
        };
        let point = ExperimentPoint {
            code,
            n,
            rate: nominal_rate,
            attack: self.attack,
            t: self.t,
            decoder: self.decoder,
            n_max: self.n_max,
            guess_rule: self.guess_rule,
            max_iters: self.max_iters,
            crossover: self.crossover,
            trials: self.trials,
            seed,
            codebook_cap: self.codebook_cap,
            fixed_codebook: self.fixed_codebook,
        };
        point.validate()?;
        Ok(point)
    }
}

impl ExperimentPoint {
    /// Rejects combinations that cannot run, before any trial starts.
    pub fn validate(&self) -> Result<()> {
        if self.t < 2 {
            return Err(config_err("t must be at least 2"));
        }
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if self.nominal_users() < BigUint::from(self.t) {
            return Err(config_err("fewer users than pirates"));
        }
        match self.attack {
            AttackKind::Marking if self.t != 2 => {
                return Err(config_err("the marking attack is defined for t = 2"));
            }
            AttackKind::Xor3 if self.t < 3 => return Err(config_err("the xor3 attack needs t ≥ 3")),
            _ => {}
        }
        if self.decoder.needs_averaged() != (self.attack == AttackKind::Average) {
            return Err(config_err(format!(
                "decoder {} cannot read the output of the {} attack",
                self.decoder.name(),
                self.attack.name()
            )));
        }
        let ensemble = self.ensemble();
        match self.decoder {
            DecoderKind::Syndrome => {
                if !matches!(ensemble, EnsembleKind::Linear | EnsembleKind::Coset) {
                    return Err(config_err("the syndrome decoder needs a linear or coset code"));
                }
                if self.t != 2 {
                    return Err(config_err("the syndrome decoder handles two pirates"));
                }
            }
            DecoderKind::ModifiedBp | DecoderKind::BpBsc
                if !matches!(ensemble, EnsembleKind::Ra | EnsembleKind::Protograph) =>
            {
                return Err(config_err(format!("{} needs an RA or protograph code", self.decoder.name())));
            }
            _ => {}
        }
        if self.decoder == DecoderKind::ModifiedBp && self.t != 2 {
            return Err(config_err("modified BP handles two pirates"));
        }
        if self.decoder == DecoderKind::BpBsc && !(self.crossover > 0.0 && self.crossover < 0.5) {
            return Err(config_err("crossover must lie in (0, 1/2)"));
        }
        if self.decoder.is_exhaustive() && self.nominal_users() > BigUint::from(self.codebook_cap) {
            return Err(Error::CapExceeded {
                users: self.nominal_users().to_string(),
                cap: self.codebook_cap,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RA: &str = r#"
        ensemble = "ra"
        n = [3072, 768, 1536]
        rate = 0.3333
        attack = "average"
        decoder = "modified_bp"
        trials = 10
        seed = 4
    "#;

    #[test]
    fn parses_and_sorts_a_sweep() {
        let cfg = ExperimentConfig::from_toml_str(RA).unwrap();
        let pts = cfg.points(None).unwrap();
        assert_eq!(pts.iter().map(|p| p.n).collect::<Vec<_>>(), vec![768, 1536, 3072]);
        assert!(pts.iter().all(|p| p.code == CodeParams::Ra { q: 3 } && p.seed == 4 && p.n_max == 2));
        assert_eq!(cfg.points(Some(9)).unwrap()[0].seed, 9);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_combinations() {
        assert!(ExperimentConfig::from_toml_str(&format!("{RA}\nbogus = 1")).is_err());
        let marking = RA.replace("\"average\"", "\"marking\"");
        assert!(ExperimentConfig::from_toml_str(&marking).unwrap().points(None).is_err());
        let no_trials = RA.replace("trials = 10", "trials = 0");
        assert!(ExperimentConfig::from_toml_str(&no_trials).unwrap().points(None).is_err());
        let odd = RA.replace("[3072, 768, 1536]", "1000");
        assert!(ExperimentConfig::from_toml_str(&odd).unwrap().points(None).is_err());
    }

    #[test]
    fn iid_sizes_and_cap() {
        let text = r#"
            ensemble = "iid"
            n = 30
            rate = 0.6
            attack = "average"
            decoder = "md_erasure"
            trials = 5
        "#;
        let p = &ExperimentConfig::from_toml_str(text).unwrap().points(None).unwrap()[0];
        assert_eq!(p.code, CodeParams::Iid { users: 1 << 18 });
        let capped = format!("{text}\ncodebook_cap = 1000");
        let err = ExperimentConfig::from_toml_str(&capped).unwrap().points(None).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn protograph_lift_from_length() {
        let text = r#"
            ensemble = "protograph"
            protograph = "rate-1/9"
            n = [1152, 4608]
            attack = "marking"
            decoder = "bp_bsc"
            trials = 5
        "#;
        let pts = ExperimentConfig::from_toml_str(text).unwrap().points(None).unwrap();
        assert!(matches!(pts[0].code, CodeParams::Protograph { lift: 64, .. }));
        assert!(matches!(pts[1].code, CodeParams::Protograph { lift: 256, .. }));
        assert!((pts[0].rate - 1.0 / 9.0).abs() < 1e-12);
    }
}
