//! Run configuration: raw JSON/flag input, merging, and validation into typed parameters.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtConfig;
use crate::modules::{build_simple, trivial_module, truncated_verma, GradedModule};
use crate::presentation::{FSpec, Params, QMode};
use crate::qfield::QPoint;
use crate::rootdata::{parse_type, CartanDatum};

pub const DEFAULT_WINDOW: i64 = 6;
pub const DEFAULT_MARGIN: i64 = 4;
pub const DEFAULT_HOMCAP: usize = 4;
pub const DEFAULT_HILBERT_CAP: usize = 8;
pub const DEFAULT_DEPTH_CAP: usize = 12;

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Unvalidated configuration as read from a JSON file or from flags. Every field is optional;
/// flags override file values field by field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "type")]
    pub cartan_type: Option<String>,
    pub cartan_matrix: Option<Vec<Vec<i64>>>,
    pub symmetrizers: Option<Vec<u32>>,
    /// A family name (`classical`, `qinteger`, `zero`) or an `FSpec` JSON object.
    pub f: Option<serde_json::Value>,
    /// `generic`, `one`, or a rational such as `2` or `3/2`.
    pub q: Option<String>,
    pub window: Option<i64>,
    pub margin: Option<i64>,
    pub homcap: Option<usize>,
    pub hilbert_cap: Option<usize>,
    pub gb_len: Option<usize>,
    pub certify_len: Option<usize>,
    pub depth_cap: Option<usize>,
    /// Module specs: `trivial:W`, `simple:W`, `verma:W:DEPTH`, `file:PATH`, where `W` is a
    /// comma-separated weight.
    pub modules: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub seed: Option<u64>,
    pub ext_full_probe: Option<bool>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| config_err("config", e.to_string()))
    }

    /// `self` with every field set in `over` replaced.
    pub fn overridden_by(&self, over: &RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.clone().or_else(|| self.$f.clone())),* } };
        }
        pick!(
            cartan_type, cartan_matrix, symmetrizers, f, q, window, margin, homcap, hilbert_cap, gb_len,
            certify_len, depth_cap, modules, out, cache, seed, ext_full_probe
        )
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let cartan = self.cartan()?;
        let rank = cartan.rank();
        let f = match &self.f {
            None => FSpec::ClassicalLinear,
            Some(serde_json::Value::String(s)) => FSpec::parse(s, rank)?,
            Some(v @ serde_json::Value::Object(_)) => {
                serde_json::from_value(v.clone()).map_err(|e| config_err("f", e.to_string()))?
            }
            Some(other) => return Err(config_err("f", format!("expected a family name or object, got {other}"))),
        };
        f.validate(&cartan)?;
        let explicit_q = match self.q.as_deref() {
            None => None,
            Some("generic") => Some(QMode::Generic),
            Some(s) => Some(QMode::At(QPoint::parse(s).map_err(|e| config_err("q", e.to_string()))?)),
        };
        if let Some(q) = &explicit_q {
            q.validate()?;
        }
        let q = explicit_q.clone().unwrap_or_else(|| f.default_qmode());
        let window = self.window.unwrap_or(DEFAULT_WINDOW);
        let margin = self.margin.unwrap_or(DEFAULT_MARGIN);
        let homcap = self.homcap.unwrap_or(DEFAULT_HOMCAP);
        if window < 1 {
            return Err(config_err("window", format!("radius must be positive, got {window}")));
        }
        if margin > window {
            return Err(config_err("margin", format!("margin {margin} exceeds window radius {window}")));
        }
        if margin < homcap as i64 {
            return Err(config_err("margin", format!("margin {margin} is below homcap {homcap}")));
        }
        let mut ext = ExtConfig::new(window, margin, homcap);
        if let Some(l) = self.gb_len {
            if l < 2 * homcap + 2 {
                return Err(config_err("gb_len", format!("length cap {l} cannot reach homological degree {homcap}")));
            }
            ext.gb_len = l;
        }
        if let Some(l) = self.certify_len {
            ext.certify_len = l;
        }
        let hilbert_cap = self.hilbert_cap.unwrap_or(DEFAULT_HILBERT_CAP);
        let depth_cap = self.depth_cap.unwrap_or(DEFAULT_DEPTH_CAP);
        let specs = self.modules.clone().unwrap_or_else(|| vec![format!("trivial:{}", vec!["0"; rank].join(","))]);
        let modules = specs
            .iter()
            .map(|s| ModuleSpec::parse(s, rank, depth_cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(Resolved {
            params: Params::with_q(cartan, f, q),
            explicit_q,
            ext,
            hilbert_cap,
            modules,
            seed: self.seed.unwrap_or(0),
            ext_full_probe: self.ext_full_probe.unwrap_or(false),
            out: self.out.clone(),
            cache: self.cache.clone(),
        })
    }

    fn cartan(&self) -> Result<CartanDatum> {
        match (&self.cartan_type, &self.cartan_matrix) {
            (Some(_), Some(_)) => Err(config_err("cartan_matrix", "give either a type or a matrix, not both")),
            (_, Some(a)) => {
                let c = CartanDatum::from_matrix("custom", a.clone()).map_err(|e| config_err("cartan_matrix", e.to_string()))?;
                if let Some(d) = &self.symmetrizers {
                    if *d != c.d {
                        return Err(config_err(
                            "symmetrizers",
                            format!("{d:?} does not symmetrize the matrix (expected {:?})", c.d),
                        ));
                    }
                }
                Ok(c)
            }
            (t, None) => {
                if self.symmetrizers.is_some() {
                    return Err(config_err("symmetrizers", "symmetrizers need an explicit cartan_matrix"));
                }
                parse_type(t.as_deref().unwrap_or("A1")).map_err(|e| match e {
                    Error::Config { .. } => e,
                    other => config_err("type", other.to_string()),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModuleSpec {
    Trivial { weight: Vec<i64> },
    Simple { weight: Vec<i64>, depth_cap: usize },
    Verma { weight: Vec<i64>, depth: usize },
    File { path: PathBuf },
}

impl ModuleSpec {
    pub fn parse(s: &str, rank: usize, depth_cap: usize) -> Result<ModuleSpec> {
        let bad = |reason: String| config_err("modules", format!("{s:?}: {reason}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected KIND:WEIGHT".into()))?;
        if kind == "file" {
            return Ok(ModuleSpec::File { path: rest.into() });
        }
        let mut parts = rest.split(':');
        let weight: Vec<i64> = parts
            .next()
            .unwrap_or("")
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(format!("weight: {e}")))?;
        if weight.len() != rank {
            return Err(bad(format!("weight has {} entries, rank is {rank}", weight.len())));
        }
        let extra = parts.next();
        let spec = match kind {
            "trivial" => ModuleSpec::Trivial { weight },
            "simple" => ModuleSpec::Simple { weight, depth_cap },
            "verma" => {
                let depth = extra
                    .ok_or_else(|| bad("verma needs a depth, as verma:W:DEPTH".into()))?
                    .parse()
                    .map_err(|e| bad(format!("depth: {e}")))?;
                ModuleSpec::Verma { weight, depth }
            }
            _ => return Err(bad(format!("unknown module kind {kind:?}"))),
        };
        if kind != "verma" && extra.is_some() {
            return Err(bad("unexpected trailing field".into()));
        }
        Ok(spec)
    }

    pub fn build(&self, p: &Params) -> Result<GradedModule> {
        match self {
            ModuleSpec::Trivial { weight } => trivial_module(p, weight),
            ModuleSpec::Simple { weight, depth_cap } => build_simple(p, weight, *depth_cap),
            ModuleSpec::Verma { weight, depth } => truncated_verma(p, weight, *depth),
            ModuleSpec::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err("modules", format!("{}: {e}", path.display())))?;
                let m: GradedModule = serde_json::from_str(&text)
                    .map_err(|e| config_err("modules", format!("{}: {e}", path.display())))?;
                if m.rank != p.rank() {
                    return Err(config_err("modules", format!("{} has rank {}, expected {}", path.display(), m.rank, p.rank())));
                }
                Ok(m)
            }
        }
    }
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub params: Params,
    /// The q given on the command line or in the file, if any.
    pub explicit_q: Option<QMode>,
    pub ext: ExtConfig,
    pub hilbert_cap: usize,
    pub modules: Vec<ModuleSpec>,
    pub seed: u64,
    pub ext_full_probe: bool,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

/// Everything that can influence a report's deterministic part; hashed into `config_hash`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedConfig {
    pub cartan: CartanDatum,
    pub f: FSpec,
    pub q: QMode,
    pub ext: ExtConfig,
    pub hilbert_cap: usize,
    pub hilbert_q: QMode,
    pub modules: Vec<ModuleSpec>,
    pub seed: u64,
    pub ext_full_probe: bool,
}

impl Resolved {
    /// The Serre algebra of `hilbert` is independent of `f`; it runs at generic q unless one is given.
    pub fn hilbert_q(&self) -> QMode {
        self.explicit_q.clone().unwrap_or(QMode::Generic)
    }

    pub fn normalized(&self) -> NormalizedConfig {
        NormalizedConfig {
            cartan: self.params.cartan.clone(),
            f: self.params.f.clone(),
            q: self.params.q.clone(),
            ext: self.ext.clone(),
            hilbert_cap: self.hilbert_cap,
            hilbert_q: self.hilbert_q(),
            modules: self.modules.clone(),
            seed: self.seed,
            ext_full_probe: self.ext_full_probe,
        }
    }
}
