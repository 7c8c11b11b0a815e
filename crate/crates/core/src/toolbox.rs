//! Three-tier component library: immutable primitives, versioned learned
//! composites and user-defined custom components.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::optical_model::{from_json_bytes, validate_structure, ComponentKind, OpticalSetup, Quantity, SetupError, StructureFinding};

pub const PRIMITIVES_FILE: &str = "primitives.json";
pub const COMPOSITES_FILE: &str = "learned_composites.json";
pub const CUSTOM_FILE: &str = "custom_components.json";

const BUNDLED_PRIMITIVES: &str = include_str!("../data/primitives.json");
const BUNDLED_CUSTOM: &str = include_str!("../data/custom_components.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveEntry {
    pub name: String,
    pub category: ComponentKind,
    #[serde(default)]
    pub default_params: BTreeMap<String, Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Composite {
    pub name: String,
    pub version: u32,
    pub approved_at: DateTime<Utc>,
    pub setup: OpticalSetup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomComponent {
    pub name: String,
    pub definition: String,
    #[serde(default)]
    pub params: BTreeMap<String, Quantity>,
    #[serde(default)]
    pub usage_count: u64,
    #[serde(default)]
    pub last_used: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Primitives,
    Composites,
    Custom,
}

impl Tier {
    pub fn parse(s: &str) -> Option<Tier> {
        match s {
            "primitives" | "primitive" => Some(Tier::Primitives),
            "composites" | "composite" | "learned" => Some(Tier::Composites),
            "custom" => Some(Tier::Custom),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ToolboxError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: SetupError,
    },
    #[error("primitive tier file {0} is required")]
    MissingPrimitives(PathBuf),
    #[error("composite {name} v{version} appears more than once")]
    DuplicateComposite { name: String, version: u32 },
    #[error("composite {name} versions are not 1..{max} without gaps")]
    VersionGap { name: String, max: u32 },
    #[error("composite {name} v{version} has structural findings: {findings:?}")]
    InvalidComposite {
        name: String,
        version: u32,
        findings: Vec<StructureFinding>,
    },
    #[error("setup rejected: {}", join_findings(.0))]
    Rejected(Vec<StructureFinding>),
    #[error("no custom component named {0:?}")]
    NotFound(String),
}

fn join_findings(f: &[StructureFinding]) -> String {
    f.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Locations of the three tier files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierPaths {
    pub primitives: PathBuf,
    pub composites: PathBuf,
    pub custom: PathBuf,
}

impl TierPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        TierPaths {
            primitives: dir.join(PRIMITIVES_FILE),
            composites: dir.join(COMPOSITES_FILE),
            custom: dir.join(CUSTOM_FILE),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Toolbox {
    primitives: Vec<PrimitiveEntry>,
    composites: Vec<Composite>,
    custom: Vec<CustomComponent>,
    /// Where mutations are persisted; `None` keeps everything in memory.
    paths: Option<TierPaths>,
}

fn read_optional(path: &Path) -> Result<Option<Vec<u8>>, ToolboxError> {
    match std::fs::read(path) {
        Ok(b) => Ok(Some(b)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(ToolboxError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn parse_tier<T: serde::de::DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<Vec<T>, ToolboxError> {
    from_json_bytes(bytes).map_err(|source| ToolboxError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Write-temp-then-rename so readers never observe a half-written tier.
fn write_atomic<T: Serialize>(path: &Path, items: &[T]) -> Result<(), ToolboxError> {
    let io = |source| ToolboxError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    let mut bytes = serde_json::to_vec_pretty(items).expect("tier entries serialize");
    bytes.push(b'\n');
    tmp.write_all(&bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn check_composites(composites: &[Composite]) -> Result<(), ToolboxError> {
    let mut groups: BTreeMap<&str, BTreeSet<u32>> = BTreeMap::new();
    for c in composites {
        if !groups.entry(&c.name).or_default().insert(c.version) {
            return Err(ToolboxError::DuplicateComposite {
                name: c.name.clone(),
                version: c.version,
            });
        }
        let findings = validate_structure(&c.setup);
        if !findings.is_empty() {
            return Err(ToolboxError::InvalidComposite {
                name: c.name.clone(),
                version: c.version,
                findings,
            });
        }
    }
    for (name, versions) in groups {
        let max = *versions.last().expect("non-empty group");
        if versions.len() as u32 != max || versions.first() != Some(&1) {
            return Err(ToolboxError::VersionGap { name: name.into(), max });
        }
    }
    Ok(())
}

pub fn load_toolbox(paths: &TierPaths) -> Result<Toolbox, ToolboxError> {
    let prim = read_optional(&paths.primitives)?.ok_or_else(|| ToolboxError::MissingPrimitives(paths.primitives.clone()))?;
    let primitives = parse_tier(&prim, &paths.primitives)?;
    let composites: Vec<Composite> = match read_optional(&paths.composites)? {
        Some(b) => parse_tier(&b, &paths.composites)?,
        None => Vec::new(),
    };
    check_composites(&composites)?;
    let custom = match read_optional(&paths.custom)? {
        Some(b) => parse_tier(&b, &paths.custom)?,
        None => Vec::new(),
    };
    Ok(Toolbox {
        primitives,
        composites,
        custom,
        paths: Some(paths.clone()),
    })
}

impl Toolbox {
    /// The library shipped with the crate, held in memory. The composite tier
    /// is seeded with one approved copy of every bundled experiment.
    pub fn bundled() -> Toolbox {
        let primitives = parse_tier(BUNDLED_PRIMITIVES.as_bytes(), Path::new(PRIMITIVES_FILE)).expect("bundled primitives parse");
        let custom = parse_tier(BUNDLED_CUSTOM.as_bytes(), Path::new(CUSTOM_FILE)).expect("bundled custom components parse");
        let composites = crate::bundled::setups()
            .into_iter()
            .map(|(_, setup)| Composite {
                name: setup.title.clone(),
                version: 1,
                approved_at: setup.created_at,
                setup,
            })
            .collect();
        Toolbox {
            primitives,
            composites,
            custom,
            paths: None,
        }
    }

    /// Writes all three tiers into `dir` and attaches the toolbox to them.
    pub fn save_to(&mut self, dir: impl AsRef<Path>) -> Result<TierPaths, ToolboxError> {
        let paths = TierPaths::in_dir(dir);
        write_atomic(&paths.primitives, &self.primitives)?;
        write_atomic(&paths.composites, &self.composites)?;
        write_atomic(&paths.custom, &self.custom)?;
        self.paths = Some(paths.clone());
        Ok(paths)
    }

    pub fn primitives(&self) -> &[PrimitiveEntry] {
        &self.primitives
    }

    pub fn composites(&self) -> &[Composite] {
        &self.composites
    }

    pub fn custom(&self) -> &[CustomComponent] {
        &self.custom
    }

    pub fn paths(&self) -> Option<&TierPaths> {
        self.paths.as_ref()
    }

    /// Highest version approved under `name`.
    pub fn latest(&self, name: &str) -> Option<&Composite> {
        self.composites.iter().filter(|c| c.name == name).max_by_key(|c| c.version)
    }

    /// Digest of the primitive tier, used to check it never changes.
    pub fn primitives_digest(&self) -> u64 {
        let bytes = serde_json::to_vec(&self.primitives).expect("primitives serialize");
        twox_hash::XxHash64::oneshot(0, &bytes)
    }

    /// Stores `setup` as the next version of `name`. Identical setups under a
    /// new name are stored as independent copies.
    pub fn approve_setup(&mut self, setup: &OpticalSetup, name: &str, at: DateTime<Utc>) -> Result<Composite, ToolboxError> {
        let findings = validate_structure(setup);
        if !findings.is_empty() {
            return Err(ToolboxError::Rejected(findings));
        }
        let version = self.latest(name).map_or(1, |c| c.version + 1);
        let composite = Composite {
            name: name.to_string(),
            version,
            approved_at: at,
            setup: setup.clone(),
        };
        self.composites.push(composite.clone());
        if let Some(paths) = &self.paths {
            if let Err(e) = write_atomic(&paths.composites, &self.composites) {
                self.composites.pop();
                return Err(e);
            }
        }
        Ok(composite)
    }

    pub fn record_usage(&mut self, name: &str, at: DateTime<Utc>) -> Result<CustomComponent, ToolboxError> {
        let idx = self
            .custom
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| ToolboxError::NotFound(name.to_string()))?;
        let before = self.custom[idx].clone();
        let entry = &mut self.custom[idx];
        entry.usage_count += 1;
        entry.last_used = Some(at);
        let updated = entry.clone();
        if let Some(paths) = &self.paths {
            if let Err(e) = write_atomic(&paths.custom, &self.custom) {
                self.custom[idx] = before;
                return Err(e);
            }
        }
        Ok(updated)
    }
}
