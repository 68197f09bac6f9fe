//! Persistent per-user expectation models.
//!
//! One TOML file holds every user's profile under `[profiles.<user>]`.
//! Writes replace the file atomically, and each save touches only the
//! profile being saved.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explain::{ExpectedSuccessorModel, Matching, StrategyKind};
use crate::lang::{ParseError, Term};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Corrupt {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{}: profile `{user}` holds a bad term `{text}`: {source}", .path.display())]
    BadTerm {
        path: PathBuf,
        user: String,
        text: String,
        #[source]
        source: Box<ParseError>,
    },
    #[error("serializing profiles: {0}")]
    Serialize(#[from] toml::ser::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub user: String,
    /// Unix seconds.
    pub created: u64,
    pub updated: u64,
    pub init: StrategyKind,
    pub model: ExpectedSuccessorModel,
}

impl Profile {
    pub fn new(model: ExpectedSuccessorModel, init: StrategyKind) -> Self {
        let now = now();
        Profile {
            user: model.user_id.clone(),
            created: now,
            updated: now,
            init,
            model,
        }
    }

    /// Replaces the model, bumping `updated` when it actually changed.
    pub fn update(&mut self, model: ExpectedSuccessorModel) {
        if model != self.model {
            self.model = model;
            self.updated = now().max(self.updated);
        }
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Store {
    #[serde(default)]
    profiles: BTreeMap<String, StoredProfile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StoredProfile {
    created: u64,
    updated: u64,
    init: StrategyKind,
    #[serde(default)]
    matching: Matching,
    #[serde(default)]
    successors: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    task_links: BTreeMap<String, Vec<String>>,
}

type Edges = BTreeMap<Term, std::collections::BTreeSet<Term>>;

fn to_text(edges: &Edges) -> BTreeMap<String, Vec<String>> {
    edges
        .iter()
        .map(|(k, vs)| (k.to_string(), vs.iter().map(ToString::to_string).collect()))
        .collect()
}

impl StoredProfile {
    fn from_profile(p: &Profile) -> Self {
        StoredProfile {
            created: p.created,
            updated: p.updated,
            init: p.init,
            matching: p.model.matching,
            successors: to_text(p.model.successors()),
            task_links: to_text(p.model.task_links()),
        }
    }

    fn into_profile(self, user: &str, path: &Path) -> Result<Profile, ProfileError> {
        let parse = |text: &String| -> Result<Term, ProfileError> {
            text.parse().map_err(|source| ProfileError::BadTerm {
                path: path.to_path_buf(),
                user: user.to_string(),
                text: text.clone(),
                source: Box::new(source),
            })
        };
        let from_text = |m: &BTreeMap<String, Vec<String>>| -> Result<Edges, ProfileError> {
            m.iter()
                .map(|(k, vs)| Ok((parse(k)?, vs.iter().map(parse).collect::<Result<_, _>>()?)))
                .collect()
        };
        let model = ExpectedSuccessorModel::from_parts(
            user.to_string(),
            self.matching,
            from_text(&self.successors)?,
            from_text(&self.task_links)?,
        );
        Ok(Profile {
            user: user.to_string(),
            created: self.created,
            updated: self.updated,
            init: self.init,
            model,
        })
    }
}

fn read_store(path: &Path) -> Result<Store, ProfileError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Store::default()),
        Err(source) => {
            return Err(ProfileError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    toml::from_str(&text).map_err(|source| ProfileError::Corrupt {
        path: path.to_path_buf(),
        source,
    })
}

/// The stored profile for `user`, or `None` when the store or the user's
/// entry does not exist yet. A store that does not parse is an error.
pub fn load_profile(path: &Path, user: &str) -> Result<Option<Profile>, ProfileError> {
    let mut store = read_store(path)?;
    store
        .profiles
        .remove(user)
        .map(|p| p.into_profile(user, path))
        .transpose()
}

/// Users with a stored profile, sorted.
pub fn list_profiles(path: &Path) -> Result<Vec<String>, ProfileError> {
    Ok(read_store(path)?.profiles.into_keys().collect())
}

/// Writes `profile` into the store, leaving other users' entries untouched.
pub fn save_profile(path: &Path, profile: &Profile) -> Result<(), ProfileError> {
    let mut store = read_store(path)?;
    store
        .profiles
        .insert(profile.user.clone(), StoredProfile::from_profile(profile));
    let text = toml::to_string(&store)?;
    let io = |source| ProfileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
