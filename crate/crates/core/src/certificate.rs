//! JSON certificates and the content-addressed certificate cache.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::unital::Unital;

/// Environment variable that overrides `--cache-dir`.
pub const CACHE_ENV: &str = "UNITALFORGE_CACHE";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything that determines a command's result.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub field: String,
    pub spec: String,
    pub theta: String,
    pub kappa: String,
    pub mode: String,
    pub threads: usize,
    pub format: String,
    pub cache_dir: Option<String>,
    /// Command-specific arguments, e.g. `vertex=90`.
    pub extra: BTreeMap<String, String>,
}

impl RunConfig {
    /// Cache key: the config plus the crate version.
    pub fn key(&self) -> String {
        let body = serde_json::to_vec(&(self, VERSION)).expect("config serializes");
        hex::encode(Sha256::digest(&body))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub mode: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
}

impl Check {
    pub fn pass(name: &str, mode: &Mode) -> Check {
        Check { name: name.into(), mode: mode.to_string(), status: Status::Pass, witness: None }
    }

    pub fn fail(name: &str, mode: &Mode, witness: Value) -> Check {
        Check { name: name.into(), mode: mode.to_string(), status: Status::Fail, witness: Some(witness) }
    }

    /// Pass on `Ok`, fail with the error text as witness otherwise.
    pub fn from_result<T>(name: &str, mode: &Mode, r: &Result<T>) -> Check {
        match r {
            Ok(_) => Check::pass(name, mode),
            Err(e) => Check::fail(name, mode, Value::String(e.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub field: String,
    pub spec: String,
    pub provenance: Option<String>,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    /// Text rendering of the result, one entry per output line.
    pub report: Vec<String>,
    pub version: String,
    /// Seconds since the Unix epoch; excluded from the hash.
    pub timestamp: u64,
    pub hash: String,
}

impl Certificate {
    pub fn new(config: RunConfig) -> Certificate {
        Certificate {
            field: config.field.clone(),
            spec: config.spec.clone(),
            provenance: None,
            config,
            checks: Vec::new(),
            data: BTreeMap::new(),
            report: Vec::new(),
            version: VERSION.into(),
            timestamp: 0,
            hash: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn put<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("certificate data serializes");
        self.data.insert(key.into(), v);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.report.push(s.into());
    }

    /// Records a unital: provenance plus its sorted point IDs.
    pub fn put_unital(&mut self, u: &Unital) {
        self.provenance = Some(u.provenance().to_string());
        self.put("points", u.points());
    }

    /// Digest over the certificate with `timestamp` and `hash` removed.
    pub fn content_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("certificate serializes");
        let obj = v.as_object_mut().expect("certificate is an object");
        obj.remove("timestamp");
        obj.remove("hash");
        hex::encode(Sha256::digest(serde_json::to_vec(&v).expect("value serializes")))
    }

    /// Stamps the current time and the content hash.
    pub fn seal(&mut self) {
        self.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        self.hash = self.content_hash();
    }

    pub fn verify_hash(&self) -> bool {
        self.hash == self.content_hash()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Certificate> {
        serde_json::from_str(s).map_err(|e| Error::Format(format!("certificate: {e}")))
    }

    /// The unital recorded by `put_unital`, with its plane rebuilt.
    pub fn unital(&self) -> Result<Unital> {
        let provenance =
            self.provenance.as_deref().ok_or_else(|| Error::Format("certificate holds no unital".into()))?;
        let points: Vec<u64> = self
            .data
            .get("points")
            .cloned()
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| Error::Format(format!("certificate points: {e}")))?
            .ok_or_else(|| Error::Format("certificate holds no points".into()))?;
        Unital::from_header(&self.field, &self.spec, provenance, points)
    }
}

/// Directory of certificates named by `RunConfig::key`.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// The cache named by `UNITALFORGE_CACHE`, else by `dir`, else none.
    pub fn locate(dir: Option<&str>) -> Option<Cache> {
        std::env::var(CACHE_ENV)
            .ok()
            .filter(|s| !s.is_empty())
            .or_else(|| dir.map(str::to_string))
            .map(|d| Cache { dir: PathBuf::from(d) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, config: &RunConfig) -> PathBuf {
        self.dir.join(format!("{}.json", config.key()))
    }

    /// A cached certificate for `config`, ignoring unreadable or tampered entries.
    pub fn get(&self, config: &RunConfig) -> Option<Certificate> {
        let text = fs::read_to_string(self.path(config)).ok()?;
        Certificate::from_json(&text).ok().filter(|c| c.verify_hash() && &c.config == config)
    }

    pub fn put(&self, cert: &Certificate) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        fs::write(self.path(&cert.config), cert.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Certificate {
        let config = RunConfig { command: "field check".into(), field: "p=3,m=2,mod=[2,2,1]".into(), ..Default::default() };
        let mut c = Certificate::new(config);
        c.check(Check::pass("irreducible", &Mode::Exhaustive));
        c.put("q", 3);
        c.line("q=3");
        c
    }

    #[test]
    fn hash_ignores_timestamp() {
        let mut a = sample();
        a.seal();
        let mut b = a.clone();
        b.timestamp += 1000;
        assert_eq!(a.content_hash(), b.content_hash());
        assert!(b.verify_hash());
        b.data.insert("q".into(), Value::from(5));
        assert!(!b.verify_hash());
    }

    #[test]
    fn json_round_trip() {
        let mut a = sample();
        a.check(Check::fail("planar", &Mode::Sampled { seed: 1, trials: 3 }, Value::from("x=1")));
        a.seal();
        let b = Certificate::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
        assert!(!b.passed());
        assert!(Certificate::from_json("{}").is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache { dir: dir.path().join("c") };
        let mut a = sample();
        a.seal();
        assert!(cache.get(&a.config).is_none());
        cache.put(&a).unwrap();
        assert_eq!(cache.get(&a.config), Some(a.clone()));
        let mut other = a.config.clone();
        other.mode = "sampled".into();
        assert!(cache.get(&other).is_none());
    }

    #[test]
    fn key_depends_on_every_field() {
        let base = sample().config;
        let mut t = base.clone();
        t.extra.insert("vertex".into(), "1".into());
        assert_ne!(base.key(), t.key());
        assert_eq!(base.key(), base.clone().key());
    }
}
