//! The ambient environment: global names and builtin module surfaces the
//! analyzer assumes for script-mode Node.js code.
//!
//! The environment ships as a versioned JSON data file (see
//! `docs/ambient-format.md` for the schema) and is immutable after load, so
//! it can be shared freely across parallel snippet analyses.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

/// The bundled ambient data file, exposed so embedders can rebuild the
/// environment behind an `Arc` or derive a modified one.
pub const BUILTIN_AMBIENT_JSON: &str = include_str!("../data/ambient.json");

/// Inferred expected type for an undeclared name, used to pick placeholder
/// values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeHint {
    String,
    Number,
    StringArray,
    NumberArray,
    Callable,
    Constructable,
    /// Structured or multi-alternative type; carries a printable description
    /// for placeholder comments.
    Complex(String),
    Unknown,
}

impl TypeHint {
    /// Maps a parameter annotation from the data file onto a hint.
    pub fn from_annotation(annotation: &str) -> TypeHint {
        match annotation.trim() {
            "" | "any" => TypeHint::Unknown,
            "string" => TypeHint::String,
            "number" => TypeHint::Number,
            "string[]" => TypeHint::StringArray,
            "number[]" => TypeHint::NumberArray,
            "function" => TypeHint::Callable,
            "constructor" => TypeHint::Constructable,
            other => TypeHint::Complex(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MemberKind {
    #[default]
    Value,
    Callable,
    Constructable,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ParamHint {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(rename = "type", default)]
    pub annotation: String,
    #[serde(default)]
    pub rest: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
pub struct MemberEntry {
    #[serde(default)]
    pub kind: MemberKind,
    #[serde(default)]
    pub params: Vec<ParamHint>,
}

impl MemberEntry {
    pub fn is_callable(&self) -> bool {
        matches!(self.kind, MemberKind::Callable | MemberKind::Constructable)
    }

    /// Hint for the argument at `index`, honoring a trailing rest parameter.
    pub fn param_hint(&self, index: usize) -> TypeHint {
        if let Some(p) = self.params.get(index) {
            return TypeHint::from_annotation(&p.annotation);
        }
        match self.params.last() {
            Some(last) if last.rest => TypeHint::from_annotation(&last.annotation),
            _ => TypeHint::Unknown,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct GlobalEntry {
    /// Printable type name for property diagnostics; `None` keeps the value
    /// unknown-typed (property access stays silent).
    #[serde(default)]
    pub type_name: Option<String>,
    #[serde(default)]
    pub kind: MemberKind,
    #[serde(default)]
    pub params: Vec<ParamHint>,
    /// Known members; `None` means the member set is open.
    #[serde(default)]
    pub members: Option<HashMap<String, MemberEntry>>,
}

impl GlobalEntry {
    pub fn as_signature(&self) -> Option<MemberEntry> {
        if matches!(self.kind, MemberKind::Callable | MemberKind::Constructable) {
            Some(MemberEntry {
                kind: self.kind,
                params: self.params.clone(),
            })
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct ModuleEntry {
    members: HashMap<String, MemberEntry>,
}

#[derive(Debug, Clone, Deserialize)]
struct AmbientData {
    schema: String,
    globals: HashMap<String, GlobalEntry>,
    modules: HashMap<String, ModuleEntry>,
    #[serde(default)]
    string_members: Vec<String>,
    #[serde(default)]
    number_members: Vec<String>,
    #[serde(default)]
    array_members: Vec<String>,
    #[serde(default)]
    boolean_members: Vec<String>,
    #[serde(default)]
    universal_members: Vec<String>,
}

#[derive(Debug, Error)]
pub enum AmbientError {
    #[error("failed to parse ambient data: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported ambient schema {found:?}, expected {expected:?}")]
    Schema { found: String, expected: String },
    #[error("failed to read ambient data file: {0}")]
    Io(#[from] std::io::Error),
}

const SCHEMA: &str = "ncc-ambient/1";

/// Immutable ambient environment: global value names plus a builtin module
/// table with callable member signatures.
#[derive(Debug)]
pub struct AmbientEnvironment {
    globals: HashMap<String, GlobalEntry>,
    modules: HashMap<String, ModuleEntry>,
    string_members: HashSet<String>,
    number_members: HashSet<String>,
    array_members: HashSet<String>,
    boolean_members: HashSet<String>,
    universal_members: HashSet<String>,
    global_names: Vec<String>,
}

impl AmbientEnvironment {
    /// The environment bundled with the engine.
    pub fn builtin() -> &'static AmbientEnvironment {
        static ENV: OnceLock<AmbientEnvironment> = OnceLock::new();
        ENV.get_or_init(|| {
            AmbientEnvironment::from_json_str(BUILTIN_AMBIENT_JSON)
                .expect("bundled ambient data must parse")
        })
    }

    pub fn from_json_str(json: &str) -> Result<AmbientEnvironment, AmbientError> {
        let data: AmbientData = serde_json::from_str(json)?;
        if data.schema != SCHEMA {
            return Err(AmbientError::Schema {
                found: data.schema,
                expected: SCHEMA.to_string(),
            });
        }
        let mut global_names: Vec<String> = data.globals.keys().cloned().collect();
        global_names.sort();
        Ok(AmbientEnvironment {
            globals: data.globals,
            modules: data.modules,
            string_members: data.string_members.into_iter().collect(),
            number_members: data.number_members.into_iter().collect(),
            array_members: data.array_members.into_iter().collect(),
            boolean_members: data.boolean_members.into_iter().collect(),
            universal_members: data.universal_members.into_iter().collect(),
            global_names,
        })
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<AmbientEnvironment, AmbientError> {
        let json = std::fs::read_to_string(path)?;
        AmbientEnvironment::from_json_str(&json)
    }

    pub fn has_global(&self, name: &str) -> bool {
        self.globals.contains_key(name)
    }

    pub fn global(&self, name: &str) -> Option<&GlobalEntry> {
        self.globals.get(name)
    }

    /// Sorted global names, the candidate set for misspelling suggestions.
    pub fn global_names(&self) -> &[String] {
        &self.global_names
    }

    pub fn is_builtin_module(&self, name: &str) -> bool {
        let bare = name.strip_prefix("node:").unwrap_or(name);
        self.modules.contains_key(bare)
    }

    pub fn module_member(&self, module: &str, member: &str) -> Option<&MemberEntry> {
        let bare = module.strip_prefix("node:").unwrap_or(module);
        self.modules.get(bare)?.members.get(member)
    }

    pub fn module_has_member(&self, module: &str, member: &str) -> bool {
        self.module_member(module, member).is_some()
            || self.universal_members.contains(member)
    }

    pub fn global_member(&self, global: &str, member: &str) -> Option<&MemberEntry> {
        self.globals.get(global)?.members.as_ref()?.get(member)
    }

    pub fn string_has(&self, member: &str) -> bool {
        self.string_members.contains(member) || self.universal_members.contains(member)
    }

    pub fn number_has(&self, member: &str) -> bool {
        self.number_members.contains(member) || self.universal_members.contains(member)
    }

    pub fn array_has(&self, member: &str) -> bool {
        self.array_members.contains(member) || self.universal_members.contains(member)
    }

    pub fn boolean_has(&self, member: &str) -> bool {
        self.boolean_members.contains(member) || self.universal_members.contains(member)
    }

    pub fn is_universal_member(&self, member: &str) -> bool {
        self.universal_members.contains(member)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_data_loads() {
        let env = AmbientEnvironment::builtin();
        assert!(env.has_global("console"));
        assert!(env.has_global("require"));
        assert!(!env.has_global("it"));
        assert!(!env.has_global("describe"));
        assert!(!env.has_global("expect"));
    }

    #[test]
    fn required_modules_are_present() {
        let env = AmbientEnvironment::builtin();
        for m in [
            "http", "https", "fs", "path", "url", "os", "crypto", "events", "util", "stream",
        ] {
            assert!(env.is_builtin_module(m), "missing builtin module {m}");
        }
        assert!(env.is_builtin_module("node:fs"));
        assert!(!env.is_builtin_module("left-pad"));
    }

    #[test]
    fn http_get_signature_has_the_url_hint() {
        let env = AmbientEnvironment::builtin();
        let get = env.module_member("http", "get").unwrap();
        assert!(get.is_callable());
        assert_eq!(
            get.param_hint(0),
            TypeHint::Complex("string | RequestOptions | URL".to_string())
        );
        assert_eq!(get.param_hint(1), TypeHint::Callable);
    }

    #[test]
    fn math_max_is_a_number_rest_signature() {
        let env = AmbientEnvironment::builtin();
        let max = env.global_member("Math", "max").unwrap();
        assert_eq!(max.param_hint(0), TypeHint::Number);
        assert_eq!(max.param_hint(7), TypeHint::Number);
    }

    #[test]
    fn annotation_mapping() {
        assert_eq!(TypeHint::from_annotation("string"), TypeHint::String);
        assert_eq!(TypeHint::from_annotation("number"), TypeHint::Number);
        assert_eq!(TypeHint::from_annotation("string[]"), TypeHint::StringArray);
        assert_eq!(TypeHint::from_annotation("any"), TypeHint::Unknown);
        assert_eq!(
            TypeHint::from_annotation("string | URL"),
            TypeHint::Complex("string | URL".to_string())
        );
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let err = AmbientEnvironment::from_json_str(
            r#"{"schema":"ncc-ambient/999","globals":{},"modules":{}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, AmbientError::Schema { .. }));
    }

    #[test]
    fn loads_from_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ambient.json");
        std::fs::write(&path, BUILTIN_AMBIENT_JSON).unwrap();
        let env = AmbientEnvironment::from_json_file(&path).unwrap();
        assert!(env.has_global("console"));
        assert!(AmbientEnvironment::from_json_file(&dir.path().join("missing.json")).is_err());
    }

    #[test]
    fn primitive_member_tables() {
        let env = AmbientEnvironment::builtin();
        assert!(env.string_has("split"));
        assert!(env.string_has("toString"));
        assert!(!env.string_has("push"));
        assert!(env.array_has("push"));
        assert!(env.number_has("toFixed"));
    }
}
