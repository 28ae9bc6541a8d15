//! Project discovery and loading.
//!
//! Discovery is filesystem-convention based: no build execution. The main
//! module is `app` by convention, overridable, with a fallback to the
//! unique directory holding an Android manifest. Build outputs (any `build`
//! directory) and test source roots (`src/test`, `src/androidTest`) stay
//! out of the analyzed set unless tests are explicitly included. Symbolic
//! links are never followed.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::error::ConanError;
use crate::manifest::{parse_manifest, ManifestModel};
use crate::par;
use crate::source::{parse_source_unit, Language, MethodModel, SourceUnit};

/// Where a project's module, manifest and sources live. Paths other than
/// `root_path` are root-relative with forward slashes, so layouts and the
/// models built from them are stable across machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectLayout {
    pub root_path: String,
    pub module_name: String,
    pub manifest_path: String,
    pub source_paths: Vec<String>,
}

/// The loaded project: layout, manifest facts, parsed units.
#[derive(Debug, Clone)]
pub struct ProjectModel {
    pub layout: ProjectLayout,
    /// Display name — the root directory's base name.
    pub name: String,
    pub manifest: ManifestModel,
    /// Sorted by ascending path.
    pub units: Vec<SourceUnit>,
    /// Files that could not be read or parsed; never silently dropped.
    pub diagnostics: Vec<String>,
}

fn rel_slash(root: &Path, p: &Path) -> String {
    let r = p.strip_prefix(root).unwrap_or(p);
    r.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn has_component(rel: &str, name: &str) -> bool {
    rel.split('/').any(|c| c == name)
}

fn under_test_root(rel: &str) -> bool {
    let parts: Vec<&str> = rel.split('/').collect();
    parts
        .windows(2)
        .any(|w| w[0] == "src" && (w[1] == "test" || w[1] == "androidTest"))
}

/// Locate the main module and enumerate its manifest and source files.
///
/// Module selection: `module_override` when given; else a module named
/// `app`; else the unique manifest-bearing directory. Several candidates
/// without an override means the tree holds more than one app —
/// [`ConanError::AmbiguousModule`]. No manifest at all (or none under the
/// requested module) is [`ConanError::NoManifestFound`].
pub fn discover_project(
    root: &Path,
    module_override: Option<&str>,
    include_tests: bool,
) -> Result<ProjectLayout, ConanError> {
    // All manifests under root, skipping build outputs, hidden dirs and
    // (by default) test roots.
    let mut manifests: Vec<String> = Vec::new();
    let walker = WalkDir::new(root).follow_links(false).into_iter();
    for entry in walker.filter_entry(|e| {
        let name = e.file_name().to_string_lossy();
        e.depth() == 0 || !(e.file_type().is_dir() && (name == "build" || name.starts_with('.')))
    }) {
        let Ok(entry) = entry else { continue };
        if entry.file_type().is_file() && entry.file_name() == "AndroidManifest.xml" {
            let rel = rel_slash(root, entry.path());
            if !include_tests && under_test_root(&rel) {
                continue;
            }
            manifests.push(rel);
        }
    }
    manifests.sort();

    // Module directory for a manifest: the ancestor above `src/main`, else
    // the manifest's own directory. Empty string means the root itself.
    let module_dir_of = |manifest_rel: &str| -> String {
        let dir = match manifest_rel.rfind('/') {
            Some(i) => &manifest_rel[..i],
            None => "",
        };
        dir.strip_suffix("src/main")
            .map(|p| p.trim_end_matches('/'))
            .unwrap_or(dir)
            .to_string()
    };

    let root_base = || {
        root.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| ".".to_string())
    };
    let module_name_of = |module_dir: &str| -> String {
        match module_dir.rsplit('/').next() {
            Some("") | None => root_base(),
            Some(last) => last.to_string(),
        }
    };

    // Group manifests per module directory, keeping the conventional
    // src/main manifest (first after sort, since grouping preserves it).
    let mut by_module: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for m in &manifests {
        by_module
            .entry(module_dir_of(m))
            .or_default()
            .push(m.clone());
    }

    let pick = |dir: &str, mans: &[String]| -> String {
        let conventional = if dir.is_empty() {
            "src/main/AndroidManifest.xml".to_string()
        } else {
            format!("{dir}/src/main/AndroidManifest.xml")
        };
        mans.iter()
            .find(|m| **m == conventional)
            .or_else(|| mans.first())
            .cloned()
            .unwrap_or_default()
    };

    let chosen: (String, String) = if let Some(want) = module_override {
        let want_norm = want.trim_matches('/');
        let found = by_module
            .iter()
            .find(|(dir, _)| *dir == want_norm || module_name_of(dir) == want_norm);
        match found {
            Some((dir, mans)) => (dir.clone(), pick(dir, mans)),
            None => {
                return Err(ConanError::NoManifestFound {
                    root: root.display().to_string(),
                    module: Some(want.to_string()),
                })
            }
        }
    } else if let Some((dir, mans)) = by_module
        .iter()
        .find(|(dir, _)| module_name_of(dir) == "app")
    {
        (dir.clone(), pick(dir, mans))
    } else if by_module.len() == 1 {
        let (dir, mans) = by_module.iter().next().unwrap();
        (dir.clone(), pick(dir, mans))
    } else if by_module.is_empty() {
        return Err(ConanError::NoManifestFound {
            root: root.display().to_string(),
            module: None,
        });
    } else {
        return Err(ConanError::AmbiguousModule {
            candidates: by_module.keys().map(|d| module_name_of(d)).collect(),
        });
    };

    let (module_dir, manifest_path) = chosen;
    let module_name = module_name_of(&module_dir);

    // Source roots: conventional main trees, plus test trees when asked;
    // fall back to the manifest directory's subtree.
    let join_rel = |a: &str, b: &str| {
        if a.is_empty() {
            b.to_string()
        } else {
            format!("{a}/{b}")
        }
    };
    let mut roots: Vec<String> = Vec::new();
    for conv in ["src/main/java", "src/main/kotlin"] {
        let rel = join_rel(&module_dir, conv);
        if root.join(&rel).is_dir() {
            roots.push(rel);
        }
    }
    if include_tests {
        for conv in [
            "src/test/java",
            "src/test/kotlin",
            "src/androidTest/java",
            "src/androidTest/kotlin",
        ] {
            let rel = join_rel(&module_dir, conv);
            if root.join(&rel).is_dir() {
                roots.push(rel);
            }
        }
    }
    if roots.is_empty() {
        let manifest_dir = match manifest_path.rfind('/') {
            Some(i) => manifest_path[..i].to_string(),
            None => String::new(),
        };
        roots.push(manifest_dir);
    }

    let mut sources: BTreeSet<String> = BTreeSet::new();
    for r in &roots {
        let abs = if r.is_empty() {
            root.to_path_buf()
        } else {
            root.join(r)
        };
        let walker = WalkDir::new(&abs).follow_links(false).into_iter();
        for entry in walker.filter_entry(|e| {
            let name = e.file_name().to_string_lossy();
            e.depth() == 0
                || !(e.file_type().is_dir()
                    && (name == "build" || name == "generated" || name.starts_with('.')))
        }) {
            let Ok(entry) = entry else { continue };
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = rel_slash(root, entry.path());
            if Language::from_path(&rel).is_none() {
                continue;
            }
            if has_component(&rel, "build") {
                continue;
            }
            if !include_tests && under_test_root(&rel) {
                continue;
            }
            sources.insert(rel);
        }
    }

    Ok(ProjectLayout {
        root_path: root.display().to_string(),
        module_name,
        manifest_path,
        source_paths: sources.into_iter().collect(),
    })
}

/// Parse the manifest and every source file of a discovered layout.
///
/// A malformed manifest is fatal; unreadable or unparseable source files
/// become diagnostics. File parsing runs data-parallel when the `parallel`
/// feature is on.
pub fn load_project(layout: &ProjectLayout) -> Result<ProjectModel, ConanError> {
    let root = Path::new(&layout.root_path);
    let manifest_abs: PathBuf = root.join(&layout.manifest_path);
    let manifest_text = fs::read_to_string(&manifest_abs).map_err(|e| ConanError::Io {
        path: manifest_abs.display().to_string(),
        source: e,
    })?;
    let manifest = parse_manifest(&manifest_text)?;

    let parsed: Vec<Result<SourceUnit, String>> = par::map_vec(&layout.source_paths, |rel| {
        let lang = match Language::from_path(rel) {
            Some(l) => l,
            None => return Err(format!("{rel}: unrecognized extension")),
        };
        let abs = root.join(rel);
        let text = match fs::read_to_string(&abs) {
            Ok(t) => t,
            Err(e) => return Err(format!("{rel}: {e}")),
        };
        parse_source_unit(rel, &text, lang).map_err(|e| format!("{rel}: {e}"))
    });

    let mut units: Vec<SourceUnit> = Vec::new();
    let mut diagnostics: Vec<String> = Vec::new();
    for r in parsed {
        match r {
            Ok(u) => {
                for d in &u.diagnostics {
                    diagnostics.push(format!("{}: {d}", u.path));
                }
                units.push(u);
            }
            Err(d) => diagnostics.push(d),
        }
    }

    Ok(ProjectModel::from_parts(
        layout.clone(),
        manifest,
        units,
        diagnostics,
    ))
}

impl ProjectModel {
    /// Assemble a model: sort units by path and link project-internal
    /// call edges (simple-name matching; every same-named method is a
    /// candidate, so scope expansion over-approximates rather than drops).
    pub fn from_parts(
        layout: ProjectLayout,
        manifest: ManifestModel,
        mut units: Vec<SourceUnit>,
        diagnostics: Vec<String>,
    ) -> ProjectModel {
        units.sort_by(|a, b| a.path.cmp(&b.path));

        let mut by_simple: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for u in &units {
            for m in &u.methods {
                by_simple
                    .entry(m.name.clone())
                    .or_default()
                    .insert(m.qualified_name.clone());
            }
        }
        for u in &mut units {
            for m in &mut u.methods {
                let mut callees: BTreeSet<String> = BTreeSet::new();
                for c in m.calls.iter().chain(m.constructor_calls.iter()) {
                    if c.is_member_access {
                        continue;
                    }
                    if let Some(qs) = by_simple.get(&c.callee_name) {
                        for q in qs {
                            if *q != m.qualified_name {
                                callees.insert(q.clone());
                            }
                        }
                    }
                }
                m.callees_internal = callees;
            }
        }

        let name = Path::new(&layout.root_path)
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "project".to_string());

        ProjectModel {
            layout,
            name,
            manifest,
            units,
            diagnostics,
        }
    }

    /// Methods indexed by qualified name (same-named collisions keep all).
    pub fn method_index(&self) -> BTreeMap<&str, Vec<&MethodModel>> {
        let mut index: BTreeMap<&str, Vec<&MethodModel>> = BTreeMap::new();
        for u in &self.units {
            for m in &u.methods {
                index.entry(m.qualified_name.as_str()).or_default().push(m);
            }
        }
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(root: &Path, rel: &str, text: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    const MANIFEST: &str = r#"<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="com.example">
  <uses-permission android:name="android.permission.INTERNET"/>
</manifest>"#;

    #[test]
    fn conventional_app_module() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "app/src/main/kotlin/a/A.kt", "class A");
        write(root, "app/src/main/kotlin/a/B.kt", "class B");
        write(root, "app/src/main/kotlin/C.kt", "class C");
        let layout = discover_project(root, None, false).unwrap();
        assert_eq!(layout.module_name, "app");
        assert_eq!(layout.manifest_path, "app/src/main/AndroidManifest.xml");
        assert_eq!(
            layout.source_paths,
            vec![
                "app/src/main/kotlin/C.kt",
                "app/src/main/kotlin/a/A.kt",
                "app/src/main/kotlin/a/B.kt",
            ]
        );
    }

    #[test]
    fn empty_directory_has_no_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let err = discover_project(dir.path(), None, false).unwrap_err();
        assert!(matches!(err, ConanError::NoManifestFound { .. }));
    }

    #[test]
    fn override_selects_module() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "phone/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "phone/src/main/java/P.java", "class P {}");
        write(root, "wear/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "wear/src/main/java/W.java", "class W {}");
        let layout = discover_project(root, Some("wear"), false).unwrap();
        assert_eq!(layout.module_name, "wear");
        assert_eq!(layout.source_paths, vec!["wear/src/main/java/W.java"]);
    }

    #[test]
    fn two_modules_without_override_is_ambiguous() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "phone/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "wear/src/main/AndroidManifest.xml", MANIFEST);
        let err = discover_project(root, None, false).unwrap_err();
        match err {
            ConanError::AmbiguousModule { candidates } => {
                assert_eq!(candidates, vec!["phone", "wear"]);
            }
            other => panic!("expected AmbiguousModule, got {other:?}"),
        }
    }

    #[test]
    fn app_module_wins_over_siblings() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "lib/src/main/AndroidManifest.xml", MANIFEST);
        let layout = discover_project(root, None, false).unwrap();
        assert_eq!(layout.module_name, "app");
    }

    #[test]
    fn build_directories_are_excluded() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "app/src/main/java/Real.java", "class Real {}");
        write(
            root,
            "app/build/generated/src/main/java/Gen.java",
            "class Gen {}",
        );
        let layout = discover_project(root, None, false).unwrap();
        assert_eq!(layout.source_paths, vec!["app/src/main/java/Real.java"]);
    }

    #[test]
    fn test_roots_excluded_by_default_included_on_request() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "app/src/main/java/Main.java", "class Main {}");
        write(root, "app/src/test/java/MainTest.java", "class MainTest {}");
        write(
            root,
            "app/src/androidTest/java/MainUiTest.java",
            "class MainUiTest {}",
        );
        let without = discover_project(root, None, false).unwrap();
        assert_eq!(without.source_paths, vec!["app/src/main/java/Main.java"]);
        let with = discover_project(root, None, true).unwrap();
        assert_eq!(
            with.source_paths,
            vec![
                "app/src/androidTest/java/MainUiTest.java",
                "app/src/main/java/Main.java",
                "app/src/test/java/MainTest.java",
            ]
        );
    }

    #[test]
    fn flat_module_falls_back_to_manifest_subtree() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "src/main/AndroidManifest.xml", MANIFEST);
        write(root, "src/main/Code.java", "class Code {}");
        let layout = discover_project(root, None, false).unwrap();
        assert_eq!(layout.manifest_path, "src/main/AndroidManifest.xml");
        assert_eq!(layout.source_paths, vec!["src/main/Code.java"]);
    }

    #[test]
    fn discovery_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "app/src/main/java/b/B.java", "class B {}");
        write(root, "app/src/main/java/a/A.java", "class A {}");
        let one = discover_project(root, None, false).unwrap();
        let two = discover_project(root, None, false).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn load_project_empty_sources() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        let layout = discover_project(root, None, false).unwrap();
        let model = load_project(&layout).unwrap();
        assert!(model.units.is_empty());
        assert!(model.manifest.has_permission("android.permission.INTERNET"));
    }

    #[test]
    fn load_project_units_in_path_order() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(
            root,
            "app/src/main/java/z/Z.java",
            "class Z { void f() {} }",
        );
        write(root, "app/src/main/kotlin/a/A.kt", "class A { fun g() {} }");
        let layout = discover_project(root, None, false).unwrap();
        let model = load_project(&layout).unwrap();
        let paths: Vec<&str> = model.units.iter().map(|u| u.path.as_str()).collect();
        assert_eq!(
            paths,
            vec!["app/src/main/java/z/Z.java", "app/src/main/kotlin/a/A.kt"]
        );
    }

    #[test]
    fn truncated_manifest_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", "<manifest packa");
        write(root, "app/src/main/java/A.java", "class A {}");
        let layout = discover_project(root, None, false).unwrap();
        let err = load_project(&layout).unwrap_err();
        assert!(matches!(err, ConanError::ManifestParse(_)));
    }

    #[test]
    fn unparseable_source_becomes_diagnostic() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(root, "app/src/main/java/Ok.java", "class Ok {}");
        write(
            root,
            "app/src/main/java/Bad.java",
            &"¤ % ; , . ! ? ^ ~ # ".repeat(20),
        );
        let layout = discover_project(root, None, false).unwrap();
        let model = load_project(&layout).unwrap();
        assert_eq!(model.units.len(), 1);
        assert_eq!(model.diagnostics.len(), 1);
        assert!(model.diagnostics[0].contains("Bad.java"));
    }

    #[test]
    fn internal_call_edges_link_by_simple_name() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        write(root, "app/src/main/AndroidManifest.xml", MANIFEST);
        write(
            root,
            "app/src/main/java/A.java",
            "class A { void top() { helper(); } void helper() { other(); } }",
        );
        let layout = discover_project(root, None, false).unwrap();
        let model = load_project(&layout).unwrap();
        let top = &model.units[0].methods[0];
        assert!(top.callees_internal.contains("A.helper"));
        assert!(!top.callees_internal.contains("A.top"));
    }
}
