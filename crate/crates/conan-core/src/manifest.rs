//! Android manifest parsing: declared permissions and activity intent-filter
//! actions, which is all the rules consume.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::ConanError;

const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";

/// Facts extracted from an `AndroidManifest.xml`.
///
/// Both name sets hold fully qualified names exactly as written in the XML;
/// duplicates collapse and element order never matters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestModel {
    pub package_name: String,
    pub permissions: BTreeSet<String>,
    /// Action names declared inside any activity's intent filters.
    pub intent_actions: BTreeSet<String>,
}

impl ManifestModel {
    /// Exact, case-sensitive membership test over declared permissions.
    pub fn has_permission(&self, name: &str) -> bool {
        self.permissions.contains(name)
    }

    /// Exact, case-sensitive membership test over activity intent actions.
    pub fn has_intent_action(&self, action: &str) -> bool {
        self.intent_actions.contains(action)
    }
}

/// Parse manifest XML text into a [`ManifestModel`].
///
/// Fails with [`ConanError::ManifestParse`] on malformed XML or when the
/// root element is not `manifest`.
pub fn parse_manifest(xml_text: &str) -> Result<ManifestModel, ConanError> {
    let doc = roxmltree::Document::parse(xml_text)
        .map_err(|e| ConanError::ManifestParse(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "manifest" {
        return Err(ConanError::ManifestParse(format!(
            "root element is `{}`, expected `manifest`",
            root.tag_name().name()
        )));
    }

    let package_name = root.attribute("package").unwrap_or_default().to_string();

    let mut permissions = BTreeSet::new();
    let mut intent_actions = BTreeSet::new();

    for node in root.descendants().filter(|n| n.is_element()) {
        match node.tag_name().name() {
            "uses-permission" => {
                if let Some(name) = android_name(&node) {
                    permissions.insert(name.to_string());
                }
            }
            // Only activity-scoped intent filters count: the data-usage
            // control surface has to be an Activity.
            "activity" => {
                for filter in node
                    .children()
                    .filter(|c| c.is_element() && c.tag_name().name() == "intent-filter")
                {
                    for action in filter
                        .children()
                        .filter(|c| c.is_element() && c.tag_name().name() == "action")
                    {
                        if let Some(name) = android_name(&action) {
                            intent_actions.insert(name.to_string());
                        }
                    }
                }
            }
            _ => {}
        }
    }

    Ok(ManifestModel {
        package_name,
        permissions,
        intent_actions,
    })
}

/// The `name` attribute in the Android namespace, tolerating manifests that
/// leave it un-namespaced. Attributes under other namespaces are ignored.
fn android_name<'a>(node: &roxmltree::Node<'a, '_>) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == "name" && matches!(a.namespace(), None | Some(ANDROID_NS)))
        .map(|a| a.value())
}
