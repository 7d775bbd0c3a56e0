use serde::Serialize;
use serde_json::Value;

use super::mapspec::MapDescription;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionStatus {
    Ok,
    Flagged,
}

/// One analysis inside a report. A flagged section carries the reason in
/// `error` and whatever partial data was available.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub name: String,
    pub status: SectionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub data: Value,
}

impl Section {
    pub fn ok(name: impl Into<String>, data: impl Serialize) -> Self {
        Self::with_status(name, data, None)
    }

    pub fn flagged(name: impl Into<String>, reason: impl Into<String>, data: impl Serialize) -> Self {
        Self::with_status(name, data, Some(reason.into()))
    }

    fn with_status(name: impl Into<String>, data: impl Serialize, error: Option<String>) -> Self {
        let data = serde_json::to_value(data).unwrap_or(Value::Null);
        let mut error = error;
        if error.is_none() && has_non_finite(&data) {
            error = Some("non-finite value".into());
        }
        Self {
            name: name.into(),
            status: if error.is_some() {
                SectionStatus::Flagged
            } else {
                SectionStatus::Ok
            },
            error,
            data,
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.status == SectionStatus::Flagged
    }
}

/// serde_json writes NaN and infinities as `null`. Report data never uses
/// `null` otherwise (optional fields are omitted), so a nested null marks a
/// non-finite value.
fn has_non_finite(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().any(|x| x.is_null() || has_non_finite(x)),
        Value::Object(map) => map.values().any(|x| x.is_null() || has_non_finite(x)),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: MapDescription,
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ReportDocument {
    pub fn new(command: &'static str, input: MapDescription) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            input,
            sections: Vec::new(),
            timing: None,
        }
    }

    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn is_flagged(&self) -> bool {
        self.sections.iter().any(Section::is_flagged)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
