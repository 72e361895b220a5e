use std::fmt;

use serde_json::{Map, Value};

pub const JSON_SCHEMA: &str = "knotmorph-cli/1";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(knotmorph_core::Error),
    Io(std::io::Error),
    /// The command ran but its verdict is a failure; `output` is still printed.
    Failed { output: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Core(knotmorph_core::Error::Io(_)) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed { .. } => write!(f, "failed"),
        }
    }
}

impl From<knotmorph_core::Error> for CliError {
    fn from(e: knotmorph_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Text lines and a JSON object built side by side; one of them is printed.
pub struct Report {
    json: bool,
    lines: Vec<String>,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(json: bool, command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), Value::from(JSON_SCHEMA));
        fields.insert("command".into(), Value::from(command));
        Self {
            json,
            lines: Vec::new(),
            fields,
        }
    }

    pub fn line(&mut self, text: impl Into<String>) -> &mut Self {
        self.lines.push(text.into());
        self
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    pub fn render(self) -> String {
        if self.json {
            let mut s = serde_json::to_string_pretty(&Value::Object(self.fields)).expect("json values serialize");
            s.push('\n');
            s
        } else {
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        }
    }
}
