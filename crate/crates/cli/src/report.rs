//! One report, two renderings. Every number is formatted once and shared by
//! the human and machine forms, so the two cannot disagree.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Human,
    /// Stable `key=value` lines.
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Line {
    Section(String),
    Field { key: String, label: String, value: String },
    /// A record with its own machine syntax, such as an orbit listing.
    Record { machine: String, human: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<Line>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn section(&mut self, title: impl Into<String>) {
        self.lines.push(Line::Section(title.into()));
    }

    pub fn field(&mut self, key: impl Into<String>, label: impl Into<String>, value: impl ToString) {
        self.lines.push(Line::Field {
            key: key.into(),
            label: label.into(),
            value: value.to_string(),
        });
    }

    pub fn record(&mut self, machine: impl Into<String>, human: impl Into<String>) {
        self.lines.push(Line::Record {
            machine: machine.into(),
            human: human.into(),
        });
    }

    pub fn render(&self, mode: OutputMode) -> String {
        let mut out = String::new();
        for line in &self.lines {
            match (line, mode) {
                (Line::Section(_), OutputMode::Machine) => continue,
                (Line::Section(t), OutputMode::Human) => {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    out.push_str(&format!("== {t} ==\n"));
                }
                (Line::Field { key, value, .. }, OutputMode::Machine) => {
                    out.push_str(&format!("{key}={value}\n"))
                }
                (Line::Field { label, value, .. }, OutputMode::Human) => {
                    out.push_str(&format!("{label:<36} {value}\n"))
                }
                (Line::Record { machine, .. }, OutputMode::Machine) => {
                    out.push_str(machine);
                    out.push('\n');
                }
                (Line::Record { human, .. }, OutputMode::Human) => {
                    out.push_str("  ");
                    out.push_str(human);
                    out.push('\n');
                }
            }
        }
        out
    }
}
