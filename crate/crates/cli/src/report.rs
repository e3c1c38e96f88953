//! Deterministic plain-text reports: a provenance block echoing every
//! resolved input, then the results. No timestamps, so a rerun with the
//! same inputs is byte-identical.

#[derive(Debug, Default)]
pub struct Report {
    inputs: Vec<(String, String)>,
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.inputs.push(("command".into(), command.into()));
        r
    }

    pub fn input(&mut self, key: &str, value: impl std::fmt::Display) {
        self.inputs.push((key.into(), value.to_string()));
    }

    pub fn input_sci(&mut self, key: &str, value: f64) {
        self.inputs.push((key.into(), format!("{value:.6e}")));
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn blank(&mut self) {
        self.lines.push(String::new());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.inputs {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push('\n');
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn print(&self) {
        print!("{}", self.render());
    }
}
