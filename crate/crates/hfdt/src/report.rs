//! Report assembly: a config header, body lines and a result trailer.

use crate::config::{Format, RunConfig};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Refuted = 1,
    Usage = 2,
    Budget = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn name(self) -> &'static str {
        match self {
            Exit::Ok => "ok",
            Exit::Refuted => "refuted",
            Exit::Usage => "usage",
            Exit::Budget => "budget",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub lines: Vec<String>,
    /// Machine-readable `key=value` results, in insertion order.
    pub fields: Vec<(String, String)>,
    pub exit: Exit,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.into(), lines: Vec::new(), fields: Vec::new(), exit: Exit::Ok }
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Report {
        self.lines.push(s.into());
        self
    }

    pub fn field(&mut self, k: &str, v: impl ToString) -> &mut Report {
        self.fields.push((k.into(), v.to_string()));
        self
    }

    pub fn exit(&mut self, e: Exit) -> &mut Report {
        self.exit = e;
        self
    }

    /// Human format prints body lines only; machine format adds the config
    /// header (`#`-prefixed TOML) and a `key=value` trailer.
    pub fn render(&self, cfg: &RunConfig) -> String {
        let mut out = String::new();
        match cfg.format {
            Format::Human => {
                for l in &self.lines {
                    out.push_str(l);
                    out.push('\n');
                }
            }
            Format::Machine => {
                out.push_str(&format!("# command = {:?}\n", self.command));
                for l in cfg.to_toml().lines().filter(|l| !l.is_empty()) {
                    out.push_str("# ");
                    out.push_str(l);
                    out.push('\n');
                }
                for l in &self.lines {
                    out.push_str(l);
                    out.push('\n');
                }
                for (k, v) in &self.fields {
                    out.push_str(&format!("{}={}\n", k, v));
                }
                out.push_str(&format!("exit={}\n", self.exit.name()));
            }
        }
        out
    }
}
