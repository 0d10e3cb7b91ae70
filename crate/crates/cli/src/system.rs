//! Polynomial system files and component files.
//!
//! A system file is line oriented; `#` starts a comment.
//!
//! ```text
//! variables x y z
//! equality x^2 - y^2*z
//! inequality 1 - (x^2 + y^2 + (z + 2)^2)
//! option order = 4
//! ```
//!
//! A component file lists irreducible components over the variables of a system,
//! each introduced by `component <dimension>` and followed by one generator per line.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use realrad_core::polycore::RationalPoly;

use crate::parse::{is_identifier, parse_polynomial_at, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityMode {
    /// `g_j − s_j² = 0` with slack variables.
    Slack,
    /// `g_j` as localizing constraints.
    Localizing,
}

impl FromStr for InequalityMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "slack" => Ok(InequalityMode::Slack),
            "localizing" => Ok(InequalityMode::Localizing),
            _ => Err(format!("unknown inequality mode '{}' (slack|localizing)", s)),
        }
    }
}

impl fmt::Display for InequalityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityMode::Slack => "slack",
            InequalityMode::Localizing => "localizing",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BallSetting {
    Off,
    Radius(f64),
}

impl FromStr for BallSetting {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(BallSetting::Off);
        }
        match s.parse::<f64>() {
            Ok(r) if r > 0.0 && r.is_finite() => Ok(BallSetting::Radius(r)),
            _ => Err(format!("ball must be 'none' or a positive radius, got '{}'", s)),
        }
    }
}

impl fmt::Display for BallSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallSetting::Off => f.write_str("none"),
            BallSetting::Radius(r) => write!(f, "{}", r),
        }
    }
}

/// Settings read from `option key = value` lines. Command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SystemOptions {
    pub order: Option<u32>,
    pub degree: Option<u32>,
    pub max_degree: Option<u32>,
    pub epsilon: Option<f64>,
    pub radius: Option<f64>,
    pub seed: Option<u64>,
    pub tau_zero: Option<f64>,
    pub tau_rank: Option<f64>,
    pub ball: Option<BallSetting>,
    pub inequalities: Option<InequalityMode>,
}

pub const OPTION_KEYS: &[&str] =
    &["order", "degree", "max_degree", "epsilon", "radius", "seed", "tau_zero", "tau_rank", "ball", "inequalities"];

fn parse_value<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("invalid value '{}': {}", v, e))
}

impl SystemOptions {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "order" => self.order = Some(parse_value(value)?),
            "degree" => self.degree = Some(parse_value(value)?),
            "max_degree" => self.max_degree = Some(parse_value(value)?),
            "epsilon" => self.epsilon = Some(parse_value(value)?),
            "radius" => self.radius = Some(parse_value(value)?),
            "seed" => self.seed = Some(parse_value(value)?),
            "tau_zero" => self.tau_zero = Some(parse_value(value)?),
            "tau_rank" => self.tau_rank = Some(parse_value(value)?),
            "ball" => self.ball = Some(value.parse()?),
            "inequalities" => self.inequalities = Some(value.parse()?),
            _ => return Err(format!("unknown option '{}' (expected one of {})", key, OPTION_KEYS.join(", "))),
        }
        Ok(())
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        fn push<T: fmt::Display>(out: &mut Vec<(&'static str, String)>, k: &'static str, v: &Option<T>) {
            if let Some(v) = v {
                out.push((k, v.to_string()));
            }
        }
        let mut out = Vec::new();
        push(&mut out, "order", &self.order);
        push(&mut out, "degree", &self.degree);
        push(&mut out, "max_degree", &self.max_degree);
        push(&mut out, "epsilon", &self.epsilon);
        push(&mut out, "radius", &self.radius);
        push(&mut out, "seed", &self.seed);
        push(&mut out, "tau_zero", &self.tau_zero);
        push(&mut out, "tau_rank", &self.tau_rank);
        push(&mut out, "ball", &self.ball);
        push(&mut out, "inequalities", &self.inequalities);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub variables: Vec<String>,
    pub equalities: Vec<RationalPoly>,
    pub inequalities: Vec<RationalPoly>,
    pub options: SystemOptions,
}

impl SystemFile {
    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(String::as_str).collect()
    }
}

/// Splits off an optional `#` comment and returns the first word, the rest and the column of the rest.
fn split_line(raw: &str) -> Option<(&str, &str, usize)> {
    let body = raw.split('#').next().unwrap_or("");
    let trimmed = body.trim_start();
    if trimmed.trim().is_empty() {
        return None;
    }
    let lead = body.len() - trimmed.len();
    let (word, rest) = match trimmed.find(char::is_whitespace) {
        Some(i) => (&trimmed[..i], &trimmed[i..]),
        None => (trimmed, ""),
    };
    let rest_trim = rest.trim_start();
    let col = lead + word.len() + (rest.len() - rest_trim.len());
    Some((word, rest_trim.trim_end(), body[..col].chars().count() + 1))
}

fn error(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

pub fn parse_system(src: &str) -> Result<SystemFile, ParseError> {
    let mut variables: Option<Vec<String>> = None;
    let mut equalities = Vec::new();
    let mut inequalities = Vec::new();
    let mut options = SystemOptions::default();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let Some((word, rest, col)) = split_line(raw) else { continue };
        match word {
            "variables" => {
                if variables.is_some() {
                    return Err(error(line, 1, "variables declared twice"));
                }
                let names: Vec<String> =
                    rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(String::from).collect();
                if names.is_empty() {
                    return Err(error(line, col, "no variables declared"));
                }
                for (k, n) in names.iter().enumerate() {
                    if !is_identifier(n) {
                        return Err(error(line, col, format!("'{}' is not an identifier", n)));
                    }
                    if names[..k].contains(n) {
                        return Err(error(line, col, format!("variable '{}' declared twice", n)));
                    }
                }
                variables = Some(names);
            }
            "equality" | "inequality" => {
                let vars = variables.as_deref().ok_or_else(|| error(line, 1, "expressions must follow the variables line"))?;
                if rest.is_empty() {
                    return Err(error(line, col, "missing expression"));
                }
                let p = parse_polynomial_at(rest, vars, line, col)?;
                if word == "equality" {
                    equalities.push(p);
                } else {
                    inequalities.push(p);
                }
            }
            "option" => {
                let (k, v) = rest.split_once('=').ok_or_else(|| error(line, col, "expected 'option key = value'"))?;
                options.set(k.trim(), v.trim()).map_err(|m| error(line, col, m))?;
            }
            _ => {
                let at = raw.chars().take_while(|c| c.is_whitespace()).count() + 1;
                return Err(error(line, at, format!("unknown directive '{}'", word)));
            }
        }
    }
    let variables = variables.ok_or_else(|| error(1, 1, "missing variables line"))?;
    Ok(SystemFile { variables, equalities, inequalities, options })
}

/// Canonical text: variables, equalities, inequalities, then options in a fixed key order.
pub fn print_system(s: &SystemFile) -> String {
    let names = s.names();
    let mut out = String::new();
    let _ = writeln!(out, "variables {}", s.variables.join(" "));
    for p in &s.equalities {
        let _ = writeln!(out, "equality {}", p.to_display_string(&names));
    }
    for p in &s.inequalities {
        let _ = writeln!(out, "inequality {}", p.to_display_string(&names));
    }
    for (k, v) in s.options.entries() {
        let _ = writeln!(out, "option {} = {}", k, v);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSpec {
    pub dimension: usize,
    pub generators: Vec<RationalPoly>,
}

pub fn parse_components(src: &str, vars: &[String]) -> Result<Vec<ComponentSpec>, ParseError> {
    let mut out: Vec<ComponentSpec> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let Some((word, rest, col)) = split_line(raw) else { continue };
        if word == "component" {
            let dimension = rest.parse::<usize>().map_err(|_| error(line, col, "expected 'component <dimension>'"))?;
            if dimension > vars.len() {
                return Err(error(line, col, format!("dimension {} exceeds {} variables", dimension, vars.len())));
            }
            out.push(ComponentSpec { dimension, generators: Vec::new() });
        } else {
            let current = out.last_mut().ok_or_else(|| error(line, 1, "generator before the first 'component' header"))?;
            let body = raw.split('#').next().unwrap_or("");
            let start = body.len() - body.trim_start().len();
            current.generators.push(parse_polynomial_at(body.trim(), vars, line, start + 1)?);
        }
    }
    if let Some(c) = out.iter().position(|c| c.generators.is_empty()) {
        return Err(error(1, 1, format!("component {} has no generators", c + 1)));
    }
    if out.is_empty() {
        return Err(error(1, 1, "no components"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WHITNEY: &str = "# Whitney umbrella inside a ball\n\
        variables x, y, z\n\
        equality x^2 - y^2*z\n\
        inequality 1 - (x^2 + y^2 + (z + 2)^2)   # 1 - |(x, y, z + 2)|^2\n\
        option inequalities = slack\n\
        option order = 4\n";

    #[test]
    fn parses_directives() {
        let s = parse_system(WHITNEY).unwrap();
        assert_eq!(s.variables, vec!["x", "y", "z"]);
        assert_eq!(s.equalities.len(), 1);
        assert_eq!(s.inequalities[0].to_display_string(&s.names()), "-z^2 - y^2 - x^2 - 4*z - 3");
        assert_eq!(s.options.order, Some(4));
        assert_eq!(s.options.inequalities, Some(InequalityMode::Slack));
    }

    #[test]
    fn canonical_round_trip() {
        let s = parse_system(WHITNEY).unwrap();
        let canon = print_system(&s);
        let again = parse_system(&canon).unwrap();
        assert_eq!(again, s);
        assert_eq!(print_system(&again), canon);
        assert_eq!(
            canon,
            "variables x y z\nequality -y^2*z + x^2\ninequality -z^2 - y^2 - x^2 - 4*z - 3\n\
             option order = 4\noption inequalities = slack\n"
        );
    }

    #[test]
    fn errors_point_at_the_offending_line() {
        let e = parse_system("variables x y\nequality x + 2y\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 15));
        let e = parse_system("equality x\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_system("variables x\noption colour = red\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown option"));
        let e = parse_system("variables x\nsolve x\n").unwrap_err();
        assert!(e.message.contains("unknown directive"));
        assert!(parse_system("variables x x\n").is_err());
        assert!(parse_system("variables x\noption ball = -1\n").is_err());
    }

    #[test]
    fn components() {
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let src = "component 1\ny\nz\n\n# the point\ncomponent 0\nx\n2*y + 1\n2*z - 1\n";
        let c = parse_components(src, &vars).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].dimension, c[0].generators.len()), (1, 2));
        assert_eq!((c[1].dimension, c[1].generators.len()), (0, 3));
        let e = parse_components("x\n", &vars).unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_components("component 1\n  y + w\n", &vars).unwrap_err();
        assert_eq!((e.line, e.column), (2, 7));
    }
}
