use std::path::PathBuf;

use branchcut::cut::{Plane, Rect};
use branchcut::series::{CaseId, ExpansionPoint};
use serde::Serialize;

/// Where a logarithmic spec comes from: a JSON file or a built-in table entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecSource {
    File(PathBuf),
    Case(CaseId),
    Segment,
}

impl SpecSource {
    pub fn parse(text: &str) -> Result<Self, String> {
        match text.strip_prefix("builtin:") {
            Some("segment") => Ok(SpecSource::Segment),
            Some(name) => name
                .parse::<CaseId>()
                .map(SpecSource::Case)
                .map_err(|_| format!("unknown built-in spec {name:?} (expected A, B, C, D or segment)")),
            None => Ok(SpecSource::File(PathBuf::from(text))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpecSource::File(p) => p.file_stem().map_or("spec".into(), |s| s.to_string_lossy().into_owned()),
            SpecSource::Case(c) => format!("case_{c}"),
            SpecSource::Segment => "segment".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Case {
        case: CaseId,
        degree: usize,
        band: f64,
    },
    Logfn {
        spec: SpecSource,
        expansion: ExpansionPoint,
        degree: usize,
        plane: Plane,
        band: f64,
    },
    Convergence {
        spec: SpecSource,
        point: [f64; 2],
        degrees: Vec<usize>,
        capacity: Option<f64>,
    },
    Badness {
        spec: SpecSource,
        rect: Rect,
        grid: usize,
        eps: f64,
        degrees: Vec<usize>,
    },
    Hem {
        network: PathBuf,
        alpha: f64,
        max_m: usize,
        tol: f64,
    },
    Snbp {
        network: PathBuf,
        max_m: usize,
        horizon: f64,
    },
}

/// Everything a run depends on. Identical configurations produce identical
/// output files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub bits: u32,
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub command: Command,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.bits < 64 {
            return Err(format!("--bits must be at least 64, got {}", self.bits));
        }
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be positive and finite, got {x}"))
            }
        };
        let ascending = |degrees: &[usize], min_len: usize| {
            if degrees.len() < min_len {
                return Err(format!("--degrees needs at least {min_len} entries"));
            }
            if degrees.iter().any(|&d| d == 0) || degrees.windows(2).any(|w| w[0] >= w[1]) {
                return Err("--degrees must be positive and strictly ascending".to_string());
            }
            Ok(())
        };
        match &self.command {
            Command::Case { degree, band, .. } | Command::Logfn { degree, band, .. } => {
                if *degree == 0 {
                    return Err("--degree must be positive".into());
                }
                positive("--band", *band)?;
            }
            Command::Convergence {
                point,
                degrees,
                capacity,
                ..
            } => {
                if !point.iter().all(|x| x.is_finite()) {
                    return Err("--point must be finite".into());
                }
                ascending(degrees, 3)?;
                if let Some(c) = capacity {
                    positive("--capacity", *c)?;
                }
            }
            Command::Badness {
                rect, grid, eps, degrees, ..
            } => {
                if !(rect.x_max > rect.x_min && rect.y_max > rect.y_min) {
                    return Err("--rect must be x_min,x_max,y_min,y_max with x_min < x_max and y_min < y_max".into());
                }
                if *grid < 8 {
                    return Err(format!("--grid must be at least 8, got {grid}"));
                }
                positive("--eps", *eps)?;
                ascending(degrees, 1)?;
            }
            Command::Hem { alpha, max_m, tol, .. } => {
                positive("--alpha", *alpha)?;
                positive("--tol", *tol)?;
                if *max_m == 0 {
                    return Err("--max-m must be positive".into());
                }
            }
            Command::Snbp { max_m, horizon, .. } => {
                if *max_m < 10 {
                    return Err(format!("--max-m must be at least 10, got {max_m}"));
                }
                positive("--horizon", *horizon)?;
            }
        }
        Ok(())
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("cannot parse {s:?} in {text:?}")))
        .collect()
}

/// `re` or `re,im`.
pub fn parse_point(text: &str) -> Result<[f64; 2], String> {
    match parse_list::<f64>(text)?.as_slice() {
        [re] => Ok([*re, 0.0]),
        [re, im] => Ok([*re, *im]),
        _ => Err(format!("point {text:?} must be re or re,im")),
    }
}

pub fn parse_rect(text: &str) -> Result<Rect, String> {
    match parse_list::<f64>(text)?.as_slice() {
        [x_min, x_max, y_min, y_max] => Ok(Rect {
            x_min: *x_min,
            x_max: *x_max,
            y_min: *y_min,
            y_max: *y_max,
        }),
        _ => Err(format!("rect {text:?} must be x_min,x_max,y_min,y_max")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(command: Command) -> RunConfig {
        RunConfig {
            bits: 512,
            out: None,
            command,
        }
    }

    #[test]
    fn spec_sources() {
        assert_eq!(SpecSource::parse("builtin:B"), Ok(SpecSource::Case(CaseId::B)));
        assert_eq!(SpecSource::parse("builtin:segment"), Ok(SpecSource::Segment));
        assert!(SpecSource::parse("builtin:E").is_err());
        assert_eq!(SpecSource::parse("x.json"), Ok(SpecSource::File("x.json".into())));
        assert_eq!(SpecSource::parse("dir/eq13.json").unwrap().label(), "eq13");
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list::<usize>("10, 15,20"), Ok(vec![10, 15, 20]));
        assert!(parse_list::<usize>("10,x").is_err());
        assert_eq!(parse_point("4"), Ok([4.0, 0.0]));
        assert_eq!(parse_point("4,-1"), Ok([4.0, -1.0]));
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_rect("-4,4,-4").is_err());
    }

    #[test]
    fn validation() {
        let conv = |degrees: Vec<usize>| {
            config(Command::Convergence {
                spec: SpecSource::Segment,
                point: [4.0, 0.0],
                degrees,
                capacity: None,
            })
        };
        assert!(conv(vec![10, 15, 20]).validate().is_ok());
        assert!(conv(vec![10, 15]).validate().is_err());
        assert!(conv(vec![10, 20, 15]).validate().is_err());
        let mut low = conv(vec![1, 2, 3]);
        low.bits = 32;
        assert!(low.validate().is_err());
        let bad = config(Command::Badness {
            spec: SpecSource::Segment,
            rect: Rect::square(4.0),
            grid: 4,
            eps: 1e-3,
            degrees: vec![5],
        });
        assert!(bad.validate().unwrap_err().contains("--grid"));
        let snbp = config(Command::Snbp {
            network: "n.json".into(),
            max_m: 5,
            horizon: 10.0,
        });
        assert!(snbp.validate().is_err());
    }
}
