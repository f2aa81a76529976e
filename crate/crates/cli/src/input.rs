use std::path::Path;

use qglab_core::group::{GroupAxiomError, GroupTable, BUILTIN_NAMES};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed group file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("not a group: {0}")]
    Axiom(#[from] GroupAxiomError),
    #[error("unknown group {0:?}: not a builtin ({builtins}) and no such file", builtins = BUILTIN_NAMES.join(", "))]
    UnknownGroup(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("unknown construction {0:?}")]
    UnknownConstruction(String),
    #[error("invalid number {0:?} in list")]
    Number(String),
    #[error("{group} has {entries} entries per three-leg vector, above the cap of {cap} (set QGLAB_MAX_DIM to raise it)")]
    DimensionCap {
        group: String,
        entries: usize,
        cap: usize,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CayleyFile {
    name: String,
    order: usize,
    table: Vec<Vec<usize>>,
}

/// `{"name": .., "order": n, "table": [[..]; n]}`, zero-based, identity 0.
pub fn parse_cayley(bytes: &[u8]) -> Result<GroupTable, InputError> {
    let f: CayleyFile = serde_json::from_slice(bytes)?;
    Ok(GroupTable::with_order(f.name, f.order, f.table)?)
}

/// A builtin name, `all` for every builtin, or a path to a JSON table.
pub fn resolve_groups(csv: &str) -> Result<Vec<GroupTable>, InputError> {
    let mut out = Vec::new();
    for item in csv.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            out.extend(GroupTable::builtins());
        } else if let Some(g) = GroupTable::builtin(item) {
            out.push(g);
        } else if Path::new(item).is_file() {
            let bytes = std::fs::read(item).map_err(|source| InputError::Io {
                path: item.to_string(),
                source,
            })?;
            out.push(parse_cayley(&bytes)?);
        } else {
            return Err(InputError::UnknownGroup(item.to_string()));
        }
    }
    Ok(out)
}

pub fn parse_floats(csv: &str) -> Result<Vec<f64>, InputError> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| InputError::Number(s.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_parses() {
        let g = parse_cayley(br#"{"name":"Z2","order":2,"table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.mul(1, 1), 0);
    }

    #[test]
    fn non_group_is_rejected_with_the_axiom() {
        let err = parse_cayley(br#"{"name":"bad","order":2,"table":[[0,1],[1,1]]}"#).unwrap_err();
        assert!(matches!(err, InputError::Axiom(GroupAxiomError::RowRepeat { row: 1, value: 1 })));
    }

    #[test]
    fn order_mismatch_and_syntax() {
        assert!(matches!(
            parse_cayley(br#"{"name":"x","order":3,"table":[[0,1],[1,0]]}"#),
            Err(InputError::Axiom(GroupAxiomError::OrderMismatch { declared: 3, rows: 2 }))
        ));
        assert!(matches!(parse_cayley(b"{name: 1}"), Err(InputError::Syntax(_))));
    }

    #[test]
    fn s3_builtin_is_non_abelian() {
        let g = &resolve_groups("S3").unwrap()[0];
        assert_ne!(g.mul(1, 2), g.mul(2, 1));
        assert_eq!(resolve_groups("all").unwrap().len(), 11);
        assert!(matches!(resolve_groups("Z99"), Err(InputError::UnknownGroup(_))));
    }

    #[test]
    fn float_lists() {
        assert_eq!(parse_floats("0.01, 0.1,0.3").unwrap(), vec![0.01, 0.1, 0.3]);
        assert!(parse_floats("").unwrap().is_empty());
        assert!(parse_floats("x").is_err());
    }
}
