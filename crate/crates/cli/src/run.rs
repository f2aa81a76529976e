use qglab_core::diagonals::{obad_records, theta_records, thm33_records, DiagonalContext, SweepOptions};
use qglab_core::dualside::{dual_records, lemma32_records, lemma42_records, lemma43_records, thm44_records, DualContext};
use qglab_core::exec::{map_ordered, ExecMode};
use qglab_core::group::GroupTable;
use qglab_core::qgcore::catalog::{structure_records, StructureOptions, IDENTITY_TOL};
use qglab_core::qgcore::FiniteQuantumGroup;
use qglab_core::report::{CheckRecord, CheckReport};

use crate::input::InputError;

pub const DEFAULT_MAX_DIM: usize = 1728;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Structure,
    Lemma32,
    Lemma42,
    Lemma43,
    Theta,
    Thm33,
    Obad,
    Dual,
    Thm44,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Structure,
        Suite::Lemma32,
        Suite::Lemma42,
        Suite::Lemma43,
        Suite::Theta,
        Suite::Thm33,
        Suite::Obad,
        Suite::Dual,
        Suite::Thm44,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Lemma32 => "lemma32",
            Suite::Lemma42 => "lemma42",
            Suite::Lemma43 => "lemma43",
            Suite::Theta => "theta",
            Suite::Thm33 => "thm33",
            Suite::Obad => "obad",
            Suite::Dual => "dual",
            Suite::Thm44 => "thm44",
        }
    }

    pub fn parse(s: &str) -> Result<Self, InputError> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| InputError::UnknownSuite(s.to_string()))
    }

    /// Comma separated; `all` expands to every suite, empty means none.
    pub fn parse_list(csv: &str) -> Result<Vec<Self>, InputError> {
        let mut out = Vec::new();
        for item in csv.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                out.extend(Self::ALL);
            } else {
                out.push(Self::parse(item)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Whether the suite works with vectors or operators on H⊗H⊗H.
    pub fn three_legs(self) -> bool {
        !matches!(self, Suite::Structure)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionChoice {
    FunctionAlgebra,
    GroupAlgebra,
    Both,
}

impl ConstructionChoice {
    pub fn parse(s: &str) -> Result<Self, InputError> {
        match s {
            "function-algebra" => Ok(Self::FunctionAlgebra),
            "group-algebra" => Ok(Self::GroupAlgebra),
            "both" => Ok(Self::Both),
            other => Err(InputError::UnknownConstruction(other.to_string())),
        }
    }

    fn sides(self) -> &'static [bool] {
        match self {
            Self::FunctionAlgebra => &[false],
            Self::GroupAlgebra => &[true],
            Self::Both => &[false, true],
        }
    }
}

/// Random draws per check, by kind.
#[derive(Clone, Copy, Debug)]
pub struct Draws {
    pub structure: usize,
    pub lemma: usize,
    pub theta: usize,
    pub bound: usize,
}

impl Default for Draws {
    fn default() -> Self {
        Self {
            structure: 4,
            lemma: 50,
            theta: 20,
            bound: 100,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub groups: Vec<GroupTable>,
    pub construction: ConstructionChoice,
    pub suites: Vec<Suite>,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
    pub draws: Draws,
    /// Cap on entries of a three-leg vector; two-leg suites may use up to a
    /// third of it as the entries of a two-leg operator's side.
    pub max_dim: usize,
    pub mode: ExecMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            groups: GroupTable::builtins(),
            construction: ConstructionChoice::Both,
            suites: Suite::ALL.to_vec(),
            epsilons: vec![0.01, 0.1, 0.3],
            seed: 0,
            tol: IDENTITY_TOL,
            draws: Draws::default(),
            max_dim: DEFAULT_MAX_DIM,
            mode: ExecMode::default(),
        }
    }
}

impl RunConfig {
    fn check_caps(&self) -> Result<(), InputError> {
        for g in &self.groups {
            let n = g.order();
            for s in &self.suites {
                let (entries, cap) = if s.three_legs() {
                    (n.pow(3), self.max_dim)
                } else {
                    (n * n, self.max_dim / 3)
                };
                if entries > cap {
                    return Err(InputError::DimensionCap {
                        group: g.name().to_string(),
                        entries,
                        cap,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Every selected suite on every selected group and construction. Records
/// come back sorted, so the report does not depend on scheduling.
pub fn run_suites(cfg: &RunConfig) -> Result<CheckReport, InputError> {
    cfg.check_caps()?;
    if cfg.suites.is_empty() {
        return Ok(CheckReport::new(cfg.seed, Vec::new()));
    }
    let jobs: Vec<(&GroupTable, bool)> = cfg
        .groups
        .iter()
        .flat_map(|g| cfg.construction.sides().iter().map(move |&s| (g, s)))
        .collect();
    let per_job = map_ordered(cfg.mode, &jobs, |&(g, group_algebra)| run_one(cfg, g, group_algebra));
    Ok(CheckReport::new(cfg.seed, per_job.into_iter().flatten().collect()))
}

fn run_one(cfg: &RunConfig, g: &GroupTable, group_algebra: bool) -> Vec<CheckRecord> {
    let built = if group_algebra {
        FiniteQuantumGroup::from_cayley_group_algebra(g)
    } else {
        FiniteQuantumGroup::from_cayley_function_algebra(g)
    };
    let construction = if group_algebra { "group-algebra" } else { "function-algebra" };
    let broken = |what: &str| {
        let label = qglab_core::report::Label {
            group: g.name().to_string(),
            construction: construction.to_string(),
        };
        vec![CheckRecord::residual("construction", what, "Definition 2.1", &label, f64::INFINITY, cfg.tol)]
    };
    let q = match built {
        Ok(q) => q,
        Err(_) => return broken("quantum group construction"),
    };
    let needs_dual = cfg
        .suites
        .iter()
        .any(|s| !matches!(s, Suite::Structure | Suite::Theta | Suite::Thm33 | Suite::Obad));
    let ctx = match DualContext::new(&q) {
        Ok(c) => c,
        Err(_) if needs_dual => return broken("dual construction"),
        Err(_) => match DiagonalContext::new(&q) {
            Ok(side) => return run_side_only(cfg, &q, &side),
            Err(_) => return broken("block decomposition"),
        },
    };
    let sweep = |draws: usize| SweepOptions {
        seed: cfg.seed,
        draws,
        epsilons: cfg.epsilons.clone(),
        tol: cfg.tol,
        mode: cfg.mode,
    };
    let mut out = Vec::new();
    for s in &cfg.suites {
        match s {
            Suite::Structure => out.extend(structure_records(&q, &structure_opts(cfg))),
            Suite::Lemma32 => out.extend(lemma32_records(&ctx, &sweep(cfg.draws.lemma))),
            Suite::Lemma42 => out.extend(lemma42_records(&ctx, &sweep(cfg.draws.lemma))),
            Suite::Lemma43 => out.extend(lemma43_records(&ctx, &sweep(cfg.draws.lemma))),
            Suite::Theta => out.extend(theta_records(ctx.side(), &sweep(cfg.draws.theta))),
            Suite::Thm33 => out.extend(thm33_records(ctx.side(), &sweep(cfg.draws.bound))),
            Suite::Obad => out.extend(obad_records(ctx.side(), &sweep(cfg.draws.bound))),
            Suite::Dual => out.extend(dual_records(&ctx, &sweep(cfg.draws.lemma))),
            Suite::Thm44 => out.extend(thm44_records(&ctx, &sweep(cfg.draws.bound))),
        }
    }
    out
}

fn structure_opts(cfg: &RunConfig) -> StructureOptions {
    StructureOptions {
        tol: cfg.tol,
        seed: cfg.seed,
        draws: cfg.draws.structure,
    }
}

fn run_side_only(cfg: &RunConfig, q: &FiniteQuantumGroup, side: &DiagonalContext) -> Vec<CheckRecord> {
    let sweep = |draws: usize| SweepOptions {
        seed: cfg.seed,
        draws,
        epsilons: cfg.epsilons.clone(),
        tol: cfg.tol,
        mode: cfg.mode,
    };
    let mut out = Vec::new();
    for s in &cfg.suites {
        match s {
            Suite::Structure => out.extend(structure_records(q, &structure_opts(cfg))),
            Suite::Theta => out.extend(theta_records(side, &sweep(cfg.draws.theta))),
            Suite::Thm33 => out.extend(thm33_records(side, &sweep(cfg.draws.bound))),
            Suite::Obad => out.extend(obad_records(side, &sweep(cfg.draws.bound))),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lists() {
        assert_eq!(Suite::parse_list("").unwrap(), vec![]);
        assert_eq!(Suite::parse_list("all").unwrap().len(), 9);
        assert_eq!(Suite::parse_list("thm33, obad,thm33").unwrap(), vec![Suite::Thm33, Suite::Obad]);
        assert!(matches!(Suite::parse_list("thm99"), Err(InputError::UnknownSuite(_))));
    }

    #[test]
    fn constructions() {
        assert_eq!(ConstructionChoice::parse("both").unwrap().sides(), &[false, true]);
        assert!(ConstructionChoice::parse("group").is_err());
    }
}
