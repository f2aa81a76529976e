//! Finite groups given by Cayley tables, identity at index 0.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroupAxiomError {
    #[error("empty table")]
    Empty,
    #[error("shape: row {row} has length {len}, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("declared order {declared} but table has {rows} rows")]
    OrderMismatch { declared: usize, rows: usize },
    #[error("closure: table[{i}][{j}] = {value} is not an element index")]
    EntryOutOfRange { i: usize, j: usize, value: usize },
    #[error("identity: table[0][{j}] = {value}, expected {j}")]
    IdentityRow { j: usize, value: usize },
    #[error("identity: table[{i}][0] = {value}, expected {i}")]
    IdentityColumn { i: usize, value: usize },
    #[error("latin square: row {row} repeats element {value}")]
    RowRepeat { row: usize, value: usize },
    #[error("latin square: column {col} repeats element {value}")]
    ColumnRepeat { col: usize, value: usize },
    #[error("associativity: ({i}*{j})*{k} = {left} but {i}*({j}*{k}) = {right}")]
    NotAssociative {
        i: usize,
        j: usize,
        k: usize,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    name: String,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

pub const BUILTIN_NAMES: [&str; 11] = [
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "S3", "D4", "Q8",
];

impl GroupTable {
    /// Validate identity, closure, Latin-square and associativity axioms.
    pub fn new(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupAxiomError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupAxiomError::Empty);
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != n {
                return Err(GroupAxiomError::NotSquare { row, len: r.len(), order: n });
            }
            for (j, &value) in r.iter().enumerate() {
                if value >= n {
                    return Err(GroupAxiomError::EntryOutOfRange { i: row, j, value });
                }
            }
        }
        for j in 0..n {
            if table[0][j] != j {
                return Err(GroupAxiomError::IdentityRow { j, value: table[0][j] });
            }
        }
        for i in 0..n {
            if table[i][0] != i {
                return Err(GroupAxiomError::IdentityColumn { i, value: table[i][0] });
            }
        }
        for i in 0..n {
            let mut seen = vec![false; n];
            for &value in &table[i] {
                if std::mem::replace(&mut seen[value], true) {
                    return Err(GroupAxiomError::RowRepeat { row: i, value });
                }
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                let value = row[j];
                if std::mem::replace(&mut seen[value], true) {
                    return Err(GroupAxiomError::ColumnRepeat { col: j, value });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = table[table[i][j]][k];
                    let right = table[i][table[j][k]];
                    if left != right {
                        return Err(GroupAxiomError::NotAssociative { i, j, k, left, right });
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == 0).expect("latin rows contain the identity"))
            .collect();
        Ok(Self {
            name: name.into(),
            table,
            inverse,
        })
    }

    pub fn with_order(
        name: impl Into<String>,
        order: usize,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, GroupAxiomError> {
        if order != table.len() {
            return Err(GroupAxiomError::OrderMismatch {
                declared: order,
                rows: table.len(),
            });
        }
        Self::new(name, table)
    }

    fn from_rule(name: &str, n: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| mul(i, j)).collect()).collect();
        Self::new(name, table).expect("builtin tables are groups")
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_rule(&format!("Z{n}"), n, |i, j| (i + j) % n)
    }

    /// Permutations of {0,1,2} in lexicographic order, product `(p∘q)(i) = p(q(i))`.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        Self::from_rule("S3", 6, |a, b| {
            let (p, q) = (perms[a], perms[b]);
            let c = [p[q[0]], p[q[1]], p[q[2]]];
            perms.iter().position(|x| *x == c).unwrap()
        })
    }

    /// Dihedral group of order 8: index `k + 4m` is `r^k s^m`.
    pub fn dihedral4() -> Self {
        Self::from_rule("D4", 8, |a, b| {
            let (k1, m1) = (a % 4, a / 4);
            let (k2, m2) = (b % 4, b / 4);
            let k = if m1 == 0 { k1 + k2 } else { k1 + 4 - k2 } % 4;
            k + 4 * ((m1 + m2) % 2)
        })
    }

    /// Quaternion group: index `u + 4s` is `(−1)^s · [1, i, j, k][u]`.
    pub fn quaternion8() -> Self {
        // unit products as (sign flip, unit)
        const UNITS: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_rule("Q8", 8, |a, b| {
            let (flip, u) = UNITS[a % 4][b % 4];
            u + 4 * ((a / 4 + b / 4 + flip) % 2)
        })
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "S3" => Some(Self::symmetric3()),
            "D4" => Some(Self::dihedral4()),
            "Q8" => Some(Self::quaternion8()),
            _ => {
                let n: usize = name.strip_prefix('Z')?.parse().ok()?;
                (1..=8).contains(&n).then(|| Self::cyclic(n))
            }
        }
    }

    pub fn builtins() -> Vec<Self> {
        BUILTIN_NAMES
            .iter()
            .map(|n| Self::builtin(n).unwrap())
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }
}
