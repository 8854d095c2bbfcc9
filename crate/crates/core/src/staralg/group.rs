use serde::{Deserialize, Serialize};

use super::GeneratorPresentation;
use crate::error::{Error, Result};
use crate::numkernel::{c, CMatrix};

/// Cayley table `{"order": m, "table": [[...]]}`.
///
/// Elements are `0..m`, `table[g][h] = g·h` (row is the left factor) and
/// element 0 must be the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyTable {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl CayleyTable {
    /// Cyclic group `Z_m`.
    pub fn cyclic(m: usize) -> Self {
        Self {
            order: m,
            table: (0..m)
                .map(|g| (0..m).map(|h| (g + h) % m).collect())
                .collect(),
        }
    }

    /// Symmetric group on three letters, elements as permutations in
    /// lexicographic order with composition `(gh)(x) = g(h(x))`.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| index([g[h[0]], g[h[1]], g[h[2]]]))
                    .collect()
            })
            .collect();
        Self { order: 6, table }
    }

    /// Checks closure, identity at 0, associativity and inverses.
    pub fn validate(&self) -> Result<()> {
        let m = self.order;
        if m == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if self.table.len() != m || self.table.iter().any(|r| r.len() != m) {
            return Err(Error::NotAGroup(format!("table is not {m}x{m}")));
        }
        if self.table.iter().flatten().any(|&x| x >= m) {
            return Err(Error::NotAGroup("closure: entry out of range".into()));
        }
        let t = &self.table;
        for g in 0..m {
            if t[0][g] != g || t[g][0] != g {
                return Err(Error::NotAGroup(format!(
                    "identity: element 0 is not neutral for {g}"
                )));
            }
        }
        for a in 0..m {
            for b in 0..m {
                for x in 0..m {
                    if t[t[a][b]][x] != t[a][t[b][x]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({a},{b},{x})"
                        )));
                    }
                }
            }
        }
        for g in 0..m {
            if !(0..m).any(|h| t[g][h] == 0 && t[h][g] == 0) {
                return Err(Error::NotAGroup(format!("inverse: {g} has none")));
            }
        }
        Ok(())
    }
}

/// Left-regular representation of `ℂ[G]`: one permutation matrix `L_g` per
/// group element, `L_g e_h = e_{gh}`.
///
/// `L_{g⁻¹} = L_gᵀ = L_g*`, so the family is already adjoint-closed and the
/// matrix adjoint realizes the group-algebra involution `g ↦ g⁻¹`.
pub fn group_algebra(table: &CayleyTable) -> Result<GeneratorPresentation> {
    table.validate()?;
    let m = table.order;
    let generators = (0..m)
        .map(|g| {
            let mut p = CMatrix::zeros(m, m);
            for h in 0..m {
                p[(table.table[g][h], h)] = c(1.0);
            }
            p
        })
        .collect();
    GeneratorPresentation::new(m, generators)
}
