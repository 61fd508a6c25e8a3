//! The textbook metric-dimension program over all vertices: binary `y_v`,
//! one covering row per vertex pair, minimize `sum y_v`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::model::{Constraint, IlpModel, ObjectiveMode, Sense, VarKind, Variable};
use crate::error::{Error, Result};
use crate::kmer::{symbol_distance, HammingInstance, Kmer};
use crate::poly::Coeff;

pub const DEFAULT_CLASSIC_CAP: u128 = 64;

pub fn build_classic_min_model(instance: &Arc<HammingInstance>, size_cap: u128) -> Result<IlpModel> {
    let count = instance.vertex_count();
    if count > size_cap {
        return Err(Error::InstanceTooLarge {
            vertices: count,
            cap: size_cap,
        });
    }
    let vertices: Vec<Kmer> = (0..count).map(|i| Kmer::from_index(instance, i)).collect();
    let n = vertices.len();
    let variables = vertices
        .iter()
        .map(|v| Variable {
            name: format!("y_{}", v.render().replace(',', "_")),
            lower: 0,
            upper: 1,
            kind: VarKind::Binary,
        })
        .collect();
    // dist[u][j] = d(u, j)
    let dist: Vec<Vec<i64>> = vertices
        .iter()
        .map(|u| vertices.iter().map(|j| symbol_distance(u.symbols(), j.symbols()) as i64).collect())
        .collect();
    let mut constraints = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            let terms = (0..n)
                .filter_map(|j| {
                    let w = (dist[u][j] - dist[v][j]).abs();
                    (w != 0).then(|| (j, Coeff::from_integer(BigInt::from(w))))
                })
                .collect();
            constraints.push(Constraint {
                name: format!("pair_{}_{}", u + 1, v + 1),
                terms,
                sense: Sense::Ge,
                rhs: Coeff::one(),
            });
        }
    }
    Ok(IlpModel {
        variables,
        constraints,
        objective: (0..n).map(|j| (j, Coeff::one())).collect(),
        mode: ObjectiveMode::PowersOfTwo,
        layout: None,
    })
}

/// Exact optimum of a covering model (`>= 1` rows with nonnegative
/// coefficients, binary variables, unit objective): the minimum number of
/// variables set to 1, and one optimal choice.
pub fn solve_covering(model: &IlpModel) -> Result<(usize, Vec<usize>)> {
    let n = model.variables.len();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(model.constraints.len());
    for c in &model.constraints {
        // a single chosen variable must be enough to satisfy the row
        let ok = c.sense == Sense::Ge
            && c.rhs.is_positive()
            && c.terms.iter().all(|(_, x)| *x >= c.rhs);
        if !ok {
            return Err(Error::MalformedModel(format!("{} is not a covering row", c.name)));
        }
        if c.terms.is_empty() {
            return Err(Error::MalformedModel(format!("{} cannot be satisfied", c.name)));
        }
        rows.push(c.terms.iter().map(|(j, _)| *j).collect());
    }
    if model.objective.len() != n || !model.objective.iter().all(|(_, c)| c.is_one()) {
        return Err(Error::MalformedModel("objective must be the sum of all variables".into()));
    }
    let mut chosen = vec![false; n];
    let mut best: Vec<usize> = (0..n).collect();
    let mut picked = Vec::new();
    cover(&rows, &mut chosen, &mut picked, &mut best);
    Ok((best.len(), best))
}

fn cover(rows: &[Vec<usize>], chosen: &mut [bool], picked: &mut Vec<usize>, best: &mut Vec<usize>) {
    let open = rows.iter().find(|r| !r.iter().any(|&j| chosen[j]));
    let Some(row) = open else {
        if picked.len() < best.len() {
            *best = picked.clone();
        }
        return;
    };
    if picked.len() + 1 >= best.len() {
        return;
    }
    for &j in row {
        chosen[j] = true;
        picked.push(j);
        cover(rows, chosen, picked, best);
        picked.pop();
        chosen[j] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta(k: usize, a: usize) -> usize {
        let inst = Arc::new(HammingInstance::new(k, a).unwrap());
        solve_covering(&build_classic_min_model(&inst, DEFAULT_CLASSIC_CAP).unwrap()).unwrap().0
    }

    #[test]
    fn small_metric_dimensions() {
        assert_eq!(beta(1, 2), 1);
        assert_eq!(beta(1, 3), 2);
        assert_eq!(beta(2, 3), 3);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = Arc::new(HammingInstance::new(4, 3).unwrap());
        assert!(matches!(
            build_classic_min_model(&inst, DEFAULT_CLASSIC_CAP),
            Err(Error::InstanceTooLarge { vertices: 81, cap: 64 })
        ));
    }
}
