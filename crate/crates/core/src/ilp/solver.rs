//! Exact branch-and-bound for kernel-membership models.
//!
//! Each block of `a` variables takes one of `a(a-1)+1` patterns: all zero,
//! or `+1` at `p` and `-1` at `q`. The equality rows are tracked as running
//! residuals `S_r` together with `T_r`, the largest magnitude the unassigned
//! blocks can still contribute; a branch dies as soon as `|S_r| > T_r`.
//! A block moves `S_r` by at most its range `R` on row `r` while `T_r` drops
//! by `R`, so only rows with `T_r - |S_r| < 2R` can reject a pattern. Those
//! rows filter the patterns of every open block, and the block with the
//! fewest surviving patterns is branched on next.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::model::{BlockLayout, IlpModel, Sense, VarKind};
use crate::error::{Error, Result};
use crate::poly::Coeff;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Optimization model with a nonzero point of negative objective.
    NegativeOptimum,
    /// Optimization model whose optimum is 0.
    ZeroOptimum,
    /// A nonzero feasible point (feasibility model, or early stop).
    Feasible,
    /// No nonzero feasible point.
    Infeasible,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// The `z` part of the best point found, if any.
    pub z: Option<Vec<i64>>,
    pub objective_value: Option<Coeff>,
    pub nodes_explored: u64,
    /// A nonzero kernel point rejected only by the `delta` row.
    pub near_miss: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub node_budget: Option<u64>,
    /// Return the first nonzero feasible point instead of proving optimality.
    pub stop_at_first: bool,
    /// Only explore points whose first nonzero coordinate is `+1`.
    pub break_symmetry: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            node_budget: None,
            stop_at_first: false,
            break_symmetry: true,
        }
    }
}

pub fn solve_exact(model: &IlpModel, node_budget: Option<u64>) -> Result<SolveOutcome> {
    solve_with(model, SolveOptions {
        node_budget,
        ..SolveOptions::default()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pattern {
    Zero,
    Pair(u16, u16),
}

/// Integer form of a linear row over `z`, scaled to clear denominators.
fn scaled_row(terms: &[(usize, Coeff)], n: usize) -> (Vec<BigInt>, BigInt) {
    let lcm = terms
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut row = vec![BigInt::zero(); n];
    for (j, c) in terms {
        row[*j] = (c * Coeff::from_integer(lcm.clone())).to_integer();
    }
    (row, lcm)
}

struct Structure {
    layout: BlockLayout,
    rows: Vec<Vec<i64>>,
    /// `rows[r]` range per block: `max - min` of its coefficients there.
    ranges: Vec<Vec<i64>>,
    objective: Option<Vec<BigInt>>,
    /// Scaled `c` and the magnitude `|c . z|` must reach.
    threshold: Option<(Vec<BigInt>, BigInt)>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedModel(msg.into())
}

fn analyze(model: &IlpModel) -> Result<Structure> {
    let layout = model
        .layout
        .ok_or_else(|| malformed("solver needs a block layout (k, a)"))?;
    let (k, a) = (layout.k, layout.a);
    let n = layout.n();
    if model.variables.len() != 2 * n {
        return Err(malformed(format!("expected {} variables, found {}", 2 * n, model.variables.len())));
    }
    for (j, v) in model.variables.iter().enumerate() {
        let ok = if j < n {
            v.lower == -1 && v.upper == 1 && v.kind == VarKind::General
        } else {
            v.lower == 0 && v.upper == 1
        };
        if !ok {
            return Err(malformed(format!("unexpected bounds on {}", v.name)));
        }
    }
    let one = Coeff::one();
    let mut has_sum = vec![false; k];
    let mut has_l1 = vec![false; k];
    let mut has_abs = vec![[false; 2]; n];
    let mut rows = Vec::new();
    let mut threshold = None;
    for c in &model.constraints {
        let on_z = c.terms.iter().all(|(j, _)| *j < n);
        let on_w = c.terms.iter().all(|(j, _)| *j >= n);
        let block_of = |j: usize| (j % n) / a;
        let single_block = c
            .terms
            .first()
            .map(|(j0, _)| c.terms.iter().all(|(j, _)| block_of(*j) == block_of(*j0)))
            .unwrap_or(false);
        let all_ones = c.terms.iter().all(|(_, x)| *x == one);
        if on_z && c.sense == Sense::Eq && c.rhs.is_zero() {
            if single_block && all_ones && c.terms.len() == a {
                has_sum[block_of(c.terms[0].0)] = true;
                continue;
            }
            let (row, _) = scaled_row(&c.terms, n);
            let row = row
                .iter()
                .map(|x| x.to_i64().ok_or_else(|| malformed(format!("coefficient too large in {}", c.name))))
                .collect::<Result<Vec<i64>>>()?;
            rows.push(row);
        } else if on_w && c.sense == Sense::Le && single_block && all_ones && c.terms.len() == a
            && c.rhs == Coeff::from_integer(BigInt::from(2))
        {
            has_l1[block_of(c.terms[0].0)] = true;
        } else if c.sense == Sense::Le && c.rhs.is_zero() && c.terms.len() == 2 {
            let (zj, wj) = (&c.terms[0], &c.terms[1]);
            let sign = if zj.1 == one { 0 } else { 1 };
            if zj.0 < n && wj.0 == zj.0 + n && (zj.1 == one || zj.1 == -one.clone()) && wj.1 == -one.clone() {
                has_abs[zj.0][sign] = true;
            } else {
                return Err(malformed(format!("constraint {} is not a membership row", c.name)));
            }
        } else if on_z && c.sense == Sense::Le && c.rhs.is_negative() && threshold.is_none() {
            let (row, scale) = scaled_row(&c.terms, n);
            let need = (-&c.rhs * Coeff::from_integer(scale)).ceil().to_integer();
            threshold = Some((row, need));
        } else {
            return Err(malformed(format!("constraint {} is not a membership row", c.name)));
        }
    }
    if !has_sum.iter().all(|&x| x) || !has_l1.iter().all(|&x| x) || !has_abs.iter().all(|x| x[0] && x[1]) {
        return Err(malformed("missing block-sum, block-L1 or absolute-value rows"));
    }
    let ranges: Vec<Vec<i64>> = rows
        .iter()
        .map(|row| {
            (0..k)
                .map(|b| {
                    let blk = &row[b * a..(b + 1) * a];
                    blk.iter().max().unwrap() - blk.iter().min().unwrap()
                })
                .collect()
        })
        .collect();
    let keep: Vec<usize> = (0..rows.len()).filter(|&r| ranges[r].iter().any(|&x| x > 0)).collect();
    let rows = keep.iter().map(|&r| rows[r].clone()).collect();
    let ranges = keep.iter().map(|&r| ranges[r].clone()).collect();
    let objective = (!model.objective.is_empty()).then(|| scaled_row(&model.objective, n).0);
    Ok(Structure {
        layout,
        rows,
        ranges,
        objective,
        threshold,
    })
}

struct Search<'a> {
    s: &'a Structure,
    opts: SolveOptions,
    assign: Vec<Option<Pattern>>,
    residual: Vec<i64>,
    room: Vec<i64>,
    row_max_range: Vec<i64>,
    nodes: u64,
    exhausted: bool,
    done: bool,
    /// `(|c . z|, z)` of the best point, oriented so that `c . z <= 0`.
    best: Option<(BigInt, Vec<i64>)>,
    zero_objective: Option<Vec<i64>>,
    found: Option<Vec<i64>>,
    near_miss: Option<Vec<i64>>,
    obj_sum: BigInt,
    obj_room: BigInt,
    obj_ranges: Vec<BigInt>,
    /// Zero, then every ordered pair `(p, q)` with `p != q`.
    all_patterns: Vec<Pattern>,
}

impl<'a> Search<'a> {
    fn new(s: &'a Structure, opts: SolveOptions) -> Self {
        let k = s.layout.k;
        let a = s.layout.a;
        let room = s.ranges.iter().map(|r| r.iter().sum()).collect();
        let row_max_range = s.ranges.iter().map(|r| *r.iter().max().unwrap_or(&0)).collect();
        let obj_ranges: Vec<BigInt> = match &s.objective {
            Some(c) => (0..k)
                .map(|b| {
                    let blk = &c[b * a..(b + 1) * a];
                    blk.iter().max().unwrap() - blk.iter().min().unwrap()
                })
                .collect(),
            None => vec![BigInt::zero(); k],
        };
        let obj_room = obj_ranges.iter().sum();
        let all_patterns = std::iter::once(Pattern::Zero)
            .chain((0..a as u16).flat_map(|p| (0..a as u16).filter(move |&q| q != p).map(move |q| Pattern::Pair(p, q))))
            .collect();
        Search {
            s,
            opts,
            assign: vec![None; k],
            residual: vec![0; s.rows.len()],
            room,
            row_max_range,
            nodes: 0,
            exhausted: false,
            done: false,
            best: None,
            zero_objective: None,
            found: None,
            near_miss: None,
            obj_sum: BigInt::zero(),
            obj_room,
            obj_ranges,
            all_patterns,
        }
    }

    fn contrib(&self, r: usize, b: usize, pat: Pattern) -> i64 {
        match pat {
            Pattern::Zero => 0,
            Pattern::Pair(p, q) => {
                let base = b * self.s.layout.a;
                self.s.rows[r][base + p as usize] - self.s.rows[r][base + q as usize]
            }
        }
    }

    fn obj_contrib(&self, b: usize, pat: Pattern) -> BigInt {
        match (pat, &self.s.objective) {
            (Pattern::Pair(p, q), Some(c)) => {
                let base = b * self.s.layout.a;
                &c[base + p as usize] - &c[base + q as usize]
            }
            _ => BigInt::zero(),
        }
    }

    /// After assigning `b := pat`, can the lowest nonzero block still start with `+1`?
    fn symmetry_ok(&self, b: usize, pat: Pattern) -> bool {
        if !self.opts.break_symmetry {
            return true;
        }
        let get = |i: usize| if i == b { Some(pat) } else { self.assign[i] };
        for i in 0..self.assign.len() {
            match get(i) {
                None => return true,
                Some(Pattern::Zero) => continue,
                Some(Pattern::Pair(p, q)) => return p < q,
            }
        }
        true
    }

    fn candidates(&self, b: usize, active: &[usize]) -> Vec<Pattern> {
        let a = self.s.layout.a;
        let base = b * a;
        let mut alive: Vec<Pattern> = self.all_patterns.clone();
        for &r in active {
            let bound = self.room[r] - self.s.ranges[r][b];
            let res = self.residual[r];
            // no pattern of this block can push the row out of reach
            if res.abs() + self.s.ranges[r][b] <= bound {
                continue;
            }
            let blk = &self.s.rows[r][base..base + a];
            alive.retain(|pat| match *pat {
                Pattern::Zero => res.abs() <= bound,
                Pattern::Pair(p, q) => (res + blk[p as usize] - blk[q as usize]).abs() <= bound,
            });
            if alive.is_empty() {
                break;
            }
        }
        alive.retain(|&pat| self.symmetry_ok(b, pat));
        alive
    }

    fn apply(&mut self, b: usize, pat: Pattern, sign: i64) {
        for r in 0..self.s.rows.len() {
            self.residual[r] += sign * self.contrib(r, b, pat);
            self.room[r] -= sign * self.s.ranges[r][b];
        }
        if self.s.objective.is_some() {
            let c = self.obj_contrib(b, pat);
            if sign > 0 {
                self.obj_sum += c;
                self.obj_room -= &self.obj_ranges[b];
            } else {
                self.obj_sum -= c;
                self.obj_room += &self.obj_ranges[b];
            }
        }
        self.assign[b] = if sign > 0 { Some(pat) } else { None };
    }

    fn z(&self) -> Vec<i64> {
        let a = self.s.layout.a;
        let mut z = vec![0i64; self.s.layout.n()];
        for (b, pat) in self.assign.iter().enumerate() {
            if let Some(Pattern::Pair(p, q)) = pat {
                z[b * a + *p as usize] = 1;
                z[b * a + *q as usize] = -1;
            }
        }
        z
    }

    fn leaf(&mut self) {
        if self.assign.iter().all(|p| *p == Some(Pattern::Zero)) {
            return;
        }
        let z = self.z();
        if let Some((c, need)) = &self.s.threshold {
            let v: BigInt = c.iter().zip(&z).map(|(ci, &zi)| ci * zi).sum();
            if &v.abs() >= need {
                let sign = if v.is_positive() { -1 } else { 1 };
                self.found = Some(z.iter().map(|x| x * sign).collect());
                self.done = true;
            } else if self.near_miss.is_none() {
                self.near_miss = Some(z);
            }
            return;
        }
        if self.s.objective.is_none() || self.opts.stop_at_first {
            let v = self.obj_sum.clone();
            let sign = if v.is_positive() { -1 } else { 1 };
            self.found = Some(z.iter().map(|x| x * sign).collect());
            self.done = true;
            return;
        }
        let v = self.obj_sum.abs();
        if v.is_zero() {
            if self.zero_objective.is_none() {
                self.zero_objective = Some(z);
            }
            return;
        }
        if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
            let sign = if self.obj_sum.is_positive() { -1 } else { 1 };
            self.best = Some((v, z.iter().map(|x| x * sign).collect()));
        }
    }

    fn dfs(&mut self) {
        if self.done {
            return;
        }
        self.nodes += 1;
        if let Some(budget) = self.opts.node_budget {
            if self.nodes > budget {
                self.exhausted = true;
                self.done = true;
                return;
            }
        }
        if let Some((best, _)) = &self.best {
            if &(self.obj_sum.abs() + &self.obj_room) <= best {
                return;
            }
        }
        let open: Vec<usize> = (0..self.assign.len()).filter(|&b| self.assign[b].is_none()).collect();
        if open.is_empty() {
            self.leaf();
            return;
        }
        let active: Vec<usize> = (0..self.s.rows.len())
            .filter(|&r| self.room[r] - self.residual[r].abs() < 2 * self.row_max_range[r])
            .collect();
        let (block, cands) = if active.is_empty() {
            let b = open[0];
            (b, self.candidates(b, &active))
        } else {
            let mut best: Option<(usize, Vec<Pattern>)> = None;
            for &b in &open {
                let c = self.candidates(b, &active);
                if c.is_empty() {
                    return;
                }
                if best.as_ref().is_none_or(|(_, bc)| c.len() < bc.len()) {
                    best = Some((b, c));
                }
            }
            best.expect("open is non-empty")
        };
        for pat in cands {
            self.apply(block, pat, 1);
            self.dfs();
            self.apply(block, pat, -1);
            if self.done {
                return;
            }
        }
    }
}

/// Runs the search. A reported `z` is always re-checked against every
/// model constraint (with `w = |z|`) before it is returned.
pub fn solve_with(model: &IlpModel, opts: SolveOptions) -> Result<SolveOutcome> {
    let structure = analyze(model)?;
    let mut search = Search::new(&structure, opts);
    search.dfs();
    let nodes = search.nodes;
    let near_miss = search.near_miss.take();
    let is_opt = structure.objective.is_some();
    let (status, z) = if let Some(z) = search.found.take() {
        (SolveStatus::Feasible, Some(z))
    } else if let Some((_, z)) = search.best.take() {
        let status = if search.exhausted {
            SolveStatus::BudgetExhausted
        } else {
            SolveStatus::NegativeOptimum
        };
        (status, Some(z))
    } else if search.exhausted {
        (SolveStatus::BudgetExhausted, search.zero_objective.take())
    } else if is_opt {
        (SolveStatus::ZeroOptimum, search.zero_objective.take())
    } else {
        (SolveStatus::Infeasible, None)
    };
    let status = if search.exhausted { SolveStatus::BudgetExhausted } else { status };
    if let Some(z) = &z {
        if !model.is_feasible(&model.lift(z)) {
            return Err(malformed("solver produced a point violating the model"));
        }
    }
    let objective_value = if is_opt {
        Some(match &z {
            Some(z) => model.objective_value(z),
            None => Coeff::zero(),
        })
    } else {
        None
    };
    Ok(SolveOutcome {
        status,
        z,
        objective_value,
        nodes_explored: nodes,
        near_miss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::model::{build_membership_model, ModeKind};
    use crate::kmer::{HammingInstance, Kmer};
    use std::sync::Arc;

    fn set(inst: &Arc<HammingInstance>, words: &[&str]) -> Vec<Kmer> {
        words.iter().map(|w| Kmer::parse(w, inst).unwrap()).collect()
    }

    fn r0_solutions() -> Vec<Vec<i64>> {
        let base = [
            vec![-1, 1, 0, 0, -1, 1],
            vec![0, 1, -1, 1, -1, 0],
            vec![1, 0, -1, 1, 0, -1],
        ];
        base.iter()
            .flat_map(|z| [z.clone(), z.iter().map(|x| -x).collect()])
            .collect()
    }

    #[test]
    fn illustrative_models() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let m0 = build_membership_model(&set(&inst, &["02", "11"]), ModeKind::PowersOfTwo, None).unwrap();
        let out = solve_exact(&m0, None).unwrap();
        assert_eq!(out.status, SolveStatus::NegativeOptimum);
        let z = out.z.unwrap();
        assert!(r0_solutions().contains(&z));
        // |c.z| over the three pairs is 34, 20 and 54
        assert_eq!(z, vec![1, 0, -1, 1, 0, -1]);
        assert_eq!(out.objective_value.unwrap(), Coeff::from_integer(BigInt::from(-54)));

        let m1 = build_membership_model(&set(&inst, &["02", "11", "22"]), ModeKind::PowersOfTwo, None).unwrap();
        let out = solve_exact(&m1, None).unwrap();
        assert_eq!(out.status, SolveStatus::ZeroOptimum);
        assert!(out.z.is_none());

        let f1 = build_membership_model(&set(&inst, &["02", "11", "22"]), ModeKind::Feasibility, Some(1)).unwrap();
        let out = solve_exact(&f1, None).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.near_miss.is_none());
    }

    #[test]
    fn full_vertex_set_and_trivial_model() {
        let inst = Arc::new(HammingInstance::new(2, 2).unwrap());
        let all = set(&inst, &["00", "01", "10", "11"]);
        let m = build_membership_model(&all, ModeKind::PowersOfTwo, None).unwrap();
        assert_eq!(solve_exact(&m, None).unwrap().status, SolveStatus::ZeroOptimum);
        let inst = Arc::new(HammingInstance::new(1, 2).unwrap());
        let m = build_membership_model(&set(&inst, &["0"]), ModeKind::PowersOfTwo, None).unwrap();
        assert_eq!(solve_exact(&m, None).unwrap().status, SolveStatus::ZeroOptimum);
    }

    #[test]
    fn budget_and_malformed() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let mut m = build_membership_model(&set(&inst, &["02", "11"]), ModeKind::PowersOfTwo, None).unwrap();
        let out = solve_exact(&m, Some(1)).unwrap();
        assert_eq!(out.status, SolveStatus::BudgetExhausted);
        m.constraints.retain(|c| !c.name.starts_with("l1_"));
        assert!(matches!(solve_exact(&m, None), Err(Error::MalformedModel(_))));
        m.layout = None;
        assert!(matches!(solve_exact(&m, None), Err(Error::MalformedModel(_))));
    }

    #[test]
    fn early_stop_and_unbroken_search_agree() {
        let inst = Arc::new(HammingInstance::new(2, 3).unwrap());
        let m = build_membership_model(&set(&inst, &["02", "11"]), ModeKind::PowersOfTwo, None).unwrap();
        for break_symmetry in [true, false] {
            let out = solve_with(&m, SolveOptions {
                stop_at_first: true,
                break_symmetry,
                node_budget: None,
            })
            .unwrap();
            assert_eq!(out.status, SolveStatus::Feasible);
            assert!(r0_solutions().contains(out.z.as_ref().unwrap()));
            assert!(out.objective_value.unwrap() < Coeff::zero());
        }
    }
}
