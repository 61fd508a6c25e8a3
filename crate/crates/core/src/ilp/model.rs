//! Integer programs over the kernel of the model matrix.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::normal::normal_vector;
use crate::error::{Error, Result};
use crate::kmer::Kmer;
use crate::matrix::ModelMatrix;
use crate::poly::Coeff;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    General,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    pub fn holds(self, lhs: &Coeff, rhs: &Coeff) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`, no zero coefficients.
    pub terms: Vec<(usize, Coeff)>,
    pub sense: Sense,
    pub rhs: Coeff,
}

impl Constraint {
    pub fn lhs(&self, x: &[i64]) -> Coeff {
        self.terms
            .iter()
            .fold(Coeff::zero(), |acc, (j, c)| acc + c * Coeff::from_integer(BigInt::from(x[*j])))
    }

    pub fn holds(&self, x: &[i64]) -> bool {
        self.sense.holds(&self.lhs(x), &self.rhs)
    }
}

/// How the objective row is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Minimize `sum_j 2^j z_j`, `j` counted from 1.
    PowersOfTwo,
    /// Minimize `sum_j c_j z_j` with seeded standard-normal `c_j`.
    RandomNormal { seed: u64 },
    /// No objective; require `<c, z> <= -delta`. `c` is random-normal when
    /// seeded and powers of two otherwise.
    Feasibility { seed: Option<u64>, delta: Coeff },
}

impl ObjectiveMode {
    pub fn label(&self) -> String {
        match self {
            ObjectiveMode::PowersOfTwo => "powers-of-two".into(),
            ObjectiveMode::RandomNormal { seed } => format!("random-normal seed={seed}"),
            ObjectiveMode::Feasibility { seed: Some(s), delta } => {
                format!("feasibility seed={s} delta={}", decimal_string(delta).unwrap_or_default())
            }
            ObjectiveMode::Feasibility { seed: None, delta } => {
                format!("feasibility delta={}", decimal_string(delta).unwrap_or_default())
            }
        }
    }
}

/// Requested objective for [`build_membership_model`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModeKind {
    #[default]
    PowersOfTwo,
    RandomNormal,
    Feasibility,
}

/// `k` blocks of `a` variables: `z` occupies indices `0..ak`, `w` occupies `ak..2ak`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub k: usize,
    pub a: usize,
}

impl BlockLayout {
    pub fn n(&self) -> usize {
        self.k * self.a
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimized; empty for pure feasibility problems.
    pub objective: Vec<(usize, Coeff)>,
    pub mode: ObjectiveMode,
    pub layout: Option<BlockLayout>,
}

impl IlpModel {
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn objective_value(&self, x: &[i64]) -> Coeff {
        self.objective
            .iter()
            .fold(Coeff::zero(), |acc, (j, c)| acc + c * Coeff::from_integer(BigInt::from(x[*j])))
    }

    /// Every bound and constraint holds at the integer point `x`.
    pub fn is_feasible(&self, x: &[i64]) -> bool {
        x.len() == self.variables.len()
            && self
                .variables
                .iter()
                .zip(x)
                .all(|(v, &xi)| v.lower <= xi && xi <= v.upper)
            && self.constraints.iter().all(|c| c.holds(x))
    }

    /// The `z` part extended with `w_j = |z_j|`, for membership models.
    pub fn lift(&self, z: &[i64]) -> Vec<i64> {
        let mut x = z.to_vec();
        if self.variables.len() == 2 * z.len() {
            x.extend(z.iter().map(|v| v.abs()));
        }
        x
    }

    pub fn count_rows(&self, sense: Sense) -> usize {
        self.constraints.iter().filter(|c| c.sense == sense).count()
    }
}

/// `delta = 10^-3`.
pub fn default_delta() -> Coeff {
    Coeff::new(BigInt::one(), BigInt::from(1000))
}

/// `2^1, ..., 2^n` as exact integers.
pub fn powers_of_two(n: usize) -> Vec<Coeff> {
    (1..=n)
        .map(|j| Coeff::from_integer(BigInt::one() << j))
        .collect()
}

/// Seeded standard normals rounded to 12 decimal places, held exactly.
pub fn random_normal_coefficients(seed: u64, n: usize) -> Vec<Coeff> {
    let scale = 1_000_000_000_000i64;
    normal_vector(seed, n)
        .into_iter()
        .map(|x| Coeff::new(BigInt::from((x * scale as f64).round() as i64), BigInt::from(scale)))
        .collect()
}

pub fn build_membership_model(set: &[Kmer], mode: ModeKind, seed: Option<u64>) -> Result<IlpModel> {
    build_membership_model_with_delta(set, mode, seed, default_delta())
}

/// The kernel-membership program: `A z = 0`, block sums zero, block L1 norm
/// at most 2 through `w`, plus the objective or threshold row.
pub fn build_membership_model_with_delta(
    set: &[Kmer],
    mode: ModeKind,
    seed: Option<u64>,
    delta: Coeff,
) -> Result<IlpModel> {
    let matrix = ModelMatrix::build(set)?;
    let (k, a) = (matrix.instance().k(), matrix.instance().a());
    let n = k * a;
    let mut variables: Vec<Variable> = (1..=n)
        .map(|j| Variable {
            name: format!("z{j}"),
            lower: -1,
            upper: 1,
            kind: VarKind::General,
        })
        .collect();
    variables.extend((1..=n).map(|j| Variable {
        name: format!("w{j}"),
        lower: 0,
        upper: 1,
        kind: VarKind::Binary,
    }));

    let one = Coeff::one;
    let mut constraints = Vec::new();
    for (i, row) in matrix.rows().iter().enumerate() {
        constraints.push(Constraint {
            name: format!("a{}", i + 1),
            terms: row
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| (j, Coeff::from_integer(BigInt::from(x))))
                .collect(),
            sense: Sense::Eq,
            rhs: Coeff::zero(),
        });
    }
    for b in 0..k {
        constraints.push(Constraint {
            name: format!("blk{}", b + 1),
            terms: (b * a..(b + 1) * a).map(|j| (j, one())).collect(),
            sense: Sense::Eq,
            rhs: Coeff::zero(),
        });
    }
    for b in 0..k {
        constraints.push(Constraint {
            name: format!("l1_{}", b + 1),
            terms: (b * a..(b + 1) * a).map(|j| (n + j, one())).collect(),
            sense: Sense::Le,
            rhs: Coeff::from_integer(BigInt::from(2)),
        });
    }
    for j in 0..n {
        constraints.push(Constraint {
            name: format!("absp{}", j + 1),
            terms: vec![(j, one()), (n + j, -one())],
            sense: Sense::Le,
            rhs: Coeff::zero(),
        });
        constraints.push(Constraint {
            name: format!("absn{}", j + 1),
            terms: vec![(j, -one()), (n + j, -one())],
            sense: Sense::Le,
            rhs: Coeff::zero(),
        });
    }

    let (mode, coeffs) = match mode {
        ModeKind::PowersOfTwo => (ObjectiveMode::PowersOfTwo, powers_of_two(n)),
        ModeKind::RandomNormal => {
            let seed = seed.ok_or(Error::MissingSeed)?;
            (ObjectiveMode::RandomNormal { seed }, random_normal_coefficients(seed, n))
        }
        ModeKind::Feasibility => {
            let c = match seed {
                Some(s) => random_normal_coefficients(s, n),
                None => powers_of_two(n),
            };
            (ObjectiveMode::Feasibility { seed, delta }, c)
        }
    };
    let weighted: Vec<(usize, Coeff)> = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let objective = match &mode {
        ObjectiveMode::Feasibility { delta, .. } => {
            constraints.push(Constraint {
                name: "delta".into(),
                terms: weighted,
                sense: Sense::Le,
                rhs: -delta.clone(),
            });
            Vec::new()
        }
        _ => weighted,
    };
    Ok(IlpModel {
        variables,
        constraints,
        objective,
        mode,
        layout: Some(BlockLayout { k, a }),
    })
}

/// Exact decimal rendering of a rational whose denominator has only the prime factors 2 and 5.
pub fn decimal_string(c: &Coeff) -> Option<String> {
    let mut den = c.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = c * Coeff::from_integer(BigInt::from(10).pow(places));
    let int = scaled.to_integer();
    if places == 0 {
        return Some(int.to_string());
    }
    let negative = int < BigInt::zero();
    let digits = if negative { (-&int).to_string() } else { int.to_string() };
    let digits = format!("{digits:0>width$}", width = places as usize + 1);
    let (whole, frac) = digits.split_at(digits.len() - places as usize);
    Some(format!("{}{whole}.{frac}", if negative { "-" } else { "" }))
}

impl fmt::Display for IlpModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} variables, {} constraints, objective {}",
            self.variables.len(),
            self.constraints.len(),
            self.mode.label()
        )
    }
}
