//! Closed formulas and bounds: full boxes, two-dimensional Ferrers diagrams,
//! Segre products, the `μ` bound and profile bounds.

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Plane, Point};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::num::{self, Count};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("empty partition".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("partition {parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("partition {parts:?} is not weakly decreasing")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `λ_j`, 1-based; 0 past the end.
    pub fn part(&self, j: usize) -> u32 {
        self.parts.get(j.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// The two-dimensional diagram `{(i, j, 1) : j ≤ λ_i}`.
    pub fn to_diagram(&self) -> Diagram {
        Diagram::from_layers(self.parts.iter().map(|&l| vec![1; l as usize]).collect())
            .expect("partitions give Ferrers diagrams")
    }

    /// Ring dimension `λ_1 + n − 1` of the fiber ring.
    pub fn ring_dim(&self) -> u32 {
        self.parts[0] + self.parts.len() as u32 - 1
    }
}

/// All partitions of `n`, parts in decreasing lexicographic order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegreFactor<T: Count> {
    pub dim: u32,
    pub reg: u32,
    #[serde(serialize_with = "num::serialize_count", bound(deserialize = "T: Deserialize<'de>"))]
    pub mult: T,
}

/// `(a+b+c−3)! / ((a−1)!(b−1)!(c−1)!)`.
pub fn rect_multiplicity<T: Count>(a: u32, b: u32, c: u32) -> Result<T> {
    check_positive(a, b, c)?;
    let (a, b, c) = (a as u64, b as u64, c as u64);
    num::mul(&num::binomial(a + b + c - 3, a - 1)?, &num::binomial(b + c - 2, b - 1)?)
}

/// `a' + b' − 2` for the two smallest sides.
pub fn rect_regularity(a: u32, b: u32, c: u32) -> Result<u32> {
    check_positive(a, b, c)?;
    let mut s = [a, b, c];
    s.sort_unstable();
    Ok(s[0] + s[1] - 2)
}

fn check_positive(a: u32, b: u32, c: u32) -> Result<()> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::InvalidInput(format!("box sides must be >= 1, got {a}x{b}x{c}")));
    }
    Ok(())
}

/// Outcome of the two-branch regularity formula for a two-dimensional
/// Ferrers diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Reg2d {
    /// Exactly one branch applies, or there is no 2-minor at all.
    Value { reg: u32 },
    /// Both branch guards hold. `long_rows` is `s − 1`, `twos` is
    /// `min{j − 1 : λ_j = 2}`.
    Ambiguous { long_rows: u32, twos: u32 },
    /// Neither guard holds.
    Gap,
}

impl Reg2d {
    /// Single value, with the `λ_s = 2` branch taking precedence when both
    /// guards hold. That branch matched brute force on every ambiguous
    /// partition of at most 10 cells.
    pub fn resolved(self) -> Option<u32> {
        match self {
            Reg2d::Value { reg } => Some(reg),
            Reg2d::Ambiguous { twos, .. } => Some(twos),
            Reg2d::Gap => None,
        }
    }
}

/// The two-branch formula, evaluated literally. `s` is the last index with
/// `λ_s ≥ 2`; the first branch is guarded by `λ_2 ≥ 3`, the second by
/// `λ_s = 2`. Partitions with a single row or no part ≥ 2 have no minors
/// and get 0.
pub fn ferrers2d_regularity(lambda: &Partition) -> Reg2d {
    let n = lambda.len();
    let s = lambda.parts().iter().rposition(|&x| x >= 2).map_or(0, |p| p + 1);
    if n == 1 || s == 0 {
        return Reg2d::Value { reg: 0 };
    }
    let long_rows = (lambda.part(2) >= 3).then(|| s as u32 - 1);
    let twos = (lambda.part(s) == 2)
        .then(|| lambda.parts().iter().position(|&x| x == 2).unwrap() as u32);
    match (long_rows, twos) {
        (Some(a), Some(b)) => Reg2d::Ambiguous { long_rows: a, twos: b },
        (Some(reg), None) | (None, Some(reg)) => Reg2d::Value { reg },
        (None, None) => Reg2d::Gap,
    }
}

/// The nested sum
/// `Σ_{j_{n−2}=λ_2−λ_n+1}^{λ_2} Σ_{j_{n−3}=λ_2−λ_{n−1}+1}^{j_{n−2}} ⋯ Σ_{j_1=λ_2−λ_3+1}^{j_2} j_1`,
/// with `λ_2` for `n = 2` and 1 for `n = 1`.
pub fn ferrers2d_multiplicity<T: Count>(lambda: &Partition) -> Result<T> {
    let n = lambda.len();
    let l2 = lambda.part(2) as usize;
    match n {
        1 => return Ok(T::one()),
        2 => return num::from_u64(l2 as u64),
        _ => {}
    }
    let low = |t: usize| l2 - lambda.part(t + 2) as usize + 1;
    // g[x] = value of the inner sums with the current outer index equal to x.
    let mut g: Vec<T> = (0..=l2).map(|x| num::from_u64(x as u64)).collect::<Result<_>>()?;
    for t in 2..=n - 2 {
        let lo = low(t - 1);
        let mut next = vec![T::zero(); l2 + 1];
        let mut acc = T::zero();
        for x in 0..=l2 {
            if x >= lo {
                acc = num::add(&acc, &g[x])?;
            }
            next[x] = acc.clone();
        }
        g = next;
    }
    let lo = low(n - 2);
    let mut total = T::zero();
    for v in g.iter().take(l2 + 1).skip(lo) {
        total = num::add(&total, v)?;
    }
    Ok(total)
}

/// `μ_D − 2` with `μ_D = min(a+b, a+c, b+c)`.
pub fn mu_bound(d: &Diagram) -> u32 {
    let (a, b, c) = d.essential_dims();
    (a + b).min(a + c).min(b + c) - 2
}

/// Dimension, regularity and multiplicity of a Segre product.
pub fn segre_combine<T: Count>(factors: &[SegreFactor<T>]) -> Result<SegreFactor<T>> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidInput("no Segre factors".into()))?;
    if let Some(f) = factors.iter().find(|f| f.dim == 0) {
        return Err(Error::InvalidInput(format!("factor of dimension 0: {f:?}")));
    }
    let s = factors.len() as u32;
    let dim_sum: u32 = factors.iter().map(|f| f.dim).sum();
    let dim = dim_sum - (s - 1);
    let reg = if factors.iter().all(|f| f.dim == 1) {
        factors.iter().map(|f| f.reg).max().unwrap()
    } else {
        if let Some(f) = factors.iter().find(|f| f.reg >= f.dim) {
            return Err(Error::HypothesisFailed(format!(
                "factor with reg {} >= dim {}",
                f.reg, f.dim
            )));
        }
        dim - factors.iter().map(|f| f.dim - f.reg).max().unwrap()
    };
    let mut acc_dim = first.dim;
    let mut mult = first.mult.clone();
    for f in &factors[1..] {
        let c: T = num::binomial((acc_dim + f.dim - 2) as u64, (acc_dim - 1) as u64)?;
        mult = num::mul(&num::mul(&c, &mult)?, &f.mult)?;
        acc_dim += f.dim - 1;
    }
    Ok(SegreFactor { dim, reg, mult })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct BoundPair<T: Count> {
    pub reg: u32,
    #[serde(serialize_with = "num::serialize_count")]
    pub mult: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct ProfileBounds<T: Count> {
    pub profile: Partition,
    /// Regularity of the profile's fiber ring, computed by the engine.
    pub profile_reg: u32,
    /// What the two-branch formula says for the profile.
    pub profile_reg_formula: Reg2d,
    #[serde(serialize_with = "num::serialize_count")]
    pub profile_mult: T,
    /// Bounds from the Segre product of the profile with `K[z_1..z_c]`.
    pub from_profile: BoundPair<T>,
    /// Bounds from the bounding box.
    pub from_box: BoundPair<T>,
    /// Componentwise minimum of the two.
    pub best: BoundPair<T>,
}

/// Upper bounds on `reg` and `e` for a diagram with the strong projection
/// property, from its `(x, y)`-profile and from its bounding box.
pub fn profile_bounds<T: Count>(d: &Diagram, engine: &Engine<T>) -> Result<ProfileBounds<T>> {
    if !d.has_strong_projection_property() {
        return Err(Error::UnsupportedDiagram(
            "profile bounds need the strong projection property".into(),
        ));
    }
    let (a, b, c) = d.essential_dims();
    let profile = d.profile(Plane::XY);
    let profile_reg = engine.invariants(&profile.to_diagram())?.reg;
    let profile_mult: T = ferrers2d_multiplicity(&profile)?;
    let total = a + b + c - 2;
    let from_profile = BoundPair {
        reg: total - (a + b - 1 - profile_reg).max(c),
        mult: num::mul(&num::binomial((a + b + c - 3) as u64, (c - 1) as u64)?, &profile_mult)?,
    };
    let from_box: BoundPair<T> = BoundPair {
        reg: rect_regularity(a, b, c)?,
        mult: rect_multiplicity(a, b, c)?,
    };
    let best = BoundPair {
        reg: from_profile.reg.min(from_box.reg),
        mult: from_profile.mult.clone().min(from_box.mult.clone()),
    };
    Ok(ProfileBounds {
        profile_reg_formula: ferrers2d_regularity(&profile),
        profile,
        profile_reg,
        profile_mult,
        from_profile,
        from_box,
        best,
    })
}

/// The reduction number of `I_D`, equal to the regularity of its fiber
/// ring. Full boxes are checked against `a' + b' − 2`.
pub fn reduction_number<T: Count>(d: &Diagram, engine: &Engine<T>) -> Result<u32> {
    let reg = engine.invariants(d)?.reg;
    let (a, b, c) = d.essential_dims();
    if d.len() == (a * b * c) as usize {
        debug_assert!(d.contains(Point::new(a, b, c)));
        let expected = rect_regularity(a, b, c)?;
        if reg != expected {
            return Err(Error::Internal(format!(
                "box {a}x{b}x{c}: reduction number {reg}, expected {expected}"
            )));
        }
    }
    Ok(reg)
}
