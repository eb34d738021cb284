//! The cut player: maintain the random walk over the matching sequence,
//! project it onto a random direction orthogonal to the all-ones vector,
//! and emit the median bisection.
//!
//! Two representations coexist. The exact `WalkMatrix` (rationals, O(n^2)
//! memory) drives termination and verification; the floating-point
//! projection vector drives the bisection at any size, where only the
//! ordering of entries matters. The projection is rebuilt each round by
//! replaying all matchings over a fresh random direction, never by
//! materializing the matrix.

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matching_player::DirectedPerfectMatching;
use crate::rational::{rat_usize, BigRational};

/// Exact walk matrix: `entry(i, j)` is the probability that a particle
/// starting at j ends at i after the walk over the matchings applied so
/// far. Doubly stochastic by construction, starting from the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkMatrix {
    n: usize,
    t: usize,
    rows: Vec<Vec<BigRational>>,
}

impl WalkMatrix {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        WalkMatrix { n, t: 0, rows }
    }

    /// Builds a matrix from explicit rows (row i is the end-at-i
    /// probability vector). Intended for tests and verifiers; no
    /// stochasticity is enforced here.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter("walk matrix must be square".into()));
        }
        Ok(WalkMatrix { n, t: 0, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.t
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    /// One simultaneous walk step: for every matching arc (i, j), the new
    /// row j is the average of the old rows i and j. All reads come from
    /// the pre-round matrix.
    pub fn apply_matching(&self, matching: &DirectedPerfectMatching) -> Result<WalkMatrix> {
        if matching.n() != self.n {
            return Err(Error::VertexCountMismatch { expected: self.n, got: matching.n() });
        }
        matching.check_perfect()?;
        let pairs: Vec<(usize, usize)> = matching.arc_pairs().collect();
        self.apply_pairs(&pairs)
    }

    /// Same update from raw (tail, head) pairs; the pairs must satisfy the
    /// perfect-degree conditions.
    pub fn apply_pairs(&self, pairs: &[(usize, usize)]) -> Result<WalkMatrix> {
        check_perfect_pairs(self.n, pairs)?;
        let half = BigRational::new(1.into(), 2.into());
        let mut rows = self.rows.clone();
        for &(i, j) in pairs {
            let updated: Vec<BigRational> = self.rows[i]
                .iter()
                .zip(&self.rows[j])
                .map(|(a, b)| (a + b) * &half)
                .collect();
            rows[j] = updated;
        }
        Ok(WalkMatrix { n: self.n, t: self.t + 1, rows })
    }

    /// The potential: the squared distance of every row from uniform,
    /// summed. Starts at n - 1 and never increases under matching steps.
    pub fn potential(&self) -> BigRational {
        let uniform = rat_usize(1, self.n);
        let mut total = BigRational::zero();
        for row in &self.rows {
            for entry in row {
                let diff = entry - &uniform;
                total += &diff * &diff;
            }
        }
        total
    }

    /// The exact potential drop a matching step would cause:
    /// one quarter of the summed squared row differences over the
    /// matching's arcs.
    pub fn potential_drop_of(&self, matching: &DirectedPerfectMatching) -> Result<BigRational> {
        if matching.n() != self.n {
            return Err(Error::VertexCountMismatch { expected: self.n, got: matching.n() });
        }
        let quarter = BigRational::new(1.into(), 4.into());
        let mut total = BigRational::zero();
        for (i, j) in matching.arc_pairs() {
            total += self.row_distance_sq(i, j);
        }
        Ok(total * quarter)
    }

    /// Squared Euclidean distance between rows i and j, exact.
    pub fn row_distance_sq(&self, i: usize, j: usize) -> BigRational {
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(a, b)| {
                let diff = a - b;
                &diff * &diff
            })
            .sum()
    }

    pub fn min_entry(&self) -> BigRational {
        self.rows
            .iter()
            .flatten()
            .min()
            .cloned()
            .expect("walk matrix is nonempty")
    }

    /// Mixing test: every entry at least 1/(2n), compared exactly.
    pub fn is_mixing(&self) -> bool {
        self.min_entry() >= rat_usize(1, 2 * self.n)
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        let one = BigRational::one();
        for row in &self.rows {
            if row.iter().sum::<BigRational>() != one {
                return false;
            }
        }
        for j in 0..self.n {
            let col: BigRational = self.rows.iter().map(|row| row[j].clone()).sum();
            if col != one {
                return false;
            }
        }
        true
    }

    /// Projects each row onto `direction` in floating point:
    /// `u[i] = row_i . direction`. Oracle counterpart of the replayed
    /// projection.
    pub fn project(&self, direction: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(direction)
                    .map(|(p, r)| p.to_f64().expect("walk entries are finite") * r)
                    .sum()
            })
            .collect()
    }
}

pub(crate) fn check_perfect_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<()> {
    let mut out_degree = vec![0usize; n];
    let mut in_degree = vec![0usize; n];
    for &(tail, head) in pairs {
        if tail >= n || head >= n {
            return Err(Error::NotPerfectMatching(format!(
                "arc ({tail}, {head}) out of range for n = {n}"
            )));
        }
        out_degree[tail] += 1;
        in_degree[head] += 1;
    }
    for v in 0..n {
        if out_degree[v] != 1 || in_degree[v] != 1 {
            return Err(Error::NotPerfectMatching(format!(
                "vertex {v} has out-degree {} and in-degree {}",
                out_degree[v], in_degree[v]
            )));
        }
    }
    Ok(())
}

/// A uniformly random unit vector from the (n-1)-dimensional subspace
/// orthogonal to the all-ones vector: a standard normal sample, mean
/// subtracted, normalized. Resamples in the measure-zero event of a
/// near-zero vector.
pub fn sample_orthogonal_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    assert!(n >= 2, "need at least two vertices to bisect");
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        for x in &mut v {
            *x -= mean;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}

/// The projected walk state for one round: `u[i]` is the projection of the
/// walk row for vertex i onto the round's random direction, which is kept
/// for audit.
#[derive(Debug, Clone)]
pub struct ProjectionVector {
    pub u: Vec<f64>,
    pub direction: Vec<f64>,
}

/// Rebuilds the projection by replaying every matching over the fresh
/// direction: u starts at r (the identity walk projects to r itself) and
/// each round averages u across its matching arcs, double-buffered.
/// Costs O(n) per matching.
pub fn replay_walk_projection(
    direction: &[f64],
    matchings: &[DirectedPerfectMatching],
) -> Result<ProjectionVector> {
    let n = direction.len();
    let mut u = direction.to_vec();
    for matching in matchings {
        if matching.n() != n {
            return Err(Error::VertexCountMismatch { expected: n, got: matching.n() });
        }
        matching.check_perfect()?;
        let pairs: Vec<(usize, usize)> = matching.arc_pairs().collect();
        apply_round_to_vector(&mut u, &pairs);
    }
    Ok(ProjectionVector { u, direction: direction.to_vec() })
}

/// One double-buffered averaging round on a projection vector. Callers
/// must have validated the pairs.
pub(crate) fn apply_round_to_vector(u: &mut Vec<f64>, pairs: &[(usize, usize)]) {
    let old = u.clone();
    for &(i, j) in pairs {
        u[j] = 0.5 * (old[i] + old[j]);
    }
}

/// An equal split of the vertex set produced by the median rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    /// The n/2 vertices with smallest projection values, sorted by index.
    pub side: Vec<usize>,
}

/// The median bisection: S is the n/2 indices with smallest u values,
/// ties broken by ascending vertex index. Rejects odd n.
pub fn median_bisection(projection: &ProjectionVector) -> Result<Bisection> {
    let n = projection.u.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::OddVertexCount(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        projection.u[a].total_cmp(&projection.u[b]).then(a.cmp(&b))
    });
    let mut side = order[..n / 2].to_vec();
    side.sort_unstable();
    Ok(Bisection { side })
}

#[cfg(test)]
pub(crate) mod walk_fixtures {
    use super::*;
    use crate::matching_player::EmbeddedArc;
    use rand::seq::SliceRandom;

    /// A synthetic perfect directed matching from a random permutation;
    /// embeddings are irrelevant for walk arithmetic and left empty.
    pub fn random_permutation_matching<R: Rng + ?Sized>(
        n: usize,
        rng: &mut R,
    ) -> DirectedPerfectMatching {
        let mut targets: Vec<usize> = (0..n).collect();
        targets.shuffle(rng);
        let forward = (0..n)
            .map(|i| EmbeddedArc { tail: i, head: targets[i], path: vec![] })
            .collect();
        DirectedPerfectMatching::new(n, forward, vec![]).unwrap()
    }
}
