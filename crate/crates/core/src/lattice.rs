//! Torus geometry, momentum grids and integer-indexed trigonometry.
//!
//! Sites of the torus Λ_ℓ = {0,…,ℓ−1}^d are ordered lexicographically and
//! addressed by their rank in that order. Momenta live on the dual grid
//! (2π/ℓ)·{−ℓ/2+1,…,ℓ/2}^d. All trigonometric values used in lattice sums
//! come from one table indexed by the integer t = Σᵢ mᵢxᵢ mod ℓ, so equal
//! angles are represented by bit-identical floats regardless of which code
//! path produced them.

use crate::{Error, Result};

/// A d-dimensional discrete torus of even side length ℓ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torus {
    d: usize,
    ell: usize,
}

impl Torus {
    /// Side length must be even (reflection planes and the k = π momentum
    /// both require it); dimension must be positive.
    pub fn new(d: usize, ell: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("dimension must be ≥ 1".into()));
        }
        if ell < 2 || ell % 2 != 0 {
            return Err(Error::Parameter(format!(
                "side length must be even and ≥ 2, got {ell}"
            )));
        }
        Ok(Self { d, ell })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.ell
    }

    /// Number of sites ℓ^d.
    pub fn n_sites(&self) -> usize {
        self.ell.pow(self.d as u32)
    }

    /// Sites in lexicographic order (last coordinate fastest).
    pub fn sites(&self) -> Vec<Vec<usize>> {
        (0..self.n_sites()).map(|r| self.site(r)).collect()
    }

    /// Decode a lexicographic rank into coordinates.
    pub fn site(&self, rank: usize) -> Vec<usize> {
        let mut x = vec![0usize; self.d];
        let mut r = rank;
        for i in (0..self.d).rev() {
            x[i] = r % self.ell;
            r /= self.ell;
        }
        x
    }

    /// Lexicographic rank of a site given by coordinates.
    pub fn rank(&self, x: &[usize]) -> usize {
        debug_assert_eq!(x.len(), self.d);
        x.iter().fold(0, |acc, &xi| acc * self.ell + xi)
    }

    /// Componentwise difference x − y modulo ℓ.
    pub fn diff(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| (a + self.ell - b) % self.ell)
            .collect()
    }

    /// Rank of the difference x − y mod ℓ, with x, y given by rank.
    pub fn diff_rank(&self, x: usize, y: usize) -> usize {
        let (mut r, mut a, mut b) = (0usize, x, y);
        // walk digits from the most significant side to keep lexicographic
        // semantics identical to diff() on coordinates
        let mut pow = self.n_sites() / self.ell;
        for _ in 0..self.d {
            let da = a / pow;
            let db = b / pow;
            r = r * self.ell + (da + self.ell - db) % self.ell;
            a %= pow;
            b %= pow;
            pow = if pow == 1 { 1 } else { pow / self.ell };
        }
        r
    }
}

/// Cosines and sines of 2πt/ℓ for t = 0,…,ℓ−1.
#[derive(Debug, Clone)]
pub struct TrigTable {
    ell: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    pub fn new(ell: usize) -> Self {
        let step = 2.0 * std::f64::consts::PI / ell as f64;
        let cos = (0..ell).map(|t| (step * t as f64).cos()).collect();
        let sin = (0..ell).map(|t| (step * t as f64).sin()).collect();
        Self { ell, cos, sin }
    }

    /// cos(2πt/ℓ) for any integer t (reduced mod ℓ).
    pub fn cos(&self, t: i64) -> f64 {
        self.cos[t.rem_euclid(self.ell as i64) as usize]
    }

    /// sin(2πt/ℓ) for any integer t (reduced mod ℓ).
    pub fn sin(&self, t: i64) -> f64 {
        self.sin[t.rem_euclid(self.ell as i64) as usize]
    }
}

/// A momentum k = (2π/ℓ)m on the dual grid, stored by its integer vector m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Momentum {
    pub m: Vec<i64>,
}

impl Momentum {
    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&mi| mi == 0)
    }

    /// True when every component equals π, i.e. mᵢ = ℓ/2.
    pub fn is_pi(&self, ell: usize) -> bool {
        self.m.iter().all(|&mi| mi == (ell / 2) as i64)
    }

    /// Integer phase t = Σᵢ mᵢxᵢ for a site x; the angle is 2πt/ℓ.
    pub fn phase(&self, x: &[usize]) -> i64 {
        self.m
            .iter()
            .zip(x)
            .map(|(&mi, &xi)| mi * xi as i64)
            .sum()
    }

    /// Components as angles in (−π, π].
    pub fn angles(&self, ell: usize) -> Vec<f64> {
        let step = 2.0 * std::f64::consts::PI / ell as f64;
        self.m.iter().map(|&mi| step * mi as f64).collect()
    }
}

/// The dual grid (2π/ℓ)·{−ℓ/2+1,…,ℓ/2}^d in lexicographic order over m.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    pub torus: Torus,
    momenta: Vec<Momentum>,
}

impl MomentumGrid {
    pub fn new(torus: &Torus) -> Self {
        let half = (torus.side() / 2) as i64;
        let range: Vec<i64> = (-half + 1..=half).collect();
        let mut momenta = Vec::with_capacity(torus.n_sites());
        let mut m = vec![0usize; torus.dimension()];
        loop {
            momenta.push(Momentum {
                m: m.iter().map(|&i| range[i]).collect(),
            });
            // odometer over index space, last coordinate fastest
            let mut i = torus.dimension();
            loop {
                if i == 0 {
                    return Self {
                        torus: torus.clone(),
                        momenta,
                    };
                }
                i -= 1;
                m[i] += 1;
                if m[i] < range.len() {
                    break;
                }
                m[i] = 0;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Momentum> {
        self.momenta.iter()
    }

    /// All momenta except k = 0.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = &Momentum> {
        self.momenta.iter().filter(|k| !k.is_zero())
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_order_is_lexicographic() {
        let t = Torus::new(2, 4).unwrap();
        let sites = t.sites();
        assert_eq!(sites.len(), 16);
        assert_eq!(sites[0], vec![0, 0]);
        assert_eq!(sites[1], vec![0, 1]);
        assert_eq!(sites[4], vec![1, 0]);
        for (r, s) in sites.iter().enumerate() {
            assert_eq!(t.rank(s), r);
            assert_eq!(&t.site(r), s);
        }
    }

    #[test]
    fn diff_rank_matches_coordinate_diff() {
        let t = Torus::new(3, 4).unwrap();
        for x in 0..t.n_sites() {
            for y in [0, 1, 17, 63] {
                let expect = t.rank(&t.diff(&t.site(x), &t.site(y)));
                assert_eq!(t.diff_rank(x, y), expect);
            }
        }
    }

    #[test]
    fn rejects_odd_side() {
        assert!(Torus::new(1, 5).is_err());
        assert!(Torus::new(0, 4).is_err());
    }

    #[test]
    fn momentum_grid_contains_zero_once_and_closes_under_negation() {
        let t = Torus::new(2, 4).unwrap();
        let g = MomentumGrid::new(&t);
        assert_eq!(g.len(), 16);
        assert_eq!(g.iter().filter(|k| k.is_zero()).count(), 1);
        let ell = 4i64;
        for k in g.iter() {
            // −m identified mod ℓ must be on the grid
            let neg: Vec<i64> = k
                .m
                .iter()
                .map(|&mi| {
                    let mut v = (-mi).rem_euclid(ell);
                    if v > ell / 2 {
                        v -= ell;
                    }
                    v
                })
                .collect();
            assert!(g.iter().any(|q| q.m == neg), "missing −k for {:?}", k.m);
        }
    }

    #[test]
    fn trig_table_matches_direct_evaluation() {
        let t = TrigTable::new(8);
        // direct evaluation at the unreduced angle carries O(|angle|·eps)
        // argument error, so the comparison cannot be tighter than ~1e-14
        for i in -20i64..20 {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
            assert!((t.cos(i) - angle.cos()).abs() < 1e-14);
            assert!((t.sin(i) - angle.sin()).abs() < 1e-14);
        }
    }
}
