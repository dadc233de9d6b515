use rustc_hash::FxHashMap;

use crate::error::{precondition, Result};
use crate::lattice::{LatticePoint, LocalTimeField};

/// Pointwise product `Π_j L_n^{(j)}(x)` of the local times of `m` walks,
/// kept on the common support together with the individual counts.
#[derive(Debug, Clone)]
pub struct ProductField {
    n: u64,
    m: usize,
    points: Vec<LatticePoint>,
    /// `m` counts per point, flattened.
    counts: Vec<u32>,
    products: Vec<u128>,
    index: FxHashMap<u64, u32>,
}

/// Builds the product field; all inputs must share the horizon `n`.
pub fn product_local_time(fields: &[&LocalTimeField]) -> Result<ProductField> {
    let Some((first, rest)) = fields.split_first() else {
        return Err(precondition("need at least one local-time field"));
    };
    let n = first.total_steps();
    if let Some(bad) = rest.iter().find(|f| f.total_steps() != n) {
        return Err(precondition(format!("horizons differ: {n} vs {}", bad.total_steps())));
    }
    // Scan the smallest support and probe the others.
    let pivot = (0..fields.len()).min_by_key(|&j| fields[j].len()).expect("non-empty");
    let m = fields.len();
    let mut out = ProductField {
        n,
        m,
        points: Vec::new(),
        counts: Vec::new(),
        products: Vec::new(),
        index: FxHashMap::default(),
    };
    let mut row = vec![0u32; m];
    'points: for &key in fields[pivot].raw().keys() {
        for (j, f) in fields.iter().enumerate() {
            match f.raw().get(&key) {
                Some(&c) => row[j] = c,
                None => continue 'points,
            }
        }
        let product = row.iter().fold(1u128, |acc, &c| acc * u128::from(c));
        out.index.insert(key, out.points.len() as u32);
        out.points.push(LatticePoint::unpack(key));
        out.counts.extend_from_slice(&row);
        out.products.push(product);
    }
    Ok(out)
}

impl ProductField {
    /// Builds a field from explicit `(point, per-walk counts)` rows.
    pub fn from_entries(n: u64, m: usize, entries: &[(LatticePoint, Vec<u32>)]) -> Result<Self> {
        if m == 0 {
            return Err(precondition("need at least one walk"));
        }
        let mut out = ProductField {
            n,
            m,
            points: Vec::new(),
            counts: Vec::new(),
            products: Vec::new(),
            index: FxHashMap::default(),
        };
        for (p, row) in entries {
            if row.len() != m {
                return Err(precondition(format!("row at {p:?} has {} counts, expected {m}", row.len())));
            }
            if row.contains(&0) {
                continue;
            }
            if out.index.insert(p.pack(), out.points.len() as u32).is_some() {
                return Err(precondition(format!("duplicate point {p:?}")));
            }
            out.points.push(*p);
            out.counts.extend_from_slice(row);
            out.products.push(row.iter().fold(1u128, |acc, &c| acc * u128::from(c)));
        }
        Ok(out)
    }

    pub fn horizon(&self) -> u64 {
        self.n
    }

    /// Number of walks `m`.
    pub fn walks(&self) -> usize {
        self.m
    }

    /// Size of the common support.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn product(&self, p: LatticePoint) -> Option<u128> {
        self.index.get(&p.pack()).map(|&i| self.products[i as usize])
    }

    pub fn counts(&self, p: LatticePoint) -> Option<&[u32]> {
        self.index.get(&p.pack()).map(|&i| &self.counts[i as usize * self.m..(i as usize + 1) * self.m])
    }

    /// `(point, per-walk counts, product)` over the support.
    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, &[u32], u128)> + '_ {
        self.points
            .iter()
            .zip(self.counts.chunks_exact(self.m.max(1)))
            .zip(&self.products)
            .map(|((&p, c), &v)| (p, c, v))
    }

    pub fn products(&self) -> &[u128] {
        &self.products
    }

    pub fn max_product(&self) -> u128 {
        self.products.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{local_time_field, simulate_srw, WalkRun};
    use proptest::prelude::*;

    #[test]
    fn two_zero_step_walks() {
        let a = LocalTimeField::starting_at(LatticePoint::ORIGIN);
        let b = LocalTimeField::starting_at(LatticePoint::ORIGIN);
        let pf = product_local_time(&[&a, &b]).unwrap();
        assert_eq!(pf.len(), 1);
        assert_eq!(pf.product(LatticePoint::ORIGIN), Some(1));
    }

    #[test]
    fn disjoint_supports_give_empty_field() {
        let a = LocalTimeField::starting_at(LatticePoint::ORIGIN);
        let b = LocalTimeField::starting_at(LatticePoint::new(5, 5));
        assert!(product_local_time(&[&a, &b]).unwrap().is_empty());
    }

    #[test]
    fn single_walk_is_identity() {
        let f = local_time_field(&simulate_srw(4, 5000, LatticePoint::ORIGIN), 5000).unwrap();
        let pf = product_local_time(&[&f]).unwrap();
        assert_eq!(pf.len(), f.len());
        for (p, c) in f.iter() {
            assert_eq!(pf.product(p), Some(u128::from(c)));
        }
    }

    #[test]
    fn mismatched_horizons_rejected() {
        let run = simulate_srw(4, 100, LatticePoint::ORIGIN);
        let a = local_time_field(&run, 100).unwrap();
        let b = local_time_field(&run, 99).unwrap();
        assert!(product_local_time(&[&a, &b]).is_err());
        assert!(product_local_time(&[]).is_err());
    }

    #[test]
    fn injected_hand_product() {
        let w1 = WalkRun::injected(vec![(0, 0).into(), (1, 0).into(), (0, 0).into()]).unwrap();
        let w2 = WalkRun::injected(vec![(1, 0).into(), (0, 0).into(), (1, 0).into()]).unwrap();
        let a = local_time_field(&w1, 2).unwrap();
        let b = local_time_field(&w2, 2).unwrap();
        let pf = product_local_time(&[&a, &b]).unwrap();
        assert_eq!(pf.product(LatticePoint::ORIGIN), Some(2));
        assert_eq!(pf.product(LatticePoint::new(1, 0)), Some(2));
        assert_eq!(pf.counts(LatticePoint::ORIGIN), Some(&[2, 1][..]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn support_and_product_by_rescan(seeds in prop::collection::vec(any::<u64>(), 1..4), n in 0u64..3000) {
            let fields: Vec<LocalTimeField> = seeds
                .iter()
                .map(|&s| local_time_field(&simulate_srw(s, n, LatticePoint::ORIGIN), n).unwrap())
                .collect();
            let refs: Vec<&LocalTimeField> = fields.iter().collect();
            let pf = product_local_time(&refs).unwrap();
            // Brute-force rescan of the first map.
            let mut expected = 0usize;
            for (p, _) in fields[0].iter() {
                let counts: Vec<u32> = fields.iter().map(|f| f.get(p)).collect();
                if counts.iter().all(|&c| c > 0) {
                    expected += 1;
                    let prod: u128 = counts.iter().map(|&c| u128::from(c)).product();
                    prop_assert_eq!(pf.product(p), Some(prod));
                    prop_assert_eq!(pf.counts(p).unwrap(), &counts[..]);
                } else {
                    prop_assert_eq!(pf.product(p), None);
                }
            }
            prop_assert_eq!(pf.len(), expected);
            for (p, _, _) in pf.iter() {
                prop_assert!(fields.iter().all(|f| f.get(p) > 0));
            }
        }
    }
}
