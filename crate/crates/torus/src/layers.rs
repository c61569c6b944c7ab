use crate::config::{Torus, TorusError};
use crate::net::{MarkerSet, PointGrid};
use std::collections::BTreeMap;

/// Classification of the dense net by the translation joining each marker to
/// the sparse subnet: a marker lands in the layer of the smallest offset `g`
/// (by distance, then lexicographically) with `marker + g` in the subnet.
/// Layer 0 is exactly the subnet itself (offset zero).
#[derive(Debug, Clone)]
pub struct Layers {
    /// Offsets actually used, sorted ascending by (sup-norm, lex).
    pub keys: Vec<Vec<i64>>,
    /// For every parent marker, the rank of its offset in `keys`.
    pub of_marker: Vec<u32>,
}

fn key_order(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let na = a.iter().map(|x| x.abs()).max().unwrap_or(0);
    let nb = b.iter().map(|x| x.abs()).max().unwrap_or(0);
    na.cmp(&nb).then_with(|| a.cmp(b))
}

/// Assigns every marker of `s1` to a layer. The search ball has radius
/// `r1 + r2`; the subnet's covering radius keeps it nonempty.
pub fn layer_markers(
    torus: Torus,
    s1: &MarkerSet,
    s2: &MarkerSet,
    r1: i64,
    r2: i64,
) -> Result<Layers, TorusError> {
    let ball = r1 + r2;
    let mut subnet = PointGrid::new(torus, ball);
    for p in &s2.points {
        subnet.insert(p.clone());
    }
    let mut best: Vec<Option<Vec<i64>>> = vec![None; s1.points.len()];
    for (i, z) in s1.points.iter().enumerate() {
        subnet.for_each_within(z, ball, |_, q| {
            let g = torus.rel(z, q);
            if best[i]
                .as_ref()
                .map_or(true, |cur| key_order(&g, cur) == std::cmp::Ordering::Less)
            {
                best[i] = Some(g);
            }
        });
    }
    let mut ranks: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
    let mut keys: Vec<Vec<i64>> = Vec::new();
    for (i, g) in best.iter().enumerate() {
        let g = g.as_ref().ok_or_else(|| {
            TorusError::Net(format!(
                "marker {:?} has no subnet point within {ball}",
                s1.points[i]
            ))
        })?;
        if !ranks.contains_key(g) {
            keys.push(g.clone());
            ranks.insert(g.clone(), 0);
        }
    }
    keys.sort_by(|a, b| key_order(a, b));
    for (rank, k) in keys.iter().enumerate() {
        *ranks.get_mut(k).unwrap() = rank as u32;
    }
    let of_marker = best
        .into_iter()
        .map(|g| ranks[&g.unwrap()])
        .collect::<Vec<_>>();
    Ok(Layers { keys, of_marker })
}

impl Layers {
    /// Re-derives every defining property from scratch: the offset of each
    /// marker reaches the subnet, is minimal in the (norm, lex) order, layer
    /// 0 is the subnet, and distinct markers of one layer are far apart.
    pub fn verify(
        &self,
        torus: Torus,
        s1: &MarkerSet,
        s2: &MarkerSet,
        r1: i64,
        r2: i64,
    ) -> Result<(), TorusError> {
        let fail = |msg: String| Err(TorusError::Verification(msg));
        if self.of_marker.len() != s1.points.len() {
            return fail("layer assignment does not cover the net".into());
        }
        if self.keys.is_empty() || self.keys[0].iter().any(|&c| c != 0) {
            return fail("layer 0 must correspond to the zero offset".into());
        }
        for w in self.keys.windows(2) {
            if key_order(&w[0], &w[1]) != std::cmp::Ordering::Less {
                return fail("layer keys are not strictly sorted".into());
            }
        }
        let ball = r1 + r2;
        let mut subnet = PointGrid::new(torus, ball);
        for p in &s2.points {
            subnet.insert(p.clone());
        }
        let in_subnet = |p: &[i64]| -> bool {
            let mut found = false;
            subnet.for_each_within(p, 0, |_, _| found = true);
            found
        };
        for (i, z) in s1.points.iter().enumerate() {
            let g = &self.keys[self.of_marker[i] as usize];
            let target = torus.norm_point(&z.iter().zip(g).map(|(a, b)| a + b).collect::<Vec<_>>());
            if !in_subnet(&target) {
                return fail(format!("offset of marker {z:?} does not reach the subnet"));
            }
            if g.iter().map(|c| c.abs()).max().unwrap() > ball {
                return fail(format!("offset {g:?} exceeds the search ball {ball}"));
            }
            let mut strictly_smaller = None;
            subnet.for_each_within(z, ball, |_, q| {
                let h = torus.rel(z, q);
                if key_order(&h, g) == std::cmp::Ordering::Less {
                    strictly_smaller = Some(h);
                }
            });
            if let Some(h) = strictly_smaller {
                return fail(format!(
                    "marker {z:?} assigned offset {g:?} but {h:?} is smaller"
                ));
            }
            if (self.of_marker[i] == 0) != in_subnet(z) {
                return fail(format!("layer-0 membership of {z:?} disagrees with the subnet"));
            }
        }
        // Within one layer, markers inherit the subnet separation.
        let sep = r2 - 2 * r1;
        let mut grid = PointGrid::new(torus, sep);
        for p in &s1.points {
            grid.insert(p.clone());
        }
        for (i, z) in s1.points.iter().enumerate() {
            let mut bad = None;
            grid.for_each_within(z, sep, |id, q| {
                if id as usize != i && self.of_marker[id as usize] == self.of_marker[i] {
                    bad = Some(q.to_vec());
                }
            });
            if let Some(q) = bad {
                return fail(format!(
                    "markers {z:?} and {q:?} share a layer but are within {sep}"
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{greedy_net, refine_net};

    #[test]
    fn layering_verifies_on_a_small_torus() {
        let torus = Torus { n: 2, m: 120 };
        let s1 = greedy_net(torus, 3, 5).unwrap();
        let s2 = refine_net(torus, &s1, 3 * 8 - 2 * 3, 5).unwrap();
        let layers = layer_markers(torus, &s1, &s2, 3, 24).unwrap();
        layers.verify(torus, &s1, &s2, 3, 24).unwrap();
        let zero = layers.of_marker.iter().filter(|&&k| k == 0).count();
        assert_eq!(zero, s2.points.len());
        assert!(layers.keys.len() > 1);
    }
}
