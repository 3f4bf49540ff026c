use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::types::{check_len, dominates_slices, ActiveMask, Individual};

/// Deb's fast non-dominated sort on the active coordinates of `points`.
///
/// Front 0 is the masked non-dominated set; indices inside a front are
/// increasing.
pub fn nondominated_fronts<V: AsRef<[f64]>>(points: &[V], mask: &ActiveMask) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        for q in p + 1..n {
            let (a, b) = (points[p].as_ref(), points[q].as_ref());
            if dominates_slices(a, b, mask) {
                dominates_list[p].push(q);
                dominated_by_count[q] += 1;
            } else if dominates_slices(b, a, mask) {
                dominates_list[q].push(p);
                dominated_by_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&p| dominated_by_count[p] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominates_list[p] {
                dominated_by_count[q] -= 1;
                if dominated_by_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Sorts a population; every active objective must already be evaluated.
pub fn fast_nondominated_sort(pop: &[Individual], mask: &ActiveMask) -> Result<Vec<Vec<usize>>> {
    for ind in pop {
        check_len(mask.len(), ind.num_objectives())?;
        ind.projected(mask)?;
    }
    let values: Vec<&[f64]> = pop.iter().map(|i| i.raw_values()).collect();
    Ok(nondominated_fronts(&values, mask))
}

/// Crowding distance of each member of `front` over the active objectives.
///
/// Boundary members get `+inf`. An objective whose values are all equal on the
/// front contributes nothing, boundaries included, so a fully degenerate front
/// gets all zeros. Fronts of one or two members are all boundary.
pub fn crowding_distance<V: AsRef<[f64]>>(front: &[V], mask: &ActiveMask) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for obj in mask.indices() {
        let value = |i: usize| front[i].as_ref()[obj];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let (lo, hi) = (value(order[0]), value(order[n - 1]));
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let i = order[w];
            if distance[i].is_finite() {
                distance[i] += (value(order[w + 1]) - value(order[w - 1])) / range;
            }
        }
    }
    distance
}
