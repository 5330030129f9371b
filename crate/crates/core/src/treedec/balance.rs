use super::{make_semi_nice, TreeDecomposition};
use crate::error::{Error, Result};

/// Ranks of all bags together with the induced rank tree.
#[derive(Debug, Clone)]
pub struct RankTree {
    pub rank: Vec<usize>,
    /// Parent in the rank tree: the separator of the component a bag was ranked in.
    pub h_parent: Vec<Option<usize>>,
    pub root: usize,
    /// The bag itself plus the lower-ranked bags bordering its component.
    pub nh: Vec<Vec<usize>>,
}

impl RankTree {
    pub fn max_rank(&self) -> usize {
        self.rank.iter().copied().max().unwrap_or(0)
    }

    pub fn max_nh(&self) -> usize {
        self.nh.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// `2·ceil(log_{3/2} n) + 2`.
pub fn rank_bound(n_bags: usize) -> usize {
    2 * log_three_halves_ceil(n_bags) + 2
}

fn log_three_halves_ceil(n: usize) -> usize {
    let mut k = 0;
    let mut reach = 1.0f64;
    while reach < n as f64 {
        reach *= 1.5;
        k += 1;
    }
    k
}

struct Frame {
    bags: Vec<usize>,
    entry: usize,
    balanced: bool,
    k: usize,
    h_parent: Option<usize>,
    depth: usize,
}

fn neighbours(td: &TreeDecomposition, b: usize) -> impl Iterator<Item = usize> + '_ {
    td.parent(b).into_iter().chain(td.children(b).iter().copied())
}

/// Children of `b` in the depth-first tree of the current component.
fn below<'a>(
    td: &'a TreeDecomposition,
    stamp: &'a [usize],
    dfs_parent: &'a [usize],
    epoch: usize,
    b: usize,
) -> impl Iterator<Item = usize> + 'a {
    neighbours(td, b).filter(move |&x| stamp[x] == epoch && dfs_parent[x] == b)
}

/// Assigns ranks by alternating balanced and boundary-splitting separators.
pub fn rank_bags(td: &TreeDecomposition) -> Result<RankTree> {
    let n = td.num_bags();
    let depth_limit = 4 * log_three_halves_ceil(n) + 8;
    let mut rank: Vec<Option<usize>> = vec![None; n];
    let mut h_parent = vec![None; n];
    let mut nh = vec![Vec::new(); n];
    let mut stamp = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut size = vec![0usize; n];
    let mut attached = vec![0usize; n];
    let mut dfs_parent = vec![usize::MAX; n];
    let mut epoch = 0;

    let mut work = vec![Frame {
        bags: (0..n).collect(),
        entry: td.root(),
        balanced: true,
        k: 0,
        h_parent: None,
        depth: 0,
    }];
    while let Some(frame) = work.pop() {
        if frame.depth > depth_limit {
            return Err(Error::NonTermination(frame.depth));
        }
        epoch += 1;
        for &b in &frame.bags {
            stamp[b] = epoch;
        }
        let boundary: Vec<usize> = {
            let mut v: Vec<usize> = frame
                .bags
                .iter()
                .flat_map(|&b| neighbours(td, b))
                .filter(|&x| rank[x].is_some())
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };

        let settle =
            |b: usize, rank: &mut Vec<Option<usize>>, h_parent: &mut Vec<Option<usize>>, nh: &mut Vec<Vec<usize>>| {
                rank[b] = Some(frame.k);
                h_parent[b] = frame.h_parent;
                let mut set = vec![b];
                set.extend(boundary.iter().copied());
                nh[b] = set;
            };

        if frame.bags.len() == 1 {
            settle(frame.bags[0], &mut rank, &mut h_parent, &mut nh);
            continue;
        }

        // Preorder of the component from its entry bag.
        let mut order = Vec::with_capacity(frame.bags.len());
        let mut stack = vec![frame.entry];
        dfs_parent[frame.entry] = usize::MAX;
        while let Some(b) = stack.pop() {
            pos[b] = order.len();
            order.push(b);
            let next: Vec<usize> = neighbours(td, b)
                .filter(|&x| stamp[x] == epoch && x != dfs_parent[b])
                .collect();
            for &c in next.iter().rev() {
                dfs_parent[c] = b;
                stack.push(c);
            }
        }
        debug_assert_eq!(order.len(), frame.bags.len());
        for &b in order.iter().rev() {
            size[b] = 1;
            attached[b] = neighbours(td, b).filter(|&x| rank[x].is_some()).count();
            for c in below(td, &stamp, &dfs_parent, epoch, b) {
                size[b] += size[c];
                attached[b] += attached[c];
            }
        }
        let total = order.len();
        let total_attached = boundary.len();
        let in_children = |b: usize| below(td, &stamp, &dfs_parent, epoch, b);

        let chosen = if frame.balanced {
            let score = |b: usize| {
                let below = in_children(b).map(|c| size[c]).max().unwrap_or(0);
                below.max(total - size[b])
            };
            order.iter().copied().min_by_key(|&b| (score(b), b))
        } else if total_attached >= 2 {
            let score = |b: usize| {
                let below = in_children(b).map(|c| attached[c]).max().unwrap_or(0);
                below.max(total_attached - attached[b])
            };
            order
                .iter()
                .copied()
                .find(|&b| score(b) <= 1)
                .or_else(|| order.iter().copied().min_by_key(|&b| score(b)))
        } else {
            None
        };

        let Some(sep) = chosen else {
            work.push(Frame {
                balanced: true,
                depth: frame.depth + 1,
                ..frame
            });
            continue;
        };
        settle(sep, &mut rank, &mut h_parent, &mut nh);

        let mut parts: Vec<(Vec<usize>, usize)> = in_children(sep)
            .map(|c| (order[pos[c]..pos[c] + size[c]].to_vec(), c))
            .collect();
        if sep != frame.entry {
            let (lo, hi) = (pos[sep], pos[sep] + size[sep]);
            let upper: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
            parts.push((upper, dfs_parent[sep]));
        }
        for (bags, entry) in parts.into_iter().rev() {
            work.push(Frame {
                bags,
                entry,
                balanced: !frame.balanced,
                k: frame.k + 1,
                h_parent: Some(sep),
                depth: frame.depth + 1,
            });
        }
    }
    let rank: Vec<usize> = rank.into_iter().map(|r| r.expect("every bag is ranked")).collect();
    let root = (0..n).find(|&b| h_parent[b].is_none()).unwrap_or(0);
    Ok(RankTree {
        rank,
        h_parent,
        root,
        nh,
    })
}

/// Balanced decomposition over the rank tree, before semi-nice conversion.
pub fn balance_raw(td: &TreeDecomposition, ranks: &RankTree) -> Result<TreeDecomposition> {
    let bags: Vec<Vec<usize>> = (0..td.num_bags())
        .map(|b| {
            let mut bag: Vec<usize> = ranks.nh[b].iter().flat_map(|&x| td.bag(x).iter().copied()).collect();
            bag.sort_unstable();
            bag.dedup();
            bag
        })
        .collect();
    TreeDecomposition::from_parents(td.n_nodes(), bags, ranks.h_parent.clone())
}

/// Balanced, semi-nice decomposition with logarithmic height.
pub fn balance_td(td: &TreeDecomposition) -> Result<TreeDecomposition> {
    let ranks = rank_bags(td)?;
    make_semi_nice(&balance_raw(td, &ranks)?)
}
