use super::TreeDecomposition;
use crate::error::Result;

/// Rewrites `td` so that every bag has at most two children and introduces at
/// most one node. Existing bag ids are kept; helper bags get fresh ids.
pub fn make_semi_nice(td: &TreeDecomposition) -> Result<TreeDecomposition> {
    let k = td.num_bags();
    let mut bags: Vec<Vec<usize>> = td.bags().to_vec();
    let mut parent: Vec<Option<usize>> = vec![None; k];
    let mut attach: Vec<Option<usize>> = vec![None; k];

    for &b in td.preorder() {
        let mut above = attach[b];
        let introduced: Vec<usize> = match td.parent(b) {
            Some(p) => td.bag(b).iter().copied().filter(|&x| !td.contains(p, x)).collect(),
            None => td.bag(b).to_vec(),
        };
        if introduced.len() > 1 {
            let mut partial: Vec<usize> = td.bag(b).iter().copied().filter(|x| !introduced.contains(x)).collect();
            for &x in &introduced[..introduced.len() - 1] {
                partial.push(x);
                partial.sort_unstable();
                let id = bags.len();
                bags.push(partial.clone());
                parent.push(above);
                above = Some(id);
            }
        }
        parent[b] = above;

        let children = td.children(b);
        if children.len() <= 2 {
            for &c in children {
                attach[c] = Some(b);
            }
        } else {
            let mut holder = b;
            for (i, &c) in children.iter().enumerate() {
                attach[c] = Some(holder);
                let remaining = children.len() - i - 1;
                if remaining >= 2 {
                    let copy = bags.len();
                    bags.push(td.bag(b).to_vec());
                    parent.push(Some(holder));
                    holder = copy;
                } else if remaining == 1 {
                    attach[children[i + 1]] = Some(holder);
                    break;
                }
            }
        }
    }
    TreeDecomposition::from_parents(td.n_nodes(), bags, parent)
}
