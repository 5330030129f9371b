/// Constant-time lowest common ancestor via an Euler tour and a sparse table.
#[derive(Debug, Clone)]
pub struct Lca {
    first: Vec<usize>,
    euler: Vec<usize>,
    depth: Vec<usize>,
    table: Vec<Vec<usize>>,
}

impl Lca {
    pub fn new(root: usize, children: &[Vec<usize>], level: &[usize]) -> Self {
        let n = children.len();
        let mut first = vec![0; n];
        let mut euler = Vec::with_capacity(2 * n);
        let mut stack = vec![(root, 0usize)];
        while let Some((b, i)) = stack.pop() {
            if i == 0 {
                first[b] = euler.len();
            }
            euler.push(b);
            if i < children[b].len() {
                stack.push((b, i + 1));
                stack.push((children[b][i], 0));
            }
        }
        let depth: Vec<usize> = level.to_vec();
        let mut table = vec![(0..euler.len()).collect::<Vec<_>>()];
        let mut span = 1;
        while 2 * span <= euler.len() {
            let prev = table.last().unwrap();
            let row: Vec<usize> = (0..=euler.len() - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[euler[a]] <= depth[euler[b]] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            table.push(row);
            span *= 2;
        }
        Lca {
            first,
            euler,
            depth,
            table,
        }
    }

    pub fn query(&self, a: usize, b: usize) -> usize {
        let (mut l, mut r) = (self.first[a], self.first[b]);
        if l > r {
            std::mem::swap(&mut l, &mut r);
        }
        let k = usize::BITS - 1 - (r - l + 1).leading_zeros();
        let row = &self.table[k as usize];
        let (x, y) = (row[l], row[r + 1 - (1 << k)]);
        if self.depth[self.euler[x]] <= self.depth[self.euler[y]] {
            self.euler[x]
        } else {
            self.euler[y]
        }
    }
}
