//! Connected components of an epsilon-neighbourhood graph.

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
    }
}

/// Result of clustering a point cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Clustering {
    pub components: usize,
    pub epsilon: f64,
}

/// Counts components of the graph joining points closer than `epsilon`
/// (Euclidean). Without `epsilon`, uses three times the median
/// nearest-neighbour distance.
pub fn epsilon_components(points: &[Vec<f64>], epsilon: Option<f64>) -> Clustering {
    let k = points.len();
    if k <= 1 {
        return Clustering {
            components: k,
            epsilon: epsilon.unwrap_or(0.0),
        };
    }
    let dim = points[0].len();
    let flat: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
    let row = |i: usize| &flat[i * dim..(i + 1) * dim];

    // squared distances, upper triangle, row-major
    let mut dist = Vec::with_capacity(k * (k - 1) / 2);
    let mut nearest = vec![f64::INFINITY; k];
    for i in 0..k {
        let pi = row(i);
        for j in i + 1..k {
            let d2: f64 = pi.iter().zip(row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            dist.push(d2);
            nearest[i] = nearest[i].min(d2);
            nearest[j] = nearest[j].min(d2);
        }
    }
    let eps = epsilon.unwrap_or_else(|| {
        let mut nn = nearest.clone();
        nn.sort_by(f64::total_cmp);
        3.0 * nn[k / 2].sqrt()
    });
    let eps2 = eps * eps;

    let mut uf = UnionFind::new(k);
    let mut idx = 0;
    for i in 0..k {
        for j in i + 1..k {
            if dist[idx] <= eps2 {
                uf.union(i, j);
            }
            idx += 1;
        }
    }
    Clustering {
        components: uf.sets,
        epsilon: eps,
    }
}
